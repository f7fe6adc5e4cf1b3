use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use coxlab::relhyp::{theoretical_bounds, verify_in_ball, Caps, Verdict};
use coxlab::syllable::{forced_analysis, p1_decomposition, syllabify, ForcingMode, SyllableSeq};
use coxlab::{
    build_ball_with, choose_admissible, parse_diagram_file, reduce, validate_choice, AdmissibilityMode, ConedBall,
    DiagonalChoice, Diagram, Execution, HalfInt,
};

/// Exit status for a run that completed without verifying its claim.
const UNVERIFIED: u8 = 1;
/// Exit status for usage and input errors.
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "coxlab",
    version,
    about = "Right-angled Coxeter groups and coned-off Cayley graphs"
)]
struct Cli {
    /// Seed for randomized corpora; every current subcommand is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squares, hyperbolicity, admissible choices and constants.
    Analyze { file: PathBuf },
    /// Normal form, geodesic check and syllables of a word.
    Normalize {
        file: PathBuf,
        #[command(flatten)]
        choice: ChoiceArgs,
        /// Generators, space separated or run together when single characters.
        #[arg(required = true, num_args = 1..)]
        word: Vec<String>,
    },
    /// Fellow-travelling sweep of coned-off geodesics.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        choice: ChoiceArgs,
        /// Largest Cayley distance between endpoints.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        radius: u64,
        /// Maximum number of elements in the ball.
        #[arg(long, default_value_t = 50_000_000, value_parser = positive)]
        cap_ball: usize,
        /// Maximum number of geodesics per endpoint pair.
        #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
        cap_geodesics: usize,
        /// State budget for searches.
        #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
        budget: usize,
        /// Report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forcing table of a word, comparing the exact and fast analyses.
    Forced {
        file: PathBuf,
        #[command(flatten)]
        choice: ChoiceArgs,
        /// Also print the forced/free split of the first k syllables.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 50_000_000, value_parser = positive)]
        cap_ball: usize,
        #[arg(required = true, num_args = 1..)]
        word: Vec<String>,
    },
    /// Exports a ball of the coned-off Cayley graph.
    Export {
        file: PathBuf,
        #[command(flatten)]
        choice: ChoiceArgs,
        /// Ball radius.
        #[arg(long, default_value_t = 1)]
        ball: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, default_value_t = 50_000_000, value_parser = positive)]
        cap_ball: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ChoiceArgs {
    /// Choose diagonals automatically instead of reading them from the file.
    #[arg(long)]
    auto_diagonals: bool,
    #[arg(long, value_enum, default_value_t = Mode::Strict)]
    mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    CollapseEqual,
}

impl From<Mode> for AdmissibilityMode {
    fn from(m: Mode) -> AdmissibilityMode {
        match m {
            Mode::Strict => AdmissibilityMode::Strict,
            Mode::CollapseEqual => AdmissibilityMode::CollapseEqual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let exec = match cli.workers {
        Some(0) => bail!("--workers must be positive"),
        Some(1) => Execution::Sequential,
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring worker threads")?;
            Execution::Parallel
        }
        None => Execution::Auto,
    };
    match cli.command {
        Command::Analyze { file } => analyze(&file),
        Command::Normalize { file, choice, word } => normalize(&file, &choice, &word.join(" ")),
        Command::Verify {
            file,
            choice,
            radius,
            cap_ball,
            cap_geodesics,
            budget,
            out,
        } => {
            let caps = Caps {
                ball: cap_ball,
                geodesics: cap_geodesics,
                budget,
                ..Caps::default()
            };
            verify(&file, &choice, radius as usize, &caps, exec, out.as_deref())
        }
        Command::Forced {
            file,
            choice,
            k,
            cap_ball,
            word,
        } => forced(&file, &choice, &word.join(" "), k, cap_ball, exec),
        Command::Export {
            file,
            choice,
            ball,
            format,
            cap_ball,
            out,
        } => export(&file, &choice, ball, format, cap_ball, exec, out.as_deref()),
    }
}

fn load(file: &Path) -> Result<(Diagram, Option<DiagonalChoice>)> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let (d, pairs) = parse_diagram_file(&text).with_context(|| format!("parsing {}", file.display()))?;
    let choice = match pairs {
        Some(p) => Some(DiagonalChoice::from_pairs(&d, &p)?),
        None => None,
    };
    Ok((d, choice))
}

/// The declared choice, or an automatic one when requested.
fn resolve_choice(d: &Diagram, declared: Option<DiagonalChoice>, args: &ChoiceArgs) -> Result<DiagonalChoice> {
    if args.auto_diagonals {
        return choose_admissible(d, args.mode.into())
            .context("no admissible choice of diagonals exists in the requested mode");
    }
    Ok(declared.unwrap_or_else(DiagonalChoice::empty))
}

fn pair_names(d: &Diagram, c: &DiagonalChoice) -> Vec<[String; 2]> {
    c.pairs()
        .iter()
        .map(|p| [d.name(p.lo()).to_string(), d.name(p.hi()).to_string()])
        .collect()
}

fn analyze(file: &Path) -> Result<ExitCode> {
    let (d, declared) = load(file)?;
    let squares = d.find_squares();
    let strict = choose_admissible(&d, AdmissibilityMode::Strict);
    let collapse = choose_admissible(&d, AdmissibilityMode::CollapseEqual);
    let constants_for = |c: &DiagonalChoice| {
        let b = theoretical_bounds(&d, c);
        json!({ "M": b.m, "Dc": b.dc })
    };
    let mut out = json!({
        "generators": d.len(),
        "squares": squares.len(),
        "square_list": squares
            .iter()
            .map(|s| s.cycle().iter().map(|&g| d.name(g).to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "hyperbolic": d.is_hyperbolic(),
        "commuting_degree": d.commuting_degree(),
        "admissible_strict": strict.is_some(),
        "admissible_collapse_equal": collapse.is_some(),
        "choice_strict": strict.as_ref().map(|c| pair_names(&d, c)),
        "choice_collapse_equal": collapse.as_ref().map(|c| pair_names(&d, c)),
        "constants": strict.as_ref().or(collapse.as_ref()).map(constants_for),
    });
    if let Some(c) = declared {
        let r = validate_choice(&d, &c)?;
        out["declared"] = json!({
            "pairs": pair_names(&d, &c),
            "covers_all": r.covers_all,
            "admissible_strict": r.admissible_strict,
            "admissible_collapse_equal": r.admissible_collapse,
            "constants": constants_for(&c),
        });
    }
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn normalize(file: &Path, args: &ChoiceArgs, word: &str) -> Result<ExitCode> {
    let (d, declared) = load(file)?;
    let c = resolve_choice(&d, declared, args)?;
    let w = d.parse_word(word)?;
    let nf = reduce(&d, &w);
    let geodesic = nf.len() == w.len();
    println!("normal form: {}", d.render(nf.letters()));
    println!("length: {}", nf.len());
    println!("geodesic: {geodesic}");
    if !c.is_empty() {
        let source = if geodesic { &w } else { nf.word() };
        let s = syllabify(&d, &c, source);
        println!("syllables: {} ({})", s.render(&d), s.len());
    }
    Ok(ExitCode::SUCCESS)
}

/// Cache file for a ball, keyed by diagram, choice and radius.
fn cache_path(d: &Diagram, c: &DiagonalChoice, radius: usize) -> Option<PathBuf> {
    let dir = std::env::var_os("COXLAB_CACHE")?;
    let assignment: Vec<Value> = c
        .assignment()
        .iter()
        .map(|(s, p)| {
            json!([
                s.cycle().iter().map(|&g| d.name(g)).collect::<Vec<_>>(),
                [d.name(p.lo()), d.name(p.hi())]
            ])
        })
        .collect();
    let key = json!({ "diagram": d.to_json(None), "assignment": assignment, "radius": radius });
    let digest = Sha256::digest(key.to_string().as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Some(PathBuf::from(dir).join(format!("ball-{hex}.json")))
}

fn ball(d: &Diagram, c: &DiagonalChoice, radius: usize, cap: usize, exec: Execution) -> Result<ConedBall> {
    let path = cache_path(d, c, radius);
    if let Some(p) = path.as_ref().filter(|p| p.exists()) {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let cached = ConedBall::from_json(&text).with_context(|| format!("loading {}", p.display()))?;
        if cached.num_elements() <= cap {
            return Ok(cached);
        }
    }
    let built = build_ball_with(d, c, radius, cap, exec)?;
    if let Some(p) = path {
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&p, built.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(built)
}

fn verify(
    file: &Path,
    args: &ChoiceArgs,
    radius: usize,
    caps: &Caps,
    exec: Execution,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let (d, declared) = load(file)?;
    let c = resolve_choice(&d, declared, args)?;
    if !validate_choice(&d, &c)?.covers_all {
        bail!("the diagonal choice must assign a diagonal to every square");
    }
    let b = ball(&d, &c, 3 * radius, caps.ball, exec)?;
    let report = verify_in_ball(&b, radius, caps, exec)?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    for x in &report.radii {
        eprintln!(
            "r = {}: {} pairs, {} geodesics, delta = {}, witness {} -> {}, guard failures {}, cap failures {}",
            x.r,
            x.pairs,
            x.geodesics,
            HalfInt::from_doubled(x.delta_doubled),
            x.witness[0],
            x.witness[1],
            x.guard_failures,
            x.cap_failures
        );
    }
    eprintln!(
        "verdict: {} (M = {}, Dc = {})",
        serde_json::to_value(report.verdict)?.as_str().unwrap_or_default(),
        report.constants.m,
        report.constants.dc
    );
    Ok(if report.verdict == Verdict::Plateau {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(UNVERIFIED)
    })
}

fn names(d: &Diagram, s: &SyllableSeq, set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(|&i| plain(d, s, i)).collect();
    format!("{{{}}}", items.join(","))
}

fn plain(d: &Diagram, s: &SyllableSeq, i: usize) -> String {
    d.render_compact(s.syllables()[i].letters())
}

fn forced(
    file: &Path,
    args: &ChoiceArgs,
    word: &str,
    k: Option<usize>,
    cap: usize,
    exec: Execution,
) -> Result<ExitCode> {
    let (d, declared) = load(file)?;
    let c = resolve_choice(&d, declared, args)?;
    let w = d.parse_word(word)?;
    let s = syllabify(&d, &c, &w);
    println!("syllables: {} ({})", s.render(&d), s.len());

    match build_ball_with(&d, &c, w.len() + 1, cap, exec)
        .map_err(anyhow::Error::from)
        .and_then(|b| Ok(b.is_nice(&s)?))
    {
        Ok(true) => {}
        Ok(false) => eprintln!("warning: the word is not nice"),
        Err(e) => eprintln!("warning: niceness not checked: {e}"),
    }

    let oracle = forced_analysis(&d, &s, ForcingMode::Oracle, coxlab::relhyp::FORCING_CAP)?;
    let fast = forced_analysis(&d, &s, ForcingMode::Fast, coxlab::relhyp::FORCING_CAP)?;
    for i in 0..s.len() {
        println!(
            "{}: m={}, preceded-by {}",
            plain(&d, &s, i),
            oracle.min_forcing[i],
            names(&d, &s, &oracle.can_precede[i])
        );
    }
    if let Some(k) = k {
        let (p1, p2) = p1_decomposition(&d, &s, &oracle, k)?;
        println!("k={k}: forced {} | free {}", p1.render(&d), p2.render(&d));
    }
    let mut agree = true;
    for i in 0..s.len() {
        if oracle.min_forcing[i] != fast.min_forcing[i] || oracle.can_precede[i] != fast.can_precede[i] {
            agree = false;
            eprintln!(
                "fast analysis differs at {}: m={} vs {}, preceded-by {} vs {}",
                plain(&d, &s, i),
                oracle.min_forcing[i],
                fast.min_forcing[i],
                names(&d, &s, &oracle.can_precede[i]),
                names(&d, &s, &fast.can_precede[i])
            );
        }
    }
    Ok(if agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(UNVERIFIED)
    })
}

fn export(
    file: &Path,
    args: &ChoiceArgs,
    radius: usize,
    format: Format,
    cap: usize,
    exec: Execution,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let (d, declared) = load(file)?;
    let c = resolve_choice(&d, declared, args)?;
    let b = ball(&d, &c, radius, cap, exec)?;
    let text = match format {
        Format::Dot => b.to_dot(),
        Format::Json => b.to_json(),
    };
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
