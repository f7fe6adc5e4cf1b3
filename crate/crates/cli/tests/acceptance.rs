//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Oracles here are written independently of the library.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use coxlab::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn word(d: &Diagram, s: &str) -> Word {
    d.parse_word(s).unwrap()
}

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let t = start.elapsed();
    if t <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; runtime {:.2?} over {:?}", t, limit))
    }
}

/// Independent square detector: a 4-subset induces a 4-cycle iff it spans
/// exactly four edges with every vertex of degree two.
fn brute_force_has_square(n: usize, adj: &[Vec<bool>]) -> bool {
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let vs = [a, b, c, d];
                    let degs: Vec<usize> = vs
                        .iter()
                        .map(|&x| vs.iter().filter(|&&y| y != x && adj[x][y]).count())
                        .collect();
                    if degs.iter().all(|&k| k == 2) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn hyperbolicity_suite() -> Outcome {
    let start = Instant::now();
    if !fixtures::pentagon().is_hyperbolic() {
        return Err("pentagon reported non-hyperbolic".into());
    }
    if fixtures::square().is_hyperbolic() {
        return Err("square reported hyperbolic".into());
    }
    let names: Vec<String> = (0..8).map(|i| format!("s{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut disagreements = 0;
    let mut hyperbolic = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let p: f64 = rng.gen_range(0.2..0.8);
        let mut adj = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                    edges.push((names[i].as_str(), names[j].as_str()));
                }
            }
        }
        let refs: Vec<&str> = names[..n].iter().map(String::as_str).collect();
        let d = Diagram::from_edges(&refs, &edges).map_err(|e| e.to_string())?;
        let expected = !brute_force_has_square(n, &adj);
        hyperbolic += expected as usize;
        if d.is_hyperbolic() != expected {
            disagreements += 1;
        }
    }
    if disagreements > 0 {
        return Err(format!(
            "{disagreements}/200 random diagrams disagree with the 4-subset oracle"
        ));
    }
    within(
        Duration::from_secs(5),
        start,
        format!("pentagon hyperbolic, square not; 200/200 random diagrams agree ({hyperbolic} hyperbolic)"),
    )
}

fn example_fidelity() -> Outcome {
    let start = Instant::now();
    let q = fixtures::square();
    let qc = fixtures::square_choice(&q);
    let ws: Vec<Word> = ["acab", "acba", "baca"].iter().map(|s| word(&q, s)).collect();
    if !ws.iter().all(|w| is_geodesic(&q, w)) {
        return Err("a worked-example word in the square is not geodesic".into());
    }
    if !ws.iter().all(|w| equals(&q, w, &ws[0])) {
        return Err("worked-example words in the square are not equal".into());
    }
    let ball = build_ball(&q, &qc, 6, 1_000_000).map_err(|e| e.to_string())?;
    let nice = |s: &str| ball.is_nice(&syllabify(&q, &qc, &word(&q, s)));
    let (acab, acba, baca) = (
        nice("acab").map_err(|e| e.to_string())?,
        nice("acba").map_err(|e| e.to_string())?,
        nice("baca").map_err(|e| e.to_string())?,
    );
    if !acab || acba {
        return Err(format!("is_nice(acab)={acab}, is_nice(acba)={acba}"));
    }

    let f = fixtures::example_f();
    let fc = fixtures::example_f_choice(&f);
    let report = validate_choice(&f, &fc).map_err(|e| e.to_string())?;
    if !report.covers_all {
        return Err("the F choice does not cover every square".into());
    }
    let fw = word(&f, "acabedbfbc");
    if !is_geodesic(&f, &fw) {
        return Err("the F example word is not geodesic".into());
    }
    let s = syllabify(&f, &fc, &fw);
    if s.len() != 6 {
        return Err(format!("expected 6 syllables, got {}", s.len()));
    }
    let names: Vec<String> = s.syllables().iter().map(|x| x.render(&f)).collect();
    let idx = |n: &str| names.iter().position(|x| x == n);
    let a = forced_analysis(&f, &s, ForcingMode::Oracle, 1_000_000).map_err(|e| e.to_string())?;
    let d = idx("d").ok_or("no syllable d")?;
    if a.min_forcing[d] != 5 {
        return Err(format!("d is {}-forced, expected 5", a.min_forcing[d]));
    }
    let want: BTreeSet<usize> = ["[aca]", "b", "e", "c"].iter().filter_map(|n| idx(n)).collect();
    if want.len() != 4 || a.can_precede[d] != want {
        return Err(format!("syllables that can precede d: {:?}", a.can_precede[d]));
    }
    let aca = idx("[aca]").ok_or("no syllable [aca]")?;
    if !a.can_precede[aca].contains(&idx("b").unwrap())
        || ["e", "d", "c", "[bfb]"]
            .iter()
            .any(|n| a.can_precede[aca].contains(&idx(n).unwrap()))
    {
        return Err(format!("syllables that can precede [aca]: {:?}", a.can_precede[aca]));
    }
    within(
        Duration::from_secs(10),
        start,
        format!(
            "square words equal and geodesic, nice acab/acba/baca = {acab}/{acba}/{baca}; \
             F word {} with d 5-forced",
            s.render(&f)
        ),
    )
}

/// Length of the element spelled by `w`, by deleting letter pairs separated
/// only by letters commuting with them until none remain.
fn oracle_length(d: &Diagram, w: &[Gen]) -> usize {
    let mut w = w.to_vec();
    'outer: loop {
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[j] == w[i] {
                    w.remove(j);
                    w.remove(i);
                    continue 'outer;
                }
                if !d.commutes(w[i], w[j]) {
                    break;
                }
            }
        }
        return w.len();
    }
}

fn letter_counts_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut checked = 0;
    for d in [fixtures::square(), fixtures::example_f(), fixtures::pentagon()] {
        let gens: Vec<Gen> = d.gens().collect();
        for _ in 0..500 {
            let len = rng.gen_range(0..=10);
            let w = Word::new((0..len).map(|_| gens[rng.gen_range(0..gens.len())]).collect());
            let reps = enumerate_geodesics(&d, &w, 1_000_000).map_err(|e| e.to_string())?;
            let target = oracle_length(&d, w.letters());
            let counts = |r: &Word| {
                let mut c = vec![0usize; d.len()];
                r.letters().iter().for_each(|g| c[g.idx()] += 1);
                c
            };
            let first = counts(reps.iter().next().unwrap());
            for r in &reps {
                if r.len() != target || oracle_length(&d, r.letters()) != target || !equals(&d, r, &w) {
                    return Err(format!(
                        "{} is not a geodesic for {}",
                        d.render(r.letters()),
                        d.render(w.letters())
                    ));
                }
                if counts(r) != first {
                    return Err(format!("letter counts differ for {}", d.render(w.letters())));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("1500 words, {checked} representatives, 0 violations"))
}

/// Geodesics from the identity to every element within `r` of a radius-12 ball.
fn sweep_nice(
    d: &Diagram,
    c: &DiagonalChoice,
    r: usize,
    per_word: &mut dyn FnMut(&ConedBall, &SyllableSeq) -> std::result::Result<(), String>,
    per_path: &mut dyn FnMut(&ConedBall, &BlockSeq) -> std::result::Result<(), String>,
) -> std::result::Result<(usize, usize), String> {
    let ball = build_ball(d, c, 12, 50_000_000).map_err(|e| e.to_string())?;
    let (mut paths, mut words) = (0, 0);
    for g in ball.elements_within(r) {
        let mut seen = BTreeSet::new();
        for p in ball
            .enumerate_hat_geodesics(0, g, 1_000_000)
            .map_err(|e| e.to_string())?
        {
            let bs = ball.block_decompose(&p).map_err(|e| e.to_string())?;
            per_path(&ball, &bs)?;
            paths += 1;
            let s = bs.to_syllables(ball.pairs()).map_err(|e| e.to_string())?;
            if seen.insert(s.clone()) {
                per_word(&ball, &s)?;
                words += 1;
            }
        }
    }
    Ok((paths, words))
}

fn cancellation_suite() -> Outcome {
    let start = Instant::now();
    let mut summary = Vec::new();
    for (name, (d, c)) in [
        ("Q", fixtures::load(fixtures::SQUARE)),
        ("F", fixtures::load(fixtures::EXAMPLE_F)),
    ] {
        let mut worst = 0;
        let (paths, _) = sweep_nice(&d, &c, 4, &mut |_, _| Ok(()), &mut |ball, bs| {
            let rep = geodesify_bar(ball.diagram(), bs).map_err(|e| e.to_string())?;
            for (b, &k) in bs.blocks.iter().zip(&rep.cancellations_per_block) {
                let allowed = if b.is_nontrivial_hat() { 2 } else { 0 };
                if k > allowed {
                    return Err(format!("{} cancellations in {}", k, bs.render(ball.diagram())));
                }
                worst = worst.max(k);
            }
            Ok(())
        })?;
        summary.push(format!("{name}: {paths} geodesics, max {worst} per block"));
    }
    within(Duration::from_secs(600), start, summary.join(", "))
}

fn forcing_suite() -> Outcome {
    let mut summary = Vec::new();
    for (name, (d, c)) in [
        ("Q", fixtures::load(fixtures::SQUARE)),
        ("F", fixtures::load(fixtures::EXAMPLE_F)),
    ] {
        let m = theoretical_bounds(&d, &c).m;
        if m != 1 {
            return Err(format!("{name}: M = {m}, expected 1"));
        }
        let mut worst = 0;
        let (_, words) = sweep_nice(
            &d,
            &c,
            4,
            &mut |ball, s| {
                let r = check_forcing_bound(ball.diagram(), ball.choice(), s).map_err(|e| e.to_string())?;
                worst = worst.max(r.max_gap);
                Ok(())
            },
            &mut |_, _| Ok(()),
        )?;
        summary.push(format!("{name}: {words} nice words, max gap {worst} ≤ M = 1"));
    }
    Ok(summary.join(", "))
}

fn deltas(rep: &VerificationReport) -> String {
    rep.radii
        .iter()
        .map(|x| HalfInt::from_doubled(x.delta_doubled).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Radius of the supporting sweep, on a ball of radius `2·WIDE + 1`.
const WIDE: usize = 5;

/// Plateau check at the required radius, with a wider guarded sweep
/// appended to the line as supporting detail.
fn plateau_check(cases: &[(&str, &str, usize)], limit: Option<Duration>) -> Outcome {
    let start = Instant::now();
    let caps = Caps::default();
    let mut parts = Vec::new();
    let mut failed = false;
    for &(name, text, r) in cases {
        let (d, c) = fixtures::load(text);
        let rep = verify_papasoglu(&d, &c, r, &caps).map_err(|e| e.to_string())?;
        let ok = rep.verdict == Verdict::Plateau && rep.guard_failures() == 0;
        failed |= !ok;
        let mut part = format!(
            "{name} r≤{r}: δ = [{}], guard failures {}, verdict {:?}",
            deltas(&rep),
            rep.guard_failures(),
            rep.verdict
        );
        if !ok {
            let ball = build_ball(&d, &c, 2 * WIDE + 1, caps.ball).map_err(|e| e.to_string())?;
            let wide = verify_in_ball(&ball, WIDE, &caps, Execution::Auto).map_err(|e| e.to_string())?;
            part.push_str(&format!(
                " (wider guarded sweep r≤{WIDE}: δ = [{}], guard failures {}, verdict {:?})",
                deltas(&wide),
                wide.guard_failures(),
                wide.verdict
            ));
        }
        parts.push(part);
    }
    let detail = parts.join("; ");
    if failed {
        return Err(detail);
    }
    match limit {
        Some(l) => within(l, start, detail),
        None => Ok(detail),
    }
}

fn admissible_plateau() -> Outcome {
    plateau_check(
        &[("Q", fixtures::SQUARE, 4), ("F", fixtures::EXAMPLE_F, 4)],
        Some(Duration::from_secs(1800)),
    )
}

fn general_plateau() -> Outcome {
    let (k, kc) = fixtures::load(fixtures::K23);
    let strict = validate_choice(&k, &kc).map_err(|e| e.to_string())?;
    if strict.admissible_strict || strict.admissible_collapse {
        return Err("the K2,3 choice is admissible".into());
    }
    plateau_check(&[("K2,3", fixtures::K23, 3), ("L2", fixtures::EXCHANGE_L2, 3)], None)
}

fn connection_suite() -> Outcome {
    let mut summary = Vec::new();
    for (name, text) in [
        ("Q", fixtures::SQUARE),
        ("F", fixtures::EXAMPLE_F),
        ("L2", fixtures::EXCHANGE_L2),
    ] {
        let (d, c) = fixtures::load(text);
        let ball = build_ball(&d, &c, 9, 50_000_000).map_err(|e| e.to_string())?;
        let (mut pairs, mut longest) = (0, 0);
        for g in ball.elements_within(3) {
            let paths = ball
                .enumerate_hat_geodesics(0, g, 1_000_000)
                .map_err(|e| e.to_string())?;
            for i in 0..paths.len() {
                for j in 0..paths.len() {
                    if i == j {
                        continue;
                    }
                    match connect_geodesics(&ball, &paths[i], &paths[j], relhyp::DEFAULT_BUDGET) {
                        Ok(Some(moves)) => longest = longest.max(moves.len()),
                        Ok(None) => {
                            return Err(format!(
                                "{name}: no connection between two geodesics to {}",
                                ball.render_vertex(HatVertex::Element(g))
                            ))
                        }
                        Err(e) => return Err(format!("{name}: {e}")),
                    }
                    pairs += 1;
                }
            }
        }
        summary.push(format!("{name}: {pairs}/{pairs} ordered pairs, ≤ {longest} moves"));
    }
    Ok(summary.join(", "))
}

fn constants() -> Outcome {
    let q = fixtures::square();
    let f = fixtures::example_f();
    let got = (
        q.compute_m(&fixtures::square_choice(&q)),
        f.compute_m(&fixtures::example_f_choice(&f)),
        q.commuting_degree(),
    );
    if got == (1, 1, 2) {
        Ok("M(Q) = 1, M(F) = 1, commuting degree of Q = 2".into())
    } else {
        Err(format!(
            "(M(Q), M(F), commuting degree of Q) = {got:?}, expected (1, 1, 2)"
        ))
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("hyperbolicity test agrees with brute force", hyperbolicity_suite),
        ("worked examples reproduce", example_fidelity),
        ("geodesic representatives share letter counts", letter_counts_suite),
        ("at most two cancellations per block", cancellation_suite),
        ("free syllables bounded by M", forcing_suite),
        ("plateau for admissible choices", admissible_plateau),
        ("plateau for non-admissible choices", general_plateau),
        ("geodesics connected by moves", connection_suite),
        ("constants", constants),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({t:.2?})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{}] {name}: {detail} ({t:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
