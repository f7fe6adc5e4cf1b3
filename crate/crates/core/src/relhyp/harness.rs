//! Fellow-travelling sweep: for every element `g` within Cayley radius `r`
//! of the identity, every pair of coned-off geodesics from the identity to
//! `g` must stay within a uniform Hausdorff distance. Left-invariance lets
//! the identity stand in for an arbitrary first endpoint.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::{theoretical_bounds, Bounds};
use crate::coned::{build_ball_with, positions, render_element, settle, ConedBall, HatVertex, Lookup};
use crate::diagram::{validate_choice, DiagonalChoice, Diagram};
use crate::error::{CoxError, Result};
use crate::exec::{self, Execution};
use crate::halfint::HalfInt;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Caps {
    /// Maximum number of element vertices in the ball.
    pub ball: usize,
    /// Maximum number of geodesics enumerated per endpoint pair.
    pub geodesics: usize,
    /// State budget for connection searches.
    pub budget: usize,
    /// Wall-clock limit per endpoint pair.
    pub pair_seconds: f64,
}

impl Default for Caps {
    fn default() -> Caps {
        Caps {
            ball: 50_000_000,
            geodesics: 1_000_000,
            budget: super::DEFAULT_BUDGET,
            pair_seconds: 60.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Plateau,
    NoPlateau,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadiusRecord {
    pub r: usize,
    /// Endpoint pairs `(ε, g)` with `|g| ≤ r`.
    pub pairs: usize,
    pub geodesics: usize,
    pub delta_doubled: u32,
    pub witness: [String; 2],
    pub guard_failures: usize,
    pub cap_failures: usize,
    /// Longest element on any geodesic, against the `3r` margin.
    pub max_vertex_length: usize,
    pub margin_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema_version: &'static str,
    pub diagram: serde_json::Value,
    pub choice: Vec<[String; 2]>,
    pub ball_radius: usize,
    pub ball_elements: usize,
    pub radii: Vec<RadiusRecord>,
    pub constants: Bounds,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn delta(&self, r: usize) -> Option<HalfInt> {
        self.radii
            .iter()
            .find(|x| x.r == r)
            .map(|x| HalfInt::from_doubled(x.delta_doubled))
    }

    pub fn guard_failures(&self) -> usize {
        self.radii.last().map_or(0, |x| x.guard_failures)
    }
}

/// Outcome for one endpoint pair `(ε, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetOutcome {
    pub target: u32,
    pub length: usize,
    pub geodesics: usize,
    pub delta: HalfInt,
    pub guard_failure: bool,
    pub cap_failure: bool,
    pub max_vertex_length: usize,
}

pub fn verify_papasoglu(d: &Diagram, c: &DiagonalChoice, r_max: usize, caps: &Caps) -> Result<VerificationReport> {
    verify_papasoglu_with(d, c, r_max, caps, Execution::Auto)
}

/// Builds one ball of radius `3·r_max` and sweeps every target within
/// `r_max`; the record for each `r` aggregates the targets with `|g| ≤ r`.
pub fn verify_papasoglu_with(
    d: &Diagram,
    c: &DiagonalChoice,
    r_max: usize,
    caps: &Caps,
    exec: Execution,
) -> Result<VerificationReport> {
    if r_max == 0 {
        return Err(CoxError::Precondition("r_max must be at least 1".into()));
    }
    if !validate_choice(d, c)?.covers_all {
        return Err(CoxError::Precondition(
            "the diagonal choice must cover every square".into(),
        ));
    }
    let ball = build_ball_with(d, c, 3 * r_max, caps.ball, exec)?;
    verify_in_ball(&ball, r_max, caps, exec)
}

/// Sweeps a prebuilt ball. Radii below `3·r_max` are allowed; the shell
/// guard turns any resulting shortfall into recorded guard failures.
pub fn verify_in_ball(ball: &ConedBall, r_max: usize, caps: &Caps, exec: Execution) -> Result<VerificationReport> {
    if r_max == 0 || ball.radius() <= r_max {
        return Err(CoxError::Precondition("the ball radius must exceed r_max ≥ 1".into()));
    }
    if !validate_choice(ball.diagram(), ball.choice())?.covers_all {
        return Err(CoxError::Precondition(
            "the diagonal choice must cover every square".into(),
        ));
    }
    let outcomes = sweep(ball, r_max, caps, exec);
    Ok(report(ball, r_max, &outcomes))
}

/// Per-target outcomes for every element within `r_max`, in shortlex order.
pub fn sweep(ball: &ConedBall, r_max: usize, caps: &Caps, exec: Execution) -> Vec<TargetOutcome> {
    // build the tables once before fanning out
    ball.identity_table();
    for p in 0..ball.pairs().len() {
        ball.cone_table(p);
    }
    let targets = ball.elements_within(r_max);
    exec::map_range(targets.len(), exec, |i| target_outcome(ball, i as u32, caps))
}

fn target_outcome(ball: &ConedBall, g: u32, caps: &Caps) -> TargetOutcome {
    let mut out = TargetOutcome {
        target: g,
        length: ball.element_len(g),
        geodesics: 0,
        delta: HalfInt::ZERO,
        guard_failure: false,
        cap_failure: false,
        max_vertex_length: 0,
    };
    let deadline = Instant::now() + Duration::from_secs_f64(caps.pair_seconds);
    let paths = match ball.enumerate_hat_geodesics(0, g, caps.geodesics) {
        Ok(p) => p,
        Err(CoxError::CapExceeded { .. }) => {
            out.cap_failure = true;
            return out;
        }
        Err(_) => {
            out.guard_failure = true;
            return out;
        }
    };
    out.geodesics = paths.len();

    // distinct vertices across all geodesics, with their path positions
    let mut index: HashMap<HatVertex, usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut pos = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(paths.len());
    for p in &paths {
        let ps = positions(ball, &p.vertices);
        let mut ids = Vec::with_capacity(p.vertices.len());
        for (&v, &x) in p.vertices.iter().zip(&ps) {
            let id = *index.entry(v).or_insert_with(|| {
                verts.push(v);
                pos.push(x);
                verts.len() - 1
            });
            ids.push(id);
            if let HatVertex::Element(e) = v {
                out.max_vertex_length = out.max_vertex_length.max(ball.element_len(e));
            }
        }
        members.push(ids);
    }
    let n = verts.len();
    let mut dist = vec![Lookup::Outside; n * n];
    for i in 0..n {
        if Instant::now() > deadline {
            out.cap_failure = true;
            return out;
        }
        dist[i * n + i] = Lookup::Certified(HalfInt::ZERO);
        for j in i + 1..n {
            let l = ball.vertex_distance(verts[i], verts[j]);
            dist[i * n + j] = l;
            dist[j * n + i] = l;
        }
    }
    for (pi, p) in members.iter().enumerate() {
        if Instant::now() > deadline {
            out.cap_failure = true;
            return out;
        }
        for &x in p {
            for (qi, q) in members.iter().enumerate() {
                if qi == pi {
                    continue;
                }
                let mut known: Option<HalfInt> = None;
                let mut floor: Option<HalfInt> = None;
                for &y in q {
                    match dist[x * n + y] {
                        Lookup::Certified(v) => known = Some(known.map_or(v, |k| k.min(v))),
                        _ => {
                            let lb = pos[x].abs_diff(pos[y]);
                            floor = Some(floor.map_or(lb, |f| f.min(lb)));
                        }
                    }
                }
                match settle(known, floor) {
                    Ok(v) => out.delta = out.delta.max(v),
                    Err(_) => out.guard_failure = true,
                }
            }
        }
    }
    out
}

fn report(ball: &ConedBall, r_max: usize, outcomes: &[TargetOutcome]) -> VerificationReport {
    let d = ball.diagram();
    let mut radii = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let within: Vec<&TargetOutcome> = outcomes.iter().filter(|o| o.length <= r).collect();
        let best = within
            .iter()
            .filter(|o| !o.guard_failure && !o.cap_failure)
            .max_by(|a, b| a.delta.cmp(&b.delta).then(b.target.cmp(&a.target)));
        let max_vertex_length = within.iter().map(|o| o.max_vertex_length).max().unwrap_or(0);
        radii.push(RadiusRecord {
            r,
            pairs: within.len(),
            geodesics: within.iter().map(|o| o.geodesics).sum(),
            delta_doubled: best.map_or(0, |o| o.delta.doubled()),
            witness: [
                "ε".to_string(),
                best.map_or("ε".to_string(), |o| render_element(d, &ball.element_letters(o.target))),
            ],
            guard_failures: within.iter().filter(|o| o.guard_failure).count(),
            cap_failures: within.iter().filter(|o| o.cap_failure).count(),
            max_vertex_length,
            margin_ok: within.iter().all(|o| o.max_vertex_length <= 3 * o.length),
        });
    }
    let last = radii.last().expect("r_max ≥ 1");
    let verdict = if last.guard_failures > 0 || last.cap_failures > 0 || r_max < 2 {
        Verdict::Incomplete
    } else if last.delta_doubled == radii[r_max - 2].delta_doubled {
        Verdict::Plateau
    } else {
        Verdict::NoPlateau
    };
    let c = ball.choice();
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        diagram: serde_json::from_str(&d.to_json(None)).expect("valid JSON"),
        choice: c
            .pairs()
            .iter()
            .map(|p| [d.name(p.lo()).to_string(), d.name(p.hi()).to_string()])
            .collect(),
        ball_radius: ball.radius(),
        ball_elements: ball.num_elements(),
        radii,
        constants: theoretical_bounds(d, c),
        verdict,
    }
}
