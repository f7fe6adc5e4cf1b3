//! Move calculus, forcing checks and the fellow-travelling harness.

mod harness;
mod moves;

use serde::Serialize;

use crate::diagram::{DiagonalChoice, Diagram};
use crate::error::{CoxError, Result};
use crate::syllable::{forced_analysis, p1_decomposition, syllables_commute, ForcingMode, SyllableSeq};

pub use harness::{
    verify_in_ball, verify_papasoglu, verify_papasoglu_with, Caps, RadiusRecord, TargetOutcome, Verdict,
    VerificationReport, SCHEMA_VERSION,
};
pub use moves::{
    applicable_moves, apply_move, apply_move_blocks, connect_geodesics, connect_syllables, reachable_syllables,
    relaxed_connect, Move, RelaxedStep, DEFAULT_BUDGET,
};

/// Cap on syllable reorderings explored by the forcing oracle.
pub const FORCING_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "Dc")]
    pub dc: usize,
    pub commutation_bound: usize,
    pub id_bound: usize,
}

pub fn theoretical_bounds(d: &Diagram, c: &DiagonalChoice) -> Bounds {
    let m = d.compute_m(c);
    let dc = d.commuting_degree();
    Bounds {
        m,
        dc,
        commutation_bound: 2 * m,
        id_bound: dc,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcingBoundReport {
    pub m: usize,
    pub max_gap: usize,
    /// `k − ‖p₁(k)‖` for `k = 1..=‖s‖`.
    pub per_k: Vec<usize>,
}

/// Checks that every prefix length `k` has at most `M` free syllables.
pub fn check_forcing_bound(d: &Diagram, c: &DiagonalChoice, s: &SyllableSeq) -> Result<ForcingBoundReport> {
    let m = d.compute_m(c);
    let analysis = forced_analysis(d, s, ForcingMode::Oracle, FORCING_CAP)?;
    let mut per_k = Vec::with_capacity(s.len());
    for k in 1..=s.len() {
        let (p1, _) = p1_decomposition(d, s, &analysis, k)?;
        let gap = k - p1.len();
        if gap > m {
            return Err(CoxError::ForcingBound { k, gap, m });
        }
        per_k.push(gap);
    }
    Ok(ForcingBoundReport {
        m,
        max_gap: per_k.iter().copied().max().unwrap_or(0),
        per_k,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionReport {
    pub holds: bool,
    /// Position of the removed syllable.
    pub removed: Option<usize>,
    /// First `k` with `n(k+1, w) < n(k, w′) + 1`.
    pub witness_k: Option<usize>,
}

/// `must_precede[i][j]`: syllable `i` comes before `j` in every reorder.
fn precedence(d: &Diagram, s: &SyllableSeq) -> Vec<Vec<bool>> {
    let syl = s.syllables();
    let n = syl.len();
    let mut before = vec![vec![false; n]; n];
    for j in 0..n {
        for i in (0..j).rev() {
            before[i][j] = !syllables_commute(d, &syl[i], &syl[j]) || (i + 1..j).any(|k| before[i][k] && before[k][j]);
        }
    }
    before
}

/// Removes a syllable of least forcing index (after checking it can be
/// commuted to the front) and compares forced counts before and after.
pub fn forcing_induction_check(d: &Diagram, _c: &DiagonalChoice, s: &SyllableSeq) -> Result<InductionReport> {
    if s.len() <= 1 {
        return Ok(InductionReport {
            holds: true,
            removed: None,
            witness_k: None,
        });
    }
    let analysis = forced_analysis(d, s, ForcingMode::Oracle, FORCING_CAP)?;
    let x = (0..s.len())
        .min_by_key(|&i| (analysis.min_forcing[i], i))
        .expect("nonempty");
    let before = precedence(d, s);
    if (0..x).any(|i| before[i][x]) {
        return Ok(InductionReport {
            holds: false,
            removed: Some(x),
            witness_k: None,
        });
    }
    let mut rest = s.syllables().to_vec();
    rest.remove(x);
    let rest = SyllableSeq::new(rest);
    let reduced = forced_analysis(d, &rest, ForcingMode::Oracle, FORCING_CAP)?;
    let witness_k = (1..=rest.len()).find(|&k| analysis.forced_count(k + 1) < reduced.forced_count(k) + 1);
    Ok(InductionReport {
        holds: witness_k.is_none(),
        removed: Some(x),
        witness_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::syllable::syllabify;

    #[test]
    fn bounds() {
        let q = fixtures::square();
        let b = theoretical_bounds(&q, &fixtures::square_choice(&q));
        assert_eq!((b.m, b.dc, b.commutation_bound, b.id_bound), (1, 2, 2, 2));
        let f = fixtures::example_f();
        assert_eq!(theoretical_bounds(&f, &fixtures::example_f_choice(&f)).m, 1);
        let e = Diagram::from_edges(&["a", "b", "c"], &[]).unwrap();
        let b = theoretical_bounds(&e, &DiagonalChoice::empty());
        assert_eq!((b.m, b.dc), (0, 0));
    }

    #[test]
    fn forcing_bound_examples() {
        let f = fixtures::example_f();
        let c = fixtures::example_f_choice(&f);
        let s = syllabify(&f, &c, &f.parse_word("acabedbfbc").unwrap());
        let r = check_forcing_bound(&f, &c, &s).unwrap();
        assert!(r.max_gap <= 1);
        assert_eq!(r.per_k.len(), 6);
        let one = syllabify(&f, &c, &f.parse_word("e").unwrap());
        assert_eq!(check_forcing_bound(&f, &c, &one).unwrap().max_gap, 0);
    }

    #[test]
    fn induction_examples() {
        let f = fixtures::example_f();
        let c = fixtures::example_f_choice(&f);
        let s = syllabify(&f, &c, &f.parse_word("acabedbfbc").unwrap());
        assert!(forcing_induction_check(&f, &c, &s).unwrap().holds);

        let (l, lc) = fixtures::load(fixtures::LADDER_L);
        let au = syllabify(&l, &lc, &l.parse_word("au").unwrap());
        let r = forcing_induction_check(&l, &lc, &au).unwrap();
        assert!(r.holds);
        let single = syllabify(&l, &lc, &l.parse_word("a").unwrap());
        assert!(forcing_induction_check(&l, &lc, &single).unwrap().holds);
    }
}
