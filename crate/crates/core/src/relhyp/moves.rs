//! Rewriting moves on canonical syllable sequences and the breadth-first
//! search connecting two coned-off geodesics.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::coned::{BlockSeq, ConedBall, HatPath};
use crate::diagram::{Diagram, Gen};
use crate::error::{CoxError, Result};
use crate::syllable::{min_syllable_cost, syllables_commute, PairSet, Syllable, SyllableSeq};
use crate::word::{equals, lex_normal_form, tits_reduce, Word};

/// Default state budget for connection searches.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Syllable positions refer to the sequence the move is applied to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    /// Swap the commuting syllables at `at` and `at + 1`.
    Commutation { at: usize },
    /// Replace `h_from` with `h_from·letter` and `h_to` with `letter·h_to`.
    Id { from: usize, to: usize, letter: Gen },
    /// Forward: pass the last letter of `first` into `middle` and the last
    /// letter of `middle` into `last`. Backward mirrors this from the right.
    Shift {
        first: usize,
        middle: usize,
        last: usize,
        forward: bool,
    },
    /// `[ab] w [cd]` becomes `[ac] w [bd]`; either block may be a single
    /// letter, so `[ab] w c` becomes `[ac] w b`.
    Exchange { first: usize, second: usize },
    /// `[ab] w₁ [cd] w₂ [(ed)ⁿ]` becomes `[ac] b w₁ w₂ [(de)ⁿd]`.
    VariantExchange { first: usize, middle: usize, last: usize },
    /// Inverse of the variant exchange: `[ac] b w₁ w₂ [(de)ⁿd]` becomes
    /// `[ab] w₁ [cd] w₂ [(ed)ⁿ]`, the new block landing at `insert_at`.
    VariantExchangeReverse {
        first: usize,
        last: usize,
        insert_at: usize,
    },
}

fn fail<T>(msg: impl Into<String>) -> Result<T> {
    Err(CoxError::Precondition(msg.into()))
}

fn dihedral(d: &Diagram, w: &[Gen]) -> Vec<Gen> {
    lex_normal_form(d, &tits_reduce(d, w))
}

fn syllable(pairs: &PairSet, w: &[Gen], what: &str) -> Result<Syllable> {
    Syllable::from_word(pairs, w).map_or_else(|| fail(format!("{what} is not a syllable")), Ok)
}

fn check_range(s: &SyllableSeq, idx: &[usize]) -> Result<()> {
    if idx.windows(2).any(|w| w[0] >= w[1]) || idx.last().is_some_and(|&l| l >= s.len()) {
        return fail(format!("positions {idx:?} are not increasing within 0..{}", s.len()));
    }
    Ok(())
}

/// `letter` commutes with every letter of the syllables strictly between
/// `lo` and `hi`.
fn passes(d: &Diagram, s: &SyllableSeq, lo: usize, hi: usize, letter: Gen) -> bool {
    s.syllables()[lo + 1..hi]
        .iter()
        .all(|x| d.masks_commute(letter.bit(), x.support()))
}

fn transfer(d: &Diagram, pairs: &PairSet, words: &mut [Vec<Gen>], from: usize, to: usize, letter: Gen) -> Result<()> {
    let mut left = words[from].clone();
    left.push(letter);
    let mut right = vec![letter];
    right.extend_from_slice(&words[to]);
    let (left, right) = (dihedral(d, &left), dihedral(d, &right));
    syllable(pairs, &left, "the left result")?;
    syllable(pairs, &right, "the right result")?;
    words[from] = left;
    words[to] = right;
    Ok(())
}

/// Applies `m` to `s`, checking its preconditions and that the result
/// represents the same element with the same number of syllables.
pub fn apply_move(d: &Diagram, pairs: &PairSet, s: &SyllableSeq, m: &Move) -> Result<SyllableSeq> {
    let syl = s.syllables();
    let mut words = s.words();
    match *m {
        Move::Commutation { at } => {
            if at + 1 >= s.len() {
                return fail("commutation position out of range");
            }
            if !syllables_commute(d, &syl[at], &syl[at + 1]) {
                return fail("adjacent syllables do not commute");
            }
            words.swap(at, at + 1);
        }
        Move::Id { from, to, letter } => {
            check_range(s, &[from, to])?;
            if !passes(d, s, from, to, letter) {
                return fail("the transferred letter does not commute with the syllables between");
            }
            transfer(d, pairs, &mut words, from, to, letter)?;
        }
        Move::Shift {
            first,
            middle,
            last,
            forward,
        } => {
            check_range(s, &[first, middle, last])?;
            let (x, y) = if forward {
                (*words[first].last().unwrap(), *words[middle].last().unwrap())
            } else {
                (words[middle][0], words[last][0])
            };
            // x travels between first and middle, y between middle and last
            let w1 = Word::new(
                syl[first + 1..middle]
                    .iter()
                    .flat_map(|t| t.letters().to_vec())
                    .collect(),
            );
            let w2 = Word::new(
                syl[middle + 1..last]
                    .iter()
                    .flat_map(|t| t.letters().to_vec())
                    .collect(),
            );
            let commutes_past =
                |g: Gen, w: &Word| equals(d, &Word::new(vec![g]).concat(w), &w.concat(&Word::new(vec![g])));
            if !commutes_past(x, &w1) || !commutes_past(y, &w2) {
                return fail("a shifted letter does not commute with the intervening word");
            }
            let mut h_first = words[first].clone();
            h_first.push(x);
            let mut h_middle = vec![x];
            h_middle.extend_from_slice(&words[middle]);
            h_middle.push(y);
            let mut h_last = vec![y];
            h_last.extend_from_slice(&words[last]);
            for (i, w, what) in [
                (first, h_first, "the first block"),
                (middle, h_middle, "the middle block"),
                (last, h_last, "the last block"),
            ] {
                let w = dihedral(d, &w);
                syllable(pairs, &w, what)?;
                words[i] = w;
            }
        }
        Move::Exchange { first, second } => {
            check_range(s, &[first, second])?;
            let (hi, hj) = (&words[first], &words[second]);
            if hi.len() > 2 || hj.len() > 2 || hi.len() + hj.len() < 3 {
                return fail("exchange needs blocks of length at most two, not both letters");
            }
            let (b, c) = (hi[hi.len() - 1], hj[0]);
            if !d.commutes(b, c) || !passes(d, s, first, second, b) || !passes(d, s, first, second, c) {
                return fail("the exchanged letters must commute with each other and the word between");
            }
            let mut new_first = hi[..hi.len() - 1].to_vec();
            new_first.push(c);
            let mut new_second = vec![b];
            new_second.extend_from_slice(&hj[1..]);
            syllable(pairs, &new_first, "the new first block")?;
            syllable(pairs, &new_second, "the new second block")?;
            words[first] = new_first;
            words[second] = new_second;
        }
        Move::VariantExchange { first, middle, last } => {
            check_range(s, &[first, middle, last])?;
            if words[first].len() != 2 || words[middle].len() != 2 {
                return fail("variant exchange needs two blocks of length two");
            }
            let (a, b) = (words[first][0], words[first][1]);
            let (c, dd) = (words[middle][0], words[middle][1]);
            let new_first = vec![a, c];
            syllable(pairs, &new_first, "the new first block")?;
            let mut h_last = vec![dd];
            h_last.extend_from_slice(&words[last]);
            let h_last = dihedral(d, &h_last);
            syllable(pairs, &h_last, "the new last block")?;
            words[first] = new_first;
            words[last] = h_last;
            words.remove(middle);
            words.insert(first + 1, vec![b]);
        }
        Move::VariantExchangeReverse { first, last, insert_at } => {
            check_range(s, &[first, first + 1, last])?;
            if !(first + 2..=last).contains(&insert_at) {
                return fail("the restored block must land between the letter and the last block");
            }
            if words[first].len() != 2 || words[first + 1].len() != 1 || words[last].is_empty() {
                return fail("reverse variant exchange needs a length-two block followed by a letter");
            }
            let (a, c) = (words[first][0], words[first][1]);
            let b = words[first + 1][0];
            let dd = words[last][0];
            let new_first = vec![a, b];
            let new_middle = vec![c, dd];
            let h_last = dihedral(d, &words[last][1..]);
            syllable(pairs, &new_first, "the new first block")?;
            syllable(pairs, &new_middle, "the restored block")?;
            if h_last.is_empty() {
                return fail("the last block would vanish");
            }
            syllable(pairs, &h_last, "the new last block")?;
            words[first] = new_first;
            words[last] = h_last;
            words.insert(insert_at, new_middle);
            words.remove(first + 1);
        }
    }
    if words.iter().any(Vec::is_empty) {
        return fail("a syllable would vanish");
    }
    let out = SyllableSeq::from_words(pairs, &words)?;
    if out.len() != s.len() || !equals(d, &out.underlying(), &s.underlying()) {
        return Err(CoxError::Invariant(format!("{m:?} changed the element or its cost")));
    }
    Ok(out)
}

/// [`apply_move`] on block sequences.
pub fn apply_move_blocks(d: &Diagram, pairs: &PairSet, bs: &BlockSeq, m: &Move) -> Result<BlockSeq> {
    let s = bs.to_syllables(pairs)?;
    apply_move(d, pairs, &s, m).map(|out| BlockSeq::from_syllables(&out))
}

/// Letters worth trying as ID transfers out of a syllable: its own letters
/// and every chosen-pair partner of them.
fn transfer_candidates(pairs: &PairSet, x: &Syllable) -> u64 {
    x.letters()
        .iter()
        .fold(0, |m, &g| pairs.containing(g).fold(m | g.bit(), |m, p| m | p.mask()))
}

/// Every move applicable to `s`, with its result.
pub fn applicable_moves(d: &Diagram, pairs: &PairSet, s: &SyllableSeq) -> Vec<(Move, SyllableSeq)> {
    let n = s.len();
    let syl = s.syllables();
    let mut candidates = Vec::new();
    for at in 0..n.saturating_sub(1) {
        candidates.push(Move::Commutation { at });
    }
    for from in 0..n {
        for to in from + 1..n {
            let shared = transfer_candidates(pairs, &syl[from]) & transfer_candidates(pairs, &syl[to]);
            for letter in crate::diagram::bits(shared) {
                candidates.push(Move::Id { from, to, letter });
            }
            candidates.push(Move::Exchange {
                first: from,
                second: to,
            });
            for last in to + 1..n {
                for forward in [true, false] {
                    candidates.push(Move::Shift {
                        first: from,
                        middle: to,
                        last,
                        forward,
                    });
                }
                candidates.push(Move::VariantExchange {
                    first: from,
                    middle: to,
                    last,
                });
            }
        }
        for last in from + 2..n {
            for insert_at in from + 2..=last {
                candidates.push(Move::VariantExchangeReverse {
                    first: from,
                    last,
                    insert_at,
                });
            }
        }
    }
    candidates
        .into_iter()
        .filter_map(|m| apply_move(d, pairs, s, &m).ok().map(|out| (m, out)))
        .collect()
}

/// Breadth-first search from `from` to `to` under [`applicable_moves`].
/// `Ok(None)` means the whole reachable set was explored without success.
pub fn connect_syllables(
    d: &Diagram,
    pairs: &PairSet,
    from: &SyllableSeq,
    to: &SyllableSeq,
    budget: usize,
) -> Result<Option<Vec<Move>>> {
    let mut parent: HashMap<SyllableSeq, Option<(SyllableSeq, Move)>> = HashMap::new();
    parent.insert(from.clone(), None);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(cur) = queue.pop_front() {
        if &cur == to {
            let mut moves = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, m))) = parent.get(&at) {
                moves.push(m.clone());
                at = prev.clone();
            }
            moves.reverse();
            return Ok(Some(moves));
        }
        for (m, next) in applicable_moves(d, pairs, &cur) {
            if !parent.contains_key(&next) {
                if parent.len() >= budget {
                    return Err(CoxError::BudgetExhausted(budget));
                }
                parent.insert(next.clone(), Some((cur.clone(), m)));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

/// Every sequence reachable from `from` under [`applicable_moves`].
pub fn reachable_syllables(
    d: &Diagram,
    pairs: &PairSet,
    from: &SyllableSeq,
    budget: usize,
) -> Result<Vec<SyllableSeq>> {
    let mut seen = std::collections::HashSet::from([from.clone()]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(cur) = queue.pop_front() {
        for (_, next) in applicable_moves(d, pairs, &cur) {
            if !seen.contains(&next) {
                if seen.len() >= budget {
                    return Err(CoxError::BudgetExhausted(budget));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Connects two coned-off geodesics with common endpoints by moves on their
/// syllable sequences.
pub fn connect_geodesics(ball: &ConedBall, p1: &HatPath, p2: &HatPath, budget: usize) -> Result<Option<Vec<Move>>> {
    if p1.vertices.first() != p2.vertices.first() || p1.vertices.last() != p2.vertices.last() {
        return fail("geodesics must share their endpoints");
    }
    let pairs = ball.pairs();
    let s1 = ball.block_decompose(p1)?.to_syllables(pairs)?;
    let s2 = ball.block_decompose(p2)?.to_syllables(pairs)?;
    connect_syllables(ball.diagram(), pairs, &s1, &s2, budget)
}

/// One step of the relaxed search.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RelaxedStep {
    Commutation { at: usize },
    Id { from: usize, to: usize, letter: Gen },
}

fn relaxed_cost(pairs: &PairSet, blocks: &[Vec<Gen>]) -> usize {
    blocks.iter().map(|b| min_syllable_cost(pairs, b)).sum()
}

/// Searches from `from` to `to` using only commutations of adjacent blocks
/// and ID transfers with free cancellation, allowing intermediate states whose
/// cheapest spelling costs at most `slack` more than the start and whose
/// letter count exceeds the longer endpoint by at most `2·slack`.
pub fn relaxed_connect(
    d: &Diagram,
    pairs: &PairSet,
    from: &SyllableSeq,
    to: &SyllableSeq,
    slack: usize,
    budget: usize,
) -> Result<Option<Vec<RelaxedStep>>> {
    type State = Vec<Vec<Gen>>;
    let start: State = from.words();
    let goal: State = to.words();
    let limit = relaxed_cost(pairs, &start) + slack;
    let letters = |st: &State| st.iter().map(Vec::len).sum::<usize>();
    let max_letters = letters(&start).max(letters(&goal)) + 2 * slack;
    let mut parent: HashMap<State, Option<(State, RelaxedStep)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            let mut steps = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, st))) = parent.get(&at) {
                steps.push(st.clone());
                at = prev.clone();
            }
            steps.reverse();
            return Ok(Some(steps));
        }
        let support = |b: &[Gen]| b.iter().fold(0u64, |m, g| m | g.bit());
        let mut next_states = Vec::new();
        for at in 0..cur.len().saturating_sub(1) {
            if d.masks_commute(support(&cur[at]), support(&cur[at + 1])) {
                let mut next = cur.clone();
                next.swap(at, at + 1);
                next_states.push((RelaxedStep::Commutation { at }, next));
            }
        }
        for from_i in 0..cur.len() {
            for to_i in from_i + 1..cur.len() {
                let between: u64 = cur[from_i + 1..to_i].iter().fold(0, |m, b| m | support(b));
                let shared = support(&cur[from_i]) | support(&cur[to_i]);
                for letter in crate::diagram::bits(shared) {
                    if !d.masks_commute(letter.bit(), between) {
                        continue;
                    }
                    let mut left = cur[from_i].clone();
                    left.push(letter);
                    let mut right = vec![letter];
                    right.extend_from_slice(&cur[to_i]);
                    let mut next = cur.clone();
                    next[from_i] = dihedral(d, &left);
                    next[to_i] = dihedral(d, &right);
                    next.retain(|b| !b.is_empty());
                    next_states.push((
                        RelaxedStep::Id {
                            from: from_i,
                            to: to_i,
                            letter,
                        },
                        next,
                    ));
                }
            }
        }
        for (step, next) in next_states {
            if letters(&next) > max_letters || relaxed_cost(pairs, &next) > limit || parent.contains_key(&next) {
                continue;
            }
            if parent.len() >= budget {
                return Err(CoxError::BudgetExhausted(budget));
            }
            parent.insert(next.clone(), Some((cur.clone(), step)));
            queue.push_back(next);
        }
    }
    Ok(None)
}
