//! Syllables: a word split into single letters and alternating blocks over
//! the chosen diagonal pairs, plus the precedence ("forcing") calculus on
//! syllable sequences.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use crate::diagram::{DiagonalChoice, Diagram, Gen, Pair};
use crate::error::{CoxError, Result};
use crate::word::{equals, Word};

/// The chosen pairs of a [`DiagonalChoice`] in shortlex order, with a lookup
/// from generators to the pairs containing them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    pairs: Vec<Pair>,
}

impl PairSet {
    pub fn new(choice: &DiagonalChoice) -> PairSet {
        PairSet { pairs: choice.pairs() }
    }

    pub fn from_pairs(mut pairs: Vec<Pair>) -> PairSet {
        pairs.sort();
        pairs.dedup();
        PairSet { pairs }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, p: Pair) -> Option<usize> {
        self.pairs.binary_search(&p).ok()
    }

    pub fn contains(&self, p: Pair) -> bool {
        self.index_of(p).is_some()
    }

    /// Chosen pairs containing `g`, in shortlex order.
    pub fn containing(&self, g: Gen) -> impl Iterator<Item = Pair> + '_ {
        self.pairs.iter().copied().filter(move |p| p.contains(g))
    }

    pub fn first_containing(&self, g: Gen) -> Option<Pair> {
        self.containing(g).next()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    /// A letter lying in no chosen pair.
    Letter(Gen),
    /// An alternating word over a chosen pair. Length one is a trivial block.
    Block { pair: Pair, word: Word },
}

impl Syllable {
    /// The canonical syllable spelled by `word`, if it is one: a single
    /// letter (a trivial block when it lies in a chosen pair, labelled by the
    /// least such pair), or an alternating word over a chosen pair.
    pub fn from_word(pairs: &PairSet, word: &[Gen]) -> Option<Syllable> {
        match word {
            [] => None,
            [g] => Some(match pairs.first_containing(*g) {
                Some(pair) => Syllable::Block {
                    pair,
                    word: Word::new(vec![*g]),
                },
                None => Syllable::Letter(*g),
            }),
            [a, b, ..] => {
                if a == b {
                    return None;
                }
                let pair = Pair::new(*a, *b);
                let alternates = word
                    .iter()
                    .enumerate()
                    .all(|(i, &g)| g == if i % 2 == 0 { *a } else { *b });
                (alternates && pairs.contains(pair)).then(|| Syllable::Block {
                    pair,
                    word: Word::new(word.to_vec()),
                })
            }
        }
    }

    pub fn letters(&self) -> &[Gen] {
        match self {
            Syllable::Letter(g) => std::slice::from_ref(g),
            Syllable::Block { word, .. } => word.letters(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters().len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters().is_empty()
    }

    pub fn support(&self) -> u64 {
        self.letters().iter().fold(0, |m, g| m | g.bit())
    }

    pub fn pair(&self) -> Option<Pair> {
        match self {
            Syllable::Letter(_) => None,
            Syllable::Block { pair, .. } => Some(*pair),
        }
    }

    /// A block of length at least two.
    pub fn is_nontrivial_block(&self) -> bool {
        matches!(self, Syllable::Block { word, .. } if word.len() >= 2)
    }

    pub fn render(&self, d: &Diagram) -> String {
        let body = d.render_compact(self.letters());
        if self.is_nontrivial_block() {
            format!("[{body}]")
        } else {
            body
        }
    }
}

/// Syllables commute when their supports are disjoint and every letter of
/// one commutes with every letter of the other.
pub fn syllables_commute(d: &Diagram, x: &Syllable, y: &Syllable) -> bool {
    d.masks_commute(x.support(), y.support())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyllableSeq {
    syllables: Vec<Syllable>,
}

impl SyllableSeq {
    pub fn new(syllables: Vec<Syllable>) -> SyllableSeq {
        SyllableSeq { syllables }
    }

    /// Builds the canonical sequence from per-syllable words.
    pub fn from_words(pairs: &PairSet, words: &[Vec<Gen>]) -> Result<SyllableSeq> {
        words
            .iter()
            .map(|w| {
                Syllable::from_word(pairs, w)
                    .ok_or_else(|| CoxError::Invariant(format!("{w:?} is not a syllable for the chosen pairs")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SyllableSeq::new)
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Syllable length.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn underlying(&self) -> Word {
        Word::new(
            self.syllables
                .iter()
                .flat_map(|s| s.letters().iter().copied())
                .collect(),
        )
    }

    pub fn words(&self) -> Vec<Vec<Gen>> {
        self.syllables.iter().map(|s| s.letters().to_vec()).collect()
    }

    pub fn render(&self, d: &Diagram) -> String {
        self.syllables.iter().map(|s| s.render(d)).collect::<Vec<_>>().join(" ")
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> SyllableSeq {
        SyllableSeq::new(self.syllables[range].to_vec())
    }
}

/// Length of the longest alternating run over `pair` starting at `start`.
fn run_length(w: &[Gen], start: usize, pair: Pair) -> usize {
    if !pair.contains(w[start]) {
        return 0;
    }
    let mut len = 1;
    while start + len < w.len() {
        let prev = w[start + len - 1];
        let next = w[start + len];
        if next == pair.other(prev) {
            len += 1;
        } else {
            break;
        }
    }
    len
}

/// Canonical annotation: scanning left to right, open the longest alternating
/// run inside a single chosen pair (ties go to the least pair).
pub fn syllabify(_d: &Diagram, choice: &DiagonalChoice, w: &Word) -> SyllableSeq {
    let pairs = PairSet::new(choice);
    syllabify_with(&pairs, w.letters())
}

pub(crate) fn syllabify_with(pairs: &PairSet, w: &[Gen]) -> SyllableSeq {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let best = pairs.containing(w[i]).map(|p| (run_length(w, i, p), p)).fold(
            None,
            |acc: Option<(usize, Pair)>, (len, p)| match acc {
                Some((l, _)) if l >= len => acc,
                _ => Some((len, p)),
            },
        );
        match best {
            Some((len, pair)) => {
                out.push(Syllable::Block {
                    pair: if len == 1 {
                        pairs.first_containing(w[i]).unwrap()
                    } else {
                        pair
                    },
                    word: Word::new(w[i..i + len].to_vec()),
                });
                i += len;
            }
            None => {
                out.push(Syllable::Letter(w[i]));
                i += 1;
            }
        }
    }
    SyllableSeq::new(out)
}

/// All annotations obtained by choosing, at each syllable start, any chosen
/// pair containing the letter and opening its maximal run there.
pub fn enumerate_blockings(
    _d: &Diagram,
    choice: &DiagonalChoice,
    w: &Word,
    cap: usize,
) -> Result<BTreeSet<SyllableSeq>> {
    let pairs = PairSet::new(choice);
    let mut out = BTreeSet::new();
    let mut current = Vec::new();
    blockings_rec(&pairs, w.letters(), 0, &mut current, &mut out, cap)?;
    Ok(out)
}

fn blockings_rec(
    pairs: &PairSet,
    w: &[Gen],
    i: usize,
    current: &mut Vec<Syllable>,
    out: &mut BTreeSet<SyllableSeq>,
    cap: usize,
) -> Result<()> {
    if i == w.len() {
        out.insert(SyllableSeq::new(current.clone()));
        if out.len() > cap {
            return Err(CoxError::CapExceeded { what: "blockings", cap });
        }
        return Ok(());
    }
    let options: Vec<usize> = {
        let mut lens: Vec<usize> = pairs.containing(w[i]).map(|p| run_length(w, i, p)).collect();
        lens.sort_unstable();
        lens.dedup();
        if lens.is_empty() {
            vec![1]
        } else {
            lens
        }
    };
    for len in options {
        let syl = Syllable::from_word(pairs, &w[i..i + len]).expect("maximal runs are syllables");
        current.push(syl);
        blockings_rec(pairs, w, i + len, current, out, cap)?;
        current.pop();
    }
    Ok(())
}

/// Fewest syllables over every segmentation of `w` into letters and
/// alternating blocks over chosen pairs. This is the coned-off length of the
/// cheapest path spelling `w`.
pub fn min_syllable_cost(pairs: &PairSet, w: &[Gen]) -> usize {
    let n = w.len();
    let mut best = vec![usize::MAX; n + 1];
    best[0] = 0;
    for i in 0..n {
        if best[i] == usize::MAX {
            continue;
        }
        let mut reach = i + 1;
        for p in pairs.containing(w[i]) {
            reach = reach.max(i + run_length(w, i, p));
        }
        // any prefix of an alternating run is itself a block
        for j in i + 1..=reach {
            best[j] = best[j].min(best[i] + 1);
        }
    }
    best[n]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingMode {
    /// Enumerate every syllable order reachable by commutations.
    Oracle,
    /// Local precedence rule: a later syllable can come first when it
    /// commutes with the syllable and with everything between them.
    Fast,
}

/// Per-syllable forcing data, indexed by syllable position in the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForcedAnalysis {
    /// Largest 1-based position the syllable can occupy, `m(x)`.
    pub min_forcing: Vec<usize>,
    /// Syllables that may appear before the syllable in some reorder.
    pub can_precede: Vec<BTreeSet<usize>>,
}

impl ForcedAnalysis {
    /// Number of syllables that are `k`-forced.
    pub fn forced_count(&self, k: usize) -> usize {
        self.min_forcing.iter().filter(|&&m| m <= k).count()
    }
}

pub fn forced_analysis(d: &Diagram, s: &SyllableSeq, mode: ForcingMode, cap: usize) -> Result<ForcedAnalysis> {
    match mode {
        ForcingMode::Oracle => forced_oracle(d, s, cap),
        ForcingMode::Fast => Ok(forced_fast(d, s)),
    }
}

fn commute_table(d: &Diagram, s: &SyllableSeq) -> Vec<Vec<bool>> {
    let syl = s.syllables();
    syl.iter()
        .map(|x| syl.iter().map(|y| syllables_commute(d, x, y)).collect())
        .collect()
}

fn forced_oracle(d: &Diagram, s: &SyllableSeq, cap: usize) -> Result<ForcedAnalysis> {
    let n = s.len();
    let commute = commute_table(d, s);
    let mut min_forcing = vec![0; n];
    let mut can_precede = vec![BTreeSet::new(); n];
    let start: Vec<u16> = (0..n as u16).collect();
    let mut seen: HashSet<Vec<u16>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(order) = queue.pop_front() {
        for (pos, &x) in order.iter().enumerate() {
            let x = x as usize;
            min_forcing[x] = min_forcing[x].max(pos + 1);
            can_precede[x].extend(order[..pos].iter().map(|&y| y as usize));
        }
        for i in 0..n.saturating_sub(1) {
            if commute[order[i] as usize][order[i + 1] as usize] {
                let mut next = order.clone();
                next.swap(i, i + 1);
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        return Err(CoxError::CapExceeded {
                            what: "syllable reorderings",
                            cap,
                        });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(ForcedAnalysis {
        min_forcing,
        can_precede,
    })
}

fn forced_fast(d: &Diagram, s: &SyllableSeq) -> ForcedAnalysis {
    let n = s.len();
    let commute = commute_table(d, s);
    let mut can_precede = vec![BTreeSet::new(); n];
    for x in 0..n {
        can_precede[x].extend(0..x);
        for later in x + 1..n {
            if commute[x][later] && (x + 1..later).all(|between| commute[between][later]) {
                can_precede[x].insert(later);
            }
        }
    }
    ForcedAnalysis {
        min_forcing: can_precede.iter().map(|c| c.len() + 1).collect(),
        can_precede,
    }
}

/// Splits the length-`k` prefix into its `k`-forced syllables and the rest,
/// both in original order, and checks the reordered prefix represents the
/// same element.
pub fn p1_decomposition(
    d: &Diagram,
    s: &SyllableSeq,
    analysis: &ForcedAnalysis,
    k: usize,
) -> Result<(SyllableSeq, SyllableSeq)> {
    if k == 0 || k > s.len() {
        return Err(CoxError::KOutOfRange { k, len: s.len() });
    }
    let (mut forced, mut free) = (Vec::new(), Vec::new());
    for (i, syl) in s.syllables()[..k].iter().enumerate() {
        if analysis.min_forcing[i] <= k {
            forced.push(syl.clone());
        } else {
            free.push(syl.clone());
        }
    }
    let p1 = SyllableSeq::new(forced);
    let p2 = SyllableSeq::new(free);
    let prefix = s.slice(0..k).underlying();
    if !equals(d, &p1.underlying().concat(&p2.underlying()), &prefix) {
        return Err(CoxError::Invariant(format!(
            "forced/free split of the length-{k} prefix changes the element"
        )));
    }
    Ok((p1, p2))
}
