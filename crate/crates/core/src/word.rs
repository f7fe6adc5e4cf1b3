//! The word engine: Tits reduction and shortlex normal forms.
//!
//! In a right-angled Coxeter group a word is geodesic exactly when no letter
//! can be brought next to another occurrence of itself by commutations. Two
//! geodesic words represent the same element iff they differ by commutations,
//! so the normal form is the lexicographically least linear extension of the
//! word's trace.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Gen};
use crate::error::{CoxError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Gen>);

impl Word {
    pub fn new(letters: Vec<Gen>) -> Word {
        Word(letters)
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Gen> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The formal inverse; every generator is an involution.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn support(&self) -> u64 {
        self.0.iter().fold(0, |m, g| m | g.bit())
    }
}

impl From<Vec<Gen>> for Word {
    fn from(v: Vec<Gen>) -> Word {
        Word(v)
    }
}

/// A geodesic word that is lexicographically least among the geodesic
/// representatives of its element.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm(Word);

impl NormalForm {
    pub fn identity() -> NormalForm {
        NormalForm(Word::empty())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        self.0.letters()
    }

    /// Wraps letters already known to be in normal form.
    pub(crate) fn from_normalized(letters: Vec<Gen>) -> NormalForm {
        NormalForm(Word(letters))
    }
}

impl Diagram {
    /// Parses a word. Whitespace-separated names are the canonical syntax;
    /// when every generator name is a single character, a word without
    /// whitespace is read letter by letter ("acab").
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        let tokens: Vec<String> = if text.chars().any(char::is_whitespace) {
            text.split_whitespace().map(str::to_string).collect()
        } else if text.is_empty() {
            Vec::new()
        } else if self.gen(text).is_some() {
            vec![text.to_string()]
        } else if self.names().iter().all(|n| n.chars().count() == 1) {
            text.chars().map(|c| c.to_string()).collect()
        } else {
            vec![text.to_string()]
        };
        tokens
            .iter()
            .map(|t| self.gen(t).ok_or_else(|| CoxError::UnknownGenerator(t.clone())))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Space-separated rendering, the interchange syntax for words.
    pub fn render(&self, letters: &[Gen]) -> String {
        letters.iter().map(|&g| self.name(g)).collect::<Vec<_>>().join(" ")
    }

    /// Concatenated rendering when all names are single characters,
    /// otherwise the same as [`Diagram::render`].
    pub fn render_compact(&self, letters: &[Gen]) -> String {
        if self.names().iter().all(|n| n.chars().count() == 1) {
            letters.iter().map(|&g| self.name(g)).collect()
        } else {
            self.render(letters)
        }
    }
}

/// Index of a deletable partner for position `i`: the next occurrence of the
/// same letter, provided the letter commutes with everything in between.
fn deletion_partner(d: &Diagram, w: &[Gen], i: usize) -> Option<usize> {
    let s = w[i];
    let link = d.link(s);
    for (j, &t) in w.iter().enumerate().skip(i + 1) {
        if t == s {
            return Some(j);
        }
        if link & t.bit() == 0 {
            return None;
        }
    }
    None
}

/// Leftmost deletable pair `(i, j)`, if the word is not geodesic.
pub(crate) fn first_deletion(d: &Diagram, w: &[Gen]) -> Option<(usize, usize)> {
    (0..w.len()).find_map(|i| deletion_partner(d, w, i).map(|j| (i, j)))
}

/// Applies Tits deletions until none remains. The result is geodesic.
pub fn tits_reduce(d: &Diagram, letters: &[Gen]) -> Vec<Gen> {
    let mut w = letters.to_vec();
    while let Some((i, j)) = first_deletion(d, &w) {
        w.remove(j);
        w.remove(i);
    }
    w
}

/// Lexicographically least rearrangement of a geodesic word by commutations:
/// repeatedly emit the smallest letter that has no non-commuting letter
/// before it.
pub fn lex_normal_form(d: &Diagram, letters: &[Gen]) -> Vec<Gen> {
    let mut rest = letters.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut blocked = 0u64;
        let mut best: Option<usize> = None;
        for (i, &g) in rest.iter().enumerate() {
            // g is available iff every earlier letter commutes with it
            if blocked & g.bit() == 0 && best.is_none_or(|b| g < rest[b]) {
                best = Some(i);
            }
            // letters after position i that fail to commute with g are blocked
            blocked |= !d.link(g);
        }
        let b = best.expect("the first letter is always available");
        out.push(rest.remove(b));
    }
    out
}

pub fn reduce(d: &Diagram, w: &Word) -> NormalForm {
    NormalForm(Word(lex_normal_form(d, &tits_reduce(d, w.letters()))))
}

pub fn is_geodesic(d: &Diagram, w: &Word) -> bool {
    first_deletion(d, w.letters()).is_none()
}

pub fn equals(d: &Diagram, w1: &Word, w2: &Word) -> bool {
    reduce(d, w1) == reduce(d, w2)
}

pub fn multiply(d: &Diagram, a: &Word, b: &Word) -> NormalForm {
    reduce(d, &a.concat(b))
}

/// Position of the occurrence of `s` that can be moved to the end of the
/// geodesic word `w`, i.e. `s` is a right descent of `w`.
pub fn right_descent(d: &Diagram, w: &[Gen], s: Gen) -> Option<usize> {
    let link = d.link(s);
    for (i, &t) in w.iter().enumerate().rev() {
        if t == s {
            return Some(i);
        }
        if link & t.bit() == 0 {
            return None;
        }
    }
    None
}

/// Normal form of `g·s` from the normal form of `g`, in linear time.
///
/// If `s` is a right descent the matching occurrence is deleted. Otherwise
/// `s` is inserted at the first position after its last non-commuting letter
/// where it is smaller than the letter it displaces; this is exactly where the
/// greedy construction of the lex normal form would emit it.
pub fn mul_gen(d: &Diagram, nf: &[Gen], s: Gen) -> Vec<Gen> {
    let mut out = nf.to_vec();
    mul_gen_in_place(d, &mut out, s);
    out
}

pub(crate) fn mul_gen_in_place(d: &Diagram, w: &mut Vec<Gen>, s: Gen) {
    let link = d.link(s);
    let mut start = 0;
    for (i, &t) in w.iter().enumerate().rev() {
        if t == s {
            w.remove(i);
            return;
        }
        if link & t.bit() == 0 {
            start = i + 1;
            break;
        }
    }
    let pos = (start..w.len()).find(|&p| s < w[p]).unwrap_or(w.len());
    w.insert(pos, s);
}

/// True when the normal form of `g·s` is the normal form of `g` followed by
/// `s`; every normal form of positive length has exactly one such parent.
pub(crate) fn appends_normally(d: &Diagram, nf: &[Gen], s: Gen) -> bool {
    let link = d.link(s);
    for &t in nf.iter().rev() {
        if t == s {
            return false;
        }
        if link & t.bit() == 0 {
            return true;
        }
        if t > s {
            return false;
        }
    }
    true
}

/// Normal form of `s·g` from the normal form of `g`.
pub fn gen_mul(d: &Diagram, s: Gen, nf: &[Gen]) -> Vec<Gen> {
    let mut w = Vec::with_capacity(nf.len() + 1);
    w.push(s);
    w.extend_from_slice(nf);
    lex_normal_form(d, &tits_reduce(d, &w))
}

/// Every geodesic representative of the element of `w`: the closure of its
/// normal form under swaps of adjacent commuting letters.
pub fn enumerate_geodesics(d: &Diagram, w: &Word, cap: usize) -> Result<BTreeSet<Word>> {
    let start = reduce(d, w).into_word();
    let mut seen: HashSet<Vec<Gen>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.0.clone());
    queue.push_back(start.0);
    while let Some(cur) = queue.pop_front() {
        for i in 0..cur.len().saturating_sub(1) {
            if d.commutes(cur[i], cur[i + 1]) {
                let mut next = cur.clone();
                next.swap(i, i + 1);
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        return Err(CoxError::CapExceeded {
                            what: "geodesic representatives",
                            cap,
                        });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(seen.into_iter().map(Word).collect())
}

/// Occurrence count of each generator, indexed by generator.
pub fn letter_counts(d: &Diagram, w: &Word) -> Vec<usize> {
    let mut counts = vec![0; d.len()];
    for g in w.letters() {
        counts[g.idx()] += 1;
    }
    counts
}

/// Helper for `Display` of words against a diagram.
pub struct Rendered<'a>(pub &'a Diagram, pub &'a [Gen]);

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.render_compact(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn w(d: &Diagram, s: &str) -> Word {
        d.parse_word(s).unwrap()
    }

    fn nf(d: &Diagram, s: &str) -> String {
        d.render_compact(reduce(d, &w(d, s)).letters())
    }

    #[test]
    fn reduce_examples() {
        let q = fixtures::square();
        assert_eq!(nf(&q, "abba"), "");
        assert_eq!(nf(&q, "ba"), "ab");
        // b commutes with a and c, so the least geodesic is abca
        assert_eq!(nf(&q, "baca"), "abca");
        assert_eq!(nf(&q, "b a c a"), nf(&q, "acab"));
    }

    #[test]
    fn parse_errors() {
        let q = fixtures::square();
        assert_eq!(q.parse_word("a z"), Err(CoxError::UnknownGenerator("z".into())));
        assert_eq!(q.parse_word("").unwrap(), Word::empty());
        assert_eq!(q.parse_word("  ").unwrap(), Word::empty());
    }

    #[test]
    fn geodesic_examples() {
        let q = fixtures::square();
        assert!(is_geodesic(&q, &w(&q, "acab")));
        assert!(is_geodesic(&q, &w(&q, "acba")));
        assert!(!is_geodesic(&q, &w(&q, "aa")));
        assert!(!is_geodesic(&q, &w(&q, "abab")));
        assert!(reduce(&q, &w(&q, "abab")).is_empty());
        assert!(is_geodesic(&q, &Word::empty()));
    }

    #[test]
    fn equality_examples() {
        let q = fixtures::square();
        assert!(equals(&q, &w(&q, "acab"), &w(&q, "baca")));
        assert!(equals(&q, &w(&q, "cab"), &w(&q, "cab")));
        assert!(!equals(&q, &w(&q, "ac"), &w(&q, "ca")));
    }

    #[test]
    fn lex_normal_form_is_not_a_bubble_fixpoint() {
        // a commutes with b only, b commutes with c only: "cab" is stable
        // under sorting adjacent commuting pairs, yet "bca" is smaller.
        let d = Diagram::from_edges(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(nf(&d, "cab"), "bca");
    }

    #[test]
    fn geodesic_enumeration() {
        let q = fixtures::square();
        let got: Vec<String> = enumerate_geodesics(&q, &w(&q, "acab"), 100)
            .unwrap()
            .iter()
            .map(|x| q.render_compact(x.letters()))
            .collect();
        assert_eq!(got, vec!["abca", "acab", "acba", "baca"]);
        let e = enumerate_geodesics(&q, &Word::empty(), 10).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(enumerate_geodesics(&q, &w(&q, "acac"), 10).unwrap().len(), 1);
        assert!(matches!(
            enumerate_geodesics(&q, &w(&q, "acab"), 2),
            Err(CoxError::CapExceeded { .. })
        ));
    }

    #[test]
    fn counts() {
        let q = fixtures::square();
        assert_eq!(letter_counts(&q, &w(&q, "acab")), vec![2, 1, 1, 0]);
        assert_eq!(letter_counts(&q, &Word::empty()), vec![0; 4]);
        for g in enumerate_geodesics(&q, &w(&q, "acab"), 100).unwrap() {
            assert_eq!(letter_counts(&q, &g), vec![2, 1, 1, 0]);
        }
    }

    fn word_strategy(n: u8, max_len: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(0..n, 0..=max_len).prop_map(|v| Word::new(v.into_iter().map(Gen).collect()))
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(x in word_strategy(6, 14)) {
            let f = fixtures::example_f();
            let once = reduce(&f, &x);
            prop_assert_eq!(reduce(&f, once.word()), once.clone());
            prop_assert!(is_geodesic(&f, once.word()));
        }

        #[test]
        fn involution(x in word_strategy(6, 12), s in 0u8..6) {
            let f = fixtures::example_f();
            let s = Gen(s);
            let mut y = x.letters().to_vec();
            y.extend([s, s]);
            prop_assert_eq!(reduce(&f, &Word::new(y)), reduce(&f, &x));
        }

        #[test]
        fn incremental_multiplication_matches_reduce(x in word_strategy(6, 12), s in 0u8..6) {
            let f = fixtures::example_f();
            let g = reduce(&f, &x);
            let mut y = g.letters().to_vec();
            y.push(Gen(s));
            prop_assert_eq!(mul_gen(&f, g.letters(), Gen(s)), reduce(&f, &Word::new(y)).into_word().into_letters());
            let mut z = vec![Gen(s)];
            z.extend_from_slice(g.letters());
            prop_assert_eq!(gen_mul(&f, Gen(s), g.letters()), reduce(&f, &Word::new(z)).into_word().into_letters());
        }

        #[test]
        fn normal_form_is_least_geodesic(x in word_strategy(5, 8)) {
            let p = fixtures::pentagon();
            let q = fixtures::square();
            for d in [&p, &q] {
                let x = Word::new(x.letters().iter().copied().filter(|g| g.idx() < d.len()).collect());
                let g = reduce(d, &x);
                let all = enumerate_geodesics(d, g.word(), 10_000).unwrap();
                prop_assert_eq!(all.iter().next().unwrap(), g.word());
                prop_assert!(all.iter().all(|y| is_geodesic(d, y) && y.len() == g.len()));
            }
        }
    }
}
