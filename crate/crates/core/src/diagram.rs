//! Right-angled Coxeter diagrams, their squares, and diagonal choices.
//!
//! A diagram is a simple graph on the generating set: an edge means the two
//! generators commute (`m = 2`), a missing edge means they generate an
//! infinite dihedral group (`m = ∞`). The order in which generators are
//! declared is the order used by every shortlex comparison in the crate.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clique::max_clique_size;
use crate::error::{CoxError, Result};

/// Largest supported generating set; commutation is stored as `u64` masks.
pub const MAX_GENERATORS: usize = 64;

/// A generator, identified by its position in the diagram's generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Gen(pub u8);

impl Gen {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn bit(self) -> u64 {
        1u64 << self.0
    }
}

/// An unordered pair of distinct generators, stored with the smaller index
/// first. The derived order is the shortlex order on pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(Gen, Gen);

impl Pair {
    pub fn new(a: Gen, b: Gen) -> Pair {
        assert_ne!(a, b, "a pair needs two distinct generators");
        if a < b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn lo(self) -> Gen {
        self.0
    }

    pub fn hi(self) -> Gen {
        self.1
    }

    pub fn contains(self, g: Gen) -> bool {
        self.0 == g || self.1 == g
    }

    pub fn mask(self) -> u64 {
        self.0.bit() | self.1.bit()
    }

    pub fn shares_letter(self, other: Pair) -> bool {
        self.mask() & other.mask() != 0
    }

    /// The other generator of the pair.
    pub fn other(self, g: Gen) -> Gen {
        if self.0 == g {
            self.1
        } else {
            self.0
        }
    }
}

/// An achordal simple 4-circuit `a-b-c-d-a`, stored in canonical orientation:
/// `a` is the least generator and `b < d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square([Gen; 4]);

impl Square {
    /// Canonicalises an arbitrary rotation or reflection of a 4-cycle.
    pub fn new(cycle: [Gen; 4]) -> Square {
        let start = (0..4).min_by_key(|&i| cycle[i]).unwrap();
        let fwd = [0, 1, 2, 3].map(|k| cycle[(start + k) % 4]);
        let bwd = [0, 1, 2, 3].map(|k| cycle[(start + 4 - k) % 4]);
        Square(fwd.min(bwd))
    }

    pub fn cycle(&self) -> [Gen; 4] {
        self.0
    }

    /// The two diagonals, in shortlex order.
    pub fn diagonals(&self) -> [Pair; 2] {
        let [a, b, c, d] = self.0;
        let mut ds = [Pair::new(a, c), Pair::new(b, d)];
        ds.sort();
        ds
    }

    pub fn has_diagonal(&self, p: Pair) -> bool {
        self.diagonals().contains(&p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    names: Vec<String>,
    commute: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile {
    generators: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default)]
    diagonals: Option<Vec<(String, String)>>,
}

#[derive(Serialize)]
struct DiagramFileOut<'a> {
    generators: &'a [String],
    edges: Vec<(&'a str, &'a str)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonals: Option<Vec<(&'a str, &'a str)>>,
}

/// Parses a diagram file, ignoring any `diagonals` entry.
pub fn parse_diagram(text: &str) -> Result<Diagram> {
    parse_diagram_file(text).map(|(d, _)| d)
}

/// Parses a diagram file and returns the optional list of declared diagonals.
pub fn parse_diagram_file(text: &str) -> Result<(Diagram, Option<Vec<Pair>>)> {
    let file: DiagramFile = serde_json::from_str(text).map_err(|e| CoxError::Format(e.to_string()))?;
    let mut edges = Vec::with_capacity(file.edges.len());
    let mut seen = HashSet::new();
    for (a, b) in &file.edges {
        // Byte-identical repeats are dropped; other duplicates are caught below.
        if seen.insert((a.as_str(), b.as_str())) {
            edges.push((a.as_str(), b.as_str()));
        }
    }
    let names: Vec<&str> = file.generators.iter().map(String::as_str).collect();
    let diagram = Diagram::from_edges(&names, &edges)?;
    let diagonals = match file.diagonals {
        None => None,
        Some(list) => Some(
            list.iter()
                .map(|(a, b)| diagram.pair(a, b))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok((diagram, diagonals))
}

impl Diagram {
    pub fn from_edges(names: &[&str], edges: &[(&str, &str)]) -> Result<Diagram> {
        if names.len() > MAX_GENERATORS {
            return Err(CoxError::TooManyGenerators(names.len()));
        }
        let mut owned: Vec<String> = Vec::with_capacity(names.len());
        for &name in names {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(CoxError::InvalidName(name.to_string()));
            }
            if owned.iter().any(|n| n == name) {
                return Err(CoxError::DuplicateGenerator(name.to_string()));
            }
            owned.push(name.to_string());
        }
        let mut d = Diagram {
            commute: vec![0; owned.len()],
            names: owned,
        };
        for &(a, b) in edges {
            let ga = d.gen(a).ok_or_else(|| CoxError::UnknownEdgeEndpoint(a.to_string()))?;
            let gb = d.gen(b).ok_or_else(|| CoxError::UnknownEdgeEndpoint(b.to_string()))?;
            if ga == gb {
                return Err(CoxError::SelfLoop(a.to_string()));
            }
            if d.commutes(ga, gb) {
                return Err(CoxError::DuplicateEdge(a.to_string(), b.to_string()));
            }
            d.commute[ga.idx()] |= gb.bit();
            d.commute[gb.idx()] |= ga.bit();
        }
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        (0..self.names.len()).map(|i| Gen(i as u8))
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.names[g.idx()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn gen(&self, name: &str) -> Option<Gen> {
        self.names.iter().position(|n| n == name).map(|i| Gen(i as u8))
    }

    pub fn pair(&self, a: &str, b: &str) -> Result<Pair> {
        let ga = self.gen(a).ok_or_else(|| CoxError::UnknownGenerator(a.to_string()))?;
        let gb = self.gen(b).ok_or_else(|| CoxError::UnknownGenerator(b.to_string()))?;
        if ga == gb {
            return Err(CoxError::SelfLoop(a.to_string()));
        }
        Ok(Pair::new(ga, gb))
    }

    #[inline]
    pub fn commutes(&self, a: Gen, b: Gen) -> bool {
        self.commute[a.idx()] & b.bit() != 0
    }

    /// Bitmask of the generators commuting with `g` (excluding `g`).
    #[inline]
    pub fn link(&self, g: Gen) -> u64 {
        self.commute[g.idx()]
    }

    /// True when every generator in `mask_a` commutes with every generator
    /// in `mask_b`. Overlapping supports never commute.
    pub fn masks_commute(&self, mask_a: u64, mask_b: u64) -> bool {
        if mask_a & mask_b != 0 {
            return false;
        }
        let mut rest = mask_a;
        while rest != 0 {
            let i = rest.trailing_zeros();
            if mask_b & !self.commute[i as usize] != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    }

    pub fn edges(&self) -> Vec<(Gen, Gen)> {
        let mut out = Vec::new();
        for a in self.gens() {
            for b in self.gens().filter(|&b| b > a) {
                if self.commutes(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn pair_name(&self, p: Pair) -> String {
        format!("{}{}", self.name(p.lo()), self.name(p.hi()))
    }

    /// Serialises back to the diagram file format.
    pub fn to_json(&self, diagonals: Option<&[Pair]>) -> String {
        let out = DiagramFileOut {
            generators: &self.names,
            edges: self
                .edges()
                .into_iter()
                .map(|(a, b)| (self.name(a), self.name(b)))
                .collect(),
            diagonals: diagonals.map(|ps| ps.iter().map(|p| (self.name(p.lo()), self.name(p.hi()))).collect()),
        };
        serde_json::to_string(&out).expect("diagram serialisation cannot fail")
    }

    /// All squares, each once, sorted by canonical cycle.
    pub fn find_squares(&self) -> Vec<Square> {
        let mut out = Vec::new();
        for a in self.gens() {
            let above_a = u64::MAX.checked_shl(a.idx() as u32 + 1).unwrap_or(0);
            for c in self.gens().filter(|&c| c > a && !self.commutes(a, c)) {
                let common = self.link(a) & self.link(c) & above_a;
                let members: Vec<Gen> = bits(common).collect();
                for (i, &b) in members.iter().enumerate() {
                    for &d in &members[i + 1..] {
                        if !self.commutes(b, d) {
                            out.push(Square([a, b, c, d]));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Moussong's criterion: hyperbolic iff the diagram has no squares.
    pub fn is_hyperbolic(&self) -> bool {
        self.find_squares().is_empty()
    }

    /// Largest number of generators commuting with a single generator.
    pub fn commuting_degree(&self) -> usize {
        self.commute.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// One less than the size of a largest family of pairwise commuting
    /// syllable types, where the types are the generators and the chosen
    /// pairs. Commuting syllables must have disjoint supports.
    pub fn compute_m(&self, choice: &DiagonalChoice) -> usize {
        let pairs = choice.pairs();
        let masks: Vec<u64> = self
            .gens()
            .map(Gen::bit)
            .chain(pairs.iter().map(|p| p.mask()))
            .collect();
        let n = masks.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let c = self.masks_commute(masks[i], masks[j]);
                adj[i][j] = c;
                adj[j][i] = c;
            }
        }
        max_clique_size(&adj).saturating_sub(1)
    }
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = Gen> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        Some(Gen(i as u8))
    })
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json(None))
    }
}

/// How two squares assigned the same diagonal pair are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    /// Equal pairs conflict.
    Strict,
    /// Equal pairs count as a single subgroup.
    CollapseEqual,
}

/// One selected diagonal per square.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagonalChoice {
    assignment: BTreeMap<Square, Pair>,
}

impl DiagonalChoice {
    pub fn new(assignment: BTreeMap<Square, Pair>) -> DiagonalChoice {
        DiagonalChoice { assignment }
    }

    pub fn empty() -> DiagonalChoice {
        DiagonalChoice::default()
    }

    /// Builds a choice from a list of pairs: each square takes the first
    /// listed pair that is one of its diagonals. Every listed pair must be a
    /// diagonal of some square.
    pub fn from_pairs(d: &Diagram, pairs: &[Pair]) -> Result<DiagonalChoice> {
        let squares = d.find_squares();
        for &p in pairs {
            if !squares.iter().any(|s| s.has_diagonal(p)) {
                return Err(CoxError::NotADiagonal(
                    d.name(p.lo()).to_string(),
                    d.name(p.hi()).to_string(),
                ));
            }
        }
        let assignment = squares
            .iter()
            .filter_map(|&s| pairs.iter().find(|&&p| s.has_diagonal(p)).map(|&p| (s, p)))
            .collect();
        Ok(DiagonalChoice { assignment })
    }

    pub fn assignment(&self) -> &BTreeMap<Square, Pair> {
        &self.assignment
    }

    /// Deduplicated chosen pairs in shortlex order.
    pub fn pairs(&self) -> Vec<Pair> {
        self.assignment
            .values()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceReport {
    pub covers_all: bool,
    pub admissible_strict: bool,
    pub admissible_collapse: bool,
}

fn conflicts(p: Pair, q: Pair, mode: AdmissibilityMode) -> bool {
    if p == q {
        mode == AdmissibilityMode::Strict
    } else {
        p.shares_letter(q)
    }
}

fn pairwise_ok(pairs: &[Pair], mode: AdmissibilityMode) -> bool {
    pairs
        .iter()
        .enumerate()
        .all(|(i, &p)| pairs[i + 1..].iter().all(|&q| !conflicts(p, q, mode)))
}

pub fn validate_choice(d: &Diagram, c: &DiagonalChoice) -> Result<ChoiceReport> {
    let squares = d.find_squares();
    for (s, &p) in &c.assignment {
        if !squares.contains(s) {
            return Err(CoxError::NotASquare);
        }
        if !s.has_diagonal(p) {
            return Err(CoxError::NotADiagonal(
                d.name(p.lo()).to_string(),
                d.name(p.hi()).to_string(),
            ));
        }
    }
    let assigned: Vec<Pair> = c.assignment.values().copied().collect();
    Ok(ChoiceReport {
        covers_all: squares.iter().all(|s| c.assignment.contains_key(s)),
        admissible_strict: pairwise_ok(&assigned, AdmissibilityMode::Strict),
        admissible_collapse: pairwise_ok(&assigned, AdmissibilityMode::CollapseEqual),
    })
}

/// Exhaustive backtracking for an admissible choice. Diagonals are tried in
/// shortlex order, so the first success is the canonical answer.
pub fn choose_admissible(d: &Diagram, mode: AdmissibilityMode) -> Option<DiagonalChoice> {
    let squares = d.find_squares();
    let mut chosen: Vec<Pair> = Vec::with_capacity(squares.len());
    if backtrack(&squares, mode, &mut chosen) {
        Some(DiagonalChoice {
            assignment: squares.into_iter().zip(chosen).collect(),
        })
    } else {
        None
    }
}

fn backtrack(squares: &[Square], mode: AdmissibilityMode, chosen: &mut Vec<Pair>) -> bool {
    let Some(square) = squares.get(chosen.len()) else {
        return true;
    };
    for p in square.diagonals() {
        if chosen.iter().all(|&q| !conflicts(p, q, mode)) {
            chosen.push(p);
            if backtrack(squares, mode, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}
