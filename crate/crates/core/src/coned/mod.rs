//! Finite balls of the Cayley graph with the coned-off structure attached.
//!
//! Elements are stored as packed normal forms in shortlex order, so a layer
//! of the ball is a sorted run of keys and lookup is a binary search. Each
//! chosen pair contributes one cone vertex per coset meeting the ball, keyed
//! by its minimal coset representative. Distances are computed in doubled
//! units (Cayley edges weigh 2, cone edges weigh 1) from the identity and from
//! each identity cone, and translated everywhere else by left-invariance.

mod blocks;
mod export;

use std::sync::OnceLock;

use serde::Serialize;

use crate::diagram::{DiagonalChoice, Diagram, Gen, Pair};
use crate::error::{CoxError, Result};
use crate::exec::{self, Execution};
use crate::halfint::HalfInt;
use crate::syllable::PairSet;
use crate::word::{appends_normally, lex_normal_form, mul_gen_in_place, reduce, NormalForm, Word};

pub use blocks::{bar_projection, geodesify_bar, Block, BlockSeq, GeodesifyReport};
pub use export::BallDump;

const NONE: u32 = u32::MAX;
const UNREACHED: u16 = u16::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HatVertex {
    /// Element vertex, by ball index.
    Element(u32),
    /// Cone vertex, by cone id.
    Cone(u32),
}

/// A path in the coned ball; consecutive vertices are adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HatPath {
    pub vertices: Vec<HatVertex>,
    pub length: HalfInt,
}

/// Result of a translated distance lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Certified(HalfInt),
    /// The translated target is not in the ball.
    Outside,
    /// Every shortest path to the translated target meets the outer layer,
    /// so the value could change with a larger ball.
    Shell,
}

/// Single-source distances over all vertices (elements, then cones).
#[derive(Debug)]
pub struct DistanceTable {
    dist: Vec<u16>,
    needs_shell: Vec<bool>,
}

impl DistanceTable {
    fn lookup(&self, v: usize) -> Lookup {
        if self.dist[v] == UNREACHED {
            Lookup::Outside
        } else if self.needs_shell[v] {
            Lookup::Shell
        } else {
            Lookup::Certified(HalfInt::from_doubled(self.dist[v] as u32))
        }
    }
}

/// Packs a normal form into a `u128`, first letter in the highest digit, so
/// numeric order within one length is lexicographic order.
#[derive(Clone, Copy, Debug)]
struct Codec {
    bits: u32,
}

impl Codec {
    fn new(generators: usize) -> Codec {
        Codec {
            bits: usize::BITS - generators.leading_zeros(),
        }
    }

    fn max_len(&self) -> usize {
        (128 / self.bits.max(1)) as usize
    }

    fn encode(&self, letters: &[Gen]) -> u128 {
        letters.iter().fold(0u128, |k, g| (k << self.bits) | (g.0 as u128 + 1))
    }

    fn push(&self, key: u128, g: Gen) -> u128 {
        (key << self.bits) | (g.0 as u128 + 1)
    }

    fn len(&self, key: u128) -> usize {
        ((128 - key.leading_zeros()) as usize).div_ceil(self.bits as usize)
    }

    fn decode_into(&self, key: u128, out: &mut Vec<Gen>) {
        out.clear();
        let mask = (1u128 << self.bits) - 1;
        for i in (0..self.len(key)).rev() {
            out.push(Gen((((key >> (self.bits as usize * i)) & mask) - 1) as u8));
        }
    }
}

pub struct ConedBall {
    diagram: Diagram,
    choice: DiagonalChoice,
    pairs: PairSet,
    radius: usize,
    codec: Codec,
    keys: Vec<u128>,
    layer_start: Vec<usize>,
    nbr: Vec<u32>,
    cone_of: Vec<u32>,
    cone_pair: Vec<u8>,
    cone_rep: Vec<u32>,
    cone_start: Vec<u32>,
    cone_members: Vec<u32>,
    from_identity: OnceLock<DistanceTable>,
    from_cone: Vec<OnceLock<DistanceTable>>,
}

impl std::fmt::Debug for ConedBall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConedBall")
            .field("radius", &self.radius)
            .field("elements", &self.num_elements())
            .field("cones", &self.num_cones())
            .finish()
    }
}

/// Builds the radius-`radius` ball around the identity with its cones.
pub fn build_ball(d: &Diagram, c: &DiagonalChoice, radius: usize, cap: usize) -> Result<ConedBall> {
    build_ball_with(d, c, radius, cap, Execution::Auto)
}

pub fn build_ball_with(
    d: &Diagram,
    c: &DiagonalChoice,
    radius: usize,
    cap: usize,
    exec: Execution,
) -> Result<ConedBall> {
    let codec = check_radius(d, radius)?;
    let mut keys = vec![0u128];
    let mut layer_start = vec![0, 1];
    for len in 0..radius {
        let parents = &keys[layer_start[len]..layer_start[len + 1]];
        let next = exec::chunked_collect(parents, 4096, exec, |chunk, out| {
            let mut buf = Vec::with_capacity(len + 1);
            for &key in chunk {
                codec.decode_into(key, &mut buf);
                for s in d.gens() {
                    if appends_normally(d, &buf, s) {
                        out.push(codec.push(key, s));
                    }
                }
            }
        });
        if keys.len() + next.len() > cap {
            return Err(CoxError::CapExceeded {
                what: "ball vertices",
                cap,
            });
        }
        keys.extend(next);
        layer_start.push(keys.len());
    }
    finish(d, c, radius, codec, keys, layer_start, exec)
}

fn check_radius(d: &Diagram, radius: usize) -> Result<Codec> {
    let codec = Codec::new(d.len());
    if radius > codec.max_len() || radius >= (UNREACHED as usize) / 2 {
        return Err(CoxError::Precondition(format!(
            "radius {radius} exceeds the packed-key limit of {} for {} generators",
            codec.max_len(),
            d.len()
        )));
    }
    Ok(codec)
}

/// Derives neighbours and cones from a complete, shortlex-sorted key list.
fn finish(
    d: &Diagram,
    c: &DiagonalChoice,
    radius: usize,
    codec: Codec,
    keys: Vec<u128>,
    layer_start: Vec<usize>,
    exec: Execution,
) -> Result<ConedBall> {
    let n = keys.len();
    if n >= NONE as usize {
        return Err(CoxError::CapExceeded {
            what: "ball vertices",
            cap: NONE as usize - 1,
        });
    }
    let pairs = PairSet::new(c);
    let mut ball = ConedBall {
        diagram: d.clone(),
        choice: c.clone(),
        pairs,
        radius,
        codec,
        keys,
        layer_start,
        nbr: Vec::new(),
        cone_of: Vec::new(),
        cone_pair: Vec::new(),
        cone_rep: Vec::new(),
        cone_start: Vec::new(),
        cone_members: Vec::new(),
        from_identity: OnceLock::new(),
        from_cone: Vec::new(),
    };

    let ng = d.len();
    let mut nbr = vec![NONE; n * ng];
    exec::for_each_row(&mut nbr, ng, exec, |i, row| {
        let mut buf = Vec::with_capacity(radius + 1);
        let key = ball.keys[i];
        let len = ball.codec.len(key);
        for (s, slot) in d.gens().zip(row.iter_mut()) {
            ball.codec.decode_into(key, &mut buf);
            mul_gen_in_place(d, &mut buf, s);
            if buf.len() <= radius {
                *slot = ball.index_of_key(ball.codec.encode(&buf)).unwrap_or(NONE);
            }
            debug_assert!(buf.len() == len + 1 || buf.len() + 1 == len);
        }
    });
    if nbr
        .iter()
        .enumerate()
        .any(|(k, &v)| v == NONE && ball.codec.len(ball.keys[k / ng]) < radius)
    {
        return Err(CoxError::Invariant(
            "ball is not closed under neighbours below its radius".into(),
        ));
    }
    ball.nbr = nbr;

    let np = ball.pairs.len();
    let mut cone_of = vec![NONE; n * np];
    let mut cone_pair = Vec::new();
    let mut cone_rep = Vec::new();
    for (p, pair) in ball.pairs.pairs().iter().enumerate() {
        let (a, cc) = (pair.lo().idx(), pair.hi().idx());
        for i in 0..n {
            // a right descent in the pair leads to a shorter coset member
            let down_a = ball.nbr[i * ng + a];
            let down_c = ball.nbr[i * ng + cc];
            cone_of[i * np + p] = if (down_a as usize) < i {
                cone_of[down_a as usize * np + p]
            } else if (down_c as usize) < i {
                cone_of[down_c as usize * np + p]
            } else {
                cone_pair.push(p as u8);
                cone_rep.push(i as u32);
                (cone_rep.len() - 1) as u32
            };
        }
    }
    let nc = cone_rep.len();
    if n + nc >= NONE as usize {
        return Err(CoxError::CapExceeded {
            what: "ball vertices",
            cap: NONE as usize - 1,
        });
    }
    let mut cone_start = vec![0u32; nc + 1];
    for &k in &cone_of {
        cone_start[k as usize + 1] += 1;
    }
    for k in 0..nc {
        cone_start[k + 1] += cone_start[k];
    }
    let mut fill = cone_start.clone();
    let mut cone_members = vec![0u32; cone_of.len()];
    for i in 0..n {
        for p in 0..np {
            let k = cone_of[i * np + p] as usize;
            cone_members[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
    }
    ball.cone_of = cone_of;
    ball.cone_pair = cone_pair;
    ball.cone_rep = cone_rep;
    ball.cone_start = cone_start;
    ball.cone_members = cone_members;
    ball.from_cone = (0..np).map(|_| OnceLock::new()).collect();
    Ok(ball)
}

/// Minimal-length representative of the coset `g·⟨pair⟩`.
pub fn coset_rep(d: &Diagram, g: &Word, pair: Pair) -> NormalForm {
    let mut w = reduce(d, g).into_word().into_letters();
    loop {
        let strip = [pair.lo(), pair.hi()]
            .into_iter()
            .find_map(|s| crate::word::right_descent(d, &w, s));
        match strip {
            Some(i) => {
                w.remove(i);
            }
            None => break,
        }
    }
    NormalForm::from_normalized(lex_normal_form(d, &w))
}

impl ConedBall {
    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn choice(&self) -> &DiagonalChoice {
        &self.choice
    }

    pub fn pairs(&self) -> &PairSet {
        &self.pairs
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn num_elements(&self) -> usize {
        self.keys.len()
    }

    pub fn num_cones(&self) -> usize {
        self.cone_rep.len()
    }

    /// Element counts by length.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layer_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn identity(&self) -> u32 {
        0
    }

    fn index_of_key(&self, key: u128) -> Option<u32> {
        let len = self.codec.len(key);
        if len > self.radius {
            return None;
        }
        let (lo, hi) = (self.layer_start[len], self.layer_start[len + 1]);
        self.keys[lo..hi].binary_search(&key).ok().map(|i| (lo + i) as u32)
    }

    fn index_of_normal(&self, nf: &[Gen]) -> Option<u32> {
        if nf.len() > self.radius {
            return None;
        }
        self.index_of_key(self.codec.encode(nf))
    }

    /// Ball index of the element represented by `w`.
    pub fn element(&self, w: &Word) -> Result<u32> {
        self.index_of_normal(reduce(&self.diagram, w).letters())
            .ok_or(CoxError::OutsideBall)
    }

    pub fn element_letters(&self, i: u32) -> Vec<Gen> {
        let mut out = Vec::new();
        self.codec.decode_into(self.keys[i as usize], &mut out);
        out
    }

    pub fn element_word(&self, i: u32) -> NormalForm {
        NormalForm::from_normalized(self.element_letters(i))
    }

    pub fn element_len(&self, i: u32) -> usize {
        self.codec.len(self.keys[i as usize])
    }

    /// Elements of length at most `r`, in shortlex order.
    pub fn elements_within(&self, r: usize) -> std::ops::Range<u32> {
        0..self.layer_start[r.min(self.radius) + 1] as u32
    }

    pub fn is_shell(&self, i: u32) -> bool {
        i as usize >= self.layer_start[self.radius]
    }

    /// Ball index of `g·s`, if inside the ball.
    pub fn gamma_neighbour(&self, i: u32, s: Gen) -> Option<u32> {
        let v = self.nbr[i as usize * self.diagram.len() + s.idx()];
        (v != NONE).then_some(v)
    }

    /// The cone of the coset of element `i` for the `p`-th chosen pair.
    pub fn cone_of(&self, i: u32, p: usize) -> u32 {
        self.cone_of[i as usize * self.pairs.len() + p]
    }

    /// Cone id of the coset `g·⟨pair⟩`.
    pub fn cone(&self, i: u32, pair: Pair) -> Result<u32> {
        let p = self.pairs.index_of(pair).ok_or_else(|| {
            CoxError::UnknownPair(self.diagram.name(pair.lo()).into(), self.diagram.name(pair.hi()).into())
        })?;
        Ok(self.cone_of(i, p))
    }

    pub fn cone_rep(&self, k: u32) -> u32 {
        self.cone_rep[k as usize]
    }

    pub fn cone_pair(&self, k: u32) -> Pair {
        self.pairs.pairs()[self.cone_pair[k as usize] as usize]
    }

    /// In-ball members of the coset, in shortlex order.
    pub fn cone_members(&self, k: u32) -> &[u32] {
        let (lo, hi) = (
            self.cone_start[k as usize] as usize,
            self.cone_start[k as usize + 1] as usize,
        );
        &self.cone_members[lo..hi]
    }

    fn vid(&self, v: HatVertex) -> usize {
        match v {
            HatVertex::Element(i) => i as usize,
            HatVertex::Cone(k) => self.keys.len() + k as usize,
        }
    }

    fn for_each_neighbour(&self, v: HatVertex, mut f: impl FnMut(HatVertex, u16)) {
        match v {
            HatVertex::Element(i) => {
                let ng = self.diagram.len();
                for &u in &self.nbr[i as usize * ng..(i as usize + 1) * ng] {
                    if u != NONE {
                        f(HatVertex::Element(u), 2);
                    }
                }
                let np = self.pairs.len();
                for &k in &self.cone_of[i as usize * np..(i as usize + 1) * np] {
                    f(HatVertex::Cone(k), 1);
                }
            }
            HatVertex::Cone(k) => {
                for &m in self.cone_members(k) {
                    f(HatVertex::Element(m), 1);
                }
            }
        }
    }

    fn vertex_of(&self, id: usize) -> HatVertex {
        if id < self.keys.len() {
            HatVertex::Element(id as u32)
        } else {
            HatVertex::Cone((id - self.keys.len()) as u32)
        }
    }

    fn dijkstra(&self, source: HatVertex) -> DistanceTable {
        let total = self.keys.len() + self.cone_rep.len();
        let mut dist = vec![UNREACHED; total];
        let mut needs_shell = vec![false; total];
        let shell = |v: HatVertex| matches!(v, HatVertex::Element(i) if self.is_shell(i));
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new()];
        let s = self.vid(source);
        dist[s] = 0;
        needs_shell[s] = shell(source);
        buckets[0].push(s as u32);
        let mut b = 0;
        while b < buckets.len() {
            while let Some(id) = buckets[b].pop() {
                let id = id as usize;
                if dist[id] as usize != b {
                    continue;
                }
                let v = self.vertex_of(id);
                let t = needs_shell[id];
                self.for_each_neighbour(v, |u, w| {
                    let uid = self.vid(u);
                    let nd = b + w as usize;
                    if nd < dist[uid] as usize {
                        dist[uid] = nd as u16;
                        needs_shell[uid] = t || shell(u);
                        if buckets.len() <= nd {
                            buckets.resize_with(nd + 1, Vec::new);
                        }
                        buckets[nd].push(uid as u32);
                    } else if nd == dist[uid] as usize && !t {
                        // a shell-free predecessor gives a shell-free path
                        needs_shell[uid] = shell(u);
                    }
                });
            }
            b += 1;
        }
        DistanceTable { dist, needs_shell }
    }

    /// Distances from the identity element.
    pub fn identity_table(&self) -> &DistanceTable {
        self.from_identity.get_or_init(|| self.dijkstra(HatVertex::Element(0)))
    }

    /// Distances from the cone of the `p`-th chosen pair at the identity.
    pub fn cone_table(&self, p: usize) -> &DistanceTable {
        self.from_cone[p].get_or_init(|| self.dijkstra(HatVertex::Cone(self.cone_of(0, p))))
    }

    /// Ball index of `g·w` for a word `w`, walking neighbour links and
    /// falling back to normal-form arithmetic past the outer layer.
    fn walk(&self, start: u32, letters: &[Gen]) -> Option<u32> {
        let mut idx = start;
        for (k, &s) in letters.iter().enumerate() {
            match self.gamma_neighbour(idx, s) {
                Some(next) => idx = next,
                None => {
                    let mut w = self.element_letters(idx);
                    for &t in &letters[k..] {
                        mul_gen_in_place(&self.diagram, &mut w, t);
                    }
                    return self.index_of_normal(&w);
                }
            }
        }
        Some(idx)
    }

    pub fn inverse(&self, x: u32) -> u32 {
        let rev: Vec<Gen> = self.element_letters(x).into_iter().rev().collect();
        self.index_of_normal(&lex_normal_form(&self.diagram, &rev))
            .expect("inverses have equal length")
    }

    /// Ball index of `x⁻¹·y`, if inside the ball.
    pub fn quotient(&self, x: u32, y: u32) -> Option<u32> {
        if x == 0 {
            return Some(y);
        }
        self.walk(self.inverse(x), &self.element_letters(y))
    }

    /// Ball index of `x·y`, if inside the ball.
    pub fn product(&self, x: u32, y: u32) -> Option<u32> {
        self.walk(x, &self.element_letters(y))
    }

    /// Distance between two ball vertices, translated to a cached table.
    pub fn vertex_distance(&self, x: HatVertex, y: HatVertex) -> Lookup {
        use HatVertex::*;
        match (x, y) {
            (Element(a), Element(b)) => match self.quotient(a, b) {
                Some(z) => self.identity_table().lookup(z as usize),
                None => Lookup::Outside,
            },
            (Cone(k), Element(b)) | (Element(b), Cone(k)) => {
                let p = self.cone_pair[k as usize] as usize;
                match self.quotient(self.cone_rep(k), b) {
                    Some(z) => self.cone_table(p).lookup(z as usize),
                    None => Lookup::Outside,
                }
            }
            (Cone(k1), Cone(k2)) => {
                let p1 = self.cone_pair[k1 as usize] as usize;
                let p2 = self.cone_pair[k2 as usize] as usize;
                match self.quotient(self.cone_rep(k1), self.cone_rep(k2)) {
                    Some(z) => {
                        let k = self.cone_of(z, p2);
                        self.cone_table(p1).lookup(self.vid(HatVertex::Cone(k)))
                    }
                    None => Lookup::Outside,
                }
            }
        }
    }

    /// Coned-off distance between two elements of the ball.
    pub fn hat_distance(&self, g1: u32, g2: u32) -> Result<HalfInt> {
        certified(self.vertex_distance(HatVertex::Element(g1), HatVertex::Element(g2)))
    }

    /// Cayley-graph distance between two elements of the ball.
    pub fn gamma_distance(&self, g1: u32, g2: u32) -> usize {
        let mut w = self.element_letters(g1);
        w.reverse();
        w.extend(self.element_letters(g2));
        crate::word::tits_reduce(&self.diagram, &w).len()
    }

    /// Left translate of a vertex, if it stays in the ball.
    pub fn translate(&self, g: u32, v: HatVertex) -> Option<HatVertex> {
        match v {
            HatVertex::Element(i) => self.product(g, i).map(HatVertex::Element),
            HatVertex::Cone(k) => {
                let p = self.cone_pair[k as usize] as usize;
                self.product(g, self.cone_rep(k))
                    .map(|r| HatVertex::Cone(self.cone_of(r, p)))
            }
        }
    }

    /// All coned-off geodesics from `g1` to `g2`, sorted by vertex sequence.
    pub fn enumerate_hat_geodesics(&self, g1: u32, g2: u32, cap: usize) -> Result<Vec<HatPath>> {
        let target = self.quotient(g1, g2).ok_or(CoxError::OutsideBall)?;
        let table = self.identity_table();
        let length = certified(table.lookup(target as usize))?;
        let mut paths = Vec::new();
        let mut stack = vec![HatVertex::Element(target)];
        self.collect_paths(table, &mut stack, &mut paths, cap)?;
        if g1 != 0 {
            for path in &mut paths {
                for v in &mut path.vertices {
                    *v = self
                        .translate(g1, *v)
                        .ok_or_else(|| CoxError::BallTooSmall("translated geodesic leaves the ball".into()))?;
                }
            }
        }
        for p in &mut paths {
            p.length = length;
        }
        paths.sort();
        paths.dedup();
        let on_shell = |v: &HatVertex| matches!(*v, HatVertex::Element(i) if self.is_shell(i));
        if paths.iter().any(|p| p.vertices.iter().any(on_shell)) {
            return Err(CoxError::BallTooSmall(
                "a geodesic reaches the outer layer of the ball".into(),
            ));
        }
        Ok(paths)
    }

    fn collect_paths(
        &self,
        table: &DistanceTable,
        stack: &mut Vec<HatVertex>,
        out: &mut Vec<HatPath>,
        cap: usize,
    ) -> Result<()> {
        let v = *stack.last().expect("nonempty");
        let dv = table.dist[self.vid(v)];
        if dv == 0 {
            if out.len() >= cap {
                return Err(CoxError::CapExceeded {
                    what: "coned-off geodesics",
                    cap,
                });
            }
            out.push(HatPath {
                vertices: stack.iter().rev().copied().collect(),
                length: HalfInt::ZERO,
            });
            return Ok(());
        }
        let mut preds = Vec::new();
        self.for_each_neighbour(v, |u, w| {
            let du = table.dist[self.vid(u)];
            if du != UNREACHED && du + w == dv {
                preds.push(u);
            }
        });
        for u in preds {
            stack.push(u);
            self.collect_paths(table, stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }

    /// Whether `u` and `v` are joined by an edge, and its doubled length.
    pub fn edge_length(&self, u: HatVertex, v: HatVertex) -> Option<u16> {
        let mut found = None;
        self.for_each_neighbour(u, |x, w| {
            if x == v {
                found = Some(w);
            }
        });
        found
    }

    /// The generator labelling the Cayley edge between `i` and `j`.
    pub fn edge_label(&self, i: u32, j: u32) -> Option<Gen> {
        self.diagram.gens().find(|&s| self.gamma_neighbour(i, s) == Some(j))
    }

    /// Sum of edge lengths, or `None` if some consecutive pair is not an edge.
    pub fn path_length(&self, vertices: &[HatVertex]) -> Option<HalfInt> {
        vertices.windows(2).try_fold(HalfInt::ZERO, |acc, w| {
            self.edge_length(w[0], w[1])
                .map(|l| acc + HalfInt::from_doubled(l as u32))
        })
    }

    pub fn render_vertex(&self, v: HatVertex) -> String {
        match v {
            HatVertex::Element(i) => render_element(&self.diagram, &self.element_letters(i)),
            HatVertex::Cone(k) => {
                let rep = self.element_letters(self.cone_rep(k));
                let pair = self.cone_pair(k);
                let prefix = if rep.is_empty() {
                    String::new()
                } else {
                    self.diagram.render_compact(&rep)
                };
                format!(
                    "{prefix}H_{{{}{}}}",
                    self.diagram.name(pair.lo()),
                    self.diagram.name(pair.hi())
                )
            }
        }
    }

    /// Hausdorff distance between the vertex sets of two paths.
    pub fn hausdorff(&self, p1: &HatPath, p2: &HatPath) -> Result<HalfInt> {
        let mut best = HalfInt::ZERO;
        for (a, b) in [(p1, p2), (p2, p1)] {
            let pos_b = positions(self, &b.vertices);
            let pos_a = positions(self, &a.vertices);
            let common_start = a.vertices.first() == b.vertices.first();
            for (i, &x) in a.vertices.iter().enumerate() {
                let mut known: Option<HalfInt> = None;
                let mut unknown_floor: Option<HalfInt> = None;
                for (j, &y) in b.vertices.iter().enumerate() {
                    match self.vertex_distance(x, y) {
                        Lookup::Certified(d) => known = Some(known.map_or(d, |k| k.min(d))),
                        _ if common_start => {
                            let lb = pos_a[i].abs_diff(pos_b[j]);
                            unknown_floor = Some(unknown_floor.map_or(lb, |u| u.min(lb)));
                        }
                        _ => {
                            return Err(CoxError::BallTooSmall(
                                "Hausdorff distance needs an uncertified lookup".into(),
                            ))
                        }
                    }
                }
                let m = settle(known, unknown_floor)?;
                best = best.max(m);
            }
        }
        Ok(best)
    }
}

/// Minimum over certified values, provided no uncertified candidate could
/// undercut it.
pub(crate) fn settle(known: Option<HalfInt>, floor: Option<HalfInt>) -> Result<HalfInt> {
    match (known, floor) {
        (Some(k), None) => Ok(k),
        (Some(k), Some(f)) if k <= f => Ok(k),
        _ => Err(CoxError::BallTooSmall(
            "an uncertified distance could undercut the minimum".into(),
        )),
    }
}

/// Cumulative lengths along a path.
pub(crate) fn positions(ball: &ConedBall, vertices: &[HatVertex]) -> Vec<HalfInt> {
    let mut out = Vec::with_capacity(vertices.len());
    let mut acc = HalfInt::ZERO;
    for (i, &v) in vertices.iter().enumerate() {
        if i > 0 {
            acc = acc + HalfInt::from_doubled(ball.edge_length(vertices[i - 1], v).unwrap_or(0) as u32);
        }
        out.push(acc);
    }
    out
}

fn certified(l: Lookup) -> Result<HalfInt> {
    match l {
        Lookup::Certified(d) => Ok(d),
        Lookup::Outside => Err(CoxError::OutsideBall),
        Lookup::Shell => Err(CoxError::BallTooSmall(
            "every shortest path reaches the outer layer of the ball".into(),
        )),
    }
}

pub(crate) fn render_element(d: &Diagram, letters: &[Gen]) -> String {
    if letters.is_empty() {
        "ε".into()
    } else {
        d.render_compact(letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q_ball(r: usize) -> ConedBall {
        let q = fixtures::square();
        let c = fixtures::square_choice(&q);
        build_ball(&q, &c, r, 1_000_000).unwrap()
    }

    fn el(ball: &ConedBall, s: &str) -> u32 {
        ball.element(&ball.diagram().parse_word(s).unwrap()).unwrap()
    }

    #[test]
    fn codec_round_trip() {
        let codec = Codec::new(6);
        assert_eq!(codec.bits, 3);
        let w = vec![Gen(0), Gen(5), Gen(2)];
        let k = codec.encode(&w);
        let mut out = Vec::new();
        codec.decode_into(k, &mut out);
        assert_eq!(out, w);
        assert_eq!(codec.len(0), 0);
        assert_eq!(codec.len(k), 3);
        assert!(codec.encode(&[Gen(0), Gen(1)]) < codec.encode(&[Gen(1), Gen(0)]));
    }

    #[test]
    fn small_balls() {
        let b0 = q_ball(0);
        assert_eq!(b0.num_elements(), 1);
        assert_eq!(b0.num_cones(), 1);
        assert_eq!(b0.cone_members(0), &[0]);

        let b1 = q_ball(1);
        assert_eq!(b1.num_elements(), 5);
        let h = b1.cone_of(0, 0);
        let members: Vec<String> = b1
            .cone_members(h)
            .iter()
            .map(|&m| b1.render_vertex(HatVertex::Element(m)))
            .collect();
        assert_eq!(members, ["ε", "a", "c"]);

        let p = fixtures::pentagon();
        let bp = build_ball(&p, &DiagonalChoice::empty(), 2, 1000).unwrap();
        assert_eq!(bp.num_cones(), 0);
        assert_eq!(bp.layer_sizes(), vec![1, 5, 15]);
    }

    #[test]
    fn layer_sizes_match_growth() {
        // D∞ × D∞ has 4n elements of length n ≥ 1
        let b = q_ball(6);
        assert_eq!(b.layer_sizes(), vec![1, 4, 8, 12, 16, 20, 24]);
        let f = fixtures::example_f();
        let bf = build_ball(&f, &fixtures::example_f_choice(&f), 6, 1_000_000).unwrap();
        assert_eq!(bf.layer_sizes(), vec![1, 6, 23, 80, 274, 936, 3196]);
        assert!(matches!(
            build_ball(&f, &DiagonalChoice::empty(), 6, 100),
            Err(CoxError::CapExceeded { .. })
        ));
    }

    #[test]
    fn coset_representatives() {
        let q = fixtures::square();
        let ac = q.pair("a", "c").unwrap();
        let w = |s: &str| q.parse_word(s).unwrap();
        assert!(coset_rep(&q, &w("aca"), ac).is_empty());
        assert_eq!(q.render(coset_rep(&q, &w("b"), ac).letters()), "b");
        assert_eq!(q.render(coset_rep(&q, &w("baca"), ac).letters()), "b");

        let b = q_ball(5);
        for i in b.elements_within(5) {
            let k = b.cone_of(i, 0);
            let rep = coset_rep(&q, b.element_word(i).word(), ac);
            assert_eq!(b.element_word(b.cone_rep(k)), rep);
        }
    }

    #[test]
    fn distances() {
        let b = q_ball(5);
        assert_eq!(b.hat_distance(0, el(&b, "acac")).unwrap(), HalfInt::ONE);
        assert_eq!(b.hat_distance(0, el(&b, "b")).unwrap(), HalfInt::ONE);
        assert_eq!(b.hat_distance(0, el(&b, "acab")).unwrap(), HalfInt::from_int(2));
        let x = el(&b, "ab");
        let y = el(&b, "bcb");
        assert_eq!(b.hat_distance(x, y).unwrap(), b.hat_distance(y, x).unwrap());
        // the outer layer is never certified
        let far = el(&b, "acaca");
        assert!(matches!(b.hat_distance(0, far), Err(CoxError::BallTooSmall(_))));
    }

    #[test]
    fn geodesics_of_the_worked_example() {
        let b = q_ball(5);
        let target = el(&b, "acab");
        let paths = b.enumerate_hat_geodesics(0, target, 100).unwrap();
        let rendered: Vec<Vec<String>> = paths
            .iter()
            .map(|p| p.vertices.iter().map(|&v| b.render_vertex(v)).collect())
            .collect();
        assert_eq!(rendered.len(), 2, "{rendered:?}");
        assert!(rendered.contains(&vec!["ε".into(), "H_{ac}".into(), "aca".into(), "abca".into()]));
        assert!(rendered.contains(&vec!["ε".into(), "b".into(), "bH_{ac}".into(), "abca".into()]));
        for p in &paths {
            assert_eq!(p.length, HalfInt::from_int(2));
            assert_eq!(b.path_length(&p.vertices), Some(p.length));
        }
        let trivial = b.enumerate_hat_geodesics(target, target, 10).unwrap();
        assert_eq!(trivial.len(), 1);
        assert_eq!(trivial[0].vertices.len(), 1);
    }

    #[test]
    fn translated_geodesics() {
        let b = q_ball(6);
        let g = el(&b, "b");
        let h = el(&b, "bacab");
        let paths = b.enumerate_hat_geodesics(g, h, 100).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert_eq!(p.vertices[0], HatVertex::Element(g));
            assert_eq!(*p.vertices.last().unwrap(), HatVertex::Element(h));
            assert_eq!(b.path_length(&p.vertices), Some(p.length));
        }
    }

    #[test]
    fn hausdorff_of_the_worked_example() {
        let b = q_ball(5);
        let paths = b.enumerate_hat_geodesics(0, el(&b, "acab"), 100).unwrap();
        assert_eq!(b.hausdorff(&paths[0], &paths[0]).unwrap(), HalfInt::ZERO);
        let h = b.hausdorff(&paths[0], &paths[1]).unwrap();
        assert_eq!(h, b.hausdorff(&paths[1], &paths[0]).unwrap());
        // aca and b are one cone transit plus one edge apart at most
        assert!(h <= HalfInt::from_int(2));
        assert!(h >= HalfInt::HALF);
    }

    #[test]
    fn pentagon_geodesics_are_cayley_geodesics() {
        let p = fixtures::pentagon();
        let b = build_ball(&p, &DiagonalChoice::empty(), 4, 10_000).unwrap();
        for g in b.elements_within(2) {
            for path in b.enumerate_hat_geodesics(0, g, 100).unwrap() {
                assert!(path.vertices.iter().all(|v| matches!(v, HatVertex::Element(_))));
                assert_eq!(path.length, HalfInt::from_int(b.element_len(g) as u32));
            }
        }
    }
}
