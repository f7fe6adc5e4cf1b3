use std::collections::BTreeSet;

use serde::Serialize;

use super::{ConedBall, HatPath, HatVertex};
use crate::diagram::{Diagram, Gen, Pair};
use crate::error::{CoxError, Result};
use crate::syllable::{min_syllable_cost, PairSet, Syllable, SyllableSeq};
use crate::word::{first_deletion, is_geodesic, lex_normal_form, NormalForm, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Block {
    /// Labels of a maximal run of Cayley edges.
    Gamma(Word),
    /// A cone transit and the dihedral word joining its endpoints.
    Hat { pair: Pair, word: Word },
}

impl Block {
    pub fn letters(&self) -> &[Gen] {
        match self {
            Block::Gamma(w) | Block::Hat { word: w, .. } => w.letters(),
        }
    }

    pub fn is_nontrivial_hat(&self) -> bool {
        matches!(self, Block::Hat { word, .. } if word.len() >= 2)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockSeq {
    pub blocks: Vec<Block>,
}

impl BlockSeq {
    pub fn new(blocks: Vec<Block>) -> BlockSeq {
        BlockSeq { blocks }
    }

    /// Coned-off length in whole units: one per Cayley edge and per transit.
    pub fn cost(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Gamma(w) => w.len(),
                Block::Hat { .. } => 1,
            })
            .sum()
    }

    /// Canonical syllables: each Cayley-edge letter and each transit is one
    /// syllable.
    pub fn to_syllables(&self, pairs: &PairSet) -> Result<SyllableSeq> {
        let mut words = Vec::new();
        for b in &self.blocks {
            match b {
                Block::Gamma(w) => words.extend(w.letters().iter().map(|&g| vec![g])),
                Block::Hat { word, .. } => words.push(word.letters().to_vec()),
            }
        }
        SyllableSeq::from_words(pairs, &words)
    }

    /// Blocks from canonical syllables: letters and trivial blocks become
    /// Cayley edges, nontrivial blocks become transits.
    pub fn from_syllables(s: &SyllableSeq) -> BlockSeq {
        let mut blocks = Vec::new();
        let mut run = Vec::new();
        for syl in s.syllables() {
            match syl {
                Syllable::Block { pair, word } if word.len() >= 2 => {
                    if !run.is_empty() {
                        blocks.push(Block::Gamma(Word::new(std::mem::take(&mut run))));
                    }
                    blocks.push(Block::Hat {
                        pair: *pair,
                        word: word.clone(),
                    });
                }
                other => run.extend_from_slice(other.letters()),
            }
        }
        if !run.is_empty() {
            blocks.push(Block::Gamma(Word::new(run)));
        }
        BlockSeq { blocks }
    }

    pub fn render(&self, d: &Diagram) -> String {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Gamma(w) => d.render_compact(w.letters()),
                Block::Hat { word, .. } => format!("[{}]", d.render_compact(word.letters())),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The word labelling the Cayley path obtained by replacing every transit
/// with its dihedral word.
pub fn bar_projection(bs: &BlockSeq) -> Word {
    Word::new(bs.blocks.iter().flat_map(|b| b.letters().iter().copied()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesifyReport {
    pub gamma: NormalForm,
    /// Letters cancelled from each block, indexed like the blocks.
    pub cancellations_per_block: Vec<usize>,
}

/// Reduces the projected word by leftmost deletions, charging each deleted
/// letter to its block. Nontrivial transits may lose at most two letters;
/// Cayley-edge and trivial-transit letters may lose none.
pub fn geodesify_bar(d: &Diagram, bs: &BlockSeq) -> Result<GeodesifyReport> {
    let mut letters: Vec<(Gen, usize)> = bs
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.letters().iter().map(move |&g| (g, i)))
        .collect();
    let mut counts = vec![0; bs.blocks.len()];
    loop {
        let plain: Vec<Gen> = letters.iter().map(|&(g, _)| g).collect();
        let Some((i, j)) = first_deletion(d, &plain) else {
            break;
        };
        counts[letters[i].1] += 1;
        counts[letters[j].1] += 1;
        letters.remove(j);
        letters.remove(i);
    }
    for (i, (&count, block)) in counts.iter().zip(&bs.blocks).enumerate() {
        let allowed = if block.is_nontrivial_hat() { 2 } else { 0 };
        if count > allowed {
            return Err(CoxError::CancellationBound { block: i, count });
        }
    }
    let plain: Vec<Gen> = letters.into_iter().map(|(g, _)| g).collect();
    Ok(GeodesifyReport {
        gamma: NormalForm::from_normalized(lex_normal_form(d, &plain)),
        cancellations_per_block: counts,
    })
}

impl ConedBall {
    /// Splits a coned-off geodesic into maximal Cayley runs and transits.
    pub fn block_decompose(&self, path: &HatPath) -> Result<BlockSeq> {
        let v = &path.vertices;
        let (Some(HatVertex::Element(first)), Some(HatVertex::Element(last))) = (v.first(), v.last()) else {
            return Err(CoxError::NotGeodesic(
                "paths must start and end at element vertices".into(),
            ));
        };
        let length = self
            .path_length(v)
            .ok_or_else(|| CoxError::NotGeodesic("consecutive vertices are not adjacent".into()))?;
        if length != self.hat_distance(*first, *last)? {
            return Err(CoxError::NotGeodesic(format!(
                "length {length} exceeds the distance between the endpoints"
            )));
        }
        let mut blocks = Vec::new();
        let mut run = Vec::new();
        let mut i = 0;
        while i + 1 < v.len() {
            match (v[i], v[i + 1]) {
                (HatVertex::Element(a), HatVertex::Element(b)) => {
                    run.push(self.edge_label(a, b).expect("adjacent elements"));
                    i += 1;
                }
                (HatVertex::Element(a), HatVertex::Cone(k)) => {
                    let HatVertex::Element(b) = v[i + 2] else {
                        unreachable!("cones are only adjacent to elements")
                    };
                    if !run.is_empty() {
                        blocks.push(Block::Gamma(Word::new(std::mem::take(&mut run))));
                    }
                    let h = self
                        .quotient(a, b)
                        .map(|z| self.element_letters(z))
                        .ok_or(CoxError::OutsideBall)?;
                    blocks.push(Block::Hat {
                        pair: self.cone_pair(k),
                        word: Word::new(h),
                    });
                    i += 2;
                }
                _ => unreachable!("cones are only adjacent to elements"),
            }
        }
        if !run.is_empty() {
            blocks.push(Block::Gamma(Word::new(run)));
        }
        for b in &blocks {
            if let Block::Gamma(w) = b {
                if !is_geodesic(&self.diagram, w) {
                    return Err(CoxError::Invariant(format!(
                        "Cayley run `{}` of a coned-off geodesic is not geodesic",
                        self.diagram.render_compact(w.letters())
                    )));
                }
            }
        }
        Ok(BlockSeq { blocks })
    }

    /// A word is nice when some path spelling it is a coned-off geodesic
    /// from the identity: its cheapest segmentation into letters and
    /// alternating blocks costs exactly the coned-off length of its element.
    pub fn is_nice(&self, s: &SyllableSeq) -> Result<bool> {
        let w = s.underlying();
        let g = self.element(&w)?;
        let target = self.hat_distance(0, g)?;
        let cost = min_syllable_cost(&self.pairs, w.letters());
        Ok(2 * cost as u32 == target.doubled())
    }

    /// Canonical syllable sequences of the projections of every coned-off
    /// geodesic from the identity to `g`.
    pub fn enumerate_nice_words(&self, g: u32, cap: usize) -> Result<BTreeSet<SyllableSeq>> {
        let mut out = BTreeSet::new();
        for path in self.enumerate_hat_geodesics(0, g, cap)? {
            out.insert(self.block_decompose(&path)?.to_syllables(&self.pairs)?);
        }
        Ok(out)
    }
}
