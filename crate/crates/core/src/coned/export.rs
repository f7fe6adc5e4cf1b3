use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{check_radius, finish, ConedBall, HatVertex};
use crate::diagram::{parse_diagram, DiagonalChoice, Square};
use crate::error::{CoxError, Result};
use crate::exec::Execution;

const FORMAT: &str = "coxlab-ball";

/// Serialisable snapshot of a ball: enough to rebuild it, plus the derived
/// edge sets used to check the rebuild.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallDump {
    pub format: String,
    pub version: u32,
    pub diagram: serde_json::Value,
    /// `[square cycle, chosen pair]` entries.
    pub assignment: Vec<(Vec<String>, (String, String))>,
    pub radius: usize,
    /// Normal forms, space separated, in shortlex order.
    pub vertices: Vec<String>,
    /// `(representative index, pair)` per cone.
    pub cones: Vec<(u32, (String, String))>,
    pub gamma_edges: Vec<(u32, u32)>,
    /// `(cone index, element index)`.
    pub cone_edges: Vec<(u32, u32)>,
    pub shell: Vec<u32>,
}

impl ConedBall {
    pub fn to_dump(&self) -> BallDump {
        let d = &self.diagram;
        let n = self.num_elements() as u32;
        let pair_names = |p: crate::Pair| (d.name(p.lo()).to_string(), d.name(p.hi()).to_string());
        let mut gamma_edges = Vec::new();
        for i in 0..n {
            for s in d.gens() {
                if let Some(j) = self.gamma_neighbour(i, s) {
                    if i < j {
                        gamma_edges.push((i, j));
                    }
                }
            }
        }
        let mut cone_edges = Vec::new();
        for k in 0..self.num_cones() as u32 {
            cone_edges.extend(self.cone_members(k).iter().map(|&m| (k, m)));
        }
        BallDump {
            format: FORMAT.into(),
            version: 1,
            diagram: serde_json::from_str(&d.to_json(None)).expect("valid JSON"),
            assignment: self
                .choice
                .assignment()
                .iter()
                .map(|(sq, &p)| {
                    (
                        sq.cycle().iter().map(|&g| d.name(g).to_string()).collect(),
                        pair_names(p),
                    )
                })
                .collect(),
            radius: self.radius,
            vertices: (0..n).map(|i| d.render(&self.element_letters(i))).collect(),
            cones: (0..self.num_cones() as u32)
                .map(|k| (self.cone_rep(k), pair_names(self.cone_pair(k))))
                .collect(),
            gamma_edges,
            cone_edges,
            shell: (0..n).filter(|&i| self.is_shell(i)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("dump serialisation cannot fail")
    }

    /// Rebuilds a ball from its dumped vertex list and checks every derived
    /// structure against the dump.
    pub fn from_dump(dump: &BallDump) -> Result<ConedBall> {
        if dump.format != FORMAT || dump.version != 1 {
            return Err(CoxError::Format(format!(
                "unsupported ball dump {} v{}",
                dump.format, dump.version
            )));
        }
        let d = parse_diagram(&dump.diagram.to_string())?;
        let mut assignment = BTreeMap::new();
        for (cycle, (a, b)) in &dump.assignment {
            let gens = cycle
                .iter()
                .map(|n| d.gen(n).ok_or_else(|| CoxError::UnknownGenerator(n.clone())))
                .collect::<Result<Vec<_>>>()?;
            let cycle: [crate::Gen; 4] = gens
                .try_into()
                .map_err(|_| CoxError::Format("square cycles have four generators".into()))?;
            let sq = Square::new(cycle);
            if !d.find_squares().contains(&sq) {
                return Err(CoxError::NotASquare);
            }
            let p = d.pair(a, b)?;
            if !sq.has_diagonal(p) {
                return Err(CoxError::NotADiagonal(a.clone(), b.clone()));
            }
            assignment.insert(sq, p);
        }
        let choice = DiagonalChoice::new(assignment);
        let codec = check_radius(&d, dump.radius)?;
        let mut keys = Vec::with_capacity(dump.vertices.len());
        let mut layer_start = vec![0];
        for v in &dump.vertices {
            let w = d.parse_word(v)?;
            let nf = crate::word::reduce(&d, &w);
            if nf.word() != &w || w.len() > dump.radius {
                return Err(CoxError::Format(format!("`{v}` is not an in-ball normal form")));
            }
            while layer_start.len() <= w.len() {
                layer_start.push(keys.len());
            }
            let key = codec.encode(w.letters());
            if keys
                .last()
                .is_some_and(|&last| codec.len(last) == w.len() && last >= key)
            {
                return Err(CoxError::Format("vertices are not in shortlex order".into()));
            }
            keys.push(key);
        }
        while layer_start.len() <= dump.radius + 1 {
            layer_start.push(keys.len());
        }
        if keys.first() != Some(&0) {
            return Err(CoxError::Format("the identity must come first".into()));
        }
        let ball = finish(&d, &choice, dump.radius, codec, keys, layer_start, Execution::Auto)?;
        let again = ball.to_dump();
        if again.cones != dump.cones
            || again.gamma_edges != dump.gamma_edges
            || again.cone_edges != dump.cone_edges
            || again.shell != dump.shell
        {
            return Err(CoxError::Invariant(
                "dumped edges disagree with the rebuilt ball".into(),
            ));
        }
        Ok(ball)
    }

    pub fn from_json(text: &str) -> Result<ConedBall> {
        let dump: BallDump = serde_json::from_str(text).map_err(|e| CoxError::Format(e.to_string()))?;
        ConedBall::from_dump(&dump)
    }

    /// Graphviz rendering: elements as ellipses, cones as diamonds, cone
    /// edges dashed with half length.
    pub fn to_dot(&self) -> String {
        let d = &self.diagram;
        let mut out = String::from("graph coned_ball {\n");
        let n = self.num_elements() as u32;
        for i in 0..n {
            let _ = writeln!(
                out,
                "  e{i} [shape=ellipse, label=\"{}\"];",
                self.render_vertex(HatVertex::Element(i))
            );
        }
        for k in 0..self.num_cones() as u32 {
            let _ = writeln!(
                out,
                "  c{k} [shape=diamond, label=\"{}\"];",
                self.render_vertex(HatVertex::Cone(k))
            );
        }
        for i in 0..n {
            for s in d.gens() {
                if let Some(j) = self.gamma_neighbour(i, s) {
                    if i < j {
                        let _ = writeln!(out, "  e{i} -- e{j} [label=\"{}\", len=1];", d.name(s));
                    }
                }
            }
        }
        for k in 0..self.num_cones() as u32 {
            for &m in self.cone_members(k) {
                let _ = writeln!(out, "  c{k} -- e{m} [style=dashed, len=0.5];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::coned::build_ball;
    use crate::fixtures;
    use crate::{ConedBall, DiagonalChoice};

    #[test]
    fn dot_shapes() {
        let q = fixtures::square();
        let b = build_ball(&q, &fixtures::square_choice(&q), 1, 100).unwrap();
        let dot = b.to_dot();
        assert_eq!(dot.matches("shape=ellipse").count(), 5);
        assert_eq!(dot.matches("shape=diamond").count(), b.num_cones());
        assert!(dot.contains("label=\"H_{ac}\""));
        assert!(dot.contains("style=dashed, len=0.5"));

        let p = fixtures::pentagon();
        let bp = build_ball(&p, &DiagonalChoice::empty(), 1, 100).unwrap();
        assert!(!bp.to_dot().contains("diamond"));
    }

    #[test]
    fn dump_round_trip() {
        let f = fixtures::example_f();
        let b = build_ball(&f, &fixtures::example_f_choice(&f), 3, 10_000).unwrap();
        let text = b.to_json();
        let back = ConedBall::from_json(&text).unwrap();
        assert_eq!(back.to_dump(), b.to_dump());
        assert_eq!(back.choice(), b.choice());

        let mut dump = b.to_dump();
        dump.gamma_edges.pop();
        assert!(ConedBall::from_dump(&dump).is_err());
        let mut dump = b.to_dump();
        dump.vertices.pop();
        assert!(ConedBall::from_dump(&dump).is_err());
    }
}
