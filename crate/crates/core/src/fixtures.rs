//! Named diagrams used throughout the tests, benches and CLI examples.
//!
//! * `square`: the 4-cycle `a-b-c-d`, diagonal `{a,c}`.
//! * `example_f`: edges `ab bc cd da be cf ef`, diagonals `{a,c}`, `{b,f}`.
//! * `pentagon`: the 5-cycle, hyperbolic.
//! * `k23`: complete bipartite `{x,y} × {p,q,r}` with the mixed choice
//!   `{p,q}`, `{p,r}`, `{x,y}` (inadmissible under both semantics).
//! * `k33`: complete bipartite `K₃,₃`, the smallest diagram with no
//!   admissible choice under either semantics.
//! * `ladder_l`: `a..e` pairwise non-commuting, `u`, `v` joined to all of
//!   them; diagonals `{a,b} {b,c} {c,d} {d,e}` and `{u,v}` elsewhere.
//! * `exchange_l2`: edges `bc ad` plus `u`, `v` joined to `a..d`; diagonals
//!   `{a,b} {a,c} {b,d} {c,d}`.

use crate::diagram::{parse_diagram_file, DiagonalChoice, Diagram};

pub const SQUARE: &str = include_str!("../fixtures/square.json");
pub const EXAMPLE_F: &str = include_str!("../fixtures/example_f.json");
pub const PENTAGON: &str = include_str!("../fixtures/pentagon.json");
pub const K23: &str = include_str!("../fixtures/k23.json");
pub const K33: &str = include_str!("../fixtures/k33.json");
pub const LADDER_L: &str = include_str!("../fixtures/ladder_l.json");
pub const EXCHANGE_L2: &str = include_str!("../fixtures/exchange_l2.json");

/// Loads a bundled fixture together with its declared diagonal choice
/// (empty when the file declares none).
pub fn load(text: &str) -> (Diagram, DiagonalChoice) {
    let (d, pairs) = parse_diagram_file(text).expect("bundled fixture parses");
    let choice = match pairs {
        Some(pairs) => DiagonalChoice::from_pairs(&d, &pairs).expect("bundled choice is valid"),
        None => DiagonalChoice::empty(),
    };
    (d, choice)
}

pub fn square() -> Diagram {
    load(SQUARE).0
}

pub fn square_choice(d: &Diagram) -> DiagonalChoice {
    DiagonalChoice::from_pairs(d, &[d.pair("a", "c").unwrap()]).unwrap()
}

pub fn example_f() -> Diagram {
    load(EXAMPLE_F).0
}

pub fn example_f_choice(d: &Diagram) -> DiagonalChoice {
    DiagonalChoice::from_pairs(d, &[d.pair("a", "c").unwrap(), d.pair("b", "f").unwrap()]).unwrap()
}

pub fn pentagon() -> Diagram {
    load(PENTAGON).0
}

pub fn k23() -> Diagram {
    load(K23).0
}

pub fn k33() -> Diagram {
    load(K33).0
}

pub fn ladder_l() -> Diagram {
    load(LADDER_L).0
}

pub fn exchange_l2() -> Diagram {
    load(EXCHANGE_L2).0
}
