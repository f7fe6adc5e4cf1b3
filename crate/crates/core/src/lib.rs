//! Combinatorics of right-angled Coxeter groups relative to rank-two
//! parabolic subgroups: diagrams and diagonal choices, Tits rewriting and
//! normal forms, coned-off Cayley graph balls, the syllable calculus, and a
//! geodesic fellow-travelling harness.

pub mod clique;
pub mod coned;
pub mod diagram;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod halfint;
pub mod relhyp;
pub mod syllable;
pub mod word;

pub use coned::{
    bar_projection, build_ball, build_ball_with, coset_rep, geodesify_bar, BallDump, Block, BlockSeq, ConedBall,
    GeodesifyReport, HatPath, HatVertex, Lookup,
};
pub use diagram::{
    choose_admissible, parse_diagram, parse_diagram_file, validate_choice, AdmissibilityMode, ChoiceReport,
    DiagonalChoice, Diagram, Gen, Pair, Square,
};
pub use error::{CoxError, Result};
pub use exec::Execution;
pub use halfint::HalfInt;
pub use relhyp::{
    apply_move, check_forcing_bound, connect_geodesics, forcing_induction_check, theoretical_bounds, verify_in_ball,
    verify_papasoglu, verify_papasoglu_with, Bounds, Caps, Move, Verdict, VerificationReport,
};
pub use syllable::{
    enumerate_blockings, forced_analysis, p1_decomposition, syllabify, ForcedAnalysis, ForcingMode, PairSet, Syllable,
    SyllableSeq,
};
pub use word::{enumerate_geodesics, equals, is_geodesic, letter_counts, reduce, NormalForm, Word};
