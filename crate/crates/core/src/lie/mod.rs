//! Brute-force ground truth from explicit matrix Lie algebras.

pub mod algebra;
pub mod doubled;
pub mod pairs;
pub mod ricci;

pub use algebra::{build_algebra, AlgebraKind, LieAlgebraModel};
pub use doubled::{BracketRelations, DoubledSpace};
pub use pairs::{embed_pair, DetectedBlock, EmbeddedPair, PairCase};
pub use ricci::{
    closed_ricci_diagonal, closed_ricci_full, closed_ricci_structural, diagonal_gram, full_gram,
    max_abs_dev, ricci_bruteforce,
};
