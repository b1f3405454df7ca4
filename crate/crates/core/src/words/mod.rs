//! Word algebra over the weighted generator alphabet, its group, and the
//! isomorphism onto Grossman–Larson group-likes.

pub mod alphabet;
pub mod eulerian;
pub mod lyndon;
pub mod phi;
pub mod series;

pub use alphabet::{floor_p, select_generators, WeightedAlphabet};
pub use eulerian::eulerian_idempotent;
pub use lyndon::{group_residual, lie_residual, LyndonBasis};
pub use phi::Phi;
pub use series::{Word, WordBasis, WordDisplay, WordSeries};
