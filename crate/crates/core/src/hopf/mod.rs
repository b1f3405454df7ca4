//! Connes–Kreimer and Grossman–Larson Hopf algebras of labeled forests.

pub mod character;
pub mod ck;
pub mod formal;
pub mod gl;

pub use character::Character;
pub use ck::{ck_coproduct, ck_coproduct_by_cuts, ck_coproduct_tree, CkBasis, Cut};
pub use formal::{ForestSum, FormalSum, TensorSum};
pub use gl::{gl_coproduct, gl_product, gl_product_sums, GroupLikeGL};
