//! Polynomial vector fields, elementary differentials, the ODE flow and
//! norm estimates.

pub mod elementary;
pub mod estimates;
pub mod field;
pub mod lip;
pub mod ode;
pub mod poly;

pub use elementary::{build_f_w, elementary_differential, elementary_map, ElementaryTable};
pub use estimates::{check_ode_estimates, OdeEstimateReport};
pub use field::PolyVectorField;
pub use lip::{floor_strict, lip_gamma_norm, LipGammaEstimate};
pub use ode::{ode_solve, solve_field, OdeOptions, OdeSolution};
pub use poly::{CompiledMap, Poly, PolyMap};
