//! Grid-sampled branched rough paths, their metrics and RDE solvers.

pub mod metrics;
pub mod rough_path;
pub mod solve;

pub use metrics::{p_variation, p_variation_power, rho_distance, ControlOmega, RhoReport};
pub use rough_path::{ibp_defect, lift_bv, segment_character, tree_factorial, BranchedRoughPath};
pub use solve::{defect_scan, defects, linear_fit, solve, solve_euler, solve_geodesic, Backend, Defect, DefectFit, SolveReport};
