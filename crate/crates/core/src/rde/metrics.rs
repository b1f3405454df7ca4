//! p-variation, the control `ω` and the inhomogeneous distance `ρ`, all
//! taken over grid partitions and grid pairs.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rde::rough_path::BranchedRoughPath;
use crate::scalar::Scalar;

/// `‖X_{t_i, t_j}‖^p` for all `i < j`, stored as `rows[i][j - i - 1]`.
fn increment_powers<S: Scalar>(x: &BranchedRoughPath<S>, p: f64, lo: usize, hi: usize) -> Vec<Vec<f64>> {
    (lo..hi)
        .into_par_iter()
        .map(|i| {
            let inv = x.states()[i].inverse();
            (i + 1..=hi).map(|j| inv.product(&x.states()[j]).expect("same basis").norm().powf(p)).collect()
        })
        .collect()
}

/// `V(j) = max_{i<j} V(i) + ‖X_{t_i,t_j}‖^p` from a fixed start; returns
/// `V` for every end index after the start.
fn dp_row(pow: &[Vec<f64>], start: usize, lo: usize) -> Vec<f64> {
    let m = pow.len() + lo + 1;
    let mut v = vec![0.0; m - start];
    for j in start + 1..m {
        let mut best: f64 = 0.0;
        for i in start..j {
            best = best.max(v[i - start] + pow[i - lo][j - i - 1]);
        }
        v[j - start] = best;
    }
    v
}

/// `‖X‖_{p-var, [t_i, t_j]}` over partitions drawn from the grid.
pub fn p_variation<S: Scalar>(x: &BranchedRoughPath<S>, p: f64, i: usize, j: usize) -> f64 {
    p_variation_power(x, p, i, j).powf(1.0 / p)
}

/// `‖X‖^p_{p-var, [t_i, t_j]}`.
pub fn p_variation_power<S: Scalar>(x: &BranchedRoughPath<S>, p: f64, i: usize, j: usize) -> f64 {
    if j <= i {
        return 0.0;
    }
    let pow = increment_powers(x, p, i, j);
    *dp_row(&pow, i, i).last().unwrap()
}

/// `ω(s, t) = Σ_i ‖X^i‖^p_{p-var,[s,t]}` tabulated on every grid pair.
#[derive(Clone, Debug)]
pub struct ControlOmega {
    p: f64,
    /// `table[i][j - i] = ω(t_i, t_j)`.
    table: Vec<Vec<f64>>,
}

impl ControlOmega {
    pub fn new<S: Scalar>(paths: &[&BranchedRoughPath<S>], p: f64) -> Result<Self> {
        let m = paths.first().ok_or_else(|| Error::Dimension("no rough paths".into()))?.len();
        if paths.iter().any(|x| x.len() != m) {
            return Err(Error::Dimension("rough paths on different grids".into()));
        }
        let mut table: Vec<Vec<f64>> = (0..m).map(|i| vec![0.0; m - i]).collect();
        for x in paths {
            if m < 2 {
                break;
            }
            let pow = increment_powers(*x, p, 0, m - 1);
            let rows: Vec<Vec<f64>> = (0..m).into_par_iter().map(|s| dp_row(&pow, s, 0)).collect();
            for (t, r) in table.iter_mut().zip(rows) {
                for (a, b) in t.iter_mut().zip(r) {
                    *a += b;
                }
            }
        }
        Ok(ControlOmega { p, table })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn omega(&self, i: usize, j: usize) -> f64 {
        self.table[i][j - i]
    }

    pub fn total(&self) -> f64 {
        self.omega(0, self.len() - 1)
    }

    /// First triple with `ω(i,j) + ω(j,k) > ω(i,k)` beyond relative `tol`.
    pub fn superadditivity_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let m = self.len();
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    let (a, b, c) = (self.omega(i, j), self.omega(j, k), self.omega(i, k));
                    if a + b > c * (1.0 + tol) + f64::MIN_POSITIVE {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub value: f64,
    /// Grid pairs with `ω = 0` but a nonzero difference.
    pub offending: Vec<(usize, usize)>,
}

/// `max_τ sup_{s<t} |(X¹_{s,t},τ) − (X²_{s,t},τ)| / ω(s,t)^{|τ|/p}` over
/// forests `τ` up to the truncation, with `0/0 = 0`.
pub fn rho_distance<S: Scalar>(
    x1: &BranchedRoughPath<S>,
    x2: &BranchedRoughPath<S>,
    omega: &ControlOmega,
) -> Result<RhoReport> {
    let m = x1.len();
    if x2.len() != m || omega.len() != m {
        return Err(Error::Dimension("ρ needs both paths and ω on one grid".into()));
    }
    if x1.truncation() != x2.truncation() || x1.dim() != x2.dim() {
        return Err(Error::TruncationMismatch("ρ between different truncations".into()));
    }
    let basis = x1.basis().clone();
    let p = omega.p();
    let degrees: Vec<f64> = (0..basis.forests().len()).map(|i| basis.forest_degree(i) as f64).collect();
    let rows: Vec<(f64, Vec<(usize, usize)>)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let (inv1, inv2) = (x1.states()[i].inverse(), x2.states()[i].inverse());
            let mut best: f64 = 0.0;
            let mut bad = Vec::new();
            for j in i + 1..m {
                let a = inv1.product(&x1.states()[j]).unwrap().forest_values();
                let b = inv2.product(&x2.states()[j]).unwrap().forest_values();
                let w = omega.omega(i, j);
                for k in 1..a.len() {
                    let num = (a[k].clone() - b[k].clone()).abs().to_f64();
                    if num == 0.0 {
                        continue;
                    }
                    let den = w.powf(degrees[k] / p);
                    if den == 0.0 {
                        best = f64::INFINITY;
                        bad.push((i, j));
                        break;
                    }
                    best = best.max(num / den);
                }
            }
            (best, bad)
        })
        .collect();
    let mut value: f64 = 0.0;
    let mut offending = Vec::new();
    for (v, b) in rows {
        value = value.max(v);
        offending.extend(b);
    }
    Ok(RhoReport { value, offending })
}
