//! Explicit-constant stability bounds for `dy = f(y) dx` under perturbation of
//! `(f, x, y_0)`:
//!
//! ```text
//! sup_t |y_{0,t} − ỹ_{0,t}| ≤ Σ_j (M_j l_j |y_0−ỹ_0| + M_j ‖x^j−x̃^j‖ + l_j |f_j−f̃_j|_∞) · exp(2 Σ_j M_j l_j)
//! sup_t |y_t − ỹ_t|         ≤ (|y_0−ỹ_0| + Σ_j M_j ‖x^j−x̃^j‖ + Σ_j l_j |f_j−f̃_j|_∞) · exp(2 Σ_j M_j l_j)
//! ```
//!
//! with `M_j = max(|f_j|_{Lip1}, |f̃_j|_{Lip1})`, `l_j = max(‖x^j‖, ‖x̃^j‖)`,
//! all path norms in 1-variation. Sups over `ℝ^e` are taken over the box grid
//! together with every trajectory point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::field::PolyVectorField;
use crate::fields::lip::{box_grid, lip_one_on_points, sup_on_points};
use crate::fields::ode::{ode_solve, OdeOptions};
use crate::path::PLPath;

pub const SLACK: f64 = 1e-6;
const GRID: usize = 9;

#[derive(Clone, Debug, Serialize)]
pub struct OdeEstimateReport {
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
    pub pass: bool,
    pub m: Vec<f64>,
    pub l: Vec<f64>,
    pub dx: Vec<f64>,
    pub df: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&a.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>())
}

pub fn check_ode_estimates(
    f: &PolyVectorField<f64>,
    ft: &PolyVectorField<f64>,
    x: &PLPath<f64>,
    xt: &PLPath<f64>,
    y0: &[f64],
    yt0: &[f64],
) -> Result<OdeEstimateReport> {
    let k = f.labels();
    if ft.labels() != k || x.dim() != k || xt.dim() != k || ft.state_dim() != f.state_dim() {
        return Err(Error::Dimension("perturbed system has a different shape".into()));
    }
    let grid = x.merged_grid(xt);
    let (xr, xtr) = (x.resample(&grid)?, xt.resample(&grid)?);
    let tol = 1e-12;
    let sol = ode_solve(&f.compiled(), y0, &xr, &OdeOptions { tol, domain: Some(f.domain_box().to_vec()), ..Default::default() })?;
    let solt = ode_solve(&ft.compiled(), yt0, &xtr, &OdeOptions { tol, domain: Some(ft.domain_box().to_vec()), ..Default::default() })?;

    let mut lhs1: f64 = 0.0;
    let mut lhs2: f64 = 0.0;
    for (y, yt) in sol.points.iter().zip(&solt.points) {
        let inc: Vec<f64> = y.iter().zip(y0).map(|(a, b)| a - b).collect();
        let inct: Vec<f64> = yt.iter().zip(yt0).map(|(a, b)| a - b).collect();
        lhs1 = lhs1.max(dist(&inc, &inct));
        lhs2 = lhs2.max(dist(y, yt));
    }

    let mut points = box_grid(f.domain_box(), GRID);
    points.extend(box_grid(ft.domain_box(), GRID));
    points.extend(sol.points.iter().cloned());
    points.extend(solt.points.iter().cloned());

    let diff = f.sub(ft)?;
    let xd = xr.difference(&xtr);
    let mut m = Vec::with_capacity(k);
    let mut l = Vec::with_capacity(k);
    let mut dx = Vec::with_capacity(k);
    let mut df = Vec::with_capacity(k);
    for j in 0..k {
        let a = j + 1;
        m.push(lip_one_on_points(&f.component(a).coords, &points).max(lip_one_on_points(&ft.component(a).coords, &points)));
        l.push(x.one_variation(j).max(xt.one_variation(j)));
        dx.push(xd.one_variation(j));
        df.push(sup_on_points(&diff.component(a).coords, &points));
    }
    let growth = (2.0 * (0..k).map(|j| m[j] * l[j]).sum::<f64>()).exp();
    let dy0 = dist(y0, yt0);
    let rhs1 = (0..k).map(|j| m[j] * l[j] * dy0 + m[j] * dx[j] + l[j] * df[j]).sum::<f64>() * growth;
    let rhs2 = (dy0 + (0..k).map(|j| m[j] * dx[j] + l[j] * df[j]).sum::<f64>()) * growth;
    let pass = lhs1 <= rhs1 * (1.0 + SLACK) && lhs2 <= rhs2 * (1.0 + SLACK);
    Ok(OdeEstimateReport { lhs1, rhs1, lhs2, rhs2, pass, m, l, dx, df })
}
