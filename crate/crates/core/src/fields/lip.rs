//! Grid estimate of the Lip(γ) norm on the field's box.
//!
//! `λ̂ = max(sup|f|, sup|df|, …, sup|d^{⌊γ⌋}f|, Hölder_{γ−⌊γ⌋}(d^{⌊γ⌋}f))`, with
//! Hilbert–Schmidt norms over all labels, coordinates and ordered index
//! tuples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::field::PolyVectorField;
use crate::fields::poly::{CompiledMap, Poly};
use crate::scalar::Scalar;

pub const DEFAULT_RESOLUTION: usize = 17;
/// Hölder pairs closer than this are skipped.
pub const MIN_SEPARATION: f64 = 1e-3;
/// Upper bound on grid points used for the pairwise Hölder quotient.
const HOLDER_POINTS: usize = 1500;

/// `⌊γ⌋`: the largest integer strictly below `γ`.
pub fn floor_strict(gamma: f64) -> usize {
    (gamma.ceil() as usize).saturating_sub(1)
}

#[derive(Clone, Debug, Serialize)]
pub struct LipGammaEstimate {
    pub gamma: f64,
    pub value: f64,
    pub grid_resolution: usize,
    /// `sup |d^k f|` for `k = 0..=⌊γ⌋`.
    pub sup_norms: Vec<f64>,
    pub holder: f64,
}

/// Points per axis, row-major over the box.
pub fn box_grid(domain: &[(f64, f64)], resolution: usize) -> Vec<Vec<f64>> {
    let r = resolution.max(2);
    let axes: Vec<Vec<f64>> = domain
        .iter()
        .map(|&(lo, hi)| (0..r).map(|i| lo + (hi - lo) * i as f64 / (r - 1) as f64).collect())
        .collect();
    let total = r.pow(domain.len() as u32);
    (0..total)
        .map(|mut k| {
            axes.iter()
                .map(|ax| {
                    let v = ax[k % r];
                    k /= r;
                    v
                })
                .collect()
        })
        .collect()
}

/// All partial derivatives of order `k` of every coordinate of every
/// component, as one compiled map.
fn derivative_map<S: Scalar>(f: &PolyVectorField<S>, k: usize) -> CompiledMap {
    let e = f.state_dim();
    let mut polys: Vec<Poly<S>> = Vec::new();
    for c in f.components() {
        let mut layer: Vec<Poly<S>> = c.coords.clone();
        for _ in 0..k {
            layer = layer.iter().flat_map(|p| (0..e).map(move |i| p.deriv(i))).collect();
        }
        polys.extend(layer);
    }
    CompiledMap::from_polys(&polys)
}

fn hs(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn lip_gamma_norm<S: Scalar>(f: &PolyVectorField<S>, gamma: f64, resolution: usize) -> Result<LipGammaEstimate> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Config(format!("γ = {gamma} must be positive")));
    }
    let domain = f.domain_box();
    if domain.is_empty() || domain.iter().any(|&(lo, hi)| !(lo <= hi)) {
        return Err(Error::EmptyBox);
    }
    let top = floor_strict(gamma);
    let theta = gamma - top as f64;
    let grid = box_grid(domain, resolution);
    let mut sup_norms = Vec::with_capacity(top + 1);
    let mut top_values = Vec::new();
    for k in 0..=top {
        let m = derivative_map(f, k);
        let values: Vec<Vec<f64>> = grid.iter().map(|y| m.eval(y)).collect();
        sup_norms.push(values.iter().map(|v| hs(v)).fold(0.0, f64::max));
        if k == top {
            top_values = values;
        }
    }
    // pairwise quotient on an evenly thinned subset of the grid
    let stride = grid.len().div_ceil(HOLDER_POINTS).max(1);
    let idx: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let mut holder: f64 = 0.0;
    for (a, &i) in idx.iter().enumerate() {
        for &j in &idx[a + 1..] {
            let dist = hs(&grid[i].iter().zip(&grid[j]).map(|(u, v)| u - v).collect::<Vec<_>>());
            if dist < MIN_SEPARATION {
                continue;
            }
            let diff: Vec<f64> = top_values[i].iter().zip(&top_values[j]).map(|(u, v)| u - v).collect();
            holder = holder.max(hs(&diff) / dist.powf(theta));
        }
    }
    let value = sup_norms.iter().copied().fold(holder, f64::max);
    Ok(LipGammaEstimate { gamma, value, grid_resolution: resolution, sup_norms, holder })
}

/// `max(sup|g|, sup|dg|)` of a single map over the given points, with
/// Frobenius norm on the Jacobian.
pub fn lip_one_on_points(g: &[Poly<f64>], points: &[Vec<f64>]) -> f64 {
    let e = points.first().map_or(0, |p| p.len());
    let value = CompiledMap::from_polys(g);
    let jac: Vec<Poly<f64>> = g.iter().flat_map(|p| (0..e).map(move |i| p.deriv(i))).collect();
    let jac = CompiledMap::from_polys(&jac);
    points.iter().map(|y| hs(&value.eval(y)).max(hs(&jac.eval(y)))).fold(0.0, f64::max)
}

pub fn sup_on_points(g: &[Poly<f64>], points: &[Vec<f64>]) -> f64 {
    let m = CompiledMap::from_polys(g);
    points.iter().map(|y| hs(&m.eval(y))).fold(0.0, f64::max)
}
