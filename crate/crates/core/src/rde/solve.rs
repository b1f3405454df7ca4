//! Two RDE backends on a grid partition and the local-defect diagnostics.
//!
//! * Euler: `y ← y + Σ_τ (X_{s,t}, τ)/σ(τ) · f(τ)(y)` over trees up to `[p]`.
//! * Geodesic: rescale `X_{s,t}` into the GL group, pull it back to words,
//!   realize it as a piecewise-linear path and flow `dy = Σ_j f(ν_j)(y) dx^j`.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::elementary::ElementaryTable;
use crate::fields::field::PolyVectorField;
use crate::fields::ode::{ode_solve, OdeOptions};
use crate::fields::poly::CompiledMap;
use crate::hopf::character::Character;
use crate::hopf::gl::GroupLikeGL;
use crate::rde::metrics::p_variation_power;
use crate::rde::rough_path::BranchedRoughPath;
use crate::realize::realize;
use crate::scalar::Scalar;
use crate::words::phi::Phi;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Euler,
    Geodesic,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euler" => Ok(Backend::Euler),
            "geodesic" => Ok(Backend::Geodesic),
            _ => Err(Error::Config(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Defect {
    pub level: usize,
    pub start: usize,
    pub end: usize,
    pub norm: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectFit {
    /// Slope of mean `log|Γ|` against mean `log ω` across levels; `None`
    /// when every defect vanishes.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// RMS residual of the level means about the fitted line.
    pub residual: f64,
    pub levels: usize,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct SolveReport<S: Scalar> {
    pub backend: Backend,
    /// Grid indices of the partition.
    pub indices: Vec<usize>,
    pub trajectory: Vec<Vec<S>>,
    pub defects: Vec<Defect>,
    pub fit: Option<DefectFit>,
}

impl<S: Scalar> SolveReport<S> {
    pub fn end(&self) -> &[S] {
        self.trajectory.last().expect("nonempty")
    }

    pub fn to_json(&self, x: &BranchedRoughPath<S>) -> Value {
        json!({
            "backend": self.backend,
            "times": self.indices.iter().map(|&i| x.grid()[i].to_json()).collect::<Vec<_>>(),
            "trajectory": self.trajectory.iter()
                .map(|y| y.iter().map(|v| v.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "defects": self.defects,
            "fit": self.fit,
        })
    }
}

fn check_partition(x_len: usize, partition: &[usize]) -> Result<Vec<usize>> {
    if partition.is_empty() {
        return Ok((0..x_len).collect());
    }
    if partition.windows(2).any(|w| w[1] <= w[0]) || *partition.last().unwrap() >= x_len {
        return Err(Error::Config("partition must be increasing grid indices".into()));
    }
    Ok(partition.to_vec())
}

fn check_shapes<S: Scalar>(x: &BranchedRoughPath<S>, f: &PolyVectorField<S>, xi: &[S]) -> Result<()> {
    if f.labels() != x.dim() {
        return Err(Error::Dimension(format!("{} field components for a rough path over ℝ^{}", f.labels(), x.dim())));
    }
    if f.state_dim() != xi.len() {
        return Err(Error::Dimension(format!("initial value in ℝ^{} for fields on ℝ^{}", xi.len(), f.state_dim())));
    }
    Ok(())
}

fn in_box(domain: &[(f64, f64)], y: &[f64]) -> bool {
    y.iter().zip(domain).all(|(v, &(lo, hi))| lo <= *v && *v <= hi)
}

/// Branched Euler stepping.
pub struct EulerStepper<S: Scalar> {
    table: ElementaryTable<S>,
    inv_sigma: Vec<S>,
    domain: Vec<(f64, f64)>,
}

impl<S: Scalar> EulerStepper<S> {
    pub fn new(f: &PolyVectorField<S>, x: &BranchedRoughPath<S>) -> Result<Self> {
        let basis = x.basis().clone();
        let table = ElementaryTable::new(f, basis.clone())?;
        let inv_sigma = (0..basis.trees().len())
            .map(|i| S::one() / S::from_i64(basis.forest_sigma(basis.tree_forest(i)) as i64))
            .collect();
        Ok(EulerStepper { table, inv_sigma, domain: f.domain_box().to_vec() })
    }

    pub fn step(&self, inc: &Character<S>, y: &[S]) -> Result<Vec<S>> {
        let mut out = y.to_vec();
        let yf: Vec<f64> = y.iter().map(|v| v.to_f64()).collect();
        let mut acc = vec![0.0; y.len()];
        for (i, (c, w)) in inc.tree_values().iter().zip(&self.inv_sigma).enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = c.clone() * w.clone();
            if S::EXACT {
                for (o, v) in out.iter_mut().zip(self.table.map(i).eval(y)) {
                    *o += &(coeff.clone() * v);
                }
            } else {
                self.table.compiled(i).eval_add(&yf, coeff.to_f64(), &mut acc);
            }
        }
        if !S::EXACT {
            for (o, a) in out.iter_mut().zip(&acc) {
                *o += &S::from_f64(*a);
            }
        }
        let of: Vec<f64> = out.iter().map(|v| v.to_f64()).collect();
        if !in_box(&self.domain, &of) {
            return Err(Error::DomainExit { point: of });
        }
        Ok(out)
    }
}

pub fn solve_euler<S: Scalar>(
    x: &BranchedRoughPath<S>,
    f: &PolyVectorField<S>,
    xi: &[S],
    partition: &[usize],
) -> Result<SolveReport<S>> {
    check_shapes(x, f, xi)?;
    let indices = check_partition(x.len(), partition)?;
    let stepper = EulerStepper::new(f, x)?;
    let mut trajectory = vec![xi.to_vec()];
    for w in indices.windows(2) {
        let y = stepper.step(&x.increment(w[0], w[1]), trajectory.last().unwrap())?;
        trajectory.push(y);
    }
    Ok(SolveReport { backend: Backend::Euler, indices, trajectory, defects: Vec::new(), fit: None })
}

/// ODE flow along realized increments.
pub struct GeodesicStepper {
    phi: Arc<Phi>,
    fields: Vec<CompiledMap>,
    opts: OdeOptions,
}

impl GeodesicStepper {
    pub fn new(f: &PolyVectorField<f64>, x: &BranchedRoughPath<f64>) -> Result<Self> {
        let phi = Phi::shared(x.p(), x.dim())?;
        let alphabet = phi.alphabet();
        if alphabet.degree() != x.truncation() {
            return Err(Error::TruncationMismatch("alphabet and rough path truncations differ".into()));
        }
        let table = ElementaryTable::new(f, alphabet.ck_basis().clone())?;
        let fields = alphabet
            .generators()
            .iter()
            .map(|g| table.compiled(alphabet.ck_basis().tree_id(g).expect("generator in basis")).clone())
            .collect();
        let opts = OdeOptions { tol: 1e-12, domain: Some(f.domain_box().to_vec()), ..Default::default() };
        Ok(GeodesicStepper { phi, fields, opts })
    }

    pub fn step(&self, inc: &Character<f64>, y: &[f64]) -> Result<Vec<f64>> {
        let h = self.phi.phi_inverse(&GroupLikeGL::rescale(inc));
        let path = realize(&h)?;
        Ok(ode_solve(&self.fields, y, &path, &self.opts)?.end().to_vec())
    }
}

pub fn solve_geodesic(
    x: &BranchedRoughPath<f64>,
    f: &PolyVectorField<f64>,
    xi: &[f64],
    partition: &[usize],
) -> Result<SolveReport<f64>> {
    check_shapes(x, f, xi)?;
    let indices = check_partition(x.len(), partition)?;
    let stepper = GeodesicStepper::new(f, x)?;
    let mut trajectory = vec![xi.to_vec()];
    for w in indices.windows(2) {
        let y = stepper.step(&x.increment(w[0], w[1]), trajectory.last().unwrap())?;
        trajectory.push(y);
    }
    Ok(SolveReport { backend: Backend::Geodesic, indices, trajectory, defects: Vec::new(), fit: None })
}

pub fn solve(
    backend: Backend,
    x: &BranchedRoughPath<f64>,
    f: &PolyVectorField<f64>,
    xi: &[f64],
    partition: &[usize],
) -> Result<SolveReport<f64>> {
    match backend {
        Backend::Euler => solve_euler(x, f, xi, partition),
        Backend::Geodesic => solve_geodesic(x, f, xi, partition),
    }
}

/// `Γ_{s,t} = y_{s,t} − (one-step solution from y_s over [s,t])` on the dyadic
/// intervals of each level, with `y` a reference solution at every grid
/// point. The grid must have `2^L + 1` points with `L ≥` every level.
pub fn defects(
    backend: Backend,
    x: &BranchedRoughPath<f64>,
    f: &PolyVectorField<f64>,
    reference: &[Vec<f64>],
    levels: &[usize],
) -> Result<Vec<Defect>> {
    let segs = x.len() - 1;
    if reference.len() != x.len() {
        return Err(Error::Dimension("reference trajectory must cover the grid".into()));
    }
    let euler = EulerStepper::new(f, x)?;
    let geodesic = match backend {
        Backend::Geodesic => Some(GeodesicStepper::new(f, x)?),
        Backend::Euler => None,
    };
    let mut out = Vec::new();
    for &level in levels {
        let count = 1usize << level;
        if !segs.is_multiple_of(count) {
            return Err(Error::Config(format!("grid of {segs} segments is not divisible into 2^{level} intervals")));
        }
        let width = segs / count;
        for k in 0..count {
            let (s, t) = (k * width, (k + 1) * width);
            let inc = x.increment(s, t);
            let ys = &reference[s];
            let local = match &geodesic {
                Some(g) => g.step(&inc, ys)?,
                None => euler.step(&inc, ys)?,
            };
            let norm = reference[t]
                .iter()
                .zip(&local)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            out.push(Defect { level, start: s, end: t, norm, omega: p_variation_power(x, x.p(), s, t) });
        }
    }
    Ok(out)
}

/// Fits mean `log|Γ|` against mean `log ω` across levels. Needs at least
/// four levels with nonzero defects unless every defect vanishes.
pub fn defect_scan(defects: &[Defect]) -> Result<DefectFit> {
    const NEEDED: usize = 4;
    if defects.iter().all(|d| d.norm == 0.0) {
        return Ok(DefectFit { slope: None, intercept: None, residual: 0.0, levels: 0, exact: true });
    }
    let mut levels: Vec<usize> = defects.iter().map(|d| d.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for l in levels {
        let at: Vec<&Defect> = defects.iter().filter(|d| d.level == l && d.norm > 0.0 && d.omega > 0.0).collect();
        if at.is_empty() {
            continue;
        }
        let n = at.len() as f64;
        let lw = at.iter().map(|d| d.omega.ln()).sum::<f64>() / n;
        let lg = at.iter().map(|d| d.norm.ln()).sum::<f64>() / n;
        pts.push((lw, lg));
    }
    if pts.len() < NEEDED {
        return Err(Error::TooFewLevels { needed: NEEDED, got: pts.len() });
    }
    let (slope, intercept, residual) = linear_fit(&pts);
    Ok(DefectFit { slope: Some(slope), intercept: Some(intercept), residual, levels: pts.len(), exact: false })
}

/// Least-squares line through `(x, y)` points: `(slope, intercept, rms residual)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ode::solve_field;
    use crate::fields::poly::{Poly, PolyMap};
    use crate::path::PLPath;
    use crate::rde::rough_path::lift_bv;
    use crate::scalar::Rational;

    fn linear_1d() -> PolyVectorField<f64> {
        PolyVectorField::new(vec![PolyMap { coords: vec![Poly::var(1, 0)] }], vec![(-10.0, 10.0)]).unwrap()
    }

    fn smooth_driver(levels: u32) -> PLPath<f64> {
        let m = 1usize << levels;
        let times: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
        let values = times.iter().map(|&t| vec![(2.0 * t).sin() * 0.8]).collect();
        PLPath::new(times, values).unwrap()
    }

    #[test]
    fn constant_fields_in_one_step() {
        let f = PolyVectorField::new(
            vec![
                PolyMap { coords: vec![Poly::constant(1, 2.0)] },
                PolyMap { coords: vec![Poly::constant(1, -1.0)] },
            ],
            vec![(-10.0, 10.0)],
        )
        .unwrap();
        let x = lift_bv(&PLPath::from_increments(2, &[vec![0.3, 0.1], vec![-0.5, 0.4]]), 2.5).unwrap();
        let r = solve_euler(&x, &f, &[1.0], &[0, 2]).unwrap();
        assert!((r.end()[0] - (1.0 + 2.0 * -0.2 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn single_vertex_increment() {
        let y = Poly::<Rational>::var(1, 0);
        let f = PolyVectorField::new(vec![PolyMap { coords: vec![y.mul(&y)] }], vec![(-20.0, 20.0)]).unwrap();
        let x = lift_bv(&PLPath::from_increments(1, &[vec![Rational::from_i64(1)]]), 1.0).unwrap();
        let r = solve_euler(&x, &f, &[Rational::from_i64(3)], &[]).unwrap();
        assert_eq!(r.end(), &[Rational::from_i64(12)]);
    }

    #[test]
    fn euler_converges_to_exponential() {
        let x = lift_bv(&smooth_driver(12), 2.5).unwrap();
        let r = solve_euler(&x, &linear_1d(), &[1.0], &[]).unwrap();
        let want = (0.8 * 2f64.sin()).exp();
        assert!((r.end()[0] - want).abs() <= 1e-6, "{}", r.end()[0] - want);
    }

    #[test]
    fn geodesic_reproduces_the_ode() {
        let y0 = Poly::var(2, 0);
        let y1 = Poly::var(2, 1);
        let f = PolyVectorField::new(
            vec![
                PolyMap { coords: vec![y1.scaled(&-1.0), y0.clone()] },
                PolyMap { coords: vec![y0.mul(&y1), Poly::constant(2, 0.5)] },
            ],
            vec![(-5.0, 5.0); 2],
        )
        .unwrap();
        let path = PLPath::from_increments(2, &[vec![0.4, -0.3], vec![-0.2, 0.5], vec![0.6, 0.1]]);
        let x = lift_bv(&path, 2.5).unwrap();
        let r = solve_geodesic(&x, &f, &[0.2, -0.4], &[]).unwrap();
        let ode = solve_field(&f, &[0.2, -0.4], &path, 1e-12).unwrap();
        for (a, b) in r.trajectory.iter().zip(&ode.points) {
            assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn trivial_rough_path() {
        let x = lift_bv(&PLPath::<f64>::from_increments(1, &[vec![0.0], vec![0.0]]), 2.5).unwrap();
        assert_eq!(solve_geodesic(&x, &linear_1d(), &[0.7], &[]).unwrap().end(), &[0.7]);
        assert_eq!(solve_euler(&x, &linear_1d(), &[0.7], &[]).unwrap().end(), &[0.7]);
    }

    #[test]
    fn defect_slope_for_smooth_driver() {
        let path = smooth_driver(10);
        let x = lift_bv(&path, 2.5).unwrap();
        let f = linear_1d();
        let reference = solve_field(&f, &[1.0], &path, 1e-13).unwrap().points;
        let d = defects(Backend::Euler, &x, &f, &reference, &[4, 5, 6, 7, 8]).unwrap();
        let fit = defect_scan(&d).unwrap();
        assert!(fit.slope.unwrap() >= 3.0 / 2.5 - 0.15, "{fit:?}");
    }

    #[test]
    fn zero_field_defects_are_exact() {
        let path = smooth_driver(6);
        let x = lift_bv(&path, 2.5).unwrap();
        let f = PolyVectorField::zero(1, 1, vec![(-1.0, 1.0)]).unwrap();
        let reference = vec![vec![0.5]; x.len()];
        let fit = defect_scan(&defects(Backend::Euler, &x, &f, &reference, &[2, 3, 4]).unwrap()).unwrap();
        assert!(fit.exact && fit.slope.is_none());
        assert!(matches!(defect_scan(&[]), Ok(DefectFit { exact: true, .. })));
    }

    #[test]
    fn too_few_levels() {
        let path = smooth_driver(6);
        let x = lift_bv(&path, 2.5).unwrap();
        let f = linear_1d();
        let reference = solve_field(&f, &[1.0], &path, 1e-13).unwrap().points;
        let d = defects(Backend::Euler, &x, &f, &reference, &[2, 3]).unwrap();
        assert!(matches!(defect_scan(&d), Err(Error::TooFewLevels { needed: 4, got: 2 })));
    }

    #[test]
    fn normalization_invariance_is_exact() {
        let y = Poly::<Rational>::var(1, 0);
        let f = PolyVectorField::new(
            vec![
                PolyMap { coords: vec![y.mul(&y).add(&Poly::constant(1, Rational::from_ratio(1, 2)))] },
                PolyMap { coords: vec![y.scaled(&Rational::from_i64(-1))] },
            ],
            vec![(-10.0, 10.0)],
        )
        .unwrap();
        let incs: Vec<Vec<Rational>> = (0..4)
            .map(|k| vec![Rational::from_ratio(k - 1, 5), Rational::from_ratio(2, k + 3)])
            .collect();
        let x = lift_bv(&PLPath::from_increments(2, &incs), 2.5).unwrap();
        let lambda = Rational::from_ratio(7, 3);
        let xs = x.dilate(&lambda);
        let fs = f.scaled(&(Rational::from_i64(1) / lambda));
        let xi = [Rational::from_ratio(1, 10)];
        let a = solve_euler(&x, &f, &xi, &[0, 2, 4]).unwrap();
        let b = solve_euler(&xs, &fs, &xi, &[0, 2, 4]).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
    }
}
