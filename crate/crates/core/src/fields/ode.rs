//! `dy = Σ_j V_j(y) dx^j` along a piecewise-linear driver.
//!
//! On each segment the driver is linear in time, so the equation is an
//! autonomous ODE `y' = Σ_j Δ_j V_j(y)` on `[0, 1]`. That is integrated with
//! classical RK4, halving the step until two successive solutions agree.

use crate::error::{Error, Result};
use crate::fields::field::PolyVectorField;
use crate::fields::poly::CompiledMap;
use crate::path::PLPath;

#[derive(Clone, Debug)]
pub struct OdeOptions {
    /// Relative tolerance between successive halvings, scaled by `max(1, |y|)`.
    pub tol: f64,
    pub max_halvings: u32,
    /// Box the accepted trajectory must stay in.
    pub domain: Option<Vec<(f64, f64)>>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { tol: 1e-10, max_halvings: 22, domain: None }
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    /// Driver grid times.
    pub times: Vec<f64>,
    /// Solution at each grid time.
    pub points: Vec<Vec<f64>>,
    /// Total RK4 steps in the accepted solutions.
    pub steps: usize,
}

impl OdeSolution {
    pub fn end(&self) -> &[f64] {
        self.points.last().expect("at least one point")
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }
}

struct Segment<'a> {
    fields: &'a [CompiledMap],
    inc: &'a [f64],
}

impl Segment<'_> {
    fn rhs(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (v, &dx) in self.fields.iter().zip(self.inc) {
            if dx != 0.0 {
                v.eval_add(y, dx, out);
            }
        }
    }

    /// `n` RK4 steps over `[0, 1]`. Returns the end point (`None` on
    /// overflow) and the first intermediate point outside `domain`.
    fn integrate(&self, y0: &[f64], n: usize, domain: &Option<Vec<(f64, f64)>>) -> (Option<Vec<f64>>, Option<Vec<f64>>) {
        let e = y0.len();
        let h = 1.0 / n as f64;
        let mut y = y0.to_vec();
        let mut exit = None;
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
            (vec![0.0; e], vec![0.0; e], vec![0.0; e], vec![0.0; e], vec![0.0; e]);
        for _ in 0..n {
            self.rhs(&y, &mut k1);
            for i in 0..e {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            self.rhs(&tmp, &mut k2);
            for i in 0..e {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            self.rhs(&tmp, &mut k3);
            for i in 0..e {
                tmp[i] = y[i] + h * k3[i];
            }
            self.rhs(&tmp, &mut k4);
            for i in 0..e {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            if !y.iter().all(|v| v.is_finite()) {
                return (None, exit.or_else(|| Some(y.clone())));
            }
            if exit.is_none() && !inside(domain, &y) {
                exit = Some(y.clone());
            }
        }
        (Some(y), exit)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn inside(domain: &Option<Vec<(f64, f64)>>, y: &[f64]) -> bool {
    match domain {
        None => true,
        Some(b) => y.iter().zip(b).all(|(v, &(lo, hi))| lo <= *v && *v <= hi),
    }
}

pub fn ode_solve(fields: &[CompiledMap], xi: &[f64], x: &PLPath<f64>, opts: &OdeOptions) -> Result<OdeSolution> {
    if fields.len() != x.dim() {
        return Err(Error::Dimension(format!("{} fields for a driver in ℝ^{}", fields.len(), x.dim())));
    }
    if fields.iter().any(|v| v.dim() != xi.len()) {
        return Err(Error::Dimension("field and initial value dimensions differ".into()));
    }
    if !inside(&opts.domain, xi) {
        return Err(Error::DomainExit { point: xi.to_vec() });
    }
    let mut points = vec![xi.to_vec()];
    let mut steps = 0;
    let mut n_start = 1usize;
    for inc in x.segment_increments() {
        let y0 = points.last().unwrap().clone();
        if inc.iter().all(|&v| v == 0.0) {
            points.push(y0);
            continue;
        }
        let seg = Segment { fields, inc: &inc };
        let mut n = n_start;
        let (mut coarse, _) = seg.integrate(&y0, n, &None);
        let mut accepted = None;
        for _ in 0..opts.max_halvings {
            let (fine, exit) = seg.integrate(&y0, 2 * n, &opts.domain);
            if let (Some(c), Some(f)) = (&coarse, &fine) {
                let diff: Vec<f64> = c.iter().zip(f).map(|(a, b)| a - b).collect();
                if inf_norm(&diff) <= opts.tol * inf_norm(f).max(1.0) {
                    if let Some(point) = exit {
                        return Err(Error::DomainExit { point });
                    }
                    accepted = Some(f.clone());
                    break;
                }
            }
            n *= 2;
            coarse = fine;
        }
        let Some(y1) = accepted else {
            return Err(Error::ToleranceNotReached { tol: opts.tol, budget: opts.max_halvings });
        };
        steps += 2 * n;
        n_start = (n / 2).max(1);
        points.push(y1);
    }
    Ok(OdeSolution { times: x.times().to_vec(), points, steps })
}

/// Solves `dy = f(y) dx` with the field's components and box.
pub fn solve_field(f: &PolyVectorField<f64>, xi: &[f64], x: &PLPath<f64>, tol: f64) -> Result<OdeSolution> {
    let opts = OdeOptions { tol, domain: Some(f.domain_box().to_vec()), ..Default::default() };
    ode_solve(&f.compiled(), xi, x, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::poly::{Poly, PolyMap};

    fn linear_1d() -> PolyVectorField<f64> {
        PolyVectorField::new(vec![PolyMap { coords: vec![Poly::var(1, 0)] }], vec![(-10.0, 10.0)]).unwrap()
    }

    #[test]
    fn exponential() {
        let x = PLPath::from_increments(1, &[vec![1.0]]);
        let sol = solve_field(&linear_1d(), &[0.7], &x, 1e-10).unwrap();
        assert!((sol.end()[0] - 0.7 * 1f64.exp()).abs() <= 1e-9);
    }

    #[test]
    fn constant_fields_are_exact() {
        let f = PolyVectorField::new(
            vec![
                PolyMap { coords: vec![Poly::constant(2, 1.0), Poly::constant(2, -2.0)] },
                PolyMap { coords: vec![Poly::constant(2, 0.5), Poly::constant(2, 3.0)] },
            ],
            vec![(-10.0, 10.0); 2],
        )
        .unwrap();
        let x = PLPath::from_increments(2, &[vec![0.5, -1.0], vec![-0.25, 0.75]]);
        let sol = solve_field(&f, &[0.0, 1.0], &x, 1e-10).unwrap();
        let (d1, d2) = (0.25, -0.25);
        let want = [d1 * 1.0 + d2 * 0.5, 1.0 + d1 * -2.0 + d2 * 3.0];
        for (a, b) in sol.end().iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_driver_keeps_initial_value() {
        let x = PLPath::<f64>::constant(1);
        let sol = solve_field(&linear_1d(), &[0.3], &x, 1e-10).unwrap();
        assert_eq!(sol.end(), &[0.3]);
    }

    #[test]
    fn time_reversal() {
        let y0 = Poly::var(2, 0);
        let y1 = Poly::var(2, 1);
        let f = PolyVectorField::new(
            vec![
                PolyMap { coords: vec![y1.scaled(&-1.0), y0.clone()] },
                PolyMap { coords: vec![y0.mul(&y1), Poly::constant(2, 0.5).sub(&y0.mul(&y0))] },
            ],
            vec![(-5.0, 5.0); 2],
        )
        .unwrap();
        let x = PLPath::from_increments(2, &[vec![0.4, -0.3], vec![-0.2, 0.5], vec![0.6, 0.1]]);
        let there = x.concat(&x.time_reverse());
        let sol = solve_field(&f, &[0.2, -0.4], &there, 1e-12).unwrap();
        assert!((sol.end()[0] - 0.2).abs() < 1e-8 && (sol.end()[1] + 0.4).abs() < 1e-8);
    }

    #[test]
    fn leaving_the_box() {
        let f = linear_1d().with_box(vec![(-1.0, 1.0)]).unwrap();
        let x = PLPath::from_increments(1, &[vec![2.0]]);
        assert!(matches!(solve_field(&f, &[0.5], &x, 1e-10), Err(Error::DomainExit { .. })));
    }
}
