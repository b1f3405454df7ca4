use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forest::LabeledTree;
use crate::hopf::character::Character;
use crate::hopf::ck::CkBasis;
use crate::path::PLPath;
use crate::scalar::Scalar;
use crate::words::alphabet::{floor_p, MAX_DEGREE};

/// Grid-sampled branched rough path: `states[k] = X_{0, t_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchedRoughPath<S: Scalar> {
    p: f64,
    grid: Vec<S>,
    states: Vec<Character<S>>,
}

/// `τ! = |τ| · Π τ_i!` over the children.
pub fn tree_factorial(t: &LabeledTree) -> u64 {
    t.degree() as u64 * t.children().iter().map(tree_factorial).product::<u64>()
}

/// Lift of one linear segment with increment `v`: `(X, τ) = Π_{vertices} v_{label} / τ!`.
pub fn segment_character<S: Scalar>(basis: Arc<CkBasis>, inc: &[S]) -> Character<S> {
    let values = basis
        .trees()
        .iter()
        .map(|t| {
            let mut prod = S::one();
            for (l, _) in t.vertices() {
                prod *= &inc[l as usize - 1];
            }
            prod / S::from_i64(tree_factorial(t) as i64)
        })
        .collect();
    Character::from_tree_values(basis, values).expect("sizes agree")
}

fn truncation(p: f64) -> Result<usize> {
    let n = floor_p(p)?;
    if n > MAX_DEGREE {
        return Err(Error::UnsupportedTruncation(format!("[p] = {n} > {MAX_DEGREE}")));
    }
    Ok(n)
}

/// Canonical lift of a piecewise-linear path, combined across segments with
/// the group product.
pub fn lift_bv<S: Scalar>(x: &PLPath<S>, p: f64) -> Result<BranchedRoughPath<S>> {
    let n = truncation(p)?;
    let basis = CkBasis::shared(n, x.dim())?;
    let mut states = Vec::with_capacity(x.times().len());
    states.push(Character::identity(basis.clone()));
    for inc in x.segment_increments() {
        let next = states.last().unwrap().product(&segment_character(basis.clone(), &inc))?;
        states.push(next);
    }
    Ok(BranchedRoughPath { p, grid: x.times().to_vec(), states })
}

impl<S: Scalar> BranchedRoughPath<S> {
    pub fn new(p: f64, grid: Vec<S>, states: Vec<Character<S>>) -> Result<Self> {
        let n = truncation(p)?;
        if grid.is_empty() || grid.len() != states.len() {
            return Err(Error::Dimension(format!("{} grid times for {} states", grid.len(), states.len())));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("rough path grid must be strictly increasing".into()));
        }
        if states.iter().any(|s| s.truncation() != n || s.basis().labels() != states[0].basis().labels()) {
            return Err(Error::TruncationMismatch(format!("states must be truncated at [p] = {n}")));
        }
        Ok(BranchedRoughPath { p, grid, states })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn truncation(&self) -> usize {
        self.states[0].truncation()
    }

    pub fn dim(&self) -> usize {
        self.states[0].basis().labels()
    }

    pub fn basis(&self) -> &Arc<CkBasis> {
        self.states[0].basis()
    }

    pub fn grid(&self) -> &[S] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn states(&self) -> &[Character<S>] {
        &self.states
    }

    /// `X_{t_i, t_j} = X_{t_i}^{-1} X_{t_j}`.
    pub fn increment(&self, i: usize, j: usize) -> Character<S> {
        self.states[i].inverse().product(&self.states[j]).expect("same basis")
    }

    /// The path sampled at a subset of grid indices (increasing).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.p,
            indices.iter().map(|&i| self.grid[i].clone()).collect(),
            indices.iter().map(|&i| self.states[i].clone()).collect(),
        )
    }

    /// Adds `φ(t) − φ(s)` to `(X_{s,t}, τ)` for a top-degree tree `τ`;
    /// `phi` holds one value per grid point.
    pub fn perturb_top(&self, tau: &LabeledTree, phi: &[S]) -> Result<Self> {
        let n = self.truncation();
        if tau.degree() != n {
            return Err(Error::Hypothesis(format!(
                "perturbing {tau} of degree {} < [p] = {n} would break multiplicativity",
                tau.degree()
            )));
        }
        if phi.len() != self.grid.len() {
            return Err(Error::Dimension(format!("{} perturbation values for {} grid points", phi.len(), self.grid.len())));
        }
        let id = self
            .basis()
            .tree_id(tau)
            .ok_or_else(|| Error::TruncationMismatch(format!("{tau} is not in the basis")))?;
        let mut states = self.states.clone();
        for (s, v) in states.iter_mut().zip(phi) {
            let shift = v.clone() - phi[0].clone();
            s.tree_values_mut()[id] += &shift;
        }
        Ok(BranchedRoughPath { p: self.p, grid: self.grid.clone(), states })
    }

    /// `(Δ_λ X, τ) = λ^{|τ|} (X, τ)`.
    pub fn dilate(&self, lambda: &S) -> Self {
        BranchedRoughPath {
            p: self.p,
            grid: self.grid.clone(),
            states: self.states.iter().map(|s| s.dilate(lambda)).collect(),
        }
    }

    /// First grid triple `i < j < k` where `X_{i,k} ≠ X_{i,j} X_{j,k}`
    /// (exactly, or beyond `tol` in float mode).
    pub fn chen_violation(&self, tol: f64) -> Option<(usize, usize, usize)> {
        let m = self.len();
        for i in 0..m {
            for j in i + 1..m {
                let ij = self.increment(i, j);
                for k in j + 1..m {
                    let lhs = self.increment(i, k);
                    let rhs = ij.product(&self.increment(j, k)).expect("same basis");
                    let bad = if S::EXACT {
                        lhs != rhs
                    } else {
                        lhs.tree_values().iter().zip(rhs.tree_values()).any(|(a, b)| (a.clone() - b.clone()).abs().to_f64() > tol)
                    };
                    if bad {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BranchedRoughPath<T> {
        BranchedRoughPath {
            p: self.p,
            grid: self.grid.iter().map(&f).collect(),
            states: self.states.iter().map(|s| s.map(&f)).collect(),
        }
    }

    pub fn to_f64(&self) -> BranchedRoughPath<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p,
            "grid": self.grid.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "states": self.states.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let p = v["p"].as_f64().ok_or_else(|| Error::Parse("rough path: missing p".into()))?;
        let grid = v["grid"]
            .as_array()
            .ok_or_else(|| Error::Parse("rough path: missing grid".into()))?
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<_>>>()?;
        let states = v["states"]
            .as_array()
            .ok_or_else(|| Error::Parse("rough path: missing states".into()))?
            .iter()
            .map(Character::from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(p, grid, states)
    }
}

/// `(X, [•_b]_a) + (X, [•_a]_b) − (X, •_a)(X, •_b)`, which vanishes for
/// geometric (integration-by-parts) rough paths.
pub fn ibp_defect<S: Scalar>(x: &Character<S>, a: u16, b: u16) -> Result<S> {
    let get = |t: LabeledTree| {
        x.value(&t).cloned().ok_or_else(|| Error::TruncationMismatch(format!("{t} is not in the basis")))
    };
    let ab = get(LabeledTree::ladder(&[a, b]))?;
    let ba = get(LabeledTree::ladder(&[b, a]))?;
    Ok(ab + ba - get(LabeledTree::leaf(a))? * get(LabeledTree::leaf(b))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    type UniPoly = Vec<Rational>;

    fn poly_mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut out = vec![q(0, 1); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += &(x.clone() * y.clone());
            }
        }
        out
    }

    fn poly_eval(a: &UniPoly, t: &Rational) -> Rational {
        a.iter().rev().fold(q(0, 1), |acc, c| acc * t.clone() + c.clone())
    }

    /// `X_{0,·}(τ)` on one segment as a polynomial in local time, from the
    /// values at the segment start: `P_τ(θ) = P_τ(0) + v_a ∫_0^θ Π P_{τ_i}`.
    fn integrate_tree(t: &LabeledTree, start: &dyn Fn(&LabeledTree) -> Rational, v: &[Rational]) -> UniPoly {
        let mut integrand = vec![q(1, 1)];
        for c in t.children() {
            integrand = poly_mul(&integrand, &integrate_tree(c, start, v));
        }
        let mut out = vec![start(t)];
        for (k, c) in integrand.iter().enumerate() {
            out.push(c.clone() * v[t.label() as usize - 1].clone() / Rational::from_i64(k as i64 + 1));
        }
        out
    }

    #[test]
    fn diagonal_line_values() {
        let x = PLPath::new(vec![q(0, 1), q(1, 1)], vec![vec![q(0, 1); 2], vec![q(1, 1); 2]]).unwrap();
        let xr = lift_bv(&x, 3.5).unwrap();
        let end = &xr.states()[1];
        for (t, v) in end.basis().trees().iter().zip(end.tree_values()) {
            let want = match t.degree() {
                1 => q(1, 1),
                2 => q(1, 2),
                _ if t.children().len() == 2 => q(1, 3),
                _ => q(1, 6),
            };
            assert_eq!(v, &want, "{t}");
        }
    }

    #[test]
    fn lift_matches_polynomial_integration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let incs: Vec<Vec<Rational>> =
            (0..4).map(|_| (0..2).map(|_| q(rng.gen_range(-4..=4), 3)).collect()).collect();
        let x = PLPath::from_increments(2, &incs);
        let xr = lift_bv(&x, 3.0).unwrap();
        let basis = xr.basis().clone();
        let mut prev: Vec<Rational> = vec![q(0, 1); basis.trees().len()];
        for (k, v) in incs.iter().enumerate() {
            let lookup = |t: &LabeledTree| prev[basis.tree_id(t).unwrap()].clone();
            let next: Vec<Rational> =
                basis.trees().iter().map(|t| poly_eval(&integrate_tree(t, &lookup, v), &q(1, 1))).collect();
            assert_eq!(xr.states()[k + 1].tree_values(), next.as_slice());
            prev = next;
        }
    }

    #[test]
    fn chen_and_character_checks() {
        let incs = vec![vec![q(1, 2), q(-1, 1)], vec![q(2, 3), q(1, 4)], vec![q(-1, 5), q(3, 2)]];
        let xr = lift_bv(&PLPath::from_increments(2, &incs), 2.5).unwrap();
        assert_eq!(xr.chen_violation(0.0), None);
        let phi: Vec<Rational> = xr.grid().to_vec();
        let pert = xr.perturb_top(&LabeledTree::ladder(&[1, 1]), &phi).unwrap();
        assert_eq!(pert.chen_violation(0.0), None);
        let inc = pert.increment(0, 2);
        let base = xr.increment(0, 2);
        let l11 = LabeledTree::ladder(&[1, 1]);
        assert_eq!(inc.value(&l11).unwrap().clone() - base.value(&l11).unwrap().clone(), q(2, 1));
        assert_eq!(ibp_defect(&base, 1, 1).unwrap(), q(0, 1));
        assert_eq!(ibp_defect(&inc, 1, 1).unwrap(), q(4, 1));
    }

    #[test]
    fn perturbation_rules() {
        let xr = lift_bv(&PLPath::from_increments(1, &[vec![q(1, 1)], vec![q(2, 1)]]), 2.5).unwrap();
        let zero = vec![q(0, 1); 3];
        assert_eq!(xr.perturb_top(&LabeledTree::ladder(&[1, 1]), &zero).unwrap(), xr);
        assert!(matches!(xr.perturb_top(&LabeledTree::leaf(1), &zero), Err(Error::Hypothesis(_))));
        assert!(lift_bv(&PLPath::from_increments(1, &[vec![q(1, 1)]]), 4.2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let xr = lift_bv(&PLPath::from_increments(2, &[vec![q(1, 3), q(-2, 1)]]), 2.0).unwrap();
        assert_eq!(BranchedRoughPath::<Rational>::from_json(&xr.to_json()).unwrap(), xr);
    }
}
