//! Sparse multivariate polynomials and polynomial maps `ℝ^e → ℝ^e`.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S: Scalar> {
    nvars: usize,
    terms: BTreeMap<Exponents, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    /// The coordinate function `y_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, S::one())
    }

    pub fn monomial(exps: Exponents, c: S) -> Self {
        let mut p = Poly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Exponents, c: S) {
        use std::collections::btree_map::Entry;
        assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(&-S::one()))
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    /// `∂/∂y_i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c.clone() * S::from_i64(e[i] as i64));
            }
        }
        out
    }

    pub fn eval(&self, y: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (yi, &k) in y.iter().zip(e) {
                if k > 0 {
                    t *= &yi.pow_u32(k);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

/// Polynomial map `ℝ^e → ℝ^e`, one polynomial per output coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap<S: Scalar> {
    pub coords: Vec<Poly<S>>,
}

impl<S: Scalar> PolyMap<S> {
    pub fn zero(e: usize) -> Self {
        PolyMap { coords: vec![Poly::zero(e); e] }
    }

    pub fn identity(e: usize) -> Self {
        PolyMap { coords: (0..e).map(|i| Poly::var(e, i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|p| p.is_zero())
    }

    pub fn eval(&self, y: &[S]) -> Vec<S> {
        self.coords.iter().map(|p| p.eval(y)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyMap { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        PolyMap { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scaled(&self, s: &S) -> Self {
        PolyMap { coords: self.coords.iter().map(|a| a.scaled(s)).collect() }
    }

    /// `∂/∂y_i` of every coordinate.
    pub fn deriv(&self, i: usize) -> Self {
        PolyMap { coords: self.coords.iter().map(|p| p.deriv(i)).collect() }
    }

    /// Directional derivative `dF(V) = Σ_i V_i ∂_i F`, with `V` differentiated
    /// nowhere.
    pub fn directional(&self, v: &PolyMap<S>) -> Self {
        let e = self.dim();
        let mut out = PolyMap::zero(e);
        for i in 0..e {
            if v.coords[i].is_zero() {
                continue;
            }
            let di = self.deriv(i);
            for (o, d) in out.coords.iter_mut().zip(&di.coords) {
                *o = o.add(&d.mul(&v.coords[i]));
            }
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.coords.iter().map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyMap<T> {
        PolyMap { coords: self.coords.iter().map(|p| p.map(&f)).collect() }
    }

    pub fn to_f64(&self) -> PolyMap<f64> {
        self.map(|c| c.to_f64())
    }
}

/// Flattened `f64` form of a list of polynomials in `nin` variables, for fast
/// repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledMap {
    nin: usize,
    e: usize,
    monomials: Vec<Exponents>,
    /// `coeffs[k * e + i]`: coefficient of monomial `k` in coordinate `i`.
    coeffs: Vec<f64>,
    max_pow: u32,
}

impl CompiledMap {
    pub fn new<S: Scalar>(m: &PolyMap<S>) -> Self {
        Self::from_polys(&m.coords)
    }

    pub fn from_polys<S: Scalar>(polys: &[Poly<S>]) -> Self {
        let e = polys.len();
        let nin = polys.first().map_or(0, |p| p.nvars());
        let mut index: BTreeMap<Exponents, usize> = BTreeMap::new();
        for p in polys {
            for (ex, _) in p.terms() {
                let n = index.len();
                index.entry(ex.clone()).or_insert(n);
            }
        }
        let mut monomials = vec![Vec::new(); index.len()];
        for (ex, &k) in &index {
            monomials[k] = ex.clone();
        }
        let mut coeffs = vec![0.0; index.len() * e];
        for (i, p) in polys.iter().enumerate() {
            for (ex, c) in p.terms() {
                coeffs[index[ex] * e + i] = c.to_f64();
            }
        }
        let max_pow = monomials.iter().flatten().copied().max().unwrap_or(0);
        CompiledMap { nin, e, monomials, coeffs, max_pow }
    }

    /// Number of outputs.
    pub fn dim(&self) -> usize {
        self.e
    }

    pub fn inputs(&self) -> usize {
        self.nin
    }

    /// `out += scale · F(y)`.
    pub fn eval_add(&self, y: &[f64], scale: f64, out: &mut [f64]) {
        let np = self.max_pow as usize + 1;
        let len = self.nin * np;
        let mut stack = [0.0f64; 64];
        let mut heap;
        let pows: &mut [f64] = if len <= 64 {
            &mut stack[..len]
        } else {
            heap = vec![0.0; len];
            &mut heap
        };
        for (i, &yi) in y.iter().enumerate() {
            let mut acc = 1.0;
            for k in 0..np {
                pows[i * np + k] = acc;
                acc *= yi;
            }
        }
        for (k, ex) in self.monomials.iter().enumerate() {
            let mut m = scale;
            for (i, &p) in ex.iter().enumerate() {
                m *= pows[i * np + p as usize];
            }
            for (o, c) in out.iter_mut().zip(&self.coeffs[k * self.e..(k + 1) * self.e]) {
                *o += m * c;
            }
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.e];
        self.eval_add(y, 1.0, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn arithmetic_and_derivatives() {
        let x = Poly::<Rational>::var(2, 0);
        let y = Poly::<Rational>::var(2, 1);
        let p = x.mul(&x).mul(&y).add(&y.scaled(&Rational::from_i64(3)));
        let three = Rational::from_i64(3);
        let at = [Rational::from_i64(2), three.clone()];
        assert_eq!(p.eval(&at), Rational::from_i64(12 + 9));
        assert_eq!(p.deriv(0), x.mul(&y).scaled(&Rational::from_i64(2)));
        assert_eq!(p.deriv(1).deriv(1), Poly::zero(2));
        assert_eq!(p.sub(&p), Poly::zero(2));
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn compiled_matches_symbolic() {
        let x = Poly::<f64>::var(2, 0);
        let y = Poly::<f64>::var(2, 1);
        let m = PolyMap {
            coords: vec![x.mul(&y).add(&Poly::constant(2, 1.5)), y.mul(&y).mul(&y).scaled(&-2.0)],
        };
        let c = CompiledMap::new(&m);
        for pt in [[0.3, -1.2], [2.0, 0.5]] {
            let a = m.eval(&pt);
            let b = c.eval(&pt);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn directional_derivative() {
        // F = (y0², y0·y1), V = (1, y0): dF(V) = (2y0, y1 + y0²)
        let y0 = Poly::<Rational>::var(2, 0);
        let y1 = Poly::<Rational>::var(2, 1);
        let f = PolyMap { coords: vec![y0.mul(&y0), y0.mul(&y1)] };
        let v = PolyMap { coords: vec![Poly::constant(2, Rational::from_i64(1)), y0.clone()] };
        let d = f.directional(&v);
        assert_eq!(d.coords[0], y0.scaled(&Rational::from_i64(2)));
        assert_eq!(d.coords[1], y1.add(&y0.mul(&y0)));
    }
}
