//! Bounded-variation paths with prescribed truncated signature.
//!
//! Level `m = 1..n`: with `x` the path built so far, `k = S(x)⁻¹h` vanishes
//! below weight `m`, and its weight-`m` part is a Lie element. Expanding it in
//! the Lyndon bracket basis and appending one straight segment for the
//! letters plus one nested commutator loop per bracketed Lyndon word fixes
//! level `m` without disturbing lower levels. Every Lyndon word of weight `m`
//! gets its piece, even with coefficient 0, so the segment layout only
//! depends on the alphabet.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hopf::gl::GroupLikeGL;
use crate::path::PLPath;
use crate::scalar::Scalar;
use crate::words::lyndon::group_residual;
use crate::words::phi::Phi;
use crate::words::series::{WordBasis, WordSeries};

/// Group-membership tolerance for float inputs, relative to the
/// coefficient scale.
pub const GROUP_TOL: f64 = 1e-8;

fn sign_root<S: Scalar>(c: &S, exponent: f64) -> S {
    let v = c.to_f64();
    S::from_f64(v.signum() * v.abs().powf(exponent))
}

/// Path with signature `exp(c·P_l + higher-weight terms)`.
fn lyndon_path<S: Scalar>(wb: &WordBasis, li: usize, c: &S) -> PLPath<S> {
    let ly = wb.lyndon();
    let l = &ly.words()[li];
    match l.factors {
        None => {
            let mut inc = vec![S::zero(); wb.letters()];
            inc[wb.word(l.id)[0]] = c.clone();
            PLPath::from_increments(wb.letters(), &[inc])
        }
        Some((u, v)) => {
            let (wu, wv) = (wb.weight(u) as f64, wb.weight(v) as f64);
            let (a, b) = if c.is_zero() {
                (S::zero(), S::zero())
            } else if S::EXACT {
                (c.clone(), S::one())
            } else {
                let b = S::from_f64(c.to_f64().abs().powf(wv / (wu + wv)));
                (sign_root(c, wu / (wu + wv)), b)
            };
            let ui = ly.words().iter().position(|x| x.id == u).unwrap();
            let vi = ly.words().iter().position(|x| x.id == v).unwrap();
            let pu = lyndon_path(wb, ui, &a);
            let pv = lyndon_path(wb, vi, &b);
            pu.concat(&pv).concat(&pu.time_reverse()).concat(&pv.time_reverse())
        }
    }
}

/// Appends loops realizing the weight-`m` Lie element `x` (lower weights of
/// `x` are ignored).
/// Single letters of weight `m` share one straight segment, so the
/// signature of a straight line is realized by that line itself.
fn homogeneous_block<S: Scalar>(wb: &WordBasis, x: &WordSeries<S>, m: usize) -> PLPath<S> {
    let (coeffs, _) = wb.lyndon().coefficients(x, m);
    let ly = wb.lyndon();
    let mut letters = vec![S::zero(); wb.letters()];
    let mut brackets = Vec::new();
    for (li, c) in coeffs {
        match ly.words()[li].factors {
            None => letters[wb.word(ly.words()[li].id)[0]] = c,
            Some(_) => brackets.push((li, c)),
        }
    }
    let mut block = PLPath::from_increments(wb.letters(), &[letters]);
    for (li, c) in brackets {
        block = block.concat(&lyndon_path(wb, li, &c));
    }
    block
}

fn check_group<S: Scalar>(h: &WordSeries<S>) -> Result<()> {
    let r = group_residual(h);
    let scale = 1.0 + h.coeffs().iter().map(|c| c.abs().to_f64()).fold(0.0, f64::max);
    let tol = if S::EXACT { 0.0 } else { GROUP_TOL * scale };
    if r > tol {
        return Err(Error::NotGroupLike { residual: r });
    }
    Ok(())
}

fn realize_raw<S: Scalar>(h: &WordSeries<S>) -> Result<PLPath<S>> {
    let wb = h.basis().clone();
    let mut x = PLPath::constant(wb.letters());
    let mut sig = WordSeries::unit(wb.clone());
    for m in 1..=wb.truncation() {
        let k = sig.inverse()?.mul(h);
        let block = homogeneous_block(&wb, &k, m);
        sig = sig.mul(&WordSeries::signature(wb.clone(), &block));
        x = x.concat(&block);
    }
    Ok(x)
}

/// A path `x` in `ℝ^K` with `S_n(x)_{0,T} = h`.
///
/// Float inputs are first brought to unit homogeneous scale by `δ_{1/λ}`; the
/// resulting path is mapped back by scaling component `j` by `λ^{|ν_j|}`.
pub fn realize<S: Scalar>(h: &WordSeries<S>) -> Result<PLPath<S>> {
    check_group(h)?;
    let lambda = h.homogeneous_scale();
    if S::EXACT || lambda == 0.0 || !(lambda.is_finite()) {
        return realize_raw(h);
    }
    let inv = S::from_f64(1.0 / lambda);
    let x = realize_raw(&h.dilate(&inv))?;
    let factors: Vec<S> = h
        .basis()
        .letter_weights()
        .iter()
        .map(|&w| S::from_f64(lambda.powi(w as i32)))
        .collect();
    Ok(x.scale_components(&factors))
}

/// Paths `x¹, x²` with `S_n(xⁱ) = hⁱ` and `‖x¹ − x²‖_{1-var} = O(δ)`.
///
/// At level `m`, `kⁱ = S(zⁱ)⁻¹hⁱ` and `μ = (k² − k¹)_m / δ`. A shared block
/// realizes `k¹_m − μ`; then `x¹` appends a realization `y` of `μ` and `x²`
/// appends `ỹ`, component `j` scaled by `(1+δ)^{|ν_j|/m}`. For exact scalars
/// these factors are rounded, so the second signature is matched to `f64`
/// accuracy only.
pub fn realize_pair<S: Scalar>(
    h1: &WordSeries<S>,
    h2: &WordSeries<S>,
    delta: f64,
) -> Result<(PLPath<S>, PLPath<S>)> {
    check_group(h1)?;
    check_group(h2)?;
    if !(delta > 0.0) {
        return Err(Error::Hypothesis(format!("δ = {delta} must be positive")));
    }
    let gap = h1.max_abs_diff(h2);
    if gap > delta * (1.0 + 1e-12) {
        return Err(Error::Hypothesis(format!("max |h¹ − h²| = {gap:e} exceeds δ = {delta:e}")));
    }
    let wb: Arc<WordBasis> = h1.basis().clone();
    let dim = wb.letters();
    let (mut x1, mut x2) = (PLPath::constant(dim), PLPath::constant(dim));
    let (mut s1, mut s2) = (WordSeries::unit(wb.clone()), WordSeries::unit(wb.clone()));
    let d = S::from_f64(delta);
    for m in 1..=wb.truncation() {
        let k1 = s1.inverse()?.mul(h1).homogeneous(m);
        let k2 = s2.inverse()?.mul(h2).homogeneous(m);
        let mu = k2.sub(&k1).scaled(&(S::one() / d.clone()));
        let z = homogeneous_block(&wb, &k1.sub(&mu), m);
        let y = homogeneous_block(&wb, &mu, m);
        let factors: Vec<S> = wb
            .letter_weights()
            .iter()
            .map(|&w| S::from_f64((1.0 + delta).powf(w as f64 / m as f64)))
            .collect();
        let yt = y.scale_components(&factors);
        let (b1, b2) = (z.concat(&y), z.concat(&yt));
        s1 = s1.mul(&WordSeries::signature(wb.clone(), &b1));
        s2 = s2.mul(&WordSeries::signature(wb.clone(), &b2));
        x1 = x1.concat(&b1);
        x2 = x2.concat(&b2);
    }
    Ok((x1, x2))
}

/// A path `x` with `Φ(S_{[p]}(x)) = g`.
pub fn realize_gl<S: Scalar>(phi: &Phi, g: &GroupLikeGL<S>) -> Result<PLPath<S>> {
    realize(&phi.phi_inverse(g))
}
