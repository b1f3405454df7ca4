//! Truncated inhomogeneous tensor algebra over a weighted alphabet.
//!
//! Letters are 0-based generator indices; the weight of a word is the sum of
//! its letters' weights and only words of weight `≤ n` are kept.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::path::PLPath;
use crate::scalar::{factorial, Scalar};
use crate::words::lyndon::LyndonBasis;

pub type Word = Vec<usize>;

/// Formats a word with 1-based letters, `ε` for the empty word.
pub struct WordDisplay<'a>(pub &'a [usize]);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let s: Vec<String> = self.0.iter().map(|k| (k + 1).to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub struct WordBasis {
    weights: Vec<usize>,
    n: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    weight: Vec<usize>,
    splits: Vec<Vec<(usize, usize)>>,
    lyndon: OnceLock<LyndonBasis>,
}

impl fmt::Debug for WordBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WordBasis")
            .field("weights", &self.weights)
            .field("n", &self.n)
            .field("words", &self.words.len())
            .finish()
    }
}

impl WordBasis {
    pub fn new(weights: Vec<usize>, n: usize) -> Result<Self> {
        if weights.contains(&0) {
            return Err(Error::Config("letter weights must be positive".into()));
        }
        let mut words: Vec<Word> = vec![Vec::new()];
        let mut frontier: Vec<(Word, usize)> = vec![(Vec::new(), 0)];
        while let Some((w, wt)) = frontier.pop() {
            for (j, &lw) in weights.iter().enumerate() {
                if wt + lw <= n {
                    let mut next = w.clone();
                    next.push(j);
                    words.push(next.clone());
                    frontier.push((next, wt + lw));
                }
            }
        }
        let wt_of = |w: &Word| w.iter().map(|&k| weights[k]).sum::<usize>();
        words.sort_by(|a, b| (wt_of(a), a).cmp(&(wt_of(b), b)));
        let index: HashMap<Word, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let weight = words.iter().map(wt_of).collect();
        let splits = words
            .iter()
            .map(|w| (0..=w.len()).map(|k| (index[&w[..k]], index[&w[k..]])).collect())
            .collect();
        Ok(WordBasis { weights, n, words, index, weight, splits, lyndon: OnceLock::new() })
    }

    /// Process-wide cache keyed by `(weights, n)`.
    pub fn shared(weights: &[usize], n: usize) -> Result<Arc<WordBasis>> {
        type Cache = Mutex<HashMap<(Vec<usize>, usize), Arc<WordBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (weights.to_vec(), n);
        if let Some(b) = cache.lock().unwrap().get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(WordBasis::new(weights.to_vec(), n)?);
        cache.lock().unwrap().insert(key, b.clone());
        Ok(b)
    }

    pub fn letters(&self) -> usize {
        self.weights.len()
    }

    pub fn letter_weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &Word {
        &self.words[i]
    }

    pub fn id(&self, w: &[usize]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn weight(&self, i: usize) -> usize {
        self.weight[i]
    }

    /// Ids of words of exactly weight `m`, in lexicographic order.
    pub fn of_weight(&self, m: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.words.len()).filter(move |&i| self.weight[i] == m)
    }

    /// All `(u, v)` with `uv = w`, including the trivial splits.
    pub fn splits(&self, i: usize) -> &[(usize, usize)] {
        &self.splits[i]
    }

    /// Deshuffle coproduct `Δ(w) = Σ_{I ⊂ positions} w|_I ⊗ w|_{I^c}`, one
    /// entry per subset.
    pub fn deshuffle(&self, i: usize) -> Vec<(usize, usize)> {
        let w = &self.words[i];
        (0u64..1 << w.len())
            .map(|mask| {
                let (mut a, mut b) = (Vec::new(), Vec::new());
                for (k, &l) in w.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        a.push(l);
                    } else {
                        b.push(l);
                    }
                }
                (self.index[&a], self.index[&b])
            })
            .collect()
    }

    pub fn lyndon(&self) -> &LyndonBasis {
        self.lyndon.get_or_init(|| LyndonBasis::new(self))
    }
}

#[derive(Clone, Debug)]
pub struct WordSeries<S: Scalar> {
    basis: Arc<WordBasis>,
    coeffs: Vec<S>,
}

impl<S: Scalar> PartialEq for WordSeries<S> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.weights == other.basis.weights
            && self.basis.n == other.basis.n
            && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> WordSeries<S> {
    pub fn zero(basis: Arc<WordBasis>) -> Self {
        let coeffs = vec![S::zero(); basis.len()];
        WordSeries { basis, coeffs }
    }

    pub fn unit(basis: Arc<WordBasis>) -> Self {
        let mut s = Self::zero(basis);
        s.coeffs[0] = S::one();
        s
    }

    /// `c · (j)` for a 0-based letter `j`.
    pub fn letter(basis: Arc<WordBasis>, j: usize, c: S) -> Self {
        let mut s = Self::zero(basis);
        if let Some(i) = s.basis.id(&[j]) {
            s.coeffs[i] = c;
        }
        s
    }

    pub fn from_coeffs(basis: Arc<WordBasis>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for {} words",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(WordSeries { basis, coeffs })
    }

    pub fn basis(&self) -> &Arc<WordBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [S] {
        &mut self.coeffs
    }

    pub fn coeff(&self, w: &[usize]) -> S {
        self.basis.id(w).map_or_else(S::zero, |i| self.coeffs[i].clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert!(Arc::ptr_eq(&self.basis, &other.basis) || self.basis.len() == other.basis.len());
        WordSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scaled(&self, s: &S) -> Self {
        WordSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// Truncated concatenation product.
    pub fn mul(&self, other: &Self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|w| {
                let mut acc = S::zero();
                for &(u, v) in self.basis.splits(w) {
                    if !self.coeffs[u].is_zero() && !other.coeffs[v].is_zero() {
                        acc += &(self.coeffs[u].clone() * other.coeffs[v].clone());
                    }
                }
                acc
            })
            .collect();
        WordSeries { basis: self.basis.clone(), coeffs }
    }

    fn without_constant(&self) -> Self {
        let mut x = self.clone();
        x.coeffs[0] = S::zero();
        x
    }

    /// `Σ_k x^k/k!`; the constant term of `x` is ignored.
    pub fn exp(&self) -> Self {
        let x = self.without_constant();
        let mut out = Self::unit(self.basis.clone());
        let mut power = Self::unit(self.basis.clone());
        for k in 1..=self.basis.n {
            power = power.mul(&x);
            out = out.add(&power.scaled(&(S::one() / factorial::<S>(k as u32))));
        }
        out
    }

    /// Truncated logarithm. A constant term `c ≠ 1` contributes `ln c`, which
    /// is only approximate for exact scalars.
    pub fn log(&self) -> Result<Self> {
        let c = self.coeffs[0].clone();
        if c.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let y = self.scaled(&(S::one() / c.clone())).without_constant();
        let mut out = Self::zero(self.basis.clone());
        let mut power = Self::unit(self.basis.clone());
        for k in 1..=self.basis.n {
            power = power.mul(&y);
            let sign = if k % 2 == 1 { S::one() } else { -S::one() };
            out = out.add(&power.scaled(&(sign / S::from_i64(k as i64))));
        }
        if !c.is_one() {
            out.coeffs[0] = S::from_f64(c.to_f64().ln());
        }
        Ok(out)
    }

    /// Multiplicative inverse by the Neumann series.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.coeffs[0].clone();
        if c.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let ci = S::one() / c;
        let y = self.scaled(&ci).without_constant().scaled(&-S::one());
        let mut out = Self::unit(self.basis.clone());
        let mut power = Self::unit(self.basis.clone());
        for _ in 1..=self.basis.n {
            power = power.mul(&y);
            out = out.add(&power);
        }
        Ok(out.scaled(&ci))
    }

    /// `Σ_{w ≠ ε} |(a, w)|^{1/‖w‖}`.
    pub fn group_norm(&self) -> f64 {
        (1..self.coeffs.len())
            .map(|i| self.coeffs[i].to_f64().abs().powf(1.0 / self.basis.weight(i) as f64))
            .sum()
    }

    /// `max_{w ≠ ε} |(a, w)|^{1/‖w‖}`, the homogeneous scale of `a`.
    pub fn homogeneous_scale(&self) -> f64 {
        (1..self.coeffs.len())
            .map(|i| self.coeffs[i].to_f64().abs().powf(1.0 / self.basis.weight(i) as f64))
            .fold(0.0, f64::max)
    }

    /// `(δ_λ a, w) = λ^{‖w‖}(a, w)`.
    pub fn dilate(&self, lambda: &S) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.clone() * lambda.pow_u32(self.basis.weight(i) as u32))
            .collect();
        WordSeries { basis: self.basis.clone(), coeffs }
    }

    /// Projection `π_m`: drops words of weight `> m`.
    pub fn truncated(&self, m: usize) -> Self {
        let mut out = self.clone();
        for i in 0..out.coeffs.len() {
            if self.basis.weight(i) > m {
                out.coeffs[i] = S::zero();
            }
        }
        out
    }

    /// Part of exact weight `m`.
    pub fn homogeneous(&self, m: usize) -> Self {
        let mut out = Self::zero(self.basis.clone());
        for i in self.basis.of_weight(m) {
            out.coeffs[i] = self.coeffs[i].clone();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.clone() - b.clone()).abs().to_f64())
            .fold(0.0, f64::max)
    }

    /// Signature of a single linear segment with increment `inc`:
    /// `(k₁⋯k_m) ↦ Δ^{k₁}⋯Δ^{k_m}/m!`.
    pub fn segment(basis: Arc<WordBasis>, inc: &[S]) -> Self {
        assert_eq!(inc.len(), basis.letters(), "increment dimension vs alphabet");
        let coeffs = basis
            .words()
            .iter()
            .map(|w| {
                let mut acc = S::one();
                for &k in w {
                    acc *= &inc[k];
                }
                acc / factorial::<S>(w.len() as u32)
            })
            .collect();
        WordSeries { basis, coeffs }
    }

    /// `S_n(x)` over the whole time range (Chen product of segments).
    pub fn signature(basis: Arc<WordBasis>, x: &PLPath<S>) -> Self {
        let mut out = Self::unit(basis.clone());
        for inc in x.segment_increments() {
            out = out.mul(&Self::segment(basis.clone(), &inc));
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WordSeries<T> {
        WordSeries { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> WordSeries<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .basis
            .words()
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| {
                serde_json::json!({
                    "word": w.iter().map(|k| k + 1).collect::<Vec<_>>(),
                    "coeff": c.to_json()
                })
            })
            .collect();
        serde_json::json!({"n": self.basis.n, "terms": terms})
    }

    /// Reads `{"terms": [{"word": [1-based letters], "coeff": …}]}`.
    pub fn from_json(basis: Arc<WordBasis>, v: &serde_json::Value) -> Result<Self> {
        let mut s = Self::zero(basis);
        let terms =
            v["terms"].as_array().ok_or_else(|| Error::Parse("word series: missing terms".into()))?;
        for t in terms {
            let w: Vec<usize> = serde_json::from_value(t["word"].clone())?;
            if w.iter().any(|&k| k == 0 || k > s.basis.letters()) {
                return Err(Error::Parse(format!("word letter out of range in {w:?}")));
            }
            let w: Word = w.into_iter().map(|k| k - 1).collect();
            let i = s.basis.id(&w).ok_or_else(|| {
                Error::TruncationMismatch(format!("word {} exceeds truncation", WordDisplay(&w)))
            })?;
            s.coeffs[i] = S::from_json(&t["coeff"])?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    pub(crate) fn random_path(k: usize, segs: usize, rng: &mut impl Rng) -> PLPath<Rational> {
        let incs: Vec<Vec<Rational>> = (0..segs)
            .map(|_| (0..k).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect())
            .collect();
        PLPath::from_increments(k, &incs)
    }

    #[test]
    fn counts() {
        // weights of the (3, 2) alphabet: 2 + 3 + 6 generators
        let w = [1, 1, 2, 2, 2, 3, 3, 3, 3, 3, 3];
        let b = WordBasis::new(w.to_vec(), 3).unwrap();
        assert_eq!(b.len(), 1 + 35);
        assert_eq!(b.of_weight(2).count(), 7);
        assert_eq!(b.of_weight(3).count(), 26);
    }

    #[test]
    fn segment_coefficients() {
        let b = WordBasis::shared(&[1, 1], 3).unwrap();
        let x = PLPath::from_increments(2, &[vec![q(2, 1), q(3, 1)]]);
        let s = WordSeries::signature(b, &x);
        assert_eq!(s.coeff(&[]), q(1, 1));
        assert_eq!(s.coeff(&[0]), q(2, 1));
        assert_eq!(s.coeff(&[0, 0]), q(2, 1));
        assert_eq!(s.coeff(&[0, 1]), q(3, 1));
        assert_eq!(s.coeff(&[1, 1, 0]), q(3, 1));
    }

    #[test]
    fn chen() {
        let b = WordBasis::shared(&[1, 1, 2], 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let x = random_path(3, 3, &mut rng);
            let y = random_path(3, 2, &mut rng);
            let whole = WordSeries::signature(b.clone(), &x.concat(&y));
            let parts = WordSeries::signature(b.clone(), &x).mul(&WordSeries::signature(b.clone(), &y));
            assert_eq!(whole, parts);
        }
    }

    #[test]
    fn reversal_gives_inverse() {
        let b = WordBasis::shared(&[1, 1], 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let x = random_path(2, 4, &mut rng);
        let s = WordSeries::signature(b.clone(), &x.concat(&x.time_reverse()));
        assert_eq!(s, WordSeries::unit(b.clone()));
        let sx = WordSeries::signature(b.clone(), &x);
        assert_eq!(sx.inverse().unwrap(), WordSeries::signature(b, &x.time_reverse()));
    }

    #[test]
    fn exp_log_round_trip() {
        let b = WordBasis::shared(&[1, 1, 2], 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let s = WordSeries::signature(b.clone(), &random_path(3, 3, &mut rng));
            assert_eq!(s.log().unwrap().exp(), s);
        }
        let z = WordSeries::<Rational>::zero(b.clone());
        assert!(matches!(z.log(), Err(Error::ZeroConstantTerm)));
        assert_eq!(WordSeries::<f64>::unit(b).group_norm(), 0.0);
    }

    #[test]
    fn level_two_log_is_antisymmetric() {
        let b = WordBasis::shared(&[1, 1], 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let l = WordSeries::signature(b, &random_path(2, 5, &mut rng)).log().unwrap();
        assert_eq!(l.coeff(&[0, 1]) + l.coeff(&[1, 0]), q(0, 1));
        assert_eq!(l.coeff(&[0, 0]), q(0, 1));
    }

    #[test]
    fn deshuffle_counts() {
        let b = WordBasis::shared(&[1, 1], 3).unwrap();
        let w = b.id(&[0, 1, 0]).unwrap();
        let d = b.deshuffle(w);
        assert_eq!(d.len(), 8);
        let target = (b.id(&[0]).unwrap(), b.id(&[1, 0]).unwrap());
        assert_eq!(d.iter().filter(|&&p| p == target).count(), 1);
        let target = (b.id(&[0]).unwrap(), b.id(&[0, 1]).unwrap());
        assert_eq!(d.iter().filter(|&&p| p == target).count(), 1);
    }
}
