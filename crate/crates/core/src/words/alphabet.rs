//! Free generators of the Grossman–Larson algebra up to degree `[p]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forest::LabeledTree;
use crate::hopf::ck::CkBasis;
use crate::hopf::formal::ForestSum;
use crate::hopf::gl::gl_product_sums;
use crate::linalg::Echelon;
use crate::scalar::Rational;
use crate::words::eulerian::eulerian_idempotent;
use crate::words::series::WordBasis;

/// Largest supported `[p]`.
pub const MAX_DEGREE: usize = 3;

#[derive(Debug)]
pub struct WeightedAlphabet {
    n: usize,
    d: usize,
    generators: Vec<LabeledTree>,
    weights: Vec<usize>,
    ck: Arc<CkBasis>,
    words: Arc<WordBasis>,
}

/// `[p]`, the integer part of `p`.
pub fn floor_p(p: f64) -> Result<usize> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Config(format!("p = {p} must be ≥ 1")));
    }
    Ok(p.floor() as usize)
}

fn dense(basis: &CkBasis, x: &ForestSum, ids: &HashMap<usize, usize>) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); ids.len()];
    for (f, c) in x.iter() {
        let fid = basis.forest_id(f).expect("degree within truncation");
        v[ids[&fid]] += c;
    }
    v
}

/// Scans trees degree by degree in canonical order and keeps each tree whose
/// primitive part is independent of the GL products of the generators kept so
/// far (plus earlier same-degree picks).
pub fn select_generators(p: f64, d: usize) -> Result<WeightedAlphabet> {
    let n = floor_p(p)?;
    if n > MAX_DEGREE {
        return Err(Error::UnsupportedTruncation(format!("[p] = {n} > {MAX_DEGREE}")));
    }
    let ck = CkBasis::shared(n, d)?;
    let mut generators: Vec<LabeledTree> = Vec::new();
    let mut weights = Vec::new();
    let mut prims: Vec<ForestSum> = Vec::new();
    // images[m] = Φ-images of all words of weight m over the selected generators
    let mut images: Vec<Vec<ForestSum>> = vec![Vec::new(); n + 1];
    for m in 1..=n {
        let mut products = Vec::new();
        for (j, pj) in prims.iter().enumerate() {
            if weights[j] < m {
                for img in &images[m - weights[j]] {
                    products.push(gl_product_sums(pj, img, n));
                }
            }
        }
        let ids: HashMap<usize, usize> = (0..ck.forests().len())
            .filter(|&i| ck.forest_degree(i) == m)
            .enumerate()
            .map(|(k, i)| (i, k))
            .collect();
        let mut span = Echelon::new(ids.len());
        for x in &products {
            span.insert(&dense(&ck, x, &ids));
        }
        for (ti, t) in ck.trees().iter().enumerate() {
            if ck.tree_degree(ti) != m || span.rank() == span.dim() {
                continue;
            }
            let prim = eulerian_idempotent(&ForestSum::single(t.clone().into()), n);
            if span.insert(&dense(&ck, &prim, &ids)) {
                generators.push(t.clone());
                weights.push(m);
                prims.push(prim.clone());
                images[m].push(prim);
            }
        }
        if span.rank() != span.dim() {
            return Err(Error::RankCompletion { degree: m, rank: span.rank(), dim: span.dim() });
        }
        images[m].extend(products);
    }
    let words = WordBasis::shared(&weights, n)?;
    Ok(WeightedAlphabet { n, d, generators, weights, ck, words })
}

impl WeightedAlphabet {
    /// Process-wide cache keyed by `([p], d)`.
    pub fn shared(p: f64, d: usize) -> Result<Arc<WeightedAlphabet>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<WeightedAlphabet>>>> =
            OnceLock::new();
        let n = floor_p(p)?;
        let cache = CACHE.get_or_init(Default::default);
        if let Some(a) = cache.lock().unwrap().get(&(n, d)) {
            return Ok(a.clone());
        }
        let a = Arc::new(select_generators(p, d)?);
        cache.lock().unwrap().insert((n, d), a.clone());
        Ok(a)
    }

    /// `[p]`, the truncation degree.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[LabeledTree] {
        &self.generators
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    pub fn ck_basis(&self) -> &Arc<CkBasis> {
        &self.ck
    }

    pub fn word_basis(&self) -> &Arc<WordBasis> {
        &self.words
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .generators
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| json!({"tree": t, "weight": w}))
            .collect();
        json!({"degree": self.n, "d": self.d, "generators": gens})
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(p: f64, d: usize) -> Vec<usize> {
        let a = select_generators(p, d).unwrap();
        (1..=a.degree()).map(|m| a.weights().iter().filter(|&&w| w == m).count()).collect()
    }

    #[test]
    fn generator_counts() {
        assert_eq!(counts(1.5, 2), vec![2]);
        assert_eq!(counts(2.0, 1), vec![1, 1]);
        assert_eq!(counts(2.5, 2), vec![2, 3]);
        assert_eq!(counts(3.2, 2), vec![2, 3, 6]);
    }

    #[test]
    fn degree_one_generators_are_vertices() {
        let a = select_generators(1.0, 2).unwrap();
        assert_eq!(a.generators(), &[LabeledTree::leaf(1), LabeledTree::leaf(2)]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(select_generators(4.0, 1), Err(Error::UnsupportedTruncation(_))));
        assert!(select_generators(0.5, 1).is_err());
    }

    #[test]
    fn dump_is_deterministic() {
        let a = select_generators(2.5, 2).unwrap().to_json();
        let b = select_generators(2.5, 2).unwrap().to_json();
        assert_eq!(a, b);
        assert_eq!(a["generators"].as_array().unwrap().len(), 5);
    }
}
