//! Lyndon words, their standard bracketings, and Lie-membership tests.
//!
//! The bracketing `P_l` of a Lyndon word equals `l` plus lexicographically
//! larger words, so coefficients of a homogeneous Lie element are recovered
//! by forward substitution in lexicographic order.

use crate::scalar::Scalar;
use crate::words::series::{WordBasis, WordSeries};

pub fn is_lyndon(w: &[usize]) -> bool {
    !w.is_empty() && (1..w.len()).all(|k| w < &w[k..])
}

#[derive(Clone, Debug)]
pub struct LyndonWord {
    /// Word id in the ambient basis.
    pub id: usize,
    /// Standard factorization `l = uv` (ids of Lyndon words), `None` for letters.
    pub factors: Option<(usize, usize)>,
    /// `P_l` as integer combination of word ids.
    pub bracket: Vec<(usize, i64)>,
}

#[derive(Clone, Debug)]
pub struct LyndonBasis {
    words: Vec<LyndonWord>,
    by_weight: Vec<Vec<usize>>,
}

impl LyndonBasis {
    pub fn new(b: &WordBasis) -> Self {
        let n = b.truncation();
        let mut words: Vec<LyndonWord> = Vec::new();
        let mut pos = std::collections::HashMap::new();
        // ids are sorted by (weight, lex), so factors are seen first
        for id in 1..b.len() {
            let w = b.word(id);
            if !is_lyndon(w) {
                continue;
            }
            let (factors, bracket) = if w.len() == 1 {
                (None, vec![(id, 1)])
            } else {
                let k = (1..w.len()).find(|&k| is_lyndon(&w[k..])).unwrap();
                let (u, v) = (b.id(&w[..k]).unwrap(), b.id(&w[k..]).unwrap());
                let (pu, pv): (&LyndonWord, &LyndonWord) = (&words[pos[&u]], &words[pos[&v]]);
                let mut acc = std::collections::BTreeMap::new();
                for &(x, cx) in &pu.bracket {
                    for &(y, cy) in &pv.bracket {
                        let xy: Vec<usize> = b.word(x).iter().chain(b.word(y)).copied().collect();
                        let yx: Vec<usize> = b.word(y).iter().chain(b.word(x)).copied().collect();
                        *acc.entry(b.id(&xy).unwrap()).or_insert(0) += cx * cy;
                        *acc.entry(b.id(&yx).unwrap()).or_insert(0) -= cx * cy;
                    }
                }
                (Some((u, v)), acc.into_iter().filter(|&(_, c)| c != 0).collect())
            };
            pos.insert(id, words.len());
            words.push(LyndonWord { id, factors, bracket });
        }
        let mut by_weight = vec![Vec::new(); n + 1];
        for (i, l) in words.iter().enumerate() {
            by_weight[b.weight(l.id)].push(i);
        }
        for ids in &mut by_weight {
            ids.sort_by(|&x, &y| b.word(words[x].id).cmp(b.word(words[y].id)));
        }
        LyndonBasis { words, by_weight }
    }

    pub fn words(&self) -> &[LyndonWord] {
        &self.words
    }

    /// Indices into [`LyndonBasis::words`] of weight `m`, lexicographically sorted.
    pub fn of_weight(&self, m: usize) -> &[usize] {
        self.by_weight.get(m).map_or(&[], |v| v.as_slice())
    }

    /// Coordinates of the weight-`m` part of `x` in the bracket basis, with
    /// the max-abs residual of the reconstruction (0 iff the part is Lie).
    pub fn coefficients<S: Scalar>(&self, x: &WordSeries<S>, m: usize) -> (Vec<(usize, S)>, f64) {
        let b = x.basis();
        let mut rest: Vec<S> = x.coeffs().to_vec();
        let mut out = Vec::new();
        for &li in self.of_weight(m) {
            let l = &self.words[li];
            let c = rest[l.id].clone();
            if !c.is_zero() {
                for &(w, k) in &l.bracket {
                    let t = c.clone() * S::from_i64(k);
                    rest[w] -= &t;
                }
            }
            out.push((li, c));
        }
        let res = b.of_weight(m).map(|i| rest[i].abs().to_f64()).fold(0.0, f64::max);
        (out, res)
    }

    /// `P_l` as a series.
    pub fn bracket_series<S: Scalar>(&self, li: usize, basis: std::sync::Arc<WordBasis>) -> WordSeries<S> {
        let mut s = WordSeries::zero(basis);
        for &(w, k) in &self.words[li].bracket {
            s.coeffs_mut()[w] = S::from_i64(k);
        }
        s
    }
}

/// Largest deviation of `x` from the free Lie algebra (weights 0..=n).
pub fn lie_residual<S: Scalar>(x: &WordSeries<S>) -> f64 {
    let b = x.basis();
    let ly = b.lyndon();
    let mut worst = x.coeffs()[0].abs().to_f64();
    for m in 1..=b.truncation() {
        worst = worst.max(ly.coefficients(x, m).1);
    }
    worst
}

/// Group membership: `log(a)` is Lie. Exact scalars require a residual of 0.
pub fn group_residual<S: Scalar>(a: &WordSeries<S>) -> f64 {
    match a.log() {
        Ok(l) => lie_residual(&l).max((a.coeffs()[0].clone() - S::one()).abs().to_f64()),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::PLPath;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};

    #[test]
    fn lyndon_predicate() {
        assert!(is_lyndon(&[0]));
        assert!(is_lyndon(&[0, 1]));
        assert!(!is_lyndon(&[1, 0]));
        assert!(!is_lyndon(&[0, 0]));
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[0, 1, 0]));
    }

    #[test]
    fn witt_dimensions() {
        // unweighted alphabet of 2 letters: 2, 1, 2, 3 Lyndon words by length
        let b = WordBasis::new(vec![1, 1], 4).unwrap();
        let ly = b.lyndon();
        let counts: Vec<usize> = (1..=4).map(|m| ly.of_weight(m).len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3]);
    }

    #[test]
    fn brackets_are_triangular() {
        let b = WordBasis::new(vec![1, 1, 2], 3).unwrap();
        let ly = b.lyndon();
        for l in ly.words() {
            let w = b.word(l.id);
            for &(x, c) in &l.bracket {
                if x == l.id {
                    assert_eq!(c, 1);
                } else {
                    assert!(b.word(x) > w);
                }
            }
        }
        // [1,[1,2]] = 112 − 2·121 + 211
        let id = b.id(&[0, 0, 1]).unwrap();
        let l = ly.words().iter().find(|l| l.id == id).unwrap();
        let get = |w: &[usize]| l.bracket.iter().find(|p| p.0 == b.id(w).unwrap()).map(|p| p.1);
        assert_eq!(get(&[0, 0, 1]), Some(1));
        assert_eq!(get(&[0, 1, 0]), Some(-2));
        assert_eq!(get(&[1, 0, 0]), Some(1));
    }

    #[test]
    fn signatures_are_group_like() {
        let b = WordBasis::shared(&[1, 1, 2], 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let incs: Vec<Vec<Rational>> = (0..4)
                .map(|_| (0..3).map(|_| Rational::from_ratio(rng.gen_range(-5..=5), 3)).collect())
                .collect();
            let s = WordSeries::signature(b.clone(), &PLPath::from_increments(3, &incs));
            assert_eq!(group_residual(&s), 0.0);
        }
        // a lone square of a letter is not group-like
        let mut bad = WordSeries::<Rational>::unit(b.clone());
        bad.coeffs_mut()[b.id(&[0, 1]).unwrap()] = Rational::from_i64(1);
        assert!(group_residual(&bad) > 0.0);
    }
}
