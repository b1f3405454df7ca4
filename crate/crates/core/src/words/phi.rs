//! The Hopf isomorphism `Φ` from the word algebra onto the truncated
//! Grossman–Larson algebra: letters go to primitive parts of the generators,
//! words to `⋆`-products.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::hopf::formal::{ForestSum, TensorSum};
use crate::hopf::gl::{gl_coproduct_sum, gl_product_sums, GroupLikeGL};
use crate::linalg::{invert, rank};
use crate::scalar::{Rational, Scalar};
use crate::words::alphabet::WeightedAlphabet;
use crate::words::eulerian::eulerian_idempotent;
use crate::words::series::{WordDisplay, WordSeries};

#[derive(Debug)]
struct DegreeBlock {
    words: Vec<usize>,
    forests: Vec<usize>,
    matrix: Vec<Vec<Rational>>,
    inv_exact: Vec<Vec<Rational>>,
    inv_float: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub struct Phi {
    alphabet: Arc<WeightedAlphabet>,
    images: Vec<ForestSum>,
    sparse: Vec<Vec<(usize, Rational, f64)>>,
    blocks: Vec<DegreeBlock>,
}

impl Phi {
    pub fn new(alphabet: Arc<WeightedAlphabet>) -> Result<Self> {
        let ck = alphabet.ck_basis().clone();
        let wb = alphabet.word_basis().clone();
        let n = alphabet.degree();
        let prims: Vec<ForestSum> = alphabet
            .generators()
            .iter()
            .map(|t| eulerian_idempotent(&ForestSum::single(t.clone().into()), n))
            .collect();
        let mut images: Vec<ForestSum> = Vec::with_capacity(wb.len());
        for (i, w) in wb.words().iter().enumerate() {
            let img = match w.len() {
                0 => ForestSum::single(crate::forest::Forest::unit()),
                1 => prims[w[0]].clone(),
                _ => {
                    let rest = wb.id(&w[1..]).expect("suffix of a basis word");
                    debug_assert!(rest < i);
                    gl_product_sums(&prims[w[0]], &images[rest], n)
                }
            };
            images.push(img);
        }
        let sparse = images
            .iter()
            .map(|s| {
                s.iter()
                    .map(|(f, c)| (ck.forest_id(f).unwrap(), c.clone(), c.to_f64()))
                    .collect()
            })
            .collect();

        let mut blocks = Vec::new();
        for m in 1..=n {
            let words: Vec<usize> = wb.of_weight(m).collect();
            let forests: Vec<usize> =
                (0..ck.forests().len()).filter(|&f| ck.forest_degree(f) == m).collect();
            if words.len() != forests.len() {
                return Err(Error::SingularDegree { degree: m });
            }
            let row: HashMap<usize, usize> = forests.iter().enumerate().map(|(k, &f)| (f, k)).collect();
            let zero = Rational::from_integer(0.into());
            let mut matrix = vec![vec![zero; words.len()]; forests.len()];
            for (col, &w) in words.iter().enumerate() {
                for (f, c) in images[w].iter() {
                    matrix[row[&ck.forest_id(f).unwrap()]][col] += c;
                }
            }
            if rank(&matrix) != words.len() {
                return Err(Error::SingularDegree { degree: m });
            }
            let inv_exact = invert(&matrix).ok_or(Error::SingularDegree { degree: m })?;
            let inv_float = inv_exact.iter().map(|r| r.iter().map(|c| c.to_f64()).collect()).collect();
            blocks.push(DegreeBlock { words, forests, matrix, inv_exact, inv_float });
        }
        Ok(Phi { alphabet, images, sparse, blocks })
    }

    pub fn shared(p: f64, d: usize) -> Result<Arc<Phi>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Phi>>>> = OnceLock::new();
        let alphabet = WeightedAlphabet::shared(p, d)?;
        let key = (alphabet.degree(), d);
        let cache = CACHE.get_or_init(Default::default);
        if let Some(phi) = cache.lock().unwrap().get(&key) {
            return Ok(phi.clone());
        }
        let phi = Arc::new(Phi::new(alphabet)?);
        cache.lock().unwrap().insert(key, phi.clone());
        Ok(phi)
    }

    pub fn alphabet(&self) -> &Arc<WeightedAlphabet> {
        &self.alphabet
    }

    /// `Φ(w)` for a basis word id.
    pub fn image(&self, word: usize) -> &ForestSum {
        &self.images[word]
    }

    /// Square matrix of `Φ` restricted to degree `m` (rows: forests, columns: words).
    pub fn degree_matrix(&self, m: usize) -> &[Vec<Rational>] {
        &self.blocks[m - 1].matrix
    }

    pub fn phi<S: Scalar>(&self, a: &WordSeries<S>) -> GroupLikeGL<S> {
        let ck = self.alphabet.ck_basis().clone();
        let mut values = vec![S::zero(); ck.forests().len()];
        for (w, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (f, q, x) in &self.sparse[w] {
                let k = if S::EXACT { S::from_rational(q) } else { S::from_f64(*x) };
                values[*f] += &(c.clone() * k);
            }
        }
        GroupLikeGL::from_values(ck, values).expect("sizes agree")
    }

    pub fn phi_inverse<S: Scalar>(&self, g: &GroupLikeGL<S>) -> WordSeries<S> {
        let mut out = WordSeries::zero(self.alphabet.word_basis().clone());
        let gv = g.values();
        out.coeffs_mut()[0] = gv[0].clone();
        for b in &self.blocks {
            for (r, &w) in b.words.iter().enumerate() {
                let mut acc = S::zero();
                for (k, &f) in b.forests.iter().enumerate() {
                    if gv[f].is_zero() {
                        continue;
                    }
                    let m = if S::EXACT {
                        S::from_rational(&b.inv_exact[r][k])
                    } else {
                        S::from_f64(b.inv_float[r][k])
                    };
                    acc += &(m * gv[f].clone());
                }
                out.coeffs_mut()[w] = acc;
            }
        }
        out
    }

    /// Checks `Δ_GL Φ(w) = (Φ⊗Φ) Δ_⧢(w)` for every basis word; returns the
    /// first counterexample.
    pub fn check_bialgebra(&self) -> std::result::Result<(), String> {
        let wb = self.alphabet.word_basis();
        for w in 0..wb.len() {
            let lhs = gl_coproduct_sum(&self.images[w]);
            let mut rhs = TensorSum::zero();
            for (u, v) in wb.deshuffle(w) {
                for (a, ca) in self.images[u].iter() {
                    for (b, cb) in self.images[v].iter() {
                        rhs.add_term((a.clone(), b.clone()), ca * cb);
                    }
                }
            }
            if lhs != rhs {
                return Err(format!("Φ is not comultiplicative on {}", WordDisplay(wb.word(w))));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{Forest, LabeledTree};
    use crate::hopf::character::Character;
    use crate::path::PLPath;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_images() {
        let phi = Phi::shared(2.5, 2).unwrap();
        let wb = phi.alphabet().word_basis();
        assert_eq!(phi.image(0), &ForestSum::single(Forest::unit()));
        let a = LabeledTree::leaf(1);
        let b = LabeledTree::leaf(2);
        assert_eq!(phi.image(wb.id(&[0]).unwrap()), &ForestSum::single(a.clone().into()));
        let mut want = ForestSum::single(Forest::from_trees([a.clone(), b.clone()]));
        want.add_term(LabeledTree::ladder(&[2, 1]).into(), Rational::from_integer(1.into()));
        assert_eq!(phi.image(wb.id(&[0, 1]).unwrap()), &want);
    }

    #[test]
    fn isomorphism_on_all_configurations() {
        for (p, d) in [(1.0, 2), (2.0, 1), (2.0, 2), (3.0, 2)] {
            let phi = Phi::shared(p, d).unwrap();
            for m in 1..=phi.alphabet().degree() {
                let mat = phi.degree_matrix(m);
                assert_eq!(mat.len(), mat[0].len());
            }
            phi.check_bialgebra().unwrap();
        }
    }

    #[test]
    fn signature_maps_to_rescaled_lift() {
        // Φ(S(x)) = X̄ for the straight line, where (X, τ) = Π v / τ!
        let phi = Phi::shared(3.0, 2).unwrap();
        let wb = phi.alphabet().word_basis().clone();
        let ck = phi.alphabet().ck_basis().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let v: Vec<Rational> = (0..2).map(|_| Rational::from_ratio(rng.gen_range(-5..=5), 3)).collect();
        // realize the line in word coordinates: letters of degree 1 move, others stay
        let mut inc = vec![Rational::from_integer(0.into()); wb.letters()];
        inc[0] = v[0].clone();
        inc[1] = v[1].clone();
        let s = WordSeries::signature(wb.clone(), &PLPath::from_increments(wb.letters(), &[inc]));
        let g = phi.phi(&s);
        let tv: Vec<Rational> = ck
            .trees()
            .iter()
            .map(|t| {
                let verts = t.vertices();
                let mut prod = Rational::from_integer(1.into());
                for (l, _) in &verts {
                    prod *= &v[*l as usize - 1];
                }
                prod / Rational::from_integer(tree_factorial(t).into())
            })
            .collect();
        let x = Character::from_tree_values(ck, tv).unwrap();
        assert_eq!(g, GroupLikeGL::rescale(&x));
        assert_eq!(phi.phi_inverse(&g), s);
    }

    fn tree_factorial(t: &LabeledTree) -> i64 {
        t.degree() as i64 * t.children().iter().map(tree_factorial).product::<i64>()
    }

    #[test]
    fn float_round_trip() {
        let phi = Phi::shared(3.0, 2).unwrap();
        let wb = phi.alphabet().word_basis().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let incs: Vec<Vec<f64>> =
            (0..3).map(|_| (0..wb.letters()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let s = WordSeries::signature(wb.clone(), &PLPath::from_increments(wb.letters(), &incs));
        let g = phi.phi(&s);
        assert!(g.group_like_residual() < 1e-10);
        assert!(phi.phi_inverse(&g).max_abs_diff(&s) < 1e-12);
    }
}
