//! Grossman–Larson product and coproduct on forests, and truncated
//! group-like elements.
//!
//! `f ⋆ g` sums over all ways of grafting each tree of `f` onto a vertex of
//! `g` or leaving it on the ground, so `•_a ⋆ •_b = •_a•_b + [•_a]_b`. With the
//! cut convention of [`crate::hopf::ck`] this is the orientation for which
//! `X ↦ X̄ = X/σ` turns the character product into `⋆`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::forest::{Forest, Label, LabeledTree};
use crate::hopf::character::Character;
use crate::hopf::ck::CkBasis;
use crate::hopf::formal::{ForestSum, TensorSum};
use crate::scalar::{Rational, Scalar};

struct Flat {
    labels: Vec<Label>,
    parent: Vec<Option<usize>>,
}

impl Flat {
    fn new(f: &Forest) -> Self {
        let mut fl = Flat { labels: Vec::new(), parent: Vec::new() };
        for t in f.trees() {
            fl.push(t, None);
        }
        fl
    }

    fn push(&mut self, t: &LabeledTree, attach: Option<usize>) {
        let off = self.labels.len();
        for (l, p) in t.vertices() {
            self.labels.push(l);
            self.parent.push(p.map(|q| q + off).or(attach));
        }
    }

    fn forest(&self) -> Forest {
        Forest::from_trees(
            (0..self.labels.len())
                .filter(|&v| self.parent[v].is_none())
                .map(|v| LabeledTree::from_parent_array(&self.labels, &self.parent, v)),
        )
    }
}

/// Grossman–Larson product of two forests.
pub fn gl_product(f: &Forest, g: &Forest) -> ForestSum {
    let base = Flat::new(g);
    let nv = base.labels.len();
    let trees: Vec<&LabeledTree> = f.trees().collect();
    let mut out = ForestSum::zero();
    // targets[i] = 0 for the ground, v + 1 for vertex v of g
    let mut targets = vec![0usize; trees.len()];
    loop {
        let mut fl = Flat { labels: base.labels.clone(), parent: base.parent.clone() };
        for (t, &tg) in trees.iter().zip(&targets) {
            fl.push(t, tg.checked_sub(1));
        }
        out.add_term(fl.forest(), Rational::one());
        // odometer over (nv + 1)^k attachment maps
        let mut i = 0;
        loop {
            if i == targets.len() {
                return out;
            }
            targets[i] += 1;
            if targets[i] <= nv {
                break;
            }
            targets[i] = 0;
            i += 1;
        }
    }
}

/// Bilinear extension of [`gl_product`], dropping terms above `max_degree`.
pub fn gl_product_sums(a: &ForestSum, b: &ForestSum, max_degree: usize) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in a.iter() {
        for (g, e) in b.iter() {
            if f.degree() + g.degree() <= max_degree {
                out.add_assign_scaled(&gl_product(f, g), &(c * e));
            }
        }
    }
    out
}

/// Sum over ordered splittings of the trees of `f` into two sub-multisets.
pub fn gl_coproduct(f: &Forest) -> TensorSum {
    let trees: Vec<&LabeledTree> = f.trees().collect();
    let mut out = TensorSum::zero();
    for mask in 0u64..(1u64 << trees.len()) {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, t) in trees.iter().enumerate() {
            if mask >> i & 1 == 1 {
                left.push((*t).clone());
            } else {
                right.push((*t).clone());
            }
        }
        out.add_term((Forest::from_trees(left), Forest::from_trees(right)), Rational::one());
    }
    out
}

pub fn gl_coproduct_sum(x: &ForestSum) -> TensorSum {
    let mut out = TensorSum::zero();
    for (f, c) in x.iter() {
        out.add_assign_scaled(&gl_coproduct(f), c);
    }
    out
}

fn integer(c: &Rational) -> i64 {
    use num_traits::ToPrimitive;
    debug_assert!(c.is_integer());
    c.to_integer().to_i64().expect("structure constant overflows i64")
}

fn product_table(b: &CkBasis) -> Vec<Vec<(usize, usize, i64)>> {
    let nf = b.forests().len();
    let mut table = vec![Vec::new(); nf];
    for i in 0..nf {
        for j in 0..nf {
            if b.forest_degree(i) + b.forest_degree(j) > b.truncation() {
                continue;
            }
            for (k, c) in gl_product(&b.forests()[i], &b.forests()[j]).iter() {
                table[b.forest_id(k).expect("degree bounded")].push((i, j, integer(c)));
            }
        }
    }
    table
}

fn coproduct_table(b: &CkBasis) -> Vec<Vec<(usize, usize, i64)>> {
    b.forests()
        .iter()
        .map(|f| {
            gl_coproduct(f)
                .iter()
                .map(|((l, r), c)| (b.forest_id(l).unwrap(), b.forest_id(r).unwrap(), integer(c)))
                .collect()
        })
        .collect()
}

/// Element of the truncated GL algebra stored by basis forest (index 0 is
/// the empty forest). Group-likes are the images of characters under
/// [`GroupLikeGL::rescale`].
#[derive(Clone, Debug)]
pub struct GroupLikeGL<S: Scalar> {
    basis: Arc<CkBasis>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for GroupLikeGL<S> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.truncation() == other.basis.truncation()
            && self.basis.labels() == other.basis.labels()
            && self.values == other.values
    }
}

impl<S: Scalar> GroupLikeGL<S> {
    pub fn identity(basis: Arc<CkBasis>) -> Self {
        let mut values = vec![S::zero(); basis.forests().len()];
        values[0] = S::one();
        GroupLikeGL { basis, values }
    }

    pub fn from_values(basis: Arc<CkBasis>, values: Vec<S>) -> Result<Self> {
        if values.len() != basis.forests().len() {
            return Err(Error::Dimension(format!(
                "{} forest values for a basis of {} forests",
                values.len(),
                basis.forests().len()
            )));
        }
        Ok(GroupLikeGL { basis, values })
    }

    pub fn basis(&self) -> &Arc<CkBasis> {
        &self.basis
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, f: &Forest) -> Option<&S> {
        self.basis.forest_id(f).map(|i| &self.values[i])
    }

    /// `(X̄, τ) = (X, τ)/σ(τ)`.
    pub fn rescale(a: &Character<S>) -> Self {
        let basis = a.basis().clone();
        let values = a
            .forest_values()
            .into_iter()
            .enumerate()
            .map(|(i, v)| v / S::from_i64(basis.forest_sigma(i) as i64))
            .collect();
        GroupLikeGL { basis, values }
    }

    /// Inverse of [`GroupLikeGL::rescale`]; reads tree coefficients only.
    pub fn rescale_inv(&self) -> Character<S> {
        let b = &self.basis;
        let tv = (0..b.trees().len())
            .map(|i| {
                let fi = b.tree_forest(i);
                self.values[fi].clone() * S::from_i64(b.forest_sigma(fi) as i64)
            })
            .collect();
        Character::from_tree_values(b.clone(), tv).expect("sizes agree")
    }

    /// Truncated bilinear extension of `⋆`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.basis.truncation() != other.basis.truncation()
            || self.basis.labels() != other.basis.labels()
        {
            return Err(Error::TruncationMismatch("GL elements over different bases".into()));
        }
        let table = self.basis.gl_product_table.get_or_init(|| product_table(&self.basis));
        let values = table
            .iter()
            .map(|terms| {
                let mut acc = S::zero();
                for &(i, j, c) in terms {
                    acc += &(self.values[i].clone() * other.values[j].clone() * S::from_i64(c));
                }
                acc
            })
            .collect();
        Ok(GroupLikeGL { basis: self.basis.clone(), values })
    }

    /// `max |Δg − g⊗g|` over all coefficient pairs within the truncation,
    /// including `|g(1) − 1|`.
    pub fn group_like_residual(&self) -> f64 {
        let b = &self.basis;
        let table = b.gl_coproduct_table.get_or_init(|| coproduct_table(b));
        let mut delta: HashMap<(usize, usize), S> = HashMap::new();
        for (k, terms) in table.iter().enumerate() {
            for &(i, j, c) in terms {
                let e = delta.entry((i, j)).or_insert_with(S::zero);
                *e += &(self.values[k].clone() * S::from_i64(c));
            }
        }
        let nf = b.forests().len();
        let mut worst = (self.values[0].clone() - S::one()).abs().to_f64();
        for i in 0..nf {
            for j in 0..nf {
                if b.forest_degree(i) + b.forest_degree(j) > b.truncation() {
                    continue;
                }
                let lhs = delta.get(&(i, j)).cloned().unwrap_or_else(S::zero);
                let r = (lhs - self.values[i].clone() * self.values[j].clone()).abs().to_f64();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn is_group_like(&self, tol: f64) -> bool {
        self.group_like_residual() <= tol
    }

    /// `max_τ |(g, τ)|^{1/|τ|}`.
    pub fn norm(&self) -> f64 {
        (1..self.values.len())
            .map(|i| self.values[i].to_f64().abs().powf(1.0 / self.basis.forest_degree(i) as f64))
            .fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GroupLikeGL<T> {
        GroupLikeGL { basis: self.basis.clone(), values: self.values.iter().map(f).collect() }
    }
}

impl GroupLikeGL<Rational> {
    pub fn to_forest_sum(&self) -> ForestSum {
        let mut s = ForestSum::zero();
        for (f, v) in self.basis.forests().iter().zip(&self.values) {
            s.add_term(f.clone(), v.clone());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{enumerate, Kind};
    use crate::hopf::formal::TensorSum;
    use rand::{Rng, SeedableRng};

    fn leaf(a: Label) -> LabeledTree {
        LabeledTree::leaf(a)
    }

    fn f(t: LabeledTree) -> Forest {
        Forest::from_tree(t)
    }

    fn random_char(b: &Arc<CkBasis>, rng: &mut impl Rng) -> Character<Rational> {
        let v = (0..b.trees().len())
            .map(|_| Rational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
            .collect();
        Character::from_tree_values(b.clone(), v).unwrap()
    }

    #[test]
    fn product_examples() {
        let g = f(leaf(2));
        assert_eq!(gl_product(&Forest::unit(), &g), ForestSum::single(g.clone()));
        assert_eq!(gl_product(&g, &Forest::unit()), ForestSum::single(g.clone()));
        let mut want = ForestSum::single(Forest::from_trees([leaf(1), leaf(2)]));
        want.add_term(f(LabeledTree::ladder(&[2, 1])), Rational::one());
        assert_eq!(gl_product(&f(leaf(1)), &g), want);
    }

    #[test]
    fn repeated_trees_count_attachment_maps() {
        let aa = Forest::from_trees([leaf(1), leaf(1)]);
        let p = gl_product(&aa, &f(leaf(2)));
        let one_grafted = Forest::from_trees([leaf(1), LabeledTree::ladder(&[2, 1])]);
        assert_eq!(p.coeff(&one_grafted), Rational::from_i64(2));
        assert_eq!(p.coefficient_sum(), Rational::from_i64(4));
    }

    #[test]
    fn associativity_degree_three() {
        let fs = enumerate(3, 2, Kind::Forests).unwrap();
        for a in fs.iter().filter(|x| x.degree() == 1) {
            for b in fs.iter().filter(|x| x.degree() <= 2) {
                for c in fs.iter().filter(|x| x.degree() + a.degree() + b.degree() <= 3) {
                    let lhs = gl_product_sums(&gl_product(a, b), &ForestSum::single(c.clone()), 3);
                    let rhs = gl_product_sums(&ForestSum::single(a.clone()), &gl_product(b, c), 3);
                    assert_eq!(lhs, rhs, "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn coproduct_examples() {
        let mut want = TensorSum::single((f(leaf(1)), Forest::unit()));
        want.add_term((Forest::unit(), f(leaf(1))), Rational::one());
        assert_eq!(gl_coproduct(&f(leaf(1))), want);
        let ab = Forest::from_trees([leaf(1), leaf(2)]);
        let d = gl_coproduct(&ab);
        assert_eq!(d.len(), 4);
        assert_eq!(d.coeff(&(f(leaf(1)), f(leaf(2)))), Rational::one());
        assert_eq!(d.coeff(&(f(leaf(2)), f(leaf(1)))), Rational::one());
    }

    #[test]
    fn cocommutative_to_degree_four() {
        for x in enumerate(4, 2, Kind::Forests).unwrap() {
            let d = gl_coproduct(&x);
            assert_eq!(d, d.swap(), "{x}");
        }
    }

    #[test]
    fn rescale_examples() {
        let b = CkBasis::shared(2, 1).unwrap();
        let a = Character::from_pairs(b.clone(), [(leaf(1), Rational::from_i64(3))]).unwrap();
        let g = GroupLikeGL::rescale(&a);
        assert_eq!(g.value(&f(leaf(1))).unwrap(), &Rational::from_i64(3));
        assert_eq!(g.value(&Forest::from_trees([leaf(1), leaf(1)])).unwrap(), &Rational::from_ratio(9, 2));
        assert_eq!(g.rescale_inv(), a);
    }

    #[test]
    fn rescale_is_a_morphism_into_group_likes() {
        let b = CkBasis::shared(3, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let (x, y) = (random_char(&b, &mut rng), random_char(&b, &mut rng));
            let xy = GroupLikeGL::rescale(&x.product(&y).unwrap());
            assert_eq!(xy.group_like_residual(), 0.0);
            assert_eq!(xy, GroupLikeGL::rescale(&x).product(&GroupLikeGL::rescale(&y)).unwrap());
        }
    }

    #[test]
    fn non_group_like_detected() {
        let b = CkBasis::shared(2, 1).unwrap();
        let mut v = vec![Rational::from_i64(0); b.forests().len()];
        v[0] = Rational::one();
        v[1] = Rational::from_i64(1); // •, but no matching ••/2
        let g = GroupLikeGL::from_values(b, v).unwrap();
        assert!(g.group_like_residual() > 0.1);
    }
}
