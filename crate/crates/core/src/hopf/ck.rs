//! Connes–Kreimer coproduct by admissible cuts and the indexed basis that
//! characters are stored against.
//!
//! Convention: in `Δτ = Σ_c P^c ⊗ R^c` the left factor is the pruned forest
//! and the right factor is the part containing the root. With
//! `(ab, τ) = Σ (a, τ₍₁₎)(b, τ₍₂₎)` this makes `ab` the concatenation "first `a`,
//! then `b`", matching lifts whose root carries the latest integration variable.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::forest::{Enumeration, Forest, Label, LabeledTree, DEFAULT_ENUMERATION_LIMIT};
use crate::hopf::formal::TensorSum;
use crate::scalar::Rational;

/// Coproduct of a single tree. Overridable so that check suites can be run
/// against deliberately broken implementations.
pub type TreeCoproduct = dyn Fn(&LabeledTree) -> TensorSum + Send + Sync;

/// `Δ([τ₁⋯τ_k]_a) = [τ₁⋯τ_k]_a ⊗ 1 + (id ⊗ B⁺_a) Δ(τ₁⋯τ_k)`.
pub fn ck_coproduct_tree(t: &LabeledTree) -> TensorSum {
    let inner = ck_coproduct(&t.children_forest());
    let mut out = TensorSum::single((Forest::from_tree(t.clone()), Forest::unit()));
    for ((pruned, trunk), c) in inner.iter() {
        let rooted = LabeledTree::graft_forest(trunk, t.label());
        out.add_term((pruned.clone(), Forest::from_tree(rooted)), c.clone());
    }
    out
}

/// Admissible-cut coproduct, extended multiplicatively to forests.
pub fn ck_coproduct(f: &Forest) -> TensorSum {
    ck_coproduct_with(f, &ck_coproduct_tree)
}

pub fn ck_coproduct_with(f: &Forest, tree_cop: &TreeCoproduct) -> TensorSum {
    let mut acc = TensorSum::single((Forest::unit(), Forest::unit()));
    for t in f.trees() {
        acc = acc.mul(&tree_cop(t));
    }
    acc
}

/// One admissible cut of a basis tree, by forest index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cut {
    pub pruned: usize,
    pub root: usize,
    pub coeff: i64,
}

/// Trees and forests of degree `≤ n` over `d` labels with precomputed cut
/// tables. Forest index 0 is the empty forest.
pub struct CkBasis {
    n: usize,
    d: usize,
    trees: Vec<LabeledTree>,
    tree_index: HashMap<LabeledTree, usize>,
    tree_forest: Vec<usize>,
    forests: Vec<Forest>,
    forest_index: HashMap<Forest, usize>,
    forest_parts: Vec<Vec<(usize, u32)>>,
    forest_degree: Vec<usize>,
    forest_sigma: Vec<u64>,
    cuts: Vec<Vec<Cut>>,
    pub(crate) gl_product_table: OnceLock<Vec<Vec<(usize, usize, i64)>>>,
    pub(crate) gl_coproduct_table: OnceLock<Vec<Vec<(usize, usize, i64)>>>,
}

impl std::fmt::Debug for CkBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CkBasis")
            .field("n", &self.n)
            .field("d", &self.d)
            .field("trees", &self.trees.len())
            .field("forests", &self.forests.len())
            .finish()
    }
}

impl PartialEq for CkBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.cuts == other.cuts
    }
}

impl CkBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Self::with_coproduct(n, d, &ck_coproduct_tree)
    }

    /// Process-wide cache of standard bases.
    pub fn shared(n: usize, d: usize) -> Result<Arc<CkBasis>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<CkBasis>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(b) = cache.lock().unwrap().get(&(n, d)) {
            return Ok(b.clone());
        }
        let b = Arc::new(CkBasis::new(n, d)?);
        cache.lock().unwrap().insert((n, d), b.clone());
        Ok(b)
    }

    pub fn with_coproduct(n: usize, d: usize, tree_cop: &TreeCoproduct) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedTruncation("truncation level must be ≥ 1".into()));
        }
        let e = Enumeration::new(n, d, DEFAULT_ENUMERATION_LIMIT)?;
        let trees = e.all_trees();
        let tree_index: HashMap<_, _> =
            trees.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let mut forests = vec![Forest::unit()];
        forests.extend(e.all_forests());
        let forest_index: HashMap<_, _> =
            forests.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let forest_parts = forests
            .iter()
            .map(|f| f.parts().iter().map(|(t, c)| (tree_index[t], *c)).collect())
            .collect();
        let forest_degree = forests.iter().map(|f| f.degree()).collect();
        let forest_sigma = forests.iter().map(|f| f.symmetry_factor()).collect();
        let tree_forest =
            trees.iter().map(|t| forest_index[&Forest::from_tree(t.clone())]).collect();

        let mut cuts = Vec::with_capacity(trees.len());
        for t in &trees {
            let mut row = Vec::new();
            for ((p, r), c) in tree_cop(t).iter() {
                let (Some(&pi), Some(&ri)) = (forest_index.get(p), forest_index.get(r)) else {
                    return Err(Error::TruncationMismatch(format!(
                        "coproduct of {t} leaves the degree-{n} basis"
                    )));
                };
                let coeff = c
                    .to_integer()
                    .to_i64()
                    .filter(|_| c.is_integer())
                    .ok_or_else(|| Error::TruncationMismatch(format!("non-integral cut coefficient {c}")))?;
                row.push(Cut { pruned: pi, root: ri, coeff });
            }
            cuts.push(row);
        }

        Ok(CkBasis {
            n,
            d,
            trees,
            tree_index,
            tree_forest,
            forests,
            forest_index,
            forest_parts,
            forest_degree,
            forest_sigma,
            cuts,
            gl_product_table: OnceLock::new(),
            gl_coproduct_table: OnceLock::new(),
        })
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> usize {
        self.d
    }

    pub fn trees(&self) -> &[LabeledTree] {
        &self.trees
    }

    pub fn tree_id(&self, t: &LabeledTree) -> Option<usize> {
        self.tree_index.get(t).copied()
    }

    /// Forest index of the single-tree forest of tree `i`.
    pub fn tree_forest(&self, i: usize) -> usize {
        self.tree_forest[i]
    }

    pub fn forests(&self) -> &[Forest] {
        &self.forests
    }

    pub fn forest_id(&self, f: &Forest) -> Option<usize> {
        self.forest_index.get(f).copied()
    }

    pub fn forest_parts(&self, i: usize) -> &[(usize, u32)] {
        &self.forest_parts[i]
    }

    pub fn forest_degree(&self, i: usize) -> usize {
        self.forest_degree[i]
    }

    pub fn tree_degree(&self, i: usize) -> usize {
        self.forest_degree[self.tree_forest[i]]
    }

    pub fn forest_sigma(&self, i: usize) -> u64 {
        self.forest_sigma[i]
    }

    pub fn cuts(&self, tree: usize) -> &[Cut] {
        &self.cuts[tree]
    }
}

/// Independent oracle for [`ck_coproduct_tree`]: enumerate every subset of edges, keep those with at
/// most one cut on each root-to-leaf path, and add the total cut `τ ⊗ 1`.
pub fn ck_coproduct_by_cuts(t: &LabeledTree) -> TensorSum {
    let verts = t.vertices();
    let labels: Vec<Label> = verts.iter().map(|v| v.0).collect();
    let parent: Vec<Option<usize>> = verts.iter().map(|v| v.1).collect();
    let edges: Vec<usize> = (1..verts.len()).collect(); // edge v → parent(v)
    let mut out = TensorSum::single((Forest::from_tree(t.clone()), Forest::unit()));
    for mask in 0u64..(1 << edges.len()) {
        let cut: Vec<usize> =
            edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        let ancestor = |a: usize, mut v: usize| {
            while let Some(p) = parent[v] {
                if p == a {
                    return true;
                }
                v = p;
            }
            false
        };
        let admissible =
            cut.iter().all(|&a| cut.iter().all(|&b| a == b || !ancestor(a, b)));
        if !admissible {
            continue;
        }
        let mut trunk_parent = parent.clone();
        for &v in &cut {
            trunk_parent[v] = None;
        }
        let pruned = Forest::from_trees(
            cut.iter().map(|&v| LabeledTree::from_parent_array(&labels, &trunk_parent, v)),
        );
        let trunk = LabeledTree::from_parent_array(&labels, &trunk_parent, 0);
        out.add_term((pruned, Forest::from_tree(trunk)), Rational::one());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{enumerate, Kind};

    fn leaf(a: Label) -> LabeledTree {
        LabeledTree::leaf(a)
    }

    fn f(t: LabeledTree) -> Forest {
        Forest::from_tree(t)
    }

    #[test]
    fn single_vertex() {
        let d = ck_coproduct(&f(leaf(1)));
        let mut want = TensorSum::single((f(leaf(1)), Forest::unit()));
        want.add_term((Forest::unit(), f(leaf(1))), Rational::one());
        assert_eq!(d, want);
    }

    #[test]
    fn ladder() {
        let l = LabeledTree::ladder(&[1, 2]);
        let d = ck_coproduct(&f(l.clone()));
        let mut want = TensorSum::single((f(l.clone()), Forest::unit()));
        want.add_term((Forest::unit(), f(l)), Rational::one());
        want.add_term((f(leaf(2)), f(leaf(1))), Rational::one());
        assert_eq!(d, want);
    }

    #[test]
    fn cherry_against_oracle() {
        let c = LabeledTree::graft(vec![leaf(2), leaf(3)], 1, 3).unwrap();
        let d = ck_coproduct_tree(&c);
        assert_eq!(d, ck_coproduct_by_cuts(&c));
        // 1⊗τ, τ⊗1, two single cuts, one double cut
        assert_eq!(d.coefficient_sum(), Rational::from_integer(5.into()));
    }

    #[test]
    fn matches_oracle_to_degree_five() {
        for t in enumerate(5, 2, Kind::Trees).unwrap() {
            let t = t.as_tree().unwrap();
            assert_eq!(ck_coproduct_tree(t), ck_coproduct_by_cuts(t), "{t}");
        }
    }

    #[test]
    fn multiplicative_over_forests() {
        let a = LabeledTree::ladder(&[1, 2]);
        let b = leaf(1);
        let ab = Forest::from_trees([a.clone(), b.clone()]);
        assert_eq!(ck_coproduct(&ab), ck_coproduct(&f(a)).mul(&ck_coproduct(&f(b))));
    }

    #[test]
    fn basis_indexing() {
        let b = CkBasis::new(3, 2).unwrap();
        assert_eq!(b.trees().len(), 2 + 4 + 14);
        assert_eq!(b.forests()[0], Forest::unit());
        for (i, t) in b.trees().iter().enumerate() {
            assert_eq!(b.forest_degree(b.tree_forest(i)), t.degree());
            let total: i64 = b.cuts(i).iter().map(|c| c.coeff).sum();
            assert_eq!(Rational::from_integer(total.into()), ck_coproduct_tree(t).coefficient_sum());
        }
        let s = CkBasis::shared(3, 2).unwrap();
        assert!(Arc::ptr_eq(&s, &CkBasis::shared(3, 2).unwrap()));
    }
}
