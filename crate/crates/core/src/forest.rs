//! Non-planar labeled rooted trees and forests.
//!
//! Trees are kept in canonical form: the children of every vertex are sorted
//! by the derived structural order (label first, then children
//! lexicographically). Two trees are isomorphic as labeled non-planar trees
//! iff their canonical forms are equal, so `Eq`, `Ord` and `Hash` can be
//! derived. Forests store multiplicities explicitly as `(tree, count)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex label in `1..=d`.
pub type Label = u16;

/// Default cap on the number of elements produced by enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 1_000_000;

pub fn check_label(label: Label, d: usize) -> Result<()> {
    if label == 0 || label as usize > d {
        return Err(Error::InvalidLabel { label: label as usize, d });
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "TreeRepr")]
pub struct LabeledTree {
    label: Label,
    children: Vec<LabeledTree>,
}

#[derive(Deserialize)]
struct TreeRepr {
    label: Label,
    #[serde(default)]
    children: Vec<LabeledTree>,
}

impl From<TreeRepr> for LabeledTree {
    fn from(r: TreeRepr) -> Self {
        LabeledTree::graft_unchecked(r.children, r.label)
    }
}

impl LabeledTree {
    /// The single vertex `•_a`.
    pub fn leaf(label: Label) -> Self {
        LabeledTree { label, children: Vec::new() }
    }

    fn graft_unchecked(mut children: Vec<LabeledTree>, label: Label) -> Self {
        children.sort();
        LabeledTree { label, children }
    }

    /// `[τ₁⋯τ_k]_a`: a new root labeled `a` with the given subtrees as children.
    pub fn graft(children: Vec<LabeledTree>, label: Label, d: usize) -> Result<Self> {
        check_label(label, d)?;
        for c in &children {
            c.check_labels(d)?;
        }
        Ok(Self::graft_unchecked(children, label))
    }

    /// Grafts every tree of `forest` onto a new root.
    pub fn graft_forest(forest: &Forest, label: Label) -> Self {
        Self::graft_unchecked(forest.trees().cloned().collect(), label)
    }

    /// Ladder `ℓ_{a;b}` (root `a`, child `b`), and longer ladders from the root down.
    pub fn ladder(labels: &[Label]) -> Self {
        assert!(!labels.is_empty());
        let mut t = LabeledTree::leaf(*labels.last().unwrap());
        for &a in labels.iter().rev().skip(1) {
            t = LabeledTree::graft_unchecked(vec![t], a);
        }
        t
    }

    pub fn check_labels(&self, d: usize) -> Result<()> {
        check_label(self.label, d)?;
        self.children.iter().try_for_each(|c| c.check_labels(d))
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn children(&self) -> &[LabeledTree] {
        &self.children
    }

    /// The forest obtained by deleting the root.
    pub fn children_forest(&self) -> Forest {
        Forest::from_trees(self.children.iter().cloned())
    }

    pub fn degree(&self) -> usize {
        1 + self.children.iter().map(|c| c.degree()).sum::<usize>()
    }

    pub fn max_label(&self) -> Label {
        self.children.iter().map(|c| c.max_label()).fold(self.label, Label::max)
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }

    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.label.to_be_bytes());
        out.extend_from_slice(&(self.children.len() as u16).to_be_bytes());
        for c in &self.children {
            c.encode(out);
        }
    }

    /// Vertices in preorder as `(label, parent index)`; the root has no parent.
    pub fn vertices(&self) -> Vec<(Label, Option<usize>)> {
        fn walk(t: &LabeledTree, parent: Option<usize>, out: &mut Vec<(Label, Option<usize>)>) {
            let me = out.len();
            out.push((t.label, parent));
            for c in &t.children {
                walk(c, Some(me), out);
            }
        }
        let mut out = Vec::with_capacity(self.degree());
        walk(self, None, &mut out);
        out
    }

    /// Rebuilds the subtree rooted at `root` (canonically) from a parent array.
    pub fn from_parent_array(labels: &[Label], parent: &[Option<usize>], root: usize) -> Self {
        let children: Vec<LabeledTree> = (0..labels.len())
            .filter(|&v| parent[v] == Some(root))
            .map(|v| LabeledTree::from_parent_array(labels, parent, v))
            .collect();
        LabeledTree::graft_unchecked(children, labels[root])
    }

    pub fn symmetry_factor(&self) -> u64 {
        self.children_forest().symmetry_factor()
    }
}

impl fmt::Debug for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            write!(f, "•{}", self.label)
        } else {
            write!(f, "[")?;
            for c in &self.children {
                write!(f, "{c}")?;
            }
            write!(f, "]{}", self.label)
        }
    }
}

/// Commutative monomial of trees. The empty forest is the unit.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest {
    parts: Vec<(LabeledTree, u32)>,
}

impl Forest {
    pub fn unit() -> Self {
        Forest::default()
    }

    pub fn from_trees(trees: impl IntoIterator<Item = LabeledTree>) -> Self {
        let mut m: BTreeMap<LabeledTree, u32> = BTreeMap::new();
        for t in trees {
            *m.entry(t).or_insert(0) += 1;
        }
        Forest { parts: m.into_iter().collect() }
    }

    pub fn from_tree(t: LabeledTree) -> Self {
        Forest { parts: vec![(t, 1)] }
    }

    pub fn is_unit(&self) -> bool {
        self.parts.is_empty()
    }

    /// Distinct trees with multiplicities, in canonical order.
    pub fn parts(&self) -> &[(LabeledTree, u32)] {
        &self.parts
    }

    /// Trees with repetition, in canonical order.
    pub fn trees(&self) -> impl Iterator<Item = &LabeledTree> {
        self.parts.iter().flat_map(|(t, n)| std::iter::repeat_n(t, *n as usize))
    }

    pub fn num_trees(&self) -> usize {
        self.parts.iter().map(|(_, n)| *n as usize).sum()
    }

    pub fn degree(&self) -> usize {
        self.parts.iter().map(|(t, n)| t.degree() * *n as usize).sum()
    }

    pub fn as_tree(&self) -> Option<&LabeledTree> {
        match self.parts.as_slice() {
            [(t, 1)] => Some(t),
            _ => None,
        }
    }

    /// Disjoint union.
    pub fn mul(&self, other: &Forest) -> Forest {
        Forest::from_trees(self.trees().chain(other.trees()).cloned())
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.num_trees() as u16).to_be_bytes());
        for t in self.trees() {
            t.encode(&mut out);
        }
        out
    }

    /// `σ(τ₁^{n₁}⋯τ_k^{n_k}) = n₁!⋯n_k! σ(τ₁)^{n₁}⋯σ(τ_k)^{n_k}`.
    pub fn symmetry_factor(&self) -> u64 {
        self.parts
            .iter()
            .map(|(t, n)| {
                let fact: u64 = (1..=*n as u64).product();
                fact * t.symmetry_factor().pow(*n)
            })
            .product()
    }
}

impl From<LabeledTree> for Forest {
    fn from(t: LabeledTree) -> Self {
        Forest::from_tree(t)
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "1");
        }
        for t in self.trees() {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Serialize for Forest {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.trees())
    }
}

impl<'de> Deserialize<'de> for Forest {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<LabeledTree>::deserialize(d).map(Forest::from_trees)
    }
}

/// Sorts by `(degree, canonical_key)`.
pub fn sort_canonical(forests: &mut [Forest]) {
    forests.sort_by_cached_key(|f| (f.degree(), f.canonical_key()));
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Trees,
    Forests,
}

/// All labeled trees and forests up to a degree, grouped by degree.
#[derive(Clone, Debug)]
pub struct Enumeration {
    /// `trees[n]` holds the trees of degree `n` (`trees[0]` is empty).
    pub trees: Vec<Vec<LabeledTree>>,
    /// `forests[n]` holds the forests of degree `n` (`forests[0] = [1]`).
    pub forests: Vec<Vec<Forest>>,
}

impl Enumeration {
    pub fn new(max_degree: usize, d: usize, limit: usize) -> Result<Self> {
        if d == 0 || d > Label::MAX as usize {
            return Err(Error::Config(format!("label count d = {d} out of range")));
        }
        let mut trees: Vec<Vec<LabeledTree>> = vec![Vec::new()];
        let mut forests: Vec<Vec<Forest>> = vec![vec![Forest::unit()]];
        let mut total = 0usize;
        for n in 1..=max_degree {
            let mut level: Vec<LabeledTree> = Vec::new();
            for f in &forests[n - 1] {
                for a in 1..=d as Label {
                    level.push(LabeledTree::graft_forest(f, a));
                }
            }
            level.sort_by_cached_key(|t| t.canonical_key());
            total += level.len();
            trees.push(level);

            // multisets of trees of total degree n, built from the flattened list
            let pool: Vec<&LabeledTree> = trees[1..=n].iter().flatten().collect();
            let mut level_f = Vec::new();
            let mut stack = Vec::new();
            multisets(&pool, 0, n, &mut stack, &mut level_f, limit)?;
            sort_canonical(&mut level_f);
            total += level_f.len();
            if total > limit {
                return Err(Error::ResourceLimit { limit });
            }
            forests.push(level_f);
        }
        Ok(Enumeration { trees, forests })
    }

    pub fn max_degree(&self) -> usize {
        self.trees.len() - 1
    }

    /// Trees of degree `1..=max`, sorted by `(degree, key)`.
    pub fn all_trees(&self) -> Vec<LabeledTree> {
        self.trees.iter().flatten().cloned().collect()
    }

    /// Forests of degree `1..=max`, sorted by `(degree, key)`.
    pub fn all_forests(&self) -> Vec<Forest> {
        self.forests.iter().skip(1).flatten().cloned().collect()
    }
}

fn multisets(
    pool: &[&LabeledTree],
    start: usize,
    remaining: usize,
    stack: &mut Vec<LabeledTree>,
    out: &mut Vec<Forest>,
    limit: usize,
) -> Result<()> {
    if remaining == 0 {
        if out.len() >= limit {
            return Err(Error::ResourceLimit { limit });
        }
        out.push(Forest::from_trees(stack.iter().cloned()));
        return Ok(());
    }
    for i in start..pool.len() {
        let deg = pool[i].degree();
        if deg > remaining {
            continue;
        }
        stack.push(pool[i].clone());
        multisets(pool, i, remaining - deg, stack, out, limit)?;
        stack.pop();
    }
    Ok(())
}

/// All trees or forests of degree `1..=n` over `d` labels, sorted by
/// `(degree, canonical_key)`.
pub fn enumerate(n: usize, d: usize, kind: Kind) -> Result<Vec<Forest>> {
    enumerate_with_limit(n, d, kind, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_with_limit(n: usize, d: usize, kind: Kind, limit: usize) -> Result<Vec<Forest>> {
    if n == 0 {
        return Err(Error::Config("enumeration degree must be at least 1".into()));
    }
    let e = Enumeration::new(n, d, limit)?;
    Ok(match kind {
        Kind::Trees => e.all_trees().into_iter().map(Forest::from_tree).collect(),
        Kind::Forests => e.all_forests(),
    })
}
