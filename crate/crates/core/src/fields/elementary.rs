//! Elementary differentials `f(τ)` and the word maps `F^w`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::field::PolyVectorField;
use crate::fields::poly::{CompiledMap, PolyMap};
use crate::forest::LabeledTree;
use crate::hopf::ck::CkBasis;
use crate::scalar::Scalar;

/// `Σ_{i_1..i_k} ∂_{i_1}⋯∂_{i_k} P · Π_j V_j[i_j]`: the symmetric multilinear
/// map `d^k P(V_1, …, V_k)`, differentiating `P` only.
fn contract<S: Scalar>(p: &PolyMap<S>, vs: &[&PolyMap<S>]) -> PolyMap<S> {
    let Some((v, rest)) = vs.split_first() else {
        return p.clone();
    };
    let e = p.dim();
    let mut out = PolyMap::zero(e);
    for i in 0..e {
        if v.coords[i].is_zero() {
            continue;
        }
        let inner = contract(&p.deriv(i), rest);
        for (o, c) in out.coords.iter_mut().zip(&inner.coords) {
            *o = o.add(&c.mul(&v.coords[i]));
        }
    }
    out
}

fn build<S: Scalar>(
    f: &PolyVectorField<S>,
    t: &LabeledTree,
    lookup: &dyn Fn(&LabeledTree) -> Option<PolyMap<S>>,
) -> Result<PolyMap<S>> {
    t.check_labels(f.labels())?;
    let fa = f.component(t.label() as usize);
    let children: Vec<PolyMap<S>> = t
        .children()
        .iter()
        .map(|c| match lookup(c) {
            Some(m) => Ok(m),
            None => build(f, c, lookup),
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&PolyMap<S>> = children.iter().collect();
    Ok(contract(fa, &refs))
}

/// `f(τ)` as a polynomial map: `f(•_a) = f_a`,
/// `f([τ_1⋯τ_k]_a) = d^k f_a(f(τ_1), …, f(τ_k))`.
pub fn elementary_map<S: Scalar>(f: &PolyVectorField<S>, t: &LabeledTree) -> Result<PolyMap<S>> {
    build(f, t, &|_| None)
}

pub fn elementary_differential<S: Scalar>(f: &PolyVectorField<S>, t: &LabeledTree, y: &[S]) -> Result<Vec<S>> {
    Ok(elementary_map(f, t)?.eval(y))
}

/// `f(τ)` for every tree of a basis, with compiled `f64` evaluators.
#[derive(Clone, Debug)]
pub struct ElementaryTable<S: Scalar> {
    basis: Arc<CkBasis>,
    maps: Vec<PolyMap<S>>,
    compiled: Vec<CompiledMap>,
}

impl<S: Scalar> ElementaryTable<S> {
    pub fn new(f: &PolyVectorField<S>, basis: Arc<CkBasis>) -> Result<Self> {
        if basis.labels() != f.labels() {
            return Err(Error::Dimension(format!(
                "field has {} components, trees carry {} labels",
                f.labels(),
                basis.labels()
            )));
        }
        let mut maps: Vec<PolyMap<S>> = Vec::with_capacity(basis.trees().len());
        for t in basis.trees() {
            let m = build(f, t, &|c| basis.tree_id(c).filter(|&k| k < maps.len()).map(|k| maps[k].clone()))?;
            maps.push(m);
        }
        let compiled = maps.iter().map(CompiledMap::new).collect();
        Ok(ElementaryTable { basis, maps, compiled })
    }

    pub fn basis(&self) -> &Arc<CkBasis> {
        &self.basis
    }

    /// `f(τ)` for a basis tree id.
    pub fn map(&self, tree: usize) -> &PolyMap<S> {
        &self.maps[tree]
    }

    pub fn compiled(&self, tree: usize) -> &CompiledMap {
        &self.compiled[tree]
    }
}

/// `F^w` for a word over letters with the given weights: `F^ε = I`,
/// `F^{k_1 k_2⋯k_m} = dF^{k_2⋯k_m}(V_{k_1})`. Fails when `‖w‖` exceeds `budget`.
pub fn build_f_w<S: Scalar>(
    vs: &[PolyMap<S>],
    weights: &[usize],
    w: &[usize],
    budget: usize,
) -> Result<PolyMap<S>> {
    let degree: usize = w.iter().map(|&k| weights[k]).sum();
    if degree > budget {
        return Err(Error::DegreeBudget { degree, budget });
    }
    let e = vs.first().map_or(0, |v| v.dim());
    let mut f = PolyMap::identity(e);
    for &k in w.iter().rev() {
        f = f.directional(&vs[k]);
    }
    Ok(f)
}
