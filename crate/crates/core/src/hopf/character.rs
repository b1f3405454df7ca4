use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::forest::LabeledTree;
use crate::hopf::ck::CkBasis;
use crate::scalar::Scalar;

/// Truncated character of the Connes–Kreimer algebra. Only tree values are
/// stored; forest values are products.
#[derive(Clone, Debug)]
pub struct Character<S: Scalar> {
    basis: Arc<CkBasis>,
    values: Vec<S>,
}

impl<S: Scalar> PartialEq for Character<S> {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis) && self.values == other.values
    }
}

fn same_basis(a: &Arc<CkBasis>, b: &Arc<CkBasis>) -> bool {
    Arc::ptr_eq(a, b) || (a.truncation() == b.truncation() && a.labels() == b.labels())
}

impl<S: Scalar> Character<S> {
    /// The counit `ε`.
    pub fn identity(basis: Arc<CkBasis>) -> Self {
        let values = vec![S::zero(); basis.trees().len()];
        Character { basis, values }
    }

    pub fn from_tree_values(basis: Arc<CkBasis>, values: Vec<S>) -> Result<Self> {
        if values.len() != basis.trees().len() {
            return Err(Error::Dimension(format!(
                "{} tree values for a basis of {} trees",
                values.len(),
                basis.trees().len()
            )));
        }
        Ok(Character { basis, values })
    }

    /// Builds a character from `(tree, value)` pairs; unspecified trees are 0.
    pub fn from_pairs(
        basis: Arc<CkBasis>,
        pairs: impl IntoIterator<Item = (LabeledTree, S)>,
    ) -> Result<Self> {
        let mut c = Self::identity(basis);
        for (t, v) in pairs {
            let i = c.basis.tree_id(&t).ok_or_else(|| {
                Error::TruncationMismatch(format!("tree {t} is not in the truncated basis"))
            })?;
            c.values[i] = v;
        }
        Ok(c)
    }

    pub fn basis(&self) -> &Arc<CkBasis> {
        &self.basis
    }

    pub fn truncation(&self) -> usize {
        self.basis.truncation()
    }

    pub fn tree_values(&self) -> &[S] {
        &self.values
    }

    pub fn tree_values_mut(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn value(&self, t: &LabeledTree) -> Option<&S> {
        self.basis.tree_id(t).map(|i| &self.values[i])
    }

    /// Value on basis forest `i` (multiplicative extension).
    pub fn forest_value(&self, i: usize) -> S {
        forest_value_from(&self.basis, &self.values, i)
    }

    /// Values on all basis forests, indexed like `CkBasis::forests`.
    pub fn forest_values(&self) -> Vec<S> {
        (0..self.basis.forests().len()).map(|i| self.forest_value(i)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::TruncationMismatch(format!(
                "(N, d) = ({}, {}) vs ({}, {})",
                self.basis.truncation(),
                self.basis.labels(),
                other.basis.truncation(),
                other.basis.labels()
            )));
        }
        Ok(())
    }

    /// `(ab, τ) = Σ (a, τ₍₁₎)(b, τ₍₂₎)`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let fa = self.forest_values();
        let fb = other.forest_values();
        let values = (0..self.values.len())
            .map(|i| {
                let mut acc = S::zero();
                for cut in self.basis.cuts(i) {
                    let term = fa[cut.pruned].clone() * fb[cut.root].clone();
                    acc += &(term * S::from_i64(cut.coeff));
                }
                acc
            })
            .collect();
        Ok(Character { basis: self.basis.clone(), values })
    }

    /// Group inverse, solved degree by degree from `a·a⁻¹ = ε`.
    pub fn inverse(&self) -> Self {
        let basis = &self.basis;
        let fa = self.forest_values();
        let mut inv = vec![S::zero(); self.values.len()];
        let whole = |i: usize| basis.tree_forest(i);
        for i in 0..self.values.len() {
            let mut acc = S::zero();
            for cut in basis.cuts(i) {
                if cut.root == whole(i) && cut.pruned == 0 {
                    continue; // the unknown 1⊗τ term
                }
                // every other root part has lower degree, hence is known
                let term = fa[cut.pruned].clone() * forest_value_from(basis, &inv, cut.root);
                acc += &(term * S::from_i64(cut.coeff));
            }
            inv[i] = -acc;
        }
        Character { basis: basis.clone(), values: inv }
    }

    /// `‖a‖ = max_τ |(a, τ)|^{1/|τ|}` over nonempty forests.
    pub fn norm(&self) -> f64 {
        let fv = self.forest_values();
        (1..fv.len())
            .map(|i| fv[i].to_f64().abs().powf(1.0 / self.basis.forest_degree(i) as f64))
            .fold(0.0, f64::max)
    }

    /// `(δ_λ a, τ) = λ^{|τ|}(a, τ)`, a group automorphism.
    pub fn dilate(&self, lambda: &S) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v.clone() * lambda.pow_u32(self.basis.tree_degree(i) as u32))
            .collect();
        Character { basis: self.basis.clone(), values }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Character<T> {
        Character { basis: self.basis.clone(), values: self.values.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Character<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn to_json(&self) -> Value {
        let values: Vec<Value> = self
            .basis
            .trees()
            .iter()
            .zip(&self.values)
            .map(|(t, v)| json!({"tree": t, "value": v.to_json()}))
            .collect();
        json!({"N": self.basis.truncation(), "d": self.basis.labels(), "values": values})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v["N"].as_u64().ok_or_else(|| Error::Parse("character: missing N".into()))?;
        let d = v["d"].as_u64().ok_or_else(|| Error::Parse("character: missing d".into()))?;
        let basis = CkBasis::shared(n as usize, d as usize)?;
        let entries = v["values"]
            .as_array()
            .ok_or_else(|| Error::Parse("character: missing values".into()))?;
        let mut pairs = Vec::with_capacity(entries.len());
        for e in entries {
            let t: LabeledTree = serde_json::from_value(e["tree"].clone())?;
            t.check_labels(d as usize)?;
            pairs.push((t, S::from_json(&e["value"])?));
        }
        Self::from_pairs(basis, pairs)
    }
}

pub(crate) fn forest_value_from<S: Scalar>(basis: &CkBasis, tree_values: &[S], i: usize) -> S {
    let mut acc = S::one();
    for &(t, m) in basis.forest_parts(i) {
        acc *= &tree_values[t].pow_u32(m);
    }
    acc
}
