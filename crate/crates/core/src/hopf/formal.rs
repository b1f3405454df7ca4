use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::forest::Forest;
use crate::scalar::Rational;

/// Finite linear combination with exact rational coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct FormalSum<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

pub type ForestSum = FormalSum<Forest>;
pub type TensorSum = FormalSum<(Forest, Forest)>;

impl<K: Ord + Clone> Default for FormalSum<K> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> FormalSum<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: K) -> Self {
        let mut s = Self::zero();
        s.add_term(key, Rational::one());
        s
    }

    pub fn add_term(&mut self, key: K, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, scale: &Rational) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * scale);
        }
    }

    pub fn coeff(&self, key: &K) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_assign_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &-Rational::one());
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        out
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    pub fn map_keys<J: Ord + Clone>(&self, f: impl Fn(&K) -> J) -> FormalSum<J> {
        let mut out = FormalSum::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }
}

impl ForestSum {
    /// Keeps only terms of degree `≤ n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut out = Self::zero();
        for (f, c) in self.iter() {
            if f.degree() <= n {
                out.add_term(f.clone(), c.clone());
            }
        }
        out
    }

    /// Removes the coefficient on the empty forest.
    pub fn augmentation_part(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Forest::unit());
        out
    }
}

impl TensorSum {
    /// `(a ⊗ b)(c ⊗ d) = ac ⊗ bd` with forest multiplication in each factor.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((p1, r1), c1) in self.iter() {
            for ((p2, r2), c2) in other.iter() {
                out.add_term((p1.mul(p2), r1.mul(r2)), c1 * c2);
            }
        }
        out
    }

    /// Exchanges the two tensor factors.
    pub fn swap(&self) -> Self {
        self.map_keys(|(a, b)| (b.clone(), a.clone()))
    }
}

impl fmt::Display for ForestSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "({c}){k}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ForestSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Wrapper giving tensor keys a readable form.
pub struct TensorKey<'a>(pub &'a (Forest, Forest));

impl fmt::Display for TensorKey<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.0 .0, self.0 .1)
    }
}

impl fmt::Display for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(k, c)| {
                if c.is_one() {
                    TensorKey(k).to_string()
                } else {
                    format!("({c}){}", TensorKey(k))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TensorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
