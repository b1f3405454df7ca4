use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::poly::{CompiledMap, Poly, PolyMap};
use crate::scalar::Scalar;

/// `d` polynomial vector fields `f_1, …, f_d` on `ℝ^e`, i.e. `f: ℝ^e → L(ℝ^d, ℝ^e)`,
/// together with the box used for norm estimation and trajectory checks.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField<S: Scalar> {
    e: usize,
    components: Vec<PolyMap<S>>,
    domain_box: Vec<(f64, f64)>,
}

impl<S: Scalar> PolyVectorField<S> {
    pub fn new(components: Vec<PolyMap<S>>, domain_box: Vec<(f64, f64)>) -> Result<Self> {
        let e = domain_box.len();
        if e == 0 {
            return Err(Error::EmptyBox);
        }
        for c in &components {
            if c.dim() != e || c.coords.iter().any(|p| p.nvars() != e) {
                return Err(Error::Dimension(format!("field component is not a map ℝ^{e} → ℝ^{e}")));
            }
        }
        if components.is_empty() {
            return Err(Error::Dimension("no field components".into()));
        }
        if domain_box.iter().any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::EmptyBox);
        }
        Ok(PolyVectorField { e, components, domain_box })
    }

    pub fn zero(e: usize, d: usize, domain_box: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(vec![PolyMap::zero(e); d], domain_box)
    }

    pub fn state_dim(&self) -> usize {
        self.e
    }

    pub fn labels(&self) -> usize {
        self.components.len()
    }

    /// `f_a` for a 1-based label `a`.
    pub fn component(&self, a: usize) -> &PolyMap<S> {
        &self.components[a - 1]
    }

    pub fn components(&self) -> &[PolyMap<S>] {
        &self.components
    }

    pub fn domain_box(&self) -> &[(f64, f64)] {
        &self.domain_box
    }

    pub fn with_box(&self, domain_box: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(self.components.clone(), domain_box)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.iter().zip(&self.domain_box).all(|(v, &(lo, hi))| lo <= *v && *v <= hi)
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    fn zip(&self, other: &Self, op: impl Fn(&PolyMap<S>, &PolyMap<S>) -> PolyMap<S>) -> Result<Self> {
        if self.e != other.e || self.labels() != other.labels() {
            return Err(Error::Dimension("fields of different shapes".into()));
        }
        let components = self.components.iter().zip(&other.components).map(|(a, b)| op(a, b)).collect();
        Ok(PolyVectorField { e: self.e, components, domain_box: self.domain_box.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    /// `self − other` on `self`'s box.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn scaled(&self, s: &S) -> Self {
        PolyVectorField {
            e: self.e,
            components: self.components.iter().map(|c| c.scaled(s)).collect(),
            domain_box: self.domain_box.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyVectorField<T> {
        PolyVectorField {
            e: self.e,
            components: self.components.iter().map(|c| c.map(&f)).collect(),
            domain_box: self.domain_box.clone(),
        }
    }

    pub fn to_f64(&self) -> PolyVectorField<f64> {
        self.map(|c| c.to_f64())
    }

    pub fn compiled(&self) -> Vec<CompiledMap> {
        self.components.iter().map(CompiledMap::new).collect()
    }

    pub fn to_json(&self) -> Value {
        let comps: Vec<Value> = self
            .components
            .iter()
            .map(|c| {
                // group terms by monomial, one coefficient vector per monomial
                let mut by_mono: std::collections::BTreeMap<Vec<u32>, Vec<Value>> = Default::default();
                for (i, p) in c.coords.iter().enumerate() {
                    for (ex, coef) in p.terms() {
                        by_mono.entry(ex.clone()).or_insert_with(|| vec![Value::from(0); self.e])[i] =
                            coef.to_json();
                    }
                }
                let monos: Vec<Value> = by_mono
                    .into_iter()
                    .map(|(ex, coeff)| json!({"exponents": ex, "coeff": coeff}))
                    .collect();
                json!({"monomials": monos})
            })
            .collect();
        let bx: Vec<Value> = self.domain_box.iter().map(|&(lo, hi)| json!([lo, hi])).collect();
        json!({"e": self.e, "d": self.labels(), "components": comps, "box": bx})
    }

    /// Parses the field JSON. `coeff` is a vector of length `e`, or a bare
    /// scalar when `e = 1`. A missing `box` defaults to `[-1, 1]^e`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("field: {m}"));
        let e = v["e"].as_u64().ok_or_else(|| bad("missing e"))? as usize;
        let d = v["d"].as_u64().ok_or_else(|| bad("missing d"))? as usize;
        let comps = v["components"].as_array().ok_or_else(|| bad("missing components"))?;
        if comps.len() != d {
            return Err(bad(&format!("{} components for d = {d}", comps.len())));
        }
        let mut components = Vec::with_capacity(d);
        for c in comps {
            let mut coords = vec![Poly::zero(e); e];
            let monos = c["monomials"].as_array().ok_or_else(|| bad("missing monomials"))?;
            for m in monos {
                let ex: Vec<u32> = m["exponents"]
                    .as_array()
                    .ok_or_else(|| bad("missing exponents"))?
                    .iter()
                    .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| bad("bad exponent")))
                    .collect::<Result<_>>()?;
                if ex.len() != e {
                    return Err(bad("exponent vector has wrong length"));
                }
                let coeff: Vec<S> = match &m["coeff"] {
                    Value::Array(a) => a.iter().map(S::from_json).collect::<Result<_>>()?,
                    other if e == 1 => vec![S::from_json(other)?],
                    _ => return Err(bad("coeff must be a vector of length e")),
                };
                if coeff.len() != e {
                    return Err(bad("coeff vector has wrong length"));
                }
                for (p, c) in coords.iter_mut().zip(coeff) {
                    p.add_term(ex.clone(), c);
                }
            }
            components.push(PolyMap { coords });
        }
        let domain_box = match v.get("box") {
            None | Some(Value::Null) => vec![(-1.0, 1.0); e],
            Some(b) => b
                .as_array()
                .ok_or_else(|| bad("box must be a list"))?
                .iter()
                .map(|iv| {
                    let lo = iv[0].as_f64().ok_or_else(|| bad("bad box bound"))?;
                    let hi = iv[1].as_f64().ok_or_else(|| bad("bad box bound"))?;
                    Ok((lo, hi))
                })
                .collect::<Result<_>>()?,
        };
        if domain_box.len() != e {
            return Err(bad("box dimension differs from e"));
        }
        Self::new(components, domain_box)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn json_round_trip() {
        let src = json!({
            "e": 2, "d": 1,
            "components": [{"monomials": [
                {"exponents": [1, 0], "coeff": ["1/2", 0]},
                {"exponents": [0, 2], "coeff": [0, -3]}
            ]}],
            "box": [[-2.0, 2.0], [-1.0, 1.0]]
        });
        let f = PolyVectorField::<Rational>::from_json(&src).unwrap();
        let y = [Rational::from_i64(2), Rational::from_i64(1)];
        assert_eq!(f.component(1).eval(&y), vec![Rational::from_i64(1), Rational::from_i64(-3)]);
        let back = PolyVectorField::<Rational>::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn scalar_coefficients_in_one_dimension() {
        let src = json!({"e": 1, "d": 1, "components": [{"monomials": [{"exponents": [2], "coeff": 1}]}]});
        let f = PolyVectorField::<f64>::from_json(&src).unwrap();
        assert_eq!(f.domain_box(), &[(-1.0, 1.0)]);
        assert_eq!(f.component(1).eval(&[3.0]), vec![9.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        let src = json!({"e": 2, "d": 1, "components": [{"monomials": [{"exponents": [1], "coeff": [1, 0]}]}]});
        assert!(PolyVectorField::<f64>::from_json(&src).is_err());
        assert!(matches!(PolyVectorField::<f64>::new(vec![], vec![]), Err(Error::EmptyBox)));
    }
}
