use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::PolyVectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Lipschitz,
    OdeBounds,
    Convergence,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Lipschitz => "lipschitz",
            Experiment::OdeBounds => "ode_bounds",
            Experiment::Convergence => "convergence",
        }
    }
}

/// Settings shared by the experiment drivers. Unused fields are ignored by
/// experiments that do not need them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub gamma: f64,
    pub d: usize,
    pub e: usize,
    pub seed: u64,
    /// Driver segments per time block.
    pub segments: usize,
    /// Numbers of independent driver blocks for the horizon-doubling study.
    pub blocks: Vec<usize>,
    /// Perturbation sizes `h`.
    pub perturbations: Vec<f64>,
    pub xi1: Option<Vec<f64>>,
    pub xi2: Option<Vec<f64>>,
    /// Field JSON; random when absent.
    pub f1: Option<Value>,
    pub f2: Option<Value>,
    pub field_degree: u32,
    /// Half-width of the domain box `[-b, b]^e`.
    pub box_half_width: f64,
    pub instances: usize,
    /// `log2` of the number of driver segments in the convergence study.
    pub grid_level: usize,
    /// Dyadic levels for defect regression.
    pub levels: Vec<usize>,
    /// Dyadic levels of the partitions compared across backends.
    pub backend_levels: Vec<usize>,
    /// Values of `p` for the defect study.
    pub ps: Vec<f64>,
}

impl ExperimentConfig {
    pub fn default_for(kind: Experiment) -> Self {
        let base = ExperimentConfig {
            p: 2.5,
            gamma: 3.0,
            d: 2,
            e: 2,
            seed: 1,
            segments: 64,
            blocks: vec![1, 2, 4],
            perturbations: vec![1e-2, 1e-3, 1e-4, 1e-5],
            xi1: None,
            xi2: None,
            f1: None,
            f2: None,
            field_degree: 3,
            box_half_width: 4.0,
            instances: 100,
            grid_level: 10,
            levels: vec![4, 5, 6, 7, 8, 9, 10],
            backend_levels: vec![6, 7, 8, 9, 10, 11, 12],
            ps: vec![1.5, 2.5],
        };
        match kind {
            Experiment::Lipschitz => base,
            Experiment::OdeBounds => ExperimentConfig { box_half_width: 2.0, segments: 8, ..base },
            Experiment::Convergence => ExperimentConfig { field_degree: 2, ..base },
        }
    }

    /// Defaults for `kind` overridden by the keys present in `v`.
    pub fn from_json(kind: Experiment, v: &Value) -> Result<Self> {
        let mut merged = serde_json::to_value(Self::default_for(kind))?;
        let obj = v.as_object().ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        for (k, val) in obj {
            merged[k] = val.clone();
        }
        let c: ExperimentConfig =
            serde_json::from_value(merged).map_err(|e| Error::Config(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(kind: Experiment, path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(kind, &serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !(self.gamma > self.p) {
            return Err(Error::Config(format!("need γ > p ≥ 1, got γ = {}, p = {}", self.gamma, self.p)));
        }
        if let Some(q) = self.ps.iter().find(|&&q| !(q >= 1.0) || !(self.gamma > q)) {
            return Err(Error::Config(format!("need γ > p ≥ 1 for every p in ps, got {q}")));
        }
        if self.d == 0 || self.e == 0 {
            return Err(Error::Config("d and e must be at least 1".into()));
        }
        if !(self.box_half_width > 0.0) {
            return Err(Error::Config("box_half_width must be positive".into()));
        }
        for (name, xi) in [("xi1", &self.xi1), ("xi2", &self.xi2)] {
            if xi.as_ref().is_some_and(|v| v.len() != self.e) {
                return Err(Error::Config(format!("{name} must have length e = {}", self.e)));
            }
        }
        for (name, f) in [("f1", &self.f1), ("f2", &self.f2)] {
            if let Some(v) = f {
                let f = PolyVectorField::<f64>::from_json(v)?;
                if f.state_dim() != self.e || f.labels() != self.d {
                    return Err(Error::Config(format!("{name} must map ℝ^{} with {} components", self.e, self.d)));
                }
            }
        }
        Ok(())
    }

    pub fn domain_box(&self) -> Vec<(f64, f64)> {
        vec![(-self.box_half_width, self.box_half_width); self.e]
    }

    /// Canonical JSON used for hashing.
    pub fn canonical(&self) -> Value {
        json!(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_validation() {
        let c = ExperimentConfig::from_json(Experiment::Lipschitz, &json!({"seed": 9, "p": 2.2})).unwrap();
        assert_eq!((c.seed, c.p, c.gamma), (9, 2.2, 3.0));
        assert!(ExperimentConfig::from_json(Experiment::Lipschitz, &json!({"p": 3.5})).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Lipschitz, &json!({"bogus": 1})).is_err());
        assert!(ExperimentConfig::from_json(Experiment::Lipschitz, &json!({"xi1": [1.0]})).is_err());
    }
}
