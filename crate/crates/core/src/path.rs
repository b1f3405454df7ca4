//! Piecewise-linear paths with scalar-generic breakpoints.
//!
//! 1-variation on `ℝ^K` uses the ℓ¹ norm of increments, i.e. the sum of the
//! per-component 1-variations.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct PLPath<S: Scalar> {
    times: Vec<S>,
    values: Vec<Vec<S>>,
}

impl<S: Scalar> PLPath<S> {
    pub fn new(times: Vec<S>, values: Vec<Vec<S>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} times for {} points",
                times.len(),
                values.len()
            )));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::Dimension("points of unequal dimension".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("path times must be strictly increasing".into()));
        }
        Ok(PLPath { times, values })
    }

    /// The constant path at the origin.
    pub fn constant(dim: usize) -> Self {
        PLPath { times: vec![S::zero()], values: vec![vec![S::zero(); dim]] }
    }

    /// Starts at the origin at time 0; segment `k` spans `[k, k+1]`.
    pub fn from_increments(dim: usize, increments: &[Vec<S>]) -> Self {
        let mut p = Self::constant(dim);
        for inc in increments {
            p.push_increment(inc);
        }
        p
    }

    pub fn push_increment(&mut self, inc: &[S]) {
        assert_eq!(inc.len(), self.dim());
        let t = self.end_time() + S::one();
        let v: Vec<S> = self.end().iter().zip(inc).map(|(a, b)| a.clone() + b.clone()).collect();
        self.times.push(t);
        self.values.push(v);
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn num_segments(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[S] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<S>] {
        &self.values
    }

    pub fn start(&self) -> &[S] {
        &self.values[0]
    }

    pub fn end(&self) -> &[S] {
        self.values.last().unwrap()
    }

    pub fn start_time(&self) -> S {
        self.times[0].clone()
    }

    pub fn end_time(&self) -> S {
        self.times.last().unwrap().clone()
    }

    pub fn segment_increments(&self) -> Vec<Vec<S>> {
        self.values
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a.clone() - b.clone()).collect())
            .collect()
    }

    /// `x` followed by `y`, with `y` translated in time and space to start
    /// where `x` ends.
    pub fn concat(&self, y: &Self) -> Self {
        assert_eq!(self.dim(), y.dim());
        let mut out = self.clone();
        let dt = self.end_time() - y.start_time();
        for (t, v) in y.times.iter().zip(&y.values).skip(1) {
            out.times.push(t.clone() + dt.clone());
            out.values.push(
                v.iter()
                    .zip(y.start())
                    .zip(self.end())
                    .map(|((a, s), e)| a.clone() - s.clone() + e.clone())
                    .collect(),
            );
        }
        out
    }

    /// `t ↦ x(t₀ + t₁ − t)` on the same time interval.
    pub fn time_reverse(&self) -> Self {
        let (t0, t1) = (self.start_time(), self.end_time());
        PLPath {
            times: self.times.iter().rev().map(|t| t0.clone() + t1.clone() - t.clone()).collect(),
            values: self.values.iter().rev().cloned().collect(),
        }
    }

    /// `Σ |increments|` of component `j`.
    pub fn one_variation(&self, j: usize) -> S {
        let mut acc = S::zero();
        for w in self.values.windows(2) {
            acc += &(w[1][j].clone() - w[0][j].clone()).abs();
        }
        acc
    }

    pub fn total_one_variation(&self) -> S {
        let mut acc = S::zero();
        for j in 0..self.dim() {
            acc += &self.one_variation(j);
        }
        acc
    }

    /// Linear interpolation; constant extrapolation outside the time range.
    pub fn value_at(&self, t: &S) -> Vec<S> {
        if *t <= self.times[0] {
            return self.values[0].clone();
        }
        let k = self.times.partition_point(|s| s <= t);
        if k >= self.times.len() {
            return self.end().to_vec();
        }
        let (a, b) = (&self.times[k - 1], &self.times[k]);
        let theta = (t.clone() - a.clone()) / (b.clone() - a.clone());
        self.values[k - 1]
            .iter()
            .zip(&self.values[k])
            .map(|(u, v)| u.clone() + (v.clone() - u.clone()) * theta.clone())
            .collect()
    }

    /// Sorted union of both time grids.
    pub fn merged_grid(&self, y: &Self) -> Vec<S> {
        let mut grid: Vec<S> = self.times.iter().chain(&y.times).cloned().collect();
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        grid
    }

    /// The path evaluated at `grid` (interpolating, constant outside its range).
    pub fn resample(&self, grid: &[S]) -> Result<Self> {
        Self::new(grid.to_vec(), grid.iter().map(|t| self.value_at(t)).collect())
    }

    /// `x − y` on the merged grid.
    pub fn difference(&self, y: &Self) -> Self {
        assert_eq!(self.dim(), y.dim());
        let grid = self.merged_grid(y);
        let diff: Vec<Vec<S>> = grid
            .iter()
            .map(|t| {
                self.value_at(t).into_iter().zip(y.value_at(t)).map(|(a, b)| a - b).collect()
            })
            .collect();
        PLPath { times: grid, values: diff }
    }

    /// `‖x − y‖_{1-var}` with both paths evaluated on the union of their grids.
    pub fn difference_one_variation(&self, y: &Self) -> S {
        self.difference(y).total_one_variation()
    }

    /// Multiplies component `j` by `factors[j]` (about the origin).
    pub fn scale_components(&self, factors: &[S]) -> Self {
        assert_eq!(factors.len(), self.dim());
        PLPath {
            times: self.times.clone(),
            values: self
                .values
                .iter()
                .map(|v| v.iter().zip(factors).map(|(a, f)| a.clone() * f.clone()).collect())
                .collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PLPath<T> {
        PLPath {
            times: self.times.iter().map(&f).collect(),
            values: self.values.iter().map(|v| v.iter().map(&f).collect()).collect(),
        }
    }

    pub fn to_f64(&self) -> PLPath<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "times": self.times.iter().map(|t| t.to_json()).collect::<Vec<_>>(),
            "values": self.values.iter()
                .map(|v| v.iter().map(|x| x.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = |key: &str| {
            v[key].as_array().ok_or_else(|| Error::Parse(format!("path: missing {key}")))
        };
        let times = arr("times")?.iter().map(S::from_json).collect::<Result<Vec<_>>>()?;
        let values = arr("values")?
            .iter()
            .map(|p| {
                p.as_array()
                    .ok_or_else(|| Error::Parse("path: point is not an array".into()))?
                    .iter()
                    .map(S::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, values)
    }
}
