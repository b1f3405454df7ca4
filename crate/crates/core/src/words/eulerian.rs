//! Eulerian idempotent of the Grossman–Larson algebra,
//! `π₁ = Σ_k (−1)^{k+1}/k · m^{(k−1)} Δ̃^{(k−1)}`.

use num_traits::Zero;

use crate::forest::{Forest, LabeledTree};
use crate::hopf::formal::ForestSum;
use crate::hopf::gl::gl_product_sums;
use crate::scalar::Rational;

/// Projection of `x` onto GL-primitives, truncated at degree `n`. The
/// constant term is discarded.
pub fn eulerian_idempotent(x: &ForestSum, n: usize) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in x.iter() {
        if f.is_unit() || f.degree() > n {
            continue;
        }
        out.add_assign_scaled(&eulerian_forest(f, n), c);
    }
    out
}

fn eulerian_forest(f: &Forest, n: usize) -> ForestSum {
    let trees: Vec<&LabeledTree> = f.trees().collect();
    let r = trees.len();
    let mut out = ForestSum::zero();
    for k in 1..=r {
        let coeff = Rational::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, (k as i64).into());
        let mut assign = vec![0usize; r];
        loop {
            let mut used = vec![false; k];
            for &a in &assign {
                used[a] = true;
            }
            if used.iter().all(|&u| u) {
                // ordered blocks, multiplied left to right
                let mut prod = ForestSum::single(Forest::unit());
                for b in 0..k {
                    let block = Forest::from_trees(
                        (0..r).filter(|&i| assign[i] == b).map(|i| trees[i].clone()),
                    );
                    prod = gl_product_sums(&prod, &ForestSum::single(block), n);
                }
                out.add_assign_scaled(&prod, &coeff);
            }
            // odometer over maps positions → blocks
            let mut i = 0;
            while i < r {
                assign[i] += 1;
                if assign[i] < k {
                    break;
                }
                assign[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
    }
    debug_assert!(out.iter().all(|(_, c)| !c.is_zero()));
    out
}
