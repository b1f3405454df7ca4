//! Seeded randomness. Every instance draws from its own ChaCha stream keyed
//! by `(seed, index)`, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::lip::box_grid;
use crate::fields::{Poly, PolyMap, PolyVectorField};
use crate::path::PLPath;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

fn exponents(e: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..e {
        out = out
            .into_iter()
            .flat_map(|ex: Vec<u32>| {
                let used: u32 = ex.iter().sum();
                (0..=degree - used).map(move |k| {
                    let mut v = ex.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Dense random polynomial field with coefficients uniform in `[-1, 1]`,
/// rescaled so that `max_a sup_box |f_a| = sup` on the 9-point box grid.
pub fn random_field(
    rng: &mut impl Rng,
    e: usize,
    d: usize,
    degree: u32,
    domain: Vec<(f64, f64)>,
    sup: f64,
) -> PolyVectorField<f64> {
    let monos = exponents(e, degree);
    let components: Vec<PolyMap<f64>> = (0..d)
        .map(|_| {
            let coords = (0..e)
                .map(|_| {
                    let mut p = Poly::zero(e);
                    for ex in &monos {
                        p.add_term(ex.clone(), rng.gen_range(-1.0..1.0));
                    }
                    p
                })
                .collect();
            PolyMap { coords }
        })
        .collect();
    let f = PolyVectorField::new(components, domain).expect("valid shapes");
    normalize_sup(&f, sup)
}

/// Rescales `f` so that `max_a sup |f_a|` over the box grid equals `sup`.
pub fn normalize_sup(f: &PolyVectorField<f64>, sup: f64) -> PolyVectorField<f64> {
    let grid = box_grid(f.domain_box(), 9);
    let compiled = f.compiled();
    let m = grid
        .iter()
        .flat_map(|y| compiled.iter().map(move |c| c.eval(y).iter().map(|v| v * v).sum::<f64>().sqrt()))
        .fold(0.0, f64::max);
    if m == 0.0 {
        f.clone()
    } else {
        f.scaled(&(sup / m))
    }
}

/// Random-walk driver with increments uniform in `[-scale, scale]`.
pub fn random_driver(rng: &mut impl Rng, dim: usize, segments: usize, scale: f64) -> PLPath<f64> {
    let incs: Vec<Vec<f64>> =
        (0..segments).map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect()).collect();
    PLPath::from_increments(dim, &incs)
}

/// `x^a(t) = Σ_k c_{a,k} sin(2πkt + φ_{a,k})` on `[0, 1]`, sampled at
/// `2^level + 1` points and started at the origin.
pub fn smooth_driver(rng: &mut impl Rng, dim: usize, level: usize, amplitude: f64) -> PLPath<f64> {
    let modes: Vec<Vec<(f64, f64)>> = (0..dim)
        .map(|_| (1..=3).map(|k| (amplitude * rng.gen_range(-1.0..1.0) / k as f64, rng.gen_range(0.0..std::f64::consts::TAU))).collect())
        .collect();
    let m = 1usize << level;
    let eval = |t: f64| -> Vec<f64> {
        modes
            .iter()
            .map(|ms| {
                ms.iter()
                    .enumerate()
                    .map(|(k, (c, ph))| c * ((2.0 * std::f64::consts::PI * (k + 1) as f64 * t + ph).sin() - ph.sin()))
                    .sum()
            })
            .collect()
    };
    let times: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
    let values = times.iter().map(|&t| eval(t)).collect();
    PLPath::new(times, values).expect("increasing grid")
}
