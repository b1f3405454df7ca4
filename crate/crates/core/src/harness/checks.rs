//! Exhaustive and randomized verification suites. Forests and words are
//! visited in canonical order, so the first failure reported by a check is a
//! minimal counterexample.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::{Forest, Label, LabeledTree};
use crate::harness::rng::stream;
use crate::hopf::ck::{ck_coproduct_by_cuts, ck_coproduct_tree, CkBasis};
use crate::hopf::formal::{FormalSum, ForestSum, TensorSum};
use crate::hopf::gl::{gl_coproduct, gl_product, gl_product_sums, GroupLikeGL};
use crate::hopf::Character;
use crate::linalg::rank;
use crate::path::PLPath;
use crate::rde::rough_path::lift_bv;
use crate::realize::{realize, realize_pair};
use crate::scalar::{Rational, Scalar};
use crate::words::{Phi, WordBasis, WordSeries};

pub const MAX_ALGEBRA_DEGREE: usize = 4;
pub const MAX_ALGEBRA_LABELS: usize = 3;
/// Largest `[p]` with a word-group isomorphism.
pub const MAX_PHI_DEGREE: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Number of identities or instances examined.
    pub checked: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({:.2} s)", self.suite, self.seconds)?;
        for c in &self.checks {
            match &c.counterexample {
                None => writeln!(f, "  {} {} [{} checked]", if c.pass { "PASS" } else { "FAIL" }, c.name, c.checked)?,
                Some(ce) => writeln!(f, "  FAIL {} [{} checked]: {ce}", c.name, c.checked)?,
            }
        }
        Ok(())
    }
}

/// Runs `body` over `items` and stops at the first counterexample.
fn check<T>(name: &str, items: impl IntoIterator<Item = T>, mut body: impl FnMut(T) -> Option<String>) -> CheckResult {
    let mut checked = 0;
    for it in items {
        checked += 1;
        if let Some(ce) = body(it) {
            return CheckResult { name: name.into(), pass: false, checked, counterexample: Some(ce) };
        }
    }
    CheckResult { name: name.into(), pass: true, checked, counterexample: None }
}

fn int(c: i64) -> Rational {
    Rational::from_integer(c.into())
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

fn random_character(b: &Arc<CkBasis>, rng: &mut impl Rng) -> Character<Rational> {
    let v = (0..b.trees().len()).map(|_| random_rational(rng)).collect();
    Character::from_tree_values(b.clone(), v).expect("sizes agree")
}

/// Coproduct as stored in the basis cut tables, extended multiplicatively.
struct TableCoproduct {
    basis: Arc<CkBasis>,
    trees: Vec<TensorSum>,
}

impl TableCoproduct {
    fn new(basis: Arc<CkBasis>) -> Self {
        let trees = (0..basis.trees().len())
            .map(|i| {
                let mut s = TensorSum::zero();
                for c in basis.cuts(i) {
                    s.add_term((basis.forests()[c.pruned].clone(), basis.forests()[c.root].clone()), int(c.coeff));
                }
                s
            })
            .collect();
        TableCoproduct { basis, trees }
    }

    fn forest(&self, f: &Forest) -> TensorSum {
        let mut acc = TensorSum::single((Forest::unit(), Forest::unit()));
        for t in f.trees() {
            acc = acc.mul(&self.trees[self.basis.tree_id(t).expect("basis tree")]);
        }
        acc
    }
}

type Triple = FormalSum<(Forest, Forest, Forest)>;

fn coassociativity_defect(f: &Forest, delta: &dyn Fn(&Forest) -> TensorSum) -> Option<String> {
    let d = delta(f);
    let (mut left, mut right) = (Triple::zero(), Triple::zero());
    for ((a, b), c) in d.iter() {
        for ((a1, a2), c1) in delta(a).iter() {
            left.add_term((a1.clone(), a2.clone(), b.clone()), c * c1);
        }
        for ((b1, b2), c2) in delta(b).iter() {
            right.add_term((a.clone(), b1.clone(), b2.clone()), c * c2);
        }
    }
    (left != right).then(|| format!("(Δ⊗id)Δ ≠ (id⊗Δ)Δ on {f}, Δ = {d}"))
}

fn forest_sum_mul(a: &ForestSum, b: &ForestSum) -> ForestSum {
    let mut out = ForestSum::zero();
    for (f, c) in a.iter() {
        for (g, e) in b.iter() {
            out.add_term(f.mul(g), c * e);
        }
    }
    out
}

/// Antipode on basis trees from `m(S⊗id)Δ = ε`, using the table coproduct.
fn antipodes(cop: &TableCoproduct) -> Vec<ForestSum> {
    let b = &cop.basis;
    let mut s: Vec<ForestSum> = Vec::with_capacity(b.trees().len());
    for i in 0..b.trees().len() {
        let whole = b.tree_forest(i);
        let mut acc = ForestSum::zero();
        for c in b.cuts(i) {
            if c.pruned == whole && c.root == 0 {
                continue;
            }
            let sp = antipode_forest(b, &s, &b.forests()[c.pruned]);
            let r = ForestSum::single(b.forests()[c.root].clone());
            acc.add_assign_scaled(&forest_sum_mul(&sp, &r), &int(-c.coeff));
        }
        s.push(acc);
    }
    s
}

fn antipode_forest(b: &CkBasis, trees: &[ForestSum], f: &Forest) -> ForestSum {
    let mut acc = ForestSum::single(Forest::unit());
    for t in f.trees() {
        acc = forest_sum_mul(&acc, &trees[b.tree_id(t).expect("lower-degree tree already solved")]);
    }
    acc
}

fn evaluate(a: &Character<Rational>, s: &ForestSum) -> Rational {
    let b = a.basis();
    let mut acc = Rational::zero();
    for (f, c) in s.iter() {
        acc += c * a.forest_value(b.forest_id(f).expect("basis forest"));
    }
    acc
}

/// Number of label- and parent-preserving permutations of the vertices.
fn automorphisms(f: &Forest) -> u64 {
    let mut labels: Vec<Label> = Vec::new();
    let mut parent: Vec<Option<usize>> = Vec::new();
    for t in f.trees() {
        let off = labels.len();
        for (l, p) in t.vertices() {
            labels.push(l);
            parent.push(p.map(|q| q + off));
        }
    }
    fn extend(v: usize, img: &mut Vec<usize>, used: &mut [bool], labels: &[Label], parent: &[Option<usize>]) -> u64 {
        if v == labels.len() {
            return 1;
        }
        let mut count = 0;
        for w in 0..labels.len() {
            // parents precede children, so parent(v) is already mapped
            if used[w] || labels[w] != labels[v] || parent[w] != parent[v].map(|p| img[p]) {
                continue;
            }
            used[w] = true;
            img.push(w);
            count += extend(v + 1, img, used, labels, parent);
            img.pop();
            used[w] = false;
        }
        count
    }
    extend(0, &mut Vec::new(), &mut vec![false; labels.len()], &labels, &parent)
}

/// A coproduct that agrees with the admissible-cut one except that the
/// nontrivial cut terms of `target` have their sign flipped.
pub fn sign_flip(target: LabeledTree) -> impl Fn(&LabeledTree) -> TensorSum + Send + Sync {
    move |t: &LabeledTree| {
        let d = ck_coproduct_tree(t);
        if *t != target {
            return d;
        }
        let mut out = TensorSum::zero();
        for ((pruned, root), c) in d.iter() {
            let trivial = pruned.is_unit() || root.is_unit();
            out.add_term((pruned.clone(), root.clone()), if trivial { c.clone() } else { -c.clone() });
        }
        out
    }
}

/// Exact Hopf-algebra suite over all forests of degree `≤ n` on `d` labels,
/// followed by word-group checks when `n ≤ 3`.
pub fn check_algebra(n: usize, d: usize, seed: u64) -> Result<SuiteReport> {
    if n == 0 || n > MAX_ALGEBRA_DEGREE || d == 0 || d > MAX_ALGEBRA_LABELS {
        return Err(Error::Config(format!(
            "check-algebra supports 1 ≤ N ≤ {MAX_ALGEBRA_DEGREE} and 1 ≤ d ≤ {MAX_ALGEBRA_LABELS}, got N = {n}, d = {d}"
        )));
    }
    let mut r = check_algebra_with(CkBasis::shared(n, d)?, seed);
    if n <= MAX_PHI_DEGREE {
        let t = Instant::now();
        let phi = check_phi(n, d, seed)?;
        r.checks.extend(phi.checks);
        r.seconds += t.elapsed().as_secs_f64();
    }
    Ok(r)
}

/// Hopf-algebra checks against an arbitrary basis, so that deliberately
/// corrupted cut tables can be exercised.
pub fn check_algebra_with(basis: Arc<CkBasis>, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let (n, d) = (basis.truncation(), basis.labels());
    let cop = TableCoproduct::new(basis.clone());
    let forests: Vec<Forest> = basis.forests().to_vec();
    let mut checks = Vec::new();

    checks.push(check("ck_coproduct_matches_cut_enumeration", basis.trees(), |t| {
        let got = &cop.trees[basis.tree_id(t).unwrap()];
        let want = ck_coproduct_by_cuts(t);
        (*got != want).then(|| format!("Δ({t}) = {got}, admissible cuts give {want}"))
    }));

    checks.push(check("ck_coassociativity", &forests, |f| coassociativity_defect(f, &|g| cop.forest(g))));
    checks.push(check("gl_coassociativity", &forests, |f| coassociativity_defect(f, &gl_coproduct)));

    let mut triples = Vec::new();
    for (i, f) in forests.iter().enumerate().skip(1) {
        for (j, g) in forests.iter().enumerate().skip(1) {
            for (k, h) in forests.iter().enumerate().skip(1) {
                if f.degree() + g.degree() + h.degree() <= n {
                    triples.push((i, j, k));
                }
            }
        }
    }
    checks.push(check("gl_associativity", triples, |(i, j, k)| {
        let (f, g, h) = (&forests[i], &forests[j], &forests[k]);
        let left = gl_product_sums(&gl_product(f, g), &ForestSum::single(h.clone()), n);
        let right = gl_product_sums(&ForestSum::single(f.clone()), &gl_product(g, h), n);
        (left != right).then(|| format!("({f}⋆{g})⋆{h} = {left} but {f}⋆({g}⋆{h}) = {right}"))
    }));

    checks.push(check("gl_dual_to_ck", &forests, |h| {
        let sh = int(h.symmetry_factor() as i64);
        for ((a, b), c) in cop.forest(h).iter() {
            let lhs = gl_product(a, b).coeff(h) * &sh;
            let rhs = c * int((a.symmetry_factor() * b.symmetry_factor()) as i64);
            if lhs != rhs {
                return Some(format!("⟨{a}⋆{b}, {h}⟩ = {lhs} but ⟨{a}⊗{b}, Δ{h}⟩ = {rhs}"));
            }
        }
        None
    }));

    checks.push(check("sigma_multiplicativity", forests.iter().enumerate(), |(i, f)| {
        let brute = automorphisms(f);
        let formula = f.symmetry_factor();
        (brute != formula || basis.forest_sigma(i) != brute)
            .then(|| format!("σ({f}): {brute} automorphisms, product formula {formula}"))
    }));

    let samples: Vec<(Character<Rational>, Character<Rational>)> = (0..3)
        .map(|k| {
            let mut rng = stream(seed, k);
            (random_character(&basis, &mut rng), random_character(&basis, &mut rng))
        })
        .collect();

    checks.push(check("character_closure", samples.iter().flat_map(|s| forests.iter().map(move |f| (s, f))), |((a, b), f)| {
        let ab = a.product(b).expect("same basis");
        let want: Rational = cop
            .forest(f)
            .iter()
            .map(|((p, r), c)| c * a.forest_value(basis.forest_id(p).unwrap()) * b.forest_value(basis.forest_id(r).unwrap()))
            .fold(Rational::zero(), |x, y| x + y);
        let got = ab.forest_value(basis.forest_id(f).unwrap());
        (got != want).then(|| format!("(ab, {f}) = {got} but Σ(a,τ₍₁₎)(b,τ₍₂₎) = {want}"))
    }));

    let s = antipodes(&cop);
    checks.push(check("antipode_two_sided", basis.trees().iter().enumerate(), |(i, t)| {
        // m(id⊗S)Δτ = 0 is not used to build S
        let mut acc = ForestSum::zero();
        for ((p, r), c) in cop.trees[i].iter() {
            acc.add_assign_scaled(&forest_sum_mul(&ForestSum::single(p.clone()), &antipode_forest(&basis, &s, r)), c);
        }
        (!acc.is_empty()).then(|| format!("m(id⊗S)Δ({t}) = {acc}"))
    }));

    checks.push(check("antipode_inverse", samples.iter().flat_map(|s| forests.iter().map(move |f| (&s.0, f))), |(a, f)| {
        let inv = a.inverse();
        let got = inv.forest_value(basis.forest_id(f).unwrap());
        let want = evaluate(a, &antipode_forest(&basis, &s, f));
        if got != want {
            return Some(format!("(a⁻¹, {f}) = {got} but (a, S{f}) = {want}"));
        }
        let unit = |x: &Character<Rational>| x.tree_values().iter().all(|v| v.is_zero());
        let (l, r) = (inv.product(a).unwrap(), a.product(&inv).unwrap());
        (!unit(&l) || !unit(&r)).then(|| "a⁻¹a or aa⁻¹ is not the counit".to_string())
    }));

    checks.push(check("rescale_is_a_morphism", &samples, |(a, b)| {
        let lhs = GroupLikeGL::rescale(&a.product(b).unwrap());
        let rhs = GroupLikeGL::rescale(a).product(&GroupLikeGL::rescale(b)).unwrap();
        let bad = lhs.values().iter().zip(rhs.values()).position(|(x, y)| x != y);
        bad.map(|k| format!("rescale(ab) and rescale(a)⋆rescale(b) differ on {}", forests[k]))
    }));

    SuiteReport { suite: format!("algebra N = {n}, d = {d}"), checks, seconds: start.elapsed().as_secs_f64() }
}

/// `p` with `[p] = n`.
pub fn p_for_degree(n: usize) -> f64 {
    n as f64 + 0.5
}

/// Word-group isomorphism checks for `([p], d) = (n, d)`.
pub fn check_phi(n: usize, d: usize, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let phi = Phi::shared(p_for_degree(n), d)?;
    let wb = phi.alphabet().word_basis().clone();
    let mut checks = Vec::new();
    checks.push(check("phi_blocks_square_invertible", 1..=n, |m| {
        let mat = phi.degree_matrix(m);
        if mat.iter().any(|row| row.len() != mat.len()) {
            return Some(format!("degree {m} block is not square"));
        }
        let r = rank(mat);
        (r != mat.len()).then(|| format!("degree {m} block has rank {r} < {}", mat.len()))
    }));
    checks.push(check("phi_bialgebra_morphism", [()], |_| phi.check_bialgebra().err()));
    checks.push(check("phi_of_signature_group_like", 0..10u64, |k| {
        let mut rng = stream(seed, 1000 + k);
        let x = crate::harness::rng::random_driver(&mut rng, wb.letters(), 4, 0.7);
        let g = phi.phi(&WordSeries::signature(wb.clone(), &x));
        let r = g.group_like_residual();
        (r > 1e-10).then(|| format!("residual {r:e} for driver {}", x.to_json()))
    }));
    Ok(SuiteReport { suite: format!("word group [p] = {n}, d = {d}"), checks, seconds: start.elapsed().as_secs_f64() })
}

fn random_rational_path(rng: &mut impl Rng, d: usize, segments: usize) -> PLPath<Rational> {
    let incs: Vec<Vec<Rational>> = (0..segments).map(|_| (0..d).map(|_| random_rational(rng)).collect()).collect();
    PLPath::from_increments(d, &incs)
}

/// Restriction of `x` to `[a, b]`, keeping the breakpoints in between.
fn subpath(x: &PLPath<Rational>, a: &Rational, b: &Rational) -> PLPath<Rational> {
    let mut grid = vec![a.clone()];
    grid.extend(x.times().iter().filter(|t| *t > a && *t < b).cloned());
    grid.push(b.clone());
    x.resample(&grid).expect("increasing grid")
}

/// `Σ_{k<l} Δ^i_k Δ^j_l + ½ Σ_k Δ^i_k Δ^j_k`.
fn second_level(x: &PLPath<Rational>, i: usize, j: usize) -> Rational {
    let incs = x.segment_increments();
    let mut acc = Rational::zero();
    let mut run = Rational::zero();
    for inc in &incs {
        acc += &run * &inc[j] + &inc[i] * &inc[j] / int(2);
        run += &inc[i];
    }
    acc
}

/// Chen's identity for signatures and branched lifts, exactly in rationals.
pub fn check_chen(count: u64, seed: u64) -> SuiteReport {
    let start = Instant::now();
    let cases: Vec<(usize, PLPath<Rational>, [Rational; 3])> = (0..count)
        .map(|k| {
            let mut rng = stream(seed, k);
            let n = 1 + (k % 3) as usize;
            let d = rng.gen_range(1..=3);
            let m = rng.gen_range(2..=5);
            let x = random_rational_path(&mut rng, d, m);
            let mut cut = |lo: i64, hi: i64| Rational::from_ratio(rng.gen_range(lo..hi), 7);
            let s = cut(0, 7 * m as i64 / 3);
            let t = cut(7 * m as i64 / 3 + 1, 14 * m as i64 / 3);
            let u = cut(14 * m as i64 / 3 + 1, 7 * m as i64 + 1);
            (n, x, [s, t, u])
        })
        .collect();
    let mut checks = Vec::new();
    checks.push(check("signature_chen", &cases, |(n, x, [s, t, u])| {
        let wb = WordBasis::shared(&vec![1; x.dim()], *n).unwrap();
        let sig = |a, b| WordSeries::signature(wb.clone(), &subpath(x, a, b));
        let whole = sig(s, u);
        let split = sig(s, t).mul(&sig(t, u));
        (whole.coeffs() != split.coeffs()).then(|| format!("S(x)_{{{s},{u}}} ≠ S_{{{s},{t}}}⊗S_{{{t},{u}}} for {}", x.to_json()))
    }));
    checks.push(check("signature_second_level", cases.iter().filter(|c| c.0 >= 2), |(n, x, _)| {
        let wb = WordBasis::shared(&vec![1; x.dim()], *n).unwrap();
        let sig = WordSeries::signature(wb, x);
        for i in 0..x.dim() {
            for j in 0..x.dim() {
                if sig.coeff(&[i, j]) != second_level(x, i, j) {
                    return Some(format!("level-2 word ({i}{j}) of {}", x.to_json()));
                }
            }
        }
        None
    }));
    checks.push(check("branched_lift_chen", &cases, |(n, x, _)| {
        let lift = lift_bv(x, p_for_degree(*n)).ok()?;
        lift.chen_violation(0.0).map(|(i, j, k)| format!("X_{{{i}{k}}} ≠ X_{{{i}{j}}}X_{{{j}{k}}} for {}", x.to_json()))
    }));
    SuiteReport { suite: "Chen identity".into(), checks, seconds: start.elapsed().as_secs_f64() }
}

pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const PAIR_RATIO_SPREAD: f64 = 2.0;
pub const PAIR_DELTAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn random_group(wb: &Arc<WordBasis>, rng: &mut impl Rng, segments: usize) -> WordSeries<f64> {
    WordSeries::signature(wb.clone(), &crate::harness::rng::random_driver(rng, wb.letters(), segments, 1.0))
}

/// Realization round trips and the stability of `‖x¹ − x²‖_{1-var}/δ`.
pub fn check_realization(count: u64, pairs: u64, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let shapes = [(1, 2), (2, 1), (2, 2), (3, 2)];
    let bases: Vec<Arc<WordBasis>> = shapes
        .iter()
        .map(|&(n, d)| Ok(Phi::shared(p_for_degree(n), d)?.alphabet().word_basis().clone()))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut worst: f64 = 0.0;
    let mut rt = check("round_trip", 0..count, |k| {
        let mut rng = stream(seed, k);
        let wb = &bases[k as usize % bases.len()];
        let h = random_group(wb, &mut rng, 3);
        let target = rng.gen_range(0.05..2.0);
        let h = h.dilate(&(target / h.homogeneous_scale()));
        let x = match realize(&h) {
            Ok(x) => x,
            Err(e) => return Some(format!("instance {k}: {e}")),
        };
        let r = WordSeries::signature(wb.clone(), &x).max_abs_diff(&h);
        worst = worst.max(r);
        (r > ROUND_TRIP_TOL).then(|| format!("instance {k}: residual {r:e} at ‖h‖ = {target:.3}"))
    });
    rt.name = format!("round_trip (max residual {worst:.2e})");
    checks.push(rt);

    let mut spread_max: f64 = 0.0;
    let mut pr = check("pair_ratio", 0..pairs, |k| {
        let mut rng = stream(seed, 10_000 + k);
        let wb = &bases[3];
        let h1 = random_group(wb, &mut rng, 3);
        let lie = random_group(wb, &mut rng, 2).log().expect("group element");
        let probe = |c: f64, delta: f64| h1.mul(&lie.scaled(&(c * delta)).exp());
        let c = 0.5 / PAIR_DELTAS.iter().map(|&dl| probe(1.0, dl).max_abs_diff(&h1) / dl).fold(0.0, f64::max);
        let mut ratios = Vec::new();
        for &dl in &PAIR_DELTAS {
            let h2 = probe(c, dl);
            match realize_pair(&h1, &h2, dl) {
                Ok((x1, x2)) => ratios.push(x1.difference(&x2).total_one_variation() / dl),
                Err(e) => return Some(format!("pair {k}, δ = {dl:e}: {e}")),
            }
        }
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        spread_max = spread_max.max(spread);
        (!(spread <= PAIR_RATIO_SPREAD)).then(|| format!("pair {k}: ratios {ratios:?}"))
    });
    pr.name = format!("pair_ratio (max spread {spread_max:.3})");
    checks.push(pr);
    Ok(SuiteReport { suite: "realization".into(), checks, seconds: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let r = check_algebra(2, 2, 0).unwrap();
        assert!(r.pass(), "{r}");
        assert!(check_algebra(1, 1, 0).unwrap().pass());
        assert!(check_algebra(5, 2, 0).is_err());
    }

    #[test]
    fn sign_flip_is_caught_at_the_flipped_tree() {
        let l = LabeledTree::ladder(&[1, 2]);
        let b = Arc::new(CkBasis::with_coproduct(3, 2, &sign_flip(l.clone())).unwrap());
        let r = check_algebra_with(b, 0);
        let first = r.failures().next().expect("mutation detected");
        assert_eq!(first.name, "ck_coproduct_matches_cut_enumeration");
        assert!(first.counterexample.as_ref().unwrap().starts_with(&format!("Δ({l})")));
    }

    #[test]
    fn automorphism_counts() {
        let leaf = LabeledTree::leaf;
        let cherry = LabeledTree::graft(vec![leaf(1), leaf(1)], 2, 2).unwrap();
        assert_eq!(automorphisms(&Forest::from_tree(cherry.clone())), 2);
        assert_eq!(automorphisms(&Forest::from_trees([cherry.clone(), cherry])), 8);
        assert_eq!(automorphisms(&Forest::from_trees([leaf(1), leaf(2)])), 1);
    }

    #[test]
    fn chen_and_realization_suites() {
        assert!(check_chen(12, 3).pass());
        let r = check_realization(8, 2, 5).unwrap();
        assert!(r.pass(), "{r}");
    }
}
