use std::sync::Arc;

use proptest::prelude::*;

use branched_rough::fields::{elementary_differential, Poly, PolyMap, PolyVectorField};
use branched_rough::forest::LabeledTree;
use branched_rough::hopf::{Character, CkBasis, GroupLikeGL};
use branched_rough::path::PLPath;
use branched_rough::rde::{lift_bv, p_variation, ControlOmega};
use branched_rough::realize::realize;
use branched_rough::scalar::Rational;
use branched_rough::words::{lie_residual, Phi, WordSeries};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn character(n: usize, d: usize) -> impl Strategy<Value = Character<Rational>> {
    let b = CkBasis::shared(n, d).unwrap();
    prop::collection::vec(rational(), b.trees().len())
        .prop_map(move |v| Character::from_tree_values(b.clone(), v).unwrap())
}

fn rational_path(d: usize) -> impl Strategy<Value = PLPath<Rational>> {
    prop::collection::vec(prop::collection::vec(rational(), d), 1..6).prop_map(move |incs| PLPath::from_increments(d, &incs))
}

fn float_path(d: usize, max_segments: usize) -> impl Strategy<Value = PLPath<f64>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d), 1..max_segments)
        .prop_map(move |incs| PLPath::from_increments(d, &incs))
}

/// Segment increments in up to 16 letters; truncated to the alphabet size.
fn letter_increments(max_segments: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 16), 1..max_segments)
}

fn letter_path(k: usize, incs: &[Vec<f64>]) -> PLPath<f64> {
    let incs: Vec<Vec<f64>> = incs.iter().map(|v| v[..k].to_vec()).collect();
    PLPath::from_increments(k, &incs)
}

/// Random quadratic field on ℝ² with two components.
fn field() -> impl Strategy<Value = PolyVectorField<f64>> {
    prop::collection::vec(-1.0f64..1.0, 2 * 2 * 6).prop_map(|c| {
        let exps = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        let comps = (0..2)
            .map(|a| PolyMap {
                coords: (0..2)
                    .map(|i| {
                        let mut p = Poly::zero(2);
                        for (k, e) in exps.iter().enumerate() {
                            p.add_term(e.to_vec(), c[(a * 2 + i) * 6 + k]);
                        }
                        p
                    })
                    .collect(),
            })
            .collect();
        PolyVectorField::new(comps, vec![(-2.0, 2.0); 2]).unwrap()
    })
}

fn component(f: &PolyVectorField<f64>, a: usize, y: &[f64]) -> Vec<f64> {
    f.component(a).eval(y)
}

fn axpy(y: &[f64], s: f64, v: &[f64]) -> Vec<f64> {
    y.iter().zip(v).map(|(a, b)| a + s * b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn character_product_is_associative(a in character(3, 2), b in character(3, 2), c in character(3, 2)) {
        let l = a.product(&b).unwrap().product(&c).unwrap();
        let r = a.product(&b.product(&c).unwrap()).unwrap();
        prop_assert_eq!(l.tree_values().to_vec(), r.tree_values().to_vec());
    }

    #[test]
    fn inverse_is_two_sided(a in character(3, 2)) {
        let inv = a.inverse();
        let unit = Character::identity(a.basis().clone());
        prop_assert_eq!(a.product(&inv).unwrap().tree_values().to_vec(), unit.tree_values().to_vec());
        prop_assert_eq!(inv.product(&a).unwrap().tree_values().to_vec(), unit.tree_values().to_vec());
    }

    #[test]
    fn dilation_is_a_homomorphism(a in character(3, 2), b in character(3, 2), l in rational()) {
        let lhs = a.product(&b).unwrap().dilate(&l);
        let rhs = a.dilate(&l).product(&b.dilate(&l)).unwrap();
        prop_assert_eq!(lhs.tree_values().to_vec(), rhs.tree_values().to_vec());
    }

    #[test]
    fn rescale_intertwines_products(a in character(3, 2), b in character(3, 2)) {
        let lhs = GroupLikeGL::rescale(&a.product(&b).unwrap());
        let rhs = GroupLikeGL::rescale(&a).product(&GroupLikeGL::rescale(&b)).unwrap();
        prop_assert_eq!(lhs.values().to_vec(), rhs.values().to_vec());
        prop_assert_eq!(lhs.rescale_inv().tree_values().to_vec(), a.product(&b).unwrap().tree_values().to_vec());
    }

    #[test]
    fn lifts_satisfy_chen_and_concatenate(x in rational_path(2), y in rational_path(2)) {
        let xy = lift_bv(&x.concat(&y), 2.5).unwrap();
        prop_assert!(xy.chen_violation(0.0).is_none());
        let lx = lift_bv(&x, 2.5).unwrap();
        let ly = lift_bv(&y, 2.5).unwrap();
        let joined = lx.increment(0, lx.len() - 1).product(&ly.increment(0, ly.len() - 1)).unwrap();
        prop_assert_eq!(xy.increment(0, xy.len() - 1).tree_values().to_vec(), joined.tree_values().to_vec());
    }

    #[test]
    fn canonical_lifts_are_group_like(x in rational_path(2)) {
        let lift = lift_bv(&x, 3.5).unwrap();
        let g = GroupLikeGL::rescale(&lift.increment(0, lift.len() - 1));
        prop_assert_eq!(g.group_like_residual(), 0.0);
    }

    #[test]
    fn exp_and_log_are_inverse(incs in letter_increments(4)) {
        let wb = Phi::shared(3.5, 2).unwrap().alphabet().word_basis().clone();
        let s = WordSeries::signature(wb.clone(), &letter_path(wb.letters(), &incs));
        let l = s.log().unwrap();
        prop_assert!(lie_residual(&l) < 1e-12);
        prop_assert!(l.exp().max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn elementary_differentials_match_finite_differences(f in field(), y in prop::collection::vec(-0.5f64..0.5, 2)) {
        let h = 1e-4;
        // [•b]a: Df_a(y)·f_b(y)
        for a in 1..=2u16 {
            for b in 1..=2u16 {
                let t = LabeledTree::ladder(&[a, b]);
                let exact = elementary_differential(&f, &t, &y).unwrap();
                let fb = component(&f, b as usize, &y);
                let plus = component(&f, a as usize, &axpy(&y, h, &fb));
                let minus = component(&f, a as usize, &axpy(&y, -h, &fb));
                for i in 0..2 {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    prop_assert!((fd - exact[i]).abs() < 1e-6 * (1.0 + exact[i].abs()), "{t}: {fd} vs {}", exact[i]);
                }
            }
        }
        // [•b•c]a: D²f_a(y)(f_b, f_c) by a mixed central difference
        let t = LabeledTree::graft(vec![LabeledTree::leaf(1), LabeledTree::leaf(2)], 1, 2).unwrap();
        let exact = elementary_differential(&f, &t, &y).unwrap();
        let (u, v) = (component(&f, 1, &y), component(&f, 2, &y));
        let at = |s: f64, r: f64| component(&f, 1, &axpy(&axpy(&y, s, &u), r, &v));
        let h = 1e-3;
        let (pp, pm, mp, mm) = (at(h, h), at(h, -h), at(-h, h), at(-h, -h));
        for i in 0..2 {
            let fd = (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h);
            prop_assert!((fd - exact[i]).abs() < 1e-6 * (1.0 + exact[i].abs()), "cherry: {fd} vs {}", exact[i]);
        }
    }

    #[test]
    fn omega_is_superadditive(x in float_path(2, 14)) {
        let lift = lift_bv(&x, 2.5).unwrap();
        let w = ControlOmega::new(&[&lift], 2.5).unwrap();
        prop_assert!(w.superadditivity_violation(1e-12).is_none());
        let m = lift.len() - 1;
        prop_assert!(p_variation(&lift, 2.5, 0, m / 2) <= p_variation(&lift, 2.5, 0, m) * (1.0 + 1e-12));
    }

    #[test]
    fn realization_round_trips(incs in letter_increments(5), scale in 0.05f64..2.0) {
        let wb = Phi::shared(2.5, 2).unwrap().alphabet().word_basis().clone();
        let h = WordSeries::signature(wb.clone(), &letter_path(wb.letters(), &incs));
        prop_assume!(h.homogeneous_scale() > 1e-6);
        let h = h.dilate(&(scale / h.homogeneous_scale()));
        let r = realize(&h).unwrap();
        prop_assert!(WordSeries::signature(wb, &r).max_abs_diff(&h) < 1e-9);
    }
}

#[test]
fn shared_bases_are_cached() {
    assert!(Arc::ptr_eq(&CkBasis::shared(3, 2).unwrap(), &CkBasis::shared(3, 2).unwrap()));
}
