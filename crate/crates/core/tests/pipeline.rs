use rand::Rng;

use branched_rough::harness::experiments::lipschitz_lhs;
use branched_rough::harness::rng::{random_driver, random_field, stream};
use branched_rough::harness::{experiment_lipschitz, experiment_ode_bounds, Experiment, ExperimentConfig};
use branched_rough::rde::{lift_bv, solve_euler, ControlOmega};

fn small_lipschitz() -> ExperimentConfig {
    let mut c = ExperimentConfig::default_for(Experiment::Lipschitz);
    c.segments = 16;
    c.blocks = vec![1, 2];
    c.perturbations = vec![1e-2, 1e-3];
    c
}

#[test]
fn same_config_gives_identical_reports() {
    let mut c = ExperimentConfig::default_for(Experiment::OdeBounds);
    c.instances = 6;
    c.seed = 11;
    let a = experiment_ode_bounds(&c).unwrap().to_json();
    let b = experiment_ode_bounds(&c).unwrap().to_json();
    assert_eq!(a, b);

    let c = small_lipschitz();
    assert_eq!(experiment_lipschitz(&c).unwrap().to_json(), experiment_lipschitz(&c).unwrap().to_json());
}

#[test]
fn thread_count_does_not_change_results() {
    let c = small_lipschitz();
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| experiment_lipschitz(&c).unwrap().to_json())
    };
    assert_eq!(run(1), run(4));
}

/// Replacing `(f, X)` by `(f/λ, δ_λ X)` leaves the Euler solution unchanged,
/// since `δ_λ` multiplies `X(τ)` by `λ^{|τ|}` and `f(τ)` picks up `λ^{-|τ|}`.
/// With `λ = 2` every rescaling is exact in binary floating point.
#[test]
fn euler_solution_is_invariant_under_dilation_of_the_pair() {
    let mut rng = stream(3, 0);
    let f = random_field(&mut rng, 2, 2, 3, vec![(-4.0, 4.0); 2], 0.5);
    let x = random_driver(&mut rng, 2, 24, 0.15);
    let xi: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let rough = lift_bv(&x, 2.5).unwrap();

    let base = solve_euler(&rough, &f, &xi, &[]).unwrap();
    let scaled = solve_euler(&rough.dilate(&2.0), &f.scaled(&0.5), &xi, &[]).unwrap();
    let omega = ControlOmega::new(&[&rough], 2.5).unwrap();
    assert_eq!(lipschitz_lhs(&base.trajectory, &scaled.trajectory, &omega), 0.0);
}
