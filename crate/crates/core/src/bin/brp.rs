use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use branched_rough::fields::PolyVectorField;
use branched_rough::harness::checks::{check_algebra, check_algebra_with, sign_flip};
use branched_rough::harness::{
    experiment_convergence, experiment_lipschitz, experiment_ode_bounds, Experiment, ExperimentConfig, Report,
};
use branched_rough::hopf::{CkBasis, GroupLikeGL};
use branched_rough::path::PLPath;
use branched_rough::rde::{lift_bv, solve, solve_euler, Backend, BranchedRoughPath};
use branched_rough::realize::realize;
use branched_rough::scalar::{parse_rational, Rational, Scalar};
use branched_rough::words::{Phi, WordSeries};
use branched_rough::{Error, Result};

#[derive(Parser)]
#[command(name = "brp", version, about = "Branched rough paths: algebra checks, lifts, RDE solvers and experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (experiments) or file (pass-throughs).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exact rational arithmetic.
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point arithmetic (default).
    #[arg(long, global = true)]
    float: bool,
    /// Worker threads; 1 gives a fully sequential run.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive Hopf-algebra and word-group identities.
    CheckAlgebra {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Flip the sign of the cut term of Δ([•1]1) before checking.
        #[arg(long)]
        mutate: bool,
    },
    /// Canonical branched lift of a piecewise-linear path.
    Lift {
        /// Path JSON `{"times": [...], "values": [[...], ...]}`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Solves `dY = f(Y) dX` along a branched rough path.
    Solve {
        /// Rough-path JSON.
        #[arg(long)]
        rough: PathBuf,
        /// Vector-field JSON.
        #[arg(long)]
        field: PathBuf,
        /// Initial value, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value = "euler")]
        backend: Backend,
        /// Use every `step`-th grid point as the partition.
        #[arg(long, default_value_t = 1)]
        step: usize,
    },
    /// Path whose signature is a given group element.
    Realize {
        /// Rough-path JSON (its total increment is realized) or
        /// `{"p", "d", "series"}` with a word series over the alphabet.
        #[arg(long)]
        input: PathBuf,
    },
    /// Lipschitz structure of the solution map.
    ExpLipschitz,
    /// Explicit-constant ODE stability bounds on random instances.
    ExpOdeBounds,
    /// Defect scaling and backend agreement.
    ExpConvergence,
}

fn read_json(path: &Path) -> Result<Value> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn emit(out: &Option<PathBuf>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_vector<S: Scalar>(s: &str) -> Result<Vec<S>> {
    s.split(',')
        .map(|t| {
            if S::EXACT {
                Ok(S::from_rational(&parse_rational(t)?))
            } else {
                t.trim().parse::<f64>().map(S::from_f64).map_err(|_| Error::Parse(format!("not a number: {t}")))
            }
        })
        .collect()
}

fn partition(len: usize, step: usize) -> Result<Vec<usize>> {
    if step == 0 {
        return Err(Error::Config("step must be positive".into()));
    }
    let mut idx: Vec<usize> = (0..len).step_by(step).collect();
    if *idx.last().unwrap() != len - 1 {
        idx.push(len - 1);
    }
    Ok(idx)
}

fn lift<S: Scalar>(input: &Path, p: f64, out: &Option<PathBuf>) -> Result<bool> {
    let x = PLPath::<S>::from_json(&read_json(input)?)?;
    let rp = lift_bv(&x, p)?;
    let tol = if S::EXACT { 0.0 } else { 1e-12 };
    let ok = rp.chen_violation(tol).is_none();
    emit(out, &rp.to_json())?;
    Ok(ok)
}

fn realize_input<S: Scalar>(v: &Value) -> Result<(WordSeries<S>, Arc<Phi>)> {
    if v.get("states").is_some() {
        let x = BranchedRoughPath::<S>::from_json(v)?;
        let phi = Phi::shared(x.p(), x.dim())?;
        let g = GroupLikeGL::rescale(&x.increment(0, x.len() - 1));
        Ok((phi.phi_inverse(&g), phi))
    } else {
        let p = v["p"].as_f64().ok_or_else(|| Error::Parse("realize: missing p".into()))?;
        let d = v["d"].as_u64().ok_or_else(|| Error::Parse("realize: missing d".into()))? as usize;
        let phi = Phi::shared(p, d)?;
        let h = WordSeries::from_json(phi.alphabet().word_basis().clone(), &v["series"])?;
        Ok((h, phi))
    }
}

fn realize_cmd<S: Scalar>(input: &Path, out: &Option<PathBuf>) -> Result<bool> {
    let (h, phi) = realize_input::<S>(&read_json(input)?)?;
    let x = realize(&h)?;
    let residual = WordSeries::signature(h.basis().clone(), &x).max_abs_diff(&h);
    let ok = if S::EXACT { residual == 0.0 } else { residual <= 1e-9 };
    emit(out, &json!({"path": x.to_json(), "residual": residual, "alphabet": phi.alphabet().to_json()}))?;
    Ok(ok)
}

fn experiment(kind: Experiment, g: &Global) -> Result<bool> {
    if g.exact {
        return Err(Error::Config("experiments run in floating point; drop --exact".into()));
    }
    let mut c = match &g.config {
        Some(p) => ExperimentConfig::from_file(kind, p)?,
        None => ExperimentConfig::default_for(kind),
    };
    if let Some(s) = g.seed {
        c.seed = s;
    }
    let r: Report = match kind {
        Experiment::Lipschitz => experiment_lipschitz(&c)?,
        Experiment::OdeBounds => experiment_ode_bounds(&c)?,
        Experiment::Convergence => experiment_convergence(&c)?,
    };
    println!("{}", serde_json::to_string_pretty(&json!({"kind": r.kind, "pass": r.pass, "summary": r.summary}))?);
    if let Some(dir) = &g.out {
        for p in r.write(dir)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(r.pass)
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let seed = g.seed.unwrap_or(0);
    match &cli.command {
        Command::CheckAlgebra { n, d, mutate } => {
            let report = if *mutate {
                let basis = CkBasis::with_coproduct(*n, *d, &sign_flip(branched_rough::forest::LabeledTree::ladder(&[1, 1])))?;
                check_algebra_with(Arc::new(basis), seed)
            } else {
                check_algebra(*n, *d, seed)?
            };
            print!("{report}");
            if let Some(p) = &g.out {
                std::fs::write(p, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(report.pass())
        }
        Command::Lift { input, p } => {
            if g.exact {
                lift::<Rational>(input, *p, &g.out)
            } else {
                lift::<f64>(input, *p, &g.out)
            }
        }
        Command::Solve { rough, field, xi, backend, step } => {
            let rv = read_json(rough)?;
            let fv = read_json(field)?;
            if g.exact {
                if *backend != Backend::Euler {
                    return Err(Error::Config("exact arithmetic is available for the Euler backend only".into()));
                }
                let x = BranchedRoughPath::<Rational>::from_json(&rv)?;
                let f = PolyVectorField::<Rational>::from_json(&fv)?;
                let r = solve_euler(&x, &f, &parse_vector(xi)?, &partition(x.len(), *step)?)?;
                emit(&g.out, &r.to_json(&x))?;
            } else {
                let x = BranchedRoughPath::<f64>::from_json(&rv)?;
                let f = PolyVectorField::<f64>::from_json(&fv)?;
                let r = solve(*backend, &x, &f, &parse_vector(xi)?, &partition(x.len(), *step)?)?;
                emit(&g.out, &r.to_json(&x))?;
            }
            Ok(true)
        }
        Command::Realize { input } => {
            if g.exact {
                realize_cmd::<Rational>(input, &g.out)
            } else {
                realize_cmd::<f64>(input, &g.out)
            }
        }
        Command::ExpLipschitz => experiment(Experiment::Lipschitz, g),
        Command::ExpOdeBounds => experiment(Experiment::OdeBounds, g),
        Command::ExpConvergence => experiment(Experiment::Convergence, g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
