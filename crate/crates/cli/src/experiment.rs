//! Resolves solver parameters and runs an experiment.
//!
//! Step sizes are never guessed: every solver needs `eta` and `iters` unless
//! `auto` is set, in which case unset values come from the DRONE default
//! rule (`η`, `T`, `K`, `p`, `b`), shared by all solvers of the run. Without
//! `auto`, decentralized solvers still default `K` to the round count for the
//! measured gap and DRONE defaults `p` and `b` to the same rule.

use plopt_core::gossip::{default_round_count, GossipConfig};
use plopt_core::instances::HardInstance;
use plopt_core::numkit::DenseMatrix;
use plopt_core::objectives::{LocalObjectiveSet, OracleMeter};
use plopt_core::solvers::{
    cgd, dgd_gt, drone, drone_default_params, gd, lyapunov_components, Algorithm, DroneDefaults, GapKind,
    LyapunovWeights, RunOptions, RunRecord, SolverParams,
};

use crate::config::{ExperimentConfig, SolverConfig};
use crate::presets::{build_instance, resolve_network, Network};
use crate::CliError;

/// Fully specified solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSolver {
    pub label: String,
    pub algorithm: Algorithm,
    pub params: SolverParams,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solver: ResolvedSolver,
    pub record: RunRecord,
}

pub struct Experiment {
    pub config: ExperimentConfig,
    pub instance: HardInstance,
    pub network: Option<Network>,
    pub runs: Vec<SolverRun>,
}

fn is_decentralized(a: Algorithm) -> bool {
    matches!(a, Algorithm::DgdGt | Algorithm::Drone)
}

fn declared(inst: &HardInstance) -> Result<(f64, f64), CliError> {
    let c = inst.set.constants();
    match (c.smoothness, c.pl) {
        (Some(l), Some(mu)) => Ok((l, mu)),
        _ => Err(CliError::Usage(
            "default parameters need declared smoothness and PL constants; set eta, iters, p and b".into(),
        )),
    }
}

/// DRONE defaults for the problem and network. `T` is computed from `Φ⁰` at
/// the consensual start `X = 1x0`, `S = G = ∇F(X)` when `f*` is known, and
/// left at zero otherwise.
pub fn auto_defaults(
    inst: &HardInstance,
    net: Option<&Network>,
    x0: &[f64],
    eps: f64,
) -> Result<(DroneDefaults, Option<f64>), CliError> {
    let set = inst.set.as_ref();
    let (l, mu) = declared(inst)?;
    let n = set.agents();
    let gamma = net.map_or(1.0, |n| n.mixing.gap());
    let first = drone_default_params(n, l, mu, gamma, 1.0, 1.0)?;
    if set.constants().f_star.known().is_none() {
        return Ok((first, None));
    }
    let x = DenseMatrix::broadcast_row(n, x0);
    let mut g = DenseMatrix::zeros(n, set.dim());
    for i in 0..n {
        set.gradient(i, x0, g.row_mut(i));
    }
    let lambda2 = net.map_or(0.0, |n| n.mixing.lambda2());
    let rho = GossipConfig::from_lambda2(lambda2, first.params.k).rho;
    let w = LyapunovWeights { eta: first.params.eta, p: first.params.p, rho, smoothness: l };
    let phi0 = lyapunov_components(set, &x, &g, &g, w)?.phi;
    Ok((drone_default_params(n, l, mu, gamma, phi0, eps)?, Some(phi0)))
}

/// Fills in the parameters of one solver.
pub fn resolve_solver(
    sc: &SolverConfig,
    inst: &HardInstance,
    net: Option<&Network>,
    defaults: Option<&DroneDefaults>,
    seed: u64,
) -> Result<ResolvedSolver, CliError> {
    let algorithm = sc.algorithm()?;
    let n = inst.set.agents();
    let label = sc.label().to_owned();
    let need = |what: &str| CliError::Usage(format!("solver `{label}` needs `{what}` (or auto = true)"));
    let mut notes = Vec::new();
    let auto = if sc.auto { defaults } else { None };
    let eta = sc.eta.or(auto.map(|d| d.params.eta)).ok_or_else(|| need("eta"))?;
    let iters = match (sc.iters, auto) {
        (Some(t), _) => t,
        (None, Some(d)) if inst.set.constants().f_star.known().is_some() => d.params.iters,
        _ => return Err(need("iters")),
    };
    let mut params = SolverParams { eta, iters, k: 0, p: 1.0, b: n, seed };
    if is_decentralized(algorithm) {
        let net = net.ok_or_else(|| CliError::Usage(format!("solver `{label}` is decentralized; set a topology")))?;
        params.k = match sc.k {
            Some(k) => k,
            None => default_round_count(n, net.mixing.gap())?,
        };
    }
    if algorithm == Algorithm::Drone {
        let rule = match auto {
            Some(d) => Some(d.clone()),
            None if sc.p.is_none() || sc.b.is_none() => {
                let (l, mu) = declared(inst)?;
                let gamma = net.map_or(1.0, |n| n.mixing.gap());
                Some(drone_default_params(n, l, mu, gamma, 1.0, 1.0)?)
            }
            None => None,
        };
        if let Some(r) = &rule {
            notes.extend(r.notes.iter().cloned());
        }
        params.p = sc.p.or(rule.as_ref().map(|r| r.params.p)).expect("rule set when p is missing");
        params.b = sc.b.or(rule.as_ref().map(|r| r.params.b)).expect("rule set when b is missing");
    } else if sc.p.is_some() || sc.b.is_some() {
        return Err(CliError::Usage(format!("`p` and `b` only apply to drone (solver `{label}`)")));
    }
    params.validate(n)?;
    Ok(ResolvedSolver { label, algorithm, params, notes })
}

/// Options used for every run of an experiment.
pub fn run_options(inst: &HardInstance, algorithm: Algorithm, target: Option<f64>) -> RunOptions {
    let decentralized = is_decentralized(algorithm);
    RunOptions {
        target_gap: target,
        grad_norm: true,
        lyapunov: decentralized && inst.set.constants().f_star.known().is_some(),
        invariants: decentralized,
        keep_iterates: false,
    }
}

pub fn run_solver(
    inst: &HardInstance,
    net: Option<&Network>,
    x0: &[f64],
    solver: &ResolvedSolver,
    tau: f64,
    opts: &RunOptions,
) -> Result<RunRecord, CliError> {
    let set = inst.set.as_ref();
    let mut meter = OracleMeter::new(set.agents(), tau);
    let p = &solver.params;
    let rec = match solver.algorithm {
        Algorithm::Gd => gd(set, x0, p.eta, p.iters, &mut meter, opts)?,
        Algorithm::Cgd => cgd(set, x0, p.eta, p.iters, &mut meter, opts)?,
        Algorithm::DgdGt | Algorithm::Drone => {
            let w = &net.expect("resolved decentralized solvers have a network").mixing;
            if solver.algorithm == Algorithm::DgdGt {
                dgd_gt(set, w, x0, p.eta, p.k, p.iters, &mut meter, opts)?
            } else {
                drone(set, w, x0, p, &mut meter, opts)?
            }
        }
    };
    Ok(rec)
}

/// Builds the problem and runs every configured solver from `x0 = 0`.
/// `auto` forces default parameters for all solvers.
pub fn run_experiment(config: &ExperimentConfig, auto: bool) -> Result<Experiment, CliError> {
    config.validate()?;
    let inst = build_instance(&config.problem, config.seed)?;
    let network = resolve_network(config.topology.as_deref(), &inst)?;
    let x0 = vec![0.0; inst.set.dim()];
    let wants_auto = auto || config.solvers.iter().any(|s| s.auto);
    let defaults = if wants_auto { Some(auto_defaults(&inst, network.as_ref(), &x0, config.target)?.0) } else { None };
    let target = config.stop_at_target.then_some(config.target);
    let mut runs = Vec::with_capacity(config.solvers.len());
    for sc in &config.solvers {
        let sc = SolverConfig { auto: sc.auto || auto, ..sc.clone() };
        let solver = resolve_solver(&sc, &inst, network.as_ref(), defaults.as_ref(), config.seed)?;
        let opts = run_options(&inst, solver.algorithm, target);
        let record = run_solver(&inst, network.as_ref(), &x0, &solver, config.tau, &opts)?;
        runs.push(SolverRun { solver, record });
    }
    Ok(Experiment { config: config.clone(), instance: inst, network, runs })
}

/// One line per solver: where the gap first reached `ε`, on every cost axis.
pub fn summary(runs: &[SolverRun], eps: f64) -> String {
    let mut out = String::new();
    for r in runs {
        let rec = &r.record;
        let kind = match rec.gap_kind {
            GapKind::Absolute => "gap",
            GapKind::Relative => "relative gap",
        };
        let line = match rec.first_reaching(eps) {
            Some(row) if rec.gap_kind == GapKind::Absolute => format!(
                "{}: {kind} <= {eps:e} at iter {}, lfo_total {}, comm_rounds {}, time_units {}",
                r.solver.label, row.iter, row.lfo_total, row.comm_rounds, row.time_units
            ),
            _ => {
                let last = rec.rows.last().map_or(f64::NAN, |row| row.gap);
                format!(
                    "{}: {kind} not <= {eps:e} after {} iterations (final {kind} {last:e})",
                    r.solver.label,
                    rec.iterations()
                )
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn theorem2_runs_reach_target() {
        let cfg = config(
            r#"
target = 1e-8
topology = "linear:8"
[problem]
preset = "theorem2"
[[solver]]
name = "cgd"
eta = 0.1
iters = 500
[[solver]]
name = "dgd-gt"
eta = 0.02
iters = 3000
[[solver]]
name = "drone"
eta = 0.02
iters = 6000
"#,
        );
        let exp = run_experiment(&cfg, false).unwrap();
        for r in &exp.runs {
            assert!(r.record.first_reaching(1e-8).is_some(), "{}", r.solver.label);
        }
        let s = summary(&exp.runs, 1e-8);
        assert_eq!(s.lines().count(), 3);
        assert!(s.contains("cgd: gap <= 1e-8 at iter"), "{s}");
    }

    #[test]
    fn missing_step_size_is_a_usage_error() {
        let cfg = config("target = 1e-6\n[problem]\npreset = \"theorem2\"\n[[solver]]\nname = \"cgd\"\niters = 5\n");
        assert_eq!(run_experiment(&cfg, false).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn decentralized_solvers_need_a_network() {
        let cfg = config(
            "target = 1e-6\n[problem]\npreset = \"theorem2\"\n[[solver]]\nname = \"drone\"\neta = 0.01\niters = 5\n",
        );
        assert_eq!(run_experiment(&cfg, false).err().unwrap().exit_code(), 2);
    }

    #[test]
    fn auto_fills_drone_parameters() {
        let cfg = config(
            "target = 1e-4\ntopology = \"ring:8\"\n[problem]\npreset = \"theorem2\"\n[[solver]]\nname = \"drone\"\nauto = true\n",
        );
        let inst = build_instance(&cfg.problem, 0).unwrap();
        let net = resolve_network(cfg.topology.as_deref(), &inst).unwrap();
        let x0 = vec![0.0; inst.set.dim()];
        let (d, phi0) = auto_defaults(&inst, net.as_ref(), &x0, 1e-4).unwrap();
        assert!(phi0.unwrap() > 0.0);
        let s = resolve_solver(&cfg.solvers[0], &inst, net.as_ref(), Some(&d), 3).unwrap();
        assert_eq!(s.params, SolverParams { seed: 3, ..d.params });
        let exp = run_experiment(&cfg, false).unwrap();
        assert!(exp.runs[0].record.first_reaching(1e-4).is_some());
    }

    #[test]
    fn regression_gaps_are_relative() {
        let cfg = config(
            "target = 1e-3\ntopology = \"ring:4\"\n[problem]\npreset = \"logreg-synth\"\nn = 4\nsamples = 40\ndim = 5\n[[solver]]\nname = \"dgd-gt\"\neta = 0.1\niters = 20\n",
        );
        let exp = run_experiment(&cfg, false).unwrap();
        let rec = &exp.runs[0].record;
        assert_eq!(rec.gap_kind, GapKind::Relative);
        assert!(rec.rows.iter().all(|r| r.lyapunov.is_none()));
        assert!(summary(&exp.runs, 1e-3).contains("relative gap not <="));
    }
}
