//! The four verbs. Each returns the text to print and whether it succeeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use plopt_core::gossip::{default_round_count, GossipConfig};
use plopt_core::instances::{property_suite, span_gap_profile, SuiteConfig};
use plopt_core::objectives::CheckOutcome;
use plopt_core::topology::validate_mixing;

use crate::config::{ExperimentConfig, ProblemConfig};
use crate::experiment::{run_experiment, summary};
use crate::output::write_runs;
use crate::plot::{plot_files, XAxis};
use crate::presets::{build_instance, parse_topology};
use crate::CliError;

pub struct Report {
    pub text: String,
    pub passed: bool,
}

/// Runs every solver of the config, writes `<out>/<label>.csv` and reports
/// the resolved parameters and the iterations-to-ε summary.
pub fn cmd_run(config: &Path, out: Option<&Path>, seed: Option<u64>, auto: bool) -> Result<Report, CliError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out = o.display().to_string();
    }
    let exp = run_experiment(&cfg, auto)?;
    let paths = write_runs(Path::new(&cfg.out), &exp.runs)?;
    let mut text = String::new();
    let set = exp.instance.set.as_ref();
    let _ = writeln!(text, "problem {}: n = {}, d = {}", cfg.problem.preset, set.agents(), set.dim());
    if let Some(net) = &exp.network {
        let _ = writeln!(text, "network: lambda2 = {:.6e}, gamma = {:.6e}", net.mixing.lambda2(), net.mixing.gap());
    }
    for (r, path) in exp.runs.iter().zip(&paths) {
        let p = &r.solver.params;
        let _ =
            write!(text, "{} ({}): eta = {:e}, iters = {}", r.solver.label, r.solver.algorithm.name(), p.eta, p.iters);
        if p.k > 0 {
            let _ = write!(text, ", K = {}", p.k);
        }
        if r.solver.algorithm == plopt_core::solvers::Algorithm::Drone {
            let _ = write!(
                text,
                ", p = {}, b = {}, expected LFO/iter = {}",
                p.p,
                p.b,
                p.p * set.agents() as f64 + (1.0 - p.p) * p.b as f64
            );
        }
        let _ = writeln!(text, " -> {}", path.display());
        for note in &r.solver.notes {
            let _ = writeln!(text, "  note: {note}");
        }
    }
    text.push_str(&summary(&exp.runs, cfg.target));
    Ok(Report { text, passed: true })
}

/// Prints `λ2`, `γ`, the default round count and the mixing clauses. The gap
/// clause is checked against `gamma` when given, else against the measured gap.
pub fn cmd_spectral(spec: &str, gamma: Option<f64>) -> Result<Report, CliError> {
    let net = parse_topology(spec)?;
    let n = net.mixing.nodes();
    let measured = net.mixing.gap();
    let report = validate_mixing(&net.mixing, &net.graph, gamma.unwrap_or(measured));
    let mut text = String::new();
    let _ = writeln!(text, "topology {spec}: n = {n}, edges = {}", net.graph.edges().len());
    let _ = writeln!(text, "lambda2 = {:.16e}", net.mixing.lambda2());
    let _ = writeln!(text, "gamma = {measured:.16e}");
    if measured > 0.0 {
        let k = default_round_count(n, measured)?;
        let rho = GossipConfig::new(&net.mixing, k).rho;
        let _ = writeln!(text, "default K = {k}, contraction bound = {rho:.6e}");
    }
    for c in &report.clauses {
        let _ = writeln!(
            text,
            "{} {}: residual {:.3e} (tolerance {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.clause,
            c.residual,
            c.tolerance
        );
    }
    Ok(Report { text, passed: report.passed() })
}

fn outcome_line(o: &CheckOutcome) -> String {
    format!(
        "{} {}: worst {:.6e}, threshold {:.6e} ({})",
        if o.passed { "PASS" } else { "FAIL" },
        o.name,
        o.worst,
        o.threshold,
        o.detail
    )
}

/// Runs the property suite on a preset; for the linear-span instance also
/// prints the gap at every span size.
pub fn cmd_check_instance(problem: &ProblemConfig, seed: u64) -> Result<Report, CliError> {
    let inst = build_instance(problem, seed)?;
    let outcomes = property_suite(&inst, &SuiteConfig { seed, ..SuiteConfig::default() });
    let mut text = String::new();
    let c = inst.set.constants();
    let _ = writeln!(
        text,
        "instance {}: n = {}, d = {}, L = {:?}, mu = {:?}, f* = {:?}",
        problem.preset,
        inst.set.agents(),
        inst.set.dim(),
        c.smoothness,
        c.pl,
        c.f_star.known()
    );
    for note in &inst.info.notes {
        let _ = writeln!(text, "note: {note}");
    }
    for o in &outcomes {
        let _ = writeln!(text, "{}", outcome_line(o));
    }
    if let Some(rows) = span_gap_profile(&inst) {
        let _ = writeln!(text, "span gap profile (k, gap, expected):");
        for r in rows {
            let _ = writeln!(text, "  {} {:.16e} {:.16e}", r.k, r.gap, r.expected);
        }
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        let _ = writeln!(text, "all {} checks passed", outcomes.len());
    } else {
        let _ = writeln!(text, "failed: {}", failed.join(", "));
    }
    Ok(Report { text, passed: failed.is_empty() })
}

/// Parses `key=value` overrides into a problem config for `preset`.
pub fn problem_from_args(preset: &str, sets: &[String]) -> Result<ProblemConfig, CliError> {
    let mut text = format!("preset = {}\n", toml_string(preset));
    for s in sets {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("`{s}` is not key=value")))?;
        let v = v.trim();
        // Bare words (loss names) become strings.
        let v = if v.parse::<f64>().is_ok() { v.to_owned() } else { toml_string(v) };
        let _ = writeln!(text, "{} = {v}", k.trim());
    }
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("problem parameters: {e}")))
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_owned()).to_string()
}

pub fn cmd_plot(csvs: &[PathBuf], x: &str, out: &Path) -> Result<Report, CliError> {
    let axis = XAxis::parse(x)?;
    plot_files(csvs, axis, out)?;
    Ok(Report { text: format!("wrote {}\n", out.display()), passed: true })
}
