//! Named problems and topologies.

use plopt_core::instances::{
    dfo_hard, experiment_instance, ifo_hard, linear_span, ConstructionInfo, HardInstance, PL_CONST_A,
};
use plopt_core::objectives::{Constants, Redeclared};
use plopt_core::regression::{parse_libsvm, partitioned_regression_set, synth_regression, Loss};
use plopt_core::topology::{laplacian_mixing, mixing_for_gap, Graph, MixingMatrix};

use crate::config::ProblemConfig;
use crate::CliError;

pub const PRESETS: [&str; 7] =
    ["hard-decentralized", "ifo-hard", "theorem2", "dfo-hard", "linreg-synth", "logreg-synth", "libsvm:<path>"];

/// Tolerance on the spectral gap for `gap:<γ>` topologies.
pub const GAP_TARGET_TOL: f64 = 1e-12;

pub fn check_preset_name(name: &str) -> Result<(), CliError> {
    let known = PRESETS[..6].contains(&name) || name.strip_prefix("libsvm:").is_some_and(|p| !p.is_empty());
    if known {
        Ok(())
    } else {
        Err(CliError::Usage(format!("unknown problem preset `{name}`; known: {}", PRESETS.join(", "))))
    }
}

/// Names of the parameters that are set.
fn set_params(p: &ProblemConfig) -> Vec<&'static str> {
    let mut out = Vec::new();
    let flags = [
        ("n", p.n.is_some()),
        ("l", p.l.is_some()),
        ("mu", p.mu.is_some()),
        ("delta", p.delta.is_some()),
        ("eps", p.eps.is_some()),
        ("gamma", p.gamma.is_some()),
        ("samples", p.samples.is_some()),
        ("dim", p.dim.is_some()),
        ("noise", p.noise.is_some()),
        ("loss", p.loss.is_some()),
        ("data_seed", p.data_seed.is_some()),
    ];
    for (name, set) in flags {
        if set {
            out.push(name);
        }
    }
    out
}

fn only(p: &ProblemConfig, allowed: &[&str]) -> Result<(), CliError> {
    match set_params(p).into_iter().find(|k| !allowed.contains(k)) {
        Some(k) => Err(CliError::Usage(format!(
            "parameter `{k}` does not apply to preset `{}` (accepted: {})",
            p.preset,
            allowed.join(", ")
        ))),
        None => Ok(()),
    }
}

fn regression_instance(set: plopt_core::regression::PartitionedSet, name: &'static str) -> HardInstance {
    use plopt_core::objectives::LocalObjectiveSet;
    let info = ConstructionInfo { name, agents: set.agents(), dim: set.dim(), ..Default::default() };
    HardInstance { set: Box::new(set), info, network: None }
}

fn parse_loss(s: Option<&str>) -> Result<Loss, CliError> {
    match s.unwrap_or("square") {
        "square" => Ok(Loss::Square),
        "logistic" => Ok(Loss::Logistic),
        other => Err(CliError::Usage(format!("unknown loss `{other}`; use square or logistic"))),
    }
}

/// Builds the problem, applying any redeclared constants.
pub fn build_instance(p: &ProblemConfig, seed: u64) -> Result<HardInstance, CliError> {
    check_preset_name(&p.preset)?;
    let data_seed = p.data_seed.unwrap_or(seed);
    let inst = match p.preset.as_str() {
        "hard-decentralized" => {
            only(p, &["n"])?;
            experiment_instance(p.n.unwrap_or(32))?
        }
        "ifo-hard" => {
            only(p, &["l", "mu", "n", "delta", "eps"])?;
            ifo_hard(
                p.l.unwrap_or(37.0 * PL_CONST_A * 8.0),
                p.mu.unwrap_or(1.0),
                p.n.unwrap_or(4),
                p.delta.unwrap_or(1.0),
                p.eps.unwrap_or(0.004),
            )?
        }
        "theorem2" => {
            only(p, &["l", "mu", "n", "delta"])?;
            linear_span(p.l.unwrap_or(10.0), p.mu.unwrap_or(1.0), p.n.unwrap_or(8), p.delta.unwrap_or(1.0))?
        }
        "dfo-hard" => {
            only(p, &["l", "mu", "gamma", "delta", "eps"])?;
            dfo_hard(
                p.l.unwrap_or(200.0 * PL_CONST_A),
                p.mu.unwrap_or(1.0),
                p.gamma.unwrap_or(0.2),
                p.delta.unwrap_or(1.0),
                p.eps.unwrap_or(0.005),
            )?
        }
        "linreg-synth" | "logreg-synth" => {
            only(p, &["n", "samples", "dim", "noise", "data_seed"])?;
            let (loss, name, noise) = if p.preset == "linreg-synth" {
                (Loss::Square, "linreg-synth", 0.1)
            } else {
                (Loss::Logistic, "logreg-synth", 0.0)
            };
            let data = synth_regression(
                p.samples.unwrap_or(600),
                p.dim.unwrap_or(50),
                p.noise.unwrap_or(noise),
                data_seed,
                loss,
            )?;
            regression_instance(partitioned_regression_set(data, p.n.unwrap_or(16), loss)?, name)
        }
        other => {
            only(p, &["n", "loss", "dim"])?;
            let path = other.strip_prefix("libsvm:").expect("checked above");
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let loss = parse_loss(p.loss.as_deref())?;
            let data = parse_libsvm(&text, p.dim)?;
            regression_instance(partitioned_regression_set(data, p.n.unwrap_or(16), loss)?, "libsvm")
        }
    };
    Ok(redeclare(inst, p))
}

fn redeclare(inst: HardInstance, p: &ProblemConfig) -> HardInstance {
    if p.declared_l.is_none() && p.declared_mu.is_none() {
        return inst;
    }
    let c = inst.set.constants().clone();
    let constants = Constants { smoothness: p.declared_l.or(c.smoothness), pl: p.declared_mu.or(c.pl), ..c };
    HardInstance { set: Box::new(Redeclared { inner: inst.set, constants }), ..inst }
}

/// A communication graph with its mixing matrix.
#[derive(Debug, Clone)]
pub struct Network {
    pub graph: Graph,
    pub mixing: MixingMatrix,
}

/// Parses `linear:n`, `ring:n`, `complete:n`, `gap:<γ>` or `edges:<path>`.
/// Weighted graphs get the Laplacian mixing matrix; `gap:<γ>` builds a network
/// whose spectral gap lies in `[γ, γ + 1e-12]`.
pub fn parse_topology(spec: &str) -> Result<Network, CliError> {
    if let Some(g) = spec.strip_prefix("gap:") {
        let gamma: f64 = g.trim().parse().map_err(|_| CliError::Usage(format!("bad spectral gap in `{spec}`")))?;
        let c = mixing_for_gap(gamma, GAP_TARGET_TOL)?;
        return Ok(Network { graph: c.graph, mixing: c.mixing });
    }
    let graph = if let Some(path) = spec.strip_prefix("edges:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Graph::parse_edge_list(&text, None)?
    } else {
        Graph::preset(spec).map_err(|e| CliError::Usage(e.to_string()))?
    };
    let mixing = laplacian_mixing(&graph)?;
    Ok(Network { graph, mixing })
}

/// The configured topology, or else the network the instance was built for.
pub fn resolve_network(spec: Option<&str>, inst: &HardInstance) -> Result<Option<Network>, CliError> {
    let net = match spec {
        Some(s) => Some(parse_topology(s)?),
        None => inst.network.as_ref().map(|n| Network { graph: n.graph.clone(), mixing: n.mixing.clone() }),
    };
    if let Some(net) = &net {
        let agents = inst.set.agents();
        if net.mixing.nodes() != agents {
            return Err(CliError::Usage(format!(
                "topology has {} nodes but the problem has {agents} agents",
                net.mixing.nodes()
            )));
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(preset: &str) -> ProblemConfig {
        ProblemConfig { preset: preset.into(), ..Default::default() }
    }

    #[test]
    fn every_preset_builds_with_defaults() {
        for name in &PRESETS[..6] {
            let inst = build_instance(&problem(name), 1).unwrap();
            assert!(inst.set.agents() >= 1, "{name}");
        }
    }

    #[test]
    fn unrelated_parameters_are_rejected() {
        let p = ProblemConfig { gamma: Some(0.1), ..problem("theorem2") };
        assert_eq!(build_instance(&p, 1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn redeclared_constants_apply() {
        let p = ProblemConfig { declared_l: Some(5.0), ..problem("theorem2") };
        let inst = build_instance(&p, 1).unwrap();
        assert_eq!(inst.set.constants().smoothness, Some(5.0));
    }

    #[test]
    fn topology_specs() {
        assert_eq!(parse_topology("complete:3").unwrap().mixing.nodes(), 3);
        let net = parse_topology("gap:0.01").unwrap();
        assert!(net.mixing.gap() >= 0.01 && net.mixing.gap() <= 0.01 + GAP_TARGET_TOL);
        assert_eq!(parse_topology("star:4").unwrap_err().exit_code(), 2);
        let inst = build_instance(&problem("theorem2"), 1).unwrap();
        assert!(resolve_network(Some("linear:5"), &inst).is_err());
        assert!(resolve_network(None, &inst).unwrap().is_none());
    }
}
