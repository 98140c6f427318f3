use std::sync::Arc;

use super::chain::{ChainSpec, PL_CONST_A};
use super::fields::{ChainField, FieldSet};
use super::InstanceError;
use crate::objectives::{Constants, OptimalValue};
use crate::topology::Graph;

/// A source set `C` on a graph and the far set `C_σ = {v : dis(C, v) ≥ σ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSplitSpec {
    graph: Graph,
    c: Vec<usize>,
    sigma: usize,
    c_sigma: Vec<usize>,
}

impl NetworkSplitSpec {
    /// Nodes unreachable from `C` count as infinitely far. `σ ≥ 1` keeps `C`
    /// and `C_σ` disjoint.
    pub fn new(graph: Graph, c: Vec<usize>, sigma: usize) -> Result<Self, InstanceError> {
        if c.is_empty() {
            return Err(InstanceError::Infeasible("source set C is empty".into()));
        }
        if sigma == 0 {
            return Err(InstanceError::Invalid("sigma must be at least 1".into()));
        }
        if let Some(&bad) = c.iter().find(|&&v| v >= graph.nodes()) {
            return Err(InstanceError::Invalid(format!("node {bad} of C is outside the {}-node graph", graph.nodes())));
        }
        let mut c = c;
        c.sort_unstable();
        c.dedup();
        let c_sigma: Vec<usize> = graph
            .bfs_distances(&c)
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_none_or(|d| d >= sigma))
            .map(|(v, _)| v)
            .collect();
        if c_sigma.is_empty() {
            return Err(InstanceError::Infeasible(format!("no node is at distance >= {sigma} from C")));
        }
        Ok(Self { graph, c, sigma, c_sigma })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn c(&self) -> &[usize] {
        &self.c
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn c_sigma(&self) -> &[usize] {
        &self.c_sigma
    }
}

/// Mean-squared smoothness of the split set: `33/n + max{2/|C|, 2/|C_σ|}`.
pub fn h_set_smoothness(n: usize, c: usize, c_sigma: usize) -> f64 {
    33.0 / n as f64 + (2.0 / c as f64).max(2.0 / c_sigma as f64)
}

/// Local pieces `h_i`: `r/n + q1(b − x)/|C|` on `C`, `r/n + q2(b − x)/|C_σ|`
/// on `C_σ`, and `r/n` elsewhere. Their average is `g_{T,t}/n`.
pub fn h_set(split: &NetworkSplitSpec, spec: Arc<ChainSpec>) -> Result<FieldSet<ChainField>, InstanceError> {
    if !spec.supports_split() {
        return Err(InstanceError::Invalid(format!(
            "the network split needs an even block length, got T = {}",
            spec.block_len()
        )));
    }
    let n = split.graph().nodes();
    let nf = n as f64;
    let wc = 1.0 / split.c().len() as f64;
    let ws = 1.0 / split.c_sigma().len() as f64;
    let fields = (0..n)
        .map(|i| {
            let (w1, w2) = if split.c().contains(&i) {
                (wc, 0.0)
            } else if split.c_sigma().contains(&i) {
                (0.0, ws)
            } else {
                (0.0, 0.0)
            };
            ChainField::split(spec.clone(), 1.0 / nf, w1, w2)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let constants = Constants {
        smoothness: Some(h_set_smoothness(n, split.c().len(), split.c_sigma().len())),
        pl: Some(1.0 / (PL_CONST_A * nf * spec.block_len() as f64)),
        f_star: OptimalValue::Known(0.0),
        length_scale: 1.0,
    };
    FieldSet::new(fields, constants)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{mean_value, LocalObjectiveSet};

    #[test]
    fn far_set_on_path() {
        let s = NetworkSplitSpec::new(Graph::path(32).unwrap(), vec![0], 29).unwrap();
        assert_eq!(s.c_sigma(), &[29, 30, 31]);
    }

    #[test]
    fn rejects_degenerate_splits() {
        let g = Graph::path(5).unwrap();
        assert!(NetworkSplitSpec::new(g.clone(), vec![], 1).is_err());
        assert!(NetworkSplitSpec::new(g.clone(), vec![0], 0).is_err());
        assert!(matches!(NetworkSplitSpec::new(g.clone(), vec![0], 5), Err(InstanceError::Infeasible(_))));
        assert!(NetworkSplitSpec::new(g, vec![7], 1).is_err());
    }

    #[test]
    fn middle_agents_vanish_at_b() {
        let spec = Arc::new(ChainSpec::new(2, 4).unwrap());
        let split = NetworkSplitSpec::new(Graph::path(6).unwrap(), vec![0], 4).unwrap();
        let set = h_set(&split, spec.clone()).unwrap();
        let mut g = vec![1.0; spec.dim()];
        set.gradient(2, spec.b(), &mut g);
        assert!(g.iter().all(|v| *v == 0.0));
        assert_eq!(mean_value(&set, spec.b()), 0.0);
    }
}
