use std::collections::{BTreeSet, VecDeque};

use super::TopologyError;

/// Undirected weighted graph on nodes `0..n`. Edges are stored once with
/// `u < v`; `weights[k]` belongs to `edges[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples (0-based). Duplicate edges and
    /// self-loops are rejected.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, TopologyError> {
        if n == 0 {
            return Err(TopologyError::Invalid("graph needs at least one node".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(TopologyError::Invalid(format!("edge ({u}, {v}) references a node outside 0..{n}")));
            }
            if u == v {
                return Err(TopologyError::Invalid(format!("self-loop at node {u}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(TopologyError::Invalid(format!("edge ({u}, {v}) has invalid weight {w}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(TopologyError::Invalid(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            out.push(e);
            weights.push(w);
        }
        Ok(Self { n, edges: out, weights })
    }

    /// Path `0 - 1 - … - n-1` with unit weights.
    pub fn path(n: usize) -> Result<Self, TopologyError> {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::new(n, &e)
    }

    pub fn complete(n: usize) -> Result<Self, TopologyError> {
        let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0))).collect();
        Self::new(n, &e)
    }

    pub fn ring(n: usize) -> Result<Self, TopologyError> {
        if n < 3 {
            return Err(TopologyError::Invalid(format!("ring needs n >= 3, got {n}")));
        }
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        e.push((n - 1, 0, 1.0));
        Self::new(n, &e)
    }

    /// Parses `linear:<n>`, `complete:<n>` or `ring:<n>`.
    pub fn preset(spec: &str) -> Result<Self, TopologyError> {
        let (kind, n) = spec
            .split_once(':')
            .ok_or_else(|| TopologyError::Invalid(format!("topology preset `{spec}` is not kind:n")))?;
        let n: usize = n.trim().parse().map_err(|_| TopologyError::Invalid(format!("bad node count in `{spec}`")))?;
        match kind.trim() {
            "linear" | "path" => Self::path(n),
            "complete" => Self::complete(n),
            "ring" => Self::ring(n),
            other => Err(TopologyError::Invalid(format!("unknown topology kind `{other}`"))),
        }
    }

    /// Parses an edge list with one `u v [weight]` per line, 1-based node
    /// labels. Blank lines and `#` comments are ignored. The node count is the
    /// largest label seen unless `n` is given.
    pub fn parse_edge_list(text: &str, n: Option<usize>) -> Result<Self, TopologyError> {
        let mut edges = Vec::new();
        let mut max_node = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| TopologyError::Parse { line: lineno + 1, message: what.to_owned() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(bad("expected `u v [weight]`"));
            }
            let u: usize = fields[0].parse().map_err(|_| bad("node label is not an integer"))?;
            let v: usize = fields[1].parse().map_err(|_| bad("node label is not an integer"))?;
            if u == 0 || v == 0 {
                return Err(bad("node labels are 1-based"));
            }
            let w: f64 = match fields.get(2) {
                Some(s) => s.parse().map_err(|_| bad("weight is not a number"))?,
                None => 1.0,
            };
            max_node = max_node.max(u).max(v);
            edges.push((u - 1, v - 1, w));
        }
        let n = n.unwrap_or(max_node);
        Self::new(n, &edges)
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.contains(&e)
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (&(u, v), &w) in self.edges.iter().zip(&self.weights) {
            if w > 0.0 {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj
    }

    /// Hop distances from the nearest of `sources` over positively weighted
    /// edges; unreachable nodes get `None`.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let adj = self.neighbors();
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if s < self.n && dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(&[0]).iter().all(Option::is_some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_expected_edges() {
        assert_eq!(Graph::preset("linear:4").unwrap().edges().len(), 3);
        assert_eq!(Graph::preset("complete:5").unwrap().edges().len(), 10);
        assert_eq!(Graph::preset("ring:6").unwrap().edges().len(), 6);
        assert!(Graph::preset("torus:4").is_err());
        assert!(Graph::preset("ring").is_err());
    }

    #[test]
    fn edge_list_is_one_based_with_optional_weight() {
        let g = Graph::parse_edge_list("# comment\n1 2\n2 3 0.5\n\n", None).unwrap();
        assert_eq!(g.nodes(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.weights(), &[1.0, 0.5]);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let err = Graph::parse_edge_list("1 2\n0 3\n", None).unwrap_err();
        assert_eq!(err, TopologyError::Parse { line: 2, message: "node labels are 1-based".into() });
        assert!(Graph::parse_edge_list("1 2\n2 1\n", None).is_err());
        assert!(Graph::parse_edge_list("1 1\n", None).is_err());
    }

    #[test]
    fn bfs_multi_source() {
        let g = Graph::path(6).unwrap();
        let d = g.bfs_distances(&[0, 5]);
        assert_eq!(d, vec![Some(0), Some(1), Some(2), Some(2), Some(1), Some(0)]);
    }

    #[test]
    fn zero_weight_edge_disconnects() {
        let g = Graph::new(3, &[(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        assert!(!g.is_connected());
        assert!(Graph::path(3).unwrap().is_connected());
    }
}
