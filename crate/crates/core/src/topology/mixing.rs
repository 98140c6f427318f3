use super::{Graph, TopologyError};
use crate::numkit::{symmetric_eigenvalues, DenseMatrix, DEFAULT_EIGEN_TOL};

/// Symmetric doubly stochastic gossip matrix with its cached spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    w: DenseMatrix,
    eigenvalues: Vec<f64>,
    lambda2: f64,
    gap: f64,
    rows: Vec<Vec<(usize, f64)>>,
}

impl MixingMatrix {
    /// Wraps an arbitrary symmetric matrix and measures its spectrum. No
    /// clause of the mixing assumption is enforced here; see
    /// [`validate_mixing`]. A single node has no disagreement subspace and
    /// gets `λ2 = 0`.
    pub fn from_dense(w: DenseMatrix) -> Result<Self, TopologyError> {
        if !w.is_square() || w.rows() < 1 {
            return Err(TopologyError::Invalid(format!(
                "mixing matrix must be square and non-empty, got {}x{}",
                w.rows(),
                w.cols()
            )));
        }
        let eigenvalues = symmetric_eigenvalues(&w, DEFAULT_EIGEN_TOL)?;
        let lambda2 = eigenvalues.get(1).copied().unwrap_or(0.0);
        let rows = (0..w.rows())
            .map(|i| w.row(i).iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect())
            .collect();
        Ok(Self { gap: 1.0 - lambda2, w, eigenvalues, lambda2, rows })
    }

    pub fn nodes(&self) -> usize {
        self.w.rows()
    }

    pub fn dense(&self) -> &DenseMatrix {
        &self.w
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `1 − λ2(W)`.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Nonzero entries of each row as `(column, value)`.
    pub fn sparse_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// `W·Y` for an `n × d` matrix `Y`, one communication round.
    pub fn apply(&self, y: &DenseMatrix) -> Result<DenseMatrix, TopologyError> {
        if y.rows() != self.nodes() {
            return Err(TopologyError::Invalid(format!(
                "cannot mix {} rows with a {}-node matrix",
                y.rows(),
                self.nodes()
            )));
        }
        let mut out = DenseMatrix::zeros(y.rows(), y.cols());
        for (i, row) in self.rows.iter().enumerate() {
            let dst = out.row_mut(i);
            for &(j, wij) in row {
                dst.iter_mut().zip(y.row(j)).for_each(|(o, v)| *o += wij * v);
            }
        }
        Ok(out)
    }
}

/// `W = I − R/λ1(R)` where `R` is the weighted Laplacian of `graph`.
pub fn laplacian_mixing(graph: &Graph) -> Result<MixingMatrix, TopologyError> {
    let n = graph.nodes();
    if n < 2 {
        return Err(TopologyError::Invalid("mixing needs at least two nodes".into()));
    }
    if !graph.is_connected() {
        return Err(TopologyError::Disconnected);
    }
    let mut r = DenseMatrix::zeros(n, n);
    for (&(u, v), &w) in graph.edges().iter().zip(graph.weights()) {
        r.set(u, v, r.get(u, v) - w);
        r.set(v, u, r.get(v, u) - w);
        r.set(u, u, r.get(u, u) + w);
        r.set(v, v, r.get(v, v) + w);
    }
    let lambda1 = symmetric_eigenvalues(&r, DEFAULT_EIGEN_TOL)?[0];
    // Off-diagonals first, then the diagonal as the row-sum complement so that
    // W·1 = 1 holds to rounding.
    let mut w = DenseMatrix::zeros(n, n);
    for (&(u, v), &wt) in graph.edges().iter().zip(graph.weights()) {
        w.set(u, v, wt / lambda1);
        w.set(v, u, wt / lambda1);
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| w.get(i, j)).sum();
        w.set(i, i, 1.0 - off);
    }
    MixingMatrix::from_dense(w)
}

/// `ι_m = (1 − cos(π/m)) / (1 + cos(π/m))`, the spectral gap of the unit path
/// on `m` nodes.
pub fn iota(m: usize) -> f64 {
    assert!(m >= 2, "iota needs m >= 2");
    if m == 2 {
        return 1.0;
    }
    // tan²(x/2) = (1 − cos x)/(1 + cos x) without the cancellation for large m.
    (std::f64::consts::PI / (2.0 * m as f64)).tan().powi(2)
}

/// Largest `m ≥ 2` with `ι_m ≥ γ`, up to a relative slack of 1e-12 so that
/// `γ = ι_m` computed elsewhere still selects `m`.
pub fn path_length_for_gap(gamma: f64) -> usize {
    let c = (1.0 - gamma) / (1.0 + gamma);
    let approx = (std::f64::consts::PI / c.acos()).floor();
    let mut m = if approx.is_finite() { (approx as usize).max(2) } else { usize::MAX / 2 };
    let ok = |m: usize| iota(m) >= gamma * (1.0 - 1e-12);
    while m > 2 && !ok(m) {
        m -= 1;
    }
    while ok(m + 1) {
        m += 1;
    }
    m
}

/// Result of hitting a target gap with the two-parameter graph families.
#[derive(Debug, Clone)]
pub struct GapConstruction {
    pub mixing: MixingMatrix,
    pub graph: Graph,
    /// Bracket index `m` with `ι_{m+1} < γ ≤ ι_m`.
    pub m: usize,
    /// Weight parameter found by bisection.
    pub l: f64,
}

/// Largest node count `mixing_for_gap` will build.
pub const MAX_GAP_NODES: usize = 4096;
const MAX_BISECTION_ITERS: usize = 200;

fn weighted_path(m: usize, l: f64) -> Result<Graph, TopologyError> {
    let e: Vec<_> = (1..m).map(|i| (i - 1, i, if i == 1 { 1.0 - l } else { 1.0 })).collect();
    Graph::new(m, &e)
}

fn weighted_triangle(l: f64) -> Result<Graph, TopologyError> {
    Graph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, l)])
}

/// Builds a mixing matrix whose gap lies in `[γ, γ + tol]`.
///
/// For `m ≥ 3` this is a path on `m` nodes whose first edge has weight
/// `1 − l`; for `m = 2` it is a triangle whose edge `(1, 3)` has weight `l`.
/// `l` is found by bisection, keeping the endpoint whose gap is `≥ γ`.
pub fn mixing_for_gap(gamma: f64, tol: f64) -> Result<GapConstruction, TopologyError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(TopologyError::Invalid(format!("target gap {gamma} outside (0, 1]")));
    }
    if !(tol > 0.0) {
        return Err(TopologyError::Invalid(format!("tolerance {tol} must be positive")));
    }
    let m = path_length_for_gap(gamma);
    if m > MAX_GAP_NODES {
        return Err(TopologyError::Invalid(format!(
            "target gap {gamma} needs {m} nodes, above the limit of {MAX_GAP_NODES}"
        )));
    }
    let build = |l: f64| -> Result<(Graph, MixingMatrix), TopologyError> {
        let g = if m >= 3 { weighted_path(m, l)? } else { weighted_triangle(l)? };
        let w = laplacian_mixing(&g)?;
        Ok((g, w))
    };
    // Endpoint whose gap is ≥ γ: l = 0 for paths (gap ι_m), l = 1 for the
    // triangle (gap 1). The other end has gap below γ.
    let (mut good, mut bad) = if m >= 3 { (0.0, 1.0) } else { (1.0, 0.0) };
    let (mut g, mut w) = build(good)?;
    if w.gap() - gamma <= tol {
        return Ok(GapConstruction { mixing: w, graph: g, m, l: good });
    }
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = 0.5 * (good + bad);
        let (gm, wm) = build(mid)?;
        if wm.gap() >= gamma {
            good = mid;
            g = gm;
            w = wm;
            if w.gap() - gamma <= tol {
                return Ok(GapConstruction { mixing: w, graph: g, m, l: good });
            }
        } else {
            bad = mid;
        }
    }
    Err(TopologyError::NoConvergence { gamma, iterations: MAX_BISECTION_ITERS, achieved: w.gap() })
}

/// One clause of the mixing assumption with its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseCheck {
    pub clause: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub clauses: Vec<ClauseCheck>,
    pub gap: f64,
}

impl MixingReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseCheck> {
        self.clauses.iter().find(|c| c.clause == name)
    }
}

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const ROW_SUM_TOL: f64 = 1e-12;
pub const SPECTRUM_TOL: f64 = 1e-10;
pub const PATTERN_TOL: f64 = 1e-12;
pub const GAP_TOL: f64 = 1e-12;

/// Checks symmetry, unit row sums, spectrum in `[0, 1]`, the sparsity pattern
/// against `graph`, and `1 − λ2 ≥ γ`.
pub fn validate_mixing(w: &MixingMatrix, graph: &Graph, gamma: f64) -> MixingReport {
    let m = w.dense();
    let n = m.rows();
    let clause =
        |clause, residual: f64, tolerance| ClauseCheck { clause, passed: residual <= tolerance, residual, tolerance };
    let sym = m.symmetry_residual();
    let rows = (0..n).map(|i| (m.row(i).iter().sum::<f64>() - 1.0).abs()).fold(0.0f64, f64::max);
    let ev = w.eigenvalues();
    let spec = ev.iter().map(|&l| (l - 1.0).max(-l).max(0.0)).fold(0.0f64, f64::max);
    // Entries off the graph pattern must vanish; entries on it (and the
    // diagonal) must not be negative.
    let mut pattern = 0.0f64;
    if graph.nodes() != n {
        pattern = f64::INFINITY;
    } else {
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                let allowed = i == j || graph.has_edge(i, j);
                let violation = if allowed { (-v).max(0.0) } else { v.abs() };
                pattern = pattern.max(violation);
            }
        }
    }
    let gap_short = (gamma - w.gap()).max(0.0);
    MixingReport {
        clauses: vec![
            clause("symmetric", sym, SYMMETRY_TOL),
            clause("row sums", rows, ROW_SUM_TOL),
            clause("spectrum in [0, 1]", spec, SPECTRUM_TOL),
            clause("sparsity pattern", pattern, PATTERN_TOL),
            clause("spectral gap", gap_short, GAP_TOL),
        ],
        gap: w.gap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_node_path_is_averaging() {
        let w = laplacian_mixing(&Graph::path(2).unwrap()).unwrap();
        for v in w.dense().data() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(w.gap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complete_three_has_unit_gap() {
        let w = laplacian_mixing(&Graph::complete(3).unwrap()).unwrap();
        assert_abs_diff_eq!(w.gap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn path_gap_matches_iota() {
        for m in [3, 5, 8, 32] {
            let w = laplacian_mixing(&Graph::path(m).unwrap()).unwrap();
            assert_abs_diff_eq!(w.gap(), iota(m), epsilon = 1e-10);
        }
    }

    #[test]
    fn iota_closed_forms() {
        assert_eq!(iota(2), 1.0);
        assert_abs_diff_eq!(iota(3), 1.0 / 3.0, epsilon = 1e-15);
        let c = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(iota(4), (1.0 - c) / (1.0 + c), epsilon = 1e-15);
        assert!((2..50).all(|m| iota(m + 1) < iota(m)));
    }

    #[test]
    fn path_length_inverts_iota() {
        assert_eq!(path_length_for_gap(0.0024), 32);
        assert_eq!(path_length_for_gap(1.0), 2);
        assert_eq!(path_length_for_gap(0.5), 2);
        for m in 2..40 {
            assert_eq!(path_length_for_gap(iota(m)), m);
        }
    }

    #[test]
    fn gap_endpoints() {
        let c = mixing_for_gap(iota(5), 1e-10).unwrap();
        assert_eq!((c.m, c.l, c.graph.nodes()), (5, 0.0, 5));
        let c = mixing_for_gap(1.0, 1e-10).unwrap();
        assert_eq!((c.m, c.l, c.graph.nodes()), (2, 1.0, 3));
        for v in c.mixing.dense().data() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gap_bisection_hits_target() {
        for gamma in [0.0024, 0.05, 0.2, 0.5, 0.9] {
            let c = mixing_for_gap(gamma, 1e-10).unwrap();
            assert!(c.mixing.gap() >= gamma && c.mixing.gap() - gamma <= 1e-10, "{gamma}");
            assert!(validate_mixing(&c.mixing, &c.graph, gamma).passed());
        }
        assert_eq!(mixing_for_gap(0.0024, 1e-10).unwrap().graph.nodes(), 32);
    }

    #[test]
    fn gap_is_deterministic() {
        let a = mixing_for_gap(0.1, 1e-10).unwrap();
        let b = mixing_for_gap(0.1, 1e-10).unwrap();
        assert_eq!(a.mixing, b.mixing);
    }

    #[test]
    fn gap_rejects_bad_input() {
        assert!(mixing_for_gap(0.0, 1e-10).is_err());
        assert!(mixing_for_gap(1.5, 1e-10).is_err());
        assert!(mixing_for_gap(0.5, 0.0).is_err());
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = Graph::new(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian_mixing(&g).unwrap_err(), TopologyError::Disconnected);
    }

    #[test]
    fn validation_catches_each_clause() {
        let g = Graph::path(4).unwrap();
        let w = laplacian_mixing(&g).unwrap();
        assert!(validate_mixing(&w, &g, iota(4)).passed());

        let mut bad = w.dense().clone();
        bad.set(0, 1, -bad.get(0, 1));
        let bad = MixingMatrix::from_dense(bad);
        // An asymmetric matrix may fail the eigensolver's symmetry check.
        if let Ok(bad) = bad {
            let r = validate_mixing(&bad, &g, 0.0);
            assert!(!r.clause("symmetric").unwrap().passed || !r.clause("sparsity pattern").unwrap().passed);
        }

        let mut neg = w.dense().clone();
        neg.set(0, 1, -neg.get(0, 1));
        neg.set(1, 0, -neg.get(1, 0));
        let r = validate_mixing(&MixingMatrix::from_dense(neg).unwrap(), &g, 0.0);
        assert!(!r.clause("sparsity pattern").unwrap().passed);
        assert!(!r.clause("row sums").unwrap().passed);

        let id = MixingMatrix::from_dense(DenseMatrix::identity(4)).unwrap();
        let r = validate_mixing(&id, &g, 1e-6);
        assert!(!r.clause("spectral gap").unwrap().passed);
        assert!(r.clause("symmetric").unwrap().passed);
    }

    #[test]
    fn apply_matches_dense_product() {
        let w = laplacian_mixing(&Graph::ring(5).unwrap()).unwrap();
        let y = DenseMatrix::from_vec(5, 2, (0..10).map(|v| v as f64).collect()).unwrap();
        let a = w.apply(&y).unwrap();
        let b = w.dense().matmul(&y).unwrap();
        assert!(a.frobenius_distance(&b) < 1e-14);
    }
}
