#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};

use plopt_core::numkit::RandomStream;
use plopt_core::objectives::{Constants, LocalObjectiveSet, OptimalValue};
use plopt_core::topology::Graph;

/// `f_i(x) = ½ Σ_j a_ij (x_j − c_ij)²` with diagonal curvatures `a_ij > 0`.
pub struct DiagQuadratics {
    pub curv: Vec<Vec<f64>>,
    pub centers: Vec<Vec<f64>>,
    pub constants: Constants,
}

impl DiagQuadratics {
    pub fn new(curv: Vec<Vec<f64>>, centers: Vec<Vec<f64>>) -> Self {
        let n = curv.len() as f64;
        let d = curv[0].len();
        let mut f_star = 0.0;
        let mut mu = f64::INFINITY;
        for j in 0..d {
            let asum: f64 = curv.iter().map(|a| a[j]).sum();
            let xs = curv.iter().zip(&centers).map(|(a, c)| a[j] * c[j]).sum::<f64>() / asum;
            f_star += curv.iter().zip(&centers).map(|(a, c)| 0.5 * a[j] * (xs - c[j]).powi(2)).sum::<f64>() / n;
            mu = mu.min(asum / n);
        }
        let l = (0..d).map(|j| (curv.iter().map(|a| a[j] * a[j]).sum::<f64>() / n).sqrt()).fold(0.0, f64::max);
        Self {
            curv,
            centers,
            constants: Constants {
                smoothness: Some(l),
                pl: Some(mu),
                f_star: OptimalValue::Known(f_star),
                length_scale: 1.0,
            },
        }
    }

    /// Random curvatures in `[lo, hi]` and centers in `[−2, 2]`.
    pub fn random(n: usize, d: usize, lo: f64, hi: f64, rng: &mut RandomStream) -> Self {
        let curv = (0..n).map(|_| (0..d).map(|_| lo + (hi - lo) * rng.uniform()).collect()).collect();
        let centers = (0..n).map(|_| rng.uniform_box(d, 2.0)).collect();
        Self::new(curv, centers)
    }

    /// All agents share the curvature vector `a`.
    pub fn shared(a: Vec<f64>, centers: Vec<Vec<f64>>) -> Self {
        Self::new(vec![a; centers.len()], centers)
    }
}

impl LocalObjectiveSet for DiagQuadratics {
    fn agents(&self) -> usize {
        self.curv.len()
    }
    fn dim(&self) -> usize {
        self.curv[0].len()
    }
    fn value(&self, i: usize, x: &[f64]) -> f64 {
        x.iter().zip(&self.curv[i]).zip(&self.centers[i]).map(|((x, a), c)| 0.5 * a * (x - c) * (x - c)).sum()
    }
    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        for ((o, x), (a, c)) in out.iter_mut().zip(x).zip(self.curv[i].iter().zip(&self.centers[i])) {
            *o = a * (x - c);
        }
    }
    fn constants(&self) -> &Constants {
        &self.constants
    }
}

/// Counts every gradient call independently of any meter.
pub struct Shadow<S> {
    pub inner: S,
    pub calls: AtomicU64,
}

impl<S> Shadow<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, calls: AtomicU64::new(0) }
    }
    pub fn count(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<S: LocalObjectiveSet> LocalObjectiveSet for Shadow<S> {
    fn agents(&self) -> usize {
        self.inner.agents()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, i: usize, x: &[f64]) -> f64 {
        self.inner.value(i, x)
    }
    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.gradient(i, x, out)
    }
    fn constants(&self) -> &Constants {
        self.inner.constants()
    }
}

/// A connected graph: a random spanning tree plus extra random edges, with
/// weights in `[0.2, 2]`.
pub fn random_connected(n: usize, extra: usize, rng: &mut RandomStream) -> Graph {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.below(v);
        seen.insert((u, v));
        edges.push((u, v, 0.2 + 1.8 * rng.uniform()));
    }
    for _ in 0..extra {
        let (a, b) = (rng.below(n), rng.below(n));
        let (u, v) = (a.min(b), a.max(b));
        if u != v && seen.insert((u, v)) {
            edges.push((u, v, 0.2 + 1.8 * rng.uniform()));
        }
    }
    Graph::new(n, &edges).expect("valid random graph")
}
