use std::sync::Arc;

use super::chain::{ChainPart, ChainSpec};
use super::InstanceError;
use crate::objectives::{Constants, LocalObjectiveSet, OptimalValue, ScalarField};

/// `w_r · r(x) + w_q1 · q1(b − x) + w_q2 · q2(b − x) + w_q · q(b − x)`.
///
/// `g_{T,t}` is `w_q = w_r = 1`; the local pieces of the network split use
/// the `q1`/`q2` weights.
#[derive(Debug, Clone)]
pub struct ChainField {
    spec: Arc<ChainSpec>,
    pub w_r: f64,
    pub w_q: f64,
    pub w_q1: f64,
    pub w_q2: f64,
}

impl ChainField {
    /// `g_{T,t}`.
    pub fn g(spec: Arc<ChainSpec>) -> Self {
        Self { spec, w_r: 1.0, w_q: 1.0, w_q1: 0.0, w_q2: 0.0 }
    }

    /// A weighted combination of `r`, `q1` and `q2`; needs an even block length
    /// when a split weight is nonzero.
    pub fn split(spec: Arc<ChainSpec>, w_r: f64, w_q1: f64, w_q2: f64) -> Result<Self, InstanceError> {
        if (w_q1 != 0.0 || w_q2 != 0.0) && !spec.supports_split() {
            return Err(InstanceError::Invalid(format!(
                "the q1/q2 split needs an even block length, got T = {}",
                spec.block_len()
            )));
        }
        Ok(Self { spec, w_r, w_q: 0.0, w_q1, w_q2 })
    }

    pub fn spec(&self) -> &Arc<ChainSpec> {
        &self.spec
    }
}

impl ScalarField for ChainField {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s = &self.spec;
        let mut v = 0.0;
        if self.w_r != 0.0 {
            v += self.w_r * s.r_value_unchecked(x);
        }
        for (w, part) in [(self.w_q, ChainPart::Full), (self.w_q1, ChainPart::Q1), (self.w_q2, ChainPart::Q2)] {
            if w != 0.0 {
                v += w * s.q_shifted_value(part, x);
            }
        }
        v
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let s = &self.spec;
        if self.w_r != 0.0 {
            s.r_grad_add(x, self.w_r, out);
        }
        for (w, part) in [(self.w_q, ChainPart::Full), (self.w_q1, ChainPart::Q1), (self.w_q2, ChainPart::Q2)] {
            if w != 0.0 {
                s.q_shifted_grad_add(part, x, w, out);
            }
        }
    }
}

/// `α · base(β x)`.
#[derive(Debug, Clone)]
pub struct Scaled<F> {
    pub base: F,
    pub alpha: f64,
    pub beta: f64,
}

impl<F: ScalarField> Scaled<F> {
    pub fn new(base: F, alpha: f64, beta: f64) -> Result<Self, InstanceError> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(InstanceError::Invalid(format!(
                "scales must be positive and finite, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(Self { base, alpha, beta })
    }

    /// Constants after scaling: `(L, μ, inf) → (αβ²L, αβ²μ, α·inf)` and the
    /// length scale divided by `β`.
    pub fn scale_constants(&self, c: &Constants) -> Constants {
        let ab2 = self.alpha * self.beta * self.beta;
        Constants {
            smoothness: c.smoothness.map(|l| ab2 * l),
            pl: c.pl.map(|m| ab2 * m),
            f_star: match c.f_star {
                OptimalValue::Known(v) => OptimalValue::Known(self.alpha * v),
                OptimalValue::Unknown => OptimalValue::Unknown,
            },
            length_scale: c.length_scale / self.beta,
        }
    }
}

impl<F: ScalarField> ScalarField for Scaled<F> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let bx: Vec<f64> = x.iter().map(|v| self.beta * v).collect();
        self.alpha * self.base.value(&bx)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let bx: Vec<f64> = x.iter().map(|v| self.beta * v).collect();
        self.base.gradient(&bx, out);
        let ab = self.alpha * self.beta;
        out.iter_mut().for_each(|g| *g *= ab);
    }
}

/// `f_i(x) = base(x[i m .. (i+1) m])` over `R^{mn}`.
#[derive(Debug, Clone)]
pub struct BlockEmbedded<F> {
    base: F,
    n: usize,
    constants: Constants,
}

impl<F: ScalarField> BlockEmbedded<F> {
    /// `base_constants` are the smoothness, PL constant and infimum of `base`;
    /// the set declares `L̂/√n`, `μ̂/n` and the same infimum.
    pub fn new(base: F, n: usize, base_constants: &Constants) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Invalid("block embedding needs n >= 1".into()));
        }
        let nf = n as f64;
        let constants = Constants {
            smoothness: base_constants.smoothness.map(|l| l / nf.sqrt()),
            pl: base_constants.pl.map(|m| m / nf),
            f_star: base_constants.f_star,
            length_scale: base_constants.length_scale,
        };
        Ok(Self { base, n, constants })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn block(&self, agent: usize) -> std::ops::Range<usize> {
        let m = self.base.dim();
        agent * m..(agent + 1) * m
    }
}

impl<F: ScalarField> LocalObjectiveSet for BlockEmbedded<F> {
    fn agents(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.base.dim() * self.n
    }

    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        self.base.value(&x[self.block(agent)])
    }

    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let r = self.block(agent);
        self.base.gradient(&x[r.clone()], &mut out[r]);
    }

    fn constants(&self) -> &Constants {
        &self.constants
    }
}

/// Agent `i` owns `fields[i]`, all over the same space.
#[derive(Debug, Clone)]
pub struct FieldSet<F> {
    fields: Vec<F>,
    constants: Constants,
}

impl<F: ScalarField> FieldSet<F> {
    pub fn new(fields: Vec<F>, constants: Constants) -> Result<Self, InstanceError> {
        let Some(first) = fields.first() else {
            return Err(InstanceError::Invalid("field set needs at least one agent".into()));
        };
        let d = first.dim();
        if fields.iter().any(|f| f.dim() != d) {
            return Err(InstanceError::Invalid("fields disagree on dimension".into()));
        }
        Ok(Self { fields, constants })
    }

    pub fn fields(&self) -> &[F] {
        &self.fields
    }
}

impl<F: ScalarField> LocalObjectiveSet for FieldSet<F> {
    fn agents(&self) -> usize {
        self.fields.len()
    }

    fn dim(&self) -> usize {
        self.fields[0].dim()
    }

    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        self.fields[agent].value(x)
    }

    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        self.fields[agent].gradient(x, out)
    }

    fn constants(&self) -> &Constants {
        &self.constants
    }
}

/// `f_i(x) = c⟨u_i, x⟩ + (L/2)‖x‖²` where `u_i` is the indicator of the
/// `i`-th run of `2n` coordinates in `R^{2n²}`.
#[derive(Debug, Clone)]
pub struct LinearSpan {
    n: usize,
    c: f64,
    l: f64,
    constants: Constants,
}

impl LinearSpan {
    pub(crate) fn new(n: usize, c: f64, l: f64, constants: Constants) -> Self {
        Self { n, c, l, constants }
    }

    pub fn support(&self, agent: usize) -> std::ops::Range<usize> {
        let w = 2 * self.n;
        agent * w..(agent + 1) * w
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `−c/(nL) · 1`.
    pub fn minimizer(&self) -> Vec<f64> {
        vec![-self.c / (self.n as f64 * self.l); self.dim()]
    }
}

impl LocalObjectiveSet for LinearSpan {
    fn agents(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        2 * self.n * self.n
    }

    fn value(&self, agent: usize, x: &[f64]) -> f64 {
        let lin: f64 = x[self.support(agent)].iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        self.c * lin + 0.5 * self.l * sq
    }

    fn gradient(&self, agent: usize, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = self.l * v;
        }
        for o in &mut out[self.support(agent)] {
            *o += self.c;
        }
    }

    fn constants(&self) -> &Constants {
        &self.constants
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::mean_objective_gap;

    fn g22() -> ChainField {
        ChainField::g(Arc::new(ChainSpec::new(2, 2).unwrap()))
    }

    fn g_constants(t_blk: usize) -> Constants {
        Constants {
            smoothness: Some(37.0),
            pl: Some(1.0 / (super::super::PL_CONST_A * t_blk as f64)),
            f_star: OptimalValue::Known(0.0),
            length_scale: 1.0,
        }
    }

    #[test]
    fn scaling_identity_and_gap() {
        let g = g22();
        let one = Scaled::new(g.clone(), 1.0, 1.0).unwrap();
        let x = [0.3, -0.2, 0.5, 1.1];
        assert_eq!(one.value(&x), g.value(&x));
        let two = Scaled::new(g, 2.0, 1.0).unwrap();
        assert!((two.value(&[0.0; 4]) - 4.4208984375).abs() < 1e-14);
        assert!(Scaled::new(g22(), 0.0, 1.0).is_err());
        assert!(Scaled::new(g22(), 1.0, -1.0).is_err());
    }

    #[test]
    fn scaled_constants_transform() {
        let s = Scaled::new(g22(), 2.0, 3.0).unwrap();
        let c = s.scale_constants(&g_constants(2));
        assert_eq!(c.smoothness, Some(2.0 * 9.0 * 37.0));
        assert_eq!(c.length_scale, 1.0 / 3.0);
    }

    #[test]
    fn block_embedding_matches_single_block_gap() {
        let set = BlockEmbedded::new(g22(), 3, &g_constants(2)).unwrap();
        assert_eq!(set.dim(), 12);
        let gap = mean_objective_gap(&set, &[0.0; 12]).unwrap();
        assert!((gap - 2.21044921875).abs() < 1e-14);
        assert!((set.constants().smoothness.unwrap() - 37.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn block_gradient_is_block_supported() {
        let set = BlockEmbedded::new(g22(), 3, &g_constants(2)).unwrap();
        let x: Vec<f64> = (0..12).map(|k| 0.1 * k as f64).collect();
        let mut g = vec![1.0; 12];
        set.gradient(1, &x, &mut g);
        for (k, v) in g.iter().enumerate() {
            if !(4..8).contains(&k) {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(g[4..8].iter().any(|v| *v != 0.0));
    }

    #[test]
    fn single_block_is_base() {
        let set = BlockEmbedded::new(g22(), 1, &g_constants(2)).unwrap();
        let x = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(set.value(0, &x), g22().value(&x));
    }

    #[test]
    fn split_field_needs_even_block() {
        let spec = Arc::new(ChainSpec::new(3, 2).unwrap());
        assert!(ChainField::split(spec.clone(), 1.0, 1.0, 0.0).is_err());
        assert!(ChainField::split(spec, 1.0, 0.0, 0.0).is_ok());
    }
}
