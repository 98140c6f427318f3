use super::losses::Loss;
use super::RegressionError;
use crate::numkit::RandomStream;

/// Sparse rows `a_j` (0-based feature indices) with labels `b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    d: usize,
    rows: Vec<Vec<(usize, f64)>>,
    labels: Vec<f64>,
    /// Generating parameter for synthetic data.
    pub x_true: Option<Vec<f64>>,
}

impl Dataset {
    pub fn new(d: usize, rows: Vec<Vec<(usize, f64)>>, labels: Vec<f64>) -> Result<Self, RegressionError> {
        if rows.len() != labels.len() {
            return Err(RegressionError::Invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        for (j, row) in rows.iter().enumerate() {
            if let Some(&(k, _)) = row.iter().find(|(k, _)| *k >= d) {
                return Err(RegressionError::Invalid(format!("sample {j} has feature {} beyond dimension {d}", k + 1)));
            }
            if row.iter().any(|(_, v)| !v.is_finite()) || !labels[j].is_finite() {
                return Err(RegressionError::Invalid(format!("sample {j} is not finite")));
            }
        }
        Ok(Self { d, rows, labels, x_true: None })
    }

    pub fn samples(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, j: usize) -> &[(usize, f64)] {
        &self.rows[j]
    }

    pub fn label(&self, j: usize) -> f64 {
        self.labels[j]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// `a_jᵀ x`.
    pub fn dot(&self, j: usize, x: &[f64]) -> f64 {
        self.rows[j].iter().map(|&(k, v)| v * x[k]).sum()
    }

    pub fn dense_row(&self, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        for &(k, v) in &self.rows[j] {
            out[k] = v;
        }
        out
    }
}

/// Parses `label idx:val idx:val …` lines with 1-based strictly increasing
/// indices. Blank lines are skipped. `d` defaults to the largest index seen.
pub fn parse_libsvm(text: &str, d: Option<usize>) -> Result<Dataset, RegressionError> {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut max_idx = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| RegressionError::Parse { line: lineno + 1, message };
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().unwrap_or_default();
        let label: f64 = label_tok.parse().map_err(|_| err(format!("label `{label_tok}` is not a number")))?;
        if !label.is_finite() {
            return Err(err(format!("label `{label_tok}` is not finite")));
        }
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok.split_once(':').ok_or_else(|| err(format!("token `{tok}` is not idx:val")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("index `{idx}` is not a positive integer")))?;
            if idx == 0 {
                return Err(err("feature indices are 1-based".into()));
            }
            if idx == last {
                return Err(err(format!("duplicate index {idx}")));
            }
            if idx < last {
                return Err(err(format!("index {idx} follows {last}; indices must increase")));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("value `{val}` is not a number")))?;
            if !val.is_finite() {
                return Err(err(format!("value `{val}` is not finite")));
            }
            last = idx;
            max_idx = max_idx.max(idx);
            row.push((idx - 1, val));
        }
        rows.push(row);
        labels.push(label);
    }
    let d = match d {
        Some(d) if d < max_idx => {
            return Err(RegressionError::Invalid(format!("dimension {d} is smaller than the largest index {max_idx}")))
        }
        Some(d) => d,
        None => max_idx,
    };
    Dataset::new(d, rows, labels)
}

/// Dense features `a_j ~ N(0, I/d)`, `x_true ~ N(0, I)`. Square-loss labels are
/// `a_jᵀ x_true + noise · N(0, 1)`; logistic labels are `sign(a_jᵀ x_true)`
/// (ties go to +1) with the label flipped with probability `noise`.
pub fn synth_regression(m: usize, d: usize, noise: f64, seed: u64, loss: Loss) -> Result<Dataset, RegressionError> {
    if m == 0 || d == 0 {
        return Err(RegressionError::Invalid(format!("need m, d >= 1, got m = {m}, d = {d}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(RegressionError::Invalid(format!("noise must be non-negative, got {noise}")));
    }
    let mut rng = RandomStream::new(seed);
    let x_true: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
    let scale = 1.0 / (d as f64).sqrt();
    let mut rows = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let row: Vec<(usize, f64)> = (0..d).map(|k| (k, scale * rng.standard_normal())).collect();
        let z: f64 = row.iter().map(|&(k, v)| v * x_true[k]).sum();
        let label = match loss {
            Loss::Square => z + noise * rng.standard_normal(),
            Loss::Logistic => {
                let s = if z >= 0.0 { 1.0 } else { -1.0 };
                if rng.bernoulli(noise.min(1.0)) {
                    -s
                } else {
                    s
                }
            }
        };
        rows.push(row);
        labels.push(label);
    }
    let mut ds = Dataset::new(d, rows, labels)?;
    ds.x_true = Some(x_true);
    Ok(ds)
}
