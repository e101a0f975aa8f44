//! Matrix cocycles: ordered products `A_{w_n} ⋯ A_{w_1}`, their norms,
//! Lyapunov estimates against cylinder measures, and singular values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs::CylinderMeasure;
use crate::numeric::ExtReal;
use crate::parallel;
use crate::word::Symbol;

/// Products are rescaled after this many factors.
/// Products are also rescaled as soon as an entry leaves this range.
const RESCALE_LO: f64 = 1e-150;
const RESCALE_HI: f64 = 1e150;

pub const RENORMALIZE_EVERY: usize = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    #[default]
    MaxRowSum,
    Spectral,
}

/// Square `d × d` matrices, stored row-major, one per symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily {
    d: usize,
    matrices: Vec<Vec<f64>>,
    norm: Norm,
}

impl MatrixFamily {
    /// `matrices[i]` is `A_{i+1}` as nested rows.
    pub fn new(matrices: Vec<Vec<Vec<f64>>>, norm: Norm) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidPotential("matrix family is empty".into()));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::DimensionMismatch("matrices must be at least 1x1".into()));
        }
        if norm == Norm::Spectral && d > 3 {
            return Err(Error::DimensionMismatch(format!(
                "spectral norm supports d <= 3, got d = {d}"
            )));
        }
        let mut flat = Vec::with_capacity(matrices.len());
        for (i, m) in matrices.iter().enumerate() {
            if m.len() != d || m.iter().any(|row| row.len() != d) {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {} is not {d}x{d}",
                    i + 1
                )));
            }
            let f: Vec<f64> = m.iter().flatten().copied().collect();
            if f.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidPotential(format!(
                    "matrix {} has a negative or non-finite entry",
                    i + 1
                )));
            }
            flat.push(f);
        }
        Ok(MatrixFamily {
            d,
            matrices: flat,
            norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn norm_kind(&self) -> Norm {
        self.norm
    }

    pub fn with_norm(&self, norm: Norm) -> Result<Self> {
        if norm == Norm::Spectral && self.d > 3 {
            return Err(Error::DimensionMismatch(format!(
                "spectral norm supports d <= 3, got d = {}",
                self.d
            )));
        }
        Ok(MatrixFamily {
            norm,
            ..self.clone()
        })
    }

    pub fn matrix(&self, s: Symbol) -> &[f64] {
        &self.matrices[s as usize - 1]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        self.matrices
            .iter()
            .map(|m| m.chunks(self.d).map(<[f64]>::to_vec).collect())
            .collect()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        match self.norm {
            Norm::MaxRowSum => max_row_sum(a, self.d),
            Norm::Spectral => singular_values(a, self.d).map_or(f64::NAN, |s| s[0]),
        }
    }

    /// Running product with a log scale factored out.
    pub fn start(&self) -> Product {
        let mut m = vec![0.0; self.d * self.d];
        for i in 0..self.d {
            m[i * self.d + i] = 1.0;
        }
        Product {
            m,
            log_scale: 0.0,
            steps: 0,
        }
    }

    /// `A_s · P`.
    pub fn push(&self, p: &Product, s: Symbol) -> Product {
        let d = self.d;
        let a = self.matrix(s);
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = a[i * d + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += aik * p.m[k * d + j];
                }
            }
        }
        let mut next = Product {
            m: out,
            log_scale: p.log_scale,
            steps: p.steps + 1,
        };
        let big = next.m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if next.steps % RENORMALIZE_EVERY == 0 || !(RESCALE_LO..=RESCALE_HI).contains(&big) {
            next.renormalize();
        }
        next
    }

    pub fn log_norm(&self, p: &Product) -> f64 {
        let n = self.norm(&p.m);
        if n > 0.0 {
            p.log_scale + n.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `log ‖A_{w_n} ⋯ A_{w_1}‖`; `-inf` for the zero product.
    pub fn cocycle_weight(&self, w: &[Symbol]) -> Result<f64> {
        if let Some(&s) = w.iter().find(|&&s| s == 0 || s as usize > self.len()) {
            return Err(Error::DimensionMismatch(format!(
                "symbol {s} has no matrix (family has {})",
                self.len()
            )));
        }
        Ok(self.log_weight_unchecked(w))
    }

    pub(crate) fn log_weight_unchecked(&self, w: &[Symbol]) -> f64 {
        let mut p = self.start();
        for &s in w {
            p = self.push(&p, s);
        }
        self.log_norm(&p)
    }
}

#[derive(Clone, Debug)]
pub struct Product {
    m: Vec<f64>,
    log_scale: f64,
    steps: usize,
}

impl Product {
    fn renormalize(&mut self) {
        let s = self.m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if s > 0.0 {
            for x in &mut self.m {
                *x /= s;
            }
            self.log_scale += s.ln();
        }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }
}

fn max_row_sum(a: &[f64], d: usize) -> f64 {
    a.chunks(d)
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Singular values `s₁ ≥ … ≥ s_d` of a row-major `d × d` matrix, `d ≤ 3`.
pub fn singular_values(a: &[f64], d: usize) -> Result<Vec<f64>> {
    if a.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "expected {} entries for a {d}x{d} matrix, got {}",
            d * d,
            a.len()
        )));
    }
    match d {
        1 => Ok(vec![a[0].abs()]),
        2 => {
            let (p, q, r, s) = (a[0], a[1], a[2], a[3]);
            // AᵀA = [[p²+r², pq+rs], [pq+rs, q²+s²]]
            let t = p * p + q * q + r * r + s * s;
            let det = (p * s - q * r).abs();
            let disc = ((t - 2.0 * det) * (t + 2.0 * det)).max(0.0).sqrt();
            let s1 = ((t + disc) / 2.0).sqrt();
            let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
            Ok(vec![s1, s2])
        }
        3 => {
            let mut g = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    g[i * 3 + j] = (0..3).map(|k| a[k * 3 + i] * a[k * 3 + j]).sum();
                }
            }
            let mut ev = sym3_eigenvalues(&g);
            ev.sort_by(|x, y| y.total_cmp(x));
            Ok(ev.iter().map(|&l| l.max(0.0).sqrt()).collect())
        }
        _ => Err(Error::DimensionMismatch(format!(
            "singular values are supported for d <= 3, got d = {d}"
        ))),
    }
}

/// Eigenvalues of a symmetric 3×3 matrix (trigonometric method).
fn sym3_eigenvalues(m: &[f64; 9]) -> [f64; 3] {
    let p1 = m[1] * m[1] + m[2] * m[2] + m[5] * m[5];
    let q = (m[0] + m[4] + m[8]) / 3.0;
    if p1 == 0.0 {
        return [m[0], m[4], m[8]];
    }
    let p2 = (m[0] - q).powi(2) + (m[4] - q).powi(2) + (m[8] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Vec<f64> = (0..9)
        .map(|i| {
            let diag = if i % 4 == 0 { q } else { 0.0 };
            (m[i] - diag) / p
        })
        .collect();
    let det_b = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6])
        + b[2] * (b[3] * b[7] - b[4] * b[6]);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Measure against which a Lyapunov average is taken.
#[derive(Clone, Copy, Debug)]
pub enum LyapunovMeasure<'a> {
    /// Product measure on the full shift over `probs.len()` symbols.
    Bernoulli(&'a [f64]),
    Table(&'a CylinderMeasure),
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovRow {
    pub n: usize,
    /// `Σ m([w]) log ‖A_w‖` over `B_n`.
    pub mean_log_norm: ExtReal,
    /// `(1/n) · mean_log_norm`.
    pub estimate: ExtReal,
    /// `mean_log_norm(n) − mean_log_norm(n−1)`.
    pub increment: ExtReal,
    /// `min_{m ≤ n} mean_log_norm(m) / m`.
    pub envelope: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct LyapunovReport {
    pub norm: Norm,
    pub rows: Vec<LyapunovRow>,
    /// Last increment `a_n − a_{n−1}` of `a_k = Σ m([w]) log ‖A_w‖`. The
    /// `1/n` average carries an `O(1/n)` bias that the difference cancels.
    pub lambda: ExtReal,
    /// `a_n / n` at the largest `n`.
    pub lambda_average: ExtReal,
}

/// Accumulate `Σ prob · log‖A_w‖` for every length `1..=n` by a depth-first
/// walk over the full shift on `probs.len()` symbols.
fn bernoulli_sums(mf: &MatrixFamily, probs: &[f64], n: usize) -> Vec<f64> {
    fn walk(
        mf: &MatrixFamily,
        probs: &[f64],
        depth: usize,
        n: usize,
        prob: f64,
        p: &Product,
        acc: &mut [f64],
    ) {
        let ln = mf.log_norm(p);
        acc[depth - 1] += if ln == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            prob * ln
        };
        if depth == n {
            return;
        }
        for (i, &q) in probs.iter().enumerate() {
            if q > 0.0 {
                let next = mf.push(p, i as Symbol + 1);
                walk(mf, probs, depth + 1, n, prob * q, &next, acc);
            }
        }
    }
    let firsts: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
    let parts = parallel::map_ordered(&firsts, |&i| {
        let mut acc = vec![0.0; n];
        let p = mf.push(&mf.start(), i as Symbol + 1);
        walk(mf, probs, 1, n, probs[i], &p, &mut acc);
        acc
    });
    let mut total = vec![0.0; n];
    for part in parts {
        for (t, x) in total.iter_mut().zip(part) {
            *t += x;
        }
    }
    total
}

/// `(1/k) Σ_{w ∈ B_k} m([w]) log ‖A_w‖` for `k = 1..=n`.
pub fn lyapunov_estimate(
    measure: LyapunovMeasure<'_>,
    mf: &MatrixFamily,
    n: usize,
) -> Result<LyapunovReport> {
    if n == 0 {
        return Err(Error::Degenerate("lyapunov estimate needs n >= 1".into()));
    }
    let sums = match measure {
        LyapunovMeasure::Bernoulli(probs) => {
            if probs.len() > mf.len() {
                return Err(Error::DimensionMismatch(format!(
                    "measure has {} symbols, family has {} matrices",
                    probs.len(),
                    mf.len()
                )));
            }
            let total: f64 = probs.iter().sum();
            if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidPotential(
                    "Bernoulli weights must be nonnegative and sum to 1".into(),
                ));
            }
            bernoulli_sums(mf, probs, n)
        }
        LyapunovMeasure::Table(m) => {
            if n > m.depth() {
                return Err(Error::Degenerate(format!(
                    "n = {n} exceeds measure depth {}",
                    m.depth()
                )));
            }
            let mut out = Vec::with_capacity(n);
            for k in 1..=n {
                let mk = m.marginal(k)?;
                let mut acc = 0.0;
                for (w, &p) in mk.words().iter().zip(mk.masses()) {
                    if p <= 0.0 {
                        continue;
                    }
                    let ln = mf.cocycle_weight(w.symbols())?;
                    acc += if ln == f64::NEG_INFINITY {
                        f64::NEG_INFINITY
                    } else {
                        p * ln
                    };
                }
                out.push(acc);
            }
            out
        }
    };
    let mut rows = Vec::with_capacity(n);
    let mut envelope = f64::INFINITY;
    for (i, &a) in sums.iter().enumerate() {
        let k = i + 1;
        let est = a / k as f64;
        envelope = envelope.min(est);
        let inc = if i == 0 { a } else { a - sums[i - 1] };
        rows.push(LyapunovRow {
            n: k,
            mean_log_norm: ExtReal(a),
            estimate: ExtReal(est),
            increment: ExtReal(inc),
            envelope: ExtReal(envelope),
        });
    }
    let last = rows.last().expect("n >= 1");
    Ok(LyapunovReport {
        norm: mf.norm,
        lambda: last.increment,
        lambda_average: last.estimate,
        rows,
    })
}
