//! Finite-alphabet probability primitives.
//!
//! Every quantity here is reported in bits. The usual conventions hold:
//! `0·log 0 = 0`, `0·log(0/q) = 0` and `q·log(q/0) = +∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a validated pmf.
pub const NORM_TOL: f64 = 1e-12;

/// Inputs whose mass is off by at most this much are silently renormalized.
pub const RENORM_TOL: f64 = 1e-9;

pub(crate) const LN_2: f64 = std::f64::consts::LN_2;

/// `x·log₂ x` with the `0·log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

fn normalize(mut probs: Vec<f64>, what: &'static str) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    for (index, &v) in probs.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidProbability {
                what,
                index,
                value: v,
            });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > RENORM_TOL {
        return Err(Error::NotNormalized { what, sum });
    }
    if sum != 1.0 {
        probs.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(probs)
}

/// A probability mass function over `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates `probs`, renormalizing when the mass is within [`RENORM_TOL`] of one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Ok(Self {
            probs: normalize(probs, "pmf")?,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::IndexOutOfRange { index: at, size: n });
        }
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    /// Binary pmf `(1 - p1, p1)`.
    pub fn binary(p1: f64) -> Result<Self> {
        Self::new(vec![1.0 - p1, p1])
    }

    /// Builds a pmf from unnormalized non-negative weights.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::NotNormalized {
                what: "weights",
                sum,
            });
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    /// Expectation of `f` under this pmf.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.probs
            .iter()
            .zip(f)
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, v)| p * v)
            .sum()
    }

    pub fn l1_distance(&self, other: &Pmf) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn linf_distance(&self, other: &Pmf) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_uniform(&self, tol: f64) -> bool {
        let u = 1.0 / self.probs.len() as f64;
        self.probs.iter().all(|p| (p - u).abs() <= tol)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// A discrete memoryless channel `p(y|x)`, stored row-major by input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    rows: Vec<Vec<f64>>,
    output_size: usize,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let output_size = rows[0].len();
        let rows = rows
            .into_iter()
            .map(|r| {
                if r.len() != output_size {
                    return Err(Error::DimensionMismatch {
                        expected: output_size,
                        found: r.len(),
                    });
                }
                normalize(r, "channel row")
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, output_size })
    }

    /// Noiseless channel on `n` symbols.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|x| (0..n).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    /// `p(y|x)`
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    /// `H(Y | X = x)` in bits.
    pub fn row_entropy(&self, x: usize) -> f64 {
        -self.rows[x].iter().copied().map(xlog2x).sum::<f64>()
    }

    pub(crate) fn check_input(&self, p: &Pmf) -> Result<()> {
        if p.support_size() != self.input_size() {
            return Err(Error::DimensionMismatch {
                expected: self.input_size(),
                found: p.support_size(),
            });
        }
        Ok(())
    }
}

/// A joint pmf over `input × output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    probs: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.is_empty() || probs[0].is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let cols = probs[0].len();
        let mut sum = 0.0;
        for (index, row) in probs.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidProbability {
                        what: "joint pmf",
                        index,
                        value: v,
                    });
                }
                sum += v;
            }
        }
        if (sum - 1.0).abs() > RENORM_TOL {
            return Err(Error::NotNormalized {
                what: "joint pmf",
                sum,
            });
        }
        let probs = if sum != 1.0 {
            probs
                .into_iter()
                .map(|r| r.into_iter().map(|v| v / sum).collect())
                .collect()
        } else {
            probs
        };
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x][y]
    }

    pub fn input_size(&self) -> usize {
        self.probs.len()
    }

    pub fn output_size(&self) -> usize {
        self.probs[0].len()
    }

    /// Marginal over the input (summing out `y`).
    pub fn input_marginal(&self) -> Vec<f64> {
        self.probs.iter().map(|r| r.iter().sum()).collect()
    }

    /// Marginal over the output (summing out `x`).
    pub fn output_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.output_size()];
        for row in &self.probs {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }

    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .flatten()
            .copied()
            .map(xlog2x)
            .sum::<f64>()
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    -p.probs().iter().copied().map(xlog2x).sum::<f64>()
}

/// `D(q‖p)` in bits; `+∞` when `q` puts mass where `p` has none.
pub fn kl_divergence(q: &Pmf, p: &Pmf) -> Result<f64> {
    if q.support_size() != p.support_size() {
        return Err(Error::DimensionMismatch {
            expected: p.support_size(),
            found: q.support_size(),
        });
    }
    Ok(kl_bits(q.probs(), p.probs()))
}

/// Unchecked divergence over raw slices.
pub(crate) fn kl_bits(q: &[f64], p: &[f64]) -> f64 {
    let mut d = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi > 0.0 {
            if pi <= 0.0 {
                return f64::INFINITY;
            }
            d += qi * (qi / pi).log2();
        }
    }
    // rounding can push an exact zero slightly negative
    d.max(0.0)
}

/// Output distribution `Σ_x p(x)·p(y|x)`.
pub fn output_marginal(p: &Pmf, ch: &Channel) -> Result<Pmf> {
    ch.check_input(p)?;
    Pmf::new(output_marginal_raw(p.probs(), ch))
}

pub(crate) fn output_marginal_raw(p: &[f64], ch: &Channel) -> Vec<f64> {
    let mut out = vec![0.0; ch.output_size()];
    for (px, row) in p.iter().zip(ch.rows()) {
        if *px > 0.0 {
            for (o, w) in out.iter_mut().zip(row) {
                *o += px * w;
            }
        }
    }
    out
}

/// Joint pmf `p(x)·p(y|x)`.
pub fn joint(p: &Pmf, ch: &Channel) -> Result<JointPmf> {
    ch.check_input(p)?;
    JointPmf::new(
        p.probs()
            .iter()
            .zip(ch.rows())
            .map(|(px, row)| row.iter().map(|w| px * w).collect())
            .collect(),
    )
}

/// `H(Y|X) = Σ_x p(x) H(Y|X=x)`.
pub fn conditional_entropy(p: &Pmf, ch: &Channel) -> Result<f64> {
    ch.check_input(p)?;
    Ok(p.probs()
        .iter()
        .enumerate()
        .filter(|(_, px)| **px > 0.0)
        .map(|(x, px)| px * ch.row_entropy(x))
        .sum())
}

/// `I(X;Y) = H(Y) − H(Y|X)` for input `p` over `ch`.
pub fn mutual_information(p: &Pmf, ch: &Channel) -> Result<f64> {
    ch.check_input(p)?;
    let py = output_marginal_raw(p.probs(), ch);
    let hy = -py.iter().copied().map(xlog2x).sum::<f64>();
    let hyx = conditional_entropy(p, ch)?;
    Ok((hy - hyx).max(0.0))
}

/// `H(γ) = −γ log₂ γ − (1−γ) log₂(1−γ)`.
pub fn binary_entropy(g: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::OutOfRange {
            name: "binary entropy argument",
            value: g,
        });
    }
    Ok(-(xlog2x(g) + xlog2x(1.0 - g)))
}

pub fn bits_to_nats(bits: f64) -> f64 {
    bits * LN_2
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}
