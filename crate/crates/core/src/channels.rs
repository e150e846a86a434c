//! Concrete channels and end-to-end bound computations.
//!
//! Covers binary symmetric and non-symmetric channels, scaled PAM over a
//! quantized AWGN channel, the Gaussian large-codebook closed form and a
//! constrained Blahut-Arimoto capacity baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::info::{binary_entropy, mutual_information, Channel, Pmf, LN_2};
use crate::projection::{maxwell_boltzmann, within_bound, ConstraintSet};
use crate::rates::Shaping;

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: v })
    }
}

/// Binary symmetric channel with crossover probability `gamma`.
pub fn bsc(gamma: f64) -> Result<Channel> {
    check_unit("gamma", gamma)?;
    Channel::new(vec![vec![1.0 - gamma, gamma], vec![gamma, 1.0 - gamma]])
}

/// Binary non-symmetric channel: `0` flips with `gamma0`, `1` flips with `gamma1`.
pub fn bnsc(gamma0: f64, gamma1: f64) -> Result<Channel> {
    check_unit("gamma0", gamma0)?;
    check_unit("gamma1", gamma1)?;
    Channel::new(vec![vec![1.0 - gamma0, gamma0], vec![gamma1, 1.0 - gamma1]])
}

/// The binary large-codebook pmf for which `log p(x) − H(Y|X=x)` is constant on a BNSC.
///
/// `p(0) = e^d / (1 + e^d)` with `d = H(γ₀) − H(γ₁)` in nats.
pub fn bnsc_mjt_input(gamma0: f64, gamma1: f64) -> Result<Pmf> {
    let d = (binary_entropy(gamma0)? - binary_entropy(gamma1)?) * LN_2;
    // logistic form stays finite for any d
    let p0 = 1.0 / (1.0 + (-d).exp());
    Pmf::new(vec![p0, 1.0 - p0])
}

/// Equally spaced `M`-PAM levels `±1, ±3, …, ±(M−1)` in increasing order.
pub fn pam(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::OutOfRange {
            name: "PAM order",
            value: m as f64,
        });
    }
    Ok((0..m).map(|i| 2.0 * i as f64 - (m as f64 - 1.0)).collect())
}

/// Output quantization of the AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputGrid {
    /// `K`: the grid extends `K·σ` beyond the outermost scaled levels.
    pub half_width_sigmas: f64,
    pub points_per_sigma: usize,
}

impl Default for OutputGrid {
    fn default() -> Self {
        Self {
            half_width_sigmas: 8.0,
            points_per_sigma: 32,
        }
    }
}

/// `Y = αX + Z` with `Z ~ N(0, σ²)`, `X` drawn from `levels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PamAwgnConfig {
    pub levels: Vec<f64>,
    pub alpha: f64,
    pub noise_variance: f64,
    /// `β₀`: the average transmit power budget.
    pub power_budget: f64,
    pub output_grid: OutputGrid,
}

impl PamAwgnConfig {
    pub fn new(levels: Vec<f64>, alpha: f64, noise_variance: f64, power_budget: f64) -> Self {
        Self {
            levels,
            alpha,
            noise_variance,
            power_budget,
            output_grid: OutputGrid::default(),
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if self.levels.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("levels must be finite".into()));
        }
        let mut sorted = self.levels.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("levels must be distinct".into()));
        }
        for (name, value) in [
            ("alpha", self.alpha),
            ("noise_variance", self.noise_variance),
            ("power_budget", self.power_budget),
            ("half_width_sigmas", self.output_grid.half_width_sigmas),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        if self.output_grid.points_per_sigma == 0 {
            return Err(Error::OutOfRange {
                name: "points_per_sigma",
                value: 0.0,
            });
        }
        Ok(())
    }

    /// Average power of the uniform pmf on the levels.
    pub fn uniform_power(&self) -> f64 {
        self.levels.iter().map(|x| x * x).sum::<f64>() / self.levels.len() as f64
    }

    /// `[α_lo, α_hi]`: from the scaling at which the uniform pmf meets the budget to
    /// just below the scaling at which only the lowest-energy level remains feasible.
    pub fn alpha_bracket(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let min_nonzero = self
            .levels
            .iter()
            .map(|x| x * x)
            .filter(|&e| e > 0.0)
            .fold(f64::INFINITY, f64::min);
        let lo = (self.power_budget / self.uniform_power()).sqrt();
        let hi = 0.999 * (self.power_budget / min_nonzero).sqrt();
        if !(hi > lo) {
            return Err(Error::Config(format!("empty alpha bracket [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }
}

fn upper_tail(z: f64) -> f64 {
    if z == f64::INFINITY {
        0.0
    } else if z == f64::NEG_INFINITY {
        1.0
    } else {
        0.5 * erfc(z / std::f64::consts::SQRT_2)
    }
}

/// Standard normal mass on `[a, b]`, accurate in both tails.
fn normal_mass(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        upper_tail(a) - upper_tail(b)
    } else if b <= 0.0 {
        upper_tail(-b) - upper_tail(-a)
    } else {
        1.0 - upper_tail(-a) - upper_tail(b)
    }
}

/// Masses of `n` cells of width `w` starting at `start` (standard units), with the
/// first and last cell extended to `∓∞`.
fn cell_masses(start: f64, w: f64, n: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..n)
        .map(|j| {
            let a = if j == 0 {
                f64::NEG_INFINITY
            } else {
                start + j as f64 * w
            };
            let b = if j + 1 == n {
                f64::INFINITY
            } else {
                start + (j + 1) as f64 * w
            };
            normal_mass(a, b)
        })
        .collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

/// Common spacing of the sorted levels, if they are equally spaced.
fn common_spacing(levels: &[f64]) -> Option<f64> {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = sorted[1] - sorted[0];
    sorted
        .windows(2)
        .all(|w| ((w[1] - w[0]) - d).abs() <= 1e-12 * d.abs().max(1.0))
        .then_some(d)
}

/// Quantizes `Y = αX + Z` onto a uniform output grid by integrating the Gaussian
/// density over each cell.
///
/// For equally spaced levels the cell width divides `α·d`, so every row is an
/// exact translate of one kernel.
pub fn quantized_awgn(cfg: &PamAwgnConfig) -> Result<Channel> {
    cfg.validate()?;
    let sigma = cfg.noise_variance.sqrt();
    let k = cfg.output_grid.half_width_sigmas;
    let pps = cfg.output_grid.points_per_sigma as f64;
    let scaled: Vec<f64> = cfg.levels.iter().map(|x| cfg.alpha * x).collect();
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let spacing = if cfg.levels.len() > 1 {
        common_spacing(&cfg.levels)
    } else {
        None
    };
    let rows = match spacing {
        Some(d) => {
            let step = cfg.alpha * d;
            let per_step = (step * pps / sigma).ceil().max(1.0);
            let w = step / per_step;
            let kernel_len = ((2.0 * k * sigma / w).ceil() as usize).max(2);
            let kernel = cell_masses(-k, w / sigma, kernel_len);
            let steps = ((max - min) / step).round() as usize;
            let total = steps * per_step as usize + kernel_len;
            if total > 50_000_000 / cfg.levels.len() {
                return Err(Error::Config(format!(
                    "output grid of {total} cells is too large"
                )));
            }
            scaled
                .iter()
                .map(|s| {
                    let offset = ((s - min) / step).round() as usize * per_step as usize;
                    let mut row = vec![0.0; total];
                    row[offset..offset + kernel_len].copy_from_slice(&kernel);
                    row
                })
                .collect::<Vec<_>>()
        }
        None => {
            let w = sigma / pps;
            let lo = min - k * sigma;
            let n = (((max - min) + 2.0 * k * sigma) / w).ceil().max(2.0) as usize;
            if n > 50_000_000 / cfg.levels.len() {
                return Err(Error::Config(format!(
                    "output grid of {n} cells is too large"
                )));
            }
            scaled
                .iter()
                .map(|s| cell_masses((lo - s) / sigma, w / sigma, n))
                .collect()
        }
    };
    Channel::new(rows)
}

/// `(1/N) Σ|X|² ≤ β₀/α²`.
pub fn awgn_power_constraint(cfg: &PamAwgnConfig) -> Result<ConstraintSet> {
    cfg.validate()?;
    ConstraintSet::power(&cfg.levels, cfg.power_budget / (cfg.alpha * cfg.alpha))
}

/// Which bound [`optimize_alpha`] maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Matched,
    Gallager,
    Mjt,
    Naive,
}

/// The uniform codebook and its Maxwell-Boltzmann conditional limit at `cfg.alpha`.
pub fn pam_shaping(cfg: &PamAwgnConfig) -> Result<Shaping> {
    cfg.validate()?;
    let p = Pmf::uniform(cfg.levels.len())?;
    let target = cfg.power_budget / (cfg.alpha * cfg.alpha);
    let uniform = cfg.uniform_power();
    let q_star = if target >= uniform * (1.0 - 1e-12) {
        p.clone()
    } else {
        maxwell_boltzmann(&cfg.levels, target)?.pmf
    };
    Shaping::from_parts(p, q_star)
}

/// Value of one bound at `cfg.alpha`.
pub fn pam_rate(cfg: &PamAwgnConfig, objective: Objective) -> Result<f64> {
    let shaping = pam_shaping(cfg)?;
    let ch = quantized_awgn(cfg)?;
    match objective {
        Objective::Matched => shaping.matched(&ch),
        Objective::Gallager => shaping.gallager(&ch),
        Objective::Mjt => shaping.mjt(&ch),
        Objective::Naive => shaping.naive(&ch),
    }
}

const ALPHA_GRID: usize = 64;
const ALPHA_TOL: f64 = 1e-4;

/// Maximizes a bound over `α ∈ [α_lo, α_hi]`: a 64-point grid, then golden-section
/// search around the best grid point until the bracket is narrower than `1e-4`.
pub fn optimize_alpha(cfg: &PamAwgnConfig, objective: Objective) -> Result<(f64, f64)> {
    let (lo, hi) = cfg.alpha_bracket()?;
    let f = |a: f64| pam_rate(&cfg.with_alpha(a), objective);
    let grid: Vec<f64> = (0..ALPHA_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (ALPHA_GRID - 1) as f64)
        .collect();
    let values = grid
        .par_iter()
        .map(|&a| f(a))
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
    let (mut a, mut b) = (
        grid[best.saturating_sub(1)],
        grid[(best + 1).min(ALPHA_GRID - 1)],
    );
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > ALPHA_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let (mut arg, mut val) = if fc >= fd { (c, fc) } else { (d, fd) };
    if values[best] > val {
        arg = grid[best];
        val = values[best];
    }
    Ok((arg, val))
}

/// `½ log₂(1 + snr)`.
pub fn awgn_capacity(snr_linear: f64) -> Result<f64> {
    if !(snr_linear >= 0.0) {
        return Err(Error::OutOfRange {
            name: "snr",
            value: snr_linear,
        });
    }
    Ok(0.5 * snr_linear.ln_1p() / LN_2)
}

/// SNR in dB at which the continuous AWGN channel has capacity `rate_bits`.
pub fn capacity_snr_db(rate_bits: f64) -> f64 {
    10.0 * (2f64.powf(2.0 * rate_bits) - 1.0).log10()
}

/// `D(N(0,a)‖N(0,b))` in bits.
fn gaussian_kl_bits(a: f64, b: f64) -> f64 {
    let r = a / b;
    0.5 * (r - r.ln() - 1.0) / LN_2
}

/// Gallager bound for a Gaussian large codebook of power `B₀` shaped down to `β₀`
/// over AWGN with variance `σ²`, and its `½log₂(β₀/σ²)` approximation.
///
/// Returns `(exact, approx)`. A budget at or above `B₀` is not binding.
pub fn gaussian_largecode_rate(beta0: f64, b0: f64, noise_variance: f64) -> Result<(f64, f64)> {
    for (name, value) in [
        ("beta0", beta0),
        ("B0", b0),
        ("noise_variance", noise_variance),
    ] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::OutOfRange { name, value });
        }
    }
    let beta = beta0.min(b0);
    let d_x = gaussian_kl_bits(beta, b0);
    let d_y = gaussian_kl_bits(beta + noise_variance, b0 + noise_variance);
    let exact = 0.5 * (beta / noise_variance).ln_1p() / LN_2 + d_y - d_x;
    let approx = 0.5 * (beta0 / noise_variance).log2();
    Ok((exact, approx))
}

const BAA_MAX_ITER: usize = 1_000_000;
const MULTIPLIER_CAP: f64 = 1e12;

/// Channel rows restricted to their nonzero span.
struct SparseRows<'a> {
    ch: &'a Channel,
    spans: Vec<(usize, usize)>,
    /// `Σ_y W ln W` per row (nats).
    neg_entropy: Vec<f64>,
}

impl<'a> SparseRows<'a> {
    fn new(ch: &'a Channel) -> Self {
        let spans = ch
            .rows()
            .iter()
            .map(|r| {
                let first = r.iter().position(|&w| w > 0.0).unwrap_or(0);
                let last = r.iter().rposition(|&w| w > 0.0).unwrap_or(0);
                (first, last + 1)
            })
            .collect();
        let neg_entropy = ch
            .rows()
            .iter()
            .map(|r| r.iter().filter(|&&w| w > 0.0).map(|w| w * w.ln()).sum())
            .collect();
        Self {
            ch,
            spans,
            neg_entropy,
        }
    }

    /// `D(W(·|x) ‖ qW)` in nats for every `x`.
    fn divergences(&self, q: &[f64], qy: &mut [f64], ln_qy: &mut [f64], out: &mut [f64]) {
        qy.iter_mut().for_each(|v| *v = 0.0);
        for (x, &(a, b)) in self.spans.iter().enumerate() {
            let row = &self.ch.row(x)[a..b];
            for (acc, w) in qy[a..b].iter_mut().zip(row) {
                *acc += q[x] * w;
            }
        }
        for (l, v) in ln_qy.iter_mut().zip(qy.iter()) {
            *l = v.max(f64::MIN_POSITIVE).ln();
        }
        for (x, &(a, b)) in self.spans.iter().enumerate() {
            let row = &self.ch.row(x)[a..b];
            let cross: f64 = row
                .iter()
                .zip(&ln_qy[a..b])
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, l)| w * l)
                .sum();
            out[x] = self.neg_entropy[x] - cross;
        }
    }
}

/// Blahut-Arimoto for `max_q I(q) − Σ_x q(x) cost(x)` (nats), iterated in the
/// log domain from `log_q` until the certified gap is below `tol` bits.
fn baa_with_cost(rows: &SparseRows, cost: &[f64], log_q: &mut [f64], tol: f64) -> Result<Vec<f64>> {
    let n = log_q.len();
    let ny = rows.ch.output_size();
    let (mut qy, mut ln_qy) = (vec![0.0; ny], vec![0.0; ny]);
    let mut c = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for _ in 0..BAA_MAX_ITER {
        let m = log_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = log_q.iter().map(|l| (l - m).exp()).sum();
        let lse = m + s.ln();
        log_q.iter_mut().for_each(|l| *l -= lse);
        q.iter_mut()
            .zip(log_q.iter())
            .for_each(|(q, l)| *q = l.exp());
        rows.divergences(&q, &mut qy, &mut ln_qy, &mut c);
        c.iter_mut().zip(cost).for_each(|(c, k)| *c -= k);
        let upper = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lower: f64 = q.iter().zip(&c).map(|(q, c)| q * c).sum();
        gap = (upper - lower) / LN_2;
        if gap <= tol {
            return Ok(q);
        }
        log_q.iter_mut().zip(&c).for_each(|(l, c)| *l += c - upper);
    }
    Err(Error::NonConvergence {
        solver: "Blahut-Arimoto",
        iterations: BAA_MAX_ITER,
        residual: gap,
    })
}

/// `argmax_{P∈E} I_P(X;Y)` by Blahut-Arimoto iterations with a Lagrangian cost.
///
/// Each multiplier is found in turn by a bracketing root search on its
/// constraint; the inner iterations stop once the capacity gap is below `tol` bits.
pub fn constrained_capacity_baa(ch: &Channel, e: &ConstraintSet, tol: f64) -> Result<(Pmf, f64)> {
    if e.alphabet_size() != ch.input_size() {
        return Err(Error::DimensionMismatch {
            expected: ch.input_size(),
            found: e.alphabet_size(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
        });
    }
    let rows = SparseRows::new(ch);
    let n = ch.input_size();
    let k = e.num_constraints();
    let phi = e.phi();
    let cost_of = |s: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|x| (0..k).map(|j| s[j] * phi[j][x]).sum())
            .collect()
    };
    let avg = |q: &[f64], j: usize| -> f64 { q.iter().zip(&phi[j]).map(|(q, f)| q * f).sum() };

    let mut s = vec![0.0; k];
    let mut log_q = vec![-(n as f64).ln(); n];
    let mut q = baa_with_cost(&rows, &cost_of(&s), &mut log_q, tol)?;
    for _sweep in 0..100 {
        let mut changed = false;
        for j in 0..k {
            let beta = e.beta()[j];
            let old = s[j];
            let solve = |sj: f64, log_q: &mut Vec<f64>| -> Result<(Vec<f64>, f64)> {
                let mut trial = s.clone();
                trial[j] = sj;
                let q = baa_with_cost(&rows, &cost_of(&trial), log_q, tol)?;
                let g = avg(&q, j) - beta;
                Ok((q, g))
            };
            let (q0, g0) = solve(0.0, &mut log_q.clone())?;
            if within_bound(g0 + beta, beta) {
                s[j] = 0.0;
                q = q0;
            } else {
                // g(s) = E_q(s)[φ_j] − β_j is non-increasing in s
                let (mut lo, mut g_lo) = (0.0, g0);
                let mut hi = old.max(1e-3);
                let mut lq_hi = log_q.clone();
                let (mut q_hi, mut g_hi) = solve(hi, &mut lq_hi)?;
                while !within_bound(g_hi + beta, beta) {
                    lo = hi;
                    g_lo = g_hi;
                    hi *= 4.0;
                    if hi > MULTIPLIER_CAP {
                        return Err(Error::NonConvergence {
                            solver: "constrained Blahut-Arimoto multiplier",
                            iterations: 0,
                            residual: g_hi,
                        });
                    }
                    (q_hi, g_hi) = solve(hi, &mut lq_hi)?;
                }
                // Illinois regula falsi, keeping the feasible end as the answer
                let (mut wl, mut wh) = (g_lo, g_hi);
                let mut side = 0i8;
                for _ in 0..200 {
                    if hi - lo <= 1e-12 * hi || g_hi.abs() <= 1e-12 * beta.abs().max(1.0) {
                        break;
                    }
                    let mut mid = (lo * wh - hi * wl) / (wh - wl);
                    if !(mid > lo && mid < hi) {
                        mid = 0.5 * (lo + hi);
                    }
                    let mut lq = lq_hi.clone();
                    let (q_mid, g_mid) = solve(mid, &mut lq)?;
                    if within_bound(g_mid + beta, beta) {
                        hi = mid;
                        g_hi = g_mid;
                        wh = g_mid;
                        q_hi = q_mid;
                        lq_hi = lq;
                        if side == 1 {
                            wl *= 0.5;
                        }
                        side = 1;
                    } else {
                        lo = mid;
                        wl = g_mid;
                        if side == -1 {
                            wh *= 0.5;
                        }
                        side = -1;
                    }
                }
                s[j] = hi;
                q = q_hi;
                log_q = lq_hi;
            }
            if (s[j] - old).abs() > 1e-10 * (1.0 + old) {
                changed = true;
            }
        }
        if !changed || k == 1 {
            break;
        }
    }
    let scale = e.beta().iter().fold(1.0f64, |m, b| m.max(b.abs()));
    let violation = (0..k)
        .map(|j| avg(&q, j) - e.beta()[j])
        .fold(0.0f64, f64::max);
    if violation > 1e-9 * scale {
        return Err(Error::NonConvergence {
            solver: "constrained Blahut-Arimoto",
            iterations: 100,
            residual: violation,
        });
    }
    let q = Pmf::new(q)?;
    let c = mutual_information(&q, ch)?;
    Ok((q, c))
}

/// One SNR point of a PAM/AWGN sweep; rates in bits, each maximized over `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub capacity_bits: f64,
    /// Uniform PAM meeting the budget with equality (no shaping).
    pub r_uniform_bits: f64,
    pub r_matched_bits: f64,
    pub r_gallager_bits: f64,
    pub r_mjt_bits: Option<f64>,
    pub r_naive_bits: f64,
    pub alpha_uniform: f64,
    pub alpha_matched: f64,
    pub alpha_gallager: f64,
    pub alpha_mjt: Option<f64>,
    pub alpha_naive: f64,
}

/// Evaluates every bound at one SNR with `β₀ = σ²·10^{snr/10}`.
pub fn awgn_point(
    levels: &[f64],
    noise_variance: f64,
    snr_db: f64,
    grid: OutputGrid,
) -> Result<SweepRow> {
    let snr = 10f64.powf(snr_db / 10.0);
    let mut cfg = PamAwgnConfig::new(levels.to_vec(), 1.0, noise_variance, snr * noise_variance);
    cfg.output_grid = grid;
    let (alpha_lo, _) = cfg.alpha_bracket()?;
    let r_uniform = pam_rate(&cfg.with_alpha(alpha_lo), Objective::Matched)?;
    let (alpha_matched, r_matched) = optimize_alpha(&cfg, Objective::Matched)?;
    let (alpha_gallager, r_gallager) = optimize_alpha(&cfg, Objective::Gallager)?;
    let (alpha_naive, r_naive) = optimize_alpha(&cfg, Objective::Naive)?;
    let mjt = match optimize_alpha(&cfg, Objective::Mjt) {
        Ok(v) => Some(v),
        Err(Error::MjtNotApplicable { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(SweepRow {
        snr_db,
        capacity_bits: awgn_capacity(snr)?,
        r_uniform_bits: r_uniform,
        r_matched_bits: r_matched,
        r_gallager_bits: r_gallager,
        r_mjt_bits: mjt.map(|m| m.1),
        r_naive_bits: r_naive,
        alpha_uniform: alpha_lo,
        alpha_matched,
        alpha_gallager,
        alpha_mjt: mjt.map(|m| m.0),
        alpha_naive,
    })
}

/// One [`SweepRow`] per SNR, evaluated in parallel and returned in grid order.
pub fn awgn_sweep(
    levels: &[f64],
    noise_variance: f64,
    snr_grid_db: &[f64],
    grid: OutputGrid,
) -> Result<Vec<SweepRow>> {
    snr_grid_db
        .par_iter()
        .map(|&snr| awgn_point(levels, noise_variance, snr, grid))
        .collect()
}

/// One hamming budget of a binary-channel sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySweepRow {
    pub beta0: f64,
    pub q_star_one: f64,
    pub rs_min_bits: f64,
    pub r_matched_bits: f64,
    pub r_gallager_bits: f64,
    pub r_mjt_bits: Option<f64>,
    pub r_naive_bits: f64,
}

/// Rate bounds for a binary channel over a grid of hamming budgets.
pub fn binary_sweep(ch: &Channel, p: &Pmf, betas: &[f64]) -> Result<Vec<BinarySweepRow>> {
    betas
        .par_iter()
        .map(|&beta0| {
            let e = ConstraintSet::hamming(beta0)?;
            let s = Shaping::new(p, &e)?;
            let r = s.report(ch)?;
            Ok(BinarySweepRow {
                beta0,
                q_star_one: s.q_star.get(1),
                rs_min_bits: r.rs_min_bits,
                r_matched_bits: r.r_matched_bits,
                r_gallager_bits: r.r_gallager_bits,
                r_mjt_bits: r.r_mjt_bits,
                r_naive_bits: r.r_naive_bits,
            })
        })
        .collect()
}
