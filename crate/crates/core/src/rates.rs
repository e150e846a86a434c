//! Achievable rates for a shaped subcode selected from an i.i.d. `p` codebook.
//!
//! All rates are in bits per channel use. `q*` denotes the I-projection of `p`
//! onto the constraint set; `q*(Y)` and `p(Y)` are the corresponding outputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{
    entropy, kl_bits, mutual_information, output_marginal_raw, xlog2x, Channel, JointPmf, Pmf, LN_2,
};
use crate::projection::{project, solve_dense, ConstraintSet};

/// Tolerance used by [`rate_report`] when deciding whether the MJT bound applies.
pub const MJT_APPLICABILITY_TOL: f64 = 1e-9;

const MJT_SEEDS: [(f64, f64); 3] = [(0.0, 1.0), (1.0, 1.0), (0.5, 0.5)];
const MJT_MAX_ITER: usize = 200;
const MJT_TOL: f64 = 1e-10;
const MJT_STALL_TOL: f64 = 1e-8;

/// A large-code pmf together with its conditional limit distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shaping {
    pub p: Pmf,
    pub q_star: Pmf,
    /// `D(q*‖p)` in bits.
    pub divergence_bits: f64,
}

impl Shaping {
    pub fn new(p: &Pmf, e: &ConstraintSet) -> Result<Self> {
        let proj = project(p, e)?;
        Ok(Self {
            p: p.clone(),
            q_star: proj.q_star,
            divergence_bits: proj.divergence_bits,
        })
    }

    /// Uses a `q*` computed elsewhere (e.g. a Maxwell-Boltzmann pmf).
    pub fn from_parts(p: Pmf, q_star: Pmf) -> Result<Self> {
        if p.support_size() != q_star.support_size() {
            return Err(Error::DimensionMismatch {
                expected: p.support_size(),
                found: q_star.support_size(),
            });
        }
        let divergence_bits = kl_bits(q_star.probs(), p.probs());
        Ok(Self {
            p,
            q_star,
            divergence_bits,
        })
    }

    /// `H_p(X) − D(q*‖p)`: the log-count of codewords the construction can supply.
    pub fn codeword_cap(&self) -> f64 {
        entropy(&self.p) - self.divergence_bits
    }

    pub fn matched(&self, ch: &Channel) -> Result<f64> {
        Ok(self
            .codeword_cap()
            .min(mutual_information(&self.q_star, ch)?))
    }

    pub fn naive(&self, ch: &Channel) -> Result<f64> {
        Ok(mutual_information(&self.p, ch)? - self.divergence_bits)
    }

    pub fn gallager(&self, ch: &Channel) -> Result<f64> {
        let i = mismatched_mi(&self.q_star, &self.p, ch)?;
        Ok(self.codeword_cap().min(i - self.divergence_bits))
    }

    pub fn mjt_solution(&self, ch: &Channel) -> Result<MjtSolution> {
        solve_mjt_given(&self.p, &self.q_star, ch)
    }

    pub fn mjt(&self, ch: &Channel) -> Result<f64> {
        let sol = self.mjt_solution(ch)?;
        Ok(self
            .codeword_cap()
            .min(sol.divergence_bits - self.divergence_bits))
    }

    pub fn report(&self, ch: &Channel) -> Result<RateReport> {
        let r_mjt = if mjt_applicable(&self.p, ch, MJT_APPLICABILITY_TOL)? {
            Some(self.mjt(ch)?)
        } else {
            None
        };
        Ok(RateReport {
            r_matched_bits: self.matched(ch)?,
            r_gallager_bits: self.gallager(ch)?,
            r_mjt_bits: r_mjt,
            r_naive_bits: self.naive(ch)?,
            codeword_cap_bits: self.codeword_cap(),
            rs_min_bits: self.divergence_bits,
        })
    }
}

/// Every rate bound for one `(p, E, channel)` instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub r_matched_bits: f64,
    pub r_gallager_bits: f64,
    /// Absent when the MJT applicability condition fails.
    pub r_mjt_bits: Option<f64>,
    pub r_naive_bits: f64,
    pub codeword_cap_bits: f64,
    pub rs_min_bits: f64,
}

/// `min(H_p(X) − D(q*‖p), I_{q*}(X;Y))`.
pub fn matched_rate(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<f64> {
    Shaping::new(p, e)?.matched(ch)
}

/// `I_p(X;Y) − D(q*‖p)`: the large code's rate minus the shaping rate.
pub fn naive_rate(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<f64> {
    Shaping::new(p, e)?.naive(ch)
}

/// `min(H_p(X) − D(q*‖p), I_{q*}(X;Y) + D(q*(Y)‖p(Y)) − D(q*‖p))`.
pub fn gallager_rate(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<f64> {
    Shaping::new(p, e)?.gallager(ch)
}

pub fn mjt_rate(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<f64> {
    let s = Shaping::new(p, e)?;
    ensure_mjt_applicable(&s.p, ch)?;
    s.mjt(ch)
}

pub fn rate_report(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<RateReport> {
    Shaping::new(p, e)?.report(ch)
}

fn log_sum_exp(it: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Two-distribution Gallager function
/// `E₀(ρ, p₁, p₂) = −log₂ Σ_y (Σ_x p₁(x) W(y|x)^{1/(1+ρ)}) (Σ_x p₂(x) W(y|x)^{1/(1+ρ)})^ρ`.
///
/// Accumulated in the log domain; `ρ = 0` returns exactly zero.
pub fn gallager_e0(rho: f64, p1: &Pmf, p2: &Pmf, ch: &Channel) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
        });
    }
    ch.check_input(p1)?;
    ch.check_input(p2)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let s = 1.0 / (1.0 + rho);
    let inner = |p: &Pmf, y: usize| {
        log_sum_exp(
            p.probs()
                .iter()
                .zip(ch.rows())
                .filter(|(px, row)| **px > 0.0 && row[y] > 0.0)
                .map(|(px, row)| px.ln() + s * row[y].ln()),
        )
    };
    let total = log_sum_exp((0..ch.output_size()).filter_map(|y| {
        let la = inner(p1, y);
        if la == f64::NEG_INFINITY {
            return None;
        }
        let lb = inner(p2, y);
        Some(la + rho * lb)
    }));
    Ok(-total / LN_2)
}

/// `I_{q*,p}(X;Y) = I_{q*}(X;Y) + D(q*(Y)‖p(Y))`, the `ρ → 0` slope of `E₀(ρ, q*, p)`.
pub fn mismatched_mi(qstar: &Pmf, p: &Pmf, ch: &Channel) -> Result<f64> {
    ch.check_input(qstar)?;
    ch.check_input(p)?;
    let qy = output_marginal_raw(qstar.probs(), ch);
    let py = output_marginal_raw(p.probs(), ch);
    Ok(mutual_information(qstar, ch)? + kl_bits(&qy, &py))
}

/// `(D(p₁(Y)‖p₂(Y)), D(p₁(X)‖p₂(X)))`; the first never exceeds the second.
pub fn divergence_contraction_check(p1: &Pmf, p2: &Pmf, ch: &Channel) -> Result<(f64, f64)> {
    ch.check_input(p1)?;
    ch.check_input(p2)?;
    let y1 = output_marginal_raw(p1.probs(), ch);
    let y2 = output_marginal_raw(p2.probs(), ch);
    Ok((kl_bits(&y1, &y2), kl_bits(p1.probs(), p2.probs())))
}

/// Spread `max_x v(x) − min_x v(x)` of `v(x) = log₂ p(x) − H(Y|X=x)`; infinite
/// when `p` has a zero entry.
pub fn mjt_spread(p: &Pmf, ch: &Channel) -> Result<f64> {
    ch.check_input(p)?;
    if p.probs().iter().any(|&v| v <= 0.0) {
        return Ok(f64::INFINITY);
    }
    let (lo, hi) = (0..p.support_size())
        .map(|x| p.get(x).log2() - ch.row_entropy(x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    Ok(hi - lo)
}

/// Whether `log₂ p(x) − H(Y|X=x)` is constant over `x` to within `tol`.
pub fn mjt_applicable(p: &Pmf, ch: &Channel, tol: f64) -> Result<bool> {
    Ok(mjt_spread(p, ch)? <= tol)
}

fn ensure_mjt_applicable(p: &Pmf, ch: &Channel) -> Result<()> {
    let spread = mjt_spread(p, ch)?;
    if spread > MJT_APPLICABILITY_TOL {
        return Err(Error::MjtNotApplicable { spread });
    }
    Ok(())
}

/// The minimum-divergence joint pmf of the MJT error analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MjtSolution {
    pub p_star: JointPmf,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `λ₀ = −ln Z`.
    pub log_z: f64,
    /// `D(P*‖p(X)q*(Y))` in bits.
    pub divergence_bits: f64,
    /// Moment residuals (nats) of the `ln q*(y)` and `ln p(x,y)` constraints.
    pub residuals: (f64, f64),
}

/// Finds `P*(x,y) ∝ p(x)q*(y)·exp(λ₁ ln q*(y) + λ₂ ln p(x,y))` with
/// `Σ P* ln p(x,y) = −H_p(X,Y)` and `Σ P* ln q*(y) = −H_{q*}(Y)`.
pub fn solve_mjt(p: &Pmf, e: &ConstraintSet, ch: &Channel) -> Result<MjtSolution> {
    ensure_mjt_applicable(p, ch)?;
    let s = Shaping::new(p, e)?;
    solve_mjt_given(&s.p, &s.q_star, ch)
}

/// Cells of the joint alphabet on which the MJT family lives.
pub(crate) struct MjtProblem {
    pub cells: Vec<(usize, usize)>,
    /// `ln p(x) + ln q*(y)` per cell.
    pub base: Vec<f64>,
    /// `ln q*(y)` per cell.
    pub t1: Vec<f64>,
    /// `ln p(x,y)` per cell.
    pub t2: Vec<f64>,
    pub target: (f64, f64),
}

impl MjtProblem {
    pub fn new(p: &Pmf, q_star: &Pmf, ch: &Channel) -> Result<Self> {
        ch.check_input(p)?;
        ch.check_input(q_star)?;
        let qy = output_marginal_raw(q_star.probs(), ch);
        let mut cells = Vec::new();
        let (mut base, mut t1, mut t2) = (Vec::new(), Vec::new(), Vec::new());
        let mut h_joint = 0.0;
        for (x, row) in ch.rows().iter().enumerate() {
            let px = p.get(x);
            for (y, &w) in row.iter().enumerate() {
                let pxy = px * w;
                if pxy > 0.0 {
                    h_joint -= pxy * pxy.ln();
                    if qy[y] > 0.0 {
                        cells.push((x, y));
                        base.push(px.ln() + qy[y].ln());
                        t1.push(qy[y].ln());
                        t2.push(pxy.ln());
                    }
                }
            }
        }
        let h_qy = -qy.iter().copied().map(xlog2x).sum::<f64>() * LN_2;
        Ok(Self {
            cells,
            base,
            t1,
            t2,
            target: (-h_qy, -h_joint),
        })
    }

    /// Log-density of the tilted family and its log-partition.
    pub fn tilt(&self, l1: f64, l2: f64) -> (Vec<f64>, f64) {
        let lw: Vec<f64> = self
            .base
            .iter()
            .zip(&self.t1)
            .zip(&self.t2)
            .map(|((b, a1), a2)| b + l1 * a1 + l2 * a2)
            .collect();
        let lse = log_sum_exp(lw.iter().copied());
        (lw, lse)
    }

    /// Moment residuals `(E[ln q*(y)] − t₁, E[ln p(x,y)] − t₂)` at `(λ₁, λ₂)`.
    pub fn residuals(&self, l1: f64, l2: f64) -> (f64, f64) {
        let (lw, lse) = self.tilt(l1, l2);
        let (mut m1, mut m2) = (0.0, 0.0);
        for ((w, a1), a2) in lw.iter().zip(&self.t1).zip(&self.t2) {
            let q = (w - lse).exp();
            m1 += q * a1;
            m2 += q * a2;
        }
        (m1 - self.target.0, m2 - self.target.1)
    }

    fn dual(&self, l1: f64, l2: f64) -> f64 {
        self.tilt(l1, l2).1 - l1 * self.target.0 - l2 * self.target.1
    }

    /// Residual tolerance, relative to the size of the moment targets.
    fn tolerance(&self) -> f64 {
        MJT_TOL * (1.0 + self.target.0.abs() + self.target.1.abs())
    }

    fn newton(&self, seed: (f64, f64)) -> Option<(f64, f64, f64)> {
        let tol = self.tolerance();
        let (mut l1, mut l2) = seed;
        let stall = MJT_STALL_TOL * tol / MJT_TOL;
        let mut res = f64::INFINITY;
        for _ in 0..=MJT_MAX_ITER {
            let (lw, lse) = self.tilt(l1, l2);
            let q: Vec<f64> = lw.iter().map(|w| (w - lse).exp()).collect();
            let m1: f64 = q.iter().zip(&self.t1).map(|(q, a)| q * a).sum();
            let m2: f64 = q.iter().zip(&self.t2).map(|(q, a)| q * a).sum();
            let g = [m1 - self.target.0, m2 - self.target.1];
            let prev = res;
            res = g[0].abs().max(g[1].abs());
            // quadratic convergence has stopped: rounding floor
            if res <= tol || (res <= stall && res > 0.5 * prev) {
                return Some((l1, l2, res));
            }
            let (mut h11, mut h12, mut h22) = (0.0, 0.0, 0.0);
            for ((q, a1), a2) in q.iter().zip(&self.t1).zip(&self.t2) {
                let (d1, d2) = (a1 - m1, a2 - m2);
                h11 += q * d1 * d1;
                h12 += q * d1 * d2;
                h22 += q * d2 * d2;
            }
            let ridge = 1e-14 * (1.0 + h11 + h22);
            let dir = solve_dense(
                vec![vec![h11 + ridge, h12], vec![h12, h22 + ridge]],
                vec![-g[0], -g[1]],
            )
            .filter(|d| d[0] * g[0] + d[1] * g[1] < 0.0)
            .unwrap_or_else(|| vec![-g[0], -g[1]]);
            let f0 = lse - l1 * self.target.0 - l2 * self.target.1;
            let slope = dir[0] * g[0] + dir[1] * g[1];
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let (n1, n2) = (l1 + t * dir[0], l2 + t * dir[1]);
                let f1 = self.dual(n1, n2);
                if f1.is_finite() && f1 <= f0 + 1e-4 * t * slope {
                    l1 = n1;
                    l2 = n2;
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                break;
            }
        }
        (res <= stall).then_some((l1, l2, res))
    }
}

/// MJT solver for a known `q*`; does not check applicability.
pub fn solve_mjt_given(p: &Pmf, q_star: &Pmf, ch: &Channel) -> Result<MjtSolution> {
    let prob = MjtProblem::new(p, q_star, ch)?;
    let mut worst_residual = 0.0f64;
    // the dual is strictly convex, so later seeds are only fallbacks
    for seed in MJT_SEEDS {
        let Some((l1, l2, _)) = prob.newton(seed) else {
            let r = prob.residuals(seed.0, seed.1);
            worst_residual = worst_residual.max(r.0.abs().max(r.1.abs()));
            continue;
        };
        let (lw, lse) = prob.tilt(l1, l2);
        let mut joint = vec![vec![0.0; ch.output_size()]; ch.input_size()];
        let mut div = 0.0;
        for ((&(x, y), w), b) in prob.cells.iter().zip(&lw).zip(&prob.base) {
            let lq = w - lse;
            let q = lq.exp();
            joint[x][y] = q;
            div += q * (lq - b);
        }
        return Ok(MjtSolution {
            p_star: JointPmf::new(joint)?,
            lambda1: l1,
            lambda2: l2,
            log_z: -lse,
            divergence_bits: (div / LN_2).max(0.0),
            residuals: prob.residuals(l1, l2),
        });
    }
    Err(Error::NonConvergence {
        solver: "MJT multipliers",
        iterations: MJT_MAX_ITER,
        residual: worst_residual,
    })
}
