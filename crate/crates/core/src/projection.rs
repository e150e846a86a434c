//! I-projection of a generating pmf onto a set of linear constraints, and the
//! large-deviation quantities built on it: minimum shaping rate, Sanov bounds,
//! exact type-class probabilities and the set-selection success probability.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::info::{kl_bits, Pmf};

/// Relative slack used by every "empirical average satisfies `β`" test.
pub const TYPE_TOL: f64 = 1e-12;

/// Tolerance for declaring `p ∈ E` and for constraint satisfaction of `q*`.
const MEMBER_TOL: f64 = 1e-12;
/// Largest LP slack accepted as feasible.
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_ITER: usize = 10_000;
const KKT_TOL: f64 = 1e-10;

/// `avg ≤ β` up to [`TYPE_TOL`].
#[inline]
pub fn within_bound(avg: f64, beta: f64) -> bool {
    avg <= beta + TYPE_TOL * beta.abs().max(1.0)
}

/// The set `E = { P : Σ_x P(x) φ_l(x) ≤ β_l, l = 1..L }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    phi: Vec<Vec<f64>>,
    beta: Vec<f64>,
}

impl ConstraintSet {
    /// `phi[l][x]` holds `φ_l(x)`. Rejects sets with no feasible pmf.
    pub fn new(phi: Vec<Vec<f64>>, beta: Vec<f64>) -> Result<Self> {
        if phi.is_empty() || phi[0].is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if phi.len() != beta.len() {
            return Err(Error::DimensionMismatch {
                expected: phi.len(),
                found: beta.len(),
            });
        }
        let n = phi[0].len();
        for row in &phi {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::OutOfRange {
                    name: "constraint function value",
                    value: *v,
                });
            }
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return Err(Error::OutOfRange {
                name: "constraint bound",
                value: *b,
            });
        }
        let set = Self { phi, beta };
        let violation = set.min_violation(&vec![true; n]);
        if violation > FEASIBILITY_TOL * set.scale() {
            return Err(Error::Infeasible { violation });
        }
        Ok(set)
    }

    /// Binary Hamming-weight constraint `P(1) ≤ β₀`.
    pub fn hamming(beta0: f64) -> Result<Self> {
        Self::new(vec![vec![0.0, 1.0]], vec![beta0])
    }

    /// Average-power constraint `Σ P(x)|x|² ≤ β` over the given points.
    pub fn power(levels: &[f64], beta: f64) -> Result<Self> {
        Self::new(vec![levels.iter().map(|x| x * x).collect()], vec![beta])
    }

    pub fn num_constraints(&self) -> usize {
        self.phi.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.phi[0].len()
    }

    pub fn phi(&self) -> &[Vec<f64>] {
        &self.phi
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `max_l (E_P φ_l − β_l)`; non-positive iff `P ∈ E`.
    pub fn violation(&self, p: &Pmf) -> f64 {
        self.phi
            .iter()
            .zip(&self.beta)
            .map(|(row, b)| p.expect(row) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &Pmf, tol: f64) -> bool {
        self.phi
            .iter()
            .zip(&self.beta)
            .all(|(row, b)| p.expect(row) <= b + tol * b.abs().max(1.0))
    }

    /// Whether a sequence with symbol counts summarised by `sums[l] = Σ_i φ_l(x_i)`
    /// over `n` symbols has its type in `E`.
    pub fn type_satisfies(&self, sums: &[f64], n: usize) -> bool {
        sums.iter()
            .zip(&self.beta)
            .all(|(s, b)| within_bound(s / n as f64, *b))
    }

    /// Returns `β₀` when this is exactly the binary Hamming constraint.
    pub fn as_binary_hamming(&self) -> Option<f64> {
        (self.phi.len() == 1 && self.phi[0] == [0.0, 1.0]).then(|| self.beta[0])
    }

    fn scale(&self) -> f64 {
        self.phi
            .iter()
            .flatten()
            .chain(&self.beta)
            .fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    /// Smallest uniform slack `s ≥ 0` such that some pmf supported on `support`
    /// meets every constraint relaxed by `s`.
    fn min_violation(&self, support: &[bool]) -> f64 {
        use microlp::{ComparisonOp, OptimizationDirection, Problem};

        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let slack = lp.add_var(1.0, (0.0, f64::INFINITY));
        let vars: Vec<_> = support
            .iter()
            .map(|&s| lp.add_var(0.0, (0.0, if s { 1.0 } else { 0.0 })))
            .collect();
        lp.add_constraint(vars.iter().map(|&v| (v, 1.0)), ComparisonOp::Eq, 1.0);
        for (row, b) in self.phi.iter().zip(&self.beta) {
            let expr: Vec<_> = vars
                .iter()
                .zip(row)
                .map(|(&v, &c)| (v, c))
                .chain(std::iter::once((slack, -1.0)))
                .collect();
            lp.add_constraint(expr, ComparisonOp::Le, *b);
        }
        match lp.solve() {
            Ok(sol) => sol.objective().max(0.0),
            Err(_) => f64::INFINITY,
        }
    }
}

/// The conditional limit distribution `q*` and its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub q_star: Pmf,
    /// Lagrange multipliers (natural-log convention): `q* ∝ p·exp(−Σ λ_l φ_l)`.
    /// A constraint that pins `q*` to the minimisers of `φ_l` reports `+∞`.
    pub multipliers: Vec<f64>,
    pub divergence_bits: f64,
    pub rs_min_bits: f64,
    pub active: Vec<bool>,
    pub iterations: usize,
}

/// Log-weights `ln p(x) − Σ λ_l φ_l(x)` over `support`, and their log-sum-exp.
fn tilted(p: &[f64], phi: &[&[f64]], lambda: &[f64], support: &[usize]) -> (Vec<f64>, f64) {
    let logw: Vec<f64> = support
        .iter()
        .map(|&x| {
            p[x].ln()
                - phi
                    .iter()
                    .zip(lambda)
                    .map(|(row, l)| l * row[x])
                    .sum::<f64>()
        })
        .collect();
    let m = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logw.iter().map(|w| (w - m).exp()).sum::<f64>().ln();
    (logw, lse)
}

/// Solves the small symmetric system `a·x = b` by Gaussian elimination with
/// partial pivoting. `None` when the matrix is numerically singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimises `D(P‖p)` over `E`.
///
/// The dual `F(λ) = ln Σ_x p(x) e^{−λ·φ(x)} + λ·β` is minimised over `λ ≥ 0` by a
/// projected Newton method; `q*` is the tilted pmf at the optimum.
pub fn project(p: &Pmf, e: &ConstraintSet) -> Result<ProjectionResult> {
    let n = p.support_size();
    if e.alphabet_size() != n {
        return Err(Error::DimensionMismatch {
            expected: e.alphabet_size(),
            found: n,
        });
    }
    let num_l = e.num_constraints();

    if e.contains(p, MEMBER_TOL) {
        return Ok(ProjectionResult {
            q_star: p.clone(),
            multipliers: vec![0.0; num_l],
            divergence_bits: 0.0,
            rs_min_bits: 0.0,
            active: e
                .phi
                .iter()
                .zip(&e.beta)
                .map(|(row, b)| (p.expect(row) - b).abs() <= 1e-9 * b.abs().max(1.0))
                .collect(),
            iterations: 0,
        });
    }

    let mut in_support: Vec<bool> = p.probs().iter().map(|&v| v > 0.0).collect();
    let violation = e.min_violation(&in_support);
    if violation > FEASIBILITY_TOL * e.scale() {
        return Err(Error::Infeasible { violation });
    }

    // A constraint whose bound sits at the minimum of φ_l over the support forces
    // q* onto the minimisers; the multiplier is infinite there.
    let mut pinned = vec![false; num_l];
    loop {
        let mut changed = false;
        for l in 0..num_l {
            if pinned[l] {
                continue;
            }
            let row = &e.phi[l];
            let min = (0..n)
                .filter(|&x| in_support[x])
                .map(|x| row[x])
                .fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * e.scale();
            if e.beta[l] <= min + tol {
                pinned[l] = true;
                changed = true;
                for x in 0..n {
                    if row[x] > min + tol {
                        in_support[x] = false;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let support: Vec<usize> = (0..n).filter(|&x| in_support[x]).collect();
    let free_l: Vec<usize> = (0..num_l).filter(|&l| !pinned[l]).collect();
    let phi: Vec<&[f64]> = free_l.iter().map(|&l| e.phi[l].as_slice()).collect();
    let beta: Vec<f64> = free_l.iter().map(|&l| e.beta[l]).collect();
    let k = free_l.len();
    let probs = p.probs();

    let dual = |lambda: &[f64]| -> f64 {
        let (_, lse) = tilted(probs, &phi, lambda, &support);
        lse + lambda.iter().zip(&beta).map(|(l, b)| l * b).sum::<f64>()
    };

    let mut lambda = vec![0.0; k];
    let mut iterations = 0;
    let kkt_tol = KKT_TOL * e.scale();
    while k > 0 && iterations <= MAX_ITER {
        let (logw, lse) = tilted(probs, &phi, &lambda, &support);
        let q: Vec<f64> = logw.iter().map(|w| (w - lse).exp()).collect();
        let mean: Vec<f64> = phi
            .iter()
            .map(|row| support.iter().zip(&q).map(|(&x, qi)| qi * row[x]).sum())
            .collect();
        let grad: Vec<f64> = beta.iter().zip(&mean).map(|(b, m)| b - m).collect();
        let residual = lambda
            .iter()
            .zip(&grad)
            .map(|(l, g)| (l - (l - g).max(0.0)).abs())
            .fold(0.0, f64::max);
        if residual <= kkt_tol {
            break;
        }
        if iterations >= MAX_ITER {
            return Err(Error::NonConvergence {
                solver: "I-projection",
                iterations,
                residual,
            });
        }
        iterations += 1;

        let free: Vec<usize> = (0..k)
            .filter(|&i| !(lambda[i] <= 0.0 && grad[i] > 0.0))
            .collect();
        let hess = |i: usize, j: usize| -> f64 {
            support
                .iter()
                .zip(&q)
                .map(|(&x, qi)| qi * (phi[i][x] - mean[i]) * (phi[j][x] - mean[j]))
                .sum()
        };
        let mut dir = vec![0.0; k];
        if !free.is_empty() {
            let mut h: Vec<Vec<f64>> = free
                .iter()
                .map(|&i| free.iter().map(|&j| hess(i, j)).collect())
                .collect();
            let ridge = 1e-14 * (1.0 + h.iter().enumerate().map(|(i, r)| r[i]).sum::<f64>());
            for (i, r) in h.iter_mut().enumerate() {
                r[i] += ridge;
            }
            let rhs: Vec<f64> = free.iter().map(|&i| -grad[i]).collect();
            match solve_dense(h, rhs) {
                Some(d) => free.iter().zip(d).for_each(|(&i, v)| dir[i] = v),
                None => free.iter().for_each(|&i| dir[i] = -grad[i]),
            }
        }
        // fall back to steepest descent when Newton does not descend
        if dir.iter().zip(&grad).map(|(d, g)| d * g).sum::<f64>() >= 0.0 {
            dir = grad.iter().map(|g| -g).collect();
        }

        let f0 = dual(&lambda);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..80 {
            let trial: Vec<f64> = lambda
                .iter()
                .zip(&dir)
                .map(|(l, d)| (l + t * d).max(0.0))
                .collect();
            let decrease: f64 = trial
                .iter()
                .zip(&lambda)
                .zip(&grad)
                .map(|((a, b), g)| g * (a - b))
                .sum();
            let f1 = dual(&trial);
            if f1 <= f0 + 1e-4 * decrease || (f1 - f0).abs() <= 1e-15 * f0.abs().max(1.0) {
                accepted = trial != lambda;
                lambda = trial;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence {
                solver: "I-projection",
                iterations,
                residual,
            });
        }
    }

    let (logw, lse) = tilted(probs, &phi, &lambda, &support);
    let mut q = vec![0.0; n];
    for (&x, w) in support.iter().zip(&logw) {
        q[x] = (w - lse).exp();
    }
    let q_star = Pmf::from_weights(q)?;
    let mut multipliers = vec![0.0; num_l];
    for (i, &l) in free_l.iter().enumerate() {
        multipliers[l] = lambda[i];
    }
    for l in (0..num_l).filter(|&l| pinned[l]) {
        multipliers[l] = f64::INFINITY;
    }
    let active: Vec<bool> = (0..num_l)
        .map(|l| {
            pinned[l]
                || (q_star.expect(&e.phi[l]) - e.beta[l]).abs() <= 1e-9 * e.beta[l].abs().max(1.0)
        })
        .collect();
    for l in 0..num_l {
        if !active[l] {
            multipliers[l] = 0.0;
        }
    }
    let divergence_bits = kl_bits(q_star.probs(), probs);
    Ok(ProjectionResult {
        q_star,
        multipliers,
        divergence_bits,
        rs_min_bits: divergence_bits,
        active,
        iterations,
    })
}

/// `D(q*‖p)`: any shaping rate strictly above it makes set selection succeed w.h.p.
pub fn rs_min(p: &Pmf, e: &ConstraintSet) -> Result<f64> {
    Ok(project(p, e)?.divergence_bits)
}

/// Maxwell-Boltzmann pmf `q(x) ∝ exp(−t|x|²)` meeting a power target with equality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxwellBoltzmann {
    pub pmf: Pmf,
    pub t: f64,
    /// `t < 0`: the target exceeds the uniform power, so mass moves outwards.
    pub anti_shaping: bool,
}

fn mb_pmf(energy: &[f64], t: f64) -> Vec<f64> {
    let m = energy
        .iter()
        .map(|e| -t * e)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = energy.iter().map(|e| (-t * e - m).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

fn mean_var(energy: &[f64], q: &[f64]) -> (f64, f64) {
    let mean: f64 = energy.iter().zip(q).map(|(e, p)| e * p).sum();
    let var: f64 = energy
        .iter()
        .zip(q)
        .map(|(e, p)| p * (e - mean) * (e - mean))
        .sum();
    (mean, var)
}

pub fn maxwell_boltzmann(constellation: &[f64], target_power: f64) -> Result<MaxwellBoltzmann> {
    if constellation.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    let energy: Vec<f64> = constellation.iter().map(|x| x * x).collect();
    let min = energy.iter().copied().fold(f64::INFINITY, f64::min);
    let max = energy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let uniform = energy.iter().sum::<f64>() / energy.len() as f64;
    let tol = 1e-12 * target_power.abs().max(1.0);
    if (target_power - uniform).abs() <= tol {
        return Ok(MaxwellBoltzmann {
            pmf: Pmf::uniform(energy.len())?,
            t: 0.0,
            anti_shaping: false,
        });
    }
    if !(target_power > min && target_power < max) {
        return Err(Error::UnreachablePower {
            target: target_power,
            min,
            max,
        });
    }

    // mean power is strictly decreasing in t
    let power_at = |t: f64| mean_var(&energy, &mb_pmf(&energy, t));
    let (mut lo, mut hi) = if target_power < uniform {
        let mut hi = 1.0 / (max - min);
        while power_at(hi).0 > target_power {
            hi *= 2.0;
        }
        (0.0, hi)
    } else {
        let mut lo = -1.0 / (max - min);
        while power_at(lo).0 < target_power {
            lo *= 2.0;
        }
        (lo, 0.0)
    };
    let mut t = 0.5 * (lo + hi);
    for _ in 0..500 {
        let (mean, var) = power_at(t);
        let f = mean - target_power;
        if f.abs() <= tol {
            break;
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let newton = t + f / var;
        t = if var > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * t.abs().max(1e-300) {
            break;
        }
    }
    Ok(MaxwellBoltzmann {
        pmf: Pmf::new(mb_pmf(&energy, t))?,
        t,
        anti_shaping: t < 0.0,
    })
}

/// Sanov upper bound `(N+1)^{|X|} 2^{−N D(q*‖p)}`, clamped to `[0, 1]`.
pub fn sanov_upper(p: &Pmf, e: &ConstraintSet, n: usize) -> Result<f64> {
    let d = rs_min(p, e)?;
    Ok(sanov_upper_from(d, p.support_size(), n))
}

pub fn sanov_upper_from(divergence_bits: f64, alphabet: usize, n: usize) -> f64 {
    let log2v = alphabet as f64 * ((n + 1) as f64).log2() - n as f64 * divergence_bits;
    log2v.min(0.0).exp2()
}

/// Type-class lower bound `2^{−N D}/(N+1)^{|X|}`.
pub fn sanov_lower_from(divergence_bits: f64, alphabet: usize, n: usize) -> f64 {
    (-(n as f64) * divergence_bits - alphabet as f64 * ((n + 1) as f64).log2())
        .min(0.0)
        .exp2()
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `k·ln p` with `0·ln 0 = 0`.
fn k_ln(k: usize, p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * p.ln()
    }
}

/// Largest `k` with `k/n ≤ β₀` under the shared [`TYPE_TOL`] rule, or `None`.
pub fn max_ones(beta0: f64, n: usize) -> Option<usize> {
    if !within_bound(0.0, beta0) {
        return None;
    }
    let mut k = ((beta0 * n as f64).floor().max(0.0) as usize).min(n);
    while k < n && within_bound((k + 1) as f64 / n as f64, beta0) {
        k += 1;
    }
    while k > 0 && !within_bound(k as f64 / n as f64, beta0) {
        k -= 1;
    }
    Some(k)
}

/// Natural log of `P(weight ≤ β₀·n)` for `n` i.i.d. binary draws from `p`.
pub fn ln_exact_pne_binary(p: &Pmf, beta0: f64, n: usize) -> Result<f64> {
    if p.support_size() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.support_size(),
        });
    }
    if !(0.0..=1.0).contains(&beta0) {
        return Err(Error::OutOfRange {
            name: "beta0",
            value: beta0,
        });
    }
    if n > 1_000_000 {
        return Err(Error::OutOfRange {
            name: "block length",
            value: n as f64,
        });
    }
    let Some(kmax) = max_ones(beta0, n) else {
        return Ok(f64::NEG_INFINITY);
    };
    let (p0, p1) = (p.get(0), p.get(1));
    let terms: Vec<f64> = (0..=kmax)
        .map(|k| ln_choose(n, k) + k_ln(k, p1) + k_ln(n - k, p0))
        .collect();
    Ok(log_sum_exp(&terms).min(0.0))
}

/// `p^N(E)` for the binary Hamming constraint: `Σ_{k ≤ ⌊β₀N⌋} C(N,k) p₁^k p₀^{N−k}`.
pub fn exact_pne_binary(p: &Pmf, beta0: f64, n: usize) -> Result<f64> {
    Ok(ln_exact_pne_binary(p, beta0, n)?.exp())
}

/// Largest alphabet handled by exhaustive type enumeration.
pub const TYPE_ENUM_MAX_ALPHABET: usize = 4;
/// Largest block length handled by exhaustive type enumeration.
pub const TYPE_ENUM_MAX_N: usize = 40;

/// `p^N(E)` by enumerating every type with denominator `N`.
pub fn exact_pne_types(p: &Pmf, e: &ConstraintSet, n: usize) -> Result<f64> {
    let m = p.support_size();
    if m > TYPE_ENUM_MAX_ALPHABET || n > TYPE_ENUM_MAX_N {
        return Err(Error::CapExceeded {
            what: "type enumeration",
            log2_size: (m as f64) * ((n + 1) as f64).log2(),
            cap_log2: 0,
        });
    }
    if e.alphabet_size() != m {
        return Err(Error::DimensionMismatch {
            expected: e.alphabet_size(),
            found: m,
        });
    }
    let mut counts = vec![0usize; m];
    let mut total = 0.0;
    enumerate_types(&mut counts, 0, n, &mut |counts| {
        let sums: Vec<f64> = e
            .phi()
            .iter()
            .map(|row| counts.iter().zip(row).map(|(&c, v)| c as f64 * v).sum())
            .collect();
        if e.type_satisfies(&sums, n) {
            let ln = ln_gamma(n as f64 + 1.0)
                + counts
                    .iter()
                    .zip(p.probs())
                    .map(|(&c, &px)| k_ln(c, px) - ln_gamma(c as f64 + 1.0))
                    .sum::<f64>();
            total += ln.exp();
        }
    });
    Ok(total.min(1.0))
}

fn enumerate_types(counts: &mut [usize], at: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[at] = c;
        enumerate_types(counts, at + 1, left - c, f);
    }
}

/// Exact `p^N(E)` when an exact oracle covers the instance.
pub fn exact_pne(p: &Pmf, e: &ConstraintSet, n: usize) -> Option<f64> {
    if let Some(beta0) = e.as_binary_hamming() {
        if (0.0..=1.0).contains(&beta0) {
            return exact_pne_binary(p, beta0, n).ok();
        }
    }
    exact_pne_types(p, e, n).ok()
}

/// `1 − (1 − q)^m`: probability that at least one of `m` independent draws
/// succeeds when each succeeds with probability `q`.
pub fn at_least_one(q: f64, m: f64) -> f64 {
    if q >= 1.0 {
        return 1.0;
    }
    if q <= 0.0 {
        return 0.0;
    }
    (-(m * (-q).ln_1p()).exp_m1()).clamp(0.0, 1.0)
}

/// Finite-`N` set-selection success probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionBounds {
    pub n: usize,
    pub rs_bits: f64,
    pub divergence_bits: f64,
    pub ps_lower: f64,
    pub ps_exact: Option<f64>,
}

/// Lower bound on the probability that a random set of `round(2^{N·R_s})` i.i.d. words
/// contains at least one word of type in `E`, plus the exact value when available.
pub fn theorem1_bounds(
    p: &Pmf,
    e: &ConstraintSet,
    n: usize,
    rs_bits: f64,
    gamma: f64,
) -> Result<SelectionBounds> {
    if !(gamma > 0.0) {
        return Err(Error::OutOfRange {
            name: "gamma",
            value: gamma,
        });
    }
    if !(rs_bits >= 0.0) {
        return Err(Error::OutOfRange {
            name: "shaping rate",
            value: rs_bits,
        });
    }
    let d = rs_min(p, e)?;
    let set_size = (n as f64 * rs_bits).exp2().round().max(1.0);
    let per_word = sanov_lower_from(d + gamma, p.support_size(), n);
    let ps_lower = at_least_one(per_word, set_size);
    let ps_exact = exact_pne(p, e, n).map(|q| at_least_one(q, set_size));
    Ok(SelectionBounds {
        n,
        rs_bits,
        divergence_bits: d,
        ps_lower,
        ps_exact,
    })
}
