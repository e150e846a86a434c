//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) before asserting.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shaping_core::channels::{
    awgn_sweep, binary_sweep, bnsc, bnsc_mjt_input, bsc, capacity_snr_db, constrained_capacity_baa,
    gaussian_largecode_rate, optimize_alpha, pam, pam_shaping, quantized_awgn, Objective,
    OutputGrid, PamAwgnConfig,
};
use shaping_core::montecarlo::{decode_experiment, estimate_ps, McConfig, McResult, Selection};
use shaping_core::projection::{exact_pne_binary, ln_exact_pne_binary, project};
use shaping_core::rates::{gallager_e0, mismatched_mi, rate_report, solve_mjt_given};
use shaping_core::{Channel, ConstraintSet, Pmf};

// ---------------------------------------------------------------- oracles

fn h2(x: f64) -> f64 {
    entropy(&[x, 1.0 - x])
}

fn entropy(v: &[f64]) -> f64 {
    -v.iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.log2())
        .sum::<f64>()
}

fn kl(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, _)| **x > 0.0)
        .map(|(x, y)| x * (x / y).log2())
        .sum()
}

fn out_marg(p: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
    (0..w[0].len())
        .map(|y| p.iter().zip(w).map(|(px, row)| px * row[y]).sum())
        .collect()
}

fn mi(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let hyx: f64 = p.iter().zip(w).map(|(px, row)| px * entropy(row)).sum();
    entropy(&out_marg(p, w)) - hyx
}

fn e0_direct(rho: f64, p1: &[f64], p2: &[f64], w: &[Vec<f64>]) -> f64 {
    let s = 1.0 / (1.0 + rho);
    let total: f64 = (0..w[0].len())
        .map(|y| {
            let a: f64 = (0..p1.len()).map(|x| p1[x] * w[x][y].powf(s)).sum();
            let b: f64 = (0..p2.len()).map(|x| p2[x] * w[x][y].powf(s)).sum();
            a * b.powf(rho)
        })
        .sum();
    -total.log2()
}

fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

// ---------------------------------------------------------------- reporting

struct Report {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
    start: Instant,
    limit: Duration,
}

impl Report {
    fn new(id: u32, name: &'static str, limit_secs: u64) -> Self {
        Self {
            id,
            name,
            failures: Vec::new(),
            notes: Vec::new(),
            start: Instant::now(),
            limit: Duration::from_secs(limit_secs),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(mut self) {
        let elapsed = self.start.elapsed();
        if elapsed > self.limit {
            self.failures
                .push(format!("runtime {elapsed:.2?} exceeds {:?}", self.limit));
        }
        let status = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut detail = self.notes.join("; ");
        if !self.failures.is_empty() {
            detail = format!("{}; failures: {}", detail, self.failures.join(" | "));
        }
        let line = format!(
            "acceptance criterion {:>2} {:<28} {status} [{elapsed:.2?}] {detail}",
            self.id, self.name
        );
        let _ = writeln!(std::io::stderr(), "{line}");
        assert!(self.failures.is_empty(), "{line}");
    }
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_bsc_coincidence() {
    let mut r = Report::new(1, "bsc-coincidence", 1);
    let u = Pmf::uniform(2).unwrap();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for gamma in [0.05, 0.1, 0.2] {
        let ch = bsc(gamma).unwrap();
        for beta0 in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let e = ConstraintSet::hamming(beta0).unwrap();
            let rep = rate_report(&u, &e, &ch).unwrap();
            let q1 = beta0.min(0.5);
            let y1 = q1 * (1.0 - gamma) + (1.0 - q1) * gamma;
            let loss = h2(y1) - h2(q1);
            let d_ng = (rep.r_naive_bits - rep.r_gallager_bits).abs();
            let d_nm = match rep.r_mjt_bits {
                Some(m) => (rep.r_naive_bits - m).abs(),
                None => f64::INFINITY,
            };
            let d_loss = (rep.r_matched_bits - rep.r_gallager_bits - loss).abs();
            worst = (worst.0.max(d_ng), worst.1.max(d_nm), worst.2.max(d_loss));
            r.check(d_ng < 1e-9, || {
                format!("γ={gamma} β₀={beta0}: |naive−G|={d_ng:e}")
            });
            r.check(d_nm < 1e-6, || {
                format!("γ={gamma} β₀={beta0}: |naive−MJT|={d_nm:e}")
            });
            r.check(d_loss < 1e-9, || {
                format!("γ={gamma} β₀={beta0}: loss identity off by {d_loss:e}")
            });
        }
    }
    r.note(format!(
        "max |naive−G|={:.1e}, |naive−MJT|={:.1e}, loss residual={:.1e}",
        worst.0, worst.1, worst.2
    ));
    r.finish();
}

#[test]
fn criterion_02_mismatched_slope() {
    let mut r = Report::new(2, "e0-slope-closed-form", 5);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 50 {
        let nx = rng.random_range(2..=4);
        let ny = rng.random_range(2..=4);
        let w: Vec<Vec<f64>> = (0..nx).map(|_| random_pmf(&mut rng, ny)).collect();
        let p = random_pmf(&mut rng, nx);
        let phi: Vec<f64> = (0..nx).map(|_| rng.random_range(0.0..1.0)).collect();
        let min = phi.iter().copied().fold(f64::INFINITY, f64::min);
        let mean: f64 = p.iter().zip(&phi).map(|(a, b)| a * b).sum();
        let beta = min + 0.5 * (mean - min);
        let e = ConstraintSet::new(vec![phi], vec![beta]).unwrap();
        let ch = Channel::new(w.clone()).unwrap();
        let pp = Pmf::new(p.clone()).unwrap();
        let q = project(&pp, &e).unwrap().q_star;
        let oracle = mi(q.probs(), &w) + kl(&out_marg(q.probs(), &w), &out_marg(&p, &w));
        let rho = 1e-5;
        let slope = gallager_e0(rho, &q, &pp, &ch).unwrap() / rho;
        let direct = e0_direct(rho, q.probs(), &p, &w) / rho;
        let lib = mismatched_mi(&q, &pp, &ch).unwrap();
        let d = (slope - oracle).abs();
        worst = worst.max(d);
        r.check(d < 1e-3, || {
            format!("instance {done}: slope {slope} vs {oracle}")
        });
        r.check((direct - slope).abs() < 1e-6, || {
            format!("instance {done}: log-domain E0 {slope} vs direct {direct}")
        });
        r.check((lib - oracle).abs() < 1e-12, || {
            format!("instance {done}: mismatched_mi {lib} vs {oracle}")
        });
        done += 1;
    }
    r.note(format!(
        "50 instances, max |E0/ρ − I_q*,p| = {worst:.2e} bits"
    ));
    r.finish();
}

#[test]
fn criterion_03_sanov_sandwich() {
    let mut r = Report::new(3, "sanov-sandwich", 1);
    let u = Pmf::uniform(2).unwrap();
    let d = 1.0 - h2(0.3);
    for n in 5..=60usize {
        let exact = exact_pne_binary(&u, 0.3, n).unwrap();
        // direct binomial sum
        let mut c = 1.0f64;
        let mut oracle = 0.0;
        for k in 0..=n {
            if k as f64 / n as f64 <= 0.3 + 1e-12 {
                oracle += c;
            }
            c *= (n - k) as f64 / (k + 1) as f64;
        }
        oracle /= 2f64.powi(n as i32);
        let nf = n as f64;
        let upper = (nf + 1.0).powi(2) * (-nf * d).exp2();
        let lower = (nf + 1.0).powi(-2) * (-nf * d).exp2();
        r.check((exact - oracle).abs() <= 1e-12 * oracle, || {
            format!("N={n}: exact {exact} vs binomial {oracle}")
        });
        r.check(lower <= exact && exact <= upper, || {
            format!("N={n}: {exact} outside [{lower}, {upper}]")
        });
    }
    let n = 4000;
    let rate = -ln_exact_pne_binary(&u, 0.3, n).unwrap() / (n as f64 * std::f64::consts::LN_2);
    r.check((rate - 0.118709).abs() < 0.01, || {
        format!("N=4000 exponent {rate}")
    });
    r.note(format!(
        "N ∈ [5,60] inside sandwich; −(1/N)log₂p^N(E) at N=4000 = {rate:.6}"
    ));
    r.finish();
}

fn binary_mc(
    n: usize,
    rs: f64,
    rq: f64,
    beta0: f64,
    ch: Channel,
    trials: usize,
    seed: u64,
) -> McConfig {
    McConfig {
        n,
        rs_bits: rs,
        rq_bits: rq,
        p: Pmf::uniform(2).unwrap(),
        e: ConstraintSet::hamming(beta0).unwrap(),
        ch,
        trials,
        seed,
        selection: Selection::FirstSatisfying,
    }
}

#[test]
fn criterion_04_selection_monte_carlo() {
    let mut r = Report::new(4, "selection-monte-carlo", 60);
    let u = Pmf::uniform(2).unwrap();
    for rs in [0.2, 0.05] {
        let mut hats = Vec::new();
        for n in [16usize, 32, 64] {
            let mut succ = 0u64;
            let mut total = 0u64;
            for seed in 0..20u64 {
                let cfg = binary_mc(n, rs, 0.0, 0.3, bsc(0.1).unwrap(), 500, 1000 + seed);
                let est = estimate_ps(&cfg).unwrap().ps_hat.unwrap();
                succ += est.successes;
                total += est.trials;
            }
            let hat = succ as f64 / total as f64;
            let m = (2f64.powf(n as f64 * rs).round()).max(1.0);
            let q = exact_pne_binary(&u, 0.3, n).unwrap();
            let exact = 1.0 - (1.0 - q).powf(m);
            let sigma = (exact * (1.0 - exact) / total as f64).sqrt();
            r.check((hat - exact).abs() <= 3.0 * sigma, || {
                format!("rs={rs} n={n}: ps_hat {hat:.4} vs exact {exact:.4} (σ={sigma:.1e})")
            });
            hats.push((n, hat, exact));
        }
        let increasing = hats.windows(2).all(|w| w[1].1 > w[0].1);
        let decreasing = hats.windows(2).all(|w| w[1].1 < w[0].1);
        if rs > 0.118709 {
            r.check(increasing, || format!("rs={rs}: not increasing {hats:?}"));
        } else {
            r.check(decreasing, || format!("rs={rs}: not decreasing {hats:?}"));
        }
        r.note(format!(
            "rs={rs}: {}",
            hats.iter()
                .map(|(n, h, e)| format!("n={n} {h:.4}/{e:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    r.finish();
}

#[test]
fn criterion_05_conditional_limit() {
    let mut r = Report::new(5, "conditional-limit", 60);
    let mut mean = [0.0f64; 2];
    let mut min_pooled = u64::MAX;
    for (i, n) in [16usize, 64].into_iter().enumerate() {
        for seed in 0..20u64 {
            let cfg = binary_mc(n, 0.3, 0.0, 0.3, bsc(0.1).unwrap(), 500, 5000 + seed);
            let res = estimate_ps(&cfg).unwrap();
            mean[i] += res.marginal_l1.unwrap() / 20.0;
            if n == 64 {
                min_pooled = min_pooled.min(res.pooled_symbols);
            }
        }
    }
    r.check(mean[1] < mean[0], || {
        format!("L1 n=64 {} ≥ n=16 {}", mean[1], mean[0])
    });
    r.check(mean[1] < 0.05, || format!("L1 n=64 = {}", mean[1]));
    r.check(min_pooled >= 10_000, || {
        format!("only {min_pooled} pooled symbols")
    });
    r.note(format!(
        "mean L1 n=16 {:.4}, n=64 {:.4}; ≥{min_pooled} symbols per seed at n=64",
        mean[0], mean[1]
    ));
    r.finish();
}

/// SNR (dB) at which `f` reaches `target`, by the Illinois variant of regula falsi.
fn snr_at(f: &dyn Fn(f64) -> f64, target: f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a) - target;
    let mut fb = f(b) - target;
    assert!(
        fa < 0.0 && fb > 0.0,
        "bracket [{a}, {b}] misses {target}: {fa} {fb}"
    );
    let mut side = 0;
    for _ in 0..100 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c) - target;
        if fc.abs() < 1e-9 || (b - a) < 1e-5 {
            return c;
        }
        if fc < 0.0 {
            a = c;
            fa = fc;
            if side == -1 {
                fb /= 2.0;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if side == 1 {
                fa /= 2.0;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

fn pam16_cfg(snr_db: f64, grid: OutputGrid) -> PamAwgnConfig {
    let mut cfg = PamAwgnConfig::new(pam(16).unwrap(), 1.0, 1.0, 10f64.powf(snr_db / 10.0));
    cfg.output_grid = grid;
    cfg
}

fn gaps(grid: OutputGrid) -> [f64; 4] {
    let matched = |s: f64| {
        optimize_alpha(&pam16_cfg(s, grid), Objective::Matched)
            .unwrap()
            .1
    };
    let mismatched = |s: f64| {
        let cfg = pam16_cfg(s, grid);
        let g = optimize_alpha(&cfg, Objective::Gallager).unwrap().1;
        let m = optimize_alpha(&cfg, Objective::Mjt).unwrap().1;
        g.max(m)
    };
    let c3 = capacity_snr_db(3.0);
    let c1 = capacity_snr_db(1.0);
    [
        snr_at(&matched, 3.0, c3 - 0.5, c3 + 1.5) - c3,
        snr_at(&mismatched, 3.0, c3 - 0.5, c3 + 1.5) - c3,
        snr_at(&matched, 1.0, c1 - 0.5, c1 + 1.5) - c1,
        snr_at(&mismatched, 1.0, c1 - 0.5, c1 + 1.5) - c1,
    ]
}

#[test]
fn criterion_06_pam16_awgn() {
    let mut r = Report::new(6, "pam16-awgn-gaps", 300);
    let base = OutputGrid::default();
    let fine = OutputGrid {
        points_per_sigma: 2 * base.points_per_sigma,
        ..base
    };
    let g = gaps(base);
    let gf = gaps(fine);
    let [m3, x3, m1, x1] = g;
    r.check((m3 - 0.1).abs() <= 0.1, || {
        format!("matched gap at 3 bits {m3:.3} dB")
    });
    r.check((x3 - 0.2).abs() <= 0.1, || {
        format!("mismatched gap at 3 bits {x3:.3} dB")
    });
    r.check(m1 <= 0.05, || format!("matched gap at 1 bit {m1:.3} dB"));
    r.check((x1 - 0.3).abs() <= 0.15, || {
        format!("mismatched gap at 1 bit {x1:.3} dB")
    });
    for (a, b) in g.iter().zip(&gf) {
        r.check((a - b).abs() < 0.02, || {
            format!("refinement shift {a:.4} → {b:.4} dB")
        });
    }

    let snrs: Vec<f64> = (0..=60).map(|i| 0.5 * i as f64).collect();
    let rows = awgn_sweep(&pam(16).unwrap(), 1.0, &snrs, base).unwrap();
    for row in &rows {
        r.check(row.r_matched_bits <= row.capacity_bits + 0.01, || {
            format!("{} dB: matched above capacity", row.snr_db)
        });
        r.check(row.r_matched_bits >= row.r_uniform_bits - 1e-12, || {
            format!("{} dB: matched below uniform", row.snr_db)
        });
        r.check(row.r_gallager_bits <= row.r_matched_bits + 1e-12, || {
            format!("{} dB: gallager above matched", row.snr_db)
        });
    }
    let last = rows.last().unwrap();
    r.check((last.r_matched_bits - 4.0).abs() < 0.01, || {
        format!("30 dB matched {}", last.r_matched_bits)
    });
    r.note(format!(
        "gaps (dB) 3 bits: matched {m3:.3}, mismatched {x3:.3}; 1 bit: matched {m1:.3}, mismatched {x1:.3}; \
         refined shifts {:.4}/{:.4}/{:.4}/{:.4}; sweep of {} points",
        (gf[0] - m3).abs(),
        (gf[1] - x3).abs(),
        (gf[2] - m1).abs(),
        (gf[3] - x1).abs(),
        rows.len()
    ));
    r.finish();
}

#[test]
fn criterion_07_bnsc_ordering() {
    let mut r = Report::new(7, "bnsc-ordering", 10);
    let ch = bnsc(0.025, 0.05).unwrap();
    let betas: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
    let uni = binary_sweep(&ch, &Pmf::uniform(2).unwrap(), &betas).unwrap();
    let mut min_gain = f64::INFINITY;
    for row in &uni {
        r.check(row.r_mjt_bits.is_none(), || {
            format!("β₀={}: MJT reported", row.beta0)
        });
        let gain = row.r_gallager_bits - row.r_naive_bits;
        min_gain = min_gain.min(gain);
        r.check(gain >= 0.0, || {
            format!("β₀={}: R_G < R_naive by {}", row.beta0, -gain)
        });
    }
    let p = bnsc_mjt_input(0.025, 0.05).unwrap();
    let shaped = binary_sweep(&ch, &p, &betas).unwrap();
    let mut worst = 0.0f64;
    for row in &shaped {
        match row.r_mjt_bits {
            Some(m) => {
                let d = (row.r_gallager_bits - m).abs();
                worst = worst.max(d);
                r.check(d < 0.05, || {
                    format!("β₀={}: |R_G − R_MJT| = {d}", row.beta0)
                });
            }
            None => r.check(false, || format!("β₀={}: MJT missing", row.beta0)),
        }
    }
    r.note(format!(
        "uniform: min R_G − R_naive = {min_gain:.3e}; p(0)={:.4}: max |R_G − R_MJT| = {worst:.3e}",
        p.get(0)
    ));
    r.finish();
}

#[test]
fn criterion_08_gaussian_large_code() {
    let mut r = Report::new(8, "gaussian-large-code", 1);
    let kl_nats = |a: f64, b: f64| 0.5 * (a / b - 1.0 - (a / b).ln());
    let mut last_gap = f64::INFINITY;
    let mut gaps = Vec::new();
    for b0 in [1e2, 1e4, 1e6] {
        let (exact, approx) = gaussian_largecode_rate(1.0, b0, 0.01).unwrap();
        let oracle = (0.5 * (1.0f64 + 100.0).ln() + kl_nats(1.01, b0 + 0.01) - kl_nats(1.0, b0))
            / std::f64::consts::LN_2;
        r.check((exact - oracle).abs() < 1e-12, || {
            format!("B₀={b0}: {exact} vs {oracle}")
        });
        r.check((approx - 0.5 * 100f64.log2()).abs() < 1e-15, || {
            format!("approx {approx}")
        });
        let gap = (exact - approx).abs();
        r.check(gap < last_gap, || format!("gap not shrinking at B₀={b0}"));
        last_gap = gap;
        gaps.push(gap);
    }
    r.check(last_gap < 0.02, || format!("gap at B₀=1e6 is {last_gap}"));
    r.note(format!(
        "gaps {:.3e}, {:.3e}, {:.3e} bits",
        gaps[0], gaps[1], gaps[2]
    ));
    r.finish();
}

fn dominance(res: &McResult) -> (bool, f64, f64, f64) {
    let m = res.err_matched.unwrap();
    let x = res.err_mismatched_message.unwrap();
    let sigma = (m.std_err.powi(2) + x.std_err.powi(2)).sqrt();
    (m.value <= x.value + 3.0 * sigma, m.value, x.value, sigma)
}

#[test]
fn criterion_09_decoder_dominance() {
    let mut r = Report::new(9, "decoder-dominance", 120);
    let p_bnsc = bnsc_mjt_input(0.025, 0.05).unwrap();
    let mut instances = vec![
        binary_mc(10, 0.2, 0.3, 0.3, bsc(0.1).unwrap(), 10_000, 11),
        binary_mc(12, 0.25, 0.25, 0.25, bsc(0.05).unwrap(), 10_000, 12),
        binary_mc(8, 0.25, 0.5, 0.4, bsc(0.2).unwrap(), 10_000, 13),
    ];
    let mut c = binary_mc(10, 0.2, 0.3, 0.3, bnsc(0.025, 0.05).unwrap(), 10_000, 14);
    c.p = p_bnsc;
    instances.push(c);
    for (i, cfg) in instances.iter().enumerate() {
        let base = decode_experiment(cfg).unwrap();
        let (ok, m, x, s) = dominance(&base);
        r.check(ok, || {
            format!("instance {i}: matched {m} > message {x} + 3·{s}")
        });
        r.check(base.decode_trials >= 10_000 / 2, || {
            format!("instance {i}: only {} transmissions", base.decode_trials)
        });
        r.note(format!("#{i} matched {m:.4} ≤ message {x:.4}"));
        let again = decode_experiment(cfg).unwrap();
        r.check(again == base, || format!("instance {i}: rerun differs"));
        let ps = estimate_ps(cfg).unwrap();
        for threads in [1, 4, 8] {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            let (d, e) =
                pool.install(|| (decode_experiment(cfg).unwrap(), estimate_ps(cfg).unwrap()));
            r.check(d == base && e == ps, || {
                format!("instance {i}: {threads} threads changed the result")
            });
        }
    }
    r.note("bit-identical across reruns and 1/4/8 threads".into());
    r.finish();
}

/// Minimizes `D(q‖p)` over `{q : Σ q φ_j ≤ β_j}` on successively refined grids.
fn grid_projection(p: &[f64], phi: &[Vec<f64>], beta: &[f64]) -> Vec<f64> {
    let k = p.len();
    let feasible = |q: &[f64]| {
        q.iter().all(|&v| v >= 0.0)
            && phi
                .iter()
                .zip(beta)
                .all(|(f, b)| q.iter().zip(f).map(|(a, c)| a * c).sum::<f64>() <= b + 1e-12)
    };
    let full = |coords: &[f64]| {
        let mut q = coords.to_vec();
        q.push(1.0 - coords.iter().sum::<f64>());
        q
    };
    let dims = k - 1;
    let mut centre = vec![0.5 / dims as f64; dims];
    let mut half = 0.5f64;
    let mut step = 0.005f64;
    let mut best: Option<(Vec<f64>, f64)> = None;
    while step > 1e-9 {
        let pts = (2.0 * half / step).round() as i64;
        let mut idx = vec![0i64; dims];
        loop {
            let coords: Vec<f64> = (0..dims)
                .map(|d| centre[d] - half + idx[d] as f64 * step)
                .collect();
            let q = full(&coords);
            if feasible(&q) {
                let v = kl(&q, p);
                if best.as_ref().is_none_or(|(_, b)| v < *b) {
                    best = Some((q, v));
                }
            }
            let mut d = 0;
            loop {
                if d == dims {
                    break;
                }
                idx[d] += 1;
                if idx[d] <= pts {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        let b = &best.as_ref().expect("feasible grid point").0;
        centre = b[..dims].to_vec();
        half = 5.0 * step;
        step /= 10.0;
    }
    best.unwrap().0
}

struct MjtOracle {
    base: Vec<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    target: (f64, f64),
}

impl MjtOracle {
    fn new(p: &[f64], q: &[f64], w: &[Vec<f64>]) -> Self {
        let qy = out_marg(q, w);
        let (mut base, mut t1, mut t2) = (Vec::new(), Vec::new(), Vec::new());
        let mut target2 = 0.0;
        for x in 0..p.len() {
            for y in 0..qy.len() {
                let pxy = p[x] * w[x][y];
                if pxy > 0.0 {
                    target2 += pxy * pxy.ln();
                    if qy[y] > 0.0 {
                        base.push(p[x].ln() + qy[y].ln());
                        t1.push(qy[y].ln());
                        t2.push(pxy.ln());
                    }
                }
            }
        }
        let target1 = qy.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum();
        Self {
            base,
            t1,
            t2,
            target: (target1, target2),
        }
    }

    fn weights(&self, l1: f64, l2: f64) -> Vec<f64> {
        let lw: Vec<f64> = (0..self.base.len())
            .map(|i| self.base[i] + l1 * self.t1[i] + l2 * self.t2[i])
            .collect();
        let m = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = lw.iter().map(|v| (v - m).exp()).sum();
        lw.iter().map(|v| (v - m).exp() / s).collect()
    }

    fn dual(&self, l1: f64, l2: f64) -> f64 {
        let lw: Vec<f64> = (0..self.base.len())
            .map(|i| self.base[i] + l1 * self.t1[i] + l2 * self.t2[i])
            .collect();
        let m = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + lw.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        lse - l1 * self.target.0 - l2 * self.target.1
    }

    fn residual(&self, l1: f64, l2: f64) -> f64 {
        let q = self.weights(l1, l2);
        let m1: f64 = q.iter().zip(&self.t1).map(|(a, b)| a * b).sum();
        let m2: f64 = q.iter().zip(&self.t2).map(|(a, b)| a * b).sum();
        (m1 - self.target.0).abs().max((m2 - self.target.1).abs())
    }

    fn divergence_bits(&self, l1: f64, l2: f64) -> f64 {
        let q = self.weights(l1, l2);
        q.iter()
            .zip(&self.base)
            .filter(|(a, _)| **a > 0.0)
            .map(|(a, b)| a * (a.ln() - b))
            .sum::<f64>()
            / std::f64::consts::LN_2
    }

    /// Coarse-to-fine grid minimization of the convex dual.
    fn grid(&self) -> (f64, f64) {
        let (mut c1, mut c2) = (0.0, 0.0);
        let mut half = 10.0f64;
        let mut step = 0.05;
        while step > 1e-9 {
            let n = (2.0 * half / step).round() as i64;
            let mut best = (f64::INFINITY, c1, c2);
            for i in 0..=n {
                for j in 0..=n {
                    let (a, b) = (c1 - half + i as f64 * step, c2 - half + j as f64 * step);
                    let v = self.dual(a, b);
                    if v < best.0 {
                        best = (v, a, b);
                    }
                }
            }
            c1 = best.1;
            c2 = best.2;
            half = 3.0 * step;
            step /= 10.0;
        }
        (c1, c2)
    }
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut r = Report::new(10, "oracle-equivalence", 60);

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_proj = 0.0f64;
    for i in 0..10 {
        let k = if i < 3 { 2 } else { 3 };
        let constraints = if i >= 6 { 2 } else { 1 };
        let p = random_pmf(&mut rng, k);
        let phi: Vec<Vec<f64>> = (0..constraints)
            .map(|_| (0..k).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        // a random interior point fixes feasible budgets below the mean under p
        let inner = random_pmf(&mut rng, k);
        let beta: Vec<f64> = phi
            .iter()
            .map(|f| {
                let a: f64 = inner.iter().zip(f).map(|(x, y)| x * y).sum();
                let b: f64 = p.iter().zip(f).map(|(x, y)| x * y).sum();
                a.max(0.5 * (a + b))
            })
            .collect();
        let e = ConstraintSet::new(phi.clone(), beta.clone()).unwrap();
        let q = project(&Pmf::new(p.clone()).unwrap(), &e).unwrap().q_star;
        let g = grid_projection(&p, &phi, &beta);
        let l1: f64 = q.probs().iter().zip(&g).map(|(a, b)| (a - b).abs()).sum();
        worst_proj = worst_proj.max(l1);
        r.check(l1 < 1e-3, || format!("projection instance {i}: L1 {l1:e}"));
    }

    let mut worst_res = 0.0f64;
    let mut worst_div = 0.0f64;
    let mjt_cases: Vec<(Pmf, Pmf, Channel)> = {
        let u = Pmf::uniform(2).unwrap();
        let ch = bsc(0.1).unwrap();
        let q1 = project(&u, &ConstraintSet::hamming(0.3).unwrap())
            .unwrap()
            .q_star;
        let pb = bnsc_mjt_input(0.025, 0.05).unwrap();
        let chb = bnsc(0.025, 0.05).unwrap();
        let q2 = project(&pb, &ConstraintSet::hamming(0.3).unwrap())
            .unwrap()
            .q_star;
        let mut cfg = PamAwgnConfig::new(pam(4).unwrap(), 1.0, 1.0, 4.0);
        let (lo, hi) = cfg.alpha_bracket().unwrap();
        cfg.alpha = 0.5 * (lo + hi);
        let s = pam_shaping(&cfg).unwrap();
        vec![
            (u, q1, ch),
            (pb, q2, chb),
            (s.p, s.q_star, quantized_awgn(&cfg).unwrap()),
        ]
    };
    for (i, (p, q, ch)) in mjt_cases.iter().enumerate() {
        let sol = solve_mjt_given(p, q, ch).unwrap();
        let oracle = MjtOracle::new(p.probs(), q.probs(), ch.rows());
        let res = oracle.residual(sol.lambda1, sol.lambda2);
        let (g1, g2) = oracle.grid();
        let dd = (oracle.divergence_bits(g1, g2) - sol.divergence_bits).abs();
        worst_res = worst_res.max(res);
        worst_div = worst_div.max(dd);
        r.check(res < 1e-6, || format!("MJT instance {i}: residual {res:e}"));
        r.check(dd < 1e-6, || {
            format!("MJT instance {i}: divergence differs by {dd:e}")
        });
    }

    let mut worst_baa = 0.0f64;
    for (gamma, beta0) in [(0.1, 0.2), (0.05, 0.3), (0.2, 0.1), (0.1, 0.45)] {
        let ch = bsc(gamma).unwrap();
        let (_, c) =
            constrained_capacity_baa(&ch, &ConstraintSet::hamming(beta0).unwrap(), 1e-9).unwrap();
        let w = ch.rows();
        let steps = 200_000;
        let grid = (0..=steps)
            .map(|i| {
                let q1 = beta0 * i as f64 / steps as f64;
                mi(&[1.0 - q1, q1], w)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let d = (c - grid).abs();
        worst_baa = worst_baa.max(d);
        r.check(d < 1e-4, || {
            format!("BAA γ={gamma} β₀={beta0}: {c} vs grid {grid}")
        });
    }
    r.note(format!(
        "projection max L1 {worst_proj:.1e}; MJT max residual {worst_res:.1e}, max ΔD {worst_div:.1e}; \
         BAA max gap {worst_baa:.1e} bits"
    ));
    r.finish();
}
