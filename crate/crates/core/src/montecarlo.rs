//! Monte Carlo simulation of random set selection and decoding.
//!
//! Each trial owns an independent random stream: a [`ChaCha8Rng`] seeded from the
//! configuration seed with its stream number set to the trial index. Within a
//! trial, symbols are drawn in (set, word, symbol) order. Tallies are integer
//! counts combined by addition, so results do not depend on the thread count.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{Channel, Pmf};
use crate::projection::{project, ConstraintSet};

/// Identity of the random generator, for output metadata.
pub const RNG_DESCRIPTION: &str =
    "ChaCha8Rng (rand_chacha 0.9) seeded with seed_from_u64(seed), stream = trial index";

/// Largest set size (log₂) accepted by [`estimate_ps`].
pub const PS_CAP_LOG2: u32 = 26;
/// Largest full codebook (log₂) accepted by [`decode_experiment`].
pub const DECODE_CAP_LOG2: u32 = 22;

const Z95: f64 = 1.959_963_984_540_054;

/// How one word is picked from a random set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Lowest index whose type satisfies every constraint.
    #[default]
    FirstSatisfying,
    /// Satisfying word with the smallest constraint sum; single constraint only.
    MinMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Block length `N`.
    pub n: usize,
    pub rs_bits: f64,
    pub rq_bits: f64,
    pub p: Pmf,
    pub e: ConstraintSet,
    pub ch: Channel,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub selection: Selection,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfRange {
                name: "n",
                value: 0.0,
            });
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange {
                name: "trials",
                value: 0.0,
            });
        }
        for (name, value) in [("rs_bits", self.rs_bits), ("rq_bits", self.rq_bits)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::OutOfRange { name, value });
            }
        }
        let k = self.p.support_size();
        if k > 256 {
            return Err(Error::Config("alphabet larger than 256 symbols".into()));
        }
        for found in [self.e.alphabet_size(), self.ch.input_size()] {
            if found != k {
                return Err(Error::DimensionMismatch { expected: k, found });
            }
        }
        if self.selection == Selection::MinMetric && self.e.num_constraints() != 1 {
            return Err(Error::Config(
                "min-metric selection needs exactly one constraint".into(),
            ));
        }
        Ok(())
    }

    /// Words per random set: `round(2^{N·R_s})`, at least one.
    pub fn set_size(&self) -> u64 {
        size_from_log2(self.n as f64 * self.rs_bits)
    }

    /// Number of random sets: `round(2^{N·R_q})`, at least one.
    pub fn num_sets(&self) -> u64 {
        size_from_log2(self.n as f64 * self.rq_bits)
    }
}

fn size_from_log2(l: f64) -> u64 {
    (2f64.powf(l).round() as u64).max(1)
}

/// A binomial proportion with a 95% Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `sqrt(p̂(1−p̂)/n)`.
    pub std_err: f64,
}

impl Estimate {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self {
                successes,
                trials,
                value: f64::NAN,
                ci_low: 0.0,
                ci_high: 1.0,
                std_err: f64::NAN,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            successes,
            trials,
            value: p,
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
            std_err: (p * (1.0 - p) / n).sqrt(),
        }
    }

    /// Whether `x` lies within `k` standard errors, with the standard error
    /// evaluated at `x` so that degenerate estimates of 0 or 1 still compare.
    pub fn within_sigmas(&self, x: f64, k: f64) -> bool {
        let se = (x * (1.0 - x) / self.trials as f64).sqrt();
        (self.value - x).abs() <= k * se.max(self.std_err) + 1e-15
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub trials: u64,
    pub set_size: u64,
    pub ps_hat: Option<Estimate>,
    /// Empirical marginal of the selected words' symbols.
    pub marginal: Option<Vec<f64>>,
    /// `‖marginal − q*‖₁`.
    pub marginal_l1: Option<f64>,
    pub pooled_symbols: u64,
    pub num_sets: u64,
    /// Trials in which some set had a selected word and a transmission took place.
    pub decode_trials: u64,
    /// Sets (over all trials) with no constraint-satisfying word.
    pub empty_sets: u64,
    pub err_matched: Option<Estimate>,
    pub err_mismatched_codeword: Option<Estimate>,
    pub err_mismatched_message: Option<Estimate>,
}

impl McResult {
    fn empty(trials: u64, set_size: u64, num_sets: u64) -> Self {
        Self {
            trials,
            set_size,
            ps_hat: None,
            marginal: None,
            marginal_l1: None,
            pooled_symbols: 0,
            num_sets,
            decode_trials: 0,
            empty_sets: 0,
            err_matched: None,
            err_mismatched_codeword: None,
            err_mismatched_message: None,
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

struct Sampler {
    symbols: WeightedIndex<f64>,
    outputs: Vec<WeightedIndex<f64>>,
    ln_w: Vec<Vec<f64>>,
}

impl Sampler {
    fn new(cfg: &McConfig) -> Result<Self> {
        let weighted = |w: &[f64]| {
            WeightedIndex::new(w.iter().copied())
                .map_err(|e| Error::Config(format!("cannot sample from pmf: {e}")))
        };
        Ok(Self {
            symbols: weighted(cfg.p.probs())?,
            outputs: cfg
                .ch
                .rows()
                .iter()
                .map(|r| weighted(r))
                .collect::<Result<_>>()?,
            ln_w: cfg
                .ch
                .rows()
                .iter()
                .map(|r| r.iter().map(|w| w.ln()).collect())
                .collect(),
        })
    }

    fn word(&self, rng: &mut ChaCha8Rng, n: usize, out: &mut [u8]) {
        for s in out.iter_mut().take(n) {
            *s = self.symbols.sample(rng) as u8;
        }
    }
}

/// Per-constraint sums `Σ_i φ_j(x_i)`, accumulated through symbol counts.
fn constraint_sums(e: &ConstraintSet, word: &[u8], counts: &mut [u64]) -> Vec<f64> {
    counts.iter_mut().for_each(|c| *c = 0);
    for &s in word {
        counts[s as usize] += 1;
    }
    e.phi()
        .iter()
        .map(|phi| counts.iter().zip(phi).map(|(c, f)| *c as f64 * f).sum())
        .collect()
}

/// Index of the selected word in a set stored contiguously, if any.
fn select(cfg: &McConfig, words: &[u8], count: usize, counts: &mut [u64]) -> Option<usize> {
    let n = cfg.n;
    let mut best: Option<(usize, f64)> = None;
    for w in 0..count {
        let sums = constraint_sums(&cfg.e, &words[w * n..(w + 1) * n], counts);
        if cfg.e.type_satisfies(&sums, n) {
            match cfg.selection {
                Selection::FirstSatisfying => return Some(w),
                Selection::MinMetric => {
                    if best.is_none_or(|(_, m)| sums[0] < m) {
                        best = Some((w, sums[0]));
                    }
                }
            }
        }
    }
    best.map(|b| b.0)
}

#[derive(Default, Clone)]
struct SelectionTally {
    accepted: u64,
    counts: Vec<u64>,
}

impl SelectionTally {
    fn merge(mut self, other: Self) -> Self {
        self.accepted += other.accepted;
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }
}

fn run_selection(cfg: &McConfig) -> Result<SelectionTally> {
    cfg.validate()?;
    let log2_size = cfg.n as f64 * cfg.rs_bits;
    if log2_size > PS_CAP_LOG2 as f64 {
        return Err(Error::CapExceeded {
            what: "random set size",
            log2_size,
            cap_log2: PS_CAP_LOG2,
        });
    }
    let sampler = Sampler::new(cfg)?;
    let m = cfg.set_size();
    let k = cfg.p.support_size();
    let n = cfg.n;
    let one_trial = |trial: u64| -> SelectionTally {
        let mut rng = trial_rng(cfg.seed, trial);
        let mut counts = vec![0u64; k];
        let mut word = vec![0u8; n];
        let mut tally = SelectionTally {
            accepted: 0,
            counts: vec![0; k],
        };
        let mut best: Option<(Vec<u8>, f64)> = None;
        for _ in 0..m {
            sampler.word(&mut rng, n, &mut word);
            let sums = constraint_sums(&cfg.e, &word, &mut counts);
            if !cfg.e.type_satisfies(&sums, n) {
                continue;
            }
            match cfg.selection {
                Selection::FirstSatisfying => {
                    best = Some((word.clone(), sums[0]));
                    break;
                }
                Selection::MinMetric => {
                    if best.as_ref().is_none_or(|(_, b)| sums[0] < *b) {
                        best = Some((word.clone(), sums[0]));
                    }
                }
            }
        }
        if let Some((w, _)) = best {
            tally.accepted = 1;
            for s in w {
                tally.counts[s as usize] += 1;
            }
        }
        tally
    };
    let tally = (0..cfg.trials as u64)
        .into_par_iter()
        .map(one_trial)
        .reduce(SelectionTally::default, SelectionTally::merge);
    Ok(tally)
}

/// Fraction of random sets that contain at least one word whose type lies in `E`.
///
/// Fills `ps_hat`, the selected-symbol marginal and its distance from `q*`.
pub fn estimate_ps(cfg: &McConfig) -> Result<McResult> {
    let tally = run_selection(cfg)?;
    let mut res = McResult::empty(cfg.trials as u64, cfg.set_size(), 1);
    res.ps_hat = Some(Estimate::wilson(tally.accepted, cfg.trials as u64));
    if tally.accepted > 0 {
        let (marginal, l1) = marginal_distance(cfg, &tally)?;
        res.marginal = Some(marginal);
        res.marginal_l1 = Some(l1);
        res.pooled_symbols = tally.accepted * cfg.n as u64;
    }
    Ok(res)
}

fn marginal_distance(cfg: &McConfig, tally: &SelectionTally) -> Result<(Vec<f64>, f64)> {
    let total = (tally.accepted * cfg.n as u64) as f64;
    let marginal: Vec<f64> = tally.counts.iter().map(|c| *c as f64 / total).collect();
    let q = project(&cfg.p, &cfg.e)?.q_star;
    let l1 = marginal
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((marginal, l1))
}

/// `‖empirical marginal of selected symbols − q*‖₁`, pooled across trials.
pub fn empirical_conditional_limit(cfg: &McConfig) -> Result<f64> {
    let tally = run_selection(cfg)?;
    if tally.accepted == 0 {
        return Err(Error::NoAcceptances { trials: cfg.trials });
    }
    Ok(marginal_distance(cfg, &tally)?.1)
}

#[derive(Default, Clone, Copy)]
struct DecodeTally {
    transmissions: u64,
    empty_sets: u64,
    matched: u64,
    codeword: u64,
    message: u64,
}

impl DecodeTally {
    fn merge(self, o: Self) -> Self {
        Self {
            transmissions: self.transmissions + o.transmissions,
            empty_sets: self.empty_sets + o.empty_sets,
            matched: self.matched + o.matched,
            codeword: self.codeword + o.codeword,
            message: self.message + o.message,
        }
    }
}

/// ML index over candidate words; ties go to the lowest index.
fn ml_decode(
    ln_w: &[Vec<f64>],
    y: &[usize],
    n: usize,
    words: &[u8],
    candidates: impl Iterator<Item = usize>,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for c in candidates {
        let w = &words[c * n..(c + 1) * n];
        let ll: f64 = w.iter().zip(y).map(|(&x, &y)| ln_w[x as usize][y]).sum();
        if best.is_none_or(|(_, b)| ll > b) {
            best = Some((c, ll));
        }
    }
    best.map(|b| b.0)
}

fn decode_trial(cfg: &McConfig, sampler: &Sampler, trial: u64) -> DecodeTally {
    let n = cfg.n;
    let ms = cfg.set_size() as usize;
    let mq = cfg.num_sets() as usize;
    let k = cfg.p.support_size();
    let mut rng = trial_rng(cfg.seed, trial);
    let mut words = vec![0u8; ms * mq * n];
    for w in 0..ms * mq {
        sampler.word(&mut rng, n, &mut words[w * n..(w + 1) * n]);
    }
    let mut counts = vec![0u64; k];
    // (set, global word index) of each selected word
    let selected: Vec<(usize, usize)> = (0..mq)
        .filter_map(|s| {
            let base = s * ms;
            select(cfg, &words[base * n..(base + ms) * n], ms, &mut counts).map(|w| (s, base + w))
        })
        .collect();
    let mut tally = DecodeTally {
        empty_sets: (mq - selected.len()) as u64,
        ..Default::default()
    };
    if selected.is_empty() {
        return tally;
    }
    let (tx_set, tx) = selected[rng.random_range(0..selected.len())];
    let y: Vec<usize> = words[tx * n..(tx + 1) * n]
        .iter()
        .map(|&x| sampler.outputs[x as usize].sample(&mut rng))
        .collect();

    let word = |i: usize| &words[i * n..(i + 1) * n];
    let sent = word(tx);
    let full = ml_decode(&sampler.ln_w, &y, n, &words, 0..ms * mq).expect("non-empty codebook");
    let sub = ml_decode(&sampler.ln_w, &y, n, &words, selected.iter().map(|s| s.1))
        .expect("non-empty subcode");
    let in_tx_set = (tx_set * ms..(tx_set + 1) * ms).any(|i| word(i) == word(full));

    tally.transmissions = 1;
    tally.codeword = u64::from(word(full) != sent);
    tally.message = u64::from(!in_tx_set);
    tally.matched = u64::from(word(sub) != sent);
    tally
}

/// Matched (subcode ML) and mismatched (full-codebook ML) decoding over random
/// instances of the construction.
///
/// Errors are judged by sequence value: a decoded word equal to the transmitted
/// sequence is correct even if it has another index.
pub fn decode_experiment(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let log2_size = cfg.n as f64 * (cfg.rs_bits + cfg.rq_bits);
    let total = cfg.set_size() as f64 * cfg.num_sets() as f64;
    if log2_size > DECODE_CAP_LOG2 as f64 || total > 2f64.powi(DECODE_CAP_LOG2 as i32) {
        return Err(Error::CapExceeded {
            what: "codebook size",
            log2_size,
            cap_log2: DECODE_CAP_LOG2,
        });
    }
    let sampler = Sampler::new(cfg)?;
    let t = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| decode_trial(cfg, &sampler, trial))
        .reduce(DecodeTally::default, DecodeTally::merge);
    let mut res = McResult::empty(cfg.trials as u64, cfg.set_size(), cfg.num_sets());
    res.decode_trials = t.transmissions;
    res.empty_sets = t.empty_sets;
    res.err_matched = Some(Estimate::wilson(t.matched, t.transmissions));
    res.err_mismatched_codeword = Some(Estimate::wilson(t.codeword, t.transmissions));
    res.err_mismatched_message = Some(Estimate::wilson(t.message, t.transmissions));
    Ok(res)
}
