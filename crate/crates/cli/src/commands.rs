use serde_json::{json, Value};
use shaping_core::channels::{
    awgn_sweep, binary_sweep, constrained_capacity_baa, gaussian_largecode_rate, OutputGrid,
};
use shaping_core::montecarlo::{
    decode_experiment, estimate_ps, Estimate, McConfig, Selection, RNG_DESCRIPTION,
};
use shaping_core::projection::{at_least_one, exact_pne, project};
use shaping_core::rates::Shaping;
use shaping_core::{Channel, ConstraintSet, Pmf};

use crate::config::Params;
use crate::error::{CliError, CliResult};
use crate::grammar::{self, Constellation};
use crate::output::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Project,
    Bounds,
    SweepAwgn,
    SweepBsc,
    SweepBnsc,
    Gaussian,
    McPs,
    McDecode,
    Baa,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Project => "project",
            Command::Bounds => "bounds",
            Command::SweepAwgn => "sweep-awgn",
            Command::SweepBsc => "sweep-bsc",
            Command::SweepBnsc => "sweep-bnsc",
            Command::Gaussian => "gaussian",
            Command::McPs => "mc-ps",
            Command::McDecode => "mc-decode",
            Command::Baa => "baa",
        }
    }
}

pub const PROJECT_COLUMNS: &[&str] = &["symbol", "p", "q_star", "rs_min"];
pub const BOUNDS_COLUMNS: &[&str] = &[
    "rs_min",
    "codeword_cap",
    "r_matched",
    "r_gallager",
    "r_mjt",
    "r_naive",
];
pub const SWEEP_AWGN_COLUMNS: &[&str] = &[
    "snr_db",
    "capacity",
    "r_uniform",
    "r_matched",
    "r_gallager",
    "r_mjt",
    "r_naive",
    "alpha_uniform",
    "alpha_matched",
    "alpha_gallager",
    "alpha_mjt",
    "alpha_naive",
];
pub const SWEEP_BINARY_COLUMNS: &[&str] = &[
    "beta0",
    "q_star_one",
    "rs_min",
    "r_matched",
    "r_gallager",
    "r_mjt",
    "r_naive",
];
pub const GAUSSIAN_COLUMNS: &[&str] = &[
    "beta0",
    "b0",
    "noise_variance",
    "r_exact",
    "r_approx",
    "gap",
];
pub const MC_PS_COLUMNS: &[&str] = &[
    "n",
    "rs",
    "set_size",
    "trials",
    "successes",
    "ps_hat",
    "ci_low",
    "ci_high",
    "ps_exact",
    "marginal_l1",
];
pub const MC_DECODE_COLUMNS: &[&str] = &[
    "n",
    "rs",
    "rq",
    "set_size",
    "num_sets",
    "trials",
    "decode_trials",
    "empty_sets",
    "err_matched",
    "err_matched_ci_low",
    "err_matched_ci_high",
    "err_codeword",
    "err_codeword_ci_low",
    "err_codeword_ci_high",
    "err_message",
    "err_message_ci_low",
    "err_message_ci_high",
];
pub const BAA_COLUMNS: &[&str] = &["symbol", "q_hat", "capacity"];

/// A computed table plus provenance for the metadata sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    pub grid: Value,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Self {
            table,
            seed: None,
            rng: None,
            grid: Value::Null,
        }
    }
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> CliResult<T> {
    v.clone()
        .ok_or_else(|| CliError::validation(field, "required parameter is missing"))
}

fn positive(v: f64, field: &str) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::validation(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn output_grid(p: &Params) -> CliResult<OutputGrid> {
    let d = OutputGrid::default();
    let g = OutputGrid {
        half_width_sigmas: p.half_width_sigmas.unwrap_or(d.half_width_sigmas),
        points_per_sigma: p.points_per_sigma.unwrap_or(d.points_per_sigma),
    };
    positive(g.half_width_sigmas, "half-width-sigmas")?;
    if g.points_per_sigma == 0 {
        return Err(CliError::validation("points-per-sigma", "must be positive"));
    }
    Ok(g)
}

fn constellation(p: &Params) -> CliResult<Constellation> {
    Ok(Constellation {
        levels: p
            .levels
            .as_deref()
            .map(|s| grammar::levels("levels", s))
            .transpose()?,
        grid: output_grid(p)?,
    })
}

fn channel(p: &Params, ctx: &Constellation) -> CliResult<Option<Channel>> {
    if let Some(rows) = &p.channel_matrix {
        return Channel::new(rows.clone())
            .map(Some)
            .map_err(|e| CliError::core("channel-matrix", e));
    }
    p.channel
        .as_deref()
        .map(|s| grammar::channel("channel", s, ctx))
        .transpose()
}

fn constraint(p: &Params, ctx: &Constellation) -> CliResult<Option<ConstraintSet>> {
    match (&p.phi, &p.beta) {
        (Some(phi), Some(beta)) => {
            return ConstraintSet::new(phi.clone(), beta.clone())
                .map(Some)
                .map_err(|e| CliError::core("phi", e))
        }
        (Some(_), None) => return Err(CliError::validation("beta", "`phi` needs `beta`")),
        (None, Some(_)) => return Err(CliError::validation("phi", "`beta` needs `phi`")),
        (None, None) => {}
    }
    let alpha = positive(p.alpha.unwrap_or(1.0), "alpha")?;
    p.constraint
        .as_deref()
        .map(|s| grammar::constraint("constraint", s, ctx, alpha))
        .transpose()
}

fn input(p: &Params, alphabet: usize) -> CliResult<Pmf> {
    let pmf = grammar::input(
        "input",
        p.input.as_deref().unwrap_or("uniform"),
        Some(alphabet),
        p.channel.as_deref(),
    )?;
    check_size("input", pmf.support_size(), alphabet)?;
    Ok(pmf)
}

fn check_size(field: &str, found: usize, expected: usize) -> CliResult<()> {
    if found == expected {
        Ok(())
    } else {
        Err(CliError::validation(
            field,
            format!("alphabet of size {found} where {expected} is required"),
        ))
    }
}

fn grid(p: &Option<String>, field: &str) -> CliResult<Vec<f64>> {
    grammar::grid(field, &need(p, field)?)
}

pub fn execute(cmd: Command, p: &Params) -> CliResult<Outcome> {
    match cmd {
        Command::Project => run_project(p),
        Command::Bounds => run_bounds(p),
        Command::SweepAwgn => run_sweep_awgn(p),
        Command::SweepBsc => run_sweep_binary(p, "bsc"),
        Command::SweepBnsc => run_sweep_binary(p, "bnsc"),
        Command::Gaussian => run_gaussian(p),
        Command::McPs | Command::McDecode => run_monte_carlo(cmd, p),
        Command::Baa => run_baa(p),
    }
}

fn run_project(p: &Params) -> CliResult<Outcome> {
    let ctx = constellation(p)?;
    let e = constraint(p, &ctx)?
        .ok_or_else(|| CliError::validation("constraint", "required parameter is missing"))?;
    let pmf = input(p, e.alphabet_size())?;
    let r = project(&pmf, &e).map_err(|e| CliError::core("constraint", e))?;
    let mut t = Table::new(PROJECT_COLUMNS);
    for x in 0..pmf.support_size() {
        t.push(vec![
            x.into(),
            pmf.get(x).into(),
            r.q_star.get(x).into(),
            r.rs_min_bits.into(),
        ]);
    }
    Ok(Outcome::plain(t))
}

fn channel_and_constraint(p: &Params) -> CliResult<(Channel, ConstraintSet)> {
    let ctx = constellation(p)?;
    let ch = channel(p, &ctx)?
        .ok_or_else(|| CliError::validation("channel", "required parameter is missing"))?;
    let e = constraint(p, &ctx)?
        .ok_or_else(|| CliError::validation("constraint", "required parameter is missing"))?;
    check_size("constraint", e.alphabet_size(), ch.input_size())?;
    Ok((ch, e))
}

fn run_bounds(p: &Params) -> CliResult<Outcome> {
    let (ch, e) = channel_and_constraint(p)?;
    let pmf = input(p, ch.input_size())?;
    let s = Shaping::new(&pmf, &e).map_err(|e| CliError::core("constraint", e))?;
    let r = s.report(&ch).map_err(|e| CliError::core("channel", e))?;
    let mut t = Table::new(BOUNDS_COLUMNS);
    t.push(vec![
        r.rs_min_bits.into(),
        r.codeword_cap_bits.into(),
        r.r_matched_bits.into(),
        r.r_gallager_bits.into(),
        r.r_mjt_bits.into(),
        r.r_naive_bits.into(),
    ]);
    Ok(Outcome::plain(t))
}

fn run_sweep_awgn(p: &Params) -> CliResult<Outcome> {
    let levels = grammar::levels("levels", p.levels.as_deref().unwrap_or("pam:16"))?;
    let sigma2 = positive(p.noise_variance.unwrap_or(1.0), "noise-variance")?;
    let snr = grid(&p.snr_db, "snr-db")?;
    let g = output_grid(p)?;
    let rows = awgn_sweep(&levels, sigma2, &snr, g).map_err(|e| CliError::core("snr-db", e))?;
    let mut t = Table::new(SWEEP_AWGN_COLUMNS);
    for r in rows {
        t.push(vec![
            r.snr_db.into(),
            r.capacity_bits.into(),
            r.r_uniform_bits.into(),
            r.r_matched_bits.into(),
            r.r_gallager_bits.into(),
            r.r_mjt_bits.into(),
            r.r_naive_bits.into(),
            r.alpha_uniform.into(),
            r.alpha_matched.into(),
            r.alpha_gallager.into(),
            r.alpha_mjt.into(),
            r.alpha_naive.into(),
        ]);
    }
    Ok(Outcome {
        grid: json!({
            "snr_db": snr,
            "levels": levels,
            "noise_variance": sigma2,
            "output_grid": g,
        }),
        ..Outcome::plain(t)
    })
}

fn run_sweep_binary(p: &Params, kind: &str) -> CliResult<Outcome> {
    let spec = need(&p.channel, "channel")?;
    if !spec.trim_start().starts_with(&format!("{kind}:")) {
        return Err(CliError::validation(
            "channel",
            format!("expected {kind}:..."),
        ));
    }
    let ch = grammar::channel("channel", &spec, &Constellation::default())?;
    let pmf = input(p, 2)?;
    let betas = grid(&p.betas, "betas")?;
    let rows = binary_sweep(&ch, &pmf, &betas).map_err(|e| CliError::core("betas", e))?;
    let mut t = Table::new(SWEEP_BINARY_COLUMNS);
    for r in rows {
        t.push(vec![
            r.beta0.into(),
            r.q_star_one.into(),
            r.rs_min_bits.into(),
            r.r_matched_bits.into(),
            r.r_gallager_bits.into(),
            r.r_mjt_bits.into(),
            r.r_naive_bits.into(),
        ]);
    }
    Ok(Outcome {
        grid: json!({ "betas": betas }),
        ..Outcome::plain(t)
    })
}

fn run_gaussian(p: &Params) -> CliResult<Outcome> {
    let beta0 = need(&p.beta0, "beta0")?;
    let sigma2 = need(&p.noise_variance, "noise-variance")?;
    let b0s = grid(&p.b0, "b0")?;
    let mut t = Table::new(GAUSSIAN_COLUMNS);
    for &b0 in &b0s {
        let (exact, approx) =
            gaussian_largecode_rate(beta0, b0, sigma2).map_err(|e| CliError::core("b0", e))?;
        t.push(vec![
            beta0.into(),
            b0.into(),
            sigma2.into(),
            exact.into(),
            approx.into(),
            (exact - approx).into(),
        ]);
    }
    Ok(Outcome {
        grid: json!({ "b0": b0s }),
        ..Outcome::plain(t)
    })
}

fn mc_config(cmd: Command, p: &Params) -> CliResult<McConfig> {
    let ctx = constellation(p)?;
    let e = match (constraint(p, &ctx)?, p.beta0) {
        (Some(e), _) => e,
        (None, Some(b)) => ConstraintSet::hamming(b).map_err(|e| CliError::core("beta0", e))?,
        (None, None) => {
            return Err(CliError::validation(
                "constraint",
                "give --constraint or --beta0",
            ))
        }
    };
    let k = e.alphabet_size();
    let ch = match channel(p, &ctx)? {
        Some(ch) => ch,
        None if cmd == Command::McDecode => {
            return Err(CliError::validation(
                "channel",
                "required parameter is missing",
            ))
        }
        None => Channel::identity(k).map_err(|e| CliError::core("channel", e))?,
    };
    check_size("channel", ch.input_size(), k)?;
    let selection = match &p.selection {
        Some(s) => serde_json::from_value::<Selection>(Value::String(s.clone())).map_err(|_| {
            CliError::validation(
                "selection",
                format!("`{s}`: expected first-satisfying or min-metric"),
            )
        })?,
        None => Selection::default(),
    };
    let rq = if cmd == Command::McDecode {
        need(&p.rq, "rq")?
    } else {
        p.rq.unwrap_or(0.0)
    };
    let cfg = McConfig {
        n: need(&p.n, "n")?,
        rs_bits: need(&p.rs, "rs")?,
        rq_bits: rq,
        p: input(p, k)?,
        e,
        ch,
        trials: need(&p.trials, "trials")?,
        seed: p.seed.unwrap_or(0),
        selection,
    };
    cfg.validate().map_err(|e| CliError::core("config", e))?;
    Ok(cfg)
}

fn estimate_cells(e: &Option<Estimate>) -> [Cell; 3] {
    match e {
        Some(e) => [e.value.into(), e.ci_low.into(), e.ci_high.into()],
        None => [Cell::Missing; 3],
    }
}

fn run_monte_carlo(cmd: Command, p: &Params) -> CliResult<Outcome> {
    let cfg = mc_config(cmd, p)?;
    let table = if cmd == Command::McPs {
        let r = estimate_ps(&cfg).map_err(|e| CliError::core("n", e))?;
        let ps = r.ps_hat.expect("estimate_ps fills ps_hat");
        let exact =
            exact_pne(&cfg.p, &cfg.e, cfg.n).map(|q| at_least_one(q, cfg.set_size() as f64));
        let mut t = Table::new(MC_PS_COLUMNS);
        t.push(vec![
            cfg.n.into(),
            cfg.rs_bits.into(),
            cfg.set_size().into(),
            ps.trials.into(),
            ps.successes.into(),
            ps.value.into(),
            ps.ci_low.into(),
            ps.ci_high.into(),
            exact.into(),
            r.marginal_l1.into(),
        ]);
        t
    } else {
        let r = decode_experiment(&cfg).map_err(|e| CliError::core("n", e))?;
        let mut row: Vec<Cell> = vec![
            cfg.n.into(),
            cfg.rs_bits.into(),
            cfg.rq_bits.into(),
            cfg.set_size().into(),
            cfg.num_sets().into(),
            r.trials.into(),
            r.decode_trials.into(),
            r.empty_sets.into(),
        ];
        for e in [
            &r.err_matched,
            &r.err_mismatched_codeword,
            &r.err_mismatched_message,
        ] {
            row.extend(estimate_cells(e));
        }
        let mut t = Table::new(MC_DECODE_COLUMNS);
        t.push(row);
        t
    };
    Ok(Outcome {
        table,
        seed: Some(cfg.seed),
        rng: Some(RNG_DESCRIPTION),
        grid: json!({ "n": cfg.n, "set_size": cfg.set_size(), "num_sets": cfg.num_sets() }),
    })
}

fn run_baa(p: &Params) -> CliResult<Outcome> {
    let (ch, e) = channel_and_constraint(p)?;
    let tol = positive(p.tol.unwrap_or(1e-9), "tol")?;
    let (q, c) =
        constrained_capacity_baa(&ch, &e, tol).map_err(|e| CliError::core("constraint", e))?;
    let mut t = Table::new(BAA_COLUMNS);
    for x in 0..q.support_size() {
        t.push(vec![x.into(), q.get(x).into(), c.into()]);
    }
    Ok(Outcome {
        grid: json!({ "tol": tol }),
        ..Outcome::plain(t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params {
        Params {
            channel: Some("bsc:0.1".into()),
            constraint: Some("hamming:0.3".into()),
            input: Some("uniform:2".into()),
            ..Default::default()
        }
    }

    #[test]
    fn bounds_on_bsc_closed_forms() {
        let o = execute(Command::Bounds, &params()).unwrap();
        let row = &o.table.rows[0];
        let get = |i: usize| match row[i] {
            Cell::Real(v) => v,
            _ => panic!(),
        };
        assert!((get(2) - 0.456).abs() < 5e-4);
        for i in [3, 4, 5] {
            assert!((get(i) - 0.41229).abs() < 1e-5, "{}", get(i));
        }
    }

    #[test]
    fn missing_parameters_name_their_field() {
        let mut p = params();
        p.channel = None;
        match execute(Command::Bounds, &p).unwrap_err() {
            CliError::Validation { field, .. } => assert_eq!(field, "channel"),
            e => panic!("{e}"),
        }
        match execute(Command::McPs, &Params::default()).unwrap_err() {
            CliError::Validation { field, .. } => assert_eq!(field, "constraint"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let mut p = params();
        p.input = Some("uniform:3".into());
        assert_eq!(execute(Command::Bounds, &p).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn sweep_kind_must_match_channel() {
        let p = Params {
            channel: Some("bnsc:0.1,0.2".into()),
            betas: Some("0.1".into()),
            ..Default::default()
        };
        assert!(execute(Command::SweepBsc, &p).is_err());
        assert_eq!(execute(Command::SweepBnsc, &p).unwrap().table.rows.len(), 1);
    }

    #[test]
    fn explicit_constraint_matrix() {
        let p = Params {
            channel_matrix: Some(vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
            phi: Some(vec![vec![0.0, 1.0]]),
            beta: Some(vec![0.3]),
            ..Default::default()
        };
        let o = execute(Command::Bounds, &p).unwrap();
        assert_eq!(o.table.rows.len(), 1);
        let half = Params { beta: None, ..p };
        assert!(execute(Command::Bounds, &half).is_err());
    }
}
