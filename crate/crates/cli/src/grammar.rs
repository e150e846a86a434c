//! Mini-grammar for channels, constellations, constraints, inputs and grids.

use shaping_core::channels::{
    bnsc, bnsc_mjt_input, bsc, pam, quantized_awgn, OutputGrid, PamAwgnConfig,
};
use shaping_core::{Channel, ConstraintSet, Pmf};

use crate::error::{CliError, CliResult};

const MAX_GRID_POINTS: usize = 1_000_000;

fn split<'a>(field: &str, s: &'a str) -> CliResult<(&'a str, &'a str)> {
    let s = s.trim();
    let (k, v) = s.split_once(':').unwrap_or((s, ""));
    if k.trim().is_empty() {
        return Err(CliError::validation(
            field,
            format!("empty specification `{s}`"),
        ));
    }
    Ok((k.trim(), v.trim()))
}

fn number(field: &str, s: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::validation(field, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::validation(field, format!("`{s}` is not finite")));
    }
    Ok(v)
}

fn numbers(field: &str, s: &str) -> CliResult<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(CliError::validation(field, "missing values"));
    }
    s.split(',').map(|t| number(field, t)).collect()
}

fn arity<const K: usize>(field: &str, kind: &str, s: &str) -> CliResult<[f64; K]> {
    let v = numbers(field, s)?;
    v.try_into().map_err(|v: Vec<f64>| {
        CliError::validation(
            field,
            format!("`{kind}` takes {K} value(s), got {}", v.len()),
        )
    })
}

fn count(field: &str, s: &str) -> CliResult<usize> {
    s.trim()
        .parse()
        .ok()
        .filter(|&m: &usize| m > 0)
        .ok_or_else(|| CliError::validation(field, format!("`{s}` is not a positive integer")))
}

/// `start:stop:step` (inclusive), a comma-separated list, or one number.
pub fn grid(field: &str, s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (number(field, a)?, number(field, b)?, number(field, step)?);
            if step <= 0.0 || b < a {
                return Err(CliError::validation(
                    field,
                    "range needs start ≤ stop and a positive step",
                ));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > MAX_GRID_POINTS {
                return Err(CliError::validation(
                    field,
                    format!("{n} grid points exceed {MAX_GRID_POINTS}"),
                ));
            }
            Ok((0..n).map(|i| a + i as f64 * step).collect())
        }
        [_] => numbers(field, s),
        _ => Err(CliError::validation(
            field,
            format!("`{s}`: expected start:stop:step or a comma list"),
        )),
    }
}

/// `pam:<M>` or an explicit comma-separated constellation.
pub fn levels(field: &str, s: &str) -> CliResult<Vec<f64>> {
    match split(field, s)? {
        ("pam", m) => pam(count(field, m)?).map_err(|e| CliError::core(field, e)),
        _ => numbers(field, s),
    }
}

/// Context needed by specs that refer to a constellation.
#[derive(Debug, Clone, Default)]
pub struct Constellation {
    pub levels: Option<Vec<f64>>,
    pub grid: OutputGrid,
}

impl Constellation {
    fn require(&self, field: &str, what: &str) -> CliResult<&[f64]> {
        self.levels
            .as_deref()
            .ok_or_else(|| CliError::validation(field, format!("`{what}` needs --levels")))
    }
}

/// `bsc:<γ>`, `bnsc:<γ0>,<γ1>`, `awgn:<α>,<σ²>`, `identity:<k>`.
pub fn channel(field: &str, s: &str, ctx: &Constellation) -> CliResult<Channel> {
    let core = |e| CliError::core(field, e);
    match split(field, s)? {
        ("bsc", v) => {
            let [g] = arity::<1>(field, "bsc", v)?;
            bsc(g).map_err(core)
        }
        ("bnsc", v) => {
            let [g0, g1] = arity::<2>(field, "bnsc", v)?;
            bnsc(g0, g1).map_err(core)
        }
        ("awgn", v) => {
            let [alpha, sigma2] = arity::<2>(field, "awgn", v)?;
            let levels = ctx.require(field, "awgn")?.to_vec();
            // the budget only matters for the constraint, not the kernel
            let mut cfg = PamAwgnConfig::new(levels, alpha, sigma2, 1.0);
            cfg.output_grid = ctx.grid;
            quantized_awgn(&cfg).map_err(core)
        }
        ("identity", v) => Channel::identity(count(field, v)?).map_err(core),
        (k, _) => Err(CliError::validation(
            field,
            format!("unknown channel `{k}`; expected bsc, bnsc, awgn or identity"),
        )),
    }
}

/// Parameters of a `bnsc:` spec, if that is what `s` is.
pub fn bnsc_params(s: &str) -> Option<(f64, f64)> {
    let (k, v) = s.trim().split_once(':')?;
    if k.trim() != "bnsc" {
        return None;
    }
    let [a, b] = arity::<2>("", "bnsc", v).ok()?;
    Some((a, b))
}

/// `hamming:<β0>` or `power:<β0>`; power uses the constellation scaled by `alpha`.
pub fn constraint(
    field: &str,
    s: &str,
    ctx: &Constellation,
    alpha: f64,
) -> CliResult<ConstraintSet> {
    let core = |e| CliError::core(field, e);
    match split(field, s)? {
        ("hamming", v) => {
            let [b] = arity::<1>(field, "hamming", v)?;
            ConstraintSet::hamming(b).map_err(core)
        }
        ("power", v) => {
            let [b] = arity::<1>(field, "power", v)?;
            let levels = ctx.require(field, "power")?;
            ConstraintSet::power(levels, b / (alpha * alpha)).map_err(core)
        }
        (k, _) => Err(CliError::validation(
            field,
            format!("unknown constraint `{k}`; expected hamming or power"),
        )),
    }
}

/// `uniform[:<k>]`, `binary:<p1>`, `pmf:<p0>,<p1>,…` or `bnsc-mjt` (needs a bnsc channel).
pub fn input(
    field: &str,
    s: &str,
    alphabet: Option<usize>,
    channel_spec: Option<&str>,
) -> CliResult<Pmf> {
    let core = |e| CliError::core(field, e);
    match split(field, s)? {
        ("uniform", "") => {
            let k = alphabet
                .ok_or_else(|| CliError::validation(field, "`uniform` needs a size here"))?;
            Pmf::uniform(k).map_err(core)
        }
        ("uniform", v) => Pmf::uniform(count(field, v)?).map_err(core),
        ("binary", v) => {
            let [p1] = arity::<1>(field, "binary", v)?;
            Pmf::binary(p1).map_err(core)
        }
        ("pmf", v) => Pmf::new(numbers(field, v)?).map_err(core),
        ("bnsc-mjt", _) => {
            let (g0, g1) = channel_spec
                .and_then(bnsc_params)
                .ok_or_else(|| CliError::validation(field, "`bnsc-mjt` needs a bnsc channel"))?;
            bnsc_mjt_input(g0, g1).map_err(core)
        }
        (k, _) => Err(CliError::validation(
            field,
            format!("unknown input `{k}`; expected uniform, binary, pmf or bnsc-mjt"),
        )),
    }
}
