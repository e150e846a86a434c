use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every tunable a command may read. Flags override the config file field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Params {
    /// TOML or JSON config file; a `.meta.json` sidecar re-runs its recorded config.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Output directory [default: $SHAPING_OUT_DIR, else `.`].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,

    /// Output base name [default: the command name].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,

    /// Worker threads for parallel grids and trials.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    /// Channel: bsc:<γ>, bnsc:<γ0>,<γ1>, awgn:<α>,<σ²>, identity:<k>.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,

    /// Constraint: hamming:<β0> or power:<β0>.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,

    /// Codebook pmf: uniform[:<k>], binary:<p1>, pmf:<p0>,<p1>,..., bnsc-mjt.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,

    /// Constellation: pam:<M> or a comma list.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<String>,

    /// Constellation scaling used by `power:` constraints.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<f64>,

    /// SNR grid in dB: start:stop:step or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<String>,

    /// Hamming budget grid for binary sweeps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<String>,

    /// Hamming budget (Monte Carlo) or power budget (gaussian).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,

    /// Codebook power grid for `gaussian`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_sigma: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width_sigmas: Option<f64>,

    /// Block length.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    /// Shaping rate in bits.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rs: Option<f64>,

    /// Message-set rate in bits.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rq: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// first-satisfying or min-metric.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection: Option<String>,

    /// Blahut-Arimoto stopping gap in bits.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    /// Channel matrix rows; overrides `channel` (config file only).
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_matrix: Option<Vec<Vec<f64>>>,

    /// Constraint functions, one row per constraint; with `beta` overrides `constraint`.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,

    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Params {
    /// Fields of `top` that are set replace those of `self`.
    pub fn overlay(mut self, top: Params) -> Params {
        overlay!(self, top; config, out_dir, name, threads, channel, constraint, input, levels,
            alpha, noise_variance, snr_db, betas, beta0, b0, points_per_sigma, half_width_sigmas,
            n, rs, rq, trials, seed, selection, tol, channel_matrix, phi, beta);
        self
    }

    /// Reads `path` as TOML (`.toml`) or JSON (anything else).
    ///
    /// A document with a top-level `config` object is treated as a metadata
    /// sidecar. A top-level `command` must match `command` when present.
    pub fn from_file(path: &Path, command: &str) -> CliResult<Params> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let field = "config";
        let bad = |m: String| CliError::validation(field, format!("{}: {m}", path.display()));
        let mut doc: serde_json::Value = if path.extension().is_some_and(|e| e == "toml") {
            let t: toml::Value = toml::from_str(&text).map_err(|e| bad(e.message().to_string()))?;
            serde_json::to_value(t).map_err(|e| bad(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?
        };
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| bad("expected a table or object".into()))?;
        if let Some(c) = obj.remove("command") {
            if c.as_str() != Some(command) {
                return Err(bad(format!("file is for command {c}, not `{command}`")));
            }
        }
        let body = match obj.remove("config") {
            Some(inner) => inner,
            None => doc,
        };
        serde_json::from_value(body).map_err(|e| bad(e.to_string()))
    }

    /// Merges the file named by `self.config` (if any) under these flags.
    pub fn resolve(self, command: &str) -> CliResult<Params> {
        match &self.config {
            Some(path) => Ok(Params::from_file(path, command)?.overlay(self)),
            None => Ok(self),
        }
    }
}
