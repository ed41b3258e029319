//! Temperature sweeps over a model, and the CSV/JSON tables they produce.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::models::ising::heat_capacity_onsager;
use crate::models::{gapped_low_t, MassiveMode, ModelError, ModelSpec, PhotonMode, TbMode};
use crate::povm::fisher_information;
use crate::thermal::{MuPolicy, ThermoPoint};

/// Caps the worker pool of a sweep.
pub const THREADS_ENV: &str = "THERMOLIMIT_THREADS";
pub const UNITS_NOTE: &str = "k_B = hbar = 1";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error("{model} has no {what}")]
    Mismatch { model: &'static str, what: String },
    #[error("malformed table: {0}")]
    Malformed(String),
    #[error("no temperature produced a finite row")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TGrid {
    /// `points` temperatures evenly spaced in `ln T`.
    Log { lo: f64, hi: f64, points: usize },
    List { values: Vec<f64> },
}

impl TGrid {
    pub fn temperatures(&self) -> Result<Vec<f64>, SweepError> {
        let mut ts = match self {
            TGrid::Log { lo, hi, points } => {
                if !(*lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(SweepError::Config(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
                }
                if *points < 2 {
                    return Err(SweepError::Config("a log grid needs at least 2 points".into()));
                }
                let (a, b) = (lo.ln(), hi.ln());
                (0..*points)
                    .map(|i| {
                        if i == 0 {
                            *lo
                        } else if i + 1 == *points {
                            *hi
                        } else {
                            (a + (b - a) * i as f64 / (*points - 1) as f64).exp()
                        }
                    })
                    .collect::<Vec<_>>()
            }
            TGrid::List { values } => {
                if values.is_empty() || values.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                    return Err(SweepError::Config("temperatures must be positive and finite".into()));
                }
                values.clone()
            }
        };
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        Ok(ts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Qfi,
    Fisher,
    HeatCapacity,
    Entropy,
    OutcomeSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overlay {
    Thermodynamic,
    LowT,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelSpec<f64>,
    #[serde(rename = "T_grid")]
    pub t_grid: TGrid,
    pub quantities: Vec<Quantity>,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

const OUTCOME_LABELS: [&str; 4] = ["0", "plus", "minus", "2"];

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.model.validate()?;
        if self.quantities.is_empty() {
            return Err(SweepError::Config("quantities must not be empty".into()));
        }
        self.t_grid.temperatures()?;
        let name = self.model.name();
        for &q in &self.quantities {
            if !supports_quantity(&self.model, q) {
                return Err(SweepError::Mismatch {
                    model: name,
                    what: format!("{q:?} column").to_lowercase(),
                });
            }
        }
        for &o in &self.overlays {
            if !supports_overlay(&self.model, o) {
                return Err(SweepError::Mismatch {
                    model: name,
                    what: format!("{o:?} overlay").to_lowercase(),
                });
            }
        }
        Ok(())
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["T".to_string()];
        for q in &self.quantities {
            match q {
                Quantity::Qfi => cols.push("qfi".into()),
                Quantity::Fisher => cols.push("fisher".into()),
                Quantity::HeatCapacity => cols.push("heat_capacity".into()),
                Quantity::Entropy => cols.push("entropy".into()),
                Quantity::OutcomeSpectrum => {
                    cols.extend(OUTCOME_LABELS.iter().map(|l| format!("p_{l}")));
                    cols.extend(OUTCOME_LABELS.iter().map(|l| format!("E_{l}")));
                }
            }
        }
        for o in &self.overlays {
            cols.push(
                match o {
                    Overlay::Thermodynamic => "qfi_thermodynamic",
                    Overlay::LowT => "qfi_low_t",
                    Overlay::Asymptotic => "qfi_asymptotic",
                }
                .into(),
            );
        }
        cols
    }
}

fn supports_quantity(model: &ModelSpec<f64>, q: Quantity) -> bool {
    use ModelSpec::*;
    match q {
        Quantity::Qfi => true,
        Quantity::Fisher => matches!(model, TwoSite(_) | Ising(_)),
        Quantity::HeatCapacity => !matches!(model, TwoSite(_)),
        Quantity::Entropy => !matches!(model, Bec(_)),
        Quantity::OutcomeSpectrum => matches!(model, TwoSite(_)),
    }
}

fn supports_overlay(model: &ModelSpec<f64>, o: Overlay) -> bool {
    use ModelSpec::*;
    match o {
        Overlay::LowT => true,
        Overlay::Thermodynamic => match model {
            Massive(s) => matches!(s.mu_policy, MuPolicy::Fixed(_)),
            TwoSite(_) => false,
            _ => true,
        },
        Overlay::Asymptotic => matches!(model, Massive(s) if matches!(s.mu_policy, MuPolicy::Fixed(_))),
    }
}

/// Everything the columns of one row are built from.
fn evaluate_row(cfg: &SweepConfig, t: f64) -> Result<Vec<f64>, ModelError> {
    let model = &cfg.model;
    let point: Option<ThermoPoint<f64>> = match model {
        ModelSpec::Photon(s) => Some(s.point(t)?),
        ModelSpec::Massive(s) => Some(s.point(t)?),
        ModelSpec::TightBinding(s) => Some(s.point(t)?),
        ModelSpec::Ising(s) => Some(s.point(t)?),
        ModelSpec::TwoSite(_) | ModelSpec::Bec(_) => None,
    };
    let qfi = match (model, &point) {
        (_, Some(p)) => p.qfi,
        (ModelSpec::TwoSite(s), None) => s.qfi(t)?,
        (ModelSpec::Bec(s), None) => s.qfi(t)?,
        _ => unreachable!("every other model has a thermal point"),
    };
    let mut row = vec![t];
    for q in &cfg.quantities {
        match q {
            Quantity::Qfi => row.push(qfi),
            Quantity::Fisher => row.push(match model {
                ModelSpec::TwoSite(s) => fisher_information(&s.outcome_data(t)?),
                // energy measurement on a Gibbs state is optimal
                _ => qfi,
            }),
            Quantity::HeatCapacity => row.push(match &point {
                Some(p) => p.heat_capacity,
                None => t * t * qfi,
            }),
            Quantity::Entropy => row.push(match (&point, model) {
                (Some(p), _) => p.entropy,
                // the reduced state is diagonal in the occupation basis
                (None, ModelSpec::TwoSite(s)) => s
                    .probabilities(t)?
                    .iter()
                    .filter(|&&p| p > 0.0)
                    .map(|&p| -p * p.ln())
                    .sum(),
                _ => unreachable!("validated"),
            }),
            Quantity::OutcomeSpectrum => {
                let ModelSpec::TwoSite(s) = model else { unreachable!("validated") };
                let os = s.outcome_data(t)?;
                row.extend(&os.probs);
                row.extend(&os.energies);
            }
        }
    }
    for o in &cfg.overlays {
        row.push(overlay(model, *o, t)?);
    }
    Ok(row)
}

fn overlay(model: &ModelSpec<f64>, o: Overlay, t: f64) -> Result<f64, ModelError> {
    match (o, model) {
        (Overlay::LowT, ModelSpec::Photon(s)) => Ok(s.qfi_low_t(t)),
        (Overlay::LowT, ModelSpec::Massive(s)) => {
            let (delta, g) = s.gap()?;
            Ok(gapped_low_t(g, delta, t))
        }
        (Overlay::LowT, ModelSpec::TightBinding(s)) => s.qfi_low_t(t),
        (Overlay::LowT, ModelSpec::TwoSite(s)) => Ok(s.qfi_low_t(t)),
        (Overlay::LowT, ModelSpec::Bec(s)) => Ok(s.qfi_low_t(t)),
        (Overlay::LowT, ModelSpec::Ising(s)) => s.qfi_low_t(t),
        (Overlay::Thermodynamic, ModelSpec::Photon(s)) => s.qfi(t, PhotonMode::Thermodynamic),
        (Overlay::Thermodynamic, ModelSpec::Massive(s)) => {
            let mode = if s.d == 2 {
                MassiveMode::Thermodynamic2dClosed
            } else {
                MassiveMode::ThermodynamicIntegral
            };
            s.qfi(t, mode)
        }
        (Overlay::Thermodynamic, ModelSpec::TightBinding(s)) => s.qfi(t, TbMode::LinearizedThermo),
        (Overlay::Thermodynamic, ModelSpec::Bec(s)) => s.qfi_thermo(t),
        (Overlay::Thermodynamic, ModelSpec::Ising(s)) => {
            Ok(s.spins() as f64 * heat_capacity_onsager(s.j, t)? / (t * t))
        }
        (Overlay::Asymptotic, ModelSpec::Massive(s)) => s.qfi(t, MassiveMode::Asymptotic),
        _ => Err(ModelError::Unsupported(format!("{o:?} overlay for {}", model.name()))),
    }
}

/// Rows are always in ascending `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// `key: value` metadata, emitted as `#` comment lines.
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Worker count from `THERMOLIMIT_THREADS`, or rayon's default.
pub fn worker_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let ts = cfg.t_grid.temperatures()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| SweepError::Pool(e.to_string()))?;
    let results: Vec<(f64, Result<Vec<f64>, ModelError>)> =
        pool.install(|| ts.par_iter().map(|&t| (t, evaluate_row(cfg, t))).collect());
    let mut rows = Vec::with_capacity(results.len());
    for (t, r) in results {
        match r {
            Ok(row) if row.iter().all(|x| x.is_finite()) => rows.push(row),
            Ok(_) => log::warn!("dropping T = {t:e}: non-finite value"),
            Err(e) => log::warn!("dropping T = {t:e}: {e}"),
        }
    }
    if rows.is_empty() {
        return Err(SweepError::Empty);
    }
    let params = serde_json::to_value(&cfg.model)
        .ok()
        .and_then(|v| v.get("params").cloned())
        .map(|p| p.to_string())
        .unwrap_or_default();
    let header = vec![
        ("model".to_string(), cfg.model.name().to_string()),
        ("params".to_string(), params),
        ("version".to_string(), format!("thermolimit {}", env!("CARGO_PKG_VERSION"))),
        ("generated".to_string(), chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
        ("units".to_string(), UNITS_NOTE.to_string()),
    ];
    Ok(SweepResult {
        header,
        columns: cfg.columns(),
        rows,
    })
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `{:.16e}` keeps 17 significant digits, enough to round-trip `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SweepError> {
        let mut header = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                let c = c.strip_prefix(' ').unwrap_or(c);
                match c.split_once(": ") {
                    Some((k, v)) => header.push((k.to_string(), v.to_string())),
                    None => header.push((c.to_string(), String::new())),
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|s| s.trim().to_string()).collect()),
                Some(cols) => {
                    let row: Vec<f64> = line
                        .split(',')
                        .map(|s| s.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| SweepError::Malformed(format!("line {}: {e}", n + 1)))?;
                    if row.len() != cols.len() {
                        return Err(SweepError::Malformed(format!(
                            "line {}: {} cells for {} columns",
                            n + 1,
                            row.len(),
                            cols.len()
                        )));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| SweepError::Malformed("no header row".into()))?;
        if columns.first().map(String::as_str) != Some("T") {
            return Err(SweepError::Malformed("first column must be T".into()));
        }
        Ok(Self { header, columns, rows })
    }

    pub fn to_json(&self) -> String {
        let header: serde_json::Map<String, serde_json::Value> = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = serde_json::json!({
            "header": header,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("finite rows serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
