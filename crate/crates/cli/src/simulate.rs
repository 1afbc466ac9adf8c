use std::path::Path;

use anyhow::{ensure, Context, Result};
use funscan_core::simulate::{run_power_study, unit_grid};
use funscan_core::{
    enumerate_candidates, presets, Method, NoiseDistribution, ShiftFamily, SimulationConfig, StudyMetrics,
};
use serde::Deserialize;

use crate::args::{MethodChoice, SimulateArgs};
use crate::output;
use crate::SCHEMA_VERSION;

pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_PERMS: usize = 199;
pub const FULL_SCALE_REPLICATES: usize = 1000;
pub const FULL_SCALE_PERMS: usize = 999;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Keys accepted in the `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    method: Option<String>,
    distribution: Option<OneOrMany<String>>,
    shift: Option<OneOrMany<String>>,
    alpha: Option<OneOrMany<f64>>,
    replicates: Option<usize>,
    perms: Option<usize>,
    seed: Option<u64>,
    level: Option<f64>,
    max_fraction: Option<f64>,
    grid_points: Option<usize>,
    full_scale: Option<bool>,
}

fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}

/// Fully resolved study settings; echoed at the top of the CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyPlan {
    pub methods: Vec<Method>,
    pub distributions: Vec<NoiseDistribution>,
    pub shifts: Vec<ShiftFamily>,
    /// `None` means each shape's own study grid.
    pub alphas: Option<Vec<f64>>,
    pub replicates: usize,
    pub perms: usize,
    pub seed: u64,
    pub level: f64,
    pub max_fraction: f64,
    pub grid_points: usize,
}

fn parse_all<T>(names: Vec<String>) -> Result<Vec<T>>
where
    T: std::str::FromStr<Err = funscan_core::ScanError>,
{
    let parsed = names
        .iter()
        .map(|s| s.trim().parse::<T>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    ensure!(!parsed.is_empty(), "empty list");
    Ok(parsed)
}

impl StudyPlan {
    pub fn resolve(a: &SimulateArgs) -> Result<Self> {
        let file = match &a.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let full = a.full_scale || file.full_scale.unwrap_or(false);

        let methods = match (a.method, &file.method) {
            (Some(m), _) => m.methods(),
            (None, Some(name)) => <MethodChoice as clap::ValueEnum>::from_str(name, true)
                .map_err(|e| anyhow::anyhow!("invalid method in config: {e}"))?
                .methods(),
            (None, None) => Method::ALL.to_vec(),
        };
        let distributions = match a.distribution.clone().or(file.distribution.map(OneOrMany::into_vec)) {
            Some(v) => parse_all(v).context("invalid distribution list")?,
            None => NoiseDistribution::ALL.to_vec(),
        };
        let shifts = match a.shift.clone().or(file.shift.map(OneOrMany::into_vec)) {
            Some(v) => parse_all(v).context("invalid shift list")?,
            None => ShiftFamily::ALL.to_vec(),
        };
        let alphas = a.alpha.clone().or(file.alpha.map(OneOrMany::into_vec));
        if let Some(al) = &alphas {
            ensure!(!al.is_empty(), "empty alpha list");
            ensure!(
                al.iter().all(|x| x.is_finite() && *x >= 0.0),
                "alpha values must be finite and >= 0"
            );
        }
        let plan = Self {
            methods,
            distributions,
            shifts,
            alphas,
            replicates: a
                .replicates
                .or(file.replicates)
                .unwrap_or(if full { FULL_SCALE_REPLICATES } else { DEFAULT_REPLICATES }),
            perms: a
                .perms
                .or(file.perms)
                .unwrap_or(if full { FULL_SCALE_PERMS } else { DEFAULT_PERMS }),
            seed: a.seed.or(file.seed).unwrap_or(1),
            level: a.level.or(file.level).unwrap_or(0.05),
            max_fraction: a.max_fraction.or(file.max_fraction).unwrap_or(0.5),
            grid_points: a.grid_points.or(file.grid_points).unwrap_or(101),
        };
        ensure!(plan.grid_points >= 2, "grid points must be >= 2");
        Ok(plan)
    }

    pub fn alphas_for(&self, shift: ShiftFamily) -> Vec<f64> {
        self.alphas.clone().unwrap_or_else(|| shift.study_alphas().to_vec())
    }

    fn manifest_lines(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(",");
        vec![
            ("command".into(), "simulate".into()),
            ("schema_version".into(), SCHEMA_VERSION.to_string()),
            ("methods".into(), join(self.methods.iter().map(|m| m.to_string()).collect())),
            (
                "distributions".into(),
                join(self.distributions.iter().map(|d| d.to_string()).collect()),
            ),
            ("shifts".into(), join(self.shifts.iter().map(|s| s.to_string()).collect())),
            (
                "alphas".into(),
                match &self.alphas {
                    Some(a) => join(a.iter().map(|x| x.to_string()).collect()),
                    None => "study".into(),
                },
            ),
            ("replicates".into(), self.replicates.to_string()),
            ("perms".into(), self.perms.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("level".into(), self.level.to_string()),
            ("max_fraction".into(), self.max_fraction.to_string()),
            ("grid_points".into(), self.grid_points.to_string()),
            ("sites".into(), "surrogate94".into()),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub distribution: NoiseDistribution,
    pub shift: ShiftFamily,
    pub alpha: f64,
    pub metrics: StudyMetrics,
}

/// Runs every (distribution, shift, alpha) cell; methods share each cell's data.
/// All cells use the same master seed, so cells differing only in alpha see the
/// same noise.
pub fn study(plan: &StudyPlan) -> Result<Vec<StudyRow>> {
    let grid = presets::surrogate_grid();
    let cands = enumerate_candidates(&grid, plan.max_fraction)?;
    let truth = presets::capital_cluster(&grid);
    let time_grid = unit_grid(plan.grid_points);

    // validate every cell before running any of them
    let mut cells = Vec::new();
    for &distribution in &plan.distributions {
        for &shift in &plan.shifts {
            for alpha in plan.alphas_for(shift) {
                let mut cfg = SimulationConfig::new(distribution, shift, alpha, truth.clone());
                cfg.time_grid = time_grid.clone();
                cfg.replicates = plan.replicates;
                cfg.perms = plan.perms;
                cfg.master_seed = plan.seed;
                cfg.level = plan.level;
                cfg.validate(grid.n())?;
                cells.push(cfg);
            }
        }
    }

    let mut rows = Vec::new();
    for (i, cfg) in cells.iter().enumerate() {
        let metrics = run_power_study(cfg, &grid, &cands, &plan.methods)?;
        let powers: Vec<String> = metrics
            .iter()
            .map(|m| format!("{} {:.3}", m.method, m.power))
            .collect();
        eprintln!(
            "[{}/{}] {} {} alpha={}: {}",
            i + 1,
            cells.len(),
            cfg.distribution,
            cfg.shift,
            cfg.alpha,
            powers.join(", ")
        );
        rows.extend(metrics.into_iter().map(|m| StudyRow {
            distribution: cfg.distribution,
            shift: cfg.shift,
            alpha: cfg.alpha,
            metrics: m,
        }));
    }
    Ok(rows)
}

pub const CSV_COLUMNS: [&str; 13] = [
    "schema_version",
    "method",
    "distribution",
    "shift",
    "alpha",
    "power",
    "tpr",
    "fpr",
    "f_measure",
    "rejected",
    "replicates",
    "perms",
    "seed",
];

pub fn to_csv(plan: &StudyPlan, rows: &[StudyRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for (k, v) in plan.manifest_lines() {
        buf.extend_from_slice(format!("# {k}={v}\n").as_bytes());
    }
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(&mut buf);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            SCHEMA_VERSION.to_string(),
            m.method.to_string(),
            r.distribution.to_string(),
            r.shift.to_string(),
            r.alpha.to_string(),
            m.power.to_string(),
            opt(m.tpr),
            opt(m.fpr),
            opt(m.f_measure),
            m.rejected_count.to_string(),
            m.replicates.to_string(),
            plan.perms.to_string(),
            plan.seed.to_string(),
        ])?;
    }
    w.flush()?;
    drop(w);
    Ok(buf)
}

pub fn run(a: &SimulateArgs) -> Result<()> {
    let plan = StudyPlan::resolve(a)?;
    let rows = study(&plan)?;
    output::emit(a.out.as_deref(), &to_csv(&plan, &rows)?)
}
