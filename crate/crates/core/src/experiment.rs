//! Parameter sweeps comparing simulation against the closed-form results,
//! plus report emission (`results.csv`, `config.echo`, `plot.py`).
//!
//! Configs are flat `key = value` files; `#` starts a comment. Unknown or
//! repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis;
use crate::error::{Error, Result};
use crate::meeting::{estimate_beta, generate_schedule, MeetingSchedule};
use crate::mobility::{
    expected_relative_speed, extract_meetings, generate_rd, generate_rwp, Boundary, DurationDist,
    MobilityKind, RdConfig, RelativeSpeed, RwpConfig, SpeedModel, Trace,
};
use crate::params::NetworkParams;
use crate::routing::{simulate, TrafficParams};
use crate::stats::Summary;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    ThroughputVsLoad,
    DelayVsLoad,
    CapacityVsSpeed,
    DelayVsSpeed,
    CapacityVsRange,
    DelayVsRange,
    ValidateBeta,
}

impl Scenario {
    const NAMES: [(&'static str, Scenario); 7] = [
        ("throughput-vs-load", Scenario::ThroughputVsLoad),
        ("delay-vs-load", Scenario::DelayVsLoad),
        ("capacity-vs-speed", Scenario::CapacityVsSpeed),
        ("delay-vs-speed", Scenario::DelayVsSpeed),
        ("capacity-vs-d", Scenario::CapacityVsRange),
        ("delay-vs-d", Scenario::DelayVsRange),
        ("validate-beta", Scenario::ValidateBeta),
    ];

    /// Scenarios evaluated from closed forms only.
    pub fn is_theory_only(self) -> bool {
        matches!(
            self,
            Scenario::CapacityVsSpeed
                | Scenario::DelayVsSpeed
                | Scenario::CapacityVsRange
                | Scenario::DelayVsRange
        )
    }

    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            Scenario::ThroughputVsLoad => ("system load rho", "per-flow throughput (packets/s)"),
            Scenario::DelayVsLoad => ("system load rho", "mean end-to-end delay (s)"),
            Scenario::CapacityVsSpeed => (
                "average relative speed E[V*] (m/s)",
                "capacity mu (packets/s)",
            ),
            Scenario::DelayVsSpeed => (
                "average relative speed E[V*] (m/s)",
                "mean end-to-end delay (s)",
            ),
            Scenario::CapacityVsRange => ("transmission range d (m)", "capacity mu (packets/s)"),
            Scenario::DelayVsRange => ("transmission range d (m)", "mean end-to-end delay (s)"),
            Scenario::ValidateBeta => (
                "transmission range d (m)",
                "pairwise meeting rate beta (1/s)",
            ),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::NAMES
            .iter()
            .find(|(name, _)| *name == s)
            .map(|&(_, sc)| sc)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = Scenario::NAMES.iter().find(|(_, sc)| sc == self).unwrap().0;
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeetingSource {
    Poisson,
    Mobility(MobilityKind),
}

impl FromStr for MeetingSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(MeetingSource::Poisson),
            "rwp" => Ok(MeetingSource::Mobility(MobilityKind::RandomWaypoint)),
            "rd" => Ok(MeetingSource::Mobility(MobilityKind::RandomDirection)),
            other => Err(Error::Config(format!(
                "unknown mobility `{other}` (poisson, rwp or rd)"
            ))),
        }
    }
}

impl fmt::Display for MeetingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeetingSource::Poisson => "poisson",
            MeetingSource::Mobility(MobilityKind::RandomWaypoint) => "rwp",
            MeetingSource::Mobility(MobilityKind::RandomDirection) => "rd",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub mobility: MeetingSource,
    pub sweep: Vec<f64>,
    pub n: usize,
    /// Pairwise meeting rate used by the theory; required for the Poisson
    /// source, otherwise derived from the mobility approximation.
    pub beta: Option<f64>,
    pub side: f64,
    pub range: f64,
    pub speed: SpeedModel,
    /// Overrides the relative speed computed from `speed`.
    pub relative_speed: Option<f64>,
    /// Load used by scenarios that do not sweep it.
    pub rho: f64,
    pub pause: f64,
    pub travel_time_mean: f64,
    pub boundary: Boundary,
    pub seeds: Vec<u64>,
    pub horizon: f64,
    pub warmup: f64,
    pub output: PathBuf,
}

const KEYS: [&str; 18] = [
    "scenario",
    "mobility",
    "sweep",
    "n",
    "beta",
    "side",
    "range",
    "speed",
    "speed_max",
    "relative_speed",
    "rho",
    "pause",
    "travel_time_mean",
    "boundary",
    "seeds",
    "horizon",
    "warmup",
    "output",
];

/// Default number of seeds per sweep point.
pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

/// Fraction of the horizon excluded from measurements when no warmup is set.
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.1;

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl ExperimentConfig {
    /// Parses `key = value` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(k + 1, format!("expected `key = value`, found `{line}`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::parse(k + 1, format!("unknown key `{key}`")));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::parse(k + 1, format!("duplicate key `{key}`")));
            }
        }
        Self::from_map(&map)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Builds a config from already split keys. Applies defaults and
    /// validates.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(unknown) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key `{unknown}`")));
        }
        let get = |k: &str| map.get(k).map(String::as_str);
        let required =
            |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing required key `{k}`")));

        let scenario: Scenario = required("scenario")?.parse()?;
        let mobility: MeetingSource = get("mobility").unwrap_or("poisson").parse()?;
        let sweep: Vec<f64> = parse_list("sweep", required("sweep")?)?;
        let speed_min: f64 = get("speed").map_or(Ok(40.0), |v| parse_value("speed", v))?;
        let speed = match get("speed_max") {
            Some(v) => SpeedModel::Uniform {
                min: speed_min,
                max: parse_value("speed_max", v)?,
            },
            None => SpeedModel::Constant(speed_min),
        };
        let horizon: f64 = get("horizon").map_or(Ok(1e7), |v| parse_value("horizon", v))?;
        let warmup = match get("warmup") {
            Some(v) => parse_value("warmup", v)?,
            None => DEFAULT_WARMUP_FRACTION * horizon,
        };
        let boundary = match get("boundary").unwrap_or("reflect") {
            "reflect" => Boundary::Reflect,
            "wrap" => Boundary::Wrap,
            other => {
                return Err(Error::Config(format!(
                    "unknown boundary `{other}` (reflect or wrap)"
                )))
            }
        };
        let cfg = ExperimentConfig {
            scenario,
            mobility,
            sweep,
            n: get("n").map_or(Ok(20), |v| parse_value("n", v))?,
            beta: get("beta").map(|v| parse_value("beta", v)).transpose()?,
            side: get("side").map_or(Ok(2000.0), |v| parse_value("side", v))?,
            range: get("range").map_or(Ok(20.0), |v| parse_value("range", v))?,
            speed,
            relative_speed: get("relative_speed")
                .map(|v| parse_value("relative_speed", v))
                .transpose()?,
            rho: get("rho").map_or(Ok(0.8), |v| parse_value("rho", v))?,
            pause: get("pause").map_or(Ok(0.0), |v| parse_value("pause", v))?,
            travel_time_mean: get("travel_time_mean")
                .map_or(Ok(crate::mobility::DEFAULT_TRAVEL_TIME_MEAN), |v| {
                    parse_value("travel_time_mean", v)
                })?,
            boundary,
            seeds: get("seeds").map_or(Ok(DEFAULT_SEEDS.to_vec()), |v| parse_list("seeds", v))?,
            horizon,
            warmup,
            output: PathBuf::from(get("output").unwrap_or("results")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.is_empty() {
            return Err(Error::Config("sweep must list at least one value".into()));
        }
        if self.sweep.windows(2).any(|w| w[0] > w[1]) || self.sweep.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config(
                "sweep values must be finite and sorted ascending".into(),
            ));
        }
        if self.sweep[0] <= 0.0 {
            return Err(Error::Config("sweep values must be positive".into()));
        }
        if self.n < 3 {
            return Err(Error::param(format!(
                "node count must be at least 3 (got {})",
                self.n
            )));
        }
        self.speed.validate()?;
        if !(self.horizon > 0.0) || !(self.warmup >= 0.0 && self.warmup < self.horizon) {
            return Err(Error::param("need horizon > 0 and 0 <= warmup < horizon"));
        }
        if !(self.rho > 0.0) {
            return Err(Error::param("rho must be positive"));
        }
        if !(self.pause >= 0.0) || !(self.travel_time_mean > 0.0) {
            return Err(Error::param("pause must be >= 0 and travel_time_mean > 0"));
        }
        if !(self.side > 0.0 && self.range > 0.0 && self.range < self.side) {
            return Err(Error::param("need 0 < range < side"));
        }
        if self.beta.is_some_and(|b| !(b > 0.0)) {
            return Err(Error::param("beta must be positive"));
        }
        if self.relative_speed.is_some_and(|v| !(v > 0.0)) {
            return Err(Error::param("relative_speed must be positive"));
        }
        let needs_sim = !self.scenario.is_theory_only();
        if needs_sim && self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        match (self.mobility, self.scenario) {
            (MeetingSource::Poisson, Scenario::ThroughputVsLoad | Scenario::DelayVsLoad) => {
                if self.beta.is_none() {
                    return Err(Error::Config("the poisson source requires `beta`".into()));
                }
            }
            (MeetingSource::Poisson, sc) => {
                return Err(Error::Config(format!(
                    "scenario {sc} needs mobility rwp or rd"
                )));
            }
            _ => {}
        }
        Ok(())
    }

    fn kind(&self) -> Option<MobilityKind> {
        match self.mobility {
            MeetingSource::Poisson => None,
            MeetingSource::Mobility(k) => Some(k),
        }
    }

    pub fn relative_speed(&self) -> Result<RelativeSpeed> {
        match self.relative_speed {
            Some(v) => RelativeSpeed::new(v),
            None => expected_relative_speed(&self.speed),
        }
    }

    /// Meeting rate the theory is evaluated with at transmission range `range`.
    pub fn theory_beta(&self, range: f64) -> Result<f64> {
        if let Some(b) = self.beta {
            return Ok(b);
        }
        let kind = self
            .kind()
            .ok_or_else(|| Error::Config("the poisson source requires `beta`".into()))?;
        Ok(kind.beta(self.side, range, self.relative_speed()?))
    }

    /// Canonical `key = value` rendering; parses back to an equal config.
    pub fn echo(&self) -> String {
        let (speed, speed_max) = match self.speed {
            SpeedModel::Constant(v) => (v, None),
            SpeedModel::Uniform { min, max } => (min, Some(max)),
        };
        let mut lines = vec![
            ("scenario", self.scenario.to_string()),
            ("mobility", self.mobility.to_string()),
            ("sweep", join(&self.sweep)),
            ("n", self.n.to_string()),
        ];
        if let Some(b) = self.beta {
            lines.push(("beta", b.to_string()));
        }
        lines.push(("side", self.side.to_string()));
        lines.push(("range", self.range.to_string()));
        lines.push(("speed", speed.to_string()));
        if let Some(m) = speed_max {
            lines.push(("speed_max", m.to_string()));
        }
        if let Some(v) = self.relative_speed {
            lines.push(("relative_speed", v.to_string()));
        }
        lines.extend([
            ("rho", self.rho.to_string()),
            ("pause", self.pause.to_string()),
            ("travel_time_mean", self.travel_time_mean.to_string()),
            (
                "boundary",
                match self.boundary {
                    Boundary::Reflect => "reflect",
                    Boundary::Wrap => "wrap",
                }
                .to_string(),
            ),
            ("seeds", join(&self.seeds)),
            ("horizon", self.horizon.to_string()),
            ("warmup", self.warmup.to_string()),
            ("output", self.output.display().to_string()),
        ]);
        lines
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    fn pause_dist(&self) -> DurationDist {
        if self.pause > 0.0 {
            DurationDist::Constant(self.pause)
        } else {
            DurationDist::Zero
        }
    }

    /// Mobility trace for one seed.
    pub fn trace(&self, seed: u64) -> Result<Trace> {
        match self.kind() {
            Some(MobilityKind::RandomWaypoint) => generate_rwp(
                self.n,
                self.side,
                &RwpConfig {
                    speed: self.speed,
                    pause: self.pause_dist(),
                },
                self.horizon,
                seed,
            ),
            Some(MobilityKind::RandomDirection) => generate_rd(
                self.n,
                self.side,
                &RdConfig {
                    speed: self.speed,
                    pause: self.pause_dist(),
                    travel_time: DurationDist::Exponential {
                        mean: self.travel_time_mean,
                    },
                    boundary: self.boundary,
                },
                self.horizon,
                seed,
            ),
            None => Err(Error::Config("the poisson source has no trace".into())),
        }
    }

    /// Meeting schedule for one seed at the configured range.
    pub fn schedule(&self, seed: u64) -> Result<MeetingSchedule> {
        match self.mobility {
            MeetingSource::Poisson => {
                let params = NetworkParams::new(
                    self.n,
                    self.side,
                    self.range,
                    self.theory_beta(self.range)?,
                )?;
                generate_schedule(&params, self.horizon, seed)
            }
            MeetingSource::Mobility(_) => extract_meetings(&self.trace(seed)?, self.range, seed),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub sweep: f64,
    pub theory: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_stderr: Option<f64>,
    /// Simulation runs behind `sim_mean`; zero for theory-only rows.
    pub runs: usize,
    pub stable: bool,
}

impl ExperimentRow {
    fn theory_only(sweep: f64, theory: Option<f64>, stable: bool) -> Self {
        ExperimentRow {
            sweep,
            theory,
            sim_mean: None,
            sim_stderr: None,
            runs: 0,
            stable,
        }
    }

    fn with_samples(sweep: f64, theory: Option<f64>, samples: &[f64], stable: bool) -> Self {
        let s: Summary = samples.iter().copied().collect();
        ExperimentRow {
            sweep,
            theory,
            sim_mean: Some(s.mean()),
            sim_stderr: Some(s.std_error()),
            runs: samples.len(),
            stable,
        }
    }
}

/// Runs every sweep point of `config`, deterministically.
///
/// Meeting schedules are built once per seed and shared by all sweep values,
/// so load sweeps compare points under identical mobility randomness.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    match config.scenario {
        Scenario::ThroughputVsLoad | Scenario::DelayVsLoad => run_load_sweep(config),
        Scenario::ValidateBeta => run_beta_validation(config),
        _ => run_theory_sweep(config),
    }
}

fn run_load_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let beta = config.theory_beta(config.range)?;
    let mu = analysis::capacity(config.n, beta)?;
    let params = NetworkParams::new(config.n, config.side, config.range, beta)?;
    let delay_scenario = config.scenario == Scenario::DelayVsLoad;

    let schedules: Vec<MeetingSchedule> = config
        .seeds
        .par_iter()
        .map(|&seed| config.schedule(seed))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..config.sweep.len())
        .flat_map(|i| (0..schedules.len()).map(move |s| (i, s)))
        .filter(|&(i, _)| !(delay_scenario && config.sweep[i] >= 1.0))
        .collect();
    let outcomes: Vec<((usize, usize), f64)> = jobs
        .par_iter()
        .map(|&(i, s)| {
            let lambda = config.sweep[i] * mu;
            let seed = config.seeds[s];
            let traffic = TrafficParams::random(config.n, lambda, seed)?;
            let stats = simulate(&params, &traffic, &schedules[s], config.warmup)?;
            let value = if delay_scenario {
                stats.mean_delay()
            } else {
                stats.mean_throughput()
            };
            Ok(((i, s), value))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(config.sweep.len());
    for (i, &rho) in config.sweep.iter().enumerate() {
        let lambda = rho * mu;
        let stable = rho < 1.0;
        if delay_scenario && !stable {
            rows.push(ExperimentRow::theory_only(rho, None, false));
            continue;
        }
        let samples: Vec<f64> = outcomes
            .iter()
            .filter(|((row, _), _)| *row == i)
            .map(|(_, v)| *v)
            .collect();
        let theory = if delay_scenario {
            analysis::expected_delay(config.n, beta, lambda)?.total
        } else {
            lambda.min(mu)
        };
        rows.push(ExperimentRow::with_samples(
            rho,
            Some(theory),
            &samples,
            stable,
        ));
    }
    Ok(rows)
}

fn run_beta_validation(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    // One trace per seed, reused for every transmission range.
    let per_seed: Vec<Vec<f64>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let trace = config.trace(seed)?;
            config
                .sweep
                .iter()
                .map(|&d| Ok(estimate_beta(&extract_meetings(&trace, d, seed)?).beta))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    config
        .sweep
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let samples: Vec<f64> = per_seed.iter().map(|v| v[i]).collect();
            let theory = config.theory_beta(d)?;
            Ok(ExperimentRow::with_samples(d, Some(theory), &samples, true))
        })
        .collect()
}

fn run_theory_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    let kind = config.kind().ok_or_else(|| {
        Error::Config(format!(
            "scenario {} needs mobility rwp or rd",
            config.scenario
        ))
    })?;
    config
        .sweep
        .iter()
        .map(|&x| {
            let (range, ev) = match config.scenario {
                Scenario::CapacityVsSpeed | Scenario::DelayVsSpeed => {
                    (config.range, RelativeSpeed::new(x)?)
                }
                _ => (x, config.relative_speed()?),
            };
            let beta = kind.beta(config.side, range, ev);
            let mu = analysis::capacity(config.n, beta)?;
            Ok(match config.scenario {
                Scenario::CapacityVsSpeed | Scenario::CapacityVsRange => {
                    ExperimentRow::theory_only(x, Some(mu), true)
                }
                _ => {
                    let stable = config.rho < 1.0;
                    let delay = if stable {
                        Some(analysis::expected_delay(config.n, beta, config.rho * mu)?.total)
                    } else {
                        None
                    };
                    ExperimentRow::theory_only(x, delay, stable)
                }
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders rows as CSV with header `sweep,theory,sim_mean,sim_stderr,runs,stable`.
pub fn results_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from("sweep,theory,sim_mean,sim_stderr,runs,stable\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.sweep,
            opt(r.theory),
            opt(r.sim_mean),
            opt(r.sim_stderr),
            r.runs,
            r.stable
        ));
    }
    out
}

fn plot_script(config: &ExperimentConfig) -> String {
    let (xlabel, ylabel) = config.scenario.axis_labels();
    format!(
        r#"#!/usr/bin/env python3
# Renders results.csv: theory as a line, simulation as points with error bars.
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "results.csv"))))


def num(v):
    return float(v) if v else None


xs = [float(r["sweep"]) for r in rows]
theory = [(x, num(r["theory"])) for x, r in zip(xs, rows) if num(r["theory"]) is not None]
sim = [(x, num(r["sim_mean"]), num(r["sim_stderr"])) for x, r in zip(xs, rows) if num(r["sim_mean"]) is not None]

fig, ax = plt.subplots(figsize=(6, 4))
if theory:
    ax.plot([t[0] for t in theory], [t[1] for t in theory], "--", label="theory")
if sim:
    ax.errorbar([s[0] for s in sim], [s[1] for s in sim], yerr=[s[2] for s in sim], fmt="o", label="simulation")
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
ax.set_title("{scenario} ({mobility}, n={n})")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "plot.png"), dpi=150)
"#,
        scenario = config.scenario,
        mobility = config.mobility,
        n = config.n,
    )
}

/// Paths written by [`emit_report`].
#[derive(Clone, Debug)]
pub struct ReportFiles {
    pub results: PathBuf,
    pub config_echo: PathBuf,
    pub plot_script: PathBuf,
}

/// Writes `results.csv`, `config.echo` and `plot.py` into `config.output`.
pub fn emit_report(rows: &[ExperimentRow], config: &ExperimentConfig) -> Result<ReportFiles> {
    if rows.is_empty() {
        return Err(Error::param("no rows to report"));
    }
    let dir = &config.output;
    fs::create_dir_all(dir)?;
    let files = ReportFiles {
        results: dir.join("results.csv"),
        config_echo: dir.join("config.echo"),
        plot_script: dir.join("plot.py"),
    };
    fs::write(&files.results, results_csv(rows))?;
    let mut echo = config.echo();
    if matches!(config.mobility, MeetingSource::Mobility(_)) && !config.scenario.is_theory_only() {
        echo.push_str(
            "# mobility traces are generated once per seed and shared across sweep values\n",
        );
    }
    fs::write(&files.config_echo, echo)?;
    fs::write(&files.plot_script, plot_script(config))?;
    Ok(files)
}
