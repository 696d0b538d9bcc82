//! Monte-Carlo experiment driver.
//!
//! A sweep varies one network parameter over a list of values. For every
//! value, scheme and subcarrier count it runs `realizations` independent
//! user layouts through the full pipeline and averages the max-min rate.

use std::fmt::{self, Write as _};
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocation::{
    simulated_annealing, tabu_search, AllocationMatrix, PenaltyParams, Problem, RateReport,
    SaParams, TracePoint, TsParams,
};
use crate::association::{bind_max_gain, repair_parity, Binding};
use crate::error::{Error, Result};
use crate::geometry::{ChannelMatrix, ReceiverSpec, Room, Scenario};
use crate::pairing::{d_nlupa, PairSet, Scheme};
use crate::phy::{LinkBudget, NoiseConfig, PowerConfig};
use crate::power_split::BisectParams;
use crate::seed::{realization_seed, stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVar {
    Users,
    Leds,
    Subcarriers,
    Power,
    LedAngle,
    Fov,
    Height,
}

impl SweepVar {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVar::Users => "users",
            SweepVar::Leds => "leds",
            SweepVar::Subcarriers => "subcarriers",
            SweepVar::Power => "power",
            SweepVar::LedAngle => "led-angle",
            SweepVar::Fov => "fov",
            SweepVar::Height => "height",
        }
    }

    fn is_integral(&self) -> bool {
        matches!(
            self,
            SweepVar::Users | SweepVar::Leds | SweepVar::Subcarriers
        )
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "users" => SweepVar::Users,
            "leds" => SweepVar::Leds,
            "subcarriers" => SweepVar::Subcarriers,
            "power" => SweepVar::Power,
            "led-angle" => SweepVar::LedAngle,
            "fov" => SweepVar::Fov,
            "height" => SweepVar::Height,
            other => return Err(Error::Config(format!("unknown sweep variable '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeSelection {
    Imposed,
    NotImposed,
    Both,
}

impl SchemeSelection {
    pub fn schemes(&self) -> Vec<Scheme> {
        match self {
            SchemeSelection::Imposed => vec![Scheme::Imposed],
            SchemeSelection::NotImposed => vec![Scheme::NotImposed],
            SchemeSelection::Both => Scheme::ALL.to_vec(),
        }
    }
}

impl FromStr for SchemeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" => Ok(SchemeSelection::Both),
            other => Ok(match other.parse::<Scheme>()? {
                Scheme::Imposed => SchemeSelection::Imposed,
                Scheme::NotImposed => SchemeSelection::NotImposed,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sa,
    Ts,
}

impl Optimizer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Optimizer::Sa => "sa",
            Optimizer::Ts => "ts",
        }
    }
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Optimizer::Sa),
            "ts" => Ok(Optimizer::Ts),
            other => Err(Error::Config(format!("unknown optimizer '{other}'"))),
        }
    }
}

/// Flat experiment configuration. Every key has a default, so a config file
/// only needs the keys it overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeSelection,
    pub sweep: SweepVar,
    pub values: Vec<f64>,
    pub realizations: usize,
    pub master_seed: u64,
    pub optimizer: Optimizer,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,

    pub users: usize,
    pub leds: usize,
    /// Subcarrier counts K evaluated at every sweep point.
    pub subcarriers: Vec<usize>,
    pub electrical_power_dbm: f64,
    pub led_semi_angle_deg: f64,
    pub fov_semi_angle_deg: f64,
    pub room_width: f64,
    pub room_depth: f64,
    pub room_height: f64,
    pub receiver_plane_height: f64,
    pub bandwidth_hz: f64,
    pub electrical_to_optical_ratio: f64,
    pub pd_area_m2: f64,
    pub oe_efficiency: f64,
    pub noise_psd: f64,
    pub refractive_index: f64,
    pub optical_filter_gain: f64,

    pub repair_max_iters: usize,
    pub spread_limit: f64,
    pub penalty_p1: f64,
    pub penalty_p2: f64,
    /// Rate unit of the objective, bit/s.
    pub objective_rate_unit: f64,
    pub sa_t0: f64,
    pub sa_alpha: f64,
    pub sa_m0: f64,
    pub sa_beta: f64,
    pub sa_outer_iters: usize,
    pub sa_max_seconds: Option<f64>,
    pub ts_tabu_list_len: usize,
    pub ts_candidate_list_len: usize,
    /// Defaults to the iteration count of one annealing run.
    pub ts_max_iterations: Option<usize>,
    pub bisect_bracket_tol: f64,
    pub bisect_rate_tol: f64,
    pub bisect_max_iters: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sa = SaParams::default();
        let ts = TsParams::default();
        let pen = PenaltyParams::default();
        let bis = BisectParams::default();
        Self {
            scheme: SchemeSelection::Both,
            sweep: SweepVar::Users,
            values: vec![10.0, 20.0, 30.0, 40.0],
            realizations: 100,
            master_seed: 2021,
            optimizer: Optimizer::Sa,
            workers: 0,

            users: 20,
            leds: 4,
            subcarriers: vec![16, 32],
            electrical_power_dbm: 35.0,
            led_semi_angle_deg: 60.0,
            fov_semi_angle_deg: 85.0,
            room_width: 5.0,
            room_depth: 5.0,
            room_height: 3.0,
            receiver_plane_height: 0.85,
            bandwidth_hz: 20e6,
            electrical_to_optical_ratio: 3.2,
            pd_area_m2: 1e-4,
            oe_efficiency: 0.53,
            noise_psd: 1e-19,
            refractive_index: 1.5,
            optical_filter_gain: 1.0,

            repair_max_iters: 1000,
            spread_limit: pen.spread_limit,
            penalty_p1: pen.p1,
            penalty_p2: pen.p2,
            objective_rate_unit: pen.rate_unit,
            sa_t0: sa.t0,
            sa_alpha: sa.alpha,
            sa_m0: sa.m0,
            sa_beta: sa.beta,
            sa_outer_iters: sa.outer_iters,
            sa_max_seconds: None,
            ts_tabu_list_len: ts.tabu_list_len,
            ts_candidate_list_len: ts.candidate_list_len,
            ts_max_iterations: None,
            bisect_bracket_tol: bis.bracket_tol,
            bisect_rate_tol: bis.rate_tol,
            bisect_max_iters: bis.max_iters,
        }
    }
}

/// Fully resolved parameters of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pub scheme: Scheme,
    pub optimizer: Optimizer,
    pub users: usize,
    pub leds: usize,
    pub led_semi_angle_deg: f64,
    pub room: Room,
    pub receiver: ReceiverSpec,
    pub power: PowerConfig,
    pub noise: NoiseConfig,
    pub repair_max_iters: usize,
    pub penalty: PenaltyParams,
    pub sa: SaParams,
    pub ts: TsParams,
    pub bisect: BisectParams,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Subcarrier counts of the K dimension. Sweeping K itself collapses it.
    pub fn k_values(&self) -> Vec<Option<usize>> {
        if self.sweep == SweepVar::Subcarriers {
            vec![None]
        } else {
            self.subcarriers.iter().copied().map(Some).collect()
        }
    }

    pub fn sa_params(&self) -> SaParams {
        SaParams {
            t0: self.sa_t0,
            alpha: self.sa_alpha,
            m0: self.sa_m0,
            beta: self.sa_beta,
            outer_iters: self.sa_outer_iters,
            max_evaluations: None,
            max_seconds: self.sa_max_seconds,
            record_trace: false,
        }
    }

    pub fn ts_params(&self) -> TsParams {
        TsParams {
            tabu_list_len: self.ts_tabu_list_len,
            candidate_list_len: self.ts_candidate_list_len,
            max_iterations: self
                .ts_max_iterations
                .unwrap_or_else(|| self.sa_params().evaluation_budget()),
            max_seconds: self.sa_max_seconds,
        }
    }

    /// Resolve one sweep point. `k` overrides the subcarrier count unless
    /// the sweep is over K.
    pub fn point(&self, sweep_value: f64, k: Option<usize>, scheme: Scheme) -> Result<PointConfig> {
        let mut users = self.users;
        let mut leds = self.leds;
        let mut subcarriers = k.or(self.subcarriers.first().copied()).unwrap_or(16);
        let mut power_dbm = self.electrical_power_dbm;
        let mut led_angle = self.led_semi_angle_deg;
        let mut fov = self.fov_semi_angle_deg;
        let mut height = self.room_height;

        if self.sweep.is_integral() && (sweep_value.fract() != 0.0 || sweep_value < 0.0) {
            return Err(Error::Config(format!(
                "{} must be a non-negative integer, got {sweep_value}",
                self.sweep
            )));
        }
        match self.sweep {
            SweepVar::Users => users = sweep_value as usize,
            SweepVar::Leds => leds = sweep_value as usize,
            SweepVar::Subcarriers => subcarriers = sweep_value as usize,
            SweepVar::Power => power_dbm = sweep_value,
            SweepVar::LedAngle => led_angle = sweep_value,
            SweepVar::Fov => fov = sweep_value,
            SweepVar::Height => height = sweep_value,
        }

        if scheme == Scheme::Imposed && users % 2 == 1 {
            return Err(Error::Config(format!(
                "{users} users cannot all be paired under the NOMA-imposed scheme"
            )));
        }
        let side = (leds as f64).sqrt().round() as usize;
        if leds == 0 || side * side != leds {
            return Err(Error::NotSquare(leds));
        }
        crate::geometry::lambertian_order(led_angle)?;
        let room = Room::new(
            self.room_width,
            self.room_depth,
            height,
            self.receiver_plane_height,
        )?;
        let receiver = ReceiverSpec {
            fov_semi_angle: fov,
            pd_area: self.pd_area_m2,
            optical_filter_gain: self.optical_filter_gain,
            refractive_index: self.refractive_index,
        };
        receiver
            .at(crate::geometry::Point3::new(0.0, 0.0, 0.0))
            .validate()?;
        let power = PowerConfig {
            electrical_power_dbm: power_dbm,
            electrical_to_optical_ratio: self.electrical_to_optical_ratio,
            oe_efficiency: self.oe_efficiency,
        };
        let noise = NoiseConfig {
            psd: self.noise_psd,
            bandwidth: self.bandwidth_hz,
            subcarrier_count: subcarriers,
        };
        LinkBudget::new(power, noise)?;
        if !(0.0..=1.0).contains(&self.spread_limit) {
            return Err(Error::Config(format!(
                "spread limit {} outside [0, 1]",
                self.spread_limit
            )));
        }
        if !(self.sa_alpha > 0.0 && self.sa_alpha < 1.0 && self.sa_beta >= 1.0 && self.sa_m0 >= 1.0)
        {
            return Err(Error::Config(
                "annealing needs 0 < alpha < 1, beta >= 1, m0 >= 1".into(),
            ));
        }

        Ok(PointConfig {
            scheme,
            optimizer: self.optimizer,
            users,
            leds,
            led_semi_angle_deg: led_angle,
            room,
            receiver,
            power,
            noise,
            repair_max_iters: self.repair_max_iters,
            penalty: PenaltyParams {
                spread_limit: self.spread_limit,
                p1: self.penalty_p1,
                p2: self.penalty_p2,
                rate_unit: self.objective_rate_unit,
            },
            sa: self.sa_params(),
            ts: self.ts_params(),
            bisect: BisectParams {
                bracket_tol: self.bisect_bracket_tol,
                rate_tol: self.bisect_rate_tol,
                max_iters: self.bisect_max_iters,
            },
        })
    }

    /// Check every sweep point before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("sweep value list is empty".into()));
        }
        if self.sweep != SweepVar::Subcarriers && self.subcarriers.is_empty() {
            return Err(Error::Config("subcarrier list is empty".into()));
        }
        if self.realizations == 0 {
            return Err(Error::Config("at least one realization is required".into()));
        }
        for &v in &self.values {
            for k in self.k_values() {
                for scheme in self.scheme.schemes() {
                    self.point(v, k, scheme)?;
                }
            }
        }
        Ok(())
    }
}

/// Everything produced for one user-location realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub scenario: Scenario,
    pub channel: ChannelMatrix,
    pub binding: Binding,
    pub repair_iterations: usize,
    pub pairs: PairSet,
    pub link: LinkBudget,
    pub allocation: AllocationMatrix,
    pub report: RateReport,
    pub evaluations: usize,
    pub trace: Vec<TracePoint>,
}

/// Scenario, binding, pairing and optimization for one seed.
pub fn run_realization(point: &PointConfig, seed: u64) -> Result<Realization> {
    run_realization_traced(point, seed, false)
}

/// Users of one realization bound to LEDs, repaired when the scheme needs
/// even LED populations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundNetwork {
    pub scenario: Scenario,
    pub channel: ChannelMatrix,
    pub binding: Binding,
    pub repair_iterations: usize,
}

pub fn bind_network(point: &PointConfig, seed: u64) -> Result<BoundNetwork> {
    let mut scenario_rng = stream_rng(seed, Stream::Scenario);
    let scenario = Scenario::lattice(
        point.room,
        point.leds,
        point.led_semi_angle_deg,
        &point.receiver,
        point.users,
        seed,
        &mut scenario_rng,
    )?;
    let channel = ChannelMatrix::from_scenario(&scenario)?;
    let mut binding = bind_max_gain(&channel)?;
    let mut repair_iterations = 0;
    if point.scheme == Scheme::Imposed && binding.odd_leds() > 0 {
        let mut rng = stream_rng(seed, Stream::Repair);
        let out = repair_parity(&binding, &scenario, &mut rng, point.repair_max_iters)?;
        binding = out.binding;
        repair_iterations = out.iterations;
    }
    Ok(BoundNetwork {
        scenario,
        channel,
        binding,
        repair_iterations,
    })
}

pub fn run_realization_traced(
    point: &PointConfig,
    seed: u64,
    record_trace: bool,
) -> Result<Realization> {
    let BoundNetwork {
        scenario,
        channel,
        binding,
        repair_iterations,
    } = bind_network(point, seed)?;
    let pairs = d_nlupa(&binding, &channel, point.scheme)?;
    let link = LinkBudget::new(point.power, point.noise)?;
    let problem = Problem::new(&pairs, &channel, &link, point.penalty).with_bisect(point.bisect);
    let mut rng = stream_rng(seed, Stream::Optimizer);
    let (allocation, report, evaluations, trace) = match point.optimizer {
        Optimizer::Sa => {
            let sa = SaParams {
                record_trace,
                ..point.sa
            };
            let out = simulated_annealing(&problem, &sa, &mut rng)?;
            (out.best, out.report, out.evaluations, out.trace)
        }
        Optimizer::Ts => {
            let out = tabu_search(&problem, &point.ts, &mut rng)?;
            (out.best, out.report, out.evaluations, Vec::new())
        }
    };
    Ok(Realization {
        scenario,
        channel,
        binding,
        repair_iterations,
        pairs,
        link,
        allocation,
        report,
        evaluations,
        trace,
    })
}

/// Aggregate over the realizations of one (value, scheme, K) point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_var: SweepVar,
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub k: usize,
    pub optimizer: Optimizer,
    pub mean_minrate_bps: f64,
    pub std_bps: f64,
    /// Successful realizations.
    pub realizations: usize,
    pub failed: usize,
    pub min_bps: f64,
    pub max_bps: f64,
    pub mean_evaluations: f64,
    pub mean_repair_iterations: f64,
    /// Max-min rate of every successful realization, in seed order.
    pub samples: Vec<f64>,
    pub repair_iterations: Vec<usize>,
}

struct Job {
    value_idx: usize,
    scheme: Scheme,
    k: Option<usize>,
    realization: usize,
    point: PointConfig,
}

struct JobResult {
    min_rate: f64,
    evaluations: usize,
    repair_iterations: usize,
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Run every (value × scheme × K × realization) job and aggregate rows in
/// sweep order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let schemes = cfg.scheme.schemes();
    let k_values = cfg.k_values();
    let mut jobs = Vec::new();
    for (value_idx, &v) in cfg.values.iter().enumerate() {
        for &scheme in &schemes {
            for &k in &k_values {
                let point = cfg.point(v, k, scheme)?;
                for realization in 0..cfg.realizations {
                    jobs.push(Job {
                        value_idx,
                        scheme,
                        k,
                        realization,
                        point: point.clone(),
                    });
                }
            }
        }
    }

    let pool = build_pool(cfg.workers)?;
    let results: Vec<Result<JobResult>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let seed = realization_seed(cfg.master_seed, job.realization as u64);
                run_realization(&job.point, seed).map(|r| JobResult {
                    min_rate: r.report.min_rate,
                    evaluations: r.evaluations,
                    repair_iterations: r.repair_iterations,
                })
            })
            .collect()
    });

    let mut rows = Vec::new();
    for (chunk_jobs, chunk) in jobs
        .chunks(cfg.realizations)
        .zip(results.chunks(cfg.realizations))
    {
        let head = &chunk_jobs[0];
        let ok: Vec<&JobResult> = chunk.iter().filter_map(|r| r.as_ref().ok()).collect();
        for (job, r) in chunk_jobs.iter().zip(chunk) {
            if let Err(e) = r {
                log::warn!(
                    "{}={} {} realization {} failed: {e}",
                    cfg.sweep,
                    cfg.values[job.value_idx],
                    job.scheme,
                    job.realization
                );
            }
        }
        let samples: Vec<f64> = ok.iter().map(|r| r.min_rate).collect();
        let n = samples.len();
        let mean = if n > 0 {
            samples.iter().sum::<f64>() / n as f64
        } else {
            f64::NAN
        };
        let std = if n > 1 {
            (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        let avg = |f: &dyn Fn(&JobResult) -> f64| {
            if n > 0 {
                ok.iter().map(|r| f(r)).sum::<f64>() / n as f64
            } else {
                f64::NAN
            }
        };
        rows.push(ResultRow {
            sweep_var: cfg.sweep,
            sweep_value: cfg.values[head.value_idx],
            scheme: head.scheme,
            k: head.point.noise.subcarrier_count,
            optimizer: cfg.optimizer,
            mean_minrate_bps: mean,
            std_bps: std,
            realizations: n,
            failed: chunk.len() - n,
            min_bps: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max_bps: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_evaluations: avg(&|r| r.evaluations as f64),
            mean_repair_iterations: avg(&|r| r.repair_iterations as f64),
            samples,
            repair_iterations: ok.iter().map(|r| r.repair_iterations).collect(),
        });
        debug_assert!(head
            .k
            .is_none_or(|k| k == head.point.noise.subcarrier_count));
    }
    Ok(rows)
}

pub const RESULT_HEADER: [&str; 8] = [
    "sweep_var",
    "sweep_value",
    "scheme",
    "K",
    "optimizer",
    "mean_minrate_bps",
    "std_bps",
    "realizations",
];

pub fn write_results<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record(RESULT_HEADER)?;
    for r in rows {
        out.write_record([
            r.sweep_var.to_string(),
            r.sweep_value.to_string(),
            r.scheme.to_string(),
            r.k.to_string(),
            r.optimizer.as_str().to_string(),
            r.mean_minrate_bps.to_string(),
            r.std_bps.to_string(),
            r.realizations.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Extended per-row diagnostics, including failed realization counts.
pub fn write_diagnostics<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record([
        "sweep_var",
        "sweep_value",
        "scheme",
        "K",
        "optimizer",
        "realizations",
        "failed",
        "min_bps",
        "max_bps",
        "mean_evaluations",
        "mean_repair_iterations",
    ])?;
    for r in rows {
        out.write_record([
            r.sweep_var.to_string(),
            r.sweep_value.to_string(),
            r.scheme.to_string(),
            r.k.to_string(),
            r.optimizer.as_str().to_string(),
            r.realizations.to_string(),
            r.failed.to_string(),
            r.min_bps.to_string(),
            r.max_bps.to_string(),
            r.mean_evaluations.to_string(),
            r.mean_repair_iterations.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Human-readable table of the rows; failed realizations are flagged.
pub fn summary_table(rows: &[ResultRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:>10} {:<12} {:>4} {:<4} {:>14} {:>12} {:>6}",
        "sweep", "value", "scheme", "K", "opt", "mean [Mbit/s]", "std", "runs"
    );
    for r in rows {
        let flag = if r.failed > 0 {
            format!("  ({} FAILED)", r.failed)
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            "{:<12} {:>10} {:<12} {:>4} {:<4} {:>14.4} {:>12.4} {:>6}{flag}",
            r.sweep_var.as_str(),
            r.sweep_value,
            r.scheme.as_str(),
            r.k,
            r.optimizer.as_str(),
            r.mean_minrate_bps / 1e6,
            r.std_bps / 1e6,
            r.realizations,
        );
    }
    s
}
