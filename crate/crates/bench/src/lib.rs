//! Benchmark sweeps over (scheme, N, T, K) with modeled communication time.
//!
//! Each cell shares a random message of `K = k_mult·M'` coefficients, runs
//! one approximate recovery with every party present, and records the
//! simulated compute time (slowest party per round plus the aggregator) and
//! the bytes on the critical path. Communication time is
//! `bytes·8 / (bandwidth_mbps·10^6)`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use atasses::atasses::Atasses;
use atasses::baselines::{Replicated, Type1, Type2};
use atasses::params::ParamSet;
use atasses::ring::sample_uniform;
use atasses::rng::{derive_rng, label};
use atasses::sim::DropoutSchedule;
use atasses::{ApproxSs, Error, RecOptions, Result, Ring, RingPoly};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Atasses,
    Type1,
    Type2,
    Replicated,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Atasses, Scheme::Type1, Scheme::Type2, Scheme::Replicated];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Atasses => "atasses",
            Scheme::Type1 => "type1",
            Scheme::Type2 => "type2",
            Scheme::Replicated => "replicated",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown scheme `{s}` (expected atasses, type1, type2 or replicated)"))
    }
}

/// Largest N run without `allow_large_n`.
pub const DEFAULT_MAX_N: usize = 200;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub schemes: Vec<Scheme>,
    pub n_list: Vec<usize>,
    pub t_fracs: Vec<f64>,
    /// `K` as multiples of the inner degree `M'`.
    pub k_mults: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub bandwidth_mbps: f64,
    pub preset: String,
    pub allow_large_n: bool,
    /// Largest admissible Type-I modulus, in bits.
    pub type1_max_bits: u64,
    pub transcript_dir: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            schemes: Scheme::ALL.to_vec(),
            n_list: vec![10, 20, 50, 100, 200],
            t_fracs: vec![0.5, 0.7, 0.9],
            k_mults: vec![5, 10, 15, 20],
            trials: 3,
            seed: 0,
            bandwidth_mbps: 98.0,
            preset: atasses::params::PRESET_PN12QP109.to_string(),
            allow_large_n: false,
            type1_max_bits: 512,
            transcript_dir: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        if self.schemes.is_empty() || self.n_list.is_empty() || self.t_fracs.is_empty() || self.k_mults.is_empty() {
            return bad("schemes, N, T fractions and K multiples must all be non-empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if let Some(f) = self.t_fracs.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return bad(format!("T fraction {f} outside (0, 1]"));
        }
        if self.n_list.contains(&0) || self.k_mults.contains(&0) {
            return bad("N and K multiples must be positive".into());
        }
        if !(self.bandwidth_mbps > 0.0) {
            return bad(format!("bandwidth {} Mbps must be positive", self.bandwidth_mbps));
        }
        ParamSet::preset(&self.preset).map(|_| ())
    }

    pub fn comm_seconds(&self, bytes: usize) -> f64 {
        bytes as f64 * 8.0 / (self.bandwidth_mbps * 1e6)
    }
}

/// `max(1, round(frac·N))`.
pub fn threshold_for(n: usize, frac: f64) -> usize {
    ((frac * n as f64).round() as usize).clamp(1, n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub trial: usize,
    pub compute_seconds: f64,
    /// Critical-path bytes: per round, the busiest party's upload plus the
    /// aggregator's largest download to one party.
    pub comm_bytes: usize,
    pub comm_seconds: f64,
    pub total_seconds: f64,
    /// Largest party-to-party upload of any party.
    pub p2p_bytes: usize,
    /// Largest party-to-aggregator upload of any party.
    pub agg_bytes: usize,
    /// `ok`, `aborted: ...` or `skipped: ...`.
    pub status: String,
}

impl Row {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn skipped(scheme: Scheme, n: usize, t: usize, k: usize, reason: &str) -> Row {
        Row {
            scheme: scheme.name().into(),
            n,
            t,
            k,
            trial: 0,
            compute_seconds: 0.0,
            comm_bytes: 0,
            comm_seconds: 0.0,
            total_seconds: 0.0,
            p2p_bytes: 0,
            agg_bytes: 0,
            status: format!("skipped: {reason}"),
        }
    }
}

pub const CSV_HEADER: &str =
    "scheme,N,T,K,trial,compute_seconds,comm_bytes,comm_seconds,total_seconds,p2p_bytes,agg_bytes,status";

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()
}

fn random_message(ring: &Ring, width: usize, seed: u64) -> Vec<RingPoly> {
    let mut rng = derive_rng(seed, &[label("bench/message")]);
    (0..width).map(|_| sample_uniform(&mut rng, ring)).collect()
}

struct Cell {
    scheme: Scheme,
    n: usize,
    t: usize,
    k: usize,
    width: usize,
}

fn run_trials<S: ApproxSs>(backend: &S, cell: &Cell, cfg: &BenchConfig, rows: &mut Vec<Row>) -> Result<()> {
    for trial in 0..cfg.trials {
        let trial_seed = cfg.seed ^ (trial as u64) << 32 ^ (cell.n as u64) << 16 ^ cell.k as u64;
        let msg = random_message(backend.message_ring(), cell.width, trial_seed);
        let shares = match backend.share(&msg, &mut derive_rng(trial_seed, &[label("bench/share")])) {
            Ok(s) => s,
            Err(e @ Error::Capacity(_)) => {
                rows.push(Row::skipped(cell.scheme, cell.n, cell.t, cell.k, &e.to_string()));
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        drop(msg);
        let report = backend.approx_rec(&shares, &mut DropoutSchedule::None, trial_seed, &RecOptions::default())?;
        drop(shares);
        let measured = report.transcript.measure();
        let compute = report.compute_time().as_secs_f64();
        let comm_bytes = measured.critical_path_bytes();
        let comm_seconds = cfg.comm_seconds(comm_bytes);
        if let Some(dir) = &cfg.transcript_dir {
            let name = format!("{}_N{}_T{}_K{}_trial{}.csv", cell.scheme, cell.n, cell.t, cell.k, trial);
            let file = File::create(dir.join(name)).map_err(|e| Error::Setup(format!("transcript export: {e}")))?;
            report
                .transcript
                .export(BufWriter::new(file))
                .map_err(|e| Error::Setup(format!("transcript export: {e}")))?;
        }
        rows.push(Row {
            scheme: cell.scheme.name().into(),
            n: cell.n,
            t: cell.t,
            k: cell.k,
            trial,
            compute_seconds: compute,
            comm_bytes,
            comm_seconds,
            total_seconds: compute + comm_seconds,
            p2p_bytes: measured.max_p2p_sent(),
            agg_bytes: measured.max_to_agg_sent(),
            status: match &report.outcome {
                Ok(_) => "ok".into(),
                Err(e) => format!("aborted: {e}"),
            },
        });
    }
    Ok(())
}

/// Runs the grid. Rows come out ordered by (scheme, N, T, K, trial);
/// capacity refusals appear as `skipped` rows.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<Row>> {
    cfg.validate()?;
    if let Some(dir) = &cfg.transcript_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::Setup(format!("transcript dir: {e}")))?;
    }
    let preset = ParamSet::preset(&cfg.preset)?;
    let ring = preset.message_ring()?;
    let inner_m = preset.inner_m.unwrap_or(ring.degree());
    let b_sm = preset.b_sm.unwrap_or(0);
    let mut schemes = cfg.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let mut n_list = cfg.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();
    let mut k_mults = cfg.k_mults.clone();
    k_mults.sort_unstable();
    k_mults.dedup();
    let mut t_list: Vec<(usize, usize)> = Vec::new();
    for &n in &n_list {
        let mut ts: Vec<usize> = cfg.t_fracs.iter().map(|&f| threshold_for(n, f)).collect();
        ts.sort_unstable();
        ts.dedup();
        t_list.extend(ts.into_iter().map(|t| (n, t)));
    }

    let mut rows = Vec::new();
    for &scheme in &schemes {
        for &(n, t) in &t_list {
            let cells: Vec<Cell> = k_mults
                .iter()
                .map(|&km| {
                    let k = km * inner_m;
                    Cell { scheme, n, t, k, width: k.div_ceil(ring.degree()) }
                })
                .collect();
            if n > DEFAULT_MAX_N && !cfg.allow_large_n {
                for c in &cells {
                    rows.push(Row::skipped(scheme, n, t, c.k, &format!("N > {DEFAULT_MAX_N} needs --allow-large-n")));
                }
                continue;
            }
            let run = |rows: &mut Vec<Row>| -> Result<()> {
                match scheme {
                    Scheme::Atasses => {
                        let ps = ParamSet { n: Some(n), t: Some(t), seed: Some(cfg.seed), ..preset.clone() };
                        let backend = Atasses::new(ps.atasses()?);
                        cells.iter().try_for_each(|c| run_trials(&backend, c, cfg, rows))
                    }
                    Scheme::Type2 => {
                        let backend = Type2::new(n, t, ring.clone(), b_sm)?;
                        cells.iter().try_for_each(|c| run_trials(&backend, c, cfg, rows))
                    }
                    Scheme::Replicated => {
                        let backend = Replicated::new(n, t, ring.clone(), b_sm)?;
                        cells.iter().try_for_each(|c| run_trials(&backend, c, cfg, rows))
                    }
                    Scheme::Type1 => {
                        let bits = Type1::modulus_floor(n, b_sm).bits() + 1;
                        if bits > cfg.type1_max_bits {
                            return Err(Error::Capacity(format!(
                                "Type-I modulus needs {bits} bits, budget is {}",
                                cfg.type1_max_bits
                            )));
                        }
                        let backend = Type1::new(n, t, ring.degree(), b_sm)?;
                        cells.iter().try_for_each(|c| run_trials(&backend, c, cfg, rows))
                    }
                }
            };
            match run(&mut rows) {
                Ok(()) => {}
                Err(e @ Error::Capacity(_)) => {
                    for c in &cells {
                        if !rows.iter().any(|r| r.scheme == scheme.name() && r.n == n && r.t == t && r.k == c.k) {
                            rows.push(Row::skipped(scheme, n, t, c.k, &e.to_string()));
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub scheme: String,
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub trials: usize,
    pub median_compute_seconds: f64,
    pub median_total_seconds: f64,
    pub comm_bytes: usize,
    pub p2p_bytes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    K,
}

/// Log-log slope of a metric against `N` (at fixed `K`) or `K` (at fixed
/// `N`, `T`).
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub scheme: String,
    pub metric: &'static str,
    pub axis: Axis,
    /// The held-fixed coordinates, e.g. `K=40960` or `N=100,T=70`.
    pub fixed: String,
    pub slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
    pub slopes: Vec<SlopeFit>,
    pub warnings: Vec<String>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[mid] } else { (values[mid - 1] + values[mid]) / 2.0 })
}

/// Least-squares slope of `ln y` against `ln x`. Needs two distinct `x`
/// and positive values.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Per-cell medians and scaling fits over the successful rows.
pub fn emit_summary(rows: &[Row]) -> Summary {
    let mut groups: BTreeMap<(String, usize, usize, usize), Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        groups.entry((r.scheme.clone(), r.n, r.t, r.k)).or_default().push(r);
    }
    let mut summary = Summary::default();
    for ((scheme, n, t, k), rs) in &groups {
        let mut compute: Vec<f64> = rs.iter().map(|r| r.compute_seconds).collect();
        let mut total: Vec<f64> = rs.iter().map(|r| r.total_seconds).collect();
        summary.cells.push(CellSummary {
            scheme: scheme.clone(),
            n: *n,
            t: *t,
            k: *k,
            trials: rs.len(),
            median_compute_seconds: median(&mut compute).unwrap_or(0.0),
            median_total_seconds: median(&mut total).unwrap_or(0.0),
            comm_bytes: rs[0].comm_bytes,
            p2p_bytes: rs[0].p2p_bytes,
        });
    }

    let mut schemes: Vec<String> = summary.cells.iter().map(|c| c.scheme.clone()).collect();
    schemes.dedup();
    for scheme in &schemes {
        let cells: Vec<&CellSummary> = summary.cells.iter().filter(|c| &c.scheme == scheme).collect();
        // Time against N, per K, using the median over thresholds.
        let mut by_k: BTreeMap<usize, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
        for c in &cells {
            by_k.entry(c.k).or_default().entry(c.n).or_default().push(c.median_total_seconds);
        }
        for (k, per_n) in by_k {
            if per_n.len() < 3 {
                summary.warnings.push(format!("{scheme}: K={k} has {} N values, need 3 for a slope in N", per_n.len()));
                continue;
            }
            let points: Vec<(f64, f64)> =
                per_n.into_iter().map(|(n, mut ts)| (n as f64, median(&mut ts).unwrap_or(0.0))).collect();
            if let Some(slope) = fit_slope(&points) {
                summary.slopes.push(SlopeFit {
                    scheme: scheme.clone(),
                    metric: "total_seconds",
                    axis: Axis::N,
                    fixed: format!("K={k}"),
                    slope,
                    points: points.len(),
                });
            }
        }
        let mut by_nt: BTreeMap<(usize, usize), Vec<&CellSummary>> = BTreeMap::new();
        for c in &cells {
            by_nt.entry((c.n, c.t)).or_default().push(c);
        }
        for ((n, t), cs) in by_nt {
            if cs.len() < 2 {
                continue;
            }
            for (metric, get) in [
                ("total_seconds", (|c: &CellSummary| c.median_total_seconds) as fn(&CellSummary) -> f64),
                ("p2p_bytes", |c: &CellSummary| c.p2p_bytes as f64),
            ] {
                let points: Vec<(f64, f64)> = cs.iter().map(|c| (c.k as f64, get(c))).collect();
                if let Some(slope) = fit_slope(&points) {
                    summary.slopes.push(SlopeFit {
                        scheme: scheme.clone(),
                        metric,
                        axis: Axis::K,
                        fixed: format!("N={n},T={t}"),
                        slope,
                        points: points.len(),
                    });
                }
            }
        }
    }
    if summary.cells.is_empty() {
        summary.warnings.push("no successful rows".into());
    }
    summary
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scheme      N     T       K  trials  median_compute_s  median_total_s  comm_bytes")?;
        for c in &self.cells {
            writeln!(
                f,
                "{:<10} {:>4} {:>5} {:>7} {:>7} {:>17.4} {:>15.4} {:>11}",
                c.scheme, c.n, c.t, c.k, c.trials, c.median_compute_seconds, c.median_total_seconds, c.comm_bytes
            )?;
        }
        for s in &self.slopes {
            let axis = match s.axis {
                Axis::N => "N",
                Axis::K => "K",
            };
            writeln!(f, "slope {} {} vs {axis} at {}: {:.3} ({} points)", s.scheme, s.metric, s.fixed, s.slope, s.points)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
