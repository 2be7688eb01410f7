//! Monte Carlo sweeps over random lobsters: success rate of the leader
//! selection, leader counts and leader proportion, with CSV and SVG output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::control::LeaderSet;
use crate::csa::{run_csa_on, Certify, CsaMode, CsaOptions, Status};
use crate::error::{Error, Result};
use crate::graph::{attachment_profile, build_lobster, find_spine, random_lobster};
use crate::par::{self, Execution};

pub const CSV_HEADER: &str = "n,trials,successes,success_rate,mean_leaders,mean_N,mean_proportion";

fn default_n_values() -> Vec<usize> {
    (1..=10).map(|i| i * 10).collect()
}
fn default_trials() -> usize {
    100
}
fn default_max_load() -> usize {
    2
}
fn default_audit() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: CsaMode,
    #[serde(default = "default_max_load")]
    pub max_load: usize,
    #[serde(default)]
    pub strict_step6: bool,
    /// Fraction of trials re-checked by the exact oracle.
    #[serde(default = "default_audit")]
    pub audit_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_values: default_n_values(),
            trials: default_trials(),
            seed: 0,
            mode: CsaMode::default(),
            max_load: default_max_load(),
            strict_step6: false,
            audit_fraction: default_audit(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return bad(format!("spine length {n} is below 2"));
        }
        if !(0.0..=1.0).contains(&self.audit_fraction) {
            return bad(format!("audit_fraction {} is outside [0, 1]", self.audit_fraction));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-trial seed, a hash of `(base, n, trial)`. Unlike a plain xor, distinct
/// triples do not collide in practice.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(base) ^ n as u64) ^ trial as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trial {
    pub n: usize,
    pub seed: u64,
    pub vertices: usize,
    pub status: Status,
    pub found_at_step: Option<u8>,
    pub leaders: usize,
    /// Exact-oracle verdict on audited successes.
    pub audit: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean leader count over successful trials (NaN without successes).
    pub mean_leaders: f64,
    /// Mean total vertex count over all trials.
    pub mean_total: f64,
    /// Mean of leaders / vertices over successful trials.
    pub mean_proportion: f64,
    /// Success rate had the fallback step been skipped.
    pub step6_off_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Least-squares line through `(x, y)` pairs; `None` with fewer than two
/// distinct `x` values.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 2 || sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        points: points.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Audit {
    pub audited: usize,
    pub agreed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    /// Mean leaders against spine length.
    pub fit_spine: Option<LinearFit>,
    /// Mean leaders against mean total vertex count.
    pub fit_total: Option<LinearFit>,
    /// Spine lengths left out of the fits for lack of successes.
    pub excluded_from_fit: Vec<usize>,
    pub audit: Audit,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trials: Vec<Trial>,
}

impl SweepResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep result is serialisable")
    }
}

fn run_trial(cfg: &SweepConfig, n: usize, trial: usize, audit: bool) -> Result<Trial> {
    let seed = trial_seed(cfg.seed, n, trial);
    let g = build_lobster(&random_lobster(n, seed, cfg.max_load)?)?;
    let spine = find_spine(&g)?;
    let profile = attachment_profile(&g, &spine)?;
    let an = Analysis::new(g)?;
    let opts = CsaOptions {
        mode: cfg.mode,
        seed: None,
        strict_step6: cfg.strict_step6,
        certify: Certify::Never,
    };
    let report = run_csa_on(&an, &spine, &profile, opts)?;
    let audit = if audit && report.status == Status::Found {
        let set = LeaderSet::new(an.n(), &report.leaders)?;
        Some(an.kalman_exact(&set)?.controllable)
    } else {
        None
    };
    Ok(Trial {
        n,
        seed,
        vertices: an.n(),
        status: report.status,
        found_at_step: report.found_at_step,
        leaders: report.leaders.len(),
        audit,
    })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Runs every `(n, trial)` pair and aggregates per spine length. Results do
/// not depend on `exec` or on scheduling.
pub fn run_sweep(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    cfg.validate()?;
    let stride = if cfg.audit_fraction > 0.0 {
        (1.0 / cfg.audit_fraction).ceil() as usize
    } else {
        usize::MAX
    };
    let jobs: Vec<(usize, usize, bool)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .enumerate()
        .map(|(i, (n, t))| (n, t, i % stride == 0))
        .collect();
    let trials = par::map(exec, &jobs, |&(n, t, a)| run_trial(cfg, n, t, a))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (i, &n) in cfg.n_values.iter().enumerate() {
        let chunk = &trials[i * cfg.trials..(i + 1) * cfg.trials];
        let ok: Vec<&Trial> = chunk.iter().filter(|t| t.status == Status::Found).collect();
        let early = chunk.iter().filter(|t| matches!(t.found_at_step, Some(s) if s < 6)).count();
        rows.push(SweepRow {
            n,
            trials: chunk.len(),
            successes: ok.len(),
            success_rate: ok.len() as f64 / chunk.len() as f64,
            mean_leaders: mean(ok.iter().map(|t| t.leaders as f64)),
            mean_total: mean(chunk.iter().map(|t| t.vertices as f64)),
            mean_proportion: mean(ok.iter().map(|t| t.leaders as f64 / t.vertices as f64)),
            step6_off_rate: Some(early as f64 / chunk.len() as f64),
        });
    }
    let fitted: Vec<&SweepRow> = rows.iter().filter(|r| r.successes > 0).collect();
    let excluded: Vec<usize> = rows.iter().filter(|r| r.successes == 0).map(|r| r.n).collect();
    let fit_spine = linear_fit(&fitted.iter().map(|r| (r.n as f64, r.mean_leaders)).collect::<Vec<_>>());
    let fit_total = linear_fit(&fitted.iter().map(|r| (r.mean_total, r.mean_leaders)).collect::<Vec<_>>());
    let audited: Vec<bool> = trials.iter().filter_map(|t| t.audit).collect();
    let mut warnings = Vec::new();
    if !excluded.is_empty() {
        warnings.push(format!("no successes at n = {excluded:?}; excluded from fit"));
    }
    if cfg.trials < 10 {
        warnings.push(format!("only {} trials per n; fit variance is large", cfg.trials));
    }
    let audit = Audit {
        audited: audited.len(),
        agreed: audited.iter().filter(|&&b| b).count(),
    };
    if audit.agreed < audit.audited {
        warnings.push(format!(
            "exact oracle rejected {} audited leader sets",
            audit.audited - audit.agreed
        ));
    }
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        fit_spine,
        fit_total,
        excluded_from_fit: excluded,
        audit,
        warnings,
        trials,
    })
}

/// Success rate per spine length, with the fallback-off ablation.
pub fn run_success_probability(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    run_sweep(cfg, exec)
}

/// Mean leader count per spine length with a least-squares line.
pub fn run_leader_scaling(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    run_sweep(cfg, exec)
}

/// Mean leaders-to-vertices ratio per spine length.
pub fn run_proportion(cfg: &SweepConfig, exec: Execution) -> Result<SweepResult> {
    run_sweep(cfg, exec)
}

/// CSV text: one row per spine length, six decimals, LF endings. The
/// `step6_off_rate` column is appended when `ablation` is set.
pub fn render_csv(rows: &[SweepRow], ablation: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    if ablation {
        out.push_str(",step6_off_rate");
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            r.n, r.trials, r.successes, r.success_rate, r.mean_leaders, r.mean_total, r.mean_proportion
        )
        .unwrap();
        if ablation {
            write!(out, ",{:.6}", r.step6_off_rate.unwrap_or(f64::NAN)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(rows: &[SweepRow], ablation: bool, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_csv(rows, ablation)).map_err(|e| Error::io(path, e))
}

#[derive(Deserialize)]
struct CsvRow {
    n: usize,
    trials: usize,
    successes: usize,
    success_rate: f64,
    mean_leaders: f64,
    #[serde(rename = "mean_N")]
    mean_total: f64,
    mean_proportion: f64,
    #[serde(default)]
    step6_off_rate: Option<f64>,
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if !header.iter().collect::<Vec<_>>().join(",").starts_with(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    reader
        .deserialize::<CsvRow>()
        .map(|r| {
            let r = r?;
            Ok(SweepRow {
                n: r.n,
                trials: r.trials,
                successes: r.successes,
                success_rate: r.success_rate,
                mean_leaders: r.mean_leaders,
                mean_total: r.mean_total,
                mean_proportion: r.mean_proportion,
                step6_off_rate: r.step6_off_rate,
            })
        })
        .collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    parse_csv(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Which per-row quantity an SVG plot shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    SuccessRate,
    MeanLeaders,
    MeanProportion,
}

impl Metric {
    fn get(self, r: &SweepRow) -> f64 {
        match self {
            Metric::SuccessRate => r.success_rate,
            Metric::MeanLeaders => r.mean_leaders,
            Metric::MeanProportion => r.mean_proportion,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::SuccessRate => "success rate",
            Metric::MeanLeaders => "mean leaders",
            Metric::MeanProportion => "leaders / vertices",
        }
    }
}

/// Line plot of `metric` against spine length, with an optional dashed
/// reference line `y = slope * n + intercept`.
pub fn render_svg(rows: &[SweepRow], metric: Metric, reference: Option<(f64, f64)>) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const PAD: f64 = 40.0;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, metric.get(r)))
        .filter(|p| p.1.is_finite())
        .collect();
    let xmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    if let Some((a, b)) = reference {
        ymax = ymax.max(a * xmax + b);
    }
    let ymax = if ymax > 0.0 { ymax * 1.1 } else { 1.0 };
    let xspan = if xmax > xmin { xmax - xmin } else { 1.0 };
    let sx = |x: f64| PAD + (x - xmin) / xspan * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / ymax * (H - 2.0 * PAD);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<path d="M{PAD} {} V{} H{}" stroke="black" fill="none"/>"#,
        PAD,
        H - PAD,
        W - PAD
    )
    .unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">spine length</text>"#, W / 2.0, H - 8.0).unwrap();
    writeln!(s, r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">{}</text>"#, H / 2.0, H / 2.0, metric.label()).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.3}</text>"#, PAD - 4.0, PAD + 4.0, ymax).unwrap();
    if !pts.is_empty() {
        writeln!(s, r#"<text x="{PAD}" y="{}" text-anchor="middle">{xmin}</text>"#, H - PAD + 14.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xmax}</text>"#, W - PAD, H - PAD + 14.0).unwrap();
        let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(s, r#"<polyline points="{}" stroke="steelblue" fill="none"/>"#, d.join(" ")).unwrap();
        for &(x, y) in &pts {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y)).unwrap();
        }
        if let Some((a, b)) = reference {
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
                sx(xmin),
                sy(a * xmin + b),
                sx(xmax),
                sy(a * xmax + b)
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(
    rows: &[SweepRow],
    metric: Metric,
    reference: Option<(f64, f64)>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(rows, metric, reference)).map_err(|e| Error::io(path, e))
}
