//! Experiment dispatch and report emission.
//!
//! Every run writes two deterministic artifacts into the output directory:
//! `report.csv` (data rows) and `summary.txt` (key: value lines ending with
//! the inputs digest). Identical (config bytes, seed) produce identical
//! bytes; the wall-clock timestamp only ever appears on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context};

use hardyx::grid::{Grid, GridFunction, TLadder};
use hardyx::halfspace::{
    cauchy_riemann_residual, majorization_check, subharmonic_mean_value_check, HarmonicVector,
    TensorField,
};
use hardyx::hardy::{equivalence_experiment, NormPair};
use hardyx::maximal::{fs_vector_probe, AssumptionParams, RadiusSet};
use hardyx::spaces::{
    bp_condition_probe, mo_indices, range_validator, SpaceSpec, ValidityReport, Weight,
};

use crate::config::{ExperimentConfig, ExperimentKind};

/// One emitted report: experiment identity, input digest and a flat metrics
/// map. The timestamp is informational (stderr log line only); files derive
/// solely from config + seed so reruns are byte-identical.
pub struct ReportRow {
    pub experiment: String,
    pub timestamp: u64,
    pub digest: String,
    pub metrics: Vec<(String, f64)>,
}

impl ReportRow {
    fn new(experiment: &str, digest: String) -> ReportRow {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportRow {
            experiment: experiment.to_string(),
            timestamp,
            digest,
            metrics: Vec::new(),
        }
    }

    fn push(&mut self, key: &str, value: f64) {
        self.metrics.push((key.to_string(), value));
    }

    /// `metric,value` CSV of the metrics map.
    fn metrics_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (k, v) in &self.metrics {
            out.push_str(&format!("{},{}\n", csv_field(k), v));
        }
        out
    }
}

/// RFC-style CSV quoting: wrap when the field contains a comma, quote or
/// newline, doubling inner quotes.
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// FNV-1a over the config bytes and the effective seed.
fn digest(config_bytes: &[u8], seed: u64) -> String {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for &b in config_bytes {
        eat(b);
    }
    eat(0xff);
    for b in seed.to_le_bytes() {
        eat(b);
    }
    format!("{h:016x}")
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn hypothesis_lines(out: &mut String, validity: &ValidityReport) {
    out.push_str(&format!("hypothesis_valid: {}\n", validity.valid));
    for check in &validity.checks {
        out.push_str(&format!(
            "hypothesis: {} -> {} (margin {})\n",
            check.description,
            if check.holds { "holds" } else { "violated" },
            check.margin
        ));
    }
}

/// Centered Gaussian bump exp(-pi d(x, center)^2 / width^2).
fn centered_gaussian(grid: &Grid, width: f64) -> GridFunction {
    let n = grid.dim();
    let center = grid.center_point();
    let mut g = GridFunction::zeros(*grid);
    for i in 0..grid.total_points() {
        let d = grid.periodic_distance_to(i, &center[..n]);
        g.values_mut()[i] = (-std::f64::consts::PI * d * d / (width * width)).exp();
    }
    g
}

/// Runs the configured experiment, writing `report.csv` and `summary.txt`
/// into the output directory. Returns the process exit code: 0 on success,
/// 2 when the space violates the theorem hypotheses and no override was
/// given (equivalence and range-check kinds).
pub fn run_experiment(
    config_bytes: &[u8],
    cfg: &ExperimentConfig,
    override_hypothesis: bool,
    out_override: Option<PathBuf>,
    seed_override: Option<u64>,
) -> anyhow::Result<u8> {
    let seed = seed_override.unwrap_or(cfg.seed);
    let grid = cfg.grid.build()?;
    let out_dir = out_override
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let mut row = ReportRow::new(cfg.kind.id(), digest(config_bytes, seed));

    let (summary_body, csv, exit) = match cfg.kind {
        ExperimentKind::PoissonEquiv | ExperimentKind::RieszEquiv | ExperimentKind::IsomEquiv => {
            run_equivalence(cfg, &grid, seed, override_hypothesis, &mut row)?
        }
        ExperimentKind::CrResidual => run_cr_residual(cfg, &grid, &mut row)?,
        ExperimentKind::Subharmonic => run_subharmonic(cfg, &grid, &mut row)?,
        ExperimentKind::Majorization => run_majorization(cfg, &grid, &mut row)?,
        ExperimentKind::MoIndices => run_mo_indices(cfg, &mut row)?,
        ExperimentKind::RangeCheck => run_range_check(cfg, &grid, override_hypothesis, &mut row)?,
        ExperimentKind::Probes => run_probes(cfg, &grid, seed, &mut row)?,
    };

    let mut summary = summary_body;
    summary.push_str(&format!("digest: {}\n", row.digest));
    let csv_path = write_artifact(&out_dir, "report.csv", &csv)?;
    let summary_path = write_artifact(&out_dir, "summary.txt", &summary)?;
    eprintln!(
        "[hardyx] timestamp={} experiment={} digest={} exit={} wrote {} {}",
        row.timestamp,
        row.experiment,
        row.digest,
        exit,
        csv_path.display(),
        summary_path.display()
    );
    Ok(exit)
}

type KindOutput = (String, String, u8);

fn run_equivalence(
    cfg: &ExperimentConfig,
    grid: &Grid,
    seed: u64,
    override_hypothesis: bool,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let space = cfg
        .space
        .as_ref()
        .ok_or_else(|| anyhow!("invalid config: equivalence kinds need a space section"))?
        .build(grid)?;
    let (pair, m) = match cfg.kind {
        ExperimentKind::PoissonEquiv => (NormPair::Poisson, 1),
        ExperimentKind::RieszEquiv => (NormPair::Riesz, cfg.order),
        ExperimentKind::IsomEquiv => (NormPair::VectorIsometry, 1),
        _ => unreachable!("dispatched as equivalence"),
    };
    let validity = range_validator(&space, m, grid.dim())?;
    if !validity.valid && !override_hypothesis {
        let mut body = format!(
            "experiment: {}\nspace: {}\norder: {}\nstatus: hypothesis violated, run skipped (pass --override-hypothesis to force)\n",
            cfg.kind.id(),
            space.label(),
            m
        );
        hypothesis_lines(&mut body, &validity);
        row.push("hypothesis_valid", 0.0);
        return Ok((body, row.metrics_csv(), 2));
    }

    let family = cfg
        .family
        .as_ref()
        .ok_or_else(|| anyhow!("invalid config: equivalence kinds need a family section"))?
        .build(seed, grid)?;
    let default_dto = crate::config::HardyConfigDto::default();
    let hardy = cfg.hardy.as_ref().unwrap_or(&default_dto).build(grid)?;
    let report = equivalence_experiment(&family, &space, m, &hardy, pair)
        .context("equivalence experiment failed")?;
    row.push("members", report.rows.len() as f64);
    row.push("min_ratio", report.min_ratio);
    row.push("max_ratio", report.max_ratio);
    row.push("spread", report.spread);
    row.push("hypothesis_valid", if report.validity.valid { 1.0 } else { 0.0 });
    Ok((report.summary_string(), report.to_csv_string(), 0))
}

fn run_cr_residual(
    cfg: &ExperimentConfig,
    grid: &Grid,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let l = grid.period();
    let f = centered_gaussian(grid, l / 16.0);
    // Three vertical ladders over the fixed slab [L/8, L/4], each halving the
    // spacing of the previous one, to expose the finite-difference order; the
    // slab stays away from the boundary so dt/t is small even at the coarsest
    // spacing.
    let (t_lo, t_hi) = (l / 8.0, l / 4.0);
    let mut relatives = Vec::new();
    for (i, count) in [9usize, 17, 33].into_iter().enumerate() {
        let dt = (t_hi - t_lo) / (count - 1) as f64;
        let levels = (0..count).map(|j| t_lo + dt * j as f64).collect();
        let ladder = TLadder::new(levels, l).context("invalid config: residual ladder")?;
        let v = HarmonicVector::from_boundary(&f, &ladder)?;
        let report = cauchy_riemann_residual(&v)?;
        row.push(&format!("relative_residual_{i}"), report.relative);
        relatives.push(report.relative);
    }
    row.push("drop_0_to_1", relatives[0] / relatives[1]);
    row.push("drop_1_to_2", relatives[1] / relatives[2]);
    let mut body = format!("experiment: {}\n", cfg.kind.id());
    for (k, v) in &row.metrics {
        body.push_str(&format!("{k}: {v}\n"));
    }
    Ok((body, row.metrics_csv(), 0))
}

fn run_subharmonic(
    cfg: &ExperimentConfig,
    grid: &Grid,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let l = grid.period();
    let ladder = match &cfg.hardy {
        Some(dto) if dto.ladder.is_some() => dto.build(grid)?.ladder,
        _ => TLadder::uniform(l / 80.0, 24, l).context("invalid config: ladder")?,
    };
    let m = cfg.order;
    let n = grid.dim();
    let q = cfg.q.unwrap_or(1.0);
    let f = centered_gaussian(grid, l / 8.0);
    let field = TensorField::gradient_extension(&f, m, &ladder)?.magnitude();

    let levels = ladder.levels();
    let dt = levels[1] - levels[0];
    let radius = 2.0 * dt;
    // 25 spatial probe points spread by a fixed stride, at two interior
    // heights: 50 deterministic spheres.
    let stride = (grid.total_points() / 25).max(1);
    let heights = [levels[levels.len() / 3], levels[2 * levels.len() / 3]];
    let mut centers = Vec::with_capacity(50);
    for s in 0..25 {
        for &t in &heights {
            centers.push((s * stride, t));
        }
    }
    let samples = if n == 1 { 32 } else { 64 };
    let report = subharmonic_mean_value_check(&field, q, &centers, radius, samples)?;
    row.push("order", m as f64);
    row.push("q", q);
    row.push("radius", radius);
    row.push("spheres", report.spheres as f64);
    row.push("worst_violation", report.worst_violation);
    row.push("scale", report.scale);
    row.push(
        "relative",
        if report.scale > 0.0 {
            report.worst_violation / report.scale
        } else {
            0.0
        },
    );
    let mut body = format!("experiment: {}\n", cfg.kind.id());
    for (k, v) in &row.metrics {
        body.push_str(&format!("{k}: {v}\n"));
    }
    Ok((body, row.metrics_csv(), 0))
}

fn run_majorization(
    cfg: &ExperimentConfig,
    grid: &Grid,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let l = grid.period();
    let h = grid.spacing();
    let ladder = match &cfg.hardy {
        Some(dto) if dto.ladder.is_some() => dto.build(grid)?.ladder,
        _ => TLadder::uniform(h / 4.0, 64, l).context("invalid config: ladder")?,
    };
    let t1 = ladder.levels()[0];
    let q = cfg.q.unwrap_or(1.0);
    let a = cfg.a.unwrap_or(0.0);
    let t = cfg.t.unwrap_or(8.0 * t1);
    let f = centered_gaussian(grid, l / 16.0);
    let v = HarmonicVector::from_boundary(&f, &ladder)?;
    let report = majorization_check(&v, q, a, t)?;
    row.push("q", q);
    row.push("a", a);
    row.push("t", t);
    row.push("violation", report.violation);
    row.push("scale", report.scale);
    row.push("relative", report.relative);
    let mut body = format!("experiment: {}\n", cfg.kind.id());
    for (k, v) in &row.metrics {
        body.push_str(&format!("{k}: {v}\n"));
    }
    Ok((body, row.metrics_csv(), 0))
}

fn run_mo_indices(cfg: &ExperimentConfig, row: &mut ReportRow) -> anyhow::Result<KindOutput> {
    let omega = cfg
        .omega
        .as_ref()
        .ok_or_else(|| anyhow!("invalid config: mo-indices needs an omega section"))?
        .build()?;
    let indices = mo_indices(&omega)?;
    row.push("lower_zero", indices.lower_zero);
    row.push("upper_zero", indices.upper_zero);
    row.push("lower_inf", indices.lower_inf);
    row.push("upper_inf", indices.upper_inf);
    let mut body = format!("experiment: {}\n", cfg.kind.id());
    for (k, v) in &row.metrics {
        body.push_str(&format!("{k}: {v}\n"));
    }
    Ok((body, row.metrics_csv(), 0))
}

fn run_range_check(
    cfg: &ExperimentConfig,
    grid: &Grid,
    override_hypothesis: bool,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let space = cfg
        .space
        .as_ref()
        .ok_or_else(|| anyhow!("invalid config: range-check needs a space section"))?
        .build(grid)?;
    let validity = range_validator(&space, cfg.order, grid.dim())?;
    let mut body = format!(
        "experiment: {}\nspace: {}\norder: {}\ndim: {}\n",
        cfg.kind.id(),
        space.label(),
        validity.order,
        validity.dim
    );
    hypothesis_lines(&mut body, &validity);
    row.push("hypothesis_valid", if validity.valid { 1.0 } else { 0.0 });
    let mut csv = String::from("hypothesis,holds,margin\n");
    for check in &validity.checks {
        csv.push_str(&format!(
            "{},{},{}\n",
            csv_field(&check.description),
            check.holds,
            check.margin
        ));
    }
    let exit = if validity.valid || override_hypothesis { 0 } else { 2 };
    Ok((body, csv, exit))
}

fn run_probes(
    cfg: &ExperimentConfig,
    grid: &Grid,
    seed: u64,
    row: &mut ReportRow,
) -> anyhow::Result<KindOutput> {
    let knobs = cfg.probe.as_ref();
    let theta = knobs.and_then(|p| p.theta).unwrap_or(0.75);
    let s = knobs.and_then(|p| p.s).unwrap_or(2.0);
    let count = knobs.and_then(|p| p.count).unwrap_or(4);
    let epsilons = knobs
        .and_then(|p| p.epsilon.clone())
        .unwrap_or_else(|| vec![0.3, 0.6]);
    let space = match &cfg.space {
        Some(sc) => sc.build(grid)?,
        None => SpaceSpec::Lebesgue { p: 1.0 },
    };
    let radii = RadiusSet::default_for(grid);

    let family = crate::config::FamilyConfig {
        kind: crate::config::FamilyKindConfig::DilatedGaussians,
        count,
    }
    .build(seed, grid)?;
    let params = AssumptionParams::new(theta, s).context("invalid config: probe exponents")?;
    let fs = fs_vector_probe(family.members(), &params, &space, &radii)?;
    row.push("fs_lhs", fs.lhs);
    row.push("fs_rhs", fs.rhs);
    row.push("fs_ratio", fs.ratio);

    if grid.period() <= 2.0 {
        bail!("invalid config: probes need period > 2 so the unit ball fits");
    }
    let first_eps = *epsilons
        .first()
        .ok_or_else(|| anyhow!("invalid config: empty epsilon list"))?;
    let weight = Weight::muckenhoupt(grid, first_eps, &radii)?;
    let center = grid.center_index();
    let off = (center + grid.total_points() / 4) % grid.total_points();
    let mut samples = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        samples.push((center, t));
        samples.push((off, t));
    }
    let bp = bp_condition_probe(&weight, 1.0, &samples)?;
    row.push("bp_max_ratio", bp.max_ratio);

    for &eps in &epsilons {
        let w = Weight::muckenhoupt(grid, eps, &radii)?;
        row.push(&format!("doubling_constant[{eps}]"), w.doubling_probe(&radii));
    }

    let mut body = format!(
        "experiment: {}\nspace: {}\ntheta: {theta}\ns: {s}\n",
        cfg.kind.id(),
        space.label()
    );
    for (k, v) in &row.metrics {
        body.push_str(&format!("{k}: {v}\n"));
    }
    Ok((body, row.metrics_csv(), 0))
}
