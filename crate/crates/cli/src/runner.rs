//! Command implementations. Every runner returns the artifact text plus a
//! one-line summary; errors carry the exit-code class.

use std::fmt::Write as _;
use std::path::Path;

use entroscope::cover::{
    cover_entropy_grid, CoverError, EstimateParams,
};
use entroscope::dim::{dim_entropy, CriticalExponent, DimError};
use entroscope::fractal::{bridge_check, hausdorff_dimension, CircleSet, FractalError};
use entroscope::lowering::{
    diagonal_experiment, lower, LoweringError, LoweringRequest, ProductExperiment,
};
use entroscope::symbolic::count::CountError;
use entroscope::symbolic::json::{self, JsonError};
use entroscope::symbolic::{DigitSetSchedule, MetricParams, SubshiftSpec};
use entroscope::tower::{
    h_star_profile, sample_centers, tower_local_entropy_at, TowerError, TowerEstimateParams,
    TowerSystem,
};
use entroscope::rng::SplitMix64;
use entroscope::cover::CoverSpec;

use crate::output::{fmt_f64, CsvBuilder, Format};

/// Failure classes map onto the exit-code contract: config errors exit 2,
/// inconclusive computations exit 3 (with partial results written), and
/// internal limits exit 4.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Inconclusive { partial: String, message: String },
    Limit(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Inconclusive { .. } => 3,
            RunError::Limit(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            RunError::Config(m) => format!("config error: {m}"),
            RunError::Inconclusive { message, .. } => format!("inconclusive: {message}"),
            RunError::Limit(m) => format!("internal limit: {m}"),
        }
    }
}

impl From<JsonError> for RunError {
    fn from(e: JsonError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<CoverError> for RunError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::DepthOverflow(_) | CoverError::CoverTooLarge(_) => {
                RunError::Limit(e.to_string())
            }
            CoverError::Count(CountError::WindowTooLong(_)) => RunError::Limit(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<DimError> for RunError {
    fn from(e: DimError) -> Self {
        match &e {
            DimError::Inconclusive {
                lower,
                upper,
                iterations,
            } => RunError::Inconclusive {
                partial: format!(
                    "{{\"bracket\": [{}, {}], \"iterations\": {}}}\n",
                    fmt_f64(*lower),
                    fmt_f64(*upper),
                    iterations
                ),
                message: e.to_string(),
            },
            DimError::DepthCapTooSmall { .. } | DimError::TooManyElements(_) => {
                RunError::Limit(e.to_string())
            }
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<FractalError> for RunError {
    fn from(e: FractalError) -> Self {
        match e {
            FractalError::Dim(d) => d.into(),
            FractalError::ScaleUnderflow(_) | FractalError::TooManyArcs(_) => {
                RunError::Limit(e.to_string())
            }
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<LoweringError> for RunError {
    fn from(e: LoweringError) -> Self {
        match e {
            LoweringError::ToleranceUnachievable { .. } => RunError::Limit(e.to_string()),
            LoweringError::Dim(d) => d.into(),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<TowerError> for RunError {
    fn from(e: TowerError) -> Self {
        match e {
            TowerError::AlphabetOverflow(_) => RunError::Limit(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

pub struct Artifact {
    pub contents: String,
    pub summary: String,
}

fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<SubshiftSpec, RunError> {
    Ok(json::parse_system(&read(path)?)?)
}

fn load_schedule(path: &Path, alphabet: usize) -> Result<DigitSetSchedule, RunError> {
    let sched = json::parse_schedule(&read(path)?)?;
    if sched.alphabet_size() > alphabet {
        return Err(RunError::Config(format!(
            "schedule uses symbols up to {} but the system alphabet is {alphabet}",
            sched.alphabet_size()
        )));
    }
    Ok(json::widen_alphabet(&sched, alphabet).map_err(JsonError::from)?)
}

pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, RunError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| RunError::Config(format!("bad eps '{s}': {e}")))
        })
        .collect()
}

// -------------------------------------------------------------------------
// entropy
// -------------------------------------------------------------------------

pub fn run_entropy(
    system: &Path,
    subset: Option<&Path>,
    nmax: usize,
    eps: &str,
    format: Format,
) -> Result<Artifact, RunError> {
    let shift = load_system(system)?;
    let sched = match subset {
        Some(p) => load_schedule(p, shift.alphabet_size())?,
        None => DigitSetSchedule::free(shift.alphabet_size()),
    };
    let params = EstimateParams {
        n_max: nmax,
        eps_list: parse_eps_list(eps)?,
        metric: MetricParams::default(),
    };
    let grid = cover_entropy_grid(&shift, &sched, &params)?;
    let contents = match format {
        Format::Csv => {
            let mut csv =
                CsvBuilder::new(&["n", "eps", "s_n", "r_n", "N_lower", "N_upper", "slope_nats"]);
            for row in &grid.rows {
                csv.row(&[
                    row.n.to_string(),
                    fmt_f64(row.eps),
                    row.s_n.to_string(),
                    row.r_n.to_string(),
                    row.n_lower.to_string(),
                    row.n_upper.to_string(),
                    fmt_f64(row.slope),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let mut s = String::from("{\n  \"rows\": [\n");
            for (i, row) in grid.rows.iter().enumerate() {
                let _ = write!(
                    s,
                    "    {{\"n\": {}, \"eps\": {}, \"s_n\": \"{}\", \"slope_nats\": {}}}{}\n",
                    row.n,
                    fmt_f64(row.eps),
                    row.s_n,
                    fmt_f64(row.slope),
                    if i + 1 == grid.rows.len() { "" } else { "," }
                );
            }
            let _ = write!(
                s,
                "  ],\n  \"estimate_nats\": {},\n  \"residual\": {},\n  \"non_convergent\": {}\n}}\n",
                fmt_f64(grid.estimate.value),
                fmt_f64(grid.estimate.residual),
                grid.estimate.non_convergent
            );
            s
        }
    };
    let summary = format!(
        "entropy estimate {} nats (residual {}){}",
        fmt_f64(grid.estimate.value),
        fmt_f64(grid.estimate.residual),
        if grid.estimate.non_convergent {
            " NON-CONVERGENT"
        } else {
            ""
        }
    );
    Ok(Artifact { contents, summary })
}

// -------------------------------------------------------------------------
// dim-entropy
// -------------------------------------------------------------------------

fn dim_json(ce: &CriticalExponent) -> String {
    format!(
        "{{\"lower_nats\": {}, \"upper_nats\": {}, \"iterations\": {}}}\n",
        fmt_f64(ce.lower),
        fmt_f64(ce.upper),
        ce.iterations
    )
}

pub fn run_dim_entropy(
    system: &Path,
    subset: Option<&Path>,
    tol: f64,
    depth_cap: usize,
    format: Format,
) -> Result<Artifact, RunError> {
    let shift = load_system(system)?;
    let sched = match subset {
        Some(p) => load_schedule(p, shift.alphabet_size())?,
        None => DigitSetSchedule::free(shift.alphabet_size()),
    };
    if !(tol >= 1e-8) {
        return Err(RunError::Config(format!("tol must be >= 1e-8, got {tol}")));
    }
    let cover = CoverSpec::word_partition(1);
    let ce = dim_entropy(&shift, &sched, &cover, tol, depth_cap)?;
    let contents = match format {
        Format::Json => dim_json(&ce),
        Format::Csv => {
            let mut csv = CsvBuilder::new(&["lower_nats", "upper_nats", "iterations"]);
            csv.row(&[
                fmt_f64(ce.lower),
                fmt_f64(ce.upper),
                ce.iterations.to_string(),
            ]);
            csv.finish()
        }
    };
    let summary = format!(
        "dimensional entropy in [{}, {}] nats",
        fmt_f64(ce.lower),
        fmt_f64(ce.upper)
    );
    Ok(Artifact { contents, summary })
}

// -------------------------------------------------------------------------
// hausdorff / bridge
// -------------------------------------------------------------------------

pub fn parse_digits(text: &str) -> Result<Vec<u8>, RunError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u8>()
                .map_err(|e| RunError::Config(format!("bad digit '{s}': {e}")))
        })
        .collect()
}

pub fn run_hausdorff(base: usize, digits: &str, tol: f64) -> Result<Artifact, RunError> {
    let set = CircleSet::from_digits(base, &parse_digits(digits)?)?;
    let est = hausdorff_dimension(&set, tol)?;
    let contents = format!(
        "{{\"dimension\": {}, \"method\": \"moran-closed-form\", \"residual\": {}}}\n",
        fmt_f64(est.value),
        fmt_f64(est.residual)
    );
    let summary = format!("hausdorff dimension {}", fmt_f64(est.value));
    Ok(Artifact { contents, summary })
}

pub fn run_bridge(
    base: usize,
    digits: Option<&str>,
    schedule: Option<&Path>,
    tol: f64,
) -> Result<Artifact, RunError> {
    let set = match (digits, schedule) {
        (Some(d), None) => CircleSet::from_digits(base, &parse_digits(d)?)?,
        (None, Some(p)) => {
            let sched = load_schedule(p, base)?;
            CircleSet::new(sched, base)?
        }
        _ => {
            return Err(RunError::Config(
                "bridge needs exactly one of --digits or --schedule".into(),
            ))
        }
    };
    let report = bridge_check(&set, tol)?;
    let contents = format!(
        "{{\"hausdorff\": {}, \"dim_entropy_over_log_base\": {}, \"gap\": {}, \"pass\": {}}}\n",
        fmt_f64(report.hausdorff),
        fmt_f64(report.dim_entropy_over_log_base),
        fmt_f64(report.gap),
        report.pass
    );
    let summary = format!(
        "bridge gap {} ({})",
        fmt_f64(report.gap),
        if report.pass { "pass" } else { "FAIL" }
    );
    Ok(Artifact { contents, summary })
}

// -------------------------------------------------------------------------
// lower
// -------------------------------------------------------------------------

pub fn run_lower(
    system: &Path,
    within: Option<&Path>,
    target: f64,
    tol: f64,
    emit_path: Option<&Path>,
) -> Result<Artifact, RunError> {
    let shift = load_system(system)?;
    let within_sched = match within {
        Some(p) => Some(load_schedule(p, shift.alphabet_size())?),
        None => None,
    };
    let request = LoweringRequest {
        ambient: shift.clone(),
        within: within_sched,
        target_h: target,
        tol,
    };
    let sched = lower(&request)?;
    let achieved = entroscope::dim::schedule_entropy_exact(&shift, &sched)
        .map_err(RunError::from)?;
    let json_text = json::schedule_to_json(&sched);
    if let Some(path) = emit_path {
        crate::output::write_atomic(path, &format!("{json_text}\n"))?;
    }
    let contents = format!(
        "{{\"achieved_nats\": {}, \"target_nats\": {}, \"period\": {}}}\n",
        fmt_f64(achieved),
        fmt_f64(target),
        sched.period_len()
    );
    let summary = format!(
        "lowering achieved {} nats (target {}, period {})",
        fmt_f64(achieved),
        fmt_f64(target),
        sched.period_len()
    );
    Ok(Artifact { contents, summary })
}

// -------------------------------------------------------------------------
// diagonal
// -------------------------------------------------------------------------

pub fn run_diagonal(base: &Path, factors: usize, nmax: usize) -> Result<Artifact, RunError> {
    let shift = load_system(base)?;
    let exp = ProductExperiment::new(shift, factors)?;
    let report = diagonal_experiment(&exp, nmax)?;
    let mut csv = CsvBuilder::new(&[
        "factors",
        "estimate_nats",
        "lower_bound",
        "upper_bound",
        "lower_ok",
        "upper_ok",
    ]);
    for row in &report.rows {
        csv.row(&[
            row.factors.to_string(),
            fmt_f64(row.estimate.value),
            fmt_f64(row.lower_bound),
            fmt_f64(row.upper_bound),
            row.lower_ok.to_string(),
            row.upper_ok.to_string(),
        ]);
    }
    let all_ok = report.rows.iter().all(|r| r.lower_ok && r.upper_ok);
    let summary = format!(
        "diagonal estimates for N=1..{} (base entropy {}): bounds {}",
        factors,
        fmt_f64(report.base_entropy),
        if all_ok { "hold" } else { "VIOLATED" }
    );
    Ok(Artifact {
        contents: csv.finish(),
        summary,
    })
}

// -------------------------------------------------------------------------
// tower / hstar
// -------------------------------------------------------------------------

fn build_tower(n: usize, base_alphabet: Option<usize>) -> Result<TowerSystem, RunError> {
    match base_alphabet {
        Some(m) => Ok(TowerSystem::build(n, SubshiftSpec::full_shift(m))?),
        None => Ok(TowerSystem::standard(n)?),
    }
}

pub fn run_tower(
    n: usize,
    base_alphabet: Option<usize>,
    centers: usize,
    eps: &str,
    seed: u64,
) -> Result<Artifact, RunError> {
    let tower = build_tower(n, base_alphabet)?;
    let eps_list = if eps == "auto" {
        vec![tower.eps_n, tower.eps_n / 2.0, tower.eps_n / 10.0]
    } else {
        parse_eps_list(eps)?
    };
    let mut rng = SplitMix64::new(seed);
    let points = sample_centers(&tower, centers.max(1), &mut rng);
    let params = TowerEstimateParams::default();
    let mut csv = CsvBuilder::new(&["eps", "center_id", "piece", "estimate_nats", "exact_lower"]);
    let mut floor_ok = true;
    for &e in &eps_list {
        for (ci, point) in points.iter().enumerate() {
            let est = tower_local_entropy_at(&tower, point, e, &params);
            if (e - tower.eps_n).abs() < 1e-12 && ci == 0 {
                floor_ok &= est.estimate.value >= 2.0f64.ln() - 0.1;
            }
            csv.row(&[
                fmt_f64(e),
                ci.to_string(),
                point.piece.to_string(),
                fmt_f64(est.estimate.value),
                fmt_f64(est.exact_lower),
            ]);
        }
    }
    let summary = format!(
        "tower n={} eps_n={}: log2 floor {}",
        n,
        fmt_f64(tower.eps_n),
        if floor_ok { "holds" } else { "VIOLATED" }
    );
    Ok(Artifact {
        contents: csv.finish(),
        summary,
    })
}

pub fn run_hstar(
    n_max: usize,
    centers: usize,
    eps: &str,
    seed: u64,
) -> Result<Artifact, RunError> {
    let towers: Vec<TowerSystem> = (1..=n_max)
        .map(|n| TowerSystem::standard(n))
        .collect::<Result<_, _>>()?;
    let eps_list = if eps == "auto" {
        let mut list: Vec<f64> = towers.iter().map(|t| t.eps_n).collect();
        list.push(towers[0].eps_n / 10.0);
        list
    } else {
        parse_eps_list(eps)?
    };
    let profile = h_star_profile(
        &towers,
        &eps_list,
        centers,
        seed,
        &TowerEstimateParams::default(),
    );
    let mut csv = CsvBuilder::new(&[
        "eps",
        "sup_estimate_nats",
        "argmax_tower",
        "argmax_center",
        "fixed_center_estimate",
    ]);
    for (pe, trace) in profile.per_eps.iter().zip(profile.fixed_center_trace.iter()) {
        csv.row(&[
            fmt_f64(pe.eps),
            fmt_f64(pe.sup_estimate),
            pe.argmax.0.to_string(),
            pe.argmax.1.to_string(),
            fmt_f64(trace.1),
        ]);
    }
    let sup_at_coarsest = profile
        .per_eps
        .first()
        .map(|p| p.sup_estimate)
        .unwrap_or(0.0);
    let summary = format!(
        "h* profile over {} scales, sup at coarsest {}",
        profile.eps_values.len(),
        fmt_f64(sup_at_coarsest)
    );
    Ok(Artifact {
        contents: csv.finish(),
        summary,
    })
}
