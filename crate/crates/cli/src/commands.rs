use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use lrmipt::experiment::{
    load_run, read_table, simulate as run_plan, write_table, ExperimentPlan, Grid, RunStatus, Table,
};
use lrmipt::heff::{centered_block, heff_ground_state, renyi2_from_state, HeffSpec};
use lrmipt::observables::{mean, Observable};
use lrmipt::scaling::{
    bootstrap_exponents, cells_to_points, crossing_exponent, expected_crossings, fit_collapse,
    fit_power_law, BootstrapOptions, Collapse, CollapseForm, DataPoint, InitGrid, RawCell,
    DY_FLOOR,
};
use lrmipt::Error;

use crate::Common;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
    Partial(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Partial(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Runtime(m) | Failure::Partial(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Parse(_) | Error::Domain(_) | Error::Csv { .. } => {
                Failure::Validation(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn warn(msg: impl AsRef<str>) {
    eprintln!("warning: {}", msg.as_ref());
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

/// Relative input paths are taken from the config file's directory.
fn resolve(config: &Path, input: &Path) -> PathBuf {
    if input.is_absolute() {
        input.to_path_buf()
    } else {
        config.parent().unwrap_or(Path::new(".")).join(input)
    }
}

fn out_dir(args: &Common, from_config: Option<&PathBuf>) -> Result<PathBuf, Failure> {
    let dir = args
        .out
        .clone()
        .or_else(|| from_config.cloned())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn set_workers(flag: Option<usize>, from_config: Option<usize>) -> Outcome {
    if let Some(n) = flag.or(from_config) {
        if n == 0 {
            return Err(Failure::Validation("workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

pub fn simulate(args: &Common) -> Outcome {
    let mut plan: ExperimentPlan = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        plan.seed = seed;
    }
    plan.validate()?;
    set_workers(args.workers, plan.workers)?;
    let dir = out_dir(args, plan.out.as_ref())?;
    let report = run_plan(&plan, &dir, env!("LRMIPT_BUILD"))?;
    let m = &report.manifest;
    eprintln!(
        "{} cells in {:.1} s -> {}",
        m.cells.len(),
        m.wall_time_s,
        dir.display()
    );
    if m.status == RunStatus::Incomplete {
        for f in &m.failures {
            warn(format!("{}: {}", f.file, f.error));
        }
        return Err(Failure::Partial(format!(
            "{} of {} cells failed; manifest marked incomplete",
            m.failures.len(),
            m.cells.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollapseConfig {
    form: CollapseForm,
    /// A `simulate` output directory or a summary CSV with columns
    /// `L, p, [t,] y[, dy]`.
    input: PathBuf,
    alpha: Option<f64>,
    init_grid: Option<InitGrid>,
    #[serde(default)]
    n_boot: usize,
    subsample: Option<usize>,
    #[serde(default)]
    seed: u64,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

fn observable_for(form: CollapseForm) -> Observable {
    match form {
        CollapseForm::TauP => Observable::PurificationTime,
        CollapseForm::Iab => Observable::MutualInformation,
        CollapseForm::GlobalS => Observable::GlobalEntropy,
    }
}

/// Raw cells of `observable` from a run directory, restricted to a single `α`.
fn run_cells(dir: &Path, observable: Observable, alpha: Option<f64>) -> Result<Vec<RawCell>, Failure> {
    let (_, cells) = load_run(dir)?;
    let picked: Vec<_> = cells
        .into_iter()
        .filter(|(c, _)| c.observable == observable && alpha.is_none_or(|a| c.config.alpha == a))
        .collect();
    let mut alphas: Vec<f64> = picked.iter().map(|(c, _)| c.config.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    match alphas.len() {
        0 => Err(Failure::Validation(format!(
            "{} holds no {} cells{}",
            dir.display(),
            observable.tag(),
            alpha.map(|a| format!(" at alpha = {a}")).unwrap_or_default()
        ))),
        1 => Ok(picked.into_iter().map(|(_, r)| r).collect()),
        _ => Err(Failure::Validation(format!(
            "{} holds several alpha values {alphas:?}; set alpha in the config",
            dir.display()
        ))),
    }
}

fn need(table: &Table, path: &Path, name: &str) -> Result<usize, Failure> {
    table
        .column(name)
        .ok_or_else(|| Failure::Validation(format!("{}:1: missing column {name:?}", path.display())))
}

fn summary_points(path: &Path, form: CollapseForm) -> Result<Vec<DataPoint>, Failure> {
    let table = read_table(path)?;
    let (l, p, y) = (need(&table, path, "L")?, need(&table, path, "p")?, need(&table, path, "y")?);
    let t = if form == CollapseForm::GlobalS {
        Some(need(&table, path, "t")?)
    } else {
        None
    };
    let dy = table.column("dy");
    if dy.is_none() {
        warn(format!(
            "{} has no dy column; using sqrt(|y|) as the error bar",
            path.display()
        ));
    }
    table
        .rows
        .iter()
        .map(|(line, r)| {
            if r[l] < 1.0 || r[l].fract() != 0.0 {
                return Err(Failure::Validation(format!(
                    "{}:{line}: L = {} is not a positive integer",
                    path.display(),
                    r[l]
                )));
            }
            let err = dy.map_or_else(|| r[y].abs().sqrt(), |k| r[k]).max(DY_FLOOR);
            let mut pt = DataPoint::new(r[l] as usize, r[p], r[y], err);
            pt.t = t.map(|k| r[k]);
            Ok(pt)
        })
        .collect()
}

pub fn collapse(args: &Common) -> Outcome {
    let cfg: CollapseConfig = read_config(&args.config)?;
    set_workers(args.workers, cfg.workers)?;
    let input = resolve(&args.config, &cfg.input);
    let grid = cfg.init_grid.clone().unwrap_or_default();
    let (points, fit) = if input.is_dir() {
        let cells = run_cells(&input, observable_for(cfg.form), cfg.alpha)?;
        let (points, excluded) = cells_to_points(&cells, cfg.form)?;
        if excluded > 0 {
            warn(format!("{excluded} cells left out: median purification time is censored"));
        }
        let fit = if cfg.n_boot > 0 {
            let opts = BootstrapOptions {
                n_boot: cfg.n_boot,
                subsample: cfg.subsample,
                seed: args.seed.unwrap_or(cfg.seed),
            };
            bootstrap_exponents(&cells, cfg.form, &grid, &opts)?
        } else {
            fit_collapse(&points, cfg.form, &grid)?
        };
        (points, fit)
    } else {
        if cfg.n_boot > 0 {
            warn("bootstrap needs raw samples; a summary CSV gets a point fit only");
        }
        let points = summary_points(&input, cfg.form)?;
        let fit = fit_collapse(&points, cfg.form, &grid)?;
        (points, fit)
    };
    if fit.flagged {
        warn("fit flagged: see converged / dropped in the fit record");
    }
    let dir = out_dir(args, cfg.out.as_ref())?;
    write_json(&dir.join("collapse_fit.json"), &fit)?;
    let rescaled = Collapse::new(&points, cfg.form)?.rescale(fit.params());
    let rows: Vec<Vec<f64>> = rescaled
        .iter()
        .map(|r| vec![r.l as f64, r.x, r.y, r.dy, r.slice.map_or(0.0, |s| s as f64)])
        .collect();
    write_table(
        &dir.join("collapse_rescaled.csv"),
        &[("L", "sites"), ("x", "-"), ("Y", "-"), ("dY", "-"), ("slice", "index")],
        &rows,
    )?;
    eprintln!(
        "{}: p_c = {:.4}, nu = {:.3}, exponent = {:.3}, quality = {:.3}",
        cfg.form.tag(),
        fit.p_c,
        fit.nu,
        fit.exponent,
        fit.quality
    );
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerfitConfig {
    /// A `simulate` output directory or a CSV with columns `L, y`.
    input: PathBuf,
    #[serde(default)]
    l_min: f64,
    alpha: Option<f64>,
    p: Option<f64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

pub fn powerfit(args: &Common) -> Outcome {
    let cfg: PowerfitConfig = read_config(&args.config)?;
    set_workers(args.workers, cfg.workers)?;
    let input = resolve(&args.config, &cfg.input);
    let points: Vec<(f64, f64)> = if input.is_dir() {
        let (_, cells) = load_run(&input)?;
        let picked: Vec<_> = cells
            .into_iter()
            .filter(|(c, _)| {
                c.observable == Observable::HalfChain
                    && cfg.alpha.is_none_or(|a| c.config.alpha == a)
                    && cfg.p.is_none_or(|p| c.config.p == p)
            })
            .collect();
        let mut keys: Vec<(u64, u64)> = picked
            .iter()
            .map(|(c, _)| (c.config.alpha.to_bits(), c.config.p.to_bits()))
            .collect();
        keys.sort();
        keys.dedup();
        if keys.len() != 1 {
            return Err(Failure::Validation(format!(
                "need half-chain cells at exactly one (alpha, p), found {}; set alpha and p",
                keys.len()
            )));
        }
        picked
            .iter()
            .filter_map(|(c, r)| match &r.samples {
                lrmipt::observables::Samples::Scalar(v) if !v.is_empty() => {
                    Some((c.config.l as f64, mean(v)))
                }
                _ => None,
            })
            .collect()
    } else {
        let table = read_table(&input)?;
        let (l, y) = (need(&table, &input, "L")?, need(&table, &input, "y")?);
        table.rows.iter().map(|(_, r)| (r[l], r[y])).collect()
    };
    let fit = fit_power_law(&points, cfg.l_min)?;
    let dir = out_dir(args, cfg.out.as_ref())?;
    write_json(&dir.join("powerfit.json"), &fit)?;
    let rows: Vec<Vec<f64>> = points.iter().map(|&(l, y)| vec![l, y, fit.eval(l)]).collect();
    write_table(
        &dir.join("powerfit.csv"),
        &[("L", "sites"), ("y", "bits"), ("fit", "bits")],
        &rows,
    )?;
    eprintln!("mu = {:.4}, A = {:.4} over {} sizes", fit.mu, fit.amplitude, fit.points);
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossingsConfig {
    #[serde(rename = "L")]
    l: Grid<usize>,
    alpha: Grid<f64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

pub fn crossings(args: &Common) -> Outcome {
    let cfg: CrossingsConfig = read_config(&args.config)?;
    set_workers(args.workers, cfg.workers)?;
    let sizes = cfg.l.values()?;
    let alphas = cfg.alpha.values()?;
    let mut bad: Vec<String> = sizes.iter().filter(|&&l| l < 4).map(|l| format!("L = {l}")).collect();
    bad.extend(alphas.iter().filter(|a| !(**a >= 0.0)).map(|a| format!("alpha = {a}")));
    if sizes.len() < 2 {
        bad.push("need at least two sizes".into());
    }
    if !bad.is_empty() {
        return Err(Failure::Validation(format!("invalid values: {}", bad.join(", "))));
    }
    let mut counts = Vec::new();
    let mut exps = Vec::new();
    for &a in &alphas {
        for &l in &sizes {
            counts.push(vec![a, l as f64, expected_crossings(l, a, l / 2)]);
        }
        let fit = crossing_exponent(&sizes, a)?;
        exps.push(vec![a, fit.mu, (2.0 - a).max(0.0)]);
    }
    let dir = out_dir(args, cfg.out.as_ref())?;
    write_table(
        &dir.join("crossings.csv"),
        &[("alpha", "-"), ("L", "sites"), ("crossings", "gates per step")],
        &counts,
    )?;
    write_table(
        &dir.join("crossing_exponents.csv"),
        &[("alpha", "-"), ("exponent", "-"), ("reference", "max(2-alpha,0)")],
        &exps,
    )?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeffScanConfig {
    #[serde(rename = "L")]
    l: usize,
    alpha: f64,
    #[serde(rename = "J", default = "unit")]
    j: f64,
    gamma_over_j: Grid<f64>,
    max_size: Option<usize>,
    out: Option<PathBuf>,
    workers: Option<usize>,
}

fn unit() -> f64 {
    1.0
}

pub fn heff_scan(args: &Common) -> Outcome {
    let cfg: HeffScanConfig = read_config(&args.config)?;
    set_workers(args.workers, cfg.workers)?;
    let ratios = cfg.gamma_over_j.values()?;
    let max_size = cfg.max_size.unwrap_or(cfg.l / 2);
    let mut rows = Vec::new();
    let mut undefined = 0;
    for &g in &ratios {
        let spec = HeffSpec::new(cfg.l, cfg.j, g * cfg.j, cfg.alpha)?;
        let gs = heff_ground_state(&spec)?;
        for size in 0..=max_size.min(cfg.l) {
            let region = centered_block(cfg.l, size);
            let s = match renyi2_from_state(&gs.vector, cfg.l, &region) {
                Ok(s) => s,
                Err(e @ (Error::Domain(_) | Error::DegenerateOverlap(_))) => {
                    warn(format!("Gamma/J = {g}, |A| = {size}: {e}"));
                    undefined += 1;
                    f64::NAN
                }
                Err(e) => return Err(e.into()),
            };
            rows.push(vec![g, size as f64, s]);
        }
    }
    let dir = out_dir(args, cfg.out.as_ref())?;
    write_table(
        &dir.join("heff_scan.csv"),
        &[("gamma_over_j", "-"), ("size", "sites"), ("s2", "nats")],
        &rows,
    )?;
    if undefined > 0 {
        warn(format!("{undefined} entries undefined (non-positive matrix element) written as NaN"));
    }
    Ok(())
}
