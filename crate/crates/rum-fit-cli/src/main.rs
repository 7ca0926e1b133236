//! Command-line driver: `ingest`, `fit`, `lower-bound`, `eval`, `crossval`
//! and `wfhs-solve` subcommands over the library pipeline.
//!
//! Settings resolve flag-over-config-over-default: every subcommand accepts
//! `--config <file>` pointing at a flat `key = value` manifest whose keys
//! mirror the long flag names; explicit flags win. All randomness flows from
//! one `--seed`. Exit codes: 0 success, 2 input error, 3 solver failure.

use clap::{Parser, Subcommand, ValueEnum};
use rum_fit::error::Error;
use rum_fit::eval::{cross_validate, error_cdf, CvConfig, CvModel};
use rum_fit::fit::{fit_rum, FitConfig, FitReport, OracleKind, WeightMode};
use rum_fit::ingest::{
    augment_winner_slates, empirical_distributions, expand_full_rankings, expand_partial_orders,
    parse_ballots_file, parse_rankings_file, parse_slates_file, ChoiceDataset,
};
use rum_fit::lp::RestrictedLp;
use rum_fit::mnl::MnlModel;
use rum_fit::model::{l1_distance, Rum, WinnerTable};
use rum_fit::wfhs::{
    wfhs_brute_force, wfhs_exact_detailed, wfhs_local_search_detailed, LocalSearchParams,
    WfhsInstance, DEFAULT_EXACT_LIMIT,
};
use serde_json::json;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "rum-fit",
    version,
    about = "Fit random utility models to k-slate winner distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw dataset and write the canonical observation file.
    Ingest(IngestArgs),
    /// Fit a RUM to a canonical dataset by column generation.
    Fit(FitArgs),
    /// Recompute the dual lower-bound certificate for a saved RUM.
    LowerBound(LowerBoundArgs),
    /// Score a saved RUM (and optionally an MNL model) against a dataset.
    Eval(EvalArgs),
    /// k-fold cross-validated RMSE of a predictor.
    Crossval(CrossvalArgs),
    /// Solve a WFHS instance file directly.
    WfhsSolve(WfhsSolveArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum DataFormat {
    Rankings,
    Ballots,
    Slates,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OracleArg {
    Exact,
    Local,
}

impl From<OracleArg> for OracleKind {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Exact => OracleKind::Exact,
            OracleArg::Local => OracleKind::LocalSearch,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum WeightArg {
    Signed,
    Shifted,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModelArg {
    Rum,
    Mnl,
    TrainTensor,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum MethodArg {
    Exact,
    Local,
    Brute,
}

#[derive(Parser)]
struct IngestArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw input file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<DataFormat>,
    /// Slate size of the produced observations.
    #[arg(long)]
    k: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Canonical dataset file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    oracle: Option<OracleArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Local-search restarts per oracle call.
    #[arg(long)]
    t: Option<u32>,
    #[arg(long = "t-prime")]
    t_prime: Option<u32>,
    #[arg(long = "stall-window")]
    stall_window: Option<usize>,
    #[arg(long = "stall-epsilon")]
    stall_epsilon: Option<f64>,
    #[arg(long = "weight-mode", value_enum)]
    weight_mode: Option<WeightArg>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "exact-limit")]
    exact_limit: Option<usize>,
    /// Write the final restricted LP in free-MPS form to this path.
    #[arg(long = "dump-lp")]
    dump_lp: Option<PathBuf>,
}

#[derive(Parser)]
struct LowerBoundArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// RUM file whose support restricts the LP.
    #[arg(long)]
    rum: Option<PathBuf>,
    #[arg(long = "exact-limit")]
    exact_limit: Option<usize>,
}

#[derive(Parser)]
struct EvalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    rum: Option<PathBuf>,
    /// Optional MNL model file for a comparison column.
    #[arg(long)]
    mnl: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct CrossvalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long)]
    folds: Option<usize>,
    /// Number of repetition seeds (derived from --seed).
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long, value_enum)]
    oracle: Option<OracleArg>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long = "t-prime")]
    t_prime: Option<u32>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct WfhsSolveArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// WFHS instance file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long = "t-prime")]
    t_prime: Option<u32>,
    /// Early-return threshold of the local search (default +inf).
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "exact-limit")]
    exact_limit: Option<usize>,
}

/// Failure classified for the exit-code contract.
#[derive(Debug)]
enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Solver(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Solver(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Fit(a) => cmd_fit(a),
        Command::LowerBound(a) => cmd_lower_bound(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Crossval(a) => cmd_crossval(a),
        Command::WfhsSolve(a) => cmd_wfhs_solve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

/// Flat `key = value` manifest; `#` comments and blank lines ignored.
struct ConfigFile(HashMap<String, String>);

impl ConfigFile {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = read_file(path)?;
            for (idx, line) in text.lines().enumerate() {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                let (key, value) = t.split_once('=').ok_or_else(|| {
                    CliError::Input(format!(
                        "{}:{}: expected `key = value`, got `{t}`",
                        path.display(),
                        idx + 1
                    ))
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(ConfigFile(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("config key `{key}`: bad value `{raw}`"))),
        }
    }
}

/// flag > config > default.
fn resolve<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str, default: T) -> CliResult<T> {
    Ok(flag.or(cfg.get(key)?).unwrap_or(default))
}

fn resolve_required<T: FromStr>(flag: Option<T>, cfg: &ConfigFile, key: &str) -> CliResult<T> {
    flag.or(cfg.get(key)?)
        .ok_or_else(|| CliError::Input(format!("missing required setting `--{key}`")))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_dataset(path: &Path) -> CliResult<ChoiceDataset> {
    Ok(ChoiceDataset::from_canonical_text(&read_file(path)?)?)
}

fn load_table(path: &Path) -> CliResult<(ChoiceDataset, WinnerTable)> {
    let ds = load_dataset(path)?;
    let table = empirical_distributions(&ds)?;
    Ok((ds, table))
}

fn cmd_ingest(args: IngestArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data, &cfg, "data")?;
    let format = match args.format {
        Some(f) => f,
        None => match cfg.get::<String>("format")?.as_deref() {
            Some("rankings") => DataFormat::Rankings,
            Some("ballots") => DataFormat::Ballots,
            Some("slates") => DataFormat::Slates,
            Some(other) => return Err(CliError::Input(format!("unknown format `{other}`"))),
            None => {
                return Err(CliError::Input(
                    "missing required setting `--format`".into(),
                ))
            }
        },
    };
    let k: usize = resolve_required(args.k, &cfg, "k")?;
    let out: PathBuf = resolve(args.out, &cfg, "out", PathBuf::from("."))?;

    let text = read_file(&data)?;
    let (ds, remap): (ChoiceDataset, Option<Vec<u64>>) = match format {
        DataFormat::Rankings => {
            let parsed = parse_rankings_file(&text)?;
            (
                expand_full_rankings(&parsed.rankings, k)?,
                Some(parsed.remap),
            )
        }
        DataFormat::Ballots => {
            let parsed = parse_ballots_file(&text)?;
            (expand_partial_orders(&parsed.ballots, parsed.n, k)?, None)
        }
        DataFormat::Slates => {
            let parsed = parse_slates_file(&text)?;
            (
                augment_winner_slates(&parsed.records, k)?,
                Some(parsed.remap),
            )
        }
    };

    if ds.skipped_short() > 0 {
        eprintln!(
            "warning: {} record(s) shorter than k={k} contributed no observations",
            ds.skipped_short()
        );
    }
    let out_file = out.join("canonical.txt");
    write_file(&out_file, &ds.to_canonical_text())?;
    let distinct_slates = {
        let mut slates: Vec<_> = ds.observations().iter().map(|o| &o.slate).collect();
        slates.dedup();
        slates.len()
    };
    let summary = json!({
        "n": ds.n(),
        "k": ds.k(),
        "slates": distinct_slates,
        "observations": ds.total_count(),
        "distinct_observations": ds.observations().len(),
        "skipped_short": ds.skipped_short(),
        "remap": remap,
        "output": out_file.display().to_string(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("serializable")
    );
    Ok(())
}

fn fit_config_from(args: &FitArgs, cfg: &ConfigFile) -> CliResult<FitConfig> {
    let defaults = FitConfig::default();
    let oracle = match args.oracle {
        Some(o) => o.into(),
        None => match cfg.get::<String>("oracle")?.as_deref() {
            Some("exact") | None => OracleKind::Exact,
            Some("local") | Some("local-search") => OracleKind::LocalSearch,
            Some(other) => return Err(CliError::Input(format!("unknown oracle `{other}`"))),
        },
    };
    let weights = match args.weight_mode {
        Some(WeightArg::Signed) => WeightMode::Signed,
        Some(WeightArg::Shifted) => WeightMode::Shifted,
        None => match cfg.get::<String>("weight-mode")?.as_deref() {
            Some("shifted") => WeightMode::Shifted,
            Some("signed") | None => WeightMode::Signed,
            Some(other) => return Err(CliError::Input(format!("unknown weight mode `{other}`"))),
        },
    };
    Ok(FitConfig {
        oracle,
        t: resolve(args.t, cfg, "t", defaults.t)?,
        t_prime: resolve(args.t_prime, cfg, "t-prime", defaults.t_prime)?,
        max_iterations: resolve(args.max_iters, cfg, "max-iters", defaults.max_iterations)?,
        stall_window: resolve(
            args.stall_window,
            cfg,
            "stall-window",
            defaults.stall_window,
        )?,
        stall_epsilon: resolve(
            args.stall_epsilon,
            cfg,
            "stall-epsilon",
            defaults.stall_epsilon,
        )?,
        seed: resolve(args.seed, cfg, "seed", defaults.seed)?,
        weights,
        threads: resolve(args.threads, cfg, "threads", defaults.threads)?,
        exact_limit: resolve(args.exact_limit, cfg, "exact-limit", defaults.exact_limit)?,
    })
}

fn trace_csv(trace: &rum_fit::fit::FitTrace) -> String {
    let mut out = String::from("iteration,objective,dual_D,oracle_cost,seconds\n");
    for rec in &trace.iterations {
        let oracle = rec.oracle_cost.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            rec.iteration, rec.objective, rec.dual_d, oracle, rec.seconds
        );
    }
    out
}

fn report_json(
    report: &FitReport,
    table: &WinnerTable,
    fit_cfg: &FitConfig,
    rum_file: &str,
) -> String {
    let value = json!({
        "n": table.n(),
        "k": table.k(),
        "slate_count": table.len(),
        "support_size": report.support_size,
        "average_error": report.average_error,
        "lower_bound": report.lower_bound,
        "converged": report.converged,
        "iterations": report.iterations,
        "stop": report.stop.as_str(),
        "config": {
            "oracle": fit_cfg.oracle.as_str(),
            "t": fit_cfg.t,
            "t_prime": fit_cfg.t_prime,
            "max_iterations": fit_cfg.max_iterations,
            "stall_window": fit_cfg.stall_window,
            "stall_epsilon": fit_cfg.stall_epsilon,
            "seed": fit_cfg.seed,
            "weights": fit_cfg.weights.as_str(),
            "threads": fit_cfg.threads,
            "exact_limit": fit_cfg.exact_limit,
        },
        "rum_file": rum_file,
    });
    serde_json::to_string_pretty(&value).expect("serializable")
}

fn cmd_fit(args: FitArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data.clone(), &cfg, "data")?;
    let out: PathBuf = resolve(args.out.clone(), &cfg, "out", PathBuf::from("."))?;
    let dump_lp: Option<PathBuf> = match args.dump_lp.clone() {
        Some(p) => Some(p),
        None => cfg.get("dump-lp")?,
    };
    let fit_cfg = fit_config_from(&args, &cfg)?;

    let (_, table) = load_table(&data)?;
    let report = match fit_rum(&table, &fit_cfg) {
        Ok(r) => r,
        Err(failure) => {
            // Persist whatever trace accumulated before surfacing exit 3.
            let _ = write_file(
                &out.join("fit_trace.csv"),
                &trace_csv(&failure.partial_trace),
            );
            return Err(CliError::Solver(failure.to_string()));
        }
    };

    write_file(&out.join("model.rum"), &report.rum.to_text())?;
    write_file(&out.join("fit_trace.csv"), &trace_csv(&report.trace))?;
    write_file(
        &out.join("fit_report.json"),
        &report_json(&report, &table, &fit_cfg, "model.rum"),
    )?;

    let dataset_name = data
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let lb = report
        .lower_bound
        .map(|v| v.to_string())
        .unwrap_or_default();
    write_file(
        &out.join("fit_report.csv"),
        &format!(
            "dataset,k,support,avg_error,lower_bound\n{},{},{},{},{}\n",
            dataset_name,
            table.k(),
            report.support_size,
            report.average_error,
            lb
        ),
    )?;

    if let Some(path) = dump_lp {
        let support: Vec<_> = report
            .rum
            .support()
            .iter()
            .map(|(pi, _)| pi.clone())
            .collect();
        let lp = RestrictedLp::new(&table, support)?;
        let mut buf = Vec::new();
        lp.write_mps(&mut buf)
            .map_err(|e| CliError::Input(format!("cannot render LP dump: {e}")))?;
        write_file(&path, &String::from_utf8(buf).expect("mps is utf-8"))?;
    }

    println!(
        "fit: slates={} support={} avg_error={} lower_bound={} converged={} iterations={}",
        table.len(),
        report.support_size,
        report.average_error,
        report
            .lower_bound
            .map(|v| v.to_string())
            .unwrap_or_else(|| "n/a".into()),
        report.converged,
        report.iterations,
    );
    Ok(())
}

fn cmd_lower_bound(args: LowerBoundArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data, &cfg, "data")?;
    let rum_path: PathBuf = resolve_required(args.rum, &cfg, "rum")?;
    let exact_limit: usize = resolve(args.exact_limit, &cfg, "exact-limit", DEFAULT_EXACT_LIMIT)?;

    let (_, table) = load_table(&data)?;
    let rum = Rum::from_text(&read_file(&rum_path)?)?;
    let support: Vec<_> = rum.support().iter().map(|(pi, _)| pi.clone()).collect();
    let mut lp = RestrictedLp::new(&table, support)?;
    let sol = lp.solve()?;
    let dual = lp.extract_dual(&sol)?;

    let edges: Vec<_> = lp
        .slates()
        .iter()
        .zip(&dual.delta)
        .map(|(s, row)| (s.items().to_vec(), row.clone()))
        .collect();
    let bound_mag = dual
        .delta
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let inst = WfhsInstance::new_signed(table.n(), edges, bound_mag)?;
    let (exact, _) = wfhs_exact_detailed(&inst, exact_limit)?;
    let bound = rum_fit::fit::compute_lower_bound(&dual, &exact);

    let value = json!({
        "objective": sol.objective,
        "dual_d": dual.d,
        "wfhs_min": exact.cost,
        "lower_bound": bound,
        "tight": exact.cost >= dual.d,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("serializable")
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data, &cfg, "data")?;
    let rum_path: PathBuf = resolve_required(args.rum, &cfg, "rum")?;
    let mnl_path: Option<PathBuf> = match args.mnl {
        Some(p) => Some(p),
        None => cfg.get("mnl")?,
    };
    let out: PathBuf = resolve(args.out, &cfg, "out", PathBuf::from("."))?;

    let (_, table) = load_table(&data)?;
    let rum = Rum::from_text(&read_file(&rum_path)?)?;
    let avg = rum_fit::model::average_l1_error(&rum, &table)?;
    let cdf = error_cdf(&rum, &table)?;

    let mut csv = String::from("x,y\n");
    for (x, y) in &cdf.points {
        let _ = writeln!(csv, "{x},{y}");
    }
    let cdf_file = out.join("error_cdf.csv");
    write_file(&cdf_file, &csv)?;

    let mnl_avg = match mnl_path {
        Some(path) => {
            let model = MnlModel::from_text(&read_file(&path)?)?;
            if model.n() != table.n() {
                return Err(CliError::Input(format!(
                    "MNL model has n={}, dataset has n={}",
                    model.n(),
                    table.n()
                )));
            }
            let mut total = 0.0;
            for (slate, dist) in table.entries() {
                total += l1_distance(&model.predict(slate), dist)?;
            }
            Some(total / table.len() as f64)
        }
        None => None,
    };

    let value = json!({
        "slates": table.len(),
        "average_error": avg,
        "mnl_average_error": mnl_avg,
        "cdf_file": cdf_file.display().to_string(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("serializable")
    );
    Ok(())
}

fn cmd_crossval(args: CrossvalArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data, &cfg, "data")?;
    let model = match args.model {
        Some(ModelArg::Rum) => CvModel::Rum,
        Some(ModelArg::Mnl) => CvModel::Mnl,
        Some(ModelArg::TrainTensor) => CvModel::TrainTensor,
        None => match cfg.get::<String>("model")?.as_deref() {
            Some("rum") | None => CvModel::Rum,
            Some("mnl") => CvModel::Mnl,
            Some("train-tensor") => CvModel::TrainTensor,
            Some(other) => return Err(CliError::Input(format!("unknown model `{other}`"))),
        },
    };
    let out: PathBuf = resolve(args.out, &cfg, "out", PathBuf::from("."))?;
    let base_seed: u64 = resolve(args.seed, &cfg, "seed", 0)?;
    let folds: usize = resolve(args.folds, &cfg, "folds", 5)?;
    let seed_count: usize = resolve(args.seeds, &cfg, "seeds", 10)?;
    let defaults = CvConfig::default();
    let oracle = match args.oracle {
        Some(o) => o.into(),
        None => match cfg.get::<String>("oracle")?.as_deref() {
            Some("local") | Some("local-search") => OracleKind::LocalSearch,
            _ => OracleKind::Exact,
        },
    };
    let fit = FitConfig {
        oracle,
        t: resolve(args.t, &cfg, "t", defaults.fit.t)?,
        t_prime: resolve(args.t_prime, &cfg, "t-prime", defaults.fit.t_prime)?,
        ..FitConfig::default()
    };
    let cv_cfg = CvConfig {
        folds,
        seeds: vec![0; seed_count],
        max_iterations: resolve(args.max_iters, &cfg, "max-iters", defaults.max_iterations)?,
        fit,
        mnl: defaults.mnl,
        threads: resolve(args.threads, &cfg, "threads", 1)?,
    }
    .with_base_seed(base_seed);

    let ds = load_dataset(&data)?;
    let report = cross_validate(&ds, &cv_cfg, model)?;

    let mut csv = String::from("model,seed,fold,rmse\n");
    for cell in &report.cells {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            model.as_str(),
            cell.seed,
            cell.fold,
            cell.rmse
        );
    }
    write_file(&out.join("cv_report.csv"), &csv)?;

    let value = json!({
        "model": model.as_str(),
        "folds": folds,
        "seeds": seed_count,
        "mean_rmse": report.mean,
        "stddev": report.stddev,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("serializable")
    );
    Ok(())
}

fn cmd_wfhs_solve(args: WfhsSolveArgs) -> CliResult<()> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let data: PathBuf = resolve_required(args.data, &cfg, "data")?;
    let method = match args.method {
        Some(m) => m,
        None => match cfg.get::<String>("method")?.as_deref() {
            Some("exact") | None => MethodArg::Exact,
            Some("local") | Some("local-search") => MethodArg::Local,
            Some("brute") | Some("brute-force") => MethodArg::Brute,
            Some(other) => return Err(CliError::Input(format!("unknown method `{other}`"))),
        },
    };
    let seed: u64 = resolve(args.seed, &cfg, "seed", 0)?;
    let t: u32 = resolve(args.t, &cfg, "t", 100)?;
    let t_prime: u32 = resolve(args.t_prime, &cfg, "t-prime", 5)?;
    let threshold: f64 = resolve(args.threshold, &cfg, "threshold", f64::INFINITY)?;
    let threads: usize = resolve(args.threads, &cfg, "threads", 1)?;
    let exact_limit: usize = resolve(args.exact_limit, &cfg, "exact-limit", DEFAULT_EXACT_LIMIT)?;

    let inst = WfhsInstance::from_text(&read_file(&data)?)?;
    let value = match method {
        MethodArg::Exact => {
            let (res, _) = wfhs_exact_detailed(&inst, exact_limit)?;
            json!({
                "cost": res.cost,
                "permutation": res.permutation.order().iter().map(|i| i.0).collect::<Vec<_>>(),
                "method": res.method.as_str(),
                "restarts_used": 0,
            })
        }
        MethodArg::Brute => {
            let res = wfhs_brute_force(&inst)?;
            json!({
                "cost": res.cost,
                "permutation": res.permutation.order().iter().map(|i| i.0).collect::<Vec<_>>(),
                "method": res.method.as_str(),
                "restarts_used": 0,
            })
        }
        MethodArg::Local => {
            let params = LocalSearchParams {
                threshold,
                t,
                t_prime,
                seed,
                threads,
            };
            let run = wfhs_local_search_detailed(&inst, &params)?;
            match run.result {
                Some(res) => json!({
                    "cost": res.cost,
                    "permutation": res.permutation.order().iter().map(|i| i.0).collect::<Vec<_>>(),
                    "method": res.method.as_str(),
                    "restarts_used": run.restarts_used,
                }),
                None => json!({
                    "cost": null,
                    "permutation": null,
                    "method": "local-search",
                    "restarts_used": run.restarts_used,
                }),
            }
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("serializable")
    );
    Ok(())
}
