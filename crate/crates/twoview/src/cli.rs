//! Command-line interface.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use twoview_core::cca::CcaComponents;
use twoview_core::cls::ClsComponents;
use twoview_core::cluster::{
    cca_cluster, cls_cluster, clusterwise_regression, kmeans, ClusterResult, FitConfig, RegressionModel,
};
use twoview_core::datagen::{generate_mixture, generate_train_test, MixtureConfig, SynthConfig};
use twoview_core::features::{build_feature_views, log_returns, FeatureKind, ReturnSeries};
use twoview_core::linalg::standardize;
use twoview_core::metrics::{elbow_table, label_agreement, MAX_AGREEMENT_K};
use twoview_core::{ColumnStats, Error, Matrix};

use crate::io::{self, IoError};
use crate::manifest::{self, FileDigest, RunManifest, MANIFEST_FILE};

pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
/// Replay finished but produced different outputs.
pub const EXIT_REPLAY_MISMATCH: i32 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INVALID_CONFIG, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        CliError { code: EXIT_DATA, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_INVALID_CONFIG,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_DATA,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Core(c) => c.into(),
            other => CliError::data(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug, Clone)]
#[command(name = "twoview", version, about = "Correlation clustering for two-view data")]
pub struct Cli {
    /// Random seed; restarts and data generation derive from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for output files, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Store wall-clock time in the manifest (outputs are then not byte-reproducible).
    #[arg(long, global = true)]
    pub record_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Write synthetic train/test two-view data with planted labels.
    Generate(GenerateArgs),
    /// Cluster two-view data.
    Cluster(ClusterArgs),
    /// Compare predicted labels with true labels.
    Evaluate(EvaluateArgs),
    /// Average component R² over a grid of k and m.
    Elbow(ElbowArgs),
    /// Extract per-ticker features for two eras from long-form returns.
    Features(FeaturesArgs),
    /// Re-run the command recorded in a manifest and compare outputs.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Two spatial clusters and two linear maps.
    Synthetic,
    /// A two-normal mixture on which CCA clustering tends to cycle.
    Mixture,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    pub kind: DataKind,
    /// JSON file with a full generator configuration; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub map_prob: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cls,
    Cca,
    Kmeans,
    Clusterwise,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[arg(long, default_value_t = false)]
    pub intercept: bool,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub objective_tol: f64,
    #[arg(long, default_value_t = 10)]
    pub n_init: usize,
    /// Defaults to max(d1, d2) + 1.
    #[arg(long)]
    pub min_cluster_size: Option<usize>,
    /// Use the views as given instead of centering and scaling each column.
    #[arg(long)]
    pub no_standardize: bool,
}

impl FitArgs {
    fn config(&self, k: usize, m: usize, seed: u64) -> FitConfig {
        FitConfig {
            k,
            m,
            intercept: self.intercept,
            max_iter: self.max_iter,
            objective_tol: self.objective_tol,
            n_init: self.n_init,
            seed,
            min_cluster_size: self.min_cluster_size,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    /// Two-view CSV for X.
    #[arg(long)]
    pub x: PathBuf,
    /// Two-view CSV for Y; not used by kmeans.
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Args, Debug, Clone)]
pub struct EvaluateArgs {
    /// Labels CSV with predicted labels.
    #[arg(long)]
    pub pred: PathBuf,
    /// Labels CSV with true labels.
    #[arg(long)]
    pub truth: PathBuf,
    /// Column of the predicted file; defaults to its last column.
    #[arg(long)]
    pub pred_column: Option<String>,
    /// Column of the truth file; defaults to its last column.
    #[arg(long)]
    pub truth_column: Option<String>,
    /// Number of clusters; defaults to the largest label plus one.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ElbowArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Comma-separated cluster counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ks: Vec<usize>,
    /// Comma-separated component counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ms: Vec<usize>,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Args, Debug, Clone)]
pub struct FeaturesArgs {
    /// Long-form CSV: date,ticker,return[,volume].
    #[arg(long)]
    pub returns: PathBuf,
    /// Long-form CSV for the market index, same layout.
    #[arg(long)]
    pub index: PathBuf,
    /// Ticker to use from the index file when it holds several.
    #[arg(long)]
    pub index_ticker: Option<String>,
    #[arg(long)]
    pub pre_start: String,
    #[arg(long)]
    pub pre_end: String,
    #[arg(long)]
    pub post_start: String,
    #[arg(long)]
    pub post_end: String,
    /// Comma-separated subset of mean, volatility, skewness, kurtosis, beta, volume.
    #[arg(long, value_delimiter = ',', default_value = "mean,volatility,skewness,kurtosis,beta,volume")]
    pub features: Vec<String>,
    /// The value column holds prices (column "price"); convert to log returns per era.
    #[arg(long)]
    pub prices: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

struct Ctx {
    out_dir: PathBuf,
    quiet: bool,
    inputs: Vec<FileDigest>,
    outputs: Vec<String>,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn input(&mut self, path: &Path) -> CliResult<()> {
        let d = manifest::digest(path, &path.to_string_lossy())
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        self.inputs.push(d);
        Ok(())
    }

    fn out(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let raw: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_CONFIG } else { 0 };
        }
    };
    let recorded: Vec<String> = raw.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, recorded) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed command; `args` is what the manifest records.
pub fn run(cli: Cli, args: Vec<String>) -> CliResult<()> {
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest, &cli.out_dir, cli.quiet);
    }
    let started = Instant::now();
    fs::create_dir_all(&cli.out_dir)
        .map_err(|e| CliError::data(format!("{}: {e}", cli.out_dir.display())))?;
    let mut ctx = Ctx { out_dir: cli.out_dir.clone(), quiet: cli.quiet, inputs: vec![], outputs: vec![] };
    let seed = cli.seed;
    let (name, config) = match &cli.command {
        Command::Generate(a) => ("generate", generate(&mut ctx, a, seed)?),
        Command::Cluster(a) => ("cluster", cluster(&mut ctx, a, seed.unwrap_or(0))?),
        Command::Evaluate(a) => ("evaluate", evaluate(&mut ctx, a)?),
        Command::Elbow(a) => ("elbow", elbow(&mut ctx, a, seed.unwrap_or(0))?),
        Command::Features(a) => ("features", features(&mut ctx, a)?),
        Command::Replay(_) => unreachable!("handled above"),
    };
    if ctx.outputs.is_empty() {
        return Ok(());
    }
    let outputs = ctx
        .outputs
        .iter()
        .map(|o| manifest::digest(&ctx.out_dir.join(o), o))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| CliError::data(e.to_string()))?;
    let m = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        args,
        config,
        seed,
        inputs: ctx.inputs,
        outputs,
        timing_ms: cli.record_timing.then(|| started.elapsed().as_millis() as u64),
    };
    io::write_json(&ctx.out_dir.join(MANIFEST_FILE), &m)?;
    Ok(())
}

fn keys(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn write_views(ctx: &mut Ctx, prefix: &str, x: &Matrix, y: &Matrix) -> CliResult<()> {
    let k = keys(x.rows());
    io::write_table(&ctx.out(&format!("{prefix}_x.csv")), "id", &io::numbered("x", x.cols()), &k, x)?;
    io::write_table(&ctx.out(&format!("{prefix}_y.csv")), "id", &io::numbered("y", y.cols()), &k, y)?;
    Ok(())
}

fn generate(ctx: &mut Ctx, a: &GenerateArgs, seed: Option<u64>) -> CliResult<Value> {
    match a.kind {
        DataKind::Synthetic => {
            let mut cfg: SynthConfig = match &a.config {
                Some(p) => {
                    ctx.input(p)?;
                    let text = fs::read_to_string(p).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?;
                    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
                }
                None => SynthConfig::default(),
            };
            cfg.n = a.n.unwrap_or(cfg.n);
            cfg.n_test = a.n_test.unwrap_or(cfg.n_test);
            cfg.noise_sd = a.noise_sd.unwrap_or(cfg.noise_sd);
            cfg.map_prob = a.map_prob.unwrap_or(cfg.map_prob);
            cfg.seed = seed.unwrap_or(cfg.seed);
            let (train, test) = generate_train_test(&cfg)?;
            for (prefix, d) in [("train", &train), ("test", &test)] {
                write_views(ctx, prefix, &d.x, &d.y)?;
                io::write_labels(
                    &ctx.out(&format!("{prefix}_labels.csv")),
                    &keys(d.x.rows()),
                    &["spatial_label", "corr_label"],
                    &[&d.spatial_labels, &d.corr_labels],
                )?;
            }
            ctx.say(format!("wrote {} train and {} test rows to {}", cfg.n, cfg.n_test, ctx.out_dir.display()));
            Ok(json!({ "kind": a.kind, "synth": cfg }))
        }
        DataKind::Mixture => {
            if a.config.is_some() || a.noise_sd.is_some() || a.map_prob.is_some() {
                return Err(CliError::config("--config, --noise-sd and --map-prob apply to synthetic data only"));
            }
            let (n, n_test) = (a.n.unwrap_or(300), a.n_test.unwrap_or(300));
            let cfg = MixtureConfig::oscillating(n + n_test, seed.unwrap_or(0));
            let (x, y, labels) = generate_mixture(&cfg)?;
            let train: Vec<usize> = (0..n).collect();
            let test: Vec<usize> = (n..n + n_test).collect();
            for (prefix, rows) in [("train", &train), ("test", &test)] {
                write_views(ctx, prefix, &x.select_rows(rows), &y.select_rows(rows))?;
                let l: Vec<usize> = rows.iter().map(|&i| labels[i]).collect();
                io::write_labels(&ctx.out(&format!("{prefix}_labels.csv")), &keys(rows.len()), &["component"], &[&l])?;
            }
            ctx.say(format!("wrote {n} train and {n_test} test rows to {}", ctx.out_dir.display()));
            Ok(json!({ "kind": a.kind, "n": n, "n_test": n_test, "mixture": cfg }))
        }
    }
}

struct Prepared {
    keys: Vec<String>,
    x: Matrix,
    y: Matrix,
    x_stats: ColumnStats,
    y_stats: ColumnStats,
    dropped: usize,
}

fn identity_stats(cols: usize) -> ColumnStats {
    ColumnStats { means: vec![0.0; cols], scales: vec![1.0; cols], constant: vec![false; cols] }
}

fn prepare(ctx: &mut Ctx, x: &Path, y: Option<&Path>, standardize_views: bool) -> CliResult<Prepared> {
    ctx.input(x)?;
    let (keys, xm, ym, dropped) = match y {
        Some(yp) => {
            ctx.input(yp)?;
            let p = io::load_two_view_csv(x, yp)?;
            for d in &p.dropped {
                ctx.say(format!("dropped row {}: {}", d.key, d.reason));
            }
            (p.keys, p.x, p.y, p.dropped.len())
        }
        None => {
            let t = io::read_table(x)?;
            let mut keys = vec![];
            let mut rows = vec![];
            let mut dropped = 0;
            for (k, r) in t.keys.into_iter().zip(t.rows) {
                match r.into_iter().collect::<Option<Vec<f64>>>() {
                    Some(r) => {
                        keys.push(k);
                        rows.push(r);
                    }
                    None => dropped += 1,
                }
            }
            if rows.is_empty() {
                return Err(CliError::data(format!("{}: no complete rows", x.display())));
            }
            let xm = Matrix::from_rows(&rows)?;
            let n = xm.rows();
            (keys, xm, Matrix::zeros(n, 0), dropped)
        }
    };
    let (x, x_stats, y, y_stats) = if standardize_views {
        let (xs, xst) = standardize(&xm)?;
        let (ys, yst) = if ym.cols() > 0 { standardize(&ym)? } else { (ym.clone(), identity_stats(0)) };
        (xs, xst, ys, yst)
    } else {
        let (cx, cy) = (xm.cols(), ym.cols());
        (xm, identity_stats(cx), ym, identity_stats(cy))
    };
    Ok(Prepared { keys, x, y, x_stats, y_stats, dropped })
}

fn with_stats(mut obj: Value, p: &Prepared, include_y: bool) -> Value {
    let map = obj.as_object_mut().expect("model objects are maps");
    map.insert("x_means".into(), json!(p.x_stats.means));
    map.insert("x_scales".into(), json!(p.x_stats.scales));
    if include_y {
        map.insert("y_means".into(), json!(p.y_stats.means));
        map.insert("y_scales".into(), json!(p.y_stats.scales));
    }
    obj
}

fn cls_model(c: &ClsComponents, p: &Prepared) -> Value {
    with_stats(json!({ "u": c.u, "v": c.v, "eigenvalues": c.eigenvalues, "intercept": c.intercept }), p, true)
}

fn cca_model(c: &CcaComponents, p: &Prepared) -> Value {
    let alphas: Vec<f64> = c.regressions.iter().map(|r| r.alpha).collect();
    let betas: Vec<f64> = c.regressions.iter().map(|r| r.beta).collect();
    with_stats(
        json!({ "u": c.u, "v": c.v, "correlations": c.correlations, "alphas": alphas, "betas": betas }),
        p,
        true,
    )
}

fn regression_model(r: &RegressionModel, p: &Prepared) -> Value {
    with_stats(json!({ "coefficients": r.coefficients, "intercept": r.intercept }), p, true)
}

fn result_json<M>(r: &ClusterResult<M>, models: Vec<Value>) -> Value {
    json!({
        "labels": r.labels,
        "models": models,
        "objective_trace": r.objective_trace,
        "objective": r.objective,
        "converged": r.converged,
        "stop_reason": r.stop_reason,
        "iterations": r.iterations,
        "seed_used": r.seed_used,
        "restart_index": r.restart_index,
        "notes": r.notes,
    })
}

fn cluster(ctx: &mut Ctx, a: &ClusterArgs, seed: u64) -> CliResult<Value> {
    let cfg = a.fit.config(a.k, a.m, seed);
    if a.method != Method::Kmeans && a.y.is_none() {
        return Err(CliError::config("--y is required except for kmeans"));
    }
    let y_path = if a.method == Method::Kmeans { None } else { a.y.as_deref() };
    let p = prepare(ctx, &a.x, y_path, !a.fit.no_standardize)?;
    let (labels, mut body, converged) = match a.method {
        Method::Cls => {
            let r = cls_cluster(&p.x, &p.y, &cfg)?;
            let models = r.models.iter().map(|c| cls_model(c, &p)).collect();
            (r.labels.clone(), result_json(&r, models), r.converged)
        }
        Method::Cca => {
            let r = cca_cluster(&p.x, &p.y, &cfg)?;
            let models = r.models.iter().map(|c| cca_model(c, &p)).collect();
            (r.labels.clone(), result_json(&r, models), r.converged)
        }
        Method::Clusterwise => {
            let r = clusterwise_regression(&p.x, &p.y, a.k, &cfg)?;
            let models = r.models.iter().map(|c| regression_model(c, &p)).collect();
            (r.labels.clone(), result_json(&r, models), r.converged)
        }
        Method::Kmeans => {
            let r = kmeans(&p.x, a.k, &cfg)?;
            let models = (0..a.k)
                .map(|c| with_stats(json!({ "centroid": r.centroids.row(c) }), &p, false))
                .collect::<Vec<_>>();
            let body = json!({
                "labels": r.labels,
                "models": models,
                "objective_trace": r.objective_trace,
                "objective": r.inertia,
                "converged": r.converged,
                "iterations": r.iterations,
                "seed_used": r.seed_used,
                "restart_index": r.restart_index,
            });
            (r.labels.clone(), body, r.converged)
        }
    };
    let config = json!({
        "method": a.method,
        "fit": cfg,
        "standardize": !a.fit.no_standardize,
        "rows": p.keys.len(),
        "dropped_rows": p.dropped,
    });
    let obj = body.as_object_mut().expect("result is a map");
    obj.insert("method".into(), json!(a.method));
    obj.insert("config".into(), config.clone());
    obj.insert("manifest".into(), json!(MANIFEST_FILE));
    io::write_json(&ctx.out("result.json"), &body)?;
    io::write_labels(&ctx.out("labels.csv"), &p.keys, &["label"], &[&labels])?;
    ctx.say(format!(
        "{}: {} rows into {} clusters, converged = {converged}",
        a.method.to_possible_value().expect("no skipped variants").get_name(),
        p.keys.len(),
        a.k
    ));
    Ok(config)
}

fn evaluate(ctx: &mut Ctx, a: &EvaluateArgs) -> CliResult<Value> {
    let (pk, pred) = io::read_labels(&a.pred, a.pred_column.as_deref())?;
    let (tk, truth) = io::read_labels(&a.truth, a.truth_column.as_deref())?;
    if pred.len() != truth.len() {
        return Err(CliError::data(format!("label files differ in length: {} vs {}", pred.len(), truth.len())));
    }
    if pk != tk {
        return Err(CliError::data("label files list different ids"));
    }
    let k = match a.k {
        Some(k) => k,
        None => pred.iter().chain(&truth).max().map_or(1, |m| m + 1),
    };
    if k > MAX_AGREEMENT_K {
        return Err(CliError::config(format!("k = {k} exceeds the supported {MAX_AGREEMENT_K}")));
    }
    let score = label_agreement(&truth, &pred, k)?;
    println!("{}", serde_json::to_string_pretty(&score).expect("serializable"));
    ctx.say(format!("accuracy {}", score.accuracy));
    Ok(Value::Null)
}

fn elbow(ctx: &mut Ctx, a: &ElbowArgs, seed: u64) -> CliResult<Value> {
    let cfg = a.fit.config(1, 1, seed);
    let p = prepare(ctx, &a.x, Some(&a.y), !a.fit.no_standardize)?;
    let table = elbow_table(&p.x, &p.y, &a.ks, &a.ms, &cfg)?;
    let path = ctx.out("elbow.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let werr = |e: csv::Error| CliError::data(format!("{}: {e}", path.display()));
    w.write_record(["k", "m", "avg_r2"]).map_err(werr)?;
    for row in &table.rows {
        let v = row.avg_r2.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([row.k.to_string(), row.m.to_string(), v]).map_err(werr)?;
        if let Some(e) = &row.error {
            ctx.say(format!("k = {}, m = {}: {e}", row.k, row.m));
        }
    }
    w.flush().map_err(|e| CliError::data(e.to_string()))?;
    Ok(json!({ "ks": a.ks, "ms": a.ms, "fit": cfg, "standardize": !a.fit.no_standardize }))
}

fn era(
    records: &[io::ReturnRecord],
    start: &str,
    end: &str,
    prices: bool,
) -> CliResult<(Vec<ReturnSeries>, Vec<(String, String)>)> {
    let (series, incomplete) = io::series_in_window(records, start, end);
    let mut excluded: Vec<(String, String)> =
        incomplete.into_iter().map(|t| (t, format!("missing value in {start}..{end}"))).collect();
    if !prices {
        return Ok((series, excluded));
    }
    let mut out = Vec::with_capacity(series.len());
    for s in series {
        match log_returns(&s.returns) {
            Ok(r) => out.push(ReturnSeries {
                ticker: s.ticker,
                returns: r,
                volumes: s.volumes.map(|v| v[1..].to_vec()),
            }),
            Err(e) => excluded.push((s.ticker, e.to_string())),
        }
    }
    Ok((out, excluded))
}

fn pick_index(series: Vec<ReturnSeries>, ticker: Option<&str>, path: &Path) -> CliResult<ReturnSeries> {
    match ticker {
        Some(t) => series
            .into_iter()
            .find(|s| s.ticker == t)
            .ok_or_else(|| CliError::data(format!("{}: no complete series for {t}", path.display()))),
        None => {
            let mut it = series.into_iter();
            match (it.next(), it.next()) {
                (Some(s), None) => Ok(s),
                (None, _) => Err(CliError::data(format!("{}: no complete index series in window", path.display()))),
                _ => Err(CliError::config("index file holds several tickers; pass --index-ticker")),
            }
        }
    }
}

fn features(ctx: &mut Ctx, a: &FeaturesArgs) -> CliResult<Value> {
    let kinds = a
        .features
        .iter()
        .map(|s| s.parse::<FeatureKind>())
        .collect::<Result<Vec<_>, _>>()?;
    let value_column = if a.prices { "price" } else { "return" };
    ctx.input(&a.returns)?;
    ctx.input(&a.index)?;
    let recs = io::read_returns(&a.returns, value_column)?;
    let idx = io::read_returns(&a.index, value_column)?;
    let (pre, mut excluded) = era(&recs, &a.pre_start, &a.pre_end, a.prices)?;
    let (post, ex_post) = era(&recs, &a.post_start, &a.post_end, a.prices)?;
    excluded.extend(ex_post);
    let index_pre = pick_index(era(&idx, &a.pre_start, &a.pre_end, a.prices)?.0, a.index_ticker.as_deref(), &a.index)?;
    let index_post =
        pick_index(era(&idx, &a.post_start, &a.post_end, a.prices)?.0, a.index_ticker.as_deref(), &a.index)?;
    let views = build_feature_views(&pre, &post, &index_pre, &index_post, &kinds)?;
    excluded.extend(views.excluded.iter().map(|e| (e.ticker.clone(), e.reason.clone())));
    excluded.sort();
    excluded.dedup();
    let names: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
    io::write_table(&ctx.out("pre_features.csv"), "ticker", &names, &views.tickers, &views.x)?;
    io::write_table(&ctx.out("post_features.csv"), "ticker", &names, &views.tickers, &views.y)?;
    io::write_table(&ctx.out("pre_features_raw.csv"), "ticker", &names, &views.tickers, &views.x_raw)?;
    io::write_table(&ctx.out("post_features_raw.csv"), "ticker", &names, &views.tickers, &views.y_raw)?;
    let path = ctx.out("excluded.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    w.write_record(["ticker", "reason"]).map_err(|e| CliError::data(e.to_string()))?;
    for (t, r) in &excluded {
        w.write_record([t, r]).map_err(|e| CliError::data(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::data(e.to_string()))?;
    ctx.say(format!("{} tickers kept, {} excluded", views.tickers.len(), excluded.len()));
    Ok(json!({
        "features": names,
        "pre": [a.pre_start, a.pre_end],
        "post": [a.post_start, a.post_end],
        "prices": a.prices,
        "index_ticker": a.index_ticker,
        "x_stats": views.x_stats,
        "y_stats": views.y_stats,
    }))
}

fn replay(path: &Path, out_dir: &Path, quiet: bool) -> CliResult<()> {
    let m = RunManifest::load(path).map_err(CliError::data)?;
    for input in &m.inputs {
        let now = manifest::sha256_file(Path::new(&input.path))
            .map_err(|e| CliError::data(format!("{}: {e}", input.path)))?;
        if now != input.sha256 {
            return Err(CliError::data(format!("input {} changed since the recorded run", input.path)));
        }
    }
    let argv = std::iter::once("twoview".to_string()).chain(m.args.iter().cloned());
    let mut cli = Cli::try_parse_from(argv).map_err(|e| CliError::config(e.to_string()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::config("a manifest cannot replay another replay"));
    }
    cli.out_dir = out_dir.to_path_buf();
    cli.quiet = quiet;
    run(cli, m.args.clone())?;
    let mut mismatched = vec![];
    for o in &m.outputs {
        let now = manifest::sha256_file(&out_dir.join(&o.path)).map_err(|e| CliError::data(format!("{}: {e}", o.path)))?;
        if now != o.sha256 {
            mismatched.push(o.path.clone());
        }
    }
    if !mismatched.is_empty() {
        return Err(CliError { code: EXIT_REPLAY_MISMATCH, message: format!("outputs differ: {}", mismatched.join(", ")) });
    }
    if !quiet {
        eprintln!("replayed {}: {} outputs identical", m.command, m.outputs.len());
    }
    Ok(())
}
