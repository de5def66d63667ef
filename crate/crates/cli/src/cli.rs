//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use botminer_core::characterize::{
    characterize_authors, file_type_histogram, render_radial_svg, ClassifierConfig, LanguageTable,
    DEFAULT_MIN_COMMITS,
};
use botminer_core::detector::{
    bayes_posterior, prevalence_estimate, score_author, DetectionScores, DEFAULT_ENSEMBLE_THRESHOLD,
    DEFAULT_PREVALENCE, ENSEMBLE_FEATURES,
};
use botminer_core::features::{extract_features, FEATURE_NAMES};
use botminer_core::forest::{
    auc, grid_tune, grow_tree, repeated_holdout_auc, roc_curve, select_threshold, stratified_folds,
    Dataset, ForestConfig, Label, RandomForestModel,
};
use botminer_core::ingest::{group_by_author, AuthorActivity, CommitRecord};
use botminer_core::name_match::is_bot_name;
use botminer_core::template::{bim_grouping, AlignmentMode, BimConfig, DEFAULT_CAP, DEFAULT_KB};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::formats;
use crate::io::{load_records, open_output, write_records, ErrorPolicy, ReadStats};
use crate::model_file;
use crate::numfmt::real;
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "botminer", version, about = "Detect and characterize bot authors in commit data")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for every random choice.
    #[arg(long, env = "BOTMINER_SEED", default_value_t = 0, global = true)]
    seed: u64,
    /// Worker threads (0 = one per core). Output order never depends on it.
    #[arg(long, default_value_t = 0, global = true)]
    jobs: usize,
    /// What to do with malformed input lines.
    #[arg(long, value_enum, default_value_t = ErrorPolicy::Abort, global = true)]
    on_error: ErrorPolicy,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a record file, validate it and write it back normalized.
    Ingest(IoArgs),
    /// Per-author commit-association features as CSV.
    Features(IoArgs),
    /// Train the commit-association forest from features and labels.
    Train(TrainArgs),
    /// Cross-validated grid search over ntree and mtry.
    Tune(TuneArgs),
    /// Score authors with one detector or the full ensemble.
    Detect(DetectArgs),
    /// Train the combining forest from detector scores and labels.
    EnsembleTrain(EnsembleTrainArgs),
    /// Classify active authors by hour-of-day activity.
    Characterize(CharacterizeArgs),
    /// Count authors touching each file category.
    Filetypes(FiletypesArgs),
    /// Population summary of a scores file.
    Report(ReportArgs),
    /// Write seeded synthetic data.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Record file (`-` for standard input).
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Output file (`-` for standard output).
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Args, Clone, Copy)]
struct ForestArgs {
    #[arg(long, default_value_t = 100)]
    ntree: usize,
    #[arg(long, default_value_t = 2)]
    mtry: usize,
    /// Nodes smaller than this become leaves.
    #[arg(long, default_value_t = 1)]
    min_node_size: usize,
}

impl ForestArgs {
    fn config(self, seed: u64) -> ForestConfig {
        ForestConfig { ntree: self.ntree, mtry: self.mtry, min_node_size: self.min_node_size, seed }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Features CSV from `features`.
    #[arg(long)]
    features: PathBuf,
    /// Labels CSV (`author_id,label`).
    #[arg(long)]
    labels: PathBuf,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    forest: ForestArgs,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    ntree_grid: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    mtry_grid: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    min_node_size: usize,
    /// Also report held-out AUC of the best cell over this many splits.
    #[arg(long, default_value_t = 0)]
    repetitions: usize,
    #[arg(long, default_value_t = 0.3)]
    test_fraction: f64,
    /// Grid results CSV.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bin,
    Bim,
    Bica,
    Biman,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Bin => "bin",
            Method::Bim => "bim",
            Method::Bica => "bica",
            Method::Biman => "biman",
        }
    }
}

#[derive(Debug, Args)]
struct BimArgs {
    /// Similarity a message must exceed to join a template.
    #[arg(long, default_value_t = DEFAULT_KB)]
    kb: f64,
    /// Most messages compared per author.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Use global alignment only.
    #[arg(long)]
    global_only: bool,
}

impl BimArgs {
    fn config(&self) -> Result<BimConfig> {
        if !(0.0..1.0).contains(&self.kb) {
            return Err(Error::Usage(format!("--kb must be in [0, 1), got {}", self.kb)));
        }
        if self.cap < 2 {
            return Err(Error::Usage(format!("--cap must be at least 2, got {}", self.cap)));
        }
        let mode = if self.global_only { AlignmentMode::GlobalOnly } else { AlignmentMode::Combined };
        Ok(BimConfig { k_b: self.kb, cap: self.cap, mode })
    }
}

#[derive(Debug, Args)]
struct PosteriorArgs {
    /// Add a column with the chance a flagged author is a bot at the given
    /// prevalence.
    #[arg(long)]
    report_posterior: bool,
    #[arg(long, default_value_t = DEFAULT_PREVALENCE)]
    prevalence: f64,
    #[arg(long, default_value_t = 0.9)]
    sensitivity: f64,
    #[arg(long, default_value_t = 0.9)]
    specificity: f64,
}

impl PosteriorArgs {
    /// Chance of being a bot after a bot verdict and after a human verdict.
    fn posterior(&self) -> Result<Option<(f64, f64)>> {
        if !self.report_posterior {
            return Ok(None);
        }
        let usage = |e: botminer_core::detector::DetectError| Error::Usage(e.to_string());
        let pos = bayes_posterior(self.sensitivity, self.specificity, self.prevalence).map_err(usage)?;
        // A human verdict is a positive test for "human", whose prevalence
        // is 1 - p and whose sensitivity is our specificity.
        let neg = 1.0 - bayes_posterior(self.specificity, self.sensitivity, 1.0 - self.prevalence).map_err(usage)?;
        Ok(Some((pos, neg)))
    }
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Commit-association model (bica, biman).
    #[arg(long)]
    bica_model: Option<PathBuf>,
    /// Combining model (biman).
    #[arg(long)]
    ensemble_model: Option<PathBuf>,
    /// Ensemble probability above which an author is called a bot.
    #[arg(long, default_value_t = DEFAULT_ENSEMBLE_THRESHOLD)]
    threshold: f64,
    #[command(flatten)]
    bim: BimArgs,
    #[command(flatten)]
    posterior: PosteriorArgs,
}

#[derive(Debug, Args)]
struct EnsembleTrainArgs {
    /// Scores CSV (from `detect --method biman` or `synth --kind ensemble`).
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    forest: ForestArgs,
    /// Folds for the cross-validated AUC and threshold in the summary.
    #[arg(long, default_value_t = 5)]
    folds: usize,
}

#[derive(Debug, Args)]
struct CharacterizeArgs {
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Only these authors (one id per line).
    #[arg(long)]
    authors: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_COMMITS)]
    min_commits: u64,
    /// Write one radial plot per classified author here.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0.75)]
    spike_top3: f64,
    #[arg(long, default_value_t = 0.90)]
    continuous_entropy: f64,
    #[arg(long, default_value_t = 0.70)]
    sync_window8: f64,
}

#[derive(Debug, Args)]
struct FiletypesArgs {
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    #[arg(long)]
    authors: Option<PathBuf>,
    /// Extension table (`extension<TAB>category` lines) replacing the
    /// bundled one.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    /// Share of flagged authors confirmed as bots on inspection.
    #[arg(long)]
    verified_fraction: Option<f64>,
    #[command(flatten)]
    posterior: PosteriorArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SynthKind {
    /// Commit records; labels go to `--labels-out`.
    Corpus,
    /// Detector scores for the combining forest.
    Ensemble,
    /// Commit-association feature rows.
    Features,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 100)]
    bots: usize,
    #[arg(long, default_value_t = 100)]
    humans: usize,
    #[arg(long, default_value = "-")]
    out: PathBuf,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

/// One `SUMMARY:` line of `key=value` pairs on standard error.
#[derive(Debug, Default)]
struct Summary(String);

impl Summary {
    fn new(command: &str) -> Self {
        Summary(format!("SUMMARY: command={command}"))
    }

    fn add(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = write!(self.0, " {key}={value}");
        self
    }

    fn reads(&mut self, stats: &ReadStats) -> &mut Self {
        self.add("lines", stats.lines).add("records", stats.records).add("skipped", stats.skipped)
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start workers: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(summary) => {
            eprintln!("{}", summary.0);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("SUMMARY: status=error exit={}", e.exit_code());
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Summary> {
    let g = &cli.global;
    match &cli.command {
        Command::Ingest(a) => ingest(g, a),
        Command::Features(a) => features(g, a),
        Command::Train(a) => train(g, a),
        Command::Tune(a) => tune(g, a),
        Command::Detect(a) => detect(g, a),
        Command::EnsembleTrain(a) => ensemble_train(g, a),
        Command::Characterize(a) => characterize(g, a),
        Command::Filetypes(a) => filetypes(g, a),
        Command::Report(a) => report(a),
        Command::Synth(a) => synth_cmd(g, a),
    }
}

fn output(path: &Path) -> Result<Box<dyn Write>> {
    open_output(Some(path))
}

fn authors_from(g: &Global, input: &Path) -> Result<(Vec<AuthorActivity>, ReadStats)> {
    let (records, stats) = load_records(input, g.on_error)?;
    for e in &stats.sample_errors {
        eprintln!("warning: {}: skipped {e}", input.display());
    }
    Ok((group_by_author(records), stats))
}

fn keep_listed(authors: Vec<AuthorActivity>, list: Option<&Path>) -> Result<Vec<AuthorActivity>> {
    match list {
        None => Ok(authors),
        Some(path) => {
            let keep = formats::read_author_list(path)?;
            Ok(authors.into_iter().filter(|a| keep.contains(a.author_id())).collect())
        }
    }
}

/// Fits a forest with trees grown in parallel. Each tree draws from its own
/// random stream, so the result equals a serial fit.
fn fit_forest(data: &Dataset, config: ForestConfig, names: Vec<String>) -> Result<RandomForestModel> {
    RandomForestModel::check_fit(data, &config, &names)?;
    let trees = (0..config.ntree).into_par_iter().map(|t| grow_tree(data, &config, t)).collect();
    Ok(RandomForestModel::from_parts(trees, config, names)?)
}

fn ingest(g: &Global, a: &IoArgs) -> Result<Summary> {
    let (records, stats) = load_records(&a.input, g.on_error)?;
    for e in &stats.sample_errors {
        eprintln!("warning: {}: skipped {e}", a.input.display());
    }
    let mut bad = 0;
    let valid: Vec<&CommitRecord> = records
        .iter()
        .filter(|r| match r.validate() {
            Ok(()) => true,
            Err(e) => {
                bad += 1;
                eprintln!("warning: {}: invalid record for {}: {e}", a.input.display(), r.author_id);
                false
            }
        })
        .collect();
    if bad > 0 && g.on_error == ErrorPolicy::Abort {
        return Err(Error::format(a.input.display().to_string(), 0, format!("{bad} invalid records")));
    }
    let out = output(&a.out)?;
    write_records(out, valid.iter().copied()).map_err(|e| Error::io(&a.out, e))?;
    let authors = group_by_author(valid.into_iter().cloned()).len();
    let mut s = Summary::new("ingest");
    s.reads(&stats).add("invalid", bad).add("authors", authors);
    Ok(s)
}

fn features(g: &Global, a: &IoArgs) -> Result<Summary> {
    let (authors, stats) = authors_from(g, &a.input)?;
    let rows: Vec<(String, _)> = authors
        .par_iter()
        .map(|au| (au.author_id().to_string(), extract_features(au)))
        .collect();
    let out = output(&a.out)?;
    formats::write_features(out, &rows)?;
    let mut s = Summary::new("features");
    s.reads(&stats).add("authors", rows.len());
    Ok(s)
}

fn load_training(features: &Path, labels: &Path) -> Result<(Dataset, usize)> {
    let rows = formats::read_features(features)?;
    let labels = formats::read_labels(labels)?;
    let (data, _, unlabeled) = formats::labeled_dataset(&rows, &labels, FEATURE_NAMES.len())?;
    Ok((data, unlabeled))
}

fn class_counts(labels: &[Label]) -> (usize, usize) {
    let bots = labels.iter().filter(|l| l.is_bot()).count();
    (bots, labels.len() - bots)
}

fn train(g: &Global, a: &TrainArgs) -> Result<Summary> {
    let (data, unlabeled) = load_training(&a.features, &a.labels)?;
    let names = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let model = fit_forest(&data, a.forest.config(g.seed), names)?;
    model_file::save(&model, &a.out)?;
    let (bots, humans) = class_counts(data.labels());
    let mut s = Summary::new("train");
    s.add("rows", data.len()).add("bots", bots).add("humans", humans).add("unlabeled", unlabeled);
    for (name, v) in FEATURE_NAMES.iter().zip(model.importance()) {
        s.add(&format!("importance.{name}"), real(v));
    }
    Ok(s)
}

fn tune(g: &Global, a: &TuneArgs) -> Result<Summary> {
    let (data, unlabeled) = load_training(&a.features, &a.labels)?;
    let base = ForestConfig { min_node_size: a.min_node_size, ..ForestConfig::with_seed(g.seed) };
    let report = grid_tune(&data, &a.ntree_grid, &a.mtry_grid, a.folds, &base)?;
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["ntree", "mtry", "correct", "accuracy"])?;
    for c in &report.cells {
        w.write_record([c.ntree.to_string(), c.mtry.to_string(), c.correct.to_string(), real(c.accuracy)])?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let mut s = Summary::new("tune");
    s.add("rows", data.len())
        .add("unlabeled", unlabeled)
        .add("best_ntree", report.best.ntree)
        .add("best_mtry", report.best.mtry);
    if a.repetitions > 0 {
        if !(a.test_fraction > 0.0 && a.test_fraction < 1.0) {
            return Err(Error::Usage("--test-fraction must be in (0, 1)".into()));
        }
        let (summary, _) = repeated_holdout_auc(&data, &report.best, a.test_fraction, a.repetitions)?;
        s.add("auc_min", real(summary.min))
            .add("auc_median", real(summary.median))
            .add("auc_max", real(summary.max));
    }
    Ok(s)
}

fn detect(g: &Global, a: &DetectArgs) -> Result<Summary> {
    if !(0.0..=1.0).contains(&a.threshold) {
        return Err(Error::Usage(format!("--threshold must be in [0, 1], got {}", a.threshold)));
    }
    let bim = a.bim.config()?;
    let posterior = a.posterior.posterior()?;
    fn require<'a>(m: &'a Option<PathBuf>, method: Method, flag: &str) -> Result<&'a Path> {
        m.as_deref().ok_or_else(|| Error::Usage(format!("--method {} needs {flag}", method.name())))
    }
    let bica = match a.method {
        Method::Bica | Method::Biman => Some(model_file::load(require(&a.bica_model, a.method, "--bica-model")?)?),
        _ => None,
    };
    let ensemble = match a.method {
        Method::Biman => Some(model_file::load(require(&a.ensemble_model, a.method, "--ensemble-model")?)?),
        _ => None,
    };

    let (authors, stats) = authors_from(g, &a.input)?;
    if a.method == Method::Biman {
        let (bica, ensemble) = (bica.as_ref().expect("loaded"), ensemble.as_ref().expect("loaded"));
        let scores = authors
            .par_iter()
            .map(|au| {
                let mut s = score_author(au, bica, &bim)?;
                s.apply_ensemble(ensemble, a.threshold)?;
                Ok(s)
            })
            .collect::<Result<Vec<DetectionScores>>>()?;
        let out = output(&a.out)?;
        match posterior {
            Some((pos, neg)) => {
                let column = move |s: &DetectionScores| s.verdict.map(|v| if v.is_bot() { pos } else { neg });
                formats::write_scores(out, &scores, Some(&column))?;
            }
            None => formats::write_scores(out, &scores, None)?,
        }
        let flagged = scores.iter().filter(|s| s.verdict == Some(Label::Bot)).count();
        let mut s = Summary::new("detect");
        s.add("method", "biman").reads(&stats).add("authors", authors.len()).add("flagged", flagged);
        return Ok(s);
    }

    let mut w = csv::Writer::from_writer(output(&a.out)?);
    let mut flagged = 0;
    match a.method {
        Method::Bin => {
            w.write_record(["author_id", "bin"])?;
            for au in &authors {
                let bot = is_bot_name(au.author_id()).is_bot;
                flagged += usize::from(bot);
                w.write_record([au.author_id(), if bot { "1" } else { "0" }])?;
            }
        }
        Method::Bim => {
            let groups = authors.par_iter().map(|au| bim_grouping(au, &bim)).collect::<Result<Vec<_>, _>>()?;
            w.write_record(["author_id", "bim", "templates", "messages"])?;
            for (au, gr) in authors.iter().zip(&groups) {
                flagged += usize::from(gr.score >= botminer_core::template::DEFAULT_BIM_THRESHOLD);
                w.write_record([
                    au.author_id().to_string(),
                    real(gr.score),
                    gr.template_count().to_string(),
                    gr.docs.len().to_string(),
                ])?;
            }
        }
        Method::Bica => {
            let model = bica.as_ref().expect("loaded above");
            if model.dim() != FEATURE_NAMES.len() {
                return Err(Error::Usage(format!("--bica-model must have {} features", FEATURE_NAMES.len())));
            }
            let probs = authors
                .par_iter()
                .map(|au| model.predict_proba(&extract_features(au).to_array()))
                .collect::<Result<Vec<_>, _>>()?;
            w.write_record(["author_id", "bica"])?;
            for (au, p) in authors.iter().zip(probs) {
                flagged += usize::from(p > 0.5);
                w.write_record([au.author_id().to_string(), real(p)])?;
            }
        }
        Method::Biman => unreachable!("handled above"),
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let mut s = Summary::new("detect");
    s.add("method", a.method.name())
        .reads(&stats)
        .add("authors", authors.len())
        .add("flagged", flagged);
    Ok(s)
}

fn ensemble_train(g: &Global, a: &EnsembleTrainArgs) -> Result<Summary> {
    let scores = formats::read_scores(&a.scores)?;
    let labels = formats::read_labels(&a.labels)?;
    let rows: Vec<(String, Vec<f64>)> =
        scores.iter().map(|s| (s.author_id.clone(), s.predictors().to_vec())).collect();
    let (data, _, unlabeled) = formats::labeled_dataset(&rows, &labels, ENSEMBLE_FEATURES.len())?;
    let config = a.forest.config(g.seed);
    let names: Vec<String> = ENSEMBLE_FEATURES.iter().map(|s| s.to_string()).collect();
    let model = fit_forest(&data, config, names.clone())?;
    model_file::save(&model, &a.out)?;

    let (bots, humans) = class_counts(data.labels());
    let mut s = Summary::new("ensemble-train");
    s.add("rows", data.len()).add("bots", bots).add("humans", humans).add("unlabeled", unlabeled);
    if a.folds >= 2 && a.folds <= bots.min(humans) {
        // Out-of-fold probabilities for an honest AUC and threshold.
        let assignment = stratified_folds(data.labels(), a.folds, g.seed);
        let mut oof = vec![0.0; data.len()];
        for fold in 0..a.folds {
            let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != fold).collect();
            let m = fit_forest(&data.subset(&train), config, names.clone())?;
            for i in (0..data.len()).filter(|&i| assignment[i] == fold) {
                oof[i] = m.predict_proba(data.row(i))?;
            }
        }
        let best = select_threshold(&roc_curve(&oof, data.labels())?)?;
        s.add("cv_auc", real(auc(&oof, data.labels())?))
            .add("cv_threshold", real(best.threshold))
            .add("cv_sensitivity", real(best.sensitivity))
            .add("cv_specificity", real(best.specificity));
    }
    Ok(s)
}

fn characterize(g: &Global, a: &CharacterizeArgs) -> Result<Summary> {
    for (name, v) in [
        ("--spike-top3", a.spike_top3),
        ("--continuous-entropy", a.continuous_entropy),
        ("--sync-window8", a.sync_window8),
    ] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Usage(format!("{name} must be in [0, 1], got {v}")));
        }
    }
    let config = ClassifierConfig {
        spike_top3: a.spike_top3,
        continuous_entropy: a.continuous_entropy,
        sync_window8: a.sync_window8,
        min_commits: a.min_commits,
    };
    let (authors, stats) = authors_from(g, &a.input)?;
    let authors = keep_listed(authors, a.authors.as_deref())?;
    let classified = characterize_authors(&authors, &config);

    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["author_id", "class", "total", "entropy_norm", "top3_share", "best_window8_share"])?;
    for (p, class) in &classified {
        w.write_record([
            p.author_id.clone(),
            class.as_str().to_string(),
            p.total.to_string(),
            real(p.entropy_norm),
            real(p.top3_share),
            real(p.best_window8_share),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;

    if let Some(dir) = &a.svg_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (i, (p, _)) in classified.iter().enumerate() {
            let path = dir.join(format!("{:04}-{}.svg", i + 1, file_stem(&p.author_id)));
            std::fs::write(&path, render_radial_svg(p)).map_err(|e| Error::io(&path, e))?;
        }
    }
    let mut s = Summary::new("characterize");
    s.reads(&stats).add("authors", authors.len()).add("classified", classified.len());
    for class in botminer_core::characterize::BotClass::ALL {
        s.add(class.as_str(), classified.iter().filter(|(_, c)| *c == class).count());
    }
    Ok(s)
}

/// A filesystem-safe fragment of an author id.
fn file_stem(author_id: &str) -> String {
    let name = botminer_core::name_match::split_author_id(author_id).0;
    let stem: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .take(40)
        .collect();
    if stem.is_empty() { "author".into() } else { stem }
}

fn filetypes(g: &Global, a: &FiletypesArgs) -> Result<Summary> {
    let table = match &a.table {
        Some(path) => LanguageTable::parse(&crate::io::read_to_string(path)?)?,
        None => LanguageTable::default(),
    };
    let (authors, stats) = authors_from(g, &a.input)?;
    let authors = keep_listed(authors, a.authors.as_deref())?;
    let histogram = file_type_histogram(&authors, &table);
    let mut rows: Vec<(&String, &usize)> = histogram.iter().collect();
    rows.sort_by(|x, y| y.1.cmp(x.1).then_with(|| x.0.cmp(y.0)));

    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["category", "authors"])?;
    for (category, count) in &rows {
        w.write_record([category.as_str(), &count.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let mut s = Summary::new("filetypes");
    s.reads(&stats).add("authors", authors.len()).add("categories", rows.len());
    Ok(s)
}

fn report(a: &ReportArgs) -> Result<Summary> {
    let scores = formats::read_scores(&a.scores)?;
    if scores.is_empty() {
        return Err(Error::format(a.scores.display().to_string(), 1, "no authors"));
    }
    let n = scores.len();
    let share = |k: usize| k as f64 / n as f64;
    let bin = scores.iter().filter(|s| s.bin_flag).count();
    let bim = scores.iter().filter(|s| s.bim_score >= botminer_core::template::DEFAULT_BIM_THRESHOLD).count();
    let bica = scores.iter().filter(|s| s.bica_prob > 0.5).count();
    let verdicts = scores.iter().filter(|s| s.verdict.is_some()).count();
    let ensemble = scores.iter().filter(|s| s.verdict == Some(Label::Bot)).count();

    let mut rows: Vec<(&str, String)> = vec![
        ("authors", n.to_string()),
        ("bin_flagged", bin.to_string()),
        ("bin_share", real(share(bin))),
        ("bim_flagged", bim.to_string()),
        ("bim_share", real(share(bim))),
        ("bica_flagged", bica.to_string()),
        ("bica_share", real(share(bica))),
    ];
    if verdicts > 0 {
        let flagged = ensemble as f64 / verdicts as f64;
        rows.push(("ensemble_flagged", ensemble.to_string()));
        rows.push(("ensemble_share", real(flagged)));
        if let Some(v) = a.verified_fraction {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Usage(format!("--verified-fraction must be in [0, 1], got {v}")));
            }
            rows.push(("prevalence_estimate", real(prevalence_estimate(flagged, v))));
        }
    }
    if let Some((pos, neg)) = a.posterior.posterior()? {
        rows.push(("posterior_if_flagged", real(pos)));
        rows.push(("posterior_if_cleared", real(neg)));
    }
    let mut w = csv::Writer::from_writer(output(&a.out)?);
    w.write_record(["metric", "value"])?;
    for (k, v) in &rows {
        w.write_record([*k, v.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(&a.out, e))?;
    let mut s = Summary::new("report");
    s.add("authors", n);
    Ok(s)
}

fn synth_cmd(g: &Global, a: &SynthArgs) -> Result<Summary> {
    let mut rng = synth::rng(g.seed);
    let labels: Vec<(String, Label)> = match a.kind {
        SynthKind::Corpus => {
            let cfg = synth::CorpusConfig { bots: a.bots, humans: a.humans, ..Default::default() };
            let corpus = synth::corpus(&mut rng, &cfg);
            write_records(output(&a.out)?, &corpus.records).map_err(|e| Error::io(&a.out, e))?;
            corpus.labels
        }
        SynthKind::Ensemble => {
            let rows = synth::ensemble_rows(&mut rng, a.bots, a.humans);
            let scores: Vec<DetectionScores> = rows.iter().map(|r| r.0.clone()).collect();
            formats::write_scores(output(&a.out)?, &scores, None)?;
            rows.into_iter().map(|(s, l)| (s.author_id, l)).collect()
        }
        SynthKind::Features => {
            let rows = synth::feature_rows(&mut rng, a.bots, a.humans);
            let mut w = csv::Writer::from_writer(output(&a.out)?);
            let mut header = vec!["author_id"];
            header.extend(FEATURE_NAMES);
            w.write_record(&header)?;
            let mut labels = Vec::new();
            for (i, (x, l)) in rows.into_iter().enumerate() {
                let id = format!("author-{i}");
                let mut record = vec![id.clone()];
                record.extend(x.iter().map(|v| real(*v)));
                w.write_record(&record)?;
                labels.push((id, l));
            }
            w.flush().map_err(|e| Error::io(&a.out, e))?;
            labels
        }
    };
    if let Some(path) = &a.labels_out {
        let out = output(path)?;
        formats::write_labels(out, labels.iter().map(|(id, l)| (id.as_str(), *l)))?;
    }
    let (bots, humans) = class_counts(&labels.iter().map(|l| l.1).collect::<Vec<_>>());
    let mut s = Summary::new("synth");
    s.add("bots", bots).add("humans", humans);
    Ok(s)
}
