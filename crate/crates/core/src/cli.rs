//! The `airsense` command line.
//!
//! Exit status is 0 on success, 2 for usage errors (bad flags, missing input
//! files) and 1 for runtime failures, which print a single
//! `error[CODE]: message` line to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::audio::{frame_start_ms, read_wav, write_wav, FRAME_LEN, PIPELINE_SAMPLE_RATE};
use crate::dsp::{feature_len, CANDIDATE_CUTOFFS, DEFAULT_CUTOFF_HZ};
use crate::error::{Error, Result};
use crate::features::{
    labeled_samples, load_samples, load_truth, save_samples, save_truth, to_dataset, train_test_split, ExtractOptions,
    LabeledSample, Target,
};
use crate::gbdt::{load_model, save_model, GbdtModel, HyperParams, Task};
use crate::metrics::{classification_report, mse, RegressionReport};
use crate::mps::MpsParams;
use crate::pipeline::{process_clip, sweep_cutoff, DutyCycle, PipelineConfig};
use crate::privacy::{privacy_report, DEFAULT_SPLIT_HZ};
use crate::silence::{SilenceConfig, DEFAULT_THRESHOLD_RMS};
use crate::synth::{synth_scene, Corpus, SceneSpec};

#[derive(Debug, Parser)]
#[command(name = "airsense", version, about = "Acoustic vent airflow sensing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a scene description to a WAV clip and per-frame labels.
    Synth(SynthArgs),
    /// Extract labeled feature rows from a clip.
    Features(FeaturesArgs),
    /// Fit a boosted-tree model on feature rows.
    Train(TrainArgs),
    /// Run the full pipeline on a clip.
    Predict(PredictArgs),
    /// Score a model on feature rows, or pipeline output against labels.
    Eval(EvalArgs),
    /// Train and score one regressor per low-pass cutoff.
    Sweep(SweepArgs),
    /// Write the low-passed clip and report the energy removed.
    Privacy(PrivacyArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, value_parser = existing_file)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// Replaces the seed in the scene file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SignalArgs {
    #[arg(long, value_parser = cutoff)]
    cutoff: Option<f64>,
    #[arg(long = "silence-threshold", value_parser = threshold, default_value_t = DEFAULT_THRESHOLD_RMS)]
    silence_threshold: f64,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[arg(long = "in", value_parser = existing_file)]
    input: PathBuf,
    #[arg(long, value_parser = existing_file)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    signal: SignalArgs,
    /// Drop frames louder than the silence threshold.
    #[arg(long)]
    gate: bool,
    /// Keep frames next to a change in the airflow label.
    #[arg(long = "keep-transitions")]
    keep_transitions: bool,
}

#[derive(Debug, Args)]
struct TreeArgs {
    #[arg(long, default_value_t = HyperParams::default().n_trees)]
    trees: usize,
    #[arg(long, default_value_t = HyperParams::default().max_depth)]
    depth: usize,
    #[arg(long = "min-split", default_value_t = HyperParams::default().min_samples_split)]
    min_split: usize,
    #[arg(long, default_value_t = HyperParams::default().learning_rate)]
    lr: f64,
}

impl TreeArgs {
    fn params(&self) -> HyperParams {
        HyperParams {
            n_trees: self.trees,
            max_depth: self.depth,
            min_samples_split: self.min_split,
            learning_rate: self.lr,
        }
    }
}

#[derive(Debug, Args)]
struct HoldoutArgs {
    /// Fraction of rows held out for evaluation.
    #[arg(long, default_value_t = 0.0, value_parser = fraction)]
    holdout: f64,
    /// Seed of the holdout shuffle.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_parser = task)]
    task: Task,
    #[arg(long, required = true, num_args = 1.., value_parser = existing_file)]
    features: Vec<PathBuf>,
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    trees: TreeArgs,
    #[command(flatten)]
    holdout: HoldoutArgs,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long = "model-r")]
    model_r: PathBuf,
    #[arg(long = "model-c")]
    model_c: PathBuf,
    #[arg(long = "in", value_parser = existing_file)]
    input: PathBuf,
    /// Per-frame predictions; smoothed batches go next to it as `*.mps.csv`.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    signal: SignalArgs,
    #[arg(long, value_parser = mps, conflicts_with = "no_mps")]
    mps: Option<MpsParams>,
    #[arg(long = "no-mps")]
    no_mps: bool,
    /// `sense_s,interval_s`
    #[arg(long, value_parser = duty)]
    duty: Option<DutyCycle>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Model to score against `--features`.
    #[arg(long, requires = "features", conflicts_with_all = ["input", "labels"])]
    model: Option<PathBuf>,
    #[arg(long, num_args = 1.., value_parser = existing_file)]
    features: Vec<PathBuf>,
    /// Per-frame pipeline output to score against `--labels`.
    #[arg(long = "in", requires = "labels", value_parser = existing_file)]
    input: Option<PathBuf>,
    #[arg(long, value_parser = existing_file)]
    labels: Option<PathBuf>,
    #[command(flatten)]
    holdout: HoldoutArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Training scenes.
    #[arg(long, value_parser = existing_file)]
    spec: PathBuf,
    /// Held-out scenes.
    #[arg(long = "test-spec", value_parser = existing_file)]
    test_spec: PathBuf,
    /// Cutoffs to sweep, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = cutoff)]
    cutoff: Vec<f64>,
    /// Result CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    trees: TreeArgs,
}

#[derive(Debug, Args)]
struct PrivacyArgs {
    #[arg(long = "in", value_parser = existing_file)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_parser = cutoff, default_value_t = DEFAULT_CUTOFF_HZ)]
    cutoff: f64,
    #[arg(long = "split-hz", default_value_t = DEFAULT_SPLIT_HZ)]
    split_hz: f64,
}

fn existing_file(s: &str) -> std::result::Result<PathBuf, String> {
    let path = PathBuf::from(s);
    if path.is_file() {
        Ok(path)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn cutoff(s: &str) -> std::result::Result<f64, String> {
    let hz: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    feature_len(hz).map_err(|e| e.to_string())?;
    Ok(hz)
}

fn threshold(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    SilenceConfig::new(v).map(|c| c.threshold_rms).map_err(|e| e.to_string())
}

fn fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be in [0, 1): {s}"))
    }
}

fn task(s: &str) -> std::result::Result<Task, String> {
    s.parse()
}

/// `n=25,p=5,eps=0.5`; omitted keys keep their defaults.
fn mps(s: &str) -> std::result::Result<MpsParams, String> {
    let mut params = MpsParams::default();
    for part in s.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got '{part}'"))?;
        let bad = || format!("bad value for {key}: '{value}'");
        match key.trim() {
            "n" => params.n = value.trim().parse().map_err(|_| bad())?,
            "p" => params.p = value.trim().parse().map_err(|_| bad())?,
            "eps" => params.epsilon = value.trim().parse().map_err(|_| bad())?,
            other => return Err(format!("unknown MPS key '{other}' (expected n, p, eps)")),
        }
    }
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

fn duty(s: &str) -> std::result::Result<DutyCycle, String> {
    let (sense, interval) = s.split_once(',').ok_or_else(|| format!("expected sense_s,interval_s, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("not a number: '{v}'"));
    DutyCycle::new(parse(sense)?, parse(interval)?).map_err(|e| e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.to_string().replace('\n', " "));
            1
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Features(a) => features(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Privacy(a) => privacy(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn synth(a: SynthArgs) -> Result<()> {
    let mut spec = SceneSpec::load(&a.spec)?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    println!(
        "# synth spec={} seed={} duration_s={} gain_per_mps={} segments={} interference={}",
        a.spec.display(),
        spec.seed,
        spec.duration_s,
        spec.gain_per_mps,
        spec.flow.len(),
        spec.interference.len()
    );
    let (clip, truth) = synth_scene(&spec)?;
    write_wav(&a.out, &clip)?;
    save_truth(&a.labels, &truth)?;
    println!("wrote {} samples, {} labeled frames", clip.len(), truth.len());
    Ok(())
}

fn features(a: FeaturesArgs) -> Result<()> {
    let cutoff_hz = a.signal.cutoff.unwrap_or(DEFAULT_CUTOFF_HZ);
    let opts = ExtractOptions {
        gate: a.gate.then(|| SilenceConfig::new(a.signal.silence_threshold)).transpose()?,
        skip_transitions: !a.keep_transitions,
    };
    println!(
        "# features in={} labels={} cutoff_hz={} gate={} silence_threshold={} skip_transitions={}",
        a.input.display(),
        a.labels.display(),
        cutoff_hz,
        a.gate,
        a.signal.silence_threshold,
        opts.skip_transitions
    );
    let clip = read_wav(&a.input)?;
    let truth = load_truth(&a.labels)?;
    let samples = labeled_samples(&clip, &truth, cutoff_hz, &opts)?;
    save_samples(&a.out, &samples)?;
    println!("wrote {} rows of {} features", samples.len(), feature_len(cutoff_hz)?);
    Ok(())
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<LabeledSample>> {
    let mut all = Vec::new();
    for path in paths {
        all.extend(load_samples(path)?);
    }
    Ok(all)
}

fn target(task: Task) -> Target {
    match task {
        Task::Classify => Target::VentOn,
        Task::Regress => Target::Airflow,
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let hp = a.trees.params();
    hp.validate()?;
    println!(
        "# train task={} trees={} depth={} min_split={} lr={} holdout={} seed={} features={}",
        a.task.as_str(),
        hp.n_trees,
        hp.max_depth,
        hp.min_samples_split,
        hp.learning_rate,
        a.holdout.holdout,
        a.holdout.seed,
        join_paths(&a.features)
    );
    let samples = load_all(&a.features)?;
    let (train, _) = train_test_split(&samples, a.holdout.holdout, a.holdout.seed)?;
    let data = to_dataset(&train, target(a.task))?;
    let model = GbdtModel::fit(a.task, &data, &hp)?;
    save_model(&model, &a.model)?;
    println!("trained on {} rows, {} features, cutoff {} Hz", data.len(), model.n_features, model.cutoff_hz);
    Ok(())
}

fn join_paths(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")
}

/// `preds.csv` becomes `preds.mps.csv`.
pub fn smoothed_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.mps.csv"))
}

fn predict(a: PredictArgs) -> Result<()> {
    let regressor = load_model(&a.model_r)?;
    let classifier = load_model(&a.model_c)?;
    let cutoff_hz = a.signal.cutoff.unwrap_or(regressor.cutoff_hz);
    if cutoff_hz != regressor.cutoff_hz {
        return Err(Error::ModelMismatch(format!(
            "--cutoff {cutoff_hz} but the regressor was trained at {} Hz",
            regressor.cutoff_hz
        )));
    }
    let cfg = PipelineConfig {
        cutoff_hz,
        silence: SilenceConfig::new(a.signal.silence_threshold)?,
        mps: if a.no_mps { None } else { Some(a.mps.unwrap_or_default()) },
        duty: a.duty,
    };
    println!("# predict in={} {cfg}", a.input.display());
    let clip = read_wav(&a.input)?;
    let series = process_clip(&clip, &cfg, &classifier, &regressor)?;
    let mut w = create(&a.out)?;
    series.write_naive_csv(&mut w)?;
    w.flush()?;
    if cfg.mps.is_some() {
        let mut w = create(&smoothed_path(&a.out))?;
        series.write_smoothed_csv(&mut w)?;
        w.flush()?;
    }
    let s = series.stats;
    let failed = series.smoothed.iter().filter(|b| b.outcome.value().is_none()).count();
    println!(
        "frames total={} gated_out={} duty_skipped={} processed={} batches={} failed_batches={}",
        s.total,
        s.gated_out,
        s.duty_skipped,
        s.processed,
        series.smoothed.len(),
        failed
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    match (&a.model, &a.input) {
        (Some(model), _) => eval_model(model, &a.features, &a.holdout),
        (None, Some(input)) => eval_predictions(input, a.labels.as_deref().expect("clap requires labels")),
        (None, None) => Err(Error::InvalidSpec("eval needs --model with --features, or --in with --labels".into())),
    }
}

fn eval_model(path: &Path, features: &[PathBuf], holdout: &HoldoutArgs) -> Result<()> {
    println!(
        "# eval model={} features={} holdout={} seed={}",
        path.display(),
        join_paths(features),
        holdout.holdout,
        holdout.seed
    );
    let model = load_model(path)?;
    let samples = load_all(features)?;
    let rows =
        if holdout.holdout > 0.0 { train_test_split(&samples, holdout.holdout, holdout.seed)?.1 } else { samples };
    let data = to_dataset(&rows, target(model.task))?;
    let pred = data.rows().iter().map(|r| model.predict(r)).collect::<Result<Vec<_>>>()?;
    println!("rows {}", data.len());
    match model.task {
        Task::Classify => {
            let labels: Vec<u8> = pred.iter().map(|&p| u8::from(p >= 0.5)).collect();
            let truth: Vec<u8> = rows.iter().map(|s| s.vent_on).collect();
            println!("{}", classification_report(&labels, &truth)?);
        }
        Task::Regress => println!("{}", RegressionReport::compute(&pred, data.targets())?),
    }
    Ok(())
}

fn read_naive(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> =
        r.headers().map_err(|e| Error::MalformedCsv(e.to_string()))?.iter().map(str::to_string).collect();
    if header != ["t_ms", "vent_prob", "airflow_naive"] {
        return Err(Error::MalformedCsv(format!("unexpected prediction header: {}", header.join(","))));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let num = |i: usize| {
            record[i].parse::<f64>().map_err(|_| Error::MalformedCsv(format!("bad number {:?}", &record[i])))
        };
        rows.push((num(0)?, num(1)?, num(2)?));
    }
    Ok(rows)
}

fn eval_predictions(input: &Path, labels: &Path) -> Result<()> {
    println!("# eval in={} labels={}", input.display(), labels.display());
    let rows = read_naive(input)?;
    let truth = load_truth(labels)?;
    let frame_ms = frame_start_ms(1, FRAME_LEN, PIPELINE_SAMPLE_RATE);
    let label_of = |t_ms: f64| {
        let index = (t_ms / frame_ms).round() as usize;
        truth.frames.get(index).copied().ok_or(Error::LengthMismatch { left: index + 1, right: truth.len() })
    };
    let (mut pred_on, mut true_on, mut pred_flow, mut true_flow) = (vec![], vec![], vec![], vec![]);
    for &(t_ms, prob, flow) in &rows {
        let label = label_of(t_ms)?;
        pred_on.push(u8::from(prob >= 0.5));
        true_on.push(label.vent_on);
        pred_flow.push(flow);
        true_flow.push(label.airflow_mps);
    }
    println!("frames {}", rows.len());
    println!("{}", classification_report(&pred_on, &true_on)?);
    println!("naive mse {:.6}", mse(&pred_flow, &true_flow)?);

    let smoothed = smoothed_path(input);
    if smoothed.is_file() {
        let batches = read_smoothed(&smoothed)?;
        let (mut pred, mut target, mut failed) = (vec![], vec![], 0);
        for (start, end, value) in batches {
            let Some(v) = value else {
                failed += 1;
                continue;
            };
            let span: Vec<f64> =
                rows.iter().zip(&true_flow).filter(|((t, _, _), _)| *t >= start && *t < end).map(|(_, &y)| y).collect();
            if span.is_empty() {
                return Err(Error::MalformedCsv(format!("batch {start}-{end} covers no frames")));
            }
            pred.push(v);
            target.push(span.iter().sum::<f64>() / span.len() as f64);
        }
        if pred.is_empty() {
            println!("smoothed mse n/a (failed batches {failed})");
        } else {
            println!("smoothed mse {:.6} (batches {}, failed {failed})", mse(&pred, &target)?, pred.len());
        }
    }
    Ok(())
}

fn read_smoothed(path: &Path) -> Result<Vec<(f64, f64, Option<f64>)>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::MalformedCsv(e.to_string()))?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let bad = || Error::MalformedCsv(format!("bad smoothed row {:?}", record));
        let (start, end) = record[1].split_once('-').ok_or_else(bad)?;
        let value = match &record[2] {
            "FAIL" => None,
            v => Some(v.parse::<f64>().map_err(|_| bad())?),
        };
        out.push((start.parse().map_err(|_| bad())?, end.parse().map_err(|_| bad())?, value));
    }
    Ok(out)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let hp = a.trees.params();
    hp.validate()?;
    let cutoffs = if a.cutoff.is_empty() { CANDIDATE_CUTOFFS.to_vec() } else { a.cutoff.clone() };
    println!(
        "# sweep spec={} test_spec={} cutoffs={} trees={} depth={} min_split={} lr={}",
        a.spec.display(),
        a.test_spec.display(),
        cutoffs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
        hp.n_trees,
        hp.max_depth,
        hp.min_samples_split,
        hp.learning_rate
    );
    let train = Corpus::load(&a.spec)?.synthesize()?;
    let test = Corpus::load(&a.test_spec)?.synthesize()?;
    let rows = sweep_cutoff(&train, &test, &cutoffs, &hp, &ExtractOptions::default())?;

    let mut out: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "cutoff_hz,train_mse,test_mse")?;
    for row in &rows {
        writeln!(out, "{},{},{}", row.cutoff_hz, row.train_mse, row.test_mse)?;
    }
    out.flush()?;
    Ok(())
}

fn privacy(a: PrivacyArgs) -> Result<()> {
    println!(
        "# privacy in={} out={} cutoff_hz={} split_hz={}",
        a.input.display(),
        a.out.display(),
        a.cutoff,
        a.split_hz
    );
    let clip = read_wav(&a.input)?;
    let (filtered, report) = privacy_report(&clip, a.cutoff, a.split_hz)?;
    write_wav(&a.out, &filtered)?;
    println!("{report}");
    Ok(())
}
