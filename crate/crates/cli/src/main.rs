use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use triplescore::dataset::{load_dataset, LabeledTriple};
use triplescore::pipeline::{self, PipelineConfig, Resources};
use triplescore::{Error, Predicate, SuperClassifier};

#[derive(Parser, Debug)]
#[command(
    name = "triplescore",
    version,
    about = "Score the relevance of (person, relation, value) triples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cross-validate on labeled data and write a model file.
    Train(TrainArgs),
    /// Score unlabeled triples with a trained model.
    Score(ScoreArgs),
    /// Compare a prediction file against a truth file.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
struct ResourceArgs {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kg: Option<PathBuf>,
    #[arg(long)]
    concepts: Option<PathBuf>,
    #[arg(long)]
    demonyms: Option<PathBuf>,
    #[arg(long)]
    vectors: Option<PathBuf>,
    #[arg(long)]
    candidates: Option<PathBuf>,
    #[arg(long)]
    mapping: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Relation of each `--input` file, in the same order. A single value
    /// applies to every input.
    #[arg(long, required = true)]
    predicate: Vec<Predicate>,
    #[arg(long, required = true)]
    input: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    data: DataArgs,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Append the five module scores and the regression score to each row.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Prediction file (`subject<TAB>object<TAB>score`, extra columns ignored).
    #[arg(long)]
    input: PathBuf,
    /// Truth file in the same format.
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |source| {
        Failure::Data(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn build_config(args: &ResourceArgs) -> Result<PipelineConfig, Failure> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(io_failure(path))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let context = path.display().to_string();
        for (line, key, value) in pipeline::parse_key_values(&text, &context)? {
            cfg.set(&key, &value, base).map_err(|e| {
                Failure::Data(Error::Parse {
                    context: context.clone(),
                    line,
                    message: e.to_string(),
                })
            })?;
        }
    }
    let cwd = Path::new("");
    let overrides = [
        ("kg", &args.kg),
        ("concepts", &args.concepts),
        ("demonyms", &args.demonyms),
        ("vectors", &args.vectors),
        ("candidates", &args.candidates),
        ("mapping", &args.mapping),
        ("model", &args.model),
    ];
    for (key, value) in overrides {
        if let Some(path) = value {
            cfg.set(key, &path.to_string_lossy(), cwd)?;
        }
    }
    if let Some(seed) = args.seed {
        cfg.cv.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn model_path(cfg: &PipelineConfig) -> Result<&Path, Failure> {
    cfg.model
        .as_deref()
        .ok_or_else(|| Failure::Usage("a model file is required (--model or `model =` in the config)".into()))
}

fn load_inputs(data: &DataArgs, labeled: bool) -> Result<Vec<LabeledTriple>, Failure> {
    let predicates = match (data.predicate.len(), data.input.len()) {
        (1, n) => vec![data.predicate[0]; n],
        (p, n) if p == n => data.predicate.clone(),
        (p, n) => {
            return Err(Failure::Usage(format!(
                "{p} --predicate values for {n} --input files; give one, or one per input"
            )))
        }
    };
    let mut rows = Vec::new();
    for (path, predicate) in data.input.iter().zip(predicates) {
        rows.extend(load_dataset(path, predicate, labeled)?);
    }
    Ok(rows)
}

fn train(args: &TrainArgs) -> Result<(), Failure> {
    let cfg = build_config(&args.resources)?;
    let model_path = model_path(&cfg)?.to_path_buf();
    let rows = load_inputs(&args.data, true)?;
    let resources = Resources::load(&cfg)?;
    let outcome = pipeline::train(&resources, &rows, &cfg.cv)?;
    fs::write(&model_path, outcome.model.to_text()).map_err(io_failure(&model_path))?;
    print!(
        "{}",
        pipeline::format_cv_report(&outcome.cv.report, cfg.cv.k, outcome.model.threshold.tau())
    );
    log::info!("model written to {}", model_path.display());
    Ok(())
}

fn score(args: &ScoreArgs) -> Result<(), Failure> {
    let cfg = build_config(&args.resources)?;
    let model = SuperClassifier::load(model_path(&cfg)?)?;
    let triples: Vec<_> = load_inputs(&args.data, false)?.into_iter().map(|r| r.triple).collect();
    let resources = Resources::load(&cfg)?;
    let scored = pipeline::score_triples(&resources, &model, &triples, args.trace);
    match &args.output {
        Some(path) => {
            let file = fs::File::create(path).map_err(io_failure(path))?;
            let mut out = BufWriter::new(file);
            pipeline::write_scored(&mut out, &scored)
                .and_then(|_| out.flush())
                .map_err(io_failure(path))?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            pipeline::write_scored(&mut out, &scored).map_err(io_failure(Path::new("<stdout>")))?;
        }
    }
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<(), Failure> {
    let pred = pipeline::load_score_rows(&args.input)?;
    let truth = pipeline::load_score_rows(&args.truth)?;
    print!("{}", pipeline::format_eval(&pipeline::evaluate(&pred, &truth)?));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Train(a) => train(a),
        Command::Score(a) => score(a),
        Command::Eval(a) => eval(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
