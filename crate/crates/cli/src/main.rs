//! `foidl`: learn past-tense programs, evaluate them, and run learning
//! curves.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use foidl_core::{
    builtin_split, evaluate, learn, split_trials, synthesize_corpus, BackgroundKB, Corpus, CsvRow,
    LearnMode, LearnedProgram, LearnerParams, PredicateSignature, SolveBudget, SplitSpec,
    CSV_HEADER,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "foidl",
    version,
    about = "First-order decision-list learner for word inflection"
)]
struct Cli {
    /// More log output on stderr (-v info, -vv debug, -vvv trace).
    #[arg(short, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a program from a corpus and write it to a file.
    Learn(LearnArgs),
    /// Score a learned program on a test corpus.
    Eval(EvalArgs),
    /// Learning curves over nested training samples, as CSV.
    Curve(CurveArgs),
    /// Write a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Foidl,
    Ifoil,
}

impl From<ModeArg> for LearnMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Foidl => LearnMode::DecisionList,
            ModeArg::Ifoil => LearnMode::Unordered,
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Answers enumerated per query.
    #[arg(long, default_value_t = SolveBudget::default().max_answers)]
    max_answers: usize,
    /// Resolution steps per query.
    #[arg(long, default_value_t = SolveBudget::default().max_steps)]
    max_steps: u64,
    /// Proof depth per query.
    #[arg(long, default_value_t = SolveBudget::default().max_depth)]
    max_depth: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SolveBudget> {
        SolveBudget::new(self.max_answers, self.max_steps, self.max_depth)
            .context("--max-answers, --max-steps and --max-depth must be positive")
    }
}

#[derive(Args)]
struct LearnerArgs {
    /// Size of the term universe in the implicit negative estimate u^v - p.
    #[arg(long, default_value_t = LearnerParams::default().u)]
    u: u64,
    /// Positives a clause must cover.
    #[arg(long, default_value_t = LearnerParams::default().min_clause_coverage)]
    min_cover: usize,
    /// Accuracy a clause needs to be kept.
    #[arg(long, default_value_t = LearnerParams::default().min_clause_accuracy)]
    min_accuracy: f64,
    /// Literals without gain that may be added in a row.
    #[arg(long, default_value_t = LearnerParams::default().weak_literal_limit)]
    weak_limit: usize,
    #[command(flatten)]
    budget: BudgetArgs,
}

impl LearnerArgs {
    fn params(&self, mode: LearnMode) -> Result<LearnerParams> {
        let params = LearnerParams {
            u: self.u,
            min_clause_coverage: self.min_cover,
            min_clause_accuracy: self.min_accuracy,
            weak_literal_limit: self.weak_limit,
            budget: self.budget.budget()?,
            ..LearnerParams::default()
        }
        .with_mode(mode);
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
struct LearnArgs {
    /// Training corpus (`base<TAB>past` per line).
    #[arg(long)]
    train: PathBuf,
    /// Background definitions; defaults to the built-in `split/3`.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Where to write the learned program.
    #[arg(long)]
    out: PathBuf,
    /// `foidl` learns a decision list, `ifoil` cut-free clauses.
    #[arg(long, value_enum, default_value = "foidl")]
    mode: ModeArg,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Learned program file.
    #[arg(long)]
    program: PathBuf,
    /// Test corpus.
    #[arg(long)]
    test: PathBuf,
    /// Background definitions; defaults to the built-in `split/3`.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Append a CSV row (header first if the file is new).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Print the verdict for every test example.
    #[arg(long)]
    verdicts: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Corpus to sample from.
    #[arg(long)]
    train: PathBuf,
    /// Background definitions; defaults to the built-in `split/3`.
    #[arg(long)]
    background: Option<PathBuf>,
    /// CSV output; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Modes to run, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "foidl,ifoil")]
    mode: Vec<ModeArg>,
    /// Training sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    train_sizes: Vec<usize>,
    /// Independent train/test splits.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Held-out test examples per trial.
    #[arg(long)]
    test_size: usize,
    /// Seed for sampling the splits.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Leave `wall_seconds` empty so identical seeds give identical files.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    learner: LearnerArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of pairs.
    #[arg(long)]
    count: usize,
    /// Share of pairs taken from the irregular verb table.
    #[arg(long, default_value_t = 0.15)]
    irregular_fraction: f64,
    /// Seed for the generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_background(path: Option<&Path>) -> Result<BackgroundKB> {
    match path {
        Some(p) => {
            BackgroundKB::load(p).with_context(|| format!("loading background {}", p.display()))
        }
        None => Ok(builtin_split()),
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    Corpus::load(path).with_context(|| format!("loading corpus {}", path.display()))
}

fn cmd_learn(args: &LearnArgs) -> Result<()> {
    let corpus = load_corpus(&args.train)?;
    let kb = load_background(args.background.as_deref())?;
    let params = args.learner.params(args.mode.into())?;
    let start = Instant::now();
    let program = learn(
        corpus.examples(),
        &kb,
        &PredicateSignature::past_tense(),
        &params,
    )?;
    log::info!("learned in {:.2}s", start.elapsed().as_secs_f64());
    if program.truncated_queries > 0 {
        log::info!(
            "{} query evaluations hit the solve budget during learning",
            program.truncated_queries
        );
    }
    fs::write(&args.out, program.to_text())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let c = foidl_core::complexity(&program);
    println!(
        "rules {} literals {} memorized {}",
        c.rule_count, c.literal_count, c.memorized_count
    );
    Ok(())
}

fn append_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    if fresh {
        writeln!(file, "{CSV_HEADER}")?;
    }
    for row in rows {
        writeln!(file, "{row}")?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let text = fs::read_to_string(&args.program)
        .with_context(|| format!("reading {}", args.program.display()))?;
    let program = LearnedProgram::parse(&text)
        .with_context(|| format!("parsing {}", args.program.display()))?;
    let test = load_corpus(&args.test)?;
    let kb = load_background(args.background.as_deref())?;
    kb.check_target(&program.target)?;
    let report = evaluate(&program, &kb, test.examples(), args.budget.budget()?);
    for w in &report.warnings {
        log::warn!("{w}");
    }
    let out = io::stdout();
    let mut out = out.lock();
    if args.verdicts {
        for (ex, verdict) in &report.verdicts {
            writeln!(out, "{}\t{}\t{verdict}", ex.input_text(), ex.output_text())?;
        }
    }
    writeln!(
        out,
        "accuracy {:.6} ({}/{}) rules {} literals {} memorized {} warnings {}",
        report.accuracy,
        report.n_correct,
        report.n_test,
        report.rule_count,
        report.literal_count,
        report.memorized_count,
        report.warnings.len()
    )?;
    if let Some(csv) = &args.csv {
        append_csv(csv, &[CsvRow::new(0, 0, program.mode, &report, None)])?;
    }
    Ok(())
}

fn cmd_curve(args: &CurveArgs) -> Result<()> {
    if args.mode.is_empty() {
        bail!("--mode needs at least one of foidl, ifoil");
    }
    let corpus = load_corpus(&args.train)?;
    let kb = load_background(args.background.as_deref())?;
    let spec = SplitSpec {
        train_sizes: args.train_sizes.clone(),
        test_size: args.test_size,
        trials: args.trials,
        seed: args.seed,
    };
    let trials = split_trials(&corpus, &spec)?;
    let modes: Vec<LearnMode> = args.mode.iter().map(|&m| m.into()).collect();
    let params: Vec<LearnerParams> = modes
        .iter()
        .map(|&m| args.learner.params(m))
        .collect::<Result<_>>()?;
    let target = PredicateSignature::past_tense();
    // Rows in (trial, size, mode) order.
    let mut jobs = Vec::new();
    for (t, trial) in trials.iter().enumerate() {
        for s in 0..trial.train.len() {
            jobs.extend((0..modes.len()).map(|m| (t, s, m)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()?;
    let rows: Vec<CsvRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(t, s, m)| {
                let trial = &trials[t];
                let (size, train) = &trial.train[s];
                let start = Instant::now();
                let program = learn(train, &kb, &target, &params[m])?;
                let report = evaluate(&program, &kb, &trial.test, params[m].budget);
                let seconds = start.elapsed().as_secs_f64();
                log::info!(
                    "trial {} size {size} {}: accuracy {:.3} in {seconds:.1}s",
                    trial.index,
                    modes[m],
                    report.accuracy
                );
                for w in &report.warnings {
                    log::warn!("trial {} size {size} {}: {w}", trial.index, modes[m]);
                }
                Ok(CsvRow::new(
                    trial.index,
                    *size,
                    modes[m],
                    &report,
                    (!args.no_timing).then_some(seconds),
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    match &args.csv {
        Some(path) => {
            let mut text = format!("{CSV_HEADER}\n");
            for row in &rows {
                text.push_str(&format!("{row}\n"));
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let out = io::stdout();
            let mut out = out.lock();
            writeln!(out, "{CSV_HEADER}")?;
            for row in &rows {
                writeln!(out, "{row}")?;
            }
        }
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let corpus = synthesize_corpus(args.count, args.irregular_fraction, args.seed)?;
    match &args.out {
        Some(path) => corpus
            .save(path)
            .with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(corpus.to_text().as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    let result = match &cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
