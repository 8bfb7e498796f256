//! `mealy`: load, classify, analyze, sample and experiment on Mealy automata.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mealy_core::classify::{classify, classify_strict};
use mealy_core::element::DEFAULT_IDENTITY_BUDGET;
use mealy_core::exec::Execution;
use mealy_core::experiments::{run, ExperimentConfig, ExperimentKind, ExperimentReport, Mode};
use mealy_core::io::{parse_automaton, to_dot, write_automaton};
use mealy_core::order::{analyze, certify_element, OrderBudget, OrderCertificate, StateCertificate};
use mealy_core::sample::{DegreeTarget, SamplerClass, SamplerSpec, DEFAULT_MAX_REJECTS, RNG_IDENTITY};
use mealy_core::{Element, Error, MealyAutomaton};

#[derive(Parser)]
#[command(
    name = "mealy",
    version,
    about = "Mealy automaton groups: classes, orders, sampling and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report invertibility, reversibility, bireversibility, reset and activity.
    Classify {
        input: PathBuf,
        /// Reject automata where a state other than the declared identity acts trivially.
        #[arg(long)]
        strict: bool,
        /// Sections explored per identity test in strict mode.
        #[arg(long, default_value_t = DEFAULT_IDENTITY_BUDGET, value_parser = positive)]
        identity_budget: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Order certificate for a generator, a group word, or every state.
    Order {
        input: PathBuf,
        /// Generator name; omit with --word or --all.
        generator: Option<String>,
        /// Space-separated word over state names, `q^-1` for inverses.
        #[arg(long, conflicts_with_all = ["generator", "all"])]
        word: Option<String>,
        /// Certify every state.
        #[arg(long, conflicts_with = "generator")]
        all: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw automata uniformly from a class.
    ///
    /// Pol classes are sampled by rejection from all automata with a
    /// designated identity state; this is practical only at small sizes.
    Sample {
        #[arg(value_enum)]
        class: ClassArg,
        /// Number of states (ignored by the reset classes, which use k).
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_parser = positive)]
        k: usize,
        /// Activity degree for `pol`.
        #[arg(long, default_value_t = 0)]
        degree: i32,
        /// Sample activity degree at most `degree` instead of exactly.
        #[arg(long)]
        at_most: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// First trial index; automaton i uses index `trial_index + i`.
        #[arg(long, default_value_t = 0)]
        trial_index: u64,
        #[arg(long, default_value_t = 1, value_parser = positive)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_REJECTS)]
        max_rejects: u64,
        /// Output file (single automaton) or directory (with --count > 1).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment and write its report and trial table.
    Experiment {
        /// Experiment configuration document; flags below override its seed.
        #[arg(long, conflicts_with = "kind")]
        config: Option<PathBuf>,
        #[arg(value_enum, required_unless_present = "config")]
        kind: Option<KindArg>,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        k: usize,
        #[arg(long, default_value_t = 10_000, value_parser = positive_u64)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Sampled)]
        mode: ModeArg,
        #[arg(long)]
        seed: Option<u64>,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
        /// Report path; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// CSV table with one row per trial.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Re-emit an automaton in the native format or as DOT.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Native)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, value_parser = positive)]
    signalizer_vertices: Option<usize>,
    #[arg(long, value_parser = positive)]
    identity_budget: Option<usize>,
    #[arg(long, value_parser = positive)]
    power_cap: Option<usize>,
    #[arg(long, value_parser = positive)]
    word_length_cap: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> OrderBudget {
        let d = OrderBudget::default();
        OrderBudget {
            signalizer_vertices: self.signalizer_vertices.unwrap_or(d.signalizer_vertices),
            identity_sections: self.identity_budget.unwrap_or(d.identity_sections),
            power_cap: self.power_cap.unwrap_or(d.power_cap),
            word_length_cap: self.word_length_cap.unwrap_or(d.word_length_cap),
            ..d
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    InvertibleReversible,
    ResetUnfolded,
    ResetMinimal,
    Pol,
    Pol0Conditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Bireversible,
    Reset,
    Bounded,
    FinitaryFraction,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Native,
    Dot,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_u64(s: &str) -> Result<u64, String> {
    positive(s).map(|v| v as u64)
}

enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse { .. } | Error::Domain(_)) | Failure::Usage(_) => 2,
            Failure::Core(Error::Invariant(_)) => 3,
            Failure::Core(Error::Capability(_)) => 4,
            Failure::Core(Error::Size { .. } | Error::SamplingExhausted { .. }) => 5,
            Failure::Core(Error::Internal(_)) | Failure::Io(..) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Usage(m) => m.clone(),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> CliResult<MealyAutomaton> {
    Ok(parse_automaton(&read(path)?)?)
}

fn emit(output: Option<&Path>, text: &str) -> CliResult {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e)),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

fn echo_seed(seed: u64) {
    eprintln!("seed {seed} rng {RNG_IDENTITY}");
}

#[derive(Serialize)]
struct ElementCertificate {
    element: String,
    #[serde(flatten)]
    certificate: OrderCertificate,
}

fn cmd_order(
    input: &Path,
    generator: Option<String>,
    word: Option<String>,
    all: bool,
    budget: &OrderBudget,
) -> CliResult<String> {
    let a = load(input)?;
    if all {
        let certs: Vec<StateCertificate> = analyze(&a, budget)?;
        return Ok(json(&certs));
    }
    let text = match (generator, word) {
        (Some(g), None) => {
            if a.state_index(&g).is_none() {
                return Err(Error::Domain(format!("unknown generator {g:?}")).into());
            }
            g
        }
        (None, Some(w)) => w,
        _ => return Err(Failure::Usage("give a generator, --word or --all".into())),
    };
    let t = Element::parse(&a, &text)?;
    let certificate = certify_element(&a, &t, budget)?;
    let element = t.display(&a).to_string();
    Ok(json(&ElementCertificate { element, certificate }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sample(
    class: ClassArg,
    n: usize,
    k: usize,
    degree: i32,
    at_most: bool,
    seed: u64,
    trial_index: u64,
    count: usize,
    max_rejects: u64,
    output: Option<&Path>,
) -> CliResult {
    let class = match class {
        ClassArg::InvertibleReversible => SamplerClass::InvertibleReversible,
        ClassArg::ResetUnfolded => SamplerClass::ResetUnfolded,
        ClassArg::ResetMinimal => SamplerClass::ResetMinimal,
        ClassArg::Pol if at_most => SamplerClass::Pol(DegreeTarget::at_most(degree)),
        ClassArg::Pol => SamplerClass::Pol(DegreeTarget::exactly(degree)),
        ClassArg::Pol0Conditional => SamplerClass::Pol0Conditional,
    };
    let spec = SamplerSpec {
        max_rejects,
        ..SamplerSpec::new(class, n, k, seed)
    };
    echo_seed(seed);
    if count == 1 {
        let a = spec.with_trial(trial_index).sample()?;
        return emit(output, &write_automaton(&a));
    }
    let dir = output.ok_or_else(|| Failure::Usage("--count above 1 needs an output directory".into()))?;
    fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    for i in 0..count as u64 {
        let a = spec.with_trial(trial_index + i).sample()?;
        emit(
            Some(&dir.join(format!("sample-{}.json", trial_index + i))),
            &write_automaton(&a),
        )?;
    }
    Ok(())
}

fn trial_table(report: &ExperimentReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = std::iter::once("trial_index").chain(report.columns.iter().map(String::as_str));
    let csv_err = |e: csv::Error| Failure::Core(Error::Internal(e.to_string()));
    w.write_record(header).map_err(csv_err)?;
    for r in &report.records {
        let row = std::iter::once(r.trial_index.to_string()).chain(r.flags.iter().map(|&f| u8::from(f).to_string()));
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Core(Error::Internal(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv of ascii fields"))
}

fn seed_or_generated(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn run_cli(cli: Cli) -> CliResult {
    match cli.command {
        Command::Classify {
            input,
            strict,
            identity_budget,
            output,
        } => {
            let a = load(&input)?;
            let report = if strict {
                classify_strict(&a, identity_budget)?
            } else {
                classify(&a)?
            };
            emit(output.as_deref(), &json(&report))
        }
        Command::Order {
            input,
            generator,
            word,
            all,
            budget,
            output,
        } => {
            let text = cmd_order(&input, generator, word, all, &budget.budget())?;
            emit(output.as_deref(), &text)
        }
        Command::Sample {
            class,
            n,
            k,
            degree,
            at_most,
            seed,
            trial_index,
            count,
            max_rejects,
            output,
        } => cmd_sample(
            class,
            n,
            k,
            degree,
            at_most,
            seed_or_generated(seed),
            trial_index,
            count,
            max_rejects,
            output.as_deref(),
        ),
        Command::Experiment {
            config,
            kind,
            n,
            k,
            trials,
            mode,
            seed,
            sequential,
            output,
            table,
        } => {
            let mut config = match (config, kind) {
                (Some(path), _) => {
                    serde_json::from_str::<ExperimentConfig>(&read(&path)?).map_err(|e| Error::Parse {
                        message: e.to_string(),
                        position: Some((e.line(), e.column())),
                    })?
                }
                (None, Some(kind)) => {
                    let kind = match kind {
                        KindArg::Bireversible => ExperimentKind::Bireversible,
                        KindArg::Reset => ExperimentKind::Reset,
                        KindArg::Bounded => ExperimentKind::Bounded,
                        KindArg::FinitaryFraction => ExperimentKind::FinitaryFraction,
                    };
                    let mode = match mode {
                        ModeArg::Exact => Mode::Exact,
                        ModeArg::Sampled => Mode::Sampled,
                    };
                    ExperimentConfig::new(kind, n, k, trials, mode, seed_or_generated(seed))
                }
                (None, None) => return Err(Failure::Usage("give an experiment kind or --config".into())),
            };
            if let Some(seed) = seed {
                config.sampler.seed = seed;
            }
            if sequential {
                config.execution = Execution::Sequential;
            }
            echo_seed(config.sampler.seed);
            let report = run(&config)?;
            if let Some(path) = table {
                emit(Some(&path), &trial_table(&report)?)?;
            }
            emit(output.as_deref(), &json(&report))
        }
        Command::Convert { input, format, output } => {
            let a = load(&input)?;
            let text = match format {
                Format::Native => write_automaton(&a),
                Format::Dot => {
                    let name = input.file_stem().map(|s| s.to_string_lossy().into_owned());
                    to_dot(&a, name.as_deref().unwrap_or("automaton"))
                }
            };
            emit(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
