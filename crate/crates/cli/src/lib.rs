//! Subcommands of the `movelearn` tool.
//!
//! Each `cmd_*` function returns the process exit code: 0 ok, 1 I/O error,
//! 2 malformed input, 3 latency budget breach. Diagnostics go to the `err`
//! writer so tests can run them in-process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use movelearn_core::autopilot;
use movelearn_core::content::{gen_question, write_bank, QuestionKind};
use movelearn_core::game::{EndCondition, GameMode};
use movelearn_core::landmark::LandmarkFrame;
use movelearn_core::pipeline::{replay_frames, Engine, EngineConfig};
use movelearn_core::session::{paired_t_test, summarize, SessionLog, Tail};
use movelearn_core::synth::{synthesize, Script, SynthOptions};
use movelearn_core::trace::{format_trace, parse_trace_lines};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "movelearn", version, about = "Replay, synthesize and benchmark landmark traces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a landmark trace through the engine and write the session log.
    Replay(ReplayArgs),
    /// Turn a gesture script into a landmark trace.
    Synth(SynthArgs),
    /// Let the autopilot play a round; writes its trace and session log.
    Play(PlayArgs),
    /// Summarize a session log, or t-test a pre/post CSV.
    Stats(StatsArgs),
    /// Time the full pipeline on a trace.
    Bench(BenchArgs),
    /// Write generated questions as JSONL.
    Bank(BankArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, default_value = "central_tendency_catch", value_parser = parse_mode)]
    pub mode: GameMode,
    /// mastery:N or time:SECONDS
    #[arg(long, value_parser = parse_end)]
    pub end: Option<EndCondition>,
    /// Override one config value, e.g. `gesture.amplitude_scale=0.6`. Repeatable.
    #[arg(long = "config", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub trace: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    pub script: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 1)]
    pub players: u8,
    /// Trace length; defaults to the end of the last gesture plus a tail.
    #[arg(long)]
    pub duration_ms: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub seed: u64,
    /// Where to write the landmark trace.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the session log.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[arg(long, default_value_t = 300_000)]
    pub max_ms: u64,
    /// Standing time recorded after the round ends.
    #[arg(long, default_value_t = 500)]
    pub tail_ms: u64,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    /// Session log to summarize.
    #[arg(required_unless_present = "paired")]
    pub log: Option<PathBuf>,
    /// CSV with `pre,post` columns for a paired t-test.
    #[arg(long, conflicts_with = "log")]
    pub paired: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TailArg::Greater)]
    pub tail: TailArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub trace: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub repetitions: u32,
    /// p95 per-frame latency budget.
    #[arg(long, default_value_t = 5.0)]
    pub budget_ms: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct BankArgs {
    #[arg(long)]
    pub seed: u64,
    /// Question kind; all kinds when omitted.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<QuestionKind>,
    #[arg(long, default_value_t = 1)]
    pub difficulty: u8,
    /// Questions per kind.
    #[arg(long, default_value_t = 10)]
    pub count: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TailArg {
    Greater,
    Less,
    Two,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Tail {
        match t {
            TailArg::Greater => Tail::OneTailedGreater,
            TailArg::Less => Tail::OneTailedLess,
            TailArg::Two => Tail::TwoTailed,
        }
    }
}

fn parse_mode(s: &str) -> Result<GameMode, String> {
    GameMode::from_name(s).ok_or_else(|| format!("unknown mode {s:?}"))
}

fn parse_end(s: &str) -> Result<EndCondition, String> {
    EndCondition::parse(s).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<QuestionKind, String> {
    serde_json::from_value(Value::String(s.to_owned())).map_err(|_| format!("unknown question kind {s:?}"))
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }

    fn input(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

/// Writes to `path`, or to `out` when no path is given.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

/// Applies `a.b.c=value` to a config. The value is read as JSON when it
/// parses, as a bare string otherwise. Only existing keys can be set.
pub fn apply_override(config: &EngineConfig, assignment: &str) -> Result<EngineConfig, String> {
    let (path, raw) = assignment.split_once('=').ok_or_else(|| format!("override {assignment:?} lacks '='"))?;
    let mut doc = serde_json::to_value(config).map_err(|e| e.to_string())?;
    let mut slot = &mut doc;
    for key in path.split('.') {
        slot =
            slot.as_object_mut().and_then(|o| o.get_mut(key)).ok_or_else(|| format!("unknown config key {path:?}"))?;
    }
    *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    serde_json::from_value(doc).map_err(|e| format!("{path}: {e}"))
}

pub fn engine_config(args: &EngineArgs) -> Result<EngineConfig, Failure> {
    let mut config = EngineConfig::for_mode(args.mode);
    if let Some(end) = args.end {
        config.game.end = end;
    }
    for o in &args.overrides {
        config = apply_override(&config, o).map_err(Failure::input)?;
    }
    config.validate(args.mode).map_err(|e| Failure::input(e.to_string()))?;
    Ok(config)
}

fn load_trace(path: &Path) -> Result<Vec<(usize, LandmarkFrame)>, Failure> {
    let text = read(path)?;
    parse_trace_lines(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn replay(args: &ReplayArgs, out: &mut dyn Write) -> Outcome {
    let config = engine_config(&args.engine)?;
    let frames = load_trace(&args.trace)?;
    let log = replay_frames(&frames, args.engine.mode, args.seed, &config)
        .map_err(|e| Failure::input(format!("{}: {e}", args.trace.display())))?;
    emit(args.out.as_deref(), &log.to_jsonl(), out)?;
    Ok(EXIT_OK)
}

fn synth(args: &SynthArgs, out: &mut dyn Write) -> Outcome {
    let text = read(&args.script)?;
    let script = Script::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", args.script.display())))?;
    if !(args.jitter >= 0.0 && args.jitter.is_finite()) {
        return Err(Failure::input("--jitter must be a non-negative number"));
    }
    let opts =
        SynthOptions { seed: args.seed, jitter: args.jitter, players: args.players, duration_ms: args.duration_ms };
    emit(args.out.as_deref(), &format_trace(&synthesize(&script, &opts)), out)?;
    Ok(EXIT_OK)
}

fn play(args: &PlayArgs, out: &mut dyn Write) -> Outcome {
    let config = engine_config(&args.engine)?;
    let run = autopilot::play(args.engine.mode, args.seed, config, args.max_ms, args.tail_ms)
        .map_err(|e| Failure::input(e.to_string()))?;
    if let Some(p) = &args.log {
        fs::write(p, run.log.to_jsonl()).map_err(|e| Failure::io(p, e))?;
    }
    emit(args.out.as_deref(), &format_trace(&run.frames), out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TTestReport {
    n: usize,
    tail: Tail,
    t: f64,
    df: u32,
    p: f64,
    degenerate: bool,
}

#[derive(serde::Deserialize)]
struct PairRow {
    pre: f64,
    post: f64,
}

fn stats(args: &StatsArgs, out: &mut dyn Write) -> Outcome {
    let text = if let Some(csv_path) = &args.paired {
        let mut reader = csv::Reader::from_path(csv_path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Failure { code: EXIT_IO, message: format!("{}: {e}", csv_path.display()) },
            _ => Failure::input(format!("{}: {e}", csv_path.display())),
        })?;
        let mut pre = Vec::new();
        let mut post = Vec::new();
        for row in reader.deserialize::<PairRow>() {
            let row = row.map_err(|e| Failure::input(format!("{}: {e}", csv_path.display())))?;
            pre.push(row.pre);
            post.push(row.post);
        }
        let tail = Tail::from(args.tail);
        let r = paired_t_test(&pre, &post, tail).map_err(|e| Failure::input(e.to_string()))?;
        let report = TTestReport { n: pre.len(), tail, t: r.t, df: r.df, p: r.p, degenerate: r.degenerate };
        match args.format {
            Format::Json => serde_json::to_string(&report).expect("report serializes") + "\n",
            Format::Text => format!(
                "n {}  t {:.6}  df {}  p {:.6e}{}\n",
                report.n,
                report.t,
                report.df,
                report.p,
                if report.degenerate { "  (zero variance)" } else { "" }
            ),
        }
    } else {
        let path = args.log.as_deref().expect("clap requires a log");
        let log =
            SessionLog::from_jsonl(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let s = summarize(&log).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        match args.format {
            Format::Json => serde_json::to_string(&s).expect("summary serializes") + "\n",
            Format::Text => {
                let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_owned(), |v| format!("{v:.3}"));
                format!(
                    "questions {}  answered {}  correct {}  accuracy {}\nmean latency ms {}\nscore {}  mastery {}\nratings n {}  mean {}  sd {}\n",
                    s.questions,
                    s.answered,
                    s.correct,
                    opt(s.accuracy),
                    opt(s.mean_response_latency_ms),
                    s.score,
                    s.mastery,
                    s.n,
                    opt(s.mean),
                    opt(s.sd)
                )
            }
        }
    };
    emit(None, &text, out)?;
    Ok(EXIT_OK)
}

/// Latency figures of one pass over a trace.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchRow {
    pub repetition: u32,
    /// Camera ticks, one frame per player each.
    pub frames: usize,
    pub records: usize,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    pub fps: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BenchReport {
    pub budget_ms: f64,
    pub within_budget: bool,
    pub rows: Vec<BenchRow>,
}

/// Nearest-rank percentile of sorted values.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Groups a trace into ticks of equal timestamp.
pub fn ticks(frames: &[(usize, LandmarkFrame)]) -> Vec<Vec<LandmarkFrame>> {
    let mut out: Vec<Vec<LandmarkFrame>> = Vec::new();
    for (_, f) in frames {
        match out.last_mut() {
            Some(tick) if tick[0].timestamp_ms == f.timestamp_ms => tick.push(f.clone()),
            _ => out.push(vec![f.clone()]),
        }
    }
    out
}

pub fn run_bench(
    frames: &[(usize, LandmarkFrame)],
    mode: GameMode,
    seed: u64,
    config: &EngineConfig,
    repetitions: u32,
    budget_ms: f64,
) -> Result<BenchReport, Failure> {
    let ticks = ticks(frames);
    let mut rows = Vec::new();
    for repetition in 1..=repetitions.max(1) {
        let mut engine = Engine::new(mode, seed, config.clone()).map_err(|e| Failure::input(e.to_string()))?;
        let mut lat = Vec::with_capacity(ticks.len());
        let wall = Instant::now();
        for (k, tick) in ticks.iter().enumerate() {
            let start = Instant::now();
            engine.tick(tick).map_err(|e| Failure::input(format!("tick {}: {e}", k + 1)))?;
            lat.push(start.elapsed().as_secs_f64() * 1000.0);
        }
        let wall_ms = wall.elapsed().as_secs_f64() * 1000.0;
        lat.sort_by(f64::total_cmp);
        rows.push(BenchRow {
            repetition,
            frames: ticks.len(),
            records: frames.len(),
            p50_ms: percentile(&lat, 0.50),
            p95_ms: percentile(&lat, 0.95),
            max_ms: lat.last().copied().unwrap_or(0.0),
            fps: if wall_ms > 0.0 { ticks.len() as f64 / (wall_ms / 1000.0) } else { f64::INFINITY },
            wall_ms,
        });
    }
    let within_budget = rows.iter().all(|r| r.p95_ms <= budget_ms);
    Ok(BenchReport { budget_ms, within_budget, rows })
}

fn bench(args: &BenchArgs, out: &mut dyn Write) -> Outcome {
    let config = engine_config(&args.engine)?;
    let frames = load_trace(&args.trace)?;
    let report = run_bench(&frames, args.engine.mode, args.seed, &config, args.repetitions, args.budget_ms)?;
    let text = match args.format {
        Format::Json => serde_json::to_string(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = String::from("rep  frames  records   p50 ms   p95 ms   max ms      fps\n");
            for r in &report.rows {
                s.push_str(&format!(
                    "{:>3}  {:>6}  {:>7}  {:>7.3}  {:>7.3}  {:>7.3}  {:>7.0}\n",
                    r.repetition, r.frames, r.records, r.p50_ms, r.p95_ms, r.max_ms, r.fps
                ));
            }
            s.push_str(&format!(
                "budget p95 <= {} ms: {}\n",
                report.budget_ms,
                if report.within_budget { "ok" } else { "EXCEEDED" }
            ));
            s
        }
    };
    emit(None, &text, out)?;
    Ok(if report.within_budget { EXIT_OK } else { EXIT_BUDGET })
}

fn bank(args: &BankArgs, out: &mut dyn Write) -> Outcome {
    let kinds: Vec<QuestionKind> = match args.kind {
        Some(k) => vec![k],
        None => QuestionKind::ALL.to_vec(),
    };
    let mut text = String::new();
    let mut id = 0;
    let mut seed = args.seed;
    for kind in kinds {
        for _ in 0..args.count {
            id += 1;
            let q = gen_question(movelearn_core::game::splitmix64(&mut seed), kind, args.difficulty).with_id(id);
            text.push_str(&write_bank([&q]));
        }
    }
    emit(args.out.as_deref(), &text, out)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command, printing failures to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match &cli.command {
        Command::Replay(a) => replay(a, out),
        Command::Synth(a) => synth(a, out),
        Command::Play(a) => play(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Bench(a) => bench(a, out),
        Command::Bank(a) => bank(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (without the program name) and runs them. Usage errors
/// exit with code 2.
pub fn run_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("movelearn")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}
