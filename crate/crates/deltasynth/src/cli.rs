//! Command-line driver: `classify`, `synth`, `verify`, `simulate` and `corpus`.
//!
//! Every command prints a JSON report with sorted keys. Exit codes: 0 on
//! success, 1 for usage, IO and other errors, 2 when Player 1 has no winning
//! strategy, 3 when a verified machine loses, 4 for unsupported conditions.

use crate::condition::Game;
use crate::counterexample::{self, CounterexampleKind};
use crate::error::{Error, Result};
use crate::game::{FiniteMemoryMachine, Lasso};
use crate::gen::{self, ClassTarget};
use crate::order::{winning_region_capped, Configuration, OrderMode};
use crate::synthesis::{self, SynthOptions, DEFAULT_BUDGET};
use crate::verifier::{self, Verdict};
use crate::{format, oracle};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NO_WINNING_STRATEGY: i32 = 2;
pub const EXIT_LOSING: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

/// Environment variable overriding the default node budget.
pub const BUDGET_ENV: &str = "DELTASYNTH_BUDGET";

/// Credit cap used when computing winning regions of energy games.
const CREDIT_CAP: i64 = 64;
/// Credit cap of the brute-force energy oracle.
const ORACLE_CAP: i64 = 16;

/// Data files shipped inside the binary; the bundled manifest refers to them by name.
const BUNDLED: &[(&str, &str)] = &[
    ("example10.game", include_str!("../data/example10.game")),
    ("example10_closed.game", include_str!("../data/example10_closed.game")),
    ("example10_open.game", include_str!("../data/example10_open.game")),
    ("w_full.game", include_str!("../data/w_full.game")),
    ("multienergy_d2.game", include_str!("../data/multienergy_d2.game")),
    ("fig2.machine.json", include_str!("../data/fig2.machine.json")),
    ("fig3.machine.json", include_str!("../data/fig3.machine.json")),
    ("corpus.json", include_str!("../data/corpus.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[derive(Parser, Debug)]
#[command(name = "deltasynth", version, about = "Synthesise and verify finite-memory strategies for monitor-presented games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report the hierarchy class and the winner from the initial history.
    Classify(GameArgs),
    /// Synthesise a finite-memory winning strategy and verify it.
    Synth(SynthArgs),
    /// Model-check a machine against a game.
    Verify(MachineArgs),
    /// Play a machine against an ultimately periodic adversary word.
    Simulate(SimulateArgs),
    /// Run a manifest of games and check the recorded expectations.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct Common {
    /// Directory for the report and exported machines.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave timings out of the report.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args, Debug)]
pub struct GameArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Structural,
    Exact,
}

impl From<OrderArg> for OrderMode {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Structural => OrderMode::StructuralOnly,
            OrderArg::Exact => OrderMode::ExactRegular,
        }
    }
}

#[derive(Args, Debug)]
pub struct SynthFlags {
    #[arg(long, value_enum, default_value_t = OrderArg::Structural)]
    pub order: OrderArg,
    /// Node budget; defaults to $DELTASYNTH_BUDGET, then to 1000000.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Export only this format. Without `--out` the export goes to stdout
    /// instead of the report.
    #[arg(long, value_enum)]
    pub format: Option<ExportFormat>,
    #[command(flatten)]
    pub synth: SynthFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MachineArgs {
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long)]
    pub machine: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Machine file; a synthesised machine is used when absent.
    #[arg(long)]
    pub machine: Option<PathBuf>,
    /// Adversary word `"b0 b1 : b2"` (prefix, colon, cycle).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, default_value_t = 16)]
    pub horizon: usize,
    #[command(flatten)]
    pub synth: SynthFlags,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    /// Manifest file; the bundled corpus when absent.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Seed for generated games.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub synth: SynthFlags,
    #[command(flatten)]
    pub common: Common,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoWinningStrategy => EXIT_NO_WINNING_STRATEGY,
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        _ => EXIT_USAGE,
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::InvalidAction(_) => "InvalidAction",
        Error::InvalidHorizon { .. } => "InvalidHorizon",
        Error::InvalidAlphabet(_) => "InvalidAlphabet",
        Error::InvalidMonitor(_) => "InvalidMonitor",
        Error::InvalidExpr(_) => "InvalidExpr",
        Error::WrongClass(_) => "WrongClass",
        Error::NotEventuallyConstant(_) => "NotEventuallyConstant",
        Error::InvalidPresentation(_) => "InvalidPresentation",
        Error::MonitorMismatch => "MonitorMismatch",
        Error::NotWinning => "NotWinning",
        Error::NoWinningStrategy => "NoWinningStrategy",
        Error::Unsupported(_) => "Unsupported",
        Error::BudgetExceeded { .. } => "BudgetExceeded",
        Error::InvalidParams(_) => "InvalidParams",
        Error::Io(_) => "Io",
        Error::Schema { .. } => "Schema",
        Error::Internal(_) => "Internal",
    }
}

fn error_json(e: &Error) -> Value {
    json!({ "kind": error_name(e), "message": e.to_string() })
}

/// Budget from the flag, then the environment, then the default.
pub fn resolve_budget(flag: Option<usize>) -> Result<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{BUDGET_ENV}={s:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn options(flags: &SynthFlags) -> Result<SynthOptions> {
    Ok(SynthOptions { order: flags.order.into(), budget: resolve_budget(flags.budget)?, credit_cap: CREDIT_CAP })
}

/// Runs the command line `args` (including the program name), writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Classify(a) => classify(&a),
        Command::Synth(a) => synth(&a),
        Command::Verify(a) => verify(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Corpus(a) => corpus(&a),
    };
    match outcome {
        Ok(Outcome { stdout, code, diagnostic }) => {
            let _ = out.write_all(stdout.as_bytes());
            if let Some(d) = diagnostic {
                let _ = writeln!(err, "{d}");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

struct Outcome {
    stdout: String,
    code: i32,
    diagnostic: Option<String>,
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes the report into `--out` when given and returns it for stdout.
fn emit(report: Value, common: &Common, code: i32, diagnostic: Option<String>) -> Result<Outcome> {
    let text = pretty(&report);
    if let Some(dir) = &common.out {
        write_file(&dir.join("report.json"), &text)?;
    }
    Ok(Outcome { stdout: text, code, diagnostic })
}

fn timed<T>(no_timing: bool, report: &mut Map<String, Value>, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let r = f();
    if !no_timing {
        report.insert("timingMs".into(), json!((t.elapsed().as_secs_f64() * 1e6).round() / 1e3));
    }
    r
}

fn winner_at_start(game: &Game) -> Result<bool> {
    let game = game.effective();
    Ok(winning_region_capped(&game, CREDIT_CAP)?.contains(&Configuration::initial(&game.monitor)))
}

fn game_header(game: &Game) -> Result<Map<String, Value>> {
    let class = game.classify()?;
    let mut r = Map::new();
    r.insert("name".into(), json!(game.name));
    r.insert("classification".into(), json!(class.tag()));
    r.insert("states".into(), json!(game.monitor.num_states()));
    r.insert("energyDim".into(), json!(game.monitor.energy_dim()));
    Ok(r)
}

fn classify(a: &GameArgs) -> Result<Outcome> {
    let game = format::parse_game_file(&a.game)?;
    let mut r = game_header(&game)?;
    let winner = timed(a.common.no_timing, &mut r, || winner_at_start(&game))?;
    r.insert("winnerAtEpsilon".into(), json!(winner));
    r.insert("condition".into(), json!(game.condition.render(&game.monitor)));
    emit(Value::Object(r), &a.common, EXIT_OK, None)
}

fn machine_summary(machine: &FiniteMemoryMachine, exports: &[String]) -> Value {
    json!({ "states": machine.num_states(), "exports": exports })
}

fn verdict_fields(r: &mut Map<String, Value>, game: &Game, v: &Verdict) {
    match v {
        Verdict::Winning => {
            r.insert("verdict".into(), json!("Winning"));
        }
        Verdict::Losing(w) => {
            r.insert("verdict".into(), json!("Losing"));
            r.insert("witness".into(), verifier::beta_json(game, w));
        }
    }
}

fn synth(a: &SynthArgs) -> Result<Outcome> {
    let game = format::parse_game_file(&a.game)?;
    let opts = options(&a.synth)?;
    let mut r = game_header(&game)?;
    let result = timed(a.common.no_timing, &mut r, || synthesis::synth(&game, &opts));
    let machine = match result {
        Ok(m) => m,
        Err(e @ (Error::NoWinningStrategy | Error::Unsupported(_))) => {
            r.insert("winnerAtEpsilon".into(), if e == Error::NoWinningStrategy { json!(false) } else { Value::Null });
            r.insert("error".into(), error_json(&e));
            return emit(Value::Object(r), &a.common, exit_code(&e), Some(format!("error: {e}")));
        }
        Err(e) => return Err(e),
    };
    r.insert("winnerAtEpsilon".into(), json!(true));
    let verdict = verifier::verify_machine(&machine, &game)?;
    verdict_fields(&mut r, &game, &verdict);
    let code = if verdict.is_winning() { EXIT_OK } else { EXIT_LOSING };
    let dot = || machine.to_dot();
    let js = || pretty(&machine.to_json());
    let Some(dir) = &a.common.out else {
        return match a.format {
            Some(ExportFormat::Dot) => Ok(Outcome { stdout: dot(), code, diagnostic: None }),
            Some(ExportFormat::Json) => Ok(Outcome { stdout: js(), code, diagnostic: None }),
            None => {
                r.insert("machine".into(), machine_summary(&machine, &[]));
                r.insert("definition".into(), machine.to_json());
                emit(Value::Object(r), &a.common, code, None)
            }
        };
    };
    let mut exports = Vec::new();
    for (fmt, ext, text) in [(ExportFormat::Dot, "dot", &dot as &dyn Fn() -> String), (ExportFormat::Json, "json", &js)] {
        if a.format.is_none_or(|f| f == fmt) {
            let path = dir.join(format!("{}.machine.{ext}", game.name));
            write_file(&path, &text())?;
            exports.push(path.display().to_string());
        }
    }
    r.insert("machine".into(), machine_summary(&machine, &exports));
    emit(Value::Object(r), &a.common, code, None)
}

fn verify(a: &MachineArgs) -> Result<Outcome> {
    let game = format::parse_game_file(&a.game)?;
    let machine = format::parse_machine_file(&a.machine, game.alphabet())?;
    let mut r = game_header(&game)?;
    let verdict = timed(a.common.no_timing, &mut r, || verifier::verify_machine(&machine, &game))?;
    r.insert("machine".into(), machine_summary(&machine, &[a.machine.display().to_string()]));
    verdict_fields(&mut r, &game, &verdict);
    let code = if verdict.is_winning() { EXIT_OK } else { EXIT_LOSING };
    emit(Value::Object(r), &a.common, code, None)
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let game = format::parse_game_file(&a.game)?;
    let machine = match &a.machine {
        Some(p) => format::parse_machine_file(p, game.alphabet())?,
        None => synthesis::synth(&game, &options(&a.synth)?)?,
    };
    let beta = match &a.beta {
        Some(s) => format::parse_beta(s, game.alphabet())?,
        None => Lasso::constant(0),
    };
    let mut r = game_header(&game)?;
    let trace = timed(a.common.no_timing, &mut r, || verifier::simulate(&machine, &game, &beta, a.horizon))?;
    let play = machine.machine_play(&beta);
    r.insert("beta".into(), verifier::beta_json(&game, &beta));
    r.insert("trace".into(), trace.to_json(&game, &machine));
    r.insert("playWins".into(), json!(game.member(&play)?));
    r.insert("machine".into(), machine_summary(&machine, &[]));
    emit(Value::Object(r), &a.common, EXIT_OK, None)
}

// ---------------------------------------------------------------------------
// Corpus

/// Where manifest paths are resolved.
enum Source {
    Bundled,
    Dir(PathBuf),
}

impl Source {
    fn read(&self, name: &str) -> Result<String> {
        match self {
            Source::Bundled => {
                bundled(name).map(str::to_string).ok_or_else(|| Error::Io(format!("no bundled file {name:?}")))
            }
            Source::Dir(d) => {
                let path = d.join(name);
                std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
            }
        }
    }
}

fn entry_seed(seed: u64, name: &str, i: u64) -> u64 {
    // FNV-1a of the entry name keeps seeds stable when entries are reordered.
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i)
}

fn str_field<'a>(e: &'a Value, key: &str) -> Option<&'a str> {
    e.get(key).and_then(Value::as_str)
}

fn usize_field(e: &Value, key: &str, default: usize) -> Result<usize> {
    match e.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| Error::Schema { path: key.into(), message: "expected a non-negative integer".into() }),
    }
}

fn run_game_entry(e: &Value, src: &Source, opts: &SynthOptions) -> Result<Map<String, Value>> {
    let file = str_field(e, "game").expect("checked by caller");
    let game = format::parse_game_str(&src.read(file)?)?;
    let mut r = game_header(&game)?;
    if let Some(mfile) = str_field(e, "machine") {
        let machine = format::parse_machine_str(&src.read(mfile)?, game.alphabet())?;
        r.insert("machine".into(), machine_summary(&machine, &[mfile.to_string()]));
        verdict_fields(&mut r, &game, &verifier::verify_machine(&machine, &game)?);
        return Ok(r);
    }
    let winner = winner_at_start(&game)?;
    r.insert("winnerAtEpsilon".into(), json!(winner));
    match synthesis::synth(&game, opts) {
        Ok(machine) => {
            r.insert("machine".into(), machine_summary(&machine, &[]));
            verdict_fields(&mut r, &game, &verifier::verify_machine(&machine, &game)?);
        }
        Err(err) => {
            r.insert("error".into(), error_json(&err));
        }
    }
    Ok(r)
}

fn run_counterexample_entry(e: &Value) -> Result<Map<String, Value>> {
    let kind: CounterexampleKind = str_field(e, "counterexample").expect("checked by caller").parse()?;
    let max = usize_field(e, "maxStates", 2)?;
    let game = counterexample::build_counterexample(kind, 2)?;
    let mut checked = 0usize;
    let mut falsified = 0usize;
    let mut witnesses = Map::new();
    for n in 1..=max {
        let mut sample = None;
        if kind == CounterexampleKind::OpponentGame {
            for m in counterexample::all_player2_machines(n) {
                checked += 1;
                if let Ok(w) = counterexample::falsify_player2(&m, &game) {
                    falsified += 1;
                    sample.get_or_insert(w.to_json());
                }
            }
        } else {
            for m in counterexample::all_machines(&game.alphabet, n) {
                checked += 1;
                if let Ok(w) = counterexample::falsify_machine(&m, &game) {
                    if counterexample::check_witness(&m, &game, &w)? {
                        falsified += 1;
                        sample.get_or_insert(w.to_json());
                    }
                }
            }
        }
        witnesses.insert(n.to_string(), sample.unwrap_or(Value::Null));
    }
    let mut r = Map::new();
    r.insert("machinesChecked".into(), json!(checked));
    r.insert("falsified".into(), json!(falsified));
    r.insert("allFalsified".into(), json!(checked == falsified));
    r.insert("firstWitnessByStates".into(), Value::Object(witnesses));
    Ok(r)
}

/// Checks one generated game against the brute-force oracles. Returns
/// whether Player 1 wins and a failure description, if any.
fn check_generated(game: &Game, energy: bool, opts: &SynthOptions) -> Result<(bool, Option<String>)> {
    let expected = if energy { oracle::energy_winner(game, ORACLE_CAP)? } else { oracle::positional_winner(game)? };
    Ok((expected, check_against(game, expected, opts)?))
}

fn check_against(game: &Game, expected: bool, opts: &SynthOptions) -> Result<Option<String>> {
    let got = winner_at_start(game)?;
    if expected != got {
        return Ok(Some(format!("{}: oracle says winner={expected}, region says {got}", game.name)));
    }
    match synthesis::synth(game, opts) {
        Ok(machine) if expected => match verifier::verify_machine(&machine, game)? {
            Verdict::Winning => Ok(None),
            Verdict::Losing(_) => Ok(Some(format!("{}: synthesised machine loses", game.name))),
        },
        Ok(_) => Ok(Some(format!("{}: machine produced for a losing game", game.name))),
        Err(Error::NoWinningStrategy) if !expected => Ok(None),
        Err(e) => Ok(Some(format!("{}: {e}", game.name))),
    }
}

fn run_generator_entry(e: &Value, name: &str, seed: u64, opts: &SynthOptions) -> Result<Map<String, Value>> {
    let generator = str_field(e, "generator").expect("checked by caller");
    let count = usize_field(e, "count", 10)?;
    let max_states = usize_field(e, "maxStates", 4)?;
    let energy = generator == "energy";
    let target: Option<ClassTarget> = if energy { None } else { Some(generator.parse()?) };
    // The exact order is only defined for energy-free conditions.
    let opts = &if energy { SynthOptions { order: OrderMode::StructuralOnly, ..opts.clone() } } else { opts.clone() };
    let results: Vec<Result<(bool, Option<String>)>> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = entry_seed(seed, name, i);
            let game = match target {
                None => gen::random_energy_game(s),
                Some(t) => gen::random_game(s, t, max_states),
            };
            check_generated(&game, energy, opts)
        })
        .collect();
    let mut failures = Vec::new();
    let mut winning = 0;
    for r in results {
        let (won, failure) = r?;
        winning += usize::from(won);
        failures.extend(failure);
    }
    let mut r = Map::new();
    r.insert("generated".into(), json!(count));
    r.insert("agreement".into(), json!(count - failures.len()));
    r.insert("failures".into(), json!(failures));
    r.insert("winning".into(), json!(winning));
    Ok(r)
}

fn lookup<'a>(report: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    let mut parts = key.split('.');
    let mut v = report.get(parts.next()?)?;
    for p in parts {
        v = v.get(p)?;
    }
    Some(v)
}

fn run_entry(e: &Value, src: &Source, seed: u64, opts: &SynthOptions, no_timing: bool) -> Map<String, Value> {
    let name = str_field(e, "name").unwrap_or("").to_string();
    let t = Instant::now();
    let result = if str_field(e, "game").is_some() {
        run_game_entry(e, src, opts)
    } else if str_field(e, "counterexample").is_some() {
        run_counterexample_entry(e)
    } else if str_field(e, "generator").is_some() {
        run_generator_entry(e, &name, seed, opts)
    } else {
        Err(Error::Schema { path: format!("entries.{name}"), message: "needs one of game, counterexample, generator".into() })
    };
    let mut r = result.unwrap_or_else(|err| {
        let mut m = Map::new();
        m.insert("error".into(), error_json(&err));
        m
    });
    r.insert("name".into(), json!(name));
    if !no_timing {
        r.insert("timingMs".into(), json!((t.elapsed().as_secs_f64() * 1e6).round() / 1e3));
    }
    let mut mismatches = Vec::new();
    if let Some(expect) = e.get("expect").and_then(Value::as_object) {
        for (k, want) in expect {
            let got = lookup(&r, k);
            if got != Some(want) {
                mismatches.push(format!("{k}: expected {want}, got {}", got.map_or("nothing".into(), |g| g.to_string())));
            }
        }
    }
    r.insert("passed".into(), json!(mismatches.is_empty()));
    if !mismatches.is_empty() {
        r.insert("mismatches".into(), json!(mismatches));
    }
    r
}

/// Runs every manifest entry and rolls up the expectations. The report is
/// sorted by entry name and, with `no_timing`, identical across runs.
pub fn run_corpus(manifest: &Value, src_dir: Option<&Path>, seed: u64, opts: &SynthOptions, no_timing: bool) -> Result<Value> {
    let src = match src_dir {
        Some(d) => Source::Dir(d.to_path_buf()),
        None => Source::Bundled,
    };
    let entries = match manifest.get("entries") {
        None => Vec::new(),
        Some(v) => v.as_array().cloned().ok_or_else(|| Error::Schema { path: "$.entries".into(), message: "expected an array".into() })?,
    };
    let mut names: Vec<&str> = entries.iter().map(|e| str_field(e, "name").unwrap_or("")).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Schema { path: "$.entries".into(), message: format!("duplicate entry name {:?}", w[0]) });
    }
    let mut reports: Vec<Map<String, Value>> =
        entries.par_iter().map(|e| run_entry(e, &src, seed, opts, no_timing)).collect();
    reports.sort_by(|a, b| a["name"].as_str().cmp(&b["name"].as_str()));
    let failed: Vec<&Value> = reports.iter().filter(|r| r["passed"] == json!(false)).map(|r| &r["name"]).collect();
    Ok(json!({
        "seed": seed,
        "entries": reports,
        "summary": { "total": reports.len(), "passed": reports.len() - failed.len(), "failed": failed },
    }))
}

fn corpus(a: &CorpusArgs) -> Result<Outcome> {
    let (text, dir) = match &a.manifest {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            Some(p.parent().map(Path::to_path_buf).unwrap_or_default()),
        ),
        None => (bundled("corpus.json").expect("bundled corpus").to_string(), None),
    };
    let manifest: Value = serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: "$".into(),
        message: format!("line {} column {}: {e}", e.line(), e.column()),
    })?;
    let opts = options(&a.synth)?;
    let run = || run_corpus(&manifest, dir.as_deref(), a.seed, &opts, a.common.no_timing);
    let report = match a.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let failed: Vec<String> =
        report["summary"]["failed"].as_array().into_iter().flatten().filter_map(|v| v.as_str().map(String::from)).collect();
    let (code, diagnostic) =
        if failed.is_empty() { (EXIT_OK, None) } else { (EXIT_USAGE, Some(format!("failed entries: {}", failed.join(", ")))) };
    emit(report, &a.common, code, diagnostic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("deltasynth").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["classify"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["classify", "--game", "/nonexistent.game"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn empty_manifest_gives_empty_report() {
        let r = run_corpus(&json!({ "entries": [] }), None, 1, &SynthOptions::default(), true).unwrap();
        assert_eq!(r["summary"]["total"], json!(0));
        assert_eq!(r["entries"], json!([]));
    }

    #[test]
    fn expectations_are_compared_by_path() {
        let manifest = json!({ "entries": [
            { "name": "b", "game": "w_full.game", "expect": { "machine.states": 1, "verdict": "Winning" } },
            { "name": "a", "game": "example10.game", "expect": { "classification": "K3" } },
        ]});
        let r = run_corpus(&manifest, None, 1, &SynthOptions::default(), true).unwrap();
        assert_eq!(r["entries"][0]["name"], json!("a"));
        assert_eq!(r["entries"][0]["passed"], json!(false));
        assert_eq!(r["entries"][1]["passed"], json!(true));
        assert_eq!(r["summary"]["failed"], json!(["a"]));
    }

    #[test]
    fn bundled_files_parse() {
        for (name, text) in BUNDLED {
            if name.ends_with(".game") {
                format::parse_game_str(text).unwrap();
            }
        }
        let m: Value = serde_json::from_str(bundled("corpus.json").unwrap()).unwrap();
        assert!(m["entries"].as_array().is_some_and(|e| !e.is_empty()));
    }
}
