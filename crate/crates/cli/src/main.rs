use blocksynth::corpus::{lower_files, lowered_text, machine_file, spec_file};
use blocksynth::interp::{check_spec, frame_violations, run_program};
use blocksynth::machine::{Inst, Machine, Spec};
use blocksynth::smt::SolverConfig;
use blocksynth::synth::{self, extract_assembly, random_checks, Options, Outcome, Report, Verdict};
use blocksynth::syntax::loader::load_program;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "blocksynth", version, about = "Synthesize and verify short assembly blocks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a program meeting a specification.
    Synth(SynthArgs),
    /// Check a program against a specification.
    Verify(VerifyArgs),
    /// Lower an abstract specification to a machine.
    Lower(LowerArgs),
    /// Parse and typecheck a machine and optional specs and programs.
    Check(CheckArgs),
    /// Run a program on a concrete state.
    Run(RunArgs),
}

#[derive(Args)]
struct SpecArgs {
    /// Machine description.
    #[arg(long)]
    machine: PathBuf,
    /// A machine-level spec, or an abstract spec when `--lowering` is given.
    #[arg(long)]
    spec: PathBuf,
    /// Lowering file mapping the abstract spec onto the machine.
    #[arg(long)]
    lowering: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Longest program to try.
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    /// Budget in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Disable read/write pruning constraints.
    #[arg(long)]
    no_rw: bool,
    /// Disable state gating.
    #[arg(long)]
    no_gate: bool,
    /// Disable dependency constraints.
    #[arg(long)]
    no_dep: bool,
    /// Disable goal decomposition.
    #[arg(long)]
    no_decompose: bool,
    /// Seed for sampling and random checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assembly output file.
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
    /// JSON report file; the report goes to standard output otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long)]
    prog: PathBuf,
}

#[derive(Args)]
struct LowerArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    lowering: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    #[arg(short = 'o', long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    machine: PathBuf,
    #[arg(long)]
    spec: Vec<PathBuf>,
    #[arg(long)]
    prog: Vec<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    machine: PathBuf,
    #[arg(long)]
    prog: PathBuf,
    /// Initial state as JSON.
    #[arg(long)]
    state: PathBuf,
    /// Also check the run against this specification.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    lowering: Option<PathBuf>,
}

/// A failure with its exit code.
struct Fail(u8, String);

const REFUTED: u8 = 1;
const USAGE: u8 = 2;
const UNKNOWN: u8 = 3;

fn input<T>(r: Result<T, String>) -> Result<T, Fail> {
    r.map_err(|e| Fail(USAGE, e))
}

fn load_spec(a: &SpecArgs) -> Result<(Machine, Spec), Fail> {
    load_spec_parts(&a.machine, &a.spec, a.lowering.as_deref())
}

fn load_spec_parts(machine: &Path, spec: &Path, lowering: Option<&Path>) -> Result<(Machine, Spec), Fail> {
    match lowering {
        Some(l) => {
            let (m, low) = input(lower_files(machine, l, spec))?;
            Ok((m, low.spec))
        }
        None => {
            let (m, _) = input(machine_file(machine))?;
            let s = input(spec_file(&m, spec))?;
            Ok((m, s))
        }
    }
}

fn load_prog(m: &Machine, path: &Path) -> Result<Vec<Inst>, Fail> {
    let p = input(load_program(path).map_err(|e| e.to_string()))?;
    input(m.program(&p).map_err(|e| e.to_string()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(USAGE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn synth_cmd(a: SynthArgs) -> Result<(), Fail> {
    let (base, spec) = load_spec(&a.spec)?;
    let opts = Options {
        rw: !a.no_rw,
        gate: !a.no_gate,
        dep: !a.no_dep,
        decompose: !a.no_decompose,
        max_len: a.max_len,
        timeout: a.timeout.map(Duration::from_secs_f64),
        seed: a.seed,
        solver: SolverConfig::from_env(),
        ..Options::default()
    };
    let (outcome, stats) = synth::run(&base, &spec, &opts);
    let mut report = serde_json::to_value(Report::new(&spec.machine, &outcome, &stats)).expect("serializable");
    let code = match &outcome {
        Outcome::Found(p) => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
            let bad = random_checks(&synth::with_invariants(&spec), p, 100, &mut rng, &opts.solver).map_err(|e| Fail(UNKNOWN, e))?;
            report["random_check_failures"] = json!(bad.len());
            if !bad.is_empty() {
                return Err(Fail(REFUTED, format!("synthesized program fails {} random checks", bad.len())));
            }
            let asm = extract_assembly(&spec.machine, p, spec.ext_label.as_deref()).map_err(|e| Fail(USAGE, e))?;
            if let Some(o) = &a.out {
                write_out(Some(o), &asm)?;
            }
            report["assembly"] = json!(asm);
            None
        }
        Outcome::NoSolution => Some(REFUTED),
        Outcome::Unknown(_) => Some(UNKNOWN),
    };
    let text = pretty_json(&report);
    match &a.report {
        Some(p) => write_out(Some(p), &text)?,
        None => print!("{text}"),
    }
    match code {
        None => Ok(()),
        Some(c) => Err(Fail(c, format!("synthesis {}", report["result"].as_str().unwrap_or("failed")))),
    }
}

fn verify_cmd(a: VerifyArgs) -> Result<(), Fail> {
    let (_, spec) = load_spec(&a.spec)?;
    let prog = load_prog(&spec.machine, &a.prog)?;
    match synth::verify_program(&spec, &prog, &SolverConfig::from_env()) {
        Verdict::Verified => {
            print!("{}", pretty_json(&json!({ "result": "verified" })));
            Ok(())
        }
        Verdict::Refuted(st) => {
            let shape = &spec.machine.shape;
            print!("{}", pretty_json(&json!({ "result": "refuted", "counterexample": shape.state_to_json(&st) })));
            Err(Fail(REFUTED, "program does not meet the specification".into()))
        }
        Verdict::Unknown(e) => {
            print!("{}", pretty_json(&json!({ "result": "unknown", "detail": e })));
            Err(Fail(UNKNOWN, format!("verification inconclusive: {e}")))
        }
    }
}

fn lower_cmd(a: LowerArgs) -> Result<(), Fail> {
    let (_, low) = input(lower_files(&a.machine, &a.lowering, &a.spec))?;
    write_out(a.out.as_deref(), &(lowered_text(&low) + "\n"))
}

fn check_cmd(a: CheckArgs) -> Result<(), Fail> {
    let (m, _) = input(machine_file(&a.machine))?;
    for s in &a.spec {
        input(spec_file(&m, s))?;
    }
    for p in &a.prog {
        load_prog(&m, p)?;
    }
    println!("ok: {} operations, {} registers", m.ops.len(), m.shape.regs.len());
    Ok(())
}

fn run_cmd(a: RunArgs) -> Result<(), Fail> {
    let (m, spec) = match &a.spec {
        Some(s) => {
            let (_, spec) = load_spec_parts(&a.machine, s, a.lowering.as_deref())?;
            (spec.machine.clone(), Some(spec))
        }
        None => (input(machine_file(&a.machine))?.0, None),
    };
    let prog = load_prog(&m, &a.prog)?;
    let text = std::fs::read_to_string(&a.state).map_err(|e| Fail(USAGE, format!("{}: {e}", a.state.display())))?;
    let j: serde_json::Value = input(serde_json::from_str(&text).map_err(|e| format!("{}: {e}", a.state.display())))?;
    let init = input(m.shape.state_from_json(&j).map_err(|e| e.to_string()))?;
    input(init.check_valid(&m.shape).map_err(|e| e.to_string()))?;
    let out = run_program(&m, &init, &prog);
    let mut report = match &out {
        Ok((fin, ext)) => json!({ "result": "done", "state": m.shape.state_to_json(fin), "branch_to_ext": ext }),
        Err(b) => json!({ "result": "crash", "detail": b.to_string() }),
    };
    let mut ok = out.is_ok();
    if let Some(spec) = &spec {
        let holds = check_spec(spec, &init, out.as_ref().ok().map(|(f, e)| (f, *e)));
        report["spec_holds"] = json!(holds);
        if let Ok((fin, _)) = &out {
            report["frame_violations"] = json!(frame_violations(spec, &init, fin));
        }
        ok = holds;
    }
    print!("{}", pretty_json(&report));
    if ok {
        Ok(())
    } else {
        Err(Fail(REFUTED, "run crashed or violated the specification".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Synth(a) => synth_cmd(a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Lower(a) => lower_cmd(a),
        Cmd::Check(a) => check_cmd(a),
        Cmd::Run(a) => run_cmd(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("blocksynth: {msg}");
            ExitCode::from(code)
        }
    }
}
