//! The synthesis engine: verification, CEGIS over symbolic programs, the
//! search-space reductions, goal decomposition, and assembly extraction.

pub mod cegis;
pub mod decompose;
pub mod depend;
pub mod extract;
pub mod footprint;
pub mod gate;
pub mod program;
pub mod verify;

pub use cegis::{rw_constraints, synthesize, Engine, Outcome};
pub use decompose::{apply_rule, decompose_synthesize, Goal, Rule};
pub use depend::{analyze, dependency_constraints, DepInfo};
pub use extract::extract_assembly;
pub use footprint::{footprint, footprints, Footprint};
pub use gate::{gate_state, ungated, Gate};
pub use program::SymbolicProgram;
pub use verify::{random_checks, sample_pre_states, verify, with_invariants, Verdict};

use crate::machine::{Inst, Machine, Spec};
use crate::smt::SolverConfig;
use serde::Serialize;
use std::time::Duration;

/// Synthesis settings. Each reduction can be switched off independently.
#[derive(Clone, Debug)]
pub struct Options {
    pub rw: bool,
    pub gate: bool,
    pub dep: bool,
    pub decompose: bool,
    pub max_len: usize,
    pub timeout: Option<Duration>,
    /// Time cap for one hole during decomposition.
    pub hole_timeout: Option<Duration>,
    /// Base of the per-hole cost `base^size` used to pick the next tree.
    pub cost_base: f64,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rw: true,
            gate: true,
            dep: true,
            decompose: true,
            max_len: 6,
            timeout: None,
            hole_timeout: None,
            cost_base: 2.0,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl Options {
    /// All reductions off.
    pub fn baseline() -> Options {
        Options { rw: false, gate: false, dep: false, decompose: false, ..Options::default() }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Stats {
    /// Largest program length attempted.
    pub stage: usize,
    pub cegis_iterations: usize,
    pub counterexamples: usize,
    pub analysis_ms: u128,
    pub guess_ms: u128,
    pub verify_ms: u128,
    pub total_ms: u128,
}

impl Stats {
    pub fn absorb(&mut self, o: &Stats) {
        self.stage = self.stage.max(o.stage);
        self.cegis_iterations += o.cegis_iterations;
        self.counterexamples += o.counterexamples;
        self.analysis_ms += o.analysis_ms;
        self.guess_ms += o.guess_ms;
        self.verify_ms += o.verify_ms;
    }
}

/// The JSON report of a synthesis run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub result: &'static str,
    pub stage: usize,
    pub cegis_iterations: usize,
    pub counterexamples: usize,
    pub time_ms: PhaseTimes,
    pub program: Option<Vec<String>>,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseTimes {
    pub analysis: u128,
    pub guess: u128,
    pub verify: u128,
    pub total: u128,
}

impl Report {
    pub fn new(m: &Machine, outcome: &Outcome, stats: &Stats) -> Report {
        let (result, program, detail) = match outcome {
            Outcome::Found(p) => ("success", Some(p.iter().map(|i| m.show_inst(i)).collect()), None),
            Outcome::NoSolution => ("no-solution", None, None),
            Outcome::Unknown(e) => ("unknown", None, Some(e.clone())),
        };
        Report {
            result,
            stage: stats.stage,
            cegis_iterations: stats.cegis_iterations,
            counterexamples: stats.counterexamples,
            time_ms: PhaseTimes {
                analysis: stats.analysis_ms,
                guess: stats.guess_ms,
                verify: stats.verify_ms,
                total: stats.total_ms,
            },
            program,
            detail,
        }
    }
}

/// Synthesizes with the configured strategy: goal decomposition when
/// enabled, otherwise increasing program lengths.
pub fn run(base: &Machine, spec: &Spec, opts: &Options) -> (Outcome, Stats) {
    let spec = with_invariants(spec);
    if opts.decompose {
        decompose_synthesize(base, &spec, opts)
    } else {
        synthesize(&spec, opts)
    }
}

/// Verifies against the specification with machine invariants assumed.
pub fn verify_program(spec: &Spec, prog: &[Inst], cfg: &SolverConfig) -> Verdict {
    verify(&with_invariants(spec), prog, cfg)
}
