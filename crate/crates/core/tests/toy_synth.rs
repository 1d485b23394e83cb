mod common;

use blocksynth::interp::check_program;
use blocksynth::lang::{Type, Value};
use blocksynth::machine::{Inst, Machine, Spec};
use blocksynth::synth::{self, sample_pre_states, Engine, Options, Outcome, Verdict};
use blocksynth::syntax::{parse_program, parse_spec};
use common::*;
use rand::SeedableRng;

fn spec_text(m: &Machine, text: &str) -> Spec {
    Spec::from_ast(m, &parse_spec(text).unwrap(), &[]).unwrap()
}

fn all_insts(m: &Machine) -> Vec<Inst> {
    let mut out = Vec::new();
    for (k, op) in m.ops.iter().enumerate() {
        let mut partial: Vec<Vec<Value>> = vec![vec![]];
        for (_, t) in &op.params {
            let choices: Vec<Value> = match t {
                Type::Reg(w) => m.shape.reg_ids().filter(|r| m.shape.reg(*r).width == *w).map(Value::Reg).collect(),
                Type::Bits(w) if *w <= 8 => (0..1u64 << w).map(|v| Value::bits(*w, v)).collect(),
                other => panic!("unexpected operand type {other:?}"),
            };
            partial = partial.into_iter().flat_map(|p| choices.iter().map(move |c| [p.clone(), vec![c.clone()]].concat())).collect();
        }
        out.extend(partial.into_iter().map(|args| Inst { op: k, args }));
    }
    out
}

#[test]
fn copy_of_the_old_value_is_one_instruction() {
    let m = toy();
    let s = toy_spec(&m, "move");
    let (r, _) = synth::synthesize(&s, &Options::default());
    let Outcome::Found(p) = r else { panic!("{r:?}") };
    assert_eq!(p.len(), 1);
}

#[test]
fn vacuous_spec_gives_the_empty_program() {
    let m = toy();
    let s = spec_text(&m, "pre: true\npost: *r1 == *r1");
    let mut e = Engine::new(&s, Options::default());
    assert_eq!(e.cegis(0, None), Outcome::Found(vec![]));
}

#[test]
fn unreachable_memory_has_no_one_instruction_witness() {
    let m = toy();
    let s = toy_spec(&m, "load_without_pointer");
    let mut e = Engine::new(&s, Options::default());
    assert_eq!(e.cegis(1, None), Outcome::NoSolution);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let states = sample_pre_states(&s, 24, &mut rng, &Default::default()).unwrap();
    let insts = all_insts(&m);
    assert!(insts.len() > 1000);
    let witnesses: Vec<String> =
        insts.iter().filter(|i| states.iter().all(|st| check_program(&s, st, std::slice::from_ref(*i)))).map(|i| m.show_inst(i)).collect();
    assert!(witnesses.is_empty(), "{witnesses:?}");
}

#[test]
fn empty_program_is_refuted_when_a_change_is_required() {
    let m = toy();
    let s = toy_spec(&m, "constant");
    assert!(matches!(synth::verify(&s, &[], &Default::default()), Verdict::Refuted(_)));
}

#[test]
fn zero_register_invariant_makes_the_spec_unsatisfiable() {
    let (base, _) = blocksynth::corpus::machine_file(&corpus("mips_subset.casp")).unwrap();
    let s = spec_text(&base, "pre: true\npost: *r0 == 0x00000001");
    let opts = Options { max_len: 2, ..Options::default() };
    let (r, _) = synth::run(&base, &s, &opts);
    assert_eq!(r, Outcome::NoSolution);
}

#[test]
fn counterexamples_do_not_repeat_and_results_pass_random_checks() {
    let m = toy();
    let s = toy_spec(&m, "max");
    let mut e = Engine::new(&s, Options::default());
    let r = e.search(0, 3, None);
    let Outcome::Found(p) = r else { panic!("{r:?}") };
    assert_eq!(e.stats.cegis_iterations, e.stats.counterexamples);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    assert!(synth::random_checks(&s, &p, 100, &mut rng, &Default::default()).unwrap().is_empty());
    let swapped = m.program(&parse_program("(SLT r3 r2)\n(MOV r1 r2)\n(SEL r1 r3)").unwrap()).unwrap();
    assert!(matches!(synth::verify(&s, &swapped, &Default::default()), Verdict::Refuted(_)));
}
