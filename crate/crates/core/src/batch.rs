//! Concrete evaluation of one program over many states, in parallel when
//! the `parallel` feature is on.

use crate::interp::check_program;
use crate::lang::MachineState;
use crate::machine::{Inst, Spec};

/// Whether the program meets the specification from each state.
pub fn check_batch(spec: &Spec, prog: &[Inst], states: &[MachineState]) -> Vec<bool> {
    #[cfg(feature = "parallel")]
    {
        check_batch_parallel(spec, prog, states)
    }
    #[cfg(not(feature = "parallel"))]
    {
        check_batch_sequential(spec, prog, states)
    }
}

pub fn check_batch_sequential(spec: &Spec, prog: &[Inst], states: &[MachineState]) -> Vec<bool> {
    states.iter().map(|s| check_program(spec, s, prog)).collect()
}

#[cfg(feature = "parallel")]
pub fn check_batch_parallel(spec: &Spec, prog: &[Inst], states: &[MachineState]) -> Vec<bool> {
    use rayon::prelude::*;
    states.par_iter().map(|s| check_program(spec, s, prog)).collect()
}

/// States from which the program fails the specification.
pub fn failures(spec: &Spec, prog: &[Inst], states: &[MachineState]) -> Vec<MachineState> {
    check_batch(spec, prog, states)
        .into_iter()
        .zip(states)
        .filter(|(ok, _)| !ok)
        .map(|(_, s)| s.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::Machine;
    use crate::syntax::{parse_machine, parse_program, parse_spec};
    use rand::SeedableRng;

    fn inc_machine() -> (Machine, Spec, Vec<Inst>) {
        let m = Machine::from_ast(
            &parse_machine(
                "letstate r0: 4 reg\nletstate r1: 4 reg\n\
                 defop INC rd: 4 reg { txt = \"inc\", sem = [ *rd <- *rd b+ 0x1 ] }",
            )
            .unwrap(),
            &[],
        )
        .unwrap();
        let spec = Spec::from_ast(&m, &parse_spec("let x: 4 bit = *r0\nframe: modify: r0\npre: true\npost: *r0 == x b+ 0x1 && *r1 != 0x3").unwrap(), &[]).unwrap();
        let prog = m.program(&parse_program("(INC r0)").unwrap()).unwrap();
        (m, spec, prog)
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let (m, spec, prog) = inc_machine();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let states: Vec<MachineState> = (0..200).map(|_| m.shape.random_state(&mut rng)).collect();
        let seq = check_batch_sequential(&spec, &prog, &states);
        assert_eq!(check_batch(&spec, &prog, &states), seq);
        assert_eq!(failures(&spec, &prog, &states).len(), seq.iter().filter(|b| !**b).count());
        assert!(seq.iter().any(|b| *b) && seq.iter().any(|b| !*b));
    }

    proptest::proptest! {
        #[test]
        fn failures_are_exactly_the_rejected_states(seed: u64, n in 0usize..64) {
            let (m, spec, prog) = inc_machine();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let states: Vec<MachineState> = (0..n).map(|_| m.shape.random_state(&mut rng)).collect();
            let want: Vec<MachineState> = states.iter().filter(|s| !check_program(&spec, s, &prog)).cloned().collect();
            proptest::prop_assert_eq!(failures(&spec, &prog, &states), want);
        }
    }
}
