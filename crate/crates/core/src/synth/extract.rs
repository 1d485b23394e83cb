//! Assembly text for concrete programs.

use crate::interp::{Interp, Locals};
use crate::lang::Value;
use crate::machine::{Inst, Machine};
use std::cell::RefCell;
use std::collections::BTreeSet;

fn scratch_label(j: usize) -> String {
    format!(".Lblk{j}")
}

/// Renders each instruction's text form. Branch codes become the external
/// label (0xff) or scratch labels placed before the target instruction.
pub fn extract_assembly(m: &Machine, prog: &[Inst], ext_label: Option<&str>) -> Result<String, String> {
    let targets: RefCell<BTreeSet<usize>> = RefCell::new(BTreeSet::new());
    let mut lines = Vec::new();
    for (i, inst) in prog.iter().enumerate() {
        let def = &m.ops[inst.op];
        let render = |code: u8| -> String {
            if code == 0xff {
                return ext_label.unwrap_or("ext").to_string();
            }
            let j = i + 1 + code as usize;
            targets.borrow_mut().insert(j);
            scratch_label(j)
        };
        let interp = Interp { textlabel: Some(&render), ..Interp::new(&m.env, &m.shape) };
        let mut locals: Locals = def.params.iter().map(|(x, _)| x.clone()).zip(inst.args.iter().cloned()).collect();
        match interp.eval(None, &mut locals, &def.txt) {
            Ok(Value::Str(s)) => lines.push(s),
            Ok(_) => return Err(format!("instruction {}: text form of {} failed", i + 1, m.show_inst(inst))),
            Err(e) => return Err(format!("instruction {}: text form of {}: {e}", i + 1, m.show_inst(inst))),
        }
    }
    let targets = targets.into_inner();
    if let Some(j) = targets.iter().find(|j| **j > prog.len()) {
        return Err(format!("branch target {} lies past the end of the block", j));
    }
    let mut out = String::new();
    for (j, line) in lines.iter().enumerate() {
        if targets.contains(&j) {
            out.push_str(&scratch_label(j));
            out.push_str(":\n");
        }
        out.push_str(line);
        out.push('\n');
    }
    if targets.contains(&prog.len()) {
        out.push_str(&scratch_label(prog.len()));
        out.push_str(":\n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_machine, parse_program};

    fn machine() -> Machine {
        let text = "letstate r0: 4 reg\nletstate r1: 4 reg\nlet r0.txt = \"a\"\n\
            defop MOV rd: 4 reg rs: 4 reg { txt = format(\"mov {1}, {2}\", rd.txt, rs.txt), sem = [ *rd <- *rs ] }\n\
            defop BR n: 8 bit { txt = format(\"br {1}\", textlabel(n)), sem = [ BRANCH(n) ] }";
        Machine::from_ast(&parse_machine(text).unwrap(), &[]).unwrap()
    }

    fn prog(m: &Machine, s: &str) -> Vec<Inst> {
        m.program(&parse_program(s).unwrap()).unwrap()
    }

    #[test]
    fn branches_get_labels_at_their_targets() {
        let m = machine();
        let p = prog(&m, "(BR 0x01)\n(MOV r0 r0)\n(MOV r0 r0)\n(BR 0xff)");
        let asm = extract_assembly(&m, &p, Some("out")).unwrap();
        assert_eq!(asm, "br .Lblk2\nmov a, a\n.Lblk2:\nmov a, a\nbr out\n");
    }

    #[test]
    fn branch_to_the_end_labels_the_fallthrough() {
        let m = machine();
        let p = prog(&m, "(BR 0x00)");
        assert_eq!(extract_assembly(&m, &p, None).unwrap(), "br .Lblk1\n.Lblk1:\n");
    }

    #[test]
    fn missing_register_text_is_reported() {
        let m = machine();
        let p = prog(&m, "(MOV r1 r0)");
        assert!(extract_assembly(&m, &p, None).unwrap_err().contains("MOV"));
    }
}
