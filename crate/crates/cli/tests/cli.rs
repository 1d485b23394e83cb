use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blocksynth")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn disp_args<'a>(m: &'a str, l: &'a str, s: &'a str) -> Vec<&'a str> {
    vec!["--machine", m, "--lowering", l, "--spec", s]
}

#[test]
fn check_accepts_the_mips_machine() {
    assert_eq!(code(&run(&["check", &corpus("mips_subset.casp")])), 0);
    let toy = corpus("toy.casp");
    let spec = corpus("toy_specs/swap.casp");
    assert_eq!(code(&run(&["check", &toy, "--spec", &spec])), 0);
}

#[test]
fn bad_input_exits_with_usage_code() {
    let o = run(&["check", &corpus("missing.casp")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.casp"));
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.casp");
    std::fs::write(&p, "letstate r0: 4 reg\ndefop X rd: 4 reg { txt = \"x\", sem = [ *rd <- true ] }").unwrap();
    assert_eq!(code(&run(&["check", p.to_str().unwrap()])), 2);
}

#[test]
fn lowering_matches_the_golden_files() {
    for (m, l, g) in [
        ("mips_subset.casp", "disp_mips.casp", "golden/disp_check_mips.casp"),
        ("arm_subset.casp", "disp_arm.casp", "golden/disp_check_arm.casp"),
    ] {
        let o = run(&["lower", "--machine", &corpus(m), "--lowering", &corpus(l), "--spec", &corpus("disp_check.ale")]);
        assert_eq!(code(&o), 0);
        assert_eq!(String::from_utf8(o.stdout).unwrap(), std::fs::read_to_string(corpus(g)).unwrap());
    }
}

#[test]
fn verify_witness_and_refute_the_mutant() {
    let (m, l, s) = (corpus("mips_subset.casp"), corpus("disp_mips.casp"), corpus("disp_check.ale"));
    let mut args = vec!["verify"];
    args.extend(disp_args(&m, &l, &s));
    let good = corpus("disp_mips.prog");
    let mut a = args.clone();
    a.extend(["--prog", good.as_str()]);
    let o = run(&a);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"], "verified");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.prog");
    std::fs::write(&bad, "(LW r2 r6 0x0058)\n(SLTU r4 r2 r5)\n").unwrap();
    let mut a = args.clone();
    a.extend(["--prog", bad.to_str().unwrap()]);
    let o = run(&a);
    assert_eq!(code(&o), 1);
    let cex = json(&o)["counterexample"].clone();
    let st = dir.path().join("cex.json");
    std::fs::write(&st, cex.to_string()).unwrap();

    let mut r = vec!["run"];
    r.extend(disp_args(&m, &l, &s));
    let mut a = r.clone();
    a.extend(["--prog", bad.to_str().unwrap(), "--state", st.to_str().unwrap()]);
    let o = run(&a);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["spec_holds"], false);
    let mut a = r;
    a.extend(["--prog", good.as_str(), "--state", st.to_str().unwrap()]);
    let o = run(&a);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["spec_holds"], true);
}

#[test]
fn synth_writes_assembly_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.s");
    let o = run(&["synth", "--machine", &corpus("toy.casp"), "--spec", &corpus("toy_specs/xor.casp"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["result"], "success");
    assert_eq!(r["random_check_failures"], 0);
    for k in ["stage", "cegis_iterations", "counterexamples"] {
        assert!(r[k].is_u64(), "{k}");
    }
    for k in ["analysis", "guess", "verify", "total"] {
        assert!(r["time_ms"][k].is_u64(), "{k}");
    }
    let asm = std::fs::read_to_string(&out).unwrap();
    assert_eq!(asm, r["assembly"].as_str().unwrap());
    assert!(asm.starts_with("xor r1, "));
}

#[test]
fn synth_reports_no_solution_and_timeout() {
    let toy = corpus("toy.casp");
    let o = run(&["synth", "--machine", &toy, "--spec", &corpus("toy_specs/load_without_pointer.casp"), "--max-len", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["result"], "no-solution");
    let o = run(&["synth", "--machine", &toy, "--spec", &corpus("toy_specs/five_updates.casp"), "--timeout", "0.5", "--no-decompose"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["result"], "unknown");
}
