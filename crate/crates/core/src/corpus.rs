//! Loading the shipped corpus and checking that it is consistent.

use crate::lower::{lower_spec, Lowered};
use crate::machine::{Machine, Spec};
use crate::syntax::loader::{load_alewife, load_lowerings, load_machine, load_program, load_spec};
use crate::syntax::pretty;
use std::fs;
use std::path::{Path, PathBuf};

/// Machines and the spec directory typechecked against each.
pub const MACHINES: &[(&str, Option<&str>)] =
    &[("toy.casp", Some("toy_specs")), ("mips_core.casp", None), ("mips_subset.casp", None), ("arm_subset.casp", None)];

/// Lowering pipelines: machine, lowering file, abstract spec, witness
/// program and golden output.
pub const PIPELINES: &[(&str, &str, &str, &str, &str)] = &[
    ("mips_subset.casp", "disp_mips.casp", "disp_check.ale", "disp_mips.prog", "golden/disp_check_mips.casp"),
    ("arm_subset.casp", "disp_arm.casp", "disp_check.ale", "disp_arm.prog", "golden/disp_check_arm.casp"),
];

pub fn machine_file(path: &Path) -> Result<(Machine, Vec<crate::lang::Decl>), String> {
    let src = load_machine(path).map_err(|e| e.to_string())?;
    let m = Machine::from_source(&src).map_err(|e| e.to_string())?;
    Ok((m, src.ast.decls))
}

pub fn spec_file(m: &Machine, path: &Path) -> Result<Spec, String> {
    let src = load_spec(path).map_err(|e| e.to_string())?;
    Spec::from_source(m, &src).map_err(|e| e.to_string())
}

/// Lowers an abstract spec for a machine through a lowering file.
pub fn lower_files(machine: &Path, lowering: &Path, ale: &Path) -> Result<(Machine, Lowered), String> {
    let (m, decls) = machine_file(machine)?;
    let mods = load_lowerings(lowering).map_err(|e| e.to_string())?;
    let ale = load_alewife(ale).map_err(|e| e.to_string())?;
    let low = lower_spec(&m, &decls, &mods, &ale).map_err(|e| e.to_string())?;
    Ok((m, low))
}

/// Text of a lowered specification as written to golden files.
pub fn lowered_text(low: &Lowered) -> String {
    pretty::spec(&low.ast)
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub result: Result<(), String>,
}

#[derive(Clone, Debug, Default)]
pub struct CorpusReport {
    pub checks: Vec<Check>,
}

impl CorpusReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.result.is_ok())
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.result.is_err()).collect()
    }

    fn add(&mut self, name: impl Into<String>, result: Result<(), String>) {
        self.checks.push(Check { name: name.into(), result });
    }
}

fn spec_files(dir: &Path) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .into_iter()
        .flatten()
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "casp"))
        .collect();
    out.sort();
    out
}

/// Parses and typechecks every corpus file and re-derives every golden
/// lowering.
pub fn corpus_validate(root: &Path) -> CorpusReport {
    let mut report = CorpusReport::default();
    for (file, specs) in MACHINES {
        let m = machine_file(&root.join(file));
        report.add(*file, m.as_ref().map(|_| ()).map_err(Clone::clone));
        let (Ok((m, _)), Some(dir)) = (m, specs) else { continue };
        for p in spec_files(&root.join(dir)) {
            let name = format!("{dir}/{}", p.file_name().unwrap().to_string_lossy());
            report.add(name, spec_file(&m, &p).map(|_| ()));
        }
    }
    for (machine, lowering, ale, prog, golden) in PIPELINES {
        let lowered = lower_files(&root.join(machine), &root.join(lowering), &root.join(ale));
        let (m, low) = match lowered {
            Ok(x) => x,
            Err(e) => {
                report.add(format!("{lowering} on {machine}"), Err(e));
                continue;
            }
        };
        report.add(format!("{lowering} on {machine}"), Ok(()));
        let p = load_program(&root.join(prog)).map_err(|e| e.to_string()).and_then(|p| m.program(&p).map_err(|e| e.to_string()));
        report.add(*prog, p.map(|_| ()));
        let want = fs::read_to_string(root.join(golden)).map_err(|e| format!("{golden}: {e}"));
        let got = lowered_text(&low);
        report.add(
            *golden,
            want.and_then(|w| {
                if w.trim_end() == got.trim_end() {
                    Ok(())
                } else {
                    Err(format!("{golden}: lowering output differs from the golden file"))
                }
            }),
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
    }

    #[test]
    fn shipped_corpus_is_green() {
        let r = corpus_validate(&root());
        assert!(r.ok(), "{:?}", r.failures());
        assert!(r.checks.len() >= 20);
    }

    fn copy_corpus(to: &Path) {
        for e in fs::read_dir(root()).unwrap() {
            let p = e.unwrap().path();
            let dest = to.join(p.file_name().unwrap());
            if p.is_dir() {
                fs::create_dir(&dest).unwrap();
                for f in fs::read_dir(&p).unwrap() {
                    let f = f.unwrap().path();
                    fs::copy(&f, dest.join(f.file_name().unwrap())).unwrap();
                }
            } else {
                fs::copy(&p, dest).unwrap();
            }
        }
    }

    #[test]
    fn corrupted_golden_is_named() {
        let dir = tempfile::tempdir().unwrap();
        copy_corpus(dir.path());
        let g = dir.path().join("golden/disp_check_mips.casp");
        let text = fs::read_to_string(&g).unwrap().replace("r5", "r7");
        fs::write(&g, text).unwrap();
        let r = corpus_validate(dir.path());
        let bad = r.failures();
        assert_eq!(bad.len(), 1);
        assert!(bad[0].result.as_ref().unwrap_err().contains("golden/disp_check_mips.casp"));
    }

    #[test]
    fn missing_include_names_the_includer() {
        let dir = tempfile::tempdir().unwrap();
        copy_corpus(dir.path());
        fs::remove_file(dir.path().join("mips_core.casp")).unwrap();
        let r = corpus_validate(dir.path());
        let bad: Vec<String> = r.failures().iter().map(|c| c.result.clone().unwrap_err()).collect();
        assert!(bad.iter().any(|e| e.contains("mips_subset.casp") && e.contains("mips_core.casp")), "{bad:?}");
    }
}
