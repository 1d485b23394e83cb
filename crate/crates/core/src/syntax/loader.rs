//! Reading source files from disk and expanding `include` directives.

use super::parser::Parser;
use super::{Loc, Source, SyntaxError};
use crate::lang::ast::*;
use std::path::{Path, PathBuf};

fn read(path: &Path) -> Result<String, SyntaxError> {
    std::fs::read_to_string(path)
        .map_err(|e| SyntaxError::plain(Some(&path.display().to_string()), format!("cannot read file: {e}")))
}

/// Parses `path` with `f`, returning the result and the item locations.
fn parse_file<T>(
    path: &Path,
    f: impl FnOnce(&mut Parser) -> Result<T, SyntaxError>,
) -> Result<(T, Vec<Loc>), SyntaxError> {
    let name = path.display().to_string();
    let text = read(path)?;
    let mut p = Parser::new(&text).map_err(|e| e.in_file(&name))?;
    let ast = f(&mut p).map_err(|e| e.in_file(&name))?;
    let locs = p.marks.iter().map(|&(line, col)| Loc { file: name.clone(), line, col }).collect();
    Ok((ast, locs))
}

fn resolve(includer: &Path, target: &str) -> PathBuf {
    includer.parent().unwrap_or(Path::new(".")).join(target)
}

fn canonical(path: &Path) -> PathBuf {
    path.canonicalize().unwrap_or_else(|_| path.to_path_buf())
}

/// Reads the declarations of an included file, expanding nested includes.
fn included(
    includer: &Path,
    target: &str,
    stack: &mut Vec<PathBuf>,
) -> Result<(Vec<Decl>, Vec<Loc>), SyntaxError> {
    let path = resolve(includer, target);
    if !path.exists() {
        return Err(SyntaxError::plain(
            Some(&includer.display().to_string()),
            format!("cannot resolve include \"{target}\""),
        ));
    }
    let canon = canonical(&path);
    if stack.contains(&canon) {
        let mut chain: Vec<String> = stack.iter().map(|p| p.display().to_string()).collect();
        chain.push(canon.display().to_string());
        return Err(SyntaxError::plain(None, format!("include cycle: {}", chain.join(" -> "))));
    }
    let (ast, locs) = parse_file(&path, |p| p.machine())?;
    stack.push(canon);
    let out = expand(ast.decls, locs, &path, stack)?;
    stack.pop();
    Ok(out)
}

fn expand(
    decls: Vec<Decl>,
    locs: Vec<Loc>,
    path: &Path,
    stack: &mut Vec<PathBuf>,
) -> Result<(Vec<Decl>, Vec<Loc>), SyntaxError> {
    let mut out = (Vec::new(), Vec::new());
    for (d, loc) in decls.into_iter().zip(locs) {
        match d {
            Decl::Include(target) => {
                let (ds, ls) = included(path, &target, stack)?;
                out.0.extend(ds);
                out.1.extend(ls);
            }
            d => {
                out.0.push(d);
                out.1.push(loc);
            }
        }
    }
    Ok(out)
}

pub fn load_machine(path: &Path) -> Result<Source<MachineAst>, SyntaxError> {
    let (ast, locs) = parse_file(path, |p| p.machine())?;
    let (decls, locs) = expand(ast.decls, locs, path, &mut vec![canonical(path)])?;
    Ok(Source { ast: MachineAst { decls }, locs })
}

fn expand_items(
    items: Vec<SpecItem>,
    locs: Vec<Loc>,
    path: &Path,
) -> Result<(Vec<SpecItem>, Vec<Loc>), SyntaxError> {
    let mut out = (Vec::new(), Vec::new());
    let mut stack = vec![canonical(path)];
    for (it, loc) in items.into_iter().zip(locs) {
        match it {
            SpecItem::Decl(Decl::Include(target)) => {
                let (ds, ls) = included(path, &target, &mut stack)?;
                out.0.extend(ds.into_iter().map(SpecItem::Decl));
                out.1.extend(ls);
            }
            it => {
                out.0.push(it);
                out.1.push(loc);
            }
        }
    }
    Ok(out)
}

pub fn load_spec(path: &Path) -> Result<Source<SpecAst>, SyntaxError> {
    let (ast, mut locs) = parse_file(path, |p| p.spec())?;
    let tail = locs.split_off(ast.items.len());
    let (items, mut locs) = expand_items(ast.items, locs, path)?;
    locs.extend(tail);
    Ok(Source { ast: SpecAst { items, pre: ast.pre, post: ast.post }, locs })
}

pub fn load_lowerings(path: &Path) -> Result<Vec<Source<LoweringAst>>, SyntaxError> {
    let (mods, locs) = parse_file(path, |p| p.lowerings())?;
    let mut locs = locs.into_iter();
    let mut out = Vec::new();
    for m in mods {
        let mine: Vec<Loc> = locs.by_ref().take(m.items.len()).collect();
        let (items, locs) = expand_items(m.items, mine, path)?;
        out.push(Source { ast: LoweringAst { name: m.name, items }, locs });
    }
    Ok(out)
}

pub fn load_alewife(path: &Path) -> Result<Source<AleSpecAst>, SyntaxError> {
    let (ast, locs) = parse_file(path, |p| p.alewife())?;
    Ok(Source { ast, locs })
}

pub fn load_program(path: &Path) -> Result<Vec<InstAst>, SyntaxError> {
    Ok(parse_file(path, |p| p.program())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn includes_expand_relative_to_includer() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        write(&dir.path().join("sub"), "regs.casp", "\n  letstate r0: 4 reg");
        let top = write(dir.path(), "m.casp", "include \"sub/regs.casp\"\nletstate r1: 4 reg");
        let m = load_machine(&top).unwrap();
        assert_eq!(m.ast.decls.len(), 2);
        assert_eq!(m.ast.decls[0].name(), Some("r0"));
        assert!(m.locs[0].file.ends_with("regs.casp"));
        assert_eq!((m.locs[0].line, m.locs[0].col), (2, 3));
        assert_eq!((m.locs[1].line, m.locs[1].col), (2, 1));
    }

    #[test]
    fn include_cycles_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.casp", "include \"b.casp\"");
        let a = dir.path().join("a.casp");
        write(dir.path(), "b.casp", "include \"a.casp\"");
        let e = load_machine(&a).unwrap_err();
        assert!(e.msg.contains("include cycle"), "{e}");
    }

    #[test]
    fn missing_include_names_the_includer() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.casp", "include \"nope.casp\"");
        let e = load_machine(&a).unwrap_err();
        assert!(e.to_string().contains("a.casp"), "{e}");
        assert!(e.msg.contains("nope.casp"));
    }

    #[test]
    fn spec_locations_cover_pre_and_post() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(dir.path(), "s.casp", "frame: modify: r1\npre: true\npost: true");
        let src = load_spec(&s).unwrap();
        assert_eq!(src.locs.len(), 3);
        assert_eq!(src.locs[2].line, 3);
    }
}
