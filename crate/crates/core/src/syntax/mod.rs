//! Concrete syntax: tokenizer, parser, pretty-printer, and file loading.

pub mod lexer;
pub mod loader;
pub mod parser;
pub mod pretty;

use crate::lang::ast::*;
use parser::Parser;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub file: Option<String>,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl SyntaxError {
    pub fn in_file(mut self, file: &str) -> SyntaxError {
        if self.file.is_none() {
            self.file = Some(file.to_string());
        }
        self
    }

    pub fn plain(file: Option<&str>, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { file: file.map(str::to_string), line: 0, col: 0, msg: msg.into() }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), 0) => write!(f, "{file}: {}", self.msg),
            (Some(file), _) => write!(f, "{file}:{}:{}: {}", self.line, self.col, self.msg),
            (None, 0) => write!(f, "{}", self.msg),
            (None, _) => write!(f, "{}:{}: {}", self.line, self.col, self.msg),
        }
    }
}

impl std::error::Error for SyntaxError {}

/// Where a top-level item starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loc {
    pub file: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// A parsed file with the location of each top-level item. For
/// specifications the last two locations belong to `pre:` and `post:`.
#[derive(Clone, Debug)]
pub struct Source<T> {
    pub ast: T,
    pub locs: Vec<Loc>,
}

pub fn parse_machine(text: &str) -> Result<MachineAst, SyntaxError> {
    Parser::new(text)?.machine()
}

pub fn parse_spec(text: &str) -> Result<SpecAst, SyntaxError> {
    Parser::new(text)?.spec()
}

pub fn parse_lowerings(text: &str) -> Result<Vec<LoweringAst>, SyntaxError> {
    Parser::new(text)?.lowerings()
}

pub fn parse_alewife(text: &str) -> Result<AleSpecAst, SyntaxError> {
    Parser::new(text)?.alewife()
}

pub fn parse_program(text: &str) -> Result<Vec<InstAst>, SyntaxError> {
    Parser::new(text)?.program()
}

pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    Parser::new(text)?.finish_expr()
}

pub fn parse_stmt(text: &str) -> Result<Stmt, SyntaxError> {
    let mut p = Parser::new(text)?;
    let s = p.stmt()?;
    if !p.at_eof() {
        return Err(SyntaxError::plain(None, "trailing input after statement"));
    }
    Ok(s)
}
