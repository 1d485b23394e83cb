//! Tokenizer shared by all surface languages.

use super::SyntaxError;
use crate::lang::Bitvec;
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Bits(Bitvec),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const SYMBOLS: &[&str] = &[
    ">>S", "<-", "->", "..", "==", "!=", "<=", ">=", "&&", "||", "^^", "<<", ">>", "(", ")", "[", "]",
    "{", "}", ",", ";", ":", "=", "<", ">", "+", "-", "*", "/", "!", "|", ".",
];

const BV_OPS: &[&str] = &[
    "bs<=", "bs>=", "bs<", "bs>", "b<=", "b>=", "b<", "b>", "b+", "b-", "b*", "b/",
];

/// Hyphenated keywords that would otherwise lex as `ident - ident`.
const HYPHENATED: &[&str] = &["reg-modify", "mem-modify", "lower-with"];

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| SyntaxError { file: None, line, col, msg };

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }
    let starts_with = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c));

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if starts_with(i, "(*") {
            let (sl, sc) = (line, col);
            let mut depth = 0;
            loop {
                if i >= chars.len() {
                    return Err(err(sl, sc, "unterminated comment".into()));
                }
                if starts_with(i, "(*") {
                    depth += 1;
                    advance!(2);
                } else if starts_with(i, "*)") {
                    depth -= 1;
                    advance!(2);
                    if depth == 0 {
                        break;
                    }
                } else {
                    advance!(1);
                }
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let push = |toks: &mut Vec<Token>, tok| toks.push(Token { tok, line: tl, col: tc });

        if c == '"' {
            let mut s = String::new();
            advance!(1);
            loop {
                if i >= chars.len() {
                    return Err(err(tl, tc, "unterminated string".into()));
                }
                match chars[i] {
                    '"' => {
                        advance!(1);
                        break;
                    }
                    '\\' if i + 1 < chars.len() => {
                        s.push(match chars[i + 1] {
                            'n' => '\n',
                            't' => '\t',
                            o => o,
                        });
                        advance!(2);
                    }
                    o => {
                        s.push(o);
                        advance!(1);
                    }
                }
            }
            push(&mut toks, Tok::Str(s));
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let tok = if word.starts_with("0x") || word.starts_with("0b") {
                Tok::Bits(
                    Bitvec::parse_literal(&word)
                        .ok_or_else(|| err(tl, tc, format!("malformed bitvector literal {word}")))?,
                )
            } else {
                Tok::Int(
                    word.parse::<BigInt>()
                        .map_err(|_| err(tl, tc, format!("malformed number {word}")))?,
                )
            };
            advance!(j - i);
            push(&mut toks, tok);
            continue;
        }
        if c == 'b' {
            if let Some(op) = BV_OPS.iter().find(|op| starts_with(i, op)) {
                advance!(op.len());
                push(&mut toks, Tok::Sym(op));
                continue;
            }
        }
        if c.is_ascii_alphabetic() || c == '_' {
            if let Some(h) = HYPHENATED.iter().find(|h| starts_with(i, h)) {
                let end = i + h.len();
                if end >= chars.len() || !ident_char(chars[end]) {
                    advance!(h.len());
                    push(&mut toks, Tok::Ident(h.to_string()));
                    continue;
                }
            }
            let mut j = i;
            while j < chars.len() && ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            advance!(j - i);
            push(&mut toks, Tok::Ident(word));
            continue;
        }
        if let Some(sym) = SYMBOLS.iter().find(|s| starts_with(i, s)) {
            if *sym == ">>S" && i + 3 < chars.len() && ident_char(chars[i + 3]) {
                advance!(2);
                push(&mut toks, Tok::Sym(">>"));
                continue;
            }
            advance!(sym.len());
            push(&mut toks, Tok::Sym(sym));
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character {c:?}")));
    }
    toks.push(Token { tok: Tok::Eof, line, col });
    Ok(toks)
}
