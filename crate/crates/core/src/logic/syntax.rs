//! Text form of terms, clauses and programs.
//!
//! Lowercase identifiers are constants, identifiers starting with an
//! uppercase letter or `_` are variables, `[a,b|T]` is list sugar and
//! `f(X,Y)` a compound. Clauses end in `.`; a final `!` in the body marks a
//! clause-terminal cut. `%` starts a comment that runs to the end of line.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::clause::{Clause, Literal};
use super::symbol::{well_known, Sym};
use super::term::{Term, Var};
use crate::background::{Mode, PredicateSignature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

impl SyntaxError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            message: message.into(),
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering

fn is_plain_atom(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_atom(out: &mut impl fmt::Write, sym: Sym) -> fmt::Result {
    let name = sym.as_str();
    if name == "[]" || is_plain_atom(name) {
        out.write_str(name)
    } else {
        out.write_char('\'')?;
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                out.write_char('\\')?;
            }
            out.write_char(c)?;
        }
        out.write_char('\'')
    }
}

pub(crate) fn write_term(
    out: &mut impl fmt::Write,
    term: &Term,
    name: &dyn Fn(Var) -> String,
) -> fmt::Result {
    match term {
        Term::Var(v) => out.write_str(&name(*v)),
        Term::Atom(s) => write_atom(out, *s),
        Term::Compound(f, args) if *f == well_known::cons() && args.len() == 2 => {
            out.write_char('[')?;
            write_term(out, &args[0], name)?;
            let mut tail = &args[1];
            loop {
                if let Some((h, t)) = tail.as_cons() {
                    out.write_char(',')?;
                    write_term(out, h, name)?;
                    tail = t;
                } else if tail.is_nil() {
                    break;
                } else {
                    out.write_char('|')?;
                    write_term(out, tail, name)?;
                    break;
                }
            }
            out.write_char(']')
        }
        Term::Compound(f, args) => {
            write_atom(out, *f)?;
            out.write_char('(')?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.write_char(',')?;
                }
                write_term(out, a, name)?;
            }
            out.write_char(')')
        }
    }
}

pub(crate) fn write_literal(
    out: &mut impl fmt::Write,
    lit: &Literal,
    name: &dyn Fn(Var) -> String,
) -> fmt::Result {
    if lit.is_equality() {
        write_term(out, &lit.args[0], name)?;
        out.write_str(" = ")?;
        write_term(out, &lit.args[1], name)
    } else {
        write_term(out, &lit.to_term(), name)
    }
}

/// Conventional variable name for the `index`-th variable of a clause:
/// `A`..`Z`, then `A1`..`Z1`, and so on.
pub fn var_name(index: usize) -> String {
    let letter = (b'A' + (index % 26) as u8) as char;
    match index / 26 {
        0 => letter.to_string(),
        round => format!("{letter}{round}"),
    }
}

/// Renders a term with variables named `_<id>`; [`parse_term`] reads it back
/// to a structurally identical term.
pub fn render_term(term: &Term) -> String {
    term.to_string()
}

/// Renders a clause with variables named `A`, `B`, ... in order of first
/// occurrence.
pub fn render_clause(clause: &Clause) -> String {
    let names: HashMap<Var, String> = clause
        .vars()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, var_name(i)))
        .collect();
    let name = |v: Var| names[&v].clone();
    let mut out = String::new();
    write_literal(&mut out, &clause.head, &name).unwrap();
    if !clause.body.is_empty() || clause.ends_in_cut {
        out.push_str(" :- ");
        for (i, lit) in clause.body.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_literal(&mut out, lit, &name).unwrap();
        }
        if clause.ends_in_cut {
            if !clause.body.is_empty() {
                out.push_str(", ");
            }
            out.push('!');
        }
    }
    out.push('.');
    out
}

pub fn render_signature(sig: &PredicateSignature) -> String {
    let args: Vec<String> = sig
        .arg_types
        .iter()
        .zip(&sig.arg_modes)
        .map(|(ty, mode)| format!("{ty}:{}", mode.symbol()))
        .collect();
    format!(":- signature {}({}).", sig.name, args.join(", "))
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    Var(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    End,
    Neck,
    Bang,
    Eq,
    Colon,
    Plus,
    Minus,
    Comment(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line });
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '%' => {
                let start = i + 1;
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                push(&mut out, Tok::Comment(text.trim().to_string()));
            }
            '(' | ')' | '[' | ']' | ',' | '|' | '!' | '=' | '+' | '-' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    '|' => Tok::Bar,
                    '!' => Tok::Bang,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    _ => Tok::Minus,
                };
                push(&mut out, tok);
                i += 1;
            }
            ':' => {
                if chars.get(i + 1) == Some(&'-') {
                    push(&mut out, Tok::Neck);
                    i += 2;
                } else {
                    push(&mut out, Tok::Colon);
                    i += 1;
                }
            }
            '.' => {
                let next = chars.get(i + 1);
                if next.is_none_or(|n| n.is_whitespace() || *n == '%') {
                    push(&mut out, Tok::End);
                    i += 1;
                } else {
                    return Err(SyntaxError::new(line, "unexpected '.' inside a clause"));
                }
            }
            '\'' => {
                let mut text = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(SyntaxError::new(line, "unterminated quoted atom"))
                        }
                        Some('\\') => {
                            let Some(&escaped) = chars.get(i + 1) else {
                                return Err(SyntaxError::new(line, "unterminated quoted atom"));
                            };
                            text.push(escaped);
                            i += 2;
                        }
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            text.push(ch);
                            i += 1;
                        }
                    }
                }
                push(&mut out, Tok::Atom(text));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let tok = if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(text)
                } else {
                    Tok::Atom(text)
                };
                push(&mut out, tok);
            }
            other => {
                return Err(SyntaxError::new(
                    line,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Parsing

/// Maps variable names to ids within one clause or term.
struct VarScope {
    names: HashMap<String, Var>,
    next: u32,
    /// `_<digits>` denotes the variable with exactly that id.
    explicit_ids: bool,
}

impl VarScope {
    fn new(explicit_ids: bool) -> Self {
        VarScope {
            names: HashMap::new(),
            next: 0,
            explicit_ids,
        }
    }

    fn get(&mut self, name: &str) -> Var {
        if self.explicit_ids {
            if let Some(id) = name.strip_prefix('_').and_then(|d| d.parse::<u32>().ok()) {
                return Var(id);
            }
        }
        if name == "_" {
            let v = Var(self.next);
            self.next += 1;
            return v;
        }
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = Var(self.next);
        self.next += 1;
        self.names.insert(name.to_string(), v);
        v
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn new(toks: Vec<Spanned>) -> Self {
        Parser {
            toks,
            pos: 0,
            last_line: 1,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |s| s.line)
    }

    fn next(&mut self) -> Option<Tok> {
        let s = self.toks.get(self.pos)?.clone();
        self.pos += 1;
        self.last_line = s.line;
        Some(s.tok)
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line(), message)
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.next();
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {what}, found {t:?}"))),
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn term(&mut self, scope: &mut VarScope) -> Result<Term, SyntaxError> {
        match self.next() {
            Some(Tok::Var(name)) => Ok(Term::Var(scope.get(&name))),
            Some(Tok::Atom(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.next();
                    let mut args = vec![self.term(scope)?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.next();
                        args.push(self.term(scope)?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Term::compound(Sym::new(&name), args))
                } else {
                    Ok(Term::atom(&name))
                }
            }
            Some(Tok::LBracket) => {
                if self.peek() == Some(&Tok::RBracket) {
                    self.next();
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term(scope)?];
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    items.push(self.term(scope)?);
                }
                let tail = if self.peek() == Some(&Tok::Bar) {
                    self.next();
                    self.term(scope)?
                } else {
                    Term::nil()
                };
                self.expect(Tok::RBracket, "']'")?;
                Ok(Term::partial_list(items, tail))
            }
            Some(t) => Err(SyntaxError::new(
                self.last_line,
                format!("expected a term, found {t:?}"),
            )),
            None => Err(self.err("expected a term, found end of input")),
        }
    }

    /// A body literal; `None` stands for `!`.
    fn body_literal(&mut self, scope: &mut VarScope) -> Result<Option<Literal>, SyntaxError> {
        if self.peek() == Some(&Tok::Bang) {
            self.next();
            return Ok(None);
        }
        let lhs = self.term(scope)?;
        if self.peek() == Some(&Tok::Eq) {
            self.next();
            let rhs = self.term(scope)?;
            return Ok(Some(Literal::equality(lhs, rhs)));
        }
        Literal::from_term(&lhs)
            .map(Some)
            .ok_or_else(|| SyntaxError::new(self.last_line, "a variable cannot be used as a goal"))
    }

    fn clause(&mut self) -> Result<Clause, SyntaxError> {
        let mut scope = VarScope::new(false);
        let head_line = self.line();
        let head = self.term(&mut scope)?;
        let head = Literal::from_term(&head)
            .ok_or_else(|| SyntaxError::new(head_line, "clause head must be a predicate"))?;
        let mut body = Vec::new();
        let mut ends_in_cut = false;
        if self.peek() == Some(&Tok::Neck) {
            self.next();
            loop {
                let lit_line = self.line();
                match self.body_literal(&mut scope)? {
                    Some(lit) => {
                        if ends_in_cut {
                            return Err(SyntaxError::new(
                                lit_line,
                                "cut is only allowed as the last body literal",
                            ));
                        }
                        body.push(lit);
                    }
                    None => {
                        if ends_in_cut {
                            return Err(SyntaxError::new(lit_line, "repeated cut"));
                        }
                        ends_in_cut = true;
                    }
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::End, "'.'")?;
        Ok(Clause {
            head,
            body,
            ends_in_cut,
        })
    }

    fn signature(&mut self) -> Result<PredicateSignature, SyntaxError> {
        let name = match self.next() {
            Some(Tok::Atom(n)) => n,
            _ => {
                return Err(SyntaxError::new(
                    self.last_line,
                    "expected a predicate name in signature",
                ))
            }
        };
        self.expect(Tok::LParen, "'('")?;
        let mut types = Vec::new();
        let mut modes = Vec::new();
        loop {
            let ty = match self.next() {
                Some(Tok::Atom(t)) => t,
                _ => {
                    return Err(SyntaxError::new(
                        self.last_line,
                        "expected an argument type",
                    ))
                }
            };
            // `type:-` lexes as a neck token.
            let mode = match self.next() {
                Some(Tok::Neck) => Mode::Output,
                Some(Tok::Colon) => match self.next() {
                    Some(Tok::Plus) => Mode::Input,
                    Some(Tok::Minus) => Mode::Output,
                    _ => {
                        return Err(SyntaxError::new(
                            self.last_line,
                            "expected a mode '+' or '-'",
                        ))
                    }
                },
                _ => {
                    return Err(SyntaxError::new(
                        self.last_line,
                        "expected ':' after argument type",
                    ))
                }
            };
            types.push(ty);
            modes.push(mode);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => {
                    return Err(SyntaxError::new(
                        self.last_line,
                        "expected ',' or ')' in signature",
                    ))
                }
            }
        }
        self.expect(Tok::End, "'.'")?;
        Ok(PredicateSignature::new(&name, types, modes))
    }

    fn trailing_comment(&mut self, line: usize) -> Option<String> {
        match self.toks.get(self.pos) {
            Some(Spanned {
                tok: Tok::Comment(text),
                line: l,
            }) if *l == line => {
                let text = text.clone();
                self.pos += 1;
                Some(text)
            }
            _ => None,
        }
    }
}

/// One top-level item of a program or background file.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Clause {
        clause: Clause,
        line: usize,
        /// Text of a `%` comment on the line where the clause ends.
        comment: Option<String>,
    },
    Signature {
        signature: PredicateSignature,
        line: usize,
    },
}

/// Parses a sequence of clauses and `:- signature ...` directives.
pub fn parse_items(src: &str) -> Result<Vec<Item>, SyntaxError> {
    let mut parser = Parser::new(lex(src)?);
    let mut items = Vec::new();
    while let Some(tok) = parser.peek() {
        match tok {
            Tok::Comment(_) => {
                parser.next();
            }
            Tok::Neck => {
                let line = parser.line();
                parser.next();
                match parser.next() {
                    Some(Tok::Atom(d)) if d == "signature" => {}
                    _ => return Err(SyntaxError::new(line, "unknown directive")),
                }
                let signature = parser.signature()?;
                items.push(Item::Signature { signature, line });
            }
            _ => {
                let line = parser.line();
                let clause = parser.clause()?;
                let comment = parser.trailing_comment(parser.last_line);
                items.push(Item::Clause {
                    clause,
                    line,
                    comment,
                });
            }
        }
    }
    Ok(items)
}

pub fn parse_clause(src: &str) -> Result<Clause, SyntaxError> {
    let mut parser = Parser::new(lex(src)?);
    let clause = parser.clause()?;
    while let Some(Tok::Comment(_)) = parser.peek() {
        parser.next();
    }
    if parser.peek().is_some() {
        return Err(parser.err("trailing input after clause"));
    }
    Ok(clause)
}

/// Parses a single term. `_<digits>` names the variable with that id;
/// other variable names are numbered from 0 in order of appearance.
pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut parser = Parser::new(lex(src)?);
    let mut scope = VarScope::new(true);
    let t = parser.term(&mut scope)?;
    if parser.peek().is_some() {
        return Err(parser.err("trailing input after term"));
    }
    Ok(t)
}

/// Parses a goal such as `split([a,c,t],B,C)` or `X = [a]`.
pub fn parse_literal(src: &str) -> Result<Literal, SyntaxError> {
    let mut parser = Parser::new(lex(src)?);
    let mut scope = VarScope::new(false);
    let lit = parser
        .body_literal(&mut scope)?
        .ok_or_else(|| SyntaxError::new(1, "a cut is not a goal"))?;
    if parser.peek() == Some(&Tok::End) {
        parser.next();
    }
    if parser.peek().is_some() {
        return Err(parser.err("trailing input after goal"));
    }
    Ok(lit)
}
