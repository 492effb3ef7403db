//! Hand-written lexer and recursive-descent parser for the `.lp` syntax.
//!
//! ```text
//! clause  := literal '.' | literal ':-' body '.' | ':-' body '.' | '?-' body '.'
//! body    := element (',' element)*
//! element := 'not' literal | literal
//! literal := ['-'] ident ['(' term (',' term)* ')']
//! term    := VAR | INT | atom ['(' term (',' term)* ')'] | '[' [term (',' term)*] ']'
//! atom    := ident | 'quoted'            (embedded quotes doubled)
//! ```
//! `%` starts a comment running to the end of the line.

use super::program::{BodyElement, Program, Query, Rule};
use super::term::{Literal, Term};
use super::LogicError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Quoted(String),
    Int(i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    If,
    Query,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("'{s}'"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::If => "`:-`".into(),
            Tok::Query => "`?-`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> LogicError {
    LogicError::Syntax { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Spanned>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                advance!();
            }
            if c.is_ascii_lowercase() {
                Tok::Ident(s)
            } else {
                Tok::Var(s)
            }
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) && int_allowed(&out))
        {
            let mut s = String::new();
            s.push(c);
            advance!();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                advance!();
            }
            let v = s
                .parse::<i64>()
                .map_err(|_| syntax(start_line, start_col, format!("integer out of range: {s}")))?;
            Tok::Int(v)
        } else if c == '\'' {
            advance!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(syntax(start_line, start_col, "unterminated quoted atom"));
                }
                if chars[i] == '\'' {
                    if chars.get(i + 1) == Some(&'\'') {
                        s.push('\'');
                        advance!();
                        advance!();
                        continue;
                    }
                    advance!();
                    break;
                }
                s.push(chars[i]);
                advance!();
            }
            Tok::Quoted(s)
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match (c, two.as_str()) {
                (_, ":-") => {
                    advance!();
                    advance!();
                    Tok::If
                }
                (_, "?-") => {
                    advance!();
                    advance!();
                    Tok::Query
                }
                ('(', _) => {
                    advance!();
                    Tok::LParen
                }
                (')', _) => {
                    advance!();
                    Tok::RParen
                }
                ('[', _) => {
                    advance!();
                    Tok::LBracket
                }
                (']', _) => {
                    advance!();
                    Tok::RBracket
                }
                (',', _) => {
                    advance!();
                    Tok::Comma
                }
                ('.', _) => {
                    advance!();
                    Tok::Dot
                }
                ('-', _) => {
                    advance!();
                    Tok::Minus
                }
                _ => return Err(syntax(start_line, start_col, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Spanned { tok, line: start_line, column: start_col });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// A leading `-` followed by digits is an integer only in term position,
/// i.e. right after `(`, `[` or `,`.
fn int_allowed(prev: &[Spanned]) -> bool {
    matches!(
        prev.last().map(|s| &s.tok),
        Some(Tok::LParen) | Some(Tok::LBracket) | Some(Tok::Comma)
    )
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

enum Clause {
    Rule(Rule),
    Query(Query),
}

impl Parser {
    fn new(text: &str) -> Result<Self, LogicError> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> LogicError {
        let s = &self.toks[self.pos];
        syntax(s.line, s.column, message)
    }

    fn expect(&mut self, want: Tok) -> Result<(), LogicError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn clause(&mut self) -> Result<Clause, LogicError> {
        match self.peek() {
            Tok::If => {
                self.next();
                let body = self.body()?;
                self.expect(Tok::Dot)?;
                Ok(Clause::Rule(Rule::constraint(body)))
            }
            Tok::Query => {
                self.next();
                let body = self.body()?;
                self.expect(Tok::Dot)?;
                Ok(Clause::Query(Query::new(body)))
            }
            _ => {
                let head = self.literal()?;
                match self.peek() {
                    Tok::Dot => {
                        self.next();
                        Ok(Clause::Rule(Rule::fact(head)))
                    }
                    Tok::If => {
                        self.next();
                        let body = self.body()?;
                        self.expect(Tok::Dot)?;
                        Ok(Clause::Rule(Rule::new(head, body)))
                    }
                    other => Err(self.error_here(format!(
                        "expected `.` or `:-` after rule head, found {}",
                        other.describe()
                    ))),
                }
            }
        }
    }

    fn body(&mut self) -> Result<Vec<BodyElement>, LogicError> {
        let mut out = vec![self.element()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.element()?);
        }
        Ok(out)
    }

    fn element(&mut self) -> Result<BodyElement, LogicError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "not") {
            self.next();
            Ok(BodyElement::Naf(self.literal()?))
        } else {
            Ok(BodyElement::Call(self.literal()?))
        }
    }

    fn literal(&mut self) -> Result<Literal, LogicError> {
        let negated = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let name = match self.peek().clone() {
            Tok::Ident(s) if s == "not" => {
                return Err(self.error_here("`not` is reserved for default negation"))
            }
            Tok::Ident(s) => {
                self.next();
                s
            }
            other => {
                return Err(self.error_here(format!(
                    "expected predicate name, found {}",
                    other.describe()
                )))
            }
        };
        let args = if *self.peek() == Tok::LParen { self.args()? } else { Vec::new() };
        Ok(Literal { negated, predicate: name, args })
    }

    fn args(&mut self) -> Result<Vec<Term>, LogicError> {
        self.expect(Tok::LParen)?;
        let mut out = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, LogicError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(Term::Var(v))
            }
            Tok::Int(i) => {
                self.next();
                Ok(Term::Int(i))
            }
            Tok::Ident(s) | Tok::Quoted(s) => {
                self.next();
                if *self.peek() == Tok::LParen {
                    Ok(Term::Compound(s, self.args()?))
                } else {
                    Ok(Term::Atom(s))
                }
            }
            Tok::LBracket => {
                self.next();
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    items.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.next();
                        items.push(self.term()?);
                    }
                }
                self.expect(Tok::RBracket)?;
                Ok(Term::List(items))
            }
            other => Err(self.error_here(format!("expected a term, found {}", other.describe()))),
        }
    }
}

/// Parses a program and checks rule safety.
pub fn parse_program(text: &str) -> Result<Program, LogicError> {
    let mut p = Parser::new(text)?;
    let mut program = Program::default();
    while !p.at_eof() {
        match p.clause()? {
            Clause::Rule(r) => program.rules.push(r),
            Clause::Query(q) => program.queries.push(q),
        }
    }
    program.check_safety()?;
    Ok(program)
}

/// Parses a single query, with or without the leading `?-` and trailing `.`.
pub fn parse_query(text: &str) -> Result<Query, LogicError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::Query {
        p.next();
    }
    let body = p.body()?;
    if *p.peek() == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error_here(format!("unexpected {} after query", p.peek().describe())));
    }
    let q = Query::new(body);
    q.check_safety()?;
    Ok(q)
}

/// Parses a single literal, e.g. `claim(application(none),[a],[p],[e])`.
pub fn parse_literal(text: &str) -> Result<Literal, LogicError> {
    let mut p = Parser::new(text)?;
    let l = p.literal()?;
    if !p.at_eof() {
        return Err(p.error_here(format!("unexpected {} after literal", p.peek().describe())));
    }
    Ok(l)
}
