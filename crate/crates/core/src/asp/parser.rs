//! Recursive-descent parser for the supported ASP subset.
//!
//! ```text
//! program    ::= statement*
//! statement  ::= head "." | head ":-" body "." | ":-" body "."
//! head       ::= atom ("|" atom)*
//! body       ::= literal ("," literal)*
//! literal    ::= "not" atom | atom | term cmp term
//! atom       ::= ident [ "(" term ("," term)* ")" ]
//! term       ::= ident | VARIABLE | ["-"] digits
//! cmp        ::= "=" | "==" | "!=" | "<>" | "<" | "<=" | ">" | ">="
//! ```
//!
//! `%` starts a comment running to the end of the line.

use std::fmt;

use super::syntax::{Atom, CmpOp, Comparison, Literal, Rule, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Bar,
    If,
    Cmp(CmpOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Cmp(op) => write!(f, "`{}`", op.symbol()),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '%' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.bump() else {
                out.push(Spanned {
                    tok: Tok::Eof,
                    line,
                    column,
                });
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '|' => Tok::Bar,
                ':' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        Tok::If
                    } else {
                        return Err(self.error(line, column, "expected `:-`"));
                    }
                }
                '=' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                    }
                    Tok::Cmp(CmpOp::Eq)
                }
                '!' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::Cmp(CmpOp::Ne)
                    } else {
                        return Err(self.error(line, column, "expected `!=`"));
                    }
                }
                '<' => match self.chars.peek() {
                    Some('=') => {
                        self.bump();
                        Tok::Cmp(CmpOp::Le)
                    }
                    Some('>') => {
                        self.bump();
                        Tok::Cmp(CmpOp::Ne)
                    }
                    _ => Tok::Cmp(CmpOp::Lt),
                },
                '>' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::Cmp(CmpOp::Ge)
                    } else {
                        Tok::Cmp(CmpOp::Gt)
                    }
                }
                '-' if self.chars.peek().is_some_and(char::is_ascii_digit) => {
                    self.integer(line, column, true)?
                }
                c if c.is_ascii_digit() => {
                    let mut digits = String::from(c);
                    self.take_while_into(&mut digits, |c| c.is_ascii_digit());
                    digits
                        .parse()
                        .map(Tok::Int)
                        .map_err(|_| self.error(line, column, "integer out of range"))?
                }
                c if c.is_ascii_lowercase() => {
                    let mut name = String::from(c);
                    self.take_while_into(&mut name, is_name_char);
                    Tok::Ident(name)
                }
                c if c.is_ascii_uppercase() => {
                    let mut name = String::from(c);
                    self.take_while_into(&mut name, is_name_char);
                    Tok::Var(name)
                }
                c => {
                    return Err(self.error(line, column, format!("unexpected character {c:?}")))
                }
            };
            out.push(Spanned { tok, line, column });
        }
    }

    fn integer(&mut self, line: usize, column: usize, negative: bool) -> Result<Tok, ParseError> {
        let mut digits = String::from(if negative { "-" } else { "" });
        self.take_while_into(&mut digits, |c| c.is_ascii_digit());
        digits
            .parse()
            .map(Tok::Int)
            .map_err(|_| self.error(line, column, "integer out of range"))
    }

    fn take_while_into(&mut self, buf: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            buf.push(c);
            self.bump();
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn next(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            column: here.column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn program(&mut self) -> Result<Vec<Rule>, ParseError> {
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            rules.push(self.statement()?);
        }
        Ok(rules)
    }

    fn statement(&mut self) -> Result<Rule, ParseError> {
        let head = if *self.peek() == Tok::If {
            Vec::new()
        } else {
            self.head()?
        };
        let body = match self.peek() {
            Tok::If => {
                self.next();
                self.body()?
            }
            Tok::Dot if !head.is_empty() => Vec::new(),
            _ => return Err(self.unexpected("`:-` or `.`")),
        };
        self.expect(Tok::Dot, "`.` at end of statement")?;
        Ok(Rule { head, body })
    }

    fn head(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::Bar {
            self.next();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn body(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut lits = vec![self.literal()?];
        while *self.peek() == Tok::Comma {
            self.next();
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        match self.peek() {
            Tok::Ident(kw) if kw == "not" && matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.next();
                if matches!(self.peek_at(1), Tok::Cmp(_)) {
                    return Err(self.error("comparisons cannot be negated"));
                }
                Ok(Literal::Neg(self.atom()?))
            }
            Tok::Ident(_) if matches!(self.peek_at(1), Tok::Cmp(_)) => self.comparison(),
            Tok::Ident(_) => Ok(Literal::Pos(self.atom()?)),
            Tok::Var(_) | Tok::Int(_) => self.comparison(),
            _ => Err(self.unexpected("a literal")),
        }
    }

    fn comparison(&mut self) -> Result<Literal, ParseError> {
        let left = self.term()?;
        let op = match self.peek() {
            Tok::Cmp(op) => *op,
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.next();
        let right = self.term()?;
        Ok(Literal::Cmp(Comparison { op, left, right }))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = match self.peek() {
            Tok::Ident(name) if name == "not" => {
                return Err(self.error("`not` is reserved and cannot name a predicate"))
            }
            Tok::Ident(name) => name.clone(),
            _ => return Err(self.unexpected("a predicate name")),
        };
        self.next();
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`,` or `)`")?;
        }
        Ok(Atom { predicate, args })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let term = match self.peek() {
            Tok::Ident(name) => Term::Const(name.clone()),
            Tok::Var(name) => Term::Var(name.clone()),
            Tok::Int(i) => Term::Int(*i),
            _ => return Err(self.unexpected("a term")),
        };
        self.next();
        Ok(term)
    }
}

/// Parses program text into rules, in source order.
pub fn parse(text: &str) -> Result<Vec<Rule>, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    Parser { toks, pos: 0 }.program()
}
