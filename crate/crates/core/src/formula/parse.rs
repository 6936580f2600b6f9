//! Concrete syntax.
//!
//! ```text
//! iff     := implies ( "<->" implies )*        left-associative
//! implies := or ( "->" implies )?              right-associative
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary | atom | "true" | "false" | "(" iff ")"
//! atom    := [A-Za-z_][A-Za-z0-9_]* "'"?
//! ```
//!
//! The trailing prime is only accepted when [`ParseOptions::allow_primed`]
//! is set.

use std::fmt;

use thiserror::Error;

use super::{Atom, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub allow_primed: bool,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<Formula, ParseError> {
    let tokens = lex(text, 1, options)?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.iff()?;
    match parser.peek() {
        Tok::Eof => Ok(f),
        _ => Err(parser.error("unexpected token")),
    }
}

/// Parses a knowledge-base file: one formula per line, `#` starts a comment,
/// blank lines are skipped. Errors carry the line of the offending formula.
pub fn parse_kb(text: &str, options: ParseOptions) -> Result<Vec<Formula>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let tokens = lex(line, i + 1, options)?;
        let mut parser = Parser { tokens, pos: 0 };
        let f = parser.iff()?;
        if !matches!(parser.peek(), Tok::Eof) {
            return Err(parser.error("unexpected token"));
        }
        out.push(f);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(Atom),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(a) => write!(f, "`{a}`"),
            Tok::True => f.write_str("`true`"),
            Tok::False => f.write_str("`false`"),
            Tok::Not => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, first_line: usize, options: ParseOptions) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut column = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let push = |tok, len: usize, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            len
        };
        let consumed = match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => 1,
            '~' => push(Tok::Not, 1, &mut out),
            '&' => push(Tok::And, 1, &mut out),
            '|' => push(Tok::Or, 1, &mut out),
            '(' => push(Tok::LParen, 1, &mut out),
            ')' => push(Tok::RParen, 1, &mut out),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut out),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut out)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                let primed = chars.get(j) == Some(&'\'');
                if primed && !options.allow_primed {
                    return Err(err(
                        line,
                        column + (j - i),
                        format!("primed atom `{name}'` is not allowed here"),
                    ));
                }
                let tok = match name.as_str() {
                    "true" | "false" if primed => {
                        return Err(err(line, column, format!("constant `{name}` cannot be primed")))
                    }
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => {
                        let atom = Atom::new(&name);
                        Tok::Ident(if primed { atom.primed() } else { atom })
                    }
                };
                push(tok, j - i + usize::from(primed), &mut out)
            }
            c => return Err(err(line, column, format!("unexpected character `{c}`"))),
        };
        i += consumed;
        column += consumed;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, what: &str) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            message: format!("{what}: found {}", t.tok),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(a) => {
                self.bump();
                Ok(Formula::Atom(a))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(f)
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        Formula::True | Formula::False | Formula::Atom(_) => 6,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

/// Renders with the minimum parentheses needed to parse back to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = precedence(self);
        let (op, a, b, right_assoc) = match self {
            Formula::True => return f.write_str("true"),
            Formula::False => return f.write_str("false"),
            Formula::Atom(a) => return write!(f, "{a}"),
            Formula::Not(g) => {
                f.write_str("~")?;
                return write_child(f, g, precedence(g) < prec);
            }
            Formula::And(a, b) => (" & ", a, b, false),
            Formula::Or(a, b) => (" | ", a, b, false),
            Formula::Implies(a, b) => (" -> ", a, b, true),
            Formula::Iff(a, b) => (" <-> ", a, b, false),
        };
        let (left_parens, right_parens) = if right_assoc {
            (precedence(a) <= prec, precedence(b) < prec)
        } else {
            (precedence(a) < prec, precedence(b) <= prec)
        };
        write_child(f, a, left_parens)?;
        f.write_str(op)?;
        write_child(f, b, right_parens)
    }
}
