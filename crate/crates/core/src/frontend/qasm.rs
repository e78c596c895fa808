//! Single-pass parser for the OpenQASM 2.0 subset used by Clifford+T inputs.
//!
//! Supported statements: the `OPENQASM 2.0;` header, `include` directives,
//! one `qreg`, any number of `creg`s, `barrier` (ignored), `measure`, and the
//! gates {h, s, sdg, t, tdg, x, y, z, cx, cz} with explicitly indexed
//! operands. Anything else is rejected with a line/column diagnostic;
//! arbitrary-angle rotations in particular must be synthesized away upstream.

use crate::error::{Error, Result};

use super::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    String_,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Semicolon,
    Arrow,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.src.get(self.pos + 1) == Some(&b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    /// Next token plus the position where it starts.
    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        self.skip_ws_and_comments();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            b'[' => {
                self.bump();
                Tok::LBracket
            }
            b']' => {
                self.bump();
                Tok::RBracket
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b';' => {
                self.bump();
                Tok::Semicolon
            }
            b'-' if self.src.get(self.pos + 1) == Some(&b'>') => {
                self.bump();
                self.bump();
                Tok::Arrow
            }
            b'"' => {
                self.bump();
                while let Some(c) = self.bump() {
                    if c == b'"' {
                        return Ok(Some((Tok::String_, line, col)));
                    }
                }
                return Err(Error::Syntax { line, col, msg: "unterminated string".into() });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() || c == b'.' {
                        s.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Number(s)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        s.push(c as char);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character {:?}", other as char),
                })
            }
        };
        Ok(Some((tok, line, col)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Tok, usize, usize)>>,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Result<Option<(Tok, usize, usize)>> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_tok(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(usize, usize)> {
        match self.next()? {
            Some((tok, line, col)) if tok == want => Ok((line, col)),
            Some((tok, line, col)) => Err(Error::Syntax {
                line,
                col,
                msg: format!("expected {what}, found {tok:?}"),
            }),
            None => Err(self.lexer.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize)> {
        match self.next()? {
            Some((Tok::Ident(s), line, col)) => Ok((s, line, col)),
            Some((tok, line, col)) => Err(Error::Syntax {
                line,
                col,
                msg: format!("expected {what}, found {tok:?}"),
            }),
            None => Err(self.lexer.err(format!("expected {what}, found end of input"))),
        }
    }

    fn expect_index(&mut self) -> Result<usize> {
        self.expect(Tok::LBracket, "'['")?;
        let n = match self.next()? {
            Some((Tok::Number(s), line, col)) => s.parse::<usize>().map_err(|_| Error::Syntax {
                line,
                col,
                msg: format!("bad index {s:?}"),
            })?,
            Some((tok, line, col)) => {
                return Err(Error::Syntax { line, col, msg: format!("expected index, found {tok:?}") })
            }
            None => return Err(self.lexer.err("expected index, found end of input")),
        };
        self.expect(Tok::RBracket, "']'")?;
        Ok(n)
    }

    /// Parses `name[idx]`, validating the register name and bound.
    fn qubit_operand(&mut self, qreg: &Option<(String, usize)>) -> Result<usize> {
        let (name, line, col) = self.expect_ident("qubit operand")?;
        let Some((reg_name, size)) = qreg else {
            return Err(Error::Syntax { line, col, msg: "qubit used before qreg".into() });
        };
        if &name != reg_name {
            return Err(Error::Syntax { line, col, msg: format!("unknown register {name:?}") });
        }
        let idx = self.expect_index()?;
        if idx >= *size {
            return Err(Error::Syntax {
                line,
                col,
                msg: format!("index {idx} out of range for {reg_name}[{size}]"),
            });
        }
        Ok(idx)
    }

    fn skip_to_semicolon(&mut self) -> Result<()> {
        loop {
            match self.next()? {
                Some((Tok::Semicolon, ..)) | None => return Ok(()),
                _ => {}
            }
        }
    }
}

/// Parses an OpenQASM 2.0 source into a Clifford+T circuit.
pub fn parse_qasm(source: &str) -> Result<Circuit> {
    let mut p = Parser { lexer: Lexer::new(source), peeked: None };
    let mut qreg: Option<(String, usize)> = None;
    let mut ops: Vec<Gate> = Vec::new();

    while let Some((tok, line, col)) = p.next()? {
        let Tok::Ident(word) = tok else {
            return Err(Error::Syntax { line, col, msg: format!("expected statement, found {tok:?}") });
        };
        match word.as_str() {
            "OPENQASM" => {
                p.skip_to_semicolon()?;
            }
            "include" => {
                p.skip_to_semicolon()?;
            }
            "qreg" => {
                let (name, line2, _) = p.expect_ident("register name")?;
                let size = p.expect_index()?;
                p.expect(Tok::Semicolon, "';'")?;
                if qreg.is_some() {
                    return Err(Error::MultipleQregs { line: line2 });
                }
                qreg = Some((name, size));
            }
            "creg" => {
                p.skip_to_semicolon()?;
            }
            "barrier" => {
                p.skip_to_semicolon()?;
            }
            "measure" => {
                let q = p.qubit_operand(&qreg)?;
                p.expect(Tok::Arrow, "'->'")?;
                p.expect_ident("classical bit")?;
                p.expect_index()?;
                p.expect(Tok::Semicolon, "';'")?;
                ops.push(Gate::MeasureZ(q));
            }
            "h" | "s" | "sdg" | "t" | "tdg" | "x" | "y" | "z" => {
                let q = p.qubit_operand(&qreg)?;
                p.expect(Tok::Semicolon, "';'")?;
                ops.push(match word.as_str() {
                    "h" => Gate::H(q),
                    "s" => Gate::S(q),
                    "sdg" => Gate::Sdg(q),
                    "t" => Gate::T(q),
                    "tdg" => Gate::Tdg(q),
                    "x" => Gate::X(q),
                    "y" => Gate::Y(q),
                    _ => Gate::Z(q),
                });
            }
            "cx" | "cz" => {
                let a = p.qubit_operand(&qreg)?;
                p.expect(Tok::Comma, "','")?;
                let b = p.qubit_operand(&qreg)?;
                p.expect(Tok::Semicolon, "';'")?;
                if a == b {
                    return Err(Error::Syntax {
                        line,
                        col,
                        msg: format!("{word} operands must be distinct"),
                    });
                }
                ops.push(if word == "cx" { Gate::Cx(a, b) } else { Gate::Cz(a, b) });
            }
            other => {
                return Err(Error::UnsupportedGate { gate: other.to_string(), line });
            }
        }
    }

    let n_qubits = qreg.map(|(_, n)| n).unwrap_or(0);
    Circuit::new(n_qubits, ops)
}
