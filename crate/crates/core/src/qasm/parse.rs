//! Parser for the OpenQASM 2.0 subset accepted by the scheduler.
//!
//! One `qreg`, any number of `creg`s, and a flat list of one- and two-qubit
//! gates plus `measure`, `reset` and `barrier`. Gate definitions, `opaque`,
//! classical control and gates on three or more qubits are rejected; callers
//! are expected to decompose circuits before scheduling them.

use crate::model::{Circuit, CircuitId, Gate, GateKind};

use super::QasmError;

/// Widest register the parser will allocate.
pub const MAX_REGISTER_SIZE: usize = 1 << 16;

/// (mnemonic, parameter count)
const ONE_QUBIT: &[(&str, usize)] = &[
    ("U", 3),
    ("u", 3),
    ("u1", 1),
    ("u2", 2),
    ("u3", 3),
    ("p", 1),
    ("rx", 1),
    ("ry", 1),
    ("rz", 1),
    ("h", 0),
    ("x", 0),
    ("y", 0),
    ("z", 0),
    ("s", 0),
    ("sdg", 0),
    ("t", 0),
    ("tdg", 0),
    ("sx", 0),
    ("sxdg", 0),
    ("id", 0),
];

const TWO_QUBIT: &[(&str, usize)] = &[
    ("CX", 0),
    ("cx", 0),
    ("cy", 0),
    ("cz", 0),
    ("ch", 0),
    ("swap", 0),
    ("rzz", 1),
    ("crz", 1),
    ("cu1", 1),
    ("cp", 1),
];

const MULTI_QUBIT: &[&str] = &["ccx", "cswap", "rccx", "c3x", "c4x", "rc3x", "c3sqrtx"];

/// Parses a program into a circuit with id 0 and an empty name.
pub fn parse_program(text: &str) -> Result<Circuit, QasmError> {
    parse_circuit(CircuitId(0), "", text)
}

pub fn parse_circuit(id: CircuitId, name: &str, text: &str) -> Result<Circuit, QasmError> {
    let mut p = Parser::new(text);
    p.header()?;
    while !p.at_eof()? {
        p.statement()?;
    }
    let qreg = p.qreg.ok_or(QasmError::UnsupportedStructure {
        line: p.lex.line,
        message: "program declares no qreg".into(),
    })?;
    Ok(Circuit::new(id, name, qreg.size, p.gates)?)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Real(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) | Tok::Real(s) => format!("number `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, message: impl Into<String>) -> QasmError {
        QasmError::Syntax {
            line,
            column: col,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), QasmError> {
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.src[self.pos..].starts_with("//") => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.src[self.pos..].starts_with("/*") => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    self.bump();
                    loop {
                        if self.src[self.pos..].starts_with("*/") {
                            self.bump();
                            self.bump();
                            break;
                        }
                        if self.bump().is_none() {
                            return Err(self.err(line, col, "unterminated block comment"));
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    /// Next token and the position where it starts.
    fn next(&mut self) -> Result<(Tok, usize, usize), QasmError> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek_char() else {
            return Ok((Tok::Eof, line, col));
        };
        let start = self.pos;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while matches!(self.peek_char(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
            Tok::Ident(self.src[start..self.pos].to_owned())
        } else if c.is_ascii_digit() || c == '.' {
            let mut real = false;
            while let Some(c) = self.peek_char() {
                if c.is_ascii_digit() {
                    self.bump();
                } else if c == '.' && !real {
                    real = true;
                    self.bump();
                } else {
                    break;
                }
            }
            let text = self.src[start..self.pos].to_owned();
            if text == "." {
                return Err(self.err(line, col, "stray `.`"));
            }
            if real {
                Tok::Real(text)
            } else {
                Tok::Int(text)
            }
        } else if c == '"' {
            self.bump();
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some('\n') | None => {
                        return Err(self.err(line, col, "unterminated string"));
                    }
                    Some(_) => {}
                }
            }
            Tok::Str(self.src[start + 1..self.pos - 1].to_owned())
        } else if self.src[self.pos..].starts_with("->") {
            self.bump();
            self.bump();
            Tok::Sym("->")
        } else {
            let sym = match c {
                ';' => ";",
                ',' => ",",
                '[' => "[",
                ']' => "]",
                '(' => "(",
                ')' => ")",
                '{' => "{",
                '}' => "}",
                other => {
                    return Err(self.err(line, col, format!("unexpected character `{other}`")));
                }
            };
            self.bump();
            Tok::Sym(sym)
        };
        Ok((tok, line, col))
    }

    /// Raw text up to the `)` matching an already consumed `(`.
    fn raw_parenthesised(&mut self, line: usize, col: usize) -> Result<String, QasmError> {
        let start = self.pos;
        let mut depth = 1usize;
        loop {
            match self.bump() {
                Some('(') => depth += 1,
                Some(')') => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Some(';') | None => {
                    return Err(self.err(line, col, "unclosed parameter list"));
                }
                Some(_) => {}
            }
        }
        Ok(self.src[start..self.pos - 1].trim().to_owned())
    }
}

#[derive(Debug, Clone)]
struct Register {
    name: String,
    size: usize,
}

/// Register reference: a single element or the whole register.
#[derive(Debug, Clone)]
struct Arg {
    name: String,
    index: Option<usize>,
    line: usize,
    col: usize,
}

struct Parser<'a> {
    lex: Lexer<'a>,
    peeked: Option<(Tok, usize, usize)>,
    qreg: Option<Register>,
    cregs: Vec<(Register, usize)>,
    gates: Vec<Gate>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            lex: Lexer::new(src),
            peeked: None,
            qreg: None,
            cregs: Vec::new(),
            gates: Vec::new(),
        }
    }

    fn next(&mut self) -> Result<(Tok, usize, usize), QasmError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex.next(),
        }
    }

    fn peek(&mut self) -> Result<&(Tok, usize, usize), QasmError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn at_eof(&mut self) -> Result<bool, QasmError> {
        Ok(self.peek()?.0 == Tok::Eof)
    }

    fn unexpected(&self, tok: &Tok, line: usize, col: usize, wanted: &str) -> QasmError {
        self.lex.err(
            line,
            col,
            format!("expected {wanted}, found {}", tok.describe()),
        )
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<(usize, usize), QasmError> {
        let (tok, line, col) = self.next()?;
        if tok == Tok::Sym(sym) {
            Ok((line, col))
        } else {
            Err(self.unexpected(&tok, line, col, &format!("`{sym}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), QasmError> {
        match self.next()? {
            (Tok::Ident(s), line, col) => Ok((s, line, col)),
            (tok, line, col) => Err(self.unexpected(&tok, line, col, "identifier")),
        }
    }

    fn expect_int(&mut self) -> Result<usize, QasmError> {
        match self.next()? {
            (Tok::Int(s), line, col) => s.parse().map_err(|_| {
                self.lex
                    .err(line, col, format!("integer `{s}` is too large"))
            }),
            (tok, line, col) => Err(self.unexpected(&tok, line, col, "integer")),
        }
    }

    fn header(&mut self) -> Result<(), QasmError> {
        let (tok, line, col) = self.next()?;
        if tok != Tok::Ident("OPENQASM".into()) {
            return Err(self.unexpected(&tok, line, col, "`OPENQASM 2.0;` header"));
        }
        match self.next()? {
            (Tok::Real(v) | Tok::Int(v), line, col) => {
                if v != "2.0" && v != "2" {
                    return Err(QasmError::UnsupportedStructure {
                        line,
                        message: format!("OpenQASM version {v} (only 2.0 is supported)"),
                    });
                }
                let _ = col;
            }
            (tok, line, col) => return Err(self.unexpected(&tok, line, col, "version number")),
        }
        self.expect_sym(";")?;
        Ok(())
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (tok, line, col) = self.next()?;
        let Tok::Ident(word) = tok else {
            return Err(self.unexpected(&tok, line, col, "statement"));
        };
        match word.as_str() {
            "include" => {
                match self.next()? {
                    (Tok::Str(file), _, _) if file == "qelib1.inc" => {}
                    (Tok::Str(file), line, _) => {
                        return Err(QasmError::UnsupportedStructure {
                            line,
                            message: format!("include of `{file}` (only qelib1.inc is known)"),
                        });
                    }
                    (tok, line, col) => return Err(self.unexpected(&tok, line, col, "file name")),
                }
                self.expect_sym(";")?;
            }
            "qreg" | "creg" => {
                let (name, ..) = self.expect_ident()?;
                self.expect_sym("[")?;
                let size = self.expect_int()?;
                self.expect_sym("]")?;
                self.expect_sym(";")?;
                if size == 0 || size > MAX_REGISTER_SIZE {
                    return Err(QasmError::UnsupportedStructure {
                        line,
                        message: format!("register `{name}` has size {size}"),
                    });
                }
                if self.is_declared(&name) {
                    return Err(self
                        .lex
                        .err(line, col, format!("register `{name}` redeclared")));
                }
                let reg = Register { name, size };
                if word == "qreg" {
                    if self.qreg.is_some() {
                        return Err(QasmError::UnsupportedStructure {
                            line,
                            message: "more than one qreg; flatten registers first".into(),
                        });
                    }
                    self.qreg = Some(reg);
                } else {
                    let offset = self.cregs.last().map_or(0, |(r, o)| o + r.size);
                    self.cregs.push((reg, offset));
                }
            }
            "gate" | "opaque" => {
                return Err(QasmError::UnsupportedStructure {
                    line,
                    message: format!("`{word}` definitions are not supported"),
                });
            }
            "if" => {
                return Err(QasmError::UnsupportedStructure {
                    line,
                    message: "classically controlled operations are not supported".into(),
                });
            }
            "measure" => {
                let q = self.arg()?;
                self.expect_sym("->")?;
                let c = self.arg()?;
                self.expect_sym(";")?;
                let qs = self.qubits(&q)?;
                let cs = self.clbits(&c)?;
                if qs.len() != cs.len() {
                    return Err(self.lex.err(
                        q.line,
                        q.col,
                        format!("measure maps {} qubits onto {} bits", qs.len(), cs.len()),
                    ));
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    self.gates.push(Gate::measure(q, c));
                }
            }
            "reset" => {
                let q = self.arg()?;
                self.expect_sym(";")?;
                for q in self.qubits(&q)? {
                    self.gates.push(Gate::reset(q));
                }
            }
            "barrier" => {
                let args = self.arg_list()?;
                let mut qubits = Vec::new();
                for a in &args {
                    qubits.extend(self.qubits(a)?);
                }
                qubits.sort_unstable();
                qubits.dedup();
                self.gates.push(Gate::barrier(qubits));
            }
            _ => self.gate(word, line, col)?,
        }
        Ok(())
    }

    fn gate(&mut self, name: String, line: usize, col: usize) -> Result<(), QasmError> {
        let params = if self.peek()?.0 == Tok::Sym("(") {
            let (_, pl, pc) = self.next()?;
            Some(self.lex.raw_parenthesised(pl, pc)?)
        } else {
            None
        };
        let args = self.arg_list()?;

        let one = ONE_QUBIT.iter().find(|(n, _)| *n == name);
        let two = TWO_QUBIT.iter().find(|(n, _)| *n == name);
        if args.len() >= 3 || MULTI_QUBIT.contains(&name.as_str()) {
            return Err(QasmError::UnsupportedGate {
                name,
                line,
                reason: "gates on three or more qubits must be decomposed into one- and \
                         two-qubit gates before scheduling"
                    .into(),
            });
        }
        let (kind, arity) = match (one, two) {
            (Some(&(_, k)), _) => (GateKind::OneQubit, k),
            (_, Some(&(_, k))) => (GateKind::TwoQubit, k),
            _ => {
                return Err(QasmError::UnsupportedGate {
                    name,
                    line,
                    reason: "unknown gate mnemonic".into(),
                });
            }
        };
        let found = params.as_deref().map_or(0, count_params);
        if found != arity {
            return Err(self.lex.err(
                line,
                col,
                format!("`{name}` takes {arity} parameters, found {found}"),
            ));
        }
        let expected_args = if kind == GateKind::OneQubit { 1 } else { 2 };
        if args.len() != expected_args {
            return Err(self.lex.err(
                line,
                col,
                format!(
                    "`{name}` takes {expected_args} qubit arguments, found {}",
                    args.len()
                ),
            ));
        }
        let params = params.filter(|p| !p.is_empty());
        if kind == GateKind::OneQubit {
            for q in self.qubits(&args[0])? {
                self.gates.push(Gate {
                    kind,
                    name: name.clone(),
                    params: params.clone(),
                    operands: vec![q],
                    clbit: None,
                });
            }
        } else {
            if args.iter().any(|a| a.index.is_none()) {
                return Err(QasmError::UnsupportedStructure {
                    line,
                    message: format!("register broadcast on two-qubit gate `{name}`"),
                });
            }
            let a = self.qubits(&args[0])?[0];
            let b = self.qubits(&args[1])?[0];
            if a == b {
                return Err(self.lex.err(
                    line,
                    col,
                    format!("`{name}` applied twice to qubit {a}"),
                ));
            }
            self.gates.push(Gate {
                kind,
                name,
                params,
                operands: vec![a, b],
                clbit: None,
            });
        }
        Ok(())
    }

    fn arg(&mut self) -> Result<Arg, QasmError> {
        let (name, line, col) = self.expect_ident()?;
        let index = if self.peek()?.0 == Tok::Sym("[") {
            self.next()?;
            let i = self.expect_int()?;
            self.expect_sym("]")?;
            Some(i)
        } else {
            None
        };
        Ok(Arg {
            name,
            index,
            line,
            col,
        })
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, QasmError> {
        let mut args = vec![self.arg()?];
        loop {
            let (tok, line, col) = self.next()?;
            match tok {
                Tok::Sym(";") => return Ok(args),
                Tok::Sym(",") => args.push(self.arg()?),
                other => return Err(self.unexpected(&other, line, col, "`,` or `;`")),
            }
        }
    }

    fn is_declared(&self, name: &str) -> bool {
        self.qreg.as_ref().is_some_and(|r| r.name == name)
            || self.cregs.iter().any(|(r, _)| r.name == name)
    }

    fn qubits(&self, arg: &Arg) -> Result<Vec<usize>, QasmError> {
        match &self.qreg {
            Some(r) if r.name == arg.name => self.expand(arg, r.size, 0),
            _ => Err(self.lex.err(
                arg.line,
                arg.col,
                format!("`{}` is not the declared qreg", arg.name),
            )),
        }
    }

    fn clbits(&self, arg: &Arg) -> Result<Vec<usize>, QasmError> {
        match self.cregs.iter().find(|(r, _)| r.name == arg.name) {
            Some((r, offset)) => self.expand(arg, r.size, *offset),
            None => Err(self.lex.err(
                arg.line,
                arg.col,
                format!("`{}` is not a declared creg", arg.name),
            )),
        }
    }

    fn expand(&self, arg: &Arg, size: usize, offset: usize) -> Result<Vec<usize>, QasmError> {
        match arg.index {
            Some(i) if i < size => Ok(vec![offset + i]),
            Some(i) => Err(self.lex.err(
                arg.line,
                arg.col,
                format!("index {i} out of range for `{}[{size}]`", arg.name),
            )),
            None => Ok((offset..offset + size).collect()),
        }
    }
}

/// Number of comma-separated expressions at nesting depth zero.
fn count_params(raw: &str) -> usize {
    if raw.trim().is_empty() {
        return 0;
    }
    let mut depth = 0i32;
    let mut n = 1;
    for c in raw.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => n += 1,
            _ => {}
        }
    }
    n
}
