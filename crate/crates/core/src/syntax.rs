//! The design-file language: parsing and canonical serialization.
//!
//! ```text
//! let xi = 0
//! design D : |- xi = (+ xi {0} (- xi.0 { {2,3} => dai }))
//! domain x = {john, mary}
//! formula S = &x (up L(x) -o dn M(x))
//! skeleton DS = S @ xi policy fact numbering primes
//! ```
//!
//! Besides the core tree forms, `fax A B` writes the copy-cat from `A` to
//! `B` and `hole A` an unfinished branch.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::design::{Design, Library, Node};
use crate::formulas::{
    parse_formula, skeletonize, AtomPolicy, AtomTreatment, Domain, Domains, Formula, FormulaError,
    Numbering,
};
use crate::locus::{Bias, Fork, Locus, Ramification};
use crate::validate::{validate_design, Report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unbound symbol `{name}`")]
    UnboundSymbol {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("`{0}` is defined twice")]
    Duplicate(String),
    #[error("design `{design}` refers to undefined `{name}`")]
    UndefinedReference { design: String, name: String },
    #[error("design `{name}` is invalid:\n{report}")]
    Invalid { name: String, report: Report },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: FormulaError },
    #[error("line {line}: unknown formula `{name}`")]
    UnknownFormula { line: usize, name: String },
}

/// Everything defined by one source file.
#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub bindings: BTreeMap<String, Locus>,
    pub library: Library,
    /// Design names in definition order.
    pub order: Vec<String>,
    pub domains: Domains,
    pub formulas: BTreeMap<String, Formula>,
}

impl SourceFile {
    pub fn design(&self, name: &str) -> Option<&Design> {
        self.library.get(name)
    }

    pub fn designs(&self) -> impl Iterator<Item = &Design> {
        self.order.iter().filter_map(|n| self.library.get(n))
    }

    /// A locus literal, resolved against this file's bindings.
    pub fn locus(&self, text: &str) -> Result<Locus, SyntaxError> {
        parse_locus(text, &self.bindings)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(Bias),
    Open(char),
    Close,
    LBrace,
    RBrace,
    Comma,
    Arrow,
    Eq,
    Colon,
    At,
    Turnstile,
    Empty,
    Dot,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Open(c) => format!("`({c}`"),
            Tok::Close => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::At => "`@`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Empty => "`<>`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    peeked: Option<(Tok, usize, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            peeked: None,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn skip_blank(&mut self) {
        while let Some(c) = self.at(0) {
            if c == ';' {
                while let Some(c) = self.at(0) {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn error(&self, line: usize, col: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn lex(&mut self) -> Result<(Tok, usize, usize), SyntaxError> {
        self.skip_blank();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.at(0) else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            '(' => {
                self.bump();
                self.skip_blank();
                match self.at(0) {
                    Some(s @ ('+' | '-')) => {
                        self.bump();
                        Tok::Open(s)
                    }
                    _ => return Err(self.error(line, col, "expected `(+` or `(-`")),
                }
            }
            ')' => {
                self.bump();
                Tok::Close
            }
            '{' => {
                self.bump();
                Tok::LBrace
            }
            '}' => {
                self.bump();
                Tok::RBrace
            }
            ',' => {
                self.bump();
                Tok::Comma
            }
            ':' => {
                self.bump();
                Tok::Colon
            }
            '@' => {
                self.bump();
                Tok::At
            }
            '.' => {
                self.bump();
                Tok::Dot
            }
            '^' => {
                self.bump();
                Tok::Caret
            }
            '=' => {
                self.bump();
                if self.at(0) == Some('>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    Tok::Eq
                }
            }
            '|' if self.at(1) == Some('-') => {
                self.bump();
                self.bump();
                Tok::Turnstile
            }
            '<' if self.at(1) == Some('>') => {
                self.bump();
                self.bump();
                Tok::Empty
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while let Some(d) = self.at(0).filter(char::is_ascii_digit) {
                    text.push(d);
                    self.bump();
                }
                let n = text
                    .parse::<Bias>()
                    .map_err(|_| self.error(line, col, format!("malformed integer `{text}`")))?;
                Tok::Int(n)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut text = String::new();
                while let Some(d) = self
                    .at(0)
                    .filter(|d| d.is_alphanumeric() || *d == '_' || *d == '\'' || *d == '-')
                {
                    text.push(d);
                    self.bump();
                }
                Tok::Word(text)
            }
            other => return Err(self.error(line, col, format!("unexpected character `{other}`"))),
        };
        Ok((tok, line, col))
    }

    fn peek(&mut self) -> Result<&Tok, SyntaxError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(&self.peeked.as_ref().unwrap().0)
    }

    fn next(&mut self) -> Result<(Tok, usize, usize), SyntaxError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    /// Raw text up to the end of the line or a comment.
    fn rest_of_line(&mut self) -> (String, usize) {
        debug_assert!(self.peeked.is_none());
        let line = self.line;
        let mut text = String::new();
        while let Some(c) = self.at(0) {
            if c == '\n' || c == ';' {
                break;
            }
            text.push(c);
            self.bump();
        }
        (text.trim().to_string(), line)
    }
}

struct Parser<'b> {
    lex: Lexer,
    bindings: &'b mut BTreeMap<String, Locus>,
}

impl Parser<'_> {
    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        let (t, line, col) = self.lex.next()?;
        if t == want {
            Ok(())
        } else {
            Err(self.lex.error(
                line,
                col,
                format!("expected {}, found {}", want.describe(), t.describe()),
            ))
        }
    }

    fn word(&mut self) -> Result<String, SyntaxError> {
        match self.lex.next()? {
            (Tok::Word(w), _, _) => Ok(w),
            (t, line, col) => Err(self.lex.error(
                line,
                col,
                format!("expected a name, found {}", t.describe()),
            )),
        }
    }

    fn locus(&mut self) -> Result<Locus, SyntaxError> {
        let (t, line, col) = self.lex.next()?;
        let mut path = match t {
            Tok::Empty => return Ok(Locus::root()),
            Tok::Int(i) => vec![i],
            Tok::Word(w) => match self.bindings.get(&w) {
                Some(l) => l.path().to_vec(),
                None => return Err(SyntaxError::UnboundSymbol { line, col, name: w }),
            },
            other => {
                return Err(self.lex.error(
                    line,
                    col,
                    format!("expected a locus, found {}", other.describe()),
                ))
            }
        };
        while self.lex.peek()? == &Tok::Dot {
            self.lex.next()?;
            match self.lex.next()? {
                (Tok::Int(i), _, _) => path.push(i),
                (t, line, col) => {
                    return Err(self.lex.error(
                        line,
                        col,
                        format!("expected a bias, found {}", t.describe()),
                    ))
                }
            }
        }
        Ok(Locus::new(path))
    }

    fn ramification(&mut self) -> Result<Ramification, SyntaxError> {
        self.expect(Tok::LBrace)?;
        let mut biases = Vec::new();
        if self.lex.peek()? == &Tok::RBrace {
            self.lex.next()?;
            return Ok(Ramification::empty());
        }
        loop {
            match self.lex.next()? {
                (Tok::Int(i), _, _) => biases.push(i),
                (t, line, col) => {
                    return Err(self.lex.error(
                        line,
                        col,
                        format!("expected a bias, found {}", t.describe()),
                    ))
                }
            }
            match self.lex.next()? {
                (Tok::Comma, _, _) => continue,
                (Tok::RBrace, _, _) => break,
                (t, line, col) => {
                    return Err(self.lex.error(
                        line,
                        col,
                        format!("expected `,` or `}}`, found {}", t.describe()),
                    ))
                }
            }
        }
        Ok(biases.into_iter().collect())
    }

    fn base(&mut self) -> Result<Fork, SyntaxError> {
        let handle = if self.lex.peek()? == &Tok::Turnstile {
            None
        } else {
            Some(self.locus()?)
        };
        self.expect(Tok::Turnstile)?;
        let mut tines = Vec::new();
        if !matches!(self.lex.peek()?, Tok::Eq | Tok::Eof) {
            loop {
                tines.push(self.locus()?);
                if self.lex.peek()? == &Tok::Comma {
                    self.lex.next()?;
                } else {
                    break;
                }
            }
        }
        let (line, col) = (self.lex.line, self.lex.col);
        let count = tines.len();
        let fork = Fork {
            handle,
            tines: tines.into_iter().collect(),
        };
        if fork.tines.len() != count {
            return Err(self.lex.error(line, col, "repeated locus in base"));
        }
        Ok(fork)
    }

    fn tree(&mut self) -> Result<Node, SyntaxError> {
        let (t, line, col) = self.lex.next()?;
        match t {
            Tok::Word(w) if w == "dai" => Ok(Node::Daimon),
            Tok::Word(w) if w == "ref" => {
                let name = self.word()?;
                self.expect(Tok::At)?;
                let at = self.locus()?;
                Ok(Node::Ref { name, at })
            }
            Tok::Word(w) if w == "fax" => {
                let from = self.locus()?;
                let to = self.locus()?;
                Ok(Node::Fax { from, to })
            }
            Tok::Word(w) if w == "hole" => Ok(Node::Hole {
                focus: self.locus()?,
            }),
            Tok::Open('+') => {
                let focus = self.locus()?;
                let ramification = self.ramification()?;
                let mut premises = BTreeMap::new();
                for i in ramification.biases() {
                    if self.lex.peek()? == &Tok::Close {
                        return Err(self.lex.error(
                            line,
                            col,
                            format!("missing premise for bias {i}"),
                        ));
                    }
                    premises.insert(i, self.tree()?);
                }
                match self.lex.next()? {
                    (Tok::Close, _, _) => {}
                    (_, l, c) => return Err(self.lex.error(l, c, "more premises than biases")),
                }
                Ok(Node::Positive {
                    focus,
                    ramification,
                    premises,
                })
            }
            Tok::Open(_) => {
                let focus = self.locus()?;
                self.expect(Tok::LBrace)?;
                let mut directory = BTreeMap::new();
                while self.lex.peek()? != &Tok::RBrace {
                    let (l, c) = (self.lex.line, self.lex.col);
                    let ram = self.ramification()?;
                    self.expect(Tok::Arrow)?;
                    let child = self.tree()?;
                    if directory.insert(ram.clone(), child).is_some() {
                        return Err(self.lex.error(l, c, format!("entry {ram} appears twice")));
                    }
                }
                self.lex.next()?;
                self.expect(Tok::Close)?;
                Ok(Node::Negative { focus, directory })
            }
            other => Err(self.lex.error(
                line,
                col,
                format!("expected a design tree, found {}", other.describe()),
            )),
        }
    }
}

/// Parses a locus literal: `<>`, `0.3.5`, or `xi.1.1` with `xi` bound.
pub fn parse_locus(text: &str, bindings: &BTreeMap<String, Locus>) -> Result<Locus, SyntaxError> {
    let mut scratch = bindings.clone();
    let mut p = Parser {
        lex: Lexer::new(text),
        bindings: &mut scratch,
    };
    let l = p.locus()?;
    match p.lex.next()? {
        (Tok::Eof, _, _) => Ok(l),
        (t, line, col) => Err(p.lex.error(
            line,
            col,
            format!("unexpected {} after locus", t.describe()),
        )),
    }
}

/// Parses a fork such as `|- 0`, `xi |- ` or `0 |- 1, 2`.
pub fn parse_fork(text: &str, bindings: &BTreeMap<String, Locus>) -> Result<Fork, SyntaxError> {
    let mut scratch = bindings.clone();
    let mut p = Parser {
        lex: Lexer::new(text),
        bindings: &mut scratch,
    };
    let f = p.base()?;
    match p.lex.next()? {
        (Tok::Eof, _, _) => Ok(f),
        (t, line, col) => {
            Err(p
                .lex
                .error(line, col, format!("unexpected {} after base", t.describe())))
        }
    }
}

/// A locus literal without symbols.
pub fn parse_locus_plain(text: &str) -> Result<Locus, SyntaxError> {
    parse_locus(text, &BTreeMap::new())
}

/// Parses and checks a whole file: references must resolve (cycles are
/// allowed) and every design must validate.
pub fn parse_source(text: &str) -> Result<SourceFile, SyntaxError> {
    let mut file = SourceFile::default();
    let mut designs: Vec<Design> = Vec::new();
    {
        let mut p = Parser {
            lex: Lexer::new(text),
            bindings: &mut file.bindings,
        };
        loop {
            let (t, line, col) = p.lex.next()?;
            match t {
                Tok::Eof => break,
                Tok::Word(w) if w == "let" => {
                    let name = p.word()?;
                    p.expect(Tok::Eq)?;
                    let l = p.locus()?;
                    p.bindings.insert(name, l);
                }
                Tok::Word(w) if w == "design" => {
                    let name = p.word()?;
                    p.expect(Tok::Colon)?;
                    let base = p.base()?;
                    p.expect(Tok::Eq)?;
                    let root = p.tree()?;
                    designs.push(Design::new(name, base, root));
                }
                Tok::Word(w) if w == "domain" => {
                    let var = p.word()?;
                    p.expect(Tok::Eq)?;
                    p.expect(Tok::LBrace)?;
                    let mut individuals = Vec::new();
                    loop {
                        individuals.push(p.word()?);
                        match p.lex.next()? {
                            (Tok::Comma, _, _) => continue,
                            (Tok::RBrace, _, _) => break,
                            (t, l, c) => {
                                return Err(p.lex.error(
                                    l,
                                    c,
                                    format!("expected `,` or `}}`, found {}", t.describe()),
                                ))
                            }
                        }
                    }
                    let unique: std::collections::BTreeSet<&String> = individuals.iter().collect();
                    if unique.len() != individuals.len() {
                        return Err(p.lex.error(line, col, "repeated individual in domain"));
                    }
                    file.domains
                        .insert(var.clone(), Domain { var, individuals });
                }
                Tok::Word(w) if w == "formula" => {
                    let name = p.word()?;
                    p.expect(Tok::Eq)?;
                    let (body, fline) = p.lex.rest_of_line();
                    let f = parse_formula(&body, &file.domains).map_err(|source| {
                        SyntaxError::Formula {
                            line: fline,
                            source,
                        }
                    })?;
                    if file.formulas.insert(name.clone(), f).is_some() {
                        return Err(SyntaxError::Duplicate(name));
                    }
                }
                Tok::Word(w) if w == "skeleton" => {
                    let name = p.word()?;
                    p.expect(Tok::Eq)?;
                    let fname = p.word()?;
                    let mut formula = file
                        .formulas
                        .get(&fname)
                        .cloned()
                        .ok_or(SyntaxError::UnknownFormula { line, name: fname })?;
                    if p.lex.peek()? == &Tok::Caret {
                        p.lex.next()?;
                        formula = formula.dual();
                    }
                    p.expect(Tok::At)?;
                    let at = p.locus()?;
                    let mut policy = AtomPolicy::uniform(AtomTreatment::Fact);
                    let mut numbering = Numbering::Compact;
                    loop {
                        match p.lex.peek()? {
                            Tok::Word(k) if k == "policy" => {
                                p.lex.next()?;
                                let (v, l, c) = p.lex.next()?;
                                policy.default = match v {
                                    Tok::Word(v) if v == "fact" => AtomTreatment::Fact,
                                    Tok::Word(v) if v == "daimon" => AtomTreatment::Daimon,
                                    Tok::Word(v) if v == "open" => AtomTreatment::Open,
                                    _ => {
                                        return Err(p.lex.error(
                                            l,
                                            c,
                                            "expected fact, daimon or open",
                                        ))
                                    }
                                };
                            }
                            Tok::Word(k) if k == "numbering" => {
                                p.lex.next()?;
                                let (v, l, c) = p.lex.next()?;
                                numbering = match v {
                                    Tok::Word(v) if v == "compact" => Numbering::Compact,
                                    Tok::Word(v) if v == "primes" => Numbering::Primes,
                                    _ => {
                                        return Err(p.lex.error(l, c, "expected compact or primes"))
                                    }
                                };
                            }
                            _ => break,
                        }
                    }
                    let d = skeletonize(&name, &formula, &at, &policy, numbering, &file.domains)
                        .map_err(|source| SyntaxError::Formula { line, source })?;
                    designs.push(d);
                }
                other => {
                    return Err(p.lex.error(
                        line,
                        col,
                        format!(
                            "expected let, design, domain, formula or skeleton, found {}",
                            other.describe()
                        ),
                    ))
                }
            }
        }
    }
    for d in designs {
        if file.library.get(&d.name).is_some() {
            return Err(SyntaxError::Duplicate(d.name));
        }
        file.order.push(d.name.clone());
        file.library.insert(d);
    }
    for d in file.designs() {
        if let Some(name) = undefined_reference(&d.root, &file.library) {
            return Err(SyntaxError::UndefinedReference {
                design: d.name.clone(),
                name,
            });
        }
    }
    for d in file.designs() {
        let report = validate_design(d, &file.library);
        if !report.is_ok() {
            return Err(SyntaxError::Invalid {
                name: d.name.clone(),
                report,
            });
        }
    }
    Ok(file)
}

fn undefined_reference(node: &Node, lib: &Library) -> Option<String> {
    match node {
        Node::Ref { name, .. } if lib.get(name).is_none() => Some(name.clone()),
        Node::Positive { premises, .. } => {
            premises.values().find_map(|p| undefined_reference(p, lib))
        }
        Node::Negative { directory, .. } => {
            directory.values().find_map(|c| undefined_reference(c, lib))
        }
        _ => None,
    }
}

/// The canonical one-line form of a tree.
pub fn serialize_node(node: &Node) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Daimon => out.push_str("dai"),
        Node::Positive {
            focus,
            ramification,
            premises,
        } => {
            let _ = write!(out, "(+ {focus} {ramification}");
            for p in premises.values() {
                out.push(' ');
                write_node(p, out);
            }
            out.push(')');
        }
        Node::Negative { focus, directory } => {
            let _ = write!(out, "(- {focus} {{");
            for (ram, child) in directory {
                let _ = write!(out, " {ram} => ");
                write_node(child, out);
            }
            if !directory.is_empty() {
                out.push(' ');
            }
            out.push_str("})");
        }
        Node::Ref { name, at } => {
            let _ = write!(out, "ref {name} @ {at}");
        }
        Node::Fax { from, to } => {
            let _ = write!(out, "fax {from} {to}");
        }
        Node::Hole { focus } => {
            let _ = write!(out, "hole {focus}");
        }
    }
}

pub fn serialize_design(d: &Design) -> String {
    format!(
        "design {} : {} = {}",
        d.name,
        d.base,
        serialize_node(&d.root)
    )
}

/// One design per line, in the given order.
pub fn serialize_designs<'d>(designs: impl IntoIterator<Item = &'d Design>) -> String {
    let mut out = String::new();
    for d in designs {
        out.push_str(&serialize_design(d));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locus_literals() {
        let mut b = BTreeMap::new();
        assert_eq!(parse_locus("<>", &b).unwrap(), Locus::root());
        assert_eq!(parse_locus("0.3.5", &b).unwrap(), Locus::new(vec![0, 3, 5]));
        assert!(matches!(
            parse_locus("xi.1", &b),
            Err(SyntaxError::UnboundSymbol { .. })
        ));
        b.insert("xi".into(), Locus::new(vec![0]));
        assert_eq!(
            parse_locus("xi.1.1", &b).unwrap(),
            Locus::new(vec![0, 1, 1])
        );
        assert!(parse_locus("0.99999999999", &b).is_err());
    }

    #[test]
    fn smallest_file() {
        let f = parse_source("let xi = 0\ndesign DAI : |- xi = dai\n").unwrap();
        assert_eq!(f.order, vec!["DAI".to_string()]);
        let d = f.design("DAI").unwrap();
        assert_eq!(serialize_design(d), "design DAI : |- 0 = dai");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_source("design A : |- 0 =\n  (+ 0 {1} dai)").unwrap_err();
        assert!(matches!(err, SyntaxError::Invalid { .. }));
        let err = parse_source("design A : |- 0 = (+ 0 {1}").unwrap_err();
        assert!(matches!(err, SyntaxError::Syntax { line: 1, .. }), "{err}");
        let err = parse_source("design A : |- 0 = ref B @ 0").unwrap_err();
        assert!(matches!(err, SyntaxError::UndefinedReference { .. }));
    }
}
