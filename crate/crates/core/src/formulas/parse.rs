//! ASCII syntax: `*` tensor, `+` plus, `&` with, `par`, `-o`, `up`, `dn`,
//! `&x` / `+x` over declared domains, postfix `^` for the dual.
//!
//! Binding strength, loosest first: `-o` (right associative), `par`, `+`,
//! `&`, `*`, prefix operators, postfix `^`.

use std::collections::BTreeMap;

use super::ast::{Domains, Formula, Term};
use super::FormulaError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Star,
    Plus,
    Amp,
    Par,
    Lolli,
    Up,
    Dn,
    Caret,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            '*' => out.push((start, Tok::Star)),
            '+' => out.push((start, Tok::Plus)),
            '&' => out.push((start, Tok::Amp)),
            '^' => out.push((start, Tok::Caret)),
            '-' if chars.get(i + 1) == Some(&'o') => {
                out.push((start, Tok::Lolli));
                i += 1;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                out.push((
                    start,
                    match word.as_str() {
                        "par" => Tok::Par,
                        "up" => Tok::Up,
                        "dn" => Tok::Dn,
                        _ => Tok::Ident(word),
                    },
                ));
                i = j;
                continue;
            }
            other => {
                return Err(FormulaError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
    }
    Ok(out)
}

pub fn parse_formula(text: &str, domains: &Domains) -> Result<Formula, FormulaError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        domains,
        scope: Vec::new(),
        arities: BTreeMap::new(),
    };
    let f = p.lolli()?;
    if p.pos < p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

struct Parser<'d> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    domains: &'d Domains,
    scope: Vec<String>,
    arities: BTreeMap<String, usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, message: &str) -> FormulaError {
        FormulaError::Syntax {
            offset: self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end),
            message: message.to_string(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn lolli(&mut self) -> Result<Formula, FormulaError> {
        let left = self.par()?;
        if self.eat(&Tok::Lolli) {
            let right = self.lolli()?;
            return Ok(Formula::Par(Box::new(left.dual()), Box::new(right)));
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.plus()?;
        while self.eat(&Tok::Par) {
            let right = self.plus()?;
            left = Formula::Par(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn plus(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.with()?;
        while self.eat(&Tok::Plus) {
            let right = self.with()?;
            left = Formula::Plus(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn with(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.tensor()?;
        while self.eat(&Tok::Amp) {
            let right = self.tensor()?;
            left = Formula::With(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn tensor(&mut self) -> Result<Formula, FormulaError> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Star) {
            let right = self.unary()?;
            left = Formula::Tensor(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Some(Tok::Up) => {
                self.pos += 1;
                Ok(Formula::Up(Box::new(self.unary()?)))
            }
            Some(Tok::Dn) => {
                self.pos += 1;
                Ok(Formula::Down(Box::new(self.unary()?)))
            }
            Some(Tok::Amp) | Some(Tok::Plus) => {
                let all = self.peek() == Some(&Tok::Amp);
                self.pos += 1;
                let var = match self.peek() {
                    Some(Tok::Ident(v)) => v.clone(),
                    _ => return Err(self.error("expected a quantified variable")),
                };
                if !self.domains.contains_key(&var) {
                    return Err(FormulaError::UnboundVariable(var));
                }
                self.pos += 1;
                self.scope.push(var.clone());
                let body = self.unary();
                self.scope.pop();
                let body = Box::new(body?);
                Ok(if all {
                    Formula::All { var, body }
                } else {
                    Formula::Some { var, body }
                })
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.primary()?;
        while self.eat(&Tok::Caret) {
            f = f.dual();
        }
        Ok(f)
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.lolli()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        match self.peek().cloned() {
                            Some(Tok::Ident(a)) => {
                                self.pos += 1;
                                args.push(self.term(a)?);
                            }
                            _ => return Err(self.error("expected an argument")),
                        }
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        return Err(self.error("expected `,` or `)`"));
                    }
                }
                match self.arities.get(&name) {
                    Some(&n) if n != args.len() => {
                        return Err(FormulaError::Arity {
                            atom: name,
                            expected: n,
                            found: args.len(),
                        })
                    }
                    _ => {
                        self.arities.insert(name.clone(), args.len());
                    }
                }
                Ok(Formula::Atom {
                    name,
                    args,
                    negated: false,
                })
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn term(&self, a: String) -> Result<Term, FormulaError> {
        if self.domains.contains_key(&a) {
            if self.scope.contains(&a) {
                Ok(Term::Var(a))
            } else {
                Err(FormulaError::UnboundVariable(a))
            }
        } else {
            Ok(Term::Const(a))
        }
    }
}
