use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::design::Polarity;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
        }
    }
}

/// Formulas of the polarized fragment, kept in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Formula {
    /// An atom, or its dual when `negated`. Atoms are positive.
    Atom {
        name: String,
        args: Vec<Term>,
        negated: bool,
    },
    Tensor(Box<Formula>, Box<Formula>),
    Plus(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
    Up(Box<Formula>),
    Down(Box<Formula>),
    /// `&x F`: one branch per individual of the domain of `x`.
    All {
        var: String,
        body: Box<Formula>,
    },
    /// `+x F`: a choice of individual.
    Some {
        var: String,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn polarity(&self) -> Polarity {
        match self {
            Formula::Atom { negated, .. } => {
                if *negated {
                    Polarity::Negative
                } else {
                    Polarity::Positive
                }
            }
            Formula::Tensor(..) | Formula::Plus(..) | Formula::Some { .. } => Polarity::Positive,
            Formula::With(..) | Formula::Par(..) | Formula::All { .. } => Polarity::Negative,
            Formula::Up(f) | Formula::Down(f) => f.polarity().flip(),
        }
    }

    pub fn dual(&self) -> Formula {
        let b = |f: &Formula| Box::new(f.dual());
        match self {
            Formula::Atom {
                name,
                args,
                negated,
            } => Formula::Atom {
                name: name.clone(),
                args: args.clone(),
                negated: !negated,
            },
            Formula::Tensor(a, c) => Formula::Par(b(a), b(c)),
            Formula::Par(a, c) => Formula::Tensor(b(a), b(c)),
            Formula::Plus(a, c) => Formula::With(b(a), b(c)),
            Formula::With(a, c) => Formula::Plus(b(a), b(c)),
            Formula::Up(a) => Formula::Down(b(a)),
            Formula::Down(a) => Formula::Up(b(a)),
            Formula::All { var, body } => Formula::Some {
                var: var.clone(),
                body: b(body),
            },
            Formula::Some { var, body } => Formula::All {
                var: var.clone(),
                body: b(body),
            },
        }
    }

    /// Atoms and shifted atoms end a skeleton branch.
    pub fn is_terminal(&self) -> bool {
        match self {
            Formula::Atom { .. } => true,
            Formula::Up(f) | Formula::Down(f) => matches!(**f, Formula::Atom { .. }),
            _ => false,
        }
    }

    /// The atom instance a terminal formula talks about, e.g. `L(john)`.
    pub fn atom_key(&self) -> Option<String> {
        match self {
            Formula::Atom { name, args, .. } => Some(atom_text(name, args)),
            Formula::Up(f) | Formula::Down(f) => match &**f {
                Formula::Atom { name, args, .. } => Some(atom_text(name, args)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn substitute(&self, var: &str, value: &str) -> Formula {
        let s = |f: &Formula| Box::new(f.substitute(var, value));
        match self {
            Formula::Atom {
                name,
                args,
                negated,
            } => Formula::Atom {
                name: name.clone(),
                args: args
                    .iter()
                    .map(|t| match t {
                        Term::Var(v) if v == var => Term::Const(value.to_string()),
                        other => other.clone(),
                    })
                    .collect(),
                negated: *negated,
            },
            Formula::Tensor(a, c) => Formula::Tensor(s(a), s(c)),
            Formula::Plus(a, c) => Formula::Plus(s(a), s(c)),
            Formula::With(a, c) => Formula::With(s(a), s(c)),
            Formula::Par(a, c) => Formula::Par(s(a), s(c)),
            Formula::Up(a) => Formula::Up(s(a)),
            Formula::Down(a) => Formula::Down(s(a)),
            Formula::All { var: v, body } if v == var => self.clone(),
            Formula::Some { var: v, body } if v == var => self.clone(),
            Formula::All { var: v, body } => Formula::All {
                var: v.clone(),
                body: s(body),
            },
            Formula::Some { var: v, body } => Formula::Some {
                var: v.clone(),
                body: s(body),
            },
        }
    }
}

fn atom_text(name: &str, args: &[Term]) -> String {
    if args.is_empty() {
        return name.to_string();
    }
    let args: Vec<String> = args.iter().map(Term::to_string).collect();
    format!("{name}({})", args.join(","))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom {
                name,
                args,
                negated,
            } => {
                f.write_str(&atom_text(name, args))?;
                if *negated {
                    f.write_str("^")?;
                }
                Ok(())
            }
            Formula::Tensor(a, b) => write!(f, "({a} * {b})"),
            Formula::Plus(a, b) => write!(f, "({a} + {b})"),
            Formula::With(a, b) => write!(f, "({a} & {b})"),
            Formula::Par(a, b) => write!(f, "({a} par {b})"),
            Formula::Up(a) => write!(f, "up {a}"),
            Formula::Down(a) => write!(f, "dn {a}"),
            Formula::All { var, body } => write!(f, "&{var} {body}"),
            Formula::Some { var, body } => write!(f, "+{var} {body}"),
        }
    }
}

/// A finite domain of individuals; an individual's bias offset is its index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Domain {
    pub var: String,
    pub individuals: Vec<String>,
}

impl Domain {
    pub fn bias_of(&self, label: &str) -> Option<usize> {
        self.individuals.iter().position(|d| d == label)
    }
}

/// Domain declarations, keyed by the variable they bind.
pub type Domains = BTreeMap<String, Domain>;
