//! Compiling a formula at a locus into the design of a focalized proof attempt.
//!
//! Connectives of one polarity are grouped into a synthetic layer. A negative
//! layer offers one directory entry per slice (a choice of `&` side and of
//! `&x` individual); a positive layer plays the first slice. Components of a
//! slice get the sub-loci named by the [`Numbering`]. On a positive fork the
//! first non-terminal component (in locus order) is focused and the others
//! are dropped; atoms end a branch according to the [`AtomPolicy`].

use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{Domains, Formula};
use super::FormulaError;
use crate::design::{Design, Node, Polarity};
use crate::locus::{Bias, Fork, Locus, Ramification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomTreatment {
    /// A datum: the empty directory.
    Fact,
    /// Conceded with the daimon.
    Daimon,
    /// Left as a hole.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPolicy {
    pub default: AtomTreatment,
    /// Per atom instance, keyed like `P(john,swahili)`.
    pub overrides: BTreeMap<String, AtomTreatment>,
}

impl AtomPolicy {
    pub fn uniform(default: AtomTreatment) -> Self {
        AtomPolicy {
            default,
            overrides: BTreeMap::new(),
        }
    }

    pub fn treatment(&self, key: &str) -> AtomTreatment {
        self.overrides.get(key).copied().unwrap_or(self.default)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Numbering {
    /// Component `c` of slice `s` gets bias `K·s + c`, with `K` the widest slice.
    Compact,
    /// Component `c` at layer depth `L` gets the `(2L + c)`-th prime, plus
    /// `1000·s` for slice `s`.
    Primes,
}

fn nth_prime(n: usize) -> Bias {
    let mut count = 0;
    let mut k: Bias = 1;
    loop {
        k += 1;
        if (2..k)
            .take_while(|d| d * d <= k)
            .all(|d| !k.is_multiple_of(d))
        {
            if count == n {
                return k;
            }
            count += 1;
        }
    }
}

impl Numbering {
    fn bias(self, depth: usize, width: usize, slice: usize, component: usize) -> Bias {
        match self {
            Numbering::Compact => (width.max(1) * slice + component) as Bias,
            Numbering::Primes => nth_prime(2 * depth + component) + 1000 * slice as Bias,
        }
    }
}

type Slice = Vec<Formula>;

struct Compiler<'a> {
    domains: &'a Domains,
    policy: &'a AtomPolicy,
    numbering: Numbering,
}

pub fn skeletonize(
    name: &str,
    formula: &Formula,
    xi: &Locus,
    policy: &AtomPolicy,
    numbering: Numbering,
    domains: &Domains,
) -> Result<Design, FormulaError> {
    let c = Compiler {
        domains,
        policy,
        numbering,
    };
    let xi0 = xi.child(0);
    Ok(match formula.polarity() {
        Polarity::Negative => {
            let premise = c.negative(formula, &xi0, 0)?;
            Design::new(
                name,
                Fork::positive([xi.clone()]),
                Node::Positive {
                    focus: xi.clone(),
                    ramification: Ramification::from([0]),
                    premises: BTreeMap::from([(0, premise)]),
                },
            )
        }
        Polarity::Positive => {
            let child = c.positive_fork(&[(xi0, formula.clone())], 0)?;
            Design::new(
                name,
                Fork::negative(xi.clone(), []),
                Node::Negative {
                    focus: xi.clone(),
                    directory: BTreeMap::from([(Ramification::from([0]), child)]),
                },
            )
        }
    })
}

impl Compiler<'_> {
    fn individuals(&self, var: &str) -> Result<&[String], FormulaError> {
        self.domains
            .get(var)
            .map(|d| d.individuals.as_slice())
            .ok_or_else(|| FormulaError::UnboundVariable(var.to_string()))
    }

    /// Slices of a layer of polarity `pol` rooted at `f`.
    fn slices(&self, f: &Formula, pol: Polarity) -> Result<Vec<Slice>, FormulaError> {
        let product = |a: Vec<Slice>, b: Vec<Slice>| -> Vec<Slice> {
            let mut out = Vec::new();
            for x in &a {
                for y in &b {
                    out.push(x.iter().chain(y.iter()).cloned().collect());
                }
            }
            out
        };
        match (f, pol) {
            (Formula::Par(a, b), Polarity::Negative)
            | (Formula::Tensor(a, b), Polarity::Positive) => {
                Ok(product(self.slices(a, pol)?, self.slices(b, pol)?))
            }
            (Formula::With(a, b), Polarity::Negative)
            | (Formula::Plus(a, b), Polarity::Positive) => {
                let mut s = self.slices(a, pol)?;
                s.extend(self.slices(b, pol)?);
                Ok(s)
            }
            (Formula::All { var, body }, Polarity::Negative)
            | (Formula::Some { var, body }, Polarity::Positive) => {
                let mut s = Vec::new();
                for d in self.individuals(var)? {
                    s.extend(self.slices(&body.substitute(var, d), pol)?);
                }
                Ok(s)
            }
            (Formula::Up(inner) | Formula::Down(inner), _)
                if !f.is_terminal() && f.polarity() == pol =>
            {
                Ok(vec![vec![(**inner).clone()]])
            }
            _ => Ok(vec![vec![f.clone()]]),
        }
    }

    fn terminal_negative(&self, f: &Formula, at: &Locus) -> Node {
        let key = f.atom_key().unwrap_or_default();
        match self.policy.treatment(&key) {
            AtomTreatment::Fact => Node::sconse(at.clone()),
            AtomTreatment::Daimon => Node::daimon_neg(at.clone()),
            AtomTreatment::Open => Node::Hole { focus: at.clone() },
        }
    }

    /// The design of `f` on the negative fork `at ⊢`.
    fn negative(&self, f: &Formula, at: &Locus, depth: usize) -> Result<Node, FormulaError> {
        if f.is_terminal() || f.polarity() != Polarity::Negative {
            return Ok(self.terminal_negative(f, at));
        }
        let slices = self.slices(f, Polarity::Negative)?;
        let width = slices.iter().map(Vec::len).max().unwrap_or(0);
        let mut directory = BTreeMap::new();
        for (s, comps) in slices.iter().enumerate() {
            let placed: Vec<(Locus, Formula)> = comps
                .iter()
                .enumerate()
                .map(|(c, g)| (at.child(self.numbering.bias(depth, width, s, c)), g.clone()))
                .collect();
            let ram: Ramification = placed
                .iter()
                .map(|(l, _)| *l.path().last().unwrap())
                .collect();
            let child = self.positive_fork(&placed, depth + 1)?;
            directory.insert(ram, child);
        }
        Ok(Node::Negative {
            focus: at.clone(),
            directory,
        })
    }

    /// The design on the positive fork `⊢ l₁, …, lₙ` carrying the given formulas.
    fn positive_fork(
        &self,
        placed: &[(Locus, Formula)],
        depth: usize,
    ) -> Result<Node, FormulaError> {
        let mut sorted: Vec<&(Locus, Formula)> = placed.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some((l, f)) = sorted
            .iter()
            .find(|(_, f)| !f.is_terminal() && f.polarity() == Polarity::Positive)
        {
            return self.positive(f, l, depth);
        }
        let all_open = !sorted.is_empty()
            && sorted.iter().all(|(_, f)| {
                self.policy.treatment(&f.atom_key().unwrap_or_default()) == AtomTreatment::Open
            });
        Ok(if all_open {
            Node::Hole {
                focus: sorted[0].0.clone(),
            }
        } else {
            Node::Daimon
        })
    }

    /// The positive layer of `f` focused at `at`.
    fn positive(&self, f: &Formula, at: &Locus, depth: usize) -> Result<Node, FormulaError> {
        let slices = self.slices(f, Polarity::Positive)?;
        let width = slices.iter().map(Vec::len).max().unwrap_or(0);
        let chosen = slices.first().cloned().unwrap_or_default();
        let mut premises = BTreeMap::new();
        for (c, g) in chosen.iter().enumerate() {
            let b = self.numbering.bias(depth, width, 0, c);
            premises.insert(b, self.negative(g, &at.child(b), depth + 1)?);
        }
        Ok(Node::Positive {
            focus: at.clone(),
            ramification: premises.keys().copied().collect(),
            premises,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let p: Vec<Bias> = (0..5).map(nth_prime).collect();
        assert_eq!(p, vec![2, 3, 5, 7, 11]);
    }
}
