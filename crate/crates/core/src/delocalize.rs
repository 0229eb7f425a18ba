//! Address substitution, the copy-cat design and finite approximants.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::design::{design_equal, Design, Library, LibraryError, Node};
use crate::interaction::{make_net, normalize, EngineError, NetError, Verdict};
use crate::locus::{Bias, Fork, Locus, Ramification};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DelocError {
    #[error("no base locus of `{name}` lies under {xi}")]
    NotUnder { name: String, xi: Locus },
    #[error("substituting {xi} by {rho} makes base loci {a} and {b} clash")]
    Clash {
        xi: Locus,
        rho: Locus,
        a: Locus,
        b: Locus,
    },
    #[error("fax loci {0} and {1} must be disjoint")]
    FaxOverlap(Locus, Locus),
    #[error("the design must be positive with base |- {0}")]
    NotPositiveAt(Locus),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Library(#[from] LibraryError),
}

/// Rewrites every locus of `d` under `xi` to live under `rho`.
pub fn substitute_prefix(d: &Design, xi: &Locus, rho: &Locus) -> Result<Design, DelocError> {
    if !d.base.loci().any(|l| xi.is_prefix_of(l)) {
        return Err(DelocError::NotUnder {
            name: d.name.clone(),
            xi: xi.clone(),
        });
    }
    let base = Fork {
        handle: d.base.handle.as_ref().map(|h| h.rebase(xi, rho)),
        tines: d.base.tines.iter().map(|t| t.rebase(xi, rho)).collect(),
    };
    let clashes = base.prefix_clashes();
    if let Some((a, b)) = clashes.into_iter().next() {
        return Err(DelocError::Clash {
            xi: xi.clone(),
            rho: rho.clone(),
            a,
            b,
        });
    }
    if base.tines.len() != d.base.tines.len() {
        return Err(DelocError::Clash {
            xi: xi.clone(),
            rho: rho.clone(),
            a: rho.clone(),
            b: rho.clone(),
        });
    }
    Ok(Design::new(d.name.clone(), base, d.root.rebase(xi, rho)))
}

/// `Fax_{from, to}`: from the negative locus `from` to the positive locus `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaxSpec {
    pub from: Locus,
    pub to: Locus,
    pub depth_hint: usize,
}

pub fn fax(spec: &FaxSpec) -> Result<Design, DelocError> {
    if spec.from.comparable(&spec.to) {
        return Err(DelocError::FaxOverlap(spec.from.clone(), spec.to.clone()));
    }
    Ok(Design::new(
        "Fax",
        Fork::negative(spec.from.clone(), [spec.to.clone()]),
        Node::Fax {
            from: spec.from.clone(),
            to: spec.to.clone(),
        },
    ))
}

/// The premise of the copy-cat for entry `ram`: play `(+, to, ram)` and keep
/// copying from each `to.i` back to `from.i`.
pub fn fax_premise(from: &Locus, to: &Locus, ram: &Ramification) -> Node {
    Node::Positive {
        focus: to.clone(),
        ramification: ram.clone(),
        premises: ram
            .biases()
            .map(|i| {
                (
                    i,
                    Node::Fax {
                        from: to.child(i),
                        to: from.child(i),
                    },
                )
            })
            .collect(),
    }
}

/// Bounds on the directory entries a copy-cat materializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Universe {
    pub max_bias: Bias,
    pub max_size: usize,
}

impl Default for Universe {
    fn default() -> Self {
        Universe {
            max_bias: 3,
            max_size: 2,
        }
    }
}

/// Unfolds references and copy-cats `depth` times along each branch.
///
/// Beyond that, a reference becomes a hole and a copy-cat a negative node
/// with an empty directory. Finite parts are left untouched.
pub fn expand(d: &Design, depth: usize, universe: Universe, lib: &Library) -> Design {
    let rams = Ramification::all_bounded(universe.max_bias, universe.max_size);
    Design::new(
        d.name.clone(),
        d.base.clone(),
        expand_node(&d.root, depth, &rams, lib),
    )
}

fn expand_node(node: &Node, depth: usize, rams: &[Ramification], lib: &Library) -> Node {
    match node {
        Node::Daimon | Node::Hole { .. } => node.clone(),
        Node::Positive {
            focus,
            ramification,
            premises,
        } => Node::Positive {
            focus: focus.clone(),
            ramification: ramification.clone(),
            premises: premises
                .iter()
                .map(|(i, p)| (*i, expand_node(p, depth, rams, lib)))
                .collect(),
        },
        Node::Negative { focus, directory } => Node::Negative {
            focus: focus.clone(),
            directory: directory
                .iter()
                .map(|(j, c)| (j.clone(), expand_node(c, depth, rams, lib)))
                .collect(),
        },
        Node::Ref { name, at } => {
            if depth == 0 {
                return Node::Hole { focus: at.clone() };
            }
            match lib.unfold(name, at) {
                Ok(body) => expand_node(&body, depth - 1, rams, lib),
                Err(_) => Node::Hole { focus: at.clone() },
            }
        }
        Node::Fax { from, to } => {
            let directory = if depth == 0 {
                BTreeMap::new()
            } else {
                rams.iter()
                    .map(|j| {
                        (
                            j.clone(),
                            expand_node(&fax_premise(from, to, j), depth - 1, rams, lib),
                        )
                    })
                    .collect()
            };
            Node::Negative {
                focus: from.clone(),
                directory,
            }
        }
    }
}

/// Prefix order on approximants: a hole is below any node on the same
/// locus, and a directory is below any larger one.
pub fn approximates(a: &Node, b: &Node) -> bool {
    match (a, b) {
        (Node::Hole { focus }, other) => other.focus().is_none_or(|f| f == focus),
        (Node::Daimon, Node::Daimon) => true,
        (
            Node::Positive {
                focus: f1,
                ramification: r1,
                premises: p1,
            },
            Node::Positive {
                focus: f2,
                ramification: r2,
                premises: p2,
            },
        ) => {
            f1 == f2
                && r1 == r2
                && p1
                    .iter()
                    .all(|(i, x)| p2.get(i).is_some_and(|y| approximates(x, y)))
        }
        (
            Node::Negative {
                focus: f1,
                directory: d1,
            },
            Node::Negative {
                focus: f2,
                directory: d2,
            },
        ) => {
            f1 == f2
                && d1
                    .iter()
                    .all(|(j, x)| d2.get(j).is_some_and(|y| approximates(x, y)))
        }
        _ => a == b,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaxCheck {
    pub holds: bool,
    pub expected: Design,
    pub verdict: Verdict,
    pub diagnostic: Option<String>,
}

/// Runs `D` against `Fax_{ξ,ρ}` and compares the result with `D` moved to `ρ`.
pub fn check_fax_theorem(
    d: &Design,
    rho: &Locus,
    fuel: usize,
    lib: &Library,
) -> Result<FaxCheck, DelocError> {
    let xi = match (&d.base.handle, d.base.tines.len()) {
        (None, 1) => d.base.tines.iter().next().cloned().unwrap_or_default(),
        _ => {
            return Err(DelocError::NotPositiveAt(
                d.base.tines.iter().next().cloned().unwrap_or_default(),
            ))
        }
    };
    let expected = substitute_prefix(d, &xi, rho)?;
    let mut copier = fax(&FaxSpec {
        from: xi.clone(),
        to: rho.clone(),
        depth_hint: 0,
    })?;
    if copier.name == d.name {
        copier.name = format!("{}'", copier.name);
    }
    let net = make_net(vec![d.clone(), copier], [xi].into_iter().collect(), lib)?;
    let trace = normalize(&net, fuel)?;
    let (holds, diagnostic) = match &trace.verdict {
        Verdict::Converged { residual } => {
            let depth = d.root.height() + 2;
            let same = design_equal(residual, &expected, depth, lib);
            (
                same,
                (!same).then(|| "residual differs from the delocalized design".to_string()),
            )
        }
        Verdict::OutOfFuel { steps } => (false, Some(format!("out of fuel after {steps} steps"))),
        Verdict::Diverged { reason } => (false, Some(format!("diverged: {reason}"))),
    };
    Ok(FaxCheck {
        holds,
        expected,
        verdict: trace.verdict,
        diagnostic,
    })
}
