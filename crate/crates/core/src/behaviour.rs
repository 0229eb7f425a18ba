//! Elementary designs, orthogonal sets over finite pools, and `⊙` / `⊗`.
//!
//! Bi-orthogonal closure cannot be computed; membership is always relative
//! to an explicit pool of counter-designs, and answers say so.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::design::{design_equal, Design, Library, Node};
use crate::enumerate::{enumerate_designs, Bounds, EnumError};
use crate::interaction::{orthogonal, OrthError, Orthogonality};
use crate::locus::{Fork, Locus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BehaviourError {
    #[error("unknown builtin `{0}` (expected daimon-pos, daimon-neg, sconse or bomb-pos)")]
    UnknownBuiltin(String),
    #[error("design `{0}` is not positive on the base |- <>")]
    NotOnRoot(String),
    #[error("a behaviour needs at least one generator")]
    NoGenerators,
    #[error("generators must share one base")]
    MixedBases,
    #[error(transparent)]
    Orth(#[from] OrthError),
    #[error(transparent)]
    Enum(#[from] EnumError),
}

pub const BUILTINS: [&str; 4] = ["daimon-pos", "daimon-neg", "sconse", "bomb-pos"];

/// The elementary designs at `ξ`: the positive daimon on `⊢ ξ`, the
/// negative daimon `(−, ξ, {∅ ↦ †})`, sconse `(−, ξ, ∅)` and the bomb `(+, ξ, ∅)`.
pub fn builtin(name: &str, xi: &Locus) -> Result<Design, BehaviourError> {
    let (base, root) = match name {
        "daimon-pos" => (Fork::positive([xi.clone()]), Node::Daimon),
        "daimon-neg" => (Fork::negative(xi.clone(), []), Node::daimon_neg(xi.clone())),
        "sconse" => (Fork::negative(xi.clone(), []), Node::sconse(xi.clone())),
        "bomb-pos" => (Fork::positive([xi.clone()]), Node::bomb(xi.clone())),
        other => return Err(BehaviourError::UnknownBuiltin(other.to_string())),
    };
    Ok(Design::new(name, base, root))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OrthogonalSet {
    pub members: Vec<Design>,
    /// Pool designs whose interaction ran out of fuel.
    pub unknown: Vec<Design>,
}

/// The members of `pool` orthogonal to `d`.
pub fn orthogonal_set(
    d: &Design,
    pool: &[Design],
    lib: &Library,
    fuel: usize,
) -> Result<OrthogonalSet, BehaviourError> {
    let mut out = OrthogonalSet::default();
    for e in pool {
        match orthogonal(d, e, lib, fuel)? {
            Orthogonality::Yes => out.members.push(e.clone()),
            Orthogonality::No => {}
            Orthogonality::Unknown => out.unknown.push(e.clone()),
        }
    }
    Ok(out)
}

/// A behaviour given by generators, with a finite pool standing in for the
/// orthogonal of the generators.
#[derive(Clone, Debug, Serialize)]
pub struct BehaviourHandle {
    pub generators: Vec<Design>,
    pub pool: Vec<Design>,
    pub fuel: usize,
    /// Set when the generators only approximate the intended behaviour (`⊗`).
    pub approximate: bool,
}

impl BehaviourHandle {
    pub fn new(
        generators: Vec<Design>,
        pool: Vec<Design>,
        fuel: usize,
    ) -> Result<Self, BehaviourError> {
        let Some(first) = generators.first() else {
            return Err(BehaviourError::NoGenerators);
        };
        if generators.iter().any(|g| g.base != first.base) {
            return Err(BehaviourError::MixedBases);
        }
        Ok(BehaviourHandle {
            generators,
            pool,
            fuel,
            approximate: false,
        })
    }

    pub fn base(&self) -> &Fork {
        &self.generators[0].base
    }
}

/// The designs on the dual of `base` within the given enumeration bounds.
pub fn dual_pool(base: &Fork, depth: usize, width: u32) -> Result<Vec<Design>, BehaviourError> {
    let dual = match (&base.handle, base.tines.len()) {
        (None, 1) => Fork::negative(base.tines.iter().next().unwrap().clone(), []),
        (Some(h), 0) => Fork::positive([h.clone()]),
        _ => return Err(BehaviourError::MixedBases),
    };
    Ok(enumerate_designs(&dual, Bounds::new(depth, width, width as usize))?.to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub verdict: Orthogonality,
    /// Size of the pool-relative orthogonal of the generators.
    pub tested: usize,
    /// A counter-design when the answer is no.
    pub witness: Option<Design>,
    pub pool_relative: bool,
}

/// Whether `d` is orthogonal to every pool design that all generators are
/// orthogonal to. Pool designs some generator cannot decide are left out.
pub fn in_behaviour(
    d: &Design,
    h: &BehaviourHandle,
    lib: &Library,
) -> Result<Membership, BehaviourError> {
    let mut tests: Vec<&Design> = Vec::new();
    'pool: for e in &h.pool {
        for g in &h.generators {
            if orthogonal(g, e, lib, h.fuel)? != Orthogonality::Yes {
                continue 'pool;
            }
        }
        tests.push(e);
    }
    let mut verdict = Orthogonality::Yes;
    let mut witness = None;
    for e in &tests {
        match orthogonal(d, e, lib, h.fuel)? {
            Orthogonality::Yes => {}
            Orthogonality::No => {
                verdict = Orthogonality::No;
                witness = Some((*e).clone());
                break;
            }
            Orthogonality::Unknown => verdict = Orthogonality::Unknown,
        }
    }
    Ok(Membership {
        verdict,
        tested: tests.len(),
        witness,
        pool_relative: true,
    })
}

type RootAction<'a> = (&'a crate::locus::Ramification, &'a BTreeMap<u32, Node>);

fn root_action(d: &Design) -> Result<Option<RootAction<'_>>, BehaviourError> {
    let on_root =
        d.base.handle.is_none() && d.base.tines.len() == 1 && d.base.tines.contains(&Locus::root());
    if !on_root {
        return Err(BehaviourError::NotOnRoot(d.name.clone()));
    }
    match &d.root {
        Node::Daimon => Ok(None),
        Node::Positive {
            focus,
            ramification,
            premises,
        } if focus.is_empty() => Ok(Some((ramification, premises))),
        _ => Err(BehaviourError::NotOnRoot(d.name.clone())),
    }
}

/// `U ⊙ B` on `⊢ <>`: the daimon if either is the daimon or the first
/// ramifications meet, otherwise one action on the union carrying both
/// sets of premises.
pub fn odot(u: &Design, b: &Design) -> Result<Design, BehaviourError> {
    let name = format!("{}_{}", u.name, b.name);
    let base = Fork::positive([Locus::root()]);
    let (ru, rb) = (root_action(u)?, root_action(b)?);
    let root = match (ru, rb) {
        (Some((i, pi)), Some((j, pj))) if i.is_disjoint(j) => {
            let mut premises = pi.clone();
            premises.extend(pj.iter().map(|(k, n)| (*k, n.clone())));
            Node::Positive {
                focus: Locus::root(),
                ramification: i.union(j),
                premises,
            }
        }
        _ => Node::Daimon,
    };
    Ok(Design::new(name, base, root))
}

/// Generators of `F ⊗ G`: every `A ⊙ B`, duplicates removed. The pools are merged.
pub fn tensor_generators(
    f: &BehaviourHandle,
    g: &BehaviourHandle,
) -> Result<BehaviourHandle, BehaviourError> {
    let mut generators: Vec<Design> = Vec::new();
    for a in &f.generators {
        for b in &g.generators {
            let p = odot(a, b)?;
            if !generators
                .iter()
                .any(|q| design_equal(q, &p, 0, Library::empty()))
            {
                generators.push(p);
            }
        }
    }
    let mut pool = f.pool.clone();
    for e in &g.pool {
        if !pool.iter().any(|q| q.base == e.base && q.root == e.root) {
            pool.push(e.clone());
        }
    }
    Ok(BehaviourHandle {
        generators,
        pool,
        fuel: f.fuel.max(g.fuel),
        approximate: true,
    })
}
