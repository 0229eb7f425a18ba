//! Exhaustive enumeration of small finite designs, and random sampling.
//!
//! Depth is node height: the root is at depth 0 and every node, sconse
//! included, adds one level. At the depth limit a positive position can
//! only hold the daimon or an action with empty ramification, and a
//! negative position only the empty directory.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::design::{Design, Library, Node};
use crate::locus::{Bias, Fork, Locus, Ramification};
use crate::syntax::serialize_node;

/// Loci a subtree uses from the surrounding context.
type Used = BTreeSet<Locus>;
type Scoped = (Node, Used);

pub const DEFAULT_CEILING: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_depth: usize,
    pub max_bias: Bias,
    pub max_ram: usize,
}

impl Bounds {
    pub fn new(max_depth: usize, max_bias: Bias, max_ram: usize) -> Self {
        Bounds {
            max_depth,
            max_bias,
            max_ram,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("more than {ceiling} designs would be generated")]
    TooMany { ceiling: usize },
    #[error("bases with more than two loci are not enumerated")]
    BaseTooLarge,
}

/// The enumerated designs, in canonical order. Cheap to clone; every call
/// to [`Enumeration::iter`] starts from the beginning.
#[derive(Clone, Debug)]
pub struct Enumeration {
    designs: Arc<Vec<Design>>,
}

impl Enumeration {
    pub fn iter(&self) -> std::slice::Iter<'_, Design> {
        self.designs.iter()
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Design> {
        self.designs.as_ref().clone()
    }
}

impl<'e> IntoIterator for &'e Enumeration {
    type Item = &'e Design;
    type IntoIter = std::slice::Iter<'e, Design>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

struct Gen {
    rams: Vec<Ramification>,
    ceiling: usize,
}

pub fn enumerate_designs(base: &Fork, bounds: Bounds) -> Result<Enumeration, EnumError> {
    enumerate_with_ceiling(base, bounds, DEFAULT_CEILING)
}

pub fn enumerate_with_ceiling(
    base: &Fork,
    bounds: Bounds,
    ceiling: usize,
) -> Result<Enumeration, EnumError> {
    if base.loci().count() > 2 {
        return Err(EnumError::BaseTooLarge);
    }
    let g = Gen {
        rams: Ramification::all_bounded(bounds.max_bias, bounds.max_ram),
        ceiling,
    };
    let ctx: Vec<Locus> = base.tines.iter().cloned().collect();
    let nodes = match &base.handle {
        None => g.positive(&ctx, bounds.max_depth)?,
        Some(h) => g.negative(h, &ctx, bounds.max_depth)?,
    };
    let mut keyed: Vec<(String, Node)> =
        nodes.into_iter().map(|n| (serialize_node(&n), n)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let designs = keyed
        .into_iter()
        .enumerate()
        .map(|(k, (_, root))| Design::new(format!("e{k}"), base.clone(), root))
        .collect();
    Ok(Enumeration {
        designs: Arc::new(designs),
    })
}

impl Gen {
    fn check(&self, n: usize) -> Result<(), EnumError> {
        if n > self.ceiling {
            Err(EnumError::TooMany {
                ceiling: self.ceiling,
            })
        } else {
            Ok(())
        }
    }

    fn positive(&self, ctx: &[Locus], depth: usize) -> Result<Vec<Node>, EnumError> {
        let mut out = vec![Node::Daimon];
        for focus in ctx {
            let rest: Vec<Locus> = ctx.iter().filter(|l| *l != focus).cloned().collect();
            for ram in &self.rams {
                if depth == 0 {
                    if ram.is_empty() {
                        out.push(Node::bomb(focus.clone()));
                    }
                    continue;
                }
                let options: Vec<(Bias, Vec<Scoped>)> = ram
                    .biases()
                    .map(|i| {
                        let subs = self.negative(&focus.child(i), &rest, depth - 1)?;
                        Ok((
                            i,
                            subs.into_iter()
                                .map(|n| {
                                    let used = rest
                                        .iter()
                                        .filter(|l| n.uses(l, Library::empty()))
                                        .cloned()
                                        .collect();
                                    (n, used)
                                })
                                .collect(),
                        ))
                    })
                    .collect::<Result<_, EnumError>>()?;
                let total = options
                    .iter()
                    .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
                self.check(total.unwrap_or(usize::MAX).saturating_add(out.len()))?;
                // Cartesian product keeping premise contexts pairwise disjoint.
                let mut partial: Vec<(Vec<(Bias, Node)>, Used)> =
                    vec![(Vec::new(), BTreeSet::new())];
                for (i, subs) in &options {
                    let mut next = Vec::new();
                    for (chosen, used) in &partial {
                        for (n, u) in subs {
                            if used.is_disjoint(u) {
                                let mut c = chosen.clone();
                                c.push((*i, n.clone()));
                                next.push((c, used.union(u).cloned().collect()));
                            }
                        }
                    }
                    partial = next;
                }
                for (chosen, _) in partial {
                    out.push(Node::Positive {
                        focus: focus.clone(),
                        ramification: ram.clone(),
                        premises: chosen.into_iter().collect(),
                    });
                }
            }
        }
        self.check(out.len())?;
        Ok(out)
    }

    fn negative(
        &self,
        handle: &Locus,
        ctx: &[Locus],
        depth: usize,
    ) -> Result<Vec<Node>, EnumError> {
        if depth == 0 {
            return Ok(vec![Node::sconse(handle.clone())]);
        }
        let mut per_entry: Vec<(Ramification, Vec<Node>)> = Vec::new();
        for ram in &self.rams {
            let mut inner: Vec<Locus> = ctx.to_vec();
            inner.extend(ram.sub_loci(handle));
            per_entry.push((ram.clone(), self.positive(&inner, depth - 1)?));
        }
        let total = per_entry
            .iter()
            .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len() + 1));
        self.check(total.unwrap_or(usize::MAX))?;
        let mut out = vec![Vec::<(Ramification, Node)>::new()];
        for (ram, children) in &per_entry {
            let mut next = Vec::with_capacity(out.len() * (children.len() + 1));
            for dir in &out {
                next.push(dir.clone());
                for c in children {
                    let mut d = dir.clone();
                    d.push((ram.clone(), c.clone()));
                    next.push(d);
                }
            }
            out = next;
        }
        Ok(out
            .into_iter()
            .map(|entries| Node::Negative {
                focus: handle.clone(),
                directory: entries.into_iter().collect(),
            })
            .collect())
    }
}

/// A random finite design within `bounds`. Not uniform: each choice point
/// picks among its options with equal probability.
pub fn random_design<R: Rng>(base: &Fork, bounds: Bounds, rng: &mut R) -> Design {
    let rams = Ramification::all_bounded(bounds.max_bias, bounds.max_ram);
    let ctx: Vec<Locus> = base.tines.iter().cloned().collect();
    let root = match &base.handle {
        None => random_positive(&ctx, bounds.max_depth, &rams, rng),
        Some(h) => random_negative(h, &ctx, bounds.max_depth, &rams, rng),
    };
    Design::new("random", base.clone(), root)
}

fn random_positive<R: Rng>(
    ctx: &[Locus],
    depth: usize,
    rams: &[Ramification],
    rng: &mut R,
) -> Node {
    if ctx.is_empty() || rng.gen_ratio(1, 6) {
        return Node::Daimon;
    }
    let focus = ctx[rng.gen_range(0..ctx.len())].clone();
    if depth == 0 {
        return Node::bomb(focus);
    }
    let ram = rams[rng.gen_range(0..rams.len())].clone();
    let rest: Vec<Locus> = ctx.iter().filter(|l| **l != focus).cloned().collect();
    // Hand each remaining context locus to one premise, or drop it.
    let biases: Vec<Bias> = ram.biases().collect();
    let mut shares: Vec<Vec<Locus>> = vec![Vec::new(); biases.len()];
    for l in rest {
        let k = rng.gen_range(0..=biases.len());
        if k < biases.len() {
            shares[k].push(l);
        }
    }
    let premises = biases
        .iter()
        .zip(shares)
        .map(|(&i, share)| {
            (
                i,
                random_negative(&focus.child(i), &share, depth - 1, rams, rng),
            )
        })
        .collect();
    Node::Positive {
        focus,
        ramification: ram,
        premises,
    }
}

fn random_negative<R: Rng>(
    handle: &Locus,
    ctx: &[Locus],
    depth: usize,
    rams: &[Ramification],
    rng: &mut R,
) -> Node {
    if depth == 0 {
        return Node::sconse(handle.clone());
    }
    let mut directory = std::collections::BTreeMap::new();
    for ram in rams {
        if rng.gen_bool(0.5) {
            let mut inner = ctx.to_vec();
            inner.extend(ram.sub_loci(handle));
            directory.insert(ram.clone(), random_positive(&inner, depth - 1, rams, rng));
        }
    }
    Node::Negative {
        focus: handle.clone(),
        directory,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi() -> Locus {
        Locus::new(vec![0])
    }

    #[test]
    fn depth_zero() {
        let pos = enumerate_designs(&Fork::positive([xi()]), Bounds::new(0, 2, 0)).unwrap();
        assert_eq!(pos.len(), 2);
        let neg = enumerate_designs(&Fork::negative(xi(), []), Bounds::new(0, 0, 0)).unwrap();
        assert_eq!(neg.len(), 1);
        assert!(neg.iter().next().unwrap().root.is_sconse());
    }

    #[test]
    fn ceiling_is_enforced() {
        let r = enumerate_with_ceiling(&Fork::positive([xi()]), Bounds::new(2, 2, 2), 100);
        assert!(matches!(r, Err(EnumError::TooMany { .. })));
    }
}
