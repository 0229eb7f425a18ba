//! Circular justification and hidden presupposition.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::design::{Design, Library, Node};
use crate::locus::Locus;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Evidence {
    /// The justification is a reference back to the design itself.
    SelfReference { name: String },
    /// The two sub-designs agree up to this height once relocated.
    Delocalized { depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PetitioFinding {
    pub thesis: Locus,
    pub justification: Locus,
    pub evidence: Evidence,
}

/// Pairs `(ξ, ξ′)`, `ξ` a proper prefix of `ξ′`, where the sub-design at
/// `ξ′` is the sub-design at `ξ` moved to `ξ′`.
///
/// Self references are reported without unfolding. Other pairs are compared
/// exactly when both sides are finite, and up to height `max_depth`
/// otherwise. Pairs that follow from an already reported pair by extending
/// both loci with the same suffix are left out.
pub fn detect_petitio(d: &Design, lib: &Library, max_depth: usize) -> Vec<PetitioFinding> {
    let mut positions: Vec<(Locus, &Node)> = Vec::new();
    collect_positions(&d.root, &mut positions);
    let mut findings: Vec<PetitioFinding> = Vec::new();

    let thesis = d.principal();
    for (at, node) in &positions {
        if let Node::Ref { name, .. } = node {
            if name == &d.name && thesis.is_proper_prefix_of(at) {
                findings.push(PetitioFinding {
                    thesis: thesis.clone(),
                    justification: at.clone(),
                    evidence: Evidence::SelfReference { name: name.clone() },
                });
            }
        }
    }

    let mut pairs: Vec<(&Locus, &Node, &Locus, &Node)> = Vec::new();
    for (a, na) in &positions {
        for (b, nb) in &positions {
            if a.is_proper_prefix_of(b) {
                pairs.push((a, na, b, nb));
            }
        }
    }
    pairs.sort_by(|x, y| (x.0.len(), x.0, x.2).cmp(&(y.0.len(), y.0, y.2)));
    for (a, na, b, nb) in pairs {
        let known = findings.iter().any(|f| {
            (&f.thesis == a && &f.justification == b)
                || implied_by(&f.thesis, &f.justification, a, b)
        });
        if known {
            continue;
        }
        let moved = na.rebase(a, b);
        if same_up_to(nb, &moved, max_depth, lib) {
            findings.push(PetitioFinding {
                thesis: a.clone(),
                justification: b.clone(),
                evidence: Evidence::Delocalized { depth: max_depth },
            });
        }
    }
    findings.sort_by(|x, y| (&x.thesis, &x.justification).cmp(&(&y.thesis, &y.justification)));
    findings
}

/// `(p, q) = (a·s, b·s)` for a non-empty `s`.
fn implied_by(a: &Locus, b: &Locus, p: &Locus, q: &Locus) -> bool {
    match (p.strip_prefix(a), q.strip_prefix(b)) {
        (Some(s), Some(t)) => !s.is_empty() && s == t,
        _ => false,
    }
}

fn collect_positions<'n>(node: &'n Node, out: &mut Vec<(Locus, &'n Node)>) {
    if let Some(f) = node.focus() {
        out.push((f.clone(), node));
    }
    match node {
        Node::Positive { premises, .. } => {
            premises.values().for_each(|p| collect_positions(p, out))
        }
        Node::Negative { directory, .. } => {
            directory.values().for_each(|c| collect_positions(c, out))
        }
        _ => {}
    }
}

fn same_up_to(x: &Node, y: &Node, depth: usize, lib: &Library) -> bool {
    if !x.contains_lazy() && !y.contains_lazy() {
        return x == y;
    }
    approximant(x, depth, lib, 0) == approximant(y, depth, lib, 0)
}

/// Cuts the tree at height `k`, unfolding references on the way.
fn approximant(node: &Node, k: usize, lib: &Library, unfolds: usize) -> Node {
    if k == 0 {
        return match node.focus() {
            Some(f) => Node::Hole { focus: f.clone() },
            None => node.clone(),
        };
    }
    match node {
        Node::Ref { name, at } => match lib.unfold(name, at) {
            Ok(body) if unfolds < 64 => approximant(&body, k, lib, unfolds + 1),
            _ => Node::Hole { focus: at.clone() },
        },
        Node::Positive {
            focus,
            ramification,
            premises,
        } => Node::Positive {
            focus: focus.clone(),
            ramification: ramification.clone(),
            premises: premises
                .iter()
                .map(|(i, p)| (*i, approximant(p, k - 1, lib, 0)))
                .collect(),
        },
        Node::Negative { focus, directory } => Node::Negative {
            focus: focus.clone(),
            directory: directory
                .iter()
                .map(|(j, c)| (j.clone(), approximant(c, k - 1, lib, 0)))
                .collect(),
        },
        other => other.clone(),
    }
}

/// Context loci that some positive rule (or reference) leaves behind.
pub fn detect_presupposition_gap(d: &Design, lib: &Library) -> Vec<Locus> {
    let mut out = BTreeSet::new();
    let ctx = d.base.tines.clone();
    match &d.base.handle {
        None => gap_positive(&d.root, &ctx, lib, &mut out),
        Some(h) => gap_negative(&d.root, h, &ctx, lib, &mut out),
    }
    out.into_iter().collect()
}

fn gap_positive(node: &Node, ctx: &BTreeSet<Locus>, lib: &Library, out: &mut BTreeSet<Locus>) {
    match node {
        Node::Positive {
            focus, premises, ..
        } => {
            let rest: BTreeSet<Locus> = ctx.iter().filter(|l| *l != focus).cloned().collect();
            let mut used = BTreeSet::new();
            for (i, p) in premises {
                let lambda: BTreeSet<Locus> =
                    rest.iter().filter(|l| p.uses(l, lib)).cloned().collect();
                used.extend(lambda.iter().cloned());
                gap_negative(p, &focus.child(*i), &lambda, lib, out);
            }
            out.extend(rest.into_iter().filter(|l| !used.contains(l)));
        }
        Node::Ref { name, at } => {
            if let Ok(base) = lib.unfold_base(name, at) {
                out.extend(ctx.iter().filter(|l| !base.tines.contains(*l)).cloned());
            }
        }
        _ => {}
    }
}

fn gap_negative(
    node: &Node,
    handle: &Locus,
    ctx: &BTreeSet<Locus>,
    lib: &Library,
    out: &mut BTreeSet<Locus>,
) {
    if let Node::Negative { directory, .. } = node {
        for (ram, child) in directory {
            let mut inner = ctx.clone();
            inner.extend(ram.sub_loci(handle));
            gap_positive(child, &inner, lib, out);
        }
    }
}
