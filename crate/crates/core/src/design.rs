//! Design trees, named definitions and structural comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::locus::{Bias, Fork, Locus, Ramification};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// One node of a design.
///
/// Children of a positive node are negative-rooted and children of a
/// negative node are positive-rooted. Contexts (the `Λ` sets of the rules)
/// are not stored: the context a premise keeps is the set of available loci
/// it actually mentions, see [`Node::uses`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Node {
    /// The daimon `†`.
    Daimon,
    /// `(+, focus, ramification)` with one negative premise per bias.
    Positive {
        focus: Locus,
        ramification: Ramification,
        premises: BTreeMap<Bias, Node>,
    },
    /// `(−, focus, directory)`; an empty directory is a fact / sconse.
    Negative {
        focus: Locus,
        directory: BTreeMap<Ramification, Node>,
    },
    /// The named definition delocalized so that its principal locus sits at `at`.
    Ref { name: String, at: Locus },
    /// The copy-cat design `from ⊢ to`, with a lazily generated directory.
    Fax { from: Locus, to: Locus },
    /// A truncation or open placeholder. Negative holes behave as sconse,
    /// positive ones as `(+, focus, ∅)`.
    Hole { focus: Locus },
}

impl Node {
    pub fn sconse(focus: Locus) -> Node {
        Node::Negative {
            focus,
            directory: BTreeMap::new(),
        }
    }

    pub fn bomb(focus: Locus) -> Node {
        Node::Positive {
            focus,
            ramification: Ramification::empty(),
            premises: BTreeMap::new(),
        }
    }

    /// `(−, focus, {∅ ↦ †})`.
    pub fn daimon_neg(focus: Locus) -> Node {
        Node::Negative {
            focus,
            directory: BTreeMap::from([(Ramification::empty(), Node::Daimon)]),
        }
    }

    /// A positive node whose premises are all sconse.
    pub fn positive_leafy(focus: Locus, ramification: Ramification) -> Node {
        let premises = ramification
            .biases()
            .map(|i| (i, Node::sconse(focus.child(i))))
            .collect();
        Node::Positive {
            focus,
            ramification,
            premises,
        }
    }

    /// Polarity when it is determined by the node itself.
    pub fn polarity(&self) -> Option<Polarity> {
        match self {
            Node::Daimon | Node::Positive { .. } => Some(Polarity::Positive),
            Node::Negative { .. } | Node::Fax { .. } => Some(Polarity::Negative),
            Node::Ref { .. } | Node::Hole { .. } => None,
        }
    }

    pub fn focus(&self) -> Option<&Locus> {
        match self {
            Node::Daimon => None,
            Node::Positive { focus, .. } | Node::Negative { focus, .. } | Node::Hole { focus } => {
                Some(focus)
            }
            Node::Ref { at, .. } => Some(at),
            Node::Fax { from, .. } => Some(from),
        }
    }

    pub fn is_sconse(&self) -> bool {
        matches!(self, Node::Negative { directory, .. } if directory.is_empty())
    }

    /// Rewrites every locus under `from` to live under `to`.
    pub fn rebase(&self, from: &Locus, to: &Locus) -> Node {
        let r = |l: &Locus| l.rebase(from, to);
        match self {
            Node::Daimon => Node::Daimon,
            Node::Positive {
                focus,
                ramification,
                premises,
            } => Node::Positive {
                focus: r(focus),
                ramification: ramification.clone(),
                premises: premises
                    .iter()
                    .map(|(i, p)| (*i, p.rebase(from, to)))
                    .collect(),
            },
            Node::Negative { focus, directory } => Node::Negative {
                focus: r(focus),
                directory: directory
                    .iter()
                    .map(|(j, c)| (j.clone(), c.rebase(from, to)))
                    .collect(),
            },
            Node::Ref { name, at } => Node::Ref {
                name: name.clone(),
                at: r(at),
            },
            Node::Fax { from: a, to: b } => Node::Fax {
                from: r(a),
                to: r(b),
            },
            Node::Hole { focus } => Node::Hole { focus: r(focus) },
        }
    }

    /// Calls `f` on every locus the subtree mentions. References contribute
    /// the loci of their delocalized base without being unfolded.
    pub fn visit_loci(&self, lib: &Library, f: &mut dyn FnMut(&Locus)) {
        match self {
            Node::Daimon => {}
            Node::Positive {
                focus, premises, ..
            } => {
                f(focus);
                for p in premises.values() {
                    p.visit_loci(lib, f);
                }
            }
            Node::Negative { focus, directory } => {
                f(focus);
                for c in directory.values() {
                    c.visit_loci(lib, f);
                }
            }
            Node::Ref { name, at } => {
                f(at);
                if let Some(def) = lib.get(name) {
                    let principal = def.principal();
                    for l in def.base.loci() {
                        f(&l.rebase(&principal, at));
                    }
                }
            }
            Node::Fax { from, to } => {
                f(from);
                f(to);
            }
            Node::Hole { focus } => f(focus),
        }
    }

    /// Whether the subtree mentions `ctx` or an address below it.
    pub fn uses(&self, ctx: &Locus, lib: &Library) -> bool {
        let mut found = false;
        self.visit_loci(lib, &mut |l| {
            if ctx.is_prefix_of(l) {
                found = true;
            }
        });
        found
    }

    /// Node height: the number of nodes on the longest branch, minus one.
    pub fn height(&self) -> usize {
        match self {
            Node::Positive { premises, .. } => {
                premises.values().map(|p| 1 + p.height()).max().unwrap_or(0)
            }
            Node::Negative { directory, .. } => directory
                .values()
                .map(|c| 1 + c.height())
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Positive { premises, .. } => 1 + premises.values().map(Node::size).sum::<usize>(),
            Node::Negative { directory, .. } => {
                1 + directory.values().map(Node::size).sum::<usize>()
            }
            _ => 1,
        }
    }

    pub fn contains_lazy(&self) -> bool {
        match self {
            Node::Ref { .. } | Node::Fax { .. } => true,
            Node::Positive { premises, .. } => premises.values().any(Node::contains_lazy),
            Node::Negative { directory, .. } => directory.values().any(Node::contains_lazy),
            _ => false,
        }
    }
}

/// A named design on a base fork.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Design {
    pub name: String,
    pub base: Fork,
    pub root: Node,
}

impl Design {
    pub fn new(name: impl Into<String>, base: Fork, root: Node) -> Self {
        Design {
            name: name.into(),
            base,
            root,
        }
    }

    pub fn polarity(&self) -> Polarity {
        if self.base.is_positive() {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    /// The locus a reference to this design relocates: the handle of a
    /// negative base, otherwise the least tine (the root for an empty fork).
    pub fn principal(&self) -> Locus {
        match &self.base.handle {
            Some(h) => h.clone(),
            None => self.base.tines.iter().next().cloned().unwrap_or_default(),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LibraryError {
    #[error("undefined design `{0}`")]
    Undefined(String),
}

/// A set of named definitions that references resolve against.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct Library {
    designs: BTreeMap<String, Design>,
}

static EMPTY_LIBRARY: LazyLock<Library> = LazyLock::new(Library::default);

impl Library {
    pub fn new() -> Self {
        Library::default()
    }

    /// A shared empty library, for designs without references.
    pub fn empty() -> &'static Library {
        &EMPTY_LIBRARY
    }

    pub fn insert(&mut self, design: Design) -> Option<Design> {
        self.designs.insert(design.name.clone(), design)
    }

    pub fn get(&self, name: &str) -> Option<&Design> {
        self.designs.get(name)
    }

    pub fn designs(&self) -> impl Iterator<Item = &Design> {
        self.designs.values()
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }

    /// The body of `name` moved so that its principal locus is `at`.
    pub fn unfold(&self, name: &str, at: &Locus) -> Result<Node, LibraryError> {
        let def = self
            .get(name)
            .ok_or_else(|| LibraryError::Undefined(name.to_string()))?;
        Ok(def.root.rebase(&def.principal(), at))
    }

    /// The base of `name` moved to `at`.
    pub fn unfold_base(&self, name: &str, at: &Locus) -> Result<Fork, LibraryError> {
        let def = self
            .get(name)
            .ok_or_else(|| LibraryError::Undefined(name.to_string()))?;
        let p = def.principal();
        Ok(Fork {
            handle: def.base.handle.as_ref().map(|h| h.rebase(&p, at)),
            tines: def.base.tines.iter().map(|t| t.rebase(&p, at)).collect(),
        })
    }

    /// Names of definitions that reach themselves through references.
    pub fn recursive_definitions(&self) -> Vec<String> {
        fn refs(node: &Node, out: &mut Vec<String>) {
            match node {
                Node::Ref { name, .. } => out.push(name.clone()),
                Node::Positive { premises, .. } => premises.values().for_each(|p| refs(p, out)),
                Node::Negative { directory, .. } => directory.values().for_each(|c| refs(c, out)),
                _ => {}
            }
        }
        let mut result = Vec::new();
        for start in self.designs.keys() {
            let mut seen = std::collections::BTreeSet::new();
            let mut stack = vec![start.clone()];
            let mut cyclic = false;
            while let Some(n) = stack.pop() {
                let Some(def) = self.get(&n) else { continue };
                let mut out = Vec::new();
                refs(&def.root, &mut out);
                for r in out {
                    if &r == start {
                        cyclic = true;
                    }
                    if seen.insert(r.clone()) {
                        stack.push(r);
                    }
                }
            }
            if cyclic {
                result.push(start.clone());
            }
        }
        result
    }
}

impl FromIterator<Design> for Library {
    fn from_iter<T: IntoIterator<Item = Design>>(iter: T) -> Self {
        let mut lib = Library::new();
        for d in iter {
            lib.insert(d);
        }
        lib
    }
}

/// A single move as it appears in traces and in the session API.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Action {
    Daimon,
    Positive {
        focus: Locus,
        ramification: Ramification,
    },
    Negative {
        focus: Locus,
        ramification: Ramification,
    },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Daimon => f.write_str("†"),
            Action::Positive {
                focus,
                ramification,
            } => write!(f, "+ {focus} {ramification}"),
            Action::Negative {
                focus,
                ramification,
            } => write!(f, "- {focus} {ramification}"),
        }
    }
}

/// Structural equality after unfolding references up to `depth` times along
/// each branch. Beyond that, references compare by name and position.
pub fn design_equal(d: &Design, e: &Design, depth: usize, lib: &Library) -> bool {
    d.base == e.base && nodes_equal(&d.root, &e.root, depth, lib)
}

pub fn nodes_equal(a: &Node, b: &Node, depth: usize, lib: &Library) -> bool {
    match (a, b) {
        (Node::Ref { name: n1, at: a1 }, Node::Ref { name: n2, at: a2 })
            if n1 == n2 && a1 == a2 =>
        {
            true
        }
        (Node::Ref { name, at }, other) | (other, Node::Ref { name, at }) => {
            if depth == 0 {
                return false;
            }
            match lib.unfold(name, at) {
                Ok(body) => {
                    // Keep the original orientation irrelevant: equality is symmetric.
                    nodes_equal(&body, other, depth - 1, lib)
                }
                Err(_) => false,
            }
        }
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
                && p1.len() == p2.len()
                && p1
                    .iter()
                    .zip(p2.iter())
                    .all(|((i, x), (j, y))| i == j && nodes_equal(x, y, depth, lib))
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
                && d1.len() == d2.len()
                && d1
                    .iter()
                    .zip(d2.iter())
                    .all(|((i, x), (j, y))| i == j && nodes_equal(x, y, depth, lib))
        }
        (Node::Fax { from: a1, to: b1 }, Node::Fax { from: a2, to: b2 }) => a1 == a2 && b1 == b2,
        (Node::Hole { focus: f1 }, Node::Hole { focus: f2 }) => f1 == f2,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi() -> Locus {
        Locus::new(vec![0])
    }

    #[test]
    fn daimon_differs_from_sconse() {
        let d = Design::new("d", Fork::positive([xi()]), Node::Daimon);
        let s = Design::new("s", Fork::negative(xi(), []), Node::sconse(xi()));
        assert!(design_equal(&d, &d, 3, Library::empty()));
        assert!(!design_equal(&d, &s, 3, Library::empty()));
    }

    #[test]
    fn references_unfold_within_depth() {
        let body = Node::positive_leafy(xi(), Ramification::from([1]));
        let lib: Library = [Design::new("A", Fork::positive([xi()]), body)]
            .into_iter()
            .collect();
        let at = Locus::new(vec![5]);
        let r = Node::Ref {
            name: "A".into(),
            at: at.clone(),
        };
        let expected = Node::positive_leafy(at, Ramification::from([1]));
        assert!(nodes_equal(&r, &expected, 1, &lib));
        assert!(!nodes_equal(&r, &expected, 0, &lib));
    }

    #[test]
    fn self_reference_is_detected() {
        let x = xi();
        let root = Node::Positive {
            focus: x.clone(),
            ramification: Ramification::from([1]),
            premises: BTreeMap::from([(
                1,
                Node::Negative {
                    focus: x.child(1),
                    directory: BTreeMap::from([(
                        Ramification::from([1]),
                        Node::Ref {
                            name: "P".into(),
                            at: x.child(1).child(1),
                        },
                    )]),
                },
            )]),
        };
        let lib: Library = [Design::new("P", Fork::positive([x]), root)]
            .into_iter()
            .collect();
        assert_eq!(lib.recursive_definitions(), vec!["P".to_string()]);
    }
}
