//! Side conditions of the positive and negative rules.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::design::{Design, Library, Node};
use crate::locus::{Fork, Locus, Ramification};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    PrefixClash { a: Locus, b: Locus },
    FocusNotAvailable { focus: Locus },
    WrongHandle { expected: Locus, found: Locus },
    ExpectedPositive,
    ExpectedNegative,
    PremisesMismatch { ramification: Ramification },
    WrongPremiseFocus { expected: Locus, found: Locus },
    NotPairwiseDisjoint { locus: Locus },
    UndefinedReference { name: String },
    ReferenceBase { name: String, base: Fork },
    FaxTarget { to: Locus },
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::PrefixClash { a, b } => {
                write!(f, "loci {a} and {b} are not prefix-free")
            }
            ViolationKind::FocusNotAvailable { focus } => {
                write!(f, "focus {focus} is not in the available context")
            }
            ViolationKind::WrongHandle { expected, found } => {
                write!(f, "negative node at {found}, expected handle {expected}")
            }
            ViolationKind::ExpectedPositive => f.write_str("expected a positive node"),
            ViolationKind::ExpectedNegative => f.write_str("expected a negative node"),
            ViolationKind::PremisesMismatch { ramification } => {
                write!(f, "premises do not match ramification {ramification}")
            }
            ViolationKind::WrongPremiseFocus { expected, found } => {
                write!(f, "premise rooted at {found}, expected {expected}")
            }
            ViolationKind::NotPairwiseDisjoint { locus } => {
                write!(
                    f,
                    "context locus {locus} is claimed by two premises (pairwise disjoint)"
                )
            }
            ViolationKind::UndefinedReference { name } => write!(f, "undefined design `{name}`"),
            ViolationKind::ReferenceBase { name, base } => {
                write!(
                    f,
                    "reference to `{name}` needs base {base}, which is not available"
                )
            }
            ViolationKind::FaxTarget { to } => write!(f, "fax target {to} is not in the context"),
        }
    }
}

/// One failed condition, located by the path of actions from the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.path, self.kind)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_design(design: &Design, lib: &Library) -> Report {
    let mut v = Validator {
        lib,
        out: Vec::new(),
    };
    for (a, b) in design.base.prefix_clashes() {
        v.push("/", ViolationKind::PrefixClash { a, b });
    }
    let ctx: BTreeSet<Locus> = design.base.tines.clone();
    match &design.base.handle {
        None => v.positive(&design.root, &ctx, "/"),
        Some(h) => v.negative(&design.root, h, &ctx, "/"),
    }
    Report { violations: v.out }
}

/// Validates every definition of a library against the library itself.
pub fn validate_library(lib: &Library) -> Vec<(String, Report)> {
    lib.designs()
        .map(|d| (d.name.clone(), validate_design(d, lib)))
        .filter(|(_, r)| !r.is_ok())
        .collect()
}

struct Validator<'l> {
    lib: &'l Library,
    out: Vec<Violation>,
}

impl Validator<'_> {
    fn push(&mut self, path: &str, kind: ViolationKind) {
        self.out.push(Violation {
            path: path.to_string(),
            kind,
        });
    }

    fn check_ref(
        &mut self,
        name: &str,
        at: &Locus,
        handle: Option<&Locus>,
        ctx: &BTreeSet<Locus>,
        path: &str,
    ) {
        let base = match self.lib.unfold_base(name, at) {
            Ok(b) => b,
            Err(_) => {
                self.push(
                    path,
                    ViolationKind::UndefinedReference {
                        name: name.to_string(),
                    },
                );
                return;
            }
        };
        let handle_ok = base.handle.as_ref() == handle;
        if !handle_ok || !base.tines.is_subset(ctx) {
            self.push(
                path,
                ViolationKind::ReferenceBase {
                    name: name.to_string(),
                    base,
                },
            );
        }
    }

    fn positive(&mut self, node: &Node, ctx: &BTreeSet<Locus>, path: &str) {
        match node {
            Node::Daimon => {}
            Node::Hole { focus } => {
                if !ctx.contains(focus) {
                    self.push(
                        path,
                        ViolationKind::FocusNotAvailable {
                            focus: focus.clone(),
                        },
                    );
                }
            }
            Node::Ref { name, at } => self.check_ref(name, at, None, ctx, path),
            Node::Negative { .. } | Node::Fax { .. } => {
                self.push(path, ViolationKind::ExpectedPositive)
            }
            Node::Positive {
                focus,
                ramification,
                premises,
            } => {
                if !ctx.contains(focus) {
                    self.push(
                        path,
                        ViolationKind::FocusNotAvailable {
                            focus: focus.clone(),
                        },
                    );
                }
                let keys: Ramification = premises.keys().copied().collect();
                if &keys != ramification {
                    self.push(
                        path,
                        ViolationKind::PremisesMismatch {
                            ramification: ramification.clone(),
                        },
                    );
                }
                let rest: BTreeSet<Locus> = ctx.iter().filter(|l| *l != focus).cloned().collect();
                let mut claimed: BTreeSet<Locus> = BTreeSet::new();
                let mut reported: BTreeSet<Locus> = BTreeSet::new();
                for (i, premise) in premises {
                    let sub = format!("{path}{focus}+{i}/");
                    let lambda: BTreeSet<Locus> = rest
                        .iter()
                        .filter(|l| premise.uses(l, self.lib))
                        .cloned()
                        .collect();
                    for l in &lambda {
                        if !claimed.insert(l.clone()) && reported.insert(l.clone()) {
                            self.push(
                                path,
                                ViolationKind::NotPairwiseDisjoint { locus: l.clone() },
                            );
                        }
                    }
                    self.negative(premise, &focus.child(*i), &lambda, &sub);
                }
            }
        }
    }

    fn negative(&mut self, node: &Node, handle: &Locus, ctx: &BTreeSet<Locus>, path: &str) {
        match node {
            Node::Daimon | Node::Positive { .. } => {
                self.push(path, ViolationKind::ExpectedNegative)
            }
            Node::Hole { focus } => {
                if focus != handle {
                    self.push(
                        path,
                        ViolationKind::WrongPremiseFocus {
                            expected: handle.clone(),
                            found: focus.clone(),
                        },
                    );
                }
            }
            Node::Ref { name, at } => self.check_ref(name, at, Some(handle), ctx, path),
            Node::Fax { from, to } => {
                if from != handle {
                    self.push(
                        path,
                        ViolationKind::WrongHandle {
                            expected: handle.clone(),
                            found: from.clone(),
                        },
                    );
                }
                if !ctx.contains(to) {
                    self.push(path, ViolationKind::FaxTarget { to: to.clone() });
                }
            }
            Node::Negative { focus, directory } => {
                if focus != handle {
                    self.push(
                        path,
                        ViolationKind::WrongHandle {
                            expected: handle.clone(),
                            found: focus.clone(),
                        },
                    );
                }
                for (ram, child) in directory {
                    let sub = format!("{path}{focus}-{ram}/");
                    let mut inner = ctx.clone();
                    inner.extend(ram.sub_loci(handle));
                    self.positive(child, &inner, &sub);
                }
            }
        }
    }
}
