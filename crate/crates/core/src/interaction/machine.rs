//! The normalization machine.
//!
//! The state is one positive slice (the main design, holding the token) and
//! a map of pending negative slices keyed by their handle. A locus is cut
//! exactly when some pending slice has it as handle. A positive action on a
//! cut locus hands the token to the matching premise of the partner; one on
//! a visible locus is copied to the residual and the net splits into one
//! sub-net per premise.
//!
//! When the main design drops a cut locus the partner's pending slice there
//! is inspected: an empty directory (or a copy-cat) is discarded, anything
//! that still has moves to make is an erased-locus divergence.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::trace::{Divergence, TraceStep};
use crate::delocalize::fax_premise;
use crate::design::{Action, Library, Node};
use crate::locus::{Bias, Locus, Ramification};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("undefined design `{0}`")]
    Undefined(String),
    #[error("a {expected} node was expected at {locus}")]
    Polarity {
        expected: &'static str,
        locus: Locus,
    },
    #[error("focus {0} is not available to the acting design")]
    FocusNotAvailable(Locus),
    #[error("the directory at {0} is not finitely known")]
    UnboundedDirectory(Locus),
    #[error("move {0} is not legal here")]
    IllegalMove(Action),
}

pub(crate) enum Stop {
    Diverged(Divergence),
    OutOfFuel,
    Await(Vec<Action>),
    Error(EngineError),
}

impl From<EngineError> for Stop {
    fn from(e: EngineError) -> Self {
        Stop::Error(e)
    }
}

#[derive(Clone)]
struct Slice<'a> {
    member: usize,
    node: Cow<'a, Node>,
    tines: BTreeSet<Locus>,
    /// Set on positions of a human player that left their stored tree.
    free: bool,
}

type Pending<'a> = BTreeMap<Locus, Slice<'a>>;

pub(crate) struct Human {
    pub member: usize,
    pub moves: Vec<Action>,
    pub auto_forced: bool,
}

pub(crate) struct Machine<'a> {
    names: Vec<String>,
    lib: &'a Library,
    fuel: usize,
    pub used: usize,
    pub trace: Vec<TraceStep>,
    human: Option<Human>,
    next_move: usize,
    /// Human moves actually applied, including auto-played forced ones.
    pub played: Vec<Action>,
}

pub(crate) struct Start<'a> {
    pub root: &'a Node,
    pub handle: Option<Locus>,
    pub tines: BTreeSet<Locus>,
}

impl<'a> Machine<'a> {
    pub fn new(names: Vec<String>, lib: &'a Library, fuel: usize, human: Option<Human>) -> Self {
        Machine {
            names,
            lib,
            fuel,
            used: 0,
            trace: Vec::new(),
            human,
            next_move: 0,
            played: Vec::new(),
        }
    }

    /// Runs the net whose members start as `starts`; `principal` acts first.
    pub fn run(&mut self, starts: Vec<Start<'a>>, principal: usize) -> Result<Node, Stop> {
        let mut pending = Pending::new();
        let mut main = None;
        for (k, s) in starts.into_iter().enumerate() {
            let slice = Slice {
                member: k,
                node: Cow::Borrowed(s.root),
                tines: s.tines,
                free: false,
            };
            if k == principal {
                main = Some((slice, s.handle));
            } else if let Some(h) = s.handle {
                pending.insert(h, slice);
            }
        }
        let (main, handle) = main.expect("principal index in range");
        match handle {
            None => self.positive(main, pending),
            Some(h) => self.negative(main, pending, h),
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        if self.used >= self.fuel {
            return Err(Stop::OutOfFuel);
        }
        self.used += 1;
        Ok(())
    }

    fn record(&mut self, member: usize, action: Action) {
        self.trace.push(TraceStep {
            member: self.names[member].clone(),
            action,
        });
    }

    /// Unfolds references at the head of `node`.
    fn resolve(&mut self, mut node: Cow<'a, Node>) -> Result<Cow<'a, Node>, Stop> {
        while let Node::Ref { name, at } = node.as_ref() {
            self.tick()?;
            let body = self
                .lib
                .unfold(name, at)
                .map_err(|_| EngineError::Undefined(name.clone()))?;
            node = Cow::Owned(body);
        }
        Ok(node)
    }

    fn is_human(&self, member: usize) -> bool {
        self.human.as_ref().is_some_and(|h| h.member == member)
    }

    fn positive(&mut self, mut main: Slice<'a>, mut pending: Pending<'a>) -> Result<Node, Stop> {
        loop {
            main.node = self.resolve(main.node)?;
            if self.is_human(main.member) {
                main = self.human_turn(main, &pending)?;
            }
            let (focus, ram, premises) = match main.node {
                Cow::Borrowed(Node::Daimon) | Cow::Owned(Node::Daimon) => {
                    self.tick()?;
                    self.record(main.member, Action::Daimon);
                    return Ok(Node::Daimon);
                }
                Cow::Borrowed(Node::Hole { focus }) => {
                    (focus.clone(), Ramification::empty(), Vec::new())
                }
                Cow::Owned(Node::Hole { focus }) => (focus, Ramification::empty(), Vec::new()),
                Cow::Borrowed(Node::Positive {
                    focus,
                    ramification,
                    premises,
                }) => (
                    focus.clone(),
                    ramification.clone(),
                    premises
                        .iter()
                        .map(|(i, p)| (*i, Cow::Borrowed(p)))
                        .collect::<Vec<_>>(),
                ),
                Cow::Owned(Node::Positive {
                    focus,
                    ramification,
                    premises,
                }) => (
                    focus,
                    ramification,
                    premises
                        .into_iter()
                        .map(|(i, p)| (i, Cow::Owned(p)))
                        .collect(),
                ),
                other => {
                    return Err(Stop::Error(EngineError::Polarity {
                        expected: "positive",
                        locus: other.focus().cloned().unwrap_or_default(),
                    }))
                }
            };
            if !main.tines.contains(&focus) {
                return Err(EngineError::FocusNotAvailable(focus).into());
            }
            self.tick()?;
            self.record(
                main.member,
                Action::Positive {
                    focus: focus.clone(),
                    ramification: ram.clone(),
                },
            );
            let rest: BTreeSet<Locus> = main
                .tines
                .iter()
                .filter(|l| **l != focus)
                .cloned()
                .collect();
            let lambdas = self.split_context(main.free, &rest, &premises);
            let kept: BTreeSet<&Locus> = lambdas.iter().flatten().collect();
            let dropped: Vec<Locus> = rest.iter().filter(|l| !kept.contains(l)).cloned().collect();
            for l in dropped {
                self.drop_locus(&l, &mut pending)?;
            }
            let slices: Vec<(Bias, Slice<'a>)> = premises
                .into_iter()
                .zip(lambdas)
                .map(|((i, node), tines)| {
                    (
                        i,
                        Slice {
                            member: main.member,
                            node,
                            tines,
                            free: main.free,
                        },
                    )
                })
                .collect();

            let Some(partner) = pending.remove(&focus) else {
                // Visible focus: copy the action and split the net.
                let mut out = BTreeMap::new();
                for (i, slice) in slices {
                    let mut sub = Pending::new();
                    extract(&mut pending, &slice.tines, &mut sub);
                    let handle = focus.child(i);
                    out.insert(i, self.negative(slice, sub, handle)?);
                }
                return Ok(Node::Positive {
                    focus,
                    ramification: ram,
                    premises: out,
                });
            };
            for (i, slice) in slices {
                pending.insert(focus.child(i), slice);
            }
            main = self.respond(partner, &focus, &ram, &mut pending)?;
        }
    }

    /// Context kept by each premise of a positive action.
    fn split_context(
        &self,
        free: bool,
        rest: &BTreeSet<Locus>,
        premises: &[(Bias, Cow<'a, Node>)],
    ) -> Vec<BTreeSet<Locus>> {
        if free {
            // A free move keeps the whole context on its first premise.
            return premises
                .iter()
                .enumerate()
                .map(|(k, _)| {
                    if k == 0 {
                        rest.clone()
                    } else {
                        BTreeSet::new()
                    }
                })
                .collect();
        }
        premises
            .iter()
            .map(|(_, p)| {
                rest.iter()
                    .filter(|l| p.uses(l, self.lib))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    /// The partner's reaction to `(+, focus, ram)`: the premise that takes the token.
    fn respond(
        &mut self,
        partner: Slice<'a>,
        focus: &Locus,
        ram: &Ramification,
        pending: &mut Pending<'a>,
    ) -> Result<Slice<'a>, Stop> {
        let node = self.resolve(partner.node)?;
        let sub_loci: BTreeSet<Locus> = ram.sub_loci(focus).collect();
        let child: Cow<'a, Node> = match node {
            Cow::Borrowed(Node::Negative { directory, .. }) => match directory.get(ram) {
                Some(c) => Cow::Borrowed(c),
                None => return Err(missing(focus, ram)),
            },
            Cow::Owned(Node::Negative { mut directory, .. }) => match directory.remove(ram) {
                Some(c) => Cow::Owned(c),
                None => return Err(missing(focus, ram)),
            },
            Cow::Borrowed(Node::Hole { .. }) | Cow::Owned(Node::Hole { .. }) => {
                if partner.free {
                    let mut tines = sub_loci;
                    tines.extend(partner.tines);
                    return Ok(Slice {
                        member: partner.member,
                        node: Cow::Owned(Node::Hole {
                            focus: focus.clone(),
                        }),
                        tines,
                        free: true,
                    });
                }
                return Err(missing(focus, ram));
            }
            Cow::Borrowed(Node::Fax { to, .. }) => {
                return Ok(self.copy(partner.member, &partner.tines, focus, to, ram, sub_loci))
            }
            Cow::Owned(Node::Fax { ref to, .. }) => {
                return Ok(self.copy(partner.member, &partner.tines, focus, to, ram, sub_loci))
            }
            other => {
                return Err(Stop::Error(EngineError::Polarity {
                    expected: "negative",
                    locus: other.focus().cloned().unwrap_or_else(|| focus.clone()),
                }))
            }
        };
        let kept: BTreeSet<Locus> = partner
            .tines
            .iter()
            .filter(|l| child.uses(l, self.lib))
            .cloned()
            .collect();
        for l in partner.tines.iter().filter(|l| !kept.contains(*l)) {
            self.drop_locus(l, pending)?;
        }
        let mut tines = sub_loci;
        tines.extend(kept);
        Ok(Slice {
            member: partner.member,
            node: child,
            tines,
            free: false,
        })
    }

    /// The copy-cat's answer to `(+, focus, ram)`: the same action on `to`.
    fn copy(
        &self,
        member: usize,
        context: &BTreeSet<Locus>,
        focus: &Locus,
        to: &Locus,
        ram: &Ramification,
        mut tines: BTreeSet<Locus>,
    ) -> Slice<'a> {
        tines.extend(context.iter().filter(|t| *t == to).cloned());
        Slice {
            member,
            node: Cow::Owned(fax_premise(focus, to, ram)),
            tines,
            free: false,
        }
    }

    /// A negative slice whose handle is visible: one residual entry per
    /// ramification the slice accepts, leaving out divergent ones.
    fn negative(
        &mut self,
        principal: Slice<'a>,
        pending: Pending<'a>,
        handle: Locus,
    ) -> Result<Node, Stop> {
        let node = self.resolve(principal.node.clone())?;
        let entries: Vec<Ramification> = match node.as_ref() {
            Node::Negative { directory, .. } => directory.keys().cloned().collect(),
            Node::Hole { .. } if !principal.free => return Ok(Node::Hole { focus: handle }),
            Node::Fax { from, to } => {
                if !pending.contains_key(to) {
                    return Ok(Node::Fax {
                        from: from.clone(),
                        to: to.clone(),
                    });
                }
                self.candidates(to, &pending, 0)?
            }
            Node::Hole { .. } => {
                return Err(EngineError::UnboundedDirectory(handle).into());
            }
            other => {
                return Err(Stop::Error(EngineError::Polarity {
                    expected: "negative",
                    locus: other.focus().cloned().unwrap_or_else(|| handle.clone()),
                }))
            }
        };
        let mut directory = BTreeMap::new();
        for ram in entries {
            self.tick()?;
            self.record(
                principal.member,
                Action::Negative {
                    focus: handle.clone(),
                    ramification: ram.clone(),
                },
            );
            let mut branch_pending = pending.clone();
            let slice = Slice {
                node: node.clone(),
                ..principal.clone()
            };
            let result = self
                .respond(slice, &handle, &ram, &mut branch_pending)
                .and_then(|main| self.positive(main, branch_pending));
            match result {
                Ok(n) => {
                    directory.insert(ram, n);
                }
                Err(Stop::Diverged(_)) => {}
                Err(other) => return Err(other),
            }
        }
        Ok(Node::Negative {
            focus: handle,
            directory,
        })
    }

    /// Ramifications a copy-cat forwarding to `at` must be ready for.
    fn candidates(
        &mut self,
        at: &Locus,
        pending: &Pending<'a>,
        hops: usize,
    ) -> Result<Vec<Ramification>, Stop> {
        let Some(slice) = pending.get(at) else {
            return Err(EngineError::UnboundedDirectory(at.clone()).into());
        };
        if hops > pending.len() {
            return Err(EngineError::UnboundedDirectory(at.clone()).into());
        }
        let node = self.resolve(slice.node.clone())?;
        match node.as_ref() {
            Node::Negative { directory, .. } => Ok(directory.keys().cloned().collect()),
            Node::Hole { .. } if !slice.free => Ok(Vec::new()),
            Node::Fax { to, .. } => self.candidates(to, pending, hops + 1),
            _ => Err(EngineError::UnboundedDirectory(at.clone()).into()),
        }
    }

    /// Removes the pending slice at a dropped locus.
    fn drop_locus(&mut self, locus: &Locus, pending: &mut Pending<'a>) -> Result<(), Stop> {
        let Some(slice) = pending.remove(locus) else {
            return Ok(());
        };
        let node = self.resolve(slice.node)?;
        match node.as_ref() {
            Node::Negative { directory, .. } if !directory.is_empty() => {
                return Err(Stop::Diverged(Divergence::ErasedLocus {
                    locus: locus.clone(),
                }))
            }
            _ => {}
        }
        for t in &slice.tines {
            self.drop_locus(t, pending)?;
        }
        Ok(())
    }

    /// Moves the human player may make in this position.
    fn legal_moves(&mut self, main: &Slice<'a>, pending: &Pending<'a>) -> Vec<Action> {
        let mut moves = BTreeSet::new();
        moves.insert(Action::Daimon);
        if !main.free {
            match main.node.as_ref() {
                Node::Positive {
                    focus,
                    ramification,
                    ..
                } => {
                    moves.insert(Action::Positive {
                        focus: focus.clone(),
                        ramification: ramification.clone(),
                    });
                }
                Node::Hole { focus } => {
                    moves.insert(Action::Positive {
                        focus: focus.clone(),
                        ramification: Ramification::empty(),
                    });
                }
                _ => {}
            }
        }
        let saved = self.used;
        for t in &main.tines {
            if pending.contains_key(t) {
                if let Ok(rams) = self.candidates(t, pending, 0) {
                    for ram in rams {
                        moves.insert(Action::Positive {
                            focus: t.clone(),
                            ramification: ram,
                        });
                    }
                }
            }
        }
        // Looking ahead is free.
        self.used = saved;
        moves.into_iter().collect()
    }

    fn human_turn(&mut self, main: Slice<'a>, pending: &Pending<'a>) -> Result<Slice<'a>, Stop> {
        let legal = self.legal_moves(&main, pending);
        let human = self.human.as_ref().expect("human turn without a human");
        let action = if let Some(a) = human.moves.get(self.next_move) {
            self.next_move += 1;
            a.clone()
        } else {
            let forced: Vec<&Action> = legal.iter().filter(|a| **a != Action::Daimon).collect();
            if human.auto_forced && forced.len() == 1 {
                forced[0].clone()
            } else {
                return Err(Stop::Await(legal));
            }
        };
        if !legal.contains(&action) {
            return Err(EngineError::IllegalMove(action).into());
        }
        self.played.push(action.clone());
        let node = match &action {
            Action::Daimon => Node::Daimon,
            Action::Positive {
                focus,
                ramification,
            } => {
                let follows_tree = !main.free
                    && match main.node.as_ref() {
                        Node::Positive {
                            focus: f,
                            ramification: r,
                            ..
                        } => f == focus && r == ramification,
                        Node::Hole { focus: f } => f == focus && ramification.is_empty(),
                        _ => false,
                    };
                if follows_tree {
                    return Ok(main);
                }
                Node::Positive {
                    focus: focus.clone(),
                    ramification: ramification.clone(),
                    premises: ramification
                        .biases()
                        .map(|i| {
                            (
                                i,
                                Node::Hole {
                                    focus: focus.child(i),
                                },
                            )
                        })
                        .collect(),
                }
            }
            Action::Negative { .. } => return Err(EngineError::IllegalMove(action).into()),
        };
        Ok(Slice {
            node: Cow::Owned(node),
            free: true,
            ..main
        })
    }
}

fn missing(focus: &Locus, ram: &Ramification) -> Stop {
    Stop::Diverged(Divergence::MissingRamification {
        focus: focus.clone(),
        ramification: ram.clone(),
    })
}

/// Moves into `sub` every pending slice reachable from `tines`.
fn extract<'a>(pending: &mut Pending<'a>, tines: &BTreeSet<Locus>, sub: &mut Pending<'a>) {
    let mut stack: Vec<Locus> = tines.iter().cloned().collect();
    while let Some(t) = stack.pop() {
        if let Some(s) = pending.remove(&t) {
            stack.extend(s.tines.iter().cloned());
            sub.insert(t, s);
        }
    }
}
