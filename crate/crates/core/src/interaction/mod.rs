//! Nets, normalization, orthogonality and dispute traces.

mod machine;
mod net;
mod trace;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use machine::EngineError;
pub(crate) use machine::{Human, Machine, Start, Stop};
pub use net::{make_checked_net, make_net, Net, NetError};
pub use trace::{ActionJson, Divergence, Trace, TraceStep, Verdict};

use crate::design::{Action, Design, Library, Node};

/// Fuel used when nothing else is configured.
pub const DEFAULT_FUEL: usize = 10_000;

pub(crate) fn starts(members: &[Design]) -> Vec<Start<'_>> {
    members
        .iter()
        .map(|d| Start {
            root: &d.root,
            handle: d.base.handle.clone(),
            tines: d.base.tines.clone(),
        })
        .collect()
}

pub(crate) fn finish(
    machine: Machine<'_>,
    result: Result<Node, Stop>,
    visible: crate::locus::Fork,
) -> Result<Trace, EngineError> {
    let verdict = match result {
        Ok(root) => Verdict::Converged {
            residual: Design::new("residual", visible, root),
        },
        Err(Stop::Diverged(reason)) => Verdict::Diverged { reason },
        Err(Stop::OutOfFuel) => Verdict::OutOfFuel {
            steps: machine.used,
        },
        Err(Stop::Error(e)) => return Err(e),
        Err(Stop::Await(_)) => unreachable!("no human player in batch normalization"),
    };
    Ok(Trace {
        steps: machine.trace,
        verdict,
    })
}

/// Normalizes a net; deterministic, stops after `fuel` steps.
pub fn normalize(net: &Net, fuel: usize) -> Result<Trace, EngineError> {
    let names = net.members().iter().map(|d| d.name.clone()).collect();
    let mut machine = Machine::new(names, net.library(), fuel, None);
    let result = machine.run(starts(net.members()), net.principal());
    finish(machine, result, net.visible_base())
}

/// Where an interactive run stands after replaying the human moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum PlayState {
    /// The human player is to move; these are the legal moves.
    Awaiting {
        legal: Vec<Action>,
    },
    Finished {
        verdict: Verdict,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Play {
    pub steps: Vec<TraceStep>,
    pub state: PlayState,
    /// Human moves applied, forced ones included.
    pub played: Vec<Action>,
    pub fuel_used: usize,
}

/// Replays `moves` for the member at index `human`, the other members
/// answering from their trees. Stops when the human has to choose.
pub fn play(
    net: &Net,
    fuel: usize,
    human: usize,
    moves: &[Action],
    auto_forced: bool,
) -> Result<Play, EngineError> {
    let names = net.members().iter().map(|d| d.name.clone()).collect();
    let player = Human {
        member: human,
        moves: moves.to_vec(),
        auto_forced,
    };
    let mut machine = Machine::new(names, net.library(), fuel, Some(player));
    let result = machine.run(starts(net.members()), net.principal());
    let state = match result {
        Ok(root) => PlayState::Finished {
            verdict: Verdict::Converged {
                residual: Design::new("residual", net.visible_base(), root),
            },
        },
        Err(Stop::Diverged(reason)) => PlayState::Finished {
            verdict: Verdict::Diverged { reason },
        },
        Err(Stop::OutOfFuel) => PlayState::Finished {
            verdict: Verdict::OutOfFuel {
                steps: machine.used,
            },
        },
        Err(Stop::Await(legal)) => PlayState::Awaiting { legal },
        Err(Stop::Error(e)) => return Err(e),
    };
    Ok(Play {
        steps: machine.trace,
        state,
        played: machine.played,
        fuel_used: machine.used,
    })
}

/// The dispute history of a net, ending with its verdict.
pub fn dispute_trace(net: &Net, fuel: usize) -> Result<Trace, EngineError> {
    normalize(net, fuel)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orthogonality {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Orthogonality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orthogonality::Yes => "yes",
            Orthogonality::No => "no",
            Orthogonality::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrthError {
    #[error("bases {0} and {1} are not dual")]
    NotDual(crate::locus::Fork, crate::locus::Fork),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// The trace of the closed net made of `d` on `⊢ ξ` and `e` on `ξ ⊢` (in either order).
pub fn closed_pair_trace(
    d: &Design,
    e: &Design,
    lib: &Library,
    fuel: usize,
) -> Result<Trace, OrthError> {
    let (pos, neg) = if d.base.is_positive() { (d, e) } else { (e, d) };
    let dual = pos.base.handle.is_none()
        && pos.base.tines.len() == 1
        && neg.base.tines.is_empty()
        && neg.base.handle.as_ref() == pos.base.tines.iter().next();
    if !dual {
        return Err(OrthError::NotDual(d.base.clone(), e.base.clone()));
    }
    let mut names = vec![pos.name.clone(), neg.name.clone()];
    if names[0] == names[1] {
        names[1].push('\'');
    }
    let mut machine = Machine::new(names, lib, fuel, None);
    let starts = vec![
        Start {
            root: &pos.root,
            handle: None,
            tines: pos.base.tines.clone(),
        },
        Start {
            root: &neg.root,
            handle: neg.base.handle.clone(),
            tines: BTreeSet::new(),
        },
    ];
    let result = machine.run(starts, 0);
    Ok(finish(machine, result, crate::locus::Fork::default())?)
}

/// Yes when the closed net converges, no when it diverges, unknown when fuel runs out.
pub fn orthogonal(
    d: &Design,
    e: &Design,
    lib: &Library,
    fuel: usize,
) -> Result<Orthogonality, OrthError> {
    let trace = closed_pair_trace(d, e, lib, fuel)?;
    Ok(match trace.verdict {
        Verdict::Converged { .. } => Orthogonality::Yes,
        Verdict::Diverged { .. } => Orthogonality::No,
        Verdict::OutOfFuel { .. } => Orthogonality::Unknown,
    })
}
