use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::design::{Design, Library};
use crate::locus::{Fork, Locus};
use crate::validate::{validate_design, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("a net needs at least one design")]
    Empty,
    #[error("two members are named `{0}`")]
    DuplicateMember(String),
    #[error("cut {0} must be a tine of exactly one member and the handle of exactly one other")]
    BadCut(Locus),
    #[error("cuts {0} and {1} overlap")]
    OverlappingCuts(Locus, Locus),
    #[error("base loci {0} and {1} clash across members")]
    BaseClash(Locus, Locus),
    #[error("more than one member can start: {0:?}")]
    SeveralPrincipals(Vec<String>),
    #[error("no member can start the interaction")]
    NoPrincipal,
    #[error("member `{0}` is not connected to the rest of the net")]
    Disconnected(String),
    #[error("member `{name}` is invalid:\n{report}")]
    Invalid { name: String, report: Report },
    #[error("unknown member `{0}`")]
    UnknownMember(String),
}

/// Designs connected by cut loci.
#[derive(Clone, Debug)]
pub struct Net {
    members: Vec<Design>,
    cuts: BTreeSet<Locus>,
    principal: usize,
    library: Library,
}

impl Net {
    pub fn members(&self) -> &[Design] {
        &self.members
    }

    pub fn cuts(&self) -> &BTreeSet<Locus> {
        &self.cuts
    }

    pub fn library(&self) -> &Library {
        &self.library
    }

    /// Index of the member that acts first.
    pub fn principal(&self) -> usize {
        self.principal
    }

    pub fn member_index(&self, name: &str) -> Option<usize> {
        self.members.iter().position(|d| d.name == name)
    }

    pub fn is_closed(&self) -> bool {
        let v = self.visible_base();
        v.handle.is_none() && v.tines.is_empty()
    }

    /// The base loci that are not cut.
    pub fn visible_base(&self) -> Fork {
        visible_base(self.members.iter(), &self.cuts)
    }
}

pub(crate) fn visible_base<'d>(
    members: impl Iterator<Item = &'d Design>,
    cuts: &BTreeSet<Locus>,
) -> Fork {
    let mut fork = Fork::default();
    for d in members {
        if let Some(h) = &d.base.handle {
            if !cuts.contains(h) {
                fork.handle = Some(h.clone());
            }
        }
        fork.tines
            .extend(d.base.tines.iter().filter(|t| !cuts.contains(*t)).cloned());
    }
    fork
}

/// Checks the cut discipline and picks the starting member. Designs are
/// assumed valid; see [`make_checked_net`].
pub fn make_net(
    designs: Vec<Design>,
    cuts: BTreeSet<Locus>,
    library: &Library,
) -> Result<Net, NetError> {
    if designs.is_empty() {
        return Err(NetError::Empty);
    }
    let mut names = BTreeSet::new();
    for d in &designs {
        if !names.insert(d.name.clone()) {
            return Err(NetError::DuplicateMember(d.name.clone()));
        }
    }
    let cut_list: Vec<&Locus> = cuts.iter().collect();
    for (k, a) in cut_list.iter().enumerate() {
        for b in &cut_list[k + 1..] {
            if a.comparable(b) {
                return Err(NetError::OverlappingCuts((*a).clone(), (*b).clone()));
            }
        }
    }
    // Owner of each tine and of each handle.
    let mut tine_owner: BTreeMap<&Locus, Vec<usize>> = BTreeMap::new();
    let mut handle_owner: BTreeMap<&Locus, Vec<usize>> = BTreeMap::new();
    for (k, d) in designs.iter().enumerate() {
        for t in &d.base.tines {
            tine_owner.entry(t).or_default().push(k);
        }
        if let Some(h) = &d.base.handle {
            handle_owner.entry(h).or_default().push(k);
        }
    }
    for c in &cuts {
        let t = tine_owner.get(c).map(Vec::as_slice).unwrap_or(&[]);
        let h = handle_owner.get(c).map(Vec::as_slice).unwrap_or(&[]);
        if t.len() != 1 || h.len() != 1 || t[0] == h[0] {
            return Err(NetError::BadCut(c.clone()));
        }
    }
    // All base occurrences must be prefix-free, cut pairs aside.
    let mut occurrences: Vec<&Locus> = Vec::new();
    for d in &designs {
        occurrences.extend(d.base.loci());
    }
    for (k, a) in occurrences.iter().enumerate() {
        for b in &occurrences[k + 1..] {
            let same_cut = a == b && cuts.contains(*a);
            if !same_cut && a.comparable(b) {
                return Err(NetError::BaseClash((*a).clone(), (*b).clone()));
            }
        }
    }
    let positive: Vec<usize> = (0..designs.len())
        .filter(|&k| designs[k].base.is_positive())
        .collect();
    let visible_handles: Vec<usize> = (0..designs.len())
        .filter(|&k| matches!(&designs[k].base.handle, Some(h) if !cuts.contains(h)))
        .collect();
    let principal = match (positive.as_slice(), visible_handles.as_slice()) {
        ([p], []) => *p,
        ([], [h]) => *h,
        ([], []) => return Err(NetError::NoPrincipal),
        _ => {
            let mut starters: Vec<String> = positive
                .iter()
                .chain(visible_handles.iter())
                .map(|&k| designs[k].name.clone())
                .collect();
            starters.dedup();
            return Err(NetError::SeveralPrincipals(starters));
        }
    };
    // Every other member hangs below the principal through its handle.
    for (k, d) in designs.iter().enumerate() {
        let mut current = k;
        let mut seen = BTreeSet::new();
        while current != principal {
            if !seen.insert(current) {
                return Err(NetError::Disconnected(d.name.clone()));
            }
            let parent = designs[current]
                .base
                .handle
                .as_ref()
                .and_then(|h| tine_owner.get(h))
                .and_then(|v| v.first().copied());
            match parent {
                Some(p) => current = p,
                None => return Err(NetError::Disconnected(d.name.clone())),
            }
        }
    }
    Ok(Net {
        members: designs,
        cuts,
        principal,
        library: library.clone(),
    })
}

/// [`make_net`] after validating every member.
pub fn make_checked_net(
    designs: Vec<Design>,
    cuts: BTreeSet<Locus>,
    library: &Library,
) -> Result<Net, NetError> {
    for d in &designs {
        let report = validate_design(d, library);
        if !report.is_ok() {
            return Err(NetError::Invalid {
                name: d.name.clone(),
                report,
            });
        }
    }
    make_net(designs, cuts, library)
}
