//! Addresses: biases, loci, ramifications and forks.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A bias is a natural number labelling one branch of an address.
pub type Bias = u32;

/// A finite sequence of biases. The empty locus is written `<>`.
/// Serialized as its written form, `"0.3.5"` or `"<>"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Locus(Vec<Bias>);

impl Locus {
    pub fn root() -> Self {
        Locus(Vec::new())
    }

    pub fn new(path: impl Into<Vec<Bias>>) -> Self {
        Locus(path.into())
    }

    pub fn path(&self) -> &[Bias] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `true` when the length is odd.
    pub fn is_odd(&self) -> bool {
        self.0.len() % 2 == 1
    }

    /// The sub-address `self ⋆ i`.
    pub fn child(&self, i: Bias) -> Locus {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.extend_from_slice(&self.0);
        path.push(i);
        Locus(path)
    }

    /// Extends by a whole suffix.
    pub fn join(&self, suffix: &[Bias]) -> Locus {
        let mut path = self.0.clone();
        path.extend_from_slice(suffix);
        Locus(path)
    }

    /// Prefix order: `self ≤ other` when `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &Locus) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Locus) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// Two loci are comparable when one is a prefix of the other.
    pub fn comparable(&self, other: &Locus) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The part of `self` after `prefix`, if `prefix ≤ self`.
    pub fn strip_prefix(&self, prefix: &Locus) -> Option<&[Bias]> {
        self.0.strip_prefix(prefix.0.as_slice())
    }

    /// Rewrites a leading `from` into `to`; loci outside `from` are returned unchanged.
    pub fn rebase(&self, from: &Locus, to: &Locus) -> Locus {
        match self.strip_prefix(from) {
            Some(rest) => to.join(rest),
            None => self.clone(),
        }
    }
}

impl From<Vec<Bias>> for Locus {
    fn from(path: Vec<Bias>) -> Self {
        Locus(path)
    }
}

impl std::str::FromStr for Locus {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "<>" {
            return Ok(Locus::root());
        }
        s.split('.')
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map(Locus)
    }
}

impl Serialize for Locus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Locus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse()
            .map_err(|_| serde::de::Error::custom(format!("bad locus `{text}`")))
    }
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("<>");
        }
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Locus({self})")
    }
}

/// A finite set of biases.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ramification(BTreeSet<Bias>);

impl Ramification {
    pub fn empty() -> Self {
        Ramification(BTreeSet::new())
    }

    pub fn biases(&self) -> impl Iterator<Item = Bias> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: Bias) -> bool {
        self.0.contains(&i)
    }

    pub fn is_disjoint(&self, other: &Ramification) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &Ramification) -> Ramification {
        Ramification(self.0.union(&other.0).copied().collect())
    }

    /// The sub-addresses `focus ⋆ i` for every `i` in the ramification.
    pub fn sub_loci<'a>(&'a self, focus: &'a Locus) -> impl Iterator<Item = Locus> + 'a {
        self.0.iter().map(move |&i| focus.child(i))
    }

    /// All ramifications over `0..max_bias` with at most `max_size` elements,
    /// in ascending order.
    pub fn all_bounded(max_bias: Bias, max_size: usize) -> Vec<Ramification> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn go(
            next: Bias,
            max_bias: Bias,
            max_size: usize,
            current: &mut Vec<Bias>,
            out: &mut Vec<Ramification>,
        ) {
            out.push(current.iter().copied().collect());
            if current.len() == max_size {
                return;
            }
            for b in next..max_bias {
                current.push(b);
                go(b + 1, max_bias, max_size, current, out);
                current.pop();
            }
        }
        go(0, max_bias, max_size, &mut current, &mut out);
        out.sort();
        out
    }
}

impl FromIterator<Bias> for Ramification {
    fn from_iter<T: IntoIterator<Item = Bias>>(iter: T) -> Self {
        Ramification(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[Bias; N]> for Ramification {
    fn from(biases: [Bias; N]) -> Self {
        biases.into_iter().collect()
    }
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, b) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `Γ ⊢ Θ`: at most one negative locus (the handle) and a set of positive tines.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug, Serialize, Deserialize)]
pub struct Fork {
    pub handle: Option<Locus>,
    pub tines: BTreeSet<Locus>,
}

impl Fork {
    pub fn positive(tines: impl IntoIterator<Item = Locus>) -> Self {
        Fork {
            handle: None,
            tines: tines.into_iter().collect(),
        }
    }

    pub fn negative(handle: Locus, tines: impl IntoIterator<Item = Locus>) -> Self {
        Fork {
            handle: Some(handle),
            tines: tines.into_iter().collect(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.handle.is_none()
    }

    /// Handle first, then tines.
    pub fn loci(&self) -> impl Iterator<Item = &Locus> {
        self.handle.iter().chain(self.tines.iter())
    }

    /// Pairs of loci violating prefix-freedom.
    pub fn prefix_clashes(&self) -> Vec<(Locus, Locus)> {
        let all: Vec<&Locus> = self.loci().collect();
        let mut clashes = Vec::new();
        for (a, x) in all.iter().enumerate() {
            for y in &all[a + 1..] {
                if x.comparable(y) {
                    clashes.push(((*x).clone(), (*y).clone()));
                }
            }
        }
        clashes
    }
}

impl fmt::Display for Fork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.handle {
            write!(f, "{h} ")?;
        }
        f.write_str("|-")?;
        for (k, t) in self.tines.iter().enumerate() {
            f.write_str(if k == 0 { " " } else { ", " })?;
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extend_flips_parity() {
        let xi = Locus::new(vec![0]);
        assert_eq!(Locus::root().child(0), xi);
        assert_eq!(xi.child(3), Locus::new(vec![0, 3]));
        assert_ne!(xi.is_odd(), xi.child(3).is_odd());
    }

    #[test]
    fn prefix_order() {
        let a = Locus::new(vec![0, 1]);
        let b = Locus::new(vec![0, 1, 1]);
        assert!(a.is_prefix_of(&b));
        assert!(a.is_proper_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(a.is_prefix_of(&a));
        assert_eq!(b.rebase(&a, &Locus::new(vec![7])), Locus::new(vec![7, 1]));
    }

    #[test]
    fn bounded_ramifications_are_sorted() {
        let rams = Ramification::all_bounded(3, 2);
        assert_eq!(rams.len(), 7);
        assert!(rams.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Ramification::all_bounded(5, 0), vec![Ramification::empty()]);
    }

    #[test]
    fn fork_clashes() {
        let f = Fork::negative(Locus::new(vec![0]), [Locus::new(vec![0, 1])]);
        assert_eq!(f.prefix_clashes().len(), 1);
        let g = Fork::positive([Locus::new(vec![0]), Locus::new(vec![1])]);
        assert!(g.prefix_clashes().is_empty());
    }
}
