//! Oracles shared by the integration tests. They are written against the
//! plain data types only and do not call into the engine.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ludics::{Locus, Node};

/// Every locus that some action of `node` focuses on.
fn foci(node: &Node, out: &mut Vec<Locus>) {
    match node {
        Node::Positive {
            focus, premises, ..
        } => {
            out.push(focus.clone());
            for p in premises.values() {
                foci(p, out);
            }
        }
        Node::Negative { focus, directory } => {
            out.push(focus.clone());
            for c in directory.values() {
                foci(c, out);
            }
        }
        _ => {}
    }
}

fn mentions(node: &Node, ctx: &BTreeSet<Locus>) -> BTreeSet<Locus> {
    let mut fs = Vec::new();
    foci(node, &mut fs);
    ctx.iter()
        .filter(|t| {
            fs.iter()
                .any(|f| f.len() >= t.len() && f.path()[..t.len()] == *t.path())
        })
        .cloned()
        .collect()
}

fn child(l: &Locus, i: u32) -> Locus {
    let mut p = l.path().to_vec();
    p.push(i);
    Locus::new(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Converges,
    Diverges,
}

/// A negative subtree waiting at its focus, with the loci its owner may
/// later act on.
struct Waiting<'a> {
    node: &'a Node,
    ctx: BTreeSet<Locus>,
}

/// Orthogonality of a finite positive design on `⊢ ξ` and a finite negative
/// design on `ξ ⊢`, by direct recursion on the two trees.
pub fn orthogonal_oracle(pos: &Node, neg: &Node, xi: &Locus) -> Outcome {
    let mut waiting: BTreeMap<Locus, Waiting> = BTreeMap::new();
    waiting.insert(
        xi.clone(),
        Waiting {
            node: neg,
            ctx: BTreeSet::new(),
        },
    );
    let ctx: BTreeSet<Locus> = [xi.clone()].into_iter().collect();
    step(pos, ctx, &mut waiting)
}

fn erase(l: &Locus, waiting: &mut BTreeMap<Locus, Waiting>) -> bool {
    let Some(w) = waiting.remove(l) else {
        return true;
    };
    match w.node {
        Node::Negative { directory, .. } if directory.is_empty() => {
            w.ctx.iter().all(|t| erase(t, waiting))
        }
        _ => false,
    }
}

fn step<'a>(
    player: &'a Node,
    ctx: BTreeSet<Locus>,
    waiting: &mut BTreeMap<Locus, Waiting<'a>>,
) -> Outcome {
    match player {
        Node::Daimon => Outcome::Converges,
        Node::Positive {
            focus,
            ramification,
            premises,
        } => {
            let Some(partner) = waiting.remove(focus) else {
                return Outcome::Diverges;
            };
            let Node::Negative { directory, .. } = partner.node else {
                return Outcome::Diverges;
            };
            let Some(answer) = directory.get(ramification) else {
                return Outcome::Diverges;
            };
            let rest: BTreeSet<Locus> = ctx.iter().filter(|l| *l != focus).cloned().collect();
            let mut handed = BTreeSet::new();
            for (i, p) in premises {
                let used = mentions(p, &rest);
                handed.extend(used.iter().cloned());
                waiting.insert(child(focus, *i), Waiting { node: p, ctx: used });
            }
            for dropped in rest.difference(&handed) {
                if !erase(dropped, waiting) {
                    return Outcome::Diverges;
                }
            }
            let mut next = partner.ctx.clone();
            next.extend(ramification.biases().map(|i| child(focus, i)));
            step(answer, next, waiting)
        }
        _ => Outcome::Diverges,
    }
}

/// Number of designs on a base with `handle` (0 or 1) and `tines` context
/// loci, for the given bounds, computed in closed form.
pub struct Counter {
    rams: Vec<usize>,
    binom: Vec<Vec<u128>>,
}

impl Counter {
    /// Ramification sizes are recomputed by hand (`C(max_bias, m)` sets of
    /// each size `m`) so the count does not rest on the engine's list.
    pub fn new(max_bias: usize, max_ram: usize) -> Self {
        let mut rams = Vec::new();
        for m in 0..=max_ram.min(max_bias) {
            let mut c = 1usize;
            for k in 0..m {
                c = c * (max_bias - k) / (k + 1);
            }
            rams.extend(std::iter::repeat_n(m, c));
        }
        let n = 64;
        let mut binom = vec![vec![0u128; n]; n];
        for a in 0..n {
            binom[a][0] = 1;
            for b in 1..=a {
                binom[a][b] = binom[a - 1][b - 1] + binom[a - 1][b];
            }
        }
        Counter { rams, binom }
    }

    /// `None` when the count does not fit in 128 bits.
    pub fn positive(&self, k: usize, d: usize) -> Option<u128> {
        let mut total: u128 = 1;
        for &m in &self.rams {
            if d == 0 {
                if m == 0 {
                    total = total.checked_add(k as u128)?;
                }
            } else if k > 0 {
                let t = self.tuples(k - 1, m, d - 1)?;
                total = total.checked_add((k as u128).checked_mul(t)?)?;
            }
        }
        Some(total)
    }

    pub fn negative(&self, k: usize, d: usize) -> Option<u128> {
        if d == 0 {
            return Some(1);
        }
        self.rams.iter().try_fold(1u128, |acc, &m| {
            acc.checked_mul(self.positive(k + m, d - 1)?.checked_add(1)?)
        })
    }

    /// Negative designs on `j` context loci that mention all of them.
    fn negative_exact(&self, j: usize, d: usize) -> Option<i128> {
        let mut sum: i128 = 0;
        for i in 0..=j {
            let term = i128::try_from(self.binom[j][i].checked_mul(self.negative(i, d)?)?).ok()?;
            sum = if (j - i).is_multiple_of(2) {
                sum.checked_add(term)?
            } else {
                sum.checked_sub(term)?
            };
        }
        Some(sum)
    }

    /// `m` negative premises sharing `n` context loci without overlap.
    fn tuples(&self, n: usize, m: usize, d: usize) -> Option<u128> {
        let exact: Vec<i128> = (0..=n)
            .map(|j| self.negative_exact(j, d))
            .collect::<Option<_>>()?;
        // ways[u]: premises placed so far, u loci handed out.
        let mut ways = vec![0i128; n + 1];
        ways[0] = 1;
        for _ in 0..m {
            let mut next = vec![0i128; n + 1];
            for u in 0..=n {
                if ways[u] == 0 {
                    continue;
                }
                for j in 0..=(n - u) {
                    let add = ways[u]
                        .checked_mul(self.binom[n - u][j] as i128)?
                        .checked_mul(exact[j])?;
                    next[u + j] = next[u + j].checked_add(add)?;
                }
            }
            ways = next;
        }
        u128::try_from(ways.iter().try_fold(0i128, |a, w| a.checked_add(*w))?).ok()
    }
}
