//! Top-down pass: decide the unset attribute values of the instances added
//! by [`swap_and_add`](super::swap_and_add) so that the split attributes
//! already in the tree keep their places.
//!
//! At a node splitting on `A`, `k` pending instances of one class are shared
//! between the branches; `i` of them get `A = true` (left). The gain of `A`
//! as a function of `i`,
//!
//! ```text
//! G(i) = E(p+k, n) − [ (p₁+i+n₁)·E(p₁+i, n₁) + (p₂+k−i+n₂)·E(p₂+k−i, n₂) ] / (p+k+n)
//! ```
//!
//! has `G″(i) = [n₁/(x(x+n₁)) + n₂/(y(y+n₂))] / ((p+k+n)·ln 2) > 0` with
//! `x = p₁+i`, `y = p₂+k−i`, so it is convex on `[0, k]` and peaks at a
//! corner. Hold-back starts at the better corner and walks toward the other
//! one until the gain no longer exceeds the gain of the parent's split.

use std::collections::BTreeMap;

use crate::dataset::{Class, Dataset, Instance};
use crate::hiding::swap::{HiddenLeaf, PendingInstance};
use crate::hiding::Strategy;
use crate::induction::{info_gain, DecisionTree, NodeCounts, NodePath, TreeNode, COMPARE_EPSILON};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// `k` pending instances of class `label` to share between two branches
/// whose counts, before the share, are `left` and `right`. Only shares in
/// `min_left..=max_left` are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocationProblem {
    pub left: NodeCounts,
    pub right: NodeCounts,
    pub k: u64,
    pub label: Class,
    pub min_left: u64,
    pub max_left: u64,
}

impl AllocationProblem {
    pub fn new(left: NodeCounts, right: NodeCounts, k: u64, label: Class) -> Self {
        Self {
            left,
            right,
            k,
            label,
            min_left: 0,
            max_left: k,
        }
    }

    pub fn restricted(mut self, min_left: u64, max_left: u64) -> Self {
        assert!(min_left <= max_left && max_left <= self.k, "bad allocation range");
        self.min_left = min_left;
        self.max_left = max_left;
        self
    }

    /// Parent counts once all `k` instances have arrived.
    pub fn parent(&self) -> NodeCounts {
        (self.left + self.right).with(self.label, self.k)
    }

    /// Gain of the node's split with `i` instances sent left.
    pub fn gain(&self, i: u64) -> f64 {
        debug_assert!(i <= self.k);
        info_gain(
            self.parent(),
            self.left.with(self.label, i),
            self.right.with(self.label, self.k - i),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub side: Side,
    /// Instances sent left at this corner.
    pub i: u64,
    pub gain: f64,
}

/// The better of "everything left" and "everything right" (within the
/// allowed range); left wins ties.
pub fn corner_allocation(prob: &AllocationProblem) -> Corner {
    let left = prob.gain(prob.max_left);
    let right = prob.gain(prob.min_left);
    if right > left + COMPARE_EPSILON {
        Corner {
            side: Side::Right,
            i: prob.min_left,
            gain: right,
        }
    } else {
        Corner {
            side: Side::Left,
            i: prob.max_left,
            gain: left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Walk {
    pub i: u64,
    pub gain: f64,
    /// The walk bottomed out above `parent_gain`.
    pub infeasible: bool,
}

/// Moves one instance at a time from the corner toward the other branch
/// while the gain keeps falling, stopping at the first share whose gain does
/// not exceed `parent_gain`. If the gain stops falling first, the walk ends
/// at the minimum and reports it as infeasible.
pub fn slope_walk(prob: &AllocationProblem, corner: &Corner, parent_gain: f64) -> Walk {
    let mut i = corner.i;
    let mut gain = corner.gain;
    loop {
        if gain <= parent_gain + COMPARE_EPSILON {
            return Walk {
                i,
                gain,
                infeasible: false,
            };
        }
        let next = match corner.side {
            Side::Left if i > prob.min_left => i - 1,
            Side::Right if i < prob.max_left => i + 1,
            _ => i,
        };
        let next_gain = prob.gain(next);
        if next == i || next_gain >= gain {
            return Walk {
                i,
                gain,
                infeasible: true,
            };
        }
        i = next;
        gain = next_gain;
    }
}

fn even_share(prob: &AllocationProblem) -> u64 {
    prob.k.div_ceil(2).clamp(prob.min_left, prob.max_left)
}

#[derive(Debug, Clone, Default)]
pub struct Allocation {
    pub instances: Vec<Instance>,
    pub warnings: Vec<String>,
}

/// Where a pending instance enters the top-down pass: follow its fixed
/// values from the root until a node splits on a free attribute, or a leaf.
fn insertion_point(tree: &DecisionTree, pending: &PendingInstance) -> Result<NodePath> {
    let mut node = tree.root();
    let mut path = NodePath::root();
    while let TreeNode::Internal { attribute, .. } = node {
        match pending.fixed.get(attribute) {
            Some(&value) => {
                path = path.child(*attribute, value);
                node = node.child(value).expect("internal node has children");
            }
            None => {
                if pending.fixed.keys().any(|a| !path.steps().iter().any(|(s, _)| s == a)) {
                    return Err(Error::ContradictoryPath(path.render(tree.schema())));
                }
                break;
            }
        }
    }
    Ok(path)
}

struct TopDown<'a> {
    tree: &'a DecisionTree,
    base: &'a Dataset,
    strategy: Strategy,
    /// Pending instances (index) entering at each node.
    entering: BTreeMap<NodePath, Vec<usize>>,
    /// Paths at which every pending instance enters.
    entry_paths: Vec<NodePath>,
    pending: Vec<PendingInstance>,
    guards: &'a [HiddenLeaf],
    warnings: Vec<String>,
}

impl TopDown<'_> {
    /// Counts at `path` from the relabeled data and the pending instances
    /// that enter at or below it.
    fn base_counts(&self, path: &NodePath) -> NodeCounts {
        let mut c = NodeCounts::of(self.base.instances().iter().filter(|i| path.admits(i)));
        for (idx, at) in self.entry_paths.iter().enumerate() {
            if path.is_prefix_of(at) {
                c.add(self.pending[idx].label, 1);
            }
        }
        c
    }

    /// Range of left shares that keep instances of `class` out of a hidden
    /// leaf that originally carried that class.
    fn allowed(&self, path: &NodePath, attribute: usize, class: Class, k: u64) -> (u64, u64) {
        let blocked = |value: bool| {
            let child = path.child(attribute, value);
            self.guards.iter().any(|g| g.path == child && g.original == class)
        };
        match (blocked(true), blocked(false)) {
            (true, false) => (0, 0),
            (false, true) => (k, k),
            _ => (0, k),
        }
    }

    fn visit(&mut self, node: &TreeNode, path: NodePath, mut batch: Vec<usize>, parent_gain: Option<f64>) {
        if let Some(entering) = self.entering.get(&path) {
            batch.extend(entering);
        }
        let TreeNode::Internal {
            attribute, left, right, ..
        } = node
        else {
            return;
        };
        let attribute = *attribute;
        let left_path = path.child(attribute, true);
        let right_path = path.child(attribute, false);
        let mut left_counts = self.base_counts(&left_path);
        let mut right_counts = self.base_counts(&right_path);
        let mut left_batch = Vec::new();
        let mut right_batch = Vec::new();

        // negatives first, each class seeing the other's allocation
        for class in [Class::N, Class::P] {
            let members: Vec<usize> = batch
                .iter()
                .copied()
                .filter(|&i| self.pending[i].label == class)
                .collect();
            if members.is_empty() {
                continue;
            }
            let k = members.len() as u64;
            let (lo, hi) = self.allowed(&path, attribute, class, k);
            let prob = AllocationProblem::new(left_counts, right_counts, k, class).restricted(lo, hi);
            let share = match self.strategy {
                Strategy::EvenSplit => even_share(&prob),
                Strategy::HoldBack => {
                    let corner = corner_allocation(&prob);
                    match parent_gain {
                        None => corner.i,
                        Some(pg) => {
                            let walk = slope_walk(&prob, &corner, pg);
                            if walk.infeasible {
                                self.warnings.push(format!(
                                    "{}: gain of {} stays at {:.6} above the parent's {:.6} for {k}{class}",
                                    path.render(self.tree.schema()),
                                    self.tree.schema().name(attribute),
                                    walk.gain,
                                    pg
                                ));
                            }
                            walk.i
                        }
                    }
                }
            };
            for (pos, &idx) in members.iter().enumerate() {
                let goes_left = (pos as u64) < share;
                self.pending[idx].fix(attribute, goes_left);
                if goes_left {
                    left_batch.push(idx);
                } else {
                    right_batch.push(idx);
                }
            }
            left_counts.add(class, share);
            right_counts.add(class, k - share);
        }

        let gain_here = info_gain(left_counts + right_counts, left_counts, right_counts);
        self.visit(left, left_path, left_batch, Some(gain_here));
        self.visit(right, right_path, right_batch, Some(gain_here));
    }
}

/// Fully specifies `pending` top-down over `tree`. `base` is the dataset
/// after relabeling; `guards` are the hidden leaves, which never receive
/// instances of the class they originally carried. Attributes the walk never
/// reaches are filled from a [`SplitMix64`] stream seeded with `seed`, in
/// pending order and attribute order.
pub fn allocate_and_set(
    base: &Dataset,
    tree: &DecisionTree,
    pending: &[PendingInstance],
    guards: &[HiddenLeaf],
    strategy: Strategy,
    seed: u64,
) -> Result<Allocation> {
    let mut entering: BTreeMap<NodePath, Vec<usize>> = BTreeMap::new();
    let mut entry_paths = Vec::with_capacity(pending.len());
    for (idx, p) in pending.iter().enumerate() {
        let at = insertion_point(tree, p)?;
        entering.entry(at.clone()).or_default().push(idx);
        entry_paths.push(at);
    }
    let mut pass = TopDown {
        tree,
        base,
        strategy,
        entering,
        entry_paths,
        pending: pending.to_vec(),
        guards,
        warnings: Vec::new(),
    };
    pass.visit(tree.root(), NodePath::root(), Vec::new(), None);

    let arity = tree.schema().len();
    let mut rng = SplitMix64::new(seed);
    let instances = pass
        .pending
        .iter()
        .map(|p| {
            let values = (0..arity)
                .map(|a| p.fixed.get(&a).copied().unwrap_or_else(|| rng.next_bool()))
                .collect();
            Instance::synthetic(values, p.label)
        })
        .collect();
    Ok(Allocation {
        instances,
        warnings: pass.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nc(p: u64, n: u64) -> NodeCounts {
        NodeCounts::new(p, n)
    }

    #[test]
    fn single_instance_corner() {
        let prob = AllocationProblem::new(nc(3, 1), nc(1, 3), 1, Class::P);
        let c = corner_allocation(&prob);
        let best = prob.gain(0).max(prob.gain(1));
        assert_eq!(c.gain, best);
        assert_eq!(c.side, Side::Left);
        assert_eq!(c.i, 1);
    }

    #[test]
    fn symmetric_children_tie_left() {
        let prob = AllocationProblem::new(nc(2, 3), nc(2, 3), 6, Class::N);
        assert!((prob.gain(0) - prob.gain(6)).abs() < 1e-12);
        assert_eq!(corner_allocation(&prob).side, Side::Left);
    }

    #[test]
    fn corner_already_low_enough() {
        let prob = AllocationProblem::new(nc(5, 1), nc(1, 5), 4, Class::P);
        let corner = corner_allocation(&prob);
        let walk = slope_walk(&prob, &corner, corner.gain + 0.1);
        assert_eq!(walk.i, corner.i);
        assert!(!walk.infeasible);
    }

    #[test]
    fn walk_bottoms_out_with_warning() {
        let prob = AllocationProblem::new(nc(8, 1), nc(1, 8), 10, Class::P);
        let corner = corner_allocation(&prob);
        let walk = slope_walk(&prob, &corner, -1.0);
        assert!(walk.infeasible);
        let min = (0..=10).map(|i| prob.gain(i)).fold(f64::INFINITY, f64::min);
        assert!((walk.gain - min).abs() < 1e-12);
    }

    #[test]
    fn even_share_rounds_left() {
        let prob = AllocationProblem::new(nc(1, 1), nc(1, 1), 5, Class::P);
        assert_eq!(even_share(&prob), 3);
        assert_eq!(even_share(&prob.restricted(0, 0)), 0);
    }

    #[test]
    fn restricted_corners() {
        let prob = AllocationProblem::new(nc(3, 1), nc(1, 3), 4, Class::P).restricted(4, 4);
        let c = corner_allocation(&prob);
        assert_eq!(c.i, 4);
        assert_eq!(slope_walk(&prob, &c, -1.0).i, 4);
    }
}
