//! Bottom-up pass: relabel the hidden leaves, then top up every affected
//! ancestor so that its original majority:minority ratio is not undercut.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{Class, Dataset};
use crate::hiding::ratio::{required_additions, RatioTarget};
use crate::induction::{DecisionTree, LeafRef, NodeCounts, NodePath};
use crate::{Error, Result};

/// Relabelings and additions recorded at one node. `(+5n, −5p)` is
/// `relabeled_p_to_n = 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassDelta {
    pub relabeled_p_to_n: u64,
    pub relabeled_n_to_p: u64,
    pub added_p: u64,
    pub added_n: u64,
}

impl ClassDelta {
    pub fn relabel(from: Class, count: u64) -> Self {
        match from {
            Class::P => Self {
                relabeled_p_to_n: count,
                ..Self::default()
            },
            Class::N => Self {
                relabeled_n_to_p: count,
                ..Self::default()
            },
        }
    }

    pub fn added(&self) -> u64 {
        self.added_p + self.added_n
    }

    pub fn add(&mut self, class: Class, count: u64) {
        match class {
            Class::P => self.added_p += count,
            Class::N => self.added_n += count,
        }
    }

    /// Apply to a node's counts.
    pub fn apply(&self, c: NodeCounts) -> NodeCounts {
        NodeCounts::new(
            c.p + self.relabeled_n_to_p + self.added_p - self.relabeled_p_to_n,
            c.n + self.relabeled_p_to_n + self.added_n - self.relabeled_n_to_p,
        )
    }
}

/// A synthetic instance whose class and root-path values are decided but
/// whose other attributes are not yet set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingInstance {
    pub label: Class,
    pub fixed: BTreeMap<usize, bool>,
    pub free: BTreeSet<usize>,
}

impl PendingInstance {
    /// Constrained to the branch decisions leading to `path`.
    pub fn at(path: &NodePath, label: Class, arity: usize) -> Self {
        let fixed: BTreeMap<usize, bool> = path.steps().iter().copied().collect();
        let free = (0..arity).filter(|a| !fixed.contains_key(a)).collect();
        Self { label, fixed, free }
    }

    pub fn fix(&mut self, attribute: usize, value: bool) {
        self.free.remove(&attribute);
        self.fixed.insert(attribute, value);
    }
}

/// A leaf whose instances were relabeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenLeaf {
    pub path: NodePath,
    pub original: Class,
    pub target: Class,
}

#[derive(Debug, Clone, Default)]
pub struct BottomUp {
    pub pending: Vec<PendingInstance>,
    pub deltas: BTreeMap<NodePath, ClassDelta>,
    pub hidden: Vec<HiddenLeaf>,
    /// Counts of each visited ancestor after the pass, with its floor.
    pub floors: BTreeMap<NodePath, (NodeCounts, Option<RatioTarget>)>,
    pub warnings: Vec<String>,
}

/// Class a hidden leaf's instances are moved to: the sibling's label when the
/// sibling is a leaf, the parent's majority otherwise. When that class is the
/// leaf's own label (both children of a noisy split can share a majority) the
/// opposite class is used instead.
pub fn swap_target(tree: &DecisionTree, leaf: &LeafRef) -> Result<Class> {
    let schema = tree.schema();
    let parent = leaf
        .ancestors
        .first()
        .ok_or_else(|| Error::NothingToHide(leaf.path.render(schema), "the tree is a single leaf".into()))?;
    let &(_, value) = leaf.path.steps().last().expect("non-root leaf has a path");
    let sibling = tree
        .node_at(&parent.path)
        .and_then(|node| node.child(!value))
        .ok_or_else(|| Error::LeafNotFound(leaf.path.render(schema)))?;
    let target = sibling.label().unwrap_or_else(|| parent.counts.majority());
    Ok(if target == leaf.label {
        leaf.label.opposite()
    } else {
        target
    })
}

/// Relabels every instance of `leaf` carrying the leaf's label to the
/// [`swap_target`] class.
pub fn swap_leaf(ds: &mut Dataset, tree: &DecisionTree, leaf: &LeafRef) -> Result<ClassDelta> {
    if leaf.counts.total() == 0 {
        return Err(Error::NothingToHide(
            leaf.path.render(tree.schema()),
            "leaf holds no instances".into(),
        ));
    }
    let target = swap_target(tree, leaf)?;
    let mut moved = 0;
    for inst in ds.instances_mut() {
        if inst.label == leaf.label && leaf.path.admits(inst) {
            inst.label = target;
            moved += 1;
        }
    }
    Ok(ClassDelta::relabel(leaf.label, moved))
}

fn counts_at(ds: &Dataset, pending: &[(NodePath, Class)], path: &NodePath) -> NodeCounts {
    let mut c = NodeCounts::of(ds.instances().iter().filter(|i| path.admits(i)));
    for (at, class) in pending {
        if path.is_prefix_of(at) {
            c.add(*class, 1);
        }
    }
    c
}

/// Swaps every requested leaf, then visits each of their ancestors once,
/// deepest first. At every ancestor the relabelings and additions arriving
/// from below are accumulated and the node is topped up to its original
/// ratio. The new instances are fixed to the node's root path and travel
/// upward with the rest of the delta.
pub fn swap_and_add(ds: &mut Dataset, tree: &DecisionTree, leaves: &[LeafRef]) -> Result<BottomUp> {
    let schema = tree.schema();
    let mut seen = HashSet::new();
    for leaf in leaves {
        if !seen.insert(&leaf.path) {
            return Err(Error::DuplicateRequest(leaf.path.render(schema)));
        }
    }

    let mut out = BottomUp::default();
    for leaf in leaves {
        let target = swap_target(tree, leaf)?;
        let delta = swap_leaf(ds, tree, leaf)?;
        out.deltas.insert(leaf.path.clone(), delta);
        out.hidden.push(HiddenLeaf {
            path: leaf.path.clone(),
            original: leaf.label,
            target,
        });
    }

    let mut ancestors: BTreeMap<NodePath, NodeCounts> = BTreeMap::new();
    for leaf in leaves {
        for a in &leaf.ancestors {
            ancestors.insert(a.path.clone(), a.counts);
        }
    }
    let mut order: Vec<(&NodePath, &NodeCounts)> = ancestors.iter().collect();
    order.sort_by(|a, b| b.0.depth().cmp(&a.0.depth()).then_with(|| a.0.cmp(b.0)));

    let mut added: Vec<(NodePath, Class)> = Vec::new();
    for (path, original) in order {
        let current = counts_at(ds, &added, path);
        let floor = RatioTarget::of(*original);
        let mut delta = ClassDelta::default();
        match floor {
            Some(target) => {
                let add = required_additions(current, target);
                if let Some(w) = add.warning {
                    out.warnings.push(format!("{}: {w}", path.render(schema)));
                }
                delta.add(add.class, add.count);
                for _ in 0..add.count {
                    added.push((path.clone(), add.class));
                    out.pending.push(PendingInstance::at(path, add.class, schema.len()));
                }
            }
            None if !current.is_pure() => out
                .warnings
                .push(format!("{}: originally pure node lost its purity", path.render(schema))),
            None => {}
        }
        out.floors.insert(
            path.clone(),
            (
                current.with(Class::P, delta.added_p).with(Class::N, delta.added_n),
                floor,
            ),
        );
        out.deltas.entry(path.clone()).or_default().add(Class::P, delta.added_p);
        out.deltas.entry(path.clone()).or_default().add(Class::N, delta.added_n);
    }
    Ok(out)
}
