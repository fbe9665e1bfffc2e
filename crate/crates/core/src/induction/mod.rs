//! ID3-style induction over boolean attributes with information gain.
//!
//! Splits are binary: an attribute value of `true` sends an instance to the
//! left child. Induction stops at pure nodes, when no unused attribute is
//! left, or when the best gain is not positive. Gain ties go to the lowest
//! attribute index and label ties go to `p`. There is no pruning.

mod json;
mod similarity;
mod tree;

pub use json::{NodeDoc, TreeDoc};
pub use similarity::similarity;
pub use tree::{classify, extract_rules, find_leaf, DecisionTree, LeafRef, NodePath, NodeRef, Rule, TreeNode};

use serde::{Deserialize, Serialize};

use crate::dataset::{Class, Dataset, Instance};
use crate::{Error, Result};

/// Absolute tolerance under which a gain is treated as zero, and within which
/// two gains count as tied, during induction.
pub const GAIN_EPSILON: f64 = 1e-12;

/// Tolerance used by the hiding engine when comparing gains against each
/// other. A difference inside the tolerance counts as "not lower".
pub const COMPARE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NodeCounts {
    pub p: u64,
    pub n: u64,
}

impl NodeCounts {
    pub const fn new(p: u64, n: u64) -> Self {
        Self { p, n }
    }

    pub fn total(self) -> u64 {
        self.p + self.n
    }

    pub fn get(self, class: Class) -> u64 {
        match class {
            Class::P => self.p,
            Class::N => self.n,
        }
    }

    pub fn add(&mut self, class: Class, k: u64) {
        match class {
            Class::P => self.p += k,
            Class::N => self.n += k,
        }
    }

    pub fn with(mut self, class: Class, k: u64) -> Self {
        self.add(class, k);
        self
    }

    /// Majority class, `p` on ties.
    pub fn majority(self) -> Class {
        if self.n > self.p {
            Class::N
        } else {
            Class::P
        }
    }

    pub fn is_pure(self) -> bool {
        self.p == 0 || self.n == 0
    }

    pub fn of<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> Self {
        let mut c = Self::default();
        for inst in instances {
            c.add(inst.label, 1);
        }
        c
    }
}

impl std::ops::Add for NodeCounts {
    type Output = NodeCounts;

    fn add(self, rhs: Self) -> Self {
        NodeCounts::new(self.p + rhs.p, self.n + rhs.n)
    }
}

fn plogp(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Binary entropy `-Σ pᵢ log₂ pᵢ` of a class distribution, 0 for pure or
/// empty nodes.
pub fn entropy(c: NodeCounts) -> f64 {
    entropy_real(c.p as f64, c.n as f64)
}

/// [`entropy`] over real-valued counts.
pub fn entropy_real(p: f64, n: f64) -> f64 {
    let total = p + n;
    if p <= 0.0 || n <= 0.0 {
        return 0.0;
    }
    -(plogp(p / total) + plogp(n / total))
}

/// Entropy of a node whose majority:minority ratio is `a ≥ 1`:
/// `log₂(a+1) − a/(a+1)·log₂ a`. Depends only on the ratio, not on the size.
pub fn ratio_entropy(a: f64) -> f64 {
    (a + 1.0).log2() - a / (a + 1.0) * a.log2()
}

/// Parent entropy minus the size-weighted child entropies. An empty parent
/// has gain 0.
pub fn info_gain(parent: NodeCounts, left: NodeCounts, right: NodeCounts) -> f64 {
    let total = parent.total();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    entropy(parent) - left.total() as f64 / total * entropy(left) - right.total() as f64 / total * entropy(right)
}

pub fn induce(ds: &Dataset) -> Result<DecisionTree> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rows: Vec<&Instance> = ds.instances().iter().collect();
    let mut used = vec![false; ds.schema().len()];
    let root = grow(&rows, &mut used);
    Ok(DecisionTree::new(ds.schema().clone(), root))
}

fn grow(rows: &[&Instance], used: &mut [bool]) -> TreeNode {
    let counts = NodeCounts::of(rows.iter().copied());
    let leaf = || TreeNode::Leaf {
        label: counts.majority(),
        counts,
    };
    if counts.is_pure() {
        return leaf();
    }

    let mut best: Option<(usize, f64)> = None;
    for attr in (0..used.len()).filter(|&a| !used[a]) {
        let left = NodeCounts::of(rows.iter().copied().filter(|r| r.values[attr]));
        let right = NodeCounts::new(counts.p - left.p, counts.n - left.n);
        let gain = info_gain(counts, left, right);
        if best.is_none_or(|(_, g)| gain > g + GAIN_EPSILON) {
            best = Some((attr, gain));
        }
    }
    let Some((attribute, gain)) = best else {
        return leaf();
    };
    if gain <= GAIN_EPSILON {
        return leaf();
    }

    let (left_rows, right_rows): (Vec<&Instance>, Vec<&Instance>) = rows.iter().partition(|r| r.values[attribute]);
    used[attribute] = true;
    let left = grow(&left_rows, used);
    let right = grow(&right_rows, used);
    used[attribute] = false;
    TreeNode::Internal {
        attribute,
        counts,
        left: Box::new(left),
        right: Box::new(right),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_csv, AttributeSchema};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn entropy_values() {
        assert!(close(entropy(NodeCounts::new(1, 1)), 1.0));
        assert_eq!(entropy(NodeCounts::new(0, 7)), 0.0);
        assert_eq!(entropy(NodeCounts::new(0, 0)), 0.0);
        // log2(4) - 3/4 log2(3)
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert!(close(entropy(NodeCounts::new(3, 1)), expected));
        assert!(close(expected, 0.811_278_124_459_132_8));
        assert!(close(ratio_entropy(3.0), expected));
    }

    #[test]
    fn gain_values() {
        let g = |p: (u64, u64), l: (u64, u64), r: (u64, u64)| {
            info_gain(
                NodeCounts::new(p.0, p.1),
                NodeCounts::new(l.0, l.1),
                NodeCounts::new(r.0, r.1),
            )
        };
        assert!(close(g((2, 2), (2, 0), (0, 2)), 1.0));
        assert!(close(g((2, 2), (1, 1), (1, 1)), 0.0));
        assert!(close(g((3, 1), (3, 0), (0, 1)), 0.811_278_124_459_132_8));
        assert_eq!(g((0, 0), (0, 0), (0, 0)), 0.0);
    }

    #[test]
    fn single_class_dataset_is_one_leaf() {
        let ds = parse_csv("a,b,class\nt,f,n\nf,f,n\nt,t,n\n").unwrap();
        let tree = induce(&ds).unwrap();
        assert_eq!(
            *tree.root(),
            TreeNode::Leaf {
                label: Class::N,
                counts: NodeCounts::new(0, 3)
            }
        );
    }

    #[test]
    fn splits_on_only_informative_attribute() {
        let ds = parse_csv("a1,a2,class\nt,t,p\nf,t,n\n").unwrap();
        let tree = induce(&ds).unwrap();
        assert_eq!(tree.root().attribute(), Some(0));
    }

    #[test]
    fn uninformative_impure_node_is_majority_leaf() {
        let ds = parse_csv("a,class\nt,p\nt,n\nf,p\nf,n\n").unwrap();
        let tree = induce(&ds).unwrap();
        assert_eq!(tree.root().label(), Some(Class::P));
        assert!(induce(&Dataset::empty(AttributeSchema::numbered(2).unwrap())).is_err());
    }

    #[test]
    fn gain_ties_go_to_lowest_index() {
        let ds = parse_csv("a,b,class\nt,t,p\nf,f,n\n").unwrap();
        assert_eq!(induce(&ds).unwrap().root().attribute(), Some(0));
    }
}
