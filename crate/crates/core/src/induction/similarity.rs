use std::collections::BTreeMap;

use crate::dataset::Class;
use crate::induction::{DecisionTree, TreeNode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Split(usize),
    Leaf(Class),
}

fn positions(node: &TreeNode, at: &mut Vec<bool>, out: &mut BTreeMap<Vec<bool>, Slot>) {
    match node {
        TreeNode::Leaf { label, .. } => {
            out.insert(at.clone(), Slot::Leaf(*label));
        }
        TreeNode::Internal {
            attribute, left, right, ..
        } => {
            out.insert(at.clone(), Slot::Split(*attribute));
            at.push(true);
            positions(left, at, out);
            at.pop();
            at.push(false);
            positions(right, at, out);
            at.pop();
        }
    }
}

/// Structural similarity in `[0, 1]`: positions (root-anchored left/right
/// sequences) holding the same split attribute or the same leaf label in both
/// trees, over all positions occupied in either tree.
pub fn similarity(a: &DecisionTree, b: &DecisionTree) -> Result<f64> {
    if a.schema() != b.schema() {
        return Err(Error::Schema("trees are over different attribute schemas".into()));
    }
    let mut pa = BTreeMap::new();
    let mut pb = BTreeMap::new();
    positions(a.root(), &mut Vec::new(), &mut pa);
    positions(b.root(), &mut Vec::new(), &mut pb);
    let matching = pa.iter().filter(|(pos, slot)| pb.get(*pos) == Some(slot)).count();
    let union = pa.len() + pb.keys().filter(|pos| !pa.contains_key(*pos)).count();
    Ok(matching as f64 / union as f64)
}
