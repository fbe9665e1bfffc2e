//! Rule hiding: relabel the leaves to hide, restore the class ratios of
//! their ancestors with synthetic instances, specify those instances so the
//! remaining splits survive, and re-induce.
//!
//! All requests are handled in one sweep: every affected node is visited once
//! bottom-up and once top-down, so sibling leaves hidden together cancel at
//! their parent and grouped requests never cost more than hiding them one by
//! one.

mod allocate;
mod ratio;
mod report;
mod swap;

pub use allocate::{
    allocate_and_set, corner_allocation, slope_walk, Allocation, AllocationProblem, Corner, Side, Walk,
};
pub use ratio::{required_additions, Addition, RatioTarget};
pub use report::{CostRow, CostTable, NodeDelta, ReportDoc, RuleDoc, SanitizationReport};
pub use swap::{swap_and_add, swap_leaf, swap_target, BottomUp, ClassDelta, HiddenLeaf, PendingInstance};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::induction::{extract_rules, find_leaf, induce, similarity, DecisionTree, LeafRef, NodePath, Rule};
use crate::{Error, Result};

/// How pending instances are shared between the branches of a free split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Best corner, then walk down the gain curve until the split's gain no
    /// longer exceeds the parent's.
    #[default]
    HoldBack,
    /// Half to each branch, the odd one to the left.
    EvenSplit,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hold_back" | "hold-back" => Ok(Strategy::HoldBack),
            "even_split" | "even-split" => Ok(Strategy::EvenSplit),
            other => Err(Error::parse(None, None, format!("unknown strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::HoldBack => "hold_back",
            Strategy::EvenSplit => "even_split",
        })
    }
}

/// A leaf to hide, given by its path or by its full rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    Path(NodePath),
    Rule(Rule),
}

impl From<NodePath> for Request {
    fn from(p: NodePath) -> Self {
        Request::Path(p)
    }
}

impl From<Rule> for Request {
    fn from(r: Rule) -> Self {
        Request::Rule(r)
    }
}

fn sorted(path: &NodePath) -> Vec<(usize, bool)> {
    let mut steps = path.steps().to_vec();
    steps.sort_unstable();
    steps
}

/// Looks the request up with [`find_leaf`], falling back to a leaf whose
/// conditions are the same set in another order.
pub fn resolve(tree: &DecisionTree, request: &Request) -> Result<LeafRef> {
    let (path, label) = match request {
        Request::Path(p) => (p, None),
        Request::Rule(r) => (&r.path, Some(r.label)),
    };
    let leaf = match find_leaf(tree, path) {
        Ok(leaf) => leaf,
        Err(err) => {
            let want = sorted(path);
            tree.leaves().into_iter().find(|l| sorted(&l.path) == want).ok_or(err)?
        }
    };
    match label {
        Some(label) if label != leaf.label => {
            Err(Error::LeafNotFound(format!("{}:{label}", path.render(tree.schema()))))
        }
        _ => Ok(leaf),
    }
}

#[derive(Debug, Clone)]
pub struct HideOutcome {
    pub sanitized: Dataset,
    pub report: SanitizationReport,
    pub original_tree: DecisionTree,
    pub sanitized_tree: DecisionTree,
    /// Node counts and floors right after the bottom-up pass.
    pub floors: Vec<(NodePath, crate::induction::NodeCounts, Option<RatioTarget>)>,
}

/// Induce, swap-and-add, allocate-and-set, append, re-induce, report.
pub fn hide(ds: &Dataset, requests: &[Request], strategy: Strategy, seed: u64) -> Result<HideOutcome> {
    if requests.is_empty() {
        return Err(Error::NoRequests);
    }
    let tree = induce(ds)?;
    let leaves = requests.iter().map(|r| resolve(&tree, r)).collect::<Result<Vec<_>>>()?;
    hide_leaves(ds, &tree, &leaves, strategy, seed)
}

fn hide_leaves(
    ds: &Dataset,
    tree: &DecisionTree,
    leaves: &[LeafRef],
    strategy: Strategy,
    seed: u64,
) -> Result<HideOutcome> {
    let mut working = ds.clone();
    let bottom = swap_and_add(&mut working, tree, leaves)?;
    let alloc = allocate_and_set(&working, tree, &bottom.pending, &bottom.hidden, strategy, seed)?;
    for inst in alloc.instances {
        working.push(inst)?;
    }
    let retree = induce(&working)?;

    let mut warnings = bottom.warnings;
    warnings.extend(alloc.warnings);
    let new_rules = extract_rules(&retree);
    for leaf in leaves {
        let rule = leaf.rule();
        if new_rules.iter().any(|r| r.equivalent(&rule)) {
            warnings.push(format!("rule {} is still induced", rule.render(tree.schema())));
        }
    }
    let hidden_rules = extract_rules(tree)
        .into_iter()
        .filter(|r| !new_rules.iter().any(|n| n.equivalent(r)))
        .collect();

    let per_node: Vec<NodeDelta> = bottom
        .deltas
        .iter()
        .map(|(path, delta)| NodeDelta {
            path: path.clone(),
            delta: *delta,
        })
        .collect();
    let total_added: u64 = per_node.iter().map(|d| d.delta.added()).sum();
    let report = SanitizationReport {
        per_node,
        total_added,
        growth_ratio: if ds.is_empty() {
            0.0
        } else {
            total_added as f64 / ds.len() as f64
        },
        similarity: similarity(tree, &retree)?,
        hidden_rules,
        warnings,
    };
    Ok(HideOutcome {
        sanitized: working,
        report,
        original_tree: tree.clone(),
        sanitized_tree: retree,
        floors: bottom.floors.into_iter().map(|(p, (c, f))| (p, c, f)).collect(),
    })
}

/// Hides every leaf of `induce(ds)` on its own and tabulates the growth.
/// Leaves that cannot be hidden (a single-leaf tree, or a leaf that already
/// carries its swap target) get a row with growth 0 and a note, and are left
/// out of the summary.
pub fn per_leaf_cost(ds: &Dataset, strategy: Strategy, seed: u64) -> Result<CostTable> {
    let tree = induce(ds)?;
    let leaves = tree.leaves();
    let rows: Vec<CostRow> = leaves
        .par_iter()
        .map(|leaf| {
            let rule = leaf.rule();
            let depth = leaf.path.depth();
            match hide_leaves(ds, &tree, std::slice::from_ref(leaf), strategy, seed) {
                Ok(out) => CostRow {
                    rule,
                    depth,
                    added: out.report.total_added,
                    growth_ratio: out.report.growth_ratio,
                    hidden: !extract_rules(&out.sanitized_tree)
                        .iter()
                        .any(|r| r.equivalent(&leaf.rule())),
                    note: None,
                },
                Err(e) => CostRow {
                    rule,
                    depth,
                    added: 0,
                    growth_ratio: 0.0,
                    hidden: false,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(CostTable::new(tree.schema().clone(), rows))
}
