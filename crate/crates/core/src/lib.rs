//! Hiding sensitive decision-tree rules in binary datasets.
//!
//! The crate induces an ID3-style tree over boolean attributes and a two-class
//! label, relabels the instances of the leaves an expert wants hidden, and
//! appends synthetic instances so that the class ratios of the nodes above
//! them are kept. Re-inducing on the sanitized data no longer yields the
//! hidden rules while the rest of the tree stays close to the original.
//!
//! Module map:
//!
//! * [`dataset`]: schema, instances, CSV and rule-file I/O, rule-driven generator.
//! * [`induction`]: entropy, information gain, tree induction, rule extraction,
//!   structural similarity and the tree JSON document.
//! * [`hiding`]: the bottom-up swap-and-add pass, the top-down allocate-and-set
//!   pass, request grouping and the sanitization report.
//! * [`oracle`]: brute-force checks of the gain-convexity and grouping claims.

pub mod dataset;
mod error;
pub mod hiding;
pub mod induction;
pub mod oracle;
pub mod rng;

pub use dataset::{AttributeSchema, Class, Dataset, Instance, Origin, RuleSpec};
pub use error::{Error, Result};
pub use hiding::{hide, per_leaf_cost, ClassDelta, CostTable, HideOutcome, RatioTarget, SanitizationReport, Strategy};
pub use induction::{induce, DecisionTree, NodeCounts, Rule, TreeNode};
