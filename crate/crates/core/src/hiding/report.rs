use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Class};
use crate::hiding::ClassDelta;
use crate::induction::{NodePath, Rule};

#[derive(Debug, Clone, PartialEq)]
pub struct NodeDelta {
    pub path: NodePath,
    pub delta: ClassDelta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SanitizationReport {
    /// Every hidden leaf and every ancestor visited, in path order. Additions
    /// are counted at the node that created them.
    pub per_node: Vec<NodeDelta>,
    pub total_added: u64,
    /// Appended instances over original instances; relabelings do not count.
    pub growth_ratio: f64,
    pub similarity: f64,
    /// Rules of the original tree missing from the re-induced one.
    pub hidden_rules: Vec<Rule>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeDeltaDoc {
    pub path: String,
    #[serde(rename = "relabeledPtoN")]
    pub relabeled_p_to_n: u64,
    #[serde(rename = "relabeledNtoP")]
    pub relabeled_n_to_p: u64,
    pub added_p: u64,
    pub added_n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDoc {
    pub path: String,
    pub label: Class,
}

/// Wire form of [`SanitizationReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDoc {
    pub per_node: Vec<NodeDeltaDoc>,
    pub total_added: u64,
    pub growth_ratio: f64,
    pub similarity: f64,
    pub hidden_rules: Vec<RuleDoc>,
    pub warnings: Vec<String>,
}

impl SanitizationReport {
    pub fn to_doc(&self, schema: &AttributeSchema) -> ReportDoc {
        ReportDoc {
            per_node: self
                .per_node
                .iter()
                .map(|d| NodeDeltaDoc {
                    path: d.path.render(schema),
                    relabeled_p_to_n: d.delta.relabeled_p_to_n,
                    relabeled_n_to_p: d.delta.relabeled_n_to_p,
                    added_p: d.delta.added_p,
                    added_n: d.delta.added_n,
                })
                .collect(),
            total_added: self.total_added,
            growth_ratio: self.growth_ratio,
            similarity: self.similarity,
            hidden_rules: self
                .hidden_rules
                .iter()
                .map(|r| RuleDoc {
                    path: r.path.render(schema),
                    label: r.label,
                })
                .collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn to_json(&self, schema: &AttributeSchema) -> String {
        serde_json::to_string_pretty(&self.to_doc(schema)).expect("report serializes")
    }

    pub fn delta_at(&self, path: &NodePath) -> Option<&ClassDelta> {
        self.per_node.iter().find(|d| &d.path == path).map(|d| &d.delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub rule: Rule,
    pub depth: usize,
    pub added: u64,
    pub growth_ratio: f64,
    /// The leaf's rule is gone from the re-induced tree.
    pub hidden: bool,
    /// Why the leaf could not be hidden.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostTable {
    pub schema: AttributeSchema,
    pub rows: Vec<CostRow>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl CostTable {
    pub fn new(schema: AttributeSchema, rows: Vec<CostRow>) -> Self {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.note.is_none())
            .map(|r| r.growth_ratio)
            .collect();
        let (mean, min, max) = if ratios.is_empty() {
            (0.0, 0.0, 0.0)
        } else {
            (
                ratios.iter().sum::<f64>() / ratios.len() as f64,
                ratios.iter().copied().fold(f64::INFINITY, f64::min),
                ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )
        };
        Self {
            schema,
            rows,
            mean,
            min,
            max,
        }
    }
}

impl fmt::Display for CostTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<40} {:>5} {:>7} {:>8} {:>6}",
            "rule", "depth", "added", "growth", "hidden"
        )?;
        for row in &self.rows {
            let rule = row.rule.render(&self.schema);
            match &row.note {
                None => writeln!(
                    f,
                    "{rule:<40} {:>5} {:>7} {:>7.1}% {:>6}",
                    row.depth,
                    row.added,
                    row.growth_ratio * 100.0,
                    if row.hidden { "yes" } else { "no" }
                )?,
                Some(note) => writeln!(f, "{rule:<40} {:>5} {:>7} {:>8} ({note})", row.depth, "-", "-")?,
            }
        }
        writeln!(
            f,
            "mean {:.1}%  min {:.1}%  max {:.1}%",
            self.mean * 100.0,
            self.min * 100.0,
            self.max * 100.0
        )
    }
}
