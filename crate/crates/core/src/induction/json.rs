//! Tree JSON document shared by the CLI and the HTTP service:
//!
//! ```json
//! {"attributes": ["A1", "A2"],
//!  "root": {"kind": "internal", "attribute": "A1", "p": 3, "n": 1,
//!           "left": {"kind": "leaf", "label": "p", "p": 3, "n": 0},
//!           "right": {"kind": "leaf", "label": "n", "p": 0, "n": 1}}}
//! ```

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSchema, Class};
use crate::induction::{DecisionTree, NodeCounts, TreeNode};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub attributes: Vec<String>,
    pub root: NodeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Internal,
    Leaf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attribute: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<Class>,
    pub p: u64,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub left: Option<Box<NodeDoc>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub right: Option<Box<NodeDoc>>,
}

impl NodeDoc {
    fn from_node(schema: &AttributeSchema, node: &TreeNode) -> Self {
        let counts = node.counts();
        match node {
            TreeNode::Leaf { label, .. } => NodeDoc {
                kind: NodeKind::Leaf,
                attribute: None,
                label: Some(*label),
                p: counts.p,
                n: counts.n,
                left: None,
                right: None,
            },
            TreeNode::Internal {
                attribute, left, right, ..
            } => NodeDoc {
                kind: NodeKind::Internal,
                attribute: Some(schema.name(*attribute).to_string()),
                label: None,
                p: counts.p,
                n: counts.n,
                left: Some(Box::new(Self::from_node(schema, left))),
                right: Some(Box::new(Self::from_node(schema, right))),
            },
        }
    }

    fn to_node(&self, schema: &AttributeSchema) -> Result<TreeNode> {
        let bad = |msg: &str| Error::parse(None, None, format!("tree document: {msg}"));
        let counts = NodeCounts::new(self.p, self.n);
        match self.kind {
            NodeKind::Leaf => Ok(TreeNode::Leaf {
                label: self.label.ok_or_else(|| bad("leaf without label"))?,
                counts,
            }),
            NodeKind::Internal => {
                let name = self
                    .attribute
                    .as_deref()
                    .ok_or_else(|| bad("internal node without attribute"))?;
                let attribute = schema
                    .index_of(name)
                    .ok_or_else(|| bad(&format!("unknown attribute `{name}`")))?;
                let left = self.left.as_ref().ok_or_else(|| bad("internal node without left"))?;
                let right = self.right.as_ref().ok_or_else(|| bad("internal node without right"))?;
                Ok(TreeNode::Internal {
                    attribute,
                    counts,
                    left: Box::new(left.to_node(schema)?),
                    right: Box::new(right.to_node(schema)?),
                })
            }
        }
    }
}

impl From<&DecisionTree> for TreeDoc {
    fn from(tree: &DecisionTree) -> Self {
        TreeDoc {
            attributes: tree.schema().names().to_vec(),
            root: NodeDoc::from_node(tree.schema(), tree.root()),
        }
    }
}

impl TreeDoc {
    pub fn to_tree(&self) -> Result<DecisionTree> {
        let schema = AttributeSchema::new(self.attributes.iter().cloned())?;
        let root = self.root.to_node(&schema)?;
        Ok(DecisionTree::new(schema, root))
    }
}

impl DecisionTree {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TreeDoc::from(self)).expect("tree document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDoc =
            serde_json::from_str(text).map_err(|e| Error::parse(Some(e.line()), Some(e.column()), e.to_string()))?;
        doc.to_tree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv;
    use crate::induction::induce;

    #[test]
    fn round_trip() {
        let ds = parse_csv("a,b,class\nt,t,p\nt,f,n\nf,t,n\nf,f,n\nt,t,p\n").unwrap();
        let tree = induce(&ds).unwrap();
        let back = DecisionTree::from_json(&tree.to_json()).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn leaf_shape() {
        let ds = parse_csv("a,class\nt,p\n").unwrap();
        let doc: serde_json::Value = serde_json::from_str(&induce(&ds).unwrap().to_json()).unwrap();
        assert_eq!(
            doc,
            serde_json::json!({"attributes": ["a"], "root": {"kind": "leaf", "label": "p", "p": 1, "n": 0}})
        );
    }

    #[test]
    fn rejects_unknown_attribute() {
        let text = r#"{"attributes":["a"],"root":{"kind":"internal","attribute":"b","p":1,"n":1,
            "left":{"kind":"leaf","label":"p","p":1,"n":0},"right":{"kind":"leaf","label":"n","p":0,"n":1}}}"#;
        assert!(DecisionTree::from_json(text).is_err());
    }
}
