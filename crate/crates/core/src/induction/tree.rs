use std::fmt;

use crate::dataset::{AttributeSchema, Class, Instance};
use crate::induction::NodeCounts;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Internal {
        attribute: usize,
        counts: NodeCounts,
        /// Instances with `attribute = true`.
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        label: Class,
        counts: NodeCounts,
    },
}

impl TreeNode {
    pub fn counts(&self) -> NodeCounts {
        match self {
            TreeNode::Internal { counts, .. } | TreeNode::Leaf { counts, .. } => *counts,
        }
    }

    pub fn attribute(&self) -> Option<usize> {
        match self {
            TreeNode::Internal { attribute, .. } => Some(*attribute),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn label(&self) -> Option<Class> {
        match self {
            TreeNode::Leaf { label, .. } => Some(*label),
            TreeNode::Internal { .. } => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn child(&self, value: bool) -> Option<&TreeNode> {
        match self {
            TreeNode::Internal { left, right, .. } => Some(if value { left } else { right }),
            TreeNode::Leaf { .. } => None,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

/// Root-anchored sequence of `(attribute index, branch value)` steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<(usize, bool)>);

impl NodePath {
    pub fn root() -> Self {
        Self(Vec::new())
    }

    pub fn steps(&self) -> &[(usize, bool)] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, attribute: usize, value: bool) -> Self {
        let mut steps = self.0.clone();
        steps.push((attribute, value));
        Self(steps)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, init) = self.0.split_last()?;
        Some(Self(init.to_vec()))
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn admits(&self, inst: &Instance) -> bool {
        self.0.iter().all(|&(a, v)| inst.values[a] == v)
    }

    /// `A1=t/A3=f`; the root renders as the empty string.
    pub fn render(&self, schema: &AttributeSchema) -> String {
        self.0
            .iter()
            .map(|&(a, v)| format!("{}={}", schema.name(a), if v { "t" } else { "f" }))
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse(schema: &AttributeSchema, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::root());
        }
        let mut steps = Vec::new();
        for (idx, step) in text.split('/').enumerate() {
            let bad = |msg: String| Error::parse(None, Some(idx + 1), format!("selector `{text}`: {msg}"));
            let (name, value) = step
                .split_once('=')
                .ok_or_else(|| bad(format!("step `{step}` is not `attr=t|f`")))?;
            let attribute = schema
                .index_of(name.trim())
                .ok_or_else(|| bad(format!("unknown attribute `{}`", name.trim())))?;
            let value = match value.trim() {
                "t" => true,
                "f" => false,
                other => return Err(bad(format!("expected t or f, found `{other}`"))),
            };
            if steps.iter().any(|&(a, _)| a == attribute) {
                return Err(bad(format!("attribute `{}` repeated", name.trim())));
            }
            steps.push((attribute, value));
        }
        Ok(Self(steps))
    }
}

/// A root-to-leaf path with the leaf's class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub path: NodePath,
    pub label: Class,
}

impl Rule {
    /// Same label and the same set of conditions, in any order.
    pub fn equivalent(&self, other: &Rule) -> bool {
        let mut a = self.path.0.clone();
        let mut b = other.path.0.clone();
        a.sort_unstable();
        b.sort_unstable();
        self.label == other.label && a == b
    }

    /// `A1=t/A2=f:p`.
    pub fn render(&self, schema: &AttributeSchema) -> String {
        format!("{}:{}", self.path.render(schema), self.label)
    }

    pub fn parse(schema: &AttributeSchema, text: &str) -> Result<Self> {
        let (path, label) = text
            .rsplit_once(':')
            .ok_or_else(|| Error::parse(None, None, format!("rule `{text}` lacks `:class`")))?;
        let label = Class::from_symbol(label.trim())
            .ok_or_else(|| Error::parse(None, None, format!("unknown class in rule `{text}`")))?;
        Ok(Self {
            path: NodePath::parse(schema, path)?,
            label,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    schema: AttributeSchema,
    root: TreeNode,
}

impl DecisionTree {
    pub fn new(schema: AttributeSchema, root: TreeNode) -> Self {
        Self { schema, root }
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn node_at(&self, path: &NodePath) -> Option<&TreeNode> {
        let mut node = &self.root;
        for &(attr, value) in path.steps() {
            match node {
                TreeNode::Internal { attribute, .. } if *attribute == attr => {
                    node = node.child(value)?;
                }
                _ => return None,
            }
        }
        Some(node)
    }

    pub fn leaves(&self) -> Vec<LeafRef> {
        let mut out = Vec::new();
        collect_leaves(&self.root, NodePath::root(), &mut Vec::new(), &mut out);
        out
    }
}

fn collect_leaves(node: &TreeNode, path: NodePath, chain: &mut Vec<NodeRef>, out: &mut Vec<LeafRef>) {
    match node {
        TreeNode::Leaf { label, counts } => out.push(LeafRef {
            path,
            label: *label,
            counts: *counts,
            ancestors: chain.iter().rev().cloned().collect(),
        }),
        TreeNode::Internal {
            attribute,
            counts,
            left,
            right,
        } => {
            chain.push(NodeRef {
                path: path.clone(),
                attribute: *attribute,
                counts: *counts,
            });
            collect_leaves(left, path.child(*attribute, true), chain, out);
            collect_leaves(right, path.child(*attribute, false), chain, out);
            chain.pop();
        }
    }
}

/// An internal node on a leaf's ancestor chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRef {
    pub path: NodePath,
    pub attribute: usize,
    pub counts: NodeCounts,
}

/// A leaf together with its ancestors, nearest (the parent) first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafRef {
    pub path: NodePath,
    pub label: Class,
    pub counts: NodeCounts,
    pub ancestors: Vec<NodeRef>,
}

impl LeafRef {
    pub fn rule(&self) -> Rule {
        Rule {
            path: self.path.clone(),
            label: self.label,
        }
    }
}

/// One rule per leaf, left to right.
pub fn extract_rules(tree: &DecisionTree) -> Vec<Rule> {
    tree.leaves().iter().map(LeafRef::rule).collect()
}

pub fn classify(tree: &DecisionTree, inst: &Instance) -> Result<Class> {
    if inst.values.len() != tree.schema.len() {
        return Err(Error::Arity {
            expected: tree.schema.len(),
            found: inst.values.len(),
        });
    }
    let mut node = &tree.root;
    loop {
        match node {
            TreeNode::Leaf { label, .. } => return Ok(*label),
            TreeNode::Internal {
                attribute, left, right, ..
            } => node = if inst.values[*attribute] { left } else { right },
        }
    }
}

pub fn find_leaf(tree: &DecisionTree, path: &NodePath) -> Result<LeafRef> {
    let not_found = || Error::LeafNotFound(path.render(&tree.schema));
    let mut node = &tree.root;
    let mut ancestors = Vec::new();
    let mut here = NodePath::root();
    for &(attr, value) in path.steps() {
        match node {
            TreeNode::Internal { attribute, counts, .. } if *attribute == attr => {
                ancestors.push(NodeRef {
                    path: here.clone(),
                    attribute: *attribute,
                    counts: *counts,
                });
                here = here.child(attr, value);
                node = node.child(value).ok_or_else(not_found)?;
            }
            _ => return Err(not_found()),
        }
    }
    match node {
        TreeNode::Leaf { label, counts } => {
            ancestors.reverse();
            Ok(LeafRef {
                path: path.clone(),
                label: *label,
                counts: *counts,
                ancestors,
            })
        }
        TreeNode::Internal { .. } => Err(not_found()),
    }
}

impl fmt::Display for DecisionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(f: &mut fmt::Formatter<'_>, schema: &AttributeSchema, node: &TreeNode, depth: usize) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match node {
                TreeNode::Leaf { label, counts } => {
                    writeln!(f, "{pad}-> {label} ({}p, {}n)", counts.p, counts.n)
                }
                TreeNode::Internal {
                    attribute,
                    counts,
                    left,
                    right,
                } => {
                    let name = schema.name(*attribute);
                    writeln!(f, "{pad}{name}? ({}p, {}n)", counts.p, counts.n)?;
                    writeln!(f, "{pad}{name}=t")?;
                    walk(f, schema, left, depth + 1)?;
                    writeln!(f, "{pad}{name}=f")?;
                    walk(f, schema, right, depth + 1)
                }
            }
        }
        walk(f, &self.schema, &self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv;
    use crate::induction::induce;

    fn leaf(label: Class, p: u64, n: u64) -> TreeNode {
        TreeNode::Leaf {
            label,
            counts: NodeCounts::new(p, n),
        }
    }

    fn split(attribute: usize, left: TreeNode, right: TreeNode) -> TreeNode {
        let counts = left.counts() + right.counts();
        TreeNode::Internal {
            attribute,
            counts,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// X at the root, Y under X=t, Z under Y=t.
    fn three_attr_shape() -> DecisionTree {
        let schema = AttributeSchema::new(["X", "Y", "Z"]).unwrap();
        let z = split(2, leaf(Class::P, 6, 0), leaf(Class::N, 0, 5));
        let y = split(1, z, leaf(Class::N, 0, 9));
        DecisionTree::new(schema, split(0, y, leaf(Class::P, 12, 0)))
    }

    #[test]
    fn single_leaf_rules() {
        let tree = DecisionTree::new(AttributeSchema::numbered(1).unwrap(), leaf(Class::P, 1, 0));
        let rules = extract_rules(&tree);
        assert_eq!(
            rules,
            vec![Rule {
                path: NodePath::root(),
                label: Class::P
            }]
        );
        let any = Instance::new(vec![false], Class::N);
        assert_eq!(classify(&tree, &any).unwrap(), Class::P);
        let found = find_leaf(&tree, &NodePath::root()).unwrap();
        assert!(found.ancestors.is_empty());
    }

    #[test]
    fn three_attr_rules_and_lookup() {
        let tree = three_attr_shape();
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), 4);
        let under_z = rules
            .iter()
            .filter(|r| r.path.steps().iter().any(|&(a, _)| a == 2))
            .count();
        assert_eq!(under_z, 2);
        assert_eq!(rules[0].render(tree.schema()), "X=t/Y=t/Z=t:p");

        let path = NodePath::parse(tree.schema(), "X=t/Y=t/Z=t").unwrap();
        let r3 = find_leaf(&tree, &path).unwrap();
        assert_eq!(r3.counts, NodeCounts::new(6, 0));
        let chain: Vec<usize> = r3.ancestors.iter().map(|a| a.attribute).collect();
        assert_eq!(chain, vec![2, 1, 0]);

        let wrong = NodePath::parse(tree.schema(), "Y=t").unwrap();
        assert!(matches!(find_leaf(&tree, &wrong), Err(Error::LeafNotFound(_))));
        let short = NodePath::parse(tree.schema(), "X=t").unwrap();
        assert!(find_leaf(&tree, &short).is_err());
    }

    #[test]
    fn classify_follows_true_left() {
        let ds = parse_csv("a1,a2,class\nt,t,p\nf,t,n\n").unwrap();
        let tree = induce(&ds).unwrap();
        let left_label = tree.root().child(true).unwrap().label().unwrap();
        let inst = Instance::new(vec![true, false], Class::N);
        assert_eq!(classify(&tree, &inst).unwrap(), left_label);
        assert!(classify(&tree, &Instance::new(vec![true], Class::N)).is_err());
    }

    #[test]
    fn path_parsing() {
        let schema = AttributeSchema::new(["X", "Y"]).unwrap();
        let path = NodePath::parse(&schema, "X=t/Y=f").unwrap();
        assert_eq!(path.0, vec![(0, true), (1, false)]);
        assert_eq!(path.render(&schema), "X=t/Y=f");
        assert!(NodePath::parse(&schema, "Q=t").is_err());
        assert!(NodePath::parse(&schema, "X=t/X=f").is_err());
        assert!(NodePath::parse(&schema, "X").is_err());
        let rule = Rule::parse(&schema, "X=t/Y=f:n").unwrap();
        assert_eq!(rule.label, Class::N);
        let swapped = Rule::parse(&schema, "Y=f/X=t:n").unwrap();
        assert!(rule.equivalent(&swapped));
        assert!(!rule.equivalent(&Rule::parse(&schema, "X=t/Y=f:p").unwrap()));
    }
}
