use treehide::dataset::{generate, parse_rules};
use treehide::hiding::{allocate_and_set, hide, required_additions, resolve, swap_and_add, Request, Strategy};
use treehide::induction::{extract_rules, find_leaf, NodePath};
use treehide::oracle::verify_hidden;
use treehide::{
    induce, AttributeSchema, Class, Dataset, DecisionTree, Instance, NodeCounts, Origin, RatioTarget, TreeNode,
};

const Z: usize = 0;
const Y: usize = 1;
const X: usize = 2;
const W: usize = 3;

fn nc(p: u64, n: u64) -> NodeCounts {
    NodeCounts::new(p, n)
}

fn leaf(label: Class, p: u64, n: u64) -> TreeNode {
    TreeNode::Leaf {
        label,
        counts: nc(p, n),
    }
}

fn split(attribute: usize, left: TreeNode, right: TreeNode) -> TreeNode {
    TreeNode::Internal {
        attribute,
        counts: left.counts() + right.counts(),
        left: Box::new(left),
        right: Box::new(right),
    }
}

fn rows(values: [bool; 4], label: Class, k: usize) -> impl Iterator<Item = Instance> {
    std::iter::repeat_with(move || Instance::new(values.to_vec(), label)).take(k)
}

/// Z at the root, Y below it, X on Y's true branch and W under X; W's false
/// branch is the 5p leaf to hide. Inactive attributes are held constant.
fn chain_fixture() -> (Dataset, DecisionTree) {
    let schema = AttributeSchema::new(["Z", "Y", "X", "W"]).unwrap();
    let instances = rows([true, true, true, true], Class::N, 3)
        .chain(rows([true, true, true, false], Class::P, 5))
        .chain(rows([true, true, false, false], Class::N, 5))
        .chain(rows([true, true, false, false], Class::P, 11))
        .chain(rows([true, false, true, true], Class::N, 8))
        .chain(rows([true, false, true, true], Class::P, 32))
        .chain(rows([false, false, false, false], Class::N, 40))
        .collect();
    let ds = Dataset::new(schema.clone(), instances).unwrap();
    let root = split(
        Z,
        split(
            Y,
            split(
                X,
                split(W, leaf(Class::N, 0, 3), leaf(Class::P, 5, 0)),
                leaf(Class::P, 11, 5),
            ),
            leaf(Class::P, 32, 8),
        ),
        leaf(Class::N, 0, 40),
    );
    (ds, DecisionTree::new(schema, root))
}

fn path(steps: &[(usize, bool)]) -> NodePath {
    NodePath(steps.to_vec())
}

#[test]
fn chain_required_additions() {
    let x = RatioTarget::of(nc(16, 8)).unwrap();
    let add = required_additions(nc(11, 13), x);
    assert_eq!((add.class, add.count), (Class::N, 9));

    let y = RatioTarget::of(nc(48, 16)).unwrap();
    let add = required_additions(nc(43, 30), y);
    assert_eq!((add.class, add.count), (Class::P, 47));
}

#[test]
fn chain_bottom_up_pass() {
    let (mut ds, tree) = chain_fixture();
    let w_r = find_leaf(&tree, &path(&[(Z, true), (Y, true), (X, true), (W, false)])).unwrap();
    let out = swap_and_add(&mut ds, &tree, &[w_r]).unwrap();

    let at = |steps: &[(usize, bool)]| out.deltas[&path(steps)];
    let swapped = at(&[(Z, true), (Y, true), (X, true), (W, false)]);
    assert_eq!((swapped.relabeled_p_to_n, swapped.added()), (5, 0));
    assert_eq!(at(&[(Z, true), (Y, true), (X, true)]).added(), 0, "W becomes pure");
    let x = at(&[(Z, true), (Y, true)]);
    assert_eq!((x.added_n, x.added_p), (9, 0));
    let y = at(&[(Z, true)]);
    assert_eq!((y.added_p, y.added_n), (47, 0));
    assert_eq!(at(&[]).added(), 0);
    assert_eq!(out.pending.len(), 56);

    let x_pending = out.pending.iter().filter(|p| p.label == Class::N).count();
    assert_eq!(x_pending, 9);
    for p in &out.pending {
        match p.label {
            Class::N => assert_eq!(p.fixed.len(), 2),
            Class::P => assert_eq!(p.fixed.len(), 1),
        }
        assert!(p.fixed[&Z]);
    }
}

#[test]
fn chain_hold_back_keeps_upper_splits() {
    let (ds, tree) = chain_fixture();
    let w_r = find_leaf(&tree, &path(&[(Z, true), (Y, true), (X, true), (W, false)])).unwrap();
    let mut working = ds.clone();
    let bottom = swap_and_add(&mut working, &tree, &[w_r]).unwrap();
    let alloc = allocate_and_set(&working, &tree, &bottom.pending, &bottom.hidden, Strategy::HoldBack, 3).unwrap();
    assert_eq!(alloc.instances.len(), 56);
    for inst in alloc.instances {
        working.push(inst).unwrap();
    }
    let retree = induce(&working).unwrap();
    assert_eq!(retree.root().attribute(), Some(Z));
    assert_eq!(
        retree.node_at(&path(&[(Z, true)])).and_then(TreeNode::attribute),
        Some(Y)
    );
}

#[test]
fn hidden_leaf_receives_no_instances_of_its_class() {
    let (ds, tree) = chain_fixture();
    let target = path(&[(Z, true), (Y, true), (X, true), (W, false)]);
    let w_r = find_leaf(&tree, &target).unwrap();
    for strategy in [Strategy::HoldBack, Strategy::EvenSplit] {
        let mut working = ds.clone();
        let bottom = swap_and_add(&mut working, &tree, std::slice::from_ref(&w_r)).unwrap();
        let alloc = allocate_and_set(&working, &tree, &bottom.pending, &bottom.hidden, strategy, 11).unwrap();
        assert!(!alloc.instances.iter().any(|i| i.label == Class::P && target.admits(i)));
    }
}

const THREE_ATTR: &str = "(t,_,_):p\n(f,t,t):p\n(f,t,f):n\n(f,f,_):n\n";

fn three_attr() -> Dataset {
    generate(&parse_rules(THREE_ATTR).unwrap(), 400, 5).unwrap()
}

#[test]
fn hiding_a_leaf_suppresses_its_parent_split() {
    let ds = three_attr();
    let tree = induce(&ds).unwrap();
    assert_eq!(tree.leaves().len(), 4);
    let r3 = tree
        .leaves()
        .into_iter()
        .find(|l| l.label == Class::N && l.path.depth() == 3)
        .expect("three-condition negative leaf");
    let r2 = tree
        .leaves()
        .into_iter()
        .find(|l| l.path.depth() == 3 && l.path != r3.path)
        .expect("sibling leaf");

    let out = hide(&ds, &[Request::Path(r3.path.clone())], Strategy::HoldBack, 5).unwrap();
    let rules = extract_rules(&out.sanitized_tree);
    assert!(!rules.iter().any(|r| r.equivalent(&r3.rule())));
    assert!(!rules.iter().any(|r| r.equivalent(&r2.rule())));
    assert!(out.report.hidden_rules.iter().any(|r| r.equivalent(&r2.rule())));
    assert!(verify_hidden(&ds, &out.sanitized, &r3.rule()).unwrap());
    assert_eq!(out.sanitized.count_origin(Origin::Original), ds.len());
}

#[test]
fn sibling_pure_leaves_cancel_at_their_parent() {
    let ds = three_attr();
    let tree = induce(&ds).unwrap();
    let deep: Vec<_> = tree.leaves().into_iter().filter(|l| l.path.depth() == 3).collect();
    assert_eq!(deep.len(), 2);
    assert!(deep.iter().all(|l| l.counts.is_pure()));
    let parent = deep[0].path.parent().unwrap();

    let requests: Vec<Request> = deep.iter().map(|l| Request::Path(l.path.clone())).collect();
    let out = hide(&ds, &requests, Strategy::HoldBack, 5).unwrap();
    assert_eq!(out.report.delta_at(&parent).map(|d| d.added()), Some(0));
    assert_eq!(out.report.total_added, 0);
}

#[test]
fn rule_requests_resolve_in_any_condition_order() {
    let ds = three_attr();
    let tree = induce(&ds).unwrap();
    let leaf = tree.leaves().into_iter().find(|l| l.path.depth() == 3).unwrap();
    let mut rule = leaf.rule();
    rule.path.0.reverse();
    assert_eq!(resolve(&tree, &Request::Rule(rule)).unwrap().path, leaf.path);
}

#[test]
fn duplicate_and_unknown_requests_are_rejected() {
    let ds = three_attr();
    let tree = induce(&ds).unwrap();
    let leaf = tree.leaves().into_iter().next().unwrap();
    let dup = [Request::Path(leaf.path.clone()), Request::Path(leaf.path.clone())];
    assert!(matches!(
        hide(&ds, &dup, Strategy::HoldBack, 0),
        Err(treehide::Error::DuplicateRequest(_))
    ));
    assert!(matches!(
        hide(&ds, &[], Strategy::HoldBack, 0),
        Err(treehide::Error::NoRequests)
    ));
    let bogus = path(&[(2, true), (0, false)]);
    assert!(matches!(
        hide(&ds, &[Request::Path(bogus)], Strategy::HoldBack, 0),
        Err(treehide::Error::LeafNotFound(_))
    ));
}

#[test]
fn hiding_is_deterministic_for_a_seed() {
    let ds = three_attr();
    let tree = induce(&ds).unwrap();
    let leaf = tree.leaves().into_iter().last().unwrap();
    let req = [Request::Path(leaf.path)];
    let a = hide(&ds, &req, Strategy::HoldBack, 9).unwrap();
    let b = hide(&ds, &req, Strategy::HoldBack, 9).unwrap();
    assert_eq!(a.sanitized, b.sanitized);
    assert_eq!(a.report, b.report);
}
