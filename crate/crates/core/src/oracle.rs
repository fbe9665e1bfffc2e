//! Brute-force checks of the claims the hiding engine relies on.
//!
//! Gains here are recomputed from the entropy formula alone and never go through the
//! engine's allocation code. Floating-point comparisons use a `1e-9` slack;
//! ratio arithmetic is exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Class, Dataset};
use crate::hiding::{required_additions, AllocationProblem, RatioTarget};
use crate::induction::{entropy_real, extract_rules, induce, NodeCounts, Rule};
use crate::{Error, Result};

pub const VIOLATION_SLACK: f64 = 1e-9;
const MAX_REPORTED: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub claim: String,
    pub cases_checked: u64,
    pub violation_count: u64,
    /// The first violations found, at most 100.
    pub violations: Vec<String>,
}

impl OracleVerdict {
    fn new(claim: &str) -> Self {
        Self {
            claim: claim.to_string(),
            cases_checked: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, violation: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_REPORTED {
            self.violations.push(violation);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.cases_checked += other.cases_checked;
        self.violation_count += other.violation_count;
        let room = MAX_REPORTED.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

impl std::fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} ({} cases, {} violations)",
            self.claim,
            if self.holds() { "holds" } else { "FAILS" },
            self.cases_checked,
            self.violation_count
        )?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Node counts `(p, n)`, child counts `(p₁, n₁)`, `(p₂, n₂)`, and `k` new
/// instances of `class` of which `i` go left. The parent counts are taken
/// as given, not required to equal the children's sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainCase {
    pub p: u64,
    pub n: u64,
    pub p1: u64,
    pub n1: u64,
    pub p2: u64,
    pub n2: u64,
    pub k: u64,
    pub class: Class,
}

impl GainCase {
    pub fn from_problem(prob: &AllocationProblem) -> Self {
        let parent = prob.left + prob.right;
        Self {
            p: parent.p,
            n: parent.n,
            p1: prob.left.p,
            n1: prob.left.n,
            p2: prob.right.p,
            n2: prob.right.n,
            k: prob.k,
            class: prob.label,
        }
    }

    /// `G(i)` straight from the entropy formula.
    pub fn gain(&self, i: u64) -> f64 {
        self.gain_real(i as f64)
    }

    /// `G` extended to real `i`, for derivative checks.
    pub fn gain_real(&self, i: f64) -> f64 {
        let k = self.k as f64;
        let (p, n) = (self.p as f64, self.n as f64);
        let (p1, n1, p2, n2) = (self.p1 as f64, self.n1 as f64, self.p2 as f64, self.n2 as f64);
        let ((pp, pn), (lp, ln), (rp, rn)) = match self.class {
            Class::P => ((p + k, n), (p1 + i, n1), (p2 + k - i, n2)),
            Class::N => ((p, n + k), (p1, n1 + i), (p2, n2 + k - i)),
        };
        let total = pp + pn;
        entropy_real(pp, pn) - ((lp + ln) * entropy_real(lp, ln) + (rp + rn) * entropy_real(rp, rn)) / total
    }

    /// Closed-form `G′(i)`; for positive pending instances
    /// `−log₂[(p₁+i+n₁)(p₂+k−i) / ((p₁+i)(p₂+k−i+n₂))] / (p+k+n)`, and the
    /// same with the classes exchanged for negative ones.
    pub fn derivative(&self, i: f64) -> f64 {
        let k = self.k as f64;
        let total = (self.p + self.n + self.k) as f64;
        let (same1, other1, same2, other2) = match self.class {
            Class::P => (self.p1, self.n1, self.p2, self.n2),
            Class::N => (self.n1, self.p1, self.n2, self.p2),
        };
        let x = same1 as f64 + i;
        let y = same2 as f64 + k - i;
        -(((x + other1 as f64) * y) / (x * (y + other2 as f64))).log2() / total
    }
}

/// Every `(i, G(i))` for `i` in `0..=k`.
pub fn enumerate_gain(prob: &AllocationProblem) -> Vec<(u64, f64)> {
    let case = GainCase::from_problem(prob);
    (0..=prob.k).map(|i| (i, case.gain(i))).collect()
}

fn enumerate_case(case: &GainCase) -> Vec<f64> {
    (0..=case.k).map(|i| case.gain(i)).collect()
}

/// Grid for the convexity checks: every count in `counts` (applied to p, n,
/// p₁, n₁, p₂, n₂), every `k` in `1..=max_k`, both classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GainGrid {
    pub min_count: u64,
    pub max_count: u64,
    pub max_k: u64,
}

impl Default for GainGrid {
    fn default() -> Self {
        Self {
            min_count: 1,
            max_count: 8,
            max_k: 20,
        }
    }
}

impl GainGrid {
    fn run(&self, claim: &str, check: impl Fn(&GainCase, &[f64], &mut OracleVerdict) + Sync) -> OracleVerdict {
        let range = self.min_count..=self.max_count;
        let outer: Vec<(u64, u64)> = range.clone().flat_map(|p| range.clone().map(move |n| (p, n))).collect();
        outer
            .par_iter()
            .map(|&(p, n)| {
                let mut verdict = OracleVerdict::new(claim);
                for p1 in range.clone() {
                    for n1 in range.clone() {
                        for p2 in range.clone() {
                            for n2 in range.clone() {
                                for k in 1..=self.max_k {
                                    for class in [Class::P, Class::N] {
                                        let case = GainCase {
                                            p,
                                            n,
                                            p1,
                                            n1,
                                            p2,
                                            n2,
                                            k,
                                            class,
                                        };
                                        let values = enumerate_case(&case);
                                        verdict.cases_checked += 1;
                                        check(&case, &values, &mut verdict);
                                    }
                                }
                            }
                        }
                    }
                }
                verdict
            })
            .reduce(|| OracleVerdict::new(claim), OracleVerdict::merge)
    }
}

/// No interior `i` strictly beats both endpoints.
pub fn check_endpoint_max(grid: &GainGrid) -> OracleVerdict {
    grid.run("gain-maximum-at-endpoint", |case, values, verdict| {
        let ends = values[0].max(values[values.len() - 1]);
        if let Some((i, g)) = values
            .iter()
            .enumerate()
            .take(values.len() - 1)
            .skip(1)
            .find(|(_, g)| **g > ends + VIOLATION_SLACK)
        {
            verdict.record(format!("{case:?}: G({i}) = {g} > endpoints {ends}"));
        }
    })
}

/// Discrete second differences are non-negative.
pub fn check_convexity(grid: &GainGrid) -> OracleVerdict {
    grid.run("gain-convexity", |case, values, verdict| {
        if let Some(i) = (1..values.len().saturating_sub(1))
            .find(|&i| values[i + 1] - 2.0 * values[i] + values[i - 1] < -VIOLATION_SLACK)
        {
            verdict.record(format!("{case:?}: second difference at {i} is negative"));
        }
    })
}

/// Closed-form `G′` against a central difference of the real extension at
/// the midpoints between integer shares.
pub fn check_derivative(grid: &GainGrid, tolerance: f64) -> OracleVerdict {
    const H: f64 = 1e-5;
    grid.run("gain-derivative", |case, _, verdict| {
        for j in 0..case.k {
            let x = j as f64 + 0.5;
            let numeric = (case.gain_real(x + H) - case.gain_real(x - H)) / (2.0 * H);
            let exact = case.derivative(x);
            if (numeric - exact).abs() > tolerance {
                verdict.record(format!("{case:?}: G'({x}) = {exact}, numeric {numeric}"));
                return;
            }
        }
    })
}

/// Smallest single-class top-up found by counting upward.
pub fn brute_force_additions(current: NodeCounts, target: RatioTarget) -> u64 {
    (0..)
        .find(|&x| target.satisfied_by(current.with(Class::P, x)) || target.satisfied_by(current.with(Class::N, x)))
        .expect("a large enough top-up always satisfies the floor")
}

/// Net per-class change a hiding request brings to a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SignedDelta {
    pub p: i64,
    pub n: i64,
}

fn shift(c: NodeCounts, d: SignedDelta) -> NodeCounts {
    let p = c.p as i64 + d.p;
    let n = c.n as i64 + d.n;
    assert!(p >= 0 && n >= 0, "delta removes more instances than the node holds");
    NodeCounts::new(p as u64, n as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SerialParallel {
    pub parallel: u64,
    /// First request then second.
    pub serial_first: u64,
    /// Second request then first.
    pub serial_second: u64,
}

/// Additions at a node with original counts `base` when two requests arrive
/// together versus one after the other.
pub fn serial_vs_parallel(base: NodeCounts, first: SignedDelta, second: SignedDelta) -> SerialParallel {
    let target = RatioTarget::of(base).expect("node ratio must be defined");
    let both = SignedDelta {
        p: first.p + second.p,
        n: first.n + second.n,
    };
    let parallel = required_additions(shift(base, both), target).count;
    let serial = |a: SignedDelta, b: SignedDelta| {
        let step = required_additions(shift(base, a), target);
        let after = shift(base, a).with(step.class, step.count);
        step.count + required_additions(shift(after, b), target).count
    };
    SerialParallel {
        parallel,
        serial_first: serial(first, second),
        serial_second: serial(second, first),
    }
}

/// Grid for the grouping check: node counts in `1..=max_parent` per class,
/// additions arriving from each branch in `0..=max_delta` per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupingGrid {
    pub max_parent: u64,
    pub max_delta: u64,
}

impl Default for GroupingGrid {
    fn default() -> Self {
        Self {
            max_parent: 8,
            max_delta: 6,
        }
    }
}

/// Parallel top-up never exceeds the cheaper serial order, and every
/// top-up the engine computes is the enumerated minimum.
pub fn check_serial_parallel(grid: &GroupingGrid) -> OracleVerdict {
    let parents: Vec<(u64, u64)> = (1..=grid.max_parent)
        .flat_map(|p| (1..=grid.max_parent).map(move |n| (p, n)))
        .collect();
    let d = grid.max_delta as i64;
    parents
        .par_iter()
        .map(|&(p, n)| {
            let mut verdict = OracleVerdict::new("grouping-never-costs-more");
            let base = NodeCounts::new(p, n);
            let target = RatioTarget::of(base).expect("both classes present");
            for pl in 0..=d {
                for nl in 0..=d {
                    for pr in 0..=d {
                        for nr in 0..=d {
                            verdict.cases_checked += 1;
                            let left = SignedDelta { p: pl, n: nl };
                            let right = SignedDelta { p: pr, n: nr };
                            let r = serial_vs_parallel(base, left, right);
                            if r.parallel > r.serial_first.min(r.serial_second) {
                                verdict.record(format!("{base:?} +{left:?} +{right:?}: {r:?}"));
                            }
                            let combined = shift(base, SignedDelta { p: pl + pr, n: nl + nr });
                            let brute = brute_force_additions(combined, target);
                            if brute != r.parallel {
                                verdict.record(format!(
                                    "{combined:?} at {target}: engine adds {}, minimum is {brute}",
                                    r.parallel
                                ));
                            }
                        }
                    }
                }
            }
            verdict
        })
        .reduce(|| OracleVerdict::new("grouping-never-costs-more"), OracleVerdict::merge)
}

/// `rule` does not come back when the sanitized data is re-induced.
pub fn verify_hidden(original: &Dataset, sanitized: &Dataset, rule: &Rule) -> Result<bool> {
    if original.schema() != sanitized.schema() {
        return Err(Error::Schema("original and sanitized datasets differ in schema".into()));
    }
    if sanitized.is_empty() {
        return Ok(true);
    }
    let tree = induce(sanitized)?;
    Ok(!extract_rules(&tree).iter().any(|r| r.equivalent(rule)))
}

/// Entropy a second way, for cross-checks: `−Σ pᵢ log₂ pᵢ` written out.
pub fn entropy_by_definition(c: NodeCounts) -> f64 {
    let total = c.total() as f64;
    [c.p, c.n]
        .iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let q = x as f64 / total;
            -q * q.log2()
        })
        .sum()
}
