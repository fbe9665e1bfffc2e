use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Class;
use crate::induction::NodeCounts;

/// Majority:minority ratio floor `major / minor` (at least 1), kept in exact
/// integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatioTarget {
    major: u64,
    minor: u64,
}

impl RatioTarget {
    /// `None` unless `minor > 0` and `major >= minor`.
    pub fn new(major: u64, minor: u64) -> Option<Self> {
        (minor > 0 && major >= minor).then_some(Self { major, minor })
    }

    /// The ratio of a node's counts; `None` for pure or empty nodes, whose
    /// ratio is undefined.
    pub fn of(counts: NodeCounts) -> Option<Self> {
        Self::new(counts.p.max(counts.n), counts.p.min(counts.n))
    }

    pub fn major(self) -> u64 {
        self.major
    }

    pub fn minor(self) -> u64 {
        self.minor
    }

    pub fn as_f64(self) -> f64 {
        self.major as f64 / self.minor as f64
    }

    /// `max(p, n) / min(p, n) >= major / minor`, compared by
    /// cross-multiplication. Pure non-empty nodes always qualify.
    pub fn satisfied_by(self, c: NodeCounts) -> bool {
        let hi = u128::from(c.p.max(c.n));
        let lo = u128::from(c.p.min(c.n));
        hi > 0 && hi * u128::from(self.minor) >= lo * u128::from(self.major)
    }
}

impl fmt::Display for RatioTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.major, self.minor)
    }
}

/// Single-class top-up of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Addition {
    pub class: Class,
    pub count: u64,
    pub warning: Option<String>,
}

/// Smallest `x` with `(have + x) * minor >= major * other`.
fn additions_to_lead(have: u64, other: u64, target: RatioTarget) -> u64 {
    let need = u128::from(target.major) * u128::from(other);
    let got = u128::from(have) * u128::from(target.minor);
    if got >= need {
        0
    } else {
        let minor = u128::from(target.minor);
        u64::try_from((need - got).div_ceil(minor)).expect("addition count fits in u64")
    }
}

/// Minimal number of single-class instances to add to `current` so that its
/// majority:minority ratio reaches `target`, with either class allowed to be
/// the majority afterwards.
///
/// Adding `p` can only help by growing or creating a `p` majority, so its
/// cost is the ceiling of `a·n − p`; likewise for `n`. Ties go to the current
/// majority class, then to `p`.
pub fn required_additions(current: NodeCounts, target: RatioTarget) -> Addition {
    if current.total() == 0 {
        return Addition {
            class: Class::P,
            count: 0,
            warning: Some("node has no instances; ratio floor not enforced".into()),
        };
    }
    if target.satisfied_by(current) {
        return Addition {
            class: current.majority(),
            count: 0,
            warning: None,
        };
    }
    let add_p = additions_to_lead(current.p, current.n, target);
    let add_n = additions_to_lead(current.n, current.p, target);
    let (class, count) = match add_p.cmp(&add_n) {
        std::cmp::Ordering::Less => (Class::P, add_p),
        std::cmp::Ordering::Greater => (Class::N, add_n),
        std::cmp::Ordering::Equal => (current.majority(), add_p),
    };
    Addition {
        class,
        count,
        warning: None,
    }
}
