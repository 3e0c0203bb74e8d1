//! Defect-scored decision tree over MDLP-discretized metrics.
//!
//! Splits maximise information gain on the binary defective label; leaves
//! score the mean raw defect count of the training classes they hold.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::ClassRecord;
use crate::discretize::{mdlp_cuts, BinMap};
use crate::metric::{Metric, METRIC_COUNT};
use crate::stats::binary_entropy;

pub const DEFAULT_MAX_DEPTH: usize = 10;
pub const DEFAULT_PREDICT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    /// `None` means `max(5, N/50)`.
    pub min_leaf: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: DEFAULT_MAX_DEPTH,
            min_leaf: None,
        }
    }
}

impl TreeParams {
    pub fn min_leaf_for(&self, n: usize) -> usize {
        self.min_leaf.unwrap_or_else(|| (n / 50).max(5)).max(1)
    }
}

/// Half-open interval `(lo, hi]`; `None` is unbounded on that side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub const ALL: Interval = Interval { lo: None, hi: None };

    pub fn contains(&self, v: f64) -> bool {
        self.lo.is_none_or(|lo| v > lo) && self.hi.is_none_or(|hi| v <= hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.lo, self.hi) {
            (None, None) => write!(f, "(-inf, inf)"),
            (None, Some(h)) => write!(f, "(-inf, {h}]"),
            (Some(l), None) => write!(f, "({l}, inf)"),
            (Some(l), Some(h)) => write!(f, "({l}, {h}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub metric: Metric,
    pub interval: Interval,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.metric, self.interval)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub score: f64,
    pub support: usize,
    pub defects: u64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Child {
    pub interval: Interval,
    pub node: Node,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Leaf(Leaf),
    Split {
        metric: Metric,
        level: usize,
        support: usize,
        children: Vec<Child>,
    },
}

/// Root-to-leaf path: child indices, the conditions they imply, and the leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub path: Vec<usize>,
    pub conditions: Vec<Condition>,
    pub score: f64,
    pub support: usize,
}

impl Branch {
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn condition(&self, m: Metric) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.metric == m)
    }
}

/// Leaves reachable from an ancestor of the current leaf.
#[derive(Debug, Clone, PartialEq)]
pub struct Siblings {
    pub branches: Vec<Branch>,
    /// The requested level lies above the root (or below the leaf).
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub bins: Vec<BinMap>,
    /// Observed training `(min, max)` per metric, in canonical order.
    pub bounds: Vec<(f64, f64)>,
    pub params: TreeParams,
    pub min_leaf: usize,
}

impl DecisionTree {
    /// Discretize every metric with MDLP, then grow the tree.
    ///
    /// # Panics
    /// If `train` is empty or `max_depth` is zero.
    pub fn build(train: &[ClassRecord], params: TreeParams) -> DecisionTree {
        assert!(!train.is_empty(), "cannot build a tree from no records");
        assert!(params.max_depth >= 1, "max_depth must be at least 1");
        let labels: Vec<bool> = train.iter().map(ClassRecord::is_defective).collect();
        let bins: Vec<BinMap> = Metric::ALL
            .iter()
            .map(|&m| {
                let values: Vec<f64> = train.iter().map(|r| r.value(m)).collect();
                mdlp_cuts(m, &values, &labels)
            })
            .collect();
        Self::build_with_bins(train, bins, params)
    }

    /// Grow a tree over precomputed bins (one [`BinMap`] per metric, canonical order).
    pub fn build_with_bins(
        train: &[ClassRecord],
        bins: Vec<BinMap>,
        params: TreeParams,
    ) -> DecisionTree {
        assert!(!train.is_empty(), "cannot build a tree from no records");
        assert_eq!(bins.len(), METRIC_COUNT);
        let bounds = Metric::ALL
            .iter()
            .map(|&m| {
                train
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                        (lo.min(r.value(m)), hi.max(r.value(m)))
                    })
            })
            .collect();
        let min_leaf = params.min_leaf_for(train.len());
        let builder = Builder {
            bins: &bins,
            max_depth: params.max_depth,
            min_leaf,
        };
        let refs: Vec<&ClassRecord> = train.iter().collect();
        let root = builder.grow(&refs, [false; METRIC_COUNT], 0);
        DecisionTree {
            root,
            bins,
            bounds,
            params,
            min_leaf,
        }
    }

    pub fn bounds(&self, m: Metric) -> (f64, f64) {
        self.bounds[m.index()]
    }

    /// The unique branch `record` satisfies.
    pub fn locate(&self, record: &ClassRecord) -> Branch {
        let mut node = &self.root;
        let mut path = Vec::new();
        let mut conditions = Vec::new();
        loop {
            match node {
                Node::Leaf(leaf) => {
                    return Branch {
                        path,
                        conditions,
                        score: leaf.score,
                        support: leaf.support,
                    }
                }
                Node::Split {
                    metric, children, ..
                } => {
                    let v = record.value(*metric);
                    let idx = children
                        .iter()
                        .position(|c| c.interval.contains(v))
                        .expect("child intervals cover the real line");
                    path.push(idx);
                    conditions.push(Condition {
                        metric: *metric,
                        interval: children[idx].interval,
                    });
                    node = &children[idx].node;
                }
            }
        }
    }

    /// Leaves under the ancestor of `branch` at depth `lvl` (root = 0), other
    /// than the branch's own leaf. A negative `lvl` is above the root.
    pub fn siblings_at(&self, branch: &Branch, lvl: isize) -> Siblings {
        if lvl < 0 || lvl as usize > branch.depth() {
            return Siblings {
                branches: Vec::new(),
                exhausted: true,
            };
        }
        let lvl = lvl as usize;
        let mut node = &self.root;
        for &i in &branch.path[..lvl] {
            match node {
                Node::Split { children, .. } => node = &children[i].node,
                Node::Leaf(_) => unreachable!("branch path longer than tree"),
            }
        }
        let mut out = Vec::new();
        collect_leaves(
            node,
            branch.path[..lvl].to_vec(),
            branch.conditions[..lvl].to_vec(),
            &mut out,
        );
        out.retain(|b| b.path != branch.path);
        Siblings {
            branches: out,
            exhausted: false,
        }
    }

    /// Every leaf, in left-to-right order.
    pub fn leaves(&self) -> Vec<Branch> {
        let mut out = Vec::new();
        collect_leaves(&self.root, Vec::new(), Vec::new(), &mut out);
        out
    }

    pub fn predict_defective(&self, record: &ClassRecord, threshold: f64) -> bool {
        self.locate(record).score > threshold
    }

    pub fn depth(&self) -> usize {
        self.leaves().iter().map(Branch::depth).max().unwrap_or(0)
    }
}

fn collect_leaves(
    node: &Node,
    path: Vec<usize>,
    conditions: Vec<Condition>,
    out: &mut Vec<Branch>,
) {
    match node {
        Node::Leaf(leaf) => out.push(Branch {
            path,
            conditions,
            score: leaf.score,
            support: leaf.support,
        }),
        Node::Split {
            metric, children, ..
        } => {
            for (i, c) in children.iter().enumerate() {
                let mut p = path.clone();
                p.push(i);
                let mut cs = conditions.clone();
                cs.push(Condition {
                    metric: *metric,
                    interval: c.interval,
                });
                collect_leaves(&c.node, p, cs, out);
            }
        }
    }
}

struct Builder<'a> {
    bins: &'a [BinMap],
    max_depth: usize,
    min_leaf: usize,
}

/// Contiguous run of range indices grouped into one child.
#[derive(Debug, Clone, Copy)]
struct RangeGroup {
    last_range: usize,
    neg: usize,
    pos: usize,
}

impl RangeGroup {
    fn n(&self) -> usize {
        self.neg + self.pos
    }
}

impl Builder<'_> {
    fn leaf(records: &[&ClassRecord], level: usize) -> Node {
        let defects: u64 = records.iter().map(|r| u64::from(r.defects)).sum();
        Node::Leaf(Leaf {
            score: defects as f64 / records.len() as f64,
            support: records.len(),
            defects,
            level,
        })
    }

    fn grow(&self, records: &[&ClassRecord], used: [bool; METRIC_COUNT], level: usize) -> Node {
        let n = records.len();
        let pos = records.iter().filter(|r| r.is_defective()).count();
        let neg = n - pos;
        if level >= self.max_depth || n < 2 * self.min_leaf || pos == 0 || neg == 0 {
            return Self::leaf(records, level);
        }
        let parent = binary_entropy(neg, pos);
        let mut best: Option<(f64, Metric, Vec<RangeGroup>)> = None;
        for m in Metric::ALL {
            if used[m.index()] || self.bins[m.index()].cut_points.is_empty() {
                continue;
            }
            let groups = self.groups(records, m);
            if groups.len() < 2 {
                continue;
            }
            let child: f64 = groups
                .iter()
                .map(|g| g.n() as f64 / n as f64 * binary_entropy(g.neg, g.pos))
                .sum();
            let gain = parent - child;
            if gain > 1e-12 && best.as_ref().is_none_or(|(bg, _, _)| gain > *bg) {
                best = Some((gain, m, groups));
            }
        }
        let Some((_, metric, groups)) = best else {
            return Self::leaf(records, level);
        };

        let cuts = &self.bins[metric.index()].cut_points;
        let mut used = used;
        used[metric.index()] = true;
        let mut children = Vec::with_capacity(groups.len());
        let mut lo = None;
        for (gi, g) in groups.iter().enumerate() {
            let hi = if gi + 1 == groups.len() {
                None
            } else {
                Some(cuts[g.last_range])
            };
            let interval = Interval { lo, hi };
            let subset: Vec<&ClassRecord> = records
                .iter()
                .copied()
                .filter(|r| interval.contains(r.value(metric)))
                .collect();
            debug_assert_eq!(subset.len(), g.n());
            children.push(Child {
                interval,
                node: self.grow(&subset, used, level + 1),
            });
            lo = hi;
        }
        Node::Split {
            metric,
            level,
            support: n,
            children,
        }
    }

    /// Non-empty ranges of `m`, with undersized groups merged into a neighbour.
    fn groups(&self, records: &[&ClassRecord], m: Metric) -> Vec<RangeGroup> {
        let bins = &self.bins[m.index()];
        let mut counts = vec![(0usize, 0usize); bins.range_count()];
        for r in records {
            let c = &mut counts[bins.apply(r.value(m))];
            if r.is_defective() {
                c.1 += 1
            } else {
                c.0 += 1
            }
        }
        let mut groups: Vec<RangeGroup> = counts
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| a + b > 0)
            .map(|(i, &(neg, pos))| RangeGroup {
                last_range: i,
                neg,
                pos,
            })
            .collect();
        while groups.len() > 1 {
            let Some(i) = groups.iter().position(|g| g.n() < self.min_leaf) else {
                break;
            };
            // Merge into the smaller neighbour; ties go left.
            let j = match (i.checked_sub(1), (i + 1 < groups.len()).then_some(i + 1)) {
                (Some(l), Some(r)) => {
                    if groups[l].n() <= groups[r].n() {
                        l
                    } else {
                        r
                    }
                }
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => unreachable!(),
            };
            let (a, b) = (i.min(j), i.max(j));
            let merged = RangeGroup {
                last_range: groups[b].last_range,
                neg: groups[a].neg + groups[b].neg,
                pos: groups[a].pos + groups[b].pos,
            };
            groups[a] = merged;
            groups.remove(b);
        }
        groups
    }
}
