//! Independent reference computations shared by the integration and
//! acceptance suites. Nothing here calls the code path it checks.
#![allow(dead_code)]

use planwise::action::Direction;
use planwise::data::{ClassRecord, Project, VersionedDataset};
use planwise::metric::{Metric, MetricValues};
use planwise::planners::{Action, Plan, Planner};

/// Entropy of a two-class histogram, written out longhand.
fn h2(neg: usize, pos: usize) -> f64 {
    let n = (neg + pos) as f64;
    let mut acc = 0.0;
    for c in [neg, pos] {
        if c > 0 {
            let p = c as f64 / n;
            acc += -p * p.log2();
        }
    }
    acc
}

fn counts(items: &[(f64, bool)]) -> (usize, usize) {
    let pos = items.iter().filter(|x| x.1).count();
    (items.len() - pos, pos)
}

/// Brute-force Fayyad–Irani MDLP: every class-boundary midpoint is tried by
/// re-partitioning the items from scratch.
pub fn mdlp_oracle(values: &[f64], labels: &[bool]) -> Vec<f64> {
    let items: Vec<(f64, bool)> = values.iter().copied().zip(labels.iter().copied()).collect();
    let mut cuts = Vec::new();
    oracle_split(&items, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    cuts
}

fn label_set(items: &[(f64, bool)], v: f64) -> (bool, bool) {
    let has_neg = items.iter().any(|x| x.0 == v && !x.1);
    let has_pos = items.iter().any(|x| x.0 == v && x.1);
    (has_neg, has_pos)
}

fn oracle_split(items: &[(f64, bool)], cuts: &mut Vec<f64>) {
    let (neg, pos) = counts(items);
    if neg == 0 || pos == 0 {
        return;
    }
    let mut distinct: Vec<f64> = items.iter().map(|x| x.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let n = items.len() as f64;
    let mut best: Option<(f64, f64)> = None;
    for w in distinct.windows(2) {
        let (a, b) = (label_set(items, w[0]), label_set(items, w[1]));
        let single = |s: (bool, bool)| s.0 != s.1;
        if single(a) && single(b) && a == b {
            continue;
        }
        let cut = (w[0] + w[1]) / 2.0;
        let left: Vec<_> = items.iter().copied().filter(|x| x.0 <= cut).collect();
        let right: Vec<_> = items.iter().copied().filter(|x| x.0 > cut).collect();
        let (ln, lp) = counts(&left);
        let (rn, rp) = counts(&right);
        let e = left.len() as f64 / n * h2(ln, lp) + right.len() as f64 / n * h2(rn, rp);
        if best.is_none_or(|(_, be)| e < be) {
            best = Some((cut, e));
        }
    }
    let Some((cut, e)) = best else { return };
    let left: Vec<_> = items.iter().copied().filter(|x| x.0 <= cut).collect();
    let right: Vec<_> = items.iter().copied().filter(|x| x.0 > cut).collect();
    let (ln, lp) = counts(&left);
    let (rn, rp) = counts(&right);
    let k = |a: usize, b: usize| (usize::from(a > 0) + usize::from(b > 0)) as f64;
    let ent = h2(neg, pos);
    let gain = ent - e;
    let delta = (3f64.powf(k(neg, pos)) - 2.0).log2()
        - (k(neg, pos) * ent - k(ln, lp) * h2(ln, lp) - k(rn, rp) * h2(rn, rp));
    if gain > (n - 1.0).log2() / n + delta / n {
        cuts.push(cut);
        oracle_split(&left, cuts);
        oracle_split(&right, cuts);
    }
}

/// Exhaustive Oliveira grid: `(p, k, penalty)` minimising the penalty with
/// ties to larger `p`, then smaller `k`. Compliance is recomputed by counting.
pub fn oliveira_oracle(values: &[f64], min_compliance: f64, tail: f64) -> (u32, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = ((tail / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    let q = sorted[rank - 1];
    let mut tail_vals: Vec<f64> = sorted.iter().copied().filter(|&v| v > q).collect();
    if tail_vals.is_empty() {
        tail_vals = sorted.iter().copied().filter(|&v| v >= q).collect();
    }
    let m = tail_vals.len();
    let ideal = if m % 2 == 1 {
        tail_vals[m / 2]
    } else {
        (tail_vals[m / 2 - 1] + tail_vals[m / 2]) / 2.0
    };
    let mut ks = sorted.clone();
    ks.dedup();
    let mut grid = Vec::new();
    for p in 1..=99u32 {
        for &k in &ks {
            let share = 100.0 * values.iter().filter(|&&v| v <= k).count() as f64 / n as f64;
            let rate = if share >= p as f64 { 100.0 } else { 0.0 };
            let p1 = (min_compliance - rate).max(0.0);
            let p2 = if ideal > 0.0 {
                (k - ideal).abs() / ideal
            } else {
                (k - ideal).abs()
            };
            grid.push((p, k, p1 + p2));
        }
    }
    grid.sort_by(|a, b| {
        a.2.total_cmp(&b.2)
            .then(b.0.cmp(&a.0))
            .then(a.1.total_cmp(&b.1))
    });
    grid[0]
}

pub fn record(name: &str, values: &[(Metric, f64)], defects: u32) -> ClassRecord {
    let mut m = MetricValues::zeros();
    for &(k, v) in values {
        m[k] = v;
    }
    ClassRecord::new(name, m, defects)
}

/// Planner that replays fixed per-class plans.
pub struct FixedPlanner(pub Vec<(String, Vec<(Metric, Direction)>)>);

impl Planner for FixedPlanner {
    fn name(&self) -> &str {
        "fixed"
    }

    fn plan(&self, record: &ClassRecord) -> Plan {
        let mut plan = Plan::no_change(&record.class_name, "fixed");
        if let Some((_, acts)) = self.0.iter().find(|(n, _)| *n == record.class_name) {
            for &(m, d) in acts {
                plan.actions.insert(
                    m,
                    Action {
                        direction: d,
                        target_range: None,
                        suggested_value: None,
                    },
                );
            }
        }
        plan
    }
}

/// The five-class K-test fixture and its hand-computed outcome.
pub struct KTestFixture {
    pub project: Project,
    pub planner: Vec<(String, Vec<(Metric, Direction)>)>,
}

/// Hand table: `(bucket midpoint, reduced, increased, classes)` for the
/// non-empty buckets; every other bucket is all zeros.
pub const KTEST_NONZERO: [(f64, u64, u64, usize); 3] =
    [(75.0, 0, 1, 1), (85.0, 3, 0, 2), (95.0, 3, 2, 2)];
pub const KTEST_MATCHED: usize = 5;
pub const KTEST_DEFECTS_BEFORE: u64 = 10;
pub const KTEST_DEFECTS_AFTER: u64 = 7;
/// Simpson over the 10 midpoints (h = 10): points 0..=8 by the 1/3 rule,
/// the last panel by the trapezoid rule.
/// reduced:   f8 = 3 (weight 1) → 10/3·3 = 10; trapezoid (3+3)·10/2 = 30.
pub const KTEST_AREA_REDUCED: f64 = 40.0;
/// increased: f7 = 1 (weight 4) → 10/3·4 = 40/3; trapezoid (0+2)·10/2 = 10.
pub const KTEST_AREA_INCREASED: f64 = 70.0 / 3.0;
/// 40 / (10 defects × 90 span) × 100.
pub const KTEST_AUPEC_REDUCED: f64 = 40.0 / 9.0;
/// (70/3) / (7 defects × 90 span) × 100.
pub const KTEST_AUPEC_INCREASED: f64 = 100.0 / 27.0;
/// Changes per plan over all six planned classes: 2,1,3,0,5,1.
pub const KTEST_CHANGES_MEDIAN: f64 = 1.5;
pub const KTEST_CHANGES_MEAN: f64 = 2.0;

pub fn ktest_fixture() -> KTestFixture {
    use Direction::*;
    use Metric::*;
    let v1 = VersionedDataset::new("toy", "1", 0, vec![record("A", &[(Loc, 100.0)], 1)]).unwrap();
    // Developer changes j→k:
    //   A: loc −, rfc −            plan loc −, rfc −                  → 20/20 = 100
    //   B: loc +                   plan loc −                          → 19/20 = 95
    //   C: (none)                  plan loc −, rfc −, wmc −            → 17/20 = 85
    //   D: wmc −, cbo +, loc −     plan (none)                         → 17/20 = 85
    //   E: dit +                   plan dit −, loc −, rfc −, wmc −, cbo − → 15/20 = 75
    //   F: deleted in k (excluded); G: new in k (excluded)
    let v2 = VersionedDataset::new(
        "toy",
        "2",
        1,
        vec![
            record("A", &[(Loc, 100.0), (Rfc, 10.0)], 4),
            record("B", &[(Loc, 100.0)], 1),
            record("C", &[(Loc, 40.0), (Rfc, 8.0), (Wmc, 3.0)], 2),
            record("D", &[(Wmc, 5.0), (Cbo, 2.0), (Loc, 10.0)], 3),
            record("E", &[(Dit, 1.0), (Loc, 30.0)], 0),
            record("F", &[(Loc, 500.0)], 5),
        ],
    )
    .unwrap();
    let v3 = VersionedDataset::new(
        "toy",
        "3",
        2,
        vec![
            record("A", &[(Loc, 50.0), (Rfc, 5.0)], 1),
            record("B", &[(Loc, 150.0)], 3),
            record("C", &[(Loc, 40.0), (Rfc, 8.0), (Wmc, 3.0)], 2),
            record("D", &[(Wmc, 3.0), (Cbo, 4.0), (Loc, 9.0)], 0),
            record("E", &[(Dit, 2.0), (Loc, 30.0)], 1),
            record("G", &[(Loc, 1.0)], 9),
        ],
    )
    .unwrap();
    let planner = vec![
        ("A".to_string(), vec![(Loc, Decrease), (Rfc, Decrease)]),
        ("B".to_string(), vec![(Loc, Decrease)]),
        (
            "C".to_string(),
            vec![(Loc, Decrease), (Rfc, Decrease), (Wmc, Decrease)],
        ),
        ("D".to_string(), vec![]),
        (
            "E".to_string(),
            vec![
                (Dit, Decrease),
                (Loc, Decrease),
                (Rfc, Decrease),
                (Wmc, Decrease),
                (Cbo, Decrease),
            ],
        ),
        ("F".to_string(), vec![(Noc, Increase)]),
    ];
    KTestFixture {
        project: Project::new("toy", vec![v1, v2, v3]).unwrap(),
        planner,
    }
}
