//! Plan generators: XTREE (and its cross-project use, BELLTREE) plus three
//! threshold-based baselines from the metrics-threshold literature.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::{ActionVector, Direction};
use crate::data::ClassRecord;
use crate::dtree::{Branch, DecisionTree, TreeParams};
use crate::metric::Metric;
use crate::stats::{fit_univariate_logistic, LogisticFit};

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_ALVES_PERCENTILE: f64 = 70.0;
pub const DEFAULT_P0: f64 = 0.05;
pub const DEFAULT_P1: f64 = 0.05;
pub const DEFAULT_MIN_COMPLIANCE: f64 = 90.0;
pub const DEFAULT_TAIL: f64 = 90.0;
pub const DEFAULT_SEED: u64 = 0x5EED_2018;
/// Significance level of the logistic screening shared by Alves and Shatnawi.
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRange {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target_range: Option<TargetRange>,
    /// A concrete value drawn from `target_range` (XTREE only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suggested_value: Option<f64>,
}

impl Action {
    pub const HOLD: Action = Action {
        direction: Direction::Hold,
        target_range: None,
        suggested_value: None,
    };
}

/// Per-metric recommendations for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub class_name: String,
    pub source_planner: String,
    /// Always holds all 20 metrics, in canonical order.
    pub actions: BTreeMap<Metric, Action>,
    /// Current leaf score minus desired leaf score (tree planners only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_score_drop: Option<f64>,
}

impl Plan {
    pub fn no_change(class_name: impl Into<String>, planner: impl Into<String>) -> Plan {
        Plan {
            class_name: class_name.into(),
            source_planner: planner.into(),
            actions: Metric::ALL.iter().map(|&m| (m, Action::HOLD)).collect(),
            expected_score_drop: None,
        }
    }

    pub fn action(&self, m: Metric) -> Action {
        self.actions.get(&m).copied().unwrap_or(Action::HOLD)
    }

    pub fn directions(&self) -> ActionVector {
        let mut v = ActionVector::hold();
        for (&m, a) in &self.actions {
            v.set(m, a.direction);
        }
        v
    }

    pub fn changes(&self) -> usize {
        self.actions
            .values()
            .filter(|a| a.direction.is_change())
            .count()
    }

    /// Compact `+/−/·` row in canonical metric order.
    pub fn row(&self) -> String {
        self.directions().to_string()
    }
}

pub trait Planner: Send + Sync {
    fn name(&self) -> &str;
    fn plan(&self, record: &ClassRecord) -> Plan;
}

/// The five planners the toolkit knows how to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Xtree,
    Belltree,
    Alves,
    Shatnawi,
    Oliveira,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 5] = [
        PlannerKind::Xtree,
        PlannerKind::Belltree,
        PlannerKind::Alves,
        PlannerKind::Shatnawi,
        PlannerKind::Oliveira,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Xtree => "xtree",
            PlannerKind::Belltree => "belltree",
            PlannerKind::Alves => "alves",
            PlannerKind::Shatnawi => "shatnawi",
            PlannerKind::Oliveira => "oliveira",
        }
    }

    pub fn is_baseline(self) -> bool {
        matches!(
            self,
            PlannerKind::Alves | PlannerKind::Shatnawi | PlannerKind::Oliveira
        )
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown planner `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub gamma: f64,
    pub percentile: f64,
    pub p0: f64,
    pub p1: f64,
    pub min_compliance: f64,
    pub tail: f64,
    pub tree: TreeParams,
    pub seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            gamma: DEFAULT_GAMMA,
            percentile: DEFAULT_ALVES_PERCENTILE,
            p0: DEFAULT_P0,
            p1: DEFAULT_P1,
            min_compliance: DEFAULT_MIN_COMPLIANCE,
            tail: DEFAULT_TAIL,
            tree: TreeParams::default(),
            seed: DEFAULT_SEED,
        }
    }
}

/// Train `kind` on `train`. For BELLTREE pass the bellwether's pooled records.
///
/// # Panics
/// If `train` is empty.
pub fn train(kind: PlannerKind, params: &PlannerParams, train: &[ClassRecord]) -> Box<dyn Planner> {
    match kind {
        PlannerKind::Xtree | PlannerKind::Belltree => Box::new(XTree {
            name: kind.name().to_string(),
            tree: DecisionTree::build(train, params.tree),
            gamma: params.gamma,
            seed: params.seed,
        }),
        PlannerKind::Alves => Box::new(ThresholdPlanner::new(
            kind.name(),
            alves_thresholds(train, params.percentile),
        )),
        PlannerKind::Shatnawi => Box::new(ThresholdPlanner::new(
            kind.name(),
            shatnawi_thresholds(train, params.p0, params.p1),
        )),
        PlannerKind::Oliveira => Box::new(ThresholdPlanner::new(
            kind.name(),
            oliveira_thresholds(train, params.min_compliance, params.tail),
        )),
    }
}

/// Contrast-set planner over a trained [`DecisionTree`].
#[derive(Debug, Clone)]
pub struct XTree {
    pub name: String,
    pub tree: DecisionTree,
    pub gamma: f64,
    pub seed: u64,
}

impl XTree {
    pub fn new(tree: DecisionTree, gamma: f64, seed: u64) -> XTree {
        XTree {
            name: PlannerKind::Xtree.name().into(),
            tree,
            gamma,
            seed,
        }
    }
}

impl Planner for XTree {
    fn name(&self) -> &str {
        &self.name
    }

    fn plan(&self, record: &ClassRecord) -> Plan {
        let mut plan = xtree_plan(&self.tree, record, self.gamma, self.seed);
        plan.source_planner = self.name.clone();
        plan
    }
}

fn condition_distance(a: &Branch, b: &Branch) -> usize {
    let only_a = a
        .conditions
        .iter()
        .filter(|c| !b.conditions.contains(c))
        .count();
    let only_b = b
        .conditions
        .iter()
        .filter(|c| !a.conditions.contains(c))
        .count();
    only_a + only_b
}

/// Find the closest sibling leaf scoring below `gamma × current`, ascending
/// one level at a time; `None` once the search climbs past the root.
pub fn desired_branch(tree: &DecisionTree, current: &Branch, gamma: f64) -> Option<Branch> {
    let limit = gamma * current.score;
    let mut lvl = current.depth() as isize - 1;
    loop {
        let siblings = tree.siblings_at(current, lvl);
        if siblings.exhausted {
            return None;
        }
        let best = siblings
            .branches
            .into_iter()
            .filter(|b| b.score < limit)
            .min_by(|a, b| {
                condition_distance(current, a)
                    .cmp(&condition_distance(current, b))
                    .then(a.score.total_cmp(&b.score))
                    .then_with(|| a.path.cmp(&b.path))
            });
        if best.is_some() {
            return best;
        }
        lvl -= 1;
    }
}

/// XTREE: move `record` from its current leaf toward the closest better leaf.
pub fn xtree_plan(tree: &DecisionTree, record: &ClassRecord, gamma: f64, seed: u64) -> Plan {
    let name = PlannerKind::Xtree.name();
    let current = tree.locate(record);
    let Some(desired) = desired_branch(tree, &current, gamma) else {
        return Plan::no_change(&record.class_name, name);
    };
    let mut plan = Plan::no_change(&record.class_name, name);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for cond in &desired.conditions {
        let v = record.value(cond.metric);
        if cond.interval.contains(v) {
            continue;
        }
        let direction = match cond.interval.hi {
            Some(hi) if v > hi => Direction::Decrease,
            _ => Direction::Increase,
        };
        let (min, max) = tree.bounds(cond.metric);
        let mut low = cond.interval.lo.unwrap_or(min);
        let high = cond.interval.hi.unwrap_or(max);
        if low > high {
            low = high;
        }
        let suggested = if low < high {
            rng.gen_range(low..=high)
        } else {
            low
        };
        plan.actions.insert(
            cond.metric,
            Action {
                direction,
                target_range: Some(TargetRange { low, high }),
                suggested_value: Some(suggested),
            },
        );
    }
    plan.expected_score_drop = Some(current.score - desired.score);
    plan
}

/// An upper bound a baseline wants a metric kept under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    pub metric: Metric,
    pub upper: f64,
    /// Share of entities the bound applies to (relative thresholds only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_fraction: Option<f64>,
}

/// Univariate logistic fit of every metric against `defects > 0`.
pub fn metric_fits(train: &[ClassRecord]) -> Vec<(Metric, LogisticFit)> {
    let labels: Vec<bool> = train.iter().map(ClassRecord::is_defective).collect();
    Metric::ALL
        .iter()
        .map(|&m| {
            let x: Vec<f64> = train.iter().map(|r| r.value(m)).collect();
            (m, fit_univariate_logistic(&x, &labels))
        })
        .collect()
}

/// Smallest value whose cumulative LOC-weight reaches `percentile`%.
///
/// Classes with zero total LOC fall back to equal weights.
pub fn weighted_percentile_threshold(values: &[f64], loc: &[f64], percentile: f64) -> f64 {
    assert_eq!(values.len(), loc.len());
    assert!(!values.is_empty());
    let total: f64 = loc.iter().sum();
    let weights: Vec<f64> = if total > 0.0 {
        loc.iter().map(|l| l / total).collect()
    } else {
        vec![1.0 / values.len() as f64; values.len()]
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let target = percentile / 100.0;
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= target - 1e-12 {
            return values[i];
        }
    }
    values[*order.last().unwrap()]
}

/// Alves et al.: LOC-weighted percentile thresholds for metrics that pass
/// the logistic screening.
pub fn alves_thresholds(train: &[ClassRecord], percentile: f64) -> Vec<ThresholdRule> {
    let loc: Vec<f64> = train.iter().map(|r| r.value(Metric::Loc)).collect();
    metric_fits(train)
        .into_iter()
        .filter(|(_, fit)| fit.is_significant(SIGNIFICANCE))
        .map(|(m, _)| {
            let values: Vec<f64> = train.iter().map(|r| r.value(m)).collect();
            ThresholdRule {
                metric: m,
                upper: weighted_percentile_threshold(&values, &loc, percentile),
                p_fraction: None,
            }
        })
        .collect()
}

/// Value of Acceptable Risk Level: the metric value at which the fitted
/// logistic model reaches defect probability `p1`.
pub fn varl(alpha: f64, beta: f64, p1: f64) -> f64 {
    ((p1 / (1.0 - p1)).ln() - alpha) / beta
}

/// Shatnawi: VARL thresholds for metrics significant at level `p0`.
pub fn shatnawi_thresholds(train: &[ClassRecord], p0: f64, p1: f64) -> Vec<ThresholdRule> {
    metric_fits(train)
        .into_iter()
        .filter(|(_, fit)| fit.is_significant(p0) && fit.beta != 0.0)
        .filter_map(|(m, fit)| {
            let t = varl(fit.alpha, fit.beta, p1);
            let (lo, hi) = train
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r.value(m)), hi.max(r.value(m)))
                });
            (t.is_finite() && t > 0.0 && t >= lo && t <= hi).then_some(ThresholdRule {
                metric: m,
                upper: t,
                p_fraction: None,
            })
        })
        .collect()
}

/// Chosen `(p, k)` pair for one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeThreshold {
    pub p: u32,
    pub k: f64,
    pub penalty: f64,
}

/// Median of the values above the `tail`-th (nearest-rank) percentile.
pub fn tail_median(sorted: &[f64], tail: f64) -> f64 {
    let n = sorted.len();
    let rank = ((tail / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    let q = sorted[rank - 1];
    let above: Vec<f64> = sorted.iter().copied().filter(|&v| v > q).collect();
    let tail_values = if above.is_empty() {
        sorted.iter().copied().filter(|&v| v >= q).collect()
    } else {
        above
    };
    crate::stats::median(&tail_values).unwrap_or(q)
}

/// Whether "p% of entities have M ≤ k" holds, as a 0/100 compliance rate.
fn compliance_rate(at_or_below: usize, n: usize, p: u32) -> f64 {
    if at_or_below * 100 >= p as usize * n {
        100.0
    } else {
        0.0
    }
}

/// Oliveira et al. relative threshold for one metric's values.
///
/// Searches `p ∈ 1..=99` and `k` over the distinct observed values, minimising
/// `max(0, min_compliance − ComplianceRate) + |k − tail median| / tail median`.
/// Ties prefer the larger `p`, then the smaller `k`.
pub fn oliveira_relative_threshold(
    values: &[f64],
    min_compliance: f64,
    tail: f64,
) -> RelativeThreshold {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let ideal = tail_median(&sorted, tail);
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        if i + 1 == n || sorted[i + 1] != v {
            candidates.push((v, i + 1));
        }
    }
    let mut best: Option<RelativeThreshold> = None;
    for p in (1..=99u32).rev() {
        for &(k, below) in &candidates {
            let penalty1 = (min_compliance - compliance_rate(below, n, p)).max(0.0);
            let penalty2 = if ideal > 0.0 {
                (k - ideal).abs() / ideal
            } else {
                (k - ideal).abs()
            };
            let penalty = penalty1 + penalty2;
            if best.is_none_or(|b| penalty < b.penalty) {
                best = Some(RelativeThreshold { p, k, penalty });
            }
        }
    }
    best.expect("non-empty candidate grid")
}

pub fn oliveira_thresholds(
    train: &[ClassRecord],
    min_compliance: f64,
    tail: f64,
) -> Vec<ThresholdRule> {
    if train.is_empty() {
        return Vec::new();
    }
    Metric::ALL
        .iter()
        .map(|&m| {
            let values: Vec<f64> = train.iter().map(|r| r.value(m)).collect();
            let rt = oliveira_relative_threshold(&values, min_compliance, tail);
            ThresholdRule {
                metric: m,
                upper: rt.k,
                p_fraction: Some(rt.p as f64 / 100.0),
            }
        })
        .collect()
}

/// Baselines only ever ask to bring a metric down to `(0, upper]`.
pub fn threshold_plan(rules: &[ThresholdRule], record: &ClassRecord, planner: &str) -> Plan {
    let mut plan = Plan::no_change(&record.class_name, planner);
    for rule in rules {
        if record.value(rule.metric) > rule.upper {
            plan.actions.insert(
                rule.metric,
                Action {
                    direction: Direction::Decrease,
                    target_range: Some(TargetRange {
                        low: 0.0,
                        high: rule.upper,
                    }),
                    suggested_value: None,
                },
            );
        }
    }
    plan
}

#[derive(Debug, Clone)]
pub struct ThresholdPlanner {
    pub name: String,
    pub rules: Vec<ThresholdRule>,
}

impl ThresholdPlanner {
    pub fn new(name: impl Into<String>, rules: Vec<ThresholdRule>) -> Self {
        ThresholdPlanner {
            name: name.into(),
            rules,
        }
    }
}

impl Planner for ThresholdPlanner {
    fn name(&self) -> &str {
        &self.name
    }

    fn plan(&self, record: &ClassRecord) -> Plan {
        threshold_plan(&self.rules, record, &self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricValues;

    fn rec(values: &[(Metric, f64)], defects: u32) -> ClassRecord {
        let mut m = MetricValues::zeros();
        for &(k, v) in values {
            m[k] = v;
        }
        ClassRecord::new("c", m, defects)
    }

    #[test]
    fn planner_names_parse() {
        assert_eq!("XTREE".parse::<PlannerKind>().unwrap(), PlannerKind::Xtree);
        assert!("nsga2".parse::<PlannerKind>().is_err());
    }

    #[test]
    fn alves_weighted_percentile() {
        let t = weighted_percentile_threshold(&[1.0, 2.0, 3.0], &[100.0, 100.0, 800.0], 70.0);
        assert_eq!(t, 3.0);
        for p in [1.0, 50.0, 99.0] {
            assert_eq!(weighted_percentile_threshold(&[4.0; 5], &[10.0; 5], p), 4.0);
        }
    }

    #[test]
    fn varl_examples() {
        assert_eq!(varl(0.0, 1.0, 0.5), 0.0);
        let v = varl(0.0, 1.0, 0.05);
        assert!((v - (1.0f64 / 19.0).ln()).abs() < 1e-12);
        assert!(v < 0.0);
        let v = varl(-3.0, 0.5, 0.05);
        assert!((v - ((1.0f64 / 19.0).ln() + 3.0) / 0.5).abs() < 1e-12);
        assert!((v - 0.1111).abs() < 1e-3);
    }

    #[test]
    fn threshold_plan_caps_high_values() {
        let rules = [ThresholdRule {
            metric: Metric::Loc,
            upper: 100.0,
            p_fraction: None,
        }];
        let low = threshold_plan(&rules, &rec(&[(Metric::Loc, 80.0)], 0), "alves");
        assert_eq!(low.changes(), 0);
        let high = threshold_plan(&rules, &rec(&[(Metric::Loc, 250.0)], 0), "alves");
        let a = high.action(Metric::Loc);
        assert_eq!(a.direction, Direction::Decrease);
        assert_eq!(
            a.target_range,
            Some(TargetRange {
                low: 0.0,
                high: 100.0
            })
        );
        assert_eq!(high.changes(), 1);
    }

    #[test]
    fn oliveira_max_k_always_complies() {
        let values: Vec<f64> = (1..=20).map(f64::from).collect();
        for p in 1..=99 {
            assert_eq!(compliance_rate(values.len(), values.len(), p), 100.0);
        }
    }

    #[test]
    fn oliveira_cc_example() {
        // 85 methods with CC ≤ 14, 15 above.
        let mut values: Vec<f64> = (0..85).map(|i| (i % 14 + 1) as f64).collect();
        values.extend((0..15).map(|i| 20.0 + i as f64));
        let sorted = {
            let mut s = values.clone();
            s.sort_by(f64::total_cmp);
            s
        };
        let below = sorted.iter().filter(|&&v| v <= 14.0).count();
        assert_eq!(below, 85);
        for min_c in [50.0, 85.0] {
            assert_eq!(
                (min_c - compliance_rate(below, sorted.len(), 85)).max(0.0),
                0.0
            );
        }
    }

    #[test]
    fn plan_row_and_changes() {
        let mut p = Plan::no_change("c", "x");
        assert_eq!(p.row(), "····················");
        p.actions.insert(
            Metric::Dit,
            Action {
                direction: Direction::Increase,
                target_range: None,
                suggested_value: None,
            },
        );
        assert_eq!(p.row(), "·+··················");
        assert_eq!(p.changes(), 1);
    }
}
