//! Bellwether discovery for cross-project planning (BELLTREE).
//!
//! Every project trains a defect predictor that is scored on every other
//! project; the project with the highest median cross-score is the
//! bellwether, and XTREE trained on its pooled releases plans for the rest.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{ClassRecord, Community};
use crate::dtree::{DecisionTree, TreeParams, DEFAULT_PREDICT_THRESHOLD};
use crate::error::{Error, Result};
use crate::eval::KTestResult;
use crate::planners::{xtree_plan, Plan, PlannerKind};
use crate::stats::median;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityMeasure {
    /// Harmonic mean of recall and `1 − false alarm`.
    #[default]
    GScore,
    F1,
    Accuracy,
}

impl QualityMeasure {
    pub fn name(self) -> &'static str {
        match self {
            QualityMeasure::GScore => "g_score",
            QualityMeasure::F1 => "f1",
            QualityMeasure::Accuracy => "accuracy",
        }
    }

    /// Score predictions; `None` when `actual` holds a single label.
    pub fn score(self, predicted: &[bool], actual: &[bool]) -> Option<f64> {
        assert_eq!(predicted.len(), actual.len());
        let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
        if tp + fn_ == 0 || fp + tn == 0 {
            return None;
        }
        let recall = tp as f64 / (tp + fn_) as f64;
        Some(match self {
            QualityMeasure::GScore => {
                let spec = 1.0 - fp as f64 / (fp + tn) as f64;
                harmonic(recall, spec)
            }
            QualityMeasure::F1 => {
                let precision = if tp + fp == 0 {
                    0.0
                } else {
                    tp as f64 / (tp + fp) as f64
                };
                harmonic(precision, recall)
            }
            QualityMeasure::Accuracy => (tp + tn) as f64 / actual.len() as f64,
        })
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

impl fmt::Display for QualityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QualityMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "g" | "g_score" | "gscore" => Ok(QualityMeasure::GScore),
            "f1" => Ok(QualityMeasure::F1),
            "accuracy" | "acc" => Ok(QualityMeasure::Accuracy),
            _ => Err(format!("unknown quality measure `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellwetherReport {
    /// Project names, sorted; rows and columns of `scores` follow this order.
    pub community: Vec<String>,
    pub quality_measure: QualityMeasure,
    /// `scores[source][target]`; `None` on the diagonal and for
    /// single-label targets.
    pub scores: Vec<Vec<Option<f64>>>,
    pub per_source_median: BTreeMap<String, Option<f64>>,
    pub bellwether: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Keep,
    Rediscover,
}

impl BellwetherReport {
    /// Keep the bellwether only if its plans reduced more defects than they
    /// added on the evaluated project.
    pub fn validate(&self, outcome: &KTestResult) -> Decision {
        validate(outcome)
    }
}

pub fn validate(outcome: &KTestResult) -> Decision {
    match (outcome.aupec_reduced, outcome.aupec_increased) {
        (Some(r), Some(i)) if r > i => Decision::Keep,
        _ => Decision::Rediscover,
    }
}

/// Round-robin cross-project prediction; the bellwether maximises the median
/// score over its targets (ties go to the lexicographically first name).
pub fn discover(
    community: &Community,
    measure: QualityMeasure,
    params: TreeParams,
) -> Result<BellwetherReport> {
    if community.projects.len() < 2 {
        return Err(Error::TooFewProjects(community.projects.len()));
    }
    let mut projects: Vec<_> = community.projects.iter().collect();
    projects.sort_by(|a, b| a.name.cmp(&b.name));
    let pooled: Vec<Vec<ClassRecord>> = projects.iter().map(|p| p.pooled()).collect();
    let labels: Vec<Vec<bool>> = pooled
        .iter()
        .map(|rs| rs.iter().map(ClassRecord::is_defective).collect())
        .collect();

    let row = |src: usize| -> Vec<Option<f64>> {
        let tree = DecisionTree::build(&pooled[src], params);
        (0..pooled.len())
            .map(|dst| {
                if dst == src {
                    return None;
                }
                let predicted: Vec<bool> = pooled[dst]
                    .iter()
                    .map(|r| tree.predict_defective(r, DEFAULT_PREDICT_THRESHOLD))
                    .collect();
                measure.score(&predicted, &labels[dst])
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let scores: Vec<Vec<Option<f64>>> = {
        use rayon::prelude::*;
        (0..pooled.len()).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let scores: Vec<Vec<Option<f64>>> = (0..pooled.len()).map(row).collect();

    let mut per_source_median = BTreeMap::new();
    let mut best: Option<(usize, f64)> = None;
    for (src, row) in scores.iter().enumerate() {
        let defined: Vec<f64> = row.iter().flatten().copied().collect();
        let m = median(&defined);
        per_source_median.insert(projects[src].name.clone(), m);
        if let Some(m) = m {
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((src, m));
            }
        }
    }
    let (winner, _) = best.ok_or(Error::NoBellwether)?;
    Ok(BellwetherReport {
        community: projects.iter().map(|p| p.name.clone()).collect(),
        quality_measure: measure,
        scores,
        per_source_median,
        bellwether: projects[winner].name.clone(),
    })
}

/// XTREE planning with the tree grown on the bellwether's pooled releases.
///
/// # Panics
/// If `bellwether_data` is empty.
pub fn belltree_plan(
    bellwether_data: &[ClassRecord],
    record: &ClassRecord,
    gamma: f64,
    seed: u64,
    params: TreeParams,
) -> Plan {
    let tree = DecisionTree::build(bellwether_data, params);
    let mut plan = xtree_plan(&tree, record, gamma, seed);
    plan.source_planner = PlannerKind::Belltree.name().to_string();
    plan
}
