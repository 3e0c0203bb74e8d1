//! Planner evaluation: overlap with developer changes, the three-release
//! K-test, and area under the planner effectiveness curve (AUPEC).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::action::Direction;
use crate::data::{diff_versions, Project, VersionedDataset};
use crate::error::{Error, Result};
use crate::planners::{Plan, Planner};
use crate::stats::{median, simpson_integrate};

/// Number of equal-width overlap buckets on `[0, 100]`.
pub const BUCKETS: usize = 10;
const BUCKET_WIDTH: f64 = 100.0 / BUCKETS as f64;

/// Percentage of positions where the two action vectors agree (including
/// agreement on "no change"), over the whole metric universe.
///
/// # Panics
/// If the vectors have different lengths.
pub fn overlap(developer: &[Direction], planner: &[Direction]) -> f64 {
    assert_eq!(developer.len(), planner.len(), "metric universes differ");
    if developer.is_empty() {
        return 100.0;
    }
    let same = developer
        .iter()
        .zip(planner)
        .filter(|(a, b)| a == b)
        .count();
    100.0 * same as f64 / developer.len() as f64
}

pub fn changes_count(actions: &[Direction]) -> usize {
    actions.iter().filter(|d| d.is_change()).count()
}

pub fn bucket_of(overlap: f64) -> usize {
    ((overlap / BUCKET_WIDTH).floor().max(0.0) as usize).min(BUCKETS - 1)
}

pub fn bucket_midpoint(bucket: usize) -> f64 {
    (bucket as f64 + 0.5) * BUCKET_WIDTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Bucket midpoint, the curve abscissa.
    pub overlap_bucket: f64,
    pub defects_reduced: u64,
    pub defects_increased: u64,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangesSummary {
    pub plans: usize,
    pub min: usize,
    pub median: f64,
    pub mean: f64,
    pub max: usize,
}

impl ChangesSummary {
    pub fn of(counts: &[usize]) -> ChangesSummary {
        if counts.is_empty() {
            return ChangesSummary {
                plans: 0,
                min: 0,
                median: 0.0,
                mean: 0.0,
                max: 0,
            };
        }
        let as_f: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        ChangesSummary {
            plans: counts.len(),
            min: *counts.iter().min().unwrap(),
            median: median(&as_f).unwrap(),
            mean: as_f.iter().sum::<f64>() / as_f.len() as f64,
            max: *counts.iter().max().unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KTestResult {
    pub project: String,
    pub train_version: String,
    pub test_version: String,
    pub validation_version: String,
    pub planner: String,
    pub matched_classes: usize,
    /// Defects of matched classes in the planned release.
    pub matched_defects_before: u64,
    /// Defects of the same classes in the validation release.
    pub matched_defects_after: u64,
    pub curve: Vec<CurvePoint>,
    /// Raw Simpson areas under the reduced / increased curves.
    pub area_reduced: Option<f64>,
    pub area_increased: Option<f64>,
    /// Percent of the theoretical best; `None` when no class was matched.
    pub aupec_reduced: Option<f64>,
    pub aupec_increased: Option<f64>,
    pub changes_per_plan: ChangesSummary,
}

/// Per-class outcome feeding the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassOutcome {
    pub overlap: f64,
    pub defects_before: u32,
    pub defects_after: u32,
}

/// Bucket outcomes into the decile curve. Empty input gives an empty curve.
pub fn effectiveness_curve(outcomes: &[ClassOutcome]) -> Vec<CurvePoint> {
    if outcomes.is_empty() {
        return Vec::new();
    }
    let mut curve: Vec<CurvePoint> = (0..BUCKETS)
        .map(|b| CurvePoint {
            overlap_bucket: bucket_midpoint(b),
            defects_reduced: 0,
            defects_increased: 0,
            classes: 0,
        })
        .collect();
    for o in outcomes {
        let p = &mut curve[bucket_of(o.overlap)];
        let delta = i64::from(o.defects_before) - i64::from(o.defects_after);
        p.defects_reduced += delta.max(0) as u64;
        p.defects_increased += (-delta).max(0) as u64;
        p.classes += 1;
    }
    curve
}

/// `(raw area, percent of theoretical best)` for one ordinate of the curve.
///
/// The best case is `total` defects at every overlap level.
pub fn aupec(
    curve: &[CurvePoint],
    ordinate: impl Fn(&CurvePoint) -> u64,
    total: u64,
) -> Result<(f64, f64)> {
    let points: Vec<(f64, f64)> = curve
        .iter()
        .map(|p| (p.overlap_bucket, ordinate(p) as f64))
        .collect();
    let area = simpson_integrate(&points)?;
    let span = match (points.first(), points.last()) {
        (Some(a), Some(b)) => b.0 - a.0,
        _ => 0.0,
    };
    let best = total as f64 * span;
    let pct = if best > 0.0 {
        (100.0 * area / best).clamp(0.0, 100.0)
    } else {
        0.0
    };
    Ok((area, pct))
}

/// Train on `train`, plan for `test`, validate against `validation`.
pub fn ktest_versions(
    project: &str,
    train: &VersionedDataset,
    test: &VersionedDataset,
    validation: &VersionedDataset,
    trainer: &dyn Fn(&VersionedDataset) -> Box<dyn Planner>,
    epsilon: f64,
) -> Result<KTestResult> {
    let planner = trainer(train);
    let plans: Vec<Plan> = test.records.iter().map(|r| planner.plan(r)).collect();
    let counts: Vec<usize> = plans.iter().map(Plan::changes).collect();

    let developer = diff_versions(test, validation, epsilon);
    let after = validation.by_name();
    let mut outcomes = Vec::with_capacity(developer.len());
    for (record, plan) in test.records.iter().zip(&plans) {
        let Some(d) = developer.get(&record.class_name) else {
            continue;
        };
        let later = after[record.class_name.as_str()];
        outcomes.push(ClassOutcome {
            overlap: overlap(d, &plan.directions()),
            defects_before: record.defects,
            defects_after: later.defects,
        });
    }
    let before_total: u64 = outcomes.iter().map(|o| u64::from(o.defects_before)).sum();
    let after_total: u64 = outcomes.iter().map(|o| u64::from(o.defects_after)).sum();
    let curve = effectiveness_curve(&outcomes);
    let (reduced, increased) = if curve.is_empty() {
        (None, None)
    } else {
        (
            Some(aupec(&curve, |p| p.defects_reduced, before_total)?),
            Some(aupec(&curve, |p| p.defects_increased, after_total)?),
        )
    };

    Ok(KTestResult {
        project: project.to_string(),
        train_version: train.version.clone(),
        test_version: test.version.clone(),
        validation_version: validation.version.clone(),
        planner: planner.name().to_string(),
        matched_classes: outcomes.len(),
        matched_defects_before: before_total,
        matched_defects_after: after_total,
        curve,
        area_reduced: reduced.map(|r| r.0),
        area_increased: increased.map(|r| r.0),
        aupec_reduced: reduced.map(|r| r.1),
        aupec_increased: increased.map(|r| r.1),
        changes_per_plan: ChangesSummary::of(&counts),
    })
}

/// K-test on versions `i < j < k` (indices into the project's release order).
pub fn ktest(
    project: &Project,
    i: usize,
    j: usize,
    k: usize,
    trainer: &dyn Fn(&VersionedDataset) -> Box<dyn Planner>,
    epsilon: f64,
) -> Result<KTestResult> {
    let n = project.versions.len();
    if !(i < j && j < k && k < n) {
        return Err(Error::BadWindow {
            i,
            j,
            k,
            available: n,
        });
    }
    let v = &project.versions;
    ktest_versions(&project.name, &v[i], &v[j], &v[k], trainer, epsilon)
}

/// Every consecutive `(i, i+1, i+2)` window of a project.
pub fn evaluate_windows(
    project: &Project,
    trainer: &dyn Fn(&VersionedDataset) -> Box<dyn Planner>,
    epsilon: f64,
) -> Result<Vec<KTestResult>> {
    let n = project.versions.len();
    if n < 3 {
        return Err(Error::TooFewVersions {
            project: project.name.clone(),
            versions: n,
        });
    }
    (0..n - 2)
        .map(|i| ktest(project, i, i + 1, i + 2, trainer, epsilon))
        .collect()
}

/// `bucket,reduced,increased,classes` rows.
pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from("bucket,reduced,increased,classes\n");
    for p in curve {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.overlap_bucket, p.defects_reduced, p.defects_increased, p.classes
        );
    }
    out
}
