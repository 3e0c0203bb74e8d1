//! Browser bindings: overlap of two action rows, effectiveness curves on a
//! synthetic project, and XTREE plans for its classes.
//!
//! The `*_json` functions are plain Rust so they run natively as well; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use planwise::action::parse_row;
use planwise::data::{Project, VersionedDataset};
use planwise::eval::{ktest, CurvePoint};
use planwise::planners::{train, PlannerKind, PlannerParams};
use planwise::refhints::suggest_refactoring_names;
use planwise::synth::planted_project;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_CLASSES: usize = 2000;

fn demo_project(seed: u64, classes: usize) -> Result<Project, String> {
    if !(10..=MAX_CLASSES).contains(&classes) {
        return Err(format!("classes must be in 10..={MAX_CLASSES}"));
    }
    Ok(planted_project("demo", seed, 3, classes))
}

fn params(gamma: f64, seed: u64) -> Result<PlannerParams, String> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err("gamma must be in (0, 1]".into());
    }
    Ok(PlannerParams {
        gamma,
        seed,
        ..PlannerParams::default()
    })
}

pub fn overlap_value(developer: &str, planner: &str) -> Result<f64, String> {
    let d = parse_row(developer).ok_or("developer row: use + − · only")?;
    let p = parse_row(planner).ok_or("planner row: use + − · only")?;
    if d.len() != p.len() || d.is_empty() {
        return Err(format!(
            "rows differ in length ({} vs {})",
            d.len(),
            p.len()
        ));
    }
    Ok(planwise::eval::overlap(&d, &p))
}

#[derive(Serialize)]
struct Curve {
    planner: &'static str,
    curve: Vec<CurvePoint>,
    aupec_reduced: Option<f64>,
    aupec_increased: Option<f64>,
    median_changes: f64,
}

/// K-test of every non-bellwether planner on a three-release synthetic project.
pub fn curves_json(gamma: f64, seed: u64, classes: usize) -> Result<String, String> {
    let project = demo_project(seed, classes)?;
    let params = params(gamma, seed)?;
    let curves = [
        PlannerKind::Xtree,
        PlannerKind::Alves,
        PlannerKind::Shatnawi,
        PlannerKind::Oliveira,
    ]
    .into_iter()
    .map(|kind| {
        let trainer = |v: &VersionedDataset| train(kind, &params, &v.records);
        let r = ktest(&project, 0, 1, 2, &trainer, 0.0).map_err(|e| e.to_string())?;
        Ok(Curve {
            planner: kind.name(),
            curve: r.curve,
            aupec_reduced: r.aupec_reduced,
            aupec_increased: r.aupec_increased,
            median_changes: r.changes_per_plan.median,
        })
    })
    .collect::<Result<Vec<_>, String>>()?;
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PlanRow {
    class_name: String,
    defects: u32,
    row: String,
    expected_score_drop: Option<f64>,
    refactorings: Vec<String>,
}

/// XTREE plans for the first `limit` classes of the second synthetic release.
pub fn plans_json(gamma: f64, seed: u64, classes: usize, limit: usize) -> Result<String, String> {
    let project = demo_project(seed, classes)?;
    let planner = train(
        PlannerKind::Xtree,
        &params(gamma, seed)?,
        &project.versions[0].records,
    );
    let rows: Vec<PlanRow> = project.versions[1]
        .records
        .iter()
        .take(limit)
        .map(|r| {
            let plan = planner.plan(r);
            PlanRow {
                class_name: r.class_name.clone(),
                defects: r.defects,
                row: plan.row(),
                expected_score_drop: plan.expected_score_drop,
                refactorings: suggest_refactoring_names(&plan),
            }
        })
        .collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn overlap(developer: &str, planner: &str) -> Result<f64, JsError> {
    overlap_value(developer, planner).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn curves(gamma: f64, seed: u32, classes: u32) -> Result<String, JsError> {
    curves_json(gamma, u64::from(seed), classes as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn plans(gamma: f64, seed: u32, classes: u32, limit: u32) -> Result<String, JsError> {
    plans_json(gamma, u64::from(seed), classes as usize, limit as usize)
        .map_err(|e| JsError::new(&e))
}
