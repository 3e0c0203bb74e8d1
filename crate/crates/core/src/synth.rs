//! Seeded synthetic datasets with planted defect structure, for tests,
//! benchmarks and the browser demo.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{ClassRecord, Community, Project, VersionedDataset};
use crate::metric::{Metric, MetricValues};

fn noise_metrics(rng: &mut impl Rng) -> MetricValues {
    let mut m = MetricValues::zeros();
    for metric in Metric::ALL {
        m[metric] = match metric {
            Metric::Dam | Metric::Mfa | Metric::Cam | Metric::Lcom3 => rng.gen_range(0.0..1.0f64),
            Metric::AvgCc | Metric::Amc => rng.gen_range(0.0..10.0f64),
            _ => rng.gen_range(0..20u32) as f64,
        }
        .max(0.0);
    }
    m
}

/// Defect count whose rate rises sharply with `loc` and `rfc`.
fn planted_defects(rng: &mut impl Rng, m: &MetricValues) -> u32 {
    let mut p = 0.05;
    if m[Metric::Loc] > 200.0 {
        p += 0.6;
    }
    if m[Metric::Rfc] > 50.0 {
        p += 0.3;
    }
    if rng.gen::<f64>() < p {
        1 + rng.gen_range(0..3)
    } else {
        0
    }
}

fn planted_class(rng: &mut impl Rng, name: String) -> ClassRecord {
    let mut m = noise_metrics(rng);
    m[Metric::Loc] = rng.gen_range(10..400u32) as f64;
    m[Metric::Rfc] = rng.gen_range(5..100u32) as f64;
    m[Metric::Wmc] = (m[Metric::Loc] / 20.0).round();
    let defects = planted_defects(rng, &m);
    ClassRecord::new(name, m, defects)
}

/// A project whose defects are driven by `loc > 200` and `rfc > 50`.
///
/// Between releases about half the classes shrink (`loc`, `rfc`, `wmc` drop
/// 30–60%), the rest grow slightly, 10% are removed and new ones appear.
/// Defects are redrawn from the same model, so shrinking pays off.
pub fn planted_project(name: &str, seed: u64, versions: usize, classes: usize) -> Project {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next_id = 0usize;
    let mut fresh = |rng: &mut ChaCha8Rng| {
        next_id += 1;
        planted_class(rng, format!("{name}.C{next_id:04}"))
    };
    let mut current: Vec<ClassRecord> = (0..classes).map(|_| fresh(&mut rng)).collect();
    let mut out = Vec::with_capacity(versions);
    for v in 0..versions {
        if v > 0 {
            let mut next = Vec::with_capacity(current.len());
            for r in &current {
                if rng.gen::<f64>() < 0.1 {
                    continue;
                }
                let mut m = r.metrics;
                if rng.gen::<f64>() < 0.5 {
                    let f = rng.gen_range(0.4..0.7);
                    for k in [Metric::Loc, Metric::Rfc, Metric::Wmc] {
                        m[k] = (m[k] * f).round();
                    }
                } else {
                    let f = rng.gen_range(1.0..1.2);
                    for k in [Metric::Loc, Metric::Rfc, Metric::Wmc] {
                        m[k] = (m[k] * f).round();
                    }
                }
                let defects = planted_defects(&mut rng, &m);
                next.push(ClassRecord::new(r.class_name.clone(), m, defects));
            }
            let added = classes.saturating_sub(next.len());
            for _ in 0..added {
                next.push(fresh(&mut rng));
            }
            current = next;
        }
        out.push(
            VersionedDataset::new(name, format!("{}.0", v + 1), v, current.clone())
                .expect("generated names are unique"),
        );
    }
    Project::new(name, out).expect("distinct release order")
}

fn labelled(rng: &mut impl Rng, name: String, loc: f64, cbo: f64, defective: bool) -> ClassRecord {
    let mut m = noise_metrics(rng);
    m[Metric::Loc] = loc;
    m[Metric::Cbo] = cbo;
    let defects = if defective {
        1 + rng.gen_range(0..2)
    } else {
        0
    };
    ClassRecord::new(name, m, defects)
}

fn community_member(rng: &mut impl Rng, project: &str, i: usize, kind: u8) -> ClassRecord {
    let name = format!("{project}.C{i:04}");
    match kind {
        // Defects follow loc; cbo stays low.
        0 => {
            let loc = rng.gen_range(0..100u32) as f64;
            let cbo = rng.gen_range(0..10u32) as f64;
            labelled(rng, name, loc, cbo, loc > 50.0)
        }
        // Defects follow cbo; loc stays low.
        _ => {
            let loc = rng.gen_range(0..50u32) as f64;
            let cbo = rng.gen_range(0..20u32) as f64;
            labelled(rng, name, loc, cbo, cbo > 10.0)
        }
    }
}

/// Three projects: `alpha` (defects follow `loc`), `beta` (defects follow
/// `cbo`) and `exemplar`, drawn from the union of both distributions.
/// Each has two releases of `per_project / 2` classes.
pub fn planted_community(seed: u64, per_project: usize) -> Community {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut project = |name: &str, pick: &dyn Fn(&mut ChaCha8Rng, usize) -> u8| {
        let half = per_project / 2;
        let versions = (0..2)
            .map(|v| {
                let records = (0..half)
                    .map(|i| {
                        let kind = pick(&mut rng, i);
                        community_member(&mut rng, name, v * half + i, kind)
                    })
                    .collect();
                VersionedDataset::new(name, format!("{}.0", v + 1), v, records).unwrap()
            })
            .collect();
        Project::new(name, versions).unwrap()
    };
    let alpha = project("alpha", &|_, _| 0);
    let beta = project("beta", &|_, _| 1);
    let exemplar = project("exemplar", &|_, i| (i % 2) as u8);
    Community::new(vec![alpha, beta, exemplar]).unwrap()
}
