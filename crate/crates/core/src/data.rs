//! Versioned defect datasets: loading, validation, serialization and
//! release-to-release diffing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::action::{ActionVector, Direction};
use crate::error::{Error, Result};
use crate::metric::{Metric, MetricValues};

/// One code class: its metrics and its post-release defect count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub class_name: String,
    pub metrics: MetricValues,
    pub defects: u32,
}

impl ClassRecord {
    pub fn new(class_name: impl Into<String>, metrics: MetricValues, defects: u32) -> Self {
        ClassRecord {
            class_name: class_name.into(),
            metrics,
            defects,
        }
    }

    pub fn value(&self, m: Metric) -> f64 {
        self.metrics[m]
    }

    pub fn is_defective(&self) -> bool {
        self.defects > 0
    }
}

/// One release of a project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VersionedDataset {
    pub project: String,
    pub version: String,
    pub released_order: usize,
    pub records: Vec<ClassRecord>,
}

impl VersionedDataset {
    /// Checks the non-empty and unique-class-name invariants.
    pub fn new(
        project: impl Into<String>,
        version: impl Into<String>,
        released_order: usize,
        records: Vec<ClassRecord>,
    ) -> Result<Self> {
        let project = project.into();
        let version = version.into();
        if records.is_empty() {
            return Err(Error::Invalid(format!(
                "{project}-{version}: empty dataset"
            )));
        }
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.class_name.as_str()) {
                return Err(Error::Invalid(format!(
                    "{project}-{version}: duplicate class name `{}`",
                    r.class_name
                )));
            }
        }
        Ok(VersionedDataset {
            project,
            version,
            released_order,
            records,
        })
    }

    pub fn label(&self) -> String {
        format!("{}-{}", self.project, self.version)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_defects(&self) -> u64 {
        self.records.iter().map(|r| u64::from(r.defects)).sum()
    }

    pub fn by_name(&self) -> HashMap<&str, &ClassRecord> {
        self.records
            .iter()
            .map(|r| (r.class_name.as_str(), r))
            .collect()
    }
}

/// Chronologically ordered releases of one project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Project {
    pub name: String,
    pub versions: Vec<VersionedDataset>,
}

impl Project {
    /// Sorts `versions` by `released_order`; ties are rejected.
    pub fn new(name: impl Into<String>, mut versions: Vec<VersionedDataset>) -> Result<Self> {
        let name = name.into();
        if versions.is_empty() {
            return Err(Error::Invalid(format!("project `{name}` has no versions")));
        }
        versions.sort_by_key(|v| v.released_order);
        if versions
            .windows(2)
            .any(|w| w[0].released_order == w[1].released_order)
        {
            return Err(Error::Invalid(format!(
                "project `{name}`: versions must have distinct release order"
            )));
        }
        Ok(Project { name, versions })
    }

    /// All records of all versions, in release order. Class names may repeat.
    pub fn pooled(&self) -> Vec<ClassRecord> {
        self.versions
            .iter()
            .flat_map(|v| v.records.iter().cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    pub projects: Vec<Project>,
}

impl Community {
    pub fn new(projects: Vec<Project>) -> Result<Self> {
        if projects.is_empty() {
            return Err(Error::Invalid(
                "a community needs at least one project".into(),
            ));
        }
        Ok(Community { projects })
    }

    pub fn project(&self, name: &str) -> Option<&Project> {
        self.projects.iter().find(|p| p.name == name)
    }
}

const DEFECT_ALIASES: [&str; 3] = ["bug", "bugs", "defects"];
const NAME_ALIASES: [&str; 4] = ["name", "name.1", "class", "class_name"];

struct Columns {
    name: usize,
    version: Option<usize>,
    defects: usize,
    metrics: [usize; 20],
}

fn resolve_columns(path: &Path, headers: &csv::StringRecord) -> Result<Columns> {
    let lower: Vec<String> = headers
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    let missing = |column: &str| Error::MissingColumn {
        path: path.to_path_buf(),
        column: column.to_string(),
    };

    // Jureczko files carry `name,version,name,...`: project first, class last.
    let name = lower
        .iter()
        .rposition(|h| NAME_ALIASES.contains(&h.as_str()))
        .ok_or_else(|| missing("name"))?;
    let version = lower.iter().position(|h| h == "version");
    let defects = lower
        .iter()
        .position(|h| DEFECT_ALIASES.contains(&h.as_str()))
        .ok_or_else(|| missing("bug"))?;

    let mut metrics = [usize::MAX; 20];
    let mut used = vec![false; lower.len()];
    used[name] = true;
    used[defects] = true;
    if let Some(v) = version {
        used[v] = true;
    }
    for (i, h) in headers.iter().enumerate() {
        if let Some(m) = Metric::from_column(h) {
            if metrics[m.index()] == usize::MAX {
                metrics[m.index()] = i;
                used[i] = true;
            }
        }
    }
    if let Some(m) = Metric::ALL
        .iter()
        .find(|m| metrics[m.index()] == usize::MAX)
    {
        return Err(missing(m.name()));
    }
    for (i, h) in headers.iter().enumerate() {
        if !used[i] && !NAME_ALIASES.contains(&lower[i].as_str()) {
            log::warn!("{}: ignoring extra column `{}`", path.display(), h);
        }
    }
    Ok(Columns {
        name,
        version,
        defects,
        metrics,
    })
}

fn version_from_stem(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.rsplit_once('-') {
        Some((_, v)) if !v.is_empty() => v.to_string(),
        _ => stem,
    }
}

fn project_from_stem(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match stem.rsplit_once('-') {
        Some((p, _)) if !p.is_empty() => p.to_string(),
        _ => stem,
    }
}

/// Load one release from a Jureczko/PROMISE-style CSV.
///
/// The project name and version come from the file stem (`ant-1.7.csv`) unless
/// a `version` column is present. `released_order` is left at 0; use
/// [`load_project_dir`] to order several releases.
pub fn load_csv(path: impl AsRef<Path>) -> Result<VersionedDataset> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, path)
}

/// [`load_csv`] over any reader; `path` is used for naming and error messages.
pub fn read_csv(reader: impl io::Read, path: &Path) -> Result<VersionedDataset> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let cols = resolve_columns(path, &headers)?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let mut version = None;
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        let cell = |idx: usize, column: &str| -> Result<&str> {
            match row.get(idx) {
                Some(s) if !s.is_empty() => Ok(s),
                _ => Err(Error::BadCell {
                    path: path.to_path_buf(),
                    row: line,
                    column: column.to_string(),
                    reason: "missing value".into(),
                }),
            }
        };
        let bad = |column: &str, reason: String| Error::BadCell {
            path: path.to_path_buf(),
            row: line,
            column: column.to_string(),
            reason,
        };

        let class_name = cell(cols.name, "name")?.to_string();
        let mut metrics = MetricValues::zeros();
        for m in Metric::ALL {
            let raw = cell(cols.metrics[m.index()], m.name())?;
            let v: f64 = raw
                .parse()
                .map_err(|_| bad(m.name(), format!("non-numeric value `{raw}`")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(bad(
                    m.name(),
                    format!("expected a non-negative number, got `{raw}`"),
                ));
            }
            metrics[m] = v;
        }
        let defect_col = &headers[cols.defects];
        let raw = cell(cols.defects, defect_col)?;
        let defects = raw
            .parse::<f64>()
            .ok()
            .filter(|d| d.is_finite() && *d >= 0.0 && d.fract() == 0.0 && *d <= u32::MAX as f64)
            .ok_or_else(|| {
                bad(
                    defect_col,
                    format!("expected a non-negative integer, got `{raw}`"),
                )
            })? as u32;

        if !seen.insert(class_name.clone()) {
            return Err(Error::DuplicateClass {
                path: path.to_path_buf(),
                row: line,
                name: class_name,
            });
        }
        if version.is_none() {
            if let Some(v) = cols
                .version
                .and_then(|c| row.get(c))
                .filter(|v| !v.is_empty())
            {
                version = Some(v.to_string());
            }
        }
        records.push(ClassRecord {
            class_name,
            metrics,
            defects,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset {
            path: path.to_path_buf(),
        });
    }
    Ok(VersionedDataset {
        project: project_from_stem(path),
        version: version.unwrap_or_else(|| version_from_stem(path)),
        released_order: 0,
        records,
    })
}

/// Write a dataset in the same schema [`read_csv`] accepts.
pub fn write_csv(dataset: &VersionedDataset, writer: impl io::Write) -> Result<()> {
    let to_err = |source| Error::Csv {
        path: PathBuf::from(dataset.label()),
        source,
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["name".to_string(), "version".to_string()];
    header.extend(Metric::ALL.iter().map(|m| m.name().to_string()));
    header.push("bug".into());
    w.write_record(&header).map_err(to_err)?;
    for r in &dataset.records {
        let mut row = vec![r.class_name.clone(), dataset.version.clone()];
        row.extend(r.metrics.0.iter().map(|v| v.to_string()));
        row.push(r.defects.to_string());
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: PathBuf::from(dataset.label()),
        source,
    })?;
    Ok(())
}

/// Numeric-aware ordering of version labels: `1.10` sorts after `1.9`.
pub fn compare_versions(a: &str, b: &str) -> Ordering {
    let parts = |s: &str| -> Vec<Result<u64, String>> {
        s.split(['.', '_'])
            .map(|p| p.parse::<u64>().map_err(|_| p.to_string()))
            .collect()
    };
    let (pa, pb) = (parts(a), parts(b));
    for (x, y) in pa.iter().zip(&pb) {
        let ord = match (x, y) {
            (Ok(x), Ok(y)) => x.cmp(y),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            (Err(x), Err(y)) => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    pa.len().cmp(&pb.len()).then_with(|| a.cmp(b))
}

fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let io_err = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        if p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

/// Build a project from explicit release files, in the order given.
pub fn load_project_files(name: impl Into<String>, files: &[PathBuf]) -> Result<Project> {
    let name = name.into();
    let mut versions = Vec::with_capacity(files.len());
    for (order, f) in files.iter().enumerate() {
        let mut d = load_csv(f)?;
        d.project = name.clone();
        d.released_order = order;
        versions.push(d);
    }
    Project::new(name, versions)
}

/// Load every `*.csv` in `dir` as one project, ordered by version label.
pub fn load_project_dir(dir: impl AsRef<Path>) -> Result<Project> {
    let dir = dir.as_ref();
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".into());
    let mut versions = csv_files(dir)?
        .iter()
        .map(load_csv)
        .collect::<Result<Vec<_>>>()?;
    if versions.is_empty() {
        return Err(Error::Invalid(format!("{}: no CSV files", dir.display())));
    }
    versions.sort_by(|a, b| compare_versions(&a.version, &b.version));
    for (order, v) in versions.iter_mut().enumerate() {
        v.project = name.clone();
        v.released_order = order;
    }
    Project::new(name, versions)
}

/// A community directory holds one sub-directory of release CSVs per project.
pub fn load_community_dir(dir: impl AsRef<Path>) -> Result<Community> {
    let dir = dir.as_ref();
    let io_err = |source| Error::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut subdirs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let p = entry.map_err(io_err)?.path();
        if p.is_dir() {
            subdirs.push(p);
        }
    }
    subdirs.sort();
    let projects = subdirs
        .iter()
        .map(load_project_dir)
        .collect::<Result<Vec<_>>>()?;
    Community::new(projects)
}

/// Developer actions between two releases, per class present in both.
///
/// A metric counts as increased when `new > old·(1+ε)`, decreased when
/// `new < old·(1−ε)`, unchanged otherwise.
pub fn diff_versions(
    old: &VersionedDataset,
    new: &VersionedDataset,
    epsilon: f64,
) -> BTreeMap<String, ActionVector> {
    let old_by_name = old.by_name();
    new.records
        .iter()
        .filter_map(|n| {
            let o = old_by_name.get(n.class_name.as_str())?;
            Some((n.class_name.clone(), diff_records(o, n, epsilon)))
        })
        .collect()
}

pub fn diff_records(old: &ClassRecord, new: &ClassRecord, epsilon: f64) -> ActionVector {
    let mut out = ActionVector::hold();
    for m in Metric::ALL {
        let (a, b) = (old.value(m), new.value(m));
        let d = if b > a * (1.0 + epsilon) {
            Direction::Increase
        } else if b < a * (1.0 - epsilon) {
            Direction::Decrease
        } else {
            Direction::Hold
        };
        out.set(m, d);
    }
    out
}
