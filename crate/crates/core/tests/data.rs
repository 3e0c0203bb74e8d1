mod oracles;

use oracles::record;
use planwise::action::{format_row, Direction};
use planwise::data::ClassRecord;
use planwise::data::{diff_records, diff_versions, read_csv, write_csv, VersionedDataset};
use planwise::metric::{Metric, MetricValues};
use proptest::prelude::*;
use std::io::Write;
use std::path::Path;

fn metrics() -> impl Strategy<Value = MetricValues> {
    prop::collection::vec(0u32..50, 20).prop_map(|v| {
        let mut m = MetricValues::zeros();
        for (i, x) in v.into_iter().enumerate() {
            m.0[i] = f64::from(x) / 2.0;
        }
        m
    })
}

fn dataset() -> impl Strategy<Value = VersionedDataset> {
    prop::collection::vec((metrics(), 0u32..4), 1..8).prop_map(|rows| {
        let records = rows
            .into_iter()
            .enumerate()
            .map(|(i, (m, d))| ClassRecord::new(format!("org.demo.C{i}"), m, d))
            .collect();
        VersionedDataset::new("demo", "1.2", 0, records).unwrap()
    })
}

proptest! {
    #[test]
    fn diff_identity(a in metrics()) {
        let r = ClassRecord::new("x", a, 0);
        prop_assert_eq!(diff_records(&r, &r, 0.0).changes(), 0);
    }

    #[test]
    fn diff_antisymmetry(a in metrics(), b in metrics()) {
        let (ra, rb) = (ClassRecord::new("x", a, 0), ClassRecord::new("x", b, 0));
        let ab = diff_records(&ra, &rb, 0.0);
        let ba = diff_records(&rb, &ra, 0.0);
        for m in Metric::ALL {
            prop_assert_eq!(ab.get(m), ba.get(m).flipped());
        }
    }

    #[test]
    fn csv_round_trip(ds in dataset()) {
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), Path::new("demo-1.2.csv")).unwrap();
        prop_assert_eq!(back.records, ds.records);
        prop_assert_eq!(back.version, ds.version);
        prop_assert_eq!(back.project, ds.project);
    }
}

#[test]
fn three_class_diff_grid() {
    use Direction::*;
    let old = VersionedDataset::new(
        "p",
        "1",
        0,
        vec![
            record("A", &[(Metric::Loc, 100.0), (Metric::Rfc, 10.0)], 1),
            record("B", &[(Metric::Cbo, 3.0)], 0),
            record("C", &[(Metric::Wmc, 5.0)], 0),
        ],
    )
    .unwrap();
    let new = VersionedDataset::new(
        "p",
        "2",
        1,
        vec![
            record("A", &[(Metric::Loc, 80.0), (Metric::Rfc, 12.0)], 0),
            record("B", &[(Metric::Cbo, 3.0)], 0),
            record("D", &[], 0),
        ],
    )
    .unwrap();
    let d = diff_versions(&old, &new, 0.0);
    assert_eq!(d.keys().collect::<Vec<_>>(), ["A", "B"]);
    assert_eq!(d["A"].get(Metric::Loc), Decrease);
    assert_eq!(d["A"].get(Metric::Rfc), Increase);
    assert_eq!(d["A"].changes(), 2);
    assert_eq!(format_row(&d["B"]), "·".repeat(20));
    let banded = diff_versions(&old, &new, 2.0);
    assert_eq!(banded["A"].get(Metric::Rfc), Hold);
}

#[test]
fn loads_promise_layout_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ant-1.3.csv");
    let mut f = std::fs::File::create(&path).unwrap();
    let metrics: Vec<&str> = Metric::ALL.iter().map(|m| m.name()).collect();
    writeln!(f, "name,version,name,{},bug", metrics.join(",")).unwrap();
    let vals: Vec<String> = (1..=20).map(|i| i.to_string()).collect();
    writeln!(f, "ant,1.3,org.apache.Foo,{},2", vals.join(",")).unwrap();
    writeln!(f, "ant,1.3,org.apache.Bar,{},0", vals.join(",")).unwrap();
    drop(f);
    let ds = planwise::data::load_csv(&path).unwrap();
    assert_eq!(
        (ds.project.as_str(), ds.version.as_str(), ds.len()),
        ("ant", "1.3", 2)
    );
    assert_eq!(ds.records[0].class_name, "org.apache.Foo");
    assert_eq!(ds.records[0].value(Metric::AvgCc), 20.0);
    assert_eq!(ds.total_defects(), 2);
}
