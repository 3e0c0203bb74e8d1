//! Literature lookup from metric-change signatures to refactorings.
//!
//! The table covers nine metrics. `fout` and `nom` are not part of the
//! dataset schema, so plans can only ever match on the other seven.

use std::fmt::Write as _;

use serde::Serialize;

use crate::action::Direction;
use crate::metric::Metric;
use crate::planners::Plan;

/// Columns of the refactoring table, in printed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMetric {
    Dit,
    Noc,
    Cbo,
    Rfc,
    Fout,
    Wmc,
    Nom,
    Loc,
    Lcom,
}

impl TableMetric {
    pub const ALL: [TableMetric; 9] = [
        TableMetric::Dit,
        TableMetric::Noc,
        TableMetric::Cbo,
        TableMetric::Rfc,
        TableMetric::Fout,
        TableMetric::Wmc,
        TableMetric::Nom,
        TableMetric::Loc,
        TableMetric::Lcom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableMetric::Dit => "dit",
            TableMetric::Noc => "noc",
            TableMetric::Cbo => "cbo",
            TableMetric::Rfc => "rfc",
            TableMetric::Fout => "fout",
            TableMetric::Wmc => "wmc",
            TableMetric::Nom => "nom",
            TableMetric::Loc => "loc",
            TableMetric::Lcom => "lcom",
        }
    }

    /// The dataset metric this column corresponds to, if any.
    pub fn dataset_metric(self) -> Option<Metric> {
        match self {
            TableMetric::Dit => Some(Metric::Dit),
            TableMetric::Noc => Some(Metric::Noc),
            TableMetric::Cbo => Some(Metric::Cbo),
            TableMetric::Rfc => Some(Metric::Rfc),
            TableMetric::Wmc => Some(Metric::Wmc),
            TableMetric::Loc => Some(Metric::Loc),
            TableMetric::Lcom => Some(Metric::Lcom),
            TableMetric::Fout | TableMetric::Nom => None,
        }
    }
}

/// One table row. `None` cells are blank: the source says nothing about
/// that metric, which is not the same as "no change".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefactoringSignature {
    pub name: &'static str,
    pub signature: [Option<Direction>; 9],
}

impl RefactoringSignature {
    pub fn sign(&self, m: TableMetric) -> Option<Direction> {
        self.signature[m as usize]
    }
}

const P: Option<Direction> = Some(Direction::Increase);
const M: Option<Direction> = Some(Direction::Decrease);
const B: Option<Direction> = None;

//                                 dit noc cbo rfc fout wmc nom loc lcom
static TABLE: [RefactoringSignature; 12] = [
    row("Extract Class", [B, B, P, M, P, M, M, M, M]),
    row("Extract Method", [B, B, B, P, B, P, P, P, P]),
    row("Hide Method", [B, B, B, B, B, B, B, B, B]),
    row("Inline Method", [B, B, B, M, B, M, M, M, M]),
    row("Inline Temp", [B, B, B, B, B, B, B, M, B]),
    row("Remove Setting Method", [B, B, B, M, B, M, M, M, M]),
    row("Replace Assignment", [B, B, B, B, B, B, B, M, B]),
    row("Replace Magic Number", [B, B, B, B, B, B, B, P, B]),
    row("Consolidate Conditional", [B, B, B, P, B, P, P, M, P]),
    row("Reverse Conditional", [B, B, B, B, B, B, B, B, B]),
    row("Encapsulate Field", [B, B, B, B, B, P, P, P, P]),
    row("Inline Class", [B, B, M, P, M, P, P, P, P]),
];

const fn row(name: &'static str, signature: [Option<Direction>; 9]) -> RefactoringSignature {
    RefactoringSignature { name, signature }
}

pub fn table() -> &'static [RefactoringSignature] {
    &TABLE
}

/// How well one row agrees with a requested set of changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub name: &'static str,
    /// Columns where the row's sign equals a requested change.
    pub matches: usize,
    /// Signed columns of the row that the request does not ask for.
    pub conflicts: usize,
}

/// Rank table rows against a nine-column request.
///
/// Rows with no matching sign are dropped. Order: most matches, then fewest
/// conflicts, then table order.
pub fn rank_signatures(request: &[Direction; 9]) -> Vec<Suggestion> {
    let mut out: Vec<(usize, Suggestion)> = TABLE
        .iter()
        .enumerate()
        .filter_map(|(i, row)| {
            let mut matches = 0;
            let mut conflicts = 0;
            for (col, &sign) in row.signature.iter().enumerate() {
                let Some(sign) = sign else { continue };
                if request[col] == sign {
                    matches += 1;
                } else {
                    conflicts += 1;
                }
            }
            (matches > 0).then_some((
                i,
                Suggestion {
                    name: row.name,
                    matches,
                    conflicts,
                },
            ))
        })
        .collect();
    out.sort_by(|(ia, a), (ib, b)| {
        b.matches
            .cmp(&a.matches)
            .then(a.conflicts.cmp(&b.conflicts))
            .then(ia.cmp(ib))
    });
    out.into_iter().map(|(_, s)| s).collect()
}

/// Project a plan onto the table's columns; `fout`/`nom` stay `·`.
pub fn plan_request(plan: &Plan) -> [Direction; 9] {
    TableMetric::ALL.map(|c| {
        c.dataset_metric()
            .map_or(Direction::Hold, |m| plan.action(m).direction)
    })
}

pub fn suggest_refactorings(plan: &Plan) -> Vec<Suggestion> {
    rank_signatures(&plan_request(plan))
}

pub fn suggest_refactoring_names(plan: &Plan) -> Vec<String> {
    suggest_refactorings(plan)
        .into_iter()
        .map(|s| s.name.to_string())
        .collect()
}

/// The table as CSV; blank cells stay empty.
pub fn table_csv() -> String {
    let mut out = String::from("action");
    for c in TableMetric::ALL {
        out.push(',');
        out.push_str(c.name());
    }
    out.push('\n');
    for row in &TABLE {
        out.push_str(row.name);
        for cell in row.signature {
            let _ = write!(
                out,
                ",{}",
                match cell {
                    Some(Direction::Increase) => "+",
                    Some(Direction::Decrease) => "-",
                    _ => "",
                }
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::parse_row;

    fn request(s: &str) -> [Direction; 9] {
        parse_row(s).unwrap().try_into().unwrap()
    }

    fn fnv1a(bytes: &[u8]) -> u64 {
        bytes.iter().fold(0xcbf29ce484222325, |h, &b| {
            (h ^ u64::from(b)).wrapping_mul(0x100000001b3)
        })
    }

    #[test]
    fn table_shape() {
        assert_eq!(table().len(), 12);
        let em = table().iter().find(|r| r.name == "Extract Method").unwrap();
        assert_eq!(em.signature, [B, B, B, P, B, P, P, P, P]);
        let hide = table().iter().find(|r| r.name == "Hide Method").unwrap();
        assert!(hide.signature.iter().all(Option::is_none));
    }

    #[test]
    fn table_checksum_is_pinned() {
        let csv = table_csv();
        assert_eq!(csv.lines().count(), 13);
        assert_eq!(
            fnv1a(csv.as_bytes()),
            0xb18d_b585_ca3c_c0c4,
            "table changed:\n{csv}"
        );
    }

    #[test]
    fn extract_method_tops_growth_request() {
        // dit noc cbo rfc fout wmc nom loc lcom
        let ranked = rank_signatures(&request("···+·++++"));
        assert_eq!(ranked[0].name, "Extract Method");
        assert_eq!(ranked[0].matches, 5);
        assert_eq!(ranked[0].conflicts, 0);
    }

    #[test]
    fn shrink_request_ties_inline_and_remove_setting() {
        let ranked = rank_signatures(&request("···−·−−−−"));
        let top: Vec<_> = ranked.iter().take(2).map(|s| (s.name, s.matches)).collect();
        assert_eq!(top, [("Inline Method", 5), ("Remove Setting Method", 5)]);
    }

    #[test]
    fn empty_request_suggests_nothing() {
        assert!(suggest_refactorings(&Plan::no_change("c", "x")).is_empty());
        assert!(rank_signatures(&[Direction::Hold; 9]).is_empty());
    }
}
