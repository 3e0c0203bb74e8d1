//! The 20 static code metrics of the Jureczko defect corpus.

use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const METRIC_COUNT: usize = 20;

/// One static code metric. Declaration order is the canonical order used
/// whenever plans are printed or compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Wmc,
    Dit,
    Noc,
    Cbo,
    Rfc,
    Lcom,
    Ca,
    Ce,
    Npm,
    Lcom3,
    Loc,
    Dam,
    Moa,
    Mfa,
    Cam,
    Ic,
    Cbm,
    Amc,
    MaxCc,
    AvgCc,
}

impl Metric {
    pub const ALL: [Metric; METRIC_COUNT] = [
        Metric::Wmc,
        Metric::Dit,
        Metric::Noc,
        Metric::Cbo,
        Metric::Rfc,
        Metric::Lcom,
        Metric::Ca,
        Metric::Ce,
        Metric::Npm,
        Metric::Lcom3,
        Metric::Loc,
        Metric::Dam,
        Metric::Moa,
        Metric::Mfa,
        Metric::Cam,
        Metric::Ic,
        Metric::Cbm,
        Metric::Amc,
        Metric::MaxCc,
        Metric::AvgCc,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Wmc => "wmc",
            Metric::Dit => "dit",
            Metric::Noc => "noc",
            Metric::Cbo => "cbo",
            Metric::Rfc => "rfc",
            Metric::Lcom => "lcom",
            Metric::Ca => "ca",
            Metric::Ce => "ce",
            Metric::Npm => "npm",
            Metric::Lcom3 => "lcom3",
            Metric::Loc => "loc",
            Metric::Dam => "dam",
            Metric::Moa => "moa",
            Metric::Mfa => "mfa",
            Metric::Cam => "cam",
            Metric::Ic => "ic",
            Metric::Cbm => "cbm",
            Metric::Amc => "amc",
            Metric::MaxCc => "max_cc",
            Metric::AvgCc => "avg_cc",
        }
    }

    /// Case-insensitive lookup; spaces and dashes count as underscores.
    pub fn from_column(header: &str) -> Option<Metric> {
        let norm: String = header
            .trim()
            .chars()
            .map(|c| match c {
                ' ' | '-' => '_',
                c => c.to_ascii_lowercase(),
            })
            .collect();
        Metric::ALL.into_iter().find(|m| m.name() == norm)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::from_column(s).ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

/// Dense per-metric storage indexed by [`Metric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValues(pub [f64; METRIC_COUNT]);

impl MetricValues {
    pub fn zeros() -> Self {
        MetricValues([0.0; METRIC_COUNT])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Metric, f64)> + '_ {
        Metric::ALL.into_iter().zip(self.0.iter().copied())
    }
}

impl Default for MetricValues {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Index<Metric> for MetricValues {
    type Output = f64;

    fn index(&self, m: Metric) -> &f64 {
        &self.0[m.index()]
    }
}

impl IndexMut<Metric> for MetricValues {
    fn index_mut(&mut self, m: Metric) -> &mut f64 {
        &mut self.0[m.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_metrics_in_canonical_order() {
        assert_eq!(Metric::ALL.len(), 20);
        for (i, m) in Metric::ALL.iter().enumerate() {
            assert_eq!(m.index(), i);
        }
        assert_eq!(Metric::ALL[0], Metric::Wmc);
        assert_eq!(Metric::ALL[19], Metric::AvgCc);
    }

    #[test]
    fn column_names_are_case_insensitive() {
        assert_eq!(Metric::from_column("WMC"), Some(Metric::Wmc));
        assert_eq!(Metric::from_column(" max_cc "), Some(Metric::MaxCc));
        assert_eq!(Metric::from_column("Avg CC"), Some(Metric::AvgCc));
        assert_eq!(Metric::from_column("bug"), None);
    }
}
