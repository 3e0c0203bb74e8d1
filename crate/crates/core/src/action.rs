//! Per-metric change directions shared by developer diffs and planner output.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::metric::{Metric, METRIC_COUNT};

/// Direction of change for one metric: `+`, `−` or `·`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increase,
    Decrease,
    #[default]
    Hold,
}

impl Direction {
    pub fn symbol(self) -> char {
        match self {
            Direction::Increase => '+',
            Direction::Decrease => '−',
            Direction::Hold => '·',
        }
    }

    /// Accepts `+`, `-`/`−`, and `·`/`.`/`0` for no change.
    pub fn from_symbol(c: char) -> Option<Direction> {
        match c {
            '+' => Some(Direction::Increase),
            '-' | '−' => Some(Direction::Decrease),
            '·' | '.' | '0' => Some(Direction::Hold),
            _ => None,
        }
    }

    pub fn flipped(self) -> Direction {
        match self {
            Direction::Increase => Direction::Decrease,
            Direction::Decrease => Direction::Increase,
            Direction::Hold => Direction::Hold,
        }
    }

    pub fn is_change(self) -> bool {
        self != Direction::Hold
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Parse a compact row such as `"··−+−++++"` (whitespace ignored).
pub fn parse_row(s: &str) -> Option<Vec<Direction>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(Direction::from_symbol)
        .collect()
}

pub fn format_row(dirs: &[Direction]) -> String {
    dirs.iter().map(|d| d.symbol()).collect()
}

/// One direction per metric, over the full 20-metric universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ActionVector(pub [Direction; METRIC_COUNT]);

impl ActionVector {
    pub fn hold() -> Self {
        Self::default()
    }

    pub fn get(&self, m: Metric) -> Direction {
        self.0[m.index()]
    }

    pub fn set(&mut self, m: Metric, d: Direction) {
        self.0[m.index()] = d;
    }

    pub fn changes(&self) -> usize {
        self.0.iter().filter(|d| d.is_change()).count()
    }
}

impl Deref for ActionVector {
    type Target = [Direction];

    fn deref(&self) -> &[Direction] {
        &self.0
    }
}

impl fmt::Display for ActionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_row(&self.0))
    }
}
