//! Fayyad–Irani minimum-description-length discretization.

use serde::{Deserialize, Serialize};

use crate::metric::Metric;
use crate::stats::binary_entropy;

/// Cut points for one metric. Ranges are `(−∞, c₁], (c₁, c₂], …, (cₖ, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinMap {
    pub metric: Metric,
    pub cut_points: Vec<f64>,
}

impl BinMap {
    pub fn new(metric: Metric, cut_points: Vec<f64>) -> Self {
        debug_assert!(cut_points.windows(2).all(|w| w[0] < w[1]));
        BinMap { metric, cut_points }
    }

    pub fn range_count(&self) -> usize {
        self.cut_points.len() + 1
    }

    /// Index of the range holding `value`; a value equal to a cut falls left.
    pub fn apply(&self, value: f64) -> usize {
        apply_bins(&self.cut_points, value)
    }

    /// `(low, high)` cut boundaries of range `idx`; `None` is unbounded.
    pub fn bounds(&self, idx: usize) -> (Option<f64>, Option<f64>) {
        let lo = idx.checked_sub(1).map(|i| self.cut_points[i]);
        let hi = self.cut_points.get(idx).copied();
        (lo, hi)
    }
}

pub fn apply_bins(cuts: &[f64], value: f64) -> usize {
    cuts.partition_point(|&c| c < value)
}

/// Supervised MDLP cut points for `values` against binary `labels`.
///
/// Candidate cuts are midpoints between adjacent distinct values that sit on
/// a class boundary. The best cut minimizes class-information entropy (ties
/// to the smallest cut) and is kept only if its gain beats the MDL cost;
/// accepted cuts recurse into both halves.
pub fn mdlp_cuts(metric: Metric, values: &[f64], labels: &[bool]) -> BinMap {
    assert_eq!(
        values.len(),
        labels.len(),
        "values and labels differ in length"
    );
    let mut pairs: Vec<(f64, bool)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let groups = group_by_value(&pairs);
    let mut cuts = Vec::new();
    split(&groups, &mut cuts);
    cuts.sort_by(f64::total_cmp);
    BinMap::new(metric, cuts)
}

/// Distinct value with its (negative, positive) counts.
#[derive(Debug, Clone, Copy)]
struct Group {
    value: f64,
    neg: usize,
    pos: usize,
}

fn group_by_value(sorted: &[(f64, bool)]) -> Vec<Group> {
    let mut out: Vec<Group> = Vec::new();
    for &(v, l) in sorted {
        match out.last_mut() {
            Some(g) if g.value == v => {
                if l {
                    g.pos += 1
                } else {
                    g.neg += 1
                }
            }
            _ => out.push(Group {
                value: v,
                neg: usize::from(!l),
                pos: usize::from(l),
            }),
        }
    }
    out
}

fn is_boundary(a: &Group, b: &Group) -> bool {
    let pure = |g: &Group| (g.neg == 0) != (g.pos == 0);
    let same_single = pure(a) && pure(b) && (a.pos > 0) == (b.pos > 0);
    !same_single
}

fn class_count(neg: usize, pos: usize) -> usize {
    usize::from(neg > 0) + usize::from(pos > 0)
}

/// MDL acceptance test for splitting `(n0, n1)` into left/right halves.
pub(crate) fn mdl_accepts(
    total: (usize, usize),
    left: (usize, usize),
    right: (usize, usize),
) -> bool {
    let n = (total.0 + total.1) as f64;
    let nl = (left.0 + left.1) as f64;
    let nr = (right.0 + right.1) as f64;
    let ent = binary_entropy(total.0, total.1);
    let ent_l = binary_entropy(left.0, left.1);
    let ent_r = binary_entropy(right.0, right.1);
    let weighted = nl / n * ent_l + nr / n * ent_r;
    let gain = ent - weighted;
    let k = class_count(total.0, total.1) as f64;
    let k1 = class_count(left.0, left.1) as f64;
    let k2 = class_count(right.0, right.1) as f64;
    let delta = (3f64.powf(k) - 2.0).log2() - (k * ent - k1 * ent_l - k2 * ent_r);
    let threshold = (n - 1.0).log2() / n + delta / n;
    gain > threshold
}

fn split(groups: &[Group], cuts: &mut Vec<f64>) {
    if groups.len() < 2 {
        return;
    }
    let neg: usize = groups.iter().map(|g| g.neg).sum();
    let pos: usize = groups.iter().map(|g| g.pos).sum();
    if neg == 0 || pos == 0 {
        return;
    }
    let n = (neg + pos) as f64;

    let mut best: Option<(usize, f64, (usize, usize))> = None;
    let (mut ln, mut lp) = (0usize, 0usize);
    for i in 0..groups.len() - 1 {
        ln += groups[i].neg;
        lp += groups[i].pos;
        if !is_boundary(&groups[i], &groups[i + 1]) {
            continue;
        }
        let (rn, rp) = (neg - ln, pos - lp);
        let nl = (ln + lp) as f64;
        let nr = (rn + rp) as f64;
        let e = nl / n * binary_entropy(ln, lp) + nr / n * binary_entropy(rn, rp);
        if best.is_none_or(|(_, be, _)| e < be) {
            best = Some((i, e, (ln, lp)));
        }
    }
    let Some((i, _, left)) = best else {
        return;
    };
    let right = (neg - left.0, pos - left.1);
    if !mdl_accepts((neg, pos), left, right) {
        return;
    }
    cuts.push((groups[i].value + groups[i + 1].value) / 2.0);
    split(&groups[..=i], cuts);
    split(&groups[i + 1..], cuts);
}
