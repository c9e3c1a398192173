//! Dimension estimates for the complement of the locking set.
//!
//! Parameter space is covered by fundamental cells `D(n_1..n_r)`: the
//! parameter interval between the centers of the endpoints of the harmonic
//! domain with code `S(n_1) .. S(n_r)`. Three estimators work on such covers:
//! cover sums (`sum |D|^beta` across depths), box counting against resolved
//! tongues, and a Frostman mass distribution giving a lower bound.
//!
//! The tree of cells is abstracted by [`CellTree`] so that the estimators can
//! be checked on exactly self-similar sets.

use std::fmt;

use crate::atlas::TongueAtlas;
use crate::error::{Error, Result};
use crate::farey::{FareyDomain, HarmonicCode, Limits};
use crate::fit::linear_fit;

/// A nested family of parameter intervals addressed by integer picks.
pub trait CellTree: Sync {
    /// Picks available below any cell when `|n| <= cutoff`.
    fn picks(&self, cutoff: i64) -> Vec<i64>;
    fn interval(&self, code: &[i64]) -> Result<(f64, f64)>;
    /// Length of the locked gap separating children `n` and `n + 1` of
    /// `code`, when resolved.
    fn gap(&self, code: &[i64], n: i64) -> Option<f64>;
}

/// Harmonic cells of a base Farey domain, measured with atlas centers.
pub struct HarmonicCells<'a> {
    atlas: &'a TongueAtlas,
    base: FareyDomain,
    limits: Limits,
}

impl<'a> HarmonicCells<'a> {
    pub fn new(atlas: &'a TongueAtlas, base: FareyDomain) -> Self {
        HarmonicCells {
            atlas,
            base,
            limits: Limits::default(),
        }
    }

    fn domain(&self, code: &[i64]) -> Result<FareyDomain> {
        HarmonicCode::from_picks(code).domain(&self.base, &self.limits)
    }
}

impl CellTree for HarmonicCells<'_> {
    fn picks(&self, cutoff: i64) -> Vec<i64> {
        (-cutoff..=cutoff).collect()
    }

    fn interval(&self, code: &[i64]) -> Result<(f64, f64)> {
        let d = self.domain(code)?;
        let a = self.atlas.center(d.lo())?;
        let b = self.atlas.center(d.hi())?;
        Ok((a.min(b), a.max(b)))
    }

    fn gap(&self, code: &[i64], n: i64) -> Option<f64> {
        let d = self.domain(code).ok()?;
        self.atlas
            .tongue(&d.harmonic_endpoint(n + 1))
            .ok()
            .map(|t| t.width())
    }
}

/// Each cell splits into `m` evenly spaced children of relative length `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilar {
    pub m: usize,
    pub s: f64,
}

impl SelfSimilar {
    pub fn dimension(&self) -> f64 {
        (self.m as f64).ln() / (1.0 / self.s).ln()
    }

    fn spacing(&self, len: f64) -> f64 {
        if self.m > 1 {
            len * (1.0 - self.m as f64 * self.s) / (self.m - 1) as f64
        } else {
            0.0
        }
    }

    /// The complementary gaps down to `depth`, as intervals of `[0, 1]`.
    pub fn gaps(&self, depth: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut level = vec![(0.0, 1.0)];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * self.m);
            for &(a, b) in &level {
                let len = b - a;
                let g = self.spacing(len);
                for i in 0..self.m {
                    let lo = a + i as f64 * (self.s * len + g);
                    next.push((lo, lo + self.s * len));
                    if i + 1 < self.m {
                        out.push((lo + self.s * len, lo + self.s * len + g));
                    }
                }
            }
            level = next;
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

impl CellTree for SelfSimilar {
    fn picks(&self, _cutoff: i64) -> Vec<i64> {
        (0..self.m as i64).collect()
    }

    fn interval(&self, code: &[i64]) -> Result<(f64, f64)> {
        let (mut a, mut len) = (0.0, 1.0);
        for &n in code {
            if n < 0 || n as usize >= self.m {
                return Err(Error::InvalidArgument(format!("pick {n} out of range")));
            }
            a += n as f64 * (self.s * len + self.spacing(len));
            len *= self.s;
        }
        Ok((a, a + len))
    }

    fn gap(&self, code: &[i64], _n: i64) -> Option<f64> {
        let (a, b) = self.interval(code).ok()?;
        Some(self.spacing(b - a))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalCell {
    pub code: HarmonicCode,
    pub t_interval: (f64, f64),
    pub depth: usize,
}

impl FundamentalCell {
    pub fn length(&self) -> f64 {
        self.t_interval.1 - self.t_interval.0
    }
}

fn codes(picks: &[i64], depth: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|c| {
                picks.iter().map(move |&n| {
                    let mut c = c.clone();
                    c.push(n);
                    c
                })
            })
            .collect();
    }
    out
}

/// All cells of depth `depth` whose picks satisfy `|n| <= cutoff`.
pub fn enumerate_cells<T: CellTree + ?Sized>(
    tree: &T,
    depth: usize,
    cutoff: i64,
) -> Result<Vec<FundamentalCell>> {
    let picks = tree.picks(cutoff);
    codes(&picks, depth)
        .into_iter()
        .map(|c| {
            Ok(FundamentalCell {
                t_interval: tree.interval(&c)?,
                code: HarmonicCode::from_picks(&c),
                depth,
            })
        })
        .collect()
}

pub fn cover_sum(cells: &[FundamentalCell], beta: f64) -> f64 {
    cells.iter().map(|c| c.length().powf(beta)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CoverSumRoot,
    BoxCount,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::CoverSumRoot => "cover_sum_root",
            Method::BoxCount => "box_count",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub method: Method,
    pub value: f64,
    /// Depths for cover sums, box sizes for box counting.
    pub scales: Vec<f64>,
    /// Cover sum at `value` per depth, or box count per size.
    pub diagnostics: Vec<f64>,
    /// Exponent balancing each pair of consecutive depths (cover sums only).
    pub pair_exponents: Vec<f64>,
}

/// The `beta` at which `sum |children|^beta = sum |parents|^beta`.
fn balancing_exponent(parents: &[FundamentalCell], children: &[FundamentalCell]) -> f64 {
    let ratio = |b: f64| cover_sum(children, b).ln() - cover_sum(parents, b).ln();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if ratio(hi) >= 0.0 {
        return 1.0;
    }
    if ratio(lo) <= 0.0 {
        return 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cover-sum estimate: the exponent at which covers by cells of
/// consecutive depths have equal `beta`-sums, taken at the deepest pair.
pub fn upper_dimension_estimate<T: CellTree + ?Sized>(
    tree: &T,
    r_max: usize,
    cutoff: i64,
) -> Result<DimensionEstimate> {
    if r_max < 2 {
        return Err(Error::InvalidArgument("r_max must be at least 2".into()));
    }
    let levels = (1..=r_max)
        .map(|r| enumerate_cells(tree, r, cutoff))
        .collect::<Result<Vec<_>>>()?;
    let pair_exponents: Vec<f64> = levels
        .windows(2)
        .map(|w| balancing_exponent(&w[0], &w[1]))
        .collect();
    for w in pair_exponents.windows(2) {
        if (w[1] - w[0]).abs() > 0.1 {
            return Err(Error::InsufficientDepth(format!(
                "pair exponents {:.4} and {:.4} differ by more than 0.1",
                w[0], w[1]
            )));
        }
    }
    let value = pair_exponents.last().copied().unwrap_or(1.0).clamp(0.0, 1.0);
    Ok(DimensionEstimate {
        method: Method::CoverSumRoot,
        value,
        scales: (1..=r_max).map(|r| r as f64).collect(),
        diagnostics: levels.iter().map(|c| cover_sum(c, value)).collect(),
        pair_exponents,
    })
}

/// Number of `eps`-boxes of `range` not contained in any of the sorted,
/// disjoint `intervals`.
pub fn box_count(intervals: &[(f64, f64)], range: (f64, f64), eps: f64) -> u64 {
    const SLACK: f64 = 1e-6;
    let (a, b) = range;
    let total = ((b - a) / eps - SLACK).ceil().max(0.0) as u64;
    let mut covered = 0u64;
    for &(lo, hi) in intervals {
        let lo = lo.max(a);
        let hi = hi.min(b);
        if hi <= lo {
            continue;
        }
        let first = ((lo - a) / eps - SLACK).ceil();
        let last = ((hi - a) / eps + SLACK).floor();
        if last > first {
            covered += (last - first) as u64;
        }
    }
    total.saturating_sub(covered)
}

/// Box-counting slope of the complement of `intervals` within `range`.
pub fn box_dimension_intervals(
    intervals: &[(f64, f64)],
    range: (f64, f64),
    eps_list: &[f64],
) -> Result<DimensionEstimate> {
    if eps_list.len() < 2 {
        return Err(Error::InvalidArgument("need at least two box sizes".into()));
    }
    let counts: Vec<f64> = eps_list
        .iter()
        .map(|&e| box_count(intervals, range, e) as f64)
        .collect();
    let xs: Vec<f64> = eps_list.iter().map(|e| (1.0 / e).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|n| n.max(1.0).ln()).collect();
    let value = linear_fit(&xs, &ys).0.clamp(0.0, 1.0);
    Ok(DimensionEstimate {
        method: Method::BoxCount,
        value,
        scales: eps_list.to_vec(),
        diagnostics: counts,
        pair_exponents: Vec::new(),
    })
}

/// Smallest box size that tongues with denominator above `q_max` cannot
/// fill: ten times the extrapolated width of the widest missing tongue.
pub fn resolved_scale(atlas: &TongueAtlas, q_max: u64) -> f64 {
    let mut w = 0.0f64;
    for t in atlas.tongues() {
        if let Some((_, q)) = t.rho.to_u64_pair() {
            if 2 * q > q_max && q <= q_max {
                w = w.max(t.width() * (q as f64).powi(3));
            }
        }
    }
    10.0 * w / ((q_max + 1) as f64).powi(3)
}

/// Box-counting dimension of the complement in `[0, 1]` of the tongues
/// with denominator `<= q_max`.
pub fn box_dimension(atlas: &TongueAtlas, q_max: u64, eps_list: &[f64]) -> Result<DimensionEstimate> {
    if atlas.max_locked_den() < q_max {
        return Err(Error::MissingLocking(format!(
            "atlas resolves denominators up to {} only",
            atlas.max_locked_den()
        )));
    }
    let resolved = resolved_scale(atlas, q_max);
    if let Some(&eps) = eps_list.iter().find(|&&e| e < resolved) {
        return Err(Error::ScaleTooFine { eps, resolved });
    }
    let intervals: Vec<(f64, f64)> = atlas
        .tongues()
        .into_iter()
        .filter(|t| t.rho.to_u64_pair().is_some_and(|(_, q)| q <= q_max))
        .map(|t| (t.t_lo, t.t_hi))
        .collect();
    box_dimension_intervals(&intervals, (0.0, 1.0), eps_list)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanReport {
    pub eta: f64,
    pub cutoff: i64,
    pub r_max: usize,
    /// `(code, mass)` for every cell of depth `1..=r_max`.
    pub weights: Vec<(HarmonicCode, f64)>,
    /// Total mass per depth, `1..=r_max`.
    pub total_mass: Vec<f64>,
    /// Largest `mu(D) / |D|^eta`; at most one when the check passes.
    pub max_density: f64,
    pub passed: bool,
    /// Smallest ratio of a resolved sibling gap to the larger adjacent cell.
    pub min_gap_ratio: Option<f64>,
}

/// Builds the mass distribution `mu(child) = mu(parent) |child|^eta /
/// sum_siblings |sib|^eta` down to `r_max` and checks `mu(D) <= |D|^eta`.
/// Fails when some cell violates `sum_siblings |sib|^eta >= |parent|^eta`.
pub fn frostman_check<T: CellTree + ?Sized>(
    tree: &T,
    eta: f64,
    cutoff: i64,
    r_max: usize,
) -> Result<FrostmanReport> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!("eta = {eta} outside (0, 1)")));
    }
    let picks = tree.picks(cutoff);
    let root = tree.interval(&[])?;
    let mut level: Vec<(Vec<i64>, f64, f64)> = vec![(Vec::new(), 1.0, root.1 - root.0)];
    let mut weights = Vec::new();
    let mut total_mass = Vec::new();
    let mut max_density = 0.0f64;
    let mut min_gap_ratio: Option<f64> = None;
    for _ in 0..r_max {
        let mut next = Vec::with_capacity(level.len() * picks.len());
        for (code, mass, len) in &level {
            let mut kids = Vec::with_capacity(picks.len());
            for &n in &picks {
                let mut c = code.clone();
                c.push(n);
                let (a, b) = tree.interval(&c)?;
                kids.push((c, b - a));
            }
            let norm: f64 = kids.iter().map(|(_, l)| l.powf(eta)).sum();
            if norm < len.powf(eta) {
                return Err(Error::CutoffTooSmall {
                    cutoff,
                    cell: HarmonicCode::from_picks(code).to_string(),
                });
            }
            for w in picks.windows(2) {
                if let Some(g) = tree.gap(code, w[0]) {
                    let la = kids.iter().find(|(c, _)| c.last() == Some(&w[0])).map(|k| k.1);
                    let lb = kids.iter().find(|(c, _)| c.last() == Some(&w[1])).map(|k| k.1);
                    if let (Some(la), Some(lb)) = (la, lb) {
                        let r = g / la.max(lb);
                        min_gap_ratio = Some(min_gap_ratio.map_or(r, |m: f64| m.min(r)));
                    }
                }
            }
            for (c, l) in kids {
                let m = mass * l.powf(eta) / norm;
                max_density = max_density.max(m / l.powf(eta));
                next.push((c, m, l));
            }
        }
        total_mass.push(next.iter().map(|(_, m, _)| m).sum());
        weights.extend(
            next.iter()
                .map(|(c, m, _)| (HarmonicCode::from_picks(c), *m)),
        );
        level = next;
    }
    Ok(FrostmanReport {
        eta,
        cutoff,
        r_max,
        weights,
        total_mass,
        max_density,
        passed: max_density <= 1.0 + 1e-12,
        min_gap_ratio,
    })
}

/// Smallest cutoff in `1..=k_max` for which [`frostman_check`] passes.
pub fn frostman_min_cutoff<T: CellTree + ?Sized>(
    tree: &T,
    eta: f64,
    r_max: usize,
    k_max: i64,
) -> Result<i64> {
    let mut last = None;
    for k in 1..=k_max {
        match frostman_check(tree, eta, k, r_max) {
            Ok(rep) if rep.passed => return Ok(k),
            Ok(_) => {}
            Err(e @ Error::CutoffTooSmall { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::CutoffTooSmall {
        cutoff: k_max,
        cell: String::new(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_similar_cover_sum_root() {
        for (m, s) in [(2, 0.25), (3, 1.0 / 9.0), (2, 1.0 / 3.0), (4, 1.0 / 16.0)] {
            let t = SelfSimilar { m, s };
            let est = upper_dimension_estimate(&t, 3, 0).unwrap();
            assert!((est.value - t.dimension()).abs() < 0.01, "{m} {s}: {}", est.value);
        }
    }

    #[test]
    fn four_sixteenths_has_root_half() {
        let t = SelfSimilar { m: 4, s: 1.0 / 16.0 };
        let cells = enumerate_cells(&t, 1, 0).unwrap();
        assert_eq!(cells.len(), 4);
        assert!((cover_sum(&cells, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_similar_box_counting() {
        for (m, s) in [(2, 0.25), (3, 1.0 / 9.0), (2, 1.0 / 3.0)] {
            let t = SelfSimilar { m, s };
            let gaps = t.gaps(12);
            let eps: Vec<f64> = (3..9).map(|j| s.powi(j)).collect();
            let est = box_dimension_intervals(&gaps, (0.0, 1.0), &eps).unwrap();
            assert!((est.value - t.dimension()).abs() < 0.02, "{m} {s}: {}", est.value);
        }
    }

    #[test]
    fn degenerate_box_counts() {
        let eps: Vec<f64> = (4..12).map(|j| 2f64.powi(-j)).collect();
        let full = box_dimension_intervals(&[], (0.0, 1.0), &eps).unwrap();
        assert!((full.value - 1.0).abs() < 1e-9);
        let almost = box_dimension_intervals(&[(0.0, 0.3), (0.3001, 1.0)], (0.0, 1.0), &eps).unwrap();
        assert!(almost.value < 0.05, "{}", almost.value);
    }

    #[test]
    fn frostman_on_self_similar() {
        let t = SelfSimilar { m: 3, s: 1.0 / 9.0 };
        let rep = frostman_check(&t, 0.45, 0, 3).unwrap();
        assert!(rep.passed);
        for m in &rep.total_mass {
            assert!((m - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            frostman_check(&t, 0.55, 0, 3),
            Err(Error::CutoffTooSmall { .. })
        ));
    }
}
