//! Harmonic scalings in parameter space and the saddle-node funnel model.
//!
//! For a Farey domain `(P/Q, P'/Q')` with harmonic endpoints `u_n`, the
//! scaling `h_n` is the length of the parameter gap between the centers of
//! `u_{n+1}` and `u_n`, relative to the gap between the centers of the
//! domain endpoints. These obey a cubic law `h_n ~ 1/(|n|^3 + 1)`.

use num_traits::ToPrimitive;

use crate::atlas::TongueAtlas;
use crate::error::{Error, Result};
use crate::family::{CriticalFamily, LiftPoint};
use crate::farey::{rational_to_code_with, FareyDomain, Limits};
use crate::fit::linear_fit;
use crate::rotation::iterate_preimage;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub domain: FareyDomain,
    pub n_min: i64,
    pub n_max: i64,
    /// `(n, h_n)` in increasing `n`.
    pub h: Vec<(i64, f64)>,
    pub fit_slope: f64,
    pub ratio_spread: f64,
    /// Length of the Farey code of the domain's mediant; 0 for the unit
    /// domain.
    pub depth: usize,
}

pub fn harmonic_scalings(
    atlas: &TongueAtlas,
    domain: &FareyDomain,
    n_min: i64,
    n_max: i64,
) -> Result<ScalingReport> {
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!("empty range {n_min}..={n_max}")));
    }
    let j = (atlas.center(domain.hi())? - atlas.center(domain.lo())?).abs();
    let min_gap = 10.0 * atlas.tol();
    let mut h = Vec::with_capacity((n_max - n_min + 1) as usize);
    let mut c_next = atlas.center(&domain.harmonic_endpoint(n_min))?;
    for n in n_min..=n_max {
        let c_n = c_next;
        c_next = atlas.center(&domain.harmonic_endpoint(n + 1))?;
        let gap = (c_n - c_next).abs();
        if gap < min_gap {
            return Err(Error::ResolutionExceeded(format!(
                "centers of u_{n} and u_{} differ by {gap:.3e}",
                n + 1
            )));
        }
        h.push((n, gap / j));
    }
    let mediant = crate::farey::mediant(domain.lo(), domain.hi());
    let depth = rational_to_code_with(
        &mediant,
        &Limits {
            max_code_len: usize::MAX,
            ..Limits::default()
        },
    )
    .map(|c| c.len())
    .unwrap_or(0);
    let mut report = ScalingReport {
        domain: domain.clone(),
        n_min,
        n_max,
        h,
        fit_slope: f64::NAN,
        ratio_spread: f64::NAN,
        depth,
    };
    if let Ok(law) = cubic_law_check(&report) {
        report.fit_slope = law.slope;
        report.ratio_spread = law.spread;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicLaw {
    /// Least-squares slope of `log h_n` against `log |n|`, `|n| >= 2`.
    pub slope: f64,
    /// max/min of `h_n (|n|^3 + 1)` over the report.
    pub spread: f64,
    /// Slope against `log(|n| + 2)` instead, for comparison.
    pub shifted_slope: f64,
}

pub fn cubic_law_check(report: &ScalingReport) -> Result<CubicLaw> {
    let tail: Vec<(i64, f64)> = report.h.iter().copied().filter(|(n, _)| n.abs() >= 2).collect();
    let covers = |sign: i64| (2..=16).all(|k| tail.iter().any(|(n, _)| *n == sign * k));
    if !covers(1) && !covers(-1) {
        return Err(Error::InvalidArgument(
            "cubic-law fit needs n = 2..16 on at least one side".into(),
        ));
    }
    let ys: Vec<f64> = tail.iter().map(|(_, h)| h.ln()).collect();
    let xs: Vec<f64> = tail.iter().map(|(n, _)| (n.abs() as f64).ln()).collect();
    let xs_shift: Vec<f64> = tail.iter().map(|(n, _)| (n.abs() as f64 + 2.0).ln()).collect();
    let products: Vec<f64> = report
        .h
        .iter()
        .map(|(n, h)| h * ((n.abs() as f64).powi(3) + 1.0))
        .collect();
    let max = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = products.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CubicLaw {
        slope: linear_fit(&xs, &ys).0,
        spread: max / min,
        shifted_slope: linear_fit(&xs_shift, &ys).0,
    })
}

/// `sum_{k=0}^{n-1} |b| / |f^{(k+1)Q}(0) - f^{kQ}(0) - P|` at parameter `z`,
/// where `b > 0` is the first preimage of 0 on the right under the previous
/// closest return. Negative `n` is evaluated on the flipped domain, using
/// the odd symmetry of the family.
pub fn phase_sum(fam: &CriticalFamily, z: f64, domain: &FareyDomain, n: i64) -> Result<f64> {
    if n < 0 {
        return phase_sum(fam, 1.0 - z, &domain.flip(), -n - 1);
    }
    let pair = |r: &crate::farey::Rational| -> Result<(i64, usize)> {
        let (p, q) = r
            .to_u64_pair()
            .ok_or_else(|| Error::DenominatorTooLarge {
                den: r.den().to_string(),
                max: u64::MAX,
            })?;
        Ok((p as i64, q as usize))
    };
    let (p, q) = pair(domain.lo())?;
    let (pp, qq) = pair(domain.hi())?;
    // Previous closest return and its numerator.
    let q_back = qq % q;
    let p_back = pp - p * (qq / q) as i64;
    let map = fam.at(z);
    let b = if q_back == 0 {
        p_back as f64
    } else {
        iterate_preimage(&map, q_back, p_back as f64, 1e-14)
    };
    let mut sum = 0.0;
    let mut y = LiftPoint::ZERO;
    for _ in 0..n {
        let next = crate::family::iterate(&map, y, q);
        let gap = (next.diff(&y) - p as f64).abs();
        if gap < 1e-15 {
            return Err(Error::DegenerateInterval(gap));
        }
        sum += b.abs() / gap;
        y = next;
    }
    Ok(sum)
}

/// An orbit of `y -> y + alpha y^2 + eps` through `(-kappa, kappa)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalOrbit {
    pub alpha: f64,
    pub eps: f64,
    pub kappa: f64,
    pub points: Vec<f64>,
    pub passage_length: u64,
}

pub const ORBIT_GUARD: u64 = 1_000_000_000;

/// The longest orbit of the quadratic funnel map inside `(-kappa, kappa)`.
///
/// It starts at the infimum of the image of the domain, below which no
/// point has a preimage, and ends at the last point before leaving.
pub fn maximal_orbit(alpha: f64, eps: f64, kappa: f64) -> Result<MaximalOrbit> {
    maximal_orbit_with_guard(alpha, eps, kappa, ORBIT_GUARD)
}

pub fn maximal_orbit_with_guard(alpha: f64, eps: f64, kappa: f64, guard: u64) -> Result<MaximalOrbit> {
    if !(alpha > 0.0 && eps > 0.0 && kappa > 0.0) {
        return Err(Error::InvalidArgument(
            "alpha, eps and kappa must be positive".into(),
        ));
    }
    let phi = |y: f64| y + alpha * y * y + eps;
    let vertex = -1.0 / (2.0 * alpha);
    let mut y = phi(vertex.max(-kappa));
    let mut points = Vec::new();
    while y < kappa {
        if points.len() as u64 >= guard {
            return Err(Error::OverflowGuard(guard));
        }
        points.push(y);
        y = phi(y);
    }
    Ok(MaximalOrbit {
        alpha,
        eps,
        kappa,
        passage_length: points.len() as u64,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitFacts {
    /// `(alpha / l^2) / eps` with `l` the passage length.
    pub epsilon_l2_ratio: f64,
    /// Fraction of steps shorter than `2 eps`.
    pub slow_fraction: f64,
    pub reciprocal_gap_sum: f64,
}

pub fn orbit_facts_check(orbit: &MaximalOrbit) -> Result<OrbitFacts> {
    if orbit.points.is_empty() {
        return Err(Error::InvalidArgument("empty orbit".into()));
    }
    let l = orbit.passage_length as f64;
    let gaps: Vec<f64> = orbit.points.windows(2).map(|w| w[1] - w[0]).collect();
    let slow = gaps.iter().filter(|&&g| g < 2.0 * orbit.eps).count();
    Ok(OrbitFacts {
        epsilon_l2_ratio: orbit.alpha / (l * l) / orbit.eps,
        slow_fraction: if gaps.is_empty() {
            0.0
        } else {
            slow as f64 / gaps.len() as f64
        },
        reciprocal_gap_sum: gaps.iter().map(|g| 1.0 / g).sum(),
    })
}

/// One row of an `eps` sweep of the funnel model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleRow {
    pub alpha: f64,
    pub eps: f64,
    pub kappa: f64,
    pub passage_length: u64,
    pub facts: OrbitFacts,
}

pub fn saddle_sweep(alpha: f64, kappa: f64, eps_list: &[f64]) -> Result<Vec<SaddleRow>> {
    eps_list
        .iter()
        .map(|&eps| {
            let orbit = maximal_orbit(alpha, eps, kappa)?;
            Ok(SaddleRow {
                alpha,
                eps,
                kappa,
                passage_length: orbit.passage_length,
                facts: orbit_facts_check(&orbit)?,
            })
        })
        .collect()
}

/// Log-log slope of passage length against `eps` over a sweep.
pub fn passage_slope(rows: &[SaddleRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.passage_length as f64).ln()).collect();
    linear_fit(&xs, &ys).0
}

/// Log-log slope of the reciprocal gap sum against `eps` over a sweep.
pub fn gap_sum_slope(rows: &[SaddleRow]) -> f64 {
    let xs: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.facts.reciprocal_gap_sum.ln()).collect();
    linear_fit(&xs, &ys).0
}

/// `h_n (|n|^3 + 1)`.
pub fn cubic_product(n: i64, h: f64) -> f64 {
    h * ((n.unsigned_abs().to_f64().unwrap_or(f64::INFINITY)).powi(3) + 1.0)
}
