//! Empirical Hölder continuity of the rotation number as a function of the
//! parameter, and the `zeta` diagnostics
//! `zeta(x, y) = |x - y| |c(x) - c(y)|^(-alpha)` built from tongue centers.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atlas::TongueAtlas;
use crate::error::{Error, Result};
use crate::farey::{FareyDomain, Rational};
use crate::fit::linear_fit;
use crate::rotation::{biguint_to_f64, rational_to_f64};

/// `|u - w|` computed from the exact difference.
fn rational_distance(u: &Rational, w: &Rational) -> f64 {
    let a = u.num() * w.den();
    let b = w.num() * u.den();
    let d: BigUint = if a > b { a - b } else { b - a };
    biguint_to_f64(&d) / (biguint_to_f64(u.den()) * biguint_to_f64(w.den()))
}

pub fn zeta(atlas: &TongueAtlas, u: &Rational, w: &Rational, alpha: f64) -> Result<f64> {
    if u == w {
        return Err(Error::InvalidArgument(format!("zeta needs distinct points, got {u} twice")));
    }
    let dc = (atlas.center(u)? - atlas.center(w)?).abs();
    Ok(rational_distance(u, w) * dc.powf(-alpha))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaReport {
    pub alpha: f64,
    /// Largest `zeta(u_i, u_j) / zeta(P/Q, P'/Q')` over `i j >= 0`.
    pub max_ratio: f64,
    /// `(n, zeta(u_{n+1}, u_n) / zeta(P/Q, P'/Q'))`.
    pub adjacent: Vec<(i64, f64)>,
}

/// Ratios of `zeta` on pairs of harmonic endpoints on the same side of the
/// domain, relative to `zeta` of the domain endpoints.
pub fn zeta_uniformity(
    atlas: &TongueAtlas,
    domain: &FareyDomain,
    alpha: f64,
    n_max: i64,
) -> Result<ZetaReport> {
    let base = zeta(atlas, domain.lo(), domain.hi(), alpha)?;
    let idx: Vec<i64> = (-n_max..=n_max + 1).collect();
    let pts: Vec<Rational> = idx.iter().map(|&n| domain.harmonic_endpoint(n)).collect();
    let mut max_ratio = 0.0f64;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            if idx[i] * idx[j] >= 0 {
                max_ratio = max_ratio.max(zeta(atlas, &pts[i], &pts[j], alpha)? / base);
            }
        }
    }
    let adjacent = (-n_max..=n_max)
        .map(|n| {
            let z = zeta(
                atlas,
                &domain.harmonic_endpoint(n + 1),
                &domain.harmonic_endpoint(n),
                alpha,
            )?;
            Ok((n, z / base))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ZetaReport {
        alpha,
        max_ratio,
        adjacent,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleRow {
    pub gap: f64,
    pub max_drho: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub alpha: f64,
    pub c_const: f64,
    /// Fitted slope before clamping into `(0, 1]`.
    pub raw_slope: f64,
    pub intercept: f64,
    pub scales: Vec<ScaleRow>,
    /// `((t, rho), (t, rho))` attaining the largest `|drho| / |dt|^alpha`.
    pub worst_pair: ((f64, f64), (f64, f64)),
    /// `(|dt|, |drho|)` of every sampled pair with `dt != 0`.
    pub samples: Vec<(f64, f64)>,
}

impl HolderFit {
    pub fn envelope(&self, dt: f64) -> f64 {
        self.c_const * dt.powf(self.alpha)
    }

    /// Whether every sample lies under the envelope.
    pub fn envelope_holds(&self) -> bool {
        self.samples
            .iter()
            .all(|&(dt, dr)| dr <= self.envelope(dt) * (1.0 + 1e-12))
    }
}

/// Hölder fit on `(t, rho)` points sorted by `t`.
///
/// At gap `2^-j`, `j = 1..=scale_count`, anchors are drawn uniformly and
/// paired with the point nearest `t + 2^-j` (or `t - 2^-j` past the end).
/// The per-scale maximum of `|drho|` is fitted against the gap in log-log
/// coordinates; `c_const` is then raised until every pair is enveloped.
pub fn holder_fit_points(
    points: &[(f64, f64)],
    scale_count: usize,
    pairs_per_scale: usize,
    seed: u64,
) -> Result<HolderFit> {
    if scale_count < 4 {
        return Err(Error::InvalidArgument("scale_count must be at least 4".into()));
    }
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let ts: Vec<f64> = points.iter().map(|p| p.0).collect();
    let nearest = |x: f64| -> usize {
        let i = ts.partition_point(|&t| t < x);
        if i == 0 {
            0
        } else if i == ts.len() {
            ts.len() - 1
        } else if (ts[i] - x).abs() < (x - ts[i - 1]).abs() {
            i
        } else {
            i - 1
        }
    };
    let (t_min, t_max) = (ts[0], ts[ts.len() - 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scales = Vec::with_capacity(scale_count);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 1..=scale_count {
        let gap = 0.5f64.powi(j as i32);
        let mut row = ScaleRow {
            gap,
            max_drho: 0.0,
            pairs: 0,
        };
        for _ in 0..pairs_per_scale {
            let a = rng.random_range(0..points.len());
            let target = if ts[a] + gap <= t_max {
                ts[a] + gap
            } else {
                (ts[a] - gap).max(t_min)
            };
            let b = nearest(target);
            if a == b {
                continue;
            }
            row.pairs += 1;
            row.max_drho = row.max_drho.max((points[a].1 - points[b].1).abs());
            pairs.push((a, b));
        }
        scales.push(row);
    }
    let used: Vec<&ScaleRow> = scales.iter().filter(|r| r.max_drho > 0.0).collect();
    if used.len() < 2 {
        return Err(Error::InvalidArgument("fewer than two scales with nonzero spread".into()));
    }
    let xs: Vec<f64> = used.iter().map(|r| r.gap.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.max_drho.ln()).collect();
    let (raw_slope, intercept) = linear_fit(&xs, &ys);
    let alpha = raw_slope.clamp(1e-6, 1.0);

    let mut c_const = intercept.exp();
    let mut worst = (0usize, 0usize);
    let mut worst_ratio = -1.0f64;
    let mut samples = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let dt = (points[a].0 - points[b].0).abs();
        let dr = (points[a].1 - points[b].1).abs();
        if dt == 0.0 {
            continue;
        }
        samples.push((dt, dr));
        let ratio = dr / dt.powf(alpha);
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = (a, b);
        }
    }
    c_const = c_const.max(worst_ratio);
    Ok(HolderFit {
        alpha,
        c_const,
        raw_slope,
        intercept,
        scales,
        worst_pair: (points[worst.0], points[worst.1]),
        samples,
    })
}

/// `(center, rho)` of every atlas record inside `[0, 1]`.
pub fn atlas_points(atlas: &TongueAtlas) -> Vec<(f64, f64)> {
    atlas
        .records()
        .iter()
        .map(|r| (r.center, rational_to_f64(&r.rho)))
        .collect()
}

/// Hölder fit of the rotation number sampled at tongue centers.
pub fn holder_fit(
    atlas: &TongueAtlas,
    scale_count: usize,
    pairs_per_scale: usize,
    seed: u64,
) -> Result<HolderFit> {
    holder_fit_points(&atlas_points(atlas), scale_count, pairs_per_scale, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{build_atlas, AtlasSpec, Generator};
    use crate::family::FamilySpec;
    use crate::rotation::RotationConfig;

    fn atlas(q_max: u64) -> TongueAtlas {
        let spec = AtlasSpec {
            family: FamilySpec {
                name: "sine-l".into(),
                l: 3,
            },
            tol: 1e-10,
            generator: Generator::Farey { q_max },
        };
        build_atlas(&spec, 1, &RotationConfig::default()).unwrap()
    }

    #[test]
    fn zeta_of_unit_interval_is_one() {
        let a = atlas(3);
        for alpha in [0.1, 0.25, 0.5] {
            assert_eq!(zeta(&a, &Rational::zero(), &Rational::one(), alpha).unwrap(), 1.0);
        }
    }

    #[test]
    fn zeta_is_symmetric_and_positive() {
        let a = atlas(3);
        let (u, w) = (Rational::from((1, 3)), Rational::from((1, 2)));
        for alpha in [0.1, 0.3, 0.5] {
            let z = zeta(&a, &u, &w, alpha).unwrap();
            assert!(z > 0.0);
            assert_eq!(z, zeta(&a, &w, &u, alpha).unwrap());
        }
        assert!(matches!(
            zeta(&a, &u, &Rational::from((2, 5)), 0.25),
            Err(Error::MissingCenter(_))
        ));
    }

    #[test]
    fn identity_is_lipschitz() {
        let pts: Vec<(f64, f64)> = (0..=2000).map(|i| (i as f64 / 2000.0, i as f64 / 2000.0)).collect();
        let fit = holder_fit_points(&pts, 8, 200, 1).unwrap();
        assert!((fit.alpha - 1.0).abs() < 0.01);
        assert!((fit.c_const - 1.0).abs() < 0.01);
        assert!(fit.envelope_holds());
    }

    #[test]
    fn coincident_points_are_skipped() {
        let pts = vec![(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)];
        let fit = holder_fit_points(&pts, 4, 20, 3);
        // Only the unit gap resolves anything.
        assert!(fit.is_err() || fit.unwrap().samples.iter().all(|s| s.0 > 0.0));
    }
}
