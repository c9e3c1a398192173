//! Rotation numbers, rational comparators, locking intervals and centers.
//!
//! The comparator works on the displacement `g(x) = f_t^q(x) - x - p`, which
//! is periodic in `x`. The rotation number is below `p/q` iff `g < 0`
//! everywhere, above iff `g > 0` everywhere, and equal otherwise.
//!
//! Every quantity searched over the parameter here (`max g`, `min g`,
//! `f_t^q(0)`) grows with slope at least one in `t`, because each of the
//! `q` compositions adds `t` and the maps are non-decreasing. A value `v`
//! at `t` therefore pins the root to `[t - v, t]` or `[t, t - v]`, which the
//! bracketing solver uses on top of regula falsi.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::{
    derivative_of_iterate, iterate, CircleMap, CriticalFamily, LiftPoint, SmoothCircleMap,
    DEGENERATE_DERIVATIVE,
};
use crate::farey::{FareyDomain, HarmonicCode, HarmonicSymbol, Limits, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparison {
    Below,
    Locked,
    Above,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Below => "below",
            Comparison::Locked => "locked",
            Comparison::Above => "above",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationConfig {
    pub q_max: u64,
    /// Extrema closer to zero than this cannot be given a sign.
    pub sign_tol: f64,
    pub grid_min: usize,
    pub grid_per_q: usize,
    /// Local maxima (minima) of the grid refined by golden section.
    pub refine_candidates: usize,
    pub center_tol: f64,
    pub max_iter: usize,
    pub limits: Limits,
}

impl Default for RotationConfig {
    fn default() -> Self {
        RotationConfig {
            q_max: 1 << 20,
            sign_tol: 1e-13,
            grid_min: 64,
            grid_per_q: 8,
            refine_candidates: 4,
            center_tol: 1e-13,
            max_iter: 200,
            limits: Limits::default(),
        }
    }
}

/// A locking interval with its center.
#[derive(Debug, Clone, PartialEq)]
pub struct Tongue {
    pub rho: Rational,
    pub t_lo: f64,
    pub t_hi: f64,
    pub center: f64,
    pub tol: f64,
}

impl Tongue {
    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

/// `(p, q)` as machine integers, checked against the configured limit.
pub fn small_pq(pq: &Rational, cfg: &RotationConfig) -> Result<(i64, usize)> {
    let too_large = || Error::DenominatorTooLarge {
        den: pq.den().to_string(),
        max: cfg.q_max,
    };
    let q = pq.den().to_u64().ok_or_else(too_large)?;
    if q > cfg.q_max {
        return Err(too_large());
    }
    let p = pq.num().to_i64().ok_or_else(too_large)?;
    Ok((p, q as usize))
}

/// `f_t^n(0) / n` and the a-priori bound `1/n` on its distance to the
/// rotation number.
pub fn birkhoff_rotation_number(fam: &CriticalFamily, t: f64, n_iter: usize) -> (f64, f64) {
    let n = n_iter.max(1);
    let y = fam.iterate(t, LiftPoint::ZERO, n);
    (y.value() / n as f64, 1.0 / n as f64)
}

fn displacement<M: CircleMap + ?Sized>(map: &M, p: i64, q: usize, x: f64) -> f64 {
    let x = LiftPoint::from_f64(x);
    iterate(map, x, q).diff(&x) - p as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Max,
    Min,
}

impl Extremum {
    fn sign(self) -> f64 {
        match self {
            Extremum::Max => 1.0,
            Extremum::Min => -1.0,
        }
    }
}

/// Grid samples of the displacement over one period.
fn displacement_grid<M: CircleMap + ?Sized>(
    map: &M,
    p: i64,
    q: usize,
    cfg: &RotationConfig,
) -> (f64, Vec<f64>) {
    let n = cfg.grid_min.max(cfg.grid_per_q * q);
    let h = 1.0 / n as f64;
    let g = (0..n)
        .map(|i| displacement(map, p, q, -0.5 + i as f64 * h))
        .collect();
    (h, g)
}

/// Refined extremum of the displacement, starting from a precomputed grid,
/// with the locations of the refined peaks (best first).
fn refine_extremum<M: CircleMap + ?Sized>(
    map: &M,
    p: i64,
    q: usize,
    h: f64,
    grid: &[f64],
    which: Extremum,
    cfg: &RotationConfig,
) -> (f64, Vec<f64>) {
    let n = grid.len();
    let sign = which.sign();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = sign * grid[i];
            v >= sign * grid[(i + n - 1) % n] && v >= sign * grid[(i + 1) % n]
        })
        .collect();
    peaks.sort_by(|&a, &b| (sign * grid[b]).total_cmp(&(sign * grid[a])).then(a.cmp(&b)));
    peaks.truncate(cfg.refine_candidates.max(1));

    let mut best = grid.iter().map(|v| sign * v).fold(f64::NEG_INFINITY, f64::max);
    let mut found: Vec<(f64, f64)> = peaks
        .into_iter()
        .map(|i| {
            let x = -0.5 + i as f64 * h;
            golden_max(|y| sign * displacement(map, p, q, y), x - h, x + h, 1e-11)
        })
        .collect();
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    if let Some(&(v, _)) = found.first() {
        best = best.max(v);
    }
    (sign * best, found.into_iter().map(|f| f.1).collect())
}

fn extremum<M: CircleMap + ?Sized>(
    map: &M,
    p: i64,
    q: usize,
    which: Extremum,
    cfg: &RotationConfig,
) -> (f64, Vec<f64>) {
    let (h, grid) = displacement_grid(map, p, q, cfg);
    refine_extremum(map, p, q, h, &grid, which, cfg)
}

/// Maximum of a unimodal function on `[a, b]` by golden-section search,
/// with its location.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = if fc >= fd { (fc, c) } else { (fd, d) };
    while b - a > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc > best.0 {
                best = (fc, c);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd > best.0 {
                best = (fd, d);
            }
        }
    }
    best
}

/// Sign test of the displacement for an arbitrary circle map.
pub fn compare_map<M: CircleMap + ?Sized>(
    map: &M,
    pq: &Rational,
    cfg: &RotationConfig,
) -> Result<Comparison> {
    let (p, q) = small_pq(pq, cfg)?;
    let (h, grid) = displacement_grid(map, p, q, cfg);
    let any_pos = grid.iter().any(|&v| v > 0.0);
    let any_neg = grid.iter().any(|&v| v < 0.0);
    if (any_pos && any_neg) || grid.contains(&0.0) {
        return Ok(Comparison::Locked);
    }
    let (which, outside) = if any_neg {
        (Extremum::Max, Comparison::Below)
    } else {
        (Extremum::Min, Comparison::Above)
    };
    let (e, _) = refine_extremum(map, p, q, h, &grid, which, cfg);
    if e.abs() <= cfg.sign_tol {
        return Err(Error::ResolutionExceeded(format!(
            "extremum {e:.3e} of f^{q} - x - {p} is within {:.0e} of zero",
            cfg.sign_tol
        )));
    }
    let locked = match which {
        Extremum::Max => e > 0.0,
        Extremum::Min => e < 0.0,
    };
    Ok(if locked { Comparison::Locked } else { outside })
}

/// Whether the rotation number of `F_t` is below, equal to, or above `pq`.
pub fn compare_to_rational(
    fam: &CriticalFamily,
    t: f64,
    pq: &Rational,
    cfg: &RotationConfig,
) -> Result<Comparison> {
    compare_map(&fam.at(t), pq, cfg)
}

fn damping(f_new: f64, f_old: f64) -> f64 {
    let m = 1.0 - f_new / f_old;
    if m > 0.0 {
        m
    } else {
        0.5
    }
}

/// Brackets the root of an increasing function whose slope is at least
/// one. Returns `(lo, hi)` with `phi(lo) <= 0 <= phi(hi)` and
/// `hi - lo <= tol`.
pub fn solve_unit_slope(
    mut phi: impl FnMut(f64) -> f64,
    t0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    let f0 = phi(t0);
    if f0 == 0.0 {
        return Ok((t0, t0));
    }
    let t1 = t0 - f0;
    let f1 = phi(t1);
    if f1 == 0.0 {
        return Ok((t1, t1));
    }
    let ((mut a, mut fa), (mut b, mut fb)) = if f0 < 0.0 {
        ((t0, f0), (t1, f1))
    } else {
        ((t1, f1), (t0, f0))
    };
    if fa > 0.0 || fb < 0.0 {
        // Only possible through rounding in phi; fall back to the two points.
        let (lo, hi) = (a.min(b), a.max(b));
        return Ok((lo, hi));
    }
    let mut lo = a.max(b - fb);
    let mut hi = b.min(a - fa);
    let mut last_side = 0i8;
    let mut width_before = hi - lo;
    for iter in 0..max_iter {
        if hi - lo <= tol {
            return Ok((lo, hi));
        }
        if hi < lo {
            // Bounds crossed through rounding: the root is at the noise floor.
            let m = 0.5 * (lo + hi);
            return Ok((m, m));
        }
        let mut t = a - fa * (b - a) / (fb - fa);
        if iter % 4 == 3 {
            if hi - lo > 0.5 * width_before {
                t = 0.5 * (lo + hi);
            }
            width_before = hi - lo;
        }
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let ft = phi(t);
        if ft == 0.0 {
            return Ok((t, t));
        }
        // Anderson-Bjorck damping of the retained end point.
        if ft < 0.0 {
            if last_side < 0 {
                fb *= damping(ft, fa);
            }
            a = t;
            fa = ft;
            last_side = -1;
            lo = lo.max(t);
            hi = hi.min(t - ft);
        } else {
            if last_side > 0 {
                fa *= damping(ft, fb);
            }
            b = t;
            fb = ft;
            last_side = 1;
            hi = hi.min(t);
            lo = lo.max(t - ft);
        }
    }
    if hi - lo <= tol {
        Ok((lo, hi))
    } else {
        Err(Error::ResolutionExceeded(format!(
            "root bracket stalled at width {:.3e} after {max_iter} steps",
            hi - lo
        )))
    }
}

/// The parameter at which the critical point is periodic with rotation
/// number `pq`.
pub fn center(fam: &CriticalFamily, pq: &Rational, cfg: &RotationConfig) -> Result<f64> {
    let (p, q) = small_pq(pq, cfg)?;
    if q == 1 {
        return Ok(p as f64);
    }
    let (lo, hi) = solve_unit_slope(
        |t| fam.iterate(t, LiftPoint::ZERO, q).value() - p as f64,
        p as f64 / q as f64,
        cfg.center_tol,
        cfg.max_iter,
    )
    .map_err(|e| with_rational(e, pq))?;
    Ok(0.5 * (lo + hi))
}

fn with_rational(e: Error, pq: &Rational) -> Error {
    match e {
        Error::ResolutionExceeded(msg) => Error::ResolutionExceeded(format!("{pq}: {msg}")),
        other => other,
    }
}

/// Locking interval of `pq` as the outer ends of brackets of width `tol`
/// around each boundary, searched from a known center.
pub fn locking_interval_from_center(
    fam: &CriticalFamily,
    pq: &Rational,
    c: f64,
    tol: f64,
    cfg: &RotationConfig,
) -> Result<(f64, f64)> {
    let (p, q) = small_pq(pq, cfg)?;
    let lower = boundary(fam, p, q, c, Extremum::Max, tol, cfg).map_err(|e| with_rational(e, pq))?;
    let upper = boundary(fam, p, q, c, Extremum::Min, tol, cfg).map_err(|e| with_rational(e, pq))?;
    Ok((lower.0, upper.1))
}

/// Root of the extremal displacement in `t`.
///
/// After two full scans the search follows the few best humps of the
/// displacement locally. A local value is a value of the displacement, so the side of
/// the bracket facing into the tongue stays valid; the outer side is
/// confirmed by a full scan, and the plain search is the fallback.
fn boundary(
    fam: &CriticalFamily,
    p: i64,
    q: usize,
    c: f64,
    which: Extremum,
    tol: f64,
    cfg: &RotationConfig,
) -> Result<(f64, f64)> {
    let half = 0.25 / q as f64;
    let sign = which.sign();
    let mut calls = 0usize;
    let mut track: Vec<f64> = Vec::new();
    let tracked = solve_unit_slope(
        |t| {
            let map = fam.at(t);
            calls += 1;
            if calls <= 2 || track.is_empty() {
                let (v, xs) = extremum(&map, p, q, which, cfg);
                track = xs;
                return v;
            }
            let mut best = f64::NEG_INFINITY;
            for x in track.iter_mut() {
                let (v, y) = golden_max(|y| sign * displacement(&map, p, q, y), *x - half, *x + half, 1e-11);
                *x = y;
                best = best.max(v);
            }
            sign * best
        },
        c,
        tol,
        cfg.max_iter,
    );
    if let Ok((lo, hi)) = tracked {
        let outer = match which {
            Extremum::Max => lo,
            Extremum::Min => hi,
        };
        let (v, _) = extremum(&fam.at(outer), p, q, which, cfg);
        if sign * v <= cfg.sign_tol {
            return Ok((lo, hi));
        }
    }
    solve_unit_slope(
        |t| extremum(&fam.at(t), p, q, which, cfg).0,
        c,
        tol,
        cfg.max_iter,
    )
}

pub fn locking_interval(
    fam: &CriticalFamily,
    pq: &Rational,
    tol: f64,
    cfg: &RotationConfig,
) -> Result<(f64, f64)> {
    let c = center(fam, pq, cfg)?;
    locking_interval_from_center(fam, pq, c, tol, cfg)
}

pub fn tongue(fam: &CriticalFamily, pq: &Rational, tol: f64, cfg: &RotationConfig) -> Result<Tongue> {
    let c = center(fam, pq, cfg)?;
    let (t_lo, t_hi) = locking_interval_from_center(fam, pq, c, tol, cfg)?;
    Ok(Tongue {
        rho: pq.clone(),
        t_lo: t_lo.min(c),
        t_hi: t_hi.max(c),
        center: c,
        tol,
    })
}

/// Harmonic code of the rotation number of `F_t` relative to `base`,
/// located with the comparator only.
pub fn param_harmonic_code(
    fam: &CriticalFamily,
    t: f64,
    base: &FareyDomain,
    depth: usize,
    cfg: &RotationConfig,
) -> Result<HarmonicCode> {
    let map = fam.at(t);
    for end in [base.lo(), base.hi()] {
        if compare_map(&map, end, cfg)? == Comparison::Locked {
            return Err(Error::InvalidArgument(format!(
                "t = {t} locks at the domain endpoint {end}"
            )));
        }
    }
    let mut code = HarmonicCode::default();
    let mut d = base.clone();
    let max_pick = cfg.limits.max_pick;
    for _ in 0..depth {
        let cmp = |n: i64| -> Result<Comparison> {
            if n.abs() > max_pick {
                return Err(Error::PickTooLarge { pick: n, max: max_pick });
            }
            compare_map(&map, &d.harmonic_endpoint(n), cfg)
        };
        // u_n decreases in n; find n with rho in (u_{n+1}, u_n).
        let c0 = cmp(0)?;
        let pick = match c0 {
            Comparison::Locked => {
                code.symbols.push(HarmonicSymbol::End(0));
                return Ok(code);
            }
            Comparison::Below => {
                // rho < u_0: search n >= 0 for the first u_{n+1} below rho.
                let (mut good, mut bad) = (0i64, 1i64);
                loop {
                    match cmp(bad)? {
                        Comparison::Below => {
                            good = bad;
                            bad *= 2;
                        }
                        Comparison::Locked => {
                            code.symbols.push(HarmonicSymbol::End(bad));
                            return Ok(code);
                        }
                        Comparison::Above => break,
                    }
                }
                while bad - good > 1 {
                    let mid = good + (bad - good) / 2;
                    match cmp(mid)? {
                        Comparison::Below => good = mid,
                        Comparison::Above => bad = mid,
                        Comparison::Locked => {
                            code.symbols.push(HarmonicSymbol::End(mid));
                            return Ok(code);
                        }
                    }
                }
                good
            }
            Comparison::Above => {
                // rho > u_0: search n <= -1 for the first u_n above rho.
                let (mut good, mut bad) = (0i64, -1i64);
                loop {
                    match cmp(bad)? {
                        Comparison::Above => {
                            good = bad;
                            bad *= 2;
                        }
                        Comparison::Locked => {
                            code.symbols.push(HarmonicSymbol::End(bad));
                            return Ok(code);
                        }
                        Comparison::Below => break,
                    }
                }
                while good - bad > 1 {
                    let mid = bad + (good - bad) / 2;
                    match cmp(mid)? {
                        Comparison::Above => good = mid,
                        Comparison::Below => bad = mid,
                        Comparison::Locked => {
                            code.symbols.push(HarmonicSymbol::End(mid));
                            return Ok(code);
                        }
                    }
                }
                bad
            }
        };
        code.symbols.push(HarmonicSymbol::Step(pick));
        d = d.harmonic_refine(pick);
    }
    Ok(code)
}

/// Iterates at which the orbit of 0 comes closer to an integer than at any
/// earlier time, up to `count` of them or `max_iter` iterations.
pub fn closest_returns_dynamical<M: CircleMap + ?Sized>(
    map: &M,
    count: usize,
    max_iter: u64,
) -> Vec<u64> {
    let mut out = Vec::new();
    let mut best = f64::INFINITY;
    let mut y = LiftPoint::ZERO;
    for k in 1..=max_iter {
        if out.len() >= count {
            break;
        }
        y = map.lift(y);
        let d = y.circle_offset().abs();
        if d < best {
            best = d;
            out.push(k);
            if d == 0.0 {
                break;
            }
        }
    }
    out
}

/// Solves `f^q(x) = value` for `x` on the lift.
pub fn iterate_preimage<M: CircleMap + ?Sized>(map: &M, q: usize, value: f64, xtol: f64) -> f64 {
    let h = |x: f64| iterate(map, LiftPoint::from_f64(x), q).value() - value;
    let h0 = h(0.0);
    let k = (-h0).ceil() - 1.0;
    let (mut a, mut b) = (k, k + 1.0);
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if h(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `d f^n / dt` at `x`: `sum_{i=1..n} (f^{n-i})'(f^i(x))`.
pub fn param_derivative<M: SmoothCircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> f64 {
    // Horner form of the chain sum: s_i = 1 + f'(x_i) s_{i-1}.
    let mut y = map.lift(x);
    let mut s = 1.0;
    for _ in 1..n {
        s = 1.0 + map.jet(y).d1 * s;
        y = map.lift(y);
    }
    s
}

/// Spread of `d f^Q / dt` over samples of `(t, x)` in the comparability
/// region of a Farey domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub domain: FareyDomain,
    pub samples: usize,
    /// max/min of the chain sum over all samples.
    pub chain_ratio: f64,
    /// Largest relative gap between chain sum and central difference in `t`.
    pub fd_max_rel_err: f64,
    /// max/min of the phase-space interval proxy; absent when `Q' = Q`.
    pub proxy_ratio: Option<f64>,
    /// Range of proxy / chain sum over all samples.
    pub proxy_over_chain: Option<(f64, f64)>,
}

/// Samples `t` uniformly in `t_range` and `x` in `(0, b)` where `b` is the
/// first point right of 0 with `f_t^{Q'}(b) = P'`, then compares three
/// evaluations of the parameter derivative of `f^Q`.
pub fn param_derivative_report(
    fam: &CriticalFamily,
    domain: &FareyDomain,
    t_range: (f64, f64),
    samples: usize,
    seed: u64,
) -> Result<DerivativeReport> {
    let cfg = RotationConfig::default();
    let (pl, ql) = small_pq(domain.lo(), &cfg)?;
    let (ph, qh) = small_pq(domain.hi(), &cfg)?;
    let big_q = ql;
    let q_back = qh.saturating_sub(ql);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cmin, mut cmax) = (f64::INFINITY, 0.0f64);
    let (mut pmin, mut pmax) = (f64::INFINITY, 0.0f64);
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    let mut fd_err = 0.0f64;
    let (t0, t1) = t_range;
    for _ in 0..samples {
        let t = t0 + (t1 - t0) * rng.random_range(0.02..0.98);
        let map = fam.at(t);
        let b = iterate_preimage(&map, qh, ph as f64, 1e-14);
        let x = LiftPoint::from_f64(b * rng.random_range(0.02..0.98));

        let chain = param_derivative(&map, x, big_q);
        let step = 1e-6 * (t1 - t0).max(1e-12);
        let fd = (iterate(&fam.at(t + step), x, big_q).value()
            - iterate(&fam.at(t - step), x, big_q).value())
            / (2.0 * step);
        fd_err = fd_err.max(((fd - chain) / chain).abs());
        cmin = cmin.min(chain);
        cmax = cmax.max(chain);

        if q_back > 0 {
            let mut orbit = Vec::with_capacity(big_q + q_back + 1);
            let mut y = x;
            for _ in 0..=big_q + q_back {
                orbit.push(y);
                y = map.lift(y);
            }
            let shift = (ph - pl) as f64;
            let top = (orbit[big_q + q_back].diff(&orbit[big_q]) - shift).abs();
            let mut proxy = 0.0;
            for i in 1..=big_q {
                let gap = (orbit[i + q_back].diff(&orbit[i]) - shift).abs();
                if gap < DEGENERATE_DERIVATIVE {
                    return Err(Error::DegenerateDerivative { step: i, value: gap });
                }
                proxy += top / gap;
            }
            pmin = pmin.min(proxy);
            pmax = pmax.max(proxy);
            rmin = rmin.min(proxy / chain);
            rmax = rmax.max(proxy / chain);
        }
    }
    Ok(DerivativeReport {
        domain: domain.clone(),
        samples,
        chain_ratio: cmax / cmin,
        fd_max_rel_err: fd_err,
        proxy_ratio: (q_back > 0).then(|| pmax / pmin),
        proxy_over_chain: (q_back > 0).then_some((rmin, rmax)),
    })
}

/// Derivative of `f^n` along the orbit of `x`, rejecting critical orbits.
pub fn checked_derivative<M: SmoothCircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> Result<f64> {
    let d = derivative_of_iterate(map, x, n);
    if d.abs() < DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateDerivative { step: n, value: d });
    }
    Ok(d)
}

/// Ordering helper for tongues sorted by rotation number.
pub fn cmp_tongues(a: &Tongue, b: &Tongue) -> Ordering {
    a.rho.cmp(&b.rho)
}

/// Denominators as `u64`, for reporting.
pub fn den_u64(r: &Rational) -> Option<u64> {
    r.den().to_u64()
}

pub(crate) fn biguint_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// A rational as the nearest double.
pub fn rational_to_f64(r: &Rational) -> f64 {
    match r.to_u64_pair() {
        Some((p, q)) => p as f64 / q as f64,
        None => biguint_to_f64(r.num()) / biguint_to_f64(r.den()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::RigidRotation;
    use std::f64::consts::PI;

    fn cubic() -> CriticalFamily {
        CriticalFamily::new(3).unwrap()
    }

    fn r(p: u64, q: u64) -> Rational {
        Rational::from((p, q))
    }

    #[test]
    fn birkhoff_examples() {
        let f = cubic();
        let (rho, err) = birkhoff_rotation_number(&f, 0.5, 10_000);
        assert!((rho - 0.5).abs() <= err);
        assert_eq!(birkhoff_rotation_number(&f, 0.0, 500).0, 0.0);
        let (a, ea) = birkhoff_rotation_number(&f, 0.93, 2000);
        let (b, eb) = birkhoff_rotation_number(&f, 0.07, 2000);
        assert!((a - (1.0 - b)).abs() <= ea + eb);
    }

    #[test]
    fn comparator_on_zero_tongue() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let zero = Rational::zero();
        assert_eq!(compare_to_rational(&f, 0.10, &zero, &cfg).unwrap(), Comparison::Locked);
        assert_eq!(compare_to_rational(&f, 0.20, &zero, &cfg).unwrap(), Comparison::Above);
        assert_eq!(compare_to_rational(&f, 0.0, &zero, &cfg).unwrap(), Comparison::Locked);
        assert_eq!(compare_to_rational(&f, -0.2, &zero, &cfg).unwrap(), Comparison::Below);
    }

    #[test]
    fn comparator_rejects_undecidable_boundary() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let err = compare_to_rational(&f, 1.0 / (2.0 * PI) + 5e-14, &Rational::zero(), &cfg);
        assert!(matches!(err, Err(Error::ResolutionExceeded(_))));
    }

    #[test]
    fn denominator_limit() {
        let f = cubic();
        let cfg = RotationConfig {
            q_max: 10,
            ..RotationConfig::default()
        };
        assert!(matches!(
            compare_to_rational(&f, 0.3, &r(1, 11), &cfg),
            Err(Error::DenominatorTooLarge { .. })
        ));
    }

    #[test]
    fn zero_tongue_closed_form() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let (lo, hi) = locking_interval(&f, &Rational::zero(), 1e-10, &cfg).unwrap();
        assert!((hi - 1.0 / (2.0 * PI)).abs() < 1e-10);
        assert!((lo + 1.0 / (2.0 * PI)).abs() < 1e-10);
    }

    #[test]
    fn half_tongue_is_symmetric() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let (lo, hi) = locking_interval(&f, &r(1, 2), 1e-10, &cfg).unwrap();
        assert!(lo < 0.5 && hi > 0.5);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn centers() {
        let f = cubic();
        let cfg = RotationConfig::default();
        assert_eq!(center(&f, &Rational::zero(), &cfg).unwrap(), 0.0);
        assert_eq!(center(&f, &Rational::one(), &cfg).unwrap(), 1.0);
        assert!((center(&f, &r(1, 2), &cfg).unwrap() - 0.5).abs() < 1e-12);
        let c = center(&f, &r(2, 7), &cfg).unwrap();
        let (lo, hi) = locking_interval(&f, &r(2, 7), 1e-10, &cfg).unwrap();
        assert!(lo < c && c < hi);
        let y = f.iterate(c, LiftPoint::ZERO, 7).value();
        assert!((y - 2.0).abs() <= 1e-13 * 7.0);
    }

    #[test]
    fn intervals_nest_under_refinement() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let pq = r(3, 8);
        let (a, b) = locking_interval(&f, &pq, 1e-8, &cfg).unwrap();
        let (c, d) = locking_interval(&f, &pq, 1e-9, &cfg).unwrap();
        assert!(a <= c && d <= b);
    }

    #[test]
    fn comparator_agrees_with_interval() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let pq = r(2, 5);
        let t = tongue(&f, &pq, 1e-10, &cfg).unwrap();
        let cmp = |x| compare_to_rational(&f, x, &pq, &cfg).unwrap();
        assert_eq!(cmp(t.center), Comparison::Locked);
        assert_eq!(cmp(t.t_lo - 1e-8), Comparison::Below);
        assert_eq!(cmp(t.t_hi + 1e-8), Comparison::Above);
        assert_eq!(cmp(t.t_lo + 2e-10), Comparison::Locked);
        assert_eq!(cmp(t.t_hi - 2e-10), Comparison::Locked);
    }

    #[test]
    fn golden_rotation_returns() {
        let g = RigidRotation {
            rho: (3.0 - 5f64.sqrt()) / 2.0,
        };
        assert_eq!(closest_returns_dynamical(&g, 7, 1000), vec![1, 2, 3, 5, 8, 13, 21]);
    }

    #[test]
    fn returns_near_one_half() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let (_, hi) = locking_interval(&f, &r(1, 2), 1e-12, &cfg).unwrap();
        let ret = closest_returns_dynamical(&f.at(hi + 1e-6), 3, 100_000);
        assert_eq!(ret[..2], [1, 2]);
        assert!(ret[2] > 2);
    }

    #[test]
    fn harmonic_code_at_half_center_terminates() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let code = param_harmonic_code(&f, 0.5, &FareyDomain::unit(), 3, &cfg).unwrap();
        assert_eq!(code.symbols, vec![HarmonicSymbol::End(0)]);
    }

    #[test]
    fn harmonic_code_lies_between_centers() {
        let f = cubic();
        let cfg = RotationConfig::default();
        let t = 0.61;
        let code = param_harmonic_code(&f, t, &FareyDomain::unit(), 1, &cfg).unwrap();
        let n = match code.symbols[..] {
            [HarmonicSymbol::Step(n)] => n,
            ref other => panic!("unexpected code {other:?}"),
        };
        let d = FareyDomain::unit();
        let c0 = center(&f, &d.harmonic_endpoint(n + 1), &cfg).unwrap();
        let c1 = center(&f, &d.harmonic_endpoint(n), &cfg).unwrap();
        assert!(c0.min(c1) < t && t < c0.max(c1));
    }

    #[test]
    fn param_derivative_of_circle_rotation_number_one() {
        let f = cubic();
        let rep = param_derivative_report(&f, &FareyDomain::unit(), (0.0, 1.0), 50, 7).unwrap();
        assert_eq!(rep.chain_ratio, 1.0);
        assert!(rep.fd_max_rel_err < 1e-6);
        assert!(rep.proxy_ratio.is_none());
    }

    #[test]
    fn preimage_inverts_iterate() {
        let f = cubic();
        let m = f.at(0.37);
        let x = iterate_preimage(&m, 3, 1.0, 1e-14);
        assert!((iterate(&m, LiftPoint::from_f64(x), 3).value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solver_brackets_linear_root() {
        let (lo, hi) = solve_unit_slope(|t| 2.0 * (t - 0.3), 5.0, 1e-12, 200).unwrap();
        assert!(lo <= 0.3 && 0.3 <= hi && hi - lo <= 1e-12);
    }
}
