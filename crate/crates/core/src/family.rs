//! The critical family `F_t(x) = F_0(x) + t`.
//!
//! `F_0'(x)` is `sin^{l-1}(pi x)` normalized to unit mass, with `l` odd.
//! Writing `m = (l-1)/2`, the binomial expansion gives the cosine polynomial
//!
//! ```text
//! F_0'(x) = 1 + sum_{k=1..m} a_k cos(2 pi k x),   a_k = 2 (-1)^k C(2m, m-k) / C(2m, m)
//! ```
//!
//! so the lift and its first three derivatives are all in closed form. For
//! `l = 3` this is the classical `x - sin(2 pi x) / (2 pi)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude a derivative factor is treated as zero.
pub const DEGENERATE_DERIVATIVE: f64 = 1e-14;

/// Near the critical point the lift is evaluated from its Taylor series,
/// which keeps relative accuracy where `y - sin(2 pi y)/(2 pi)` cancels.
const SERIES_RADIUS: f64 = 0.125;
const SERIES_TERMS: usize = 24;

pub const FAMILY_SINE: &str = "sine-l";

/// A point on the real line split into an exact integer part and a
/// fractional part in `[-1/2, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftPoint {
    pub int: i64,
    pub frac: f64,
}

impl LiftPoint {
    pub const ZERO: LiftPoint = LiftPoint { int: 0, frac: 0.0 };

    pub fn new(int: i64, frac: f64) -> Self {
        LiftPoint { int, frac }.normalized()
    }

    pub fn from_f64(x: f64) -> Self {
        LiftPoint::new(0, x)
    }

    fn normalized(self) -> Self {
        let k = (self.frac + 0.5).floor();
        LiftPoint {
            int: self.int + k as i64,
            frac: self.frac - k,
        }
    }

    pub fn value(&self) -> f64 {
        self.int as f64 + self.frac
    }

    pub fn add(&self, dx: f64) -> Self {
        LiftPoint::new(self.int, self.frac + dx)
    }

    pub fn add_int(&self, k: i64) -> Self {
        LiftPoint {
            int: self.int + k,
            frac: self.frac,
        }
    }

    /// `self - other` without forming the large absolute values.
    pub fn diff(&self, other: &LiftPoint) -> f64 {
        (self.int - other.int) as f64 + (self.frac - other.frac)
    }

    /// Signed distance to the nearest integer.
    pub fn circle_offset(&self) -> f64 {
        self.frac
    }
}

/// Value and first three derivatives of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet {
    pub fn nonlinearity(&self) -> f64 {
        self.d2 / self.d1
    }

    pub fn schwarzian(&self) -> f64 {
        let n = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * n * n
    }
}

/// A lift of a degree-one circle map (or any real map used as a test seam).
pub trait CircleMap: Sync {
    fn lift(&self, x: LiftPoint) -> LiftPoint;
}

pub trait SmoothCircleMap: CircleMap {
    fn jet(&self, x: LiftPoint) -> Jet;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub l: u32,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (l={})", self.name, self.l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalFamily {
    l: u32,
    /// Cosine coefficients of `F_0'`; entry 0 is the constant term.
    cosine_coeffs: Vec<f64>,
    /// `1 / int_0^1 sin^{l-1}(pi u) du`.
    norm: f64,
    /// Coefficients of `F_0(y) = sum_j c_j y^(l + 2j)`.
    series: Vec<f64>,
}

impl CriticalFamily {
    pub fn new(l: u32) -> Result<Self> {
        if l < 3 || l.is_multiple_of(2) || l > 61 {
            return Err(Error::InvalidCriticalExponent(l));
        }
        let m = ((l - 1) / 2) as usize;
        let binom = binomial_row(2 * m);
        let mid = binom[m];
        let mut cosine_coeffs = vec![1.0];
        for k in 1..=m {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            cosine_coeffs.push(2.0 * sign * binom[m - k] / mid);
        }
        let norm = 4f64.powi(m as i32) / mid;

        // (sin x / x)^(2m) as a series in x^2.
        let sinc: Vec<f64> = (0..SERIES_TERMS)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign / factorial(2 * j + 1)
            })
            .collect();
        let mut pow = vec![0.0; SERIES_TERMS];
        pow[0] = 1.0;
        for _ in 0..2 * m {
            pow = mul_truncated(&pow, &sinc);
        }
        let series = pow
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let e = 2 * m + 2 * j;
                norm * c * PI.powi(e as i32) / (e + 1) as f64
            })
            .collect();

        Ok(CriticalFamily {
            l,
            cosine_coeffs,
            norm,
            series,
        })
    }

    /// Resolves a family selector such as `sine-l`.
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        if spec.name != FAMILY_SINE {
            return Err(Error::UnknownFamily(spec.name.clone()));
        }
        CriticalFamily::new(spec.l)
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec {
            name: FAMILY_SINE.to_string(),
            l: self.l,
        }
    }

    pub fn critical_exponent(&self) -> u32 {
        self.l
    }

    pub fn cosine_coeffs(&self) -> &[f64] {
        &self.cosine_coeffs
    }

    pub fn at(&self, t: f64) -> CriticalMap<'_> {
        CriticalMap { fam: self, t }
    }

    /// `F_0` on the fundamental domain `[-1/2, 1/2)`.
    pub fn f0_frac(&self, y: f64) -> f64 {
        if y.abs() < SERIES_RADIUS {
            let y2 = y * y;
            let mut acc = 0.0;
            for c in self.series.iter().rev() {
                acc = acc * y2 + c;
            }
            return acc * y.powi(self.l as i32);
        }
        let w = 2.0 * PI * y;
        if self.l == 3 {
            return y - w.sin() / (2.0 * PI);
        }
        let (s1, c1) = w.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = y;
        for (k, a) in self.cosine_coeffs.iter().enumerate().skip(1) {
            acc += a * s / (2.0 * PI * k as f64);
            (s, c) = (s * c1 + c * s1, c * c1 - s * s1);
        }
        acc
    }

    pub fn f0(&self, x: LiftPoint) -> LiftPoint {
        LiftPoint::new(x.int, self.f0_frac(x.frac))
    }

    /// `F_0', F_0'', F_0'''` at a point with fractional part `y`.
    pub fn f0_jet(&self, y: f64) -> Jet {
        let m = ((self.l - 1) / 2) as i32;
        let (s, c) = (PI * y).sin_cos();
        let s2m2 = s.powi(2 * m - 2);
        let d1 = self.norm * s2m2 * s * s;
        let d2 = self.norm * 2.0 * m as f64 * PI * s2m2 * s * c;
        let d3 = self.norm
            * 2.0
            * m as f64
            * PI
            * PI
            * ((2 * m - 1) as f64 * s2m2 * c * c - s2m2 * s * s);
        Jet { d1, d2, d3 }
    }

    pub fn lift_eval(&self, t: f64, x: LiftPoint) -> LiftPoint {
        self.at(t).lift(x)
    }

    pub fn iterate(&self, t: f64, x: LiftPoint, n: usize) -> LiftPoint {
        iterate(&self.at(t), x, n)
    }
}

/// One member `F_t` of a [`CriticalFamily`].
#[derive(Debug, Clone, Copy)]
pub struct CriticalMap<'a> {
    pub fam: &'a CriticalFamily,
    pub t: f64,
}

impl CircleMap for CriticalMap<'_> {
    fn lift(&self, x: LiftPoint) -> LiftPoint {
        LiftPoint::new(x.int, self.fam.f0_frac(x.frac) + self.t)
    }
}

impl SmoothCircleMap for CriticalMap<'_> {
    fn jet(&self, x: LiftPoint) -> Jet {
        self.fam.f0_jet(x.frac)
    }
}

/// `x -> x + rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidRotation {
    pub rho: f64,
}

impl CircleMap for RigidRotation {
    fn lift(&self, x: LiftPoint) -> LiftPoint {
        x.add(self.rho)
    }
}

impl SmoothCircleMap for RigidRotation {
    fn jet(&self, _x: LiftPoint) -> Jet {
        Jet {
            d1: 1.0,
            d2: 0.0,
            d3: 0.0,
        }
    }
}

/// `x -> slope * x + offset`. Not a circle map unless `slope == 1`; used to
/// exercise the derivative chains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub slope: f64,
    pub offset: f64,
}

impl CircleMap for AffineMap {
    fn lift(&self, x: LiftPoint) -> LiftPoint {
        LiftPoint::from_f64(self.slope * x.value() + self.offset)
    }
}

impl SmoothCircleMap for AffineMap {
    fn jet(&self, _x: LiftPoint) -> Jet {
        Jet {
            d1: self.slope,
            d2: 0.0,
            d3: 0.0,
        }
    }
}

pub fn iterate<M: CircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> LiftPoint {
    let mut y = x;
    for _ in 0..n {
        y = map.lift(y);
    }
    y
}

/// `(f^n)'(x)` as a product along the orbit.
pub fn derivative_of_iterate<M: SmoothCircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> f64 {
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..n {
        d *= map.jet(y).d1;
        y = map.lift(y);
    }
    d
}

/// Accumulated (derivative, nonlinearity, Schwarzian) of `f^n` at `x`.
fn chain<M: SmoothCircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> Result<(f64, f64, f64)> {
    let mut y = x;
    let (mut d, mut nl, mut s) = (1.0, 0.0, 0.0);
    for step in 0..n {
        let j = map.jet(y);
        if j.d1.abs() < DEGENERATE_DERIVATIVE {
            return Err(Error::DegenerateDerivative { step, value: j.d1 });
        }
        nl += j.nonlinearity() * d;
        s += j.schwarzian() * d * d;
        d *= j.d1;
        y = map.lift(y);
    }
    Ok((d, nl, s))
}

/// `S(f^n)(x) = sum_i (Sf o f^i)(x) ((f^i)'(x))^2`.
pub fn schwarzian_of_iterate<M: SmoothCircleMap + ?Sized>(
    map: &M,
    x: LiftPoint,
    n: usize,
) -> Result<f64> {
    chain(map, x, n).map(|(_, _, s)| s)
}

/// `(f^n)'' / (f^n)'` at `x`.
pub fn nonlinearity<M: SmoothCircleMap + ?Sized>(map: &M, x: LiftPoint, n: usize) -> Result<f64> {
    chain(map, x, n).map(|(_, nl, _)| nl)
}

/// `|b-a||d-c| / (|c-a||d-b|)` for `a < b < c < d`.
pub fn cross_ratio(a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
    if !(a < b && b < c && c < d) {
        return Err(Error::NonMonotonePoints);
    }
    Ok((b - a) * (d - c) / ((c - a) * (d - b)))
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0f64; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as f64 / k as f64;
    }
    row
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn mul_truncated(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> CriticalFamily {
        CriticalFamily::new(3).unwrap()
    }

    #[test]
    fn lift_examples() {
        let f = cubic();
        assert_eq!(f.lift_eval(0.0, LiftPoint::ZERO).value(), 0.0);
        let y = f.lift_eval(0.0, LiftPoint::from_f64(0.25)).value();
        assert!((y - (0.25 - 1.0 / (2.0 * PI))).abs() < 1e-15);
        assert!((y - 0.09084505).abs() < 1e-8);
        assert!((f.lift_eval(0.3, LiftPoint::ZERO).value() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn iterate_examples() {
        let f = cubic();
        let x = LiftPoint::from_f64(0.37);
        assert_eq!(f.iterate(0.2, x, 0), x);
        let y = f.iterate(0.5, LiftPoint::ZERO, 2);
        assert!((y.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn winding_is_exact() {
        let f = cubic();
        let x = LiftPoint::new(5, 0.3);
        let y = f.lift_eval(0.9, x);
        let z = f.lift_eval(0.9, LiftPoint::from_f64(0.3));
        assert_eq!(y.int, z.int + 5);
        assert_eq!(y.frac, z.frac);
    }

    #[test]
    fn series_matches_closed_form_away_from_zero() {
        for l in [3, 5, 7] {
            let f = CriticalFamily::new(l).unwrap();
            for y in [0.1, 0.12, -0.124] {
                let series = {
                    let y2 = y * y;
                    let mut acc = 0.0;
                    for c in f.series.iter().rev() {
                        acc = acc * y2 + c;
                    }
                    acc * f64::powi(y, l as i32)
                };
                let mut closed = y;
                for (k, a) in f.cosine_coeffs.iter().enumerate().skip(1) {
                    closed += a * (2.0 * PI * k as f64 * y).sin() / (2.0 * PI * k as f64);
                }
                assert!((series - closed).abs() < 1e-15, "l={l} y={y}");
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let f = cubic();
        for t in [0.0, 0.3, 0.77] {
            let m = f.at(t);
            assert_eq!(derivative_of_iterate(&m, LiftPoint::ZERO, 1), 0.0);
            let d = derivative_of_iterate(&m, LiftPoint::from_f64(0.5), 1);
            assert!((d - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn schwarzian_at_quarter() {
        let m = cubic();
        let s = schwarzian_of_iterate(&m.at(0.1), LiftPoint::from_f64(0.25), 1).unwrap();
        assert!((s + 6.0 * PI * PI).abs() < 1e-9);
        assert!((s + 59.2176).abs() < 1e-4);
        let n = nonlinearity(&m.at(0.1), LiftPoint::from_f64(0.25), 1).unwrap();
        assert!((n - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn affine_seam_has_no_distortion() {
        let a = AffineMap {
            slope: 1.7,
            offset: 0.2,
        };
        let x = LiftPoint::from_f64(0.3);
        assert_eq!(schwarzian_of_iterate(&a, x, 4).unwrap(), 0.0);
        assert_eq!(nonlinearity(&a, x, 4).unwrap(), 0.0);
        assert!((derivative_of_iterate(&a, x, 3) - 1.7f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_derivative_is_reported() {
        let f = cubic();
        let err = schwarzian_of_iterate(&f.at(0.2), LiftPoint::ZERO, 3).unwrap_err();
        assert!(matches!(err, Error::DegenerateDerivative { step: 0, .. }));
    }

    #[test]
    fn cross_ratio_examples() {
        assert!((cross_ratio(0.0, 1.0, 2.0, 3.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((cross_ratio(0.0, 1.0, 2.0, 4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let a = cross_ratio(0.1, 0.4, 0.5, 2.0).unwrap();
        let b = cross_ratio(7.2, 7.8, 8.0, 11.0).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert_eq!(cross_ratio(0.0, 2.0, 1.0, 3.0), Err(Error::NonMonotonePoints));
    }

    #[test]
    fn only_odd_exponents() {
        assert!(CriticalFamily::new(3).is_ok());
        assert!(CriticalFamily::new(9).is_ok());
        assert_eq!(CriticalFamily::new(4), Err(Error::InvalidCriticalExponent(4)));
        assert!(CriticalFamily::new(1).is_err());
        let spec = FamilySpec {
            name: "tent".into(),
            l: 3,
        };
        assert!(matches!(
            CriticalFamily::from_spec(&spec),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn unit_mass() {
        // The mean of a trigonometric polynomial over enough equispaced nodes
        // is its constant term.
        for l in [3, 5, 7, 11] {
            let f = CriticalFamily::new(l).unwrap();
            assert_eq!(f.cosine_coeffs()[0], 1.0);
            let n = 64;
            let mean: f64 = (0..n).map(|i| f.f0_jet(i as f64 / n as f64).d1).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 1e-12, "l={l}: {mean}");
        }
    }

    #[test]
    fn cosine_polynomial_matches_closed_form_derivative() {
        for l in [3, 5, 7] {
            let f = CriticalFamily::new(l).unwrap();
            for i in 0..50 {
                let y = -0.5 + i as f64 / 50.0;
                let poly: f64 = f
                    .cosine_coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (2.0 * PI * k as f64 * y).cos())
                    .sum();
                assert!((poly - f.f0_jet(y).d1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_order() {
        for l in [3, 5, 7] {
            let f = CriticalFamily::new(l).unwrap();
            let (x0, x1) = (1e-6f64, 1e-3f64);
            let slope = (f.f0_frac(x1).ln() - f.f0_frac(x0).ln()) / (x1.ln() - x0.ln());
            assert!((slope - l as f64).abs() < 0.01, "l={l}: {slope}");
        }
    }

    #[test]
    fn odd_symmetry() {
        let f = CriticalFamily::new(5).unwrap();
        for i in 0..100 {
            let x = -0.49 + 0.0098 * i as f64;
            assert!((f.f0_frac(-x) + f.f0_frac(x)).abs() < 1e-12);
        }
    }
}
