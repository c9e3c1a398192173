//! Exact Farey-tree arithmetic.
//!
//! Rationals of `[0, 1]` are organized in the Farey (Stern–Brocot) tree rooted
//! at `1/2`. A node is addressed by its `L`/`R` path from the root; the
//! turning points of that path define the degree of the node and the sequence
//! of closest-return denominators. Farey domains (intervals bounded by Farey
//! neighbors) are refined by the harmonic subdivision
//!
//! ```text
//! u_n = ((n+1)P + P') / ((n+1)Q + Q')     n > 0
//! u_n = (P + (1-n)P') / (Q + (1-n)Q')     n <= 0
//! ```
//!
//! which accumulates at `P/Q` as `n -> +inf` and at `P'/Q'` as `n -> -inf`.
//!
//! Everything here is exact; denominators grow exponentially along harmonic
//! codes so all integers are arbitrary precision.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_CODE_LEN: usize = 64;
pub const DEFAULT_MAX_PICK: i64 = 1_000_000;

/// Size limits for symbolic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_code_len: usize,
    pub max_pick: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_code_len: DEFAULT_MAX_CODE_LEN,
            max_pick: DEFAULT_MAX_PICK,
        }
    }
}

/// A reduced fraction in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigUint,
    den: BigUint,
}

impl Rational {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidRational(format!("{num}/0")));
        }
        if num > den {
            return Err(Error::InvalidRational(format!("{num}/{den} exceeds 1")));
        }
        let g = num.gcd(&den);
        Ok(Rational {
            num: num / &g,
            den: den / g,
        })
    }

    pub fn zero() -> Self {
        Rational {
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Rational {
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    pub fn half() -> Self {
        Rational {
            num: BigUint::one(),
            den: BigUint::from(2u32),
        }
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    /// Numerator and denominator as machine integers, if they fit.
    pub fn to_u64_pair(&self) -> Option<(u64, u64)> {
        Some((self.num.to_u64()?, self.den.to_u64()?))
    }

    pub fn is_interior(&self) -> bool {
        !self.num.is_zero() && self.num != self.den
    }

    /// `1 - self`, the image under the orientation flip of the tree.
    pub fn complement(&self) -> Rational {
        Rational {
            num: &self.den - &self.num,
            den: self.den.clone(),
        }
    }

    fn check_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::OutsideUnitInterval(self.to_string()))
        }
    }
}

impl From<(u64, u64)> for Rational {
    /// Panics on an invalid pair; meant for literals.
    fn from((p, q): (u64, u64)) -> Self {
        Rational::new(p, q).expect("valid rational literal")
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: BigUint = p.trim().parse().map_err(|_| bad())?;
        let q: BigUint = q.trim().parse().map_err(|_| bad())?;
        Rational::new(p, q)
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(a.num + b.num) / (a.den + b.den)`. For Farey neighbors the result is
/// already reduced.
pub fn mediant(a: &Rational, b: &Rational) -> Rational {
    Rational::new(&a.num + &b.num, &a.den + &b.den).expect("mediant of [0,1] rationals")
}

/// The determinant test `|a.num * b.den - b.num * a.den| == 1`.
pub fn is_farey_neighbor(a: &Rational, b: &Rational) -> bool {
    let x = &a.num * &b.den;
    let y = &b.num * &a.den;
    let d = if x > y { x - y } else { y - x };
    d.is_one()
}

/// The closest rationals below and above `r` with denominator not larger
/// than that of `r`. These are the two Farey parents, and `r` is their
/// mediant.
pub fn neighbors(r: &Rational) -> Result<(Rational, Rational)> {
    r.check_interior()?;
    let p = BigInt::from(r.num.clone());
    let q = BigInt::from(r.den.clone());
    // p*b - q*a = 1 with 0 < b < q.
    let egcd = p.extended_gcd(&q);
    let b = egcd.x.mod_floor(&q);
    let a = (&p * &b - BigInt::one()) / &q;
    let (a, b) = (
        a.to_biguint().expect("non-negative"),
        b.to_biguint().expect("non-negative"),
    );
    let lower = Rational::new(a.clone(), b.clone())?;
    let upper = Rational::new(&r.num - a, &r.den - b)?;
    Ok((lower, upper))
}

/// Left and right daughters of `r` in the Farey tree.
pub fn daughters(r: &Rational) -> Result<(Rational, Rational)> {
    let (lo, hi) = neighbors(r)?;
    Ok((mediant(&lo, r), mediant(r, &hi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    L,
    R,
}

/// A finite path from the root `1/2` of the Farey tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FareyCode(Vec<Symbol>);

impl FareyCode {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        FareyCode(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn prefix(&self, len: usize) -> FareyCode {
        FareyCode(self.0[..len].to_vec())
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }
}

impl fmt::Display for FareyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Symbol::L => "L",
                Symbol::R => "R",
            })?;
        }
        Ok(())
    }
}

impl FromStr for FareyCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(|c| match c {
                'L' | 'l' => Ok(Symbol::L),
                'R' | 'r' => Ok(Symbol::R),
                _ => Err(Error::InvalidArgument(format!("bad Farey symbol `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if symbols.len() > DEFAULT_MAX_CODE_LEN {
            return Err(Error::CodeTooLong {
                len: symbols.len(),
                max: DEFAULT_MAX_CODE_LEN,
            });
        }
        Ok(FareyCode(symbols))
    }
}

/// Walks the tree keeping the current node and its two neighbors.
#[derive(Clone)]
struct Navigator {
    lo: Rational,
    cur: Rational,
    hi: Rational,
}

impl Navigator {
    fn root() -> Self {
        Navigator {
            lo: Rational::zero(),
            cur: Rational::half(),
            hi: Rational::one(),
        }
    }

    fn step(&mut self, s: Symbol) {
        match s {
            Symbol::L => {
                let next = mediant(&self.lo, &self.cur);
                self.hi = std::mem::replace(&mut self.cur, next);
            }
            Symbol::R => {
                let next = mediant(&self.cur, &self.hi);
                self.lo = std::mem::replace(&mut self.cur, next);
            }
        }
    }
}

pub fn code_to_rational(code: &FareyCode) -> Rational {
    let mut nav = Navigator::root();
    for &s in code.symbols() {
        nav.step(s);
    }
    nav.cur
}

pub fn rational_to_code(r: &Rational) -> Result<FareyCode> {
    rational_to_code_with(r, &Limits::default())
}

pub fn rational_to_code_with(r: &Rational, limits: &Limits) -> Result<FareyCode> {
    r.check_interior()?;
    let mut nav = Navigator::root();
    let mut code = FareyCode::default();
    loop {
        let s = match r.cmp(&nav.cur) {
            Ordering::Equal => return Ok(code),
            Ordering::Less => Symbol::L,
            Ordering::Greater => Symbol::R,
        };
        if code.len() == limits.max_code_len {
            return Err(Error::CodeTooLong {
                len: code.len() + 1,
                max: limits.max_code_len,
            });
        }
        code.push(s);
        nav.step(s);
    }
}

/// One-based turning points: the first is the least `i` with
/// `a_i != a_{i+1}`, each later one the least such `i` exceeding the
/// previous turning point by at least two.
pub fn turning_points(code: &FareyCode) -> Vec<usize> {
    let a = code.symbols();
    let mut out = Vec::new();
    let mut i = 1;
    while i < a.len() {
        if a[i - 1] != a[i] {
            out.push(i);
            i += 2;
        } else {
            i += 1;
        }
    }
    out
}

pub fn degree(code: &FareyCode) -> usize {
    turning_points(code).len() + 1
}

/// Denominators of the prefixes ending at each turning point.
pub fn closest_return_denominators(code: &FareyCode) -> Vec<BigUint> {
    turning_points(code)
        .into_iter()
        .map(|t| code_to_rational(&code.prefix(t)).den)
        .collect()
}

/// An interval bounded by Farey neighbors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FareyDomain {
    lo: Rational,
    hi: Rational,
}

impl FareyDomain {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        let reject = || Error::NotFareyDomain {
            lo: lo.to_string(),
            hi: hi.to_string(),
        };
        if lo >= hi || !is_farey_neighbor(&lo, &hi) {
            return Err(reject());
        }
        if lo.is_interior() && hi.is_interior() {
            let (a, b) = (&lo.den, &hi.den);
            if a > &(b * 2u32) || b > &(a * 2u32) {
                return Err(reject());
            }
        }
        Ok(FareyDomain { lo, hi })
    }

    /// `(0/1, 1/1)`.
    pub fn unit() -> Self {
        FareyDomain {
            lo: Rational::zero(),
            hi: Rational::one(),
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    /// Endpoint `u_n` of the harmonic subdivision, indexed from `lo`.
    pub fn harmonic_endpoint(&self, n: i64) -> Rational {
        let (p, q) = (&self.lo.num, &self.lo.den);
        let (pp, qq) = (&self.hi.num, &self.hi.den);
        let (num, den) = if n > 0 {
            let k = BigUint::from((n as u64) + 1);
            (&k * p + pp, &k * q + qq)
        } else {
            let k = BigUint::from(1 + n.unsigned_abs());
            (p + &k * pp, q + &k * qq)
        };
        Rational::new(num, den).expect("harmonic endpoint lies in the domain")
    }

    /// The harmonic cell between `u_{n+1}` and `u_n`.
    pub fn harmonic_refine(&self, n: i64) -> FareyDomain {
        let a = self.harmonic_endpoint(n + 1);
        let b = self.harmonic_endpoint(n);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        FareyDomain { lo, hi }
    }

    /// Image under `x -> 1 - x`.
    pub fn flip(&self) -> FareyDomain {
        FareyDomain {
            lo: self.hi.complement(),
            hi: self.lo.complement(),
        }
    }

    /// The same interval with endpoint roles swapped: harmonic indices are
    /// counted from `hi` instead of `lo`. Returned as `(from, to)`.
    pub fn oriented(&self, from_lo: bool) -> (&Rational, &Rational) {
        if from_lo {
            (&self.lo, &self.hi)
        } else {
            (&self.hi, &self.lo)
        }
    }
}

impl fmt::Display for FareyDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl fmt::Debug for FareyDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl FromStr for FareyDomain {
    type Err = Error;

    /// `lo:hi`, e.g. `0/1:1/1`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("domain `{s}` is not lo:hi")))?;
        FareyDomain::new(a.parse()?, b.parse()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HarmonicSymbol {
    /// `S(n, n+1)`: the cell between `u_{n+1}` and `u_n`.
    Step(i64),
    /// `E(n)`: the endpoint `u_n` itself. Always terminal.
    End(i64),
}

impl fmt::Display for HarmonicSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HarmonicSymbol::Step(n) => write!(f, "S({},{})", n, n + 1),
            HarmonicSymbol::End(n) => write!(f, "E({n})"),
        }
    }
}

/// Address of a fundamental domain (or one of its endpoints) in the
/// iterated harmonic subdivision of a base domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HarmonicCode {
    pub symbols: Vec<HarmonicSymbol>,
}

impl HarmonicCode {
    pub fn from_picks(picks: &[i64]) -> Self {
        HarmonicCode {
            symbols: picks.iter().map(|&n| HarmonicSymbol::Step(n)).collect(),
        }
    }

    pub fn picks(&self) -> Vec<i64> {
        self.symbols
            .iter()
            .filter_map(|s| match s {
                HarmonicSymbol::Step(n) => Some(*n),
                HarmonicSymbol::End(_) => None,
            })
            .collect()
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.symbols.last(), Some(HarmonicSymbol::End(_)))
    }

    /// The fundamental domain addressed by the `S` prefix.
    pub fn domain(&self, base: &FareyDomain, limits: &Limits) -> Result<FareyDomain> {
        let mut d = base.clone();
        for n in self.picks() {
            if n.abs() > limits.max_pick {
                return Err(Error::PickTooLarge {
                    pick: n,
                    max: limits.max_pick,
                });
            }
            d = d.harmonic_refine(n);
        }
        Ok(d)
    }

    /// Image under the orientation flip of the tree: `S(n)` becomes
    /// `S(-n-1)` and `E(n)` becomes `E(-n)`.
    pub fn mirror(&self) -> HarmonicCode {
        HarmonicCode {
            symbols: self
                .symbols
                .iter()
                .map(|s| match *s {
                    HarmonicSymbol::Step(n) => HarmonicSymbol::Step(-n - 1),
                    HarmonicSymbol::End(n) => HarmonicSymbol::End(-n),
                })
                .collect(),
        }
    }
}

impl fmt::Display for HarmonicCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// All reduced rationals in `[0, 1]` with denominator `<= q_max`, ascending.
pub fn farey_sequence(q_max: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    // Next-term recurrence for the Farey sequence of order q_max.
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, q_max.max(1));
    out.push(Rational::zero());
    while c <= q_max {
        let k = (q_max + b) / d;
        let (na, nb) = (c, d);
        let (nc, nd) = (k * c - a, k * d - b);
        a = na;
        b = nb;
        c = nc;
        d = nd;
        out.push(Rational::from((a, b)));
        if a == b {
            break;
        }
    }
    out
}
