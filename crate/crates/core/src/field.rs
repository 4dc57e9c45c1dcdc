//! Arithmetic over the prime field F_b: elements, polynomials, binomial
//! coefficients mod b and Hasse (hyper-)derivatives.
//!
//! Residues are stored as `u32` in `[0, b)`. [`PrimeBase`] carries the raw
//! residue arithmetic used in hot loops elsewhere in the crate;
//! [`FieldElement`] and [`Polynomial`] are the checked value types.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of items any enumeration may produce.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 31;

static ENUMERATION_LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_ENUMERATION_LIMIT);

/// Current process-wide enumeration limit.
pub fn enumeration_limit() -> u64 {
    ENUMERATION_LIMIT.load(Ordering::Relaxed)
}

/// Overrides the process-wide enumeration limit.
pub fn set_enumeration_limit(limit: u64) {
    ENUMERATION_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

/// Returns `b^e` if it fits the current enumeration limit.
pub(crate) fn checked_count(base: PrimeBase, e: u32, what: &'static str) -> Result<u64> {
    checked_count_with(base, e, what, enumeration_limit())
}

pub(crate) fn checked_count_with(
    base: PrimeBase,
    e: u32,
    what: &'static str,
    limit: u64,
) -> Result<u64> {
    match base.checked_pow(e) {
        Some(v) if v <= limit => Ok(v),
        _ => Err(Error::SizeOverflow {
            what,
            needed: format!("{}^{}", base.get(), e),
            limit,
        }),
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut k = 3u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// A prime modulus `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeBase(u32);

impl PrimeBase {
    pub fn new(b: u64) -> Result<Self> {
        if b > u32::MAX as u64 || !is_prime(b) {
            return Err(Error::NotPrime(b));
        }
        Ok(PrimeBase(b as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.0 as u64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, c: u32) -> u32 {
        let s = a as u64 + c as u64;
        (s % self.0 as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, c: u32) -> u32 {
        self.add(a, self.0 - c % self.0)
    }

    #[inline]
    pub fn mul(self, a: u32, c: u32) -> u32 {
        ((a as u64 * c as u64) % self.0 as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        let a = a % self.0;
        if a == 0 {
            return Err(Error::ZeroInverse(self.0));
        }
        // Fermat: a^(b-2)
        let mut result = 1u32;
        let mut acc = a;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, acc);
            }
            acc = self.mul(acc, acc);
            e >>= 1;
        }
        Ok(result)
    }

    /// `b^e`, or `None` on `u64` overflow.
    pub fn checked_pow(self, e: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(e)
    }

    pub fn elem(self, v: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            base: self,
        }
    }

    pub fn zero(self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(self) -> FieldElement {
        self.elem(1)
    }

    /// Base-b digits of `x`, least significant first, padded to `len`.
    pub fn digits(self, mut x: u64, len: usize) -> Vec<u32> {
        let b = self.0 as u64;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((x % b) as u32);
            x /= b;
        }
        out
    }
}

impl TryFrom<u64> for PrimeBase {
    type Error = Error;
    fn try_from(b: u64) -> Result<Self> {
        PrimeBase::new(b)
    }
}

impl From<PrimeBase> for u64 {
    fn from(b: PrimeBase) -> u64 {
        b.0 as u64
    }
}

impl fmt::Display for PrimeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of F_b tagged with its base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    base: PrimeBase,
}

/// Binary and unary field operations accepted by [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Neg,
}

impl FieldElement {
    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn base(self) -> PrimeBase {
        self.base
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same_base(self, other: FieldElement) -> Result<PrimeBase> {
        if self.base != other.base {
            return Err(Error::BaseMismatch {
                left: self.base.get(),
                right: other.base.get(),
            });
        }
        Ok(self.base)
    }

    pub fn add(self, other: FieldElement) -> Result<FieldElement> {
        let b = self.same_base(other)?;
        Ok(FieldElement { value: b.add(self.value, other.value), base: b })
    }

    pub fn sub(self, other: FieldElement) -> Result<FieldElement> {
        let b = self.same_base(other)?;
        Ok(FieldElement { value: b.sub(self.value, other.value), base: b })
    }

    pub fn mul(self, other: FieldElement) -> Result<FieldElement> {
        let b = self.same_base(other)?;
        Ok(FieldElement { value: b.mul(self.value, other.value), base: b })
    }

    pub fn neg(self) -> FieldElement {
        FieldElement { value: self.base.neg(self.value), base: self.base }
    }

    pub fn inv(self) -> Result<FieldElement> {
        Ok(FieldElement { value: self.base.inv(self.value)?, base: self.base })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Applies `op`. The unary operations `Inv` and `Neg` act on `c`; `a` is
/// still checked for a matching base.
pub fn field_arith(a: FieldElement, op: FieldOp, c: FieldElement) -> Result<FieldElement> {
    match op {
        FieldOp::Add => a.add(c),
        FieldOp::Sub => a.sub(c),
        FieldOp::Mul => a.mul(c),
        FieldOp::Inv => {
            a.same_base(c)?;
            c.inv()
        }
        FieldOp::Neg => {
            a.same_base(c)?;
            Ok(c.neg())
        }
    }
}

/// Binomial coefficient `C(a, c) mod b` for `a, c < b` (no factor of b occurs).
fn small_binomial(a: u32, c: u32, base: PrimeBase) -> u32 {
    if c > a {
        return 0;
    }
    let c = c.min(a - c);
    let mut num = 1u32;
    let mut den = 1u32;
    for k in 0..c {
        num = base.mul(num, a - k);
        den = base.mul(den, k + 1);
    }
    // den is a product of integers < b, hence a unit.
    base.mul(num, base.inv(den).expect("unit denominator"))
}

/// `C(i, lambda) mod b` by Lucas' theorem; zero whenever `lambda > i`.
pub fn lucas_binomial(i: u64, lambda: u64, base: PrimeBase) -> FieldElement {
    if lambda > i {
        return base.zero();
    }
    let b = base.get() as u64;
    let (mut i, mut lambda) = (i, lambda);
    let mut acc = 1u32;
    while lambda > 0 || i > 0 {
        let (id, ld) = ((i % b) as u32, (lambda % b) as u32);
        if ld > id {
            return base.zero();
        }
        acc = base.mul(acc, small_binomial(id, ld, base));
        i /= b;
        lambda /= b;
    }
    base.elem(acc as u64)
}

/// Polynomial over F_b; `coeffs[i]` is the coefficient of `z^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<u32>,
    base: PrimeBase,
}

impl Polynomial {
    /// Builds a polynomial, reducing every coefficient mod b.
    pub fn new(base: PrimeBase, coeffs: &[u64]) -> Self {
        Polynomial {
            coeffs: coeffs.iter().map(|&c| base.reduce(c)).collect(),
            base,
        }
    }

    pub(crate) fn from_residues(base: PrimeBase, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < base.get()));
        Polynomial { coeffs, base }
    }

    pub fn from_elements(coeffs: &[FieldElement]) -> Result<Self> {
        let base = match coeffs.first() {
            Some(c) => c.base(),
            None => return Err(Error::InvalidParams("empty coefficient list needs a base".into())),
        };
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.base() != base {
                return Err(Error::BaseMismatch { left: base.get(), right: c.base().get() });
            }
            out.push(c.value());
        }
        Ok(Polynomial { coeffs: out, base })
    }

    pub fn zero(base: PrimeBase) -> Self {
        Polynomial { coeffs: Vec::new(), base }
    }

    /// `c * z^k`.
    pub fn monomial(base: PrimeBase, k: usize, c: u64) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = base.reduce(c);
        Polynomial { coeffs, base }
    }

    pub fn base(&self) -> PrimeBase {
        self.base
    }

    /// Raw coefficient storage (may carry trailing zeros).
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.base.elem(self.coeffs.get(i).copied().unwrap_or(0) as u64)
    }

    /// Highest index with a nonzero coefficient, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .iter()
            .rposition(|&c| c != 0)
            .map_or(-1, |p| p as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.degree() < 0
    }

    fn check_base(&self, other: PrimeBase) -> Result<()> {
        if self.base != other {
            return Err(Error::BaseMismatch { left: self.base.get(), right: other.get() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_base(other.base)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let b = self.base;
        let coeffs = (0..len)
            .map(|i| {
                let x = self.coeffs.get(i).copied().unwrap_or(0);
                let y = other.coeffs.get(i).copied().unwrap_or(0);
                b.add(x, y)
            })
            .collect();
        Ok(Polynomial { coeffs, base: b })
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_base(other.base)?;
        let b = self.base;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Polynomial::zero(b));
        }
        let mut coeffs = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = b.add(coeffs[i + j], b.mul(x, y));
            }
        }
        Ok(Polynomial { coeffs, base: b })
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        self.check_base(x.base())?;
        Ok(self.base.elem(self.eval_residue(x.value()) as u64))
    }

    pub(crate) fn eval_residue(&self, x: u32) -> u32 {
        let b = self.base;
        self.coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, &c| b.add(b.mul(acc, x), c))
    }

    /// The `lambda`-th Hasse derivative `sum_i C(i, lambda) f_i z^(i - lambda)`.
    pub fn hasse_derivative(&self, lambda: usize) -> Polynomial {
        if lambda == 0 {
            return self.clone();
        }
        let b = self.base;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(lambda)
            .map(|(i, &f)| b.mul(lucas_binomial(i as u64, lambda as u64, b).value(), f))
            .collect();
        Polynomial { coeffs, base: b }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "z")?,
                (1, _) => write!(f, "{c}z")?,
                (_, 1) => write!(f, "z^{i}")?,
                _ => write!(f, "{c}z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `lambda`-th Hasse derivative of `f`.
pub fn hasse_derivative(f: &Polynomial, lambda: usize) -> Polynomial {
    f.hasse_derivative(lambda)
}

/// Evaluates `f` at `x`.
pub fn poly_eval(f: &Polynomial, x: FieldElement) -> Result<FieldElement> {
    f.eval(x)
}

/// Iterator over all polynomials of degree `< n`, `f_0` varying fastest.
#[derive(Clone, Debug)]
pub struct PolySpace {
    base: PrimeBase,
    current: Vec<u32>,
    remaining: u64,
}

impl Iterator for PolySpace {
    type Item = Polynomial;

    fn next(&mut self) -> Option<Polynomial> {
        if self.remaining == 0 {
            return None;
        }
        let out = Polynomial::from_residues(self.base, self.current.clone());
        self.remaining -= 1;
        let b = self.base.get();
        for c in self.current.iter_mut() {
            *c += 1;
            if *c < b {
                break;
            }
            *c = 0;
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.remaining as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for PolySpace {}

/// All `b^n` polynomials of degree `< n`.
pub fn poly_space_iter(n: usize, base: PrimeBase) -> Result<PolySpace> {
    poly_space_iter_with_limit(n, base, enumeration_limit())
}

/// [`poly_space_iter`] with an explicit enumeration limit.
pub fn poly_space_iter_with_limit(n: usize, base: PrimeBase, limit: u64) -> Result<PolySpace> {
    let count = checked_count_with(base, n as u32, "polynomial space", limit)?;
    Ok(PolySpace { base, current: vec![0; n], remaining: count })
}
