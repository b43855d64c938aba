//! Table-driven arithmetic in GF(p) and GF(p^n).
//!
//! An element is a bare index in `0..q`. The base-p digits of the index,
//! least significant first, are the coefficients of the residue polynomial
//! modulo the field's defining polynomial. For prime fields the index is the
//! residue itself.
//!
//! Elements carry no reference to the field they came from. Passing an
//! element of one [`FieldCtx`] to another is a caller error that the type
//! system does not catch.

use std::fmt;

use thiserror::Error;

/// Largest supported field size. Tables for every element are kept in memory.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field size {0} exceeds the table limit of 2^20")]
    FieldTooLarge(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("element index {index} out of range for a field of size {q}")]
    OutOfRange { index: u64, q: u32 },
}

/// An element of GF(q), stored as its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for FieldElement {
    fn from(v: u32) -> Self {
        FieldElement(v)
    }
}

/// Characteristic, degree and defining polynomial of a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldParams {
    p: u32,
    n: u32,
    /// Monic modulus, low degree first, length `n + 1`. `None` for prime fields.
    modulus: Option<Vec<u32>>,
    q: u32,
}

impl FieldParams {
    /// Validates `p`, `n` and an optional explicit modulus.
    pub fn new(p: u64, n: u32, modulus: Option<Vec<u32>>) -> Result<Self, FieldError> {
        if n == 0 {
            return Err(FieldError::BadDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let q = checked_field_size(p, n)?;
        let p = p as u32;
        let modulus = match (n, modulus) {
            (1, None) => None,
            (1, Some(m)) => {
                return Err(FieldError::BadModulus(format!(
                    "prime field takes no modulus, got {m:?}"
                )))
            }
            (_, None) => Some(smallest_irreducible(p, n)),
            (_, Some(m)) => {
                if m.len() != n as usize + 1 || m[n as usize] != 1 {
                    return Err(FieldError::BadModulus(format!(
                        "expected a monic polynomial of degree {n}, got {m:?}"
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(FieldError::BadModulus(format!(
                        "coefficients must lie in 0..{p}"
                    )));
                }
                if !is_irreducible(&m, p) {
                    return Err(FieldError::BadModulus(format!("{m:?} is reducible")));
                }
                Some(m)
            }
        };
        Ok(FieldParams { p, n, modulus, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn is_prime_field(&self) -> bool {
        self.n == 1
    }
}

/// A fully tabulated finite field.
///
/// Immutable after construction; share it freely across threads.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    params: FieldParams,
    generator: FieldElement,
    exp_table: Vec<u32>,
    dlog_table: Vec<u32>,
    trace_table: Vec<u32>,
    /// p^i for i in 0..n
    radix: Vec<u32>,
}

const NO_LOG: u32 = u32::MAX;

/// Builds GF(p^n) with the lexicographically smallest monic irreducible
/// modulus and the smallest-index primitive element as generator.
pub fn build_field(p: u64, n: u32) -> Result<FieldCtx, FieldError> {
    FieldCtx::from_params(FieldParams::new(p, n, None)?)
}

impl FieldCtx {
    pub fn new(p: u64, n: u32) -> Result<Self, FieldError> {
        build_field(p, n)
    }

    pub fn from_params(params: FieldParams) -> Result<Self, FieldError> {
        let radix: Vec<u32> = (0..params.n).map(|i| params.p.pow(i)).collect();
        let mut ctx = FieldCtx {
            params,
            generator: FieldElement::ONE,
            exp_table: Vec::new(),
            dlog_table: Vec::new(),
            trace_table: Vec::new(),
            radix,
        };
        ctx.generator = ctx.find_generator();
        ctx.fill_log_tables();
        ctx.fill_trace_table();
        Ok(ctx)
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.params.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.params.n
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.params.q
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn exp_table(&self) -> &[u32] {
        &self.exp_table
    }

    pub fn trace_table(&self) -> &[u32] {
        &self.trace_table
    }

    pub fn element(&self, index: u64) -> Result<FieldElement, FieldError> {
        if index >= u64::from(self.q()) {
            return Err(FieldError::OutOfRange { index, q: self.q() });
        }
        Ok(FieldElement(index as u32))
    }

    /// The image of an integer under Z -> GF(p) -> GF(q).
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(i64::from(self.p())) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q()).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.q()).map(FieldElement)
    }

    /// Elements of the prime subfield GF(p), which are exactly the indices below p.
    pub fn is_in_prime_subfield(&self, a: FieldElement) -> bool {
        a.0 < self.p()
    }

    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        let p = self.p();
        let mut v = a.0;
        (0..self.n())
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> FieldElement {
        debug_assert!(digits.len() <= self.n() as usize);
        FieldElement(
            digits
                .iter()
                .zip(&self.radix)
                .map(|(&d, &r)| (d % self.p()) * r)
                .sum(),
        )
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p();
        if self.n() == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= p { s - p } else { s });
        }
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out) = (a.0, b.0, 0u32);
        for &r in &self.radix {
            let d = x % p + y % p;
            out += if d >= p { d - p } else { d } * r;
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.p();
        if self.n() == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { p - a.0 });
        }
        if p == 2 {
            return a;
        }
        let (mut x, mut out) = (a.0, 0u32);
        for &r in &self.radix {
            let d = x % p;
            out += if d == 0 { 0 } else { p - d } * r;
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Product in GF(q). Prime fields multiply natively; extensions go through
    /// the discrete-log tables, which are themselves built from
    /// [`FieldCtx::mul_poly`].
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.n() == 1 {
            return FieldElement(((u64::from(a.0) * u64::from(b.0)) % u64::from(self.p())) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = self.q() - 1;
        let k = self.dlog_table[a.0 as usize] + self.dlog_table[b.0 as usize];
        FieldElement(self.exp_table[(if k >= order { k - order } else { k }) as usize])
    }

    /// Schoolbook product of residue polynomials reduced by the modulus.
    pub fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = u64::from(self.p());
        let Some(modulus) = self.params.modulus() else {
            return FieldElement(((u64::from(a.0) * u64::from(b.0)) % p) as u32);
        };
        let n = self.n() as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * n - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % p;
            }
        }
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in modulus[..n].iter().enumerate() {
                let t = (c * u64::from(m)) % p;
                prod[i - n + j] = (prod[i - n + j] + p - t) % p;
            }
        }
        let digits: Vec<u32> = prod[..n].iter().map(|&d| d as u32).collect();
        self.from_digits(&digits)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        let k = self.dlog(a)?;
        let order = self.q() - 1;
        Ok(FieldElement(self.exp_table[((order - k) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn dlog(&self, a: FieldElement) -> Result<u32, FieldError> {
        match self.dlog_table[a.0 as usize] {
            NO_LOG => Err(FieldError::DivisionByZero),
            k => Ok(k),
        }
    }

    /// generator^k for any k.
    #[inline]
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp_table[(k % u64::from(self.q() - 1)) as usize])
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        match self.dlog_table[a.0 as usize] {
            NO_LOG => FieldElement::ZERO,
            k => self.exp(u64::from(k) * (e % u64::from(self.q() - 1))),
        }
    }

    /// x -> x^p.
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, u64::from(self.p()))
    }

    /// Absolute trace to GF(p), returned as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        self.trace_table[a.0 as usize]
    }

    fn pow_poly(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> FieldElement {
        let order = u64::from(self.q() - 1);
        let factors = prime_factors(order);
        (1..self.q())
            .map(FieldElement)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_poly(g, order / r) != FieldElement::ONE)
            })
            .expect("the multiplicative group of a finite field is cyclic")
    }

    fn fill_log_tables(&mut self) {
        let q = self.q() as usize;
        let mut exp = Vec::with_capacity(q - 1);
        let mut dlog = vec![NO_LOG; q];
        let mut x = FieldElement::ONE;
        for k in 0..q - 1 {
            debug_assert_eq!(dlog[x.0 as usize], NO_LOG);
            exp.push(x.0);
            dlog[x.0 as usize] = k as u32;
            x = self.mul_poly(x, self.generator);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        self.exp_table = exp;
        self.dlog_table = dlog;
    }

    fn fill_trace_table(&mut self) {
        let p = self.p();
        let n = self.n() as usize;
        // Tr is GF(p)-linear, so tabulate it on the power basis and extend.
        let basis_traces: Vec<u32> = (0..n)
            .map(|i| {
                let x = FieldElement(self.radix[i]);
                let mut t = x;
                let mut sum = x;
                for _ in 1..n {
                    t = self.pow_poly(t, u64::from(p));
                    sum = self.add(sum, t);
                }
                debug_assert!(sum.0 < p, "trace must land in the prime subfield");
                sum.0
            })
            .collect();
        self.trace_table = (0..self.q())
            .map(|idx| {
                let mut v = idx;
                let mut acc = 0u64;
                for &t in &basis_traces {
                    acc += u64::from(v % p) * u64::from(t);
                    v /= p;
                }
                (acc % u64::from(p)) as u32
            })
            .collect();
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn checked_field_size(p: u64, n: u32) -> Result<u32, FieldError> {
    let mut q: u64 = 1;
    for _ in 0..n {
        q = q.saturating_mul(p);
        if q > MAX_FIELD_SIZE {
            return Err(FieldError::FieldTooLarge(q));
        }
    }
    Ok(q as u32)
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p), low degree first.
fn poly_rem_monic(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let p = u64::from(p);
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| u64::from(c)).collect();
    while r.len() > dm {
        let c = r.pop().unwrap_or(0);
        if c != 0 {
            let shift = r.len() - dm;
            for (j, &mj) in m[..dm].iter().enumerate() {
                let t = (c * u64::from(mj)) % p;
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Irreducibility by trial division against every monic polynomial of degree
/// at most n/2.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                divisor.push((v % u64::from(p)) as u32);
                v /= u64::from(p);
            }
            divisor.push(1);
            if poly_rem_monic(m, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree n, comparing the
/// coefficient vectors from the constant term upward.
pub(crate) fn smallest_irreducible(p: u32, n: u32) -> Vec<u32> {
    let n = n as usize;
    let mut coeffs = vec![0u32; n];
    loop {
        let mut candidate = coeffs.clone();
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
        // Odometer with the constant term as the most significant position.
        let mut pos = n;
        loop {
            assert!(pos > 0, "an irreducible polynomial of every degree exists");
            pos -= 1;
            coeffs[pos] += 1;
            if coeffs[pos] < p {
                break;
            }
            coeffs[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: u32) -> FieldElement {
        FieldElement(i)
    }

    #[test]
    fn gf5_generator_is_two() {
        let ctx = build_field(5, 1).unwrap();
        assert_eq!(ctx.q(), 5);
        assert_eq!(ctx.generator(), f(2));
    }

    #[test]
    fn gf4_modulus() {
        let ctx = build_field(2, 2).unwrap();
        assert_eq!(ctx.q(), 4);
        assert_eq!(ctx.params().modulus(), Some(&[1, 1, 1][..]));
    }

    #[test]
    fn gf9_modulus_is_x2_plus_1() {
        // c0 = 1, c1 = 0 comes first in low-degree-first order.
        let ctx = build_field(3, 2).unwrap();
        assert_eq!(ctx.params().modulus(), Some(&[1, 0, 1][..]));
    }

    #[test]
    fn rejects_composite_and_oversized() {
        assert_eq!(build_field(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert_eq!(build_field(1, 1).unwrap_err(), FieldError::NonPrime(1));
        assert!(matches!(
            build_field(2, 21).unwrap_err(),
            FieldError::FieldTooLarge(_)
        ));
        assert_eq!(build_field(3, 0).unwrap_err(), FieldError::BadDegree);
        assert!(build_field(2, 20).is_ok());
    }

    #[test]
    fn explicit_modulus_is_validated() {
        // X^2 + 1 = (X + 1)^2 over GF(2)
        assert!(matches!(
            FieldParams::new(2, 2, Some(vec![1, 0, 1])),
            Err(FieldError::BadModulus(_))
        ));
        assert!(FieldParams::new(3, 2, Some(vec![2, 1, 1])).is_ok());
        assert!(FieldParams::new(3, 2, Some(vec![2, 1, 2])).is_err());
    }

    #[test]
    fn small_products() {
        let gf5 = build_field(5, 1).unwrap();
        assert_eq!(gf5.mul(f(3), f(4)), f(2));
        let gf4 = build_field(2, 2).unwrap();
        // alpha = X has index 2, alpha + 1 has index 3
        assert_eq!(gf4.mul(f(2), f(2)), f(3));
        for a in gf4.elements() {
            assert_eq!(gf4.mul(a, FieldElement::ONE), a);
        }
    }

    #[test]
    fn inverses_and_logs() {
        let gf5 = build_field(5, 1).unwrap();
        assert_eq!(gf5.inv(f(2)).unwrap(), f(3));
        assert_eq!(gf5.dlog(f(4)).unwrap(), 2);
        assert_eq!(gf5.dlog(f(1)).unwrap(), 0);
        assert_eq!(gf5.dlog(f(0)), Err(FieldError::DivisionByZero));
        assert_eq!(gf5.inv(f(0)), Err(FieldError::DivisionByZero));
        let gf7 = build_field(7, 1).unwrap();
        assert_eq!(gf7.inv(f(1)).unwrap(), f(1));
        let gf4 = build_field(2, 2).unwrap();
        assert_eq!(gf4.inv(f(2)).unwrap(), f(3));
    }

    #[test]
    fn traces() {
        let gf7 = build_field(7, 1).unwrap();
        for a in gf7.elements() {
            assert_eq!(gf7.trace(a), a.0);
        }
        let gf4 = build_field(2, 2).unwrap();
        assert_eq!(gf4.trace(f(2)), 1);
        assert_eq!(gf4.trace(f(0)), 0);
    }

    #[test]
    fn table_product_matches_polynomial_product() {
        for (p, n) in [(2, 3), (3, 2), (2, 4), (5, 2), (3, 3)] {
            let ctx = build_field(p, n).unwrap();
            for a in ctx.elements() {
                for b in ctx.elements() {
                    assert_eq!(ctx.mul(a, b), ctx.mul_poly(a, b), "GF({p}^{n}) {a}*{b}");
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_prime_subfield() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (2, 4)] {
            let ctx = build_field(p, n).unwrap();
            let mut image = vec![false; ctx.q() as usize];
            for a in ctx.elements() {
                let fa = ctx.frobenius(a);
                image[fa.0 as usize] = true;
                assert_eq!(fa == a, ctx.is_in_prime_subfield(a));
                for b in ctx.elements() {
                    assert_eq!(ctx.frobenius(ctx.add(a, b)), ctx.add(fa, ctx.frobenius(b)));
                    assert_eq!(ctx.frobenius(ctx.mul(a, b)), ctx.mul(fa, ctx.frobenius(b)));
                }
            }
            assert!(image.iter().all(|&hit| hit));
        }
    }

    #[test]
    fn digits_roundtrip() {
        let ctx = build_field(3, 3).unwrap();
        for a in ctx.elements() {
            assert_eq!(ctx.from_digits(&ctx.digits(a)), a);
        }
    }
}
