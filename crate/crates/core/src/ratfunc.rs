//! Polynomials and rational functions over GF(q).
//!
//! A [`RationalFunction`] is kept in canonical form: numerator and denominator
//! coprime, denominator monic. Evaluating at a root of the denominator yields
//! `None` (a pole); every sum and image set in this crate skips poles.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};
use crate::sets::FSubset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFuncError {
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("function has no finite values")]
    DegenerateFunction,
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Polynomial with coefficients low degree first and no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial c X^k.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    pub fn x() -> Self {
        Polynomial::monomial(FieldElement::ONE, 1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or_default();
                    let b = other.coeffs.get(i).copied().unwrap_or_default();
                    ctx.add(a, b)
                })
                .collect(),
        )
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElement) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Polynomial) -> Polynomial {
        self.add(ctx, &other.scale(ctx, ctx.neg(FieldElement::ONE)))
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Polynomial::new(out)
    }

    /// Quotient and remainder. `divisor` must be nonzero.
    pub fn div_rem(&self, ctx: &FieldCtx, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let lead = divisor.leading().expect("division by the zero polynomial");
        let lead_inv = ctx.inv(lead).expect("leading coefficient is nonzero");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = ctx.mul(rem[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = ctx.sub(rem[i - dd + j], ctx.mul(c, d));
            }
        }
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    pub fn monic(&self, ctx: &FieldCtx) -> Polynomial {
        match self.leading() {
            None => Polynomial::zero(),
            Some(l) => self.scale(ctx, ctx.inv(l).expect("nonzero leading coefficient")),
        }
    }

    /// Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(&self, ctx: &FieldCtx, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(ctx, &b);
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    /// Parses `"c0,c1,...,cd"`, each coefficient a field element index.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Polynomial, RatFuncError> {
        let err = |reason: String| RatFuncError::Parse {
            input: s.to_string(),
            reason,
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(err("empty coefficient list".into()));
        }
        let coeffs = s
            .split(',')
            .map(|tok| {
                let v: u64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad coefficient {tok:?}")))?;
                ctx.element(v).map_err(|e| err(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

impl fmt::Display for Polynomial {
    /// The CLI syntax: comma-separated coefficients, low degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// f = g / h in lowest terms with h monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    degree: usize,
}

/// Cancels common factors and scales the denominator monic.
pub fn normalize(
    ctx: &FieldCtx,
    g: &Polynomial,
    h: &Polynomial,
) -> Result<RationalFunction, RatFuncError> {
    if h.is_zero() {
        return Err(RatFuncError::ZeroDenominator);
    }
    if g.is_zero() {
        return Ok(RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
            degree: 0,
        });
    }
    let d = g.gcd(ctx, h);
    let (g, _) = g.div_rem(ctx, &d);
    let (h, _) = h.div_rem(ctx, &d);
    let lead_inv = ctx.inv(h.leading().expect("nonzero"))?;
    let (num, den) = (g.scale(ctx, lead_inv), h.scale(ctx, lead_inv));
    let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    Ok(RationalFunction { num, den, degree })
}

impl RationalFunction {
    pub fn from_polynomial(ctx: &FieldCtx, g: Polynomial) -> Self {
        normalize(ctx, &g, &Polynomial::one()).expect("unit denominator")
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        RationalFunction::from_polynomial(ctx, Polynomial::x())
    }

    /// X^-1.
    pub fn inversion(ctx: &FieldCtx) -> Self {
        normalize(ctx, &Polynomial::one(), &Polynomial::x()).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// max(deg g, deg h).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `None` at a pole.
    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> Option<FieldElement> {
        let h = self.den.eval(ctx, x);
        if h.is_zero() {
            return None;
        }
        Some(ctx.mul(self.num.eval(ctx, x), ctx.inv(h).ok()?))
    }

    /// Values at every element of the field, indexed by element.
    pub fn value_table(&self, ctx: &FieldCtx) -> Vec<Option<FieldElement>> {
        ctx.elements().map(|x| self.eval(ctx, x)).collect()
    }

    /// Parses `"num"` or `"num/den"`, each a comma-separated coefficient list.
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<RationalFunction, RatFuncError> {
        let (g, h) = match s.split_once('/') {
            Some((g, h)) => (Polynomial::parse(ctx, g)?, Polynomial::parse(ctx, h)?),
            None => (Polynomial::parse(ctx, s)?, Polynomial::one()),
        };
        normalize(ctx, &g, &h)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Decides whether f = g^p - g + lambda X + mu for some rational g and
/// constants lambda, mu, returning lambda when it is.
///
/// Each pole is reduced by subtracting g^p - g for a suitable principal part
/// g until its order is prime to p; the polynomial part is reduced monomial by
/// monomial the same way. f has the excluded shape exactly when the reduced
/// form is a polynomial of degree at most 1.
pub fn is_exceptional(
    ctx: &FieldCtx,
    f: &RationalFunction,
) -> Result<Option<FieldElement>, RatFuncError> {
    let p = ctx.p() as usize;
    let mut r = f.clone();
    while !r.is_polynomial() {
        // A pole of order prime to p cannot be cancelled.
        let Some(h) = pth_root_poly(ctx, &r.den) else {
            return Ok(None);
        };
        let rad = radical(ctx, &h);
        let (_, n_mod) = r.num.div_rem(ctx, &rad);
        let m = pth_root_mod(ctx, &n_mod, &rad);
        // r - (m/h)^p + m/h over the common denominator den * h.
        let mp = pow_poly(ctx, &m, p as u64);
        let num = r
            .num
            .sub(ctx, &mp)
            .mul(ctx, &h)
            .add(ctx, &m.mul(ctx, &r.den));
        let next = normalize(ctx, &num, &r.den.mul(ctx, &h))?;
        debug_assert!(next.den.degree() < r.den.degree());
        r = next;
    }
    let mut c = r.num.coeffs.clone();
    for e in (2..c.len()).rev() {
        if e % p == 0 && !c[e].is_zero() {
            c[e / p] = ctx.add(c[e / p], pth_root(ctx, c[e]));
            c[e] = FieldElement::ZERO;
        }
    }
    let reduced = Polynomial::new(c);
    if reduced.degree().unwrap_or(0) > 1 {
        return Ok(None);
    }
    Ok(Some(
        reduced.coeffs.get(1).copied().unwrap_or(FieldElement::ZERO),
    ))
}

/// The smallest lambda with x -> Tr(f(x) - lambda x) constant on the
/// non-pole points, if any. Implied by [`is_exceptional`] with the same
/// lambda, but over small fields it also accepts functions that only agree
/// with an excluded shape pointwise (X^-1 over GF(3) is one). O(q^2).
pub fn trace_linear_witness(
    ctx: &FieldCtx,
    f: &RationalFunction,
) -> Result<Option<FieldElement>, RatFuncError> {
    let points: Vec<(FieldElement, u32)> = ctx
        .elements()
        .filter_map(|x| f.eval(ctx, x).map(|y| (x, ctx.trace(y))))
        .collect();
    let Some(&(x0, t0)) = points.first() else {
        return Err(RatFuncError::DegenerateFunction);
    };
    let p = ctx.p();
    Ok(ctx.elements().find(|&lambda| {
        let base = (t0 + p - ctx.trace(ctx.mul(lambda, x0))) % p;
        points
            .iter()
            .all(|&(x, t)| (t + p - ctx.trace(ctx.mul(lambda, x))) % p == base)
    }))
}

fn pth_root(ctx: &FieldCtx, c: FieldElement) -> FieldElement {
    ctx.pow(c, u64::from(ctx.p()).pow(ctx.n() - 1))
}

/// h^(1/p) when h is a p-th power, i.e. only exponents divisible by p occur.
fn pth_root_poly(ctx: &FieldCtx, h: &Polynomial) -> Option<Polynomial> {
    let p = ctx.p() as usize;
    if h.coeffs
        .iter()
        .enumerate()
        .any(|(i, c)| i % p != 0 && !c.is_zero())
    {
        return None;
    }
    Some(Polynomial::new(
        h.coeffs
            .iter()
            .step_by(p)
            .map(|&c| pth_root(ctx, c))
            .collect(),
    ))
}

fn derivative(ctx: &FieldCtx, h: &Polynomial) -> Polynomial {
    Polynomial::new(
        h.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c))
            .collect(),
    )
}

/// Product of the distinct monic irreducible factors of h.
fn radical(ctx: &FieldCtx, h: &Polynomial) -> Polynomial {
    if h.degree().unwrap_or(0) == 0 {
        return Polynomial::one();
    }
    let d = derivative(ctx, h);
    if d.is_zero() {
        return radical(ctx, &pth_root_poly(ctx, h).expect("zero derivative"));
    }
    let g = h.gcd(ctx, &d);
    // w collects the factors whose multiplicity is prime to p.
    let w = h.div_rem(ctx, &g).0.monic(ctx);
    let rg = radical(ctx, &g);
    let common = w.gcd(ctx, &rg);
    w.mul(ctx, &rg).div_rem(ctx, &common).0
}

fn pow_poly(ctx: &FieldCtx, a: &Polynomial, mut e: u64) -> Polynomial {
    let (mut base, mut acc) = (a.clone(), Polynomial::one());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(ctx, &base);
        }
        base = base.mul(ctx, &base);
        e >>= 1;
    }
    acc
}

fn pow_mod(ctx: &FieldCtx, a: &Polynomial, mut e: u64, m: &Polynomial) -> Polynomial {
    let mut base = a.div_rem(ctx, m).1;
    let mut acc = Polynomial::one().div_rem(ctx, m).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(ctx, &base).div_rem(ctx, m).1;
        }
        base = base.mul(ctx, &base).div_rem(ctx, m).1;
        e >>= 1;
    }
    acc
}

/// y with y^p = a modulo the squarefree polynomial m. Frobenius permutes the
/// reduced ring F_q[X]/(m), so the orbit of a returns to a and the element
/// before it is the root.
fn pth_root_mod(ctx: &FieldCtx, a: &Polynomial, m: &Polynomial) -> Polynomial {
    let a = a.div_rem(ctx, m).1;
    let p = u64::from(ctx.p());
    let mut z = a.clone();
    loop {
        let next = pow_mod(ctx, &z, p, m);
        if next == a {
            return z;
        }
        z = next;
    }
}

/// f(U) with its collision count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageSet {
    pub set: FSubset,
    /// Points of U that are poles of f.
    pub poles: usize,
    /// |U minus poles| - |f(U)|.
    pub collisions: usize,
}

pub fn apply_to_set(ctx: &FieldCtx, f: &RationalFunction, u: &FSubset) -> ImageSet {
    let mut poles = 0;
    let values: Vec<FieldElement> = u
        .iter()
        .filter_map(|x| {
            let y = f.eval(ctx, x);
            if y.is_none() {
                poles += 1;
            }
            y
        })
        .collect();
    let finite = values.len();
    let set = FSubset::new(ctx.q(), values);
    let collisions = finite - set.len();
    ImageSet {
        set,
        poles,
        collisions,
    }
}
