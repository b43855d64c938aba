//! Additive and multiplicative characters of GF(q).
//!
//! `psi_a(x) = e(Tr(a x) / p)` and `chi_j(g^k) = e(j k / (q - 1))` with
//! `chi_j(0) = 0`, where `g` is the context's generator. Every character of
//! either group arises exactly once as `a` runs over GF(q) and `j` over
//! `0..q-1`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::field::{FieldCtx, FieldElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AdditiveCharacter {
    pub a: FieldElement,
}

impl AdditiveCharacter {
    pub fn new(a: FieldElement) -> Self {
        AdditiveCharacter { a }
    }

    /// The canonical character `x -> e(Tr(x)/p)`.
    pub fn canonical() -> Self {
        AdditiveCharacter {
            a: FieldElement::ONE,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiplicativeCharacter {
    j: u32,
}

impl MultiplicativeCharacter {
    /// Reduces `j` modulo `q - 1`.
    pub fn new(ctx: &FieldCtx, j: u64) -> Self {
        MultiplicativeCharacter {
            j: (j % u64::from(ctx.q() - 1)) as u32,
        }
    }

    pub fn trivial() -> Self {
        MultiplicativeCharacter { j: 0 }
    }

    /// The quadratic character, when q is odd.
    pub fn quadratic(ctx: &FieldCtx) -> Option<Self> {
        (ctx.q() % 2 == 1).then(|| MultiplicativeCharacter {
            j: (ctx.q() - 1) / 2,
        })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn is_trivial(&self) -> bool {
        self.j == 0
    }
}

/// e(num / den) computed from the reduced fraction.
#[inline]
fn unit_root(num: u64, den: u64) -> Complex64 {
    let r = num % den;
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, TAU * (r as f64) / (den as f64))
}

pub fn eval_additive(ctx: &FieldCtx, chi: AdditiveCharacter, x: FieldElement) -> Complex64 {
    let t = ctx.trace(ctx.mul(chi.a, x));
    unit_root(u64::from(t), u64::from(ctx.p()))
}

pub fn eval_multiplicative(
    ctx: &FieldCtx,
    chi: MultiplicativeCharacter,
    x: FieldElement,
) -> Complex64 {
    match ctx.dlog(x) {
        Err(_) => Complex64::new(0.0, 0.0),
        Ok(k) => unit_root(u64::from(chi.j) * u64::from(k), u64::from(ctx.q() - 1)),
    }
}

/// Table-backed evaluator for one additive character. Values are bitwise
/// identical to [`eval_additive`].
#[derive(Debug, Clone)]
pub struct AdditiveTable<'a> {
    ctx: &'a FieldCtx,
    a: FieldElement,
    roots: Vec<Complex64>,
}

impl<'a> AdditiveTable<'a> {
    pub fn new(ctx: &'a FieldCtx, chi: AdditiveCharacter) -> Self {
        let p = u64::from(ctx.p());
        AdditiveTable {
            ctx,
            a: chi.a,
            roots: (0..p).map(|t| unit_root(t, p)).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, x: FieldElement) -> Complex64 {
        self.roots[self.ctx.trace(self.ctx.mul(self.a, x)) as usize]
    }
}

/// Table-backed evaluator for one multiplicative character.
#[derive(Debug, Clone)]
pub struct MultiplicativeTable<'a> {
    ctx: &'a FieldCtx,
    j: u64,
    roots: Vec<Complex64>,
}

impl<'a> MultiplicativeTable<'a> {
    pub fn new(ctx: &'a FieldCtx, chi: MultiplicativeCharacter) -> Self {
        let order = u64::from(ctx.q() - 1);
        MultiplicativeTable {
            ctx,
            j: u64::from(chi.j),
            roots: (0..order).map(|t| unit_root(t, order)).collect(),
        }
    }

    #[inline]
    pub fn eval(&self, x: FieldElement) -> Complex64 {
        match self.ctx.dlog(x) {
            Err(_) => Complex64::new(0.0, 0.0),
            Ok(k) => {
                let order = self.roots.len() as u64;
                self.roots[((self.j * u64::from(k)) % order) as usize]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    const TOL: f64 = 1e-12;

    #[test]
    fn trivial_and_identity_values() {
        let ctx = build_field(5, 1).unwrap();
        let triv = AdditiveCharacter::new(FieldElement::ZERO);
        for x in ctx.elements() {
            assert_eq!(eval_additive(&ctx, triv, x), Complex64::new(1.0, 0.0));
        }
        let psi = AdditiveCharacter::canonical();
        assert_eq!(
            eval_additive(&ctx, psi, FieldElement(0)),
            Complex64::new(1.0, 0.0)
        );
        let v = eval_additive(&ctx, psi, FieldElement(1));
        let expected = Complex64::new((TAU / 5.0).cos(), (TAU / 5.0).sin());
        assert!((v - expected).norm() < TOL);
    }

    #[test]
    fn multiplicative_values() {
        let ctx = build_field(5, 1).unwrap();
        for j in 0..4 {
            let chi = MultiplicativeCharacter::new(&ctx, j);
            assert_eq!(
                eval_multiplicative(&ctx, chi, FieldElement::ONE),
                Complex64::new(1.0, 0.0)
            );
            assert_eq!(
                eval_multiplicative(&ctx, chi, FieldElement::ZERO),
                Complex64::new(0.0, 0.0)
            );
        }
        let triv = MultiplicativeCharacter::trivial();
        for x in ctx.nonzero_elements() {
            assert_eq!(eval_multiplicative(&ctx, triv, x), Complex64::new(1.0, 0.0));
        }
        let quad = MultiplicativeCharacter::quadratic(&ctx).unwrap();
        assert_eq!(quad.j(), 2);
        assert!((eval_multiplicative(&ctx, quad, FieldElement(4)) - 1.0).norm() < TOL);
    }

    #[test]
    fn quadratic_character_is_legendre_symbol() {
        let ctx = build_field(11, 1).unwrap();
        let quad = MultiplicativeCharacter::quadratic(&ctx).unwrap();
        let squares: Vec<u32> = (1..11u32).map(|x| x * x % 11).collect();
        for x in ctx.nonzero_elements() {
            let expected = if squares.contains(&x.0) { 1.0 } else { -1.0 };
            assert!((eval_multiplicative(&ctx, quad, x) - expected).norm() < TOL);
        }
    }

    #[test]
    fn tables_agree_with_direct_evaluation() {
        let ctx = build_field(3, 3).unwrap();
        for a in ctx.elements() {
            let chi = AdditiveCharacter::new(a);
            let table = AdditiveTable::new(&ctx, chi);
            for x in ctx.elements() {
                assert_eq!(table.eval(x), eval_additive(&ctx, chi, x));
            }
        }
        for j in 0..26 {
            let chi = MultiplicativeCharacter::new(&ctx, j);
            let table = MultiplicativeTable::new(&ctx, chi);
            for x in ctx.elements() {
                assert_eq!(table.eval(x), eval_multiplicative(&ctx, chi, x));
            }
        }
    }

    #[test]
    fn homomorphism_laws() {
        let ctx = build_field(2, 4).unwrap();
        for a in [1u32, 5, 9] {
            let psi = AdditiveCharacter::new(FieldElement(a));
            for x in ctx.elements() {
                for y in ctx.elements() {
                    let lhs = eval_additive(&ctx, psi, ctx.add(x, y));
                    let rhs = eval_additive(&ctx, psi, x) * eval_additive(&ctx, psi, y);
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
        for j in [1u64, 3, 5] {
            let chi = MultiplicativeCharacter::new(&ctx, j);
            for x in ctx.nonzero_elements() {
                for y in ctx.nonzero_elements() {
                    let lhs = eval_multiplicative(&ctx, chi, ctx.mul(x, y));
                    let rhs = eval_multiplicative(&ctx, chi, x) * eval_multiplicative(&ctx, chi, y);
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
    }
}
