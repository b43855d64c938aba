//! Triple character sums S_psi, T_chi and the mixed sum, the weighted
//! Kloosterman form K, the convolution set, and the right-hand sides they are
//! compared against.
//!
//! Every sum accumulates in sorted set order, so results are reproducible to
//! the bit. Bound values use implied constant 1; callers read the ratios.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::characters::{
    AdditiveCharacter, AdditiveTable, MultiplicativeCharacter, MultiplicativeTable,
};
use crate::decompose::{m_of_z, partition_with, DecomposeError, ThresholdParams};
use crate::energy::{additive_energy, cross_energy};
use crate::field::{FieldCtx, FieldElement};
use crate::ratfunc::RationalFunction;
use crate::sets::{inverse_set, FSubset};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharSumError {
    #[error("the set C is empty")]
    EmptyC,
    #[error("the set C contains 0, which has no inverse")]
    ZeroInC,
    #[error("weight at {0} lies outside the declared set")]
    WeightOutsideSet(FieldElement),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

/// Complex weights supported on a declared set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    set: FSubset,
    entries: BTreeMap<FieldElement, Complex64>,
}

impl WeightVector {
    pub fn new(
        set: FSubset,
        entries: impl IntoIterator<Item = (FieldElement, Complex64)>,
    ) -> Result<Self, CharSumError> {
        let entries: BTreeMap<_, _> = entries.into_iter().collect();
        if let Some(&x) = entries.keys().find(|&&x| !set.contains(x)) {
            return Err(CharSumError::WeightOutsideSet(x));
        }
        Ok(WeightVector { set, entries })
    }

    /// Weight 1 on every element of `set`.
    pub fn ones(set: &FSubset) -> Self {
        let entries = set.iter().map(|x| (x, Complex64::new(1.0, 0.0))).collect();
        WeightVector {
            set: set.clone(),
            entries,
        }
    }

    pub fn set(&self) -> &FSubset {
        &self.set
    }

    pub fn get(&self, x: FieldElement) -> Complex64 {
        self.entries.get(&x).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    Inf,
    /// The L_sigma norm, sigma >= 1.
    L(f64),
}

pub fn weight_norms(w: &WeightVector, norm: Norm) -> f64 {
    let mags = w.entries.values().map(|z| z.norm());
    match norm {
        Norm::Inf => mags.fold(0.0, f64::max),
        Norm::L(sigma) => mags.map(|m| m.powf(sigma)).sum::<f64>().powf(1.0 / sigma),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub value: f64,
    /// magnitude / value; infinite when value is 0.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumResult {
    pub value: Complex64,
    pub magnitude: f64,
    pub terms: u64,
    pub bound_report: Vec<BoundEntry>,
}

impl SumResult {
    fn new(value: Complex64, terms: u64) -> Self {
        SumResult {
            value,
            magnitude: value.norm(),
            terms,
            bound_report: Vec::new(),
        }
    }

    fn with_bounds(mut self, bounds: &[(&'static str, f64)], names: &[&str]) -> Self {
        for &(name, value) in bounds.iter().filter(|(n, _)| names.contains(n)) {
            let ratio = if value > 0.0 {
                self.magnitude / value
            } else {
                f64::INFINITY
            };
            self.bound_report.push(BoundEntry { name, value, ratio });
        }
        self
    }

    pub fn bound(&self, name: &str) -> Option<&BoundEntry> {
        self.bound_report.iter().find(|b| b.name == name)
    }
}

/// Norms of the Kloosterman weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightNorms {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma_inf: f64,
}

/// Inputs to [`bound_evaluators`]. Missing energies or norms omit the bounds
/// that need them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundInputs {
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// E(B), E(C), E(B, C).
    pub e_b: Option<f64>,
    pub e_c: Option<f64>,
    pub e_bc: Option<f64>,
    /// E(B^-1), E(C^-1).
    pub e_b_inv: Option<f64>,
    pub e_c_inv: Option<f64>,
    pub norms: Option<WeightNorms>,
}

/// Named right-hand sides, in a fixed order:
///
/// - `bilinear_s`, `bilinear_t`: A (BCq)^(1/2)
/// - `cross_energy`: (A E(B,C) q)^(1/2)
/// - `energy_pair`: A^(1/2) E(B)^(1/4) E(C)^(1/4) q^(1/2)
/// - `inverse_energy`: A^(1/2) E(B^-1)^(1/4) E(C^-1)^(1/4) q^(1/2) + A^(1/2) BC
/// - `half_subset`: A^(1/2) B^(3/2) q^(1/2) M(B)^(-1/2)
/// - `pair_subset`: A^(1/2) (BC)^(3/4) q^(1/2) / max{M(B), M(C)}^(1/4)
/// - `mixed`: (ABCq)^(1/2) + A^(1/2) BC q^(1/4)
/// - `kloosterman`: (|a|_1 |b|_2 + |a|_2 |b|_1) |g|_inf^2 q^(1/2) C^(3/2) M(C)^(-1/2)
///
/// M(Z) is undefined for Z <= 1 and the bounds using it are then omitted.
pub fn bound_evaluators(inp: &BoundInputs) -> Vec<(&'static str, f64)> {
    let BoundInputs { q, a, b, c, .. } = *inp;
    let m = |z: f64| m_of_z(z, q).ok();
    let mut out = Vec::new();
    let bilin = a * (b * c * q).sqrt();
    out.push(("bilinear_s", bilin));
    out.push(("bilinear_t", bilin));
    if let Some(e_bc) = inp.e_bc {
        out.push(("cross_energy", (a * e_bc * q).sqrt()));
    }
    if let (Some(eb), Some(ec)) = (inp.e_b, inp.e_c) {
        out.push((
            "energy_pair",
            a.sqrt() * eb.powf(0.25) * ec.powf(0.25) * q.sqrt(),
        ));
    }
    if let (Some(eb), Some(ec)) = (inp.e_b_inv, inp.e_c_inv) {
        out.push((
            "inverse_energy",
            a.sqrt() * eb.powf(0.25) * ec.powf(0.25) * q.sqrt() + a.sqrt() * b * c,
        ));
    }
    if let Some(mb) = m(b) {
        out.push(("half_subset", a.sqrt() * b.powf(1.5) * q.sqrt() / mb.sqrt()));
        if let Some(mc) = m(c) {
            out.push((
                "pair_subset",
                a.sqrt() * (b * c).powf(0.75) * q.sqrt() / mb.max(mc).powf(0.25),
            ));
        }
    }
    out.push((
        "mixed",
        (a * b * c * q).sqrt() + a.sqrt() * b * c * q.powf(0.25),
    ));
    if let (Some(n), Some(mc)) = (inp.norms, m(c)) {
        out.push((
            "kloosterman",
            (n.alpha1 * n.beta2 + n.alpha2 * n.beta1)
                * n.gamma_inf.powi(2)
                * q.sqrt()
                * c.powf(1.5)
                / mc.sqrt(),
        ));
    }
    out
}

fn sizes(ctx: &FieldCtx, a: &FSubset, b: &FSubset, c: &FSubset) -> BoundInputs {
    BoundInputs {
        q: f64::from(ctx.q()),
        a: a.len() as f64,
        b: b.len() as f64,
        c: c.len() as f64,
        ..Default::default()
    }
}

/// S_psi(A, B, C) = sum psi(ab + ac + bc).
///
/// Uses ab + ac + bc = ab + (a + b) c and caches sum_c psi(lambda c) for each
/// lambda in A + B, so the cost is O(AB + |A + B| C).
pub fn sum_s(
    ctx: &FieldCtx,
    a: &FSubset,
    b: &FSubset,
    c: &FSubset,
    psi: AdditiveCharacter,
) -> SumResult {
    let table = AdditiveTable::new(ctx, psi);
    let mut inner: Vec<Option<Complex64>> = vec![None; ctx.q() as usize];
    let mut total = Complex64::new(0.0, 0.0);
    for x in a.iter() {
        for y in b.iter() {
            let lambda = ctx.add(x, y);
            let s = *inner[lambda.0 as usize].get_or_insert_with(|| {
                c.iter()
                    .map(|z| table.eval(ctx.mul(lambda, z)))
                    .sum::<Complex64>()
            });
            total += table.eval(ctx.mul(x, y)) * s;
        }
    }
    s_result(ctx, a, b, c, total)
}

/// S_psi by the literal triple loop.
pub fn sum_s_naive(
    ctx: &FieldCtx,
    a: &FSubset,
    b: &FSubset,
    c: &FSubset,
    psi: AdditiveCharacter,
) -> SumResult {
    let table = AdditiveTable::new(ctx, psi);
    let total = triple(ctx, a, b, c, |t| table.eval(t));
    s_result(ctx, a, b, c, total)
}

fn s_result(ctx: &FieldCtx, a: &FSubset, b: &FSubset, c: &FSubset, total: Complex64) -> SumResult {
    let mut inputs = sizes(ctx, a, b, c);
    inputs.e_b = Some(additive_energy(ctx, b).value as f64);
    inputs.e_c = Some(additive_energy(ctx, c).value as f64);
    inputs.e_bc = Some(cross_energy(ctx, b, c).value as f64);
    SumResult::new(total, triple_terms(a, b, c)).with_bounds(
        &bound_evaluators(&inputs),
        &["bilinear_s", "cross_energy", "energy_pair"],
    )
}

fn triple_terms(a: &FSubset, b: &FSubset, c: &FSubset) -> u64 {
    (a.len() * b.len() * c.len()) as u64
}

fn triple(
    ctx: &FieldCtx,
    a: &FSubset,
    b: &FSubset,
    c: &FSubset,
    term: impl Fn(FieldElement) -> Complex64,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for x in a.iter() {
        for y in b.iter() {
            let xy = ctx.mul(x, y);
            let s = ctx.add(x, y);
            for z in c.iter() {
                total += term(ctx.add(xy, ctx.mul(s, z)));
            }
        }
    }
    total
}

/// T_chi(A, B, C) = sum chi(ab + ac + bc), with chi(0) = 0.
pub fn sum_t(
    ctx: &FieldCtx,
    a: &FSubset,
    b: &FSubset,
    c: &FSubset,
    chi: MultiplicativeCharacter,
) -> SumResult {
    let table = MultiplicativeTable::new(ctx, chi);
    let total = triple(ctx, a, b, c, |t| table.eval(t));
    let mut inputs = sizes(ctx, a, b, c);
    if !b.contains(FieldElement::ZERO) && !c.contains(FieldElement::ZERO) {
        inputs.e_b_inv = Some(additive_energy(ctx, &inverse_set(ctx, b)).value as f64);
        inputs.e_c_inv = Some(additive_energy(ctx, &inverse_set(ctx, c)).value as f64);
    }
    SumResult::new(total, triple_terms(a, b, c)).with_bounds(
        &bound_evaluators(&inputs),
        &["bilinear_t", "inverse_energy"],
    )
}

/// The mixed sum of chi(t) psi(t) over t = ab + ac + bc.
pub fn sum_mixed(
    ctx: &FieldCtx,
    a: &FSubset,
    b: &FSubset,
    c: &FSubset,
    chi: MultiplicativeCharacter,
    psi: AdditiveCharacter,
) -> SumResult {
    let mt = MultiplicativeTable::new(ctx, chi);
    let at = AdditiveTable::new(ctx, psi);
    let total = triple(ctx, a, b, c, |t| mt.eval(t) * at.eval(t));
    SumResult::new(total, triple_terms(a, b, c))
        .with_bounds(&bound_evaluators(&sizes(ctx, a, b, c)), &["mixed"])
}

/// K = sum_{a, b} alpha_a beta_b |sum_c gamma_c psi(ac + b/c)|^2, the sets
/// being those the weights are declared on.
pub fn kloosterman_k(
    ctx: &FieldCtx,
    alpha: &WeightVector,
    beta: &WeightVector,
    gamma: &WeightVector,
    psi: AdditiveCharacter,
) -> Result<SumResult, CharSumError> {
    let (a, b, c) = (alpha.set(), beta.set(), gamma.set());
    if c.is_empty() {
        return Err(CharSumError::EmptyC);
    }
    if c.contains(FieldElement::ZERO) {
        return Err(CharSumError::ZeroInC);
    }
    let table = AdditiveTable::new(ctx, psi);
    let inverses: Vec<(FieldElement, FieldElement, Complex64)> = c
        .iter()
        .map(|z| (z, ctx.inv(z).expect("C excludes 0"), gamma.get(z)))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for x in a.iter() {
        let wa = alpha.get(x);
        for y in b.iter() {
            let inner: Complex64 = inverses
                .iter()
                .map(|&(z, zi, g)| g * table.eval(ctx.add(ctx.mul(x, z), ctx.mul(y, zi))))
                .sum();
            total += wa * beta.get(y) * inner.norm_sqr();
        }
    }
    let mut inputs = sizes(ctx, a, b, c);
    inputs.norms = Some(WeightNorms {
        alpha1: weight_norms(alpha, Norm::L(1.0)),
        alpha2: weight_norms(alpha, Norm::L(2.0)),
        beta1: weight_norms(beta, Norm::L(1.0)),
        beta2: weight_norms(beta, Norm::L(2.0)),
        gamma_inf: weight_norms(gamma, Norm::Inf),
    });
    Ok(SumResult::new(total, triple_terms(a, b, c))
        .with_bounds(&bound_evaluators(&inputs), &["kloosterman"]))
}

/// {ab + ac + bc : a in A, b in B, c in C}.
pub fn convolution_set(ctx: &FieldCtx, a: &FSubset, b: &FSubset, c: &FSubset) -> FSubset {
    let mut hit = vec![false; ctx.q() as usize];
    for x in a.iter() {
        for y in b.iter() {
            let xy = ctx.mul(x, y);
            let s = ctx.add(x, y);
            for z in c.iter() {
                hit[ctx.add(xy, ctx.mul(s, z)).0 as usize] = true;
            }
        }
    }
    FSubset::from_mask(&hit)
}

/// sum over all x of psi(f(x)), poles skipped.
pub fn complete_sum(ctx: &FieldCtx, f: &RationalFunction, psi: AdditiveCharacter) -> Complex64 {
    let table = AdditiveTable::new(ctx, psi);
    ctx.elements()
        .filter_map(|x| f.eval(ctx, x))
        .map(|y| table.eval(y))
        .sum()
}

/// #{(b1, c1) in B x C : b1 + c1 = b2 + c2, 1/b1 + 1/c1 = 1/b2 + 1/c2}.
/// B and C must avoid 0.
pub fn degeneracy_count(
    ctx: &FieldCtx,
    b: &FSubset,
    c: &FSubset,
    b2: FieldElement,
    c2: FieldElement,
) -> u64 {
    let inv = |x| ctx.inv(x).expect("sets avoid 0");
    let sum = ctx.add(b2, c2);
    let inv_sum = ctx.add(inv(b2), inv(c2));
    b.iter()
        .filter(|&b1| {
            let c1 = ctx.sub(sum, b1);
            !c1.is_zero() && c.contains(c1) && ctx.add(inv(b1), inv(c1)) == inv_sum
        })
        .count() as u64
}

/// Largest degeneracy count over all (b2, c2), and over those with
/// b2 + c2 != 0. When b2 + c2 = 0 every (b, -b) qualifies, so only the second
/// value is bounded by 2.
pub fn max_degeneracy(ctx: &FieldCtx, b: &FSubset, c: &FSubset) -> (u64, u64) {
    let mut all = 0;
    let mut nonzero_sum = 0;
    for b2 in b.iter() {
        for c2 in c.iter() {
            let n = degeneracy_count(ctx, b, c, b2, c2);
            all = all.max(n);
            if !ctx.add(b2, c2).is_zero() {
                nonzero_sum = nonzero_sum.max(n);
            }
        }
    }
    (all, nonzero_sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfChoice {
    /// The low-energy part S.
    S,
    /// The part T whose inverses have low energy.
    T,
}

/// A subset W of B with W >= B/2 on which one of S_psi(A, W, W) and
/// T_chi(A, W, W) is small: the larger side of the decomposition of B with
/// f = X^-1, S on ties.
pub fn half_subset(
    ctx: &FieldCtx,
    b: &FSubset,
    params: &ThresholdParams,
) -> Result<(FSubset, HalfChoice), CharSumError> {
    let dec = partition_with(ctx, b, &RationalFunction::inversion(ctx), params)?;
    Ok(if dec.s_final.len() >= dec.t_final.len() {
        (dec.s_final, HalfChoice::S)
    } else {
        (dec.t_final, HalfChoice::T)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::sets::{interval, random_nonzero_subset, random_subset, seeded_rng};

    fn close(a: Complex64, b: Complex64, terms: u64) -> bool {
        (a - b).norm() <= 1e-9 * (terms.max(1) as f64)
    }

    #[test]
    fn trivial_character_counts_terms() {
        let ctx = build_field(101, 1).unwrap();
        let a = random_subset(&ctx, 7, 1).unwrap();
        let b = random_subset(&ctx, 5, 2).unwrap();
        let c = random_subset(&ctx, 6, 3).unwrap();
        let r = sum_s(&ctx, &a, &b, &c, AdditiveCharacter::new(FieldElement::ZERO));
        assert!(close(r.value, Complex64::new(210.0, 0.0), r.terms));
        assert_eq!(r.terms, 210);
    }

    #[test]
    fn s_with_zero_row() {
        let ctx = build_field(31, 1).unwrap();
        let all = FSubset::whole_field(&ctx);
        let zero = FSubset::new(31, [FieldElement::ZERO]);
        let r = sum_s(&ctx, &zero, &all, &all, AdditiveCharacter::canonical());
        assert!(close(r.value, Complex64::new(31.0, 0.0), r.terms));
    }

    #[test]
    fn fast_path_matches_triple_loop() {
        let ctx = build_field(5, 2).unwrap();
        let mut rng = seeded_rng(11);
        for _ in 0..10 {
            let a = crate::sets::random_subset_with(&ctx, 6, &mut rng).unwrap();
            let b = crate::sets::random_subset_with(&ctx, 8, &mut rng).unwrap();
            let c = crate::sets::random_subset_with(&ctx, 9, &mut rng).unwrap();
            let psi = AdditiveCharacter::new(FieldElement(7));
            let fast = sum_s(&ctx, &a, &b, &c, psi);
            let naive = sum_s_naive(&ctx, &a, &b, &c, psi);
            assert!(close(fast.value, naive.value, fast.terms));
        }
    }

    #[test]
    fn lower_bound_example() {
        let ctx = build_field(1009, 1).unwrap();
        let n = (0.1 * 1009f64.sqrt()).floor() as u64;
        let a = interval(&ctx, 0, n + 1).unwrap();
        let r = sum_s(&ctx, &a, &a, &a, AdditiveCharacter::canonical());
        assert!(r.magnitude >= 0.98 * r.terms as f64);
    }

    #[test]
    fn t_values() {
        let gf7 = build_field(7, 1).unwrap();
        let one = FSubset::new(7, [FieldElement::ONE]);
        let quad = MultiplicativeCharacter::quadratic(&gf7).unwrap();
        let r = sum_t(&gf7, &one, &one, &one, quad);
        assert!(close(r.value, Complex64::new(-1.0, 0.0), 1));
        let psi = AdditiveCharacter::canonical();
        let m = sum_mixed(&gf7, &one, &one, &one, quad, psi);
        let expected = -crate::characters::eval_additive(&gf7, psi, FieldElement(3));
        assert!(close(m.value, expected, 1));
        // chi trivial with 0 never hit: every term is 1
        let gf101 = build_field(101, 1).unwrap();
        let s = interval(&gf101, 1, 4).unwrap();
        let r = sum_t(&gf101, &s, &s, &s, MultiplicativeCharacter::trivial());
        assert!(close(r.value, Complex64::new(64.0, 0.0), 64));
    }

    #[test]
    fn mixed_with_trivial_chi_is_s_off_zero() {
        let ctx = build_field(101, 1).unwrap();
        let mut rng = seeded_rng(4);
        let a = random_nonzero_subset(&ctx, 9, &mut rng).unwrap();
        let b = random_nonzero_subset(&ctx, 9, &mut rng).unwrap();
        let c = random_nonzero_subset(&ctx, 9, &mut rng).unwrap();
        let psi = AdditiveCharacter::canonical();
        let m = sum_mixed(&ctx, &a, &b, &c, MultiplicativeCharacter::trivial(), psi);
        let s = sum_s_naive(&ctx, &a, &b, &c, psi);
        // chi_0(0) = 0 drops the zero terms, each of which contributes 1 to S
        let mut zeros = 0;
        for x in a.iter() {
            for y in b.iter() {
                for z in c.iter() {
                    if ctx.add(ctx.mul(x, y), ctx.mul(ctx.add(x, y), z)).is_zero() {
                        zeros += 1;
                    }
                }
            }
        }
        assert!(close(
            m.value + Complex64::new(zeros as f64, 0.0),
            s.value,
            m.terms
        ));
    }

    #[test]
    fn kloosterman_cases() {
        let ctx = build_field(101, 1).unwrap();
        let psi = AdditiveCharacter::canonical();
        let a = interval(&ctx, 1, 5).unwrap();
        let b = interval(&ctx, 10, 4).unwrap();
        let c = FSubset::new(101, [FieldElement::ONE]);
        let r = kloosterman_k(
            &ctx,
            &WeightVector::ones(&a),
            &WeightVector::ones(&b),
            &WeightVector::ones(&c),
            psi,
        )
        .unwrap();
        assert!(close(r.value, Complex64::new(20.0, 0.0), r.terms));
        let zero_gamma = WeightVector::new(c.clone(), []).unwrap();
        let r = kloosterman_k(
            &ctx,
            &WeightVector::ones(&a),
            &WeightVector::ones(&b),
            &zero_gamma,
            psi,
        )
        .unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        let empty = FSubset::empty(101);
        assert_eq!(
            kloosterman_k(
                &ctx,
                &WeightVector::ones(&a),
                &WeightVector::ones(&b),
                &WeightVector::ones(&empty),
                psi
            ),
            Err(CharSumError::EmptyC)
        );
        let with_zero = interval(&ctx, 0, 3).unwrap();
        assert_eq!(
            kloosterman_k(
                &ctx,
                &WeightVector::ones(&a),
                &WeightVector::ones(&b),
                &WeightVector::ones(&with_zero),
                psi
            ),
            Err(CharSumError::ZeroInC)
        );
    }

    #[test]
    fn weights_and_norms() {
        let s = FSubset::new(11, (1..=4).map(FieldElement));
        let ones = WeightVector::ones(&s);
        assert!((weight_norms(&ones, Norm::L(1.0)) - 4.0).abs() < 1e-12);
        assert!((weight_norms(&ones, Norm::L(2.0)) - 2.0).abs() < 1e-12);
        let w =
            WeightVector::new(s.clone(), [(FieldElement(2), Complex64::new(0.0, 3.0))]).unwrap();
        assert_eq!(weight_norms(&w, Norm::Inf), 3.0);
        assert_eq!(
            WeightVector::new(s, [(FieldElement(9), Complex64::new(1.0, 0.0))]),
            Err(CharSumError::WeightOutsideSet(FieldElement(9)))
        );
    }

    #[test]
    fn convolution_set_cases() {
        let ctx = build_field(13, 1).unwrap();
        let all = FSubset::whole_field(&ctx);
        assert_eq!(convolution_set(&ctx, &all, &all, &all), all);
        let zero = FSubset::new(13, [FieldElement::ZERO]);
        assert_eq!(convolution_set(&ctx, &zero, &zero, &zero), zero);
    }

    #[test]
    fn bound_identities() {
        let base = BoundInputs {
            q: 1009.0,
            a: 20.0,
            b: 30.0,
            c: 30.0,
            ..Default::default()
        };
        let get = |v: &[(&str, f64)], n: &str| v.iter().find(|(k, _)| *k == n).map(|&(_, x)| x);
        let v = bound_evaluators(&base);
        let m = m_of_z(30.0, 1009.0).unwrap();
        let (t12, t13) = (
            get(&v, "half_subset").unwrap(),
            get(&v, "pair_subset").unwrap(),
        );
        assert!((t13 - t12 * m.powf(0.25)).abs() <= 1e-12 * t12);
        assert!(get(&v, "energy_pair").is_none() && get(&v, "kloosterman").is_none());
        // maximal energies with A = B = C
        let cube = BoundInputs {
            a: 30.0,
            e_b: Some(27000.0),
            e_c: Some(27000.0),
            ..base
        };
        let v = bound_evaluators(&cube);
        let (l, b1) = (
            get(&v, "energy_pair").unwrap(),
            get(&v, "bilinear_s").unwrap(),
        );
        assert!((l - b1).abs() <= 1e-12 * b1);
        // M undefined for singletons
        let single = BoundInputs {
            b: 1.0,
            c: 1.0,
            ..base
        };
        assert!(get(&bound_evaluators(&single), "half_subset").is_none());
    }

    #[test]
    fn degeneracy_counts() {
        let ctx = build_field(31, 1).unwrap();
        let b = interval(&ctx, 1, 30).unwrap();
        // b2 + c2 = 0 admits every (b, -b)
        let (all, nonzero) = max_degeneracy(&ctx, &b, &b);
        assert_eq!(all, 30);
        assert!(nonzero <= 2);
        assert_eq!(
            degeneracy_count(&ctx, &b, &b, FieldElement(3), FieldElement(5)),
            2
        );
    }

    #[test]
    fn half_subset_is_large() {
        let ctx = build_field(257, 1).unwrap();
        let mut rng = seeded_rng(9);
        let b = random_nonzero_subset(&ctx, 40, &mut rng).unwrap();
        let (w, _) = half_subset(&ctx, &b, &ThresholdParams::with_m(4.0)).unwrap();
        assert!(2 * w.len() >= b.len() && w.is_subset(&b));
        let (w, choice) = half_subset(&ctx, &b, &ThresholdParams::default()).unwrap();
        assert_eq!((w, choice), (b, HalfChoice::S));
    }
}
