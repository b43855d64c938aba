//! The named verification suites.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::lemmas::{verify_lemma_prodsum, verify_lemma_rich, verify_union_energy};
use super::record::VerificationRecord;
use super::HarnessError;
use crate::characters::{
    eval_additive, eval_multiplicative, AdditiveCharacter, MultiplicativeCharacter,
};
use crate::charsums::{
    complete_sum, convolution_set, half_subset, kloosterman_k, max_degeneracy, sum_mixed, sum_s,
    sum_s_naive, sum_t, WeightVector,
};
use crate::decompose::{extract_with, partition_with, DecompositionResult, ThresholdParams};
use crate::energy::{additive_energy, cross_energy, f_energy, multiplicative_energy, richness};
use crate::field::{FieldCtx, FieldElement};
use crate::ratfunc::{
    is_exceptional, normalize, trace_linear_witness, Polynomial, RationalFunction,
};
use crate::sets::{
    add_subspace, garaev_set, interval, mult_subgroup, random_nonzero_subset, random_subset_with,
    sample_from, seeded_rng, sumset, uniform_below, FSubset,
};
use crate::setspec::parse_set;

/// Fields used by the exhaustive suites.
pub const STOCK_Q: [(u64, u32); 13] = [
    (2, 1),
    (3, 1),
    (2, 2),
    (5, 1),
    (7, 1),
    (2, 3),
    (3, 2),
    (2, 4),
    (5, 2),
    (3, 3),
    (7, 2),
    (101, 1),
    (11, 2),
];

pub(super) struct SuiteRun<'a> {
    pub name: &'static str,
    pub cfg: &'a ExperimentConfig,
    pub ctx: FieldCtx,
    pub f: RationalFunction,
    pub rng: ChaCha8Rng,
    pub records: Vec<VerificationRecord>,
}

impl<'a> SuiteRun<'a> {
    pub fn new(name: &'static str, cfg: &'a ExperimentConfig) -> Result<Self, HarnessError> {
        let ctx = FieldCtx::new(cfg.field.p, cfg.field.n).map_err(|e| HarnessError::Config {
            key: "field".into(),
            reason: e.to_string(),
        })?;
        let f = RationalFunction::parse(&ctx, &cfg.function).map_err(|e| HarnessError::Config {
            key: "function".into(),
            reason: e.to_string(),
        })?;
        // Each suite draws from its own stream so selections do not interact.
        let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
        });
        Ok(SuiteRun {
            name,
            cfg,
            rng: seeded_rng(cfg.seed ^ salt),
            ctx,
            f,
            records: Vec::new(),
        })
    }

    fn hard(&mut self, instance: String, lhs: f64, rhs: f64, pass: bool) {
        self.records.push(VerificationRecord::hard(
            self.name, instance, lhs, rhs, pass,
        ));
    }

    fn at_most(&mut self, instance: String, lhs: f64, rhs: f64, tol: f64) {
        self.records.push(VerificationRecord::at_most(
            self.name, instance, lhs, rhs, tol,
        ));
    }

    fn report(&mut self, instance: String, lhs: f64, rhs: f64) {
        self.records
            .push(VerificationRecord::report(self.name, instance, lhs, rhs));
    }

    fn push(&mut self, mut r: VerificationRecord) {
        r.suite = self.name.to_string();
        self.records.push(r);
    }

    /// Runs `body`, stamping the records it adds with its wall time when
    /// timing is on.
    fn timed<T>(&mut self, body: impl FnOnce(&mut Self) -> T) -> T {
        let start = self.records.len();
        let t = Instant::now();
        let out = body(self);
        if self.cfg.timing {
            let ms = t.elapsed().as_secs_f64() * 1e3;
            for r in &mut self.records[start..] {
                r.runtime_ms = ms;
            }
        }
        out
    }

    fn below(&mut self, n: u64) -> u64 {
        uniform_below(&mut self.rng, n)
    }

    fn q(&self) -> u64 {
        u64::from(self.ctx.q())
    }

    fn psi(&self) -> AdditiveCharacter {
        let a = if self.cfg.psi == 0 { 1 } else { self.cfg.psi };
        AdditiveCharacter::new(FieldElement(a as u32))
    }

    fn chi(&self) -> MultiplicativeCharacter {
        let chi = MultiplicativeCharacter::new(&self.ctx, self.cfg.chi);
        if chi.is_trivial() && self.ctx.q() > 2 {
            MultiplicativeCharacter::new(&self.ctx, 1)
        } else {
            chi
        }
    }

    fn random_set(&mut self, size: u64) -> FSubset {
        let size = size.min(self.q());
        random_subset_with(&self.ctx, size, &mut self.rng).expect("size capped at q")
    }

    fn random_nonzero(&mut self, size: u64) -> FSubset {
        let size = size.min(self.q() - 1);
        random_nonzero_subset(&self.ctx, size, &mut self.rng).expect("size capped at q - 1")
    }

    fn config_sets(&self) -> Result<Vec<(String, FSubset)>, HarnessError> {
        self.cfg
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_set(&self.ctx, s)
                    .map(|set| (s.clone(), set))
                    .map_err(|e| HarnessError::Config {
                        key: format!("sets[{i}]"),
                        reason: e.to_string(),
                    })
            })
            .collect()
    }

    /// Sizes in [ceil(q^0.55), 2 ceil(q^0.55)], capped at q.
    fn large_size(&mut self) -> u64 {
        let lo = (self.q() as f64).powf(0.55).ceil() as u64;
        (lo + self.below(lo + 1)).min(self.q())
    }
}

fn tag(ctx: &FieldCtx) -> String {
    if ctx.n() == 1 {
        format!("p={}", ctx.p())
    } else {
        format!("q={}^{}", ctx.p(), ctx.n())
    }
}

pub(super) fn field_axioms(run: &mut SuiteRun) -> Result<(), HarnessError> {
    for (p, n) in STOCK_Q {
        run.timed(|run| {
            let ctx = FieldCtx::new(p, n).expect("stock field");
            let els: Vec<FieldElement> = ctx.elements().collect();
            let (mut assoc, mut distrib, mut comm) = (0u64, 0u64, 0u64);
            for &a in &els {
                for &b in &els {
                    if ctx.add(a, b) != ctx.add(b, a) || ctx.mul(a, b) != ctx.mul(b, a) {
                        comm += 1;
                    }
                    for &c in &els {
                        if ctx.add(ctx.add(a, b), c) != ctx.add(a, ctx.add(b, c))
                            || ctx.mul(ctx.mul(a, b), c) != ctx.mul(a, ctx.mul(b, c))
                        {
                            assoc += 1;
                        }
                        if ctx.mul(a, ctx.add(b, c)) != ctx.add(ctx.mul(a, b), ctx.mul(a, c)) {
                            distrib += 1;
                        }
                    }
                }
            }
            let mut inverse = 0u64;
            for &a in &els {
                if ctx.add(a, ctx.neg(a)) != FieldElement::ZERO
                    || ctx.add(a, FieldElement::ZERO) != a
                    || ctx.mul(a, FieldElement::ONE) != a
                {
                    inverse += 1;
                }
                if !a.is_zero() && ctx.mul(a, ctx.inv(a).expect("nonzero")) != FieldElement::ONE {
                    inverse += 1;
                }
            }
            let t = tag(&ctx);
            for (what, bad) in [
                ("commutativity", comm),
                ("associativity", assoc),
                ("distributivity", distrib),
                ("identities-inverses", inverse),
            ] {
                run.hard(format!("{t} {what} violations"), bad as f64, 0.0, bad == 0);
            }
        });
    }
    Ok(())
}

pub(super) fn characters(run: &mut SuiteRun) -> Result<(), HarnessError> {
    for (p, n) in STOCK_Q {
        run.timed(|run| {
            let ctx = FieldCtx::new(p, n).expect("stock field");
            let q = f64::from(ctx.q());
            let tol = 1e-9 * q;
            let additive = ctx
                .nonzero_elements()
                .map(|a| {
                    let chi = AdditiveCharacter::new(a);
                    ctx.elements()
                        .map(|x| eval_additive(&ctx, chi, x))
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let multiplicative = (1..u64::from(ctx.q() - 1))
                .map(|j| {
                    let chi = MultiplicativeCharacter::new(&ctx, j);
                    ctx.nonzero_elements()
                        .map(|x| eval_multiplicative(&ctx, chi, x))
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let t = tag(&ctx);
            run.at_most(
                format!("{t} additive orthogonality max|sum|"),
                additive,
                0.0,
                tol,
            );
            run.at_most(
                format!("{t} multiplicative orthogonality max|sum|"),
                multiplicative,
                0.0,
                tol,
            );
        });
    }
    weil(run);
    Ok(())
}

/// |sum_x psi(f(x))| <= (k - 1) q^(1/2) for random f of degree k in 2..=5
/// prime to p.
fn weil(run: &mut SuiteRun) {
    let p = u64::from(run.ctx.p());
    let degrees: Vec<u64> = (2..=5).filter(|k| k % p != 0).collect();
    if degrees.is_empty() {
        return;
    }
    let psi = run.psi();
    let q = run.q();
    for trial in 0..run.cfg.trials {
        run.timed(|run| {
            let k = degrees[run.below(degrees.len() as u64) as usize];
            let mut coeffs: Vec<FieldElement> =
                (0..k).map(|_| FieldElement(run.below(q) as u32)).collect();
            coeffs.push(FieldElement(1 + run.below(q - 1) as u32));
            let f = RationalFunction::from_polynomial(&run.ctx, Polynomial::new(coeffs));
            let s = complete_sum(&run.ctx, &f, psi).norm();
            let bound = (k - 1) as f64 * (q as f64).sqrt();
            run.at_most(
                format!("{} weil trial={trial} k={k} f={f}", tag(&run.ctx)),
                s,
                bound,
                1e-9 * q as f64,
            );
        });
    }
}

/// Literal O(|U|^4) count.
fn quartic(u: &FSubset, op: impl Fn(FieldElement, FieldElement) -> FieldElement) -> u64 {
    let els = u.as_slice();
    let mut n = 0u64;
    for &a in els {
        for &b in els {
            let ab = op(a, b);
            for &c in els {
                n += els.iter().filter(|&&d| op(c, d) == ab).count() as u64;
            }
        }
    }
    n
}

pub(super) fn energy_oracle(run: &mut SuiteRun) -> Result<(), HarnessError> {
    for trial in 0..run.cfg.trials {
        run.timed(|run| {
            let size = 1 + run.below(40);
            let u = run.random_set(size);
            let ctx = &run.ctx;
            let fast = additive_energy(ctx, &u).value;
            let slow = quartic(&u, |a, b| ctx.add(a, b));
            let t = tag(ctx);
            run.hard(
                format!("{t} additive trial={trial} U={}", u.len()),
                fast as f64,
                slow as f64,
                fast == slow,
            );
            if trial % 5 == 0 {
                let ctx = &run.ctx;
                let fast = multiplicative_energy(ctx, &u).value;
                let slow = quartic(&u, |a, b| ctx.mul(a, b));
                run.hard(
                    format!("{t} multiplicative trial={trial} U={}", u.len()),
                    fast as f64,
                    slow as f64,
                    fast == slow,
                );
                let v = run.random_set(1 + trial as u64 % 30);
                let ctx = &run.ctx;
                let fast = cross_energy(ctx, &u, &v).value;
                let lhs_ops = |a: FieldElement, b: FieldElement| ctx.sub(a, b);
                let mut slow = 0u64;
                for b1 in u.iter() {
                    for b2 in u.iter() {
                        let d = lhs_ops(b1, b2);
                        for c1 in v.iter() {
                            slow += v.iter().filter(|&c2| ctx.sub(c2, c1) == d).count() as u64;
                        }
                    }
                }
                run.hard(
                    format!("{t} cross trial={trial} B={} C={}", u.len(), v.len()),
                    fast as f64,
                    slow as f64,
                    fast == slow,
                );
            }
        });
    }
    // arithmetic progressions: E = (2n^3 + n) / 3 while 2n - 1 < p
    if run.ctx.n() == 1 {
        let q = run.q();
        for n in (1..=20u64).filter(|n| 2 * n - 1 < q) {
            let ap = interval(&run.ctx, 0, n).expect("prime field");
            let e = additive_energy(&run.ctx, &ap).value;
            let closed = (2 * n * n * n + n) / 3;
            let t = tag(&run.ctx);
            run.hard(
                format!("{t} progression n={n}"),
                e as f64,
                closed as f64,
                e == closed,
            );
        }
    }
    Ok(())
}

fn random_polynomial(run: &mut SuiteRun, max_deg: u64) -> Polynomial {
    let q = run.q();
    let d = run.below(max_deg + 1);
    Polynomial::new((0..=d).map(|_| FieldElement(run.below(q) as u32)).collect())
}

fn artin_schreier_shape(
    ctx: &FieldCtx,
    g: &RationalFunction,
    lambda: FieldElement,
    mu: FieldElement,
) -> RationalFunction {
    let p = ctx.p() as usize;
    let pow = |a: &Polynomial| (1..p).fold(a.clone(), |acc, _| acc.mul(ctx, a));
    let (a, b) = (g.num(), g.den());
    let (ap, bp) = (pow(a), pow(b));
    let den = bp.mul(ctx, b);
    let lin = Polynomial::new(vec![mu, lambda]);
    let num = ap
        .mul(ctx, b)
        .sub(ctx, &a.mul(ctx, &bp))
        .add(ctx, &lin.mul(ctx, &den));
    normalize(ctx, &num, &den).expect("nonzero denominator")
}

pub(super) fn ratfunc(run: &mut SuiteRun) -> Result<(), HarnessError> {
    // fixed detector cases
    run.timed(|run| {
        for p in [3u64, 5, 7] {
            let ctx = FieldCtx::new(p, 1).expect("prime");
            let mut c = vec![FieldElement::ZERO; p as usize + 1];
            c[0] = FieldElement::ONE;
            c[1] = ctx.from_int(2);
            c[p as usize] = FieldElement::ONE;
            let shaped = RationalFunction::from_polynomial(&ctx, Polynomial::new(c));
            let cases = [
                ("X^p+2X+1", shaped, Some(ctx.from_int(3))),
                (
                    "X^2",
                    RationalFunction::parse(&ctx, "0,0,1").expect("valid"),
                    None,
                ),
                ("X^-1", RationalFunction::inversion(&ctx), None),
            ];
            for (name, f, want) in cases {
                let got = is_exceptional(&ctx, &f).expect("nonzero function");
                run.hard(
                    format!("p={p} exceptional {name} witness={:?}", got.map(|l| l.0)),
                    f64::from(u8::from(got == want)),
                    1.0,
                    got == want,
                );
            }
        }
        let gf9 = FieldCtx::new(3, 2).expect("GF(9)");
        for a in gf9.elements() {
            // X^3 + aX permutes GF(9) exactly when -a is not a nonzero square
            let f = RationalFunction::from_polynomial(
                &gf9,
                Polynomial::new(vec![
                    FieldElement::ZERO,
                    a,
                    FieldElement::ZERO,
                    FieldElement::ONE,
                ]),
            );
            let image: std::collections::BTreeSet<_> =
                gf9.elements().filter_map(|x| f.eval(&gf9, x)).collect();
            if image.len() != 9 {
                continue;
            }
            let got = is_exceptional(&gf9, &f).expect("nonzero function");
            let want = Some(gf9.add(a, FieldElement::ONE));
            run.hard(
                format!("q=3^2 linearized permutation X^3+{}X", a.0),
                f64::from(u8::from(got == want)),
                1.0,
                got == want,
            );
        }
    });

    let q = run.q();
    let psi = run.psi();
    for trial in 0..run.cfg.trials {
        run.timed(|run| {
            let g = random_polynomial(run, 4);
            let mut h = random_polynomial(run, 3);
            if h.is_zero() {
                h = Polynomial::one();
            }
            let ctx = &run.ctx;
            let t = tag(ctx);
            let f = normalize(ctx, &g, &h).expect("nonzero denominator");
            let again = normalize(ctx, f.num(), f.den()).expect("canonical");
            let idem = again == f;
            run.hard(
                format!("{t} normalize-idempotent trial={trial} f={f}"),
                f64::from(u8::from(idem)),
                1.0,
                idem,
            );

            // fibres of a nonconstant f have at most deg f points
            let ctx = &run.ctx;
            if f.num().degree().unwrap_or(0) > 0 || f.den().degree().unwrap_or(0) > 0 {
                let mut fibre = vec![0u64; q as usize];
                for y in ctx.elements().filter_map(|x| f.eval(ctx, x)) {
                    fibre[y.0 as usize] += 1;
                }
                let worst = fibre.into_iter().max().unwrap_or(0);
                run.at_most(
                    format!("{t} fibre trial={trial} f={f}"),
                    worst as f64,
                    f.degree() as f64,
                    0.0,
                );
            }

            // a planted excluded shape is found with its lambda, and the
            // twisted complete sum degenerates
            let gnum = random_polynomial(run, 2);
            let gden = {
                let d = random_polynomial(run, 1);
                if d.is_zero() {
                    Polynomial::one()
                } else {
                    d
                }
            };
            let lambda = FieldElement(run.below(q) as u32);
            let mu = FieldElement(run.below(q) as u32);
            let ctx = &run.ctx;
            let g = normalize(ctx, &gnum, &gden).expect("nonzero denominator");
            let shaped = artin_schreier_shape(ctx, &g, lambda, mu);
            let got = is_exceptional(ctx, &shaped).expect("valid");
            let ok = got == Some(lambda);
            run.hard(
                format!("{t} planted-shape trial={trial} lambda={}", lambda.0),
                f64::from(u8::from(ok)),
                1.0,
                ok,
            );
            let ctx = &run.ctx;
            if let Some(l) = got {
                let twisted: Complex64 = ctx
                    .elements()
                    .filter_map(|x| shaped.eval(ctx, x).map(|y| ctx.sub(y, ctx.mul(l, x))))
                    .map(|y| eval_additive(ctx, psi, y))
                    .sum();
                let points = ctx
                    .elements()
                    .filter(|&x| shaped.eval(ctx, x).is_some())
                    .count() as f64;
                let dev = (twisted.norm() - points).abs();
                run.at_most(
                    format!("{t} degenerate-sum trial={trial}"),
                    dev,
                    0.0,
                    1e-9 * q as f64,
                );
                let ctx = &run.ctx;
                if points > 0.0 {
                    let tw = trace_linear_witness(ctx, &shaped).expect("has points");
                    let ok = tw.is_some();
                    run.hard(
                        format!("{t} trace-criterion-implied trial={trial}"),
                        f64::from(u8::from(ok)),
                        1.0,
                        ok,
                    );
                }
            }
        });
    }
    Ok(())
}

fn certificate_failures(
    ctx: &FieldCtx,
    v: &FSubset,
    tr: &crate::decompose::ExtractionTrace,
) -> u64 {
    let mut bad = 0;
    for x in tr.u_set.iter() {
        if richness(ctx, &tr.s_set, v, x) < tr.u {
            bad += 1;
        }
    }
    if !tr.u_set.is_subset(v) {
        bad += 1;
    }
    bad
}

pub(super) fn extraction(run: &mut SuiteRun) -> Result<(), HarnessError> {
    let mut sets: Vec<(String, FSubset)> = run.config_sets()?;
    for trial in 0..run.cfg.trials {
        let size = run.large_size();
        sets.push((format!("trial={trial}"), run.random_set(size)));
    }
    let params = ThresholdParams::default();
    for (name, a) in sets {
        if a.len() < 2 {
            continue;
        }
        run.timed(|run| -> Result<(), HarnessError> {
            let tr = extract_with(&run.ctx, &a, &params)?;
            let t = format!("{} {name} A={}", tag(&run.ctx), a.len());
            // the popular sums really sit in [rho, 2 rho)
            let reps = crate::energy::rep_sum(&run.ctx, &a, &a);
            let off = tr
                .s_set
                .iter()
                .filter(|&x| {
                    let r = reps.get(x);
                    r < tr.rho || r >= 2 * tr.rho
                })
                .count();
            run.hard(
                format!("{t} dyadic-level rho={}", tr.rho),
                off as f64,
                0.0,
                off == 0,
            );
            let min_rich = tr
                .u_set
                .iter()
                .map(|x| richness(&run.ctx, &tr.s_set, &a, x))
                .min()
                .unwrap_or(0);
            let ok = !tr.u_set.is_empty() && certificate_failures(&run.ctx, &a, &tr) == 0;
            run.hard(
                format!(
                    "{t} certificate case={:?} U={} u={}",
                    tr.case,
                    tr.u_set.len(),
                    tr.u
                ),
                min_rich as f64,
                tr.u as f64,
                ok,
            );
            // pigeonhole mass: |P| >= A^2 / (2 (log2 A + 1))
            let a2 = (a.len() * a.len()) as f64;
            let levels = (a.len() as f64).log2().floor() + 1.0;
            run.at_most(
                format!("{t} pigeonhole-mass"),
                a2 / (2.0 * levels),
                tr.p_size as f64,
                1e-9,
            );
            Ok(())
        })?;
    }
    Ok(())
}

fn partition_records(run: &mut SuiteRun, t: &str, a: &FSubset, r: &DecompositionResult) {
    let ctx = &run.ctx;
    let mut violations = 0u64;
    if !r.s_final.is_disjoint(&r.t_final) {
        violations += 1;
    }
    if r.s_final.union(&r.t_final) != *a {
        violations += 1;
    }
    let mut covered = FSubset::empty(ctx.q());
    for piece in &r.pieces {
        if !covered.is_disjoint(piece) {
            violations += 1;
        }
        covered = covered.union(piece);
    }
    if covered != r.t_final {
        violations += 1;
    }
    let iters = r.iterations.len();
    run.hard(
        format!("{t} validity iterations={iters}"),
        violations as f64,
        0.0,
        violations == 0,
    );
    run.at_most(
        format!("{t} iteration-cap"),
        iters as f64,
        a.len() as f64,
        0.0,
    );

    // certificates recomputed against the V each piece was cut from
    let mut v = a.clone();
    let mut bad = 0;
    for (it, piece) in r.iterations.iter().zip(&r.pieces) {
        if let Some(tr) = it.trace.as_ref().filter(|_| !it.guarded) {
            bad += certificate_failures(&run.ctx, &v, tr);
        }
        v = v.difference(piece);
    }
    run.hard(format!("{t} certificates"), bad as f64, 0.0, bad == 0);

    let e_s = additive_energy(&run.ctx, &r.s_final).value;
    let e_ft = f_energy(&run.ctx, &run.f, &r.t_final).value;
    let recomputed = e_s == r.s_energy && e_ft == r.f_t_energy;
    run.hard(
        format!("{t} energy-recomputation"),
        e_s as f64,
        r.s_energy as f64,
        recomputed,
    );
    if r.trivial {
        run.hard(
            format!("{t} trivial-exit M={}", super::record::format_g(r.m_value)),
            r.t_final.len() as f64,
            0.0,
            r.t_final.is_empty(),
        );
    } else {
        run.at_most(
            format!("{t} threshold E(S)<=A^3/M"),
            e_s as f64,
            r.threshold,
            0.0,
        );
    }
    run.at_most(
        format!("{t} union-bound E(f(T))"),
        e_ft as f64,
        r.aggregate_bound,
        1e-9 * r.aggregate_bound,
    );
    let a3 = (a.len() as f64).powi(3);
    run.report(format!("{t} c1=E(S)M/A^3"), e_s as f64 * r.m_value, a3);
    run.report(format!("{t} c2=E(f(T))M/A^3"), e_ft as f64 * r.m_value, a3);
}

pub(super) fn partition(run: &mut SuiteRun) -> Result<(), HarnessError> {
    let mut sets: Vec<(String, FSubset)> = run.config_sets()?;
    for trial in 0..run.cfg.trials {
        let size = run.large_size();
        sets.push((format!("trial={trial}"), run.random_set(size)));
    }
    for (name, a) in sets {
        run.timed(|run| -> Result<(), HarnessError> {
            let e = additive_energy(&run.ctx, &a).value as f64;
            let n = a.len() as f64;
            let forced =
                run.cfg
                    .m_override
                    .unwrap_or(if e > 0.0 { 2.0 * n.powi(3) / e } else { 2.0 });
            for (mode, params) in [
                ("default", ThresholdParams::default()),
                ("override", ThresholdParams::with_m(forced)),
            ] {
                let r = partition_with(&run.ctx, &a, &run.f, &params)?;
                let t = format!("{} {name} A={} mode={mode}", tag(&run.ctx), a.len());
                partition_records(run, &t, &a, &r);
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub(super) fn charsum_bounds(run: &mut SuiteRun) -> Result<(), HarnessError> {
    let q = run.q();
    let qf = q as f64;
    let psi = run.psi();
    let chi = run.chi();
    let cap = (q - 1).min(30);
    let mut instances: Vec<(String, FSubset, FSubset, FSubset)> = Vec::new();
    let given = run.config_sets()?;
    if given.len() >= 3 {
        instances.push((
            format!("sets={},{},{}", given[0].0, given[1].0, given[2].0),
            given[0].1.clone(),
            given[1].1.clone(),
            given[2].1.clone(),
        ));
    }
    for trial in 0..run.cfg.trials {
        let sizes: Vec<u64> = (0..3).map(|_| 1 + run.below(cap)).collect();
        let a = run.random_nonzero(sizes[0]);
        let b = run.random_nonzero(sizes[1]);
        let c = run.random_nonzero(sizes[2]);
        instances.push((format!("trial={trial}"), a, b, c));
    }
    for (name, a, b, c) in instances {
        run.timed(|run| -> Result<(), HarnessError> {
            let ctx = &run.ctx;
            let t = format!(
                "{} {name} A={} B={} C={}",
                tag(ctx),
                a.len(),
                b.len(),
                c.len()
            );
            let s = sum_s(ctx, &a, &b, &c, psi);
            let naive = sum_s_naive(ctx, &a, &b, &c, psi);
            let tol = 1e-9 * s.terms.max(1) as f64;
            let bound = |name: &str| s.bound(name).expect("always reported").value;
            let (bilinear_s, cross, l41) = (
                bound("bilinear_s"),
                bound("cross_energy"),
                bound("energy_pair"),
            );
            run.at_most(
                format!("{t} S fast-vs-naive"),
                (s.value - naive.value).norm(),
                0.0,
                tol,
            );
            run.at_most(format!("{t} S<=A(BCq)^1/2"), s.magnitude, bilinear_s, tol);
            run.at_most(format!("{t} S<=(A E(B,C) q)^1/2"), s.magnitude, cross, tol);
            run.at_most(
                format!("{t} (A E(B,C) q)^1/2<=energy_pair"),
                cross,
                l41,
                1e-12 * l41,
            );

            let ctx = &run.ctx;
            let tsum = sum_t(ctx, &a, &b, &c, chi);
            for e in tsum.bound_report.clone() {
                run.report(
                    format!("{t} T chi={} {}", chi.j(), e.name),
                    tsum.magnitude,
                    e.value,
                );
            }
            let ctx = &run.ctx;
            let mixed = sum_mixed(ctx, &a, &b, &c, chi, psi);
            let e = mixed.bound("mixed").expect("always reported").clone();
            run.report(format!("{t} mixed {}", e.name), mixed.magnitude, e.value);

            let ctx = &run.ctx;
            let k = kloosterman_k(
                ctx,
                &WeightVector::ones(&a),
                &WeightVector::ones(&b),
                &WeightVector::ones(&c),
                psi,
            )?;
            let mut oracle = 0.0;
            for x in a.iter() {
                for y in b.iter() {
                    let inner: Complex64 = c
                        .iter()
                        .map(|z| {
                            let zi = ctx.inv(z).expect("nonzero");
                            eval_additive(ctx, psi, ctx.add(ctx.mul(x, z), ctx.mul(y, zi)))
                        })
                        .sum();
                    oracle += inner.norm_sqr();
                }
            }
            let scale = (a.len() * b.len() * c.len() * c.len()).max(1) as f64;
            run.at_most(
                format!("{t} K vs oracle"),
                (k.value.re - oracle).abs() + k.value.im.abs(),
                0.0,
                1e-9 * scale,
            );
            if let Some(e) = k.bound("kloosterman").cloned() {
                run.report(format!("{t} K {}", e.name), k.magnitude, e.value);
            }

            // sum/inverse-sum coincidences; only b2 + c2 != 0 is bounded
            if q <= 257 {
                let (all, nonzero) = max_degeneracy(&run.ctx, &b, &c);
                run.at_most(format!("{t} degeneracy b2+c2!=0"), nonzero as f64, 2.0, 0.0);
                run.report(format!("{t} degeneracy all pairs"), all as f64, 2.0);
            }

            let conv = convolution_set(&run.ctx, &a, &a, &a);
            let floor = qf.min((a.len() as f64).powf(1.5));
            run.report(
                format!("{t} |C(A,A,A)| vs min(q,A^1.5)"),
                conv.len() as f64,
                floor,
            );

            if b.len() >= 2 {
                let e = additive_energy(&run.ctx, &b).value as f64;
                let m = 2.0 * (b.len() as f64).powi(3) / e;
                let (w, choice) = half_subset(&run.ctx, &b, &ThresholdParams::with_m(m))?;
                run.at_most(
                    format!("{t} half-subset W>=B/2 side={choice:?}"),
                    b.len() as f64,
                    2.0 * w.len() as f64,
                    0.0,
                );
                let sw = sum_s(&run.ctx, &a, &w, &w, psi).magnitude;
                let tw = sum_t(&run.ctx, &a, &w, &w, chi).magnitude;
                if let Some(&(_, t12)) =
                    crate::charsums::bound_evaluators(&crate::charsums::BoundInputs {
                        q: qf,
                        a: a.len() as f64,
                        b: b.len() as f64,
                        c: b.len() as f64,
                        ..Default::default()
                    })
                    .iter()
                    .find(|(n, _)| *n == "half_subset")
                {
                    run.report(
                        format!("{t} min(|S|,|T|) on W half_subset"),
                        sw.min(tw),
                        t12,
                    );
                }
            }
            Ok(())
        })?;
    }

    // the small-interval example: every phase lies in [0, 0.06 pi]
    if run.ctx.n() == 1 {
        run.timed(|run| {
            let n = (0.1 * qf.sqrt()).floor() as u64;
            let a = interval(&run.ctx, 0, n + 1).expect("prime field");
            let s = sum_s(&run.ctx, &a, &a, &a, AdditiveCharacter::canonical());
            let floor = (0.06 * PI).cos() * s.terms as f64;
            run.hard(
                format!(
                    "{} interval(0,{}) |S|>=cos(0.06pi)ABC",
                    tag(&run.ctx),
                    n + 1
                ),
                s.magnitude,
                floor,
                s.magnitude >= floor * (1.0 - 1e-12),
            );
        });
    }
    Ok(())
}

pub(super) fn lemmas(run: &mut SuiteRun) -> Result<(), HarnessError> {
    let q = run.q();
    for trial in 0..run.cfg.trials {
        run.timed(|run| -> Result<(), HarnessError> {
            // union energy over a random disjoint family
            let parts = 1 + run.below(5) as usize;
            let total = (parts as u64 * (1 + run.below(12))).min(q);
            let pool = run.random_set(total);
            let mut elems: Vec<FieldElement> = pool.iter().collect();
            let shuffled = sample_from(&mut run.rng, &elems, elems.len());
            elems = shuffled;
            let family: Vec<FSubset> = (0..parts)
                .map(|i| FSubset::new(run.ctx.q(), elems.iter().skip(i).step_by(parts).copied()))
                .collect();
            let mut r = verify_union_energy(&run.ctx, &family);
            r.instance = format!("{} trial={trial}", r.instance);
            run.push(r);

            // solution count of f(w + x) = y + z
            let sizes: Vec<u64> = (0..4).map(|_| 1 + run.below(20)).collect();
            let sets: Vec<FSubset> = sizes.iter().map(|&s| run.random_set(s)).collect();
            let mut r =
                verify_lemma_prodsum(&run.ctx, &sets[0], &sets[1], &sets[2], &sets[3], &run.f);
            r.instance = format!("{} trial={trial}", r.instance);
            run.push(r);

            // rich elements, with (S, U, u) taken from an extraction
            let size = run.large_size().min(q - 1);
            let a = run.random_nonzero(size);
            if a.len() >= 2 {
                let tr = extract_with(&run.ctx, &a, &ThresholdParams::default())?;
                let k = run.f.degree() as f64;
                let floor = 2.0 * k * (a.len() * tr.s_set.len() * tr.u_set.len()) as f64
                    / (tr.u as f64 * q as f64);
                let tau = floor.max(1.0).ceil();
                let mut r =
                    verify_lemma_rich(&run.ctx, &a, &tr.s_set, &tr.u_set, tr.u, &run.f, tau)?;
                r.instance = format!("{} trial={trial}", r.instance);
                run.push(r);
                run.hard(
                    format!("{} rich-precondition trial={trial}", tag(&run.ctx)),
                    tr.certified_u as f64,
                    tr.u as f64,
                    tr.certified_u >= tr.u,
                );
            }
            Ok(())
        })?;
    }
    Ok(())
}

pub(super) fn constructions(run: &mut SuiteRun) -> Result<(), HarnessError> {
    let q = run.q();
    let t = tag(&run.ctx);
    if run.ctx.n() == 1 && q >= 20 {
        let step = q / 10;
        for lambda in [step, 2 * step, 3 * step] {
            run.timed(|run| -> Result<(), HarnessError> {
                let g = garaev_set(&run.ctx, lambda)?;
                let a = g.set;
                let n = a.len() as f64;
                let floor = lambda * lambda / q;
                run.hard(
                    format!("{t} garaev lambda={lambda} |A|>=floor(lambda^2/p)"),
                    n,
                    floor as f64,
                    a.len() as u64 >= floor,
                );
                let ss = sumset(&run.ctx, &a, &a).len();
                run.at_most(
                    format!("{t} garaev lambda={lambda} |A+A|<=2lambda-1"),
                    ss as f64,
                    (2 * lambda - 1) as f64,
                    0.0,
                );
                let e = additive_energy(&run.ctx, &a).value as f64;
                let cs = n.powi(4) / ss as f64;
                run.hard(
                    format!("{t} garaev lambda={lambda} E(A)>=A^4/|A+A|"),
                    e,
                    cs,
                    e >= cs * (1.0 - 1e-12),
                );
                run.report(format!("{t} garaev lambda={lambda} E(A)/A^3"), e, n.powi(3));
                Ok(())
            })?;
        }
    }
    run.timed(|run| {
        let order = q - 1;
        let divisors: Vec<u64> = (1..=order)
            .filter(|d| order.is_multiple_of(*d))
            .take(12)
            .collect();
        for d in divisors {
            let h = mult_subgroup(&run.ctx, d).expect("divisor");
            let ctx = &run.ctx;
            let closed = h.len() as u64 == d
                && h.iter()
                    .all(|x| h.iter().all(|y| h.contains(ctx.mul(x, y))))
                && h.iter().all(|x| h.contains(ctx.inv(x).expect("nonzero")));
            run.hard(
                format!("{t} subgroup d={d} closed"),
                h.len() as f64,
                d as f64,
                closed,
            );
            let e = multiplicative_energy(&run.ctx, &h).value;
            run.hard(
                format!("{t} subgroup d={d} E^x=d^3"),
                e as f64,
                (d * d * d) as f64,
                e == d * d * d,
            );
        }
        let n = run.ctx.n();
        if n > 1 {
            let basis: Vec<FieldElement> = (0..n - 1).map(|i| run.ctx.exp(u64::from(i))).collect();
            let v = add_subspace(&run.ctx, &basis);
            let ctx = &run.ctx;
            let closed = v
                .iter()
                .all(|x| v.iter().all(|y| v.contains(ctx.add(x, y))));
            let expected = u64::from(ctx.p()).pow(n - 1);
            run.hard(
                format!("{t} subspace dim={} closed", n - 1),
                v.len() as f64,
                expected as f64,
                closed && v.len() as u64 == expected,
            );
            let e = additive_energy(&run.ctx, &v).value;
            run.hard(
                format!("{t} subspace E=|V|^3"),
                e as f64,
                (expected.pow(3)) as f64,
                e == expected.pow(3),
            );
        }
    });
    Ok(())
}
