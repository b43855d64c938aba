//! Brute-force checks of the auxiliary counting lemmas.

use super::record::VerificationRecord;
use super::HarnessError;
use crate::energy::{additive_energy, dense_sum, rep_f, richness};
use crate::field::FieldCtx;
use crate::ratfunc::RationalFunction;
use crate::sets::FSubset;

/// J = #{(w, x, y, z) : f(w + x) = y + z} against the main term WXYZ/q.
///
/// Report-only: lhs = |J - WXYZ/q|, rhs = (WXYZq)^(1/2), so the ratio is the
/// observed implied constant.
pub fn verify_lemma_prodsum(
    ctx: &FieldCtx,
    w: &FSubset,
    x: &FSubset,
    y: &FSubset,
    z: &FSubset,
    f: &RationalFunction,
) -> VerificationRecord {
    let j = prodsum_count(ctx, w, x, y, z, f);
    let prod = (w.len() * x.len() * y.len() * z.len()) as f64;
    let q = f64::from(ctx.q());
    let main = prod / q;
    VerificationRecord::report(
        "lemmas",
        format!(
            "prodsum q={} W={} X={} Y={} Z={} f={} J={}",
            ctx.q(),
            w.len(),
            x.len(),
            y.len(),
            z.len(),
            f,
            j
        ),
        (j as f64 - main).abs(),
        (prod * q).sqrt(),
    )
}

pub fn prodsum_count(
    ctx: &FieldCtx,
    w: &FSubset,
    x: &FSubset,
    y: &FSubset,
    z: &FSubset,
    f: &RationalFunction,
) -> u64 {
    let wx = dense_sum(ctx, w, x);
    let yz = dense_sum(ctx, y, z);
    ctx.elements()
        .filter(|s| wx[s.0 as usize] > 0)
        .filter_map(|s| {
            f.eval(ctx, s)
                .map(|v| u64::from(wx[s.0 as usize]) * u64::from(yz[v.0 as usize]))
        })
        .sum()
}

/// #{x : r_U(f; x) >= tau} against ASUq / (u^2 tau^2), report-only.
///
/// Fails with [`HarnessError::Precondition`] unless r_{S,-A}(x) >= u on U
/// and tau >= 2kASU / (uq).
pub fn verify_lemma_rich(
    ctx: &FieldCtx,
    a: &FSubset,
    s: &FSubset,
    u_set: &FSubset,
    u: u64,
    f: &RationalFunction,
    tau: f64,
) -> Result<VerificationRecord, HarnessError> {
    if u == 0 {
        return Err(HarnessError::Precondition("u must be positive".into()));
    }
    if let Some(x) = u_set.iter().find(|&x| richness(ctx, s, a, x) < u) {
        return Err(HarnessError::Precondition(format!(
            "r_(S,-A)({x}) is below u = {u}"
        )));
    }
    let (na, ns, nu) = (a.len() as f64, s.len() as f64, u_set.len() as f64);
    let q = f64::from(ctx.q());
    let k = f.degree() as f64;
    let floor = 2.0 * k * na * ns * nu / (u as f64 * q);
    if tau < floor {
        return Err(HarnessError::Precondition(format!(
            "tau = {tau} is below 2kASU/(uq) = {floor}"
        )));
    }
    let reps = rep_f(ctx, f, u_set);
    let count = reps.counts.values().filter(|&&c| c as f64 >= tau).count();
    let uu = u as f64;
    Ok(VerificationRecord::report(
        "lemmas",
        format!(
            "rich q={} A={} S={} U={} u={} tau={}",
            ctx.q(),
            a.len(),
            s.len(),
            u_set.len(),
            u,
            super::record::format_g(tau)
        ),
        count as f64,
        na * ns * nu * q / (uu * uu * tau * tau),
    ))
}

/// E(A_1 u ... u A_n) <= (sum E(A_i)^(1/4))^4, a hard check on exact energies.
pub fn verify_union_energy(ctx: &FieldCtx, family: &[FSubset]) -> VerificationRecord {
    let union = family
        .iter()
        .fold(FSubset::empty(ctx.q()), |acc, s| acc.union(s));
    let lhs = additive_energy(ctx, &union).value as f64;
    let rhs = family
        .iter()
        .map(|s| (additive_energy(ctx, s).value as f64).powf(0.25))
        .sum::<f64>()
        .powi(4);
    let sizes: Vec<String> = family.iter().map(|s| s.len().to_string()).collect();
    VerificationRecord::at_most(
        "lemmas",
        format!("union-energy q={} sizes={}", ctx.q(), sizes.join("+")),
        lhs,
        rhs,
        1e-12 * rhs,
    )
}
