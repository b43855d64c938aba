//! Low-energy decomposition: the threshold M(Z), dyadic extraction of a rich
//! subset, and the iterative partition A = S ⊔ T with E(S) and E(f(T)) small.
//!
//! Logarithms are natural, floored at 1. Dyadic classes are `[2^k, 2^(k+1))`.
//! Wherever the construction picks a popular class, the argmax of the
//! pigeonhole quantity is taken and ties go to the smaller class.

use thiserror::Error;

use crate::energy::{additive_energy, dense_sum, f_energy};
use crate::field::{FieldCtx, FieldElement};
use crate::ratfunc::{is_exceptional, RatFuncError, RationalFunction};
use crate::sets::FSubset;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("set of size {0} is too small to extract from")]
    SetTooSmall(usize),
    #[error("function is of Artin-Schreier-plus-linear shape (witness lambda = {0})")]
    ExceptionalFunction(FieldElement),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
}

/// Controls for the partition threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    /// ln A is replaced by max(ln A, log_floor). Must be at least 1.
    pub log_floor: f64,
    /// Use this value in place of M(A). With all implied constants set to 1,
    /// M(A) stays at or below 1 for every field this crate can tabulate, so
    /// the partition loop only runs when an explicit value is supplied.
    pub m_override: Option<f64>,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            log_floor: 1.0,
            m_override: None,
        }
    }
}

impl ThresholdParams {
    pub fn with_m(m: f64) -> Self {
        ThresholdParams {
            m_override: Some(m),
            ..Default::default()
        }
    }

    fn log(&self, z: f64) -> f64 {
        z.ln().max(self.log_floor)
    }
}

/// min{ q^(1/2) / (Z^(1/2) L^(11/4)), Z^(4/5) / (q^(2/5) L^(31/10)) } with
/// L = max(ln Z, 1).
pub fn m_of_z(z: f64, q: f64) -> Result<f64, DecomposeError> {
    m_of_z_with(z, q, &ThresholdParams::default())
}

pub fn m_of_z_with(z: f64, q: f64, params: &ThresholdParams) -> Result<f64, DecomposeError> {
    if z.is_nan() || z <= 1.0 {
        return Err(DecomposeError::BadArgument(format!(
            "Z must exceed 1, got {z}"
        )));
    }
    if q.is_nan() || q < 2.0 {
        return Err(DecomposeError::BadArgument(format!(
            "q must be at least 2, got {q}"
        )));
    }
    if params.log_floor < 1.0 {
        return Err(DecomposeError::BadArgument("log floor below 1".into()));
    }
    let l = params.log(z);
    let first = q.sqrt() / (z.sqrt() * l.powf(11.0 / 4.0));
    let second = z.powf(0.8) / (q.powf(0.4) * l.powf(3.1));
    Ok(first.min(second))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionCase {
    /// The column class is wide enough; U is the set of popular columns.
    I,
    /// Columns are few and rich; U comes from a second pass over rows.
    II,
}

/// Everything the extraction chose, for inspection and independent checking.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionTrace {
    /// Dyadic level of the popular sums: rho <= r_{A,A}(x) < 2 rho on S.
    pub rho: u64,
    /// The popular dyadic set S inside A + A.
    pub s_set: FSubset,
    /// #{(a, b) in A^2 : a + b in S}.
    pub p_size: u64,
    /// Size of the popular column class V.
    pub v_size: usize,
    /// Column richness level: s <= A_x < 2s on V.
    pub s_level: u64,
    pub case: ExtractionCase,
    /// Richness parameter u (s in case I, t in case II).
    pub u: u64,
    pub u_set: FSubset,
    /// min over U of r_{S,-A}(x); never below `u`.
    pub certified_u: u64,
}

impl ExtractionTrace {
    pub fn s_size(&self) -> usize {
        self.s_set.len()
    }
}

#[inline]
fn dyadic_class(v: u64) -> u32 {
    63 - v.leading_zeros()
}

/// Dyadic class maximizing `weight(2^k) * count_k` over positive values,
/// ties to the smaller k.
fn popular_class(values: impl Iterator<Item = u64>, weight: impl Fn(u128) -> u128) -> Option<u32> {
    let mut counts = [0u64; 64];
    for v in values.filter(|&v| v > 0) {
        counts[dyadic_class(v) as usize] += 1;
    }
    let mut best: Option<(u32, u128)> = None;
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let score = weight(1u128 << k) * u128::from(c);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((k as u32, score));
        }
    }
    best.map(|(k, _)| k)
}

/// Extracts U ⊆ A with r_{S,-A}(x) >= u on U. Rejects exceptional f.
pub fn extract_subset(
    ctx: &FieldCtx,
    a: &FSubset,
    f: &RationalFunction,
) -> Result<ExtractionTrace, DecomposeError> {
    if a.len() < 2 {
        return Err(DecomposeError::SetTooSmall(a.len()));
    }
    if let Some(lambda) = is_exceptional(ctx, f)? {
        return Err(DecomposeError::ExceptionalFunction(lambda));
    }
    extract_with(ctx, a, &ThresholdParams::default())
}

/// The extraction itself. `f` does not enter the construction, only the
/// admissibility check in [`extract_subset`].
pub fn extract_with(
    ctx: &FieldCtx,
    a: &FSubset,
    params: &ThresholdParams,
) -> Result<ExtractionTrace, DecomposeError> {
    if a.len() < 2 {
        return Err(DecomposeError::SetTooSmall(a.len()));
    }
    let log_a = params.log(a.len() as f64);

    // Popular dyadic set of sums.
    let reps = dense_sum(ctx, a, a);
    let rho_k =
        popular_class(reps.iter().map(|&r| u64::from(r)), |w| w * w).expect("A + A is nonempty");
    let mut in_s = vec![false; ctx.q() as usize];
    for (x, &r) in reps.iter().enumerate() {
        if r > 0 && dyadic_class(u64::from(r)) == rho_k {
            in_s[x] = true;
        }
    }
    let s_set = FSubset::from_mask(&in_s);

    // Column sizes A_x = #{y in A : x + y in S}; this is r_{S,-A}(x).
    let column: Vec<u64> = a
        .iter()
        .map(|x| a.iter().filter(|&y| in_s[ctx.add(x, y).0 as usize]).count() as u64)
        .collect();
    let p_size: u64 = column.iter().sum();

    let s_k = popular_class(column.iter().copied(), |w| w).expect("P is nonempty");
    let v_members: Vec<usize> = (0..a.len())
        .filter(|&i| column[i] > 0 && dyadic_class(column[i]) == s_k)
        .collect();
    let v_size = v_members.len();
    let s_level = 1u64 << s_k;

    let (case, u, members) = if v_size as f64 >= s_level as f64 / log_a.sqrt() {
        (ExtractionCase::I, s_level, v_members)
    } else {
        // Row sizes B_y = #{x in V : x + y in S}.
        let elems = a.as_slice();
        let row: Vec<u64> = elems
            .iter()
            .map(|&y| {
                v_members
                    .iter()
                    .filter(|&&i| in_s[ctx.add(elems[i], y).0 as usize])
                    .count() as u64
            })
            .collect();
        let t_k = popular_class(row.iter().copied(), |w| w).expect("Q is nonempty");
        let w_members: Vec<usize> = (0..a.len())
            .filter(|&i| row[i] > 0 && dyadic_class(row[i]) == t_k)
            .collect();
        (ExtractionCase::II, 1u64 << t_k, w_members)
    };

    let certified_u = members.iter().map(|&i| column[i]).min().unwrap_or(0);
    let u_set = FSubset::new(ctx.q(), members.iter().map(|&i| a.as_slice()[i]));
    debug_assert!(certified_u >= u);

    Ok(ExtractionTrace {
        rho: 1u64 << rho_k,
        s_set,
        p_size,
        v_size,
        s_level,
        case,
        u,
        u_set,
        certified_u,
    })
}

/// One pass of the partition loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub v_size: usize,
    pub v_energy: u64,
    pub piece_size: usize,
    /// E(f(Q_i)).
    pub piece_f_energy: u64,
    /// Set when the extraction made no strict progress and a single element
    /// was moved instead.
    pub guarded: bool,
    pub trace: Option<ExtractionTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub s_final: FSubset,
    pub t_final: FSubset,
    /// The extracted pieces Q_i, pairwise disjoint, union T.
    pub pieces: Vec<FSubset>,
    pub iterations: Vec<IterationRecord>,
    /// The value used for M(A).
    pub m_value: f64,
    /// A^3 / M(A).
    pub threshold: f64,
    /// M(A) <= 1: the bound is vacuous and S = A, T = empty.
    pub trivial: bool,
    /// E(S).
    pub s_energy: u64,
    /// E(f(T)).
    pub f_t_energy: u64,
    /// (sum_i E(f(Q_i))^(1/4))^4, an upper bound for E(f(T)).
    pub aggregate_bound: f64,
}

impl DecompositionResult {
    fn scaled(&self, e: u64) -> f64 {
        let a = (self.s_final.len() + self.t_final.len()) as f64;
        if a == 0.0 {
            return 0.0;
        }
        e as f64 * self.m_value / (a * a * a)
    }

    /// E(S) M(A) / A^3.
    pub fn c1(&self) -> f64 {
        self.scaled(self.s_energy)
    }

    /// E(f(T)) M(A) / A^3.
    pub fn c2(&self) -> f64 {
        self.scaled(self.f_t_energy)
    }
}

pub fn partition(
    ctx: &FieldCtx,
    a: &FSubset,
    f: &RationalFunction,
) -> Result<DecompositionResult, DecomposeError> {
    partition_with(ctx, a, f, &ThresholdParams::default())
}

/// Peels rich pieces off A until the remainder has energy at most A^3 / M.
pub fn partition_with(
    ctx: &FieldCtx,
    a: &FSubset,
    f: &RationalFunction,
    params: &ThresholdParams,
) -> Result<DecompositionResult, DecomposeError> {
    if let Some(lambda) = is_exceptional(ctx, f)? {
        return Err(DecomposeError::ExceptionalFunction(lambda));
    }
    let size = a.len();
    let (m_value, threshold) = if size < 2 {
        (0.0, f64::INFINITY)
    } else {
        let m = match params.m_override {
            Some(m) => m,
            None => m_of_z_with(size as f64, f64::from(ctx.q()), params)?,
        };
        (m, (size as f64).powi(3) / m)
    };

    if m_value <= 1.0 {
        return Ok(DecompositionResult {
            s_final: a.clone(),
            t_final: FSubset::empty(ctx.q()),
            pieces: Vec::new(),
            iterations: Vec::new(),
            m_value,
            threshold,
            trivial: true,
            s_energy: additive_energy(ctx, a).value,
            f_t_energy: 0,
            aggregate_bound: 0.0,
        });
    }

    let mut v = a.clone();
    let mut pieces: Vec<FSubset> = Vec::new();
    let mut iterations = Vec::new();
    let mut v_energy = additive_energy(ctx, &v).value;
    while v_energy as f64 > threshold && iterations.len() < size {
        let trace = if v.len() >= 2 {
            Some(extract_with(ctx, &v, params)?)
        } else {
            None
        };
        let (piece, guarded) = match &trace {
            Some(t) if !t.u_set.is_empty() && t.u_set.len() < v.len() => (t.u_set.clone(), false),
            _ => {
                let first = v
                    .first()
                    .expect("energy above threshold implies V nonempty");
                (FSubset::new(ctx.q(), [first]), true)
            }
        };
        iterations.push(IterationRecord {
            v_size: v.len(),
            v_energy,
            piece_size: piece.len(),
            piece_f_energy: f_energy(ctx, f, &piece).value,
            guarded,
            trace,
        });
        v = v.difference(&piece);
        pieces.push(piece);
        v_energy = additive_energy(ctx, &v).value;
    }

    let t_final = FSubset::new(ctx.q(), pieces.iter().flat_map(|p| p.iter()));
    let aggregate_bound = iterations
        .iter()
        .map(|it| (it.piece_f_energy as f64).powf(0.25))
        .sum::<f64>()
        .powi(4);
    Ok(DecompositionResult {
        f_t_energy: f_energy(ctx, f, &t_final).value,
        s_energy: v_energy,
        s_final: v,
        t_final,
        pieces,
        iterations,
        m_value,
        threshold,
        trivial: false,
        aggregate_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::richness;
    use crate::field::build_field;
    use crate::ratfunc::Polynomial;
    use crate::sets::{geometric_progression, interval, random_subset};

    #[test]
    fn m_of_z_unit_log_point() {
        let e = std::f64::consts::E;
        let m = m_of_z(e, e * e).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn m_of_z_rejects_bad_arguments() {
        assert!(matches!(
            m_of_z(1.0, 7.0),
            Err(DecomposeError::BadArgument(_))
        ));
        assert!(matches!(
            m_of_z(0.5, 7.0),
            Err(DecomposeError::BadArgument(_))
        ));
        assert!(matches!(
            m_of_z(5.0, 1.0),
            Err(DecomposeError::BadArgument(_))
        ));
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn m_of_z_frozen_values() {
        // Reference values from 50-digit evaluation of the defining formula.
        let cases = [
            (4099.0, 4099.0, 0.0029503696611938279),
            (64.0, 4099.0, 0.012051608260882587),
            (1000.0, 1048576.0, 0.0024536663676629189),
            (100000.0, 1048576.0, 0.0039087626592144966),
        ];
        for (z, q, expected) in cases {
            let m = m_of_z(z, q).unwrap();
            assert!(
                ((m - expected) / expected).abs() < 1e-12,
                "M({z}) at q={q}: {m} vs {expected}"
            );
        }
    }

    #[test]
    fn extraction_certificate_on_interval() {
        let ctx = build_field(1009, 1).unwrap();
        let a = interval(&ctx, 0, 64).unwrap();
        let f = RationalFunction::inversion(&ctx);
        let tr = extract_subset(&ctx, &a, &f).unwrap();
        assert!(tr.rho.is_power_of_two() && tr.rho as usize <= a.len());
        assert!(!tr.u_set.is_empty() && tr.u_set.is_subset(&a));
        for x in tr.u_set.iter() {
            assert!(richness(&ctx, &tr.s_set, &a, x) >= tr.u);
        }
        assert!(tr.certified_u >= tr.u);
    }

    #[test]
    fn extraction_errors() {
        let ctx = build_field(7, 1).unwrap();
        let f = RationalFunction::inversion(&ctx);
        let one = FSubset::new(7, [FieldElement(3)]);
        assert_eq!(
            extract_subset(&ctx, &one, &f),
            Err(DecomposeError::SetTooSmall(1))
        );
        let frob =
            RationalFunction::from_polynomial(&ctx, Polynomial::monomial(FieldElement::ONE, 7));
        let a = interval(&ctx, 0, 4).unwrap();
        assert!(matches!(
            extract_subset(&ctx, &a, &frob),
            Err(DecomposeError::ExceptionalFunction(_))
        ));
    }

    #[test]
    fn default_partition_is_trivial_at_desk_scale() {
        let ctx = build_field(4099, 1).unwrap();
        let a =
            interval(&ctx, 1, 32)
                .unwrap()
                .union(&geometric_progression(&ctx, FieldElement(3), 32));
        let f = RationalFunction::inversion(&ctx);
        let r = partition(&ctx, &a, &f).unwrap();
        assert!(r.trivial);
        assert_eq!(r.s_final, a);
        assert!(r.t_final.is_empty());
        assert!(r.c1().is_finite() && r.c2().is_finite());
    }

    #[test]
    fn partition_with_override_runs_and_is_valid() {
        let ctx = build_field(4099, 1).unwrap();
        let a =
            interval(&ctx, 1, 32)
                .unwrap()
                .union(&geometric_progression(&ctx, FieldElement(3), 32));
        let f = RationalFunction::inversion(&ctx);
        let n = a.len() as f64;
        let m = 2.0 * n.powi(3) / additive_energy(&ctx, &a).value as f64;
        let r = partition_with(&ctx, &a, &f, &ThresholdParams::with_m(m)).unwrap();
        assert!(!r.trivial);
        assert!(!r.iterations.is_empty() && r.iterations.len() <= a.len());
        assert!(r.s_final.is_disjoint(&r.t_final));
        assert_eq!(r.s_final.union(&r.t_final), a);
        assert!(r.s_energy as f64 <= r.threshold);
        assert!(r.f_t_energy as f64 <= r.aggregate_bound * (1.0 + 1e-12));
        for (i, p) in r.pieces.iter().enumerate() {
            for q in &r.pieces[i + 1..] {
                assert!(p.is_disjoint(q));
            }
        }
    }

    #[test]
    fn immediate_termination_when_energy_is_low() {
        let ctx = build_field(1009, 1).unwrap();
        let a = random_subset(&ctx, 60, 5).unwrap();
        let f = RationalFunction::inversion(&ctx);
        let e = additive_energy(&ctx, &a).value as f64;
        // threshold = 2 E(A): nothing to do
        let m = (60f64).powi(3) / (2.0 * e);
        let r = partition_with(&ctx, &a, &f, &ThresholdParams::with_m(m)).unwrap();
        assert!(!r.trivial);
        assert!(r.iterations.is_empty());
        assert_eq!(r.s_final, a);
        assert!(r.t_final.is_empty());
    }

    #[test]
    fn whole_field_terminates() {
        let ctx = build_field(101, 1).unwrap();
        let a = FSubset::whole_field(&ctx);
        let f = RationalFunction::inversion(&ctx);
        for params in [ThresholdParams::default(), ThresholdParams::with_m(50.0)] {
            let r = partition_with(&ctx, &a, &f, &params).unwrap();
            assert!(r.iterations.len() <= a.len());
            assert_eq!(r.s_final.union(&r.t_final), a);
            assert!(r.s_final.is_disjoint(&r.t_final));
        }
    }

    #[test]
    fn partition_rejects_exceptional() {
        let ctx = build_field(5, 1).unwrap();
        let f = RationalFunction::parse(&ctx, "1,2,0,0,0,1").unwrap();
        let a = FSubset::whole_field(&ctx);
        assert_eq!(
            partition(&ctx, &a, &f),
            Err(DecomposeError::ExceptionalFunction(FieldElement(3)))
        );
    }
}
