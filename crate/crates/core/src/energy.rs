//! Representation counts and exact additive, multiplicative and cross energies.
//!
//! Everything is integer-valued and computed from O(|U||V|) representation
//! maps over a dense counter of length q.

use std::collections::BTreeMap;

use crate::field::{FieldCtx, FieldElement};
use crate::ratfunc::{apply_to_set, RationalFunction};
use crate::sets::FSubset;

/// x -> number of representations, zero entries omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepCounts {
    pub counts: BTreeMap<FieldElement, u64>,
    pub total: u64,
}

impl RepCounts {
    fn from_dense(dense: &[u32]) -> Self {
        let counts: BTreeMap<FieldElement, u64> = dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (FieldElement(i as u32), u64::from(c)))
            .collect();
        let total = counts.values().sum();
        RepCounts { counts, total }
    }

    pub fn get(&self, x: FieldElement) -> u64 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.counts.keys().copied()
    }

    pub fn sum_of_squares(&self) -> u64 {
        self.counts.values().map(|c| c * c).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyKind {
    Additive,
    Multiplicative,
    Cross,
    /// Additive energy of an image set f(U).
    FEnergy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyReport {
    pub value: u64,
    pub kind: EnergyKind,
    /// Sizes of the operand sets, in argument order.
    pub operands: Vec<usize>,
}

pub(crate) fn dense_sum(ctx: &FieldCtx, u: &FSubset, v: &FSubset) -> Vec<u32> {
    let mut dense = vec![0u32; ctx.q() as usize];
    for a in u.iter() {
        for b in v.iter() {
            dense[ctx.add(a, b).0 as usize] += 1;
        }
    }
    dense
}

pub(crate) fn dense_diff(ctx: &FieldCtx, u: &FSubset, v: &FSubset) -> Vec<u32> {
    let mut dense = vec![0u32; ctx.q() as usize];
    let negv: Vec<FieldElement> = v.iter().map(|b| ctx.neg(b)).collect();
    for a in u.iter() {
        for &nb in &negv {
            dense[ctx.add(a, nb).0 as usize] += 1;
        }
    }
    dense
}

fn square_sum(dense: &[u32]) -> u64 {
    dense.iter().map(|&c| u64::from(c) * u64::from(c)).sum()
}

/// r_{U,V}(x) = #{(u, v) : u + v = x}.
pub fn rep_sum(ctx: &FieldCtx, u: &FSubset, v: &FSubset) -> RepCounts {
    RepCounts::from_dense(&dense_sum(ctx, u, v))
}

/// r_{U,-V}(x) = #{(u, v) : u - v = x}.
pub fn rep_diff(ctx: &FieldCtx, u: &FSubset, v: &FSubset) -> RepCounts {
    RepCounts::from_dense(&dense_diff(ctx, u, v))
}

/// r_U(f; x) = #{(u, v) in U^2 : f(u) + f(v) = x}, pole pairs skipped.
pub fn rep_f(ctx: &FieldCtx, f: &RationalFunction, u: &FSubset) -> RepCounts {
    let values: Vec<FieldElement> = u.iter().filter_map(|x| f.eval(ctx, x)).collect();
    let mut dense = vec![0u32; ctx.q() as usize];
    for &a in &values {
        for &b in &values {
            dense[ctx.add(a, b).0 as usize] += 1;
        }
    }
    RepCounts::from_dense(&dense)
}

/// r_{S,-A}(x) for a single x: #{a in A : x + a in S}.
pub fn richness(ctx: &FieldCtx, s: &FSubset, a: &FSubset, x: FieldElement) -> u64 {
    a.iter().filter(|&y| s.contains(ctx.add(x, y))).count() as u64
}

/// E(U) = #{u1 + u2 = u3 + u4}.
pub fn additive_energy(ctx: &FieldCtx, u: &FSubset) -> EnergyReport {
    EnergyReport {
        value: square_sum(&dense_diff(ctx, u, u)),
        kind: EnergyKind::Additive,
        operands: vec![u.len()],
    }
}

/// E(B, C) = #{b1 + c1 = b2 + c2}.
pub fn cross_energy(ctx: &FieldCtx, b: &FSubset, c: &FSubset) -> EnergyReport {
    let rb = dense_diff(ctx, b, b);
    let rc = dense_diff(ctx, c, c);
    EnergyReport {
        value: rb
            .iter()
            .zip(&rc)
            .map(|(&x, &y)| u64::from(x) * u64::from(y))
            .sum(),
        kind: EnergyKind::Cross,
        operands: vec![b.len(), c.len()],
    }
}

/// E^x(U) = #{u1 u2 = u3 u4}, quadruples containing zero counted literally.
pub fn multiplicative_energy(ctx: &FieldCtx, u: &FSubset) -> EnergyReport {
    let mut dense = vec![0u32; ctx.q() as usize];
    for a in u.iter() {
        for b in u.iter() {
            dense[ctx.mul(a, b).0 as usize] += 1;
        }
    }
    EnergyReport {
        value: square_sum(&dense),
        kind: EnergyKind::Multiplicative,
        operands: vec![u.len()],
    }
}

/// E(f(U)), the additive energy of the image set.
pub fn f_energy(ctx: &FieldCtx, f: &RationalFunction, u: &FSubset) -> EnergyReport {
    let image = apply_to_set(ctx, f, u).set;
    EnergyReport {
        value: additive_energy(ctx, &image).value,
        kind: EnergyKind::FEnergy,
        operands: vec![u.len()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use crate::sets::{interval, mult_subgroup};

    fn set(q: u32, xs: &[u32]) -> FSubset {
        FSubset::new(q, xs.iter().map(|&x| FieldElement(x)))
    }

    /// Literal quadruple count.
    fn quartic<F: Fn(FieldElement, FieldElement) -> FieldElement>(u: &FSubset, op: F) -> u64 {
        let mut n = 0;
        for a in u.iter() {
            for b in u.iter() {
                for c in u.iter() {
                    for d in u.iter() {
                        if op(a, b) == op(c, d) {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn rep_counts() {
        let gf5 = build_field(5, 1).unwrap();
        let zero = set(5, &[0]);
        assert_eq!(
            rep_sum(&gf5, &zero, &zero).counts,
            BTreeMap::from([(FieldElement(0), 1)])
        );
        let r = rep_sum(&gf5, &set(5, &[1, 2]), &set(5, &[3]));
        assert_eq!(
            r.counts,
            BTreeMap::from([(FieldElement(4), 1), (FieldElement(0), 1)])
        );
        let all = FSubset::whole_field(&gf5);
        let r = rep_sum(&gf5, &all, &all);
        assert!(gf5.elements().all(|x| r.get(x) == 5));
        assert_eq!(r.total, 25);
    }

    #[test]
    fn rep_sum_small_prime() {
        // {1,2} + {3} in GF(7) gives 4 and 5
        let gf7 = build_field(7, 1).unwrap();
        let r = rep_sum(&gf7, &set(7, &[1, 2]), &set(7, &[3]));
        assert_eq!(
            r.counts,
            BTreeMap::from([(FieldElement(4), 1), (FieldElement(5), 1)])
        );
    }

    #[test]
    fn rep_diff_counts() {
        let gf7 = build_field(7, 1).unwrap();
        let u = set(7, &[1, 3, 4]);
        assert_eq!(rep_diff(&gf7, &u, &u).get(FieldElement(0)), 3);
        let r = rep_diff(&gf7, &set(7, &[5]), &set(7, &[2]));
        assert_eq!(r.counts, BTreeMap::from([(FieldElement(3), 1)]));
        let all = FSubset::whole_field(&gf7);
        let r = rep_diff(&gf7, &all, &all);
        assert!(gf7.elements().all(|x| r.get(x) == 7));
    }

    #[test]
    fn rep_f_cases() {
        let gf7 = build_field(7, 1).unwrap();
        let id = RationalFunction::identity(&gf7);
        assert_eq!(
            rep_f(&gf7, &id, &set(7, &[1])).counts,
            BTreeMap::from([(FieldElement(2), 1)])
        );
        let inv = RationalFunction::inversion(&gf7);
        assert!(rep_f(&gf7, &inv, &set(7, &[0])).counts.is_empty());
        let sq = RationalFunction::parse(&gf7, "0,0,1").unwrap();
        assert_eq!(
            rep_f(&gf7, &sq, &set(7, &[1, 6])).counts,
            BTreeMap::from([(FieldElement(2), 4)])
        );
    }

    #[test]
    fn additive_energy_values() {
        let gf5 = build_field(5, 1).unwrap();
        assert_eq!(
            additive_energy(&gf5, &FSubset::whole_field(&gf5)).value,
            125
        );
        let gf17 = build_field(17, 1).unwrap();
        let iv = interval(&gf17, 0, 4).unwrap();
        let e = additive_energy(&gf17, &iv).value;
        assert_eq!(e, quartic(&iv, |a, b| gf17.add(a, b)));
        assert_eq!(e, 44);
        assert_eq!(additive_energy(&gf17, &set(17, &[9])).value, 1);
    }

    #[test]
    fn cross_energy_values() {
        let gf5 = build_field(5, 1).unwrap();
        let all = FSubset::whole_field(&gf5);
        assert_eq!(cross_energy(&gf5, &all, &all).value, 125);
        let gf11 = build_field(11, 1).unwrap();
        let b = set(11, &[1, 2, 7]);
        assert_eq!(
            cross_energy(&gf11, &b, &b).value,
            additive_energy(&gf11, &b).value
        );
        let c = set(11, &[0, 3, 4, 9]);
        assert_eq!(cross_energy(&gf11, &set(11, &[0]), &c).value, 4);
    }

    #[test]
    fn multiplicative_energy_values() {
        let gf13 = build_field(13, 1).unwrap();
        for d in [1u64, 2, 3, 4, 6, 12] {
            let h = mult_subgroup(&gf13, d).unwrap();
            let e = multiplicative_energy(&gf13, &h).value;
            assert_eq!(e, quartic(&h, |a, b| gf13.mul(a, b)));
            assert_eq!(e, d * d * d);
        }
        assert_eq!(multiplicative_energy(&gf13, &set(13, &[1])).value, 1);
        let zero_one = set(13, &[0, 1]);
        let e = multiplicative_energy(&gf13, &zero_one).value;
        assert_eq!(e, quartic(&zero_one, |a, b| gf13.mul(a, b)));
        assert_eq!(e, 10);
    }

    #[test]
    fn richness_matches_rep_diff() {
        let gf31 = build_field(31, 1).unwrap();
        let s = set(31, &[2, 5, 9, 14, 20]);
        let a = set(31, &[1, 3, 4, 8, 30]);
        let r = rep_diff(&gf31, &s, &a);
        for x in gf31.elements() {
            assert_eq!(richness(&gf31, &s, &a, x), r.get(x));
        }
    }
}
