//! Browser demo. Each operation takes plain arguments, returns JSON, and has
//! a native twin so it can be tested without a browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use bwdecomp::characters::{AdditiveCharacter, AdditiveTable};
use bwdecomp::decompose::{partition_with, ThresholdParams};
use bwdecomp::energy::{additive_energy, rep_sum};
use bwdecomp::ratfunc::is_exceptional;
use bwdecomp::setspec::parse_set;
use bwdecomp::{FSubset, FieldCtx, RationalFunction};

#[derive(Serialize)]
struct Piece {
    size: usize,
    v_size: usize,
    v_energy: u64,
    f_energy: u64,
    guarded: bool,
}

#[derive(Serialize)]
struct Decomposition {
    a: Vec<u32>,
    s: Vec<u32>,
    t: Vec<u32>,
    m: f64,
    threshold: f64,
    trivial: bool,
    s_energy: u64,
    f_t_energy: u64,
    a_energy: u64,
    pieces: Vec<Piece>,
}

#[derive(Serialize)]
struct SumPath {
    /// Partial sums after each term, ordered by (a, b, c).
    re: Vec<f64>,
    im: Vec<f64>,
    magnitude: f64,
    bound: f64,
}

#[derive(Serialize)]
struct Histogram {
    size: usize,
    energy: u64,
    /// counts[r] = #{x : r_{A,A}(x) = r}, r >= 1.
    counts: Vec<u64>,
}

fn field(p: u32, n: u32) -> Result<FieldCtx, String> {
    FieldCtx::new(u64::from(p), n).map_err(|e| e.to_string())
}

fn set(ctx: &FieldCtx, spec: &str) -> Result<FSubset, String> {
    parse_set(ctx, spec).map_err(|e| e.to_string())
}

fn ids(s: &FSubset) -> Vec<u32> {
    s.iter().map(|x| x.0).collect()
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Partition of `spec` for `function`. A non-positive `m` keeps the
/// default M(A); the page passes 2A^3/E(A) to force a non-trivial split.
pub fn decompose_json(
    p: u32,
    n: u32,
    spec: &str,
    function: &str,
    m: f64,
) -> Result<String, String> {
    let ctx = field(p, n)?;
    let a = set(&ctx, spec)?;
    let f = RationalFunction::parse(&ctx, function).map_err(|e| e.to_string())?;
    if let Some(l) = is_exceptional(&ctx, &f).map_err(|e| e.to_string())? {
        return Err(format!("{f} is of the excluded form (lambda = {l})"));
    }
    let params = if m > 0.0 {
        ThresholdParams::with_m(m)
    } else {
        ThresholdParams::default()
    };
    let r = partition_with(&ctx, &a, &f, &params).map_err(|e| e.to_string())?;
    json(&Decomposition {
        a: ids(&a),
        s: ids(&r.s_final),
        t: ids(&r.t_final),
        m: r.m_value,
        threshold: r.threshold,
        trivial: r.trivial,
        s_energy: r.s_energy,
        f_t_energy: r.f_t_energy,
        a_energy: additive_energy(&ctx, &a).value,
        pieces: r
            .iterations
            .iter()
            .map(|it| Piece {
                size: it.piece_size,
                v_size: it.v_size,
                v_energy: it.v_energy,
                f_energy: it.piece_f_energy,
                guarded: it.guarded,
            })
            .collect(),
    })
}

/// Partial sums of psi_a(xy + xz + yz) over A x B x C, capped at `max_terms`.
pub fn charsum_path_json(
    p: u32,
    n: u32,
    specs: [&str; 3],
    psi: u32,
    max_terms: usize,
) -> Result<String, String> {
    let ctx = field(p, n)?;
    let [a, b, c] = specs.map(|s| set(&ctx, s));
    let (a, b, c) = (a?, b?, c?);
    if psi == 0 || psi >= ctx.q() {
        return Err(format!("psi index must lie in 1..{}", ctx.q()));
    }
    let table = AdditiveTable::new(&ctx, AdditiveCharacter::new(bwdecomp::FieldElement(psi)));
    let (mut re, mut im) = (Vec::new(), Vec::new());
    let (mut sr, mut si) = (0.0f64, 0.0f64);
    'outer: for x in a.iter() {
        for y in b.iter() {
            for z in c.iter() {
                if re.len() == max_terms {
                    break 'outer;
                }
                let t = ctx.add(ctx.add(ctx.mul(x, y), ctx.mul(x, z)), ctx.mul(y, z));
                let v = table.eval(t);
                sr += v.re;
                si += v.im;
                re.push(sr);
                im.push(si);
            }
        }
    }
    let bound = a.len() as f64 * ((b.len() * c.len()) as f64 * f64::from(ctx.q())).sqrt();
    json(&SumPath {
        magnitude: sr.hypot(si),
        re,
        im,
        bound,
    })
}

/// Distribution of r_{A,A}(x) over A + A.
pub fn energy_histogram_json(p: u32, n: u32, spec: &str) -> Result<String, String> {
    let ctx = field(p, n)?;
    let a = set(&ctx, spec)?;
    let reps = rep_sum(&ctx, &a, &a);
    let mut counts = vec![0u64; a.len() + 1];
    for x in reps.support() {
        counts[reps.get(x) as usize] += 1;
    }
    json(&Histogram {
        size: a.len(),
        energy: reps.sum_of_squares(),
        counts,
    })
}

#[wasm_bindgen]
pub fn decompose(p: u32, n: u32, spec: &str, function: &str, m: f64) -> Result<String, JsValue> {
    decompose_json(p, n, spec, function, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn charsum_path(
    p: u32,
    n: u32,
    a: &str,
    b: &str,
    c: &str,
    psi: u32,
    max_terms: usize,
) -> Result<String, JsValue> {
    charsum_path_json(p, n, [a, b, c], psi, max_terms).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn energy_histogram(p: u32, n: u32, spec: &str) -> Result<String, JsValue> {
    energy_histogram_json(p, n, spec).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: Result<String, String>) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn decompose_splits_the_set() {
        let v = parse(decompose_json(257, 1, "rand:60,3", "1/0,1", 20.0));
        let (s, t, a) = (
            v["s"].as_array().unwrap(),
            v["t"].as_array().unwrap(),
            v["a"].as_array().unwrap(),
        );
        assert_eq!(s.len() + t.len(), a.len());
        assert_eq!(v["trivial"], false);
        let v = parse(decompose_json(257, 1, "rand:60,3", "1/0,1", 0.0));
        assert_eq!(v["trivial"], true);
        assert!(decompose_json(7, 1, "all", "1,2,0,0,0,0,0,1", 0.0).is_err());
        assert!(decompose_json(10, 1, "all", "1/0,1", 0.0).is_err());
    }

    #[test]
    fn path_ends_at_the_sum() {
        let v = parse(charsum_path_json(
            101,
            1,
            ["interval:1,4", "interval:1,3", "list:5"],
            1,
            1000,
        ));
        assert_eq!(v["re"].as_array().unwrap().len(), 12);
        let last = (v["re"][11].as_f64().unwrap(), v["im"][11].as_f64().unwrap());
        let m = v["magnitude"].as_f64().unwrap();
        assert!((last.0.hypot(last.1) - m).abs() < 1e-12);
        let v = parse(charsum_path_json(101, 1, ["all", "all", "all"], 1, 50));
        assert_eq!(v["re"].as_array().unwrap().len(), 50);
        assert!(charsum_path_json(101, 1, ["all", "all", "all"], 0, 5).is_err());
    }

    #[test]
    fn histogram_of_a_progression() {
        // {0..3}: sums 0..6 with counts 1,2,3,4,3,2,1
        let v = parse(energy_histogram_json(1009, 1, "interval:0,4"));
        assert_eq!(v["energy"], 44);
        let counts: Vec<u64> = v["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_u64().unwrap())
            .collect();
        assert_eq!(counts, [0, 2, 2, 2, 1]);
    }
}
