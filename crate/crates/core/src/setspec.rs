//! The set-spec mini-language used by the CLI, configs and the web demo.
//!
//! ```text
//! spec := interval:start,len | gp:base,len | msub:d | asub:b1;b2;...
//!       | rand:size,seed | garaev:lambda | list:x1;x2;... | all
//!       | inv(spec) | union(spec,spec) | image(ratfn,spec)
//! ```
//!
//! `ratfn` uses the coefficient syntax of [`RationalFunction::parse`]. Inside
//! `union(..)` and `image(..)` the argument break is the first top-level comma
//! followed by a letter, which never occurs inside a coefficient list.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::field::{FieldCtx, FieldError};
use crate::ratfunc::{apply_to_set, RatFuncError, RationalFunction};
use crate::sets::{
    add_subspace, garaev_set, geometric_progression, interval, inverse_set, mult_subgroup,
    random_subset, FSubset, SetError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetSpecError {
    #[error("bad set spec {input:?}: {reason}")]
    Syntax { input: String, reason: String },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    Interval { start: u64, len: u64 },
    Gp { base: u64, len: u64 },
    MSub(u64),
    ASub(Vec<u64>),
    Rand { size: u64, seed: u64 },
    Garaev(u64),
    List(Vec<u64>),
    All,
    Inv(Box<SetSpec>),
    Union(Box<SetSpec>, Box<SetSpec>),
    Image(String, Box<SetSpec>),
}

fn syntax(input: &str, reason: impl Into<String>) -> SetSpecError {
    SetSpecError::Syntax {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn numbers(
    input: &str,
    body: &str,
    sep: char,
    want: Option<usize>,
) -> Result<Vec<u64>, SetSpecError> {
    let vals = body
        .split(sep)
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| syntax(input, format!("expected an integer, got {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(n) = want {
        if vals.len() != n {
            return Err(syntax(
                input,
                format!("expected {n} arguments, got {}", vals.len()),
            ));
        }
    }
    Ok(vals)
}

/// Splits `a,b` at the first depth-0 comma followed by a letter.
fn split_args<'a>(input: &str, body: &'a str) -> Result<(&'a str, &'a str), SetSpecError> {
    let bytes = body.as_bytes();
    let mut depth = 0i32;
    for (i, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b',' if depth == 0 && bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphabetic()) => {
                return Ok((&body[..i], &body[i + 1..]));
            }
            _ => {}
        }
    }
    Err(syntax(input, "expected two arguments"))
}

impl FromStr for SetSpec {
    type Err = SetSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "all" {
            return Ok(SetSpec::All);
        }
        if let Some(open) = s.find('(') {
            let name = &s[..open];
            let body = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| syntax(s, "missing closing parenthesis"))?;
            return match name {
                "inv" => Ok(SetSpec::Inv(Box::new(body.parse()?))),
                "union" => {
                    let (l, r) = split_args(s, body)?;
                    Ok(SetSpec::Union(Box::new(l.parse()?), Box::new(r.parse()?)))
                }
                "image" => {
                    let (f, r) = split_args(s, body)?;
                    Ok(SetSpec::Image(f.trim().to_string(), Box::new(r.parse()?)))
                }
                _ => Err(syntax(s, format!("unknown combinator {name:?}"))),
            };
        }
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| syntax(s, "expected kind:arguments"))?;
        match kind {
            "interval" => {
                let v = numbers(s, body, ',', Some(2))?;
                Ok(SetSpec::Interval {
                    start: v[0],
                    len: v[1],
                })
            }
            "gp" => {
                let v = numbers(s, body, ',', Some(2))?;
                Ok(SetSpec::Gp {
                    base: v[0],
                    len: v[1],
                })
            }
            "msub" => Ok(SetSpec::MSub(numbers(s, body, ',', Some(1))?[0])),
            "asub" => Ok(SetSpec::ASub(numbers(s, body, ';', None)?)),
            "rand" => {
                let v = numbers(s, body, ',', Some(2))?;
                Ok(SetSpec::Rand {
                    size: v[0],
                    seed: v[1],
                })
            }
            "garaev" => Ok(SetSpec::Garaev(numbers(s, body, ',', Some(1))?[0])),
            "list" if body.trim().is_empty() => Ok(SetSpec::List(Vec::new())),
            "list" => Ok(SetSpec::List(numbers(s, body, ';', None)?)),
            _ => Err(syntax(s, format!("unknown set kind {kind:?}"))),
        }
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
        match self {
            SetSpec::Interval { start, len } => write!(f, "interval:{start},{len}"),
            SetSpec::Gp { base, len } => write!(f, "gp:{base},{len}"),
            SetSpec::MSub(d) => write!(f, "msub:{d}"),
            SetSpec::ASub(b) => write!(f, "asub:{}", join(b)),
            SetSpec::Rand { size, seed } => write!(f, "rand:{size},{seed}"),
            SetSpec::Garaev(l) => write!(f, "garaev:{l}"),
            SetSpec::List(v) => write!(f, "list:{}", join(v)),
            SetSpec::All => write!(f, "all"),
            SetSpec::Inv(s) => write!(f, "inv({s})"),
            SetSpec::Union(a, b) => write!(f, "union({a},{b})"),
            SetSpec::Image(r, s) => write!(f, "image({r},{s})"),
        }
    }
}

impl SetSpec {
    pub fn build(&self, ctx: &FieldCtx) -> Result<FSubset, SetSpecError> {
        let elems = |v: &[u64]| {
            v.iter()
                .map(|&x| ctx.element(x))
                .collect::<Result<Vec<_>, _>>()
        };
        Ok(match self {
            SetSpec::Interval { start, len } => interval(ctx, *start, *len)?,
            SetSpec::Gp { base, len } => geometric_progression(ctx, ctx.element(*base)?, *len),
            SetSpec::MSub(d) => mult_subgroup(ctx, *d)?,
            SetSpec::ASub(b) => add_subspace(ctx, &elems(b)?),
            SetSpec::Rand { size, seed } => random_subset(ctx, *size, *seed)?,
            SetSpec::Garaev(l) => garaev_set(ctx, *l)?.set,
            SetSpec::List(v) => FSubset::new(ctx.q(), elems(v)?),
            SetSpec::All => FSubset::whole_field(ctx),
            SetSpec::Inv(s) => inverse_set(ctx, &s.build(ctx)?),
            SetSpec::Union(a, b) => a.build(ctx)?.union(&b.build(ctx)?),
            SetSpec::Image(r, s) => {
                let f = RationalFunction::parse(ctx, r)?;
                apply_to_set(ctx, &f, &s.build(ctx)?).set
            }
        })
    }
}

/// Parses and builds in one step.
pub fn parse_set(ctx: &FieldCtx, spec: &str) -> Result<FSubset, SetSpecError> {
    spec.parse::<SetSpec>()?.build(ctx)
}
