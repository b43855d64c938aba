use std::io::Write;
use std::path::Path;

use super::HarnessError;

pub const CSV_HEADER: [&str; 7] = [
    "suite",
    "instance",
    "lhs",
    "rhs",
    "ratio",
    "pass",
    "runtime_ms",
];

/// One checked inequality or equality.
///
/// Hard records assert an exact statement and fail the run when `pass` is
/// false. Report-only records measure a constant and always pass.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationRecord {
    pub suite: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs / rhs when rhs > 0.
    pub ratio: Option<f64>,
    pub pass: bool,
    pub runtime_ms: f64,
    pub hard: bool,
}

impl VerificationRecord {
    pub fn hard(suite: &str, instance: impl Into<String>, lhs: f64, rhs: f64, pass: bool) -> Self {
        VerificationRecord {
            suite: suite.to_string(),
            instance: instance.into(),
            lhs,
            rhs,
            ratio: (rhs > 0.0).then(|| lhs / rhs),
            pass,
            runtime_ms: 0.0,
            hard: true,
        }
    }

    /// Hard check of lhs <= rhs + tol.
    pub fn at_most(suite: &str, instance: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::hard(suite, instance, lhs, rhs, lhs <= rhs + tol)
    }

    pub fn report(suite: &str, instance: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        VerificationRecord {
            hard: false,
            ..Self::hard(suite, instance, lhs, rhs, true)
        }
    }

    pub fn failed(&self) -> bool {
        self.hard && !self.pass
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside [1e-4, 1e12).
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[VerificationRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.suite.as_str(),
            r.instance.as_str(),
            &format_g(r.lhs),
            &format_g(r.rhs),
            &r.ratio.map(format_g).unwrap_or_default(),
            if r.pass { "true" } else { "false" },
            &format_g(r.runtime_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[VerificationRecord], path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path)?;
    write_csv(records, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (44.0, "44"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0f64.sqrt() * 1e6, "1414213.56237"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (0.9999999999999, "1"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g(x), s, "{x}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "suite,instance,lhs,rhs,ratio,pass,runtime_ms\n"
        );
        let r = VerificationRecord::hard("lemmas", "q=5, n=1", 3.0, 4.0, true);
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "lemmas,\"q=5, n=1\",3,4,0.75,true,0"
        );
        let r = VerificationRecord::report("x", "y", 0.0, 0.0);
        assert_eq!(r.ratio, None);
        assert!(r.pass && !r.failed());
    }
}
