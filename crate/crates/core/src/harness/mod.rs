//! Verification suites, experiment configs and CSV output.
//!
//! Every suite produces [`VerificationRecord`]s. Hard records assert an exact
//! statement; report-only records measure the implied constant of an
//! asymptotic bound. A run fails when any hard record fails.

mod config;
mod lemmas;
mod record;
mod suites;

use thiserror::Error;

pub use config::{ExperimentConfig, FieldSpec};
pub use lemmas::{prodsum_count, verify_lemma_prodsum, verify_lemma_rich, verify_union_energy};
pub use record::{emit_csv, format_g, write_csv, VerificationRecord, CSV_HEADER};
pub use suites::STOCK_Q;

use crate::charsums::CharSumError;
use crate::decompose::DecomposeError;
use crate::field::FieldError;
use crate::ratfunc::RatFuncError;
use crate::sets::SetError;
use crate::setspec::SetSpecError;

pub const SUITES: [&str; 9] = [
    "field-axioms",
    "characters",
    "energy-oracle",
    "ratfunc",
    "extraction",
    "partition",
    "charsum-bounds",
    "lemmas",
    "constructions",
];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at {key}: {reason}")]
    Config { key: String, reason: String },
    #[error("precondition not met: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    SetSpec(#[from] SetSpecError),
    #[error(transparent)]
    RatFunc(#[from] RatFuncError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    CharSum(#[from] CharSumError),
}

impl HarnessError {
    /// Configuration problems map to exit code 2; everything else is a
    /// failure of the run itself.
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub suite: String,
    pub records: usize,
    pub hard_failures: usize,
    /// Largest finite ratio among report-only records.
    pub max_ratio: Option<f64>,
}

impl SuiteSummary {
    fn of(suite: &str, records: &[VerificationRecord]) -> Self {
        SuiteSummary {
            suite: suite.to_string(),
            records: records.len(),
            hard_failures: records.iter().filter(|r| r.failed()).count(),
            max_ratio: records
                .iter()
                .filter(|r| !r.hard)
                .filter_map(|r| r.ratio)
                .filter(|r| r.is_finite())
                .reduce(f64::max),
        }
    }
}

/// Runs one suite against the config's field and parameters.
pub fn run_suite(
    name: &str,
    cfg: &ExperimentConfig,
) -> Result<Vec<VerificationRecord>, HarnessError> {
    let Some(&name) = SUITES.iter().find(|&&s| s == name) else {
        return Err(HarnessError::Config {
            key: "suites".into(),
            reason: format!("unknown suite {name:?}"),
        });
    };
    let mut run = suites::SuiteRun::new(name, cfg)?;
    match name {
        "field-axioms" => suites::field_axioms(&mut run)?,
        "characters" => suites::characters(&mut run)?,
        "energy-oracle" => suites::energy_oracle(&mut run)?,
        "ratfunc" => suites::ratfunc(&mut run)?,
        "extraction" => suites::extraction(&mut run)?,
        "partition" => suites::partition(&mut run)?,
        "charsum-bounds" => suites::charsum_bounds(&mut run)?,
        "lemmas" => suites::lemmas(&mut run)?,
        "constructions" => suites::constructions(&mut run)?,
        _ => unreachable!("checked against SUITES"),
    }
    Ok(run.records)
}

/// Validates the config, runs its suites in order and writes the CSV when
/// an output path is set.
pub fn run_experiment(
    cfg: &ExperimentConfig,
) -> Result<(Vec<VerificationRecord>, Vec<SuiteSummary>), HarnessError> {
    cfg.validate()?;
    let mut all = Vec::new();
    let mut summaries = Vec::new();
    for name in &cfg.suites {
        let records = run_suite(name, cfg)?;
        summaries.push(SuiteSummary::of(name, &records));
        all.extend(records);
    }
    if let Some(path) = &cfg.output {
        emit_csv(&all, path)?;
    }
    Ok((all, summaries))
}
