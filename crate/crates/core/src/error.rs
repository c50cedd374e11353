use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("SCA seed r = {seed} is infeasible (gap = {gap})")]
    InfeasibleSeed { seed: f64, gap: f64 },

    #[error("SCA did not converge within {iterations} iterations (last r = {last})")]
    NotConverged { iterations: usize, last: f64 },

    #[error("upper bracket for r_max exceeded {limit:e} at snr = {snr}")]
    BracketOverflow { snr: f64, limit: f64 },

    #[error("SCA {bound} = {sca} disagrees with oracle {oracle} at snr = {snr}")]
    OracleMismatch {
        snr: f64,
        bound: &'static str,
        sca: f64,
        oracle: f64,
    },

    #[error("pairing plan does not match the user set: {0}")]
    InconsistentPlan(String),

    #[error("invalid plan line {line}: {text:?}")]
    PlanSyntax { line: usize, text: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("failed to parse config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
