use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter lies outside the domain an operation accepts.
    #[error("parameter out of domain: {name} = {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A waveform metric could not be extracted (no crossing, never settles).
    #[error("measurement failed: {0}")]
    Measurement(String),

    /// The magnet did not complete a write or reset within its clock phase.
    #[error("link failure in cycle {cycle}: {what} (m_x = {mx:.4} at t = {t_ps:.1} ps)")]
    LinkFailure {
        cycle: usize,
        what: &'static str,
        mx: f64,
        t_ps: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}
