use thiserror::Error;

/// Errors shared across the laboratory modules.
#[derive(Debug, Error)]
pub enum QcfError {
    /// The float backend could not certify a sign/zero decision at the
    /// maximum allowed precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// A symbolic expansion passed the configured degree/term budget.
    #[error("expansion budget exceeded: {0}")]
    BudgetExceeded(String),

    /// det M = 0 — some partial numerator vanished at this root.
    #[error("degenerate period block at m={m}, r={r}: det M = 0")]
    DegenerateBlock { m: u64, r: u64 },

    /// A built-in family failed its tabulated closed form.
    #[error("table mismatch for {family} at m={m}, r={r}, field {field}")]
    TableMismatch {
        family: String,
        m: u64,
        r: u64,
        field: String,
    },

    /// Congruence steering found no admissible partial quotient.
    #[error("steering failed at stage {stage}: reachable residue pairs {reachable:?}")]
    SteeringFailed { stage: u32, reachable: Vec<(u32, u32)> },

    /// Tower levels beyond 3 are not materializable.
    #[error("tower level {0} too large (hard cap 3)")]
    LevelTooLarge(u32),

    /// H(q) = q^eta/G(q) is undefined: G vanished or diverged.
    #[error("H undefined at m={m}, r={r}: {reason}")]
    UndefinedH { m: u64, r: u64, reason: String },

    /// Moebius evaluation hit 0/0.
    #[error("indeterminate Moebius evaluation (0/0)")]
    Indeterminate,

    /// The witness needs at least one feasible stage per residue class.
    #[error("insufficient stages for witness: {0}")]
    InsufficientStages(String),

    /// A per-stage recurrence run would exceed the index budget.
    #[error("index budget exceeded: stage needs {needed} steps, budget {budget}")]
    IndexBudgetExceeded { needed: u64, budget: u64 },

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QcfError>;
