use thiserror::Error;

use crate::ledger::{TxEvent, TxState};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{requested} C-UEs requested but admission capacity is {capacity}")]
    Capacity { requested: usize, capacity: usize },

    #[error("instance has {n} items, exhaustive search supports at most {max}")]
    Size { n: usize, max: usize },

    #[error("relaxation is infeasible (capacity {capacity} < 0)")]
    InfeasibleRelaxation { capacity: f64 },

    #[error(
        "SDP did not converge in {iterations} iterations \
         (primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e})"
    )]
    Convergence {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
    },

    #[error("slot {ts}, C-UE {cue}: {source}")]
    Allocation {
        ts: usize,
        cue: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("illegal transition: {event:?} in state {state:?}")]
    State { state: TxState, event: TxEvent },

    #[error("unknown transaction {0}")]
    UnknownTransaction(u64),

    #[error("config: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for solver non-convergence, including when wrapped with slot context.
    pub fn is_convergence(&self) -> bool {
        match self {
            Error::Convergence { .. } => true,
            Error::Allocation { source, .. } => source.is_convergence(),
            _ => false,
        }
    }
}
