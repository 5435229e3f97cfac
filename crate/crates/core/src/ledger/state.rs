use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TxState {
    Requested,
    Approved,
    Active,
    Ended,
    ClearedFull,
    ClearedPartial,
    Packaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TxEvent {
    Approve,
    Activate(u64),
    End(u64),
    ClearFull,
    ClearPartial,
    TopUp,
    Package,
}

impl TxState {
    pub const ALL: [TxState; 7] = [
        TxState::Requested,
        TxState::Approved,
        TxState::Active,
        TxState::Ended,
        TxState::ClearedFull,
        TxState::ClearedPartial,
        TxState::Packaged,
    ];

    /// The state reached by `event`, or a state error if the pair is illegal.
    pub fn next(self, event: TxEvent) -> Result<TxState> {
        use TxEvent as E;
        use TxState as S;
        let to = match (self, event) {
            (S::Requested, E::Approve) => S::Approved,
            (S::Approved, E::Activate(_)) => S::Active,
            (S::Active, E::End(_)) => S::Ended,
            (S::Ended, E::ClearFull) => S::ClearedFull,
            (S::Ended, E::ClearPartial) => S::ClearedPartial,
            (S::ClearedPartial, E::TopUp) => S::ClearedFull,
            (S::ClearedFull, E::Package) => S::Packaged,
            (state, event) => return Err(Error::State { state, event }),
        };
        Ok(to)
    }

    pub fn is_cleared(self) -> bool {
        matches!(self, TxState::ClearedFull | TxState::ClearedPartial | TxState::Packaged)
    }
}
