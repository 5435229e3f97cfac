//! Reuse transactions: lifecycle, clearing into full and partial payment
//! pools, and packaging of fully paid transactions into a hash chain.

mod chain;
mod state;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use chain::{
    decode_any, decode_binary, decode_text, encode_binary, encode_text, verify_chain, Block,
    ChainReport, Digest32, CHAIN_MAGIC, CHAIN_VERSION, TEXT_FORMAT,
};
pub use state::{TxEvent, TxState};

use crate::economics::payment;
use crate::error::{Error, Result};

/// Starting balance of every D-UE account unless configured otherwise.
pub const DEFAULT_INITIAL_BALANCE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transaction {
    pub tx_id: u64,
    /// Paying D-UE.
    pub payer: usize,
    /// Paid C-UE.
    pub payee: usize,
    pub state: TxState,
    pub start_ts: u64,
    pub end_ts: u64,
    pub tip: f64,
    pub amount: f64,
    pub paid: f64,
}

impl Transaction {
    pub fn remaining(&self) -> f64 {
        self.amount - self.paid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    slot_s: f64,
    initial_balance: f64,
    next_id: u64,
    transactions: BTreeMap<u64, Transaction>,
    due_balance: BTreeMap<usize, f64>,
    cue_balance: BTreeMap<usize, f64>,
    full_pool: BTreeSet<u64>,
    partial_pool: BTreeSet<u64>,
    chain: Vec<Block>,
    debited: f64,
    credited: f64,
}

impl Ledger {
    pub fn new(slot_s: f64, initial_balance: f64) -> Result<Self> {
        if !(slot_s > 0.0) || !(initial_balance >= 0.0) {
            return Err(Error::Domain(format!(
                "ledger needs a positive slot and non-negative balance, got {slot_s}, {initial_balance}"
            )));
        }
        Ok(Self {
            slot_s,
            initial_balance,
            next_id: 0,
            transactions: BTreeMap::new(),
            due_balance: BTreeMap::new(),
            cue_balance: BTreeMap::new(),
            full_pool: BTreeSet::new(),
            partial_pool: BTreeSet::new(),
            chain: Vec::new(),
            debited: 0.0,
            credited: 0.0,
        })
    }

    /// A reuse request from `payer` to `payee` at tip rate `tip`.
    pub fn open_transaction(&mut self, payer: usize, payee: usize, tip: f64, ts: u64) -> Result<u64> {
        if !(tip >= 0.0 && tip.is_finite()) {
            return Err(Error::Domain(format!("tip rate must be non-negative, got {tip}")));
        }
        let tx_id = self.next_id;
        self.next_id += 1;
        self.transactions.insert(
            tx_id,
            Transaction {
                tx_id,
                payer,
                payee,
                state: TxState::Requested,
                start_ts: ts,
                end_ts: ts,
                tip,
                amount: 0.0,
                paid: 0.0,
            },
        );
        Ok(tx_id)
    }

    /// Apply a handshake or timer event. Clearing and packaging go through
    /// [`Ledger::clear`] and [`Ledger::package_block`].
    pub fn advance(&mut self, tx_id: u64, event: TxEvent) -> Result<&Transaction> {
        let slot_s = self.slot_s;
        let tx = self
            .transactions
            .get_mut(&tx_id)
            .ok_or(Error::UnknownTransaction(tx_id))?;
        let to = tx.state.next(event)?;
        match event {
            TxEvent::Approve => {}
            TxEvent::Activate(ts) => tx.start_ts = ts,
            TxEvent::End(ts) => {
                if ts < tx.start_ts {
                    return Err(Error::Domain(format!(
                        "transaction {tx_id} ends at slot {ts} before it started at {}",
                        tx.start_ts
                    )));
                }
                tx.end_ts = ts;
                tx.amount = payment((ts - tx.start_ts) as f64 * slot_s, tx.tip)?;
            }
            _ => return Err(Error::State { state: tx.state, event }),
        }
        tx.state = to;
        Ok(tx)
    }

    /// Settle an ended transaction, or top up a partially paid one, from the
    /// payer's balance. The payee is credited immediately.
    pub fn clear(&mut self, tx_id: u64) -> Result<&Transaction> {
        let tx = self
            .transactions
            .get(&tx_id)
            .ok_or(Error::UnknownTransaction(tx_id))?;
        let (payer, payee, remaining, state) = (tx.payer, tx.payee, tx.remaining(), tx.state);
        let balance = *self.due_balance.entry(payer).or_insert(self.initial_balance);
        let covers = balance >= remaining;
        let event = match (state, covers) {
            (TxState::Ended, true) => TxEvent::ClearFull,
            (TxState::Ended, false) => TxEvent::ClearPartial,
            (TxState::ClearedPartial, true) => TxEvent::TopUp,
            // A further partial payment leaves the state unchanged.
            (TxState::ClearedPartial, false) => TxEvent::ClearPartial,
            (state, _) => return Err(Error::State { state, event: TxEvent::ClearFull }),
        };
        let to = if state == TxState::ClearedPartial && !covers {
            state
        } else {
            state.next(event)?
        };
        let debit = remaining.min(balance).max(0.0);

        *self.due_balance.get_mut(&payer).expect("payer account") = balance - debit;
        *self.cue_balance.entry(payee).or_insert(0.0) += debit;
        self.debited += debit;
        self.credited += debit;

        let tx = self.transactions.get_mut(&tx_id).expect("transaction");
        if covers {
            tx.paid = tx.amount;
        } else {
            tx.paid += debit;
        }
        tx.state = to;
        self.partial_pool.remove(&tx_id);
        match to {
            TxState::ClearedFull => self.full_pool.insert(tx_id),
            _ => self.partial_pool.insert(tx_id),
        };
        Ok(self.transactions.get(&tx_id).expect("transaction"))
    }

    /// Retry every partially paid transaction in `tx_id` order.
    pub fn top_up_pass(&mut self) -> Result<()> {
        let pending: Vec<u64> = self.partial_pool.iter().copied().collect();
        for tx_id in pending {
            self.clear(tx_id)?;
        }
        Ok(())
    }

    pub fn credit_due(&mut self, due: usize, amount: f64) -> Result<()> {
        if !(amount >= 0.0 && amount.is_finite()) {
            return Err(Error::Domain(format!("credit must be non-negative, got {amount}")));
        }
        *self.due_balance.entry(due).or_insert(self.initial_balance) += amount;
        Ok(())
    }

    pub fn set_due_balance(&mut self, due: usize, balance: f64) -> Result<()> {
        if !(balance >= 0.0 && balance.is_finite()) {
            return Err(Error::Domain(format!("balance must be non-negative, got {balance}")));
        }
        self.due_balance.insert(due, balance);
        Ok(())
    }

    /// Move the full pool into one new block. Returns `None` when the pool
    /// is empty.
    pub fn package_block(&mut self, ts: u64) -> Result<Option<&Block>> {
        if self.full_pool.is_empty() {
            return Ok(None);
        }
        let ids: Vec<u64> = std::mem::take(&mut self.full_pool).into_iter().collect();
        let mut records = Vec::with_capacity(ids.len());
        for id in ids {
            let tx = self.transactions.get_mut(&id).expect("pooled transaction");
            tx.state = tx.state.next(TxEvent::Package)?;
            records.push(tx.clone());
        }
        let prev = self.chain.last().map_or([0u8; 32], |b| b.block_hash);
        let block = Block::new(self.chain.len() as u64, prev, ts, records);
        self.chain.push(block);
        Ok(self.chain.last())
    }

    pub fn transaction(&self, tx_id: u64) -> Option<&Transaction> {
        self.transactions.get(&tx_id)
    }

    pub fn transactions(&self) -> impl Iterator<Item = &Transaction> {
        self.transactions.values()
    }

    pub fn due_balance(&self, due: usize) -> f64 {
        self.due_balance.get(&due).copied().unwrap_or(self.initial_balance)
    }

    pub fn cue_balance(&self, cue: usize) -> f64 {
        self.cue_balance.get(&cue).copied().unwrap_or(0.0)
    }

    pub fn full_pool(&self) -> &BTreeSet<u64> {
        &self.full_pool
    }

    pub fn partial_pool(&self) -> &BTreeSet<u64> {
        &self.partial_pool
    }

    pub fn chain(&self) -> &[Block] {
        &self.chain
    }

    pub fn total_debited(&self) -> f64 {
        self.debited
    }

    pub fn total_credited(&self) -> f64 {
        self.credited
    }

    pub fn total_paid(&self) -> f64 {
        self.transactions.values().map(|t| t.paid).sum()
    }
}
