//! Hash-chained blocks and their binary and text encodings.
//!
//! Block hash: SHA-256 over, all integers little-endian,
//!
//! ```text
//! index u64 | prev_hash [32] | timestamp u64 | tx_count u32 |
//! per tx: record_len u32 (= 56) | tx_id u64 | payer u32 | payee u32 |
//!         start_ts u64 | end_ts u64 | tip f64 | amount f64 | paid f64
//! ```
//!
//! Binary chain file: `b"D2DCHAIN"` | version u16 (= 1) | block_count u32 |
//! per block the hashed bytes above followed by block_hash [32].

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Transaction, TxState};
use crate::error::{Error, Result};

pub const CHAIN_MAGIC: &[u8; 8] = b"D2DCHAIN";
pub const CHAIN_VERSION: u16 = 1;
pub const TEXT_FORMAT: &str = "d2d.chain.v1";
const RECORD_LEN: u32 = 56;

pub type Digest32 = [u8; 32];

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub index: u64,
    pub prev_hash: Digest32,
    pub timestamp: u64,
    /// Packaged transactions in ascending `tx_id`.
    pub transactions: Vec<Transaction>,
    pub block_hash: Digest32,
}

impl Block {
    pub fn new(index: u64, prev_hash: Digest32, timestamp: u64, transactions: Vec<Transaction>) -> Self {
        let mut block = Self {
            index,
            prev_hash,
            timestamp,
            transactions,
            block_hash: [0; 32],
        };
        block.block_hash = block.compute_hash();
        block
    }

    pub fn tx_ids(&self) -> Vec<u64> {
        self.transactions.iter().map(|t| t.tx_id).collect()
    }

    fn hashed_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.index.to_le_bytes());
        out.extend_from_slice(&self.prev_hash);
        out.extend_from_slice(&self.timestamp.to_le_bytes());
        out.extend_from_slice(&(self.transactions.len() as u32).to_le_bytes());
        for tx in &self.transactions {
            out.extend_from_slice(&RECORD_LEN.to_le_bytes());
            out.extend_from_slice(&tx.tx_id.to_le_bytes());
            out.extend_from_slice(&(tx.payer as u32).to_le_bytes());
            out.extend_from_slice(&(tx.payee as u32).to_le_bytes());
            out.extend_from_slice(&tx.start_ts.to_le_bytes());
            out.extend_from_slice(&tx.end_ts.to_le_bytes());
            out.extend_from_slice(&tx.tip.to_le_bytes());
            out.extend_from_slice(&tx.amount.to_le_bytes());
            out.extend_from_slice(&tx.paid.to_le_bytes());
        }
    }

    pub fn compute_hash(&self) -> Digest32 {
        let mut bytes = Vec::with_capacity(56 + 60 * self.transactions.len());
        self.hashed_bytes(&mut bytes);
        Sha256::digest(&bytes).into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub valid: bool,
    pub blocks: usize,
    pub first_bad_index: Option<usize>,
}

/// Recompute every hash and link.
pub fn verify_chain(chain: &[Block]) -> ChainReport {
    let mut prev = [0u8; 32];
    for (pos, block) in chain.iter().enumerate() {
        if block.index != pos as u64 || block.prev_hash != prev || block.compute_hash() != block.block_hash {
            return ChainReport {
                valid: false,
                blocks: chain.len(),
                first_bad_index: Some(pos),
            };
        }
        prev = block.block_hash;
    }
    ChainReport {
        valid: true,
        blocks: chain.len(),
        first_bad_index: None,
    }
}

pub fn encode_binary(chain: &[Block]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CHAIN_MAGIC);
    out.extend_from_slice(&CHAIN_VERSION.to_le_bytes());
    out.extend_from_slice(&(chain.len() as u32).to_le_bytes());
    for block in chain {
        block.hashed_bytes(&mut out);
        out.extend_from_slice(&block.block_hash);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format(format!("chain file truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length"))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_binary(bytes: &[u8]) -> Result<Vec<Block>> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<8>()? != CHAIN_MAGIC {
        return Err(Error::Format("not a chain file (bad magic)".into()));
    }
    let version = r.u16()?;
    if version != CHAIN_VERSION {
        return Err(Error::Format(format!("unsupported chain version {version}")));
    }
    let count = r.u32()?;
    let mut chain = Vec::new();
    for _ in 0..count {
        let index = r.u64()?;
        let prev_hash = r.take::<32>()?;
        let timestamp = r.u64()?;
        let tx_count = r.u32()?;
        let mut transactions = Vec::new();
        for _ in 0..tx_count {
            let len = r.u32()?;
            if len != RECORD_LEN {
                return Err(Error::Format(format!(
                    "block {index}: record length {len}, expected {RECORD_LEN}"
                )));
            }
            transactions.push(Transaction {
                tx_id: r.u64()?,
                payer: r.u32()? as usize,
                payee: r.u32()? as usize,
                state: TxState::Packaged,
                start_ts: r.u64()?,
                end_ts: r.u64()?,
                tip: r.f64()?,
                amount: r.f64()?,
                paid: r.f64()?,
            });
        }
        let block_hash = r.take::<32>()?;
        chain.push(Block {
            index,
            prev_hash,
            timestamp,
            transactions,
            block_hash,
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes after the last block",
            bytes.len() - r.pos
        )));
    }
    Ok(chain)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TextChain {
    format: String,
    blocks: Vec<TextBlock>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TextBlock {
    index: u64,
    prev_hash: String,
    timestamp: u64,
    transactions: Vec<Transaction>,
    block_hash: String,
}

fn parse_digest(s: &str) -> Result<Digest32> {
    let bytes = hex::decode(s).map_err(|e| Error::Format(format!("bad hash {s:?}: {e}")))?;
    bytes
        .try_into()
        .map_err(|_| Error::Format(format!("hash {s:?} is not 32 bytes")))
}

pub fn encode_text(chain: &[Block]) -> Result<String> {
    let text = TextChain {
        format: TEXT_FORMAT.into(),
        blocks: chain
            .iter()
            .map(|b| TextBlock {
                index: b.index,
                prev_hash: hex::encode(b.prev_hash),
                timestamp: b.timestamp,
                transactions: b.transactions.clone(),
                block_hash: hex::encode(b.block_hash),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&text)?;
    s.push('\n');
    Ok(s)
}

pub fn decode_text(s: &str) -> Result<Vec<Block>> {
    let text: TextChain = serde_json::from_str(s)?;
    if text.format != TEXT_FORMAT {
        return Err(Error::Format(format!("unknown chain format {:?}", text.format)));
    }
    text.blocks
        .into_iter()
        .map(|b| {
            Ok(Block {
                index: b.index,
                prev_hash: parse_digest(&b.prev_hash)?,
                timestamp: b.timestamp,
                transactions: b.transactions,
                block_hash: parse_digest(&b.block_hash)?,
            })
        })
        .collect()
}

/// Decode either encoding, telling them apart by the binary magic.
pub fn decode_any(bytes: &[u8]) -> Result<Vec<Block>> {
    if bytes.starts_with(CHAIN_MAGIC) {
        decode_binary(bytes)
    } else {
        let s = std::str::from_utf8(bytes)
            .map_err(|_| Error::Format("chain file is neither binary nor UTF-8 text".into()))?;
        decode_text(s)
    }
}
