//! Combinatorial SCMA model: sparse codeword supports, overload factor and
//! the C-UE admission cap.
//!
//! A codeword spans `m` subcarriers of a resource block and is non-zero on
//! exactly `mc` of them, so a block offers `C(m, mc)` distinct supports. Each
//! resource block is treated as an independent group with `R = m`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScmaConfig {
    /// Codeword length (subcarriers per resource block).
    pub m: u32,
    /// Non-zero entries per codeword.
    pub mc: u32,
    /// Resource blocks in the cell.
    pub n_rb: u32,
}

impl ScmaConfig {
    /// Four subcarriers, two non-zero: six codebooks per block.
    pub const SCMA_4_2: (u32, u32) = (4, 2);
    /// Two subcarriers, one non-zero: as many codebooks as subcarriers.
    pub const OMA: (u32, u32) = (2, 1);

    pub fn new(m: u32, mc: u32, n_rb: u32) -> Result<Self> {
        let cfg = Self { m, mc, n_rb };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mc == 0 || self.mc >= self.m {
            return Err(Error::Domain(format!(
                "codeword needs 0 < mc < m, got m={}, mc={}",
                self.m, self.mc
            )));
        }
        if self.n_rb == 0 {
            return Err(Error::Domain("cell needs at least one resource block".into()));
        }
        Ok(())
    }

    pub fn codebooks(&self) -> u64 {
        binomial(self.m as u64, self.mc as u64)
    }

    pub fn overload_factor(&self) -> f64 {
        overload_factor(self)
    }

    pub fn admission_capacity(&self) -> usize {
        admission_capacity(self.n_rb, self.overload_factor())
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of distinct sparse codewords, `C(m, mc)`.
pub fn codebook_count(m: u32, mc: u32) -> Result<u64> {
    if mc == 0 || mc >= m {
        return Err(Error::Domain(format!(
            "codebook count needs 0 < mc < m, got m={m}, mc={mc}"
        )));
    }
    Ok(binomial(m as u64, mc as u64))
}

/// `J / R` with `R = m`. Exactly 1 for orthogonal access.
pub fn overload_factor(cfg: &ScmaConfig) -> f64 {
    cfg.codebooks() as f64 / cfg.m as f64
}

/// Maximum number of C-UEs the cell admits: `floor(n_rb * overload)`.
pub fn admission_capacity(n_rb: u32, overload: f64) -> usize {
    // J/R is rational; nudge so products like 30 * 1.5 never land a ulp short.
    (n_rb as f64 * overload + 1e-9).floor() as usize
}

/// Supports of size `mc` over `0..m` in lexicographic order.
pub fn support_patterns(m: u32, mc: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, m: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in start..=(m - left) {
            cur.push(s);
            rec(s + 1, m, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if mc <= m {
        rec(0, m, mc, &mut Vec::with_capacity(mc as usize), &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookSlot {
    pub rb: u32,
    pub support: Vec<u32>,
}

/// RB group and codeword support of every admitted C-UE, indexed by C-UE.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookAssignment {
    pub slots: Vec<CodebookSlot>,
}

impl CodebookAssignment {
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// C-UEs sharing `k`'s RB with an overlapping support.
    pub fn co_channel_of(&self, k: usize) -> Vec<usize> {
        let me = &self.slots[k];
        self.slots
            .iter()
            .enumerate()
            .filter(|&(l, s)| l != k && s.rb == me.rb && supports_overlap(&s.support, &me.support))
            .map(|(l, _)| l)
            .collect()
    }
}

fn supports_overlap(a: &[u32], b: &[u32]) -> bool {
    a.iter().any(|x| b.contains(x))
}

/// Round-robin over RBs; the j-th C-UE landing in an RB takes the j-th
/// support in lexicographic order.
pub fn assign_codebooks(n_admitted: usize, cfg: &ScmaConfig) -> Result<CodebookAssignment> {
    cfg.validate()?;
    let capacity = cfg.admission_capacity();
    if n_admitted > capacity {
        return Err(Error::Capacity {
            requested: n_admitted,
            capacity,
        });
    }
    let patterns = support_patterns(cfg.m, cfg.mc);
    let n_rb = cfg.n_rb as usize;
    let slots = (0..n_admitted)
        .map(|c| CodebookSlot {
            rb: (c % n_rb) as u32,
            support: patterns[c / n_rb].clone(),
        })
        .collect();
    Ok(CodebookAssignment { slots })
}

/// Unordered co-channel pairs `(k, l)` with `k < l`: same RB and
/// intersecting supports.
pub fn co_channel_pairs(assignment: &CodebookAssignment) -> BTreeSet<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for (k, a) in assignment.slots.iter().enumerate() {
        for (l, b) in assignment.slots.iter().enumerate().skip(k + 1) {
            if a.rb == b.rb && supports_overlap(&a.support, &b.support) {
                pairs.insert((k, l));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn codebook_counts() {
        assert_eq!(codebook_count(4, 2).unwrap(), 6);
        assert_eq!(codebook_count(2, 1).unwrap(), 2);
        assert_eq!(codebook_count(6, 3).unwrap(), 20);
        assert!(codebook_count(4, 4).is_err());
        assert!(codebook_count(4, 0).is_err());
        assert!(codebook_count(3, 5).is_err());
    }

    #[test]
    fn overload_and_capacity() {
        let scma = ScmaConfig::new(4, 2, 30).unwrap();
        assert_eq!(scma.overload_factor(), 1.5);
        assert_eq!(scma.admission_capacity(), 45);

        let oma = ScmaConfig::new(2, 1, 30).unwrap();
        assert_eq!(oma.overload_factor(), 1.0);
        assert_eq!(oma.admission_capacity(), 30);

        let six = ScmaConfig::new(6, 3, 1).unwrap();
        assert_eq!(six.overload_factor(), 20.0 / 6.0);

        assert_eq!(admission_capacity(0, 1.5), 0);
        assert_eq!(admission_capacity(30, 1.0), 30);
    }

    #[test]
    fn patterns_are_lexicographic() {
        let p = support_patterns(4, 2);
        assert_eq!(
            p,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(support_patterns(6, 3).len(), 20);
    }

    #[test]
    fn assignment_edge_cases() {
        let cfg = ScmaConfig::new(4, 2, 30).unwrap();
        assert!(assign_codebooks(0, &cfg).unwrap().is_empty());

        let full = assign_codebooks(45, &cfg).unwrap();
        let mut per_rb = [0usize; 30];
        for s in &full.slots {
            per_rb[s.rb as usize] += 1;
        }
        assert!(per_rb.iter().all(|&c| c <= 2));
        assert_eq!(per_rb.iter().sum::<usize>(), 45);

        assert!(matches!(
            assign_codebooks(46, &cfg),
            Err(Error::Capacity { requested: 46, capacity: 45 })
        ));

        // Four RBs with 1.5 overload admit six C-UEs; every slot is distinct.
        let small = ScmaConfig::new(4, 2, 4).unwrap();
        let a = assign_codebooks(6, &small).unwrap();
        let distinct: BTreeSet<_> = a.slots.iter().map(|s| (s.rb, s.support.clone())).collect();
        assert_eq!(distinct.len(), 6);
    }

    #[test]
    fn co_channel_examples() {
        let one = CodebookAssignment {
            slots: vec![CodebookSlot { rb: 0, support: vec![0, 1] }],
        };
        assert!(co_channel_pairs(&one).is_empty());

        let disjoint = CodebookAssignment {
            slots: vec![
                CodebookSlot { rb: 0, support: vec![0, 1] },
                CodebookSlot { rb: 0, support: vec![2, 3] },
            ],
        };
        assert!(co_channel_pairs(&disjoint).is_empty());

        let overlap = CodebookAssignment {
            slots: vec![
                CodebookSlot { rb: 0, support: vec![0, 1] },
                CodebookSlot { rb: 0, support: vec![1, 2] },
            ],
        };
        assert_eq!(co_channel_pairs(&overlap).into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(overlap.co_channel_of(1), vec![0]);

        let other_rb = CodebookAssignment {
            slots: vec![
                CodebookSlot { rb: 0, support: vec![0, 1] },
                CodebookSlot { rb: 1, support: vec![0, 1] },
            ],
        };
        assert!(co_channel_pairs(&other_rb).is_empty());
    }

    #[test]
    fn oma_has_no_co_channel_pairs() {
        let cfg = ScmaConfig::new(2, 1, 30).unwrap();
        let a = assign_codebooks(30, &cfg).unwrap();
        assert!(co_channel_pairs(&a).is_empty());
    }

    proptest! {
        #[test]
        fn binomial_symmetry(m in 2u32..20, mc in 1u32..19) {
            prop_assume!(mc < m);
            prop_assert_eq!(codebook_count(m, mc).unwrap(), codebook_count(m, m - mc).unwrap());
        }

        #[test]
        fn overload_relation(m in 2u32..12, mc in 1u32..11) {
            prop_assume!(mc < m);
            let cfg = ScmaConfig::new(m, mc, 1).unwrap();
            let j = cfg.codebooks();
            let of = cfg.overload_factor();
            if j > m as u64 { prop_assert!(of > 1.0); }
            if j == m as u64 { prop_assert_eq!(of, 1.0); }
        }

        #[test]
        fn co_channel_symmetric_irreflexive(n_rb in 1u32..8, n in 0usize..20) {
            let cfg = ScmaConfig::new(4, 2, n_rb).unwrap();
            let n = n.min(cfg.admission_capacity());
            let a = assign_codebooks(n, &cfg).unwrap();
            for (k, l) in co_channel_pairs(&a) {
                prop_assert!(k < l);
                prop_assert_eq!(a.slots[k].rb, a.slots[l].rb);
                prop_assert!(a.co_channel_of(k).contains(&l));
                prop_assert!(a.co_channel_of(l).contains(&k));
            }
            for k in 0..n {
                prop_assert!(!a.co_channel_of(k).contains(&k));
            }
        }
    }
}
