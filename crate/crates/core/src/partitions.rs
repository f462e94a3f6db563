//! Ordered partitions of an exponent vector into consecutive blocks, the
//! dependent index sets attached to them, and the inflation operator.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    /// Every part except possibly the last has length at least two.
    PreFat,
    /// Every part has length at least two.
    Fat,
}

impl std::str::FromStr for PartitionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefat" | "pre-fat" => Ok(PartitionKind::PreFat),
            "fat" => Ok(PartitionKind::Fat),
            _ => Err(Error::invalid(format!("unknown partition kind {s:?}"))),
        }
    }
}

/// A split of `source` into consecutive non-empty parts. `cuts` holds the
/// start offsets of parts 2..q, strictly increasing inside `1..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrderedPartition {
    source: Vec<u32>,
    cuts: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(source: Vec<u32>, cuts: Vec<usize>) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::invalid("cannot partition an empty vector"));
        }
        let ok = cuts.windows(2).all(|w| w[0] < w[1])
            && cuts.iter().all(|&c| c > 0 && c < source.len());
        if !ok {
            return Err(Error::invalid(format!("bad cut positions {cuts:?}")));
        }
        Ok(Self { source, cuts })
    }

    pub fn source(&self) -> &[u32] {
        &self.source
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn num_parts(&self) -> usize {
        self.cuts.len() + 1
    }

    pub fn parts(&self) -> Vec<&[u32]> {
        let mut bounds = Vec::with_capacity(self.cuts.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&self.cuts);
        bounds.push(self.source.len());
        bounds.windows(2).map(|w| &self.source[w[0]..w[1]]).collect()
    }

    pub fn is_kind(&self, kind: PartitionKind) -> bool {
        let parts = self.parts();
        let q = parts.len();
        parts.iter().enumerate().all(|(j, p)| {
            p.len() >= 2 || (kind == PartitionKind::PreFat && j + 1 == q)
        })
    }

    /// Length of `r_j` for each part under the given kind.
    pub fn index_lengths(&self, kind: PartitionKind) -> Vec<usize> {
        let parts = self.parts();
        let q = parts.len();
        parts
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let drop = if j + 1 == q && kind == PartitionKind::PreFat { 1 } else { 2 };
                p.len().saturating_sub(drop)
            })
            .collect()
    }
}

/// All partitions of `s` of the given kind, sorted lexicographically by
/// their cut vectors.
pub fn enumerate(s: &[u32], kind: PartitionKind) -> Result<Vec<OrderedPartition>> {
    if s.is_empty() {
        return Err(Error::invalid("cannot partition an empty vector"));
    }
    let t = s.len();
    let mut out = Vec::new();
    let mut cuts = Vec::new();
    extend_cuts(s, kind, 0, t, &mut cuts, &mut out);
    out.sort_by(|a, b| a.cuts.cmp(&b.cuts));
    Ok(out)
}

// Choose the end of the part starting at `start`, recursing on the rest.
fn extend_cuts(
    s: &[u32],
    kind: PartitionKind,
    start: usize,
    t: usize,
    cuts: &mut Vec<usize>,
    out: &mut Vec<OrderedPartition>,
) {
    let last_len = t - start;
    let min_last = if kind == PartitionKind::PreFat { 1 } else { 2 };
    if last_len >= min_last {
        out.push(OrderedPartition { source: s.to_vec(), cuts: cuts.clone() });
    }
    // A non-final part needs length ≥ 2 and must leave a non-empty tail.
    for end in (start + 2)..t {
        cuts.push(end);
        extend_cuts(s, kind, end, t, cuts, out);
        cuts.pop();
    }
}

/// The multi-index `r = (r_1, …, r_q)` attached to a partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IndexAssignment {
    pub parts: Vec<Vec<u32>>,
}

impl IndexAssignment {
    pub fn part_sum(&self, j: usize) -> u32 {
        self.parts[j].iter().sum()
    }
}

/// Upper bound of `r_{j,i}` (0-based `i`) given the earlier entries of the
/// same block: `⌊max{σ_{i+1}(P_j) − 2σ_i(r_j), P_j[i+1]}/2⌋`.
pub fn index_bound(part: &[u32], earlier: &[u32]) -> u32 {
    let i = earlier.len();
    let sig_p: u32 = part[..=i].iter().sum();
    let sig_r: u32 = earlier.iter().sum();
    let head = sig_p as i64 - 2 * sig_r as i64;
    let next = part[i + 1] as i64;
    (head.max(next) / 2) as u32
}

/// Every index assignment for `p`, ordered with the leftmost index varying
/// fastest (colexicographic on the flattened vector).
pub fn index_assignments(p: &OrderedPartition, kind: PartitionKind) -> Vec<IndexAssignment> {
    let parts = p.parts();
    let lens = p.index_lengths(kind);
    let mut per_part: Vec<Vec<Vec<u32>>> = Vec::with_capacity(parts.len());
    for (part, &len) in parts.iter().zip(&lens) {
        let mut acc = Vec::new();
        let mut cur = Vec::with_capacity(len);
        block_assignments(part, len, &mut cur, &mut acc);
        per_part.push(acc);
    }
    let mut out: Vec<IndexAssignment> = vec![IndexAssignment { parts: Vec::new() }];
    for choices in per_part {
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for c in &choices {
                let mut parts = prefix.parts.clone();
                parts.push(c.clone());
                next.push(IndexAssignment { parts });
            }
        }
        out = next;
    }
    out.sort_by(|a, b| {
        let fa: Vec<u32> = a.parts.iter().flatten().rev().copied().collect();
        let fb: Vec<u32> = b.parts.iter().flatten().rev().copied().collect();
        fa.cmp(&fb)
    });
    out
}

fn block_assignments(part: &[u32], len: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for r in 0..=index_bound(part, cur) {
        cur.push(r);
        block_assignments(part, len, cur, out);
        cur.pop();
    }
}

/// `Inf^t_i(j)`: place `j_a` at (1-based) position `i_a`, and 1 elsewhere.
pub fn inflate(j: &[u32], i: &[usize], t: usize) -> Result<Vec<u32>> {
    if j.len() != i.len() || i.len() > t {
        return Err(Error::invalid(format!(
            "inflate: {} values at {} positions into length {t}",
            j.len(),
            i.len()
        )));
    }
    if !i.windows(2).all(|w| w[0] < w[1]) || i.iter().any(|&p| p == 0 || p > t) {
        return Err(Error::invalid(format!("inflate: bad positions {i:?}")));
    }
    let mut out = vec![1u32; t];
    for (&v, &pos) in j.iter().zip(i) {
        out[pos - 1] = v;
    }
    Ok(out)
}
