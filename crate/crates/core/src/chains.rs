//! q-ary c-increasing chains: recognition, greedy extraction, shift search and
//! the length bound `(1/c) log_q(A/2) - (1 - 1/c) log_q((q-1) gamma)`.
//!
//! Support indices are 0-based.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{FieldSpec, Fq};
use crate::rng::trial_rng;

/// Largest shift space `q^gamma` for exhaustive search.
pub const SHIFT_GUARD: u64 = 1 << 20;

pub fn support(v: &[Fq]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect()
}

fn support_mask(v: &[Fq]) -> u64 {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .fold(0, |m, (i, _)| m | (1 << i))
}

/// True iff every member adds at least c coordinates not in the support of
/// its predecessors.
pub fn is_increasing_chain(seq: &[Vec<Fq>], c: usize) -> bool {
    let mut seen = vec![false; seq.first().map_or(0, Vec::len)];
    for v in seq {
        if v.len() != seen.len() {
            return false;
        }
        let fresh: Vec<usize> = support(v).into_iter().filter(|&i| !seen[i]).collect();
        if fresh.len() < c {
            return false;
        }
        for i in fresh {
            seen[i] = true;
        }
    }
    true
}

/// An instance `(F_q, gamma, A, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainInstance {
    pub field: FieldSpec,
    pub gamma: usize,
    pub vectors: Vec<Vec<Fq>>,
    pub c: usize,
}

impl ChainInstance {
    pub fn new(field: FieldSpec, gamma: usize, vectors: Vec<Vec<Fq>>, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidParameter("c must be at least 1".into()));
        }
        if gamma == 0 || gamma > 63 {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} must lie in [1, 63]")));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidParameter("the set A must be nonempty".into()));
        }
        if vectors.iter().any(|v| v.len() != gamma) {
            return Err(Error::ShapeMismatch("vectors of the wrong length".into()));
        }
        if vectors.iter().flatten().any(|x| x.index() >= field.order()) {
            return Err(Error::InvalidParameter("entry outside the field".into()));
        }
        let mut vectors = vectors;
        vectors.sort();
        vectors.dedup();
        Ok(ChainInstance {
            field,
            gamma,
            vectors,
            c,
        })
    }

    /// `A + w`.
    pub fn shifted(&self, w: &[Fq]) -> Vec<Vec<Fq>> {
        let f = &self.field;
        self.vectors
            .iter()
            .map(|v| v.iter().zip(w).map(|(&a, &b)| f.add(a, b)).collect())
            .collect()
    }

    pub fn bound(&self) -> f64 {
        chain_length_bound(self.vectors.len() as u64, self.field.order() as u64, self.gamma, self.c)
    }

    fn shift_from_index(&self, mut idx: u64) -> Vec<Fq> {
        let q = self.field.order() as u64;
        (0..self.gamma)
            .map(|_| {
                let d = idx % q;
                idx /= q;
                Fq(d as u8)
            })
            .collect()
    }
}

/// Repeatedly takes the vector adding the most new support, ties broken by
/// the lexicographically smallest vector, while the gain is at least c.
pub fn greedy_chain(vectors: &[Vec<Fq>], c: usize) -> Vec<Vec<Fq>> {
    let mut pool: Vec<(&Vec<Fq>, u64)> = vectors.iter().map(|v| (v, support_mask(v))).collect();
    pool.sort_by(|a, b| a.0.cmp(b.0));
    let mut covered = 0u64;
    let mut chain = Vec::new();
    loop {
        let mut best: Option<(usize, u32)> = None;
        for (i, (_, m)) in pool.iter().enumerate() {
            let gain = (m & !covered).count_ones();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        match best {
            Some((i, gain)) if gain as usize >= c.max(1) => {
                let (v, m) = pool.remove(i);
                covered |= m;
                chain.push(v.clone());
            }
            _ => return chain,
        }
    }
}

/// Longest c-increasing chain in `vectors`, by memoized search over covered
/// support sets.
pub fn max_chain_exact(vectors: &[Vec<Fq>], c: usize) -> Vec<Vec<Fq>> {
    let mut sorted: Vec<&Vec<Fq>> = vectors.iter().collect();
    sorted.sort();
    sorted.dedup();
    let masks: Vec<u64> = sorted.iter().map(|v| support_mask(v)).collect();
    let mut memo: HashMap<u64, (usize, Option<usize>)> = HashMap::new();
    fn go(covered: u64, masks: &[u64], c: usize, memo: &mut HashMap<u64, (usize, Option<usize>)>) -> usize {
        if let Some(&(len, _)) = memo.get(&covered) {
            return len;
        }
        let mut best = (0, None);
        for (i, &m) in masks.iter().enumerate() {
            if ((m & !covered).count_ones() as usize) >= c.max(1) {
                let len = 1 + go(covered | m, masks, c, memo);
                if len > best.0 {
                    best = (len, Some(i));
                }
            }
        }
        memo.insert(covered, best);
        best.0
    }
    go(0, &masks, c, &mut memo);
    let mut chain = Vec::new();
    let mut covered = 0u64;
    while let Some(&(_, Some(i))) = memo.get(&covered) {
        chain.push(sorted[i].clone());
        covered |= masks[i];
    }
    chain
}

/// `(1/c) log_q(A/2) - (1 - 1/c) log_q((q-1) gamma)`.
pub fn chain_length_bound(a_size: u64, q: u64, gamma: usize, c: usize) -> f64 {
    let lq = (q as f64).ln();
    let c = c as f64;
    ((a_size as f64 / 2.0).ln() / lq) / c - (1.0 - 1.0 / c) * (((q - 1) as f64 * gamma as f64).ln() / lq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// All q^gamma shifts.
    Exhaustive,
    /// `trials` uniform shifts; trial i uses stream `(seed, i)`.
    Random { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extractor {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub w: Vec<Fq>,
    pub chain: Vec<Vec<Fq>>,
    pub length: usize,
    pub bound: f64,
}

impl ChainReport {
    /// `length >= ceil(bound)`.
    pub fn meets_bound(&self) -> bool {
        self.bound <= 0.0 || self.length as f64 >= self.bound.ceil()
    }
}

/// The shift w maximizing the extracted chain length in A + w; ties go to the
/// smallest shift index.
pub fn best_shift_chain(instance: &ChainInstance, mode: ShiftMode, extractor: Extractor) -> Result<ChainReport> {
    let shifts: Vec<(u64, Vec<Fq>)> = match mode {
        ShiftMode::Exhaustive => {
            let size = BigUint::from(instance.field.order()).pow(instance.gamma as u32);
            if size > BigUint::from(SHIFT_GUARD) {
                return Err(Error::GuardExceeded {
                    what: "exhaustive shift search",
                    size: size.to_string(),
                    limit: SHIFT_GUARD.to_string(),
                });
            }
            let n = size.to_u64().expect("guarded");
            (0..n).map(|i| (i, instance.shift_from_index(i))).collect()
        }
        ShiftMode::Random { trials, seed } => (0..trials)
            .map(|i| {
                let mut rng = trial_rng(seed, i);
                (i, (0..instance.gamma).map(|_| instance.field.random(&mut rng)).collect())
            })
            .collect(),
    };
    let best = shifts
        .into_par_iter()
        .map(|(i, w)| {
            let pts = instance.shifted(&w);
            let chain = match extractor {
                Extractor::Greedy => greedy_chain(&pts, instance.c),
                Extractor::Exact => max_chain_exact(&pts, instance.c),
            };
            (chain.len(), i, w, chain)
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .ok_or_else(|| Error::InvalidParameter("no shifts to search".into()))?;
    Ok(ChainReport {
        length: best.0,
        w: best.2,
        chain: best.3,
        bound: instance.bound(),
    })
}
