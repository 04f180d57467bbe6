//! Random general and linear sum-rank codes, list sizes, and the Monte-Carlo
//! estimators for ball correlation and span events.
//!
//! Decoding radii are `floor(rho * n)` with `n = eta * ell`.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fqlinalg::{sample_subspace, Subspace};
use crate::galois::Fq;
use crate::qcomb::{ball_volume, BigCount, SpaceParams};
use crate::rng::trial_rng;
use crate::stats::Estimate;
use crate::sumrank::{ball_points, srk_distance, BallSampler, BlockTuple};

/// Largest number of codewords, centers or span elements that are materialized.
pub const CODE_GUARD: u64 = 1 << 20;

fn guard(what: &'static str, size: &BigUint) -> Result<u64> {
    if *size > BigUint::from(CODE_GUARD) {
        return Err(Error::GuardExceeded {
            what,
            size: size.to_string(),
            limit: CODE_GUARD.to_string(),
        });
    }
    Ok(size.to_u64().expect("guarded"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeKind {
    /// An explicit, deduplicated set of codewords.
    General(Vec<BlockTuple>),
    /// An F_q-linear code, stored as its subspace of F_q^{mn}.
    Linear(Subspace),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    params: SpaceParams,
    kind: CodeKind,
}

impl Code {
    pub fn general(params: &SpaceParams, words: Vec<BlockTuple>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(words.len());
        for w in words {
            if w.params() != params {
                return Err(Error::ShapeMismatch("codeword from a different space".into()));
            }
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
        Ok(Code {
            params: params.clone(),
            kind: CodeKind::General(out),
        })
    }

    /// The span of `basis` (flattened to F_q^{mn}); the basis must be independent.
    pub fn linear(params: &SpaceParams, basis: &[BlockTuple]) -> Result<Self> {
        let rows: Vec<Vec<Fq>> = basis.iter().map(|b| b.flat().to_vec()).collect();
        let space = Subspace::span(&params.field, params.dim(), &rows)?;
        if space.dim() != basis.len() {
            return Err(Error::InvalidParameter(format!(
                "basis of {} tuples spans only {} dimensions",
                basis.len(),
                space.dim()
            )));
        }
        Ok(Code {
            params: params.clone(),
            kind: CodeKind::Linear(space),
        })
    }

    pub fn from_subspace(params: &SpaceParams, space: Subspace) -> Result<Self> {
        if space.ambient() != params.dim() || *space.field() != params.field {
            return Err(Error::ShapeMismatch("subspace ambient is not F_q^{mn}".into()));
        }
        Ok(Code {
            params: params.clone(),
            kind: CodeKind::Linear(space),
        })
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn kind(&self) -> &CodeKind {
        &self.kind
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, CodeKind::Linear(_))
    }

    /// Dimension k of a linear code.
    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            CodeKind::Linear(s) => Some(s.dim()),
            CodeKind::General(_) => None,
        }
    }

    pub fn size(&self) -> BigCount {
        match &self.kind {
            CodeKind::General(w) => BigUint::from(w.len()),
            CodeKind::Linear(s) => BigUint::from(self.params.q()).pow(s.dim() as u32),
        }
    }

    /// `log_q |C| / mn`; zero for the empty code.
    pub fn rate(&self) -> f64 {
        let mn = self.params.dim() as f64;
        match &self.kind {
            CodeKind::Linear(s) => s.dim() as f64 / mn,
            CodeKind::General(w) if w.is_empty() => 0.0,
            CodeKind::General(w) => (w.len() as f64).ln() / (self.params.q() as f64).ln() / mn,
        }
    }

    /// Basis tuples of a linear code (RREF rows).
    pub fn basis(&self) -> Option<Vec<BlockTuple>> {
        match &self.kind {
            CodeKind::Linear(s) => Some(
                s.basis_rows()
                    .into_iter()
                    .map(|r| BlockTuple::from_flat(&self.params, r).expect("ambient matches"))
                    .collect(),
            ),
            CodeKind::General(_) => None,
        }
    }

    /// All codewords; linear codes are expanded under [`CODE_GUARD`].
    pub fn codewords(&self) -> Result<Vec<BlockTuple>> {
        match &self.kind {
            CodeKind::General(w) => Ok(w.clone()),
            CodeKind::Linear(_) => {
                let basis = self.basis().expect("linear");
                span_elements_unchecked(&self.params, &basis, guard("codeword expansion", &self.size())?)
            }
        }
    }

    pub fn contains(&self, x: &BlockTuple) -> Result<bool> {
        if x.params() != &self.params {
            return Err(Error::ShapeMismatch("tuple from a different space".into()));
        }
        match &self.kind {
            CodeKind::General(w) => Ok(w.contains(x)),
            CodeKind::Linear(s) => s.contains(x.flat()),
        }
    }
}

/// `(1 - R) mn` as an exact rational, checking `0 < R <= 1`.
fn codimension(params: &SpaceParams, rate: &BigRational) -> Result<BigRational> {
    if *rate <= BigRational::zero() || *rate > BigRational::one() {
        return Err(Error::InvalidParameter(format!("rate {rate} must lie in (0, 1]")));
    }
    Ok((BigRational::one() - rate) * BigRational::from_integer(BigInt::from(params.dim())))
}

/// Includes each of the q^{mn} tuples independently with probability
/// `q^{(R-1) mn}`. When `(1-R) mn` is an integer e the draw is exact (a uniform
/// integer below q^e equals zero); otherwise it compares a uniform u64 against
/// `floor(p * 2^64)`.
pub fn sample_general_code<R: Rng + ?Sized>(params: &SpaceParams, rate: &BigRational, rng: &mut R) -> Result<Code> {
    let size = guard("general code sweep", &params.space_size())?;
    let e = codimension(params, rate)?;
    let mut words = Vec::new();
    if e.is_integer() {
        let denom = BigUint::from(params.q()).pow(e.to_integer().to_u32().expect("small exponent"));
        for i in 0..size {
            if rng.gen_biguint_below(&denom).is_zero() {
                words.push(BlockTuple::from_index(params, i));
            }
        }
    } else {
        let p = (params.q() as f64).powf(-e.to_f64().expect("finite"));
        let threshold = (p * 2f64.powi(64)) as u64;
        for i in 0..size {
            if rng.next_u64() < threshold {
                words.push(BlockTuple::from_index(params, i));
            }
        }
    }
    Ok(Code {
        params: params.clone(),
        kind: CodeKind::General(words),
    })
}

/// `k = R mn`, required to be an integer.
pub fn linear_dimension(params: &SpaceParams, rate: &BigRational) -> Result<usize> {
    if *rate < BigRational::zero() || *rate > BigRational::one() {
        return Err(Error::InvalidParameter(format!("rate {rate} must lie in [0, 1]")));
    }
    let k = rate * BigRational::from_integer(BigInt::from(params.dim()));
    if !k.is_integer() {
        return Err(Error::NonIntegralDimension(k.to_string()));
    }
    Ok(k.to_integer().to_usize().expect("k <= mn"))
}

/// Uniform k-dimensional linear code, `k = R mn`.
pub fn sample_linear_code<R: Rng + ?Sized>(params: &SpaceParams, rate: &BigRational, rng: &mut R) -> Result<Code> {
    sample_linear_code_dim(params, linear_dimension(params, rate)?, rng)
}

/// Uniform k-dimensional subspace of F_q^{mn}.
pub fn sample_linear_code_dim<R: Rng + ?Sized>(params: &SpaceParams, k: usize, rng: &mut R) -> Result<Code> {
    let space = sample_subspace(&params.field, params.dim(), k, rng)?;
    Code::from_subspace(params, space)
}

/// `|B(center, radius) cap C|`. Linear codes iterate whichever of the code
/// and the ball is smaller.
pub fn list_size_at(code: &Code, center: &BlockTuple, radius: usize) -> Result<u64> {
    if center.params() != code.params() {
        return Err(Error::ShapeMismatch("center from a different space".into()));
    }
    let radius = radius.min(code.params.max_weight());
    match &code.kind {
        CodeKind::General(words) => count_within(words, center, radius),
        CodeKind::Linear(space) => {
            let ball = ball_volume(&code.params, radius)?;
            if code.size() <= ball && code.size() <= BigUint::from(CODE_GUARD) {
                count_within(&code.codewords()?, center, radius)
            } else {
                let pts = ball_points(&code.params, radius)?;
                let f = &code.params.field;
                let mut n = 0;
                for b in pts {
                    let v: Vec<Fq> = center.flat().iter().zip(b.flat()).map(|(&x, &y)| f.add(x, y)).collect();
                    if space.contains(&v)? {
                        n += 1;
                    }
                }
                Ok(n)
            }
        }
    }
}

fn count_within(words: &[BlockTuple], center: &BlockTuple, radius: usize) -> Result<u64> {
    let mut n = 0;
    for w in words {
        if srk_distance(center, w)? <= radius {
            n += 1;
        }
    }
    Ok(n)
}

/// Number of codewords at each distance 0..=max_weight from `center`.
pub fn distance_profile(words: &[BlockTuple], center: &BlockTuple) -> Vec<u64> {
    let mut prof = vec![0u64; center.params().max_weight() + 1];
    for w in words {
        prof[srk_distance(center, w).expect("same space")] += 1;
    }
    prof
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListMode {
    /// Every center in M^ell.
    Exhaustive,
    /// `trials` uniform centers; trial i uses stream `(seed, i)`.
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListSize {
    pub value: u64,
    pub center: BlockTuple,
}

fn better(a: (u64, u64, BlockTuple), b: (u64, u64, BlockTuple)) -> (u64, u64, BlockTuple) {
    // larger list first, then smaller center order
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn centers(code: &Code, mode: ListMode) -> Result<Vec<(u64, BlockTuple)>> {
    match mode {
        ListMode::Exhaustive => {
            let n = guard("exhaustive centers", &code.params.space_size())?;
            Ok((0..n).map(|i| (i, BlockTuple::from_index(&code.params, i))).collect())
        }
        ListMode::Sampled { trials, seed } => Ok((0..trials)
            .map(|i| (i, BlockTuple::random(&code.params, &mut trial_rng(seed, i))))
            .collect()),
    }
}

/// Largest list size over centers, with a witness. Exhaustive mode is exact;
/// sampled mode is a lower bound.
pub fn max_list_size(code: &Code, radius: usize, mode: ListMode) -> Result<ListSize> {
    let cs = centers(code, mode)?;
    let words = code.codewords()?;
    let radius = radius.min(code.params.max_weight());
    let best = cs
        .into_par_iter()
        .map(|(i, c)| (count_within(&words, &c, radius).expect("same space"), i, c))
        .reduce_with(better)
        .ok_or_else(|| Error::InvalidParameter("no centers to search".into()))?;
    Ok(ListSize {
        value: best.0,
        center: best.2,
    })
}

/// Exhaustive maximum list size at every radius 0..=max_weight.
pub fn max_list_size_profile(code: &Code) -> Result<Vec<u64>> {
    let cs = centers(code, ListMode::Exhaustive)?;
    let words = code.codewords()?;
    let len = code.params.max_weight() + 1;
    Ok(cs
        .into_par_iter()
        .map(|(_, c)| {
            let mut acc = 0;
            distance_profile(&words, &c)
                .into_iter()
                .map(|d| {
                    acc += d;
                    acc
                })
                .collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0; len],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect(),
        ))
}

/// Decoding parameters with `radius = floor(rho * n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeParams {
    #[serde(serialize_with = "ser_rational")]
    pub rho: BigRational,
    pub radius: usize,
    pub list_size: u64,
    #[serde(serialize_with = "ser_rational")]
    pub epsilon: BigRational,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl DecodeParams {
    pub fn new(params: &SpaceParams, rho: BigRational, list_size: u64, epsilon: BigRational) -> Result<Self> {
        if list_size == 0 {
            return Err(Error::InvalidParameter("list size L must be at least 1".into()));
        }
        if epsilon <= BigRational::zero() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        let radius = decoding_radius(params, &rho)?;
        Ok(DecodeParams {
            rho,
            radius,
            list_size,
            epsilon,
        })
    }
}

/// `floor(rho * n)` for rho in (0, 1).
pub fn decoding_radius(params: &SpaceParams, rho: &BigRational) -> Result<usize> {
    if *rho <= BigRational::zero() || *rho >= BigRational::one() {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
    }
    let r = (rho * BigRational::from_integer(BigInt::from(params.n()))).floor();
    Ok(r.to_integer().to_usize().expect("nonnegative"))
}

/// `(rho, L)`-list-decodability by exhaustive search over centers.
pub fn is_list_decodable(code: &Code, decode: &DecodeParams) -> Result<bool> {
    Ok(max_list_size(code, decode.radius, ListMode::Exhaustive)?.value <= decode.list_size)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    /// `|C| |B(0, r)| / q^{mn}`.
    pub closed_form: BigRational,
    /// Average of `|B(X, r) cap C|` over every center X.
    pub exhaustive_average: BigRational,
}

pub fn expected_ball_occupancy(code: &Code, radius: usize) -> Result<Occupancy> {
    let q_mn = code.params.space_size();
    let radius = radius.min(code.params.max_weight());
    let closed_form = BigRational::new(
        BigInt::from(code.size() * ball_volume(&code.params, radius)?),
        BigInt::from(q_mn.clone()),
    );
    let cs = centers(code, ListMode::Exhaustive)?;
    let words = code.codewords()?;
    let total: u64 = cs
        .into_par_iter()
        .map(|(_, c)| count_within(&words, &c, radius).expect("same space"))
        .sum();
    Ok(Occupancy {
        closed_form,
        exhaustive_average: BigRational::new(BigInt::from(total), BigInt::from(q_mn)),
    })
}

/// Monte-Carlo `Pr[X1 + X2 in B(y, floor(rho n))]` for X1, X2 drawn from D1
/// on the same ball.
pub fn correlation_estimate(
    params: &SpaceParams,
    rho: &BigRational,
    y: &BlockTuple,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_trials(trials)?;
    if y.params() != params {
        return Err(Error::ShapeMismatch("target from a different space".into()));
    }
    let radius = decoding_radius(params, rho)?;
    let sampler = BallSampler::new(params, radius)?;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x1 = sampler.sample(&mut rng);
            let x2 = sampler.sample(&mut rng);
            let s = x1.add(&x2).expect("same space");
            u64::from(srk_distance(&s, y).expect("same space") <= radius)
        })
        .sum();
    Ok(Estimate::from_counts(hits, trials, seed))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

/// All `q^gamma` combinations `sum a_i X_i` in index order of `a`, without deduplication.
fn span_elements_unchecked(params: &SpaceParams, tuples: &[BlockTuple], count: u64) -> Result<Vec<BlockTuple>> {
    let q = params.q();
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut acc = BlockTuple::zero(params);
        let mut rest = idx;
        for t in tuples {
            let (quot, digit) = rest.div_rem(&q);
            rest = quot;
            acc.add_scaled(Fq(digit as u8), t);
        }
        out.push(acc);
    }
    Ok(out)
}

/// The distinct elements of `span(tuples)`.
pub fn span_elements(params: &SpaceParams, tuples: &[BlockTuple]) -> Result<Vec<BlockTuple>> {
    if tuples.iter().any(|t| t.params() != params) {
        return Err(Error::ShapeMismatch("tuple from a different space".into()));
    }
    let count = guard("span expansion", &BigUint::from(params.q()).pow(tuples.len() as u32))?;
    let mut seen = HashSet::new();
    Ok(span_elements_unchecked(params, tuples, count)?
        .into_iter()
        .filter(|x| seen.insert(x.clone()))
        .collect())
}

/// `|span(tuples) cap B(0, radius)|`.
pub fn span_ball_count(params: &SpaceParams, tuples: &[BlockTuple], radius: usize) -> Result<u64> {
    Ok(span_elements(params, tuples)?
        .iter()
        .filter(|x| x.weight() <= radius)
        .count() as u64)
}

/// Monte-Carlo `Pr[|span(X_1..X_gamma) cap B(0, floor(rho n))| >= K gamma]`
/// for X_i drawn independently from D1.
pub fn limited_correlation_estimate(
    params: &SpaceParams,
    rho: &BigRational,
    gamma: usize,
    k_factor: u64,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_trials(trials)?;
    guard("span expansion", &BigUint::from(params.q()).pow(gamma as u32))?;
    let radius = decoding_radius(params, rho)?;
    let sampler = BallSampler::new(params, radius)?;
    let threshold = k_factor * gamma as u64;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let xs: Vec<BlockTuple> = (0..gamma).map(|_| sampler.sample(&mut rng)).collect();
            u64::from(span_ball_count(params, &xs, radius).expect("guarded") >= threshold)
        })
        .sum();
    Ok(Estimate::from_counts(hits, trials, seed))
}

/// Monte-Carlo `Pr[sum_i a_i X_i in B(0, floor(rho n)) for every a in A]` for
/// X_1..X_gamma drawn independently from D1, gamma the length of the vectors in A.
pub fn subset_span_event_estimate(
    params: &SpaceParams,
    rho: &BigRational,
    a_set: &[Vec<Fq>],
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    check_trials(trials)?;
    let Some(first) = a_set.first() else {
        return Err(Error::InvalidParameter("the set A must be nonempty".into()));
    };
    let gamma = first.len();
    if a_set.iter().any(|a| a.len() != gamma) {
        return Err(Error::ShapeMismatch("vectors in A have different lengths".into()));
    }
    if a_set.iter().flatten().any(|x| x.index() >= params.field.order()) {
        return Err(Error::InvalidParameter("coefficient outside the field".into()));
    }
    guard("span expansion", &BigUint::from(params.q()).pow(gamma as u32))?;
    let radius = decoding_radius(params, rho)?;
    let sampler = BallSampler::new(params, radius)?;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let xs: Vec<BlockTuple> = (0..gamma).map(|_| sampler.sample(&mut rng)).collect();
            let all = a_set.iter().all(|a| {
                let mut acc = BlockTuple::zero(params);
                for (&c, x) in a.iter().zip(&xs) {
                    acc.add_scaled(c, x);
                }
                acc.weight() <= radius
            });
            u64::from(all)
        })
        .sum();
    Ok(Estimate::from_counts(hits, trials, seed))
}
