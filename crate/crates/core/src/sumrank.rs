//! The sum-rank metric space (M^ell, d_srk): block tuples, weights, balls,
//! brute-force enumeration and the exact samplers D1 (uniform on a ball) and
//! D2 (rows drawn from a uniform decomposable subspace).

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{Pow, ToPrimitive, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::decomposable::{sample_decomposable_uniform, DecomposableSubspace};
use crate::error::{check_range, Error, Result};
use crate::fqlinalg::{rank_of, MatrixFq};
use crate::galois::{FieldSpec, Fq};
use crate::qcomb::{rank_count_table, sphere_volumes, BigCount, Compositions, SpaceParams};

/// Largest space `q^{m eta ell}` that [`enumerate_space`] will walk.
pub const SPACE_GUARD: u64 = 1 << 16;

/// An element of M^ell: ell blocks of m x eta matrices, stored flat with block
/// i at `[i*m*eta, (i+1)*m*eta)`, each block row-major. The flat buffer doubles
/// as the coordinate vector in F_q^{mn}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BlockTuple {
    params: SpaceParams,
    data: Vec<Fq>,
}

impl fmt::Debug for BlockTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlockTuple{:?}", self.to_index_grids())
    }
}

impl Serialize for BlockTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_index_grids().serialize(serializer)
    }
}

impl BlockTuple {
    pub fn zero(params: &SpaceParams) -> Self {
        BlockTuple {
            params: params.clone(),
            data: vec![Fq::ZERO; params.dim()],
        }
    }

    pub fn from_flat(params: &SpaceParams, data: Vec<Fq>) -> Result<Self> {
        if data.len() != params.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for a space of dimension {}",
                data.len(),
                params.dim()
            )));
        }
        if data.iter().any(|x| x.index() >= params.field.order()) {
            return Err(Error::InvalidParameter("coordinate outside the field".into()));
        }
        Ok(BlockTuple {
            params: params.clone(),
            data,
        })
    }

    pub fn from_blocks(params: &SpaceParams, blocks: &[MatrixFq]) -> Result<Self> {
        if blocks.len() != params.ell {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks, expected {}",
                blocks.len(),
                params.ell
            )));
        }
        let mut data = Vec::with_capacity(params.dim());
        for b in blocks {
            if b.rows() != params.m || b.cols() != params.eta || *b.field() != params.field {
                return Err(Error::ShapeMismatch(format!(
                    "block of shape {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    params.m,
                    params.eta
                )));
            }
            data.extend_from_slice(b.entries());
        }
        Ok(BlockTuple {
            params: params.clone(),
            data,
        })
    }

    /// From ell grids of canonical element indices.
    pub fn from_index_grids(params: &SpaceParams, grids: &[Vec<Vec<u64>>]) -> Result<Self> {
        let blocks = grids
            .iter()
            .map(|g| MatrixFq::from_index_grid(&params.field, g))
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(params, &blocks)
    }

    /// The tuple whose base-q digits (coordinate 0 least significant) spell `index`.
    pub fn from_index(params: &SpaceParams, mut index: u64) -> Self {
        let q = params.q();
        let data = (0..params.dim())
            .map(|_| {
                let d = index % q;
                index /= q;
                Fq(d as u8)
            })
            .collect();
        BlockTuple {
            params: params.clone(),
            data,
        }
    }

    /// Inverse of [`BlockTuple::from_index`]; `None` if the index overflows u64.
    pub fn to_index(&self) -> Option<u64> {
        let q = self.params.q();
        let mut acc: u64 = 0;
        for x in self.data.iter().rev() {
            acc = acc.checked_mul(q)?.checked_add(x.index() as u64)?;
        }
        Some(acc)
    }

    pub fn random<R: Rng + ?Sized>(params: &SpaceParams, rng: &mut R) -> Self {
        BlockTuple {
            params: params.clone(),
            data: (0..params.dim()).map(|_| params.field.random(rng)).collect(),
        }
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn flat(&self) -> &[Fq] {
        &self.data
    }

    pub fn block_entries(&self, i: usize) -> &[Fq] {
        let sz = self.params.m * self.params.eta;
        &self.data[i * sz..(i + 1) * sz]
    }

    pub fn block(&self, i: usize) -> MatrixFq {
        MatrixFq::from_entries(
            &self.params.field,
            self.params.m,
            self.params.eta,
            self.block_entries(i).to_vec(),
        )
        .expect("block shape")
    }

    pub fn blocks(&self) -> Vec<MatrixFq> {
        (0..self.params.ell).map(|i| self.block(i)).collect()
    }

    pub fn to_index_grids(&self) -> Vec<Vec<Vec<u64>>> {
        (0..self.params.ell).map(|i| self.block(i).to_index_grid()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn check_same(&self, other: &BlockTuple) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ShapeMismatch("block tuples over different spaces".into()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &BlockTuple, f: impl Fn(Fq, Fq) -> Fq) -> Result<BlockTuple> {
        self.check_same(other)?;
        Ok(BlockTuple {
            params: self.params.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &BlockTuple) -> Result<BlockTuple> {
        let f = &self.params.field;
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &BlockTuple) -> Result<BlockTuple> {
        let f = &self.params.field;
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> BlockTuple {
        let f = &self.params.field;
        BlockTuple {
            params: self.params.clone(),
            data: self.data.iter().map(|&a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, alpha: Fq) -> BlockTuple {
        let f = &self.params.field;
        BlockTuple {
            params: self.params.clone(),
            data: self.data.iter().map(|&a| f.mul(alpha, a)).collect(),
        }
    }

    /// `self + alpha * other`, in place.
    pub fn add_scaled(&mut self, alpha: Fq, other: &BlockTuple) {
        if alpha.is_zero() {
            return;
        }
        let f = &self.params.field;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = f.add(*a, f.mul(alpha, b));
        }
    }

    pub fn block_ranks(&self) -> Vec<usize> {
        let (m, eta) = (self.params.m, self.params.eta);
        (0..self.params.ell)
            .map(|i| rank_of(&self.params.field, self.block_entries(i), m, eta))
            .collect()
    }

    /// Sum of the block ranks.
    pub fn weight(&self) -> usize {
        self.block_ranks().iter().sum()
    }
}

pub fn srk_weight(x: &BlockTuple) -> usize {
    x.weight()
}

pub fn srk_distance(x: &BlockTuple, y: &BlockTuple) -> Result<usize> {
    Ok(x.sub(y)?.weight())
}

/// The closed ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallSpec {
    pub center: BlockTuple,
    pub radius: usize,
}

impl BallSpec {
    pub fn new(center: BlockTuple, radius: usize) -> Self {
        BallSpec { center, radius }
    }

    pub fn at_zero(params: &SpaceParams, radius: usize) -> Self {
        BallSpec::new(BlockTuple::zero(params), radius)
    }
}

pub fn ball_contains(ball: &BallSpec, y: &BlockTuple) -> Result<bool> {
    Ok(srk_distance(&ball.center, y)? <= ball.radius)
}

fn check_space_guard(params: &SpaceParams) -> Result<u64> {
    let size = params.space_size();
    if size > BigUint::from(SPACE_GUARD) {
        return Err(Error::GuardExceeded {
            what: "space enumeration",
            size: size.to_string(),
            limit: SPACE_GUARD.to_string(),
        });
    }
    Ok(size.to_u64().expect("guarded"))
}

/// Every element of M^ell in index order.
pub fn enumerate_space(params: &SpaceParams) -> Result<impl Iterator<Item = BlockTuple> + '_> {
    let size = check_space_guard(params)?;
    Ok((0..size).map(move |i| BlockTuple::from_index(params, i)))
}

/// Elements of weight exactly r, by brute force over the space.
pub fn enumerate_sphere(params: &SpaceParams, r: usize) -> Result<Vec<BlockTuple>> {
    Ok(enumerate_space(params)?.filter(|x| x.weight() == r).collect())
}

/// Elements of weight at most r, by brute force over the space.
pub fn enumerate_ball(params: &SpaceParams, r: usize) -> Result<Vec<BlockTuple>> {
    Ok(enumerate_space(params)?.filter(|x| x.weight() <= r).collect())
}

/// Number of elements of each weight 0..=max_weight, by brute force.
pub fn weight_histogram(params: &SpaceParams) -> Result<Vec<u64>> {
    let mut hist = vec![0u64; params.max_weight() + 1];
    for x in enumerate_space(params)? {
        hist[x.weight()] += 1;
    }
    Ok(hist)
}

/// Largest ball that [`ball_points`] will materialize.
pub const BALL_GUARD: u64 = 1 << 20;

/// The points of `B(0, radius)` built from per-block rank buckets, without
/// walking the whole space. Requires `q^{m eta}` and the ball volume to be at
/// most [`BALL_GUARD`].
pub fn ball_points(params: &SpaceParams, radius: usize) -> Result<Vec<BlockTuple>> {
    check_range("radius", radius, 0, params.max_weight())?;
    let vol: BigCount = sphere_volumes(params).iter().take(radius + 1).sum();
    let block_space = BigUint::from(params.q()).pow((params.m * params.eta) as u32);
    for (what, size) in [("ball enumeration", &vol), ("block enumeration", &block_space)] {
        if *size > BigUint::from(BALL_GUARD) {
            return Err(Error::GuardExceeded {
                what,
                size: size.to_string(),
                limit: BALL_GUARD.to_string(),
            });
        }
    }
    let one_block = SpaceParams::new(params.field.clone(), params.m, params.eta, 1)?;
    let mut by_rank: Vec<Vec<Vec<Fq>>> = vec![Vec::new(); params.rank_cap() + 1];
    for i in 0..block_space.to_u64().expect("guarded") {
        let b = BlockTuple::from_index(&one_block, i);
        by_rank[b.weight()].push(b.data);
    }
    let mut out = Vec::with_capacity(vol.to_usize().unwrap_or(0));
    for s in 0..=radius {
        for comp in Compositions::capped(s, params.ell, params.rank_cap()) {
            let lists: Vec<&Vec<Vec<Fq>>> = comp.parts.iter().map(|&r| &by_rank[r]).collect();
            let mut idx = vec![0usize; params.ell];
            'odometer: loop {
                let data = idx.iter().zip(&lists).flat_map(|(&i, l)| l[i].iter().copied()).collect();
                out.push(BlockTuple {
                    params: params.clone(),
                    data,
                });
                for b in (0..params.ell).rev() {
                    idx[b] += 1;
                    if idx[b] < lists[b].len() {
                        continue 'odometer;
                    }
                    idx[b] = 0;
                }
                break;
            }
        }
    }
    Ok(out)
}

/// Uniform rank-r m x eta matrix as `U V` with U uniform full-rank m x r and V
/// uniform full-rank r x eta. Each rank-r matrix has exactly |GL_r| such
/// factorizations, so the product is uniform.
pub fn sample_uniform_rank_matrix<R: Rng + ?Sized>(
    m: usize,
    eta: usize,
    r: usize,
    field: &FieldSpec,
    rng: &mut R,
) -> Result<MatrixFq> {
    check_range("rank", r, 0, m.min(eta))?;
    if r == 0 {
        return Ok(MatrixFq::zeros(field, m, eta));
    }
    let u = MatrixFq::random_full_rank(field, m, r, rng);
    let v = MatrixFq::random_full_rank(field, r, eta, rng);
    u.mul(&v)
}

/// Draws an index in `0..weights.len()` with probability proportional to
/// `weights[i]`, exactly.
pub(crate) fn weighted_index<R: Rng + ?Sized>(weights: &[BigUint], rng: &mut R) -> usize {
    let total: BigUint = weights.iter().sum();
    assert!(!total.is_zero(), "all weights are zero");
    let mut u = rng.gen_biguint_below(&total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    unreachable!("draw below the total")
}

/// Table `suffix[i][s]` = weighted number of ways to fill blocks i.. with parts
/// summing to s, where a part p in [0, cap] has weight `part_weights[p]`.
pub(crate) fn suffix_table(part_weights: &[BigUint], ell: usize, max_total: usize) -> Vec<Vec<BigUint>> {
    let mut table = vec![vec![BigUint::zero(); max_total + 1]; ell + 1];
    table[ell][0] = BigUint::from(1u32);
    for i in (0..ell).rev() {
        for s in 0..=max_total {
            let mut acc = BigUint::zero();
            for (p, w) in part_weights.iter().enumerate() {
                if p > s {
                    break;
                }
                acc += w * &table[i + 1][s - p];
            }
            table[i][s] = acc;
        }
    }
    table
}

/// Samples a composition of `total` with probability proportional to the
/// product of its part weights, by the chain rule over `suffix`.
pub(crate) fn sample_weighted_composition<R: Rng + ?Sized>(
    part_weights: &[BigUint],
    suffix: &[Vec<BigUint>],
    total: usize,
    rng: &mut R,
) -> Vec<usize> {
    let ell = suffix.len() - 1;
    let mut parts = Vec::with_capacity(ell);
    let mut left = total;
    for i in 0..ell {
        let choices: Vec<BigUint> = (0..part_weights.len())
            .map(|p| {
                if p > left {
                    BigUint::zero()
                } else {
                    &part_weights[p] * &suffix[i + 1][left - p]
                }
            })
            .collect();
        let p = weighted_index(&choices, rng);
        parts.push(p);
        left -= p;
    }
    parts
}

/// Exact uniform sampler on the ball `B(0, radius)`: weight s with probability
/// |S(s)|/|B|, then a composition of s proportional to the product of
/// per-block rank counts, then independent uniform matrices of those ranks.
#[derive(Debug, Clone)]
pub struct BallSampler {
    params: SpaceParams,
    radius: usize,
    spheres: Vec<BigCount>,
    rank_counts: Vec<BigCount>,
    suffix: Vec<Vec<BigCount>>,
}

impl BallSampler {
    pub fn new(params: &SpaceParams, radius: usize) -> Result<Self> {
        check_range("radius", radius, 0, params.max_weight())?;
        let mut spheres = sphere_volumes(params);
        spheres.truncate(radius + 1);
        let rank_counts = rank_count_table(params);
        let suffix = suffix_table(&rank_counts, params.ell, radius);
        Ok(BallSampler {
            params: params.clone(),
            radius,
            spheres,
            rank_counts,
            suffix,
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn ball_volume(&self) -> BigCount {
        self.spheres.iter().sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BlockTuple {
        let p = &self.params;
        let s = weighted_index(&self.spheres, rng);
        let ranks = sample_weighted_composition(&self.rank_counts, &self.suffix, s, rng);
        let mut data = Vec::with_capacity(p.dim());
        for r in ranks {
            let blk = sample_uniform_rank_matrix(p.m, p.eta, r, &p.field, rng).expect("rank within cap");
            data.extend_from_slice(blk.entries());
        }
        BlockTuple {
            params: p.clone(),
            data,
        }
    }
}

/// One draw from D1, the uniform distribution on `B(0, radius)`.
pub fn sample_ball_uniform<R: Rng + ?Sized>(params: &SpaceParams, radius: usize, rng: &mut R) -> Result<BlockTuple> {
    Ok(BallSampler::new(params, radius)?.sample(rng))
}

/// One draw from D2 together with the decomposable subspace it was drawn
/// from: U uniform in D_ell(w), then each block's m rows uniform in U_i.
pub fn sample_d2_with_subspace<R: Rng + ?Sized>(
    params: &SpaceParams,
    w: usize,
    rng: &mut R,
) -> Result<(BlockTuple, DecomposableSubspace)> {
    let u = sample_decomposable_uniform(&params.field, params.eta, params.ell, w, rng)?;
    let mut data = Vec::with_capacity(params.dim());
    for factor in u.factors() {
        for _ in 0..params.m {
            data.extend(factor.random_vector(rng));
        }
    }
    Ok((
        BlockTuple {
            params: params.clone(),
            data,
        },
        u,
    ))
}

pub fn sample_d2<R: Rng + ?Sized>(params: &SpaceParams, w: usize, rng: &mut R) -> Result<BlockTuple> {
    Ok(sample_d2_with_subspace(params, w, rng)?.0)
}
