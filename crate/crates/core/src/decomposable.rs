//! ell-decomposable subspaces `U = U_1 x ... x U_ell` of `(F_q^eta)^ell`:
//! construction, blockwise intersection and sum, exact uniform sampling,
//! enumeration, and the dimension-lemma Monte-Carlo estimator.
//!
//! Flattening places block i at coordinates `[i*eta, (i+1)*eta)` of F_q^{eta*ell}.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::fqlinalg::{enumerate_subspaces, sample_subspace, Subspace, ENUMERATION_GUARD};
use crate::galois::{FieldSpec, Fq};
use crate::qcomb::{decomposable_count_exact, gaussian_binomial, Compositions};
use crate::rng::trial_rng;
use crate::stats::Estimate;
use crate::sumrank::{sample_weighted_composition, suffix_table};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DecomposableSubspace {
    eta: usize,
    factors: Vec<Subspace>,
}

impl DecomposableSubspace {
    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn ell(&self) -> usize {
        self.factors.len()
    }

    pub fn field(&self) -> &FieldSpec {
        self.factors[0].field()
    }

    pub fn factors(&self) -> &[Subspace] {
        &self.factors
    }

    /// Per-block dimensions `(w_1, ..., w_ell)`.
    pub fn composition(&self) -> Vec<usize> {
        self.factors.iter().map(Subspace::dim).collect()
    }

    /// Total dimension `w = sum w_i`.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(Subspace::dim).sum()
    }

    pub fn zero(field: &FieldSpec, eta: usize, ell: usize) -> Self {
        DecomposableSubspace {
            eta,
            factors: vec![Subspace::zero(field, eta); ell],
        }
    }

    pub fn full(field: &FieldSpec, eta: usize, ell: usize) -> Self {
        DecomposableSubspace {
            eta,
            factors: vec![Subspace::full(field, eta); ell],
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.eta != other.eta || self.ell() != other.ell() || self.field() != other.field() {
            return Err(Error::ShapeMismatch(format!(
                "decomposable subspaces of shape ({}, {}) and ({}, {})",
                self.eta,
                self.ell(),
                other.eta,
                other.ell()
            )));
        }
        Ok(())
    }

    fn blockwise(&self, other: &Self, op: impl Fn(&Subspace, &Subspace) -> Result<Subspace>) -> Result<Self> {
        self.check_compatible(other)?;
        let factors = self
            .factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| op(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DecomposableSubspace { eta: self.eta, factors })
    }

    /// Blockwise intersection; again ell-decomposable.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.blockwise(other, Subspace::intersect)
    }

    /// Blockwise sum; dimension `w_x + w_y - dim(X cap Y)`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.blockwise(other, Subspace::sum)
    }

    /// The same subspace as a generic subspace of F_q^{eta*ell}.
    pub fn flatten(&self) -> Subspace {
        let n = self.eta * self.ell();
        let mut rows = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            for r in f.basis_rows() {
                let mut v = vec![Fq::ZERO; n];
                v[i * self.eta..(i + 1) * self.eta].copy_from_slice(&r);
                rows.push(v);
            }
        }
        Subspace::span(self.field(), n, &rows).expect("consistent ambient")
    }
}

pub fn decomposable_build(factors: Vec<Subspace>) -> Result<DecomposableSubspace> {
    let Some(first) = factors.first() else {
        return Err(Error::InvalidParameter("at least one factor is required".into()));
    };
    let (eta, field) = (first.ambient(), first.field().clone());
    if factors.iter().any(|f| f.ambient() != eta || *f.field() != field) {
        return Err(Error::ShapeMismatch("factors have mixed ambients or fields".into()));
    }
    Ok(DecomposableSubspace { eta, factors })
}

pub fn decomp_intersect(x: &DecomposableSubspace, y: &DecomposableSubspace) -> Result<DecomposableSubspace> {
    x.intersect(y)
}

pub fn decomp_sum(x: &DecomposableSubspace, y: &DecomposableSubspace) -> Result<DecomposableSubspace> {
    x.sum(y)
}

/// Exact uniform sampler on D_ell(w): a composition of w with probability
/// `prod [eta w_i]_q / |D_ell(w)|`, then independent uniform factors.
#[derive(Debug, Clone)]
pub struct DecomposableSampler {
    field: FieldSpec,
    eta: usize,
    w: usize,
    gbs: Vec<BigUint>,
    suffix: Vec<Vec<BigUint>>,
}

impl DecomposableSampler {
    pub fn new(field: &FieldSpec, eta: usize, ell: usize, w: usize) -> Result<Self> {
        check_range("dimension w", w, 0, eta * ell)?;
        let q = field.order() as u64;
        let gbs: Vec<BigUint> = (0..=eta).map(|k| gaussian_binomial(eta, k, q)).collect();
        let suffix = suffix_table(&gbs, ell, w);
        Ok(DecomposableSampler {
            field: field.clone(),
            eta,
            w,
            gbs,
            suffix,
        })
    }

    pub fn sample_composition<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        sample_weighted_composition(&self.gbs, &self.suffix, self.w, rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DecomposableSubspace {
        let factors = self
            .sample_composition(rng)
            .into_iter()
            .map(|k| sample_subspace(&self.field, self.eta, k, rng).expect("dimension within eta"))
            .collect();
        DecomposableSubspace { eta: self.eta, factors }
    }
}

pub fn sample_decomposable_uniform<R: Rng + ?Sized>(
    field: &FieldSpec,
    eta: usize,
    ell: usize,
    w: usize,
    rng: &mut R,
) -> Result<DecomposableSubspace> {
    Ok(DecomposableSampler::new(field, eta, ell, w)?.sample(rng))
}

/// Every element of D_ell(w), composition by composition.
pub fn enumerate_decomposable(field: &FieldSpec, eta: usize, ell: usize, w: usize) -> Result<Vec<DecomposableSubspace>> {
    let count = decomposable_count_exact(eta, ell, w, field.order() as u64)?;
    if count > BigUint::from(ENUMERATION_GUARD) {
        return Err(Error::GuardExceeded {
            what: "decomposable enumeration",
            size: count.to_string(),
            limit: ENUMERATION_GUARD.to_string(),
        });
    }
    let grassmannians = (0..=eta)
        .map(|k| enumerate_subspaces(field, eta, k))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    for comp in Compositions::capped(w, ell, eta) {
        let lists: Vec<&Vec<Subspace>> = comp.parts.iter().map(|&k| &grassmannians[k]).collect();
        let mut idx = vec![0usize; ell];
        'odometer: loop {
            out.push(DecomposableSubspace {
                eta,
                factors: idx.iter().zip(&lists).map(|(&i, l)| l[i].clone()).collect(),
            });
            for b in (0..ell).rev() {
                idx[b] += 1;
                if idx[b] < lists[b].len() {
                    continue 'odometer;
                }
                idx[b] = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// Event on `dim(X cap Y)` for the dimension-lemma estimator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimensionEvent {
    /// `dim(X cap Y) >= alpha * w_x`.
    AtLeast(BigRational),
    /// `dim(X cap Y) = d`.
    Equals(usize),
}

impl DimensionEvent {
    pub fn holds(&self, dim: usize, w_x: usize) -> bool {
        match self {
            DimensionEvent::AtLeast(alpha) => {
                BigRational::from_integer(dim.into()) >= alpha * BigRational::from_integer(w_x.into())
            }
            DimensionEvent::Equals(d) => dim == *d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    #[serde(flatten)]
    pub probability: Estimate,
    /// Empirical mean of `dim(X cap Y)`.
    pub mean_dim: f64,
}

/// Monte-Carlo estimate of `Pr[event(dim(X cap Y))]` for independent uniform
/// `X in D_ell(w_x)`, `Y in D_ell(w_y)`. Trial i uses stream `(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn dimension_lemma_estimate(
    field: &FieldSpec,
    eta: usize,
    ell: usize,
    w_x: usize,
    w_y: usize,
    event: &DimensionEvent,
    trials: u64,
    seed: u64,
) -> Result<DimensionEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sx = DecomposableSampler::new(field, eta, ell, w_x)?;
    let sy = DecomposableSampler::new(field, eta, ell, w_y)?;
    let (hits, dim_total) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x = sx.sample(&mut rng);
            let y = sy.sample(&mut rng);
            let d = x.intersect(&y).expect("same shape").dim();
            (u64::from(event.holds(d, w_x)), d as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(DimensionEstimate {
        probability: Estimate::from_counts(hits, trials, seed),
        mean_dim: dim_total as f64 / trials as f64,
    })
}
