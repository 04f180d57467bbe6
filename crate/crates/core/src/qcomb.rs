//! Exact q-combinatorics: bounded compositions, Gaussian binomials, sum-rank
//! sphere and ball volumes with their bounds, decomposable-subspace counts and
//! the list-decoding capacity functions.
//!
//! Counts are arbitrary-precision integers. Bounds involving K_q or fractional
//! powers of q are evaluated as `log_q` values (see [`crate::logscale`]) and
//! compared with a margin of [`LOG_MARGIN`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::galois::FieldSpec;
use crate::logscale::{kq_partial_product, LogQ, LOG_MARGIN};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

/// Ambient configuration `(q, m, eta, ell)` of the space M^ell of
/// ell-tuples of m x eta matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpaceParams {
    pub field: FieldSpec,
    pub m: usize,
    pub eta: usize,
    pub ell: usize,
}

impl SpaceParams {
    pub fn new(field: FieldSpec, m: usize, eta: usize, ell: usize) -> Result<Self> {
        if m == 0 || eta == 0 || ell == 0 {
            return Err(Error::InvalidParameter(format!(
                "m, eta, ell must be positive (got {m}, {eta}, {ell})"
            )));
        }
        Ok(SpaceParams { field, m, eta, ell })
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    /// Code length n = eta * ell.
    pub fn n(&self) -> usize {
        self.eta * self.ell
    }

    /// b = eta / m.
    pub fn b(&self) -> Ratio<u64> {
        Ratio::new(self.eta as u64, self.m as u64)
    }

    /// Dimension of M^ell over F_q, i.e. m * n.
    pub fn dim(&self) -> usize {
        self.m * self.n()
    }

    pub fn rank_cap(&self) -> usize {
        self.m.min(self.eta)
    }

    /// Largest possible sum-rank weight, ell * min(m, eta).
    pub fn max_weight(&self) -> usize {
        self.ell * self.rank_cap()
    }

    /// |M^ell| = q^{mn}.
    pub fn space_size(&self) -> BigCount {
        BigUint::from(self.q()).pow(self.dim() as u32)
    }
}

/// A constrained ordered partition: `parts[i]` in `[lower[i], upper[i]]`,
/// summing to `total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Composition {
    pub parts: Vec<usize>,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// Lexicographic iterator over bounded compositions.
#[derive(Debug, Clone)]
pub struct Compositions {
    total: usize,
    lower: Vec<usize>,
    upper: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(total: usize, lower: &[usize], upper: &[usize]) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
        let mut it = Compositions {
            total,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            next: None,
        };
        it.next = it.smallest_completion(&[], total);
        it
    }

    /// Parts all in `[0, cap]`.
    pub fn capped(total: usize, ell: usize, cap: usize) -> Self {
        Self::new(total, &vec![0; ell], &vec![cap; ell])
    }

    /// Lexicographically smallest completion of `prefix` using `remaining`.
    fn smallest_completion(&self, prefix: &[usize], mut remaining: usize) -> Option<Vec<usize>> {
        let start = prefix.len();
        let ell = self.lower.len();
        if ell == 0 {
            return (remaining == 0).then(Vec::new);
        }
        let min_rest: usize = self.lower[start..].iter().sum();
        let max_rest: usize = self.upper[start..].iter().sum();
        if remaining < min_rest || remaining > max_rest {
            return None;
        }
        let mut out = prefix.to_vec();
        for i in start..ell {
            let max_after: usize = self.upper[i + 1..].iter().sum();
            let part = self.lower[i].max(remaining.saturating_sub(max_after));
            if part > self.upper[i] {
                return None;
            }
            out.push(part);
            remaining -= part;
        }
        Some(out)
    }

    fn successor(&self, cur: &[usize]) -> Option<Vec<usize>> {
        let ell = cur.len();
        if ell < 2 {
            return None;
        }
        let mut prefix_sum: usize = cur[..ell - 1].iter().sum();
        for i in (0..ell - 1).rev() {
            prefix_sum -= cur[i];
            let bumped = cur[i] + 1;
            if bumped > self.upper[i] || prefix_sum + bumped > self.total {
                continue;
            }
            let mut prefix = cur[..i].to_vec();
            prefix.push(bumped);
            if let Some(c) = self.smallest_completion(&prefix, self.total - prefix_sum - bumped) {
                return Some(c);
            }
        }
        None
    }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let cur = self.next.take()?;
        self.next = self.successor(&cur);
        Some(Composition { parts: cur })
    }
}

/// Exact number of bounded compositions, by dynamic programming.
pub fn composition_count(total: usize, lower: &[usize], upper: &[usize]) -> BigCount {
    let mut ways = vec![BigUint::zero(); total + 1];
    ways[0] = BigUint::one();
    for (&lo, &hi) in lower.iter().zip(upper) {
        let mut next = vec![BigUint::zero(); total + 1];
        for (s, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for part in lo..=hi {
                if s + part > total {
                    break;
                }
                next[s + part] += w;
            }
        }
        ways = next;
    }
    ways.swap_remove(total)
}

/// Ordinary binomial coefficient C(n, k).
pub fn binomial(n: usize, k: usize) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn q_pow(q: u64, e: usize) -> BigUint {
    BigUint::from(q).pow(e as u32)
}

/// Gaussian binomial `[eta k]_q = prod_{i<k} (q^eta - q^i) / (q^k - q^i)`, zero for k > eta.
///
/// Numerator and denominator are accumulated separately and divided once;
/// the division must be exact.
pub fn gaussian_binomial(eta: usize, k: usize, q: u64) -> BigCount {
    if k > eta {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q_pow(q, eta) - q_pow(q, i);
        den *= q_pow(q, k) - q_pow(q, i);
    }
    let (quot, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "Gaussian binomial [{eta} {k}]_{q} is not integral");
    quot
}

/// Log-domain bound pair `(log_q lower, log_q upper)`.
#[derive(Debug, Clone)]
pub struct LogBounds {
    pub lower: LogQ,
    pub upper: LogQ,
}

impl LogBounds {
    /// `lower <= log_q(value) <= upper`, each side with [`LOG_MARGIN`] slack.
    pub fn contains(&self, value: &BigCount, q: u64) -> bool {
        if value.is_zero() {
            return false;
        }
        let v = LogQ::of_count(value, q);
        self.lower.le_with_margin(&v, LOG_MARGIN) && v.le_with_margin(&self.upper, LOG_MARGIN)
    }
}

/// `q^{(eta-k)k} <= [eta k]_q <= K_q^{-1} q^{(eta-k)k}`.
pub fn gb_bounds_check(eta: usize, k: usize, q: u64) -> bool {
    if k > eta {
        return false;
    }
    let gb = gaussian_binomial(eta, k, q);
    let base_exp = (eta - k) * k;
    let exact_lower = q_pow(q, base_exp) <= gb;
    let upper = LogQ::of_kq(q).scale(-1).add(&LogQ::of_rational(&BigRational::from_integer(
        (base_exp as i64).into(),
    )));
    exact_lower && LogQ::of_count(&gb, q).le_with_margin(&upper, LOG_MARGIN)
}

/// Enclosing interval for K_q = prod_{i>=1} (1 - q^-i).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KqInterval {
    pub lo: f64,
    pub hi: f64,
    /// Number of factors in the partial product.
    pub terms: u32,
}

impl KqInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Encloses K_q in an interval of width at most `tol`.
///
/// With P_N the partial product over i <= N, `P_N (1 - q^-N / (q-1)) <= K_q <= P_N`.
/// The endpoints are rounded outward to f64, so `tol` must exceed the f64
/// resolution near K_q.
pub fn kq_constant(q: u64, tol: f64) -> Result<KqInterval> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("q = {q} must be at least 2")));
    }
    if tol.is_nan() || tol < 1e-15 || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol} must be finite and at least 1e-15"
        )));
    }
    let mut terms = 1u32;
    // tail width P_N q^-N/(q-1) <= q^-N/(q-1); aim for half the tolerance
    while (q as f64).powi(-(terms as i32)) / (q as f64 - 1.0) > tol / 2.0 {
        terms += 1;
    }
    let p = kq_partial_product(q, terms);
    let hi: f64 = format!("{p}").parse().expect("finite partial product");
    let tail = (q as f64).powi(-(terms as i32)) / (q as f64 - 1.0);
    let lo = hi * (1.0 - tail);
    Ok(KqInterval {
        lo: lo.next_down().next_down(),
        hi: hi.next_up(),
        terms,
    })
}

/// Number of m x eta matrices of rank r over F_q:
/// `prod_{j<r} (q^m - q^j)(q^eta - q^j) / (q^r - q^j)`.
pub fn rank_matrix_count(m: usize, eta: usize, r: usize, q: u64) -> Result<BigCount> {
    check_range("rank", r, 0, m.min(eta))?;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..r {
        num *= (q_pow(q, m) - q_pow(q, j)) * (q_pow(q, eta) - q_pow(q, j));
        den *= q_pow(q, r) - q_pow(q, j);
    }
    let (quot, rem) = num.div_rem(&den);
    assert!(rem.is_zero(), "rank count is not integral");
    Ok(quot)
}

/// Per-block rank counts `N_r` for r = 0..=min(m, eta).
pub(crate) fn rank_count_table(params: &SpaceParams) -> Vec<BigCount> {
    (0..=params.rank_cap())
        .map(|r| rank_matrix_count(params.m, params.eta, r, params.q()).expect("in range"))
        .collect()
}

/// Volume of the sum-rank sphere of radius r: sum over compositions of r
/// (parts capped at min(m, eta)) of products of per-block rank counts.
pub fn sphere_volume(params: &SpaceParams, r: usize) -> Result<BigCount> {
    check_range("radius", r, 0, params.max_weight())?;
    if r == 0 {
        return Ok(BigUint::one());
    }
    let table = rank_count_table(params);
    Ok(Compositions::capped(r, params.ell, params.rank_cap())
        .map(|c| c.parts.iter().map(|&p| &table[p]).product::<BigUint>())
        .sum())
}

/// Sphere volumes for every radius 0..=max_weight, by convolving the per-block
/// rank counts (same sum as [`sphere_volume`], organized as a polynomial power).
pub fn sphere_volumes(params: &SpaceParams) -> Vec<BigCount> {
    let table = rank_count_table(params);
    let mut acc = vec![BigUint::one()];
    for _ in 0..params.ell {
        let mut next = vec![BigUint::zero(); acc.len() + table.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, t) in table.iter().enumerate() {
                next[i + j] += a * t;
            }
        }
        acc = next;
    }
    acc
}

/// Volume of the sum-rank ball of radius r.
pub fn ball_volume(params: &SpaceParams, r: usize) -> Result<BigCount> {
    check_range("radius", r, 0, params.max_weight())?;
    (0..=r).map(|s| sphere_volume(params, s)).sum()
}

fn exponent_term(params: &SpaceParams, r: usize) -> BigRational {
    // (m + eta - r/ell) r
    let ell = BigRational::from_integer((params.ell as i64).into());
    let r_q = BigRational::from_integer((r as i64).into());
    let me = BigRational::from_integer(((params.m + params.eta) as i64).into());
    (me - &r_q / &ell) * r_q
}

fn lower_bound_common(params: &SpaceParams, r: usize) -> LogQ {
    // K_q^ell q^{(m+eta-r/ell) r - ell/4}
    let quarter = BigRational::new((params.ell as i64).into(), 4.into());
    LogQ::of_kq(params.q())
        .scale(params.ell as i64)
        .add(&LogQ::of_rational(&(exponent_term(params, r) - quarter)))
}

fn upper_bound_common(params: &SpaceParams, r: usize, binom: &BigCount) -> LogQ {
    LogQ::of_kq(params.q())
        .scale(-(params.ell as i64))
        .add(&LogQ::of_count(binom, params.q()))
        .add(&LogQ::of_rational(&exponent_term(params, r)))
}

/// `K_q^ell q^{(m+eta-r/ell)r - ell/4} <= |S(0,r)| <= K_q^-ell C(ell+r-1, r) q^{(m+eta-r/ell)r}`.
pub fn sphere_bounds(params: &SpaceParams, r: usize) -> Result<LogBounds> {
    check_range("radius", r, 0, params.max_weight())?;
    Ok(LogBounds {
        lower: lower_bound_common(params, r),
        upper: upper_bound_common(params, r, &binomial(params.ell + r - 1, r)),
    })
}

/// `K_q^ell q^{(m+eta-r/ell)r - ell/4} <= |B(0,r)| <= K_q^-ell C(ell+r, ell) q^{(m+eta-r/ell)r}`.
pub fn ball_bounds(params: &SpaceParams, r: usize) -> Result<LogBounds> {
    check_range("radius", r, 0, params.max_weight())?;
    Ok(LogBounds {
        lower: lower_bound_common(params, r),
        upper: upper_bound_common(params, r, &binomial(params.ell + r, params.ell)),
    })
}

/// Exact number of ell-decomposable w-dimensional subspaces of (F_q^eta)^ell,
/// with the bound pair
/// `q^{eta w - w^2/ell} <= |D| <= K_q^-ell C(w+ell-1, ell-1) q^{eta w - w^2/ell}`.
#[derive(Debug, Clone)]
pub struct DecomposableCount {
    pub exact: BigCount,
    pub bounds: LogBounds,
}

impl DecomposableCount {
    pub fn within_bounds(&self, q: u64) -> bool {
        self.bounds.contains(&self.exact, q)
    }
}

/// `sum_{w in CP_ell(w)} prod_i [eta w_i]_q`, parts capped at eta.
pub fn decomposable_count_exact(eta: usize, ell: usize, w: usize, q: u64) -> Result<BigCount> {
    check_range("dimension w", w, 0, eta * ell)?;
    let gbs: Vec<BigUint> = (0..=eta).map(|k| gaussian_binomial(eta, k, q)).collect();
    Ok(Compositions::capped(w, ell, eta)
        .map(|c| c.parts.iter().map(|&p| &gbs[p]).product::<BigUint>())
        .sum())
}

pub fn decomposable_count(eta: usize, ell: usize, w: usize, q: u64) -> Result<DecomposableCount> {
    let exact = decomposable_count_exact(eta, ell, w, q)?;
    // eta w - w^2/ell
    let expo = BigRational::from_integer(((eta * w) as i64).into())
        - BigRational::new(((w * w) as i64).into(), (ell as i64).into());
    let base = LogQ::of_rational(&expo);
    let upper = LogQ::of_kq(q)
        .scale(-(ell as i64))
        .add(&LogQ::of_count(&binomial(w + ell - 1, ell - 1), q))
        .add(&base);
    Ok(DecomposableCount {
        exact,
        bounds: LogBounds { lower: base, upper },
    })
}

/// Checks `[eta*ell w]_q >= sum_{CP_ell(w)} prod_i [eta w_i]_q`: the
/// Grassmannian of the product space dominates its decomposable part.
pub fn grassmannian_dominates_decomposable(eta: usize, ell: usize, w: usize, q: u64) -> bool {
    match decomposable_count_exact(eta, ell, w, q) {
        Ok(d) => gaussian_binomial(eta * ell, w, q) >= d,
        Err(_) => false,
    }
}

fn check_fraction(name: &str, x: &BigRational, allow_one: bool) -> Result<()> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let ok = *x > zero && (*x < one || (allow_one && *x == one));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {x} must lie in (0, 1{}",
            if allow_one { "]" } else { ")" }
        )))
    }
}

/// `kappa_b(rho) = rho + rho b - rho^2 b`; the list-decoding capacity is `1 - kappa_b(rho)`.
pub fn kappa(rho: &BigRational, b: &BigRational) -> Result<BigRational> {
    check_fraction("rho", rho, false)?;
    check_fraction("b", b, true)?;
    Ok(rho + rho * b - rho * rho * b)
}

pub fn capacity(rho: &BigRational, b: &BigRational) -> Result<BigRational> {
    Ok(BigRational::one() - kappa(rho, b)?)
}

/// Standard q-ary entropy
/// `H_q(rho) = rho log_q(q-1) - rho log_q rho - (1-rho) log_q (1-rho)`.
pub fn q_ary_entropy(rho: f64, q: u64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must lie in (0, 1)")));
    }
    let lq = (q as f64).ln();
    Ok((rho * ((q - 1) as f64).ln() - rho * rho.ln() - (1.0 - rho) * (1.0 - rho).ln()) / lq)
}

/// Parses `"0.25"`, `"1/4"` or `"3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as a rational"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(BigRational::new(n.into(), d.into()));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: num_bigint::BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
