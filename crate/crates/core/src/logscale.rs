//! High-precision logarithms for comparing exact counts against bounds that
//! contain irrational factors (powers of K_q, fractional powers of q).
//!
//! Values are carried as `log_q(x)` in 128-bit binary floating point.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Working precision in bits.
pub const PRECISION: usize = 128;

/// Comparison margin for log-domain sandwich checks.
pub const LOG_MARGIN: f64 = 1e-9;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
    static LN_K: RefCell<HashMap<u64, BigFloat>> = RefCell::new(HashMap::new());
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub(crate) fn bf_u64(x: u64) -> BigFloat {
    BigFloat::from_u64(x, PRECISION)
}

pub(crate) fn bf_ratio(num: i64, den: i64) -> BigFloat {
    BigFloat::from_i64(num, PRECISION).div(&BigFloat::from_i64(den, PRECISION), PRECISION, RM)
}

/// Natural log of a positive integer. Only the top 128 bits enter the
/// mantissa; the rest contributes through `shift * ln 2`, relative error 2^-127.
pub(crate) fn ln_biguint(x: &BigUint) -> BigFloat {
    assert!(x.bits() > 0, "logarithm of zero");
    let bits = x.bits();
    let (top, shift) = if bits <= 128 {
        (x.clone(), 0u64)
    } else {
        (x >> (bits - 128), bits - 128)
    };
    let top = top.to_u128().expect("fits in 128 bits");
    with_consts(|cc| {
        let t = BigFloat::from_u128(top, PRECISION).ln(PRECISION, RM, cc);
        if shift == 0 {
            t
        } else {
            let ln2 = bf_u64(2).ln(PRECISION, RM, cc);
            t.add(&ln2.mul(&bf_u64(shift), PRECISION, RM), PRECISION, RM)
        }
    })
}

fn ln_u64(x: u64) -> BigFloat {
    with_consts(|cc| bf_u64(x).ln(PRECISION, RM, cc))
}

/// Partial product `prod_{i<=terms} (1 - q^-i)` at working precision.
pub(crate) fn kq_partial_product(q: u64, terms: u32) -> BigFloat {
    let one = bf_u64(1);
    let qf = bf_u64(q);
    let mut power = one.clone();
    let mut prod = one.clone();
    for _ in 0..terms {
        power = power.mul(&qf, PRECISION, RM);
        let term = one.sub(&one.div(&power, PRECISION, RM), PRECISION, RM);
        prod = prod.mul(&term, PRECISION, RM);
    }
    prod
}

/// ln K_q with truncation error below 2^-140.
fn ln_kq(q: u64) -> BigFloat {
    LN_K.with(|m| {
        m.borrow_mut()
            .entry(q)
            .or_insert_with(|| {
                let terms = 140u32.div_ceil(63 - q.leading_zeros()).max(1) + 2;
                let p = kq_partial_product(q, terms);
                with_consts(|cc| p.ln(PRECISION, RM, cc))
            })
            .clone()
    })
}

/// A value `log_q(x)` for a fixed base q.
#[derive(Clone)]
pub struct LogQ {
    value: BigFloat,
}

impl fmt::Debug for LogQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogQ({})", self.value)
    }
}

impl fmt::Display for LogQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.to_f64())
    }
}

impl LogQ {
    fn from_ln(ln: BigFloat, q: u64) -> Self {
        LogQ {
            value: ln.div(&ln_u64(q), PRECISION, RM),
        }
    }

    pub fn zero() -> Self {
        LogQ { value: bf_u64(0) }
    }

    pub fn of_count(x: &BigUint, q: u64) -> Self {
        Self::from_ln(ln_biguint(x), q)
    }

    /// log_q K_q (negative).
    pub fn of_kq(q: u64) -> Self {
        Self::from_ln(ln_kq(q), q)
    }

    /// An exact rational exponent, e.g. `(m + eta - r/ell) r - ell/4`.
    pub fn of_rational(r: &BigRational) -> Self {
        let num = r.numer().to_i64().expect("small numerator");
        let den = r.denom().to_i64().expect("small denominator");
        LogQ {
            value: bf_ratio(num, den),
        }
    }

    pub fn add(&self, other: &LogQ) -> LogQ {
        LogQ {
            value: self.value.add(&other.value, PRECISION, RM),
        }
    }

    pub fn scale(&self, k: i64) -> LogQ {
        LogQ {
            value: self.value.mul(&BigFloat::from_i64(k, PRECISION), PRECISION, RM),
        }
    }

    pub fn to_f64(&self) -> f64 {
        format!("{}", self.value).parse().unwrap_or(f64::NAN)
    }

    /// `self <= other + margin`.
    pub fn le_with_margin(&self, other: &LogQ, margin: f64) -> bool {
        let rhs = other
            .value
            .add(&BigFloat::from_f64(margin, PRECISION), PRECISION, RM);
        matches!(self.value.partial_cmp(&rhs), Some(Ordering::Less | Ordering::Equal))
    }
}

/// Rounds a probability-like float to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}
