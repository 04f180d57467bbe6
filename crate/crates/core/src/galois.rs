//! Arithmetic in small finite fields F_q, q = p^e <= 256.
//!
//! Elements are stored as their canonical index `sum_i c_i p^i`, where
//! `c_0, .., c_{e-1}` are the coefficients of the polynomial representative
//! in the basis `1, x, .., x^{e-1}`. Index order is the canonical element
//! order used everywhere in the crate: lexicographic on the coefficient
//! list read from the leading coefficient down. Index 0 is zero, index 1
//! is one.
//!
//! All operations are table lookups; tables are built once per field and
//! shared behind an `Arc`, so `FieldSpec` is cheap to clone and `Send + Sync`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest field order supported by the lookup tables.
pub const MAX_ORDER: u64 = 256;

/// Built-in irreducible moduli, coefficients listed from the constant term up.
///
/// | q  | modulus          |
/// |----|------------------|
/// | 4  | x^2 + x + 1      |
/// | 8  | x^3 + x + 1      |
/// | 9  | x^2 + 2x + 2     |
/// | 16 | x^4 + x + 1      |
/// | 25 | x^2 + 4x + 2     |
/// | 27 | x^3 + 2x + 1     |
pub const BUILTIN_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (3, 3, &[1, 2, 0, 1]),
];

/// A field element, identified by its canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fq(pub u8);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Serialize for Fq {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    e: u32,
    modulus: Vec<u32>,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// A validated finite field description together with its operation tables.
#[derive(Clone)]
pub struct FieldSpec {
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.tables.p)
            .field("e", &self.tables.e)
            .field("modulus", &self.tables.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tables, &other.tables)
            || (self.tables.p == other.tables.p
                && self.tables.e == other.tables.e
                && self.tables.modulus == other.tables.modulus)
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tables.p.hash(state);
        self.tables.e.hash(state);
        self.tables.modulus.hash(state);
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p (low-first coefficients).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * mc) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive factor search: `m` (monic, degree e) is irreducible iff no monic
/// polynomial of degree 1..=e/2 divides it.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let e = m.len() - 1;
    for d in 1..=e / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if poly_rem(m, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Builds and validates a field.
///
/// `modulus` is a monic degree-`e` polynomial with coefficients from the
/// constant term up; it is ignored for prime fields. When absent for `e > 1`
/// the built-in table is consulted.
pub fn field_build(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::NonPrime(p));
    }
    if e == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = (p as u64)
        .checked_pow(e)
        .filter(|&q| q <= MAX_ORDER)
        .ok_or(Error::FieldTooLarge((p as u64).saturating_pow(e)))?;

    let modulus: Vec<u32> = if e == 1 {
        vec![0, 1]
    } else if let Some(m) = modulus {
        if m.len() != e as usize + 1 {
            return Err(Error::InvalidModulus(format!(
                "expected {} coefficients, got {}",
                e + 1,
                m.len()
            )));
        }
        if m.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!(
                "coefficients must lie in [0, {p})"
            )));
        }
        if m[e as usize] != 1 {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if !is_irreducible(m, p) {
            return Err(Error::ReducibleModulus {
                p,
                modulus: m.to_vec(),
            });
        }
        m.to_vec()
    } else {
        BUILTIN_MODULI
            .iter()
            .find(|(bp, be, _)| *bp == p && *be == e)
            .map(|(_, _, m)| m.to_vec())
            .ok_or(Error::NoBuiltinModulus(q))?
    };

    Ok(FieldSpec {
        tables: Arc::new(Tables::build(p, e, modulus, q as usize)),
    })
}

impl Tables {
    fn build(p: u32, e: u32, modulus: Vec<u32>, q: usize) -> Self {
        let digits = |mut idx: usize| -> Vec<u32> {
            let mut c = Vec::with_capacity(e as usize);
            for _ in 0..e {
                c.push((idx % p as usize) as u32);
                idx /= p as usize;
            }
            c
        };
        let index = |c: &[u32]| -> usize {
            c.iter()
                .rev()
                .fold(0usize, |acc, &d| acc * p as usize + d as usize)
        };
        let coeffs: Vec<Vec<u32>> = (0..q).map(digits).collect();

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u32> = coeffs[a]
                    .iter()
                    .zip(&coeffs[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * q + b] = index(&s) as u8;

                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, x) in coeffs[a].iter().enumerate() {
                    for (j, y) in coeffs[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = if e == 1 {
                    prod
                } else {
                    poly_rem(&prod, &modulus, p)
                };
                r.resize(e as usize, 0);
                mul[a * q + b] = index(&r) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
            }
        }
        Tables {
            p,
            e,
            modulus,
            q,
            add,
            mul,
            neg,
            inv,
        }
    }
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        field_build(p, 1, None)
    }

    /// The field of order `q`, using the built-in modulus table when q is not prime.
    pub fn of_order(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameter(format!(
                "field order {q} is not a prime power"
            )));
        }
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge(q));
        }
        let p = (2..=q as u32).find(|d| q.is_multiple_of(*d as u64)).unwrap();
        let mut e = 0u32;
        let mut t = q;
        while t.is_multiple_of(p as u64) {
            t /= p as u64;
            e += 1;
        }
        if t != 1 {
            return Err(Error::InvalidParameter(format!(
                "field order {q} is not a prime power"
            )));
        }
        field_build(p, e, None)
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.tables.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.tables.e
    }

    pub fn modulus(&self) -> &[u32] {
        &self.tables.modulus
    }

    /// Field cardinality q.
    #[inline]
    pub fn order(&self) -> usize {
        self.tables.q
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.tables.add[a.index() * self.tables.q + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        Fq(self.tables.mul[a.index() * self.tables.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        Fq(self.tables.neg[a.index()])
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fq(self.tables.inv[a.index()]))
        }
    }

    /// Element with the given canonical index.
    pub fn element(&self, index: u64) -> Result<Fq> {
        if index < self.tables.q as u64 {
            Ok(Fq(index as u8))
        } else {
            Err(Error::InvalidElement {
                index,
                q: self.tables.q as u64,
            })
        }
    }

    /// Element with the given polynomial coefficients (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fq> {
        let p = self.tables.p;
        if coeffs.len() != self.tables.e as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameter(format!(
                "coefficient list {coeffs:?} is not valid for GF({})",
                self.tables.q
            )));
        }
        let idx = coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * p as usize + d as usize);
        Ok(Fq(idx as u8))
    }

    pub fn coeffs(&self, a: Fq) -> Vec<u32> {
        let p = self.tables.p as usize;
        let mut idx = a.index();
        (0..self.tables.e)
            .map(|_| {
                let d = (idx % p) as u32;
                idx /= p;
                d
            })
            .collect()
    }

    /// All q elements in canonical order.
    pub fn elements(&self) -> Vec<Fq> {
        (0..self.tables.q).map(|i| Fq(i as u8)).collect()
    }

    /// Uniform element: a uniform index into the canonical order.
    #[inline]
    pub fn random<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(0..self.tables.q) as u8)
    }

    /// Uniform nonzero element.
    #[inline]
    pub fn random_nonzero<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Fq {
        Fq(rng.gen_range(1..self.tables.q) as u8)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    p: u32,
    e: u32,
    modulus: Vec<u32>,
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecRepr {
            p: self.tables.p,
            e: self.tables.e,
            modulus: self.tables.modulus.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldSpecRepr::deserialize(deserializer)?;
        field_build(repr.p, repr.e, Some(&repr.modulus)).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn builtin_fields() -> Vec<FieldSpec> {
        let mut v: Vec<FieldSpec> = [2, 3, 5, 7]
            .iter()
            .map(|&p| FieldSpec::prime(p).unwrap())
            .collect();
        for &(p, e, _) in BUILTIN_MODULI {
            v.push(field_build(p, e, None).unwrap());
        }
        v
    }

    #[test]
    fn prime_field_needs_no_modulus() {
        let f = field_build(2, 1, None).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.add(Fq::ONE, Fq::ONE), Fq::ZERO);
    }

    #[test]
    fn non_prime_characteristic_is_rejected() {
        assert_eq!(field_build(4, 1, None).unwrap_err(), Error::NonPrime(4));
    }

    #[test]
    fn reducible_or_missing_modulus_is_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(
            field_build(2, 2, Some(&[1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
        assert_eq!(
            field_build(7, 2, None).unwrap_err(),
            Error::NoBuiltinModulus(49)
        );
        assert!(field_build(7, 2, Some(&[1, 0, 1])).is_ok()); // -1 is a non-square mod 7
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for &(p, _, m) in BUILTIN_MODULI {
            assert!(is_irreducible(m, p), "{m:?} over F_{p}");
        }
    }

    #[test]
    fn gf4_alpha_squared_is_alpha_plus_one() {
        let f = field_build(2, 2, Some(&[1, 1, 1])).unwrap();
        let alpha = f.from_coeffs(&[0, 1]).unwrap();
        let alpha_plus_one = f.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f.mul(alpha, alpha), alpha_plus_one);
    }

    #[test]
    fn gf3_inverse_of_two() {
        let f = FieldSpec::prime(3).unwrap();
        assert_eq!(f.inv(Fq(2)).unwrap(), Fq(2));
        assert_eq!(f.inv(Fq::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn element_order_starts_with_zero_and_one() {
        assert_eq!(FieldSpec::prime(2).unwrap().elements(), vec![Fq(0), Fq(1)]);
        assert_eq!(
            FieldSpec::prime(3).unwrap().elements(),
            vec![Fq(0), Fq(1), Fq(2)]
        );
        let f4 = FieldSpec::of_order(4).unwrap();
        let els = f4.elements();
        assert_eq!(els.len(), 4);
        assert_eq!(f4.coeffs(els[1]), vec![1, 0]);
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for f in builtin_fields() {
            for _ in 0..1000 {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                }
            }
        }
    }

    #[test]
    fn elements_are_closed_under_operations() {
        for f in builtin_fields().into_iter().filter(|f| f.order() <= 9) {
            let els = f.elements();
            let set: std::collections::HashSet<_> = els.iter().copied().collect();
            assert_eq!(set.len(), f.order());
            for &a in &els {
                for &b in &els {
                    assert!(set.contains(&f.add(a, b)));
                    assert!(set.contains(&f.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn serializes_as_p_e_modulus() {
        let f = FieldSpec::of_order(4).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"p":2,"e":2,"modulus":[1,1,1]}"#);
        let back: FieldSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
