//! Nonzero integral ideals stored as sorted prime-exponent vectors.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{split_prime, FieldKind, NumberField, PrimeIdeal};

/// An ideal norm. Values that fit in a `u64` are always `Small`, so the
/// derived equality and hashing agree with numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Norm {
    Small(u64),
    Big(BigUint),
}

impl Norm {
    pub fn one() -> Self {
        Norm::Small(1)
    }

    fn from_big(b: BigUint) -> Self {
        match b.to_u64() {
            Some(v) => Norm::Small(v),
            None => Norm::Big(b),
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Norm::Small(v) => Some(*v),
            Norm::Big(_) => None,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Norm::Small(v) => BigUint::from(*v),
            Norm::Big(b) => b.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Norm::Small(v) => *v as f64,
            Norm::Big(b) => b.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    pub fn mul(&self, other: &Norm) -> Norm {
        if let (Norm::Small(a), Norm::Small(b)) = (self, other) {
            if let Some(v) = a.checked_mul(*b) {
                return Norm::Small(v);
            }
        }
        Norm::from_big(self.to_biguint() * other.to_biguint())
    }

    pub fn pow_u64(base: u64, exp: u32) -> Norm {
        match base.checked_pow(exp) {
            Some(v) => Norm::Small(v),
            None => Norm::Big(BigUint::from(base).pow(exp)),
        }
    }

    /// `floor(x / self)`, saturating to 0 when the norm exceeds `x`.
    pub fn div_floor(&self, x: u64) -> u64 {
        match self {
            Norm::Small(v) => x / v,
            Norm::Big(_) => 0,
        }
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Norm::Small(a), Norm::Small(b)) => a.cmp(b),
            (Norm::Small(_), Norm::Big(_)) => Ordering::Less,
            (Norm::Big(_), Norm::Small(_)) => Ordering::Greater,
            (Norm::Big(a), Norm::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Small(v) => write!(f, "{v}"),
            Norm::Big(b) => write!(f, "{b}"),
        }
    }
}

/// A nonzero integral ideal. The empty factor list is `O_K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    field: NumberField,
    factors: Vec<(PrimeIdeal, u32)>,
    norm: Norm,
}

fn norm_of(factors: &[(PrimeIdeal, u32)]) -> Norm {
    factors
        .iter()
        .fold(Norm::one(), |acc, (q, e)| acc.mul(&Norm::pow_u64(q.norm, *e)))
}

impl Ideal {
    pub fn unit(field: NumberField) -> Self {
        Ideal {
            field,
            factors: Vec::new(),
            norm: Norm::one(),
        }
    }

    /// Builds an ideal from arbitrary `(prime, exponent)` pairs: sorts them,
    /// merges repeated primes and drops zero exponents.
    pub fn from_factors(field: NumberField, mut factors: Vec<(PrimeIdeal, u32)>) -> Self {
        factors.sort_by_key(|a| a.0);
        let mut merged: Vec<(PrimeIdeal, u32)> = Vec::with_capacity(factors.len());
        for (q, e) in factors {
            match merged.last_mut() {
                Some((last, acc)) if *last == q => *acc += e,
                _ => merged.push((q, e)),
            }
        }
        merged.retain(|&(_, e)| e > 0);
        let norm = norm_of(&merged);
        Ideal {
            field,
            factors: merged,
            norm,
        }
    }

    /// Factors already sorted, merged and nonzero; norm known to fit `u64`.
    pub(crate) fn from_sorted_unchecked(field: NumberField, factors: Vec<(PrimeIdeal, u32)>, norm: u64) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        Ideal {
            field,
            factors,
            norm: Norm::Small(norm),
        }
    }

    pub fn prime(field: NumberField, q: PrimeIdeal) -> Self {
        Self::from_factors(field, vec![(q, 1)])
    }

    /// The principal ideal `n O_K` for a positive rational integer `n`.
    pub fn principal(field: NumberField, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("the zero ideal is excluded".into()));
        }
        let mut factors = Vec::new();
        for (p, e) in crate::arith::factor(n) {
            for (q, k) in split_prime(&field, p)? {
                factors.push((q, k * e));
            }
        }
        Ok(Self::from_factors(field, factors))
    }

    /// Builds an ideal from `(p, conjugate_index, exponent)` triples.
    pub fn from_triples(field: NumberField, triples: &[(u64, u8, u32)]) -> Result<Self> {
        let mut factors = Vec::with_capacity(triples.len());
        for &(p, conj, e) in triples {
            let q = split_prime(&field, p)?
                .into_iter()
                .map(|(q, _)| q)
                .find(|q| q.conjugate_index == conj)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("no prime above {p} with conjugate index {conj} in {field}"))
                })?;
            factors.push((q, e));
        }
        Ok(Self::from_factors(field, factors))
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent_of(&self, q: &PrimeIdeal) -> u32 {
        self.factors
            .binary_search_by(|(r, _)| r.cmp(q))
            .map_or(0, |i| self.factors[i].1)
    }

    pub fn triples(&self) -> Vec<(u64, u8, u32)> {
        self.factors.iter().map(|(q, e)| (q.p, q.conjugate_index, *e)).collect()
    }

    /// Largest prime-ideal exponent, 0 for `O_K`.
    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).max().unwrap_or(0)
    }

    /// Calls `visit` with the norm of every divisor of `self` (with
    /// repetition across distinct divisors of equal norm). Stops early and
    /// returns `true` as soon as `visit` does.
    pub fn any_divisor_norm(&self, mut visit: impl FnMut(&Norm) -> bool) -> bool {
        fn walk(factors: &[(PrimeIdeal, u32)], acc: Norm, visit: &mut dyn FnMut(&Norm) -> bool) -> bool {
            let Some(((q, e), rest)) = factors.split_first() else {
                return visit(&acc);
            };
            let mut cur = acc;
            for k in 0..=*e {
                if walk(rest, cur.clone(), visit) {
                    return true;
                }
                if k < *e {
                    cur = cur.mul(&Norm::Small(q.norm));
                }
            }
            false
        }
        walk(&self.factors, Norm::one(), &mut visit)
    }

    fn merge_with(&self, other: &Ideal, combine: impl Fn(u32, u32) -> u32) -> Result<Ideal> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let (a, b) = (&self.factors, &other.factors);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (q, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0, combine(a[i - 1].1, 0))
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0, combine(0, b[j - 1].1))
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0, combine(a[i - 1].1, b[j - 1].1))
                }
            };
            if e > 0 {
                out.push((q, e));
            }
        }
        let norm = norm_of(&out);
        Ok(Ideal {
            field: self.field,
            factors: out,
            norm,
        })
    }
}

impl Ord for Ideal {
    /// Norm first, then lexicographic comparison of the factor lists under
    /// the global prime order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm.cmp(&other.norm).then_with(|| {
            let a = self.factors.iter().map(|(q, e)| (q, e));
            let b = other.factors.iter().map(|(q, e)| (q, e));
            a.cmp(b)
        })
    }
}

impl PartialOrd for Ideal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("O_K");
        }
        if self.field.kind() == FieldKind::Rational {
            return write!(f, "({})", self.norm);
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(q, e)| if *e == 1 { q.to_string() } else { format!("{q}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

pub fn multiply(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    a.merge_with(b, |x, y| x + y)
}

/// Intersection of a nonempty set of ideals, their least common multiple.
pub fn intersect(ideals: &[Ideal]) -> Result<Ideal> {
    let (first, rest) = ideals.split_first().ok_or(Error::EmptySet)?;
    rest.iter()
        .try_fold(first.clone(), |acc, b| acc.merge_with(b, u32::max))
}

/// The ideal sum `a + b`, their greatest common divisor.
pub fn gcd(a: &Ideal, b: &Ideal) -> Result<Ideal> {
    a.merge_with(b, u32::min)
}

/// Whether `a` divides `b`, i.e. `b` is contained in `a`.
pub fn divides(a: &Ideal, b: &Ideal) -> Result<bool> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    Ok(divides_same_field(a, b))
}

pub(crate) fn divides_same_field(a: &Ideal, b: &Ideal) -> bool {
    if a.norm > b.norm {
        return false;
    }
    let mut j = 0;
    for (q, e) in &a.factors {
        while j < b.factors.len() && b.factors[j].0 < *q {
            j += 1;
        }
        match b.factors.get(j) {
            Some((r, f)) if r == q && f >= e => j += 1,
            _ => return false,
        }
    }
    true
}
