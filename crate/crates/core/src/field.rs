//! Number fields of degree 1 and 2, prime ideals and their global numbering.
//!
//! A quadratic field `Q(sqrt m)` has fundamental discriminant `D = m` when
//! `m = 1 mod 4` and `D = 4m` otherwise. A rational prime `p` splits, stays
//! inert or ramifies according to the Kronecker symbol `(D/p)`. Prime ideals
//! are ordered by `(norm, p, conjugate_index)`; conjugate index 0 of a split
//! prime is the one containing `theta - r` where `r <= p/2` is the smaller
//! root of the defining polynomial of `theta` modulo `p`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, is_squarefree, primes_up_to};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Rational,
    Quadratic { m: i64 },
}

/// Size of the unit group of `O_K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitCount {
    Finite(u32),
    Infinite,
}

impl fmt::Display for UnitCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitCount::Finite(w) => write!(f, "{w}"),
            UnitCount::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NumberField {
    kind: FieldKind,
}

impl NumberField {
    pub fn rational() -> Self {
        NumberField {
            kind: FieldKind::Rational,
        }
    }

    /// `Q(sqrt m)` for squarefree `m` other than 0 and 1.
    pub fn quadratic(m: i64) -> Result<Self> {
        if m == 0 || m == 1 {
            return Err(Error::DegenerateM(m));
        }
        if !is_squarefree(m) {
            return Err(Error::NotSquarefree(m));
        }
        Ok(NumberField {
            kind: FieldKind::Quadratic { m },
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            FieldKind::Rational => 1,
            FieldKind::Quadratic { .. } => 2,
        }
    }

    pub fn discriminant(&self) -> i64 {
        match self.kind {
            FieldKind::Rational => 1,
            FieldKind::Quadratic { m } => {
                if m.rem_euclid(4) == 1 {
                    m
                } else {
                    4 * m
                }
            }
        }
    }

    pub fn is_imaginary_quadratic(&self) -> bool {
        matches!(self.kind, FieldKind::Quadratic { m } if m < 0)
    }

    pub fn unit_count(&self) -> UnitCount {
        match self.kind {
            FieldKind::Rational => UnitCount::Finite(2),
            FieldKind::Quadratic { m } if m < 0 => match self.discriminant() {
                -4 => UnitCount::Finite(4),
                -3 => UnitCount::Finite(6),
                _ => UnitCount::Finite(2),
            },
            FieldKind::Quadratic { .. } => UnitCount::Infinite,
        }
    }

    /// Residue of the Dedekind zeta function at `s = 1` when it is available
    /// in closed form (the rationals and imaginary quadratic fields).
    pub fn analytic_residue(&self) -> Option<f64> {
        match self.kind {
            FieldKind::Rational => Some(1.0),
            _ => analytic_residue_imag_quadratic(self).ok(),
        }
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => f.write_str("Q"),
            FieldKind::Quadratic { m } => write!(f, "Q(sqrt {m})"),
        }
    }
}

impl FromStr for NumberField {
    type Err = Error;

    /// Accepts `Q`, `Q(sqrt m)` and `Q(sqrt(m))`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "Q" {
            return Ok(NumberField::rational());
        }
        let inner = compact
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad field string {s:?}")))?;
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        let m: i64 = inner
            .parse()
            .map_err(|_| Error::Parse(format!("bad field string {s:?}")))?;
        NumberField::quadratic(m)
    }
}

impl Serialize for NumberField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NumberField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn make_rational_field() -> NumberField {
    NumberField::rational()
}

pub fn make_quadratic_field(m: i64) -> Result<NumberField> {
    NumberField::quadratic(m)
}

/// A prime ideal of `O_K`, identified by the rational prime below it and a
/// conjugate index that separates the two primes above a split `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub ramification: u8,
    pub residue_degree: u8,
    pub conjugate_index: u8,
    pub norm: u64,
}

impl PrimeIdeal {
    fn new(p: u64, e: u8, f: u8, conj: u8) -> Self {
        PrimeIdeal {
            p,
            ramification: e,
            residue_degree: f,
            conjugate_index: conj,
            norm: p.pow(f as u32),
        }
    }

    fn key(&self) -> (u64, u64, u8) {
        (self.norm, self.p, self.conjugate_index)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({},{})", self.p, self.conjugate_index)
    }
}

/// Kronecker symbol `(d/n)` for positive `n`.
pub fn kronecker_symbol(d: i64, n: u64) -> i8 {
    assert!(n > 0, "kronecker_symbol needs n > 0");
    let twos = n.trailing_zeros();
    let odd = n >> twos;
    let mut result: i8 = 1;
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            result = match d.rem_euclid(8) {
                1 | 7 => 1,
                _ => -1,
            };
        }
    }
    result * jacobi(d.rem_euclid(odd as i64) as u64, odd)
}

fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The prime ideals above `p` with their exponents in `p O_K`.
pub fn split_prime(field: &NumberField, p: u64) -> Result<Vec<(PrimeIdeal, u32)>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(split_known_prime(field, p))
}

fn split_known_prime(field: &NumberField, p: u64) -> Vec<(PrimeIdeal, u32)> {
    match field.kind {
        FieldKind::Rational => vec![(PrimeIdeal::new(p, 1, 1, 0), 1)],
        FieldKind::Quadratic { .. } => match kronecker_symbol(field.discriminant(), p) {
            1 => vec![(PrimeIdeal::new(p, 1, 1, 0), 1), (PrimeIdeal::new(p, 1, 1, 1), 1)],
            -1 => vec![(PrimeIdeal::new(p, 1, 2, 0), 1)],
            _ => vec![(PrimeIdeal::new(p, 2, 1, 0), 2)],
        },
    }
}

/// For a split prime, the root `r` of the defining polynomial of `theta`
/// modulo `p` such that `(p, theta - r)` is the prime with the given
/// conjugate index. Here `theta = sqrt m`, or `(1 + sqrt m)/2` when
/// `m = 1 mod 4`. Returns `None` if `p` does not split.
pub fn split_root(field: &NumberField, p: u64, conjugate_index: u8) -> Option<u64> {
    let FieldKind::Quadratic { m } = field.kind else {
        return None;
    };
    if !is_prime(p) || kronecker_symbol(field.discriminant(), p) != 1 {
        return None;
    }
    let mut roots: Vec<u64> = if m.rem_euclid(4) == 1 {
        // theta^2 - theta - (m-1)/4
        let c = ((m - 1) / 4).rem_euclid(p as i64) as u64;
        if p == 2 {
            (0..2)
                .filter(|&x| (x * x + 2 * p - x - c % p).is_multiple_of(p))
                .collect()
        } else {
            let s = sqrt_mod_prime(m.rem_euclid(p as i64) as u64, p)?;
            let inv2 = p.div_ceil(2);
            let r1 = ((1 + s) as u128 * inv2 as u128 % p as u128) as u64;
            let r2 = ((1 + p - s) as u128 * inv2 as u128 % p as u128) as u64;
            vec![r1, r2]
        }
    } else {
        let s = sqrt_mod_prime(m.rem_euclid(p as i64) as u64, p)?;
        vec![s, p - s]
    };
    roots.sort_unstable();
    roots.get(conjugate_index as usize).copied()
}

/// Tonelli-Shanks square root modulo an odd prime.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    let pw = |b: u64, e: u64| {
        let (mut acc, mut b, mut e) = (1u128, b as u128 % p as u128, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p as u128;
            }
            b = b * b % p as u128;
            e >>= 1;
        }
        acc as u64
    };
    if pw(a, (p - 1) / 2) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pw(z, (p - 1) / 2) != p - 1 {
        z += 1;
    }
    let mulm = |x: u64, y: u64| (x as u128 * y as u128 % p as u128) as u64;
    let mut m = s;
    let mut c = pw(z, q);
    let mut t = pw(a, q);
    let mut r = pw(a, q.div_ceil(2));
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mulm(tt, tt);
            i += 1;
        }
        let b = pw(c, 1 << (m - i - 1));
        m = i;
        c = mulm(b, b);
        t = mulm(t, c);
        r = mulm(r, b);
    }
    Some(r.min(p - r))
}

/// All prime ideals of norm at most `bound`, in the global order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeNumbering {
    field: NumberField,
    bound: u64,
    primes: Vec<PrimeIdeal>,
}

impl PrimeNumbering {
    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[PrimeIdeal] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&PrimeIdeal> {
        self.primes.get(i)
    }

    pub fn index_of(&self, prime: &PrimeIdeal) -> Option<usize> {
        self.primes.binary_search(prime).ok()
    }

    /// The first `k` primes, `k` clamped to the available count.
    pub fn prefix(&self, k: usize) -> &[PrimeIdeal] {
        &self.primes[..k.min(self.primes.len())]
    }

    pub fn norms(&self) -> Vec<u64> {
        self.primes.iter().map(|p| p.norm).collect()
    }
}

pub fn primes_up_to_norm(field: &NumberField, bound: u64) -> PrimeNumbering {
    let rational = primes_up_to(bound);
    let mut primes: Vec<PrimeIdeal> = rational
        .par_chunks(4096)
        .flat_map_iter(|chunk| {
            chunk
                .iter()
                .flat_map(|&p| split_known_prime(field, p))
                .map(|(q, _)| q)
                .filter(|q| q.norm <= bound)
                .collect::<Vec<_>>()
        })
        .collect();
    primes.sort_unstable();
    PrimeNumbering {
        field: *field,
        bound,
        primes,
    }
}

/// The smallest `k` primes of `field`, found by doubling the norm bound.
pub fn first_primes(field: &NumberField, k: usize) -> PrimeNumbering {
    let mut bound = 16u64.max(4 * k as u64);
    loop {
        let mut numbering = primes_up_to_norm(field, bound);
        if numbering.len() >= k {
            // the k-th prime and everything before it is final: any prime
            // missing from this bound has norm > bound
            numbering.primes.truncate(k);
            numbering.bound = numbering.primes.last().map_or(1, |p| p.norm);
            return numbering;
        }
        bound *= 2;
    }
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => d != 1 && is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Number of reduced positive definite forms `(a, b, c)` of discriminant `d`.
pub fn class_number_imag_quadratic(d: i64) -> Result<u64> {
    if d >= 0 {
        return Err(Error::NotNegative(d));
    }
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamental(d));
    }
    let abs = d.unsigned_abs() as i64;
    let mut count = 0;
    let mut a = 1i64;
    while 3 * a * a <= abs {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            count += 1;
        }
        a += 1;
    }
    Ok(count)
}

/// `2 pi h / (w sqrt|D|)`, the residue at `s = 1` of the Dedekind zeta
/// function of an imaginary quadratic field.
pub fn analytic_residue_imag_quadratic(field: &NumberField) -> Result<f64> {
    if !field.is_imaginary_quadratic() {
        return Err(Error::UnsupportedField(field.to_string()));
    }
    let d = field.discriminant();
    let h = class_number_imag_quadratic(d)?;
    let UnitCount::Finite(w) = field.unit_count() else {
        unreachable!("imaginary quadratic fields have finitely many units")
    };
    Ok(2.0 * PI * h as f64 / (w as f64 * (d.unsigned_abs() as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> NumberField {
        NumberField::quadratic(-1).unwrap()
    }

    #[test]
    fn field_construction() {
        let q = make_rational_field();
        assert_eq!((q.degree(), q.discriminant()), (1, 1));
        let k = make_quadratic_field(-1).unwrap();
        assert_eq!(k.discriminant(), -4);
        assert_eq!(k.unit_count(), UnitCount::Finite(4));
        let k = make_quadratic_field(-3).unwrap();
        assert_eq!(k.discriminant(), -3);
        assert_eq!(k.unit_count(), UnitCount::Finite(6));
        assert_eq!(make_quadratic_field(12), Err(Error::NotSquarefree(12)));
        assert_eq!(make_quadratic_field(1), Err(Error::DegenerateM(1)));
        assert_eq!(make_quadratic_field(0), Err(Error::DegenerateM(0)));
        assert_eq!(make_quadratic_field(5).unwrap().discriminant(), 5);
        assert_eq!(make_quadratic_field(2).unwrap().discriminant(), 8);
        assert_eq!(make_quadratic_field(2).unwrap().unit_count(), UnitCount::Infinite);
    }

    #[test]
    fn discriminants_are_0_or_1_mod_4() {
        for m in -200i64..200 {
            if let Ok(k) = NumberField::quadratic(m) {
                assert!(matches!(k.discriminant().rem_euclid(4), 0 | 1));
                assert!(is_fundamental_discriminant(k.discriminant()));
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("Q".parse::<NumberField>().unwrap(), NumberField::rational());
        assert_eq!("Q(sqrt -1)".parse::<NumberField>().unwrap(), gaussian());
        assert_eq!("Q(sqrt(-5))".parse::<NumberField>().unwrap().discriminant(), -20);
        assert_eq!(gaussian().to_string(), "Q(sqrt -1)");
        assert_eq!("Q(sqrt 12)".parse::<NumberField>(), Err(Error::NotSquarefree(12)));
        assert!(matches!("K".parse::<NumberField>(), Err(Error::Parse(_))));
        assert!(matches!("Q(sqrt x)".parse::<NumberField>(), Err(Error::Parse(_))));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-4, 5), 1);
        assert_eq!(kronecker_symbol(-4, 3), -1);
        assert_eq!(kronecker_symbol(-4, 2), 0);
        for d in [-4, -3, 5, 8, -20, 1] {
            assert_eq!(kronecker_symbol(d, 1), 1);
        }
    }

    // Root-search oracle: for odd p not dividing D, (D/p) = 1 iff D is a
    // nonzero square mod p.
    #[test]
    fn kronecker_matches_root_search() {
        for d in [-4i64, -3, -20, 5, 8, 12, -7, 13, -15] {
            for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
                let r = d.rem_euclid(p as i64) as u64;
                let expected = if r == 0 {
                    0
                } else if (1..p).any(|x| x * x % p == r) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker_symbol(d, p), expected, "d={d} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_completely_multiplicative() {
        for d in [-4i64, -3, 5, -20] {
            let table: Vec<i8> = (0..=10_000u64)
                .map(|n| if n == 0 { 0 } else { kronecker_symbol(d, n) })
                .collect();
            for m in 1..=100u64 {
                for n in 1..=10_000 / m {
                    assert_eq!(
                        table[(m * n) as usize],
                        table[m as usize] * table[n as usize],
                        "d={d} m={m} n={n}"
                    );
                }
            }
            // period divides |d|
            let period = d.unsigned_abs();
            for n in 1..=1000 {
                assert_eq!(table[n as usize], table[(n + period) as usize]);
            }
        }
    }

    #[test]
    fn gaussian_splitting() {
        let k = gaussian();
        let five = split_prime(&k, 5).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|(q, e)| q.norm == 5 && *e == 1));
        let three = split_prime(&k, 3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].0.norm, 9);
        let two = split_prime(&k, 2).unwrap();
        assert_eq!(two, vec![(PrimeIdeal::new(2, 2, 1, 0), 2)]);
        assert_eq!(split_prime(&k, 9), Err(Error::NotPrime(9)));
        assert_eq!(split_prime(&NumberField::rational(), 7).unwrap()[0].0.norm, 7);
    }

    #[test]
    fn local_degrees_sum_to_field_degree() {
        for k in [
            NumberField::rational(),
            gaussian(),
            NumberField::quadratic(5).unwrap(),
            NumberField::quadratic(-5).unwrap(),
            NumberField::quadratic(2).unwrap(),
        ] {
            for p in primes_up_to(500) {
                let total: u32 = split_prime(&k, p)
                    .unwrap()
                    .iter()
                    .map(|(q, _)| q.ramification as u32 * q.residue_degree as u32)
                    .sum();
                assert_eq!(total, k.degree());
                let norm: u64 = split_prime(&k, p)
                    .unwrap()
                    .iter()
                    .map(|(q, e)| q.norm.pow(*e))
                    .product();
                assert_eq!(norm, p.pow(k.degree()));
            }
        }
    }

    #[test]
    fn splitting_matches_quadratic_residues() {
        for m in [-1i64, -5, 2, 3, 5, -7, 13] {
            let k = NumberField::quadratic(m).unwrap();
            for p in primes_up_to(300).into_iter().filter(|&p| p > 2) {
                if k.discriminant() % p as i64 == 0 {
                    continue;
                }
                let r = m.rem_euclid(p as i64) as u64;
                let qr = (1..p).any(|x| x * x % p == r);
                let splits = split_prime(&k, p).unwrap().len() == 2;
                assert_eq!(splits, qr, "m={m} p={p}");
                if splits {
                    let r0 = split_root(&k, p, 0).unwrap();
                    let r1 = split_root(&k, p, 1).unwrap();
                    assert!(r0 < r1);
                }
            }
        }
        assert_eq!(split_root(&gaussian(), 5, 0), Some(2));
        assert_eq!(split_root(&gaussian(), 5, 1), Some(3));
        assert_eq!(split_root(&gaussian(), 3, 0), None);
        // m = -7: 2 splits, theta = (1 + sqrt -7)/2 has roots 0 and 1 mod 2
        let k = NumberField::quadratic(-7).unwrap();
        assert_eq!(split_root(&k, 2, 0), Some(0));
        assert_eq!(split_root(&k, 2, 1), Some(1));
    }

    #[test]
    fn tonelli_shanks() {
        for p in primes_up_to(2000).into_iter().filter(|&p| p > 2) {
            for a in 1..p.min(60) {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!((1..p).all(|x| x * x % p != a)),
                }
            }
        }
    }

    #[test]
    fn prime_numbering() {
        let k = gaussian();
        assert_eq!(primes_up_to_norm(&k, 10).norms(), vec![2, 5, 5, 9]);
        assert!(primes_up_to_norm(&k, 1).is_empty());
        assert_eq!(
            primes_up_to_norm(&NumberField::rational(), 10).norms(),
            vec![2, 3, 5, 7]
        );
        let big = primes_up_to_norm(&k, 5000);
        let small = primes_up_to_norm(&k, 700);
        let restricted: Vec<_> = big.primes().iter().filter(|q| q.norm <= 700).copied().collect();
        assert_eq!(restricted, small.primes());
        assert!(big.primes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(first_primes(&k, 4).norms(), vec![2, 5, 5, 9]);
        assert_eq!(first_primes(&k, 50).primes(), big.prefix(50));
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number_imag_quadratic(-4), Ok(1));
        assert_eq!(class_number_imag_quadratic(-3), Ok(1));
        assert_eq!(class_number_imag_quadratic(-20), Ok(2));
        assert_eq!(class_number_imag_quadratic(-23), Ok(3));
        assert_eq!(class_number_imag_quadratic(-84), Ok(4));
        assert_eq!(class_number_imag_quadratic(-163), Ok(1));
        assert_eq!(class_number_imag_quadratic(-12), Err(Error::NotFundamental(-12)));
        assert_eq!(class_number_imag_quadratic(5), Err(Error::NotNegative(5)));
    }

    #[test]
    fn residues() {
        let r = analytic_residue_imag_quadratic(&gaussian()).unwrap();
        assert!((r - PI / 4.0).abs() < 1e-15);
        let r = analytic_residue_imag_quadratic(&NumberField::quadratic(-3).unwrap()).unwrap();
        assert!((r - 0.604600).abs() < 1e-6);
        let r = analytic_residue_imag_quadratic(&NumberField::quadratic(-5).unwrap()).unwrap();
        assert!((r - 1.404963).abs() < 1e-6);
        assert!(matches!(
            analytic_residue_imag_quadratic(&NumberField::quadratic(5).unwrap()),
            Err(Error::UnsupportedField(_))
        ));
        assert!(analytic_residue_imag_quadratic(&NumberField::rational()).is_err());
        assert_eq!(NumberField::rational().analytic_residue(), Some(1.0));
    }
}
