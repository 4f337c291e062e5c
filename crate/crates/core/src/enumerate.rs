//! Exhaustive enumeration of ideals by norm and exact norm-count sieves.
//!
//! Two independent routes produce ideal counts: [`IdealTable`] builds every
//! ideal of norm `<= X` as a product of prime powers (depth-first over the
//! prime numbering), while [`count_ideals`] convolves the local Euler factors
//! `1 + t_q + t_{q^2} + ...` into a per-norm array.

use crate::arith::factor;
use crate::error::{Error, Result};
use crate::field::{primes_up_to_norm, split_prime, NumberField, PrimeIdeal};
use crate::ideal::Ideal;

/// Flat storage for a set of ideals, sorted by norm and then by factor list.
#[derive(Clone, Debug)]
pub struct IdealTable {
    field: NumberField,
    bound: u64,
    primes: Vec<PrimeIdeal>,
    norms: Vec<u64>,
    starts: Vec<u32>,
    pool: Vec<(u32, u8)>,
    // ideals of norm n occupy norm_start[n]..norm_start[n + 1]
    norm_start: Vec<u32>,
}

struct Raw {
    norms: Vec<u64>,
    starts: Vec<u32>,
    pool: Vec<(u32, u8)>,
}

fn dfs(primes: &[PrimeIdeal], start: usize, norm: u64, bound: u64, stack: &mut Vec<(u32, u8)>, raw: &mut Raw) {
    raw.norms.push(norm);
    raw.pool.extend_from_slice(stack);
    raw.starts.push(raw.pool.len() as u32);
    for (i, q) in primes.iter().enumerate().skip(start) {
        let q = q.norm;
        if norm > bound / q {
            break;
        }
        let mut n = norm * q;
        let mut e = 1u8;
        loop {
            stack.push((i as u32, e));
            dfs(primes, i + 1, n, bound, stack, raw);
            stack.pop();
            if n > bound / q {
                break;
            }
            n *= q;
            e += 1;
        }
    }
}

impl IdealTable {
    /// All ideals of norm `<= bound` composed of the given primes, which
    /// must be sorted in the global prime order.
    pub fn build(field: NumberField, primes: Vec<PrimeIdeal>, bound: u64) -> Self {
        assert!(bound >= 1);
        debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        let mut raw = Raw {
            norms: Vec::new(),
            starts: vec![0],
            pool: Vec::new(),
        };
        dfs(&primes, 0, 1, bound, &mut Vec::new(), &mut raw);

        // counting sort by norm, then order each norm bucket by factor list
        let len = bound as usize + 2;
        let mut norm_start = vec![0u32; len];
        for &n in &raw.norms {
            norm_start[n as usize + 1] += 1;
        }
        for i in 1..len {
            norm_start[i] += norm_start[i - 1];
        }
        let mut slot = norm_start.clone();
        let mut order = vec![0u32; raw.norms.len()];
        for (i, &n) in raw.norms.iter().enumerate() {
            order[slot[n as usize] as usize] = i as u32;
            slot[n as usize] += 1;
        }
        let slice = |i: u32| &raw.pool[raw.starts[i as usize] as usize..raw.starts[i as usize + 1] as usize];
        for n in 1..=bound as usize {
            let (a, b) = (norm_start[n] as usize, norm_start[n + 1] as usize);
            if b - a > 1 {
                order[a..b].sort_by(|&x, &y| slice(x).cmp(slice(y)));
            }
        }

        let mut norms = Vec::with_capacity(order.len());
        let mut starts = Vec::with_capacity(order.len() + 1);
        let mut pool = Vec::with_capacity(raw.pool.len());
        starts.push(0);
        for &i in &order {
            norms.push(raw.norms[i as usize]);
            pool.extend_from_slice(slice(i));
            starts.push(pool.len() as u32);
        }
        IdealTable {
            field,
            bound,
            primes,
            norms,
            starts,
            pool,
            norm_start,
        }
    }

    /// Every ideal of `field` with norm `<= bound`.
    pub fn all(field: NumberField, bound: u64) -> Self {
        let primes = primes_up_to_norm(&field, bound).primes().to_vec();
        Self::build(field, primes, bound)
    }

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
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn norm(&self, i: usize) -> u64 {
        self.norms[i]
    }

    pub fn norms(&self) -> &[u64] {
        &self.norms
    }

    /// Factor list of entry `i` as `(prime index, exponent)` pairs.
    pub fn factors(&self, i: usize) -> &[(u32, u8)] {
        &self.pool[self.starts[i] as usize..self.starts[i + 1] as usize]
    }

    /// Number of entries of norm `<= x`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.norm_start[x.min(self.bound) as usize + 1] as usize
    }

    /// Index of the entry with exactly this factor list, if present.
    pub fn find(&self, norm: u64, factors: &[(u32, u8)]) -> Option<usize> {
        if norm == 0 || norm > self.bound {
            return None;
        }
        let (a, b) = (
            self.norm_start[norm as usize] as usize,
            self.norm_start[norm as usize + 1] as usize,
        );
        (a..b).find(|&i| self.factors(i) == factors)
    }

    pub fn ideal(&self, i: usize) -> Ideal {
        let factors = self
            .factors(i)
            .iter()
            .map(|&(q, e)| (self.primes[q as usize], e as u32))
            .collect();
        Ideal::from_sorted_unchecked(self.field, factors, self.norms[i])
    }

    /// Table-local factor list of `ideal`, or `None` if it uses a prime
    /// outside this table.
    pub fn local_factors(&self, ideal: &Ideal) -> Option<Vec<(u32, u8)>> {
        ideal
            .factors()
            .iter()
            .map(|(q, e)| {
                let i = self.primes.binary_search(q).ok()?;
                Some((i as u32, u8::try_from(*e).ok()?))
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Ideal> + '_ {
        (0..self.len()).map(move |i| self.ideal(i))
    }
}

/// Stream of all ideals of norm `<= bound` in nondecreasing norm order,
/// ties broken by comparing factor lists under the global prime numbering.
pub struct IdealStream {
    table: IdealTable,
    next: usize,
}

impl Iterator for IdealStream {
    type Item = Ideal;

    fn next(&mut self) -> Option<Ideal> {
        if self.next >= self.table.len() {
            return None;
        }
        self.next += 1;
        Some(self.table.ideal(self.next - 1))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.table.len() - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for IdealStream {}

pub fn enumerate_ideals(field: &NumberField, bound: u64) -> IdealStream {
    IdealStream {
        table: IdealTable::all(*field, bound.max(1)),
        next: 0,
    }
}

/// All ideals of norm exactly `n`, sorted, built from the factorisation of
/// `n` and the local choices at each rational prime.
pub fn ideals_of_norm(field: &NumberField, n: u64) -> Vec<Ideal> {
    if n == 0 {
        return Vec::new();
    }
    let mut partial: Vec<Vec<(PrimeIdeal, u32)>> = vec![Vec::new()];
    for (p, k) in factor(n) {
        let above = split_prime(field, p).expect("factor yields primes");
        let local: Vec<Vec<(PrimeIdeal, u32)>> = match above.as_slice() {
            [(a, _), (b, _)] => (0..=k).map(|i| vec![(*a, i), (*b, k - i)]).collect(),
            [(q, _)] if q.residue_degree == 2 => {
                if k % 2 == 1 {
                    return Vec::new();
                }
                vec![vec![(*q, k / 2)]]
            }
            [(q, _)] => vec![vec![(*q, k)]],
            _ => unreachable!("at most two primes above p in degree <= 2"),
        };
        partial = partial
            .iter()
            .flat_map(|pre| {
                local.iter().map(move |l| {
                    let mut v = pre.clone();
                    v.extend(l.iter().copied());
                    v
                })
            })
            .collect();
    }
    let mut out: Vec<Ideal> = partial.into_iter().map(|f| Ideal::from_factors(*field, f)).collect();
    out.sort();
    out
}

/// Exact per-norm ideal counts `h(k)` and their partial sums `H(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCounter {
    field: NumberField,
    bound: u64,
    h: Vec<u32>,
    cumulative: Vec<u64>,
}

impl NormCounter {
    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Number of ideals of norm exactly `k` (0 outside `1..=bound`).
    pub fn h(&self, k: u64) -> u32 {
        if k == 0 || k > self.bound {
            return 0;
        }
        self.h[k as usize]
    }

    pub fn h_values(&self) -> &[u32] {
        &self.h
    }

    /// `H(x)`, the number of ideals of norm `<= x`.
    ///
    /// # Panics
    /// If `x` exceeds the counter's bound.
    pub fn count_up_to(&self, x: u64) -> u64 {
        assert!(x <= self.bound, "H({x}) requested beyond bound {}", self.bound);
        self.cumulative[x as usize]
    }

    /// `H(x)` for a real argument `x <= bound`.
    pub fn count_up_to_real(&self, x: f64) -> u64 {
        if x < 1.0 {
            return 0;
        }
        self.count_up_to(x.floor() as u64)
    }
}

/// Dirichlet-convolution sieve for `h` and `H` up to `bound`.
pub fn count_ideals(field: &NumberField, bound: u64) -> NormCounter {
    let bound = bound.max(1);
    let n = bound as usize;
    let mut h = vec![0u32; n + 1];
    h[1] = 1;
    for q in primes_up_to_norm(field, bound).primes() {
        let q = q.norm as usize;
        // ascending in-place update multiplies by 1/(1 - t_q)
        let mut m = q;
        while m <= n {
            h[m] += h[m / q];
            m += q;
        }
    }
    let mut cumulative = vec![0u64; n + 1];
    for k in 1..=n {
        cumulative[k] = cumulative[k - 1] + h[k] as u64;
    }
    NormCounter {
        field: *field,
        bound,
        h,
        cumulative,
    }
}

/// Number of multiples of `a` with norm `<= x`, via the bijection
/// `b = a c` with `N(c) = N(b)/N(a)`.
pub fn multiples_count(counter: &NormCounter, a: &Ideal, x: u64) -> Result<u64> {
    if a.field() != counter.field() {
        return Err(Error::FieldMismatch);
    }
    if x > counter.bound() {
        return Err(Error::InvalidArgument(format!(
            "bound {x} exceeds counter bound {}",
            counter.bound()
        )));
    }
    Ok(counter.count_up_to(a.norm().div_floor(x)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidueEstimate {
    pub c_hat: f64,
    pub error_band: f64,
    pub kappa: f64,
}

/// `c_hat = H(X)/X` with an error band `kappa X^(-1/d)`, where `kappa` is the
/// largest `|H(x)/x - c_hat| x^(1/d)` over `x = X/10, 2X/10, ..., X`.
pub fn estimate_residue_constant(field: &NumberField, bound: u64) -> Result<ResidueEstimate> {
    if bound < 100 {
        return Err(Error::BoundTooSmall { got: bound, min: 100 });
    }
    Ok(residue_from_counter(&count_ideals(field, bound)))
}

pub fn residue_from_counter(counter: &NormCounter) -> ResidueEstimate {
    let x_max = counter.bound();
    let inv_d = 1.0 / counter.field().degree() as f64;
    let c_hat = counter.count_up_to(x_max) as f64 / x_max as f64;
    let kappa = (1..=10u64)
        .map(|i| (x_max * i / 10).max(1))
        .map(|x| {
            let ratio = counter.count_up_to(x) as f64 / x as f64;
            (ratio - c_hat).abs() * (x as f64).powf(inv_d)
        })
        .fold(0.0, f64::max);
    ResidueEstimate {
        c_hat,
        error_band: kappa * (x_max as f64).powf(-inv_d),
        kappa,
    }
}

/// Best available value of the ideal-count constant: the closed form when
/// known, else `H(X)/X` from the counter.
pub fn residue_constant(counter: &NormCounter) -> f64 {
    counter
        .field()
        .analytic_residue()
        .unwrap_or_else(|| residue_from_counter(counter).c_hat)
}

/// Envelope `kappa` with `|H(y) - c y| <= kappa max(1, y)^(1 - 1/d)` for all
/// `1 <= y <= bound`, measured from the counter.
pub fn count_error_envelope(counter: &NormCounter, c: f64) -> f64 {
    let expo = 1.0 - 1.0 / counter.field().degree() as f64;
    let mut kappa: f64 = 0.0;
    for y in 1..=counter.bound() {
        let h = counter.count_up_to(y) as f64;
        // H is a step function: extremes sit at y and just below y + 1
        let dev = (h - c * y as f64).abs().max((h - c * (y + 1) as f64).abs());
        kappa = kappa.max(dev / (y as f64).powf(expo));
    }
    kappa
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::divides;

    fn gaussian() -> NumberField {
        NumberField::quadratic(-1).unwrap()
    }

    /// Gaussian lattice oracle: nonzero a + bi with a^2 + b^2 <= x, over 4 units.
    fn lattice_count(x: i64) -> u64 {
        let r = (x as f64).sqrt() as i64 + 1;
        let mut n = 0u64;
        for a in -r..=r {
            for b in -r..=r {
                let s = a * a + b * b;
                if s >= 1 && s <= x {
                    n += 1;
                }
            }
        }
        n / 4
    }

    #[test]
    fn gaussian_enumeration_small() {
        let norms: Vec<u64> = enumerate_ideals(&gaussian(), 10)
            .map(|i| i.norm().as_u64().unwrap())
            .collect();
        assert_eq!(norms, vec![1, 2, 4, 5, 5, 8, 9, 10, 10]);
        assert_eq!(lattice_count(10), 9);
        let one: Vec<Ideal> = enumerate_ideals(&gaussian(), 1).collect();
        assert_eq!(one.len(), 1);
        assert!(one[0].is_unit());
    }

    #[test]
    fn rational_enumeration_is_positive_integers() {
        let q = NumberField::rational();
        let ideals: Vec<Ideal> = enumerate_ideals(&q, 10).collect();
        let expected: Vec<Ideal> = (1..=10).map(|n| Ideal::principal(q, n).unwrap()).collect();
        assert_eq!(ideals, expected);
    }

    #[test]
    fn enumeration_is_sorted_and_distinct() {
        let ideals: Vec<Ideal> = enumerate_ideals(&NumberField::quadratic(-5).unwrap(), 2000).collect();
        assert!(ideals.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn counts_gaussian() {
        let c = count_ideals(&gaussian(), 10);
        assert_eq!(c.count_up_to(10), 9);
        assert_eq!((c.h(5), c.h(3), c.h(1)), (2, 0, 1));
        let c = count_ideals(&gaussian(), 100);
        assert_eq!(c.h(25), 3);
        for x in 1..=100 {
            assert_eq!(c.count_up_to(x), lattice_count(x as i64), "x={x}");
        }
    }

    #[test]
    fn counts_rational() {
        let c = count_ideals(&NumberField::rational(), 1000);
        assert!((1..=1000).all(|x| c.count_up_to(x) == x));
        assert_eq!(c.count_up_to_real(10.7), 10);
    }

    #[test]
    fn sieve_agrees_with_enumeration() {
        for field in [
            NumberField::rational(),
            gaussian(),
            NumberField::quadratic(-3).unwrap(),
            NumberField::quadratic(5).unwrap(),
        ] {
            let bound = 10_000;
            let c = count_ideals(&field, bound);
            let table = IdealTable::all(field, bound);
            let mut h = vec![0u32; bound as usize + 1];
            for &n in table.norms() {
                h[n as usize] += 1;
            }
            assert_eq!(&h[1..], &c.h_values()[1..], "{field}");
        }
    }

    #[test]
    fn h_is_multiplicative() {
        let c = count_ideals(&NumberField::quadratic(-5).unwrap(), 5000);
        for m in 1..=70u64 {
            for n in 1..=70u64 {
                if num_integer::Integer::gcd(&m, &n) == 1 {
                    assert_eq!(c.h(m * n), c.h(m) * c.h(n));
                }
            }
        }
    }

    #[test]
    fn ideals_of_norm_matches_table() {
        for field in [
            gaussian(),
            NumberField::quadratic(-5).unwrap(),
            NumberField::quadratic(2).unwrap(),
        ] {
            let table = IdealTable::all(field, 600);
            for n in 1..=600u64 {
                let direct = ideals_of_norm(&field, n);
                let lo = table.count_up_to(n - 1);
                let hi = table.count_up_to(n);
                let listed: Vec<Ideal> = (lo..hi).map(|i| table.ideal(i)).collect();
                assert_eq!(direct, listed, "{field} n={n}");
            }
        }
    }

    #[test]
    fn multiples_by_bijection() {
        let q = NumberField::rational();
        let c = count_ideals(&q, 10);
        assert_eq!(multiples_count(&c, &Ideal::principal(q, 3).unwrap(), 10), Ok(3));
        assert_eq!(multiples_count(&c, &Ideal::unit(q), 10), Ok(10));
        let k = gaussian();
        let c = count_ideals(&k, 10);
        let p2 = Ideal::from_triples(k, &[(2, 0, 1)]).unwrap();
        // N(p2) = 2, so the count is H(5) = 5 (norms 1, 2, 4, 5, 5)
        assert_eq!(multiples_count(&c, &p2, 10), Ok(5));
        assert_eq!(lattice_count(5), 5);
        assert!(multiples_count(&c, &p2, 11).is_err());
        assert_eq!(
            multiples_count(&c, &Ideal::unit(NumberField::rational()), 5),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn multiples_count_matches_filtering() {
        for field in [NumberField::rational(), gaussian()] {
            let x = 1000;
            let c = count_ideals(&field, x);
            let all: Vec<Ideal> = enumerate_ideals(&field, x).collect();
            for a in all.iter().filter(|a| a.norm().as_u64().unwrap() <= 30) {
                let filtered = all.iter().filter(|b| divides(a, b).unwrap()).count() as u64;
                assert_eq!(multiples_count(&c, a, x).unwrap(), filtered, "{a}");
            }
        }
    }

    #[test]
    fn residue_estimates() {
        let e = estimate_residue_constant(&NumberField::rational(), 1000).unwrap();
        assert_eq!(e.c_hat, 1.0);
        assert!(matches!(
            estimate_residue_constant(&gaussian(), 99),
            Err(Error::BoundTooSmall { .. })
        ));
        let e = estimate_residue_constant(&gaussian(), 100_000).unwrap();
        assert!((e.c_hat - std::f64::consts::FRAC_PI_4).abs() < 0.005 * std::f64::consts::FRAC_PI_4);
        assert!(e.error_band > 0.0 && e.error_band < 0.05);
    }

    #[test]
    fn envelope_bounds_errors() {
        let c = count_ideals(&gaussian(), 20_000);
        let kappa = count_error_envelope(&c, std::f64::consts::FRAC_PI_4);
        for y in [1u64, 7, 100, 12_345, 20_000] {
            let dev = (c.count_up_to(y) as f64 - std::f64::consts::FRAC_PI_4 * y as f64).abs();
            assert!(dev <= kappa * (y as f64).sqrt() + 1e-9);
        }
        let q = count_ideals(&NumberField::rational(), 1000);
        assert!(count_error_envelope(&q, 1.0) <= 1.0);
    }

    #[test]
    fn table_lookup() {
        let t = IdealTable::all(gaussian(), 100);
        let a = Ideal::principal(gaussian(), 5).unwrap();
        let local = t.local_factors(&a).unwrap();
        let i = t.find(25, &local).unwrap();
        assert_eq!(t.ideal(i), a);
        assert_eq!(t.find(3, &[]), None);
    }
}
