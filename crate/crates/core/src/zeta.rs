//! Harmonic ideal sums, partial Euler products and truncated Dedekind zeta
//! values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::CompensatedSum;
use crate::enumerate::{count_ideals, NormCounter};
use crate::error::{Error, Result};
use crate::field::{first_primes, primes_up_to_norm, NumberField, PrimeIdeal};

/// Euler-Mascheroni constant, 0.57721566490153286061 (rounded to `f64`).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sum_{N(a) <= x} 1/N(a)`.
pub fn harmonic_ideal_sum(field: &NumberField, x: f64) -> f64 {
    let bound = x.floor().max(1.0) as u64;
    harmonic_from_counter(&count_ideals(field, bound), x)
}

pub fn harmonic_from_counter(counter: &NormCounter, x: f64) -> f64 {
    let top = (x.floor() as u64).min(counter.bound());
    let mut sum = CompensatedSum::new();
    for k in 1..=top {
        let h = counter.h(k);
        if h > 0 {
            sum += h as f64 / k as f64;
        }
    }
    sum.value()
}

/// Which prime ideals enter a partial Euler product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerCutoff {
    /// The first `k` primes of the global numbering.
    FirstPrimes(usize),
    /// All primes of norm at most the given bound.
    MaxNorm(u64),
}

/// `prod (1 - 1/N(p))^(-1)` over a prefix of the prime numbering.
///
/// The product is kept as an exact rational while numerator and denominator
/// fit in 128 bits; the log-space sum is always maintained and takes over
/// once the rational is dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProductState {
    pub k: usize,
    /// Largest prime norm used (0 for the empty product).
    pub max_prime_norm: u64,
    exact: Option<BigRational>,
    log_value: f64,
}

const EXACT_LIMIT_BITS: u64 = 128;

impl EulerProductState {
    pub fn empty() -> Self {
        EulerProductState {
            k: 0,
            max_prime_norm: 0,
            exact: Some(BigRational::one()),
            log_value: 0.0,
        }
    }

    pub fn from_primes(primes: &[PrimeIdeal]) -> Self {
        let mut state = Self::empty();
        let mut log = CompensatedSum::new();
        for q in primes {
            let n = q.norm;
            log += -(-1.0 / n as f64).ln_1p();
            if let Some(r) = state.exact.take() {
                let next = r * BigRational::new(BigInt::from(n), BigInt::from(n - 1));
                if next.numer().bits() <= EXACT_LIMIT_BITS && next.denom().bits() <= EXACT_LIMIT_BITS {
                    state.exact = Some(next);
                }
            }
            state.k += 1;
            state.max_prime_norm = n;
        }
        state.log_value = log.value();
        state
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn log_value(&self) -> f64 {
        self.log_value
    }

    pub fn value(&self) -> f64 {
        match &self.exact {
            Some(r) => r.to_f64().unwrap_or_else(|| self.log_value.exp()),
            None => self.log_value.exp(),
        }
    }
}

pub fn partial_euler_product(field: &NumberField, cutoff: EulerCutoff) -> EulerProductState {
    match cutoff {
        EulerCutoff::FirstPrimes(0) => EulerProductState::empty(),
        EulerCutoff::FirstPrimes(k) => EulerProductState::from_primes(first_primes(field, k).primes()),
        EulerCutoff::MaxNorm(x) => EulerProductState::from_primes(primes_up_to_norm(field, x).primes()),
    }
}

/// Upper bound on `sum 1/N(n)` over ideals `n` built from `primes` with
/// `N(n) > bound`, by Rankin's trick with exponent 1/2:
/// `bound^(-1/2) prod (1 - N(p)^(-1/2))^(-1)`.
pub fn smooth_tail_bound(primes: &[PrimeIdeal], bound: u64) -> f64 {
    let product: f64 = primes
        .iter()
        .map(|q| 1.0 / (1.0 - (q.norm as f64).sqrt().recip()))
        .product();
    product / (bound as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MertensRatio {
    pub cutoff: u64,
    pub product: f64,
    pub ratio: f64,
    /// `alpha_K e^gamma` when the residue is known in closed form.
    pub target: Option<f64>,
}

/// Euler product over primes of norm `<= cutoff`, divided by `log cutoff`.
pub fn mertens_ratio(field: &NumberField, cutoff: u64) -> Result<MertensRatio> {
    if cutoff < 10 {
        return Err(Error::BoundTooSmall { got: cutoff, min: 10 });
    }
    let product = partial_euler_product(field, EulerCutoff::MaxNorm(cutoff)).value();
    Ok(MertensRatio {
        cutoff,
        product,
        ratio: product / (cutoff as f64).ln(),
        target: field.analytic_residue().map(|a| a * EULER_GAMMA.exp()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: f64,
    /// The true value lies in `[value, value + tail_bound]`.
    pub tail_bound: f64,
}

/// Truncated `zeta_K(s) = sum_{k <= X} h(k) k^(-s)` with a tail bound
/// `2 c_upper s/(s-1) X^(1-s)`, `c_upper` being the largest `H(x)/x` over
/// `X/10 <= x <= X`.
pub fn dedekind_zeta(field: &NumberField, s: f64, truncation: u64) -> Result<ZetaValue> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::SNotGreaterThanOne(s));
    }
    if truncation < 10 {
        return Err(Error::BoundTooSmall {
            got: truncation,
            min: 10,
        });
    }
    Ok(dedekind_zeta_from_counter(&count_ideals(field, truncation), s))
}

pub fn dedekind_zeta_from_counter(counter: &NormCounter, s: f64) -> ZetaValue {
    let x = counter.bound();
    let mut sum = CompensatedSum::new();
    for k in 1..=x {
        let h = counter.h(k);
        if h > 0 {
            sum += h as f64 * (k as f64).powf(-s);
        }
    }
    let c_upper = ((x / 10).max(1)..=x)
        .map(|t| counter.count_up_to(t) as f64 / t as f64)
        .fold(0.0, f64::max);
    ZetaValue {
        value: sum.value(),
        tail_bound: 2.0 * c_upper * (s / (s - 1.0)) * (x as f64).powf(1.0 - s),
    }
}
