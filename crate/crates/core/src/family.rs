//! Families of ideals `A = {a_1, a_2, ...}` and membership in their set of
//! multiples.

use std::collections::HashSet;
use std::fmt;

use crate::enumerate::{ideals_of_norm, IdealTable};
use crate::error::{Error, Result};
use crate::field::{first_primes, NumberField, PrimeIdeal};
use crate::ideal::{divides, Ideal, Norm};
use crate::zeta::smooth_tail_bound;

/// Half-open norm interval `(lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormInterval {
    pub lo: u64,
    pub hi: u64,
}

impl NormInterval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidArgument(format!("empty interval ({lo}, {hi}]")));
        }
        Ok(NormInterval { lo, hi })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo < n && n <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyRule {
    /// A finite list, kept in enumeration order.
    Explicit(Vec<Ideal>),
    /// Every `q^l` with `q` prime.
    PrimePowers { exponent: u32 },
    /// Every ideal whose norm lies in one of the (sorted, disjoint) intervals.
    NormIntervals(Vec<NormInterval>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AFamily {
    field: NumberField,
    rule: FamilyRule,
}

impl AFamily {
    /// A finite family. Members are sorted into enumeration order.
    pub fn explicit(field: NumberField, mut members: Vec<Ideal>) -> Result<Self> {
        if members.iter().any(|a| a.field() != field) {
            return Err(Error::FieldMismatch);
        }
        members.sort();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMembers);
        }
        Ok(AFamily {
            field,
            rule: FamilyRule::Explicit(members),
        })
    }

    /// Explicit family over `Q` from positive integer generators.
    pub fn from_integers(field: NumberField, gens: &[u64]) -> Result<Self> {
        let members = gens
            .iter()
            .map(|&n| Ideal::principal(field, n))
            .collect::<Result<Vec<_>>>()?;
        Self::explicit(field, members)
    }

    pub fn prime_powers(field: NumberField, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidArgument("prime power exponent must be >= 1".into()));
        }
        Ok(AFamily {
            field,
            rule: FamilyRule::PrimePowers { exponent },
        })
    }

    /// Intervals are sorted and overlapping ones merged.
    pub fn norm_intervals(field: NumberField, mut intervals: Vec<NormInterval>) -> Result<Self> {
        if intervals.iter().any(|iv| iv.lo >= iv.hi) {
            return Err(Error::InvalidArgument("interval with lo >= hi".into()));
        }
        intervals.sort();
        let mut merged: Vec<NormInterval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        Ok(AFamily {
            field,
            rule: FamilyRule::NormIntervals(merged),
        })
    }

    pub fn field(&self) -> NumberField {
        self.field
    }

    pub fn rule(&self) -> &FamilyRule {
        &self.rule
    }

    pub fn is_finite(&self) -> bool {
        match &self.rule {
            FamilyRule::Explicit(_) => true,
            FamilyRule::PrimePowers { .. } => false,
            FamilyRule::NormIntervals(iv) => iv.iter().all(|i| i.hi < u64::MAX),
        }
    }

    /// Whether `a` itself is a member.
    pub fn contains(&self, a: &Ideal) -> bool {
        if a.field() != self.field {
            return false;
        }
        match &self.rule {
            FamilyRule::Explicit(m) => m.binary_search(a).is_ok(),
            FamilyRule::PrimePowers { exponent } => {
                matches!(a.factors(), [(_, e)] if e == exponent)
            }
            FamilyRule::NormIntervals(iv) => match a.norm().as_u64() {
                Some(n) => in_intervals(iv, n),
                None => false,
            },
        }
    }

    /// Whether `b` lies in `M_A`, i.e. is divisible by some member.
    pub fn is_multiple(&self, b: &Ideal) -> Result<bool> {
        if b.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self.is_multiple_unchecked(b))
    }

    pub(crate) fn is_multiple_unchecked(&self, b: &Ideal) -> bool {
        match &self.rule {
            FamilyRule::Explicit(m) => m
                .iter()
                .take_while(|a| a.norm() <= b.norm())
                .any(|a| divides(a, b).unwrap_or(false)),
            FamilyRule::PrimePowers { exponent } => b.max_exponent() >= *exponent,
            FamilyRule::NormIntervals(iv) => b.any_divisor_norm(|n| match n.as_u64() {
                Some(n) => in_intervals(iv, n),
                None => false,
            }),
        }
    }

    /// Members with norm `<= bound`, in enumeration order.
    pub fn members_up_to(&self, bound: u64) -> Vec<Ideal> {
        match &self.rule {
            FamilyRule::Explicit(m) => m
                .iter()
                .take_while(|a| a.norm() <= &Norm::Small(bound))
                .cloned()
                .collect(),
            FamilyRule::PrimePowers { exponent } => {
                let root = integer_root(bound, *exponent);
                crate::field::primes_up_to_norm(&self.field, root)
                    .primes()
                    .iter()
                    .map(|q| prime_power(self.field, *q, *exponent))
                    .collect()
            }
            FamilyRule::NormIntervals(iv) => {
                let mut out = Vec::new();
                for i in iv {
                    for n in i.lo + 1..=i.hi.min(bound) {
                        out.extend(ideals_of_norm(&self.field, n));
                    }
                }
                out
            }
        }
    }

    /// Lazy iterator over the members in enumeration order.
    pub fn cursor(&self) -> FamilyCursor<'_> {
        FamilyCursor {
            family: self,
            buffer: Vec::new(),
            pos: 0,
            produced: 0,
            next_norm: 1,
            exhausted: false,
        }
    }

    /// The first `r` members (fewer if the family is smaller).
    pub fn first_members(&self, r: usize) -> Vec<Ideal> {
        match &self.rule {
            FamilyRule::PrimePowers { exponent } => first_primes(&self.field, r)
                .primes()
                .iter()
                .map(|q| prime_power(self.field, *q, *exponent))
                .collect(),
            _ => self.cursor().take(r).collect(),
        }
    }

    /// Members built only from the given primes with norm `<= x_work`, plus a
    /// bound on `sum 1/N(a)` over such members above `x_work`.
    pub fn restrict(&self, primes: &[PrimeIdeal], x_work: u64) -> RestrictedFamily {
        let allowed: HashSet<&PrimeIdeal> = primes.iter().collect();
        let uses_allowed = |a: &Ideal| a.factors().iter().all(|(q, _)| allowed.contains(q));
        let (members, tail_bound) = match &self.rule {
            FamilyRule::Explicit(m) => (m.iter().filter(|a| uses_allowed(a)).cloned().collect(), 0.0),
            FamilyRule::PrimePowers { exponent } => (
                primes.iter().map(|q| prime_power(self.field, *q, *exponent)).collect(),
                0.0,
            ),
            FamilyRule::NormIntervals(iv) => {
                let top = iv.last().map_or(0, |i| i.hi);
                let limit = top.min(x_work);
                let members = if primes.is_empty() || limit == 0 {
                    Vec::new()
                } else {
                    let mut sorted = primes.to_vec();
                    sorted.sort();
                    let table = IdealTable::build(self.field, sorted, limit);
                    (0..table.len())
                        .filter(|&i| in_intervals(iv, table.norm(i)))
                        .map(|i| table.ideal(i))
                        .collect()
                };
                let tail = if top > x_work && !primes.is_empty() {
                    smooth_tail_bound(primes, x_work)
                } else {
                    0.0
                };
                (members, tail)
            }
        };
        RestrictedFamily { members, tail_bound }
    }
}

impl fmt::Display for AFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            FamilyRule::Explicit(m) => {
                let parts: Vec<String> = m.iter().map(|a| a.to_string()).collect();
                write!(f, "explicit{{{}}}", parts.join(", "))
            }
            FamilyRule::PrimePowers { exponent } => write!(f, "prime_powers({exponent})"),
            FamilyRule::NormIntervals(iv) => {
                let parts: Vec<String> = iv.iter().map(|i| format!("({}, {}]", i.lo, i.hi)).collect();
                write!(f, "norm_intervals{{{}}}", parts.join(" u "))
            }
        }
    }
}

/// The finite surrogate `A'` of a family restricted to a set of primes.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedFamily {
    pub members: Vec<Ideal>,
    /// Upper bound on `sum 1/N(a)` over restricted members that were cut.
    pub tail_bound: f64,
}

pub struct FamilyCursor<'a> {
    family: &'a AFamily,
    buffer: Vec<Ideal>,
    pos: usize,
    produced: usize,
    next_norm: u64,
    exhausted: bool,
}

impl Iterator for FamilyCursor<'_> {
    type Item = Ideal;

    fn next(&mut self) -> Option<Ideal> {
        loop {
            if self.pos < self.buffer.len() {
                self.pos += 1;
                self.produced += 1;
                return Some(self.buffer[self.pos - 1].clone());
            }
            if self.exhausted {
                return None;
            }
            self.refill();
        }
    }
}

impl FamilyCursor<'_> {
    fn refill(&mut self) {
        self.buffer.clear();
        self.pos = 0;
        match &self.family.rule {
            FamilyRule::Explicit(m) => {
                self.buffer = m.clone();
                self.exhausted = true;
            }
            FamilyRule::PrimePowers { .. } => {
                // there are infinitely many primes, so this never ends
                let want = (2 * self.produced).max(16);
                let all = self.family.first_members(want);
                self.buffer = all[self.produced..].to_vec();
            }
            FamilyRule::NormIntervals(iv) => {
                // advance to the next norm that carries members
                loop {
                    let Some(i) = iv.iter().find(|i| i.hi >= self.next_norm) else {
                        self.exhausted = true;
                        return;
                    };
                    let n = self.next_norm.max(i.lo + 1);
                    self.next_norm = n + 1;
                    let found = ideals_of_norm(&self.family.field, n);
                    if !found.is_empty() {
                        self.buffer = found;
                        return;
                    }
                }
            }
        }
    }
}

fn in_intervals(iv: &[NormInterval], n: u64) -> bool {
    // intervals are sorted and disjoint
    let i = iv.partition_point(|i| i.hi < n);
    iv.get(i).is_some_and(|i| i.contains(n))
}

fn prime_power(field: NumberField, q: PrimeIdeal, e: u32) -> Ideal {
    Ideal::from_factors(field, vec![(q, e)])
}

/// `floor(n^(1/k))`.
pub(crate) fn integer_root(n: u64, k: u32) -> u64 {
    if k == 1 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}
