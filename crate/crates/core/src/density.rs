//! Densities of the set of multiples `M_A` and its complement `V_A`.
//!
//! Exact values come from inclusion-exclusion over the members of a finite
//! family. Members sharing no prime ideal give independent events, so the
//! family is split into connected components (members linked by a common
//! prime) and `dens(M_A) = 1 - prod_c (1 - dens(M_c))`. Only a single
//! component is subject to the subset cap.
//!
//! Empirical values come from one pass over all ideals up to a bound,
//! accumulating exact counts and compensated harmonic sums at geometrically
//! spaced sample points.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::CompensatedSum;
use crate::enumerate::{count_error_envelope, residue_constant, IdealTable, NormCounter};
use crate::error::{Error, Result};
use crate::family::{AFamily, FamilyRule, RestrictedFamily};
use crate::field::{first_primes, NumberField, PrimeIdeal};
use crate::ideal::{divides_same_field, Ideal, Norm};
use crate::zeta::{smooth_tail_bound, EulerProductState};

/// Largest connected component handled by inclusion-exclusion.
pub const SUBSET_CAP: usize = 20;

/// Default norm bound used to truncate rule-based families.
pub const DEFAULT_X_WORK: u64 = 1_000_000;

/// Drops members that are multiples of other members. `M_A` is unchanged.
pub fn minimal_members(members: &[Ideal]) -> Vec<Ideal> {
    let mut sorted = members.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut out: Vec<Ideal> = Vec::with_capacity(sorted.len());
    for b in sorted {
        if !out.iter().any(|a| divides_same_field(a, &b)) {
            out.push(b);
        }
    }
    out
}

fn check_members(members: &[Ideal]) -> Result<()> {
    if let Some(first) = members.first() {
        if members.iter().any(|a| a.field() != first.field()) {
            return Err(Error::FieldMismatch);
        }
    }
    let mut sorted: Vec<&Ideal> = members.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateMembers);
    }
    Ok(())
}

/// Groups members into classes linked by shared prime ideals.
fn components(members: &[Ideal]) -> Vec<Vec<Ideal>> {
    let n = members.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut owner: HashMap<PrimeIdeal, usize> = HashMap::new();
    for (i, a) in members.iter().enumerate() {
        for (q, _) in a.factors() {
            match owner.get(q) {
                Some(&j) => {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri.max(rj)] = ri.min(rj);
                }
                None => {
                    owner.insert(*q, i);
                }
            }
        }
    }
    let mut groups: Vec<Vec<Ideal>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, a) in members.iter().enumerate() {
        let root = find(&mut parent, i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(a.clone());
    }
    groups
}

/// Inclusion-exclusion for one component:
/// `sum_{J != {}} (-1)^(|J|+1) / N(lcm J)`.
fn component_density(members: &[Ideal]) -> BigRational {
    let mut primes: Vec<PrimeIdeal> = members
        .iter()
        .flat_map(|a| a.factors().iter().map(|(q, _)| *q))
        .collect();
    primes.sort();
    primes.dedup();
    let rows: Vec<Vec<(usize, u32)>> = members
        .iter()
        .map(|a| {
            a.factors()
                .iter()
                .map(|(q, e)| (primes.binary_search(q).unwrap(), *e))
                .collect()
        })
        .collect();

    // coefficient of 1/N for every norm reached by some lcm
    let mut coeff: HashMap<Norm, i64> = HashMap::new();
    let mut cur = vec![0u32; primes.len()];

    fn walk(
        i: usize,
        rows: &[Vec<(usize, u32)>],
        primes: &[PrimeIdeal],
        cur: &mut [u32],
        norm: &Norm,
        size: usize,
        coeff: &mut HashMap<Norm, i64>,
    ) {
        if i == rows.len() {
            if size > 0 {
                let sign = if size % 2 == 1 { 1 } else { -1 };
                *coeff.entry(norm.clone()).or_insert(0) += sign;
            }
            return;
        }
        walk(i + 1, rows, primes, cur, norm, size, coeff);
        let mut raised = Vec::new();
        let mut next = norm.clone();
        for &(j, e) in &rows[i] {
            if e > cur[j] {
                next = next.mul(&Norm::pow_u64(primes[j].norm, e - cur[j]));
                raised.push((j, cur[j]));
                cur[j] = e;
            }
        }
        walk(i + 1, rows, primes, cur, &next, size + 1, coeff);
        for (j, old) in raised {
            cur[j] = old;
        }
    }
    walk(0, &rows, &primes, &mut cur, &Norm::one(), 0, &mut coeff);

    // every lcm norm divides the norm of the lcm of the whole component
    let mut top = vec![0u32; primes.len()];
    for row in &rows {
        for &(j, e) in row {
            top[j] = top[j].max(e);
        }
    }
    let common: BigUint = primes
        .iter()
        .zip(&top)
        .map(|(q, &e)| BigUint::from(q.norm).pow(e))
        .product();
    let mut numer = BigInt::zero();
    for (n, c) in coeff {
        if c != 0 {
            numer += BigInt::from(c) * BigInt::from(&common / n.to_biguint());
        }
    }
    BigRational::new(numer, BigInt::from(common))
}

/// Exact density of `M_A` for a finite list of members.
pub fn finite_ie_density(members: &[Ideal]) -> Result<BigRational> {
    finite_ie_density_capped(members, SUBSET_CAP)
}

pub fn finite_ie_density_capped(members: &[Ideal], cap: usize) -> Result<BigRational> {
    check_members(members)?;
    if members.is_empty() {
        return Ok(BigRational::zero());
    }
    if members.iter().any(Ideal::is_unit) {
        return Ok(BigRational::one());
    }
    let groups = components(&minimal_members(members));
    if let Some(g) = groups.iter().find(|g| g.len() > cap) {
        return Err(Error::TooLarge { size: g.len(), cap });
    }
    let mut avoid = BigRational::one();
    for g in &groups {
        avoid *= BigRational::one() - component_density(g);
    }
    Ok(BigRational::one() - avoid)
}

/// `A_r` for `r = 1..=r_max`: the density of the multiples of the first `r`
/// members. Finite families shorter than `r_max` repeat their final value.
pub fn a_limit(family: &AFamily, r_max: usize) -> Result<Vec<BigRational>> {
    let members = family.first_members(r_max);
    let mut out = Vec::with_capacity(r_max);
    for r in 1..=members.len() {
        out.push(finite_ie_density(&members[..r])?);
    }
    let last = out.last().cloned().unwrap_or_else(BigRational::zero);
    out.resize(r_max, last);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SieveDensity {
    pub bound: u64,
    pub multiples: u64,
    pub total: u64,
    pub density: BigRational,
}

/// Marks every multiple of `members` in `table` through `b = a c`.
pub fn mark_multiples(table: &IdealTable, members: &[Ideal]) -> Vec<bool> {
    let mut marked = vec![false; table.len()];
    let x = table.bound();
    let mut merged = Vec::new();
    for a in minimal_members(members) {
        let Some(na) = a.norm().as_u64().filter(|&n| n <= x) else {
            continue;
        };
        let Some(la) = table.local_factors(&a) else {
            continue;
        };
        for c in 0..table.count_up_to(x / na) {
            merge_local(&la, table.factors(c), &mut merged);
            if let Some(i) = table.find(na * table.norm(c), &merged) {
                marked[i] = true;
            }
        }
    }
    marked
}

fn merge_local(a: &[(u32, u8)], b: &[(u32, u8)], out: &mut Vec<(u32, u8)>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// `|{b : N(b) <= X, b in M_A}| / H(X)` with `A` truncated at norm `y`.
pub fn sieve_multiples_density(family: &AFamily, y: u64, x: u64) -> SieveDensity {
    let x = x.max(1);
    let table = IdealTable::all(family.field(), x);
    sieve_in_table(&table, &family.members_up_to(y.min(x)))
}

pub fn sieve_in_table(table: &IdealTable, members: &[Ideal]) -> SieveDensity {
    let multiples = mark_multiples(table, members).iter().filter(|&&m| m).count() as u64;
    let total = table.len() as u64;
    SieveDensity {
        bound: table.bound(),
        multiples,
        total,
        density: BigRational::new(BigInt::from(multiples), BigInt::from(total)),
    }
}

/// Bound on `|S(X)/H(X) - dens(M_A)|` for a finite family, from the
/// inclusion-exclusion identity `S(X) = sum_J (-1)^(|J|+1) H(X/N(J))` and the
/// envelope `|H(y) - c y| <= kappa max(1, y)^(1 - 1/d)`.
pub fn floor_effect_bound(members: &[Ideal], counter: &NormCounter, x: u64) -> Result<f64> {
    check_members(members)?;
    let minimal = minimal_members(members);
    if minimal.len() > SUBSET_CAP {
        return Err(Error::TooLarge {
            size: minimal.len(),
            cap: SUBSET_CAP,
        });
    }
    let c = residue_constant(counter);
    // below y = 1 the error is c y <= c
    let kappa = count_error_envelope(counter, c).max(c);
    let expo = 1.0 - 1.0 / counter.field().degree() as f64;
    let total = counter.count_up_to(x) as f64;
    let mut spread = 0.0;
    for mask in 1u32..(1 << minimal.len()) {
        let mut lcm = Ideal::unit(counter.field());
        for (i, a) in minimal.iter().enumerate() {
            if mask >> i & 1 == 1 {
                lcm = crate::ideal::intersect(&[lcm, a.clone()])?;
            }
        }
        let y = x as f64 / lcm.norm().to_f64();
        spread += kappa * y.max(1.0).powf(expo);
    }
    let dens = finite_ie_density(members)?.to_f64().unwrap_or(1.0);
    Ok(spread / total + dens * (c * x as f64 / total - 1.0).abs())
}

/// Members of `A` built from the first `k` primes only.
pub fn restrict_family(family: &AFamily, k: usize, x_work: u64) -> RestrictedFamily {
    let primes = first_primes(&family.field(), k);
    family.restrict(primes.primes(), x_work)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultDensityState {
    pub k: usize,
    pub euler: EulerProductState,
    pub b_k: BigRational,
    /// Zero when `b_k` is exact.
    pub tolerance: f64,
    pub restricted: RestrictedFamily,
    pub via_sieve: bool,
}

impl MultDensityState {
    pub fn value(&self) -> f64 {
        self.b_k.to_f64().unwrap_or(f64::NAN)
    }
}

/// `B_k = dens(M_A')` with `A'` the members built from the first `k` primes.
///
/// Uses inclusion-exclusion when every component fits the cap; otherwise the
/// quotient `sum_{b' in M_A'} 1/N(b') / Pi_k` over `p_1..p_k`-ideals up to
/// `x_work`, with the Rankin tail folded into the tolerance.
pub fn multiplicative_density(family: &AFamily, k: usize, x_work: u64) -> Result<MultDensityState> {
    let numbering = first_primes(&family.field(), k);
    let primes = numbering.primes();
    let restricted = family.restrict(primes, x_work);
    let euler = EulerProductState::from_primes(primes);
    match finite_ie_density(&restricted.members) {
        Ok(b_k) => Ok(MultDensityState {
            k,
            euler,
            b_k,
            tolerance: restricted.tail_bound,
            restricted,
            via_sieve: false,
        }),
        Err(Error::TooLarge { .. }) => {
            let mut sorted = primes.to_vec();
            sorted.sort();
            let table = IdealTable::build(family.field(), sorted, x_work);
            let marked = mark_multiples(&table, &restricted.members);
            let mut sum = CompensatedSum::new();
            for (i, &m) in marked.iter().enumerate() {
                if m {
                    sum += 1.0 / table.norm(i) as f64;
                }
            }
            let pi = euler.value();
            let value = (sum.value() / pi).clamp(0.0, 1.0);
            let tolerance = smooth_tail_bound(primes, x_work) / pi + restricted.tail_bound;
            Ok(MultDensityState {
                k,
                euler,
                b_k: BigRational::from_float(value).unwrap_or_else(BigRational::zero),
                tolerance,
                restricted,
                via_sieve: true,
            })
        }
        Err(e) => Err(e),
    }
}

/// Exact density of a finite family, or an error for infinite rules.
pub fn family_density(family: &AFamily) -> Result<BigRational> {
    match family.rule() {
        FamilyRule::Explicit(m) => finite_ie_density(m),
        FamilyRule::NormIntervals(iv) if family.is_finite() => {
            let top = iv.last().map_or(0, |i| i.hi);
            finite_ie_density(&family.members_up_to(top))
        }
        _ => Err(Error::InvalidArgument("family is infinite".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    pub x: u64,
    /// Members of `S` with norm `<= x`.
    pub count: u64,
    /// `H(x)`.
    pub total: u64,
    /// `sum 1/N(b)` over members of `S` with norm `<= x`.
    pub log_sum: f64,
    /// `sum 1/N(b)` over all ideals with norm `<= x`.
    pub log_total: f64,
}

impl SamplePoint {
    pub fn natural(&self) -> f64 {
        self.count as f64 / self.total as f64
    }

    pub fn logarithmic(&self) -> f64 {
        self.log_sum / self.log_total
    }
}

/// Finite-sample density estimates for a set of ideals.
///
/// The tail window is the norm range `[x_t, X]` from the first sample of the
/// last half of the grid up to the bound. `d_hat`/`D_hat` are the extremes of
/// `S(n)/H(n)` over every norm `n` in that range. The logarithmic estimates
/// at each later sample `x_i` are the `1/N`-weighted mean of `S(N(b))/H(N(b))`
/// over ideals with `x_t < N(b) <= x_i`, the summation-by-parts form of
/// `sum_S 1/N / sum 1/N` without its boundary term. The cumulative sums stay
/// available on each sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub bound: u64,
    pub samples: Vec<SamplePoint>,
    pub tail_start: usize,
    /// Logarithmic estimates at samples `tail_start + 1..`.
    pub tail_log: Vec<f64>,
    pub lower_natural: f64,
    pub upper_natural: f64,
    pub lower_log: f64,
    pub upper_log: f64,
}

impl DensityReport {
    fn new(bound: u64, samples: Vec<SamplePoint>, tail_start: usize, tail_log: Vec<f64>, natural: (f64, f64)) -> Self {
        let (lower_log, upper_log) = if tail_log.is_empty() {
            let v = samples.last().expect("non-empty samples").logarithmic();
            (v, v)
        } else {
            min_max(tail_log.iter().copied())
        };
        DensityReport {
            bound,
            samples,
            tail_start,
            tail_log,
            lower_natural: natural.0,
            upper_natural: natural.1,
            lower_log,
            upper_log,
        }
    }

    pub fn tail(&self) -> &[SamplePoint] {
        &self.samples[self.tail_start..]
    }

    pub fn last(&self) -> &SamplePoint {
        self.samples.last().expect("reports have at least two samples")
    }

    /// Natural ratio at the largest sample.
    pub fn measured_natural(&self) -> f64 {
        self.last().natural()
    }

    /// Logarithmic estimate at the largest sample.
    pub fn measured_log(&self) -> f64 {
        self.tail_log.last().copied().unwrap_or_else(|| self.cumulative_log())
    }

    /// Cumulative logarithmic ratio at the largest sample.
    pub fn cumulative_log(&self) -> f64 {
        self.last().logarithmic()
    }

    pub fn natural_oscillation(&self) -> f64 {
        self.upper_natural - self.lower_natural
    }

    pub fn log_oscillation(&self) -> f64 {
        self.upper_log - self.lower_log
    }

    /// Logarithmic estimate at sample `i`, defined past the first tail sample.
    pub fn tail_log_at(&self, i: usize) -> Option<f64> {
        i.checked_sub(self.tail_start + 1)
            .and_then(|j| self.tail_log.get(j).copied())
    }

    /// `(L_S(x_i) - L_S(x_t)) / (L(x_i) - L(x_t))` from the raw sums.
    pub fn window_sum_ratio(&self, i: usize) -> Option<f64> {
        let head = self.samples.get(self.tail_start)?;
        let s = self.samples.get(i).filter(|_| i > self.tail_start)?;
        Some((s.log_sum - head.log_sum) / (s.log_total - head.log_total))
    }
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// `n` geometrically spaced integers from 10 to `x`, deduplicated, ending
/// at `x`.
pub fn sample_points(x: u64, n: usize) -> Vec<u64> {
    let n = n.max(2);
    let lo = 10f64.min(x as f64);
    let ratio = (x as f64 / lo).ln();
    let mut out: Vec<u64> = (0..n)
        .map(|i| (lo * (ratio * i as f64 / (n - 1) as f64).exp()).round() as u64)
        .map(|v| v.clamp(1, x))
        .collect();
    *out.last_mut().unwrap() = x;
    out.dedup();
    out
}

/// Profiles of `S` and of its complement from per-ideal membership flags
/// aligned with `table`.
pub fn profiles_from_membership(
    table: &IdealTable,
    member: &[bool],
    n_samples: usize,
) -> (DensityReport, DensityReport) {
    assert_eq!(member.len(), table.len());
    let points = sample_points(table.bound(), n_samples);
    let tail_start = points.len() / 2;
    let mut inside = Vec::with_capacity(points.len());
    let mut outside = Vec::with_capacity(points.len());
    let (mut s_count, mut v_count) = (0u64, 0u64);
    let (mut s_log, mut v_log, mut all_log) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    // tail accumulators: weighted sums of S/H and V/H, and the weight
    let (mut s_mean, mut v_mean, mut weight) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    let (mut s_tail, mut v_tail) = (Vec::new(), Vec::new());
    let mut s_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut v_range = s_range;
    let widen = |r: &mut (f64, f64), v: f64| *r = (r.0.min(v), r.1.max(v));
    let mut i = 0;
    for (j, &x) in points.iter().enumerate() {
        let in_tail = j > tail_start;
        while i < table.len() && table.norm(i) <= x {
            let n = table.norm(i);
            let w = 1.0 / n as f64;
            let mut group = 0u64;
            while i < table.len() && table.norm(i) == n {
                all_log += w;
                if member[i] {
                    s_count += 1;
                    s_log += w;
                } else {
                    v_count += 1;
                    v_log += w;
                }
                group += 1;
                i += 1;
            }
            if in_tail {
                let total = (s_count + v_count) as f64;
                let (rs, rv) = (s_count as f64 / total, v_count as f64 / total);
                let gw = group as f64 * w;
                s_mean += gw * rs;
                v_mean += gw * rv;
                weight += gw;
                widen(&mut s_range, rs);
                widen(&mut v_range, rv);
            }
        }
        let total = s_count + v_count;
        if j == tail_start {
            widen(&mut s_range, s_count as f64 / total as f64);
            widen(&mut v_range, v_count as f64 / total as f64);
        }
        if in_tail && weight.value() > 0.0 {
            s_tail.push((s_mean.value() / weight.value()).clamp(0.0, 1.0));
            v_tail.push((v_mean.value() / weight.value()).clamp(0.0, 1.0));
        }
        let log_total = all_log.value();
        inside.push(SamplePoint {
            x,
            count: s_count,
            total,
            log_sum: s_log.value(),
            log_total,
        });
        outside.push(SamplePoint {
            x,
            count: v_count,
            total,
            log_sum: v_log.value(),
            log_total,
        });
    }
    let bound = table.bound();
    (
        DensityReport::new(bound, inside, tail_start, s_tail, s_range),
        DensityReport::new(bound, outside, tail_start, v_tail, v_range),
    )
}

/// Membership flags for every entry of `table`, computed in parallel.
pub fn membership<F>(table: &IdealTable, pred: F) -> Vec<bool>
where
    F: Fn(&Ideal) -> bool + Sync,
{
    (0..table.len())
        .into_par_iter()
        .map(|i| pred(&table.ideal(i)))
        .collect()
}

/// Membership in `M_A` for every entry of `table`.
pub fn family_membership(table: &IdealTable, family: &AFamily) -> Result<Vec<bool>> {
    if table.field() != family.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(match family.rule() {
        FamilyRule::Explicit(m) => mark_multiples(table, m),
        _ => membership(table, |b| family.is_multiple_unchecked(b)),
    })
}

fn check_profile_args(x: u64, n_samples: usize) -> Result<()> {
    if x < 100 {
        return Err(Error::BoundTooSmall { got: x, min: 100 });
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    Ok(())
}

/// Profile of the set of ideals satisfying `pred`, up to norm `x`.
pub fn density_profile<F>(field: &NumberField, x: u64, n_samples: usize, pred: F) -> Result<DensityReport>
where
    F: Fn(&Ideal) -> bool + Sync,
{
    check_profile_args(x, n_samples)?;
    let table = IdealTable::all(*field, x);
    Ok(profiles_from_membership(&table, &membership(&table, pred), n_samples).0)
}

/// Profiles of `M_A` and `V_A` up to norm `x`.
pub fn family_profiles(family: &AFamily, x: u64, n_samples: usize) -> Result<(DensityReport, DensityReport)> {
    check_profile_args(x, n_samples)?;
    let table = IdealTable::all(family.field(), x);
    let member = family_membership(&table, family)?;
    Ok(profiles_from_membership(&table, &member, n_samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub holds: bool,
    pub epsilon: f64,
    /// `delta_hat - d_hat`.
    pub lower_margin: f64,
    /// `Delta_hat - delta_hat`.
    pub middle_margin: f64,
    /// `D_hat - Delta_hat`.
    pub upper_margin: f64,
}

/// Checks `d_hat - eps <= delta_hat <= Delta_hat <= D_hat + eps`.
pub fn check_density_inequality(report: &DensityReport, epsilon: f64) -> Result<InequalityCheck> {
    let tail = report.tail().len();
    if tail < 4 {
        return Err(Error::InvalidArgument(format!(
            "density inequality needs at least 4 tail samples, report has {tail}"
        )));
    }
    let lower_margin = report.lower_log - report.lower_natural;
    let middle_margin = report.upper_log - report.lower_log;
    let upper_margin = report.upper_natural - report.upper_log;
    Ok(InequalityCheck {
        holds: lower_margin >= -epsilon && middle_margin >= 0.0 && upper_margin >= -epsilon,
        epsilon,
        lower_margin,
        middle_margin,
        upper_margin,
    })
}
