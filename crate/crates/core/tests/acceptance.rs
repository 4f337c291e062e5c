//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed;
//! the process exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use afree::density::{
    a_limit, check_density_inequality, family_membership, family_profiles, finite_ie_density, floor_effect_bound,
    multiplicative_density, profiles_from_membership, sieve_in_table, DEFAULT_X_WORK,
};
use afree::enumerate::{count_ideals, estimate_residue_constant, IdealTable};
use afree::experiments::besicovitch_experiment;
use afree::family::{AFamily, NormInterval};
use afree::field::{class_number_imag_quadratic, primes_up_to_norm, NumberField};
use afree::ideal::Ideal;
use afree::zeta::{dedekind_zeta, harmonic_from_counter, mertens_ratio, EULER_GAMMA};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MILLION: u64 = 1_000_000;
const CATALAN: f64 = 0.915_965_594_177_219;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q() -> NumberField {
    NumberField::rational()
}

fn gauss() -> NumberField {
    NumberField::quadratic(-1).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn ideal_counting() -> Outcome {
    let start = Instant::now();
    let counter = count_ideals(&q(), MILLION);
    for x in 1..=MILLION {
        ensure(counter.count_up_to(x) == x, || {
            format!("H({x}) = {}", counter.count_up_to(x))
        })?;
    }
    let table = IdealTable::all(q(), MILLION);
    ensure(table.len() as u64 == MILLION, || format!("enumerated {}", table.len()))?;
    let mut per_norm = vec![0u32; MILLION as usize + 1];
    for &n in table.norms() {
        per_norm[n as usize] += 1;
    }
    ensure(per_norm[1..] == counter.h_values()[1..], || {
        "enumeration and sieve differ".into()
    })?;
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("H(x) = floor(x) for x <= 1e6, {:.2?}", start.elapsed()))
}

fn gaussian_residue() -> Outcome {
    let start = Instant::now();
    let h = class_number_imag_quadratic(-4).map_err(|e| e.to_string())?;
    let target = 2.0 * PI * h as f64 / (4.0 * 4f64.sqrt());
    ensure((target - PI / 4.0).abs() < 1e-15, || {
        format!("class number formula gave {target}")
    })?;
    let counter = count_ideals(&gauss(), MILLION);
    let ratio = counter.count_up_to(MILLION) as f64 / MILLION as f64;
    ensure((ratio / target - 1.0).abs() < 5e-3, || format!("H/X = {ratio}"))?;
    // lattice points a^2 + b^2 <= x, minus the origin, up to the four units
    let x = 10_000i64;
    let mut lattice = 0i64;
    for a in -100..=100i64 {
        for b in -100..=100i64 {
            if a * a + b * b <= x {
                lattice += 1;
            }
        }
    }
    let oracle = (lattice - 1) / 4;
    let sieved = counter.count_up_to(x as u64) as i64;
    ensure(oracle == sieved, || format!("lattice {oracle} vs sieve {sieved}"))?;
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "H(1e6)/1e6 = {ratio:.6} vs pi/4, rel {:.2e}; lattice H(1e4) = {oracle}",
        (ratio / target - 1.0).abs()
    ))
}

fn harmonic_growth() -> Outcome {
    let mut parts = Vec::new();
    for field in [q(), gauss()] {
        let est = estimate_residue_constant(&field, MILLION).map_err(|e| e.to_string())?;
        let counter = count_ideals(&field, MILLION);
        let sum = harmonic_from_counter(&counter, MILLION as f64);
        let ratio = sum / (est.c_hat * (MILLION as f64).ln());
        ensure((0.95..=1.10).contains(&ratio), || format!("{field}: ratio {ratio}"))?;
        parts.push(format!("{field} {ratio:.4}"));
    }
    Ok(parts.join(", "))
}

fn mertens() -> Outcome {
    let mut parts = Vec::new();
    for (field, target) in [(q(), EULER_GAMMA.exp()), (gauss(), PI / 4.0 * EULER_GAMMA.exp())] {
        let start = Instant::now();
        let m = mertens_ratio(&field, MILLION).map_err(|e| e.to_string())?;
        let rel = (m.ratio / target - 1.0).abs();
        ensure(rel < 0.05, || format!("{field}: ratio {} vs {target}", m.ratio))?;
        within_time(start, Duration::from_secs(60))?;
        parts.push(format!("{field} {:.5} (rel {rel:.1e})", m.ratio));
    }
    Ok(parts.join(", "))
}

fn random_family(rng: &mut ChaCha8Rng, table: &IdealTable, max_norm: u64, max_size: usize) -> Vec<Ideal> {
    let top = table.count_up_to(max_norm);
    let size = rng.random_range(1..=max_size);
    let mut picked: Vec<usize> = Vec::new();
    while picked.len() < size {
        // skip index 0, the unit ideal
        let i = rng.random_range(1..top);
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    picked.into_iter().map(|i| table.ideal(i)).collect()
}

fn finite_families() -> Outcome {
    let ints = |gens: &[u64]| -> Vec<Ideal> { gens.iter().map(|&n| Ideal::principal(q(), n).unwrap()).collect() };
    let two_three = finite_ie_density(&ints(&[2, 3])).map_err(|e| e.to_string())?;
    let four_six = finite_ie_density(&ints(&[4, 6])).map_err(|e| e.to_string())?;
    ensure(two_three == BigRational::new(2.into(), 3.into()), || {
        format!("{{2,3}} gave {two_three}")
    })?;
    ensure(four_six == BigRational::new(1.into(), 3.into()), || {
        format!("{{4,6}} gave {four_six}")
    })?;

    let q_table = IdealTable::all(q(), MILLION);
    for (gens, exact) in [([2u64, 3], &two_three), ([4, 6], &four_six)] {
        let s = sieve_in_table(&q_table, &ints(&gens)).density;
        let diff = (s - exact).to_f64().unwrap().abs();
        ensure(diff < 1e-5, || format!("{gens:?}: sieve differs by {diff}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst: f64 = 0.0;
    for field in [q(), gauss()] {
        let table = if field == q() {
            q_table.clone()
        } else {
            IdealTable::all(field, MILLION)
        };
        let counter = count_ideals(&field, MILLION);
        for _ in 0..10 {
            let members = random_family(&mut rng, &table, 50, 5);
            let exact = finite_ie_density(&members)
                .map_err(|e| e.to_string())?
                .to_f64()
                .unwrap();
            let sieved = sieve_in_table(&table, &members).density.to_f64().unwrap();
            let bound = floor_effect_bound(&members, &counter, MILLION).map_err(|e| e.to_string())?;
            let diff = (exact - sieved).abs();
            ensure(diff <= bound, || {
                let names: Vec<String> = members.iter().map(|a| a.to_string()).collect();
                format!("{field} {{{}}}: |{exact} - {sieved}| > {bound}", names.join(", "))
            })?;
            worst = worst.max(diff / bound);
        }
    }
    Ok(format!(
        "2/3 and 1/3 exact; 20 random families within floor bound (max diff/bound {worst:.3})"
    ))
}

fn primepower_free() -> Outcome {
    let fam = AFamily::prime_powers(q(), 2).map_err(|e| e.to_string())?;
    let (_, v) = family_profiles(&fam, MILLION, 25).map_err(|e| e.to_string())?;
    let q_target = 6.0 / (PI * PI);
    let q_dev = (v.measured_natural() - q_target).abs();
    ensure(q_dev <= 1e-2, || {
        format!("Q: V density {} vs {q_target}", v.measured_natural())
    })?;

    let zeta = dedekind_zeta(&gauss(), 2.0, 100_000).map_err(|e| e.to_string())?;
    ensure(zeta.tail_bound < 1e-4, || format!("tail bound {}", zeta.tail_bound))?;
    // closed form zeta(2) * beta(2) as an independent check of the target
    let closed = PI * PI / 6.0 * CATALAN;
    ensure(
        closed >= zeta.value - 1e-12 && closed <= zeta.value + zeta.tail_bound,
        || format!("truncated zeta {} (+{}) misses {closed}", zeta.value, zeta.tail_bound),
    )?;
    let g_target = 1.0 / zeta.value;
    let fam = AFamily::prime_powers(gauss(), 2).map_err(|e| e.to_string())?;
    let (_, v) = family_profiles(&fam, 100_000, 25).map_err(|e| e.to_string())?;
    let g_measured = v.measured_natural();
    let g_dev = (g_measured - g_target).abs();
    ensure(g_dev <= 1e-2, || format!("Q(i): V density {g_measured} vs {g_target}"))?;
    Ok(format!(
        "Q dev {q_dev:.1e} from 6/pi^2, Q(i) {g_measured:.6} vs {g_target:.6} (dev {g_dev:.1e})"
    ))
}

/// Families for the monotonicity suite: explicit sets, prime powers and
/// finite interval unions over `Q` and `Q(i)`.
fn suite_family(rng: &mut ChaCha8Rng, field: NumberField, table: &IdealTable) -> AFamily {
    match rng.random_range(0..3) {
        0 => AFamily::explicit(field, random_family(rng, table, 60, 5)).unwrap(),
        1 => AFamily::prime_powers(field, rng.random_range(2..=3)).unwrap(),
        _ => {
            let lo = rng.random_range(2..40);
            let hi = lo + rng.random_range(1..30);
            AFamily::norm_intervals(field, vec![NormInterval::new(lo, hi).unwrap()]).unwrap()
        }
    }
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let tables = [IdealTable::all(q(), MILLION), IdealTable::all(gauss(), MILLION)];
    let mut min_lower: f64 = f64::INFINITY;
    let mut min_upper: f64 = f64::INFINITY;
    for case in 0..25 {
        let table = &tables[case % 2];
        let fam = suite_family(&mut rng, table.field(), table);
        let ctx = |msg: String| format!("family {case} {fam}: {msg}");

        let seq = match a_limit(&fam, 12) {
            Ok(s) => s,
            Err(e) => return Err(ctx(e.to_string())),
        };
        ensure(seq.windows(2).all(|w| w[0] <= w[1]), || ctx("A_r decreases".into()))?;
        ensure(seq.iter().all(|v| *v <= BigRational::one()), || {
            ctx("A_r exceeds 1".into())
        })?;

        let mut prev: Option<BigRational> = None;
        for k in 0..=10 {
            let st = multiplicative_density(&fam, k, DEFAULT_X_WORK).map_err(|e| ctx(e.to_string()))?;
            ensure(!st.via_sieve, || ctx(format!("B_{k} left the exact path")))?;
            if let Some(p) = &prev {
                ensure(st.b_k >= *p, || ctx(format!("B_{k} < B_{}", k - 1)))?;
            }
            prev = Some(st.b_k);
        }

        let member = family_membership(table, &fam).map_err(|e| ctx(e.to_string()))?;
        let (m, v) = profiles_from_membership(table, &member, 25);
        for (a, b) in m.samples.iter().zip(&v.samples) {
            ensure(a.count + b.count == a.total, || ctx(format!("counts at {}", a.x)))?;
            let sum = a.logarithmic() + b.logarithmic();
            ensure((sum - 1.0).abs() <= 1e-12, || {
                ctx(format!("log ratios sum to {sum} at {}", a.x))
            })?;
            ensure(
                a.natural() + b.natural() == 1.0 || (a.natural() + b.natural() - 1.0).abs() <= 1e-15,
                || ctx(format!("natural ratios at {}", a.x)),
            )?;
        }
        let chk = check_density_inequality(&m, 1e-3).map_err(|e| ctx(e.to_string()))?;
        ensure(chk.holds, || ctx(format!("inequality fails: {chk:?}")))?;
        min_lower = min_lower.min(chk.lower_margin);
        min_upper = min_upper.min(chk.upper_margin);
    }
    Ok(format!(
        "25 families; smallest margins delta-d {min_lower:.2e}, D-Delta {min_upper:.2e}"
    ))
}

fn main_theorem_triangle() -> Outcome {
    let fam = AFamily::prime_powers(q(), 2).map_err(|e| e.to_string())?;
    let r_max = 200;
    let k_max = 200;
    // sum over primes p > p_r of 1/p^2 is below 1/p_r
    let p_r = primes_up_to_norm(&q(), 2000).primes()[r_max - 1].norm;
    let tail = 1.0 / p_r as f64;
    ensure(tail < 1e-3, || format!("truncation tail {tail}"))?;
    let a = a_limit(&fam, r_max).map_err(|e| e.to_string())?;
    let a_r = a.last().unwrap().to_f64().unwrap();
    let b = multiplicative_density(&fam, k_max, DEFAULT_X_WORK).map_err(|e| e.to_string())?;
    let b_k = b.value();
    let (m, _) = family_profiles(&fam, MILLION, 25).map_err(|e| e.to_string())?;
    let log = m.measured_log();
    ensure((a_r - b_k).abs() <= 1e-2, || format!("|A - B| = {}", (a_r - b_k).abs()))?;
    ensure((log - a_r).abs() <= 1e-2, || {
        format!("|log - A| = {}", (log - a_r).abs())
    })?;
    let target = 1.0 - 6.0 / (PI * PI);
    Ok(format!(
        "A_200 {a_r:.6}, B_200 {b_k:.6}, log {log:.6} (limit {target:.6}, tail < {tail:.1e})"
    ))
}

fn besicovitch() -> Outcome {
    let res = besicovitch_experiment(&q(), 10, 3, 3, MILLION, 25).map_err(|e| e.to_string())?;
    let fam = AFamily::norm_intervals(
        q(),
        vec![
            NormInterval::new(10, 20).unwrap(),
            NormInterval::new(1000, 2000).unwrap(),
        ],
    )
    .unwrap();
    let (m, _) = family_profiles(&fam, MILLION, 25).map_err(|e| e.to_string())?;

    // direct sieve: n is a multiple iff some d in (10, 20] or (1000, 2000] divides it
    let n = MILLION as usize;
    let mut hit = vec![false; n + 1];
    for d in (11..=20).chain(1001..=2000) {
        for k in (d..=n).step_by(d) {
            hit[k] = true;
        }
    }
    let mut prefix = vec![0u64; n + 1];
    for k in 1..=n {
        prefix[k] = prefix[k - 1] + hit[k] as u64;
    }
    for s in &m.samples {
        ensure(prefix[s.x as usize] == s.count, || {
            format!("count at {} differs from sieve", s.x)
        })?;
    }
    // extremes of the natural ratio over every n in the tail range
    let t = m.tail()[0].x as usize;
    let (lo, hi) = (t..=n)
        .map(|k| prefix[k] as f64 / k as f64)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let oracle_osc = hi - lo;

    let natural_osc = m.natural_oscillation();
    let log_osc = m.log_oscillation();
    ensure((oracle_osc - natural_osc).abs() < 1e-12, || {
        format!("oracle oscillation {oracle_osc}")
    })?;
    ensure(natural_osc >= 0.01, || format!("natural oscillation {natural_osc}"))?;
    ensure(log_osc < natural_osc, || {
        format!("log variation {log_osc} >= {natural_osc}")
    })?;
    ensure(res.passed(), || format!("experiment verdicts {:?}", res.verdicts))?;
    Ok(format!(
        "natural oscillation {natural_osc:.4}, log variation {log_osc:.4}"
    ))
}

fn run_cli(args: &[&str], out: &std::path::Path, threads: &str) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_afree"))
        .args(args)
        .args(["--threads", threads, "--seed", "7", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(status.status.code().unwrap_or(-1))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let aset = dir.path().join("family.json");
    fs::write(
        &aset,
        r#"{"field": "Q(sqrt -1)", "kind": "explicit", "members": [[[2, 0, 1]], [[5, 1, 2]], 3]}"#,
    )
    .map_err(|e| e.to_string())?;
    let aset = aset.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["count", "--field", "Q(sqrt -1)", "--max-norm", "200000"],
        vec!["mertens", "--field", "Q(sqrt 5)", "--cutoff", "100000"],
        vec!["density", "--aset", aset, "--max-norm", "200000"],
        vec!["experiment", "besicovitch"],
        vec![
            "experiment",
            "primepower-free",
            "--field",
            "Q(sqrt -1)",
            "--max-norm",
            "100000",
        ],
    ];
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("run{i}-a"));
        let b = dir.path().join(format!("run{i}-b"));
        let ca = run_cli(args, &a, "1")?;
        let cb = run_cli(args, &b, "4")?;
        ensure(ca == 0 && cb == 0, || format!("{args:?} exited with {ca}/{cb}"))?;
        let mut names: Vec<_> = fs::read_dir(&a)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for name in names {
            let x = fs::read(a.join(&name)).map_err(|e| e.to_string())?;
            let y = fs::read(b.join(&name)).map_err(|e| format!("{name:?} missing: {e}"))?;
            ensure(x == y, || format!("{args:?}: {name:?} differs between thread counts"))?;
            files += 1;
        }
    }
    Ok(format!("{files} output files byte-identical across --threads 1 and 4"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact ideal counts over Q", ideal_counting),
        ("ideal-count residue of Q(i)", gaussian_residue),
        ("harmonic sum against c log x", harmonic_growth),
        ("Mertens products", mertens),
        ("finite inclusion-exclusion vs sieve", finite_families),
        ("square-free densities", primepower_free),
        ("monotonicity and density inequalities", monotonicity),
        ("A, B and logarithmic density agree", main_theorem_triangle),
        ("Besicovitch oscillation", besicovitch),
        ("determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.1?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{took:.1?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
