//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use supersat::amplifier::{
    affine_fiber_count, choose_parameters, fiber_count_by_enumeration, goodness_stats,
    run_amplifier4, run_varnavides3, AmplifierReport, Sampling,
};
use supersat::counting::{count_all_convolution, count_all_naive, count_distinct};
use supersat::encoding::no_carry_sides;
use supersat::extremal::{max_free_subset, turan_threshold, SearchLimits};
use supersat::geometry::{behrend_set, collinear, sphere_cap};
use supersat::modular::{choose_prime, is_prime};
use supersat::{GroundSet, InvariantEquation, Prime, Rational, Universe};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_equation(rng: &mut ChaCha8Rng, k: usize, bound: i64) -> InvariantEquation {
    loop {
        let mut coeffs: Vec<i64> = (0..k - 1)
            .map(|_| loop {
                let a = rng.gen_range(-bound..=bound);
                if a != 0 {
                    break a;
                }
            })
            .collect();
        let last = -coeffs.iter().sum::<i64>();
        if last != 0 && last.abs() <= 2 * bound {
            coeffs.push(last);
            return InvariantEquation::new(coeffs).unwrap();
        }
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let primes: Vec<u64> = (3..=512).filter(|&p| is_prime(p)).collect();
    let mut total = 0u64;
    for case in 0..200 {
        let k = rng.gen_range(3..=4);
        let eq = random_equation(&mut rng, k, 4);
        let universe = if case % 2 == 0 {
            Universe::interval(rng.gen_range(1..=512))
        } else {
            Universe::field(Prime::new(primes[rng.gen_range(0..primes.len())]).unwrap())
        };
        let cap = if k == 3 {
            universe.size()
        } else {
            universe.size().min(120)
        };
        let size = rng.gen_range(0..=cap);
        let set = GroundSet::random_with_size(universe, size, rng.gen()).unwrap();
        let naive = count_all_naive(&eq, &set).map_err(|e| e.to_string())?;
        let conv = count_all_convolution(&eq, &set).map_err(|e| e.to_string())?;
        ensure(naive == conv, || {
            format!("{eq} on {universe:?} |S|={size}: naive {naive}, convolution {conv}")
        })?;
        total += naive;
    }
    Ok(format!("200 pairs agree (total {total} solutions)"))
}

fn brute_distinct_3ap(set: &GroundSet) -> u64 {
    let s = set.elements();
    let mut count = 0;
    for &a in s {
        for &b in s {
            for &c in s {
                if a != b && b != c && a != c && a + b == 2 * c {
                    count += 1;
                }
            }
        }
    }
    count
}

fn brute_distinct_sidon(set: &GroundSet) -> u64 {
    let s = set.elements();
    let mut count = 0;
    for &a in s {
        for &b in s {
            for &c in s {
                let Some(d) = (a + b).checked_sub(c) else {
                    continue;
                };
                let distinct = [a, b, c, d].iter().collect::<HashSet<_>>().len() == 4;
                if distinct && set.contains(d) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn criterion_2() -> Check {
    let ap = InvariantEquation::three_ap();
    for mask in 0u32..1 << 12 {
        let set = GroundSet::new(
            Universe::interval(12),
            (1..=12).filter(|i| mask >> (i - 1) & 1 == 1),
        )
        .unwrap();
        let fast = count_distinct(&ap, &set).map_err(|e| e.to_string())?;
        ensure(fast == brute_distinct_3ap(&set), || {
            format!("3-AP mismatch on {:?}", set.elements())
        })?;
    }
    let sidon = InvariantEquation::sidon();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let size = rng.gen_range(0..=40);
        let set = GroundSet::random_with_size(Universe::interval(40), size, rng.gen()).unwrap();
        let fast = count_distinct(&sidon, &set).map_err(|e| e.to_string())?;
        ensure(fast == brute_distinct_sidon(&set), || {
            format!("Sidon mismatch on {:?}", set.elements())
        })?;
    }
    Ok("4096 subsets of [12] (3-AP) and 500 subsets of [40] (Sidon) agree".into())
}

/// Largest 3-AP-free subsets of [n], n = 1..=20, from two independent
/// exhaustive searches (subset enumeration and a greedy-extension DFS).
const R3: [u64; 20] = [1, 2, 2, 3, 4, 4, 4, 4, 5, 5, 6, 6, 7, 8, 8, 8, 8, 8, 8, 9];

fn criterion_3() -> Check {
    let ap = InvariantEquation::three_ap();
    for n in 1..=20u64 {
        let rec = max_free_subset(&ap, n).map_err(|e| e.to_string())?;
        ensure(rec.max_free_size == R3[n as usize - 1], || {
            format!(
                "n = {n}: search {} vs table {}",
                rec.max_free_size,
                R3[n as usize - 1]
            )
        })?;
        let witness = GroundSet::new(Universe::interval(n), rec.witness.clone()).unwrap();
        ensure(witness.len() as u64 == rec.max_free_size, || {
            format!("n = {n}: witness size")
        })?;
        ensure(count_distinct(&ap, &witness).unwrap() == 0, || {
            format!("n = {n}: witness has a progression")
        })?;
    }
    Ok(format!(
        "table matches for n = 1..20, value 5 at n = 9 and {} at n = 20",
        R3[19]
    ))
}

fn criterion_4() -> Check {
    let mut caps = 0;
    for t in 2..=6u64 {
        for d in 2..=4usize {
            let cap = sphere_cap(t, d).map_err(|e| e.to_string())?;
            let on_sphere = cap.points.iter().all(|x| {
                x.len() == d
                    && x.iter().all(|&c| (1..=t as i64).contains(&c))
                    && x.iter().map(|&c| (c * c) as u64).sum::<u64>() == cap.r
            });
            ensure(on_sphere, || format!("({t}, {d}): point off the sphere"))?;
            let floor = (t.pow(d as u32 - 2)).div_ceil(d as u64);
            ensure(cap.len() as u64 >= floor, || {
                format!("({t}, {d}): |X| = {} < {floor}", cap.len())
            })?;
            let pts = &cap.points;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    for k in j + 1..pts.len() {
                        ensure(!collinear(&pts[i], &pts[j], &pts[k]), || {
                            format!("({t}, {d}): collinear triple")
                        })?;
                    }
                }
            }
            caps += 1;
        }
    }
    Ok(format!("{caps} caps verified"))
}

fn criterion_5() -> Check {
    let ap = InvariantEquation::three_ap();
    let mut sizes = Vec::new();
    for n in [10u64, 100, 1000, 10_000] {
        let b = behrend_set(n).map_err(|e| e.to_string())?;
        let count = count_distinct(&ap, &b.set).map_err(|e| e.to_string())?;
        ensure(count == 0, || format!("n = {n}: {count} progressions"))?;
        ensure(
            b.set.elements().iter().all(|&x| (1..=n).contains(&x)),
            || format!("n = {n}: out of range"),
        )?;
        sizes.push(format!("{n}:{}", b.set.len()));
    }
    Ok(format!("AP-free, sizes {}", sizes.join(" ")))
}

fn criterion_6() -> Check {
    let mut checked = 0u64;
    let mut hits = 0u64;
    let equations = [
        vec![1, 1, -2],
        vec![1, 2, -3],
        vec![2, 1, -3],
        vec![1, -2, 1],
        vec![3, -1, -2],
    ];
    for coeffs in equations {
        let eq = InvariantEquation::new(coeffs).unwrap();
        for index in 0..1u32 << 6 {
            let pts: Vec<Vec<i64>> = (0..3)
                .map(|j| {
                    (0..2)
                        .map(|c| (index >> (2 * j + c) & 1) as i64 + 1)
                        .collect()
                })
                .collect();
            let sides = no_carry_sides(&eq, &pts, 2).map_err(|e| e.to_string())?;
            ensure(sides.agrees(), || format!("{eq}: counterexample {pts:?}"))?;
            checked += 1;
            hits += sides.encoded_zero as u64;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10_000 {
        let eq = random_equation(&mut rng, 4, 3);
        let t = rng.gen_range(1..=5i64);
        let d = rng.gen_range(1..=4usize);
        let mut pts: Vec<Vec<i64>> = (0..4)
            .map(|_| (0..d).map(|_| rng.gen_range(1..=t)).collect())
            .collect();
        if i % 2 == 0 {
            let c = eq.coeffs();
            let last: Option<Vec<i64>> = (0..d)
                .map(|j| {
                    let partial: i64 = (0..3).map(|v| c[v] * pts[v][j]).sum();
                    (partial % c[3] == 0)
                        .then(|| -partial / c[3])
                        .filter(|v| (1..=t).contains(v))
                })
                .collect();
            if let Some(last) = last {
                pts[3] = last;
            }
        }
        let sides = no_carry_sides(&eq, &pts, t as u64).map_err(|e| e.to_string())?;
        ensure(sides.agrees(), || {
            format!("{eq}, t = {t}: counterexample {pts:?}")
        })?;
        checked += 1;
        hits += sides.encoded_zero as u64;
    }
    Ok(format!(
        "{checked} instances, {hits} solutions, no counterexample"
    ))
}

fn criterion_7() -> Check {
    let p = Prime::new(13).unwrap();
    let full: Vec<Vec<i64>> = (1..=12)
        .flat_map(|a| (1..=12).map(move |b| vec![a, b]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_exact = Rational::from_integer(1);
    let mut worst_sampled = 1.0f64;
    for _ in 0..20 {
        let size = rng.gen_range(1..=12);
        let set = GroundSet::random_with_size(Universe::field(p), size, rng.gen()).unwrap();
        // smallest X allowed by ε|X| ≥ 8
        let x_len = (8 * 13u64).div_ceil(size) as usize;
        let grid: Vec<Vec<i64>> = rand::seq::index::sample(&mut rng, full.len(), x_len)
            .into_iter()
            .map(|i| full[i].clone())
            .collect();
        ensure(size as usize * grid.len() >= 8 * 13, || "guard".into())?;
        let exact = goodness_stats::<Rational>(&grid, &set, Sampling::Exhaustive)
            .map_err(|e| e.to_string())?;
        ensure(exact.samples == 13u64.pow(3), || {
            "not every sample enumerated".into()
        })?;
        ensure(exact.good_fraction >= Rational::new(1, 2), || {
            format!("|S| = {size}: exact {}", exact.good_fraction)
        })?;
        ensure(exact.mean_fiber == exact.expected_fiber, || {
            format!("|S| = {size}: mean fiber")
        })?;
        let sampled = goodness_stats::<f64>(
            &grid,
            &set,
            Sampling::Random {
                trials: 10_000,
                seed: rng.gen(),
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(sampled.good_fraction >= 0.47, || {
            format!("|S| = {size}: sampled {}", sampled.good_fraction)
        })?;
        worst_exact = worst_exact.min(exact.good_fraction);
        worst_sampled = worst_sampled.min(sampled.good_fraction);
    }
    Ok(format!("X ⊆ [12]^2 at the guard boundary, worst exact fraction {worst_exact}, worst sampled {worst_sampled:.4}"))
}

fn criterion_8_report(seed: u64) -> Result<AmplifierReport, String> {
    let sidon = InvariantEquation::sidon();
    let p = choose_prime(100, sidon.a_sum())
        .map_err(|e| e.to_string())?
        .p;
    let set = GroundSet::random_with_density(Universe::field(p), Rational::new(1, 2), seed)
        .map_err(|e| e.to_string())?;
    let mut params = choose_parameters(
        Rational::new(1, 2),
        Rational::from_integer(1),
        sidon.a_sum(),
        Some((3, 3)),
    )
    .map_err(|e| e.to_string())?;
    params.trials = 100_000;
    params.seed = seed;
    params.enforce_guard = false;
    run_amplifier4(&sidon, &set, &params).map_err(|e| e.to_string())
}

fn criterion_8() -> Check {
    let r = criterion_8_report(7)?;
    ensure(r.trials == 100_000, || "trial count".into())?;
    ensure(r.validity_failures == 0, || {
        format!("{} invalid emissions", r.validity_failures)
    })?;
    ensure(r.solutions_emitted > 0, || "nothing emitted".into())?;
    ensure(
        r.distinct_solutions <= r.solutions_emitted && r.solutions_emitted <= r.trials,
        || "accounting".into(),
    )?;
    let p = r.p;
    for sol in &r.sample_solutions {
        let [a, b, c, d] = sol.s[..] else {
            return Err("arity".into());
        };
        ensure((a + b) % p == (c + d) % p, || {
            format!("{:?} is not a solution", sol.s)
        })?;
    }
    Ok(format!(
        "p = {p}, {} emitted, {} distinct, 0 invalid",
        r.solutions_emitted, r.distinct_solutions
    ))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut degenerate = 0;
    let mut cases = 0;
    for p in [5u64, 7] {
        let prime = Prime::new(p).unwrap();
        for d in [2usize, 3] {
            for case in 0..100 {
                let mut pts: Vec<Vec<i64>> = (0..3)
                    .map(|_| (0..d).map(|_| rng.gen_range(1..p as i64)).collect())
                    .collect();
                if case % 3 == 0 {
                    let lambda = rng.gen_range(0..p as i64);
                    pts[2] = (0..d)
                        .map(|j| pts[0][j] + lambda * (pts[1][j] - pts[0][j]))
                        .collect();
                }
                let targets: Vec<u64> = (0..3).map(|_| rng.gen_range(0..p)).collect();
                let fast =
                    affine_fiber_count(&pts, &targets, prime, d).map_err(|e| e.to_string())?;
                let slow = fiber_count_by_enumeration(&pts, &targets, prime, d)
                    .map_err(|e| e.to_string())?;
                ensure(fast.count == slow, || {
                    format!("p = {p}, {pts:?} -> {targets:?}: {} vs {slow}", fast.count)
                })?;
                if !fast.degenerate {
                    ensure(fast.count == (p as u128).pow(d as u32 - 2), || {
                        "independent triple count".into()
                    })?;
                }
                degenerate += fast.degenerate as u32;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases agree ({degenerate} degenerate)"))
}

fn criterion_10() -> Check {
    let ap = InvariantEquation::three_ap();
    let p = Prime::new(41).unwrap();
    let epsilon = Rational::new(9, 10);
    let est = turan_threshold(
        &ap,
        epsilon / Rational::from_integer(2),
        30,
        &SearchLimits::default(),
    )
    .map_err(|e| e.to_string())?;
    let r = est.r_hat.ok_or("threshold not certified on the horizon")?;
    let floor = (41.0 * 41.0) / (2.0 * (r * r) as f64);
    let mut worst = u64::MAX;
    for seed in 0..5 {
        let set = GroundSet::random_with_density(Universe::field(p), epsilon, seed).unwrap();
        let report =
            run_varnavides3(&ap, &set, r, Sampling::Exhaustive).map_err(|e| e.to_string())?;
        ensure(report.trials == 41 * 41, || {
            "not every sample enumerated".into()
        })?;
        ensure(report.validity_failures == 0, || "invalid emission".into())?;
        ensure(report.dedup_sound == Some(true), || {
            "dedup bound exceeded".into()
        })?;
        ensure(report.distinct_solutions as f64 >= floor, || {
            format!(
                "seed {seed}: {} distinct < {floor:.3}",
                report.distinct_solutions
            )
        })?;
        worst = worst.min(report.distinct_solutions);
    }
    Ok(format!(
        "R = {r}, floor {floor:.3}, fewest distinct solutions {worst} over 5 sets"
    ))
}

fn criterion_11() -> Check {
    let run = |threads: usize| -> Result<String, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        let report = pool.install(|| criterion_8_report(7))?;
        serde_json::to_string(&report).map_err(|e| e.to_string())
    };
    let one = run(1)?;
    let eight = run(8)?;
    ensure(one == eight, || {
        "reports differ between 1 and 8 threads".into()
    })?;
    Ok(format!("{} bytes, identical", one.len()))
}

type Criterion = (u32, &'static str, u64, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "oracle equivalence", 10, criterion_1),
        (2, "distinctness correction", 30, criterion_2),
        (3, "extremal reproduction", 60, criterion_3),
        (4, "sphere-cap invariants", 60, criterion_4),
        (5, "Behrend sets are 3-AP-free", 30, criterion_5),
        (6, "no-carry encoding", 10, criterion_6),
        (7, "goodness floor", 60, criterion_7),
        (8, "transfer identity and validity", 120, criterion_8),
        (9, "affine fiber count", 60, criterion_9),
        (10, "three-variable floor at exact scale", 120, criterion_10),
        (11, "determinism across thread counts", 240, criterion_11),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= Duration::from_secs(limit) {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.1?}, limit {limit}s"))
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {id:>2} ({name}) [{elapsed:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id:>2} ({name}) [{elapsed:.2?}]: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
