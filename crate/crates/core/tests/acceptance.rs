//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digitwalk_core::classify::{classify, classify_rational, Classified, Verdict};
use digitwalk_core::digits::{complement, expand, EventuallyPeriodicDigits, Rational};
use digitwalk_core::equivalence::{insert_run, remove_run, tails_agree};
use digitwalk_core::report::{survey, OutputFormat, SurveyConfig};
use digitwalk_core::topology::crossing_count;
use digitwalk_core::walk::{step, torsion, walk_prefix, Walker, SCHEMES};
use digitwalk_core::{GridSpec, LatticePoint, TurnMap, WalkState};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(p: i64, den: i64) -> Rational {
    Rational::new(p.into(), den.into())
}

fn reduced(max_q: i64) -> impl Iterator<Item = (i64, i64)> {
    (1..=max_q).flat_map(|den| (0..den).filter(move |p| p.gcd(&den) == 1).map(move |p| (p, den)))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Net turn of one period by summing the turn table directly.
fn period_turn(d: &EventuallyPeriodicDigits, tm: &TurnMap) -> i64 {
    d.period().iter().map(|&z| i64::from(tm.turns()[usize::from(z)])).sum()
}

fn closed_fields(c: &Classified) -> Option<(u32, usize, usize)> {
    match *c.verdict() {
        Verdict::Closed {
            multiplier,
            cycle_length,
            distinct_points,
            ..
        } => Some((multiplier, cycle_length, distinct_points)),
        Verdict::Drift { .. } => None,
    }
}

fn paper_goldens() -> Outcome {
    let tm = TurnMap::for_base(2).unwrap();
    for (p, den) in [(2, 3), (4, 5)] {
        let c = classify_rational(&q(p, den), &tm).unwrap();
        ensure(!c.verdict().is_closed(), || format!("{p}/{den} is {:?}", c.verdict()))?;
    }
    let c = classify_rational(&q(6, 7), &tm).unwrap();
    let (k, len, pts) = closed_fields(&c).ok_or("6/7 does not close")?;
    ensure(len == 18 && pts == 18, || format!("6/7: k={k} cycle={len} points={pts}"))?;
    Ok(format!("2/3 drift, 4/5 drift, 6/7 closed k={k} cycle={len} points={pts}"))
}

fn closure_multiplier_law() -> Outcome {
    let tm = TurnMap::for_base(2).unwrap();
    let mut checked = 0;
    for (p, den) in reduced(200) {
        let d = expand(&q(p, den), 2).unwrap();
        let tau_mod = period_turn(&d, &tm).rem_euclid(6);
        if tau_mod == 0 {
            continue;
        }
        let expected_k = 6 / tau_mod.gcd(&6);
        ensure([2, 3, 6].contains(&expected_k), || format!("{p}/{den}: k={expected_k}"))?;
        let pre = d.preperiod().len();
        let period = d.period().len();
        let mut digits = d.digits();
        let mut walker = Walker::new(&tm);
        for _ in 0..pre {
            walker.push(digits.next().unwrap()).unwrap();
        }
        let start = *walker.state();
        let mut first_return = None;
        for t in 1..=6 * period {
            let s = *walker.push(digits.next().unwrap()).unwrap();
            if t % period == 0 && s.position == start.position && s.direction == start.direction {
                first_return = Some(t);
                break;
            }
        }
        let want = expected_k as usize * period;
        ensure(first_return == Some(want), || {
            format!("{p}/{den}: first return {first_return:?}, expected {want}")
        })?;
        let c = classify(&d, &tm).unwrap();
        let (k, len, _) = closed_fields(&c).ok_or_else(|| format!("{p}/{den} not closed"))?;
        ensure(i64::from(k) == expected_k && len == want, || format!("{p}/{den}: classified k={k} cycle={len}"))?;
        checked += 1;
    }
    Ok(format!("{checked} rotating periods, all close after exactly k*L steps"))
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for scheme in SCHEMES {
        let tm = scheme.turn_map();
        for (p, den) in reduced(200) {
            let d = expand(&q(p, den), scheme.base).unwrap();
            let c = classify(&d, &tm).unwrap();
            let pre = d.preperiod().len();
            let period = d.period().len();
            let k = closed_fields(&c).map_or(1, |f| f.0 as usize);
            let steps = 20 * k * period + pre;
            let path = walk_prefix(d.digits(), steps, &tm).unwrap();
            let states = path.states();
            match *c.verdict() {
                Verdict::Drift { v_global } => {
                    for m in 0..(steps - pre) / period {
                        let delta = states[pre + (m + 1) * period].position - states[pre + m * period].position;
                        ensure(delta == v_global, || {
                            format!("{}: {p}/{den} period {m} moved {delta}, expected {v_global}", scheme.name)
                        })?;
                    }
                    ensure(!v_global.is_origin(), || format!("{p}/{den}: zero drift"))?;
                }
                Verdict::Closed { cycle_length, .. } => {
                    for i in pre..=steps - cycle_length {
                        let (a, b) = (states[i], states[i + cycle_length]);
                        ensure(a.position == b.position && a.direction == b.direction, || {
                            format!("{}: {p}/{den} state {i} does not recur", scheme.name)
                        })?;
                    }
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} rationals across bases 2/3/5 agree with simulation"))
}

fn loop_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for scheme in SCHEMES {
        let tm = scheme.turn_map();
        let d = i64::from(tm.direction_count());
        let closers: Vec<(u8, usize)> = (0..scheme.base as u8)
            .filter_map(|z| {
                let t = i64::from(tm.turns()[usize::from(z)]);
                match t.abs() {
                    1 => Some((z, d as usize)),
                    2 => Some((z, 3)),
                    _ => None,
                }
            })
            .collect();
        for _ in 0..1000 {
            let len = rng.gen_range(0..40);
            let prefix: Vec<u8> = (0..len).map(|_| rng.gen_range(0..scheme.base as u8)).collect();
            let before = *walk_prefix(prefix.iter().copied(), len, &tm).unwrap().last();
            let (z, run) = closers[rng.gen_range(0..closers.len())];
            let after = (0..run).fold(before, |s, _| step(&s, z, &tm).unwrap());
            ensure(after.position == before.position && after.direction == before.direction, || {
                format!("{}: run of {run} x {z} after {prefix:?} does not close", scheme.name)
            })?;
            ensure((after.turn_sum - before.turn_sum).abs() == d, || {
                format!("{}: turn sum moved by {}", scheme.name, after.turn_sum - before.turn_sum)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} random prefixes, every closing run returns to its start state"))
}

fn random_rational(rng: &mut ChaCha8Rng, max_q: i64) -> Rational {
    let den = rng.gen_range(1..=max_q);
    q(rng.gen_range(0..den), den)
}

/// Binary digits of `r` by repeated doubling, independent of the library.
fn doubling_digits(r: &Rational, count: usize) -> Vec<u8> {
    let mut x = r.clone();
    let two = Rational::from_integer(BigInt::from(2));
    (0..count)
        .map(|_| {
            x = &x * &two;
            if x >= Rational::one() {
                x -= Rational::one();
                1
            } else {
                0
            }
        })
        .collect()
}

fn pow2_inv(i: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << i)
}

fn surgery_algebra() -> Outcome {
    let tm = TurnMap::for_base(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..100 {
        let r = random_rational(&mut rng, 1000);
        let digits = doubling_digits(&r, 16);
        for n in 1..=16usize {
            let head = (1..n).fold(Rational::zero(), |acc, i| {
                acc + Rational::from_integer(digits[i - 1].into()) * pow2_inv(i)
            });
            let r_prime = &head + (&r - &head) * pow2_inv(6);
            let run_sum = (n..=n + 5).fold(Rational::zero(), |acc, i| acc + pow2_inv(i));
            let r_double_prime = &r_prime + &run_sum;

            let ins0 = insert_run(&r, n, 0, &tm).unwrap();
            let ins1 = insert_run(&r, n, 1, &tm).unwrap();
            ensure(ins0 == r_prime, || format!("r={r} n={n}: inserted zeros give {ins0}, formula {r_prime}"))?;
            ensure(ins1 == r_double_prime, || {
                format!("r={r} n={n}: inserted ones give {ins1}, formula {r_double_prime}")
            })?;
            ensure(&ins1 - &ins0 == run_sum, || format!("r={r} n={n}: r'' - r' mismatch"))?;
            for ins in [&ins0, &ins1] {
                let back = remove_run(ins, n, &tm).unwrap();
                ensure(back == r, || format!("r={r} n={n}: removing from {ins} gives {back}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (r, n) cases: r', r'' and inverse law exact"))
}

fn tail_agreement() -> Outcome {
    let tm = TurnMap::for_base(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    let mut resampled = 0;
    while checked < 100 {
        let r = random_rational(&mut rng, 1000);
        let n = rng.gen_range(1..=16);
        let z = rng.gen_range(0..2u8);
        let r2 = insert_run(&r, n, z, &tm).unwrap();
        if r2 == r {
            // the run landed in an all-z tail: same number, same walk
            resampled += 1;
            continue;
        }
        let (i1, i2) = tails_agree(&r, &r2, &tm, 64)
            .unwrap()
            .ok_or_else(|| format!("r={r} n={n} z={z}: no sync within 64 steps"))?;
        ensure(i2 == i1 + 6, || format!("r={r} n={n} z={z}: sync at ({i1},{i2})"))?;
        let d1 = expand(&r, 2).unwrap();
        let d2 = expand(&r2, 2).unwrap();
        ensure(d1.suffix(i1) == d2.suffix(i2), || format!("r={r}: remaining digits differ"))?;
        let w1 = walk_prefix(d1.digits(), i1 + 300, &tm).unwrap();
        let w2 = walk_prefix(d2.digits(), i2 + 300, &tm).unwrap();
        for t in 0..=300 {
            let (a, b) = (w1.states()[i1 + t], w2.states()[i2 + t]);
            ensure(a.position == b.position && a.direction == b.direction, || {
                format!("r={r} n={n} z={z}: walks part at offset {t}")
            })?;
        }
        checked += 1;
    }
    Ok(format!("{checked} surgery pairs sync with i2 = i1 + 6 ({resampled} value-preserving draws skipped)"))
}

fn mirror_symmetry() -> Outcome {
    let mut checked = 0;
    for scheme in SCHEMES {
        let tm = scheme.turn_map();
        let grid = tm.grid();
        for (p, den) in reduced(100) {
            let d = expand(&q(p, den), scheme.base).unwrap();
            let m = complement(&d);
            let w = walk_prefix(d.digits(), 500, &tm).unwrap();
            let wm = walk_prefix(m.digits(), 500, &tm).unwrap();
            for (a, b) in w.states().iter().zip(wm.states()) {
                ensure(a.mirrored(grid) == *b, || format!("{}: {p}/{den} step {}", scheme.name, a.step_index))?;
            }
            let (c, cm) = (classify(&d, &tm).unwrap(), classify(&m, &tm).unwrap());
            ensure(c.verdict().kind() == cm.verdict().kind(), || format!("{p}/{den}: kinds differ"))?;
            ensure(closed_fields(&c).map(|f| (f.0, f.1)) == closed_fields(&cm).map(|f| (f.0, f.1)), || {
                format!("{p}/{den}: k or cycle length differ")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} expansions mirror pointwise over 500 steps"))
}

fn angle_winding(points: &[LatticePoint], grid: GridSpec, center: LatticePoint) -> f64 {
    let (cx, cy) = grid.to_cartesian(center);
    let total: f64 = points
        .windows(2)
        .map(|w| {
            let (ax, ay) = grid.to_cartesian(w[0]);
            let (bx, by) = grid.to_cartesian(w[1]);
            let (ux, uy, vx, vy) = (ax - cx, ay - cy, bx - cx, by - cy);
            (ux * vy - uy * vx).atan2(ux * vx + uy * vy)
        })
        .sum();
    total / TAU
}

fn winding_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut loops = 0;
    let mut nonzero = 0;
    let mut worst: f64 = 0.0;
    while loops < 200 {
        let scheme = SCHEMES[rng.gen_range(0..SCHEMES.len())];
        let tm = scheme.turn_map();
        let c = classify_rational(&random_rational(&mut rng, 100), &tm).unwrap();
        let Verdict::Closed { cycle_length, .. } = *c.verdict() else {
            continue;
        };
        let pre = c.preperiod_len();
        let pts: Vec<LatticePoint> = c.path().states()[pre..=pre + cycle_length].iter().map(|s| s.position).collect();
        let (amin, amax) = pts.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.a), hi.max(p.a)));
        let (bmin, bmax) = pts.iter().fold((i64::MAX, i64::MIN), |(lo, hi), p| (lo.min(p.b), hi.max(p.b)));
        let mut centers = 0;
        while centers < 5 {
            let center = LatticePoint::new(rng.gen_range(amin - 2..=amax + 2), rng.gen_range(bmin - 2..=bmax + 2));
            if pts.contains(&center) {
                continue;
            }
            let exact = crossing_count(&pts, tm.grid(), center);
            let angle = angle_winding(&pts, tm.grid(), center);
            let residual = (angle - angle.round()).abs();
            worst = worst.max(residual);
            ensure(residual < 1e-6, || format!("residual {residual} for loop of {}", c.digits()))?;
            ensure(exact == angle.round() as i64, || {
                format!("{} around {center}: crossings {exact}, angle {angle}", c.digits())
            })?;
            nonzero += usize::from(exact != 0);
            centers += 1;
        }
        loops += 1;
    }
    Ok(format!("1000 loop/center pairs agree ({nonzero} nonzero), max residual {worst:.1e}"))
}

fn torsion_definition() -> Outcome {
    let tm = TurnMap::for_base(2).unwrap();
    for (digits, want) in [("000000", q(1, 1)), ("111111", q(-1, 1)), ("10", q(0, 1))] {
        let bits: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
        let path = walk_prefix(bits.iter().copied(), bits.len(), &tm).unwrap();
        let t = torsion(&path, bits.len()).unwrap();
        ensure(t == want, || format!("{digits}: t = {t}, expected {want}"))?;
        let r_sum: i64 = bits.iter().map(|&z| i64::from(tm.turns()[usize::from(z)])).sum();
        ensure(t == q(r_sum, 6), || format!("{digits}: t != R/6"))?;
    }
    let s: WalkState = *walk_prefix([0u8; 6], 6, &tm).unwrap().last();
    Ok(format!("t=1, -1, 0 as required (R after six zeros = {})", s.turn_sum))
}

fn survey_determinism() -> Outcome {
    let config = |jobs| SurveyConfig {
        min_q: 1,
        max_q: 50,
        turnmap: TurnMap::for_base(2).unwrap(),
        format: OutputFormat::Csv,
        jobs,
    };
    let one = survey(&config(1)).map_err(|e| e.to_string())?;
    let eight = survey(&config(8)).map_err(|e| e.to_string())?;
    ensure(one == eight, || "outputs differ between 1 and 8 jobs".to_string())?;
    Ok(format!("{} bytes, identical for 1 and 8 jobs", one.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("paper goldens 2/3, 4/5, 6/7", paper_goldens),
        ("closure multiplier law, q <= 200", closure_multiplier_law),
        ("oracle equivalence, q <= 200, bases 2/3/5", oracle_equivalence),
        ("hexagon/square/triangle loop closure", loop_closure),
        ("surgery algebra", surgery_algebra),
        ("tail agreement after surgery", tail_agreement),
        ("mirror symmetry, q <= 100", mirror_symmetry),
        ("winding vs angle accumulation", winding_oracle),
        ("torsion definition", torsion_definition),
        ("survey determinism across job counts", survey_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
