//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run a subset with `cargo test --test acceptance -- A6 A12`.

use std::time::{Duration, Instant};

use bisectlab::harness::{calibrate_perturbation, default_grid, run_sweep, ExperimentSpec, GridPoint, Measurement};
use bisectlab::oracles::{map_bruteforce, min_bisection_bruteforce, minority_swap_check};
use bisectlab::refine::{recover, ReplicaConfig};
use bisectlab::spectral::centered_norm_estimate;
use bisectlab::thresholds::binomial::{ln_normal_upper_tail, ln_pmf};
use bisectlab::thresholds::{exact_log_ratio, exact_p, lclt_pmf, poisson_sum_pmf, ratio_bound_sparse, sigma};
use bisectlab::{census, generate, EdgeDensity, ModelParams, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let took = start.elapsed();
    (took < limit, format!("{:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
}

/// Binomial pmf by the multiplicative recurrence, in plain doubles.
fn pmf_recurrence(m: u64, p: f64) -> Vec<f64> {
    let mut out = vec![0.0; m as usize + 1];
    if p >= 1.0 {
        out[m as usize] = 1.0;
        return out;
    }
    out[0] = (1.0 - p).powi(m as i32);
    let odds = p / (1.0 - p);
    for k in 0..m as usize {
        out[k + 1] = out[k] * (m as usize - k) as f64 / (k + 1) as f64 * odds;
    }
    out
}

fn a1() -> Outcome {
    let start = Instant::now();
    let probs: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let mut worst = 0.0f64;
    for m in 0..=12u64 {
        for n in 0..=12u64 {
            for &p in &probs {
                for &q in &probs {
                    let px = pmf_recurrence(m, p.max(q));
                    let py = pmf_recurrence(n, p.min(q));
                    let mut want = 0.0;
                    for (k, &x) in px.iter().enumerate() {
                        want += x * py.iter().skip(k).sum::<f64>();
                    }
                    worst = worst.max((exact_p(m, n, p, q).value - want).abs());
                }
            }
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    outcome(worst <= 1e-10 && fast, format!("max |diff| = {worst:.3e} (tol 1e-10), {time}"))
}

fn a2() -> Outcome {
    let start = Instant::now();
    let probs = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    let mut worst_super = f64::INFINITY;
    let mut worst_half = f64::INFINITY;
    for &p in &probs {
        for &q in &probs {
            let table: Vec<f64> = (0..=100u64).map(|k| exact_p(k, k, p, q).value).collect();
            for n1 in 1..=50usize {
                for n2 in 1..=50usize {
                    let joint = table[n1 + n2];
                    worst_super = worst_super.min(joint - table[n1] * table[n2]);
                    worst_half = worst_half.min(table[n1] - 0.5 * joint);
                }
            }
        }
    }
    let (fast, time) = within(start, Duration::from_secs(10));
    outcome(
        worst_super >= -1e-12 && worst_half >= -1e-12 && fast,
        format!(
            "min slack super = {worst_super:.3e}, half = {worst_half:.3e} (tol -1e-12), {time}"
        ),
    )
}

fn a3() -> Outcome {
    let start = Instant::now();
    let (n, p, q) = (100_000u64, 0.05, 0.0453);
    let z = (n as f64).sqrt() * (p - q) / sigma(p, q);
    let ratio = (exact_p(n, n, p, q).log_value - ln_normal_upper_tail(z)).exp();
    let (fast, time) = within(start, Duration::from_secs(2));
    outcome(
        (0.67..=1.5).contains(&ratio) && fast,
        format!("nP / n Pr(N >= z) = {ratio:.4} (band [0.67, 1.5]), {time}"),
    )
}

fn a4() -> Outcome {
    let start = Instant::now();
    let (n, q) = (100_000u64, 0.3);
    let nf = n as f64;
    let sd = (nf * q * (1.0 - q)).sqrt();
    let inner = 5.0 * sd;
    let outer = 3.0 * (nf * nf.ln()).sqrt() * (q * (1.0 - q)).sqrt();
    let (mut lo_in, mut hi_in, mut lo_out, mut hi_out) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    let first = (nf * q - outer).ceil().max(0.0) as u64;
    let last = (nf * q + outer).floor() as u64;
    for k in first..=last {
        let r = (ln_pmf(n, q, k) - lclt_pmf(n, q, k as f64).unwrap().ln()).exp();
        let dist = (k as f64 - nf * q).abs();
        if dist <= inner {
            lo_in = lo_in.min(r);
            hi_in = hi_in.max(r);
        }
        lo_out = lo_out.min(r);
        hi_out = hi_out.max(r);
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    outcome(
        lo_in >= 0.9 && hi_in <= 1.1 && lo_out >= 0.5 && hi_out <= 2.0 && fast,
        format!(
            "inner [{lo_in:.4}, {hi_in:.4}] in [0.9, 1.1]; outer [{lo_out:.4}, {hi_out:.4}] in [0.5, 2], {time}"
        ),
    )
}

fn a5() -> Outcome {
    let start = Instant::now();
    let (n, a, b) = (10_000u64, 1.2, 0.8);
    let ln_n = (n as f64).ln();
    let (p, q) = (a * ln_n / n as f64, b * ln_n / n as f64);
    let top = (3.0 * (a + b) * ln_n).floor() as u64;
    let mut worst = 0.0f64;
    for k in 0..=top {
        let exact: f64 = (0..=k).map(|i| (ln_pmf(n, p, i) + ln_pmf(n, q, k - i)).exp()).sum();
        worst = worst.max((poisson_sum_pmf(n, a, b, k) - exact).abs() / exact);
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    outcome(
        worst <= 0.10 && fast,
        format!("max relative error {worst:.4} over k <= {top} (tol 0.10), {time}"),
    )
}

fn a6() -> Outcome {
    let mut spec = ExperimentSpec::new(vec![GridPoint::LogScaled { n: 300, a: 8.0, b: 0.5 }], 50, 20_240_601);
    spec.measurements = vec![Measurement::ExactRecovery, Measurement::Overlap, Measurement::Timing];
    let out = run_sweep(&spec, None).expect("sweep");
    let exact = out.rows.iter().filter(|r| r.exact).count();
    let slowest = out
        .rows
        .iter()
        .map(|r| r.generate_seconds + r.timings.map_or(f64::INFINITY, |t| t.total))
        .fold(0.0, f64::max);
    outcome(
        exact >= 45 && slowest < 5.0,
        format!("exact in {exact}/50 (need >= 45), slowest trial {slowest:.3}s (limit 5s)"),
    )
}

fn a7() -> Outcome {
    let params = ModelParams::from_log_scaled(1000, 2.0, 1.0).unwrap();
    let (mut both, mut pairs, mut holds, mut adjacent) = (0, 0, 0, 0);
    for seed in 0..50u64 {
        let inst = generate(params, 7_000 + seed).unwrap();
        let c = census(&inst.graph, &inst.hidden, Sense::Assortative, 0.5, EdgeDensity::Model(params)).unwrap();
        if c.both_labels_have_minorities() {
            both += 1;
        }
        let r = minority_swap_check(&inst.graph, &inst.hidden, params.p, params.q, Sense::Assortative).unwrap();
        if r.pair_exists {
            pairs += 1;
            adjacent += usize::from(r.adjacent);
            holds += usize::from(r.inequality_holds == Some(true));
        }
    }
    outcome(
        both >= 45 && holds == pairs,
        format!(
            "both-label minorities in {both}/50 (need >= 45); swap inequality held for {holds}/{pairs} witnessed pairs ({adjacent} adjacent)"
        ),
    )
}

fn a8() -> Outcome {
    let mut spec = ExperimentSpec::new(vec![GridPoint::LogScaled { n: 500, a: 2.0, b: 1.0 }], 100, 8_080);
    spec.measurements = vec![Measurement::MinorityStats];
    let out = run_sweep(&spec, None).expect("sweep");
    let s = &out.summary[0];
    let z = (s.mean_minority_fraction - s.exact_p) / s.minority_fraction_se;
    outcome(
        z.abs() <= 3.0,
        format!(
            "minority frequency {:.5} vs P(n-1,n,p,q) = {:.5}, se {:.5}, z = {z:.2} (|z| <= 3)",
            s.mean_minority_fraction, s.exact_p, s.minority_fraction_se
        ),
    )
}

fn a9() -> Outcome {
    let table = calibrate_perturbation(&default_grid()).expect("calibration");
    let max = table.max_ratio;
    let finite_rows = table.rows.iter().filter(|r| r.ratio.is_some() && r.point.ell > 0).count();

    // Sparse bound: every m, every k with k + ell <= m, p <= 0.6.
    let mut checked = 0u64;
    let mut violations = 0u64;
    for &m in &[50u64, 100, 200, 500, 1000, 2000] {
        let ln_m = (m as f64).ln();
        for &mp in &[0.5, 1.0, ln_m, 8.0 * ln_m, 32.0 * ln_m, 128.0 * ln_m] {
            let p = mp / m as f64;
            if p > 0.6 {
                continue;
            }
            for &ell in &[1u64, 2, 3, 5, 8, 13, 21, 34] {
                for k in 0..=m.saturating_sub(ell) {
                    let bound = ratio_bound_sparse(m, p, k, ell).unwrap();
                    checked += 1;
                    if exact_log_ratio(m, p, k, ell) > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    outcome(
        max.is_some_and(|x| x.is_finite() && x <= 20.0) && violations == 0,
        format!(
            "max ratio {} over {finite_rows} finite rows (<= 20; hypothesis rows max {}); sparse bound violated {violations}/{checked}",
            max.map_or("none".into(), |x| format!("{x:.4}")),
            table.max_ratio_hypothesis_met.map_or("none".into(), |x| format!("{x:.4}")),
        ),
    )
}

fn a10() -> Outcome {
    let params = ModelParams::new(1500, 0.02, 0.01).unwrap();
    let limit = 3.0 * (1500.0f64 * 0.03).sqrt();
    let mut worst = 0.0f64;
    let mut ok = 0;
    for seed in 0..10u64 {
        let inst = generate(params, 10_000 + seed).unwrap();
        let est = centered_norm_estimate(&inst, seed);
        worst = worst.max(est);
        ok += usize::from(est <= limit);
    }
    outcome(
        ok == 10,
        format!("{ok}/10 within 3 sqrt(n(p+q)) = {limit:.3}; largest estimate {worst:.3}"),
    )
}

fn a11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let (mut agree, mut untied, mut tied, mut tied_agree) = (0, 0, 0, 0);
    for i in 0..200u64 {
        let n = rng.gen_range(2..=8usize);
        let p = rng.gen_range(0.2..0.9);
        let q = p * rng.gen_range(0.05..0.9);
        let inst = generate(ModelParams::new(n, p, q).unwrap(), i).unwrap();
        let map = map_bruteforce(&inst.graph, p, q).unwrap();
        let bis = min_bisection_bruteforce(&inst.graph).unwrap();
        let same = map.argmax == bis.argmin;
        if map.argmax.len() == 1 {
            untied += 1;
            agree += usize::from(same);
        } else {
            tied += 1;
            tied_agree += usize::from(same);
        }
    }
    outcome(
        agree == untied,
        format!("argmax = argmin on {agree}/{untied} untied instances ({tied_agree}/{tied} tied also agree)"),
    )
}

/// Best of two wall times of `recover` on one instance; the minimum filters
/// out interference from other processes on the machine.
fn timed_recover(n: usize, np: f64, seed: u64) -> f64 {
    let p = np / n as f64;
    let inst = generate(ModelParams::new(n, p, p / 16.0).unwrap(), seed).unwrap();
    let cfg = ReplicaConfig::new(10, 0.5, seed).unwrap();
    (0..2)
        .map(|_| {
            let start = Instant::now();
            let trace = recover(&inst.graph, &cfg, None).unwrap();
            assert!(trace.failure.is_none());
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn a12() -> Outcome {
    let n = 20_000usize;
    let np = 8.0 * (n as f64).ln();
    let small = timed_recover(n, np, 12);
    let large = timed_recover(2 * n, np, 13);
    let growth = large / small;
    outcome(
        small < 60.0 && growth <= 3.0,
        format!("n = 2e4: {small:.2}s (limit 60s); n = 4e4 at the same np: {large:.2}s, growth {growth:.2}x (limit 3x)"),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 12] = [
        ("A1", "exact P vs recurrence oracle", a1),
        ("A2", "supermultiplicativity and halving", a2),
        ("A3", "dense Gaussian equivalence", a3),
        ("A4", "local CLT", a4),
        ("A5", "Poisson approximation", a5),
        ("A6", "above-threshold recovery", a6),
        ("A7", "below-threshold minority pairs", a7),
        ("A8", "minority census calibration", a8),
        ("A9", "perturbation bound shape", a9),
        ("A10", "centered spectral norm", a10),
        ("A11", "MAP equals min bisection", a11),
        ("A12", "runtime scaling", a12),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| f == id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        println!(
            "{id:<4} {} {name}: {} [{:.2}s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!result.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
