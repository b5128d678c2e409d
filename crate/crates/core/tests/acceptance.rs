//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Thresholds come from `acceptance.toml`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use chunglu::experiments::{run_deficit, run_heatmap, run_shifted, ExperimentConfig, Suite};
use chunglu::exact_inverse::vandermonde_inverse;
use chunglu::feasibility::check;
use chunglu::generator::{degree_distribution_of, stream_rng};
use chunglu::{
    average_over_trials, build_transfer_matrix, expand_to_weights, power_law_distribution, proportional_l1_error,
    ExactInverse, PrecisionContext, Real, Sampler,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use common::{gauss_jordan_inverse, pair_frequencies, small_weight_sets, vandermonde_rational};

#[derive(Deserialize)]
struct Thresholds {
    oracle: Oracle,
    inverse_identity: InverseIdentity,
    round_trip: RoundTrip,
    rounding_locality: RoundingLocality,
    norm: Norm,
    deficit: Deficit,
    heatmap: Heatmap,
    shifted: Shifted,
    sampler: SamplerCfg,
    feasibility: Feasibility,
}

#[derive(Deserialize)]
struct Oracle {
    max_m: usize,
    max_seconds: f64,
}

#[derive(Deserialize)]
struct InverseIdentity {
    m: usize,
    digits: u32,
    samples: usize,
    y_max: f64,
    max_relative_error: f64,
    max_seconds: f64,
}

#[derive(Deserialize)]
struct RoundTrip {
    n: f64,
    m: usize,
    betas: Vec<f64>,
}

#[derive(Deserialize)]
struct RoundingLocality {
    slack: f64,
}

#[derive(Deserialize)]
struct Norm {
    max_m: usize,
    digits: u32,
}

#[derive(Deserialize)]
struct Deficit {
    beta_one: [f64; 2],
    beta_two: [f64; 2],
    max_seconds: f64,
}

#[derive(Deserialize)]
struct Heatmap {
    naive_floor: f64,
    naive_beta_min: f64,
    max_seconds: f64,
}

#[derive(Deserialize)]
struct Shifted {
    min_win_fraction: f64,
    max_mean_ratio: f64,
}

#[derive(Deserialize)]
struct SamplerCfg {
    runs: usize,
    sigmas: f64,
    large_n: f64,
    beta: f64,
    m: usize,
    max_seconds: f64,
    compare_n: f64,
    compare_trials: usize,
    max_l1: f64,
}

#[derive(Deserialize)]
struct Feasibility {
    m: usize,
    digits: u32,
    targets: usize,
    box_max: u32,
    max_residual: f64,
    raw_targets: usize,
    raw_n: f64,
    beta_lo: f64,
    beta_hi: f64,
}

type Verdict = (bool, String);
type Outcome = Result<Verdict, chunglu::Error>;

fn reals(v: &[f64]) -> Vec<Real> {
    v.iter().map(|&x| Real::from_f64(x)).collect()
}

fn l1(a: &[Real], b: &[Real]) -> Real {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn oracle(t: &Oracle) -> Outcome {
    let start = Instant::now();
    let mut mismatched = Vec::new();
    for m in 1..=t.max_m {
        if vandermonde_inverse(m)?.entries() != gauss_jordan_inverse(&vandermonde_rational(m)) {
            mismatched.push(m);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        mismatched.is_empty() && secs < t.max_seconds,
        format!("m = 1..{} exact, mismatches {:?}, {:.2}s", t.max_m, mismatched, secs),
    ))
}

fn inverse_identity(t: &InverseIdentity) -> Outcome {
    let start = Instant::now();
    let inv = ExactInverse::new(t.m, PrecisionContext::new(t.digits)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = Real::zero();
    for _ in 0..t.samples {
        let y = reals(&(0..t.m).map(|_| rng.gen_range(0.0..t.y_max) + 1e-3).collect::<Vec<_>>());
        let back = inv.forward(&inv.apply_inverse(&y)?)?;
        let norm: Real = y.iter().sum();
        worst = worst.max(l1(&back, &y).div(&norm, 20));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        worst <= Real::from_f64(t.max_relative_error) && secs < t.max_seconds,
        format!("max relative error {} over {} targets, {:.2}s", worst.to_sci_string(3), t.samples, secs),
    ))
}

/// Criteria 3 and 4 share one suite.
fn round_trip_and_locality(t: &RoundTrip, r: &RoundingLocality) -> Result<(Verdict, Verdict), chunglu::Error> {
    let inv = ExactInverse::with_default_precision(t.m)?;
    let mut exact = 0;
    let mut worst = Real::zero();
    for &beta in &t.betas {
        let x = power_law_distribution(t.n, beta, t.m)?;
        let shift = inv.shift(&inv.forward(&reals(x.counts()))?)?;
        let want: Vec<BigInt> = x.counts().iter().map(|&c| BigInt::from(c as i64)).collect();
        if shift.x_rounded == want {
            exact += 1;
        }
        worst = worst.max(shift.rounding_residual);
    }
    let bound = t.m as f64 / 2.0 + r.slack;
    Ok((
        (
            exact == t.betas.len(),
            format!("{exact}/{} power laws recovered exactly (beta {:?})", t.betas.len(), t.betas),
        ),
        (
            worst <= Real::from_f64(bound),
            format!("max ||y - P Int(P^-1 y)||_1 = {} <= {bound}", worst.to_sci_string(3)),
        ),
    ))
}

fn norm(t: &Norm) -> Outcome {
    let digits = t.digits;
    let ctx = PrecisionContext::new(digits)?;
    let mm = t.max_m;
    // P[i][k] = (k^i / i!) e^{-k}; every m x m matrix is a leading block.
    let e_neg: Vec<Real> = (1..=mm as u32).map(|k| Real::one().div(&ctx.exp_int(k), digits)).collect();
    let mut factorial = BigInt::from(1);
    let mut col_sums = vec![Real::zero(); mm];
    let mut worst = Real::zero();
    let mut f64_ok = true;
    for i in 1..=mm {
        factorial *= i;
        for k in 1..=mm {
            let ratio = BigRational::new(num_traits::pow(BigInt::from(k), i), factorial.clone());
            let entry = (&Real::from_rational(&ratio, digits) * &e_neg[k - 1]).round(digits);
            col_sums[k - 1] = &col_sums[k - 1] + &entry;
        }
        // Column sums of the i x i matrix are the first i partial sums.
        let norm_i = col_sums[..i].iter().max().cloned().unwrap_or_else(Real::zero);
        worst = worst.max(norm_i);
        let p = build_transfer_matrix(i)?;
        f64_ok &= p.column_deficits().iter().all(|&d| d > 0.0) && p.one_norm() <= 1.0;
    }
    let gap = &Real::one() - &worst;
    Ok((
        worst < Real::one() && f64_ok,
        format!(
            "max ||P||_1 over m = 1..{mm} is 1 - {} at {digits} digits; machine deficits positive: {f64_ok}",
            gap.to_sci_string(3)
        ),
    ))
}

fn deficit(t: &Deficit) -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Suite::Deficit, false, 0, ".");
    let rows = run_deficit(&cfg)?;
    let ratio = |beta: f64| rows.iter().find(|r| r.beta == beta && r.degree == 1).and_then(|r| r.ratio).unwrap_or(f64::NAN);
    let (r1, r2) = (ratio(1.0), ratio(2.0));
    let secs = start.elapsed().as_secs_f64();
    let inside = |v: f64, [lo, hi]: [f64; 2]| (lo..=hi).contains(&v);
    Ok((
        inside(r1, t.beta_one) && inside(r2, t.beta_two) && secs < t.max_seconds,
        format!("degree-1 ratio {r1:.4} (beta 1), {r2:.4} (beta 2), {} trials, {secs:.2}s", cfg.trials),
    ))
}

fn heatmap(t: &Heatmap) -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(Suite::Heatmap, false, 0, ".");
    let (records, _) = run_heatmap(&cfg)?;
    let wins = records.iter().filter(|r| r.err_model.is_some_and(|e| e < r.err_naive)).count();
    let max_naive = records
        .iter()
        .filter(|r| r.beta >= t.naive_beta_min)
        .map(|r| r.err_naive)
        .fold(0.0, f64::max);
    let worst_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok((
        wins == records.len() && max_naive >= t.naive_floor && secs < t.max_seconds,
        format!(
            "model wins {wins}/{} cells (worst ratio {worst_ratio:.3}), max naive error at beta >= {} is {max_naive:.3}, {secs:.1}s",
            records.len(),
            t.naive_beta_min
        ),
    ))
}

fn shifted(t: &Shifted) -> Outcome {
    let cfg = ExperimentConfig::new(Suite::Shifted, false, 0, ".");
    let (records, _) = run_shifted(&cfg)?;
    let count = records.len() as f64;
    let wins = records.iter().filter(|r| r.err_shifted.is_some_and(|e| e < r.err_naive)).count();
    let mean_naive = records.iter().map(|r| r.err_naive).sum::<f64>() / count;
    let mean_shifted = records.iter().filter_map(|r| r.err_shifted).sum::<f64>() / count;
    Ok((
        wins as f64 >= t.min_win_fraction * count && mean_shifted <= t.max_mean_ratio * mean_naive,
        format!(
            "shifted wins {wins}/{}; mean error shifted {mean_shifted:.4} vs naive {mean_naive:.4}",
            records.len()
        ),
    ))
}

fn normalized(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

fn sampler(t: &SamplerCfg) -> Outcome {
    let mut worst_z: f64 = 0.0;
    let mut pairs = 0;
    for (s, weights) in small_weight_sets().iter().enumerate() {
        let bern = pair_frequencies(weights, Sampler::Bernoulli, t.runs, 1000 + s as u64);
        let skip = pair_frequencies(weights, Sampler::Skip, t.runs, 2000 + s as u64);
        for ((_, fb, p), (_, fs, _)) in bern.iter().zip(&skip) {
            // Standard deviation of the difference of two independent estimates.
            let sigma = (2.0 * p * (1.0 - p) / t.runs as f64).sqrt();
            let z = if sigma > 0.0 { (fb - fs).abs() / sigma } else if fb == fs { 0.0 } else { f64::INFINITY };
            worst_z = worst_z.max(z);
            pairs += 1;
        }
    }

    let large = power_law_distribution(t.large_n, t.beta, t.m)?;
    let start = Instant::now();
    let weights = expand_to_weights(&large)?;
    let g = Sampler::Skip.generate(&weights, &mut stream_rng(7, 0));
    let secs = start.elapsed().as_secs_f64();
    let skip_dist = normalized(degree_distribution_of(&g, t.m).distribution.counts());

    let small = power_law_distribution(t.compare_n, t.beta, t.m)?;
    let bern = average_over_trials(&small, t.compare_trials, Sampler::Bernoulli, 8)?;
    let err = proportional_l1_error(&normalized(&bern.mean_counts), &skip_dist)?;

    Ok((
        worst_z <= t.sigmas && secs < t.max_seconds && err <= t.max_l1,
        format!(
            "max |z| {worst_z:.2} over {pairs} pairs x {} runs; skip on {} nodes took {secs:.2}s; \
             normalized L1 vs Bernoulli (N = {}) {err:.4}",
            t.runs,
            weights.len(),
            t.compare_n
        ),
    ))
}

fn feasibility(t: &Feasibility) -> Outcome {
    let inv = ExactInverse::new(t.m, PrecisionContext::new(t.digits)?)?;
    let max_residual = Real::from_f64(t.max_residual);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut passed = 0;
    let mut worst_residual = Real::zero();
    for _ in 0..t.targets {
        let x: Vec<Real> = (0..t.m).map(|_| Real::from_int(rng.gen_range(0..=t.box_max))).collect();
        let report = check(&inv, &inv.forward(&x)?)?;
        let residual = report.hyperplane_residual.abs();
        if report.bounds_ok && report.direct_feasible && residual <= max_residual {
            passed += 1;
        }
        worst_residual = worst_residual.max(residual);
    }
    let mut infeasible = 0;
    for s in 0..t.raw_targets {
        let beta = t.beta_lo + (t.beta_hi - t.beta_lo) * s as f64 / (t.raw_targets - 1) as f64;
        let y = power_law_distribution(t.raw_n, beta, t.m)?;
        if !inv.shift(&reals(y.counts()))?.feasible {
            infeasible += 1;
        }
    }
    Ok((
        passed == t.targets && 2 * infeasible > t.raw_targets,
        format!(
            "{passed}/{} constructed targets pass (max |residual| {}); {infeasible}/{} raw power laws infeasible",
            t.targets,
            worst_residual.to_sci_string(3),
            t.raw_targets
        ),
    ))
}

fn main() -> ExitCode {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/acceptance.toml");
    let t: Thresholds = toml::from_str(&std::fs::read_to_string(path).expect("acceptance.toml")).expect("valid thresholds");

    let (c3, c4) = match round_trip_and_locality(&t.round_trip, &t.rounding_locality) {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    };
    let run = |o: Outcome| o.map_err(|e| e.to_string());
    let results: Vec<(&str, Result<Verdict, String>)> = vec![
        ("exact-inverse oracle", run(oracle(&t.oracle))),
        ("inverse identity", run(inverse_identity(&t.inverse_identity))),
        ("round-trip shift", c3),
        ("rounding locality", c4),
        ("norm bound", run(norm(&t.norm))),
        ("degree-1 deficit", run(deficit(&t.deficit))),
        ("model beats naive", run(heatmap(&t.heatmap))),
        ("shifted beats naive", run(shifted(&t.shifted))),
        ("sampler equivalence", run(sampler(&t.sampler))),
        ("feasibility soundness", run(feasibility(&t.feasibility))),
    ];

    let mut failures = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        let (ok, detail) = match result {
            Ok((ok, detail)) => (*ok, detail.clone()),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!ok);
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
