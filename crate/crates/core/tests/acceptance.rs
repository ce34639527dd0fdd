//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every verdict is printed even when it
//! passes. A name filter may be given as the first free argument, e.g.
//! `cargo test --test acceptance -- overflow`.

use std::process::ExitCode;
use std::time::Instant;

use osdma_core::channel::sample_decomposed;
use osdma_core::codebook::generate_codebook;
use osdma_core::quantize::{evaluate_user, UserReport};
use osdma_core::rng::{make_substream, SeedSpec};
use osdma_core::scheduler::{build_index_sets, schedule};
use osdma_core::sim::{
    run_experiment, sweep, with_workers, write_sweep_csv, ExperimentConfig, FeedbackMode, SweepAxis,
};
use osdma_core::thresholds::{alzer_bounds, chi2_cdf, chi2_tail, design_thresholds, Thresholds};
use osdma_core::{Complex, Result};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

// ---------------------------------------------------------------- oracles

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_γ^∞ x^{L-1} e^{-x} / (L-1)! dx` by quadrature, truncated where the
/// integrand is below double precision.
fn chi2_tail_quadrature(gamma: f64, l: usize) -> f64 {
    let norm = factorial(l - 1);
    let pdf = move |x: f64| x.powi(l as i32 - 1) * (-x).exp() / norm;
    let mut total = 0.0;
    let mut a = gamma;
    while a < gamma + 80.0 {
        total += simpson(&pdf, a, a + 1.0, 1e-15);
        a += 1.0;
    }
    total
}

fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `exp[-k ln(k/μ) - (U-k) ln((U-k)/(U-μ))]`, written out independently.
fn chernoff_oracle(u: f64, mu: f64, k: f64) -> f64 {
    let rest = if u - k > 0.0 { (u - k) * ((u - k) / (u - mu)).ln() } else { 0.0 };
    (-k * (k / mu).ln() - rest).exp()
}

// ------------------------------------------------------------- criteria

fn feedback_saturation() -> Result<Verdict> {
    let us = [10, 25, 50, 100, 250, 500, 1000];
    let mut pass = true;
    let mut notes = Vec::new();
    for m in [2usize, 4] {
        let cap = (m * 2 * 2) as f64;
        let mut last = 0.0;
        for &u in &us {
            let cfg = ExperimentConfig {
                u,
                n_t: 2,
                m,
                lambda: 1.0,
                trials: 10_000,
                master_seed: 101,
                mode: FeedbackMode::ThresholdFeedback,
                fresh_codebook_per_trial: true,
                ..Default::default()
            };
            let agg = run_experiment::<f64>(&cfg)?.aggregate;
            let k = agg.mean_k;
            if k.mean > cap + 3.0 * k.se {
                pass = false;
                notes.push(format!("M={m} U={u}: E[K]={:.3} > {cap}+3SE", k.mean));
            }
            last = k.mean;
        }
        if last < 0.9 * cap {
            pass = false;
        }
        // caps of codewords in different sub-codebooks overlap by ε² on
        // average, so E[K]/(N·N_t) ≈ 1 - (cross pairs)·ε/N for N_t = 2
        let eps = design_thresholds::<f64>(1000, 2, 1.0)?.epsilon;
        let n = (2 * m) as f64;
        let cross = n * (n - 1.0) / 2.0 - m as f64;
        notes.push(format!(
            "M={m}: E[K](U=1000)={last:.3} = {:.3}·N·N_t (overlap estimate {:.3})",
            last / cap,
            1.0 - cross * eps / n
        ));
    }
    verdict(pass, notes.join("; "))
}

fn quantization_error_law() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for n_t in [2usize, 4] {
        let mut rng = make_substream(SeedSpec::new(202, n_t as u64));
        // a fixed codeword e_1; isotropy makes the choice immaterial
        let errors: Vec<f64> = (0..100_000)
            .map(|i| {
                let (_, d) = sample_decomposed::<f64, _>(&mut rng, n_t, i)?;
                Ok(1.0 - d.shape[0].norm_sqr())
            })
            .collect::<Result<_>>()?;
        let ks = ks_distance(errors, |x| x.clamp(0.0, 1.0).powi(n_t as i32 - 1));
        notes.push(format!("N_t={n_t}: KS={ks:.5}"));
        worst = worst.max(ks);
    }
    verdict(worst < 0.01, notes.join("; "))
}

fn gamma_grid() -> Vec<f64> {
    let mut g = vec![0.1, 0.25, 0.5, 0.75];
    g.extend((1..=12).map(|x| x as f64));
    g
}

fn chi2_tail_vs_quadrature() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for l in 1..=6 {
        for &g in &gamma_grid() {
            worst = worst.max((chi2_tail(g, l)? - chi2_tail_quadrature(g, l)).abs());
        }
    }
    verdict(worst < 1e-10, format!("max |closed form - quadrature| = {worst:.3e}"))
}

fn alzer_sandwich() -> Result<Verdict> {
    let mut pass = true;
    let mut min_gap = f64::INFINITY;
    let mut l1_dev: f64 = 0.0;
    for l in 1..=6 {
        for &g in &gamma_grid() {
            let (lo, hi) = alzer_bounds(g, l)?;
            let cdf = chi2_cdf(g, l)?;
            if l == 1 {
                // β = 1: both bounds coincide with the exponential CDF
                l1_dev = l1_dev.max((lo - cdf).abs()).max((hi - cdf).abs());
                continue;
            }
            if !(lo < cdf && cdf < hi) {
                pass = false;
            }
            min_gap = min_gap.min(cdf - lo).min(hi - cdf);
        }
    }
    pass &= l1_dev < 1e-14;
    verdict(
        pass,
        format!("L=2..6 strict, smallest gap {min_gap:.3e}; L=1 equality within {l1_dev:.1e}"),
    )
}

fn overflow_tail() -> Result<Verdict> {
    let u = 100usize;
    let mut pass = true;
    let mut notes = Vec::new();
    for m in [2usize, 4] {
        let cfg = ExperimentConfig {
            u,
            n_t: 2,
            m,
            lambda: 1.0,
            trials: 100_000,
            master_seed: 505,
            mode: FeedbackMode::ThresholdFeedback,
            fresh_codebook_per_trial: false,
            ..Default::default()
        };
        let res = run_experiment::<f64>(&cfg)?;
        let mu = res.aggregate.mean_k.mean;
        let n = res.records.len() as f64;
        let mut counts = vec![0usize; u + 2];
        for r in &res.records {
            counts[r.k] += 1;
        }
        // survival counts: #{K >= k}
        let mut surv = vec![0usize; u + 2];
        for k in (0..=u).rev() {
            surv[k] = surv[k + 1] + counts[k];
        }
        let (mut xs, mut emp, mut bnd) = (Vec::new(), Vec::new(), Vec::new());
        let mut violations = 0;
        let k_lo = mu.floor() as usize + 1;
        let k_hi = ((3.0 * mu).floor() as usize).min(u);
        for k in k_lo..=k_hi {
            let p_emp = surv[k] as f64 / n;
            let p_bound = chernoff_oracle(u as f64, mu, k as f64);
            let lib = osdma_core::analysis::chernoff_overflow(u, mu, k)?.bound;
            if (lib - p_bound).abs() > 1e-12 * p_bound.max(1e-300) {
                pass = false;
            }
            if p_emp > p_bound {
                violations += 1;
            }
            if surv[k] >= 30 {
                xs.push(k as f64);
                emp.push(p_emp.ln());
                bnd.push(p_bound.ln());
            }
        }
        let ratio = if xs.len() >= 3 { slope(&xs, &emp) / slope(&xs, &bnd) } else { f64::NAN };
        if violations > 0 || !(0.7..=1.3).contains(&ratio) {
            pass = false;
        }
        notes.push(format!(
            "N={}: E[K]={mu:.3}, K_max∈[{k_lo},{k_hi}], violations={violations}, slope ratio={ratio:.3} over {} pts",
            m * 2,
            xs.len()
        ));
    }
    verdict(pass, notes.join("; "))
}

fn table_spot_value() -> Result<Verdict> {
    let cfg = ExperimentConfig {
        u: 20,
        n_t: 4,
        m: 2,
        snr_db: 10.0,
        lambda: 1.5,
        trials: 10_000,
        master_seed: 606,
        mode: FeedbackMode::ThresholdFeedback,
        penalty_alpha: 0.05,
        penalty_iterations: 1,
        fresh_codebook_per_trial: true,
        ..Default::default()
    };
    let agg = run_experiment::<f64>(&cfg)?.aggregate;
    let all = run_experiment::<f64>(&ExperimentConfig {
        mode: FeedbackMode::AllUserFeedback,
        ..cfg.clone()
    })?
    .aggregate;
    verdict(
        (agg.penalized_rate - 7.5).abs() <= 0.5,
        format!(
            "penalized C = {:.3} (raw {:.3} ± {:.3}); all-user feedback penalized {:.3}; target 7.5 ± 0.5",
            agg.penalized_rate, agg.mean_sum_rate.mean, agg.mean_sum_rate.ci95, all.penalized_rate
        ),
    )
}

fn negligible_loss() -> Result<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    for u in [25usize, 50, 100, 200] {
        let base = ExperimentConfig {
            u,
            n_t: 2,
            m: 4,
            snr_db: 5.0,
            lambda: 1.0,
            trials: 10_000,
            master_seed: 707,
            fresh_codebook_per_trial: true,
            ..Default::default()
        };
        let tf = run_experiment::<f64>(&ExperimentConfig {
            mode: FeedbackMode::ThresholdFeedback,
            ..base.clone()
        })?
        .aggregate;
        let all = run_experiment::<f64>(&ExperimentConfig {
            mode: FeedbackMode::AllUserFeedback,
            ..base
        })?
        .aggregate;
        let ratio = tf.mean_sum_rate.mean / all.mean_sum_rate.mean;
        let ok = ratio >= 0.95 && tf.mean_k.mean <= 16.0 && all.mean_k.mean == u as f64;
        pass &= ok;
        notes.push(format!("U={u}: C_TF/C_all={ratio:.4}, E[K]={:.2} vs {}", tf.mean_k.mean, all.mean_k.mean));
    }
    verdict(pass, notes.join("; "))
}

fn growth_envelope() -> Result<Verdict> {
    let lower = 1.0 - (2.0 * (-2.0f64).exp()).powi(4) - 0.15;
    let mut ratios = Vec::new();
    for (u, trials) in [(100usize, 10_000usize), (1_000, 4_000), (10_000, 1_000)] {
        let cfg = ExperimentConfig {
            u,
            n_t: 2,
            m: 4,
            snr_db: 0.0,
            lambda: 1.0,
            trials,
            master_seed: 808,
            mode: FeedbackMode::ThresholdFeedback,
            fresh_codebook_per_trial: true,
            ..Default::default()
        };
        let agg = run_experiment::<f64>(&cfg)?.aggregate;
        ratios.push(agg.growth_ratio.expect("U >= 5"));
    }
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let last = *ratios.last().unwrap();
    verdict(
        increasing && last >= lower && last <= 1.15,
        format!(
            "ratios at U=1e2,1e3,1e4: {:.4}, {:.4}, {:.4}; envelope [{lower:.4}, 1.15]",
            ratios[0], ratios[1], ratios[2]
        ),
    )
}

fn conditional_means() -> Result<Verdict> {
    let mut pass = true;
    let mut notes = Vec::new();
    let target = 100_000;
    for n_t in [2usize, 4] {
        for (u, lambda) in [(100usize, 1.0), (1_000, 1.0), (100, 2.0)] {
            let th: Thresholds<f64> = design_thresholds(u, n_t, lambda)?;
            let mut rng = make_substream(SeedSpec::new(909, (n_t * 100_000 + u) as u64 + lambda as u64));
            let (mut rhos, mut deltas) = (Vec::with_capacity(target), Vec::with_capacity(target));
            let mut i = 0;
            while rhos.len() < target || deltas.len() < target {
                let (_, d) = sample_decomposed::<f64, _>(&mut rng, n_t, i)?;
                i += 1;
                if d.power >= th.gamma && rhos.len() < target {
                    rhos.push(d.power);
                }
                let delta = 1.0 - d.shape[0].norm_sqr();
                if delta <= th.epsilon && deltas.len() < target {
                    deltas.push(delta);
                }
            }
            let (md, sd) = mean_se(&deltas);
            let expect_d = (n_t as f64 - 1.0) / n_t as f64 * th.epsilon;
            let (mr, _) = mean_se(&rhos);
            let ok = (md - expect_d).abs() <= 3.0 * sd && mr < n_t as f64 + th.gamma;
            pass &= ok;
            notes.push(format!(
                "N_t={n_t} U={u} λ={lambda}: E[δ|δ≤ε]={md:.5} vs {expect_d:.5} (SE {sd:.1e}), E[ρ|ρ≥γ]={mr:.3} < {:.3}",
                n_t as f64 + th.gamma
            ));
        }
    }
    verdict(pass, notes.join("; "))
}

/// Sum capacity of a micro-instance computed from raw channels: every user's
/// best codeword, SINR and threshold test recomputed here, then
/// `max_m Σ_n log2(1 + max_{u ∈ I(m,n)} SINR_u)`.
fn brute_force_capacity(
    channels: &[Vec<Complex<f64>>],
    cb: &osdma_core::Codebook,
    th: &Thresholds<f64>,
    p: f64,
) -> f64 {
    let n_t = cb.n_t();
    let users: Vec<(usize, f64, bool)> = channels
        .iter()
        .map(|h| {
            let rho: f64 = h.iter().map(|z| z.norm_sqr()).sum();
            let mut best = (0, -1.0);
            for (idx, f) in cb.vectors().iter().enumerate() {
                let ip: Complex<f64> = f.iter().zip(h).map(|(a, b)| a.conj() * b).sum();
                let a = ip.norm_sqr() / rho;
                if a > best.1 {
                    best = (idx, a);
                }
            }
            let delta = 1.0 - best.1.min(1.0);
            let sinr = p * rho * (1.0 - delta) / (1.0 + p * rho * delta);
            (best.0, sinr, rho >= th.gamma && delta <= th.epsilon)
        })
        .collect();
    (0..cb.m())
        .map(|m| {
            (0..n_t)
                .map(|n| {
                    let top = users
                        .iter()
                        .filter(|(idx, _, fb)| *fb && *idx == m * n_t + n)
                        .map(|u| u.1)
                        .fold(0.0, f64::max);
                    (1.0 + top).log2()
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn end_to_end_oracle() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    let mut nonzero = 0;
    for inst in 0..100u64 {
        let mut rng = make_substream(SeedSpec::new(1010, inst));
        let u = 3 + (inst as usize % 4);
        let cb = generate_codebook::<f64, _>(2, 2, &mut rng)?;
        // alternate designed thresholds with trivial ones so most instances schedule someone
        let th = if inst % 2 == 0 {
            design_thresholds(u, 2, 0.5 + 0.25 * (inst % 4) as f64)?
        } else {
            Thresholds::trivial(u, 2)
        };
        let p = 10f64.powf((inst % 3) as f64 * 5.0 / 10.0);
        let mut channels = Vec::new();
        let mut reports: Vec<UserReport<f64>> = Vec::new();
        for uid in 0..u {
            let (h, _) = sample_decomposed::<f64, _>(&mut rng, 2, uid)?;
            reports.push(evaluate_user(&h, &cb, &th, p)?);
            channels.push(h.entries);
        }
        let sets = build_index_sets(&reports, cb.m(), cb.n_t())?;
        let got = schedule(&sets, &reports)?.sum_rate;
        let want = brute_force_capacity(&channels, &cb, &th, p);
        if want > 0.0 {
            nonzero += 1;
        }
        worst = worst.max((got - want).abs());
    }
    verdict(
        worst <= 1e-12,
        format!("100 instances ({nonzero} with scheduled users), max |scheduler - brute force| = {worst:.2e}"),
    )
}

fn determinism() -> Result<Verdict> {
    let template = ExperimentConfig {
        u: 60,
        n_t: 2,
        m: 4,
        trials: 2_000,
        master_seed: 1111,
        k_max: Some(12),
        ..Default::default()
    };
    let mut outputs = Vec::new();
    for workers in [1usize, 2, 7] {
        let mut bytes = Vec::new();
        for (axis, values) in [(SweepAxis::U, vec![20.0, 60.0]), (SweepAxis::KMax, vec![8.0, 12.0, 16.0])] {
            let table = with_workers(Some(workers), || sweep::<f64>(&template, axis, &values))??;
            let prov = vec![("seed".to_string(), template.master_seed.to_string())];
            write_sweep_csv(&mut bytes, &table, &prov).expect("in-memory write");
        }
        outputs.push(bytes);
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(same, format!("{} CSV bytes, workers 1/2/7 identical={same}", outputs[0].len()))
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

const CRITERIA: [Criterion; 11] = [
    ("feedback_saturation", feedback_saturation),
    ("quantization_error_law", quantization_error_law),
    ("chi2_tail_vs_quadrature", chi2_tail_vs_quadrature),
    ("alzer_sandwich", alzer_sandwich),
    ("overflow_tail", overflow_tail),
    ("table_spot_value", table_spot_value),
    ("negligible_loss", negligible_loss),
    ("growth_envelope", growth_envelope),
    ("conditional_means", conditional_means),
    ("end_to_end_oracle", end_to_end_oracle),
    ("determinism", determinism),
];

fn main() -> ExitCode {
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(v) if v.pass => ("PASS", v.detail),
            Ok(v) => ("FAIL", v.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {tag} ({:.1}s) {detail}",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
