//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdlab_core::algebra::{AlgebraElement, NormKind};
use rdlab_core::groups::{cache, enumerate_balls, Embedding, GroupElement, GroupSpec};
use rdlab_core::norms::{
    op_norm_positive_amenable, radial_trace_moments, MethodChoice, NormConfig, RadialElement, TraceOptions,
};
use rdlab_core::rd::{
    build_z_series, delocalize_constant, fit_exponent, fit_growth, harmonic_sphere_sum, ratio_series,
    rd_constant_series, verify_doubling, verify_heredity, verify_lemma_one_sweep, verify_lemma_two_finite, z_l2_bounds,
    Side, Verdict, Witness,
};

type Outcome = Result<(bool, String), String>;

fn exact() -> NormConfig {
    NormConfig {
        method: MethodChoice::Exact,
        ..NormConfig::default()
    }
}

fn group(desc: &str) -> GroupSpec {
    desc.parse().expect("group descriptor")
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let (ok, msg) = f()?;
    let dt = t.elapsed();
    match limit {
        Some(l) => Ok((
            ok && dt < l,
            format!("{msg}; {:.2}s (limit {}s)", dt.as_secs_f64(), l.as_secs()),
        )),
        None => Ok((ok, format!("{msg}; {:.2}s", dt.as_secs_f64()))),
    }
}

fn c1_z_slope() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let z = group("Z");
        let ns: Vec<u32> = (4..=256).collect();
        let series = ratio_series(&z, Witness::Ball, &ns, &exact(), None).map_err(e)?;
        let fit = fit_exponent(&series, (4, 256), Side::Lower).map_err(e)?;
        Ok((
            (fit.slope - 0.5).abs() <= 0.02,
            format!("Z ball slope {:.5}", fit.slope),
        ))
    })
}

fn c2_z2_and_growth() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let z2 = group("Z^2");
        let ix = enumerate_balls(&z2, 48).map_err(e)?;
        let ns: Vec<u32> = (4..=48).collect();
        let series = ratio_series(&z2, Witness::Ball, &ns, &exact(), Some(&ix)).map_err(e)?;
        let fit = fit_exponent(&series, (4, 48), Side::Lower).map_err(e)?;
        let mut ok = (fit.slope - 1.0).abs() <= 0.05;
        let mut msg = format!("Z^2 ball slope {:.5} (BFS radius 48)", fit.slope);
        for desc in ["Z", "Z^2", "H3"] {
            let spec = group(desc);
            let ix = enumerate_balls(&spec, 10).map_err(e)?;
            let ns: Vec<u32> = (4..=10).collect();
            let s = ratio_series(&spec, Witness::Ball, &ns, &exact(), Some(&ix)).map_err(e)?;
            let ratio = fit_exponent(&s, (4, 10), Side::Lower).map_err(e)?.slope;
            let growth = fit_growth(&spec, (4, 10), Some(&ix)).map_err(e)?.slope;
            let gap = (ratio - growth / 2.0).abs();
            ok &= gap <= 0.1;
            msg += &format!("; {desc} |{ratio:.4} - {growth:.4}/2| = {gap:.2e}");
        }
        Ok((ok, msg))
    })
}

fn c3_kesten() -> Outcome {
    timed(Some(Duration::from_secs(10)), || {
        let x = RadialElement::sphere(2, 1).map_err(e)?;
        let est = radial_trace_moments(&x, 100, &TraceOptions::default()).map_err(e)?;
        let target = 2.0 * 3f64.sqrt();
        let rel = (est.lower - target).abs() / target;
        let monotone = est.steps.windows(2).all(|w| w[1] >= w[0]);
        Ok((
            rel <= 0.05 && monotone,
            format!(
                "F2 ‖χ(S_1)‖ ≥ {:.5} at exponent 200, {:.2}% from 2√3, steps nondecreasing: {monotone}",
                est.lower,
                100.0 * rel
            ),
        ))
    })
}

fn c4_lemma_one() -> Outcome {
    timed(Some(Duration::from_secs(120)), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (desc, bound) in [("Z", 20), ("Z^2", 12), ("H3", 8), ("F2", 8), ("C12", 10)] {
            let spec = group(desc);
            let ix = enumerate_balls(&spec, bound).map_err(e)?;
            let sweep = verify_lemma_one_sweep(&spec, bound, &ix).map_err(e)?;
            ok &= sweep.min_slack >= -1e-9;
            parts.push(format!("{desc}≤{bound}: {:.3e}", sweep.min_slack));
        }
        Ok((ok, format!("min slack {}", parts.join(", "))))
    })
}

fn c5_doubling() -> Outcome {
    timed(None, || {
        let f2 = verify_doubling(&group("F2"), 2, 6, None).map_err(e)?;
        let z = verify_doubling(&group("Z"), 2, 6, None).map_err(e)?;
        Ok((
            f2.min_ratio >= 3.0 && z.min_ratio < 2.0 && !z.holds,
            format!(
                "F2 r=2 min ratio {:.6} (k={}); Z r=2 min ratio {:.6}, fails as expected: {}",
                f2.min_ratio, f2.argmin, z.min_ratio, !z.holds
            ),
        ))
    })
}

fn c6_z_bounds() -> Outcome {
    timed(None, || {
        let f2 = group("F2");
        let mut ok = true;
        let mut parts = Vec::new();
        for alpha in [0.75, 1.0, 1.5] {
            let z = build_z_series(&f2, 2, alpha, 10, None).map_err(e)?;
            let b = z_l2_bounds(&z, None);
            ok &= b.lower <= b.actual && b.actual <= b.upper;
            parts.push(format!("α={alpha}: {:.6} ≤ {:.6} ≤ {:.6}", b.lower, b.actual, b.upper));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn c7_lemma_two() -> Outcome {
    timed(None, || {
        let f2 = verify_lemma_two_finite(&group("F2"), 2, 1.0, 1.0, 6, None).map_err(e)?;
        let z = group("Z");
        let ix = enumerate_balls(&z, 12).map_err(e)?;
        let zc = verify_lemma_two_finite(&z, 1, 1.0, 1.0, 6, Some(&ix)).map_err(e)?;
        Ok((
            f2.min_slack >= 0.0 && zc.min_slack >= 0.0,
            format!(
                "F2 r=2 min slack {:.6e} ({}); Z r=1 min slack {:.6e} ({})",
                f2.min_slack, f2.route, zc.min_slack, zc.route
            ),
        ))
    })
}

fn c8_divergence() -> Outcome {
    timed(None, || {
        let z = group("Z");
        let ns: Vec<u32> = (1..=256).collect();
        let series = ratio_series(&z, Witness::Ball, &ns, &exact(), None).map_err(e)?;
        let low = rd_constant_series(&series, 0.4).map_err(e)?;
        let tail: Vec<f64> = low.values.iter().filter(|(n, _)| *n >= 8).map(|(_, v)| *v).collect();
        let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0]);
        let growth = low.value(256).unwrap() / low.value(8).unwrap();
        let half = rd_constant_series(&series, 0.5).map_err(e)?;
        let max_half = half.max();
        Ok((
            nondecreasing && growth >= 1.3 && half.verdict == Verdict::BoundedTrend && max_half <= 2f64.sqrt() + 1e-9,
            format!(
                "s=0.4 nondecreasing for n≥8: {nondecreasing}, C(256)/C(8) = {growth:.4}; s=0.5 verdict {:?}, max {max_half:.9}",
                half.verdict
            ),
        ))
    })
}

fn c9_delocalization() -> Outcome {
    timed(None, || {
        let z2 = group("Z^2");
        let ix = enumerate_balls(&z2, 48).map_err(e)?;
        let ns: Vec<u32> = (4..=48).collect();
        let series = ratio_series(&z2, Witness::Ball, &ns, &exact(), Some(&ix)).map_err(e)?;
        let c = rd_constant_series(&series, 1.0).map_err(e)?.max();
        let c_prime = delocalize_constant(c, 1.0, 0.25).map_err(e)?;
        let closed = 2.0 * c / (1.0 - 4f64.powf(-0.25)).sqrt();
        let closed_ok = (c_prime - closed).abs() <= 1e-12;
        let ball16: Vec<GroupElement> = ix.ball(16).cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let radius = rng.gen_range(0..=16u32);
            let mut terms: Vec<(GroupElement, f64)> = Vec::new();
            for g in ball16.iter().filter(|g| ix.length(g).unwrap() <= radius) {
                if rng.gen_bool(0.3) {
                    terms.push((g.clone(), rng.gen_range(0.01..1.0)));
                }
            }
            let terms = if terms.is_empty() {
                vec![(z2.identity(), 1.0)]
            } else {
                terms
            };
            let a = AlgebraElement::from_coeffs(&z2, terms, Some(&ix)).map_err(e)?;
            let op = op_norm_positive_amenable(&a).map_err(e)?.upper;
            let weighted = a.norm(NormKind::L2s(1.25), Some(&ix)).map_err(e)?;
            worst = worst.max(op / (c_prime * weighted));
        }
        Ok((
            closed_ok && worst <= 1.0,
            format!(
                "C = {c:.6}, C′ = {c_prime:.9} (closed form diff {:.1e}); max ‖a‖/(C′‖a‖_{{2,1.25}}) over 100 elements = {worst:.4}",
                (c_prime - closed).abs()
            ),
        ))
    })
}

fn c10_heredity() -> Outcome {
    timed(None, || {
        let z2 = group("Z^2");
        let cfg = exact();
        let ns: Vec<u32> = (0..=32).collect();
        let z = group("Z");
        let line = Embedding::new(
            z.clone(),
            z2.clone(),
            &[(GroupElement::vector(&[1]), GroupElement::vector(&[1, 0]))],
        )
        .map_err(e)?;
        let line_check = verify_heredity(&line, &ns, &enumerate_balls(&z, 33).map_err(e)?, None, &cfg).map_err(e)?;
        let trivial = group("C1");
        let point = Embedding::new(trivial.clone(), z2.clone(), &[]).map_err(e)?;
        let point_check =
            verify_heredity(&point, &ns, &enumerate_balls(&trivial, 1).map_err(e)?, None, &cfg).map_err(e)?;
        Ok((
            line_check.holds && point_check.holds,
            format!(
                "Z→Z^2: {}, {{e}}→Z^2: {} for n ≤ 32",
                line_check.holds, point_check.holds
            ),
        ))
    })
}

fn c11_sphere_sums() -> Outcome {
    timed(None, || {
        let z = group("Z");
        let one = harmonic_sphere_sum(&z, 1.0, 100, None).map_err(e)?;
        let s100 = one.sum(100).unwrap();
        let tail = s100 - one.sum(50).unwrap();
        let ln4 = 2.0 * 2f64.ln();
        let three = harmonic_sphere_sum(&z, 3.0, 100, None).map_err(e)?;
        Ok((
            (s100 - 8.39).abs() <= 0.02 && (tail - ln4).abs() <= 0.05 * ln4 && three.converging,
            format!(
                "d̂=1: S(100) = {s100:.6}, S(100)-S(50) = {tail:.5} vs 2ln2 = {ln4:.5}; d̂=3 converging: {}",
                three.converging
            ),
        ))
    })
}

fn rdlab(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_rdlab")).args(args).output().map_err(e)
}

fn c12_determinism(dir: &Path) -> Outcome {
    timed(None, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (desc, n) in [("Z^2", 10), ("F2", 6)] {
            let spec = group(desc);
            let path = dir.join(format!("{desc}_N{n}.ballcache"));
            let same = cache::roundtrip(&spec, n, &path).map_err(e)?;
            let size = enumerate_balls(&spec, n).map_err(e)?.len();
            let cache_dir = dir.join("cli");
            let cache_dir = cache_dir.to_str().unwrap();
            let radius = n.to_string();
            let build = rdlab(&[
                "cache",
                "build",
                "--group",
                desc,
                "--radius",
                &radius,
                "--cache-dir",
                cache_dir,
            ])?;
            let check = rdlab(&[
                "cache",
                "check",
                "--group",
                desc,
                "--radius",
                &radius,
                "--cache-dir",
                cache_dir,
            ])?;
            let cli_ok = build.status.success() && check.status.success();
            ok &= same && cli_ok;
            parts.push(format!(
                "{desc} N={n}: roundtrip {same}, {size} entries, cli build/check {cli_ok}"
            ));
        }
        let out = dir.join("report.json");
        let out = out.to_str().unwrap();
        let mut runs = Vec::new();
        for _ in 0..2 {
            let r = rdlab(&[
                "report", "--group", "Z^2", "--range", "1:32", "--format", "json", "--out", out,
            ])?;
            if !r.status.success() {
                return Err(String::from_utf8_lossy(&r.stderr).into_owned());
            }
            runs.push(std::fs::read(out).map_err(e)?);
        }
        let identical = runs[0] == runs[1];
        ok &= identical;
        parts.push(format!("report runs byte-identical: {identical}"));
        Ok((ok, parts.join("; ")))
    })
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(u32, Box<dyn FnOnce() -> Outcome + '_>)> = vec![
        (1, Box::new(c1_z_slope)),
        (2, Box::new(c2_z2_and_growth)),
        (3, Box::new(c3_kesten)),
        (4, Box::new(c4_lemma_one)),
        (5, Box::new(c5_doubling)),
        (6, Box::new(c6_z_bounds)),
        (7, Box::new(c7_lemma_two)),
        (8, Box::new(c8_divergence)),
        (9, Box::new(c9_delocalization)),
        (10, Box::new(c10_heredity)),
        (11, Box::new(c11_sphere_sums)),
        (12, Box::new(|| c12_determinism(dir.path()))),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let (ok, msg) = match check() {
            Ok(r) => r,
            Err(err) => (false, format!("error: {err}")),
        };
        if !ok {
            failed += 1;
        }
        println!("{} criterion {id}: {msg}", if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
