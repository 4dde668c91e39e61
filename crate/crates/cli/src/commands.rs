use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use rdlab_core::algebra::{AlgebraElement, ElementJson};
use rdlab_core::groups::{
    ball_sizes, cache, enumerate_balls_with_budget, sphere_sizes, Embedding, GroupSpec, LengthIndex,
};
use rdlab_core::norms::{
    estimate, estimate_radial, MethodChoice, NormConfig, NormEstimate, RadialElement, DEFAULT_TRACE_BUDGET,
};
use rdlab_core::rd::{
    build_report, build_z_series, contradiction_trace, fit_exponent, harmonic_sphere_sum, ratio_series,
    rd_constant_series, verify_doubling, verify_heredity, verify_lemma_one, verify_lemma_one_sweep,
    verify_lemma_two_finite, z_l2_bounds, LemmaOneSweep, ProofParameters, RatioSeries, ReportConfig, Side, Verdict,
    Witness,
};
use rdlab_core::{Error as CoreError, Result as CoreResult};

use crate::output::{cache_path, fmt_g, json as to_json, manifest_path, Csv, Run};
use crate::{
    CacheArgs, Common, DivergenceArgs, DivergenceKind, DoublingArgs, Expect, FitArgs, Format, GrowthArgs, HeredityArgs,
    Lemma1Args, Lemma2Args, NormArgs, NormOpts, RatioArgs, ReportArgs, SideArg, VerificationFailure, ZseriesArgs,
};

fn start<A: Serialize>(subcommand: &str, common: &Common, args: &A) -> Result<(Run, GroupSpec)> {
    let spec: GroupSpec = common.group.parse()?;
    let params = serde_json::to_value(args)?;
    let mut run = Run::new(
        subcommand,
        params,
        common.seed,
        common.out.clone(),
        common.cache_dir.clone(),
        common.budget,
    );
    run.spec = Some(spec.clone());
    Ok((run, spec))
}

fn norm_config(opts: &NormOpts, common: &Common) -> Result<NormConfig> {
    Ok(NormConfig {
        method: opts.method.parse()?,
        trace_depth: opts.depth,
        budget: common.budget.unwrap_or(DEFAULT_TRACE_BUDGET),
        power_iters: opts.iters,
        power_radius: opts.power_radius,
        seed: common.seed,
        ..NormConfig::default()
    })
}

/// Ball radius needed for elements supported on `B_support`.
fn index_radius(opts: &NormOpts, support: u32) -> u32 {
    if opts.method == "power" {
        support + opts.power_radius.unwrap_or(support + 8)
    } else {
        support
    }
}

/// Runs `f` without an index first and enumerates `B_radius` only if the
/// core asks for one.
fn with_index<T>(
    run: &mut Run,
    spec: &GroupSpec,
    radius: u32,
    f: impl Fn(Option<&LengthIndex>) -> CoreResult<T>,
) -> Result<T> {
    match f(None) {
        Err(CoreError::IndexRequired { .. }) => {
            let ix = run.index(spec, radius)?;
            Ok(f(Some(&ix))?)
        }
        other => Ok(other?),
    }
}

/// Reports the outcome on stderr and fails when it differs from `expect`.
fn settle(holds: bool, expect: Expect, detail: String) -> Result<()> {
    let verdict = if holds { "holds" } else { "fails" };
    eprintln!("{detail}: {verdict}");
    if holds == (expect == Expect::Pass) {
        Ok(())
    } else {
        let wanted = if expect == Expect::Pass { "pass" } else { "fail" };
        Err(VerificationFailure(format!("expected {wanted}; {detail}: {verdict}")).into())
    }
}

fn b(x: bool) -> String {
    x.to_string()
}

fn series_csv(csv: &mut Csv, s: &RatioSeries) {
    for e in &s.entries {
        csv.row(&[
            s.group.clone(),
            s.witness.to_string(),
            e.n.to_string(),
            fmt_g(e.norm_lower),
            fmt_g(e.norm_upper),
            fmt_g(e.l2),
            fmt_g(e.ratio_lower),
            fmt_g(e.ratio_upper),
        ]);
    }
}

const SERIES_HEADER: [&str; 8] = [
    "group",
    "witness",
    "n",
    "norm_lower",
    "norm_upper",
    "l2",
    "ratio_lower",
    "ratio_upper",
];

pub fn growth(a: GrowthArgs) -> Result<()> {
    let (mut run, spec) = start("growth", &a.common, &a)?;
    let radius = a.radius;
    let (spheres, balls) = with_index(&mut run, &spec, radius, |ix| {
        Ok((sphere_sizes(&spec, radius, ix)?, ball_sizes(&spec, radius, ix)?))
    })?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["n", "sphere_size", "ball_size"]);
            for (n, (s, b)) in spheres.iter().zip(&balls).enumerate() {
                csv.row(&[n.to_string(), s.to_string(), b.to_string()]);
            }
            csv.finish()
        }
        Format::Json => to_json(&json!({
            "group": spec.descriptor(),
            "radius": radius,
            "sphere_sizes": spheres,
            "ball_sizes": balls,
        }))?,
    };
    run.emit(&text)
}

pub fn norm(a: NormArgs) -> Result<()> {
    let (mut run, spec) = start("norm", &a.common, &a)?;
    let cfg = norm_config(&a.norm, &a.common)?;
    let est: NormEstimate = if let Some(path) = &a.input {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let wire: ElementJson = serde_json::from_str(&text).context("parsing element JSON")?;
        let radius = index_radius(&a.norm, wire.support_radius);
        with_index(&mut run, &spec, radius, |ix| {
            let el = AlgebraElement::from_wire(&wire, ix)?;
            if el.spec() != &spec {
                return Err(CoreError::SpecMismatch {
                    left: spec.descriptor(),
                    right: el.spec().descriptor(),
                });
            }
            estimate(&el, &cfg, ix)
        })?
    } else {
        let witness: Witness = a.witness.parse()?;
        let Some(n) = a.radius else {
            bail!("--radius is required unless --input is given");
        };
        let coeffs = witness.sphere_coeffs(n);
        match spec.standard_free_rank() {
            Some(rank) if cfg.method != MethodChoice::Power => {
                estimate_radial(&RadialElement::from_sphere_coeffs(rank, &coeffs)?, &cfg)?
            }
            _ => {
                let ix = run.index(&spec, index_radius(&a.norm, n))?;
                let terms = (0..=n).flat_map(|j| {
                    let c = coeffs[j as usize];
                    ix.sphere(j).iter().map(move |g| (g.clone(), c))
                });
                let el = AlgebraElement::from_coeffs(&spec, terms, Some(&ix))?;
                estimate(&el, &cfg, Some(&ix))?
            }
        }
    };
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "method", "lower", "upper", "iterations", "converged"]);
            csv.row(&[
                spec.descriptor(),
                est.method.as_str().to_string(),
                fmt_g(est.lower),
                fmt_g(est.upper),
                est.iterations.to_string(),
                b(est.converged),
            ]);
            csv.finish()
        }
        Format::Json => est.to_json() + "\n",
    };
    run.emit(&text)
}

fn series_for(
    run: &mut Run,
    spec: &GroupSpec,
    witness: Witness,
    ns: &[u32],
    opts: &NormOpts,
    cfg: &NormConfig,
) -> Result<RatioSeries> {
    let hi = ns.iter().copied().max().unwrap_or(0);
    with_index(run, spec, index_radius(opts, hi), |ix| {
        ratio_series(spec, witness, ns, cfg, ix)
    })
}

pub fn ratio(a: RatioArgs) -> Result<()> {
    let (mut run, spec) = start("ratio", &a.common, &a)?;
    let cfg = norm_config(&a.norm, &a.common)?;
    let witness: Witness = a.witness.parse()?;
    let series = series_for(&mut run, &spec, witness, &a.range.values(), &a.norm, &cfg)?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&SERIES_HEADER);
            series_csv(&mut csv, &series);
            csv.finish()
        }
        Format::Json => to_json(&series)?,
    };
    run.emit(&text)
}

pub fn fit(a: FitArgs) -> Result<()> {
    let (mut run, spec) = start("fit", &a.common, &a)?;
    let cfg = norm_config(&a.norm, &a.common)?;
    let witness: Witness = a.witness.parse()?;
    let series = series_for(&mut run, &spec, witness, &a.range.values(), &a.norm, &cfg)?;
    let window = a.window.unwrap_or(a.range);
    let side = match a.side {
        SideArg::Lower => Side::Lower,
        SideArg::Upper => Side::Upper,
    };
    let fit = fit_exponent(&series, (window.lo, window.hi), side)?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "witness", "window_lo", "window_hi", "slope", "intercept", "r2"]);
            csv.row(&[
                series.group.clone(),
                witness.to_string(),
                fit.window_lo.to_string(),
                fit.window_hi.to_string(),
                fmt_g(fit.slope),
                fmt_g(fit.intercept),
                fmt_g(fit.r2),
            ]);
            csv.finish()
        }
        Format::Json => to_json(&json!({
            "group": series.group,
            "witness": witness.to_string(),
            "side": a.side,
            "fit": fit,
        }))?,
    };
    run.emit(&text)
}

pub fn zseries(a: ZseriesArgs) -> Result<()> {
    let (mut run, spec) = start("zseries", &a.common, &a)?;
    let radius = a.r.checked_mul(a.k + 1).context("r·(K+1) overflows")?;
    let (z, bounds) = with_index(&mut run, &spec, radius, |ix| {
        let z = build_z_series(&spec, a.r, a.alpha, a.k, ix)?;
        let bounds = z_l2_bounds(&z, ix);
        Ok((z, bounds))
    })?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "group",
                "r",
                "alpha",
                "K",
                "support_radius",
                "l2_lower",
                "l2",
                "l2_upper",
                "doubling_ok",
                "doubling_min_ratio",
            ]);
            csv.row(&[
                z.group.clone(),
                a.r.to_string(),
                fmt_g(a.alpha),
                a.k.to_string(),
                z.support_radius().to_string(),
                fmt_g(bounds.lower),
                fmt_g(bounds.actual),
                fmt_g(bounds.upper),
                b(bounds.doubling_ok),
                bounds.doubling_min_ratio.map(fmt_g).unwrap_or_default(),
            ]);
            csv.finish()
        }
        Format::Json => to_json(&json!({ "series": z, "bounds": bounds }))?,
    };
    run.emit(&text)
}

pub fn report(a: ReportArgs) -> Result<()> {
    let (mut run, spec) = start("report", &a.common, &a)?;
    let mut cfg = ReportConfig::new(a.range.lo, a.range.hi);
    cfg.s_values = a.s.clone();
    cfg.norm = norm_config(&a.norm, &a.common)?;
    let mut rep = with_index(&mut run, &spec, index_radius(&a.norm, a.range.hi), |ix| {
        build_report(&spec, &cfg, ix)
    })?;
    rep.manifest = a.common.out.as_ref().map(|p| manifest_path(p).display().to_string());
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&SERIES_HEADER);
            series_csv(&mut csv, &rep.ball_series);
            series_csv(&mut csv, &rep.sphere_series);
            csv.finish()
        }
        Format::Json => rep.to_json() + "\n",
    };
    run.emit(&text)
}

pub fn lemma1(a: Lemma1Args) -> Result<()> {
    let (mut run, spec) = start("verify lemma1", &a.common, &a)?;
    let sweep: LemmaOneSweep = match (a.radius, a.n, a.k) {
        (Some(r), None, None) => {
            let ix = run.index(&spec, r)?;
            verify_lemma_one_sweep(&spec, r, &ix)?
        }
        (None, Some(n), Some(k)) => {
            let ix = run.index(&spec, n + k)?;
            let c = verify_lemma_one(&spec, n, k, &ix)?;
            LemmaOneSweep {
                group: spec.descriptor(),
                max_total: n + k,
                holds: c.holds,
                min_slack: c.min_slack,
                worst: (n, k),
                checks: vec![c],
            }
        }
        _ => bail!("give either --radius or both --n and --k"),
    };
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "n", "k", "holds", "min_slack"]);
            for c in &sweep.checks {
                csv.row(&[
                    sweep.group.clone(),
                    c.n.to_string(),
                    c.k.to_string(),
                    b(c.holds),
                    fmt_g(c.min_slack),
                ]);
            }
            csv.finish()
        }
        Format::Json => to_json(&sweep)?,
    };
    run.emit(&text)?;
    let (n, k) = sweep.worst;
    settle(
        sweep.holds,
        a.expect,
        format!(
            "lemma1 group={} n={n} k={k} min slack {}",
            sweep.group,
            fmt_g(sweep.min_slack)
        ),
    )
}

pub fn lemma2(a: Lemma2Args) -> Result<()> {
    let (mut run, spec) = start("verify lemma2", &a.common, &a)?;
    let radius = a.r.checked_mul(a.k).context("r·K overflows")?;
    let check = with_index(&mut run, &spec, radius, |ix| {
        verify_lemma_two_finite(&spec, a.r, a.alpha, a.beta, a.k, ix)
    })?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "r", "alpha", "beta", "K", "route", "holds", "min_slack"]);
            csv.row(&[
                check.group.clone(),
                a.r.to_string(),
                fmt_g(a.alpha),
                fmt_g(a.beta),
                a.k.to_string(),
                check.route.to_string(),
                b(check.holds),
                fmt_g(check.min_slack),
            ]);
            csv.finish()
        }
        Format::Json => to_json(&check)?,
    };
    run.emit(&text)?;
    settle(
        check.holds,
        a.expect,
        format!(
            "lemma2 group={} r={} K={} min slack {}",
            check.group,
            a.r,
            a.k,
            fmt_g(check.min_slack)
        ),
    )
}

pub fn doubling(a: DoublingArgs) -> Result<()> {
    let (mut run, spec) = start("verify doubling", &a.common, &a)?;
    let radius = a.r.checked_mul(a.k + 1).context("r·(K+1) overflows")?;
    let check = with_index(&mut run, &spec, radius, |ix| verify_doubling(&spec, a.r, a.k, ix))?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "r", "k", "ratio"]);
            for (k, ratio) in &check.ratios {
                csv.row(&[spec.descriptor(), a.r.to_string(), k.to_string(), fmt_g(*ratio)]);
            }
            csv.finish()
        }
        Format::Json => to_json(&check)?,
    };
    run.emit(&text)?;
    settle(
        check.holds,
        a.expect,
        format!(
            "doubling group={} r={} k={} min ratio {}",
            spec.descriptor(),
            a.r,
            check.argmin,
            fmt_g(check.min_ratio)
        ),
    )
}

pub fn heredity(a: HeredityArgs) -> Result<()> {
    let (mut run, ambient) = start("verify heredity", &a.common, &a)?;
    let sub: GroupSpec = a.sub.parse()?;
    let mut images = Vec::with_capacity(a.images.len());
    for item in &a.images {
        let Some((gen, img)) = item.split_once('=') else {
            bail!("--image expects GEN=IMAGE, got {item:?}");
        };
        images.push((sub.parse_key(gen)?, ambient.parse_key(img)?));
    }
    let emb = Embedding::new(sub.clone(), ambient.clone(), &images)?;
    let cfg = norm_config(&a.norm, &a.common)?;
    let ns = a.range.values();
    let sub_index = run.index(&sub, a.sub_radius.unwrap_or(a.range.hi + 1))?;
    let check = with_index(&mut run, &ambient, index_radius(&a.norm, a.range.hi), |ix| {
        verify_heredity(&emb, &ns, &sub_index, ix, &cfg)
    })?;
    let text = match a.common.format {
        Format::Csv => {
            let mut csv = Csv::new(&[
                "sub",
                "ambient",
                "n",
                "sub_count",
                "sub_ratio",
                "ambient_ratio",
                "holds",
            ]);
            for e in &check.entries {
                csv.row(&[
                    check.sub.clone(),
                    check.ambient.clone(),
                    e.n.to_string(),
                    e.sub_count.to_string(),
                    fmt_g(e.sub_ratio),
                    fmt_g(e.ambient_ratio),
                    b(e.holds),
                ]);
            }
            csv.finish()
        }
        Format::Json => to_json(&check)?,
    };
    run.emit(&text)?;
    let worst = check
        .entries
        .iter()
        .min_by(|x, y| (x.ambient_ratio - x.sub_ratio).total_cmp(&(y.ambient_ratio - y.sub_ratio)))
        .expect("nonempty range");
    settle(
        check.holds,
        a.expect,
        format!(
            "heredity sub={} group={} n={} slack {}",
            check.sub,
            check.ambient,
            worst.n,
            fmt_g(worst.ambient_ratio - worst.sub_ratio)
        ),
    )
}

pub fn divergence(a: DivergenceArgs) -> Result<()> {
    let (mut run, spec) = start("verify divergence", &a.common, &a)?;
    let need = |v: Option<f64>, flag: &str| v.with_context(|| format!("--{flag} is required for --kind {:?}", a.kind));
    match a.kind {
        DivergenceKind::Constant => {
            let s = need(a.s, "s")?;
            let range = a.range.context("--range is required for --kind constant")?;
            let cfg = norm_config(&a.norm, &a.common)?;
            let witness: Witness = a.witness.parse()?;
            let series = series_for(&mut run, &spec, witness, &range.values(), &a.norm, &cfg)?;
            let cs = rd_constant_series(&series, s)?;
            let text = match a.common.format {
                Format::Csv => {
                    let mut csv = Csv::new(&["group", "witness", "s", "n", "constant"]);
                    for (n, v) in &cs.values {
                        csv.row(&[
                            cs.group.clone(),
                            witness.to_string(),
                            fmt_g(s),
                            n.to_string(),
                            fmt_g(*v),
                        ]);
                    }
                    csv.finish()
                }
                Format::Json => to_json(&cs)?,
            };
            run.emit(&text)?;
            settle(
                cs.verdict == Verdict::Divergent,
                a.expect,
                format!(
                    "divergence group={} s={} n={} growth {}",
                    cs.group,
                    fmt_g(s),
                    range.hi,
                    fmt_g(cs.growth)
                ),
            )
        }
        DivergenceKind::Sphere => {
            let d_hat = need(a.d_hat, "d-hat")?;
            let n_max = a.radius.context("--radius is required for --kind sphere")?;
            let sum = with_index(&mut run, &spec, n_max, |ix| {
                harmonic_sphere_sum(&spec, d_hat, n_max, ix)
            })?;
            let text = match a.common.format {
                Format::Csv => {
                    let mut csv = Csv::new(&["group", "d_hat", "n", "partial_sum"]);
                    for (n, v) in &sum.partial_sums {
                        csv.row(&[sum.group.clone(), fmt_g(d_hat), n.to_string(), fmt_g(*v)]);
                    }
                    csv.finish()
                }
                Format::Json => to_json(&sum)?,
            };
            run.emit(&text)?;
            let incs: Vec<String> = sum
                .increments
                .iter()
                .map(|(m, v)| format!("inc({m})={}", fmt_g(*v)))
                .collect();
            settle(
                !sum.converging,
                a.expect,
                format!(
                    "divergence group={} d_hat={} n={n_max} {}",
                    sum.group,
                    fmt_g(d_hat),
                    incs.join(" ")
                ),
            )
        }
        DivergenceKind::Contradiction => {
            let params = ProofParameters::new(
                need(a.s, "s")?,
                need(a.t, "t")?,
                need(a.alpha, "alpha")?,
                need(a.beta, "beta")?,
            )?;
            let r = a.r.context("--r is required for --kind contradiction")?;
            let k = a.k.context("--k is required for --kind contradiction")?;
            let radius = r.checked_mul(k + 1).context("r·(K+1) overflows")?;
            let rep = with_index(&mut run, &spec, radius, |ix| {
                contradiction_trace(&spec, &params, r, k, ix)
            })?;
            let text = match a.common.format {
                Format::Csv => {
                    let mut csv = Csv::new(&[
                        "group",
                        "r",
                        "K",
                        "weighted",
                        "weighted_bound",
                        "l2_squared",
                        "convergent_bound",
                        "divergent_exponent",
                    ]);
                    csv.row(&[
                        rep.group.clone(),
                        r.to_string(),
                        k.to_string(),
                        fmt_g(rep.weighted.weighted),
                        fmt_g(rep.weighted.bound),
                        fmt_g(rep.convergent.actual),
                        fmt_g(rep.convergent.bound),
                        fmt_g(rep.divergent_exponent),
                    ]);
                    csv.finish()
                }
                Format::Json => to_json(&rep)?,
            };
            run.emit(&text)?;
            settle(
                rep.weighted.holds && rep.convergent.holds,
                a.expect,
                format!(
                    "contradiction group={} r={r} K={k} slack {}",
                    rep.group,
                    fmt_g(rep.weighted.bound - rep.weighted.weighted)
                ),
            )
        }
    }
}

pub fn cache_build(a: CacheArgs) -> Result<()> {
    let (mut run, spec) = start("cache build", &a.common, &a)?;
    let Some(dir) = a.common.cache_dir.clone() else {
        bail!("--cache-dir (or RDLAB_CACHE_DIR) is required");
    };
    let index = enumerate_balls_with_budget(&spec, a.radius, run.ball_budget())?;
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = cache_path(&dir, &spec, a.radius);
    let digest = cache::write(&index, &path)?;
    run.caches.push(crate::output::CacheUse {
        path: path.display().to_string(),
        digest: digest.clone(),
        written: true,
    });
    let text = cache_row(
        &spec,
        a.radius,
        index.len(),
        &path.display().to_string(),
        &digest,
        a.common.format,
    )?;
    run.emit(&text)
}

pub fn cache_check(a: CacheArgs) -> Result<()> {
    let (run, spec) = start("cache check", &a.common, &a)?;
    let Some(dir) = a.common.cache_dir.clone() else {
        bail!("--cache-dir (or RDLAB_CACHE_DIR) is required");
    };
    let path = cache_path(&dir, &spec, a.radius);
    if !path.exists() {
        bail!("no cache at {}", path.display());
    }
    let same = cache::check(&spec, &path)?;
    let digest = cache::file_digest(&path)?;
    eprintln!("cache {} digest {digest}", path.display());
    let (index, _) = cache::read(&spec, &path)?;
    let text = cache_row(
        &spec,
        a.radius,
        index.len(),
        &path.display().to_string(),
        &digest,
        a.common.format,
    )?;
    run.emit(&text)?;
    if !same {
        return Err(VerificationFailure(format!("cache {} differs from a fresh enumeration", path.display())).into());
    }
    Ok(())
}

fn cache_row(
    spec: &GroupSpec,
    radius: u32,
    elements: usize,
    path: &str,
    digest: &str,
    format: Format,
) -> Result<String> {
    Ok(match format {
        Format::Csv => {
            let mut csv = Csv::new(&["group", "radius", "elements", "path", "digest"]);
            csv.row(&[
                spec.descriptor(),
                radius.to_string(),
                elements.to_string(),
                path.to_string(),
                digest.to_string(),
            ]);
            csv.finish()
        }
        Format::Json => to_json(&json!({
            "group": spec.descriptor(),
            "radius": radius,
            "elements": elements,
            "path": path,
            "digest": digest,
        }))?,
    })
}
