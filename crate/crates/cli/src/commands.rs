use anyhow::{Context, Result};
use serde_json::{json, Value};

use circlemap::farey::{
    closest_return_denominators, code_to_rational, daughters, degree, farey_sequence, neighbors,
    rational_to_code, turning_points,
};
use circlemap::fractal::{
    box_dimension, frostman_check, frostman_min_cutoff, resolved_scale, upper_dimension_estimate,
    DimensionEstimate, HarmonicCells,
};
use circlemap::holder::{holder_fit, zeta_uniformity};
use circlemap::scaling::{cubic_law_check, cubic_product, harmonic_scalings, passage_slope, phase_sum, saddle_sweep};
use circlemap::{
    build_atlas, load_atlas, AtlasSpec, CriticalFamily, Error, FamilySpec, FareyCode, FareyDomain,
    Generator, Rational, RotationConfig, TongueAtlas,
};

use crate::output::{num, sink, write_json, Table};
use crate::{
    AtlasArgs, DimensionArgs, FamilyArgs, FareyArgs, Format, HolderArgs, Method, OutArgs,
    SaddleArgs, ScalingsArgs, TonguesArgs,
};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::InvalidArgument(msg.into()).into()
}

fn family_spec(args: &FamilyArgs) -> Result<FamilySpec> {
    let spec = FamilySpec {
        name: args.family.clone(),
        l: args.l,
    };
    CriticalFamily::from_spec(&spec)?;
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(usage(format!("--tol must be positive, got {}", args.tol)));
    }
    Ok(spec)
}

fn jobs(args: &FamilyArgs) -> usize {
    if args.jobs > 0 {
        args.jobs
    } else {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }
}

fn build(family: &FamilyArgs, generator: Generator) -> Result<TongueAtlas> {
    let spec = AtlasSpec {
        family: family_spec(family)?,
        tol: family.tol,
        generator,
    };
    Ok(build_atlas(&spec, jobs(family), &RotationConfig::default())?)
}

fn obtain_atlas(args: &AtlasArgs, fallback: impl FnOnce() -> Generator) -> Result<TongueAtlas> {
    match &args.atlas {
        Some(path) => load_atlas(path).with_context(|| format!("loading {}", path.display())),
        None => build(&args.family, fallback()),
    }
}

fn atlas_comments(t: &mut Table, atlas: &TongueAtlas) {
    t.comment("fingerprint", atlas.fingerprint());
    t.comment("family", &atlas.family().name);
    t.comment("l", atlas.family().l);
    t.comment("tol", num(atlas.tol()));
    t.comment(
        "generator",
        serde_json::to_string(atlas.generator()).unwrap_or_default(),
    );
}

fn atlas_json(atlas: &TongueAtlas) -> Value {
    json!({
        "fingerprint": atlas.fingerprint(),
        "family": atlas.family().name,
        "l": atlas.family().l,
        "tol": atlas.tol(),
        "generator": atlas.generator(),
    })
}

fn parse_domain(s: &str) -> Result<FareyDomain> {
    Ok(s.parse::<FareyDomain>()?)
}

fn emit(out: &OutArgs, default: Format, table: impl FnOnce() -> Table, value: impl FnOnce() -> Value) -> Result<()> {
    let mut w = sink(out.out.as_deref())?;
    match out.format.unwrap_or(default) {
        Format::Csv => table().write_csv(&mut w)?,
        Format::Json => write_json(&mut w, &value())?,
    }
    w.flush()?;
    Ok(())
}

pub fn farey(args: FareyArgs) -> Result<()> {
    let rationals: Vec<Rational> = if let Some(r) = &args.rational {
        vec![r.parse()?]
    } else if let Some(c) = &args.code {
        vec![code_to_rational(&c.parse::<FareyCode>()?)]
    } else {
        farey_sequence(args.qmax.unwrap_or(8))
            .into_iter()
            .filter(|r| r.is_interior())
            .collect()
    };
    let mut rows = Vec::with_capacity(rationals.len());
    for r in &rationals {
        if !r.is_interior() {
            return Err(Error::OutsideUnitInterval(r.to_string()).into());
        }
        let code = rational_to_code(r)?;
        let (lo, hi) = neighbors(r)?;
        let (dl, dr) = daughters(r)?;
        let returns: Vec<String> = closest_return_denominators(&code)
            .iter()
            .map(|q| q.to_string())
            .collect();
        let turns: Vec<String> = turning_points(&code).iter().map(|k| k.to_string()).collect();
        rows.push(vec![
            r.to_string(),
            code.to_string(),
            degree(&code).to_string(),
            lo.to_string(),
            hi.to_string(),
            dl.to_string(),
            dr.to_string(),
            turns.join(" "),
            returns.join(" "),
        ]);
    }
    let header = vec![
        "rational",
        "code",
        "degree",
        "left_neighbor",
        "right_neighbor",
        "left_daughter",
        "right_daughter",
        "turning_points",
        "closest_returns",
    ];
    emit(
        &args.out,
        Format::Csv,
        || {
            let mut t = Table::new(header.clone());
            t.rows = rows.clone();
            t
        },
        || {
            let objs: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let m: serde_json::Map<String, Value> = header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
                        .collect();
                    Value::Object(m)
                })
                .collect();
            Value::Array(objs)
        },
    )
}

pub fn tongues(args: TonguesArgs) -> Result<()> {
    let generator = match (args.qmax, args.depth) {
        (Some(q_max), None) => Generator::Farey { q_max },
        (None, Some(depth)) => {
            parse_domain(&args.domain)?;
            Generator::Harmonic {
                domain: args.domain.clone(),
                depth,
                cutoff: args.cutoff,
                locking_depth: args.locking_depth,
            }
        }
        _ => return Err(usage("tongues needs exactly one of --qmax and --depth")),
    };
    let atlas = build(&args.family, generator)?;
    let mut w = sink(args.out.out.as_deref())?;
    match args.out.format {
        Some(Format::Csv) => {
            let mut t = Table::new(vec!["rational", "t_lo", "t_hi", "center", "width"]);
            atlas_comments(&mut t, &atlas);
            for r in atlas.records() {
                let (lo, hi) = match r.locking {
                    Some((a, b)) => (num(a), num(b)),
                    None => (String::new(), String::new()),
                };
                let width = r.locking.map(|(a, b)| num(b - a)).unwrap_or_default();
                t.rows.push(vec![r.rho.to_string(), lo, hi, num(r.center), width]);
            }
            t.write_csv(&mut w)?;
        }
        _ => w.write_all(atlas.to_jsonl().as_bytes())?,
    }
    w.flush()?;
    if let Some(p) = &args.out.out {
        eprintln!(
            "wrote {} records to {} (fingerprint {})",
            atlas.len(),
            p.display(),
            atlas.fingerprint()
        );
    }
    Ok(())
}

pub fn scalings(args: ScalingsArgs) -> Result<()> {
    if args.nmax < 1 {
        return Err(usage("--nmax must be at least 1"));
    }
    let domain = parse_domain(&args.domain)?;
    let atlas = obtain_atlas(&args.atlas, || Generator::Harmonic {
        domain: args.domain.clone(),
        depth: 1,
        cutoff: args.nmax,
        locking_depth: 0,
    })?;
    let fam = CriticalFamily::from_spec(atlas.family())?;
    let report = harmonic_scalings(&atlas, &domain, -args.nmax, args.nmax)?;
    let mut rows = Vec::with_capacity(report.h.len());
    for &(n, h) in &report.h {
        let z = atlas.center(&domain.harmonic_endpoint(n))?;
        let s = phase_sum(&fam, z, &domain, n)?;
        rows.push((n, h, cubic_product(n, h), s, h * s));
    }
    let law = cubic_law_check(&report).ok();
    emit(
        &args.out,
        Format::Csv,
        || {
            let mut t = Table::new(vec!["n", "h_n", "cubic_product", "phase_sum", "product"]);
            atlas_comments(&mut t, &atlas);
            t.comment("domain", &domain);
            t.comment("depth", report.depth);
            if let Some(law) = law {
                t.comment("fit_slope", num(law.slope));
                t.comment("ratio_spread", num(law.spread));
                t.comment("shifted_slope", num(law.shifted_slope));
            }
            t.rows = rows
                .iter()
                .map(|&(n, h, c, s, p)| vec![n.to_string(), num(h), num(c), num(s), num(p)])
                .collect();
            t
        },
        || {
            json!({
                "atlas": atlas_json(&atlas),
                "domain": domain.to_string(),
                "depth": report.depth,
                "fit_slope": law.map(|l| l.slope),
                "ratio_spread": law.map(|l| l.spread),
                "shifted_slope": law.map(|l| l.shifted_slope),
                "rows": rows.iter().map(|&(n, h, c, s, p)| json!({
                    "n": n, "h_n": h, "cubic_product": c, "phase_sum": s, "product": p,
                })).collect::<Vec<_>>(),
            })
        },
    )
}

pub fn saddle(args: SaddleArgs) -> Result<()> {
    let rows = saddle_sweep(args.alpha, args.kappa, &args.eps)?;
    let slope = (rows.len() >= 2).then(|| passage_slope(&rows));
    emit(
        &args.out,
        Format::Csv,
        || {
            let mut t = Table::new(vec![
                "alpha",
                "eps",
                "kappa",
                "passage_length",
                "slow_fraction",
                "reciprocal_gap_sum",
                "epsilon_l2_ratio",
            ]);
            if let Some(s) = slope {
                t.comment("passage_slope", num(s));
            }
            t.rows = rows
                .iter()
                .map(|r| {
                    vec![
                        num(r.alpha),
                        num(r.eps),
                        num(r.kappa),
                        r.passage_length.to_string(),
                        num(r.facts.slow_fraction),
                        num(r.facts.reciprocal_gap_sum),
                        num(r.facts.epsilon_l2_ratio),
                    ]
                })
                .collect();
            t
        },
        || {
            json!({
                "passage_slope": slope,
                "rows": rows.iter().map(|r| json!({
                    "alpha": r.alpha,
                    "eps": r.eps,
                    "kappa": r.kappa,
                    "passage_length": r.passage_length,
                    "slow_fraction": r.facts.slow_fraction,
                    "reciprocal_gap_sum": r.facts.reciprocal_gap_sum,
                    "epsilon_l2_ratio": r.facts.epsilon_l2_ratio,
                })).collect::<Vec<_>>(),
            })
        },
    )
}

fn estimate_json(e: &DimensionEstimate) -> Value {
    json!({
        "method": e.method.to_string(),
        "value": e.value,
        "scales": e.scales,
        "counts": e.diagnostics,
        "pair_exponents": e.pair_exponents,
    })
}

fn estimate_table(e: &DimensionEstimate, atlas: &TongueAtlas) -> Table {
    let mut t = Table::new(vec!["scale", "diagnostic"]);
    atlas_comments(&mut t, atlas);
    t.comment("method", e.method);
    t.comment("value", num(e.value));
    t.rows = e
        .scales
        .iter()
        .zip(&e.diagnostics)
        .map(|(s, d)| vec![num(*s), num(*d)])
        .collect();
    t
}

pub fn dimension(args: DimensionArgs) -> Result<()> {
    match args.method {
        Method::Box => {
            let atlas = obtain_atlas(&args.atlas, || Generator::Farey { q_max: args.qmax })?;
            let resolved = resolved_scale(&atlas, args.qmax);
            let (eps, dropped): (Vec<f64>, Vec<f64>) = match &args.eps {
                Some(list) => (list.clone(), Vec::new()),
                None => (8..=16).map(|j| 2f64.powi(-j)).partition(|&e| e >= resolved),
            };
            let est = box_dimension(&atlas, args.qmax, &eps)?;
            emit(
                &args.out,
                Format::Json,
                || {
                    let mut t = estimate_table(&est, &atlas);
                    t.comment("q_max", args.qmax);
                    t.comment("resolved_scale", num(resolved));
                    t
                },
                || {
                    let mut v = estimate_json(&est);
                    v["atlas"] = atlas_json(&atlas);
                    v["q_max"] = json!(args.qmax);
                    v["resolved_scale"] = json!(resolved);
                    v["dropped_scales"] = json!(dropped);
                    v
                },
            )
        }
        Method::Cover | Method::Frostman => {
            let base = parse_domain(&args.domain)?;
            let atlas = obtain_atlas(&args.atlas, || Generator::Harmonic {
                domain: args.domain.clone(),
                depth: args.depth,
                cutoff: args.cutoff,
                locking_depth: args.depth.saturating_sub(1),
            })?;
            let cells = HarmonicCells::new(&atlas, base);
            if args.method == Method::Cover {
                let est = upper_dimension_estimate(&cells, args.depth, args.cutoff)?;
                return emit(
                    &args.out,
                    Format::Json,
                    || estimate_table(&est, &atlas),
                    || {
                        let mut v = estimate_json(&est);
                        v["atlas"] = atlas_json(&atlas);
                        v["cutoff"] = json!(args.cutoff);
                        v
                    },
                );
            }
            let k = frostman_min_cutoff(&cells, args.eta, args.depth, args.cutoff)?;
            let rep = frostman_check(&cells, args.eta, k, args.depth)?;
            emit(
                &args.out,
                Format::Json,
                || {
                    let mut t = Table::new(vec!["code", "mass"]);
                    atlas_comments(&mut t, &atlas);
                    t.comment("eta", num(rep.eta));
                    t.comment("cutoff", rep.cutoff);
                    t.comment("passed", rep.passed);
                    t.comment("max_density", num(rep.max_density));
                    t.rows = rep
                        .weights
                        .iter()
                        .map(|(c, m)| vec![c.to_string(), num(*m)])
                        .collect();
                    t
                },
                || {
                    json!({
                        "method": "frostman",
                        "atlas": atlas_json(&atlas),
                        "eta": rep.eta,
                        "cutoff": rep.cutoff,
                        "r_max": rep.r_max,
                        "passed": rep.passed,
                        "max_density": rep.max_density,
                        "total_mass": rep.total_mass,
                        "min_gap_ratio": rep.min_gap_ratio,
                    })
                },
            )
        }
    }
}

pub fn holder(args: HolderArgs) -> Result<()> {
    let domain = parse_domain(&args.domain)?;
    let atlas = obtain_atlas(&args.atlas, || Generator::Farey { q_max: args.qmax })?;
    let fit = holder_fit(&atlas, args.scales, args.pairs, args.seed)?;
    let zeta = zeta_uniformity(&atlas, &domain, args.alpha, args.nmax)?;
    let worst_adjacent = zeta.adjacent.iter().map(|a| a.1).fold(0.0, f64::max);
    emit(
        &args.out,
        Format::Csv,
        || {
            let mut t = Table::new(vec!["scale", "max_drho", "pairs", "fitted"]);
            atlas_comments(&mut t, &atlas);
            t.comment("alpha", num(fit.alpha));
            t.comment("c_const", num(fit.c_const));
            t.comment("samples", fit.samples.len());
            t.comment("zeta_max_ratio", num(zeta.max_ratio));
            t.comment("zeta_worst_adjacent", num(worst_adjacent));
            t.rows = fit
                .scales
                .iter()
                .map(|s| {
                    vec![
                        num(s.gap),
                        num(s.max_drho),
                        s.pairs.to_string(),
                        num(fit.envelope(s.gap)),
                    ]
                })
                .collect();
            t
        },
        || {
            let ((t1, r1), (t2, r2)) = fit.worst_pair;
            json!({
                "atlas": atlas_json(&atlas),
                "seed": args.seed,
                "alpha": fit.alpha,
                "c_const": fit.c_const,
                "raw_slope": fit.raw_slope,
                "intercept": fit.intercept,
                "samples": fit.samples.len(),
                "envelope_holds": fit.envelope_holds(),
                "worst_pair": [[t1, r1], [t2, r2]],
                "scales": fit.scales.iter().map(|s| json!({
                    "gap": s.gap, "max_drho": s.max_drho, "pairs": s.pairs,
                    "fitted": fit.envelope(s.gap),
                })).collect::<Vec<_>>(),
                "zeta": {
                    "alpha": zeta.alpha,
                    "domain": domain.to_string(),
                    "max_ratio": zeta.max_ratio,
                    "adjacent": zeta.adjacent.iter().map(|(n, r)| json!([n, r])).collect::<Vec<_>>(),
                },
            })
        },
    )
}
