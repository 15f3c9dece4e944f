//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::process::ExitCode;

use ciu::cli::{run_explain, Method, RunConfig};
use ciu::prelude::*;
use ciu::testbed::CellStatus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn near(a: Option<f64>, b: f64, tol: f64) -> bool {
    a.is_some_and(|a| (a - b).abs() <= tol)
}

fn per_feature(
    f: ReferenceFunction,
    x: &[f64],
    params: &CiuParams,
) -> Result<Vec<CiuResult>, String> {
    let space = f.space();
    let engine = CiuEngine::new(&f, &space);
    let sets: Vec<FeatureSet> = (0..space.len()).map(FeatureSet::single).collect();
    engine
        .explain(&instance(f, x), &sets, None, params)
        .map(|e| e.results)
        .map_err(|e| e.to_string())
}

/// Boolean functions take category levels, the others plain numbers.
fn instance(f: ReferenceFunction, x: &[f64]) -> Instance {
    if f.is_boolean() {
        Instance::levels(&x.iter().map(|&v| v as usize).collect::<Vec<_>>())
    } else {
        Instance::numeric(x)
    }
}

const CORNERS: [[f64; 2]; 4] = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];

fn table_matches(table: u8) -> Result<(), String> {
    let report = reproduce_table(table).map_err(|e| e.to_string())?;
    let bad = report.mismatches();
    ensure(bad.is_empty(), || {
        format!(
            "{} mismatching cells, first: {} {}",
            bad.len(),
            bad[0].0.label,
            bad[0].1.column
        )
    })?;
    ensure(
        report
            .rows
            .iter()
            .all(|r| r.cells.iter().all(|c| c.tolerance == Some(0.0))),
        || "boolean tables must compare at zero tolerance".into(),
    )
}

fn criterion_1() -> Check {
    table_matches(1)?;
    let f = ReferenceFunction::Sum;
    let u = f.utility();
    for x in CORNERS {
        let r = per_feature(f, &x, &CiuParams::new(0).with_utility(u))?;
        for c in &r {
            ensure(c.ci == Some(0.5), || format!("CI {:?} at {x:?}", c.ci))?;
            ensure(matches!(c.cu, Some(v) if v == 0.0 || v == 1.0), || {
                format!("CU {:?} at {x:?}", c.cu)
            })?;
        }
        let total: f64 = r.iter().map(|c| c.ci.unwrap() * c.cu.unwrap()).sum();
        let uy = u.apply(f.eval(&x)).map_err(|e| e.to_string())?;
        ensure(total == uy, || {
            format!("sum ci*cu = {total} but u(y) = {uy} at {x:?}")
        })?;
    }
    Ok("4 rows exact, sum ci*cu == u(y)".into())
}

fn criterion_2() -> Check {
    table_matches(2)?;
    let report = reproduce_table(2).map_err(|e| e.to_string())?;
    let undefined = report
        .rows
        .iter()
        .flat_map(|r| &r.cells)
        .filter(|c| c.expected.is_none())
        .inspect(|c| debug_assert!(c.computed.is_none()))
        .count();
    ensure(undefined > 0, || "no undefined cells found".into())?;
    let or = ReferenceFunction::Or;
    let r = per_feature(or, &[1.0, 1.0], &CiuParams::new(0))?;
    ensure(
        r.iter()
            .all(|c| c.ci == Some(0.0) && c.cu.is_none() && c.degenerate_studied),
        || "(1,1) must give CI 0 and undefined CU".into(),
    )?;
    Ok(format!(
        "all cells exact, {undefined} undefined cells reported as undefined"
    ))
}

fn criterion_3() -> Check {
    table_matches(3)?;
    for x in CORNERS {
        for c in per_feature(ReferenceFunction::Xor, &x, &CiuParams::new(0))? {
            ensure(c.ci == Some(1.0), || format!("CI {:?} at {x:?}", c.ci))?;
            ensure(matches!(c.cu, Some(v) if v == 0.0 || v == 1.0), || {
                format!("CU {:?} at {x:?}", c.cu)
            })?;
        }
    }
    Ok("all CI = 1, CU in {0,1}".into())
}

fn criterion_4() -> Check {
    let tol = 1e-9;
    let mut runs = 0;
    for n in [5, 10, 100, 1000] {
        for seed in [0, 1, 42, 9999] {
            let p = CiuParams::new(seed).with_n(n);
            let r = per_feature(ReferenceFunction::Linear, &[0.7, 0.8], &p)?;
            let want = [(0.3, 0.7, 0.12), (0.7, 0.8, 0.42)];
            for (c, (ci, cu, phi)) in r.iter().zip(want) {
                ensure(
                    near(c.ci, ci, tol) && near(c.cu, cu, tol) && near(c.influence, phi, tol),
                    || format!("N={n} seed={seed}: {:?} {:?} {:?}", c.ci, c.cu, c.influence),
                )?;
            }
            let r = per_feature(ReferenceFunction::Linear, &[0.5, 0.5], &p)?;
            ensure(r.iter().all(|c| near(c.influence, 0.0, tol)), || {
                format!("N={n}: phi at (0.5,0.5) not zero")
            })?;
            runs += 1;
        }
    }
    Ok(format!("exact within 1e-9 for {runs} (N, seed) pairs"))
}

fn criterion_5() -> Check {
    let f = ReferenceFunction::Sombrero;
    let x = [-7.5, -1.5];
    let published = [0.724, 0.18, 0.392, 0.998, -0.157, 0.18];
    let mut sums = [0.0; 6];
    let seeds = 1..=10u64;
    for seed in seeds.clone() {
        let p = CiuParams::new(seed).with_n(1000).with_utility(f.utility());
        let r = per_feature(f, &x, &p)?;
        let vals = [
            r[0].ci,
            r[1].ci,
            r[0].cu,
            r[1].cu,
            r[0].influence,
            r[1].influence,
        ];
        for (s, v) in sums.iter_mut().zip(vals) {
            *s += v.ok_or("undefined sombrero cell")?;
        }
    }
    let means: Vec<f64> = sums
        .iter()
        .map(|s| s / seeds.clone().count() as f64)
        .collect();

    // dense grid oracle: 100 001 points along each single axis, 10^6 over the pair
    let (lo_all, hi_all) =
        oracle_range(f, &x, &FeatureSet::all(2), 1000).map_err(|e| e.to_string())?;
    let y = f.eval(&x);
    let mut oracle = Vec::new();
    for k in 0..2 {
        let (lo, hi) =
            oracle_range(f, &x, &FeatureSet::single(k), 100_001).map_err(|e| e.to_string())?;
        oracle.push(((hi - lo) / (hi_all - lo_all), (y - lo) / (hi - lo)));
    }
    let oracle_cells = [
        oracle[0].0,
        oracle[1].0,
        oracle[0].1,
        oracle[1].1,
        2.0 * oracle[0].0 * (oracle[0].1 - 0.5),
        2.0 * oracle[1].0 * (oracle[1].1 - 0.5),
    ];
    for k in 0..6 {
        ensure((means[k] - published[k]).abs() <= 0.02, || {
            format!(
                "cell {k}: mean {:.4} vs published {}",
                means[k], published[k]
            )
        })?;
        ensure((means[k] - oracle_cells[k]).abs() <= 0.02, || {
            format!(
                "cell {k}: mean {:.4} vs oracle {:.4}",
                means[k], oracle_cells[k]
            )
        })?;
    }
    Ok(format!(
        "mean CI=({:.4},{:.4}) CU=({:.4},{:.4}) phi=({:.4},{:.4}); oracle CI1={:.4}",
        means[0], means[1], means[2], means[3], means[4], means[5], oracle_cells[0]
    ))
}

fn criterion_6() -> Check {
    let report = reproduce_table(5).map_err(|e| e.to_string())?;
    let rules = report.row("rules x=").ok_or("rules row missing")?;
    ensure(
        rules
            .cells
            .iter()
            .filter(|c| c.column.starts_with("CI") || c.column.starts_with("CU"))
            .all(|c| c.status == CellStatus::Excluded),
        || "published rules cells must be excluded".into(),
    )?;
    let f = ReferenceFunction::Rules;
    let space = f.space();
    let engine = CiuEngine::new(&f, &space);
    let sets = [
        FeatureSet::single(0),
        FeatureSet::single(1),
        FeatureSet::all(2),
    ];
    // varying every input reaches every plateau, whatever the context
    let (lo_all, hi_all) =
        oracle_range(f, &[0.0, 0.0], &FeatureSet::all(2), 1001).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = 200;
    for case in 0..cases {
        let x = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
        let p = CiuParams::new(case)
            .with_n(rng.gen_range(5..200))
            .with_utility(f.utility());
        let got = engine
            .explain(&Instance::numeric(&x), &sets, None, &p)
            .map_err(|e| e.to_string())?;
        for (set, r) in sets.iter().zip(&got.results) {
            let (lo, hi) = if set.len() == 2 {
                (lo_all, hi_all)
            } else {
                oracle_range(f, &x, set, 1001).map_err(|e| e.to_string())?
            };
            let ci = Some((hi - lo) / (hi_all - lo_all));
            let cu = (hi > lo).then(|| (f.eval(&x) - lo) / (hi - lo));
            let same = |a: Option<f64>, b: Option<f64>| match (a, b) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9,
                (a, b) => a.is_none() && b.is_none(),
            };
            ensure(same(r.ci, ci) && same(r.cu, cu), || {
                format!(
                    "x={x:?} set {set}: ({:?},{:?}) vs oracle ({ci:?},{cu:?})",
                    r.ci, r.cu
                )
            })?;
        }
    }
    Ok(format!(
        "published row excluded; stand-in matches oracle on {cases} random contexts"
    ))
}

/// Random smooth model on `n` inputs squashed into (0, 1).
fn random_model(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> FnModel<impl Fn(&Instance) -> Vec<f64> + Send + Sync> {
    let terms: Vec<(f64, f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.1..6.0),
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    let cross = rng.gen_range(-2.0..2.0);
    FnModel::new(["y"], move |x: &Instance| {
        let z: f64 = terms
            .iter()
            .enumerate()
            .map(|(k, (w, f, p))| w * (f * x.get(k) + p).sin())
            .sum::<f64>()
            + cross * x.get(0) * x.get(n - 1);
        vec![1.0 / (1.0 + (-z).exp())]
    })
}

fn random_mask(rng: &mut ChaCha8Rng, n: usize) -> FeatureSet {
    let m = rng.gen_range(1..(1u32 << n));
    FeatureSet::new((0..n).filter(|k| m >> k & 1 == 1))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut violations = 0;
    let mut defined = 0;
    for case in 0..1000u64 {
        let n = rng.gen_range(1..=5);
        let ranges: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let lo = rng.gen_range(-5.0..5.0);
                (lo, lo + rng.gen_range(0.1..5.0))
            })
            .collect();
        let space = FeatureSpace::numeric(&ranges).map_err(|e| e.to_string())?;
        let model = random_model(&mut rng, n);
        let ctx: Vec<f64> = ranges
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..=hi))
            .collect();
        let studied = random_mask(&mut rng, n);
        let extra = random_mask(&mut rng, n);
        let target = FeatureSet::new(studied.iter().chain(extra.iter()));
        let p = CiuParams::new(case).with_n(rng.gen_range(2 * n + 1..80));
        let r = CiuEngine::new(&model, &space)
            .evaluate(&CiuQuery::new(Instance::numeric(&ctx), studied, p).with_target(target))
            .map_err(|e| e.to_string())?;
        if let Some(ci) = r.ci {
            defined += 1;
            if !(0.0..=1.0).contains(&ci) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || {
        format!("{violations} cases with ci outside [0,1]")
    })?;
    Ok(format!(
        "1000 random cases, {defined} defined, 0 violations"
    ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = 0;
    for n in 1..=4usize {
        let space = FeatureSpace::binary(n).map_err(|e| e.to_string())?;
        for _ in 0..25 {
            let table: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let model = FnModel::new(["y"], move |x: &Instance| {
                vec![table[(0..n).map(|k| (x.get(k) as usize) << k).sum::<usize>()]]
            });
            for ctx_code in 0..1usize << n {
                let ctx = Instance::levels(&(0..n).map(|k| ctx_code >> k & 1).collect::<Vec<_>>());
                let range = |mask: usize| -> Result<OutputRange, String> {
                    let set = FeatureSet::new((0..n).filter(|k| mask >> k & 1 == 1));
                    let s =
                        generate_samples(&space, &ctx, &set, 1, 0).map_err(|e| e.to_string())?;
                    evaluate_range(&model, &s, 0).map_err(|e| e.to_string())
                };
                for small in 1..1usize << n {
                    for big in (1..1usize << n).filter(|b| b & small == small) {
                        let (a, b) = (range(small)?, range(big)?);
                        ensure(b.ymin <= a.ymin && a.ymax <= b.ymax, || {
                            format!("n={n} ctx={ctx_code:b}: {small:b} not inside {big:b}")
                        })?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    // numeric sampling with the smallest allowed N: nesting keeps ci <= 1
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for case in 0..300u64 {
        let n = rng.gen_range(2..=4);
        let space = FeatureSpace::numeric(&vec![(0.0, 1.0); n]).map_err(|e| e.to_string())?;
        let model = random_model(&mut rng, n);
        let ctx: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let studied = random_mask(&mut rng, n);
        // smallest N the target set {1..n} accepts
        let minimum = 2 * n + 1;
        let r = CiuEngine::new(&model, &space)
            .evaluate(&CiuQuery::new(
                Instance::numeric(&ctx),
                studied,
                CiuParams::new(case).with_n(minimum),
            ))
            .map_err(|e| e.to_string())?;
        ensure(r.ci.is_none_or(|c| c <= 1.0), || {
            format!("numeric case {case}: ci {:?}", r.ci)
        })?;
    }
    Ok(format!(
        "{pairs} subset pairs contained exactly; numeric ci <= 1 in 300 minimal-N cases"
    ))
}

fn criterion_9() -> Check {
    let mut checked = 0;
    for f in ReferenceFunction::ALL {
        let space = f.space();
        let step = match f {
            ReferenceFunction::Sombrero => 0.51,
            _ => 0.05,
        };
        let bg = generate_grid(&space, &[step]).map_err(|e| e.to_string())?;
        let points: Vec<[f64; 2]> = if f.is_boolean() {
            CORNERS.to_vec()
        } else if f == ReferenceFunction::Sombrero {
            vec![[-7.5, -1.5], [0.0, 0.0], [3.0, 9.5]]
        } else {
            vec![[0.7, 0.8], [0.5, 0.5], [0.7, 0.4], [0.0, 1.0]]
        };
        for x in points {
            let r = shapley_values(&f, &space, &instance(f, &x), &bg, 0, ShapleyMode::Exact)
                .map_err(|e| e.to_string())?;
            ensure((r.reconstructed() - f.eval(&x)).abs() <= 1e-9, || {
                format!(
                    "{f} at {x:?}: phi0+sum = {} vs f(x) = {}",
                    r.reconstructed(),
                    f.eval(&x)
                )
            })?;
            checked += 1;
        }
    }
    let f = ReferenceFunction::Linear;
    let space = f.space();
    let bg = generate_grid(&space, &[0.05]).map_err(|e| e.to_string())?;
    let at = |x: [f64; 2]| {
        shapley_values(
            &f,
            &space,
            &Instance::numeric(&x),
            &bg,
            0,
            ShapleyMode::Exact,
        )
        .map_err(|e| e.to_string())
    };
    let mid = at([0.5, 0.5])?;
    ensure(mid.phi.iter().all(|p| p.abs() <= 1e-9), || {
        format!("phi at (0.5,0.5) = {:?}", mid.phi)
    })?;
    let r = at([0.7, 0.8])?;
    ensure((r.phi.iter().sum::<f64>() - 0.27).abs() <= 1e-9, || {
        format!("sum {:?}", r.phi)
    })?;
    ensure(
        (r.phi[0] - 0.06).abs() <= 1e-9 && (r.phi[1] - 0.21).abs() <= 1e-9,
        || format!("{:?}", r.phi),
    )?;
    ensure(
        (r.phi[0] - 0.065).abs() <= 0.02 && (r.phi[1] - 0.208).abs() <= 0.02,
        || format!("{:?} vs published 0.065/0.208", r.phi),
    )?;
    Ok(format!(
        "local accuracy at {checked} points; linear (0,0) and (0.06,0.21) exact"
    ))
}

fn criterion_10() -> Check {
    let f = ReferenceFunction::Linear;
    let space = f.space();
    let x = Instance::numeric(&[0.7, 0.8]);
    let (mut worst_ratio, mut worst_cos) = (0.0f64, 1.0f64);
    for seed in 0..30 {
        let fit = local_surrogate(&f, &space, &x, &SurrogateConfig::new(1000, seed), 0)
            .map_err(|e| e.to_string())?;
        let (a, b) = (fit.phi[0], fit.phi[1]);
        let ratio = b / a;
        let cos = (0.3 * a + 0.7 * b) / ((a * a + b * b).sqrt() * 0.58f64.sqrt());
        let err = (ratio / (7.0 / 3.0) - 1.0).abs();
        worst_ratio = worst_ratio.max(err);
        worst_cos = worst_cos.min(cos);
        ensure(err <= 0.10, || format!("seed {seed}: ratio {ratio}"))?;
        ensure(cos > 0.99, || format!("seed {seed}: cosine {cos}"))?;
    }
    Ok(format!(
        "30 seeds: worst ratio error {:.2e}, worst cosine {worst_cos:.6}",
        worst_ratio
    ))
}

fn criterion_11() -> Check {
    let mut configs = Vec::new();
    for f in ReferenceFunction::ALL {
        let x = match f {
            ReferenceFunction::Sombrero => "-7.5,-1.5",
            _ if f.is_boolean() => "1,0",
            _ => "0.7,0.8",
        };
        let mut c = RunConfig::builtin(f, vec![x.into(), x.into()]);
        c.methods = vec![
            Method::Ciu,
            Method::Influence,
            Method::Shapley,
            Method::Surrogate,
        ];
        c.features = Some("1;2;1,2".into());
        c.seed = 1234;
        configs.push(c);
    }
    for c in &configs {
        let a = run_explain(c).map_err(|e| e.to_string())?;
        let b = run_explain(c).map_err(|e| e.to_string())?;
        let (ja, jb) = (
            a.to_json().map_err(|e| e.to_string())?,
            b.to_json().map_err(|e| e.to_string())?,
        );
        ensure(ja == jb, || {
            format!("{:?}: json differs between runs", c.model)
        })?;
        ensure(a.to_csv().ok() == b.to_csv().ok(), || {
            format!("{:?}: csv differs", c.model)
        })?;
        ensure(ja.contains("\"seed\": 1234"), || "seed not recorded".into())?;
    }
    Ok(format!(
        "{} configurations re-run byte-identically",
        configs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("weighted sum truth table", criterion_1),
        ("OR truth table", criterion_2),
        ("XOR truth table", criterion_3),
        ("linear rows exact", criterion_4),
        ("sombrero row within 0.02", criterion_5),
        ("rules row excluded, stand-in vs oracle", criterion_6),
        ("importance bounded by one", criterion_7),
        ("range containment", criterion_8),
        ("exact Shapley values", criterion_9),
        ("surrogate gradient recovery", criterion_10),
        ("byte-identical reruns", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
