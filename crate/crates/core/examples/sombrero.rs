// The sombrero surface sin(r)/r: sampled CIU versus a dense grid oracle,
// and how the estimate tightens as N grows.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<Vec<(usize, f64)>> {
    let f = ReferenceFunction::Sombrero;
    let space = f.space();
    let context = [-7.5, -1.5];
    let instance = Instance::numeric(&context);
    let x1 = FeatureSet::single(0);
    let all = FeatureSet::all(2);

    let (oracle_ci1, oracle_cu1) = oracle_ci(f, &context, &x1, &all, 2001)?;
    println!(
        "oracle:  CI1={:.4} CU1={:.4}",
        oracle_ci1.unwrap_or(f64::NAN),
        oracle_cu1.unwrap_or(f64::NAN)
    );

    let engine = CiuEngine::new(&f, &space);
    let mut trend = Vec::new();
    for n in [20, 100, 1000, 10_000] {
        let params = CiuParams::new(42).with_n(n).with_utility(f.utility());
        let r = engine.evaluate(&CiuQuery::new(instance.clone(), x1.clone(), params))?;
        let ci = r.ci.unwrap_or(f64::NAN);
        println!("N={n:<6} CI1={ci:.4} CU1={:.4}", r.cu.unwrap_or(f64::NAN));
        trend.push((n, ci));
    }
    Ok(trend)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
