// Shapley values against a grid background next to contextual influence.
// Both are additive-looking numbers; only CIU also says how favourable
// the current value is.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<(AttributionResult, Explanation)> {
    let f = ReferenceFunction::Linear;
    let space = f.space();
    let x = Instance::numeric(&[0.7, 0.8]);

    let background = generate_grid(&space, &[0.05])?;
    let shap = shapley_values(&f, &space, &x, &background, 0, ShapleyMode::Exact)?;
    println!(
        "shapley: phi={:?} phi0={:.3} f(x)={:.3} ({} background rows)",
        shap.phi
            .iter()
            .map(|p| format!("{p:.3}"))
            .collect::<Vec<_>>(),
        shap.phi0,
        shap.prediction,
        background.len()
    );

    let mc = shapley_values(
        &f,
        &space,
        &x,
        &background,
        0,
        ShapleyMode::MonteCarlo {
            samples: 2000,
            seed: 1,
        },
    )?;
    println!(
        "monte carlo: phi={:?}",
        mc.phi.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>()
    );

    let engine = CiuEngine::new(&f, &space);
    let sets = [FeatureSet::single(0), FeatureSet::single(1)];
    let ciu = engine.explain(&x, &sets, None, &CiuParams::new(42))?;
    for r in &ciu.results {
        println!(
            "ciu {}: phi={:+.3} (CI={:.2}, CU={:.2})",
            r.studied,
            r.influence.unwrap_or(f64::NAN),
            r.ci.unwrap_or(f64::NAN),
            r.cu.unwrap_or(f64::NAN)
        );
    }
    Ok((shap, ciu))
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
