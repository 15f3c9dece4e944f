// CI, CU and contextual influence for a two-input linear model.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<Explanation> {
    let space = FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)])?;
    let model = scalar_model(|x: &Instance| 0.3 * x.get(0) + 0.7 * x.get(1));
    let engine = CiuEngine::new(&model, &space);

    let instance = Instance::numeric(&[0.7, 0.8]);
    let sets = [FeatureSet::single(0), FeatureSet::single(1)];
    let explanation = engine.explain(&instance, &sets, None, &CiuParams::new(42))?;

    for r in &explanation.results {
        println!(
            "{:<6} CI={:.3} CU={:.3} phi={:+.3}  y in [{:.2}, {:.2}]",
            r.studied.label(&space),
            r.ci.unwrap_or(f64::NAN),
            r.cu.unwrap_or(f64::NAN),
            r.influence.unwrap_or(f64::NAN),
            r.ymin_i,
            r.ymax_i,
        );
    }
    Ok(explanation)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
