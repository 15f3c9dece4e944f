// Explaining through intermediate concepts: a feature relative to the
// concept it belongs to, and the concept relative to the whole input.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<Vec<(String, CiuResult)>> {
    let space = FeatureSpace::new(vec![
        FeatureDescriptor::numeric("price", 0.0, 1.0)?,
        FeatureDescriptor::numeric("fuel", 0.0, 1.0)?,
        FeatureDescriptor::numeric("comfort", 0.0, 1.0)?,
        FeatureDescriptor::numeric("style", 0.0, 1.0)?,
    ])?;
    let model = scalar_model(|x: &Instance| {
        let cost = 0.5 * (1.0 - x.get(0)) + 0.5 * (1.0 - x.get(1));
        let appeal = 0.8 * x.get(2) + 0.2 * x.get(3);
        0.6 * cost + 0.4 * appeal
    });
    let engine = CiuEngine::new(&model, &space);
    let car = Instance::numeric(&[0.3, 0.6, 0.9, 0.2]);
    let params = CiuParams::new(3);

    let all = Concept::new("overall", FeatureSet::all(4));
    let cost = Concept::new("cost", FeatureSet::new([0, 1]));
    let appeal = Concept::new("appeal", FeatureSet::new([2, 3]));

    let mut out = Vec::new();
    for (concept, parent) in [(&cost, &all), (&appeal, &all)] {
        let r = engine.explain_intermediate(&car, concept, parent, &params)?;
        out.push((format!("{} in {}", concept.name, parent.name), r));
    }
    for (k, parent) in [(0, &cost), (1, &cost), (2, &appeal), (3, &appeal)] {
        let leaf = Concept::new(space.feature(k).name.clone(), FeatureSet::single(k));
        let r = engine.explain_intermediate(&car, &leaf, parent, &params)?;
        out.push((format!("{} in {}", leaf.name, parent.name), r));
    }
    for (label, r) in &out {
        println!(
            "{label:<18} CI={:.3} CU={:.3}",
            r.ci.unwrap_or(f64::NAN),
            r.cu.unwrap_or(f64::NAN)
        );
    }

    // A concept is only explained within a concept that contains it.
    let err = engine.explain_intermediate(&car, &appeal, &cost, &params);
    println!("appeal in cost: {}", err.unwrap_err());
    Ok(out)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
