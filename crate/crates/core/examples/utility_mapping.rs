// Affine utilities for outputs that are not already on [0, 1]: a price
// in k$ where higher is better, and a risk score where lower is better.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<(CiuResult, CiuResult)> {
    let space = FeatureSpace::new(vec![
        FeatureDescriptor::numeric("rooms", 3.0, 9.0)?,
        FeatureDescriptor::numeric("crime", 0.0, 90.0)?,
    ])?;
    let model = FnModel::new(["price", "risk"], |x: &Instance| {
        let price = 5.0 + 45.0 * ((x.get(0) - 3.0) / 6.0) * (1.0 - 0.5 * x.get(1) / 90.0);
        let risk = x.get(1) / 90.0;
        vec![price, risk]
    });
    let engine = CiuEngine::new(&model, &space);
    let house = Instance::numeric(&[6.5, 10.0]);
    let rooms = FeatureSet::single(0);
    let crime = FeatureSet::single(1);

    // price 5 k$ is worst, 50 k$ best
    let price = CiuParams::new(1).with_utility(UtilityMapping::from_range(5.0, 50.0)?);
    let p = engine.evaluate(&CiuQuery::new(house.clone(), rooms, price))?;
    // risk: 1 is worst, 0 best
    let risk = CiuParams::new(1)
        .with_output(1)
        .with_utility(UtilityMapping::from_range(1.0, 0.0)?);
    let r = engine.evaluate(&CiuQuery::new(house, crime, risk))?;

    println!(
        "rooms -> price: CI={:.3} CU={:.3} (u(y)={:.3})",
        p.ci.unwrap_or(f64::NAN),
        p.cu.unwrap_or(f64::NAN),
        p.u_context
    );
    println!(
        "crime -> risk:  CI={:.3} CU={:.3} (u(y)={:.3})",
        r.ci.unwrap_or(f64::NAN),
        r.cu.unwrap_or(f64::NAN),
        r.u_context
    );
    Ok((p, r))
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
