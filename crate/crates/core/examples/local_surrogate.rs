// A locally weighted linear surrogate around one instance.

use ciu::prelude::*;

pub fn run_example() -> ciu::Result<AttributionResult> {
    let space = FeatureSpace::new(vec![
        FeatureDescriptor::numeric("temp", -10.0, 30.0)?,
        FeatureDescriptor::numeric("wind", 0.0, 20.0)?,
        FeatureDescriptor::categorical("sky", ["clear", "cloudy", "rain"])?,
    ])?;
    let model = scalar_model(|x: &Instance| {
        let sky = [1.0, 0.6, 0.1][x.get(2) as usize];
        (0.02 * x.get(0) - 0.01 * x.get(1) + 0.5 * sky).clamp(0.0, 1.0)
    });
    let day = space.parse_instance(&["18", "5", "clear"])?;

    let fit = local_surrogate(&model, &space, &day, &SurrogateConfig::new(500, 11), 0)?;
    for (name, phi) in space.names().iter().zip(&fit.phi) {
        println!("{name:<5} {phi:+.4}");
    }
    println!(
        "intercept {:.4}, prediction {:.4}, weighted R^2 {:.4}",
        fit.phi0,
        fit.prediction,
        fit.fit_quality.unwrap_or(f64::NAN)
    );
    Ok(fit)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
