// Infers a feature space from a CSV file and uses the rows as the
// Shapley background.

use std::fs;

use ciu::cli::ingest_csv;
use ciu::prelude::*;

pub fn run_example() -> ciu::Result<AttributionResult> {
    let path = std::env::temp_dir().join(format!("ciu-ingest-{}.csv", std::process::id()));
    fs::write(
        &path,
        "size,rooms,area\n40,1,city\n85,3,suburb\n120,4,suburb\n60,2,city\n150,5,rural\n",
    )?;
    let ingested = ingest_csv(&path, None);
    fs::remove_file(&path)?;
    let ingested = ingested?;
    print!("{}", ingested.summary());

    let space = ingested.space;
    let model = scalar_model(|x: &Instance| {
        let area = [1.0, 0.7, 0.4][x.get(2) as usize];
        (x.get(0) / 150.0 * 0.6 + x.get(1) / 5.0 * 0.2) * area
    });
    let x = space.parse_instance(&["100", "3", "city"])?;
    let shap = shapley_values(
        &model,
        &space,
        &x,
        &ingested.background,
        0,
        ShapleyMode::Exact,
    )?;
    for (name, phi) in space.names().iter().zip(&shap.phi) {
        println!("{name:<6} {phi:+.4}");
    }
    println!("phi0 {:.4} + sum = {:.4}", shap.phi0, shap.reconstructed());
    Ok(shap)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
