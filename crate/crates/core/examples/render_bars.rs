// Runs the explain pipeline programmatically and draws the results as
// text bars and SVG.

use ciu::cli::{render_bars, run_explain, Method, RenderFormat, RunConfig};
use ciu::prelude::*;

pub fn run_example() -> ciu::Result<(String, String)> {
    let mut config = RunConfig::builtin(ReferenceFunction::Sombrero, vec!["-7.5,-1.5".into()]);
    config.methods = vec![Method::Ciu, Method::Influence, Method::Shapley];
    config.n = 1000;
    let output = run_explain(&config)?;

    let ciu: Vec<_> = output
        .records
        .iter()
        .filter(|r| r.method == Method::Ciu)
        .cloned()
        .collect();
    let text = render_bars(&ciu, RenderFormat::Text)?;
    print!("{text}");

    let shapley: Vec<_> = output
        .records
        .iter()
        .filter(|r| r.method == Method::Shapley)
        .cloned()
        .collect();
    let svg = render_bars(&shapley, RenderFormat::Svg)?;
    println!("\nsvg: {} bytes", svg.len());
    Ok((text, svg))
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
