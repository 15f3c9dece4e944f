// Explaining a model that lives in another process. The child reads one
// JSON request per line and answers with one JSON line of outputs.

use ciu::cli::ExternalModelBridge;
use ciu::prelude::*;

const CHILD: &str = r#"python3 -u -c '
import json, sys
for line in sys.stdin:
    rows = json.loads(line)["rows"]
    out = [[0.3 * r[0] + 0.7 * (1.0 if r[1] == "yes" else 0.0)] for r in rows]
    print(json.dumps({"outputs": out}), flush=True)
'"#;

pub fn run_example() -> ciu::Result<Explanation> {
    let space = FeatureSpace::new(vec![
        FeatureDescriptor::numeric("score", 0.0, 1.0)?,
        FeatureDescriptor::categorical("member", ["no", "yes"])?,
    ])?;
    let bridge = ExternalModelBridge::spawn(CHILD, space.clone(), vec!["y".into()])?;
    let engine = CiuEngine::new(&bridge, &space);

    let x = space.parse_instance(&["0.4", "yes"])?;
    let sets = [FeatureSet::single(0), FeatureSet::single(1)];
    let explanation = engine.explain(&x, &sets, None, &CiuParams::new(5))?;
    for r in &explanation.results {
        println!(
            "{:<7} CI={:.3} CU={:.3}",
            r.studied.label(&space),
            r.ci.unwrap_or(f64::NAN),
            r.cu.unwrap_or(f64::NAN)
        );
    }
    Ok(explanation)
}

fn main() -> ciu::Result<()> {
    run_example().map(|_| ())
}
