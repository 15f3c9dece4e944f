//! Every example is compiled into this test binary and run; the checks
//! pin the numbers each example prints.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(linear_ciu, "linear_ciu.rs");
example!(boolean_tables, "boolean_tables.rs");
example!(sombrero, "sombrero.rs");
example!(intermediate_concepts, "intermediate_concepts.rs");
example!(shapley_vs_ciu, "shapley_vs_ciu.rs");
example!(local_surrogate, "local_surrogate.rs");
example!(external_bridge, "external_bridge.rs");
example!(render_bars, "render_bars.rs");
example!(csv_ingest, "csv_ingest.rs");
example!(utility_mapping, "utility_mapping.rs");

fn close(a: Option<f64>, b: f64, tol: f64) -> bool {
    a.is_some_and(|a| (a - b).abs() <= tol)
}

#[test]
fn linear_ciu_example() {
    let ex = linear_ciu::run_example().unwrap();
    assert!(ex.degenerate.is_empty());
    let [a, b] = [&ex.results[0], &ex.results[1]];
    assert!(close(a.ci, 0.3, 1e-9) && close(b.ci, 0.7, 1e-9));
    assert!(close(a.cu, 0.7, 1e-9) && close(b.cu, 0.8, 1e-9));
    assert!(close(a.influence, 0.12, 1e-9) && close(b.influence, 0.42, 1e-9));
}

#[test]
fn boolean_tables_example() {
    let reports = boolean_tables::run_example().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r.all_match()));
}

#[test]
fn sombrero_example_converges() {
    let trend = sombrero::run_example().unwrap();
    let (_, ci) = *trend.last().unwrap();
    assert!((ci - 0.7248).abs() < 0.02, "{ci}");
}

#[test]
fn intermediate_concepts_example() {
    let out = intermediate_concepts::run_example().unwrap();
    let get = |label: &str| &out.iter().find(|(l, _)| l == label).unwrap().1;
    // cost carries weight 0.6, appeal 0.4; the model is additive
    assert!(close(get("cost in overall").ci, 0.6, 1e-9));
    assert!(close(get("appeal in overall").ci, 0.4, 1e-9));
    assert!(close(get("comfort in appeal").ci, 0.8, 1e-9));
    assert!(close(get("comfort in appeal").cu, 0.9, 1e-9));
    assert!(close(get("price in cost").cu, 0.7, 1e-9));
}

#[test]
fn shapley_vs_ciu_example() {
    let (shap, ciu) = shapley_vs_ciu::run_example().unwrap();
    assert!((shap.phi[0] - 0.06).abs() < 1e-9 && (shap.phi[1] - 0.21).abs() < 1e-9);
    assert!(close(ciu.results[1].influence, 0.42, 1e-9));
}

#[test]
fn local_surrogate_example() {
    let fit = local_surrogate::run_example().unwrap();
    // true local slopes: 0.02 per degree and -0.01 per m/s, i.e. times the
    // perturbation scale of 4 and 2 units
    assert!((fit.phi[0] - 0.08).abs() < 0.01, "{:?}", fit.phi);
    assert!((fit.phi[1] + 0.02).abs() < 0.01, "{:?}", fit.phi);
    assert!(fit.phi[2] > 0.0);
}

#[test]
fn external_bridge_example() {
    let ex = external_bridge::run_example().unwrap();
    let member = &ex.results[1];
    assert!(close(member.cu, 1.0, 1e-9));
    assert!(close(member.ci, 0.7 / 0.98, 0.02));
}

#[test]
fn render_bars_example() {
    let (text, svg) = render_bars::run_example().unwrap();
    assert!(text.contains("x1") && text.contains("CI="));
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn csv_ingest_example() {
    let shap = csv_ingest::run_example().unwrap();
    assert!((shap.reconstructed() - shap.prediction).abs() < 1e-9);
}

#[test]
fn utility_mapping_example() {
    let (price, risk) = utility_mapping::run_example().unwrap();
    assert_eq!(risk.output_index, 1);
    assert!(close(risk.cu, 80.0 / 90.0, 1e-9));
    assert!(price.umin_i >= 0.0 && price.umax_i <= 1.0);
}

#[test]
fn all_examples_run() {
    linear_ciu::run_example().unwrap();
    utility_mapping::run_example().unwrap();
}
