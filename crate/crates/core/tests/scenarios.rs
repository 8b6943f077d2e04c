//! Scenario runs at reduced size, through the config parser.

use skyrme_core::harness::{emit_report, parse_config, run_scenario};

#[test]
fn momentum_identity_converges_under_refinement() {
    let config = parse_config(
        r#"
scenario = "identity-verification"
[data]
velocity = "outgoing"
[grid]
cells = 1024
r_max = 24.0
[integrator]
t_end = 6.5
observer_stride = 4
[identity]
checks = [{ kind = "skyrme-momentum", weight = { type = "power-law", n = 4.0 } }]
[thresholds]
identity_window = [1.0, 6.0]
"#,
        &[],
    )
    .unwrap();
    let report = run_scenario(&config).unwrap();
    let a = report.assertion("convergence_skyrme_momentum_r4_level0").unwrap();
    assert!(a.passed, "{}", a.describe());
    assert!((3.5..=4.5).contains(&a.value));
}

#[test]
fn printed_momentum_identity_does_not_converge() {
    let text = r#"
scenario = "identity-verification"
[data]
velocity = "outgoing"
[grid]
cells = 1024
r_max = 24.0
[integrator]
t_end = 6.5
observer_stride = 4
[virial]
lemma_form = "as-printed"
[identity]
checks = [{ kind = "skyrme-momentum", weight = { type = "power-law", n = 4.0 } }]
[thresholds]
identity_window = [1.0, 6.0]
"#;
    let report = run_scenario(&parse_config(text, &[]).unwrap()).unwrap();
    assert!(!report.passed());
    let factor = report.metric("max_residual_skyrme_momentum_r4_factor0").unwrap();
    assert!(factor < 1.5, "{factor}");
}

#[test]
fn growth_slope_for_small_outgoing_data() {
    let config = parse_config(
        r#"
scenario = "weighted-growth"
[data]
amplitude = 0.01
velocity = "outgoing"
[grid]
cells = 1536
r_max = 60.0
[integrator]
t_end = 40.0
observer_stride = 16
[weights]
growth_exponents = [3.0]
"#,
        &[],
    )
    .unwrap();
    let report = run_scenario(&config).unwrap();
    let slope = report.metric("slope_r3").unwrap();
    assert!(slope <= 1.3 && slope > 0.5, "{slope}");
    assert!(report.passed());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let config = parse_config(
        "scenario = \"virial-sign\"\n[data]\namplitude = 0.005\n[grid]\ncells = 512\nr_max = 20.0\n[integrator]\nt_end = 4.0\nobserver_stride = 8\n",
        &[],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = emit_report(&run_scenario(&config).unwrap(), &dir.path().join("a")).unwrap();
    let b = emit_report(&run_scenario(&config).unwrap(), &dir.path().join("b")).unwrap();
    assert_eq!(std::fs::read(&a.series).unwrap(), std::fs::read(&b.series).unwrap());
    assert_eq!(std::fs::read(&a.summary).unwrap(), std::fs::read(&b.summary).unwrap());
    let header = std::fs::read_to_string(&a.series).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("t,energy,weighted_energy_r5,"), "{header}");
    assert!(header.ends_with(",linf_u"), "{header}");
    // every threshold in force is echoed in the summary
    let summary: toml::Table = toml::from_str(&std::fs::read_to_string(&a.summary).unwrap()).unwrap();
    assert!(summary["config"]["thresholds"].get("sign_tolerance").is_some());
    for a in summary["assertion"].as_array().unwrap() {
        assert!(a.get("threshold").is_some() && a.get("statement").is_some());
    }
}
