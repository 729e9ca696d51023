//! Config parsing: defaults, strictness and round trips.

use dtdvp::config::{parse_config, ExperimentConfig, Format, Mode, Norm};
use dtdvp::error::RunError;
use proptest::prelude::*;

#[test]
fn minimal_config_takes_defaults() {
    let c = parse_config("[run]\nmode = \"exact\"\n").unwrap();
    assert_eq!(c, ExperimentConfig::new(Mode::Exact));
    assert_eq!(c.model.sites, 4);
    assert_eq!(
        (c.model.hopping, c.model.interaction, c.model.chemical_potential, c.model.kappa),
        (1.0, 4.0, -2.0, 1.0)
    );
    assert!(c.model.periodic);
    assert_eq!((c.run.t_final, c.run.dt, c.run.sample_interval), (20.0, 1e-3, 0.05));
    assert_eq!(c.run.seed, 7);
    assert_eq!(c.run.norm, Norm::Frobenius);
    assert_eq!(c.output.format, Format::Csv);
}

#[test]
fn mode_is_required() {
    assert!(matches!(parse_config("[model]\nsites = 2\n"), Err(RunError::Config(_))));
    assert!(matches!(parse_config(""), Err(RunError::Config(_))));
}

#[test]
fn all_modes_parse() {
    for (name, mode) in [
        ("exact", Mode::Exact),
        ("gaussified", Mode::Gaussified),
        ("tdvp", Mode::Tdvp),
        ("compare", Mode::Compare),
        ("verify-theorem1", Mode::VerifyTheorem1),
    ] {
        let c = parse_config(&format!("[run]\nmode = \"{name}\"\n")).unwrap();
        assert_eq!(c.run.mode, mode);
        assert_eq!(mode.name(), name);
    }
}

#[test]
fn duplicate_key_names_key_and_line() {
    let text = "[run]\nmode = \"exact\"\ndt = 0.01\ndt = 0.02\n";
    let msg = parse_config(text).unwrap_err().to_string();
    assert!(msg.contains("dt"), "{msg}");
    assert!(msg.contains("line 4"), "{msg}");
}

#[test]
fn unknown_keys_are_rejected() {
    for text in [
        "[run]\nmode = \"exact\"\nstep = 0.1\n",
        "[run]\nmode = \"exact\"\n[model]\nwidth = 3\n",
        "[run]\nmode = \"exact\"\n[extra]\n",
    ] {
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}

#[test]
fn semantic_errors_are_config_errors() {
    for body in
        ["t_final = -1.0", "dt = 0.0", "sample_interval = 0.0005", "alpha = []", "alpha = [1.5]", "alpha = [-0.1]"]
    {
        let e = parse_config(&format!("[run]\nmode = \"exact\"\n{body}\n")).unwrap_err();
        assert!(matches!(e, RunError::Config(_)), "{body}: {e}");
    }
    for body in ["sites = 1", "sites = 7", "kappa = -1.0"] {
        let e = parse_config(&format!("[run]\nmode = \"exact\"\n[model]\n{body}\n")).unwrap_err();
        assert!(matches!(e, RunError::Config(_)), "{body}: {e}");
    }
    let e = parse_config("[run]\nmode = \"verify-theorem1\"\nverify_samples = 0\n").unwrap_err();
    assert!(matches!(e, RunError::Config(_)));
    let mut c = ExperimentConfig::new(Mode::Exact);
    c.run.seed = u64::MAX;
    assert!(matches!(c.validate(), Err(RunError::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn serialization_round_trips(
        sites in 2usize..=6,
        kappa in 0.0f64..3.0,
        interaction in -5.0f64..5.0,
        steps in 1u32..50,
        seed in 0..=i64::MAX as u64,
        alpha in proptest::collection::vec(0.01f64..0.99, 1..4),
        json in any::<bool>(),
    ) {
        let mut c = ExperimentConfig::new(Mode::Compare);
        c.model.sites = sites;
        c.model.kappa = kappa;
        c.model.interaction = interaction;
        c.run.dt = 0.01;
        c.run.sample_interval = 0.01 * f64::from(steps);
        c.run.t_final = c.run.sample_interval * 2.0;
        c.run.seed = seed;
        c.run.alpha = alpha;
        c.output.format = if json { Format::JsonLines } else { Format::Csv };
        let text = c.to_toml();
        prop_assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }
}
