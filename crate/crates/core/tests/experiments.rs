use kpz_core::experiments::{catalog, run, ExperimentConfig};

fn cfg(name: &str, params: &[(&str, &str)]) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(name);
    for (k, v) in params {
        c.set(k, v);
    }
    c
}

#[test]
fn same_seed_same_bytes() {
    let p = [("n", "40"), ("replicas", "8"), ("seed", "9")];
    let a = run(&cfg("lln", &p)).unwrap();
    let b = run(&cfg("lln", &p)).unwrap();
    assert_eq!(a.summary_json(), b.summary_json());
    assert_eq!(a.samples_csv(), b.samples_csv());
    let c = run(&cfg("lln", &[("n", "40"), ("replicas", "8"), ("seed", "10")])).unwrap();
    assert_ne!(a.samples_csv(), c.samples_csv());
}

#[test]
fn effective_parameters_are_recorded() {
    let r = run(&cfg("lln", &[("N", "30"), ("replicas", "4")])).unwrap();
    let p = &r.summary.parameters;
    assert_eq!(p["n"], 30);
    assert_eq!(p["replicas"], 4);
    assert_eq!(p["q"], 0.25);
    assert_eq!(p["tolerance"], 0.02);
    let json: serde_json::Value = serde_json::from_str(&r.summary_json()).unwrap();
    assert_eq!(json["experiment"], "lln");
    assert!(json["verdict"] == "pass" || json["verdict"] == "fail");
}

#[test]
fn ini_round_trip_matches_overrides() {
    let text = "experiment = tail-exponents\n# comment\nn = 30\nx_lo = 1.5\n";
    let a = run(&ExperimentConfig::from_ini(text).unwrap()).unwrap();
    let b = run(&cfg("tail-exponents", &[("n", "30"), ("x-lo", "1.5")])).unwrap();
    assert_eq!(a.summary_json(), b.summary_json());
}

#[test]
fn rejects_bad_input() {
    assert!(run(&cfg("no-such-thing", &[])).is_err());
    assert!(run(&cfg("lln", &[("replicas", "many")])).is_err());
    assert!(run(&cfg("lln", &[("replcas", "3")])).is_err());
    assert!(run(&cfg("lln", &[("q", "1.5"), ("n", "10"), ("replicas", "2")])).is_err());
    assert!(run(&cfg("lln", &[("n", "0")])).is_err());
    assert!(ExperimentConfig::from_ini("[section]\n").is_err());
    assert!(ExperimentConfig::from_ini("just words\n").is_err());
}

#[test]
fn catalog_covers_every_experiment() {
    let names: Vec<_> = catalog().iter().map(|e| e.name).collect();
    for n in [
        "lln",
        "gue-onepoint",
        "flat-goe",
        "exact-vs-mc",
        "tail-exponents",
        "variational-check",
        "tasep-coupling",
        "tasep-corollary",
        "inhomogeneous",
        "png-gibbs",
        "png-vs-lpp",
        "monotone-coupling",
        "midpoint-lemma",
        "slow-decorr",
        "hyp-validate",
    ] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn small_runs_of_each_family() {
    let runs = [
        cfg("tasep-coupling", &[("kinds", "step"), ("replicas", "2000"), ("pairs-step", "0:2")]),
        cfg("tasep-corollary", &[("kinds", "flat,wedge-flat"), ("n", "20"), ("replicas", "30")]),
        cfg("png-gibbs", &[("draws", "500"), ("cap", "20"), ("tolerance", "1")]),
        cfg("slow-decorr", &[("n", "30,60"), ("replicas", "10"), ("tolerance", "1")]),
        cfg("hyp-validate", &[("n", "50"), ("seeds", "5")]),
        cfg("inhomogeneous", &[("n", "30"), ("replicas", "5"), ("setting", "b")]),
        cfg("exact-vs-mc", &[("m", "4"), ("n", "4"), ("samples", "500")]),
    ];
    for c in runs {
        let r = run(&c).unwrap_or_else(|e| panic!("{}: {e}", c.experiment));
        assert!(!r.summary.checks.is_empty(), "{}", c.experiment);
        assert!(r.samples_csv().starts_with("series,index,value\n"));
        assert!(r.tables_csv().starts_with("table,row,column,value\n"));
    }
}

#[test]
fn ordering_experiment_has_no_violations() {
    let r = run(&cfg("inhomogeneous", &[("n", "40"), ("replicas", "10")])).unwrap();
    assert!(r.summary.check("ordering_violations").unwrap().pass);
}
