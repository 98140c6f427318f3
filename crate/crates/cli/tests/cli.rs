use std::path::Path;
use std::process::{Command, Output};

use plopt_cli::config::{ExperimentConfig, ProblemConfig, SolverConfig};
use proptest::prelude::*;

fn plopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plopt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const THEOREM2_RUN: &str = r#"
seed = 5
target = 1e-6
topology = "ring:8"

[problem]
preset = "theorem2"

[[solver]]
name = "cgd"
eta = 0.1
iters = 400

[[solver]]
name = "drone"
eta = 0.02
iters = 4000
"#;

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(plopt(&[]).status.code(), Some(2));
    assert_eq!(plopt(&["spectral", "star:5"]).status.code(), Some(2));
    assert_eq!(plopt(&["check-instance", "no-such-preset"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &THEOREM2_RUN.replace("theorem2", "nope"));
    assert_eq!(plopt(&["run", "--config", &cfg]).status.code(), Some(2));
    let o = plopt(&["plot", "a.csv", "--x-axis", "gap", "--out", "x.svg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spectral_reports_gap() {
    let o = plopt(&["spectral", "linear:2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let gamma: f64 = text.lines().find_map(|l| l.strip_prefix("gamma = ")).unwrap().parse().unwrap();
    assert!((gamma - 1.0).abs() <= 1e-12, "{text}");
    assert_eq!(text.matches("PASS").count(), 5);
}

#[test]
fn check_instance_passes_and_negative_control_fails() {
    let ok = plopt(&["check-instance", "ifo-hard"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = plopt(&["check-instance", "theorem2", "--set", "declared_l=5"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.contains("FAIL mean-squared smoothness"), "{text}");
}

#[test]
fn run_is_deterministic_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), THEOREM2_RUN);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = plopt(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.contains("cgd: gap <= 1e-6 at iter"), "{text}");
    }
    for name in ["cgd.csv", "drone.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap());
        assert!(x.starts_with(b"iter,lfo_total,comm_rounds,time_units,gap,grad_norm,consensus_err,U,V,C,Phi\n"));
    }
    let other = dir.path().join("c");
    plopt(&["run", "--config", &cfg, "--out", other.to_str().unwrap(), "--seed", "6"]);
    assert_ne!(std::fs::read(a.join("drone.csv")).unwrap(), std::fs::read(other.join("drone.csv")).unwrap());

    let svg = dir.path().join("fig.svg");
    let o = plopt(&[
        "plot",
        a.join("cgd.csv").to_str().unwrap(),
        a.join("drone.csv").to_str().unwrap(),
        "--x-axis",
        "lfo_total",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<polyline").count(), 2);
    assert!(text.contains(">cgd<") && text.contains(">drone<") && text.contains(">lfo_total<"));
}

#[test]
fn empty_or_mismatched_csv_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "iter,lfo_total,comm_rounds,time_units,gap,grad_norm,consensus_err,U,V,C,Phi\n").unwrap();
    let wrong = dir.path().join("wrong.csv");
    std::fs::write(&wrong, "a,b\n1,2\n").unwrap();
    for csv in [&empty, &wrong] {
        let svg = dir.path().join("out.svg");
        let o = plopt(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1));
        assert!(!svg.exists());
    }
}

#[test]
fn divergence_is_a_run_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = THEOREM2_RUN.replace("eta = 0.1", "eta = 10.0");
    let cfg = write_config(dir.path(), &text);
    let o = plopt(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("diverged"));
}

fn opt<T: std::fmt::Debug + Clone + 'static>(s: impl Strategy<Value = T> + 'static) -> BoxedStrategy<Option<T>> {
    prop_oneof![Just(None), s.prop_map(Some)].boxed()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![1e-12..1e12f64, -1e6..1e6f64, Just(0.1), Just(1.0 / 3.0)]
}

prop_compose! {
    fn solver()(
        name in prop_oneof![Just("gd"), Just("cgd"), Just("dgd-gt"), Just("drone")],
        eta in opt(1e-9..1.0f64),
        iters in opt(0usize..100_000),
        k in opt(0usize..1000),
        p in opt(0.001..1.0f64),
        b in opt(1usize..64),
        auto in any::<bool>(),
    ) -> SolverConfig {
        SolverConfig { name: name.into(), label: None, eta, iters, k, p, b, auto }
    }
}

prop_compose! {
    fn config()(
        seed in any::<u64>(),
        tau in 0.0..100.0f64,
        target in 1e-12..1.0f64,
        stop_at_target in any::<bool>(),
        topology in opt(prop_oneof![Just("linear:32".to_string()), Just("gap:0.01".to_string())]),
        n in opt(1usize..100),
        l in opt(finite()),
        noise in opt(finite()),
        declared_l in opt(finite()),
        data_seed in opt(any::<u64>()),
        solvers in proptest::collection::vec(solver(), 1..4),
    ) -> ExperimentConfig {
        let solvers = solvers
            .into_iter()
            .enumerate()
            .map(|(i, s)| SolverConfig { label: Some(format!("{}-{i}", s.name)), ..s })
            .collect();
        ExperimentConfig {
            seed,
            tau,
            target,
            out: "runs/x".into(),
            stop_at_target,
            topology,
            problem: ProblemConfig { preset: "linreg-synth".into(), n, l, noise, declared_l, data_seed, ..Default::default() },
            solvers,
        }
    }
}

proptest! {
    #[test]
    fn config_round_trip(cfg in config()) {
        let text = cfg.to_toml();
        let parsed = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(ExperimentConfig::parse(&parsed.to_toml()).unwrap(), cfg);
    }
}
