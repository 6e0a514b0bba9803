//! Sweep, fit, CSV, SVG and command-line behaviour.

use paley_sos::harness::*;
use proptest::prelude::*;
use std::process::Command;
use std::time::Duration;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_paley-sos"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("paley-sos-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn omega_sweep_values_and_order() {
    let out = run_sweep(Quantity::Omega, &[17, 5, 13], SweepOptions { jobs: 2, ..Default::default() }).unwrap();
    let got: Vec<(u64, f64)> = out.records.iter().map(|r| (r.p, r.value)).collect();
    assert_eq!(got, vec![(5, 2.0), (13, 3.0), (17, 3.0)]);
    assert!(out.records.iter().all(|r| r.status == Status::Ok && r.quantity == "omega"));
}

#[test]
fn sweeps_are_deterministic_across_job_counts() {
    let primes = [13u64, 17, 29];
    let a = run_sweep(Quantity::Fk4, &primes, SweepOptions { jobs: 1, ..Default::default() }).unwrap();
    let b = run_sweep(Quantity::Fk4, &primes, SweepOptions { jobs: 3, ..Default::default() }).unwrap();
    let strip = |o: &SweepOutput| o.records.iter().map(|r| (r.p, r.value.to_bits(), r.status)).collect::<Vec<_>>();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn timeouts_become_capped_rows() {
    let out = run_sweep(Quantity::Sos4, &[41], SweepOptions { jobs: 1, timeout: Duration::from_millis(1) }).unwrap();
    assert_eq!(out.records[0].status, Status::Capped);
    assert!(out.records[0].value.is_finite());
    assert!(fit_power_law(&out.records).is_err());
}

#[test]
fn failures_become_failed_rows() {
    let out = run_sweep(Quantity::Sos4, &[73], SweepOptions::default()).unwrap();
    assert_eq!(out.records[0].status, Status::Failed);
}

#[test]
fn csv_roundtrip() {
    let path = tmp("roundtrip.csv");
    let out = run_sweep(Quantity::Sos2, &[13, 17, 29], SweepOptions::default()).unwrap();
    write_records(&path, &out.records).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,quantity,value,runtime_seconds,status\n"));
    let back = read_records(&path).unwrap();
    assert_eq!(back, out.records);
    for r in &back {
        assert!((r.value - (r.p as f64).sqrt()).abs() < 1e-3);
    }
}

#[test]
fn quantity_grammar() {
    assert!("restricted:T421:2:*".parse::<Quantity>().is_ok());
    assert!("restricted:diamond:0:0".parse::<Quantity>().is_err());
    assert!("restricted:T999:0:0".parse::<Quantity>().is_err());
    assert!("restricted:T421:0".parse::<Quantity>().is_err());
    for s in ["field", "charsums", "graph", "graphmx", "blockcirc", "fk", "sdp", "all"] {
        assert_eq!(s.parse::<Suite>().unwrap().to_string(), s);
    }
}

#[test]
fn svg_from_three_series() {
    let series = vec![
        ("omega".to_string(), vec![(13.0, 3.0), (17.0, 3.0), (29.0, 4.0), (37.0, 4.0)]),
        ("fk4".to_string(), vec![(13.0, 3.0), (17.0, 3.0), (29.0, 4.0038), (37.0, 3.558)]),
        ("sos4".to_string(), vec![(13.0, 3.0), (17.0, 3.0), (29.0, 4.004), (37.0, 4.02)]),
    ];
    let svg = render_svg(&series).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"marker\"").count(), 12);
    assert_eq!(svg.matches("class=\"fit\"").count(), 3);
    assert_eq!(svg.matches("class=\"legend\"").count(), 3);
}

#[test]
fn plot_rejects_empty_csv() {
    let path = tmp("empty.csv");
    std::fs::write(&path, "p,quantity,value,runtime_seconds,status\n").unwrap();
    assert!(emit_plot(&[path.as_path()], &tmp("empty.svg")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_is_invariant_to_order_and_scaling(
        pts in prop::collection::vec((5.0f64..500.0, 0.1f64..100.0), 3..12),
        lambda in 0.01f64..100.0,
        seed in any::<u64>(),
    ) {
        let mut xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        prop_assume!(xs.len() >= 3 && xs.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let f = fit_points(&pts).unwrap();
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        for i in 0..n {
            let j = ((seed >> (i % 32)) as usize + i * 7) % n;
            shuffled.swap(i, j);
        }
        let g = fit_points(&shuffled).unwrap();
        prop_assert!((f.b - g.b).abs() < 1e-12);
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, lambda * y)).collect();
        let h = fit_points(&scaled).unwrap();
        prop_assert!((f.b - h.b).abs() < 1e-12);
        prop_assert!((h.a / f.a - lambda).abs() < 1e-9 * lambda);
        prop_assert!((0.0..=1.0).contains(&f.r_squared));
    }
}

#[test]
fn cli_exit_codes() {
    let ok = bin().args(["verify", "--suite", "field", "--primes", "13,17"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS field p=13"));
    let empty = bin().args(["verify", "--suite", "field", "--p-min", "4", "--p-max", "4"]).output().unwrap();
    assert_eq!(empty.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("empty prime range"));
    for args in [
        vec!["sweep", "--quantity", "bogus", "--p", "13"],
        vec!["verify", "--p", "7"],
        vec!["verify", "--p", "15"],
        vec!["frobnicate"],
        vec!["verify", "--suite", "nope"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn cli_sweep_fit_plot_pipeline() {
    let csv = tmp("omega.csv");
    let trace = tmp("trace.csv");
    let svg = tmp("plot.svg");
    let s = bin()
        .args(["sweep", "--quantity", "omega", "--primes", "5,13,17,29", "--out"])
        .arg(&csv)
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(0));
    let s2 = tmp("sos2.csv");
    let st = bin()
        .args(["sweep", "--quantity", "sos2", "--p-max", "29", "--jobs", "2", "--out"])
        .arg(&s2)
        .arg("--trace")
        .arg(&trace)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let tr = std::fs::read_to_string(&trace).unwrap();
    assert!(tr.starts_with("p,iteration,primal_residual,dual_residual,gap,objective,rho\n"));
    let fit = bin().arg("fit").arg(&s2).output().unwrap();
    assert_eq!(fit.status.code(), Some(0));
    let text = String::from_utf8_lossy(&fit.stdout);
    let row = text.lines().find(|l| l.starts_with("sos2,")).unwrap();
    let b: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((b - 0.5).abs() < 1e-3);
    let plot = bin().arg("plot").arg(&csv).arg(&s2).arg("--out").arg(&svg).status().unwrap();
    assert_eq!(plot.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("class=\"marker\""));
    let bounds = bin().args(["bounds", "--p", "13"]).output().unwrap();
    let text = String::from_utf8_lossy(&bounds.stdout);
    for q in ["omega", "hoffman", "hansen_podolskii", "sos2", "fk4"] {
        assert!(text.contains(&format!("13,{q},")), "{q}");
    }
}

#[test]
fn seed_env_does_not_change_values_beyond_tolerance() {
    let a = bin().args(["sweep", "--quantity", "t441norm", "--p", "29"]).output().unwrap();
    let b = bin().env("PALEY_SOS_SEED", "7").args(["sweep", "--quantity", "restricted:T441:*:*", "--p", "29"]).output().unwrap();
    let val = |o: &std::process::Output| -> f64 {
        String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap()
    };
    assert!((val(&a) - val(&b)).abs() < 1e-6 * val(&a));
}
