use std::process::Command;

use atasses_bench::{emit_summary, run_bench, write_csv, Axis, BenchConfig, Row, Scheme, CSV_HEADER};

fn small(schemes: Vec<Scheme>) -> BenchConfig {
    BenchConfig {
        schemes,
        n_list: vec![3, 5],
        t_fracs: vec![0.6],
        k_mults: vec![1],
        trials: 2,
        seed: 9,
        ..BenchConfig::default()
    }
}

#[test]
fn comm_bytes_are_deterministic() {
    let cfg = small(vec![Scheme::Atasses, Scheme::Type2]);
    let a = run_bench(&cfg).unwrap();
    let b = run_bench(&cfg).unwrap();
    assert_eq!(a.len(), 2 * 2 * 2);
    for (x, y) in a.iter().zip(&b) {
        assert!(x.is_ok(), "{x:?}");
        assert_eq!((x.comm_bytes, x.p2p_bytes, x.agg_bytes), (y.comm_bytes, y.p2p_bytes, y.agg_bytes));
        assert!((x.comm_seconds - x.comm_bytes as f64 * 8.0 / 98e6).abs() < 1e-12);
        assert!((x.total_seconds - x.compute_seconds - x.comm_seconds).abs() < 1e-12);
    }
    // Trials of one cell differ only in their inputs, not in byte counts.
    assert_eq!(a[0].comm_bytes, a[1].comm_bytes);
    assert_eq!((a[0].trial, a[1].trial), (0, 1));
}

#[test]
fn csv_layout_and_transcripts() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(vec![Scheme::Replicated, Scheme::Type1]);
    cfg.trials = 1;
    cfg.transcript_dir = Some(dir.path().join("tx"));
    let rows = run_bench(&cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    assert_eq!(lines.count(), rows.len());
    let files = std::fs::read_dir(dir.path().join("tx")).unwrap().count();
    assert_eq!(files, rows.iter().filter(|r| r.is_ok()).count());

    let mut empty = Vec::new();
    write_csv(&[], &mut empty).unwrap();
    assert_eq!(String::from_utf8(empty).unwrap().trim(), CSV_HEADER);
}

#[test]
fn large_n_and_capacity_are_skipped() {
    let mut cfg = small(vec![Scheme::Type2, Scheme::Replicated]);
    cfg.n_list = vec![300, 30];
    cfg.trials = 1;
    cfg.k_mults = vec![1];
    let rows = run_bench(&cfg).unwrap();
    let large: Vec<&Row> = rows.iter().filter(|r| r.n == 300).collect();
    assert_eq!(large.len(), 2);
    assert!(large.iter().all(|r| r.status.starts_with("skipped: N > 200")));
    let rep30 = rows.iter().find(|r| r.n == 30 && r.scheme == "replicated").unwrap();
    assert!(rep30.status.starts_with("skipped: capacity"), "{}", rep30.status);
    let t2 = rows.iter().find(|r| r.n == 30 && r.scheme == "type2").unwrap();
    assert!(t2.is_ok());
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small(vec![Scheme::Type2]);
    cfg.t_fracs = vec![1.5];
    assert!(run_bench(&cfg).is_err());
    let mut cfg = small(vec![Scheme::Type2]);
    cfg.preset = "nope".into();
    assert!(run_bench(&cfg).is_err());
    let mut cfg = small(vec![Scheme::Type2]);
    cfg.trials = 0;
    assert!(run_bench(&cfg).is_err());
}

fn synthetic(scheme: &str, n: usize, k: usize, total: f64, p2p: usize) -> Row {
    Row {
        scheme: scheme.into(),
        n,
        t: n * 7 / 10,
        k,
        trial: 0,
        compute_seconds: total,
        comm_bytes: 0,
        comm_seconds: 0.0,
        total_seconds: total,
        p2p_bytes: p2p,
        agg_bytes: 0,
        status: "ok".into(),
    }
}

#[test]
fn summary_slopes_on_synthetic_data() {
    let mut rows = Vec::new();
    for n in [10usize, 20, 50, 100] {
        rows.push(synthetic("quad", n, 4096, 1e-4 * (n * n) as f64, 10));
    }
    for k in [5usize, 10, 15, 20] {
        rows.push(synthetic("lin", 10, k * 4096, 0.01 * k as f64, 8 * k));
    }
    let s = emit_summary(&rows);
    let quad = s.slopes.iter().find(|f| f.scheme == "quad" && f.axis == Axis::N).unwrap();
    assert!((quad.slope - 2.0).abs() < 0.1, "{}", quad.slope);
    for metric in ["total_seconds", "p2p_bytes"] {
        let lin = s.slopes.iter().find(|f| f.scheme == "lin" && f.axis == Axis::K && f.metric == metric).unwrap();
        assert!((lin.slope - 1.0).abs() < 0.1, "{metric}: {}", lin.slope);
    }
    assert!(s.to_string().contains("slope quad total_seconds vs N at K=4096: 2.000"));
}

#[test]
fn binary_writes_csv_and_rejects_bad_flags() {
    let exe = env!("CARGO_BIN_EXE_atasses-bench");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let status = Command::new(exe)
        .args(["--schemes", "atasses,type2", "--n-list", "3,4", "--t-frac", "0.7", "--k-mults", "1", "--trials", "1"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(String::from_utf8_lossy(&status.stderr).contains("median_total_s"));

    for bad in [&["--t-frac", "0"][..], &["--schemes", "type3"], &["--bandwidth-mbps", "-1"], &["--trials", "0"]] {
        let st = Command::new(exe).args(bad).status().unwrap();
        assert!(!st.success(), "{bad:?} accepted");
    }
}
