// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn corelab(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_corelab"));
    cmd.args(args)
        .env_remove("CORELAB_OUTPUT_DIR")
        .env("CORELAB_THREADS", "2");
    if let Some(d) = out_dir {
        cmd.env("CORELAB_OUTPUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn sample_kcore_rank_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.edges");
    let o = corelab(
        &[
            "sample", "--model", "gnp", "--n", "400", "--lambda", "6", "--seed", "3",
        ],
        None,
    );
    assert!(o.status.success());
    std::fs::write(&g, &o.stdout).unwrap();
    let again = corelab(
        &[
            "sample", "--model", "gnp", "--n", "400", "--lambda", "6", "--seed", "3",
        ],
        None,
    );
    assert_eq!(o.stdout, again.stdout);

    let g = g.to_str().unwrap();
    let summary = json(&corelab(
        &["kcore", "--input", g, "--k", "3", "--summary"],
        None,
    ));
    let size = summary["core_size"].as_u64().unwrap();
    assert!(size > 0 && size < 400);
    assert_eq!(summary["vertices"].as_array().unwrap().len() as u64, size);

    let core = corelab(&["kcore", "--input", g, "--k", "3"], None);
    let header = stdout(&core).lines().next().unwrap().to_owned();
    assert_eq!(header, format!("{size} {}", summary["core_edges"]));

    for field in ["gf2", "modp", "rational"] {
        let cert = json(&corelab(&["rank", "--input", g, "--field", field], None));
        assert_eq!(cert["rows"], 400);
        assert!(cert["rank"].as_u64().unwrap() <= 400);
    }
    // Full rank mod p certifies full rational rank; anything less above the
    // fraction-free cap is only a lower bound.
    let cert = json(&corelab(
        &["rank", "--input", g, "--field", "rational"],
        None,
    ));
    let expected = if cert["rank"] == 400 {
        "exact"
    } else {
        "lower-bound"
    };
    assert_eq!(cert["certainty"], expected);
}

#[test]
fn every_sampling_model_emits_an_edge_list() {
    for args in [
        vec!["--model", "gnm", "--n", "50", "--m", "80"],
        vec!["--model", "config", "--n", "6", "--degrees", "3,3,3,3,3,3"],
        vec!["--model", "config", "--n", "200", "--m", "400", "--k", "3"],
        vec!["--model", "core", "--n", "300"],
    ] {
        let mut full = vec!["sample"];
        full.extend(args);
        let o = corelab(&full, None);
        assert!(
            o.status.success(),
            "{full:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = stdout(&o);
        let header: Vec<usize> = text
            .lines()
            .next()
            .unwrap()
            .split(' ')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(text.lines().count(), header[1] + 1);
    }
}

#[test]
fn small_rank_is_exact_through_fraction_free_elimination() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("c4.edges");
    std::fs::write(&g, "4 4\n0 1\n0 3\n1 2\n2 3\n").unwrap();
    let cert = json(&corelab(
        &[
            "rank",
            "--input",
            g.to_str().unwrap(),
            "--field",
            "rational",
        ],
        None,
    ));
    assert_eq!(cert["rank"], 2);
    assert_eq!(cert["certainty"], "exact");
    assert_eq!(cert["method"], "fraction-free");
}

#[test]
fn theory_check_and_anticonc_outputs() {
    let t = json(&corelab(
        &[
            "theory", "--k", "3", "--c", "4", "--alpha", "0.05", "--Delta", "10",
        ],
        None,
    ));
    for key in [
        "lambda",
        "beta",
        "gamma",
        "rho",
        "delta",
        "delta_prime",
        "mu",
        "max_m_mu",
        "argmax_m_mu",
    ] {
        assert!(t.get(key).is_some(), "{key}");
    }
    assert_eq!(t["sup_within_beta_16"], true);
    assert_eq!(t["diff_within_beta_32"], true);

    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("k4.edges");
    std::fs::write(&g, "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n").unwrap();
    let g = g.to_str().unwrap();
    let good = json(&corelab(&["check", "--which", "good", "--input", g], None));
    assert_eq!(good["min_degree"], 3);
    let joined = json(&corelab(
        &["check", "--which", "joined", "--input", g, "--r", "3"],
        None,
    ));
    assert_eq!(joined["count"], 16);
    for which in ["ukp", "exp1", "exp2"] {
        json(&corelab(&["check", "--which", which, "--input", g], None));
    }

    let o = corelab(&["anticonc", "--mode", "linear", "--d", "4,8"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,atom,normalization,ci_lo,ci_hi,exact");
    assert_eq!(lines.len(), 3);
    let o = corelab(
        &["anticonc", "--mode", "quad", "--d", "3", "--trials", "2000"],
        None,
    );
    assert!(o.status.success());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "3 1\n0 7\n").unwrap();
    for args in [
        vec!["frobnicate"],
        vec!["sample", "--model", "gnm", "--n", "5"],
        vec!["rank", "--input", "/nonexistent/graph", "--field", "gf2"],
        vec!["rank", "--input", bad.to_str().unwrap(), "--field", "gf2"],
        vec!["theory", "--c", "4", "--alpha", "0.05", "--Delta", "60"],
        vec!["experiment", "run", "/nonexistent/config"],
    ] {
        let o = corelab(&args, None);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(corelab(&["--help"], None).status.code(), Some(0));
}

#[test]
fn experiment_run_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("walk.cfg");
    std::fs::write(
        &cfg,
        "[experiment]\nname = random-walk\nseed = 5\ntrials = 2\n[walk]\np = 0.01\nwalks = 2000\n",
    )
    .unwrap();
    let out = dir.path().join("results");
    let o = corelab(&["experiment", "run", cfg.to_str().unwrap()], Some(&out));
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("PASS within_bound_fraction"));

    let rep = corelab(&["experiment", "report", out.to_str().unwrap()], None);
    assert!(rep.status.success());
    let table = stdout(&rep).lines().next().unwrap().to_owned();
    let csv = std::fs::read_to_string(table).unwrap();
    assert!(csv.starts_with("x_axis,x,metric,count,mean,ci_lo,ci_hi\n"));
    assert!(csv.contains("p,0.01,within_bound,2,1,"));
}

#[test]
fn failed_thresholds_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("corank.cfg");
    // A negative slack makes the core bound unattainable.
    std::fs::write(
        &cfg,
        "[experiment]\nname = corank\nseed = 1\ntrials = 2\n[graph]\nn = 200\n[acceptance]\nbls_slack = -1\n",
    )
    .unwrap();
    let o = corelab(
        &["experiment", "run", cfg.to_str().unwrap()],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL core_bls_pass_fraction"));
}

#[test]
fn zero_trials_succeed_and_reports_flag_corrupt_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    std::fs::write(
        &cfg,
        "[experiment]\nname = degree-law\nseed = 1\ntrials = 0\n",
    )
    .unwrap();
    let o = corelab(
        &["experiment", "run", cfg.to_str().unwrap()],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0));

    let records = dir.path().join("manual");
    std::fs::create_dir_all(&records).unwrap();
    std::fs::write(
        records.join("records.jsonl"),
        "{\"experiment\":\"boost\",\"config_hash\":\"00\",\"trial\":0,\"seed\":1,\"stream_id\":2,\"metrics\":{\"success\":1},\"tags\":{}}\ngarbage\n",
    )
    .unwrap();
    let rep = corelab(&["experiment", "report", records.to_str().unwrap()], None);
    assert!(rep.status.success());
    assert!(String::from_utf8_lossy(&rep.stderr).contains("records.jsonl:2"));
    let table = std::fs::read_to_string(stdout(&rep).lines().next().unwrap()).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("all,all,success,1,1,"), "{}", rows[0]);
}
