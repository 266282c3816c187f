//! Snapshot format and end-to-end runs of the `bql` binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;

use bql::snapshot::{read_fields, SnapshotHeader, MAGIC};
use bql::{read_snapshot, write_snapshot, CliError};
use bql_core::data::{random_etaphi, rng_from_seed, w_from_etaphi};
use bql_core::reformulations::{State, StateW};
use bql_core::{Grid, GridSpec};

fn random_w(seed: u64) -> StateW {
    let g = Grid::new(GridSpec::new(16, 8, 6.0, 3.0)).unwrap();
    let mut rng = rng_from_seed(seed);
    let s = random_etaphi(&g, &mut rng, 4.0);
    let w = w_from_etaphi(&s).unwrap();
    // mix representations and make the data genuinely complex
    w.map_fields(|f| f.scaled(Complex64::new(0.3, -1.7)).to_physical())
}

fn bql(dir: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_bql"))
        .current_dir(dir)
        .args(args)
        .env_remove("BQL_THREADS")
        .output()
        .unwrap()
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.bql");
    let w = random_w(11);
    write_snapshot(&w, 0.375, &path).unwrap();
    let (t, back) = read_snapshot::<StateW>(&path, 2.0 / 3.0).unwrap();
    assert_eq!(t, 0.375);
    assert!(w.fields().iter().zip(back.fields()).all(|(a, b)| *a == b));
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes.len(), SnapshotHeader::LEN + 4 * 16 * 8 * 16);
    assert_eq!(&bytes[..8], &MAGIC);
}

#[test]
fn corrupted_magic_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.bql");
    write_snapshot(&random_w(1), 0.0, &path).unwrap();
    let mut bytes = fs::read(&path).unwrap();
    bytes[0] = b'X';
    fs::write(&path, bytes).unwrap();
    let err = read_fields(&path, 2.0 / 3.0).unwrap_err();
    assert!(matches!(err, CliError::Format { .. }), "{err}");
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn payload_must_match_declared_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.bql");
    write_snapshot(&random_w(2), 0.0, &path).unwrap();
    let bytes = fs::read(&path).unwrap();

    let mut more = bytes.clone();
    more[12..16].copy_from_slice(&5u32.to_le_bytes());
    fs::write(&path, &more).unwrap();
    assert!(matches!(
        read_fields(&path, 2.0 / 3.0),
        Err(CliError::Format { .. })
    ));

    fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(
        read_fields(&path, 2.0 / 3.0),
        Err(CliError::Format { .. })
    ));

    fs::write(&path, &bytes[..20]).unwrap();
    assert!(matches!(
        read_fields(&path, 2.0 / 3.0),
        Err(CliError::Format { .. })
    ));
}

#[test]
fn wrong_state_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.bql");
    write_snapshot(&random_w(3), 0.0, &path).unwrap();
    let err = read_snapshot::<bql_core::reformulations::StateEtaPhi>(&path, 2.0 / 3.0).unwrap_err();
    assert!(err.to_string().contains("fields"));
}

#[test]
fn zero_data_simulation_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bql(
        dir.path(),
        &[
            "simulate",
            "--data",
            "zero",
            "--nx",
            "16",
            "--lx",
            "8",
            "--t_final",
            "0.1",
            "--dt",
            "0.025",
            "--out",
            "run",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = dir.path().join("run");
    for i in 0..=4 {
        let (_, w) =
            read_snapshot::<StateW>(&run.join(format!("snap_{i:06}.bql")), 2.0 / 3.0).unwrap();
        assert!(w
            .fields()
            .iter()
            .all(|f| f.data().iter().all(|z| *z == Complex64::new(0.0, 0.0))));
    }
    let monitors = fs::read_to_string(run.join("monitors.csv")).unwrap();
    let mut lines = monitors.lines();
    assert!(lines.next().unwrap().starts_with("# config-hash: "));
    assert_eq!(
        lines.next().unwrap(),
        "step,time,curl_u,curl_v,reality_defect,conjugation_defect,l2_norm"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').skip(2).all(|c| c == "0")));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# small random run\nnx = 16\nlx = 8\ndata = random\namplitude = 0.05\nseed = 7\nt_final = 0.1\ndt = 0.02\n",
    )
    .unwrap();
    for out in ["a", "b"] {
        let o = bql(
            dir.path(),
            &["simulate", "--config", "run.cfg", "--out", out],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let o = bql(
            dir.path(),
            &[
                "verify-estimates",
                "--config",
                "run.cfg",
                "--family",
                "leibniz",
                "--samples",
                "3",
                "--out",
                out,
            ],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs");
    }
    let o = bql(
        dir.path(),
        &[
            "simulate", "--config", "run.cfg", "--seed", "8", "--out", "c",
        ],
    );
    assert!(o.status.success());
    assert_ne!(
        fs::read(dir.path().join("a/snap_000005.bql")).unwrap(),
        fs::read(dir.path().join("c/snap_000005.bql")).unwrap()
    );
}

#[test]
fn picard_and_norms_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = bql(
        dir.path(),
        &[
            "picard",
            "--nx",
            "16",
            "--lx",
            "8",
            "--width",
            "1",
            "--t_final",
            "0.1",
            "--nt",
            "10",
            "--save_every",
            "2",
            "--out",
            "p",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("p/picard.csv")).unwrap();
    assert!(report
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("iteration,successive_diff"));
    assert!(report.lines().last().unwrap().contains(",true,"));
    let o = bql(dir.path(), &["norms", "--trajectory", "p", "--out", "n"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let norms = fs::read_to_string(dir.path().join("n/norms.csv")).unwrap();
    let value = |name: &str| -> f64 {
        norms
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{name},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(value("final_time"), 0.1);
    assert!(value("omega_T") >= value("omega1") && value("omega1") > 0.0);
}

#[test]
fn decay_family_reports_the_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = bql(
        dir.path(),
        &["verify-estimates", "--family", "decay", "--beta", "0"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    let header: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "fitted_slope").unwrap();
    for row in csv.lines().skip(2) {
        let slope: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!((slope + 2.0 / 3.0).abs() < 0.02, "slope {slope}");
    }
}

#[test]
fn exit_codes_follow_the_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bql(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["simulate", "--dt", "0.3"]), 2);
    assert_eq!(code(&["simulate", "--bogus", "1"]), 2);
    assert_eq!(code(&["verify-estimates"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["simulate", "--config", "missing.cfg"]), 4);
    assert_eq!(
        code(&["simulate", "--data", "snapshot", "--snapshot", "nope.bql"]),
        4
    );
    // large data blows up
    assert_eq!(
        code(&[
            "simulate",
            "--nx",
            "16",
            "--lx",
            "8",
            "--amplitude",
            "300",
            "--width",
            "1",
            "--t_final",
            "2",
            "--dt",
            "0.05"
        ]),
        3
    );
    let err = String::from_utf8(bql(dir.path(), &["simulate", "--nx", "9"]).stderr).unwrap();
    assert!(err.contains("nx"));
}

#[test]
fn thread_count_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bql"))
        .current_dir(dir.path())
        .args([
            "simulate",
            "--data",
            "zero",
            "--nx",
            "8",
            "--lx",
            "4",
            "--t_final",
            "0.1",
            "--dt",
            "0.1",
        ])
        .env("BQL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("threads"));
}
