//! End-to-end runs of the `subdiff` binary.

use std::path::Path;
use std::process::{Command, Output};

use subdiff_cli::output::read_table;

fn subdiff(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subdiff"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn example_writes_outputs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = subdiff(&["example", "ex2a", "--out", out.to_str().unwrap()], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("wall_time ="));
        let g = read_table(&out.join("g_rec.csv")).unwrap();
        assert_eq!(g.headers, ["t", "g_true", "g_rec"]);
        assert_eq!(g.column("t").unwrap().len(), 51);
        let r = read_table(&out.join("residuals.csv")).unwrap();
        assert_eq!(r.headers, ["iteration", "residual", "objective", "gradient"]);
        assert!(out.join("observation.csv").exists());
        let bytes = std::fs::read(out.join("g_rec.csv")).unwrap();
        assert!(!bytes.contains(&b'\r'));
        reports.push((bytes, std::fs::read_to_string(out.join("report.txt")).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn seed_changes_the_noise() {
    let dir = tempfile::tempdir().unwrap();
    let read = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = subdiff(&["example", "ex2b", "--seed", seed, "--out", out.to_str().unwrap()], dir.path());
        assert!(o.status.success());
        read_table(&out.join("observation.csv")).unwrap().column("noisy").unwrap().to_vec()
    };
    assert_ne!(read("s1", "1"), read("s2", "2"));
}

#[test]
fn custom_inversion_requires_every_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let o = subdiff(&["invert", "--alpha", "0.5", "--q", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("must set"));

    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "alpha = [0.7, 0.3]\nq = [1.0, 0.5]\nt_end = 1.0\nsteps = 30\ncells = 30\nomega = [[0.3, 0.5]]\n\
         lambda = 1e-6\nepsilon = 1e-3\nmax_iters = 50\nseed = 9\ndelta = 0.0\ng_true = \"hat\"\n",
    )
    .unwrap();
    let out = dir.path().join("custom");
    let o = subdiff(
        &["invert", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("alpha = 0.7,0.3"), "{s}");
    assert!(s.contains("rel_error ="));
}

#[test]
fn bad_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(subdiff(&["example", "ex9"], dir.path()).status.code(), Some(2));
    assert_eq!(subdiff(&["forward", "--alpha", "1.2"], dir.path()).status.code(), Some(2));
    assert_eq!(subdiff(&["forward", "--alpha", "0.5,0.3", "--q", "1"], dir.path()).status.code(), Some(2));
    let cfg = dir.path().join("typo.toml");
    std::fs::write(&cfg, "alfa = [0.5]\n").unwrap();
    assert_eq!(subdiff(&["forward", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    assert_eq!(subdiff(&["forward", "--config", "missing.toml"], dir.path()).status.code(), Some(5));
    assert_eq!(subdiff(&["verify", "slow"], dir.path()).status.code(), Some(2));
}

#[test]
fn forward_and_kernel_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fwd");
    let o = subdiff(
        &["forward", "--alpha", "0.6,0.2", "--q", "1,0.5", "--steps", "20", "--cells", "10", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = read_table(&out.join("field.csv")).unwrap();
    assert_eq!(f.headers, ["t", "x", "u_l1", "u_spectral"]);
    assert_eq!(f.column("t").unwrap().len(), 21 * 11);
    assert_eq!(read_table(&out.join("observation.csv")).unwrap().headers, ["t", "l1", "spectral"]);

    let o = subdiff(&["kernel", "--alpha", "0.5", "--q", "1", "--out", out.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let k = read_table(&out.join("kernel.csv")).unwrap();
    assert_eq!(k.headers.len(), 41);
    assert_eq!(k.column("t").unwrap().len(), 40);
    let text = std::fs::read_to_string(out.join("kernel.csv")).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# min,"));
}

#[test]
fn verify_with_inadmissible_contour_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "theta0 = 3.0\n").unwrap();
    let o = subdiff(&["verify", "quick", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL subordination identity: aborted"));
}
