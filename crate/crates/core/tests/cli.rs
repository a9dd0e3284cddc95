use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evidentsel"));
    cmd.args(args).env_remove("EVIDENTSEL_SEED");
    if let Some(s) = seed {
        cmd.env("EVIDENTSEL_SEED", s);
    }
    let out = cmd.output().expect("spawn evidentsel");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn signal_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        &[
            "gen",
            "--kind",
            "boxcar",
            "--n",
            "256",
            "--snr",
            "5",
            "--seed",
            "3",
            "--out",
            p(d),
        ],
        None,
    );
    let data = d.join("data.csv");
    assert!(d.join("truth.csv").exists() && d.join("data.evf").exists());

    let traj = d.join("traj.csv");
    let sel = stdout(&run(&["select", "--data", p(&data), "--trajectory", p(&traj)], None));
    let lambda = field(&sel, "lambda");
    assert!(lambda > 0.0);
    assert!(std::fs::read_to_string(&traj)
        .unwrap()
        .starts_with("k,sigma_sq,eta_sq,lambda,solution_change"));

    let gen = stdout(&run(
        &["select", "--data", p(&data), "--mode", "general", "--probes", "64"],
        None,
    ));
    assert!((field(&gen, "lambda") / lambda - 1.0).abs() < 0.2);

    let u2 = d.join("u2.csv");
    run(
        &["solve", "--data", p(&data), "--reg", "l2", "--auto", "--out", p(&u2)],
        None,
    );
    let u1 = d.join("u1.evf");
    let l1 = stdout(&run(
        &["solve", "--data", p(&data), "--reg", "l1", "--auto", "--out", p(&u1)],
        None,
    ));
    assert!(field(&l1, "lambda1") > 0.0);
    let fixed = d.join("fixed.csv");
    run(
        &["solve", "--data", p(&data), "--lambda", "2.5", "--out", p(&fixed)],
        None,
    );
    assert_eq!(std::fs::read_to_string(&fixed).unwrap().lines().count(), 257);

    let up = stdout(&run(&["upre", "--data", p(&data), "--sigma", "0.1"], None));
    assert!(field(&up, "lambda") > 0.0);

    let scan = d.join("scan.csv");
    let fp = stdout(&run(
        &["fixpoint", "--data", p(&data), "--order", "2", "--out", p(&scan)],
        None,
    ));
    assert!(fp.contains("fixed point lambda"));
    assert!(std::fs::read_to_string(&scan).unwrap().starts_with("lambda,f"));
}

#[test]
fn image_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(
        &[
            "gen",
            "--kind",
            "phantom",
            "--n",
            "64",
            "--snr",
            "20",
            "--psf-width",
            "1.0",
            "--out",
            p(d),
        ],
        None,
    );
    let data = d.join("data.pgm");
    assert!(data.exists());
    let out = d.join("recon.pgm");
    let s = stdout(&run(
        &[
            "solve",
            "--data",
            p(&data),
            "--operator",
            "blur",
            "--psf-width",
            "1.0",
            "--auto",
            "--out",
            p(&out),
        ],
        None,
    ));
    assert!(field(&s, "lambda") > 0.0);
    assert!(out.exists());
}

#[test]
fn bench_is_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("bench.cfg");
    std::fs::write(
        &cfg,
        "# small suite\nn = 64\ntrials = 3\noperator = denoise\nmethod = spectral\nseed = 5\nupre = true\n",
    )
    .unwrap();
    let a = d.join("a.csv");
    let b = d.join("b.csv");
    let c = d.join("c.csv");
    run(&["bench", "--config", p(&cfg), "--out", p(&a)], None);
    run(&["bench", "--config", p(&cfg), "--threads", "2", "--out", p(&b)], None);
    run(&["bench", "--config", p(&cfg), "--out", p(&c)], Some("6"));
    let (ra, rb, rc) = (
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        std::fs::read(&c).unwrap(),
    );
    assert_eq!(ra, rb);
    assert_ne!(ra, rc);
    assert_eq!(String::from_utf8(ra).unwrap().lines().count(), 1 + 4 * 3);
}

#[test]
fn bench_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n = 64\nbogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_evidentsel"))
        .args(["bench", "--config", cfg.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn env_seed_drives_generation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (a, b) = (d.join("a"), d.join("b"));
    run(&["gen", "--kind", "hat", "--n", "32", "--out", p(&a)], Some("9"));
    run(
        &["gen", "--kind", "hat", "--n", "32", "--seed", "9", "--out", p(&b)],
        None,
    );
    assert_eq!(
        std::fs::read(a.join("data.csv")).unwrap(),
        std::fs::read(b.join("data.csv")).unwrap()
    );
}
