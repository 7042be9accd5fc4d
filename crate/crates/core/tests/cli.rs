use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_twistrad");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Rows of a CSV body, skipping header and `#` lines.
fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

const EDGE: &str = "[setup]\nlength = 30\n[beam]\nb0 = 1.14\nell_i = 1\n[theta]\ncount = 101\n";

#[test]
fn rate_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "edge.cfg", EDGE);
    let a = run(&["rate", "--config", &cfg, "--dipole"]);
    let b = run(&["rate", "--config", &cfg, "--dipole"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn closed_form_and_quadrature_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "edge.cfg", EDGE);
    let closed = dir.path().join("closed.csv");
    let quad = dir.path().join("quad.csv");
    assert!(run(&[
        "rate",
        "--config",
        &cfg,
        "--fieldfree",
        "--out",
        closed.to_str().unwrap()
    ])
    .status
    .success());
    assert!(
        run(&["rate", "--config", &cfg, "--dipole", "--out", quad.to_str().unwrap()])
            .status
            .success()
    );
    let closed_text = fs::read_to_string(&closed).unwrap();
    let quad_text = fs::read_to_string(&quad).unwrap();
    assert!(closed_text.contains("# method = closed_form"));
    let (c, q) = (rows(&closed_text), rows(&quad_text));
    assert_eq!(c.len(), 101);
    let peak = c.iter().fold(0.0f64, |m, r| m.max(r[1]));
    for (rc, rq) in c.iter().zip(&q) {
        assert_eq!(rc[0], rq[0]);
        assert!((rc[1] - rq[1]).abs() <= 1e-7 * rc[1] + 1e-12 * peak, "theta {}", rc[0]);
    }
}

#[test]
fn tabulated_flat_top_reproduces_analytic_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let analytic =
        "[setup]\nlength = 20\n[profile]\nkind = flat_top\nramp_length = 3\nplateau_length = 8\n[beam]\nb0 = 0.8\n";
    let a_cfg = write(dir.path(), "analytic.cfg", analytic);
    // same profile sampled on a fine grid, in tesla with a 2 T peak
    let mut table = String::from("z,B_z\n");
    for i in 0..=4000 {
        let z = -10.0 + 20.0 * i as f64 / 4000.0;
        let u = z.abs() - 4.0;
        let v = if u <= 0.0 {
            1.0
        } else if u < 3.0 {
            0.5 * (1.0 + (std::f64::consts::PI * u / 3.0).cos())
        } else {
            0.0
        };
        table.push_str(&format!("{z},{}\n", 2.0 * v));
    }
    write(dir.path(), "field.csv", &table);
    let t_cfg = write(
        dir.path(),
        "table.cfg",
        "[setup]\nlength = 20\n[profile]\nkind = table\nfile = field.csv\n[beam]\nb0 = 0.8\n[theta]\ncount = 5\n",
    );
    let a = run(&["ermakov", "--config", &a_cfg]);
    let t = run(&["ermakov", "--config", &t_cfg]);
    assert!(t.status.success(), "{}", String::from_utf8_lossy(&t.stderr));
    let (ra, rt) = (
        rows(&String::from_utf8(a.stdout).unwrap()),
        rows(&String::from_utf8(t.stdout).unwrap()),
    );
    let (ea, et) = (ra.last().unwrap(), rt.last().unwrap());
    assert_eq!(ea[0], et[0]);
    for col in 1..5 {
        assert!(
            (ea[col] - et[col]).abs() < 1e-6 * ea[col].abs().max(1.0),
            "column {col}: {} vs {}",
            ea[col],
            et[col]
        );
    }
    // the table's peak sets the lab field
    let rate = run(&["rate", "--config", &t_cfg, "--dipole"]);
    assert!(String::from_utf8(rate.stdout).unwrap().contains("# B_max_T = 2"));
}

#[test]
fn empty_sweep_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let cfg = write(
        dir.path(),
        "s.cfg",
        &format!("{EDGE}[run]\nfieldfree = true\n[sweep]\nvariable = b0\nvalues =\n"),
    );
    let r = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        &format!("{EDGE}[run]\nfieldfree = true\n[sweep]\nvariable = L\nvalues = 30, 60, 90\n"),
    );
    let r = run(&["sweep", "--config", &cfg]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        body[0],
        "value,total_rate_norm,total_rate_si,refinement_change,undersampled,error"
    );
    assert_eq!(body.len(), 4);
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "bad.cfg", "[setup]\nbogus = 1\n");
    assert_eq!(run(&["rate", "--config", &bad_key]).status.code(), Some(1));
    assert_eq!(run(&["rate", "--config", "/nonexistent.cfg"]).status.code(), Some(1));
    // absorption channel: photon energy would be negative
    let dark = write(
        dir.path(),
        "dark.cfg",
        "[beam]\ninitial = 0, 0\nfinal = 1, 0\n[theta]\ncount = 11\n",
    );
    assert_eq!(run(&["rate", "--config", &dark, "--dipole"]).status.code(), Some(2));
}

#[test]
fn quick_verification_passes() {
    let r = run(&["verify", "--quick"]);
    assert_eq!(r.status.code(), Some(0));
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
}
