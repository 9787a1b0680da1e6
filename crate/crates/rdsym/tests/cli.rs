//! End-to-end checks of the command-line binary against the shipped preset
//! configurations.

use std::path::{Path, PathBuf};
use std::process::Command;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../presets")
        .join(name)
}

fn run_preset(name: &str, out: &Path, extra: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(preset(name))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn spectrum_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_preset("spectrum.cfg", dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(
        text.contains("s1_mod = 0.7653668647"),
        "spectrum stdout:\n{text}"
    );
    assert!(text.contains("s3_mod = 1.8477590650"), "{text}");
    assert!(text.contains("purely_imaginary = true"), "{text}");
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn family_presets_verify() {
    for name in [
        "family1.cfg",
        "family2.cfg",
        "family3.cfg",
        "family4.cfg",
        "family5.cfg",
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run_preset(name, dir.path(), &[]);
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = stdout_of(&out);
        assert!(text.contains("result = PASS"), "{name}:\n{text}");
        assert!(text.contains("max determining residual"), "{name}");
    }
}

#[test]
fn fig1_preset_short_run() {
    // run the decaying preset with a shortened horizon via a temp config
    let dir = tempfile::tempdir().unwrap();
    let cfg = std::fs::read_to_string(preset("fig1.cfg"))
        .unwrap()
        .replace("t_end = 5", "t_end = 0.2")
        .replace("n = 200", "n = 64");
    let cfg_path = dir.path().join("short.cfg");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,x,U,V,U_exact,V_exact",
        "trajectory header contract"
    );
    // 11 samples x 65 nodes data rows
    assert_eq!(csv.lines().count(), 1 + 11 * 65);
}

#[test]
fn fig2_preset_and_determinism() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    // shorten for test runtime; identical configs must give byte-identical CSV
    let cfg = std::fs::read_to_string(preset("fig2.cfg"))
        .unwrap()
        .replace("t_end = 1.0", "t_end = 0.3")
        .replace("n = 200", "n = 64");
    for dir in [&dir_a, &dir_b] {
        let cfg_path = dir.path().join("fig2s.cfg");
        std::fs::write(&cfg_path, &cfg).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
            .arg("--config")
            .arg(&cfg_path)
            .arg("--out")
            .arg(dir.path())
            .arg("--quiet")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "--quiet must silence stdout");
    }
    let a = std::fs::read(dir_a.path().join("trajectory.csv")).unwrap();
    let b = std::fs::read(dir_b.path().join("trajectory.csv")).unwrap();
    assert_eq!(a, b, "identical config + seed -> byte-identical CSV");
}

#[test]
fn exit_codes() {
    // config error: unknown key -> 2
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "command = spectrum\nbogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "config errors exit 2");

    // family 2 with lambda2 = 0: rejected naming the restriction, exit 2
    let bad2 = dir.path().join("bad2.cfg");
    std::fs::write(
        &bad2,
        "command = verify-symmetry\nfamily = 2\nk = 1\nl = 1\nlambda1 = 1\nlambda2 = 0\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&bad2)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("lambda2 != 0"), "{err}");

    // domain error: simulation past the validity window -> 3
    let grow = dir.path().join("grow.cfg");
    let cfg = std::fs::read_to_string(preset("fig2.cfg"))
        .unwrap()
        .replace("t_end = 1.0", "t_end = 1.4")
        .replace("n = 200", "n = 64");
    std::fs::write(&grow, cfg).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&grow)
        .arg("--quiet")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "positivity breach exits 3");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("non-positive"), "{err}");

    // tolerance error: verify with an absurd tolerance -> 4
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(preset("family2.cfg"))
        .arg("--tol")
        .arg("1e-30")
        .arg("--quiet")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "tolerance failures exit 4");
}

#[test]
fn reduce_and_intervals_commands() {
    let dir = tempfile::tempdir().unwrap();
    let reduce = dir.path().join("reduce.cfg");
    std::fs::write(
        &reduce,
        "command = reduce\nfamily = 5\nk = 1\nl = 1\nr = 2\nlambda1 = 1\nlambda3 = 2\n\
         alpha1 = -2\nbeta1 = -1\nalpha2 = -2\nbeta2 = -2\na1 = 0.95\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&reduce)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("profiles.csv").exists());
    let text = stdout_of(&out);
    assert!(text.contains("max profile residual"), "{text}");

    let pord = dir.path().join("pode.cfg");
    std::fs::write(
        &pord,
        "command = reduce\nfamily = 1\nk = 1\nlambda = 0.6\np0 = 0.8\np0_prime = 0.1\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&pord)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("p_function.csv").exists());

    let ivs = dir.path().join("ivs.cfg");
    std::fs::write(
        &ivs,
        "command = intervals\ncase = i\ncount = 3\nalpha1 = -2\nbeta1 = -1\nalpha2 = -2\nbeta2 = -2\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&ivs)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("a[1] = 4.1046886119"), "{text}");
    assert!(dir.path().join("intervals.csv").exists());
}

#[test]
fn exact_residual_convergence_commands() {
    let dir = tempfile::tempdir().unwrap();
    let exact = dir.path().join("exact.cfg");
    std::fs::write(
        &exact,
        "command = exact\ncase = i\nk = 1\nl = 1\nr = 2\nlambda1 = 1\nlambda3 = 2\n\
         alpha1 = -2\nbeta1 = -1\nalpha2 = -2\nbeta2 = -2\na1 = 0.95\nn = 32\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&exact)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    assert!(text.contains("steady_state_v = 1.4142135623"), "{text}");
    assert!(dir.path().join("exact.csv").exists());

    let res = dir.path().join("res.cfg");
    std::fs::write(
        &res,
        "command = residual\ncase = i\nk = 1\nl = 1\nr = 2\nlambda1 = 1\nlambda3 = 2\n\
         alpha1 = -2\nbeta1 = -1\nalpha2 = -2\nbeta2 = -2\na1 = 0.95\nn = 64\nt_eval = 0.3\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&res)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("observed_order"), "{text}");

    let conv = dir.path().join("conv.cfg");
    std::fs::write(
        &conv,
        "command = convergence\ncase = i\nk = 1\nl = 1\nr = 2\nlambda1 = 1\nlambda3 = 2\n\
         alpha1 = -2\nbeta1 = -1\nalpha2 = -2\nbeta2 = -2\na1 = 0.95\nn = 32\nt_eval = 0.2\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_rdsym"))
        .arg("--config")
        .arg(&conv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("observed_order"), "{text}");
}
