use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
seed = 5
[trial]
robots = 2
max_steps = 300
[sweep]
counts = [1, 2]
trials = 2
[perturb]
robots = 2
trials = 2
scatter_step = 150
window = 50
[ablate]
robots = 2
radii = [420.0, 100.0]
trials = 2
[search]
trials_per_combo = 1
reduced_steps = 10
top_k = 3
[flow]
spacing = 200.0
steps = 10
headings = 2
[run]
frames_every = 100
frame_scale = 0.25
trace = true
"#;

fn oc2(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oc2"))
        .args(args)
        .env("OC2_OUT", out)
        .output()
        .expect("spawn oc2")
}

/// Every file under `dir` except the manifest, by relative path.
fn outputs(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, acc: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(root, &p, acc);
            } else if p.file_name().unwrap() != "manifest.json" {
                acc.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut acc = BTreeMap::new();
    walk(dir, dir, &mut acc);
    acc
}

fn manifest(dir: &Path) -> String {
    std::fs::read_to_string(dir.join("manifest.json")).unwrap()
}

#[test]
fn every_subcommand_is_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let cfg = cfg.to_str().unwrap();
    for name in ["run", "sweep", "perturb", "ablate", "search", "flow"] {
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        let ra = oc2(&[name, "--config", cfg, "--threads", "1"], &a);
        assert!(ra.status.success(), "{name}: {}", String::from_utf8_lossy(&ra.stderr));
        let rb = oc2(&[name, "--config", cfg, "--threads", "3", "--out", b.to_str().unwrap()], &a);
        assert!(rb.status.success(), "{name}: {}", String::from_utf8_lossy(&rb.stderr));
        let (oa, ob) = (outputs(&a.join(name)), outputs(&b.join(name)));
        assert!(!oa.is_empty(), "{name} wrote nothing");
        assert_eq!(oa.keys().collect::<Vec<_>>(), ob.keys().collect::<Vec<_>>(), "{name}");
        for (k, v) in &oa {
            assert!(v == &ob[k], "{name}: {} differs between thread counts", k.display());
        }
        assert!(manifest(&a.join(name)).contains("\"status\": \"completed\""));
    }
}

#[test]
fn seed_flag_overrides_config_and_changes_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(oc2(&["run", "--config", cfg, "--seed", "11"], &a).status.success());
    assert!(oc2(&["run", "--config", cfg, "--seed", "12"], &b).status.success());
    assert!(manifest(&a.join("run")).contains("\"master_seed\": 11"));
    assert_ne!(
        std::fs::read(a.join("run/final.ppm")).unwrap(),
        std::fs::read(b.join("run/final.ppm")).unwrap()
    );
}

#[test]
fn frames_every_flag_controls_frame_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = tmp.path().join("o");
    let r = oc2(&["run", "--config", cfg.to_str().unwrap(), "--frames-every", "150"], &out);
    assert!(r.status.success());
    let frames: Vec<_> = std::fs::read_dir(out.join("run/frames")).unwrap().collect();
    // steps 0, 150 and 300
    assert_eq!(frames.len(), 3);
    let r = oc2(&["run", "--config", cfg.to_str().unwrap(), "--frames-every", "0"], &tmp.path().join("p"));
    assert!(r.status.success());
    assert!(!tmp.path().join("p/run/frames").exists());
}

#[test]
fn bad_config_fails_with_named_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[trial.controller]\nalign_variant = 64\n").unwrap();
    let r = oc2(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(!r.status.success());
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("trial.controller.align_variant") && err.contains("0..=63"), "{err}");
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn failing_experiment_exits_nonzero_and_keeps_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    std::fs::write(&cfg, "[trial]\nmax_steps = 100\n[perturb]\nscatter_step = 500\nwindow = 10\n").unwrap();
    let r = oc2(&["perturb", "--config", cfg.to_str().unwrap()], tmp.path());
    assert!(!r.status.success());
    assert!(manifest(&tmp.path().join("perturb")).contains("\"status\": \"failed\""));
}

#[test]
fn config_subcommand_echoes_a_parsable_document() {
    let tmp = tempfile::tempdir().unwrap();
    let r = oc2(&["config", "--seed", "9"], tmp.path());
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.starts_with("seed = 9\n"));
    let cfg = tmp.path().join("echo.toml");
    std::fs::write(&cfg, &text).unwrap();
    let again = oc2(&["config", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}
