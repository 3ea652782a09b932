use std::path::Path;
use std::process::{Command, Output};

use sossm::harness::{metadata_path, parse_observations, parse_record_csv};
use sossm::models::{urn_grid_mle, urn_space};

fn sossm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sossm")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_then_iffit_recovers_the_grid_mle() {
    let dir = tempfile::tempdir().unwrap();
    let sim = write(
        dir.path(),
        "sim.toml",
        "kind = \"simulate\"\nseed = 4\n[model]\nname = \"urn\"\ntheta = [3.0, 3.0, 3.0]\nlength = 100\nurn_bound = 8\n",
    );
    let data = dir.path().join("urn.csv").display().to_string();
    let o = sossm(&["simulate", "--config", &sim, "--out", &data]);
    assert!(o.status.success(), "{}", stderr(&o));
    let obs = parse_observations(&std::fs::read_to_string(&data).unwrap(), Some(&["w".into()])).unwrap();
    assert_eq!(obs.len(), 101);
    let ws: Vec<i64> = obs.rows.iter().map(|r| r[0] as i64).collect();

    let fit = write(
        dir.path(),
        "fit.toml",
        &format!("kind = \"iffit\"\n[model]\nname = \"urn\"\nurn_bound = 8\n[filter]\nparticles = 400\n[data]\ninput = \"{data}\"\n"),
    );
    let out = dir.path().join("fit.csv").display().to_string();
    let o = sossm(&["iffit", "--config", &fit, "--seed", "4", "--passes", "60", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_record_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows[0].theta_hat.len(), 3);
    assert_eq!(rows.len(), 60);
    let fin: Vec<i64> = rows.last().unwrap().theta_proj.iter().map(|v| v.round() as i64).collect();
    let (mle, _) = urn_grid_mle(&ws, &urn_space(&ws, 8).unwrap()).unwrap();
    assert_eq!(fin, mle);
    let meta = std::fs::read_to_string(metadata_path(Path::new(&out))).unwrap();
    assert!(meta.contains("seed=4") && meta.contains("config.iffit.passes=60"), "{meta}");
}

#[test]
fn reruns_are_byte_identical_and_rows_match_length() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "online.toml",
        "kind = \"online\"\nseed = 2\n[model]\nname = \"lg-periodic\"\np = 1\nlength = 96\n[filter]\nparticles = 100\n",
    );
    let a = dir.path().join("a.csv").display().to_string();
    let b = dir.path().join("b.csv").display().to_string();
    assert!(sossm(&["online", "--config", &cfg, "--out", &a]).status.success());
    assert!(sossm(&["online", "--config", &cfg, "--out", &b]).status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let rows = parse_record_csv(&String::from_utf8(ta).unwrap()).unwrap();
    assert_eq!(rows.len(), 96);

    let c = dir.path().join("c.csv").display().to_string();
    assert!(sossm(&["online", "--config", &cfg, "--seed", "3", "--out", &c]).status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn optimize_with_flags_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("opt.csv").display().to_string();
    let o = sossm(&["optimize", "--seed", "1", "--length", "800", "--particles", "200", "--out", &out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_record_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((rows.len(), rows[0].theta_hat.len()), (800, 1));
    assert!((rows.last().unwrap().theta_hat[0] - 0.3).abs() < 0.2);
}

#[test]
fn errors_are_one_structured_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv").display().to_string();

    let o = sossm(&["online", "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.starts_with("error kind=config message=\"config: seed"), "{e}");
    assert_eq!(e.trim_end().lines().count(), 1);

    let bad = write(dir.path(), "bad.toml", "kind = \"online\"\nseed = 1\n[model]\nname = \"nope\"\n");
    let e = stderr(&sossm(&["online", "--config", &bad, "--out", &out]));
    assert!(e.contains("kind=config") && e.contains("model.name"), "{e}");

    let other = write(dir.path(), "kind.toml", "kind = \"iffit\"\nseed = 1\n");
    let e = stderr(&sossm(&["online", "--config", &other, "--out", &out]));
    assert!(e.contains("kind=config") && e.contains("subcommand"), "{e}");

    let csv = write(dir.path(), "bad.csv", "y\n1.0\nabc\n");
    let cfg = write(
        dir.path(),
        "in.toml",
        &format!("kind = \"online\"\nseed = 1\n[model]\nname = \"sv\"\n[data]\ninput = \"{csv}\"\n"),
    );
    let e = stderr(&sossm(&["online", "--config", &cfg, "--out", &out]));
    assert!(e.contains("kind=data") && e.contains("row 2"), "{e}");

    let reversed =
        write(dir.path(), "box.toml", "kind = \"optimize\"\nseed = 1\n[space]\nlower = [1.0]\nupper = [-1.0]\n");
    let e = stderr(&sossm(&["optimize", "--config", &reversed, "--out", &out]));
    assert!(e.contains("coordinate 0"), "{e}");
    assert!(!Path::new(&out).exists());
}
