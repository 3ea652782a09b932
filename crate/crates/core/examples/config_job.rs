// Running a job from a TOML configuration, as the `sossm` binary does.
//
// `cargo run --release --example config_job`

use sossm::harness::{execute, metadata_path, write_artifact, JobConfig};

/// Returns the number of CSV lines written.
pub fn run_example() -> sossm::Result<usize> {
    let dir = std::env::temp_dir().join(format!("sossm-config-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let out = dir.join("online.csv");
    let text = format!(
        r#"
kind = "online"
seed = 11

[model]
name = "lg-periodic"
p = 1
theta = [1.0, 0.8, 0.5, 1.0]
length = 480

[filter]
particles = 300

[data]
output = "{}"
"#,
        out.display()
    );
    let cfg = JobConfig::from_toml_str(&text)?.resolve()?;
    let artifact = execute(&cfg)?;
    let csv = artifact.csv();
    write_artifact(&artifact, &out)?;
    let lines: Vec<&str> = csv.lines().collect();
    println!("{}", lines[0]);
    println!("{}", lines[lines.len() - 1]);
    println!("wrote {} and {}", out.display(), metadata_path(&out).display());
    std::fs::remove_dir_all(&dir).ok();
    Ok(lines.len())
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
