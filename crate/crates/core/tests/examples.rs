// Each example is compiled into this test and its `run_example` checked.

mod online_lg {
    include!("../examples/online_lg.rs");
}
mod rbpf_vs_bootstrap {
    include!("../examples/rbpf_vs_bootstrap.rs");
}
mod iffit_urn {
    include!("../examples/iffit_urn.rs");
}
mod iffit_seird {
    include!("../examples/iffit_seird.rs");
}
mod noisy_optimizer {
    include!("../examples/noisy_optimizer.rs");
}
mod sv_online {
    include!("../examples/sv_online.rs");
}
mod resampling_schemes {
    include!("../examples/resampling_schemes.rs");
}
mod artificial_kernels {
    include!("../examples/artificial_kernels.rs");
}
mod config_job {
    include!("../examples/config_job.rs");
}

#[test]
fn online_lg_gets_closer() {
    let d = online_lg::run_example().unwrap();
    assert!(d.last().unwrap().1 < d[0].1);
}

#[test]
fn rbpf_is_exact_and_bootstrap_is_close() {
    let (exact, rb, boot) = rbpf_vs_bootstrap::run_example().unwrap();
    assert!((rb - exact).abs() < 1e-9 * exact.abs());
    assert!((boot - exact).abs() < 2.0);
}

#[test]
fn iffit_urn_matches_grid() {
    let (mle, fin) = iffit_urn::run_example().unwrap();
    assert_eq!(mle, fin);
}

#[test]
fn iffit_seird_stays_in_the_space() {
    let (theta, er) = iffit_seird::run_example().unwrap();
    assert!(sossm::models::Seird::default_space().contains(&theta));
    assert!(er.iter().all(|v| v.is_finite() && *v >= 0.0));
}

#[test]
fn noisy_optimizer_finds_target() {
    assert!((noisy_optimizer::run_example().unwrap() - 0.3).abs() < 0.1);
}

#[test]
fn sv_online_runs() {
    let (star, hat) = sv_online::run_example().unwrap();
    assert_eq!(star.len(), hat.len());
    assert!((hat[0] - star[0]).abs() < 0.3);
}

#[test]
fn resampling_means_are_nw() {
    for (scheme, mean) in resampling_schemes::run_example().unwrap() {
        for (m, w) in mean.iter().zip([0.05, 0.35, 0.1, 0.4, 0.1]) {
            assert!((m - 5.0 * w).abs() < 0.05, "{scheme:?}");
        }
    }
}

#[test]
fn artificial_kernel_epochs_increase() {
    let e = artificial_kernels::run_example().unwrap();
    assert_eq!(e[0], 101);
    assert!(e.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn config_job_writes_every_step() {
    // header plus one line per observation
    assert_eq!(config_job::run_example().unwrap(), 481);
}
