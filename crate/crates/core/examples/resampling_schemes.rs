// Offspring counts of the four resampling schemes on one weight vector.
//
// `cargo run --release --example resampling_schemes`

use sossm::engine::{ess, offspring_counts, resample, Scheme};
use sossm::rng::{Purpose, Streams};

/// Returns, per scheme, the mean offspring counts over the replications.
pub fn run_example() -> sossm::Result<Vec<(Scheme, Vec<f64>)>> {
    let w = [0.05, 0.35, 0.1, 0.4, 0.1];
    let n = w.len();
    println!("weights {w:?}, ESS {:.3}, N W = {:?}", ess(&w)?, w.map(|v| v * n as f64));
    let reps = 20_000;
    let mut out = vec![];
    for (k, scheme) in
        [Scheme::Multinomial, Scheme::Stratified, Scheme::Systematic, Scheme::Ssp].into_iter().enumerate()
    {
        let mut rng = Streams::new(7).stream(Purpose::Resample, 0, k as u64);
        let mut mean = vec![0.0; n];
        let (mut lo, mut hi) = (vec![usize::MAX; n], vec![0; n]);
        for _ in 0..reps {
            let counts = offspring_counts(&resample(scheme, &w, &mut rng)?, n);
            for i in 0..n {
                mean[i] += counts[i] as f64 / reps as f64;
                lo[i] = lo[i].min(counts[i]);
                hi[i] = hi[i].max(counts[i]);
            }
        }
        let range: Vec<String> = lo.iter().zip(&hi).map(|(a, b)| format!("{a}..{b}")).collect();
        println!("{:12} mean {mean:.3?}  range [{}]", scheme.name(), range.join(" "));
        out.push((scheme, mean));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
