use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use super::{RowCounts, SamplingInfo, ScanResult};
use crate::error::{domain, Result};

fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as u64
}

/// Adds Poisson counts with mean `probability × pair_rate × integration_time`
/// to every row.
///
/// Row `i` draws from its own ChaCha8 stream `i` under `seed`, so the result
/// does not depend on evaluation order.
pub fn sample_counts(
    result: &ScanResult,
    pair_rate: f64,
    integration_time_s: f64,
    seed: u64,
) -> Result<ScanResult> {
    if !(pair_rate > 0.0 && pair_rate.is_finite()) {
        return domain(format!("pair rate {pair_rate} must be positive"));
    }
    if !(integration_time_s > 0.0 && integration_time_s.is_finite()) {
        return domain(format!(
            "integration time {integration_time_s} must be positive"
        ));
    }
    let pairs = pair_rate * integration_time_s;
    let rows = result
        .rows
        .par_iter()
        .enumerate()
        .map(|(index, row)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let singles = row
                .singles
                .iter()
                .map(|p| poisson(p * pairs, &mut rng))
                .collect();
            let coincidences = row
                .coincidences
                .iter()
                .map(|p| poisson(p * pairs, &mut rng))
                .collect();
            let mut row = row.clone();
            row.counts = Some(RowCounts {
                singles,
                coincidences,
            });
            row
        })
        .collect();
    let mut out = result.clone();
    out.rows = rows;
    out.metadata.sampling = Some(SamplingInfo {
        pair_rate,
        integration_time_s,
        seed,
    });
    Ok(out)
}
