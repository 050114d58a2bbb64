//! Parametric Poisson bootstrap: every count channel of every run is redrawn
//! from a Poisson law with the observed count as mean, and the statistic is
//! re-evaluated on each replica.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::estimate::CHANNELS;
use super::simulate::CountRecord;
use super::{CountingError, Result};

/// Draws one replica of the channel counts of every record.
fn resample(records: &[CountRecord], rng: &mut ChaCha8Rng) -> Vec<[f64; CHANNELS]> {
    records
        .iter()
        .map(|r| {
            r.channels().map(|n| {
                if n > 0.0 {
                    Poisson::new(n).expect("positive count").sample(rng)
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Standard deviation of `statistic` over `resamples` Poisson replicas.
///
/// `statistic` receives the channel counts of all records, in record order.
/// Replicas on which it returns `None` (e.g. an empty denominator) are
/// skipped; at least two valid replicas are required.
pub fn bootstrap_sigma<F>(
    records: &[CountRecord],
    statistic: F,
    resamples: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&[[f64; CHANNELS]]) -> Option<f64>,
{
    if resamples < 2 {
        return Err(CountingError::InvalidParameter(format!(
            "bootstrap needs at least 2 resamples, got {resamples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..resamples)
        .filter_map(|_| statistic(&resample(records, &mut rng)))
        .collect();
    if values.len() < 2 {
        return Err(CountingError::EmptySample("bootstrap".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}
