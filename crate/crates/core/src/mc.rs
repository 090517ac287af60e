//! Deterministic Monte Carlo plumbing.
//!
//! Every sample draws from its own ChaCha stream keyed by the master seed and
//! an experiment tag, so the numbers do not depend on how samples are spread
//! over threads. Samples are grouped in fixed-size chunks whose partial sums
//! are reduced in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::par;

const CHUNK: usize = 2048;

/// Source of per-sample random streams for one experiment.
#[derive(Clone, Debug)]
pub struct StreamFamily {
    base: ChaCha8Rng,
}

impl StreamFamily {
    pub fn new(seed: u64, tag: &str) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        Self {
            base: ChaCha8Rng::seed_from_u64(seed ^ h.rotate_left(17)),
        }
    }

    /// Stream for sample `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }
}

/// Mean and standard error of a real statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// `(mean − target)/stderr`; zero when both the error and the gap vanish.
    pub fn z_against(&self, target: f64) -> f64 {
        z_score(self.mean - target, self.stderr)
    }

    /// z-score of the difference of two independent estimates.
    pub fn z_between(&self, other: &Estimate) -> f64 {
        z_score(
            self.mean - other.mean,
            (self.stderr.powi(2) + other.stderr.powi(2)).sqrt(),
        )
    }
}

fn z_score(gap: f64, err: f64) -> f64 {
    if err > 0.0 {
        gap / err
    } else if gap.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(gap)
    }
}

/// Estimates `E[g(sample)]` for each of the `width` components of `g`.
pub fn estimate<F>(family: &StreamFamily, samples: usize, width: usize, g: F) -> Vec<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Vec<f64> + Sync + Send,
{
    let chunks: Vec<(usize, usize)> = (0..samples)
        .step_by(CHUNK)
        .map(|start| (start, (start + CHUNK).min(samples)))
        .collect();
    let partials = par::map_ordered(&chunks, |&(start, end)| {
        let mut sum = vec![0.0; width];
        let mut sum_sq = vec![0.0; width];
        for i in start..end {
            let mut rng = family.stream(i as u64);
            let values = g(&mut rng);
            for (k, v) in values.iter().enumerate() {
                sum[k] += v;
                sum_sq[k] += v * v;
            }
        }
        (sum, sum_sq)
    });
    let mut sum = vec![0.0; width];
    let mut sum_sq = vec![0.0; width];
    for (s, q) in partials {
        for k in 0..width {
            sum[k] += s[k];
            sum_sq[k] += q[k];
        }
    }
    let n = samples as f64;
    (0..width)
        .map(|k| {
            let mean = sum[k] / n;
            let var = if samples > 1 {
                ((sum_sq[k] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            Estimate {
                mean,
                stderr: (var / n).sqrt(),
                samples,
            }
        })
        .collect()
}
