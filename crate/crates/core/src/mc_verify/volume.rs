use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{McConfig, SublevelFunction, VerifyError, VolumeEstimate};

const CHUNK: u64 = 1 << 15;
const MIN_SAMPLES: u64 = 10_000;

/// Per-coordinate proposal: an even mixture of the uniform disc of radius
/// `outer` and a log-uniform radius on `[inner, outer]` with uniform angle.
#[derive(Debug, Clone, Copy)]
struct Proposal {
    outer: f64,
    inner: f64,
    log_span: f64,
}

impl Proposal {
    fn new(outer: f64, inner: f64) -> Self {
        let inner = inner.min(outer * 0.5);
        Self { outer, inner, log_span: (outer / inner).ln() }
    }

    fn density(&self, radius: f64) -> f64 {
        let uniform = 0.5 / (PI * self.outer * self.outer);
        if radius >= self.inner {
            uniform + 0.5 / (2.0 * PI * radius * radius * self.log_span)
        } else {
            uniform
        }
    }

    /// Draws a point and returns it with its importance weight.
    fn draw(&self, rng: &mut ChaCha8Rng) -> (Complex64, f64) {
        let pick: f64 = rng.random();
        let u: f64 = rng.random();
        let angle = 2.0 * PI * rng.random::<f64>();
        let radius = if pick < 0.5 {
            self.outer * u.sqrt()
        } else {
            self.inner * (u * self.log_span).exp()
        };
        (Complex64::from_polar(radius, angle), 1.0 / self.density(radius))
    }
}

#[derive(Debug, Clone)]
struct Tally {
    weight: Vec<f64>,
    weight_sqr: Vec<f64>,
    hits: Vec<u64>,
}

impl Tally {
    fn new(bins: usize) -> Self {
        Self { weight: vec![0.0; bins], weight_sqr: vec![0.0; bins], hits: vec![0; bins] }
    }

    fn absorb(&mut self, other: &Tally) {
        for k in 0..self.weight.len() {
            self.weight[k] += other.weight[k];
            self.weight_sqr[k] += other.weight_sqr[k];
            self.hits[k] += other.hits[k];
        }
    }
}

fn run_chunk(
    f: &dyn SublevelFunction,
    radii: &[f64],
    proposal: Proposal,
    seed: u64,
    chunk: u64,
    count: u64,
) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let n = f.dim();
    let mut tally = Tally::new(radii.len() + 1);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..count {
        let mut w = 1.0;
        for zj in z.iter_mut() {
            let (p, wj) = proposal.draw(&mut rng);
            *zj = p;
            w *= wj;
        }
        let v = f.value(&z);
        // number of radii strictly above v: the sample lies in those sublevel sets
        let bin = radii.partition_point(|&r| r > v);
        tally.weight[bin] += w;
        tally.weight_sqr[bin] += w * w;
        tally.hits[bin] += 1;
    }
    tally
}

/// Nested estimates of `Vol{z ∈ box : f(z) < r}` for each `r` in a strictly
/// decreasing grid, from a single seeded sample stream.
///
/// Samples are drawn in fixed-size chunks, each from its own stream of the
/// seed, and reduced in chunk order, so results do not depend on the number
/// of worker threads.
pub fn estimate_volumes(
    f: &dyn SublevelFunction,
    radii: &[f64],
    config: &McConfig,
) -> Result<Vec<VolumeEstimate>, VerifyError> {
    if config.samples < MIN_SAMPLES {
        return Err(VerifyError::TooFewSamples(config.samples));
    }
    if radii.is_empty()
        || radii.iter().any(|r| !(r.is_finite() && *r > 0.0))
        || radii.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(VerifyError::BadRadii);
    }
    let outer = config.box_radius;
    if !(outer > 0.0 && outer.is_finite()) {
        return Err(VerifyError::BadBox);
    }
    let r_min = *radii.last().unwrap();
    let inner = config
        .inner_radius
        .unwrap_or(r_min.max(1e-12) / 16.0 * outer);
    let proposal = Proposal::new(outer, inner);

    let chunks = config.samples.div_ceil(CHUNK);
    let tallies: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(config.samples - c * CHUNK);
            run_chunk(f, radii, proposal, config.seed, c, count)
        })
        .collect();
    let mut total = Tally::new(radii.len() + 1);
    for t in &tallies {
        total.absorb(t);
    }

    let n = config.samples as f64;
    let mut out = Vec::with_capacity(radii.len());
    let (mut s1, mut s2, mut hits) = (0.0, 0.0, 0u64);
    // radius k collects every bin above k
    for k in (0..radii.len()).rev() {
        s1 += total.weight[k + 1];
        s2 += total.weight_sqr[k + 1];
        hits += total.hits[k + 1];
        let mean = s1 / n;
        let var = (s2 / n - mean * mean).max(0.0);
        out.push(VolumeEstimate {
            r: radii[k],
            volume: mean,
            stderr: (var / n).sqrt(),
            hits,
            resolved: hits >= config.min_hits.max(1),
        });
    }
    out.reverse();
    Ok(out)
}

/// Single-radius form of [`estimate_volumes`].
pub fn estimate_volume(
    f: &dyn SublevelFunction,
    r: f64,
    config: &McConfig,
) -> Result<VolumeEstimate, VerifyError> {
    Ok(estimate_volumes(f, &[r], config)?.remove(0))
}
