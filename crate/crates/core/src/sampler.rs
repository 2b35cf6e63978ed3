//! Uniform random ordered matchings: shuffle `1..=rn` and chop it into
//! consecutive r-blocks. Every matching arises from exactly `(r!)^n n!`
//! permutations, so a uniform permutation yields a uniform matching.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::matching::{count_matchings, enumerate_matchings, OrderedMatching, Vertex};

/// Largest support size accepted by [`uniformity_test`].
pub const UNIFORMITY_SUPPORT_CAP: u64 = 10_000;

/// Deterministic random stream keyed by a master seed and a stream id.
pub type SeededRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit id of the stream `(seed, r, n, sample)`.
pub fn stream_id(seed: u64, r: usize, n: usize, sample: u64) -> u64 {
    [r as u64, n as u64, sample].iter().fold(splitmix(seed), |h, &x| splitmix(h ^ x))
}

pub fn rng_for(seed: u64, r: usize, n: usize, sample: u64) -> SeededRng {
    SeededRng::seed_from_u64(stream_id(seed, r, n, sample))
}

/// Draws a uniformly random canonical r-matching of size `n`.
pub fn sample<R: rand::Rng + ?Sized>(r: usize, n: usize, rng: &mut R) -> Result<OrderedMatching> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let mut perm: Vec<Vertex> = (1..=(r * n) as Vertex).collect();
    perm.shuffle(rng);
    Ok(OrderedMatching::chop(&perm, r))
}

/// Probability that a fixed r-set is an edge of the random matching:
/// `1 / C(rn-1, r-1)`.
pub fn edge_probability(r: usize, n: usize) -> Result<BigRational> {
    if r == 0 || n == 0 {
        return Err(Error::InvalidArgument("r and n must be at least 1".into()));
    }
    let denom = binomial((r * n - 1) as u64, (r - 1) as u64);
    Ok(BigRational::new(1.into(), denom.into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub cells: usize,
    pub samples: u64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Pearson chi-square test of the sampler against the uniform distribution
/// over all `α_n` matchings.
pub fn uniformity_test<R: rand::Rng + ?Sized>(
    r: usize,
    n: usize,
    samples: u64,
    rng: &mut R,
) -> Result<UniformityReport> {
    let support: BigUint = count_matchings(r, n);
    let cells = match support.to_u64() {
        Some(c) if c <= UNIFORMITY_SUPPORT_CAP => c as usize,
        _ => return Err(Error::SupportTooLarge { support: support.to_string(), cap: UNIFORMITY_SUPPORT_CAP }),
    };
    if cells < 2 || samples == 0 {
        return Err(Error::InvalidArgument("uniformity test needs at least 2 cells and 1 sample".into()));
    }
    let index: HashMap<OrderedMatching, usize> = enumerate_matchings(r, n)?.enumerate().map(|(i, m)| (m, i)).collect();
    let mut counts = vec![0u64; cells];
    for _ in 0..samples {
        counts[index[&sample(r, n, rng)?]] += 1;
    }
    let expected = samples as f64 / cells as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((cells - 1) as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(UniformityReport { cells, samples, statistic, p_value: dist.sf(statistic) })
}
