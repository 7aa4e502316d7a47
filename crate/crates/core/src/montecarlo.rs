//! Seeded ergodic estimation.
//!
//! Trial `i` draws its realization from ChaCha8 stream `i` of the master
//! seed, so a trial's value does not depend on how trials are scheduled.
//! Trials are grouped into fixed-size blocks; each block keeps a running
//! mean and sum of squared deviations, and blocks are merged in a fixed
//! pairwise tree. Serial and parallel runs therefore produce bitwise-equal
//! estimates for any worker count.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{ChannelSet, FadingRealization};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::schemes::{ee_denominator, energy_efficiency, evaluate, Scheme};

/// Trials per accumulation block.
const BLOCK_TRIALS: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    CUe1,
    CUe2,
    CSum,
    Ee,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::CUe1, Metric::CUe2, Metric::CSum, Metric::Ee];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::CUe1 => "c_ue1",
            Metric::CUe2 => "c_ue2",
            Metric::CSum => "c_sum",
            Metric::Ee => "ee",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::param("metric", format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErgodicEstimate {
    pub scheme: Scheme,
    pub metric: Metric,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_trials)`; zero for one trial.
    pub std_error: f64,
    pub n_trials: u64,
}

/// Running mean and sum of squared deviations for `N` quantities.
#[derive(Debug, Clone, Copy)]
struct Moments<const N: usize> {
    n: u64,
    mean: [f64; N],
    m2: [f64; N],
}

impl<const N: usize> Moments<N> {
    fn empty() -> Self {
        Self {
            n: 0,
            mean: [0.0; N],
            m2: [0.0; N],
        }
    }

    fn push(&mut self, x: [f64; N]) {
        self.n += 1;
        let n = self.n as f64;
        for ((xk, mean), m2) in x.iter().zip(&mut self.mean).zip(&mut self.m2) {
            let d = xk - *mean;
            *mean += d / n;
            *m2 += d * (xk - *mean);
        }
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let (na, nb, nt) = (a.n as f64, b.n as f64, n as f64);
        let mut out = Self::empty();
        out.n = n;
        for k in 0..N {
            let d = b.mean[k] - a.mean[k];
            out.mean[k] = a.mean[k] + d * (nb / nt);
            out.m2[k] = a.m2[k] + b.m2[k] + d * d * (na * nb / nt);
        }
        out
    }

    fn std_error(&self, k: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        (self.m2[k].max(0.0) / (n - 1.0) / n).sqrt()
    }
}

// Merges neighbours level by level; the tree shape depends only on the
// number of blocks.
fn tree_merge<const N: usize>(mut level: Vec<Moments<N>>) -> Moments<N> {
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => Moments::merge(*a, *b),
                [a] => *a,
                _ => unreachable!(),
            })
            .collect();
    }
    level.pop().unwrap_or_else(Moments::empty)
}

/// Random stream of trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The realization used by trial `trial`.
pub fn trial_realization(
    params: &SystemParams,
    seed: u64,
    trial: u64,
) -> Result<FadingRealization> {
    let channels = ChannelSet::new(params)?;
    Ok(channels.draw(&mut trial_rng(seed, trial)))
}

fn run_block(
    channels: &ChannelSet,
    params: &SystemParams,
    scheme: Scheme,
    seed: u64,
    start: u64,
    end: u64,
) -> Moments<3> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Moments::empty();
    for trial in start..end {
        let mut rng = base.clone();
        rng.set_stream(trial);
        let c = evaluate(scheme, params, &channels.draw(&mut rng));
        acc.push([c.c_ue1, c.c_ue2, c.c_sum]);
    }
    acc
}

/// How trial blocks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Use the ambient rayon pool.
    #[default]
    Auto,
    /// Run on exactly this many threads; `1` runs on the calling thread.
    Fixed(usize),
}

/// Ergodic estimates of `c_ue1`, `c_ue2`, `c_sum` and `ee` for `scheme`.
pub fn estimate(
    params: &SystemParams,
    scheme: Scheme,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<ErgodicEstimate>> {
    estimate_with(params, scheme, n_trials, seed, Workers::Auto)
}

pub fn estimate_with(
    params: &SystemParams,
    scheme: Scheme,
    n_trials: u64,
    seed: u64,
    workers: Workers,
) -> Result<Vec<ErgodicEstimate>> {
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be >= 1"));
    }
    let channels = ChannelSet::new(params)?;
    let n_blocks = n_trials.div_ceil(BLOCK_TRIALS);
    let block = |b: u64| {
        let start = b * BLOCK_TRIALS;
        let end = (start + BLOCK_TRIALS).min(n_trials);
        run_block(&channels, params, scheme, seed, start, end)
    };
    let blocks: Vec<Moments<3>> = match workers {
        Workers::Fixed(1) => (0..n_blocks).map(block).collect(),
        Workers::Auto => (0..n_blocks).into_par_iter().map(block).collect(),
        Workers::Fixed(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            pool.install(|| (0..n_blocks).into_par_iter().map(block).collect())
        }
    };
    let totals = tree_merge(blocks);

    let c_sum = totals.mean[2];
    let ee = energy_efficiency(scheme, c_sum, params)?;
    let ee_se = totals.std_error(2) / ee_denominator(scheme, params);

    let mk = |metric, mean, std_error| ErgodicEstimate {
        scheme,
        metric,
        mean,
        std_error,
        n_trials,
    };
    Ok(vec![
        mk(Metric::CUe1, totals.mean[0], totals.std_error(0)),
        mk(Metric::CUe2, totals.mean[1], totals.std_error(1)),
        mk(Metric::CSum, c_sum, totals.std_error(2)),
        mk(Metric::Ee, ee, ee_se),
    ])
}
