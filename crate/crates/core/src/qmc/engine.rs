//! Sharded evaluation of a kernel over the Sobol sequence.
//!
//! The sequence is cut into fixed-size blocks. Blocks are evaluated in waves
//! of a fixed number of blocks (in parallel within a wave) and their
//! accumulators are merged in block order. The block in which the requested
//! number of accepted samples is reached is re-run sequentially and stopped
//! at exactly that sample, so the result depends only on `(seed, n,
//! block_size)`, never on the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sobol::{to_unit_open, LowDiscrepancySequence};
use crate::error::{Error, Result};

/// Work applied to each quasi-random point.
pub trait Kernel: Sync {
    type Acc: Send + Default;

    fn dim(&self) -> usize;

    /// Process one point in `(0, 1)^dim`; return whether it was accepted
    /// (counted towards the requested sample size).
    fn process(&self, u: &[f64], acc: &mut Self::Acc) -> bool;

    fn merge(&self, into: &mut Self::Acc, from: Self::Acc);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub seed: u64,
    pub block_size: usize,
    /// Blocks per parallel wave. Fixed so that no work depends on thread count.
    pub wave_blocks: usize,
    /// Give up after this many sequence points.
    pub max_points: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { seed: 20240901, block_size: 1 << 14, wave_blocks: 32, max_points: LowDiscrepancySequence::capacity(), threads: None }
    }
}

impl EngineConfig {
    pub fn with_seed(seed: u64) -> Self {
        EngineConfig { seed, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub accepted: u64,
    pub raw_points: u64,
}

impl RunStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.raw_points.max(1) as f64
    }
}

/// Process `seq` points `start..start+len`, stopping after `limit` acceptances.
/// Returns the accumulator, the number accepted and the points consumed.
fn run_block<K: Kernel>(kernel: &K, seq: &LowDiscrepancySequence, start: u64, len: usize, limit: u64) -> (K::Acc, u64, u64) {
    let dim = kernel.dim();
    let mut bits = vec![0u32; len * dim];
    seq.fill_bits(start, len, &mut bits);
    let mut u = vec![0.0; dim];
    let mut acc = K::Acc::default();
    let mut accepted = 0;
    for (i, row) in bits.chunks_exact(dim).enumerate() {
        for (x, &b) in u.iter_mut().zip(row) {
            *x = to_unit_open(b);
        }
        if kernel.process(&u, &mut acc) {
            accepted += 1;
            if accepted == limit {
                return (acc, accepted, i as u64 + 1);
            }
        }
    }
    (acc, accepted, len as u64)
}

/// Run `kernel` until `n` points have been accepted.
pub fn run<K: Kernel>(kernel: &K, n: u64, cfg: &EngineConfig) -> Result<(K::Acc, RunStats)> {
    if n == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    if cfg.block_size == 0 || cfg.wave_blocks == 0 {
        return Err(Error::Config("block size and wave size must be positive".into()));
    }
    let seq = LowDiscrepancySequence::scrambled(kernel.dim(), cfg.seed)?;
    let body = || drive(kernel, &seq, n, cfg);
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

fn drive<K: Kernel>(kernel: &K, seq: &LowDiscrepancySequence, n: u64, cfg: &EngineConfig) -> Result<(K::Acc, RunStats)> {
    let bs = cfg.block_size as u64;
    let max_points = cfg.max_points.min(LowDiscrepancySequence::capacity());
    let mut total = K::Acc::default();
    let mut accepted = 0u64;
    let mut next_block = 0u64;
    loop {
        let first = next_block * bs;
        if first >= max_points {
            return Err(Error::BudgetExhausted { accepted, requested: n, raw: first });
        }
        let blocks: Vec<(u64, usize)> = (0..cfg.wave_blocks as u64)
            .map(|i| (first + i * bs, bs.min(max_points.saturating_sub(first + i * bs)) as usize))
            .filter(|&(_, len)| len > 0)
            .collect();
        let results: Vec<(K::Acc, u64, u64)> =
            blocks.par_iter().map(|&(start, len)| run_block(kernel, seq, start, len, u64::MAX)).collect();
        for ((start, len), (acc, got, _)) in blocks.iter().zip(results) {
            if accepted + got >= n {
                let (acc, got, used) = run_block(kernel, seq, *start, *len, n - accepted);
                kernel.merge(&mut total, acc);
                accepted += got;
                return Ok((total, RunStats { accepted, raw_points: start + used }));
            }
            kernel.merge(&mut total, acc);
            accepted += got;
        }
        next_block += blocks.len() as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Accepts points inside the quarter disc; sums the first coordinate.
    struct Disc;

    impl Kernel for Disc {
        type Acc = (u64, u64);
        fn dim(&self) -> usize {
            2
        }
        fn process(&self, u: &[f64], acc: &mut (u64, u64)) -> bool {
            if u[0] * u[0] + u[1] * u[1] <= 1.0 {
                acc.0 += 1;
                acc.1 += (u[0] * 1e6) as u64;
                true
            } else {
                false
            }
        }
        fn merge(&self, into: &mut (u64, u64), from: (u64, u64)) {
            into.0 += from.0;
            into.1 += from.1;
        }
    }

    #[test]
    fn stops_at_exactly_n_and_estimates_pi() {
        let cfg = EngineConfig { block_size: 1000, wave_blocks: 3, ..EngineConfig::with_seed(5) };
        let (acc, stats) = run(&Disc, 100_000, &cfg).unwrap();
        assert_eq!(acc.0, 100_000);
        assert_eq!(stats.accepted, 100_000);
        let pi = 4.0 * stats.acceptance_rate();
        assert!((pi - std::f64::consts::PI).abs() < 1e-3, "{pi}");
    }

    #[test]
    fn independent_of_thread_count() {
        let base = EngineConfig { block_size: 512, wave_blocks: 8, ..EngineConfig::with_seed(11) };
        let one = run(&Disc, 50_000, &EngineConfig { threads: Some(1), ..base.clone() }).unwrap();
        let four = run(&Disc, 50_000, &EngineConfig { threads: Some(4), ..base }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn budget_exhaustion() {
        let cfg = EngineConfig { max_points: 4096, block_size: 1024, ..Default::default() };
        assert!(matches!(run(&Disc, 1_000_000, &cfg), Err(Error::BudgetExhausted { .. })));
    }
}
