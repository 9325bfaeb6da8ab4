//! Minipatch sampling: uniform without-replacement draws of observation and
//! feature subsets, plus per-patch deterministic random streams.
//!
//! Every random stream in this crate is derived as a pure function of
//! `(master_seed, stream_tag)`, so results are bitwise identical no matter
//! how patches are scheduled across workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Opaque seeded generator. Two handles built from the same
/// `(master_seed, stream_tag)` produce identical streams.
#[derive(Debug, Clone)]
pub struct RngHandle(ChaCha8Rng);

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}

/// Derives an independent random stream from a master seed and a tag.
///
/// The tag selects a ChaCha stream under a key expanded from the master
/// seed, so streams for different tags never overlap.
pub fn derive_rng(master_seed: u64, stream_tag: u64) -> RngHandle {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_tag);
    RngHandle(rng)
}

/// One sampled minipatch: a sorted observation subset and a sorted feature
/// subset drawn from the current candidate pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinipatchIndex {
    /// Observation indices, sorted ascending, |obs| = n.
    pub obs: Vec<usize>,
    /// Global feature ids, sorted ascending, |feats| = min(m, |pool|).
    pub feats: Vec<usize>,
    pub patch_id: usize,
}

/// Draws one minipatch: `n` observations uniformly from `0..total_obs` and
/// `min(m, |pool|)` features uniformly from `pool`, both without replacement.
///
/// Observations are drawn before features; callers relying on stream
/// reproducibility get the same patch for the same handle state.
pub fn sample_minipatch(
    pool: &[usize],
    total_obs: usize,
    n: usize,
    m: usize,
    rng: &mut RngHandle,
    patch_id: usize,
) -> Result<MinipatchIndex> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    if n == 0 || m == 0 {
        return Err(Error::ZeroSubsample { n, m });
    }
    if n > total_obs {
        return Err(Error::SubsampleTooLarge {
            requested: n,
            available: total_obs,
        });
    }
    let mut obs = rand::seq::index::sample(rng, total_obs, n).into_vec();
    obs.sort_unstable();

    let m_eff = m.min(pool.len());
    let mut feats: Vec<usize> = rand::seq::index::sample(rng, pool.len(), m_eff)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    feats.sort_unstable();

    Ok(MinipatchIndex {
        obs,
        feats,
        patch_id,
    })
}
