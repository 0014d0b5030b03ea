//! Data-parallel helpers. With the `parallel` feature work is split over the
//! rayon pool, otherwise it runs on the calling thread. Both paths give the
//! same results for the same seed because every chunk owns its RNG stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG for stream `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub const CHUNK: u64 = 1 << 12;

fn chunks(total: u64) -> Vec<(u64, u64)> {
    (0..total.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(total - c * CHUNK)))
        .collect()
}

/// Count trials for which `trial` returns true. Each chunk of `CHUNK` trials
/// draws from its own stream.
pub fn count_trials<F>(total: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let run = |(c, len): (u64, u64)| {
        let mut rng = stream_rng(seed, c);
        (0..len).filter(|_| trial(&mut rng)).count() as u64
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        chunks(total).into_par_iter().map(run).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunks(total).into_iter().map(run).sum()
    }
}

/// Sequential reference for `count_trials`, always single threaded.
pub fn count_trials_seq<F>(total: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool,
{
    chunks(total)
        .into_iter()
        .map(|(c, len)| {
            let mut rng = stream_rng(seed, c);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

/// Order-preserving map.
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Returns the first index whose predicate fails, if any.
pub fn find_failure<F>(total: u64, seed: u64, check: F) -> Option<u64>
where
    F: Fn(u64, &mut ChaCha8Rng) -> bool + Sync,
{
    let run = |(c, len): (u64, u64)| {
        let mut rng = stream_rng(seed, c);
        (0..len)
            .map(|i| c * CHUNK + i)
            .find(|&i| !check(i, &mut rng))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        chunks(total).into_par_iter().filter_map(run).min()
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunks(total).into_iter().filter_map(run).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn parallel_matches_sequential() {
        let f = |r: &mut ChaCha8Rng| r.gen::<u8>() < 32;
        assert_eq!(count_trials(50_000, 3, f), count_trials_seq(50_000, 3, f));
    }

    #[test]
    fn chunks_cover_total() {
        let c = chunks(10_000);
        assert_eq!(c.iter().map(|x| x.1).sum::<u64>(), 10_000);
        assert!(chunks(0).is_empty());
    }

    #[test]
    fn first_failure() {
        assert_eq!(
            find_failure(10_000, 0, |i, _| i != 5000 && i != 9000),
            Some(5000)
        );
        assert_eq!(find_failure(100, 0, |_, _| true), None);
    }
}
