//! Seeded synthetic datasets, so experiments and tests never depend on
//! external downloads.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::Point;

/// `n` points drawn uniformly from the unit hypercube in `dim` dimensions.
pub fn uniform_vectors(n: usize, dim: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Point::DenseVector((0..dim).map(|_| rng.gen::<f64>()).collect()))
        .collect()
}

/// `n` strings over `alphabet` with lengths drawn from `min_len..=max_len`.
pub fn random_strings(
    n: usize,
    min_len: usize,
    max_len: usize,
    alphabet: &[u8],
    seed: u64,
) -> Vec<Point> {
    assert!(min_len <= max_len && !alphabet.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(min_len..=max_len);
            Point::Text((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect())
        })
        .collect()
}

/// `n` token sets over a universe of `universe` ids with sizes drawn
/// from `min_size..=max_size`, already in canonical sorted form.
pub fn random_token_sets(
    n: usize,
    universe: usize,
    min_size: usize,
    max_size: usize,
    seed: u64,
) -> Vec<Point> {
    assert!(min_size >= 1 && min_size <= max_size && max_size <= universe);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let size = rng.gen_range(min_size..=max_size);
            let mut ids: Vec<u32> = sample(&mut rng, universe, size)
                .into_iter()
                .map(|x| x as u32)
                .collect();
            ids.sort_unstable();
            Point::TokenSet(ids)
        })
        .collect()
}

/// `n` fixed-length sequences over `alphabet`.
pub fn random_sequences(n: usize, len: usize, alphabet: &[u8], seed: u64) -> Vec<Point> {
    assert!(!alphabet.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Point::Sequence((0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect())
        })
        .collect()
}
