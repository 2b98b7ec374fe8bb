use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DatasetError;

/// Seeded shuffle, then `floor(train_fraction * n)` items to train and the
/// rest to test.
pub fn split<T: Clone>(records: &[T], train_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::InvalidFraction(train_fraction));
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    let n = records.len();
    // 1e-9 absorbs products like 0.29 * 100 = 28.999999999999996
    let n_train = ((train_fraction * n as f64) + 1e-9).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train = order[..n_train].iter().map(|&i| records[i].clone()).collect();
    let test = order[n_train..].iter().map(|&i| records[i].clone()).collect();
    Ok((train, test))
}
