use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::{Corpus, CorpusError, Example};

/// Learning-curve protocol: per trial a held-out test set and nested
/// training samples of increasing size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_sizes: Vec<usize>,
    pub test_size: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub index: usize,
    pub test: Vec<Example>,
    /// `(size, examples)` in the order of `SplitSpec::train_sizes`.
    pub train: Vec<(usize, Vec<Example>)>,
}

/// Rng for one trial: the global seed plus the trial number as the stream,
/// so any trial can be regenerated alone.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Splits the distinct examples of `corpus` into per-trial train/test sets.
/// Every training sample is a prefix of the same shuffled pool, so smaller
/// samples are contained in larger ones.
pub fn split_trials(corpus: &Corpus, spec: &SplitSpec) -> Result<Vec<Trial>, CorpusError> {
    let mut seen = HashSet::new();
    let distinct: Vec<&Example> = corpus
        .examples()
        .iter()
        .filter(|e| seen.insert(*e))
        .collect();
    let largest = spec.train_sizes.iter().copied().max().unwrap_or(0);
    if spec.test_size + largest > distinct.len() {
        return Err(CorpusError::Size(format!(
            "test size {} plus train size {largest} exceeds the {} distinct examples",
            spec.test_size,
            distinct.len()
        )));
    }
    Ok((0..spec.trials)
        .map(|index| {
            let mut rng = trial_rng(spec.seed, index);
            let mut order: Vec<&Example> = distinct.clone();
            order.shuffle(&mut rng);
            let test: Vec<Example> = order[..spec.test_size]
                .iter()
                .map(|e| (*e).clone())
                .collect();
            let pool = &order[spec.test_size..];
            let train = spec
                .train_sizes
                .iter()
                .map(|&s| (s, pool[..s].iter().map(|e| (*e).clone()).collect()))
                .collect();
            Trial { index, test, train }
        })
        .collect())
}
