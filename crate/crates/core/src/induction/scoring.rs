//! Information gain over positives and implicit negative mass.

use crate::dataset::Example;
use crate::logic::{unifiable, variable_fraction, Term};

/// `-log2(pos / (pos + neg_mass))`; infinite when `pos` is zero.
pub fn info(pos_count: usize, neg_mass: f64) -> f64 {
    if pos_count == 0 {
        return f64::INFINITY;
    }
    let p = pos_count as f64;
    -(p / (p + neg_mass.max(0.0))).log2()
}

/// Positive and negative content of a training state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StateScore {
    pub positives: usize,
    pub neg_mass: f64,
}

impl StateScore {
    pub fn info(&self) -> f64 {
        info(self.positives, self.neg_mass)
    }
}

/// `|P'| * (I(T) - I(T'))`, zero when nothing is retained.
pub fn gain(before: StateScore, after: StateScore) -> f64 {
    if after.positives == 0 || before.positives == 0 {
        return 0.0;
    }
    after.positives as f64 * (before.info() - after.info())
}

/// `max(0, u^v - p)` for an answer whose output argument is `output`.
/// `v` is the variable fraction of the output; `p` counts the distinct
/// outputs, among `positives` with the same `input`, that unify with it.
pub fn implicit_negative_mass(output: &Term, input: &Term, u: u64, positives: &[Example]) -> f64 {
    let mut outputs: Vec<&Term> = positives
        .iter()
        .filter(|e| &e.input == input)
        .map(|e| &e.output)
        .collect();
    outputs.sort();
    outputs.dedup();
    let p = outputs.iter().filter(|o| unifiable(output, o)).count();
    mass_from(output, u, p)
}

/// `max(0, u^v - p)` with `p` already counted.
pub fn mass_from(output: &Term, u: u64, p: usize) -> f64 {
    let v = variable_fraction(output);
    ((u as f64).powf(v) - p as f64).max(0.0)
}
