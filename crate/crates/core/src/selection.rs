//! Argmin with seeded tie-breaking, shared by every greedy selector.

use rand::Rng;

/// Scores within this absolute distance of the minimum count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Index of a minimal score. Near-ties are resolved by a uniform draw from
/// `rng`; no randomness is consumed when the minimizer is unique.
///
/// Panics on an empty slice.
pub fn pick_minimizer<R: Rng + ?Sized>(scores: &[f64], rng: &mut R) -> usize {
    assert!(!scores.is_empty(), "no scores to minimize");
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= min + TIE_TOLERANCE)
        .map(|(i, _)| i)
        .collect();
    match tied.as_slice() {
        [only] => *only,
        _ => tied[rng.gen_range(0..tied.len())],
    }
}
