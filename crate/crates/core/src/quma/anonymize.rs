use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Maps raw app names to codes `M1..Mn` by a seeded random permutation.
///
/// Duplicate names collapse to one entry. The result depends only on the
/// set of names and the seed, not on input order.
pub fn anonymize<S: AsRef<str>>(names: &[S], seed: u64) -> BTreeMap<String, String> {
    let distinct: Vec<String> =
        names.iter().map(|n| n.as_ref().to_string()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut codes: Vec<usize> = (1..=distinct.len()).collect();
    codes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    distinct.into_iter().zip(codes).map(|(n, k)| (n, format!("M{k}"))).collect()
}
