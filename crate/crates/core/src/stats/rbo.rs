use std::collections::HashSet;
use std::hash::Hash;

use crate::{Error, Result};

/// Mean prefix overlap of two ranked lists:
/// `(1/depth) * sum_{k=1..depth} |a[..k] ∩ b[..k]| / k`.
///
/// Both lists need at least `depth` entries, unique within the first `depth`.
pub fn sim_rbo<T: Eq + Hash>(a: &[T], b: &[T], depth: usize) -> Result<f64> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    if a.len() < depth || b.len() < depth {
        return Err(Error::InvalidArgument(format!(
            "lists of length {} and {} are shorter than depth {depth}",
            a.len(),
            b.len()
        )));
    }
    let mut seen_a = HashSet::with_capacity(depth);
    let mut seen_b = HashSet::with_capacity(depth);
    let mut overlap = 0usize;
    let mut sum = 0.0;
    for k in 0..depth {
        let (x, y) = (&a[k], &b[k]);
        if !seen_a.insert(x) || !seen_b.insert(y) {
            return Err(Error::InvalidArgument("ranked lists contain duplicates".into()));
        }
        if x == y {
            overlap += 1;
        } else {
            overlap += usize::from(seen_b.contains(x)) + usize::from(seen_a.contains(y));
        }
        sum += overlap as f64 / (k + 1) as f64;
    }
    Ok(sum / depth as f64)
}
