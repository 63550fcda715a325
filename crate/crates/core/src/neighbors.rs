use std::cmp::Ordering;

use crate::scalar::Scalar;

/// Orders by distance, then by candidate index.
#[inline]
fn by_dist_then_index<T: Scalar>(a: &(T, usize), b: &(T, usize)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// The `k` smallest `(distance, index)` pairs, sorted ascending; equal
/// distances are broken by the smaller index.
pub(crate) fn k_smallest<T: Scalar>(mut scored: Vec<(T, usize)>, k: usize) -> Vec<(T, usize)> {
    if k == 0 {
        return Vec::new();
    }
    if scored.len() > k {
        scored.select_nth_unstable_by(k - 1, by_dist_then_index);
        scored.truncate(k);
    }
    scored.sort_unstable_by(by_dist_then_index);
    scored
}
