//! Deterministic reductions.
//!
//! All norms and means reduce through a fixed pairwise tree whose shape
//! depends only on the slice length, never on thread count or chunking, so
//! diagnostics are reproducible bit-for-bit across runs and machines with the
//! same floating-point semantics. Pairwise summation also keeps the rounding
//! error growth logarithmic in the element count.

/// Pairwise (cascade) sum of a slice.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const BASE: usize = 128;
    if v.len() <= BASE {
        let mut acc = 0.0;
        for &x in v {
            acc += x;
        }
        return acc;
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Pairwise sum of `f(v[i])` without materializing the mapped slice.
pub fn pairwise_sum_by<F: Fn(usize) -> f64 + Copy>(len: usize, f: F) -> f64 {
    sum_by_range(0, len, f)
}

fn sum_by_range<F: Fn(usize) -> f64 + Copy>(start: usize, len: usize, f: F) -> f64 {
    const BASE: usize = 128;
    if len <= BASE {
        let mut acc = 0.0;
        for i in start..start + len {
            acc += f(i);
        }
        return acc;
    }
    let half = len / 2;
    sum_by_range(start, half, f) + sum_by_range(start + half, len - half, f)
}

/// Maximum of `f(v[i])`; `-inf` for an empty range. Exact regardless of
/// evaluation order.
pub fn max_by<F: Fn(usize) -> f64 + Copy>(len: usize, f: F) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for i in 0..len {
        let x = f(i);
        if x > m {
            m = x;
        }
    }
    m
}
