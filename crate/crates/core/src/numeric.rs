//! Small numeric helpers.

/// Pairwise summation: splits recursively and adds the halves, so the
/// result does not depend on how the work would be chunked across
/// threads and rounding error grows like O(log n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), &|i| values[i])
}

/// Pairwise summation over `f(0..len)` without materializing the terms.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(len: usize, term: &F) -> f64 {
    sum_range(0, len, term)
}

fn sum_range<F: Fn(usize) -> f64>(start: usize, len: usize, term: &F) -> f64 {
    if len <= 32 {
        let mut total = 0.0;
        for i in start..start + len {
            total += term(i);
        }
        return total;
    }
    let half = len / 2;
    sum_range(start, half, term) + sum_range(start + half, len - half, term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_sum_for_short_inputs() {
        let values = [1.5, -2.25, 3.0, 0.125];
        assert_eq!(pairwise_sum(&values), 2.375);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[7.0]), 7.0);
    }

    #[test]
    fn split_is_independent_of_offset() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let whole = pairwise_sum(&values);
        let by_index = pairwise_sum_by(values.len(), &|i| values[i]);
        assert_eq!(whole, by_index);
        let exact: f64 = values.iter().map(|&v| v as f64).sum();
        assert!((whole - exact).abs() < 1e-10);
    }
}
