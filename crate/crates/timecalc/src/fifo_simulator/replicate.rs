use rayon::prelude::*;

/// Runs `f(r)` for `r = 0..replications` in parallel; results keep index order.
pub fn replicate<T, F>(replications: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..replications).into_par_iter().map(f).collect()
}

/// First packet index kept after dropping the 10% warm-up.
pub fn warmup_start(n: usize) -> usize {
    n / 10
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results() {
        assert_eq!(replicate(8, |r| r * r), vec![0, 1, 4, 9, 16, 25, 36, 49]);
        assert_eq!(warmup_start(5000), 500);
    }
}
