//! Free (noncommutative) polynomial algebra over `X1..Xn`.

mod permutation;
mod poly;
mod word;

pub use permutation::Permutation;
pub use poly::{distinct_product_sum, Coeff, NcPoly};
pub use word::{words_of_length, words_up_to, Word};

/// `n! / (n - m)!`, the number of injective index tuples of length `m`.
pub fn falling_factorial(n: usize, m: usize) -> u128 {
    (n - m + 1..=n).map(|k| k as u128).product()
}
