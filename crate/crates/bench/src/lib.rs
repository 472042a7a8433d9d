//! Fixtures shared by the benchmarks.

use mproots_core::{chebyshev_poly, wilkinson, Polynomial, Precision};

/// Chebyshev-quadrature polynomial of degree `n` at `bits`, with its
/// coefficients generated at half that precision.
pub fn chebyshev(n: usize, bits: u32) -> Polynomial {
    let half = Precision::new(bits / 2).expect("precision");
    chebyshev_poly(n, half)
        .expect("chebyshev coefficients")
        .convert(Precision::new(bits).expect("precision"))
}

pub fn wilkinson_poly(n: usize, bits: u32) -> Polynomial {
    wilkinson(n, Precision::new(bits).expect("precision"))
        .expect("wilkinson")
        .0
}
