//! Math shims and small numeric utilities shared across the crate.
//!
//! With the `std` feature the float intrinsics come from the standard
//! library; without it they come from `libm`.

#[cfg(feature = "std")]
mod shim {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        x.floor()
    }
    #[inline]
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        x.round()
    }
}

#[cfg(not(feature = "std"))]
mod shim {
    #[inline]
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    #[inline]
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }
    #[inline]
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    #[inline]
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
}

pub(crate) use shim::{abs, ceil, exp, floor, ln, round, sqrt};

/// Finite and strictly positive (rejects NaN, infinities, zero, negatives).
#[inline]
pub(crate) fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Numerically stable standard logistic function 1/(1+e^(-u)).
///
/// Rewritten as e^u/(1+e^u) for u < 0 so extreme arguments saturate to
/// 0 or 1 instead of overflowing.
#[inline]
pub(crate) fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + exp(-u))
    } else {
        let e = exp(u);
        e / (1.0 + e)
    }
}

/// Pairwise (cascade) summation of `f(i)` for `i` in `lo..hi`.
///
/// Error grows with log(n) instead of n, which matters for the long
/// cancellation-heavy sums of the wavelet inner products.
pub(crate) fn pairwise_sum_by<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    let n = hi - lo;
    if n <= 32 {
        let mut s = 0.0;
        for i in lo..hi {
            s += f(i);
        }
        s
    } else {
        let mid = lo + n / 2;
        pairwise_sum_by(lo, mid, f) + pairwise_sum_by(mid, hi, f)
    }
}

#[cfg(test)]
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    pairwise_sum_by(0, v.len(), &|i| v[i])
}

/// Composite trapezoid rule on a grid symmetric about `center`.
///
/// The nodes are generated as `center + (i - n/2)*h`, so for `center = 0`
/// the grid mirrors exactly and an odd integrand cancels pairwise.
pub(crate) fn trapezoid<F: Fn(f64) -> f64>(f: F, center: f64, half_width: f64, step: f64) -> f64 {
    let n_f = round(2.0 * half_width / step);
    let n = if n_f < 2.0 { 2 } else { n_f as usize };
    let h = 2.0 * half_width / (n as f64);
    let half_n = n as f64 / 2.0;
    let node = |i: usize| center + (i as f64 - half_n) * h;
    let total = pairwise_sum_by(0, n + 1, &|i| f(node(i)));
    (total - 0.5 * (f(node(0)) + f(node(n)))) * h
}

/// SplitMix64: tiny deterministic PRNG used for restart jitter and tests.
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform value in [0, 1).
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// Solve the dense system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
/// Only used for the small (waves x waves) saturation systems.
#[allow(clippy::needless_range_loop)] // rows `row` and `col` are borrowed together
pub(crate) fn solve_dense(
    mut a: alloc::vec::Vec<alloc::vec::Vec<f64>>,
    mut b: alloc::vec::Vec<f64>,
) -> Option<alloc::vec::Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if abs(a[row][col]) > abs(a[pivot][col]) {
                pivot = row;
            }
        }
        if abs(a[pivot][col]) < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}
