//! Modified Bessel functions needed by the thermal admittance model.
//!
//! `K0` is evaluated without tabulated minimax coefficients:
//!
//! * `x <= 2`: the ascending series
//!   `K0(x) = -(ln(x/2) + gamma) I0(x) + sum_k (x^2/4)^k / (k!)^2 H_k`,
//!   with `H_k` the harmonic numbers. Cancellation costs ~1.5 digits at
//!   the crossover, leaving ~1e-14 relative accuracy.
//! * `x > 2`: the identity `e^x K0(x) = int exp(-t^2) (t^2 + 2x)^{-1/2} dt`
//!   over the real line (substitute `cosh u = 1 + t^2/x` in the standard
//!   integral representation), evaluated with Gauss-Hermite quadrature.
//!   Nodes and weights come from the Golub-Welsch eigenproblem, so the
//!   whole path is free of magic constants.
//!
//! The exponentially scaled form [`k0e`] is the primary entry point; the
//! admittance model works in scaled space to avoid underflow at large
//! `hbar*omega / 2 kB T`.

use nalgebra::DMatrix;
use once_cell::sync::Lazy;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577215664901532860606512;

/// Number of Gauss-Hermite nodes for the large-argument branch.
const HERMITE_NODES: usize = 96;

static HERMITE: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_hermite(HERMITE_NODES));

/// Gauss-Hermite nodes and weights for weight `exp(-t^2)` via Golub-Welsch.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let beta = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = beta;
        jacobi[(k, k - 1)] = beta;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (node, std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Modified Bessel function of the first kind, order zero (power series).
///
/// Converges quickly for the |x| <= 2 range used by the K0 series branch.
pub fn i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Exponentially scaled modified Bessel function of the second kind,
/// order zero: `k0e(x) = exp(x) K0(x)`. Requires `x > 0`.
pub fn k0e(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        k0_series(x) * x.exp()
    } else {
        let (nodes, weights) = &*HERMITE;
        let two_x = 2.0 * x;
        nodes
            .iter()
            .zip(weights)
            .map(|(&t, &w)| w / (t * t + two_x).sqrt())
            .sum()
    }
}

/// Modified Bessel function of the second kind, order zero.
pub fn k0(x: f64) -> f64 {
    if x <= 0.0 {
        return f64::INFINITY;
    }
    if x <= 2.0 {
        k0_series(x)
    } else {
        k0e(x) * (-x).exp()
    }
}

fn k0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= q / ((k * k) as f64);
        harmonic += 1.0 / k as f64;
        let contrib = term * harmonic;
        sum += contrib;
        if contrib < (sum.abs() + 1.0) * 1e-18 {
            break;
        }
    }
    -( (x / 2.0).ln() + EULER_GAMMA) * i0(x) + sum
}
