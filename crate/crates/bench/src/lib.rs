//! Shared inputs for the benchmarks.

use feedback_core::spectra::sample_spectrum;

/// Ascending eigenvalues of `(1/m) H H^†` with `m = round(n / beta)`.
pub fn spectrum(n: usize, beta: f64, seed: u64) -> Vec<f64> {
    let m = ((n as f64 / beta).round() as usize).max(1);
    sample_spectrum(n, m, seed).expect("spectrum").eigenvalues
}
