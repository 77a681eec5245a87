//! Shared statistics helpers for the integration suites.

/// One-sample Kolmogorov–Smirnov test of sorted samples against a cdf.
/// Returns (D, p) with the asymptotic p-value (Stephens' small-n correction).
pub fn ks_test<F: Fn(f64) -> f64>(sorted_samples: &[f64], cdf: F) -> (f64, f64) {
    let n = sorted_samples.len();
    assert!(n > 0);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted_samples.iter().enumerate() {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / nf - f;
        let below = f - i as f64 / nf;
        d = d.max(above.max(below));
    }
    let lambda = (nf.sqrt() + 0.12 + 0.11 / nf.sqrt()) * d;
    let mut p = 0.0f64;
    for j in 1..=100 {
        let jf = j as f64;
        let term = 2.0 * (-1.0f64).powi(j + 1) * (-2.0 * jf * jf * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    (d, p.clamp(0.0, 1.0))
}
