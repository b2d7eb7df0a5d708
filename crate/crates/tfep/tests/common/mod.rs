//! Helpers shared by the integration test targets.
//!
//! The centerpiece is an independent, deliberately naive re-derivation of
//! the trimmed moment estimators: textbook loops over a sorted slice with
//! no compensated summation and no shared code with the library beyond the
//! index convention. Agreement between the two implementations is asserted
//! to 1e-12 on small samples, where the naive arithmetic is exact enough
//! to serve as ground truth.

#![allow(dead_code)] // each test target compiles this module separately

/// Trim cut `k = floor(tau * n)` with a guard for products such as
/// 0.1 * 30 that land within 1e-9 of an integer but float below it.
pub fn naive_cut(tau: f64, n: usize) -> usize {
    let product = tau * n as f64;
    let nearest = product.round();
    let cut = if (product - nearest).abs() < 1e-9 {
        nearest
    } else {
        product.floor()
    };
    cut as usize
}

/// Plain-arithmetic trimmed moments of `data` under symmetric trimming.
/// Returns `None` when fewer than two observations survive, mirroring the
/// library's refusal to compute moments of a degenerate window.
///
/// Signed moment sums can cancel almost completely (a near-symmetric
/// window has m3 orders of magnitude below its own summands), and below
/// the cancellation floor no two floating-point summation orders agree.
/// The `scale_*` fields record the non-cancelling magnitudes — means of
/// absolute summands — that a comparison tolerance must be anchored to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveMoments {
    pub n_tau: usize,
    pub mean: f64,
    pub variance: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub t_squared: f64,
    pub scale_mean: f64,
    pub scale_m3: f64,
}

pub fn naive_symmetric_moments(data: &[f64], tau: f64) -> Option<NaiveMoments> {
    let n = data.len();
    let k = naive_cut(tau, n);
    let l = n - k;
    if l <= k || l - k < 2 {
        return None;
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let window = &sorted[k..l];
    let m = window.len() as f64;
    let mean = window.iter().sum::<f64>() / m;
    let sq: f64 = window.iter().map(|x| (x - mean).powi(2)).sum();
    let cu: f64 = window.iter().map(|x| (x - mean).powi(3)).sum();
    let qu: f64 = window.iter().map(|x| (x - mean).powi(4)).sum();
    let variance = sq / (m - 1.0);
    let m4 = qu / m;
    Some(NaiveMoments {
        n_tau: window.len(),
        mean,
        variance,
        m2: sq / m,
        m3: cu / m,
        m4,
        t_squared: m4 - variance * variance,
        scale_mean: window.iter().map(|x| x.abs()).sum::<f64>() / m,
        scale_m3: window.iter().map(|x| (x - mean).abs().powi(3)).sum::<f64>() / m,
    })
}

impl NaiveMoments {
    /// Compare a library moment summary against this reference, each
    /// statistic at `tol` of its own natural scale. Returns a description
    /// of the first mismatch.
    pub fn check(
        &self,
        ours: &tfep::estimators::MomentSummary,
        tol: f64,
    ) -> Result<(), String> {
        if ours.n_tau != self.n_tau {
            return Err(format!(
                "window sizes diverged: {} vs {}",
                ours.n_tau, self.n_tau
            ));
        }
        let checks = [
            ("trimmed mean", ours.mean, self.mean, self.scale_mean),
            ("trimmed variance", ours.variance, self.variance, self.m2),
            ("second central moment", ours.m2, self.m2, self.m2),
            ("third central moment", ours.m3, self.m3, self.scale_m3),
            ("fourth central moment", ours.m4, self.m4, self.m4),
            (
                "variance-of-variance plug-in",
                ours.t_squared,
                self.t_squared,
                self.m4.max(self.variance * self.variance),
            ),
        ];
        for (what, a, b, scale) in checks {
            if !close_at_scale(a, b, tol, scale) {
                return Err(format!(
                    "{what}: {a} vs {b} differ by {} (tolerance {tol} at scale {scale})",
                    (a - b).abs()
                ));
            }
        }
        Ok(())
    }
}

/// Closeness anchored to a magnitude: |a - b| <= tol * max(1, scale).
pub fn close_at_scale(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(scale.abs())
}

/// Hybrid absolute/relative closeness: |a - b| <= tol * max(1, |a|, |b|).
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    close_at_scale(a, b, tol, a.abs().max(b.abs()))
}
