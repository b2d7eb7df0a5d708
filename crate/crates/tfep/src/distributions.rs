//! Reference distribution families: samplers, CDFs/quantiles, and
//! population trimmed-moment oracles.
//!
//! The five families cover the tail-weight spectrum the estimators are
//! designed for: normal (all moments), log-normal (all moments, extreme
//! skew), Pareto (moments up to its shape), Student t (moments up to its
//! degrees of freedom), and Cauchy (no moments at all).
//!
//! Population trimmed moments are computed by integrating the quantile
//! function over a probability window with tanh-sinh quadrature, which
//! remains accurate even when the quantile diverges at a window endpoint.
//! Requests whose answer would be infinite (e.g. the untrimmed variance of
//! a Cauchy) are rejected with an explanatory error rather than returning
//! a large meaningless number.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Open01, StandardNormal};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::tanh_sinh;
use crate::seed::Seed;
use crate::special;

/// Quadrature tolerances for the population-moment oracles. The relative
/// branch matters for quantities too large for a 1e-10 absolute target
/// (log-normal fourth moments easily exceed 1e10).
const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_REL_TOL: f64 = 1e-13;

/// A fully parameterized distribution.
///
/// The text form accepted by [`FromStr`] (and produced by `Display`) is
/// `family:params`:
///
/// * `normal:MEAN,SD`
/// * `lognormal:MU,SIGMA` (parameters of the underlying normal)
/// * `pareto:SCALE,SHAPE`
/// * `student:DF` or `student:DF+SHIFT` (a t distribution shifted by a
///   location constant)
/// * `cauchy:LOCATION,SCALE`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    LogNormal { mu: f64, sigma: f64 },
    Pareto { scale: f64, shape: f64 },
    StudentT { df: f64, shift: f64 },
    Cauchy { location: f64, scale: f64 },
}

/// Population moments of a symmetrically trimmed distribution: the mean,
/// variance, and fourth central moment of X conditional on X lying between
/// its tau and 1-tau quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationTrimmedMoments {
    pub tau: f64,
    pub mean: f64,
    pub variance: f64,
    pub fourth_central: f64,
}

impl DistributionSpec {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        require_finite("normal mean", mean)?;
        require_positive("normal standard deviation", sd)?;
        Ok(DistributionSpec::Normal { mean, sd })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        require_finite("log-normal mu", mu)?;
        require_positive("log-normal sigma", sigma)?;
        Ok(DistributionSpec::LogNormal { mu, sigma })
    }

    pub fn pareto(scale: f64, shape: f64) -> Result<Self> {
        require_positive("Pareto scale", scale)?;
        require_positive("Pareto shape", shape)?;
        Ok(DistributionSpec::Pareto { scale, shape })
    }

    pub fn student_t(df: f64, shift: f64) -> Result<Self> {
        require_positive("Student t degrees of freedom", df)?;
        require_finite("Student t shift", shift)?;
        Ok(DistributionSpec::StudentT { df, shift })
    }

    pub fn cauchy(location: f64, scale: f64) -> Result<Self> {
        require_finite("Cauchy location", location)?;
        require_positive("Cauchy scale", scale)?;
        Ok(DistributionSpec::Cauchy { location, scale })
    }

    /// Draw `n` observations deterministically from the given seed
    /// coordinate. Every draw is finite.
    pub fn sample(&self, n: usize, seed: Seed) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Parameter("sample size must be at least 1".into()));
        }
        let mut rng = seed.rng();
        let mut out = Vec::with_capacity(n);
        match *self {
            DistributionSpec::Normal { mean, sd } => {
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    out.push(mean + sd * z);
                }
            }
            DistributionSpec::LogNormal { mu, sigma } => {
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    out.push((mu + sigma * z).exp());
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                for _ in 0..n {
                    // Inverse CDF on an open uniform: 1-u stays in (0, 1),
                    // so the power never overflows.
                    let u: f64 = rng.sample(Open01);
                    out.push(scale * (1.0 - u).powf(-1.0 / shape));
                }
            }
            DistributionSpec::StudentT { df, shift } => {
                let chi = ChiSquared::new(df).expect("df validated at construction");
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    // Guard against a (measure-zero) underflow to w = 0.
                    let w: f64 = loop {
                        let w = rng.sample(chi);
                        if w > 0.0 {
                            break w;
                        }
                    };
                    out.push(shift + z / (w / df).sqrt());
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                for _ in 0..n {
                    // u in (0, 1) keeps the angle strictly inside
                    // (-pi/2, pi/2), so tan stays finite.
                    let u: f64 = rng.sample(Open01);
                    out.push(location + scale * (std::f64::consts::PI * (u - 0.5)).tan());
                }
            }
        }
        Ok(out)
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Normal { mean, sd } => special::normal_cdf((x - mean) / sd),
            DistributionSpec::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::normal_cdf((x.ln() - mu) / sigma)
                }
            }
            DistributionSpec::Pareto { scale, shape } => {
                if x <= scale {
                    0.0
                } else {
                    -(scale / x).powf(shape) + 1.0
                }
            }
            DistributionSpec::StudentT { df, shift } => {
                let t = x - shift;
                if t == 0.0 {
                    return 0.5;
                }
                let w = df / (df + t * t);
                let half_tail = 0.5 * special::inc_beta(0.5 * df, 0.5, w);
                if t > 0.0 {
                    1.0 - half_tail
                } else {
                    half_tail
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                // atan2 form avoids cancellation in the lower tail.
                let z = (x - location) / scale;
                f64::atan2(1.0, -z) / std::f64::consts::PI
            }
        }
    }

    /// Quantile function for p strictly inside (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !p.is_finite() || p <= 0.0 || p >= 1.0 {
            return Err(Error::Parameter(format!(
                "quantile requires a probability strictly inside (0, 1); got {p}"
            )));
        }
        Ok(self.quantile_pq(p, 1.0 - p))
    }

    /// Tail-stable quantile taking both p and q = 1 - p directly, so either
    /// tail can be resolved to full precision. Callers guarantee p, q > 0.
    pub(crate) fn quantile_pq(&self, p: f64, q: f64) -> f64 {
        debug_assert!(p > 0.0 && q > 0.0);
        match *self {
            DistributionSpec::Normal { mean, sd } => mean + sd * special::normal_quantile_pq(p, q),
            DistributionSpec::LogNormal { mu, sigma } => {
                (mu + sigma * special::normal_quantile_pq(p, q)).exp()
            }
            DistributionSpec::Pareto { scale, shape } => scale * q.powf(-1.0 / shape),
            DistributionSpec::StudentT { df, shift } => {
                if p == q {
                    return shift;
                }
                let s = p.min(q);
                let t = student_tail_quantile(df, s);
                if p < q {
                    shift - t
                } else {
                    shift + t
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                // Q(p) = location + scale * tan(pi (p - 1/2)), written in
                // cotangent form on whichever tail is smaller.
                if p <= 0.5 {
                    location - scale / (std::f64::consts::PI * p).tan()
                } else {
                    location + scale / (std::f64::consts::PI * q).tan()
                }
            }
        }
    }

    /// Whether the one-sided tail contribution to the order-`order` moment
    /// is finite, i.e. whether E[|X|^order · 1{tail}] converges.
    pub(crate) fn tail_moment_finite(&self, upper: bool, order: u32) -> bool {
        match *self {
            DistributionSpec::Normal { .. } | DistributionSpec::LogNormal { .. } => true,
            DistributionSpec::Pareto { shape, .. } => !upper || shape > order as f64,
            DistributionSpec::StudentT { df, .. } => df > order as f64,
            DistributionSpec::Cauchy { .. } => false,
        }
    }

    /// Reject window-moment requests whose value is infinite because an
    /// untrimmed tail lacks the required moment.
    fn ensure_moment_in_window(&self, lo: f64, hi: f64, order: u32) -> Result<()> {
        if lo == 0.0 && !self.tail_moment_finite(false, order) {
            return Err(Error::Numerical(format!(
                "the order-{order} moment of {self} is infinite when the lower tail is \
                 untrimmed; use a trim fraction that removes the lower tail"
            )));
        }
        if hi == 1.0 && !self.tail_moment_finite(true, order) {
            return Err(Error::Numerical(format!(
                "the order-{order} moment of {self} is infinite when the upper tail is \
                 untrimmed; use a trim fraction that removes the upper tail"
            )));
        }
        Ok(())
    }

    /// Mean of X conditional on F(X) in (lo, hi].
    pub(crate) fn window_mean(&self, lo: f64, hi: f64) -> Result<f64> {
        check_window(lo, hi)?;
        self.ensure_moment_in_window(lo, hi, 1)?;
        self.window_integral(lo, hi, |x| x)
    }

    /// Mean and variance of X conditional on F(X) in (lo, hi].
    pub(crate) fn window_mean_variance(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        check_window(lo, hi)?;
        self.ensure_moment_in_window(lo, hi, 2)?;
        let mean = self.window_integral(lo, hi, |x| x)?;
        let var = self.window_integral(lo, hi, |x| (x - mean) * (x - mean))?;
        Ok((mean, var))
    }

    /// Mean, variance, and fourth central moment on a probability window.
    fn window_all(&self, lo: f64, hi: f64) -> Result<(f64, f64, f64)> {
        check_window(lo, hi)?;
        self.ensure_moment_in_window(lo, hi, 4)?;
        let mean = self.window_integral(lo, hi, |x| x)?;
        let var = self.window_integral(lo, hi, |x| (x - mean) * (x - mean))?;
        let m4 = self.window_integral(lo, hi, |x| {
            let d = x - mean;
            let d2 = d * d;
            d2 * d2
        })?;
        Ok((mean, var, m4))
    }

    /// Population moments after symmetric trimming at fraction `tau`: the
    /// exact values the trimmed sample moments converge to.
    ///
    /// `tau = 0` returns the ordinary (untrimmed) moments and therefore
    /// requires the distribution to possess finite fourth moments; heavier
    /// tails produce a descriptive error instead of an infinite answer.
    pub fn population_trimmed_moments(&self, tau: f64) -> Result<PopulationTrimmedMoments> {
        if !tau.is_finite() || !(0.0..0.5).contains(&tau) {
            return Err(Error::Parameter(format!(
                "trim fraction must lie in [0, 0.5); got {tau}"
            )));
        }
        let (mean, variance, fourth_central) = self.window_all(tau, 1.0 - tau)?;
        Ok(PopulationTrimmedMoments {
            tau,
            mean,
            variance,
            fourth_central,
        })
    }

    /// Integrate g(Q(p)) over the window and normalize by its mass. The
    /// quadrature node offsets are re-based so that both p and 1-p reach
    /// the integrand at full precision even against a singular endpoint.
    fn window_integral<G: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: G) -> Result<f64> {
        let mass = hi - lo;
        let integral = tanh_sinh(lo, hi, QUAD_ABS_TOL, QUAD_REL_TOL, |node| {
            let p = lo + node.from_a;
            let q = (1.0 - hi) + node.from_b;
            g(self.quantile_pq(p, q))
        })?;
        Ok(integral.value / mass)
    }
}

/// Upper-tail quantile of a centered Student t: the t >= 0 with
/// P(T > t) = s, found by bisection on the regularized incomplete beta.
fn student_tail_quantile(df: f64, s: f64) -> f64 {
    debug_assert!(s > 0.0 && s <= 0.5);
    let tail = |t: f64| 0.5 * special::inc_beta(0.5 * df, 0.5, df / (df + t * t));
    let mut hi = 1.0;
    while tail(hi) > s {
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if tail(mid) > s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_window(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi > 1.0 || lo >= hi {
        return Err(Error::Parameter(format!(
            "probability window must satisfy 0 <= lo < hi <= 1; got ({lo}, {hi})"
        )));
    }
    Ok(())
}

fn require_finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} must be finite; got {v}")))
    }
}

fn require_positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{what} must be finite and positive; got {v}"
        )))
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistributionSpec::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            DistributionSpec::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
            DistributionSpec::Pareto { scale, shape } => write!(f, "pareto:{scale},{shape}"),
            DistributionSpec::StudentT { df, shift } => {
                if shift == 0.0 {
                    write!(f, "student:{df}")
                } else {
                    write!(f, "student:{df}+{shift}")
                }
            }
            DistributionSpec::Cauchy { location, scale } => write!(f, "cauchy:{location},{scale}"),
        }
    }
}

impl Serialize for DistributionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: &str| {
            Error::Parse(format!(
                "invalid distribution `{s}`: {detail}; expected one of \
                 normal:MEAN,SD | lognormal:MU,SIGMA | pareto:SCALE,SHAPE | \
                 student:DF | student:DF+SHIFT | cauchy:LOCATION,SCALE"
            ))
        };
        let (family, params) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad("missing `:` between family and parameters"))?;
        let parse_num = |text: &str, what: &str| -> Result<f64> {
            text.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("cannot parse {what} `{}`", text.trim())))
        };
        let two = |what1: &str, what2: &str| -> Result<(f64, f64)> {
            let (a, b) = params
                .split_once(',')
                .ok_or_else(|| bad("expected two comma-separated parameters"))?;
            Ok((parse_num(a, what1)?, parse_num(b, what2)?))
        };
        match family.trim() {
            "normal" => {
                let (mean, sd) = two("mean", "standard deviation")?;
                DistributionSpec::normal(mean, sd)
            }
            "lognormal" => {
                let (mu, sigma) = two("mu", "sigma")?;
                DistributionSpec::log_normal(mu, sigma)
            }
            "pareto" => {
                let (scale, shape) = two("scale", "shape")?;
                DistributionSpec::pareto(scale, shape)
            }
            "student" => match params.split_once('+') {
                Some((df, shift)) => DistributionSpec::student_t(
                    parse_num(df, "degrees of freedom")?,
                    parse_num(shift, "shift")?,
                ),
                None => DistributionSpec::student_t(parse_num(params, "degrees of freedom")?, 0.0),
            },
            "cauchy" => {
                let (location, scale) = two("location", "scale")?;
                DistributionSpec::cauchy(location, scale)
            }
            other => Err(bad(&format!("unknown family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(z: f64) -> f64 {
        (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn std_normal_quantile(p: f64) -> f64 {
        special::normal_quantile(p).unwrap()
    }

    // ---- parsing and display ----

    #[test]
    fn parses_all_families() {
        assert_eq!(
            "normal:3,2".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::Normal { mean: 3.0, sd: 2.0 }
        );
        assert_eq!(
            "lognormal:0,1".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::LogNormal { mu: 0.0, sigma: 1.0 }
        );
        assert_eq!(
            "pareto:1,1.5".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::Pareto {
                scale: 1.0,
                shape: 1.5
            }
        );
        assert_eq!(
            "student:2".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::StudentT { df: 2.0, shift: 0.0 }
        );
        assert_eq!(
            "student:2+5".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::StudentT { df: 2.0, shift: 5.0 }
        );
        assert_eq!(
            "cauchy:0,1".parse::<DistributionSpec>().unwrap(),
            DistributionSpec::Cauchy {
                location: 0.0,
                scale: 1.0
            }
        );
        // Whitespace tolerance.
        assert!(" normal: 3 , 2 ".parse::<DistributionSpec>().is_ok());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "normal:3,2",
            "lognormal:0,1",
            "pareto:1,1.5",
            "student:2",
            "student:2+5",
            "cauchy:0,1",
        ] {
            let spec: DistributionSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
            let again: DistributionSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again);
        }
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            "normal",            // no params
            "normal:3",          // one param
            "normal:3,0",        // zero sd
            "normal:3,-1",       // negative sd
            "normal:3,nope",     // non-numeric
            "pareto:0,2",        // zero scale
            "pareto:1,-2",       // negative shape
            "student:0",         // zero df
            "cauchy:0,0",        // zero scale
            "uniform:0,1",       // unknown family
            "lognormal:inf,1",   // non-finite parameter
            "",                  // empty
        ] {
            let res = text.parse::<DistributionSpec>();
            assert!(res.is_err(), "accepted `{text}`");
        }
    }

    // ---- cdf / quantile consistency ----

    fn all_specs() -> Vec<DistributionSpec> {
        vec![
            "normal:3,2".parse().unwrap(),
            "lognormal:0,1".parse().unwrap(),
            "lognormal:1,2".parse().unwrap(),
            "pareto:1,1.5".parse().unwrap(),
            "pareto:2,4".parse().unwrap(),
            "student:2".parse().unwrap(),
            "student:1+5".parse().unwrap(),
            "student:7".parse().unwrap(),
            "cauchy:0,1".parse().unwrap(),
            "cauchy:-3,0.5".parse().unwrap(),
        ]
    }

    #[test]
    fn quantile_cdf_round_trip() {
        let ps = [
            1e-6, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999, 1.0 - 1e-6,
        ];
        for spec in all_specs() {
            for &p in &ps {
                let x = spec.quantile(p).unwrap();
                let back = spec.cdf(x);
                assert!(
                    (back - p).abs() < 1e-10,
                    "{spec}: F(Q({p})) = {back}"
                );
            }
        }
    }

    #[test]
    fn quantile_rejects_out_of_domain() {
        let spec: DistributionSpec = "normal:0,1".parse().unwrap();
        for &p in &[0.0, 1.0, -0.5, 2.0, f64::NAN] {
            assert!(spec.quantile(p).is_err(), "accepted p={p}");
        }
    }

    #[test]
    fn quantiles_match_closed_forms() {
        // Student t with 2 degrees of freedom: Q(p) = (2p-1)/sqrt(2p(1-p)).
        let t2: DistributionSpec = "student:2".parse().unwrap();
        for &p in &[0.6_f64, 0.75, 0.9, 0.975, 0.999] {
            let exact = (2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt();
            let got = t2.quantile(p).unwrap();
            assert!(
                (got - exact).abs() < 1e-10 * exact.abs().max(1.0),
                "t2 quantile({p}): {got} vs {exact}"
            );
        }
        // Cauchy: Q(0.75) = 1 exactly, Q(0.5) = 0.
        let cauchy: DistributionSpec = "cauchy:0,1".parse().unwrap();
        assert!((cauchy.quantile(0.75).unwrap() - 1.0).abs() < 1e-12);
        assert!(cauchy.quantile(0.5).unwrap().abs() < 1e-12);
        // Pareto: Q(p) = scale (1-p)^(-1/shape).
        let pareto: DistributionSpec = "pareto:1,1.5".parse().unwrap();
        for &p in &[0.1_f64, 0.5, 0.9, 0.99] {
            let exact = (1.0 - p).powf(-1.0 / 1.5);
            assert!((pareto.quantile(p).unwrap() - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn quantiles_are_location_scale_equivariant() {
        let base: DistributionSpec = "normal:0,1".parse().unwrap();
        let moved: DistributionSpec = "normal:3,2".parse().unwrap();
        let cauchy0: DistributionSpec = "cauchy:0,1".parse().unwrap();
        let cauchy1: DistributionSpec = "cauchy:-3,0.5".parse().unwrap();
        let t0: DistributionSpec = "student:1".parse().unwrap();
        let t1: DistributionSpec = "student:1+5".parse().unwrap();
        for &p in &[0.01, 0.2, 0.5, 0.8, 0.99] {
            let eq1 = moved.quantile(p).unwrap() - (3.0 + 2.0 * base.quantile(p).unwrap());
            assert!(eq1.abs() < 1e-10);
            let eq2 =
                cauchy1.quantile(p).unwrap() - (-3.0 + 0.5 * cauchy0.quantile(p).unwrap());
            assert!(eq2.abs() < 1e-10);
            let eq3 = t1.quantile(p).unwrap() - (5.0 + t0.quantile(p).unwrap());
            assert!(eq3.abs() < 1e-9);
        }
    }

    // ---- samplers ----

    /// Kolmogorov-Smirnov distance between a sample and the claimed CDF.
    fn ks_distance(spec: &DistributionSpec, sample: &mut [f64]) -> f64 {
        sample.sort_unstable_by(|a, b| a.total_cmp(b));
        let n = sample.len() as f64;
        let mut d: f64 = 0.0;
        for (i, &x) in sample.iter().enumerate() {
            let f = spec.cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            d = d.max((f - lo).abs()).max((hi - f).abs());
        }
        d
    }

    #[test]
    fn samplers_match_their_cdfs() {
        // Deterministic seed; 0.01 at n = 1e5 is ~3.2 sigma of the KS null,
        // while a wrong sampler lands far above it.
        let n = 100_000;
        for (stream, spec) in all_specs().into_iter().enumerate() {
            let mut sample = spec.sample(n, Seed::new(20_240_901, stream as u64)).unwrap();
            assert!(sample.iter().all(|v| v.is_finite()), "{spec}: non-finite draw");
            let d = ks_distance(&spec, &mut sample);
            assert!(d < 0.01, "{spec}: KS distance {d}");
        }
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let spec: DistributionSpec = "pareto:1,1.5".parse().unwrap();
        let a = spec.sample(64, Seed::new(7, 3)).unwrap();
        let b = spec.sample(64, Seed::new(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = spec.sample(64, Seed::new(7, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_rejects_empty_request() {
        let spec: DistributionSpec = "normal:0,1".parse().unwrap();
        assert!(spec.sample(0, Seed::new(1, 0)).is_err());
    }

    // ---- population trimmed moments vs. closed forms ----

    #[test]
    fn normal_trimmed_moments_match_closed_form() {
        // For N(mu, sigma^2) trimmed symmetrically at tau, with z the upper
        // tau quantile and w = 1 - 2 tau:
        //   mean = mu,  variance = sigma^2 (1 - 2 z phi(z) / w).
        let spec: DistributionSpec = "normal:3,2".parse().unwrap();
        for &tau in &[0.05, 0.1, 0.2] {
            let z = std_normal_quantile(1.0 - tau);
            let w = 1.0 - 2.0 * tau;
            let exact_var = 4.0 * (1.0 - 2.0 * z * phi(z) / w);
            let got = spec.population_trimmed_moments(tau).unwrap();
            assert!((got.mean - 3.0).abs() < 1e-9, "tau={tau}: mean {}", got.mean);
            assert!(
                (got.variance - exact_var).abs() < 1e-8,
                "tau={tau}: variance {} vs {exact_var}",
                got.variance
            );
        }
        // Frozen spot value: N(3, 2), tau = 0.1.
        let at_01 = spec.population_trimmed_moments(0.1).unwrap();
        assert!((at_01.variance - 1.750_898_4).abs() < 1e-6);
    }

    #[test]
    fn normal_untrimmed_moments_are_classical() {
        let spec: DistributionSpec = "normal:3,2".parse().unwrap();
        let m = spec.population_trimmed_moments(0.0).unwrap();
        assert!((m.mean - 3.0).abs() < 1e-8);
        assert!((m.variance - 4.0).abs() < 1e-7);
        // Fourth central moment of a normal is 3 sigma^4 = 48.
        assert!((m.fourth_central - 48.0).abs() < 2e-6);
    }

    #[test]
    fn pareto_trimmed_moments_match_closed_form() {
        // Q(p) = xm (1-p)^(-1/a); the window integrals have elementary
        // antiderivatives:
        //   mean = xm [(1-t)^(1-1/a) - t^(1-1/a)] / ((1-1/a) w)
        //   E[X^2] = xm^2 [(1-t)^(1-2/a) - t^(1-2/a)] / ((1-2/a) w)
        let xm = 1.0;
        let a = 1.5;
        let spec: DistributionSpec = "pareto:1,1.5".parse().unwrap();
        for &tau in &[0.05_f64, 0.1, 0.2] {
            let w = 1.0 - 2.0 * tau;
            let e1 = 1.0 - 1.0 / a;
            let e2 = 1.0 - 2.0 / a;
            let mean = xm * ((1.0 - tau).powf(e1) - tau.powf(e1)) / (e1 * w);
            let second = xm * xm * ((1.0 - tau).powf(e2) - tau.powf(e2)) / (e2 * w);
            let var = second - mean * mean;
            let got = spec.population_trimmed_moments(tau).unwrap();
            assert!(
                (got.mean - mean).abs() < 1e-8,
                "tau={tau}: mean {} vs {mean}",
                got.mean
            );
            assert!(
                (got.variance - var).abs() < 1e-8,
                "tau={tau}: var {} vs {var}",
                got.variance
            );
        }
        // Frozen spot values used elsewhere in the suite.
        let m05 = spec.population_trimmed_moments(0.05).unwrap();
        let m10 = spec.population_trimmed_moments(0.10).unwrap();
        let m20 = spec.population_trimmed_moments(0.20).unwrap();
        assert!((m05.mean - 2.048_814_7).abs() < 1e-6);
        assert!((m10.mean - 1.879_989_4).abs() < 1e-6);
        assert!((m10.variance - 0.660_729_4).abs() < 1e-6);
        assert!((m20.mean - 1.717_571_1).abs() < 1e-6);
    }

    #[test]
    fn pareto_with_finite_fourth_moment_matches_raw_moment_algebra() {
        // Pareto with shape 5 has finite moments through order 4:
        // E[X^k] = a xm^k / (a - k).
        let spec: DistributionSpec = "pareto:1,5".parse().unwrap();
        let m = spec.population_trimmed_moments(0.0).unwrap();
        let raw: Vec<f64> = (1..=4).map(|k| 5.0 / (5.0 - k as f64)).collect();
        let mean = raw[0];
        let var = raw[1] - mean * mean;
        let m4 = raw[3] - 4.0 * raw[2] * mean + 6.0 * raw[1] * mean * mean
            - 3.0 * mean.powi(4);
        assert!((m.mean - mean).abs() < 1e-9);
        assert!((m.variance - var).abs() < 1e-9);
        assert!((m.fourth_central - m4).abs() < 1e-8);
    }

    #[test]
    fn student_trimmed_variance_matches_closed_form() {
        // For t with 2 df, Q(p) = (2p-1)/sqrt(2p(1-p)); integrating Q^2 over
        // (tau, 1-tau) gives variance = 2 (atanh(1-2tau) - (1-2tau)) / w.
        let spec: DistributionSpec = "student:2".parse().unwrap();
        let tau: f64 = 0.1;
        let w = 1.0 - 2.0 * tau;
        let exact = 2.0 * (w.atanh() - w) / w;
        let got = spec.population_trimmed_moments(tau).unwrap();
        assert!(got.mean.abs() < 1e-9);
        assert!(
            (got.variance - exact).abs() < 1e-8,
            "variance {} vs {exact}",
            got.variance
        );
        assert!((exact - 0.746_530_7).abs() < 1e-6);
        // A shift moves the mean and nothing else.
        let shifted: DistributionSpec = "student:2+5".parse().unwrap();
        let got_shifted = shifted.population_trimmed_moments(tau).unwrap();
        assert!((got_shifted.mean - 5.0).abs() < 1e-8);
        assert!((got_shifted.variance - got.variance).abs() < 1e-9);
    }

    #[test]
    fn cauchy_trimmed_variance_matches_closed_form() {
        // Integrating tan^2 over the symmetric window:
        //   variance = 2 (tan(pi(1/2 - tau)) / pi - (1/2 - tau)) * ... / w
        // evaluated directly via the tan antiderivative.
        let spec: DistributionSpec = "cauchy:0,1".parse().unwrap();
        let tau = 0.1;
        let w = 1.0 - 2.0 * tau;
        let half_angle = std::f64::consts::PI * (0.5 - tau);
        let exact = (2.0 / std::f64::consts::PI) * (half_angle.tan() - half_angle) / w;
        let got = spec.population_trimmed_moments(tau).unwrap();
        assert!(got.mean.abs() < 1e-9);
        assert!(
            (got.variance - exact).abs() < 1e-8,
            "variance {} vs {exact}",
            got.variance
        );
        assert!((exact - 1.449_142_7).abs() < 1e-6);
    }

    #[test]
    fn lognormal_window_moments_match_mills_ratio_form() {
        // With Q(p) = exp(mu + sigma z(p)),
        //   int_a^b exp(k sigma z(p)) dp
        //     = exp(k^2 sigma^2 / 2) [Phi(z(b) - k sigma) - Phi(z(a) - k sigma)].
        // Upper-only window (0, 0.9) of LN(0,1): mean 1.1191, variance 0.6873.
        let spec: DistributionSpec = "lognormal:0,1".parse().unwrap();
        let (lo, hi) = (0.0, 0.9);
        let zb = std_normal_quantile(hi);
        let mass = hi - lo;
        let mean_exact = 0.5_f64.exp() * special::normal_cdf(zb - 1.0) / mass;
        let second_exact = 2.0_f64.exp() * special::normal_cdf(zb - 2.0) / mass;
        let var_exact = second_exact - mean_exact * mean_exact;
        let (mean, var) = spec.window_mean_variance(lo, hi).unwrap();
        assert!((mean - mean_exact).abs() < 1e-9, "mean {mean} vs {mean_exact}");
        assert!((var - var_exact).abs() < 1e-9, "var {var} vs {var_exact}");
        assert!((mean - 1.119_035_3).abs() < 1e-6);
        assert!((var - 0.687_308_5).abs() < 1e-6);
    }

    #[test]
    fn trimmed_variance_grows_as_trimming_shrinks() {
        // Removing less of the tails must increase the retained variance.
        for spec in ["pareto:1,1.5", "cauchy:0,1", "normal:3,2", "student:2"] {
            let spec: DistributionSpec = spec.parse().unwrap();
            let v20 = spec.population_trimmed_moments(0.2).unwrap().variance;
            let v10 = spec.population_trimmed_moments(0.1).unwrap().variance;
            let v05 = spec.population_trimmed_moments(0.05).unwrap().variance;
            assert!(v20 < v10 && v10 < v05, "{spec}: {v20}, {v10}, {v05}");
        }
    }

    // ---- infinite-moment gating ----

    #[test]
    fn untrimmed_moments_of_heavy_tails_are_rejected() {
        let cases: [(&str, f64); 4] = [
            ("cauchy:0,1", 0.0),
            ("pareto:1,1.5", 0.0),   // fourth moment needs shape > 4
            ("student:2", 0.0),      // fourth moment needs df > 4
            ("pareto:1,4", 0.0),     // shape exactly 4 is still infinite
        ];
        for (text, tau) in cases {
            let spec: DistributionSpec = text.parse().unwrap();
            let err = spec.population_trimmed_moments(tau).unwrap_err();
            assert!(
                matches!(err, Error::Numerical(_)),
                "{text}: wrong error kind {err:?}"
            );
            let msg = err.to_string();
            assert!(msg.contains("infinite"), "{text}: {msg}");
        }
    }

    #[test]
    fn one_sided_windows_gate_the_touched_tail_only() {
        let pareto: DistributionSpec = "pareto:1,1.5".parse().unwrap();
        // Upper tail removed: mean exists even though E[X] barely does.
        assert!(pareto.window_mean(0.0, 0.9).is_ok());
        // Upper tail kept: mean exists (shape > 1) but variance does not.
        assert!(pareto.window_mean(0.1, 1.0).is_ok());
        assert!(pareto.window_mean_variance(0.1, 1.0).is_err());
        let cauchy: DistributionSpec = "cauchy:0,1".parse().unwrap();
        assert!(cauchy.window_mean(0.0, 0.9).is_err());
        assert!(cauchy.window_mean(0.1, 1.0).is_err());
        assert!(cauchy.window_mean(0.1, 0.9).is_ok());
    }

    #[test]
    fn trim_fraction_domain_is_enforced() {
        let spec: DistributionSpec = "normal:0,1".parse().unwrap();
        for &tau in &[-0.01, 0.5, 0.7, f64::NAN] {
            assert!(spec.population_trimmed_moments(tau).is_err(), "accepted {tau}");
        }
    }
}
