//! β-Ginibre and Poisson base-station layouts.
//!
//! A β-GPP with density λ and repulsion β ∈ (0, 1] is simulated through its
//! radial representation: the squared moduli are distributed as independent
//! Gamma(i, β/t) variables (t = πλ), each retained with probability β.
//! Angles carry no information for any metric computed here and are drawn
//! i.i.d. uniform.

// Validation deliberately uses negated comparisons: NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use rand::Rng;

use crate::error::{Error, Result};
use crate::num::Real;
use crate::special::{gamma_p, ln_gamma};

/// Parameters of a β-GPP restricted to a disk.
#[derive(Debug, Clone, Copy)]
pub struct GppParams<T> {
    /// Intensity in points per m².
    pub density: T,
    /// Repulsion β ∈ (0, 1]; β = 0 is accepted and means "exact PPP".
    pub beta: T,
    /// Simulation window radius in m.
    pub region_radius: T,
}

impl<T: Real> GppParams<T> {
    pub fn new(density: T, beta: T, region_radius: T) -> Result<Self> {
        if !(density >= T::zero()) || !density.is_finite() {
            return Err(Error::InvalidParameter(format!("density must be >= 0, got {density}")));
        }
        if !(beta >= T::zero() && beta <= T::one()) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 1], got {beta}")));
        }
        if !(region_radius > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "region_radius must be > 0, got {region_radius}"
            )));
        }
        Ok(Self { density, beta, region_radius })
    }

    /// Scaling parameter t = πλ. Derived, never stored.
    pub fn t(&self) -> T {
        T::PI() * self.density
    }
}

/// One sampled point: squared distance from the origin, angle, and the
/// Gamma-order index it was drawn at (order statistics index for PPP draws).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub radius_sq: T,
    pub angle: T,
    pub order: u32,
}

/// An immutable sampled layout for one tier.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    pub points: Vec<Point<T>>,
}

impl<T> Default for PointSet<T> {
    fn default() -> Self {
        Self { points: Vec::new() }
    }
}

impl<T: Real> PointSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closest point; ties broken by lower order index.
    pub fn nearest(&self) -> Option<&Point<T>> {
        self.points.iter().min_by(|a, b| {
            a.radius_sq
                .partial_cmp(&b.radius_sq)
                .unwrap()
                .then(a.order.cmp(&b.order))
        })
    }
}

/// pdf of the Gamma radial variable B_i ~ Gamma(i, β/t), evaluated at a
/// squared distance y. Computed in log space so large orders stay finite.
pub fn gamma_radial_pdf<T: Real>(y: T, order: u32, beta: T, t: T) -> Result<T> {
    if order == 0 {
        return Err(Error::InvalidParameter("gamma order must be >= 1".into()));
    }
    if !(t > T::zero()) {
        return Err(Error::InvalidParameter(format!("scaling parameter t must be > 0, got {t}")));
    }
    if !(beta > T::zero() && beta <= T::one()) {
        return Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    if y < T::zero() {
        return Err(Error::InvalidParameter(format!("squared distance must be >= 0, got {y}")));
    }
    let rate = t / beta;
    if y == T::zero() {
        // y^{i-1} at the origin: the exponential case is the rate, higher orders vanish.
        return Ok(if order == 1 { rate } else { T::zero() });
    }
    let i = T::of(order as f64);
    let ln_pdf = (i - T::one()) * y.ln() - rate * y + i * rate.ln() - ln_gamma(i);
    Ok(ln_pdf.exp())
}

/// cdf of B_i ~ Gamma(i, β/t) at squared distance y.
pub fn gamma_radial_cdf<T: Real>(y: T, order: u32, beta: T, t: T) -> T {
    if y <= T::zero() {
        return T::zero();
    }
    gamma_p(T::of(order as f64), y * t / beta)
}

/// Largest Gamma order kept when sampling or truncating products over a
/// window of squared radius `r_sq`: the smallest J with P(B_J < r_sq) < 1e-6,
/// hard-capped at max(16, 4⌈πλr²/β⌉).
pub fn order_truncation<T: Real>(density: T, beta: T, r_sq: T) -> u32 {
    if density <= T::zero() || beta <= T::zero() {
        return 0;
    }
    let m = (T::PI() * density * r_sq / beta).to_f64_lossy();
    let cap = (4.0 * m.ceil()).max(16.0) as u32;
    let u = T::PI() * density * r_sq / beta; // = r_sq · t / β
    let bound = T::of(1e-6);
    for i in 1..=cap {
        if gamma_p(T::of(i as f64), u) < bound {
            return i;
        }
    }
    cap
}

/// Sample a β-GPP restricted to the window. `density = 0` yields an empty set.
pub fn sample_beta_gpp<T: Real, R: Rng + ?Sized>(params: &GppParams<T>, rng: &mut R) -> PointSet<T> {
    if params.density == T::zero() {
        return PointSet::default();
    }
    if params.beta == T::zero() {
        return sample_ppp(params.density, params.region_radius, rng);
    }
    let r_sq = params.region_radius * params.region_radius;
    let t = params.t();
    let scale = params.beta / t;
    let j_max = order_truncation(params.density, params.beta, r_sq);
    let two_pi = T::of(2.0) * T::PI();
    let mut points = Vec::new();
    for i in 1..=j_max {
        let b = T::gamma_draw(rng, T::of(i as f64), scale);
        let keep = T::unit_draw(rng) < params.beta;
        if keep && b <= r_sq {
            let angle = T::unit_draw(rng) * two_pi;
            points.push(Point { radius_sq: b, angle, order: i });
        }
    }
    PointSet { points }
}

/// Sample a homogeneous PPP on the disk. Orders are radius ranks (1 = closest).
pub fn sample_ppp<T: Real, R: Rng + ?Sized>(density: T, region_radius: T, rng: &mut R) -> PointSet<T> {
    if density <= T::zero() {
        return PointSet::default();
    }
    let r_sq = region_radius * region_radius;
    let mean = T::PI() * density * r_sq;
    let n = T::poisson_draw(rng, mean);
    let two_pi = T::of(2.0) * T::PI();
    let mut points: Vec<Point<T>> = (0..n)
        .map(|_| Point {
            radius_sq: T::unit_draw(rng) * r_sq,
            angle: T::unit_draw(rng) * two_pi,
            order: 0,
        })
        .collect();
    points.sort_by(|a, b| a.radius_sq.partial_cmp(&b.radius_sq).unwrap());
    for (rank, p) in points.iter_mut().enumerate() {
        p.order = rank as u32 + 1;
    }
    PointSet { points }
}

/// Independent thinning; order indices are preserved.
pub fn thin<T: Real, R: Rng + ?Sized>(set: &PointSet<T>, retain_prob: T, rng: &mut R) -> PointSet<T> {
    debug_assert!(retain_prob >= T::zero() && retain_prob <= T::one());
    PointSet {
        points: set
            .points
            .iter()
            .filter(|_| T::unit_draw(rng) < retain_prob)
            .copied()
            .collect(),
    }
}

/// PTDB pre-selection: the closest point of every tier, `None` where a tier
/// has no point in the window.
pub fn nearest_point_per_tier<T: Real>(tiers: &[PointSet<T>]) -> Vec<Option<Point<T>>> {
    tiers.iter().map(|set| set.nearest().copied()).collect()
}

/// Distribution of the squared distance to the nearest retained point of a
/// β-GPP, truncated to the window: f_min(x) = Σ_j β f_{B_j}(x) Π_{i≠j}(1 − β F_{B_i}(x)).
///
/// Precomputes the order truncation once; exposes the density, the cdf, the
/// per-order components (used to marginalize the serving order jointly with
/// the nearest-distance law), and the probability that no retained point
/// falls inside the window.
#[derive(Debug, Clone)]
pub struct NearestRetainedLaw<T> {
    t: T,
    beta: T,
    r_sq: T,
    orders: u32,
    /// Unaccounted mean mass beyond the truncation, β·Σ_{i>J} F_{B_i}(R²).
    pub residual_bound: T,
}

impl<T: Real> NearestRetainedLaw<T> {
    pub fn new(params: &GppParams<T>) -> Result<Self> {
        if !(params.beta > T::zero()) {
            return Err(Error::InvalidParameter(
                "nearest-retained law requires beta > 0 (use the PPP law instead)".into(),
            ));
        }
        let r_sq = params.region_radius * params.region_radius;
        let t = params.t();
        let orders = order_truncation(params.density, params.beta, r_sq);
        // Σ_i F_{B_i}(x) = t·x/β exactly; the truncation tail is the remainder.
        let mut head = T::zero();
        for i in 1..=orders {
            head += gamma_radial_cdf(r_sq, i, params.beta, t);
        }
        let tail = (t * r_sq / params.beta - head).max(T::zero());
        let residual_bound = params.beta * tail;
        if residual_bound > T::of(1e-6) {
            return Err(Error::Nonconvergence(format!(
                "nearest-retained truncation residual {residual_bound} exceeds 1e-6 at J={orders}"
            )));
        }
        Ok(Self { t, beta: params.beta, r_sq, orders, residual_bound })
    }

    pub fn orders(&self) -> u32 {
        self.orders
    }

    /// P(no retained point in the window).
    pub fn absent_prob(&self) -> T {
        let mut p = T::one();
        for i in 1..=self.orders {
            p *= T::one() - self.beta * gamma_radial_cdf(self.r_sq, i, self.beta, self.t);
        }
        p
    }

    /// Density of the nearest retained squared distance at x.
    pub fn pdf(&self, x: T) -> T {
        self.components(x).into_iter().fold(T::zero(), |acc, c| acc + c)
    }

    /// cdf of the nearest retained squared distance at x.
    pub fn cdf(&self, x: T) -> T {
        let mut p = T::one();
        for i in 1..=self.orders {
            p *= T::one() - self.beta * gamma_radial_cdf(x, i, self.beta, self.t);
        }
        T::one() - p
    }

    /// Per-order components of the density: entry j−1 is
    /// β f_{B_j}(x) Π_{i≠j}(1 − β F_{B_i}(x)), the sub-density of "the nearest
    /// retained point has Gamma order j and squared distance x".
    pub fn components(&self, x: T) -> Vec<T> {
        let n = self.orders as usize;
        let mut pdfs = Vec::with_capacity(n);
        let mut survive = Vec::with_capacity(n);
        for i in 1..=self.orders {
            pdfs.push(gamma_radial_pdf(x, i, self.beta, self.t).expect("validated params"));
            survive.push(T::one() - self.beta * gamma_radial_cdf(x, i, self.beta, self.t));
        }
        // prefix[j] = Π_{i<j} survive, suffix[j] = Π_{i>j} survive
        let mut prefix = vec![T::one(); n + 1];
        for j in 0..n {
            prefix[j + 1] = prefix[j] * survive[j];
        }
        let mut suffix = vec![T::one(); n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] * survive[j];
        }
        (0..n).map(|j| self.beta * pdfs[j] * prefix[j] * suffix[j + 1]).collect()
    }
}

/// Free-function form of the nearest-retained density.
pub fn nearest_retained_pdf<T: Real>(x: T, params: &GppParams<T>) -> Result<T> {
    if x < T::zero() {
        return Err(Error::InvalidParameter(format!("squared distance must be >= 0, got {x}")));
    }
    Ok(NearestRetainedLaw::new(params)?.pdf(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_quad;
    use crate::rng::{trial_rng, StreamKind};

    fn params(density: f64, beta: f64, radius: f64) -> GppParams<f64> {
        GppParams::new(density, beta, radius).unwrap()
    }

    #[test]
    fn gamma_radial_pdf_exponential_at_origin_equals_rate() {
        assert_eq!(gamma_radial_pdf(0.0, 1, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn gamma_radial_pdf_order_two_unit_scale() {
        // Gamma(2, 1) density at 1 is e^{-1}.
        let got = gamma_radial_pdf(1.0, 2, 1.0, 1.0).unwrap();
        assert!((got - (-1.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn gamma_radial_pdf_normalizes() {
        for &(order, beta, t) in &[
            (5u32, 0.9, std::f64::consts::PI * 1e-5),
            (1, 0.3, 1.0),
            (12, 1.0, 2.5e-6),
            (40, 0.5, 1e-4),
        ] {
            // mass of Gamma(i, β/t) lives around i·β/t; integrate far past it
            let hi = (4.0 * order as f64 + 40.0) * beta / t;
            let r =
                adaptive_quad(|y| gamma_radial_pdf(y, order, beta, t).unwrap(), 0.0, hi, 1e-10);
            assert!(
                (r.value - 1.0).abs() < 1e-8,
                "i={order} beta={beta} t={t}: integral = {}",
                r.value
            );
        }
    }

    #[test]
    fn gamma_radial_pdf_rejects_bad_domain() {
        assert!(gamma_radial_pdf(1.0, 0, 1.0, 1.0).is_err());
        assert!(gamma_radial_pdf(1.0, 1, 1.0, 0.0).is_err());
        assert!(gamma_radial_pdf(-1.0, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_density_yields_empty_sets() {
        let mut rng = trial_rng(1, StreamKind::PointProcess, 0);
        assert!(sample_beta_gpp(&params(0.0, 1.0, 400.0), &mut rng).is_empty());
        assert!(sample_ppp(0.0f64, 400.0, &mut rng).is_empty());
    }

    #[test]
    fn beta_gpp_mean_count_matches_intensity() {
        // E[N(B(0,R))] = λπR² for every β.
        let p = params(1e-5, 1.0, 400.0);
        let want = std::f64::consts::PI * 1e-5 * 400.0 * 400.0;
        let n_draws = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for trial in 0..n_draws {
            let mut rng = trial_rng(11, StreamKind::PointProcess, trial);
            let c = sample_beta_gpp(&p, &mut rng).len() as f64;
            sum += c;
            sum_sq += c * c;
        }
        let mean = sum / n_draws as f64;
        let var = sum_sq / n_draws as f64 - mean * mean;
        let se = (var / n_draws as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * se, "mean {mean} vs {want} (se {se})");
    }

    #[test]
    fn gpp_count_variance_below_ppp() {
        let n_draws = 10_000;
        let lambda = 1e-5;
        let radius = 400.0;
        let var = |beta: f64, stream: u64| {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for trial in 0..n_draws {
                let mut rng = trial_rng(stream, StreamKind::PointProcess, trial);
                let c = if beta > 0.0 {
                    sample_beta_gpp(&params(lambda, beta, radius), &mut rng).len() as f64
                } else {
                    sample_ppp(lambda, radius, &mut rng).len() as f64
                };
                sum += c;
                sum_sq += c * c;
            }
            let mean = sum / n_draws as f64;
            sum_sq / n_draws as f64 - mean * mean
        };
        let v_gpp = var(1.0, 21);
        let v_ppp = var(0.0, 22);
        assert!(v_gpp < v_ppp, "repulsion must shrink count variance: {v_gpp} vs {v_ppp}");
    }

    #[test]
    fn ppp_count_moments_and_void_probability() {
        let lambda = 2e-5;
        let radius = 300.0;
        let want = std::f64::consts::PI * lambda * radius * radius;
        let n_draws = 10_000;
        let probe = 120.0; // nearest-distance ccdf probe radius
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut beyond = 0u32;
        for trial in 0..n_draws {
            let mut rng = trial_rng(31, StreamKind::PointProcess, trial);
            let set = sample_ppp(lambda, radius, &mut rng);
            let c = set.len() as f64;
            sum += c;
            sum_sq += c * c;
            let nearest_sq = set.nearest().map(|p| p.radius_sq).unwrap_or(f64::INFINITY);
            if nearest_sq > probe * probe {
                beyond += 1;
            }
        }
        let mean = sum / n_draws as f64;
        let var = sum_sq / n_draws as f64 - mean * mean;
        let se_mean = (var / n_draws as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * se_mean, "mean {mean} vs {want}");
        // Poisson: variance equals mean. s.e. of the sample variance ≈ var·√(2/n).
        assert!((var - want).abs() < 3.0 * want * (2.0 / n_draws as f64).sqrt() + 0.05);
        let ccdf = beyond as f64 / n_draws as f64;
        let want_ccdf = (-lambda * std::f64::consts::PI * probe * probe).exp();
        let se = (want_ccdf * (1.0 - want_ccdf) / n_draws as f64).sqrt();
        assert!((ccdf - want_ccdf).abs() < 3.0 * se, "{ccdf} vs {want_ccdf}");
    }

    #[test]
    fn thin_identity_empty_and_fraction() {
        let p = params(5e-5, 1.0, 400.0);
        let mut rng = trial_rng(41, StreamKind::PointProcess, 0);
        let set = sample_beta_gpp(&p, &mut rng);
        assert_eq!(thin(&set, 1.0, &mut rng), set);
        assert!(thin(&set, 0.0, &mut rng).is_empty());

        let mut kept = 0usize;
        let mut total = 0usize;
        for trial in 0..10_000u64 {
            let mut rng = trial_rng(42, StreamKind::PointProcess, trial);
            let set = sample_beta_gpp(&p, &mut rng);
            total += set.len();
            kept += thin(&set, 0.3, &mut rng).len();
        }
        let frac = kept as f64 / total as f64;
        let se = (0.3 * 0.7 / total as f64).sqrt();
        assert!((frac - 0.3).abs() < 3.0 * se, "fraction {frac}");
    }

    #[test]
    fn nearest_selection_and_ties() {
        let mk = |radius_sq: f64, order: u32| Point { radius_sq, angle: 0.0, order };
        let tier1 = PointSet { points: vec![mk(4.0, 1), mk(1.0, 2), mk(9.0, 3)] };
        let tier2 = PointSet { points: vec![mk(0.5, 1)] };
        let empty: PointSet<f64> = PointSet::default();
        let sel = nearest_point_per_tier(&[tier1, tier2, empty]);
        assert_eq!(sel[0].unwrap().radius_sq, 1.0);
        assert_eq!(sel[1].unwrap().radius_sq, 0.5);
        assert!(sel[2].is_none());
        // tie broken by lower order
        let tied = PointSet { points: vec![mk(2.0, 5), mk(2.0, 3)] };
        assert_eq!(tied.nearest().unwrap().order, 3);
    }

    #[test]
    fn per_tier_semantics_returns_one_point_per_tier() {
        let mk = |radius_sq: f64, order: u32| Point { radius_sq, angle: 0.0, order };
        // the two globally closest points sit in tier 2
        let tier1 = PointSet { points: vec![mk(25.0, 1)] };
        let tier2 = PointSet { points: vec![mk(1.0, 1), mk(4.0, 2)] };
        let sel = nearest_point_per_tier(&[tier1, tier2]);
        assert_eq!(sel[0].unwrap().radius_sq, 25.0);
        assert_eq!(sel[1].unwrap().radius_sq, 1.0);
    }

    #[test]
    fn nearest_retained_leading_order_behavior() {
        // As x→0 the density is dominated by the order-1 term: f_min → β f_{B_1}.
        let p = params(1e-5, 1.0, 1000.0);
        let law = NearestRetainedLaw::new(&p).unwrap();
        let x = 1e-4 / p.t(); // deep in the small-x regime
        let f_min = law.pdf(x);
        let f1 = gamma_radial_pdf(x, 1, p.beta, p.t()).unwrap();
        assert!((f_min / f1 - 1.0).abs() < 1e-3, "ratio {}", f_min / f1);
    }

    #[test]
    fn nearest_retained_integrates_to_one_at_beta_one() {
        // Window large enough that P(nearest beyond window) < 1e-9.
        let p = params(1e-5, 1.0, 1200.0);
        let law = NearestRetainedLaw::new(&p).unwrap();
        let r = adaptive_quad(|x| law.pdf(x), 0.0, 1200.0 * 1200.0, 1e-9);
        let total = r.value + law.absent_prob();
        assert!((total - 1.0).abs() < 1e-6, "total mass {total}");
    }

    #[test]
    fn nearest_retained_cdf_matches_pdf_integral() {
        let p = params(2e-5, 0.6, 800.0);
        let law = NearestRetainedLaw::new(&p).unwrap();
        let x = 2.0e4;
        let r = adaptive_quad(|y| law.pdf(y), 0.0, x, 1e-10);
        assert!((r.value - law.cdf(x)).abs() < 1e-8);
    }

    #[test]
    fn components_sum_to_pdf() {
        let p = params(1e-5, 0.7, 600.0);
        let law = NearestRetainedLaw::new(&p).unwrap();
        let x = 5.0e4;
        let total: f64 = law.components(x).iter().sum();
        assert!((total - law.pdf(x)).abs() < 1e-12);
    }
}
