//! Scalar abstraction for the numerical core.
//!
//! All math in this crate is generic over [`Real`], a floating-point scalar
//! built on `num_traits`, with implementations for `f32` and `f64`. The
//! random draws the samplers need (gamma, Poisson, uniforms) are part of the
//! trait so that `rand_distr` stays confined to the two concrete impls.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

/// Floating-point scalar: f32 or f64.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Widen to f64 (for formatting and hashing at the I/O boundary).
    fn to_f64_lossy(self) -> f64;

    /// Draw from Gamma(shape, scale). `shape > 0`, `scale > 0`.
    fn gamma_draw<R: Rng + ?Sized>(rng: &mut R, shape: Self, scale: Self) -> Self;

    /// Draw a Poisson count with the given mean (`mean >= 0`).
    fn poisson_draw<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64;

    /// Uniform draw on [0, 1).
    fn unit_draw<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            fn gamma_draw<R: Rng + ?Sized>(rng: &mut R, shape: Self, scale: Self) -> Self {
                Gamma::<$t>::new(shape, scale)
                    .expect("valid gamma parameters")
                    .sample(rng)
            }

            fn poisson_draw<R: Rng + ?Sized>(rng: &mut R, mean: Self) -> u64 {
                if mean <= 0.0 {
                    return 0;
                }
                Poisson::<$t>::new(mean)
                    .expect("valid poisson mean")
                    .sample(rng) as u64
            }

            fn unit_draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
