//! Seeded generators for randomized identity checks.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::{DiscPoint, TruncatedSeries};

/// Reproducible source of random series and disc points.
///
/// Coefficient `n` is drawn uniformly from the complex box `[-1,1] x [-1,1]`
/// and scaled by `1/(n+1)^2`, which keeps Wiener norms bounded as the order grows.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform draw from the complex unit box.
    pub fn unit_box(&mut self) -> Complex64 {
        Complex64::new(self.rng.random_range(-1.0..=1.0), self.rng.random_range(-1.0..=1.0))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn series(&mut self, order: usize) -> TruncatedSeries {
        TruncatedSeries::from_fn(order, |n| {
            let s = 1.0 / ((n + 1) * (n + 1)) as f64;
            self.unit_box() * s
        })
    }

    /// Random series with a prescribed constant term.
    pub fn series_with_head(&mut self, order: usize, head: Complex64) -> TruncatedSeries {
        let mut c = self.series(order).into_coeffs();
        c[0] = head;
        TruncatedSeries::from_coeffs(c).expect("nonempty")
    }

    /// Random series whose constant term has modulus in `[min_head, 1]`.
    pub fn series_with_head_at_least(&mut self, order: usize, min_head: f64) -> TruncatedSeries {
        let r = self.uniform(min_head, 1.0);
        let head = Complex64::from_polar(r, self.uniform(0.0, std::f64::consts::TAU));
        self.series_with_head(order, head)
    }

    /// Complex number with modulus uniform in `(r_min, r_max)` and uniform argument.
    pub fn annulus(&mut self, r_min: f64, r_max: f64) -> Complex64 {
        let r = self.uniform(r_min, r_max);
        Complex64::from_polar(r, self.uniform(0.0, std::f64::consts::TAU))
    }

    /// A disc point with `0 < |z| < r_max`; `r_max` must not exceed 1.
    pub fn disc_point(&mut self, r_max: f64) -> DiscPoint {
        loop {
            let z = self.annulus(0.0, r_max);
            if z.norm() > 0.0 {
                if let Ok(p) = DiscPoint::new(z) {
                    return p;
                }
            }
        }
    }
}
