//! Fixtures shared by the criterion benches.

use qduhamel_core::sample::Sampler;
use qduhamel_core::{Complex64, QParam, TruncatedSeries};

pub const ORDERS: [usize; 3] = [16, 64, 256];

pub fn q(v: f64) -> QParam {
    QParam::new(v).expect("q inside the guard band")
}

/// A reproducible pair of random series at `order`, the first with `f(0) = 1`.
pub fn pair(order: usize) -> (TruncatedSeries, TruncatedSeries) {
    let mut s = Sampler::new(order as u64);
    (s.series_with_head(order, Complex64::new(1.0, 0.0)), s.series(order))
}
