use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TensorError;
use crate::dsl::ChartSpec;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Default number of points drawn per chart.
pub const DEFAULT_COUNT: usize = 64;

/// Points at which pointwise identities are checked.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlan {
    points: Vec<Vec<f64>>,
    seed: Option<u64>,
}

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut x = 0.0;
    while i > 0 {
        x += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    x
}

impl SamplePlan {
    pub fn explicit(points: Vec<Vec<f64>>) -> Result<Self, TensorError> {
        if points.is_empty() {
            return Err(TensorError::Plan("no sample points".into()));
        }
        let n = points[0].len();
        if points.iter().any(|p| p.len() != n || p.iter().any(|x| !x.is_finite())) {
            return Err(TensorError::Plan("points must be finite and of equal length".into()));
        }
        Ok(Self { points, seed: None })
    }

    /// Shifted Halton points inside the chart's sampling box. The shift is
    /// drawn from `seed`, so plans are reproducible.
    pub fn halton(chart: &ChartSpec, count: usize, seed: u64) -> Result<Self, TensorError> {
        Self::halton_filtered(chart, count, seed, |_| true)
    }

    /// As [`SamplePlan::halton`], keeping only points accepted by `keep`.
    pub fn halton_filtered(
        chart: &ChartSpec,
        count: usize,
        seed: u64,
        keep: impl Fn(&[f64]) -> bool,
    ) -> Result<Self, TensorError> {
        let domain = chart
            .domain
            .as_ref()
            .ok_or_else(|| TensorError::Plan(format!("chart `{}` has no sampling domain", chart.name)))?;
        let n = chart.dim();
        if n > PRIMES.len() {
            return Err(TensorError::Plan(format!("at most {} coordinates supported", PRIMES.len())));
        }
        if count == 0 {
            return Err(TensorError::Plan("count must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mut points = Vec::with_capacity(count);
        let mut index = 1u64;
        let budget = 1000 * count as u64;
        while points.len() < count {
            if index > budget {
                return Err(TensorError::Plan(format!("filter rejected too many points on chart `{}`", chart.name)));
            }
            let p: Vec<f64> = (0..n)
                .map(|d| {
                    let u = (radical_inverse(index, PRIMES[d]) + shift[d]).fract();
                    let (lo, hi) = domain[d];
                    // stay strictly inside the open interval
                    let u = u.clamp(1e-9, 1.0 - 1e-9);
                    lo + (hi - lo) * u
                })
                .collect();
            index += 1;
            if keep(&p) {
                points.push(p);
            }
        }
        Ok(Self { points, seed: Some(seed) })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Keeps the points with the given indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self { points: indices.iter().map(|&i| self.points[i].clone()).collect(), seed: self.seed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_reproducible_and_inside() {
        let chart = ChartSpec::new("c", &["a", "b", "c"])
            .unwrap()
            .with_domain(vec![(0.0, 1.0), (-2.0, 2.0), (5.0, 6.0)])
            .unwrap();
        let p1 = SamplePlan::halton(&chart, 64, 7).unwrap();
        let p2 = SamplePlan::halton(&chart, 64, 7).unwrap();
        let p3 = SamplePlan::halton(&chart, 64, 8).unwrap();
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
        for p in p1.points() {
            assert!(p[0] > 0.0 && p[0] < 1.0 && p[1] > -2.0 && p[1] < 2.0 && p[2] > 5.0 && p[2] < 6.0);
        }
    }

    #[test]
    fn filter_and_missing_domain() {
        let chart = ChartSpec::new("c", &["x"]).unwrap();
        assert!(SamplePlan::halton(&chart, 4, 0).is_err());
        let chart = chart.with_domain(vec![(-1.0, 1.0)]).unwrap();
        let plan = SamplePlan::halton_filtered(&chart, 10, 0, |p| p[0] > 0.0).unwrap();
        assert!(plan.points().iter().all(|p| p[0] > 0.0));
    }
}
