//! Point samplers for Monte Carlo inner products.

use crate::error::{Error, Result};
use crate::quadrature::{exp_sinh, tanh_sinh, QuadOptions};
use crate::weights::{SamplerKind, Weight};
use rand::Rng;
use rand_distr::StandardNormal;

const GRID_POINTS: usize = 4096;

/// Monotone cubic (Fritsch–Carlson) interpolant through increasing x.
#[derive(Debug, Clone)]
pub struct MonotoneSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(
                "spline needs at least two strictly increasing abscissae".into(),
            ));
        }
        let secant: Vec<f64> = (0..n - 1)
            .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = secant[0];
        m[n - 1] = secant[n - 2];
        for k in 1..n - 1 {
            m[k] = if secant[k - 1] * secant[k] <= 0.0 {
                0.0
            } else {
                let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
                let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
                (w1 + w2) / (w1 / secant[k - 1] + w2 / secant[k])
            };
        }
        Ok(MonotoneSpline { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(k) => return self.y[k],
            Err(0) => 0,
            Err(k) if k >= n => n - 2,
            Err(k) => k - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1]
    }
}

/// Draws ξ with density ∝ ω(|ξ|) (or uniformly in the ball for
/// `UniformBall`) and reports the factor that turns a sample mean of g(ξ)
/// into ∫ω g d^Dξ.
#[derive(Debug, Clone)]
pub struct PointSampler {
    kind: SamplerKind,
    dim: usize,
    inverse_cdf: Option<MonotoneSpline>,
    /// For `Normal` and `RadialInverseCdf` this is I₀; for `UniformBall` the ball volume.
    pub scale: f64,
}

fn uniform_direction<R: Rng>(rng: &mut R, dim: usize, out: &mut [f64]) {
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut().take(dim) {
            *v = rng.sample::<f64, _>(StandardNormal);
            norm2 += *v * *v;
        }
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

impl PointSampler {
    pub fn new(weight: &dyn Weight, dim: usize, i0: f64) -> Result<Self> {
        weight.validate(dim)?;
        let kind = weight.sampler();
        match kind {
            SamplerKind::Normal => Ok(PointSampler {
                kind,
                dim,
                inverse_cdf: None,
                scale: i0,
            }),
            SamplerKind::UniformBall => {
                let d = dim as f64;
                let volume =
                    std::f64::consts::PI.powf(d / 2.0) / crate::special::gamma_fn(d / 2.0 + 1.0)?;
                Ok(PointSampler {
                    kind,
                    dim,
                    inverse_cdf: None,
                    scale: volume,
                })
            }
            SamplerKind::RadialInverseCdf => Ok(PointSampler {
                kind,
                dim,
                inverse_cdf: Some(radial_inverse_cdf(weight, dim)?),
                scale: i0,
            }),
        }
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    /// Fills `out` with a sample; returns the importance factor (1 except for
    /// the uniform-ball sampler, where it is ω at the point).
    pub fn sample<R: Rng>(&self, rng: &mut R, weight: &dyn Weight, out: &mut [f64]) -> f64 {
        match self.kind {
            SamplerKind::Normal => {
                for v in out.iter_mut() {
                    *v = rng.sample::<f64, _>(StandardNormal);
                }
                1.0
            }
            SamplerKind::UniformBall => {
                uniform_direction(rng, self.dim, out);
                let r = rng.random::<f64>().powf(1.0 / self.dim as f64);
                out.iter_mut().for_each(|v| *v *= r);
                weight.radial(r, self.dim)
            }
            SamplerKind::RadialInverseCdf => {
                uniform_direction(rng, self.dim, out);
                let spline = self
                    .inverse_cdf
                    .as_ref()
                    .expect("radial sampler has a spline");
                let r = spline.eval(rng.random::<f64>());
                out.iter_mut().for_each(|v| *v *= r);
                1.0
            }
        }
    }
}

/// Tabulates the radial CDF of ω(r)r^{D−1} on a uniform grid and returns its
/// monotone inverse.
fn radial_inverse_cdf(weight: &dyn Weight, dim: usize) -> Result<MonotoneSpline> {
    let opts = QuadOptions::with_rel_tol(1e-12);
    let power = dim as i32 - 1;
    let density = |r: f64, gap: f64| {
        let w = if gap.is_finite() {
            weight.radial_near_edge(r, gap, dim)
        } else {
            weight.radial(r, dim)
        };
        w * r.powi(power)
    };
    let upper = if weight.xi_max().is_finite() {
        weight.xi_max()
    } else {
        // push the cutoff out until the tail weighted by r^8 is negligible
        let total = exp_sinh(
            |r| density(r, f64::INFINITY),
            0.0,
            weight.length_scale(),
            &opts,
        )?
        .value;
        let mut r = weight
            .breakpoints(dim)
            .into_iter()
            .fold(weight.length_scale(), f64::max);
        loop {
            let tail = exp_sinh(
                |x| density(x, f64::INFINITY) * (x / r).powi(8),
                r,
                weight.length_scale(),
                &opts,
            )?
            .value;
            if tail <= 1e-15 * total {
                break r;
            }
            r *= 1.25;
        }
    };
    let n = GRID_POINTS;
    let radii: Vec<f64> = (0..n).map(|k| upper * k as f64 / (n - 1) as f64).collect();
    let mut cdf = vec![0.0; n];
    for k in 1..n {
        let piece = tanh_sinh(
            |r, gap| {
                let g = if weight.xi_max().is_finite() {
                    (upper - radii[k]) + gap
                } else {
                    f64::INFINITY
                };
                density(r, g)
            },
            radii[k - 1],
            radii[k],
            &opts,
        )?;
        cdf[k] = cdf[k - 1] + piece.value;
    }
    let total = cdf[n - 1];
    // keep strictly increasing abscissae for the inverse
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for k in 0..n {
        let f = cdf[k] / total;
        if xs.last().is_none_or(|&last| f > last) {
            xs.push(f);
            ys.push(radii[k]);
        }
    }
    if let Some(last) = xs.last_mut() {
        *last = 1.0;
    }
    MonotoneSpline::new(xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_monotone_data() {
        let x: Vec<f64> = (0..50).map(|k| k as f64 / 49.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        let s = MonotoneSpline::new(x, y).unwrap();
        assert!((s.eval(0.5) - 0.125).abs() < 1e-4);
        assert_eq!(s.eval(1.0), 1.0);
    }

    #[test]
    fn spline_stays_monotone() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let y = vec![0.0, 0.0, 5.0, 5.1];
        let s = MonotoneSpline::new(x, y).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=300 {
            let v = s.eval(k as f64 / 100.0);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }
}
