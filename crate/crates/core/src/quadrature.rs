//! Double-exponential quadrature on finite and semi-infinite intervals.
//!
//! Both rules refine by halving the step in `t` and estimate the error from
//! the difference of successive levels. Integrands that return a non-finite
//! value at a node (overflow far in a tail) contribute zero.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_evals: 1_000_000,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evals: usize,
}

const T_MAX_FINITE: f64 = 4.0;
const T_MAX_INFINITE: f64 = 4.5;
const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 14;

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Node generator shared by both rules: returns the contribution of abscissa `t`.
fn refine<G: FnMut(f64) -> f64>(
    mut node: G,
    t_lo: f64,
    t_hi: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut h = 1.0;
    let mut evals = 0usize;
    let mut sum = 0.0;
    let mut k = (t_lo / h).ceil() as i64;
    while (k as f64) * h <= t_hi {
        sum += finite_or_zero(node(k as f64 * h));
        evals += 1;
        k += 1;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = ((t_lo / h).ceil() as i64) | 1;
        if (k as f64) * h < t_lo {
            k += 2;
        }
        let mut added = 0.0;
        while (k as f64) * h <= t_hi {
            added += finite_or_zero(node(k as f64 * h));
            evals += 1;
            k += 2;
        }
        sum += added;
        let next = sum * h;
        err = (next - estimate).abs();
        estimate = next;
        let target = opts.abs_tol.max(opts.rel_tol * estimate.abs());
        if level >= MIN_LEVEL && err <= target {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: err,
                evals,
            });
        }
        if evals >= opts.max_evals {
            break;
        }
    }
    Err(Error::Convergence {
        requested: opts.rel_tol,
        achieved: if estimate != 0.0 {
            err / estimate.abs()
        } else {
            err
        },
        evals,
    })
}

/// Tanh-sinh rule on `[a, b]`. The integrand receives `(x, b - x)` with the
/// gap to the right endpoint computed without cancellation, which lets weights
/// with an endpoint singularity at `b` evaluate it accurately.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::Domain(format!("invalid finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evals: 0,
        });
    }
    let half = 0.5 * (b - a);
    let node = |t: f64| {
        let s = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * s.abs()).exp();
        // 1 - tanh|s| without cancellation
        let one_minus = 2.0 * e / (1.0 + e);
        let cosh_s = s.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (cosh_s * cosh_s);
        if w == 0.0 {
            return 0.0;
        }
        let (x, gap) = if s >= 0.0 {
            let gap = half * one_minus;
            (b - gap, gap)
        } else {
            let from_a = half * one_minus;
            (a + from_a, (b - a) - from_a)
        };
        // near b the gap, not x, carries the information
        if gap <= 0.0 || x < a {
            return 0.0;
        }
        w * f(x, gap)
    };
    refine(node, -T_MAX_FINITE, T_MAX_FINITE, opts)
}

/// Exp-sinh rule on `[a, ∞)` with `x = a + scale·exp(π/2·sinh t)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !a.is_finite() || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!(
            "invalid semi-infinite interval start {a} / scale {scale}"
        )));
    }
    let node = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let offset = scale * e;
        let x = a + offset;
        if offset == 0.0 || x == a {
            return 0.0;
        }
        let w = offset * FRAC_PI_2 * t.cosh();
        w * f(x)
    };
    refine(node, -T_MAX_INFINITE, T_MAX_INFINITE, opts)
}

/// Integrates over `[0, upper]` (finite or infinite) split at `breakpoints`.
/// On the finite pieces the integrand receives `(x, upper - x)`; on an
/// infinite tail the gap is `∞`.
pub fn integrate_radial<F: Fn(f64, f64) -> f64>(
    f: F,
    upper: f64,
    breakpoints: &[f64],
    scale: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > 0.0 && p < upper && p.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![0.0];
    edges.extend(cuts);
    let mut total = QuadResult {
        value: 0.0,
        error_estimate: 0.0,
        evals: 0,
    };
    // Pieces are solved to the full relative tolerance of their own value;
    // all pieces share the evaluation budget.
    let mut piece_opts = *opts;
    let absorb = |r: QuadResult, total: &mut QuadResult, po: &mut QuadOptions| {
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evals += r.evals;
        po.max_evals = opts.max_evals.saturating_sub(total.evals).max(1);
    };
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let r = if upper.is_finite() {
            tanh_sinh(|x, _| f(x, upper - x), lo, hi, &piece_opts)?
        } else {
            tanh_sinh(|x, _| f(x, f64::INFINITY), lo, hi, &piece_opts)?
        };
        absorb(r, &mut total, &mut piece_opts);
    }
    let last = *edges.last().unwrap_or(&0.0);
    let r = if upper.is_finite() {
        tanh_sinh(&f, last, upper, &piece_opts)?
    } else {
        exp_sinh(|x| f(x, f64::INFINITY), last, scale, &piece_opts)?
    };
    absorb(r, &mut total, &mut piece_opts);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_on_interval() {
        let r = tanh_sinh(|x, _| x * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 8.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn endpoint_singularity_through_gap() {
        // ∫₀¹ dx/√(1-x²) = π/2
        let r = tanh_sinh(
            |x, gap| 1.0 / (gap * (1.0 + x)).sqrt(),
            0.0,
            1.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let r = exp_sinh(|x| (-0.5 * x * x).exp(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(
            r.value,
            (std::f64::consts::PI / 2.0).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn log_singularity_at_zero() {
        let r = tanh_sinh(|x, _| -x.ln(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn budget_exhaustion_reports_convergence_error() {
        let opts = QuadOptions {
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_evals: 20,
        };
        let err = tanh_sinh(|x, _| (50.0 * x).sin(), 0.0, 10.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Convergence { .. }));
    }

    #[test]
    fn split_radial_integral() {
        let r = integrate_radial(
            |x, _| (-x).exp(),
            f64::INFINITY,
            &[1.0, 3.0],
            1.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }
}
