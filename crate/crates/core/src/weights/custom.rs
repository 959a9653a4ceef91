use super::{SamplerKind, Weight};
use crate::error::{domain, Result};
use std::fmt;
use std::sync::Arc;

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied radial weight. Moments always come from quadrature.
///
/// For unbounded support the caller must assert that ω decays faster than
/// any power of ξ; without that assertion the weight is rejected at
/// validation time.
#[derive(Clone)]
pub struct CustomWeight {
    name: String,
    radial: RadialFn,
    xi_max: f64,
    super_polynomial_decay: bool,
    length_scale: f64,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("name", &self.name)
            .field("xi_max", &self.xi_max)
            .field("super_polynomial_decay", &self.super_polynomial_decay)
            .finish()
    }
}

impl CustomWeight {
    pub fn new<F>(name: &str, radial: F, xi_max: f64, super_polynomial_decay: bool) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CustomWeight {
            name: name.to_string(),
            radial: Arc::new(radial),
            xi_max,
            super_polynomial_decay,
            length_scale: 1.0,
        }
    }

    pub fn with_length_scale(mut self, scale: f64) -> Self {
        self.length_scale = scale;
        self
    }
}

impl Weight for CustomWeight {
    fn name(&self) -> &str {
        &self.name
    }
    fn radial(&self, xi: f64, _dim: usize) -> f64 {
        if xi > self.xi_max {
            0.0
        } else {
            (self.radial)(xi)
        }
    }
    fn xi_max(&self) -> f64 {
        self.xi_max
    }
    fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return domain("dimension must be at least 1");
        }
        if !(self.xi_max > 0.0) {
            return domain(format!("custom weight '{}' needs xi_max > 0", self.name));
        }
        if self.xi_max.is_infinite() && !self.super_polynomial_decay {
            return domain(format!(
                "custom weight '{}' has unbounded support but no decay assertion",
                self.name
            ));
        }
        Ok(())
    }
    fn has_analytic_moments(&self) -> bool {
        false
    }
    fn length_scale(&self) -> f64 {
        self.length_scale
    }
    fn sampler(&self) -> SamplerKind {
        SamplerKind::RadialInverseCdf
    }
}
