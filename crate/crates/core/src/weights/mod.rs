//! Radial weight functions and the name-keyed registry that builds them.
//!
//! Every family implements [`Weight`]. The registry maps a family name to a
//! factory taking the flat parameter map of a [`WeightSpec`], so new families
//! can be added without touching the moment or coefficient code.

mod builtin;
mod custom;

pub use builtin::{
    BoseEinstein, Chebyshev1, Chebyshev2, FermiDirac, Gaussian, Graphene, Legendre, Yukawa,
};
pub use custom::CustomWeight;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// How Monte Carlo points are drawn for a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Normal,
    UniformBall,
    RadialInverseCdf,
}

pub trait Weight: Send + Sync + fmt::Debug {
    /// Registry name of the family.
    fn name(&self) -> &str;

    /// Parameters as they would be written in a weight specification.
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    /// ω as a function of the modulus |ξ|.
    fn radial(&self, xi: f64, dim: usize) -> f64;

    /// ω near the outer edge of a bounded support, with `gap = ξ_max − ξ`
    /// supplied exactly by the integrator.
    fn radial_near_edge(&self, xi: f64, _gap: f64, dim: usize) -> f64 {
        self.radial(xi, dim)
    }

    fn xi_max(&self) -> f64;

    /// Checks parameter and dimension constraints.
    fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        Ok(())
    }

    /// Closed-form I₂N, if the family has one.
    fn moment_analytic(&self, _dim: usize, _n: usize) -> Result<f64> {
        Err(Error::Unsupported(format!(
            "no closed-form moments for weight '{}'; use quadrature",
            self.name()
        )))
    }

    fn has_analytic_moments(&self) -> bool {
        true
    }

    /// Radii at which the radial integrand changes character.
    fn breakpoints(&self, _dim: usize) -> Vec<f64> {
        Vec::new()
    }

    /// Characteristic decay length used to map semi-infinite domains.
    fn length_scale(&self) -> f64 {
        1.0
    }

    fn sampler(&self) -> SamplerKind {
        SamplerKind::RadialInverseCdf
    }

    fn spec(&self) -> WeightSpec {
        WeightSpec {
            family: self.name().to_string(),
            params: self.params(),
        }
    }
}

/// Serializable description of a weight: `{"family": "fermi_dirac", "theta": 1.0, "z": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub family: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, f64>,
}

impl WeightSpec {
    pub fn new(family: impl Into<String>) -> Self {
        WeightSpec {
            family: family.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("weight spec: {e}")))
    }

    pub fn build(&self) -> Result<Arc<dyn Weight>> {
        WeightRegistry::with_builtins().build(self)
    }
}

pub type WeightFactory =
    Box<dyn Fn(&BTreeMap<String, f64>) -> Result<Arc<dyn Weight>> + Send + Sync>;

pub struct WeightRegistry {
    factories: BTreeMap<String, WeightFactory>,
}

impl fmt::Debug for WeightRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightRegistry")
            .field("families", &self.names())
            .finish()
    }
}

impl Default for WeightRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl WeightRegistry {
    pub fn empty() -> Self {
        WeightRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("gaussian", |p| {
            check_keys("gaussian", p, &[])?;
            Ok(Arc::new(Gaussian))
        });
        r.register("legendre", |p| {
            check_keys("legendre", p, &[])?;
            Ok(Arc::new(Legendre))
        });
        r.register("chebyshev1", |p| {
            check_keys("chebyshev1", p, &[])?;
            Ok(Arc::new(Chebyshev1))
        });
        r.register("chebyshev2", |p| {
            check_keys("chebyshev2", p, &[])?;
            Ok(Arc::new(Chebyshev2))
        });
        r.register("fermi_dirac", |p| {
            check_keys("fermi_dirac", p, &["theta", "z"])?;
            Ok(Arc::new(FermiDirac::new(
                theta(p),
                required(p, "fermi_dirac", "z")?,
            )?))
        });
        r.register("bose_einstein", |p| {
            check_keys("bose_einstein", p, &["theta", "z"])?;
            Ok(Arc::new(BoseEinstein::new(
                theta(p),
                required(p, "bose_einstein", "z")?,
            )?))
        });
        r.register("graphene", |p| {
            check_keys("graphene", p, &["theta", "z"])?;
            Ok(Arc::new(Graphene::new(
                theta(p),
                required(p, "graphene", "z")?,
            )?))
        });
        r.register("yukawa", |p| {
            check_keys("yukawa", p, &["mu"])?;
            Ok(Arc::new(Yukawa::new(p.get("mu").copied().unwrap_or(1.0))?))
        });
        r
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&BTreeMap<String, f64>) -> Result<Arc<dyn Weight>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    pub fn build(&self, spec: &WeightSpec) -> Result<Arc<dyn Weight>> {
        let factory = self.factories.get(&spec.family).ok_or_else(|| {
            Error::Parse(format!(
                "unknown weight family '{}' (known: {})",
                spec.family,
                self.names().join(", ")
            ))
        })?;
        factory(&spec.params)
    }
}

fn theta(p: &BTreeMap<String, f64>) -> f64 {
    p.get("theta").copied().unwrap_or(1.0)
}

fn required(p: &BTreeMap<String, f64>, family: &str, key: &str) -> Result<f64> {
    p.get(key)
        .copied()
        .ok_or_else(|| Error::Parse(format!("weight '{family}' requires parameter '{key}'")))
}

fn check_keys(family: &str, p: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    for key in p.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Parse(format!(
                "weight '{family}' does not take parameter '{key}'"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_through_json() {
        let spec =
            WeightSpec::from_json(r#"{"family":"fermi_dirac","theta":1.0,"z":0.5}"#).unwrap();
        assert_eq!(spec.family, "fermi_dirac");
        assert_eq!(spec.params["z"], 0.5);
        let w = spec.build().unwrap();
        assert_eq!(w.spec(), spec);
    }

    #[test]
    fn unknown_family_and_parameters_are_rejected() {
        assert!(matches!(
            WeightSpec::new("laguerre").build(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            WeightSpec::new("gaussian").with("z", 0.1).build(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            WeightSpec::new("fermi_dirac").build(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn custom_factories_can_be_registered() {
        let mut r = WeightRegistry::with_builtins();
        r.register("flat_ball", |_| {
            Ok(Arc::new(CustomWeight::new(
                "flat_ball",
                |_| 1.0,
                1.0,
                false,
            )))
        });
        let w = r.build(&WeightSpec::new("flat_ball")).unwrap();
        assert_eq!(w.xi_max(), 1.0);
        assert_eq!(r.names().len(), 9);
    }
}
