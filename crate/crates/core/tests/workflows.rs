use orthotensor::coefficients::{build_coefficients, residual_check};
use orthotensor::expansion::{reconstruct, ChargeDistribution};
use orthotensor::moments::{build_moment_table, MomentSource, MomentTable};
use orthotensor::polynomials::PolynomialFamily;
use orthotensor::verification::{gram_matrix, verify_printed_weight_coefficients, GramReport};
use orthotensor::weights::{CustomWeight, Weight, WeightRegistry, WeightSpec};
use orthotensor::Error;
use std::sync::Arc;

fn family(spec: &str, dim: usize) -> PolynomialFamily {
    let w = WeightRegistry::with_builtins()
        .build(&WeightSpec::from_json(spec).unwrap())
        .unwrap();
    PolynomialFamily::new(w, dim).unwrap()
}

#[test]
fn registry_builds_every_builtin() {
    let reg = WeightRegistry::with_builtins();
    for name in reg.names() {
        let mut spec = WeightSpec::new(name);
        if matches!(name, "fermi_dirac" | "bose_einstein" | "graphene") {
            spec = spec.with("z", 0.5);
        }
        let w = reg.build(&spec).unwrap();
        assert_eq!(w.name(), name);
        assert_eq!(w.spec().family, name);
    }
}

#[test]
fn chebyshev2_gram_within_float_algebra() {
    let r = gram_matrix(&family(r#"{"family":"chebyshev2"}"#, 2)).unwrap();
    assert!(r.max_deviation <= 1e-9, "{}", r.max_deviation);
}

#[test]
fn bose_einstein_gram_with_numeric_moments() {
    let r = gram_matrix(&family(
        r#"{"family":"bose_einstein","theta":1,"z":0.3}"#,
        2,
    ))
    .unwrap();
    assert_eq!(r.source, MomentSource::Analytic);
    assert!(r.max_deviation <= 1e-7, "{}", r.max_deviation);
}

#[test]
fn gram_report_round_trips_through_json() {
    let r = gram_matrix(&family(r#"{"family":"gaussian"}"#, 2)).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: GramReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.blocks, r.blocks);
    assert!(text.contains("\"D\":2"));
}

#[test]
fn custom_weight_is_orthonormalized_from_quadrature() {
    let w: Arc<dyn Weight> = Arc::new(CustomWeight::new(
        "quartic",
        |x| (-x.powi(4)).exp(),
        f64::INFINITY,
        true,
    ));
    let fam = PolynomialFamily::new(w, 2).unwrap();
    assert_eq!(fam.table.source, MomentSource::Quadrature);
    assert!(residual_check(&fam.coeffs, &fam.table) <= 1e-8);
    assert!(gram_matrix(&fam).unwrap().max_deviation <= 1e-7);
}

#[test]
fn custom_weight_without_decay_is_rejected() {
    let w = CustomWeight::new("flat", |_| 1.0, f64::INFINITY, false);
    assert!(matches!(
        build_moment_table(&w, 2, 4),
        Err(Error::Domain(_))
    ));
}

#[test]
fn printed_closed_forms_examples() {
    let ch1 = verify_printed_weight_coefficients("chebyshev1", 2).unwrap();
    let cb2 = ch1.entries.iter().find(|e| e.0 == "c_bar2").unwrap();
    assert!(cb2.3 < 1e-12);
    let ch2 = verify_printed_weight_coefficients("chebyshev2", 3).unwrap();
    let cp3 = ch2.entries.iter().find(|e| e.0 == "c_prime3").unwrap();
    assert!(cp3.3 < 1e-12);
}

#[test]
fn moment_tables_that_admit_no_polynomials() {
    // J₂ far above one makes Δ₂ imaginary
    let t = MomentTable::from_values(1, vec![1.0, 10.0, 1.0, 1.0, 1.0], MomentSource::Analytic)
        .unwrap();
    assert!(matches!(
        build_coefficients(&t, 1),
        Err(Error::Existence(_))
    ));
}

#[test]
fn yukawa_reconstruction_matches_reference_errors() {
    // reference relative errors from an independent evaluation of the
    // series; the pointwise error at |ξ| = 3 grows from order 2 to order 4
    let fam = family(r#"{"family":"yukawa","mu":1}"#, 3);
    let (u, xi) = ([0.05, 0.0, 0.0], [3.0, 0.0, 0.0]);
    let exact = fam.weight_at(&[2.95, 0.0, 0.0]).unwrap();
    for (n, want) in [
        (0, -0.06462439924096425),
        (2, 0.006489201120314063),
        (4, 0.024782974801533752),
    ] {
        let rel = (reconstruct(&fam, &u, &xi, n).unwrap() - exact) / exact;
        assert!((rel - want).abs() < 1e-9, "N={n}: {rel} vs {want}");
    }
}

#[test]
fn charge_csv_dimension_mismatch() {
    let err = ChargeDistribution::from_csv("0,0,1\n", 3).unwrap_err();
    assert_eq!(err.kind(), "parse");
}
