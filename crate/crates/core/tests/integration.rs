use lie_integrate::catalog;
use lie_integrate::factorization::NewtonConfig;
use lie_integrate::integrator::LocalRepresentation;
use lie_integrate::linalg::expm;
use lie_integrate::suite::{check_rng, run_suite, sample_unit, sample_vector, Level, SuiteConfig};
use lie_integrate::BchConfig;

// π(z) = e^{α(x_1)} ⋯ e^{α(x_n)} with x_1 * ⋯ * x_n = z, so it must agree
// with e^{α(z)} computed directly.
#[test]
fn pi_equals_exponential_of_the_representation() {
    for e in catalog::load_catalog().unwrap() {
        let mut rng = check_rng(3, &e.name);
        for d in &e.decompositions {
            for r in &e.representations {
                let lr = LocalRepresentation::new(r.clone(), d.clone(), BchConfig::default(), NewtonConfig::default()).unwrap();
                for _ in 0..5 {
                    let z = sample_vector(&mut rng, &e.algebra, 0.2);
                    let want = expm(r.apply(&z).unwrap().matrix());
                    let got = lr.pi(&z).unwrap();
                    let err = (got.matrix() - &want).amax();
                    assert!(err < 1e-11, "{} {} {}: {err:e}", e.name, d.name(), r.name());
                }
            }
        }
    }
}

#[test]
fn orbit_follows_the_flow() {
    let e = catalog::find_entry("heisenberg3").unwrap();
    let r = e.representation("upper-triangular").unwrap();
    let lr = LocalRepresentation::new(r.clone(), e.decompositions[0].clone(), BchConfig::default(), NewtonConfig::default()).unwrap();
    let mut rng = check_rng(5, "orbit");
    let x = sample_vector(&mut rng, &e.algebra, 0.1);
    let y = sample_vector(&mut rng, &e.algebra, 0.1);
    let v = sample_unit(&mut rng, r.dim_h());
    let ax = r.apply(&x).unwrap();
    let start = lr.orbit(&x, &y, 0.0, &v).unwrap();
    for t in [0.25, 0.5, 1.0] {
        let got = lr.orbit(&x, &y, t, &v).unwrap();
        let want = expm(&(ax.matrix() * t)) * &start;
        assert!((got - want).amax() < 1e-12);
    }
}

#[test]
fn broken_representation_is_rejected() {
    let e = catalog::broken_fixture().unwrap();
    let r = e.representations[0].clone();
    assert!(LocalRepresentation::new(r.clone(), e.decompositions[0].clone(), BchConfig::default(), NewtonConfig::default()).is_err());
    let lr = LocalRepresentation::new_unchecked(r, e.decompositions[0].clone(), BchConfig::default(), NewtonConfig::default()).unwrap();
    let mut rng = check_rng(9, "broken");
    let x = sample_vector(&mut rng, &e.algebra, 0.15);
    let y = sample_vector(&mut rng, &e.algebra, 0.15);
    assert!(lr.multiplicativity_residual(&x, &y).unwrap() > 1e-7);
}

#[test]
fn every_entry_passes_a_short_suite() {
    for e in catalog::load_catalog().unwrap() {
        let report = run_suite(&e, &SuiteConfig::new(11, Level::Quick).with_samples(3));
        let failures: Vec<String> = report.failures().map(|r| format!("{} {:e}", r.check_name, r.residual)).collect();
        assert!(failures.is_empty(), "{}: {failures:?}", e.name);
        assert!(report.witnesses.keys().any(|k| k.starts_with("chart_radius/")));
    }
}

#[test]
fn same_seed_same_report() {
    let e = catalog::find_entry("su2-realified").unwrap();
    let cfg = SuiteConfig::new(5, Level::Quick).with_samples(4);
    let a = run_suite(&e, &cfg).without_timing().to_json_pretty();
    let b = run_suite(&e, &cfg).without_timing().to_json_pretty();
    assert_eq!(a, b);
    let c = run_suite(&e, &SuiteConfig::new(6, Level::Quick).with_samples(4)).without_timing().to_json_pretty();
    assert_ne!(a, c);
}
