//! Estimator-level properties: zero-mass models, closed forms along a
//! sweep, scaling in the mass parameter, and thread-count independence.

use quasimass::analysis::{column, richardson, run_sweep, DecayModel, SweepConfig};
use quasimass::mass::{compute_report, Estimator, MassReport, ReportOptions};
use quasimass::quadrature::build_grid;
use quasimass::surface::SurfaceFamily;
use quasimass::{Chart, MetricSpec};

fn report(spec: &MetricSpec, family: &SurfaceFamily, rho: f64, res: usize, est: &[Estimator]) -> MassReport {
    let grid = build_grid(spec.n, res).unwrap();
    compute_report(spec, family, rho, &grid, est, ReportOptions::default()).unwrap()
}

#[test]
fn zero_mass_models_in_four_dimensions() {
    let cases = [
        (MetricSpec::euclidean(4), SurfaceFamily::coordinate_sphere(), Chart::CartesianAF),
        (MetricSpec::hyperbolic_ball(4), SurfaceFamily::geodesic_sphere(), Chart::BallAH),
    ];
    for (spec, family, chart) in cases {
        for rho in [5.0, 8.0] {
            let r = report(&spec, &family, rho, 12, &Estimator::all_for(chart, 4));
            for e in &r.entries {
                let v = e.value.unwrap();
                assert!(v.abs() <= 1e-8, "{} {} at {rho}: {v:e}", spec.name, e.name);
            }
        }
    }
}

#[test]
fn schwarzschild_closed_forms_along_a_sweep() {
    let spec = MetricSpec::schwarzschild(3, 1.0);
    let est = [Estimator::AdmFlux, Estimator::HawkingAf, Estimator::ByAf];
    for rho in [20.0, 40.0, 80.0, 160.0, 320.0] {
        let r = report(&spec, &SurfaceFamily::coordinate_sphere(), rho, 16, &est);
        let areal = rho * (1.0 + 0.5 / rho).powi(2);
        assert!((r.get("hawking_af").unwrap() - 1.0).abs() <= 1e-9);
        let by = areal * (1.0 - (1.0 - 2.0 / areal).sqrt());
        assert!((r.get("by_af").unwrap() - by).abs() <= 1e-9);
        let adm = (1.0 + 0.5 / rho).powi(3);
        assert!((r.get("adm_flux").unwrap() - adm).abs() <= 1e-11);
    }
    let spec4 = MetricSpec::schwarzschild(4, 1.0);
    for rho in [10.0, 40.0] {
        let r = report(&spec4, &SurfaceFamily::coordinate_sphere(), rho, 12, &[Estimator::AdmFlux, Estimator::HawkingAf]);
        assert!((r.get("adm_flux").unwrap() - (1.0 + 0.5 / (rho * rho))).abs() <= 1e-11);
        assert!((r.get("hawking_af").unwrap() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn af_limits_scale_with_the_mass_parameter() {
    let rhos = vec![50.0, 100.0, 200.0, 400.0];
    let est = vec![Estimator::AdmFlux, Estimator::RicciAf, Estimator::HawkingAf, Estimator::ByAf];
    for m in [0.5, 2.0] {
        let cfg = SweepConfig::new(rhos.clone(), 16, est.clone(), DecayModel::PowerLaw);
        let reports = run_sweep(&MetricSpec::schwarzschild(3, m), &SurfaceFamily::coordinate_sphere(), &cfg).unwrap();
        for name in ["adm_flux", "ricci_af", "by_af"] {
            let limit = richardson(&column(&reports, name), 1.0).unwrap();
            assert!((limit / m - 1.0).abs() <= 1e-4, "m={m} {name}: {limit}");
        }
        for r in &reports {
            assert!((r.get("hawking_af").unwrap() / m - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn ah_symmetric_components_vanish() {
    let spec = MetricSpec::ads_schwarzschild(3, 1.0);
    let r = report(&spec, &SurfaceFamily::geodesic_sphere(), 6.0, 16, &Estimator::all_for(Chart::BallAH, 3));
    for e in &r.entries {
        let odd = !e.name.ends_with("[0]");
        if odd {
            assert!(e.value.unwrap().abs() <= 1e-8, "{}: {:?}", e.name, e.value);
        }
    }
    let h = r.get("hawking_ah[0]").unwrap();
    assert!((h - 1.0).abs() <= 1e-12, "{h}");
}

fn bits(reports: &[MassReport]) -> Vec<(String, Option<u64>)> {
    reports
        .iter()
        .flat_map(|r| r.entries.iter().map(|e| (e.name.clone(), e.value.map(f64::to_bits))))
        .collect()
}

#[test]
fn sweeps_are_bitwise_independent_of_thread_count() {
    let cases = [
        (MetricSpec::af_perturbed(3, 1.0, 0.3, 1.5), SurfaceFamily::perturbed_sphere(0.5), vec![20.0, 40.0]),
        (MetricSpec::ah_perturbed(3, 3.5, 0.2), SurfaceFamily::geodesic_sphere(), vec![4.0, 5.0]),
    ];
    for (spec, family, rhos) in cases {
        let chart = spec.chart().unwrap();
        let mut est = Estimator::all_for(chart, 3);
        est.retain(|e| !e.needs_embedding());
        let cfg = SweepConfig::new(rhos, 12, est, DecayModel::PowerLaw);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_sweep(&spec, &family, &cfg).unwrap())
        };
        let one = bits(&run(1));
        assert_eq!(one, bits(&run(3)));
        assert_eq!(one, bits(&run(8)));
    }
}
