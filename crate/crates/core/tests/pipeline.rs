use canetoads_core::front::{envelope_compare, fit_power_law, front_position, FrontSeries, FrontSource};
use canetoads_core::grid::integrate_theta;
use canetoads_core::hj;
use canetoads_core::solver::{make_initial_bump, run, run_with, ModelKind, SolverConfig};
use canetoads_core::spectral::{assemble_subsolution, DiscGrid, SubsolutionConfig, TrajectoryFamily};
use canetoads_core::supersolution::{amplitude_for, log_bar_u, log_tilde_u, SupersolParams};
use canetoads_core::GridSpec;
use proptest::prelude::*;

fn small_run(model: ModelKind, t_end: f64) -> (SolverConfig, canetoads_core::Field) {
    let g = GridSpec::with_spacing(-40.0, 40.0, 0.25, 1.0, 3.0 * t_end, 0.25, 0.05).unwrap();
    let u0 = make_initial_bump(g, 0.0, 2.5, 1.0, 1.0).unwrap();
    let cfg = SolverConfig { save_every: 5, ..SolverConfig::new(g, model, t_end) };
    (cfg, u0)
}

#[test]
fn linearized_run_stays_under_envelope() {
    let (cfg, u0) = small_run(ModelKind::Linearized, 8.0);
    let p = SupersolParams::new(1.0, amplitude_for(&u0, 1.0, 1.0).unwrap(), 1.0).unwrap();
    let g = cfg.grid;
    let mut series = FrontSeries::new(0.1, FrontSource::FieldLevel);
    run_with(&cfg, &u0, |f| {
        for i in 0..g.nx {
            for j in 0..g.ntheta {
                let bound = log_tilde_u(f.time, g.x(i), g.theta(j), &p).exp();
                assert!(f.get(i, j) <= bound + 1e-3 * f.max(), "t={} node ({i},{j})", f.time);
            }
        }
        if f.time > 0.0 {
            if let Some(x) = front_position(f, 0.1) {
                series.push(f.time, x)?;
            }
        }
        Ok(())
    })
    .unwrap();
    assert!(envelope_compare(&series, &p, 0.1, g.hx()).unwrap().passed());
    // early fronts already accelerate faster than linearly
    assert!(fit_power_law(&series, None).unwrap().exponent > 1.0);
}

#[test]
fn local_and_nonlocal_are_ordered_by_linearized() {
    let t_end = 5.0;
    let lin = run(&small_run(ModelKind::Linearized, t_end).0, &small_run(ModelKind::Linearized, t_end).1).unwrap();
    for model in [ModelKind::Local, ModelKind::Nonlocal] {
        let (cfg, u0) = small_run(model, t_end);
        let snaps = run(&cfg, &u0).unwrap();
        assert_eq!(snaps.len(), lin.len());
        for (a, b) in snaps.iter().zip(&lin) {
            assert_eq!(a.time, b.time);
            for (x, y) in a.field.values.iter().zip(&b.field.values) {
                assert!(*x <= y + 1e-12);
            }
            assert_eq!(a.rho, integrate_theta(&a.field));
        }
    }
}

#[test]
fn fixed_subsolution_reaches_one() {
    let f = TrajectoryFamily::fixed(0.0, 60.0).unwrap();
    let disc = DiscGrid::new(20.0, 41).unwrap();
    let sub = assemble_subsolution(&f, &disc, SubsolutionConfig::new(0.1, 1e-2, 200.0)).unwrap();
    assert!((sub.report.sup_vt - 1.0).abs() < 1e-9);
    assert!(sub.report.sup_v0 <= 1e-2 * (1.0 + 1e-12));
    assert!(sub.report.c_r > 0.0);
    // zero outside the ellipse
    assert_eq!(sub.v(100.0, 0.0, 60.0 + 20.5), 0.0);
    assert!(sub.v(100.0, 0.0, 60.0) > 0.0);
}

proptest! {
    // ψ = t on the level set θ + Z² = 2t
    #[test]
    fn psi_equals_t_on_level_set(t in 0.5f64..20.0, frac in 0.0f64..1.0) {
        let theta = frac * 2.0 * t;
        let x = hj::level_set_x(t, theta).unwrap();
        let psi = hj::psi(t, x, theta);
        prop_assert!((psi - t).abs() <= 1e-9 * t);
    }

    // ũ dominates the Hopf-Cole profile everywhere
    #[test]
    fn tilde_dominates_bar(t in 0.0f64..30.0, x in -100.0f64..300.0, th in 1.0f64..80.0) {
        let p = SupersolParams::new(1.0, 2.0, 1.0).unwrap();
        prop_assert!(log_tilde_u(t, x, th, &p) >= log_bar_u(t, x, th, &p) - 1e-9);
    }
}
