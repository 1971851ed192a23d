mod common;

use std::f64::consts::PI;

use common::{co_propagating, exact_spectral, gaussian, grid, reference, relative_l2};
use timebin_core::propagation::{
    default_step_count, relative_l2_error, solve_analytic, solve_closed_form, solve_numeric,
};

const N_T: usize = 4096;
const BETA_L: [f64; 5] = [0.0, PI / 4.0, PI / 2.0, PI, 3.4];

#[test]
fn numeric_matches_closed_form_for_equal_velocities() {
    for beta_l in BETA_L {
        let d = co_propagating(beta_l);
        let g = grid(&d, N_T);
        let pulse = gaussian();
        let exact = solve_closed_form(&d, &pulse, &g, d.length).unwrap();
        let steps = default_step_count(&d);
        for (n_z, tol) in [(steps, 1e-3), (4 * steps, 1e-5)] {
            let run = solve_numeric(&d, &pulse, &g, n_z, &[]).unwrap();
            let err = relative_l2_error(run.output(), &exact);
            assert!(err < tol, "beta L = {beta_l}, n_z = {n_z}: {err:e}");
        }
    }
}

#[test]
fn closed_form_matches_spectral_reference() {
    let d = co_propagating(3.4);
    let g = grid(&d, 512);
    let pulse = gaussian();
    let exact = solve_closed_form(&d, &pulse, &g, d.length).unwrap();
    let (e1, e2) = exact_spectral(&d, &pulse, &g, d.length);
    let err = relative_l2((&exact.e1, &exact.e2), (&e1, &e2));
    assert!(err < 1e-9, "{err:e}");
}

#[test]
fn analytic_matches_numeric_on_reference_preset() {
    let d = reference();
    let g = grid(&d, N_T);
    let pulse = gaussian();
    let run = solve_numeric(&d, &pulse, &g, default_step_count(&d), &[d.length / 2.0]).unwrap();
    assert_eq!(run.states.len(), 3);
    for state in &run.states[1..] {
        let analytic = solve_analytic(&d, &pulse, &g, state.z).unwrap();
        let err = relative_l2_error(&analytic, state);
        assert!(err < 1e-3, "z = {}: {err:e}", state.z);
    }
}

#[test]
fn numeric_matches_spectral_reference_on_reference_preset() {
    let d = reference();
    let g = grid(&d, 1024);
    let pulse = gaussian();
    let run = solve_numeric(&d, &pulse, &g, 4 * default_step_count(&d), &[]).unwrap();
    let out = run.output();
    let (e1, e2) = exact_spectral(&d, &pulse, &g, d.length);
    let err = relative_l2((&out.e1, &out.e2), (&e1, &e2));
    assert!(err < 1e-4, "{err:e}");
}

#[test]
fn flux_is_conserved_along_the_medium() {
    let d = reference();
    let g = grid(&d, N_T);
    let snapshots: Vec<f64> = (1..10).map(|k| k as f64 * d.length / 10.0).collect();
    let run = solve_numeric(&d, &gaussian(), &g, default_step_count(&d), &snapshots).unwrap();
    assert_eq!(run.states.len(), 11);
    assert!(run.max_flux_deviation() < 1e-3);
    // The scheme is unitary, so the deviation is round-off.
    assert!(run.max_flux_deviation() < 1e-10);
}
