mod common;

use common::{co_propagating, exact_spectral, gaussian, grid, reference, relative_l2};
use timebin_core::propagation::{relative_l2_error, solve_closed_form, solve_numeric};

const LEVELS: [usize; 4] = [50, 100, 200, 400];

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn split_step_is_second_order_with_walk_off() {
    let d = reference();
    let g = grid(&d, 1024);
    let pulse = gaussian();
    let (e1, e2) = exact_spectral(&d, &pulse, &g, d.length);
    let errors: Vec<f64> = LEVELS
        .iter()
        .map(|&n_z| {
            let run = solve_numeric(&d, &pulse, &g, n_z, &[]).unwrap();
            let out = run.output();
            relative_l2((&out.e1, &out.e2), (&e1, &e2))
        })
        .collect();
    for order in orders(&errors) {
        assert!((order - 2.0).abs() < 0.3, "errors {errors:?}");
    }
}

#[test]
fn equal_velocities_are_exact_at_every_step_size() {
    // Advection and rotation commute, so splitting adds no error.
    let d = co_propagating(3.4);
    let g = grid(&d, 1024);
    let pulse = gaussian();
    let exact = solve_closed_form(&d, &pulse, &g, d.length).unwrap();
    for n_z in LEVELS {
        let run = solve_numeric(&d, &pulse, &g, n_z, &[]).unwrap();
        let err = relative_l2_error(run.output(), &exact);
        assert!(err < 1e-12, "n_z = {n_z}: {err:e}");
    }
}
