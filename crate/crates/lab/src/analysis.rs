//! Post-processing shared by the CLI and the acceptance suite.

use canetoads_core::front::rho_front_position;
use canetoads_core::grid::integrate_theta;
use canetoads_core::supersolution::{log_tilde_u, SupersolParams};
use canetoads_core::{Field, GridSpec, RhoProfile};

/// `ρ`-front of `∫ ũ(t, x, θ) dθ` at `level`, integrated on `grid`.
pub fn envelope_rho_front(grid: GridSpec, t: f64, level: f64, p: &SupersolParams) -> Option<f64> {
    let mut bound = Field::from_fn(grid, |x, th| log_tilde_u(t, x, th, p).exp());
    bound.time = t;
    rho_front_position(&integrate_theta(&bound), level)
}

/// Groups `(t, x, value)` rows into one profile per time, in file order.
pub fn profiles_from_rows(grid: GridSpec, rows: &[Vec<f64>]) -> Vec<RhoProfile> {
    let mut out: Vec<RhoProfile> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(p) if p.time == r[0] => p.values.push(r[2]),
            _ => out.push(RhoProfile { grid, values: vec![r[2]], time: r[0] }),
        }
    }
    out
}
