//! A small perturbation riding on a line soliton.

use std::f64::consts::PI;

use kplab::config::random_smooth;
use kplab::perturbation::{simulate_perturbation, PerturbOptions, TravelingBackground};
use kplab::solutions::projected_soliton;
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(512, 16, 20.0 * PI, 2.0 * PI)?;
    let sol = projected_soliton(1.0, &grid, 0.0)?;
    let bg = TravelingBackground::new(&sol.field, sol.speed, Equation::KpI)?;
    let v0 = random_smooth(&grid, 0.01, 40, 4, 3)?;
    let mut opts = PerturbOptions::new(Equation::KpI, 2e-3, 1.0);
    opts.output_interval = 0.25;
    let run = simulate_perturbation(&v0, &bg, &opts, &mut |_, _| Ok(()))?;
    for row in &run.rows {
        println!(
            "t {:4.2}  ||v||^2 {:.6e}  ||v||_(1,0) {:.6e}  E1 {:.6e}  ||g|| {:.1e}",
            row.t, row.v_mass, row.v_hs, row.v_es1, row.g_norm
        );
    }
    Ok(())
}
