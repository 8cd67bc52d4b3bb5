//! Mass and energy drift of a soliton run, and how the drift scales with the step.

use std::f64::consts::PI;

use kplab::evolution::{simulate, RunOptions};
use kplab::solutions::projected_soliton;
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(512, 8, 20.0 * PI, 2.0 * PI)?;
    let u0 = projected_soliton(2.5, &grid, 0.0)?.field;
    for dt in [4e-3, 2e-3] {
        let mut opts = RunOptions::new(Equation::KpI, dt, 2.0);
        opts.apply_dt_rule = false;
        opts.output_interval = 0.5;
        let run = simulate(&u0, &opts, &mut |_, _| Ok(()))?;
        let q0 = &run.rows[0].quantities;
        for row in &run.rows {
            let q = &row.quantities;
            println!(
                "dt {dt:.0e}  t {:4.2}  mass drift {:+.3e}  energy drift {:+.3e}",
                row.t,
                q.mass / q0.mass - 1.0,
                q.energy / q0.energy - 1.0
            );
        }
    }
    Ok(())
}
