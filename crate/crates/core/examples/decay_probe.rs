//! Sup-norm decay of the linear flow and its fitted exponent.

use std::f64::consts::PI;

use kplab::probes::{decay_probe, geometric_times};
use kplab::{Equation, Grid2D, RealField};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(1024, 64, 200.0 * PI, 300.0)?;
    let phi = RealField::from_fn(&grid, |x, y| (-x * x - y * y / 4.0).exp());
    let times = geometric_times(2.0, 10.0, 8);
    for e in [0.0, 0.5, 0.75] {
        let fit = decay_probe(&phi, e, &times, Equation::KpI)?;
        println!(
            "e = {e:4}  slope {:+.4}  expected {:+.4}  window {:.1}",
            fit.slope,
            e / 3.0 - 1.0,
            fit.window
        );
    }
    Ok(())
}
