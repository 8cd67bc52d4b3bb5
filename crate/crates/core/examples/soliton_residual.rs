//! Residual of the line soliton as a traveling wave, for both equations and both
//! amplitude normalizations.

use std::f64::consts::PI;

use kplab::solutions::{line_soliton_with, traveling_residual, SolitonForm};
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let c = 1.0;
    for nx in [256, 512, 1024] {
        let grid = Grid2D::new(nx, 8, 80.0 * PI, 2.0 * PI)?;
        for form in [SolitonForm::Traveling, SolitonForm::Printed] {
            let f = line_soliton_with(c, &grid, form, 0.0)?;
            for eq in [Equation::KpI, Equation::KpII] {
                let r = traveling_residual(&f, c, eq);
                println!(
                    "nx = {nx:5} {:9} {:6} residual {:.3e}  edge {:.1e}",
                    form.name(),
                    eq.name(),
                    r.relative,
                    r.boundary_amplitude
                );
            }
        }
    }
    Ok(())
}
