//! Mixed space-time norms of linear evolutions across a dilation family.

use std::f64::consts::PI;

use kplab::probes::{strichartz_ratio, AdmissiblePair};
use kplab::spectral::zero_x_mean_project;
use kplab::{Equation, Grid2D, RealField};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(256, 64, 40.0 * PI, 40.0)?;
    for (q, r) in [(4.0, 4.0), (8.0, 4.0), (f64::INFINITY, 2.0)] {
        let pair = AdmissiblePair::new(q, r)?;
        for lambda in [0.5, 1.0, 2.0] {
            let phi = zero_x_mean_project(&RealField::from_fn(&grid, |x, y| {
                let (x, y) = (lambda * x, lambda * lambda * y);
                lambda * lambda * (-x * x - y * y / 4.0).exp()
            }));
            let ratio = strichartz_ratio(&phi, pair, 1.0, Equation::KpI, 32)?;
            println!(
                "(q, r) = ({q}, {r})  beta {:.4}  lambda {lambda:4}  ratio {ratio:.4}",
                pair.beta()
            );
        }
    }
    Ok(())
}
