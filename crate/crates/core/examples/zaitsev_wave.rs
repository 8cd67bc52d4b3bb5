//! The Zaitsev wave: derived constants and traveling residual under each convention.

use kplab::solutions::{traveling_residual, zaitsev, ZaitsevConvention, ZaitsevParams};
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let (alpha, delta) = (1.0, 2.0);
    let params = ZaitsevParams::new(alpha, delta)?;
    println!("kappa = {:.6}, c = {:.6}", params.kappa(), params.c());
    for convention in ZaitsevConvention::all() {
        let grid = Grid2D::new(1024, 128, 60.0, params.y_period(convention))?;
        let w = match zaitsev(alpha, delta, &grid, 0.0, convention) {
            Ok(w) => w,
            Err(e) => {
                println!("{:24} {e}", convention.name());
                continue;
            }
        };
        let r = traveling_residual(&w.field, w.frame_speed, Equation::KpI);
        println!(
            "{:24} y-period {:8.4}  frame speed {:8.4}  residual {:.3e}",
            convention.name(),
            params.y_period(convention),
            w.frame_speed,
            r.relative
        );
    }
    Ok(())
}
