//! Dilation symmetry: evolving a rescaled datum agrees with rescaling the evolution.

use kplab::config::random_smooth;
use kplab::evolution::{rescale, simulate, RunOptions};
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(64, 32, 20.0, 10.0)?;
    let u0 = random_smooth(&grid, 1.0, 6, 4, 9)?;
    let lambda: f64 = 0.5;
    let t = 0.1;
    let steps = 200.0;
    let run = |f: &kplab::RealField, t_final: f64| -> kplab::Result<kplab::RealField> {
        let mut opts = RunOptions::new(Equation::KpII, t_final / steps, t_final);
        opts.apply_dt_rule = false;
        simulate(f, &opts, &mut |_, _| Ok(()))?.state.field()
    };
    let direct = rescale(&run(&u0, t)?, lambda)?;
    let scaled = run(&rescale(&u0, lambda)?, t / lambda.powi(3))?;
    let err = (&direct - &scaled).max_abs() / direct.max_abs();
    println!("lambda {lambda}  relative mismatch {err:.3e}");
    Ok(())
}
