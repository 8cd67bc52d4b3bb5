//! Growth of the difference of two nearby solutions.

use kplab::config::random_smooth;
use kplab::perturbation::{difference_experiment, DifferenceOptions};
use kplab::{Equation, Grid2D};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(128, 32, 40.0, 20.0)?;
    let u1 = random_smooth(&grid, 0.1, 20, 6, 1)?;
    let bump = random_smooth(&grid, 0.01, 20, 6, 2)?;
    let u2 = &u1 + &bump;
    let opts = DifferenceOptions {
        eq: Equation::KpII,
        dt: 2e-3,
        t_final: 1.0,
        output_interval: 0.25,
        s: 1.0,
    };
    for (t, r) in difference_experiment(&u1, &u2, &opts)? {
        println!("t {t:4.2}  ratio {r:.6}");
    }
    Ok(())
}
