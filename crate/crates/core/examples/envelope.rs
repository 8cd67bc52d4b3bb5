//! Frequency envelope of a field and the weighted norm it controls.

use kplab::config::random_smooth;
use kplab::decomposition::{anisotropic_norm, build_envelope, weighted_norm, Envelope};
use kplab::Grid2D;

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(256, 16, 40.0, 20.0)?;
    let f = random_smooth(&grid, 1.0, 60, 4, 7)?;
    let order = 1.0;
    let env = build_envelope(&f, order, 2.0)?;
    for (k, w) in env.weights().iter().enumerate() {
        println!("N = 2^{:<3} omega_N = {w:.4e}", env.min_exp() + k as i32);
    }
    println!("acceptable: {}", env.is_acceptable());
    println!(
        "weighted norm {:.4e}   H^(s,0) norm {:.4e}",
        weighted_norm(&f, order, &env),
        anisotropic_norm(&f, order, 0.0)
    );
    let flat = Envelope::constant(&grid, 2.0, 1.0);
    println!(
        "constant envelope: weighted / H^(s,0) = {:.4}",
        weighted_norm(&f, order, &flat) / anisotropic_norm(&f, order, 0.0)
    );
    Ok(())
}
