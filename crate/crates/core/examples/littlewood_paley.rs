//! Dyadic decomposition in the x-frequency: band energies and exact reassembly.

use kplab::config::random_smooth;
use kplab::decomposition::{band_norms, lp_project_spectrum, DyadicBand, DyadicRange};
use kplab::spectral::to_spectrum;
use kplab::{Grid2D, Spectrum};

fn main() -> kplab::Result<()> {
    let grid = Grid2D::new(256, 32, 40.0, 20.0)?;
    let f = random_smooth(&grid, 1.0, 100, 8, 42)?;
    let s = to_spectrum(&f);
    let range = DyadicRange::for_grid(&grid);
    let mut sum = Spectrum::zeros(&grid);
    for e in range.exponents() {
        sum = &sum + &lp_project_spectrum(&s, DyadicBand::exact(e))?;
    }
    println!("reassembly error {:.2e}", (&sum - &s).max_abs());
    let total = s.l2_norm();
    for (e, n) in band_norms(&s) {
        println!("N = 2^{e:<3} ||P_N f|| / ||f|| = {:.4}", n / total);
    }
    Ok(())
}
