//! Parses a run configuration and evolves the initial condition it describes.

use kplab::config::parse_config;
use kplab::evolution::{simulate, RunOptions};

const CONFIG: &str = "\
equation = kp2
grid.nx = 128
grid.ny = 32
grid.lx = 20pi
grid.ly = 20
time.dt = 0.01
time.t_final = 1
time.output_interval = 0.25
ic.kind = gaussian
ic.amplitude = 1
ic.sx = 2
ic.sy = 3
";

fn main() -> kplab::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let u0 = cfg.initial_field()?;
    let mut opts = RunOptions::new(cfg.equation, cfg.dt, cfg.t_final);
    opts.output_interval = cfg.output_interval;
    let run = simulate(&u0, &opts, &mut |_, _| Ok(()))?;
    for row in &run.rows {
        println!(
            "t {:4.2}  mass {:.12e}  linf {:.4}",
            row.t, row.quantities.mass, row.quantities.linf
        );
    }
    print!("{}", cfg.to_text());
    Ok(())
}
