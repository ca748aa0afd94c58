//! Transport the membrane field through the paper's composition of three
//! pe-rotations and report the transformed patch geometry (corner
//! coordinates after alignment and the rise).

use gridshell::config::{compose_steps, PipelineConfig};
use gridshell::grid::build_complete;
use gridshell::membrane::{build_field, transform_field, SurfaceDef};
use gridshell::report::{geometry_checks, render_geometry};

fn main() -> gridshell::Result<()> {
    let cfg = PipelineConfig::paper();
    let field = build_field(
        SurfaceDef::Base {
            params: cfg.surface.params(),
            h: cfg.surface.fd_step,
        },
        cfg.grid.n_xi,
        cfg.grid.n_eta,
        cfg.load.z,
        cfg.surface.center,
    )?;
    let map = compose_steps(&cfg.transformation)?;
    let transformed = transform_field(&field, &map)?;
    println!(
        "I0: base {:.1} N -> transformed {:.1} N",
        field.i0, transformed.i0
    );
    let model = build_complete(&transformed)?;
    let geo = geometry_checks(&model)?;
    print!("{}", render_geometry(&geo));
    Ok(())
}
