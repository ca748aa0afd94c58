//! Nelder–Mead section sizing on a reduced grid (7x8) so the example runs in
//! seconds; prints the monotone best-so-far trace summary.

use gridshell::cyclide::{CyclideParams, DEFAULT_FD_STEP};
use gridshell::fem::Material;
use gridshell::grid::build_complete;
use gridshell::membrane::{build_field, SurfaceDef};
use gridshell::optimize::{nelder_mead, OptimizationConfig};

fn main() -> gridshell::Result<()> {
    let field = build_field(
        SurfaceDef::Base {
            params: CyclideParams::paper(),
            h: DEFAULT_FD_STEP,
        },
        7,
        8,
        -0.0005,
        (0.0, 0.075),
    )?;
    let model = build_complete(&field)?;
    let cfg = OptimizationConfig {
        max_iters: 800,
        ..OptimizationConfig::default()
    };
    let result = nelder_mead(&model, &Material::default(), &cfg)?;
    println!(
        "{} iterations, {} evaluations, converged: {}",
        result.iterations, result.evaluations, result.converged
    );
    println!(
        "F = {:.3e} N^2, max |N-N*| = {:.1} N, mean = {:.1} N",
        result.stats.f, result.stats.max_dev, result.stats.mean_dev
    );
    for w in result.trace.windows(2) {
        assert!(w[1].f <= w[0].f, "trace must be monotone");
    }
    println!("trace entries: {}", result.trace.len());
    if let (Some(first), Some(last)) = (result.trace.first(), result.trace.last()) {
        println!("F: {:.3e} -> {:.3e}", first.f, last.f);
    }
    Ok(())
}
