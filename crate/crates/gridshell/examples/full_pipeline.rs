//! Full workflow on a reduced grid: field, transformation, optimization
//! before and after, Eq. (14) adjustment, and the report bundle on disk.

use gridshell::config::PipelineConfig;
use gridshell::pipeline::run_and_export;

fn main() -> gridshell::Result<()> {
    let mut cfg = PipelineConfig::paper();
    // keep the example fast: coarser grid, shorter optimization
    cfg.grid.n_xi = 7;
    cfg.grid.n_eta = 8;
    cfg.optimization.max_iters = 600;
    cfg.outputs = std::env::temp_dir().join("gridshell_example_out");
    let out = run_and_export(&cfg)?;
    print!("{}", out.report_text);
    println!("artifacts written to {}", cfg.outputs.display());
    Ok(())
}
