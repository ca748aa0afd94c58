//! Command-line entry point: configuration-driven pipeline stages plus a
//! seeded invariant self-check.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridshell::config::{compose_steps, PipelineConfig};
use gridshell::error::Result;
use gridshell::export;
use gridshell::grid::build_complete;
use gridshell::laguerre::{
    transform_contact_element, ContactElement, LaguerreMap, PeRotationPlane,
};
use gridshell::membrane::{build_field, transform_field, SurfaceDef};
use gridshell::optimize::{nelder_mead, stress_ratio_adjust};
use gridshell::pipeline::{manifest_for, run_and_export, run_pipeline};

#[derive(Parser)]
#[command(
    name = "gridshell",
    about = "Gridshell design via membrane forces on cyclide patches and Laguerre transformations"
)]
struct Cli {
    /// JSON pipeline configuration; defaults to the built-in paper setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `outputs` field.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run the seeded invariant suite before the command.
    #[arg(long, global = true)]
    seed_check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the base surface; emit field CSV and OBJ.
    Surface,
    /// Apply the configured transformation; emit transformed field CSV/OBJ.
    Transform,
    /// Build the gridshell with targets and loads; emit model JSON/OBJ.
    Target,
    /// Optimize section radii on the base model; emit trace and result.
    Optimize,
    /// Eq. (14) stress-ratio adjustment path on the transformed model.
    Adjust,
    /// Full run, printing the report tables and geometry checks.
    Report,
    /// Full run with every artifact written to the output directory.
    Pipeline,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::from_path(p)?,
        None => PipelineConfig::paper(),
    };
    if let Some(out) = &cli.out {
        cfg.outputs = out.clone();
    }
    Ok(cfg)
}

fn base_field(cfg: &PipelineConfig) -> Result<gridshell::membrane::MembraneField> {
    build_field(
        SurfaceDef::Base {
            params: cfg.surface.params(),
            h: cfg.surface.fd_step,
        },
        cfg.grid.n_xi,
        cfg.grid.n_eta,
        cfg.load.z,
        cfg.surface.center,
    )
}

fn run(cli: &Cli) -> Result<()> {
    if cli.seed_check {
        seed_check()?;
    }
    let cfg = load_config(cli)?;
    let dir = cfg.outputs.clone();
    match cli.command {
        Command::Surface => {
            let field = base_field(&cfg)?;
            export::write_field_csv(&dir.join("base_field.csv"), &field)?;
            export::write_field_obj(&dir.join("base_surface.obj"), &field)?;
            println!("wrote base field to {}", dir.display());
        }
        Command::Transform => {
            let field = base_field(&cfg)?;
            let map = compose_steps(&cfg.transformation)?;
            let t = transform_field(&field, &map)?;
            export::write_field_csv(&dir.join("transformed_field.csv"), &t)?;
            export::write_field_obj(&dir.join("transformed_surface.obj"), &t)?;
            println!("wrote transformed field to {}", dir.display());
        }
        Command::Target => {
            let field = base_field(&cfg)?;
            let model = build_complete(&field)?;
            export::write_json(&dir.join("base_model.json"), &model)?;
            export::write_model_obj(&dir.join("base_model.obj"), &model)?;
            if !cfg.transformation.is_empty() {
                let map = compose_steps(&cfg.transformation)?;
                let t = transform_field(&field, &map)?;
                let tm = build_complete(&t)?;
                export::write_json(&dir.join("transformed_model.json"), &tm)?;
                export::write_model_obj(&dir.join("transformed_model.obj"), &tm)?;
            }
            println!("wrote gridshell model(s) to {}", dir.display());
        }
        Command::Optimize => {
            let field = base_field(&cfg)?;
            let model = build_complete(&field)?;
            let result = nelder_mead(&model, &cfg.material, &cfg.optimization)?;
            export::write_trace_csv(&dir.join("base_trace.csv"), &result.trace)?;
            export::write_json(&dir.join("base_result.json"), &result)?;
            println!(
                "optimized {} variable groups: F = {}, max |N-N*| = {:.1} N, mean = {:.1} N",
                model.variable_group_ids().len(),
                result.stats.f,
                result.stats.max_dev,
                result.stats.mean_dev
            );
        }
        Command::Adjust => {
            let field = base_field(&cfg)?;
            let model = build_complete(&field)?;
            let result = nelder_mead(&model, &cfg.material, &cfg.optimization)?;
            let map = compose_steps(&cfg.transformation)?;
            let t = transform_field(&field, &map)?;
            let tm = build_complete(&t)?;
            let adj = stress_ratio_adjust(&tm, &result.radii, &cfg.material)?;
            export::write_json(&dir.join("adjusted_result.json"), &adj)?;
            println!(
                "adjusted radii written; {} member(s) skipped for sign mismatch",
                adj.sign_mismatches.len()
            );
        }
        Command::Report => {
            let out = run_pipeline(&cfg)?;
            print!("{}", out.report_text);
        }
        Command::Pipeline => {
            let out = run_and_export(&cfg)?;
            let manifest = manifest_for(&cfg)?;
            print!("{}", out.report_text);
            println!("artifacts in {} (config sha256 {})", dir.display(), manifest.config_sha256);
        }
    }
    Ok(())
}

/// Seeded randomized invariant suite: pseudo-orthogonality of random
/// compositions, inverse round-trips, and contact-element consistency.
fn seed_check() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6964);
    let mut unit = |rng: &mut ChaCha8Rng| -> Vector3<f64> {
        loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 {
                return v / n;
            }
        }
    };
    let planes = [
        PeRotationPlane::X2X3,
        PeRotationPlane::X3X1,
        PeRotationPlane::X1X2,
    ];
    for trial in 0..200 {
        let mut maps = Vec::new();
        for _ in 0..4 {
            let m = match rng.random_range(0..4) {
                0 => LaguerreMap::pe_rotation(
                    planes[rng.random_range(0..3)],
                    rng.random_range(-0.8..0.8),
                ),
                1 => LaguerreMap::offset(rng.random_range(-2.0..2.0)),
                2 => LaguerreMap::scaling(rng.random_range(0.2..5.0))?,
                _ => {
                    let axis = unit(&mut rng);
                    let angle = rng.random_range(-3.0..3.0);
                    let rot = Rotation3::from_axis_angle(
                        &nalgebra::Unit::new_normalize(axis),
                        angle,
                    );
                    LaguerreMap::euclidean(
                        *rot.matrix(),
                        Vector3::new(
                            rng.random_range(-5.0..5.0),
                            rng.random_range(-5.0..5.0),
                            rng.random_range(-5.0..5.0),
                        ),
                    )?
                }
            };
            maps.push(m);
        }
        let composed = LaguerreMap::compose(&maps)?;
        composed.validate()?;
        let inv = composed.inverse();
        let round = LaguerreMap::compose(&[composed.clone(), inv])?;
        let id = LaguerreMap::identity();
        let dev = (round.d - id.d).abs().max().max(round.t.abs().max())
            + (round.lambda - 1.0).abs();
        if dev > 1e-9 {
            return Err(gridshell::Error::Config(format!(
                "seed-check trial {trial}: inverse round-trip deviation {dev:e}"
            )));
        }
        let p = Vector3::new(
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let ce = ContactElement::new(p, unit(&mut rng));
        let img = transform_contact_element(&composed, &ce)?;
        let back = transform_contact_element(&composed.inverse(), &img)?;
        if (back.p - ce.p).norm() > 1e-8 || (back.n - ce.n).norm() > 1e-8 {
            return Err(gridshell::Error::Config(format!(
                "seed-check trial {trial}: contact element round-trip failed"
            )));
        }
    }
    println!("seed-check: 200 randomized invariant trials passed");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
