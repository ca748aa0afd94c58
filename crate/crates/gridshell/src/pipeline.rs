//! End-to-end orchestration of the paper's workflow: surface sampling,
//! membrane targets, optional Laguerre transformation, section optimization,
//! the Eq. (14) adjustment, and report/export emission.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{compose_steps, PipelineConfig};
use crate::error::{Error, Result};
use crate::export;
use crate::fem::{shear_load_ratio, ShearRatios};
use crate::grid::{build_complete, GridshellModel};
use crate::laguerre::EQ5_TOL;
use crate::membrane::{build_field, transform_field, MembraneField, SurfaceDef};
use crate::optimize::{nelder_mead, objective, stress_ratio_adjust, OptimizationResult, EQ14_CLAMP};
use crate::report::{geometry_checks, render_geometry, render_table, GeometryReport, TableRow};

/// One analyzed design: radii, deviation statistics, shear ratios.
#[derive(Debug, Clone, Serialize)]
pub struct DesignRow {
    pub label: String,
    pub radii: Vec<f64>,
    pub max_dev: f64,
    pub mean_dev: f64,
    pub mean_shear_ratio: f64,
}

/// One experiment (a membrane field plus its gridshell and analyses).
pub struct Experiment {
    pub field: MembraneField,
    pub model: GridshellModel,
    pub rows: Vec<DesignRow>,
    pub optimum: OptimizationResult,
    /// Shear ratios of the optimal (last optimized) design.
    pub shear: ShearRatios,
}

pub struct PipelineOutput {
    pub base: Experiment,
    /// Present when the config lists transformation steps.
    pub transformed: Option<Experiment>,
    /// Eq. (14) adjusted radii for the transformed model.
    pub adjusted_radii: Option<Vec<f64>>,
    pub geometry: GeometryReport,
    pub report_text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub crate_version: String,
    pub tolerances: ManifestTolerances,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestTolerances {
    pub eq5: f64,
    pub fd_step: f64,
    pub f_tol: f64,
    pub eq14_clamp: (f64, f64),
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(name))
}

/// Analyze `model` with `radii` and produce a report row.
fn analyze_row(
    label: &str,
    model: &GridshellModel,
    radii: &[f64],
    cfg: &PipelineConfig,
) -> Result<(DesignRow, ShearRatios)> {
    let (stats, sol) = objective(model, radii, &cfg.material)?;
    let frame = model.frame_model(radii)?;
    let ratios = shear_load_ratio(&sol, &frame, &model.non_boundary_node_ids());
    Ok((
        DesignRow {
            label: label.to_string(),
            radii: radii.to_vec(),
            max_dev: stats.max_dev,
            mean_dev: stats.mean_dev,
            mean_shear_ratio: ratios.mean,
        },
        ratios,
    ))
}

impl Experiment {
    fn run(field: MembraneField, cfg: &PipelineConfig, extra_rows: Vec<DesignRow>) -> Result<Self> {
        let model = stage("grid", build_complete(&field))?;
        let mut rows = Vec::new();
        let init_radii = vec![cfg.optimization.r_init; model.groups.len()];
        let (init_row, _) = stage("analyze", analyze_row("Initial", &model, &init_radii, cfg))?;
        rows.push(init_row);
        let optimum = stage("optimize", nelder_mead(&model, &cfg.material, &cfg.optimization))?;
        let (opt_row, shear) =
            stage("analyze", analyze_row("Optimal", &model, &optimum.radii, cfg))?;
        rows.push(opt_row);
        rows.extend(extra_rows);
        Ok(Experiment {
            field,
            model,
            rows,
            optimum,
            shear,
        })
    }

    fn table_rows(&self) -> Vec<TableRow> {
        self.rows
            .iter()
            .map(|r| TableRow {
                label: r.label.clone(),
                max_dev: r.max_dev,
                mean_dev: r.mean_dev,
                mean_shear_ratio: r.mean_shear_ratio,
            })
            .collect()
    }
}

/// Run the configured pipeline in memory (no files written).
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let params = cfg.surface.params();
    let base_field = stage(
        "field",
        build_field(
            SurfaceDef::Base {
                params,
                h: cfg.surface.fd_step,
            },
            cfg.grid.n_xi,
            cfg.grid.n_eta,
            cfg.load.z,
            cfg.surface.center,
        ),
    )?;
    let base = Experiment::run(base_field, cfg, Vec::new())?;

    let mut transformed = None;
    let mut adjusted_radii = None;
    if !cfg.transformation.is_empty() {
        let map = stage("transform", compose_steps(&cfg.transformation))?;
        let t_field = stage("transform", transform_field(&base.field, &map))?;
        let t_model = stage("grid", build_complete(&t_field))?;
        // Eq. (14) path: transformed model analyzed with the
        // pre-transformation optimum, then adjusted once.
        let radii_hat = base.optimum.radii.clone();
        let (before_row, _) = stage(
            "adjust",
            analyze_row("Before adjustment", &t_model, &radii_hat, cfg),
        )?;
        let adj = stage(
            "adjust",
            stress_ratio_adjust(&t_model, &radii_hat, &cfg.material),
        )?;
        let (after_row, _) = stage(
            "adjust",
            analyze_row("After adjustment", &t_model, &adj.radii, cfg),
        )?;
        adjusted_radii = Some(adj.radii);
        transformed = Some(Experiment::run(
            t_field,
            cfg,
            vec![before_row, after_row],
        )?);
    }

    let geo_model = transformed.as_ref().map(|t| &t.model).unwrap_or(&base.model);
    let geometry = stage("report", geometry_checks(geo_model))?;

    let mut report_text = render_table("Before transformation", &base.table_rows());
    if let Some(t) = &transformed {
        report_text.push('\n');
        report_text.push_str(&render_table("After transformation", &t.table_rows()));
    }
    report_text.push('\n');
    report_text.push_str(&render_geometry(&geometry));

    Ok(PipelineOutput {
        base,
        transformed,
        adjusted_radii,
        geometry,
        report_text,
    })
}

pub fn manifest_for(cfg: &PipelineConfig) -> Result<Manifest> {
    let canon = cfg.canonical_json()?;
    let hash = Sha256::digest(canon.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in hash {
        hex.push_str(&format!("{b:02x}"));
    }
    Ok(Manifest {
        config_sha256: hex,
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerances: ManifestTolerances {
            eq5: EQ5_TOL,
            fd_step: cfg.surface.fd_step,
            f_tol: cfg.optimization.f_tol,
            eq14_clamp: EQ14_CLAMP,
        },
    })
}

/// Run the pipeline and write the full report bundle to `cfg.outputs`.
pub fn run_and_export(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let out = run_pipeline(cfg)?;
    export_bundle(cfg, &out, &cfg.outputs)?;
    Ok(out)
}

/// Write CSV/JSON/OBJ artifacts plus report and manifest under `dir`.
pub fn export_bundle(cfg: &PipelineConfig, out: &PipelineOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let write_experiment = |prefix: &str, e: &Experiment| -> Result<()> {
        export::write_field_csv(&dir.join(format!("{prefix}_field.csv")), &e.field)?;
        export::write_field_obj(&dir.join(format!("{prefix}_surface.obj")), &e.field)?;
        export::write_model_obj(&dir.join(format!("{prefix}_model.obj")), &e.model)?;
        export::write_json(&dir.join(format!("{prefix}_model.json")), &e.model)?;
        export::write_trace_csv(&dir.join(format!("{prefix}_trace.csv")), &e.optimum.trace)?;
        let (_, sol) = objective(&e.model, &e.optimum.radii, &cfg.material)?;
        export::write_member_csv(
            &dir.join(format!("{prefix}_members.csv")),
            &e.model,
            &sol,
            &e.optimum.radii,
        )?;
        export::write_node_csv(&dir.join(format!("{prefix}_nodes.csv")), &e.model, &e.shear)?;
        export::write_json(&dir.join(format!("{prefix}_result.json")), &e.optimum)?;
        Ok(())
    };
    write_experiment("base", &out.base).map_err(|e| match e {
        Error::Stage { .. } => e,
        other => other.in_stage("export"),
    })?;
    if let Some(t) = &out.transformed {
        write_experiment("transformed", t)?;
    }
    export::write_json(&dir.join("geometry.json"), &out.geometry)?;
    std::fs::write(dir.join("report.txt"), &out.report_text)?;
    export::write_json(&dir.join("manifest.json"), &manifest_for(cfg)?)?;
    std::fs::write(dir.join("config.json"), cfg.canonical_json()?)?;
    Ok(())
}
