//! Plain-text exports: CSV tables, JSON documents, and OBJ wireframes.
//! Floats are written with Rust's shortest round-trip formatting, so outputs
//! are deterministic and carry full precision.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::fem::{FrameSolution, ShearRatios};
use crate::grid::GridshellModel;
use crate::membrane::MembraneField;
use crate::optimize::TraceEntry;

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Serialize any value as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Per-sample field CSV: geometry, frame, and membrane forces.
pub fn field_csv(field: &MembraneField) -> String {
    let mut out = String::from("xi,eta,x,y,z,nx,ny,nz,kappa1,kappa2,A1,A2,T1,T2\n");
    for i in 0..=field.n_xi {
        for j in 0..=field.n_eta {
            let s = &field.samples[i][j];
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.xi,
                s.eta,
                s.p[0],
                s.p[1],
                s.p[2],
                s.n[0],
                s.n[1],
                s.n[2],
                s.kappa1,
                s.kappa2,
                s.a1,
                s.a2,
                field.t1[i][j],
                field.t2[i][j],
            );
        }
    }
    out
}

pub fn write_field_csv(path: &Path, field: &MembraneField) -> Result<()> {
    write_text(path, &field_csv(field))
}

/// Per-member CSV: axial force vs target, group, radius.
pub fn member_csv(model: &GridshellModel, sol: &FrameSolution, radii: &[f64]) -> String {
    let mut out = String::from("id,N,N_target,group,R,in_objective\n");
    for m in &model.members {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            m.id, sol.n[m.id], m.target_force, m.group_id, radii[m.group_id], m.in_objective
        );
    }
    out
}

pub fn write_member_csv(
    path: &Path,
    model: &GridshellModel,
    sol: &FrameSolution,
    radii: &[f64],
) -> Result<()> {
    write_text(path, &member_csv(model, sol, radii))
}

/// Per-node CSV: out-of-plane shear sum vs applied load.
pub fn node_csv(model: &GridshellModel, ratios: &ShearRatios) -> String {
    let mut out = String::from("id,Q_abs,load_abs,ratio\n");
    for n in &model.nodes {
        let load = n.load.norm();
        match ratios.per_node[n.id] {
            Some(r) => {
                let _ = writeln!(out, "{},{},{},{}", n.id, r * load, load, r);
            }
            None => {
                let _ = writeln!(out, "{},,{},", n.id, load);
            }
        }
    }
    out
}

pub fn write_node_csv(path: &Path, model: &GridshellModel, ratios: &ShearRatios) -> Result<()> {
    write_text(path, &node_csv(model, ratios))
}

/// Optimization trace CSV (best-so-far entries).
pub fn trace_csv(trace: &[TraceEntry]) -> String {
    let mut out = String::from("iteration,F,max_dev,mean_dev\n");
    for t in trace {
        let _ = writeln!(out, "{},{},{},{}", t.iteration, t.f, t.max_dev, t.mean_dev);
    }
    out
}

pub fn write_trace_csv(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    write_text(path, &trace_csv(trace))
}

/// OBJ wireframe of the gridshell: one vertex per node, one line element per
/// member (OBJ indices are 1-based).
pub fn model_obj(model: &GridshellModel) -> String {
    let mut out = String::new();
    for n in &model.nodes {
        let _ = writeln!(out, "v {} {} {}", n.position[0], n.position[1], n.position[2]);
    }
    for m in &model.members {
        let _ = writeln!(out, "l {} {}", m.node_a + 1, m.node_b + 1);
    }
    out
}

pub fn write_model_obj(path: &Path, model: &GridshellModel) -> Result<()> {
    write_text(path, &model_obj(model))
}

/// OBJ of the sampled surface: grid vertices plus quad faces.
pub fn field_obj(field: &MembraneField) -> String {
    let mut out = String::new();
    let cols = field.n_eta + 1;
    for row in &field.samples {
        for s in row {
            let _ = writeln!(out, "v {} {} {}", s.p[0], s.p[1], s.p[2]);
        }
    }
    for i in 0..field.n_xi {
        for j in 0..field.n_eta {
            let v = |a: usize, b: usize| a * cols + b + 1;
            let _ = writeln!(
                out,
                "f {} {} {} {}",
                v(i, j),
                v(i + 1, j),
                v(i + 1, j + 1),
                v(i, j + 1)
            );
        }
    }
    out
}

pub fn write_field_obj(path: &Path, field: &MembraneField) -> Result<()> {
    write_text(path, &field_obj(field))
}
