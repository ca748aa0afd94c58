//! Reporting: deviation/shear summary tables in the layout of the paper's
//! Tables 1 and 2, and the corner/rise geometry checks of §5.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridshellModel;

/// Planar corner coordinates reported in the paper for the transformed
/// patch (mm).
pub const PAPER_CORNER_TARGETS: [[f64; 2]; 4] =
    [[0.0, 0.0], [23430.0, 0.0], [941.8, 9234.0], [18660.0, 13520.0]];

/// Paper rise of the transformed surface (mm).
pub const PAPER_RISE: f64 = 10629.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    /// max |N - N*| over in-objective members (N).
    pub max_dev: f64,
    /// mean |N - N*| over in-objective members (N).
    pub mean_dev: f64,
    /// mean |Q|/|load| over non-boundary nodes.
    pub mean_shear_ratio: f64,
}

/// Fixed-width text table matching the column structure of Tables 1/2.
pub fn render_table(title: &str, rows: &[TableRow]) -> String {
    let mut out = format!("{title}\n");
    out.push_str(&format!(
        "{:<20} {:>14} {:>14} {:>16}\n",
        "", "Max |N-N*| (N)", "Mean |N-N*| (N)", "Mean shear/load"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:>14.1} {:>14.1} {:>16.3}\n",
            r.label, r.max_dev, r.mean_dev, r.mean_shear_ratio
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryReport {
    /// In-plane coordinates of the four corner nodes after alignment (mm),
    /// ordered to match `targets`.
    pub corners: [[f64; 2]; 4],
    pub targets: [[f64; 2]; 4],
    /// Per-corner deviation relative to the target magnitude.
    pub rel_errors: [f64; 4],
    /// Max out-of-plane distance of the corner nodes from their best-fit
    /// plane (mm).
    pub corner_coplanarity: f64,
    /// Max distance of any node from the corner plane (mm).
    pub rise: f64,
}

/// Best-fit plane through four points: (centroid, unit normal).
fn corner_plane(corners: &[Vector3<f64>; 4]) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let cen = (corners[0] + corners[1] + corners[2] + corners[3]) / 4.0;
    let mut cov = Matrix3::zeros();
    for c in corners {
        let d = c - cen;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    // normal = eigenvector of the smallest eigenvalue
    let mut idx = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[idx] {
            idx = i;
        }
    }
    let n = eig.eigenvectors.column(idx).into_owned();
    if eig.eigenvalues.iter().filter(|&&v| v > 1e-6).count() < 2 {
        return Err(Error::DegenerateCorners(
            "corner points nearly collinear".into(),
        ));
    }
    Ok((cen, n.normalize()))
}

/// Align the four corner nodes to the paper's planar frame and report their
/// in-plane coordinates plus the rise.
///
/// The paper does not state its alignment convention, so the corners are
/// projected onto their best-fit plane and the in-plane frame (anchor corner,
/// +x corner, y sign) is chosen as the assignment that minimizes the largest
/// per-corner deviation from the published coordinates. The assignment search
/// is exhaustive over the 24 corner orderings and both y orientations, and is
/// deterministic.
pub fn geometry_checks(model: &GridshellModel) -> Result<GeometryReport> {
    let (n_xi, n_eta) = (model.n_xi, model.n_eta);
    let node = |i: usize, j: usize| model.nodes[i * (n_eta + 1) + j].position;
    let corners = [
        node(0, 0),
        node(n_xi, 0),
        node(0, n_eta),
        node(n_xi, n_eta),
    ];
    let (cen, nrm) = corner_plane(&corners)?;
    let coplanarity = corners
        .iter()
        .map(|c| ((c - cen).dot(&nrm)).abs())
        .fold(0.0, f64::max);
    let proj: Vec<Vector3<f64>> = corners
        .iter()
        .map(|c| c - (c - cen).dot(&nrm) * nrm)
        .collect();

    let targets = PAPER_CORNER_TARGETS;
    let tgt_norm: Vec<f64> = targets
        .iter()
        .map(|t| (t[0] * t[0] + t[1] * t[1]).sqrt().max(5000.0))
        .collect();

    let mut best: Option<(f64, [[f64; 2]; 4], [f64; 4])> = None;
    let perms = permutations4();
    for perm in &perms {
        let p0 = proj[perm[0]];
        let ex = proj[perm[1]] - p0;
        let len = ex.norm();
        if len < 1.0 {
            continue;
        }
        let ex = ex / len;
        let ey = nrm.cross(&ex);
        for flip in [1.0, -1.0] {
            let mut uv = [[0.0; 2]; 4];
            let mut rel = [0.0; 4];
            let mut worst = 0.0f64;
            for (slot, &ci) in perm.iter().enumerate() {
                let d = proj[ci] - p0;
                uv[slot] = [d.dot(&ex), flip * d.dot(&ey)];
                let e = ((uv[slot][0] - targets[slot][0]).powi(2)
                    + (uv[slot][1] - targets[slot][1]).powi(2))
                .sqrt()
                    / tgt_norm[slot];
                rel[slot] = e;
                worst = worst.max(e);
            }
            if best.as_ref().map_or(true, |b| worst < b.0) {
                best = Some((worst, uv, rel));
            }
        }
    }
    let (_, uv, rel) = best.ok_or_else(|| {
        Error::DegenerateCorners("no valid corner frame (coincident corners)".into())
    })?;

    let rise = model
        .nodes
        .iter()
        .map(|n| ((n.position - cen).dot(&nrm)).abs())
        .fold(0.0, f64::max);

    Ok(GeometryReport {
        corners: uv,
        targets,
        rel_errors: rel,
        corner_coplanarity: coplanarity,
        rise,
    })
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

pub fn render_geometry(g: &GeometryReport) -> String {
    let mut out = String::from("Corner coordinates after alignment (mm)\n");
    for (c, t) in g.corners.iter().zip(&g.targets) {
        out.push_str(&format!(
            "  ({:>9.1}, {:>9.1})   target ({:>9.1}, {:>9.1})\n",
            c[0], c[1], t[0], t[1]
        ));
    }
    out.push_str(&format!("Rise: {:.1} mm (paper: {PAPER_RISE} mm)\n", g.rise));
    out.push_str(&format!(
        "Corner coplanarity (max out-of-plane): {:.2} mm\n",
        g.corner_coplanarity
    ));
    out
}
