//! Discretization of a membrane field into a beam gridshell (§4): nodes with
//! tributary areas and pressure loads, members with tributary widths and
//! target axial forces, and member groups (one per grid polyline) marking the
//! design variables.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{pipe_section, FrameMember, FrameModel, FrameNode};
use crate::membrane::MembraneField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Member runs along a xi-line (constant eta).
    Xi,
    /// Member runs along an eta-line (constant xi).
    Eta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    /// mm.
    pub position: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// mm^2.
    pub tributary_area: f64,
    pub is_boundary: bool,
    /// Pressure load Z * area * normal (N).
    pub load: Vector3<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Member {
    pub id: usize,
    pub node_a: usize,
    pub node_b: usize,
    pub direction: Direction,
    /// mm.
    pub tributary_width: f64,
    /// Target axial force N* (N).
    pub target_force: f64,
    pub group_id: usize,
    /// False for members touching the two outermost grid-line rings (§5).
    pub in_objective: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Group {
    pub id: usize,
    pub member_ids: Vec<usize>,
    /// False for the two outermost polylines on each side in each direction;
    /// their radii are not design variables.
    pub variable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridshellModel {
    pub n_xi: usize,
    pub n_eta: usize,
    pub nodes: Vec<Node>,
    pub members: Vec<Member>,
    pub groups: Vec<Group>,
}

/// True when a polyline index belongs to the two outermost rings.
fn outer_ring(idx: usize, last: usize) -> bool {
    idx <= 1 || idx + 1 >= last
}

/// Build the structured grid topology from the field samples: nodes at the
/// sample points, members along parameter-adjacent pairs, one group per grid
/// polyline. Targets and loads are filled by [`target_axial_forces`] and
/// [`nodal_loads`].
pub fn build_grid(field: &MembraneField, n_xi: usize, n_eta: usize) -> Result<GridshellModel> {
    if field.n_xi != n_xi || field.n_eta != n_eta {
        return Err(Error::GridMismatch {
            fr: field.n_xi + 1,
            fc: field.n_eta + 1,
            nr: n_xi + 1,
            nc: n_eta + 1,
        });
    }
    let node_id = |i: usize, j: usize| i * (n_eta + 1) + j;
    let mut nodes = Vec::with_capacity((n_xi + 1) * (n_eta + 1));
    for i in 0..=n_xi {
        for j in 0..=n_eta {
            let s = &field.samples[i][j];
            nodes.push(Node {
                id: node_id(i, j),
                position: s.p,
                normal: s.n,
                tributary_area: 0.0,
                is_boundary: i == 0 || i == n_xi || j == 0 || j == n_eta,
                load: Vector3::zeros(),
            });
        }
    }
    // Groups: one per xi-polyline (constant eta index, ids 0..=n_eta), then
    // one per eta-polyline (constant xi index, ids n_eta+1 ..).
    let mut groups: Vec<Group> = (0..=n_eta)
        .map(|j| Group {
            id: j,
            member_ids: Vec::new(),
            variable: !outer_ring(j, n_eta),
        })
        .chain((0..=n_xi).map(|i| Group {
            id: n_eta + 1 + i,
            member_ids: Vec::new(),
            variable: !outer_ring(i, n_xi),
        }))
        .collect();
    let mut members = Vec::new();
    let mut push = |members: &mut Vec<Member>,
                    groups: &mut Vec<Group>,
                    a: (usize, usize),
                    b: (usize, usize),
                    direction: Direction,
                    group_id: usize| {
        let id = members.len();
        let in_objective = !outer_ring(a.0, n_xi)
            && !outer_ring(b.0, n_xi)
            && !outer_ring(a.1, n_eta)
            && !outer_ring(b.1, n_eta);
        groups[group_id].member_ids.push(id);
        members.push(Member {
            id,
            node_a: node_id(a.0, a.1),
            node_b: node_id(b.0, b.1),
            direction,
            tributary_width: 0.0,
            target_force: 0.0,
            group_id,
            in_objective,
        });
    };
    for j in 0..=n_eta {
        for i in 0..n_xi {
            push(&mut members, &mut groups, (i, j), (i + 1, j), Direction::Xi, j);
        }
    }
    for i in 0..=n_xi {
        for j in 0..n_eta {
            push(
                &mut members,
                &mut groups,
                (i, j),
                (i, j + 1),
                Direction::Eta,
                n_eta + 1 + i,
            );
        }
    }
    Ok(GridshellModel {
        n_xi,
        n_eta,
        nodes,
        members,
        groups,
    })
}

/// Set per-member target axial forces: the membrane force component crossing
/// the member's strip, sampled at the member's parameter midpoint, times the
/// tributary width. The width is half the sum of surface chord distances to
/// the two neighboring parallel polylines at the midpoint (one-sided at the
/// patch edges).
pub fn target_axial_forces(model: &mut GridshellModel, field: &MembraneField) -> Result<()> {
    let params = field.surface.params();
    let (dxi, deta) = field.grid_steps();
    let (xi0, eta0) = (params.xi_range.0, params.eta_range.0);
    let n_eta = model.n_eta;
    for m in &mut model.members {
        let (ia, ja) = (m.node_a / (n_eta + 1), m.node_a % (n_eta + 1));
        let (ib, jb) = (m.node_b / (n_eta + 1), m.node_b % (n_eta + 1));
        let xi_m = xi0 + dxi * (ia + ib) as f64 / 2.0;
        let eta_m = eta0 + deta * (ja + jb) as f64 / 2.0;
        let (_, t1, t2) = field.forces_at(xi_m, eta_m)?;
        let point = |xi: f64, eta: f64| field.surface.point(xi, eta);
        let here = point(xi_m, eta_m)?;
        let mut width = 0.0;
        match m.direction {
            Direction::Xi => {
                // Neighboring xi-polylines sit at the adjacent eta indices.
                if ja > 0 {
                    width += (point(xi_m, eta_m - deta)? - here).norm() / 2.0;
                }
                if ja < n_eta {
                    width += (point(xi_m, eta_m + deta)? - here).norm() / 2.0;
                }
                m.tributary_width = width;
                m.target_force = t1 * width;
            }
            Direction::Eta => {
                if ia > 0 {
                    width += (point(xi_m - dxi, eta_m)? - here).norm() / 2.0;
                }
                if ia < model.n_xi {
                    width += (point(xi_m + dxi, eta_m)? - here).norm() / 2.0;
                }
                m.tributary_width = width;
                m.target_force = t2 * width;
            }
        }
    }
    Ok(())
}

/// Set tributary areas and pressure loads: each node takes a quarter of every
/// adjacent quad (quads measured as two triangles), and the load is
/// Z * area along the node normal.
pub fn nodal_loads(model: &mut GridshellModel, field: &MembraneField) -> Result<()> {
    let n_eta = model.n_eta;
    let node_id = |i: usize, j: usize| i * (n_eta + 1) + j;
    for n in &mut model.nodes {
        n.tributary_area = 0.0;
    }
    for i in 0..model.n_xi {
        for j in 0..n_eta {
            let p00 = model.nodes[node_id(i, j)].position;
            let p10 = model.nodes[node_id(i + 1, j)].position;
            let p11 = model.nodes[node_id(i + 1, j + 1)].position;
            let p01 = model.nodes[node_id(i, j + 1)].position;
            let area = (p10 - p00).cross(&(p11 - p00)).norm() / 2.0
                + (p11 - p00).cross(&(p01 - p00)).norm() / 2.0;
            for id in [
                node_id(i, j),
                node_id(i + 1, j),
                node_id(i + 1, j + 1),
                node_id(i, j + 1),
            ] {
                model.nodes[id].tributary_area += area / 4.0;
            }
        }
    }
    for n in &mut model.nodes {
        n.load = field.z * n.tributary_area * n.normal;
    }
    Ok(())
}

/// Build the grid and fill targets and loads in one call.
pub fn build_complete(field: &MembraneField) -> Result<GridshellModel> {
    let mut model = build_grid(field, field.n_xi, field.n_eta)?;
    target_axial_forces(&mut model, field)?;
    nodal_loads(&mut model, field)?;
    Ok(model)
}

impl GridshellModel {
    /// Total faceted patch area (sum of tributary areas).
    pub fn total_area(&self) -> f64 {
        self.nodes.iter().map(|n| n.tributary_area).sum()
    }

    pub fn variable_group_ids(&self) -> Vec<usize> {
        self.groups
            .iter()
            .filter(|g| g.variable)
            .map(|g| g.id)
            .collect()
    }

    pub fn non_boundary_node_ids(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| !n.is_boundary)
            .map(|n| n.id)
            .collect()
    }

    /// Analysis model with pin supports on the boundary and one pipe radius
    /// per group (`radii[g]` for group id `g`).
    pub fn frame_model(&self, radii: &[f64]) -> Result<FrameModel> {
        assert_eq!(radii.len(), self.groups.len(), "one radius per group");
        let nodes = self
            .nodes
            .iter()
            .map(|n| FrameNode {
                pos: n.position,
                normal: n.normal,
            })
            .collect();
        let mut members = Vec::with_capacity(self.members.len());
        for m in &self.members {
            members.push(FrameMember {
                a: m.node_a,
                b: m.node_b,
                section: pipe_section(radii[m.group_id])?,
            });
        }
        let fixed = self
            .nodes
            .iter()
            .map(|n| {
                if n.is_boundary {
                    [true, true, true, false, false, false]
                } else {
                    [false; 6]
                }
            })
            .collect();
        let loads = self
            .nodes
            .iter()
            .map(|n| [n.load[0], n.load[1], n.load[2], 0.0, 0.0, 0.0])
            .collect();
        Ok(FrameModel {
            nodes,
            members,
            fixed,
            loads,
        })
    }
}
