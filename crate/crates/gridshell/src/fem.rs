//! Linear elastic 3D frame analysis: Euler-Bernoulli space-beam elements
//! with pipe sections, rigid joints, and arbitrary nodal constraints.
//!
//! The assembled system is symmetric positive definite once constrained, and
//! with the structured grid numbering it is narrowly banded, so the solver is
//! a banded Cholesky factorization (~1.5k free DOFs for the paper model).

use nalgebra::{DMatrix, Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hollow circular section with wall thickness = `t_ratio * R` (0.1 in §5).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipeSection {
    /// External radius (mm).
    pub r: f64,
    pub t_ratio: f64,
    /// Area (mm^2).
    pub a: f64,
    /// Second moment of area (mm^4), equal about both bending axes.
    pub i: f64,
    /// Torsion constant (mm^4), J = 2I for the thin annulus.
    pub j: f64,
}

/// Closed-form pipe section properties for external radius `r` (mm).
pub fn pipe_section(r: f64) -> Result<PipeSection> {
    if !(r > 0.0) {
        return Err(Error::BadRadius(r));
    }
    let t_ratio = 0.1;
    let ri = r * (1.0 - t_ratio);
    let a = std::f64::consts::PI * (r * r - ri * ri);
    let i = std::f64::consts::PI / 4.0 * (r.powi(4) - ri.powi(4));
    Ok(PipeSection {
        r,
        t_ratio,
        a,
        i,
        j: 2.0 * i,
    })
}

impl PipeSection {
    /// Invert the area formula: the radius whose pipe section has area `a`.
    pub fn radius_for_area(a: f64) -> f64 {
        // A = pi (1 - (1 - t)^2) R^2 with t = 0.1.
        (a / (std::f64::consts::PI * (1.0 - 0.81))).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus (N/mm^2).
    pub e: f64,
    /// Poisson's ratio; enters only through G = E / (2 (1 + nu)).
    pub nu: f64,
}

impl Default for Material {
    fn default() -> Self {
        // Steel. The paper states only that all members share one modulus;
        // internal forces are E-invariant, so the value is cosmetic.
        Material {
            e: 205000.0,
            nu: 0.3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameNode {
    pub pos: Vector3<f64>,
    /// Surface normal; orients the local "out-of-plane" bending axis.
    pub normal: Vector3<f64>,
}

#[derive(Debug, Clone)]
pub struct FrameMember {
    pub a: usize,
    pub b: usize,
    pub section: PipeSection,
}

/// Analysis-ready frame: nodes, members, per-node DOF constraint masks
/// (ux, uy, uz, rx, ry, rz; `true` = fixed) and nodal load 6-vectors.
#[derive(Debug, Clone)]
pub struct FrameModel {
    pub nodes: Vec<FrameNode>,
    pub members: Vec<FrameMember>,
    pub fixed: Vec<[bool; 6]>,
    pub loads: Vec<[f64; 6]>,
}

/// Displacements, member axial forces (tension positive), member end shear
/// vectors in global coordinates, and the nodal equilibrium residual.
#[derive(Debug, Clone)]
pub struct FrameSolution {
    pub u: Vec<[f64; 6]>,
    pub n: Vec<f64>,
    /// Transverse (shear) end force vectors at ends a and b in the global
    /// frame, as transmitted to the joints; consumed by `shear_load_ratio`.
    pub v_end: Vec<[Vector3<f64>; 2]>,
    /// max |internal - external| over free DOFs, relative to the load norm.
    pub equilibrium_residual: f64,
}

/// Local axes for a member: x along the axis, z as the component of the
/// averaged end-node normal perpendicular to the axis ("out of plane"),
/// Gram-Schmidt against a global axis when the normal is nearly parallel.
fn member_rotation(na: &FrameNode, nb: &FrameNode) -> Matrix3<f64> {
    let axis = nb.pos - na.pos;
    let ex = axis.normalize();
    let avg = na.normal + nb.normal;
    let mut ez = avg - avg.dot(&ex) * ex;
    if ez.norm() < 1e-6 * avg.norm().max(1.0) {
        // Fallback: global axis least aligned with the member.
        let mut pick = Vector3::z();
        let mut best = ex.z.abs();
        if ex.x.abs() < best {
            pick = Vector3::x();
            best = ex.x.abs();
        }
        if ex.y.abs() < best {
            pick = Vector3::y();
        }
        ez = pick - pick.dot(&ex) * ex;
    }
    let ez = ez.normalize();
    let ey = ez.cross(&ex);
    Matrix3::from_rows(&[ex.transpose(), ey.transpose(), ez.transpose()])
}

/// 12x12 Euler-Bernoulli space-frame stiffness in local axes
/// (axial + torsion + biaxial bending, no shear deformation).
fn element_stiffness_local(sec: &PipeSection, mat: &Material, l: f64) -> SMatrix<f64, 12, 12> {
    let g = mat.e / (2.0 * (1.0 + mat.nu));
    let ea = mat.e * sec.a / l;
    let gj = g * sec.j / l;
    let eiz = mat.e * sec.i; // bending about local z (displacement in y)
    let eiy = mat.e * sec.i; // bending about local y (displacement in z)
    let mut k = SMatrix::<f64, 12, 12>::zeros();
    // axial: dofs 0, 6
    k[(0, 0)] = ea;
    k[(0, 6)] = -ea;
    k[(6, 6)] = ea;
    // torsion: dofs 3, 9
    k[(3, 3)] = gj;
    k[(3, 9)] = -gj;
    k[(9, 9)] = gj;
    // bending in the x-y plane: dofs (1, 5, 7, 11)
    let (l2, l3) = (l * l, l * l * l);
    let b = [
        [12.0 / l3, 6.0 / l2, -12.0 / l3, 6.0 / l2],
        [6.0 / l2, 4.0 / l, -6.0 / l2, 2.0 / l],
        [-12.0 / l3, -6.0 / l2, 12.0 / l3, -6.0 / l2],
        [6.0 / l2, 2.0 / l, -6.0 / l2, 4.0 / l],
    ];
    let idx_y = [1usize, 5, 7, 11];
    for p in 0..4 {
        for q in p..4 {
            k[(idx_y[p], idx_y[q])] = eiz * b[p][q];
        }
    }
    // bending in the x-z plane: dofs (2, 4, 8, 10), rotation signs flipped
    let idx_z = [2usize, 4, 8, 10];
    let s = [1.0f64, -1.0, 1.0, -1.0];
    for p in 0..4 {
        for q in p..4 {
            k[(idx_z[p], idx_z[q])] = eiy * b[p][q] * s[p] * s[q];
        }
    }
    // mirror the upper triangle
    for p in 0..12 {
        for q in 0..p {
            k[(p, q)] = k[(q, p)];
        }
    }
    k
}

fn element_global(
    model: &FrameModel,
    mat: &Material,
    m: &FrameMember,
) -> (SMatrix<f64, 12, 12>, Matrix3<f64>, f64) {
    let (na, nb) = (&model.nodes[m.a], &model.nodes[m.b]);
    let l = (nb.pos - na.pos).norm();
    let r = member_rotation(na, nb);
    let k_l = element_stiffness_local(&m.section, mat, l);
    let mut lam = SMatrix::<f64, 12, 12>::zeros();
    for blk in 0..4 {
        lam.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(&r);
    }
    (lam.transpose() * k_l * lam, r, l)
}

/// Assemble the full (unconstrained) stiffness matrix densely; used by the
/// verification tests (symmetry, rigid-body modes), not by the solver.
pub fn assemble_dense(model: &FrameModel, mat: &Material) -> DMatrix<f64> {
    let n = model.nodes.len() * 6;
    let mut k = DMatrix::zeros(n, n);
    for m in &model.members {
        let (ke, _, _) = element_global(model, mat, m);
        let map: Vec<usize> = (0..6)
            .map(|d| 6 * m.a + d)
            .chain((0..6).map(|d| 6 * m.b + d))
            .collect();
        for p in 0..12 {
            for q in 0..12 {
                k[(map[p], map[q])] += ke[(p, q)];
            }
        }
    }
    k
}

/// Symmetric banded matrix in lower-band storage: `band[i][bw + j - i]`
/// holds K(i, j) for `i - bw <= j <= i`.
struct Banded {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl Banded {
    fn new(n: usize, bw: usize) -> Self {
        Banded {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (self.bw + j - i)
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        if j <= i {
            let at = self.idx(i, j);
            self.band[at] += v;
        }
    }

    /// In-place Cholesky; fails on a non-positive pivot (mechanism).
    fn cholesky(&mut self) -> Result<()> {
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(self.bw));
                let mut sum = self.band[self.idx(i, j)];
                for t in klo..j {
                    sum -= self.band[self.idx(i, t)] * self.band[self.idx(j, t)];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::SingularStiffness(i));
                    }
                    let at = self.idx(i, i);
                    self.band[at] = sum.sqrt();
                } else {
                    let at = self.idx(i, j);
                    self.band[at] = sum / self.band[self.idx(j, j)];
                }
            }
        }
        Ok(())
    }

    fn solve(&self, rhs: &mut [f64]) {
        // forward: L y = b
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut sum = rhs[i];
            for j in lo..i {
                sum -= self.band[self.idx(i, j)] * rhs[j];
            }
            rhs[i] = sum / self.band[self.idx(i, i)];
        }
        // backward: L^T x = y
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut sum = rhs[i];
            for j in (i + 1)..=hi {
                sum -= self.band[self.idx(j, i)] * rhs[j];
            }
            rhs[i] = sum / self.band[self.idx(i, i)];
        }
    }
}

/// Solve the constrained linear system and recover member end forces.
pub fn assemble_solve(model: &FrameModel, mat: &Material) -> Result<FrameSolution> {
    let nn = model.nodes.len();
    // Map (node, dof) -> free equation number, in node order.
    let mut dof_map = vec![[usize::MAX; 6]; nn];
    let mut n_free = 0usize;
    for (i, fixed) in model.fixed.iter().enumerate() {
        for d in 0..6 {
            if !fixed[d] {
                dof_map[i][d] = n_free;
                n_free += 1;
            }
        }
    }
    let mut bw = 0usize;
    let elements: Vec<(SMatrix<f64, 12, 12>, Matrix3<f64>, f64)> = model
        .members
        .iter()
        .map(|m| element_global(model, mat, m))
        .collect();
    let maps: Vec<Vec<usize>> = model
        .members
        .iter()
        .map(|m| {
            (0..6)
                .map(|d| dof_map[m.a][d])
                .chain((0..6).map(|d| dof_map[m.b][d]))
                .collect()
        })
        .collect();
    for map in &maps {
        let free: Vec<usize> = map.iter().copied().filter(|&d| d != usize::MAX).collect();
        for &p in &free {
            for &q in &free {
                bw = bw.max(p.abs_diff(q));
            }
        }
    }
    let mut k = Banded::new(n_free, bw);
    let mut rhs = vec![0.0f64; n_free];
    for (map, (ke, _, _)) in maps.iter().zip(&elements) {
        for p in 0..12 {
            if map[p] == usize::MAX {
                continue;
            }
            for q in 0..12 {
                if map[q] == usize::MAX {
                    continue;
                }
                k.add(map[p], map[q], ke[(p, q)]);
            }
        }
    }
    for i in 0..nn {
        for d in 0..6 {
            if dof_map[i][d] != usize::MAX {
                rhs[dof_map[i][d]] = model.loads[i][d];
            }
        }
    }
    k.cholesky()?;
    let mut x = rhs.clone();
    k.solve(&mut x);

    let mut u = vec![[0.0f64; 6]; nn];
    for i in 0..nn {
        for d in 0..6 {
            if dof_map[i][d] != usize::MAX {
                u[i][d] = x[dof_map[i][d]];
            }
        }
    }

    // Recover element end forces and check nodal equilibrium.
    let mut n_axial = Vec::with_capacity(model.members.len());
    let mut v_end = Vec::with_capacity(model.members.len());
    let mut internal = vec![[0.0f64; 6]; nn];
    for (m, (ke, r, _)) in model.members.iter().zip(&elements) {
        let mut ue = SVector::<f64, 12>::zeros();
        for d in 0..6 {
            ue[d] = u[m.a][d];
            ue[6 + d] = u[m.b][d];
        }
        let fg = ke * ue; // global end forces exerted on the element ends
        let mut lam = SMatrix::<f64, 12, 12>::zeros();
        for blk in 0..4 {
            lam.fixed_view_mut::<3, 3>(3 * blk, 3 * blk).copy_from(r);
        }
        let fl = lam * fg; // local end forces
        n_axial.push(fl[6]); // tension positive
        let va = r.transpose() * Vector3::new(0.0, fl[1], fl[2]);
        let vb = r.transpose() * Vector3::new(0.0, fl[7], fl[8]);
        v_end.push([va, vb]);
        for d in 0..6 {
            internal[m.a][d] += fg[d];
            internal[m.b][d] += fg[6 + d];
        }
    }
    let mut load_norm = 0.0f64;
    let mut res = 0.0f64;
    for i in 0..nn {
        for d in 0..6 {
            if dof_map[i][d] != usize::MAX {
                res = res.max((internal[i][d] - model.loads[i][d]).abs());
                load_norm = load_norm.max(model.loads[i][d].abs());
            }
        }
    }
    Ok(FrameSolution {
        u,
        n: n_axial,
        v_end,
        equilibrium_residual: res / load_norm.max(f64::MIN_POSITIVE),
    })
}

/// Per-node out-of-plane shear ratio |Q_i| / |load_i| (§5) with Q_i the
/// signed sum of incident member end shears projected on the node normal.
/// `abs_variant` sums |v . n| per end instead (the other reading of §5);
/// both are reported, the signed one is primary.
#[derive(Debug, Clone)]
pub struct ShearRatios {
    pub per_node: Vec<Option<f64>>,
    pub mean: f64,
    pub mean_abs_variant: f64,
    pub skipped: usize,
}

/// Evaluate the shear/load ratios over `eval_nodes` (typically the
/// non-boundary nodes). Nodes with zero translational load are skipped.
pub fn shear_load_ratio(
    sol: &FrameSolution,
    model: &FrameModel,
    eval_nodes: &[usize],
) -> ShearRatios {
    let mut per_node = vec![None; model.nodes.len()];
    let mut signed = vec![Vector3::<f64>::zeros(); model.nodes.len()];
    let mut absval = vec![0.0f64; model.nodes.len()];
    for (m, ve) in model.members.iter().zip(&sol.v_end) {
        signed[m.a] += ve[0];
        signed[m.b] += ve[1];
        absval[m.a] += ve[0].dot(&model.nodes[m.a].normal).abs();
        absval[m.b] += ve[1].dot(&model.nodes[m.b].normal).abs();
    }
    let (mut acc, mut acc_abs, mut count, mut skipped) = (0.0f64, 0.0f64, 0usize, 0usize);
    for &i in eval_nodes {
        let load = Vector3::new(model.loads[i][0], model.loads[i][1], model.loads[i][2]).norm();
        if load <= 0.0 {
            skipped += 1;
            continue;
        }
        let q = signed[i].dot(&model.nodes[i].normal).abs();
        let ratio = q / load;
        per_node[i] = Some(ratio);
        acc += ratio;
        acc_abs += absval[i] / load;
        count += 1;
    }
    let denom = count.max(1) as f64;
    ShearRatios {
        per_node,
        mean: acc / denom,
        mean_abs_variant: acc_abs / denom,
        skipped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn straight_beam(n_elem: usize, length: f64, r: f64) -> FrameModel {
        let sec = pipe_section(r).unwrap();
        let nodes = (0..=n_elem)
            .map(|i| FrameNode {
                pos: Vector3::new(length * i as f64 / n_elem as f64, 0.0, 0.0),
                normal: Vector3::z(),
            })
            .collect::<Vec<_>>();
        let members = (0..n_elem)
            .map(|i| FrameMember {
                a: i,
                b: i + 1,
                section: sec,
            })
            .collect();
        let n = nodes.len();
        FrameModel {
            nodes,
            members,
            fixed: vec![[false; 6]; n],
            loads: vec![[0.0; 6]; n],
        }
    }

    #[test]
    fn pipe_section_closed_forms() {
        let s = pipe_section(100.0).unwrap();
        assert_relative_eq!(s.a, 0.19 * std::f64::consts::PI * 1e4, max_relative = 1e-12);
        assert_relative_eq!(s.i, 2.7007e7, max_relative = 1e-3);
        let s2 = pipe_section(200.0).unwrap();
        assert_relative_eq!(s2.i / s.i, 16.0, max_relative = 1e-12);
        assert!(pipe_section(0.0).is_err());
        assert_relative_eq!(PipeSection::radius_for_area(s.a), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn simply_supported_midspan_load() {
        let p = 1000.0;
        let (l, r) = (4000.0, 60.0);
        let mut m = straight_beam(2, l, r);
        // pins at both ends; torsion restrained at one end to remove the
        // free spin about the axis
        m.fixed[0] = [true, true, true, true, false, false];
        m.fixed[2] = [true, true, true, false, false, false];
        m.loads[1][2] = -p;
        let mat = Material::default();
        let sol = assemble_solve(&m, &mat).unwrap();
        let sec = pipe_section(r).unwrap();
        let expected = -p * l.powi(3) / (48.0 * mat.e * sec.i);
        assert_relative_eq!(sol.u[1][2], expected, max_relative = 1e-8);
        assert!(sol.equilibrium_residual <= 1e-8);
    }

    #[test]
    fn cantilever_tip_load_and_rotation() {
        let p = 500.0;
        let (l, r) = (3000.0, 80.0);
        let mut m = straight_beam(3, l, r);
        m.fixed[0] = [true; 6];
        m.loads[3][2] = -p;
        let mat = Material::default();
        let sol = assemble_solve(&m, &mat).unwrap();
        let sec = pipe_section(r).unwrap();
        assert_relative_eq!(
            sol.u[3][2],
            -p * l.powi(3) / (3.0 * mat.e * sec.i),
            max_relative = 1e-8
        );
        // tip rotation about local y: PL^2/(2EI)
        assert_relative_eq!(
            sol.u[3][4].abs(),
            p * l * l / (2.0 * mat.e * sec.i),
            max_relative = 1e-8
        );
    }

    #[test]
    fn axial_bar_tension_positive() {
        let p = 750.0;
        let mut m = straight_beam(1, 2000.0, 50.0);
        m.fixed[0] = [true; 6];
        m.loads[1][0] = p; // pull along +x
        let sol = assemble_solve(&m, &Material::default()).unwrap();
        assert_relative_eq!(sol.n[0], p, max_relative = 1e-12);
        // and compression flips the sign
        m.loads[1][0] = -p;
        let sol = assemble_solve(&m, &Material::default()).unwrap();
        assert_relative_eq!(sol.n[0], -p, max_relative = 1e-12);
    }

    #[test]
    fn stiffness_symmetric_and_six_rigid_body_modes() {
        // Small free-free grid frame with skewed geometry.
        let sec = pipe_section(40.0).unwrap();
        let mut nodes = Vec::new();
        for i in 0..3 {
            for j in 0..2 {
                nodes.push(FrameNode {
                    pos: Vector3::new(
                        1000.0 * i as f64,
                        800.0 * j as f64,
                        150.0 * (i * j) as f64 + 40.0 * i as f64,
                    ),
                    normal: Vector3::z(),
                });
            }
        }
        let mut members = Vec::new();
        let id = |i: usize, j: usize| 2 * i + j;
        for i in 0..3 {
            members.push(FrameMember {
                a: id(i, 0),
                b: id(i, 1),
                section: sec,
            });
        }
        for i in 0..2 {
            for j in 0..2 {
                members.push(FrameMember {
                    a: id(i, j),
                    b: id(i + 1, j),
                    section: sec,
                });
            }
        }
        let n = nodes.len();
        let model = FrameModel {
            nodes,
            members,
            fixed: vec![[false; 6]; n],
            loads: vec![[0.0; 6]; n],
        };
        let k = assemble_dense(&model, &Material::default());
        let asym = (&k - k.transpose()).abs().max();
        assert!(asym <= 1e-10 * k.abs().max());
        let eig = k.symmetric_eigenvalues();
        let max_ev = eig.iter().cloned().fold(0.0f64, f64::max);
        let zero_modes = eig.iter().filter(|&&ev| ev.abs() <= 1e-10 * max_ev).count();
        assert_eq!(zero_modes, 6, "eigenvalues: {eig:?}");
    }

    #[test]
    fn forces_invariant_under_modulus() {
        let p = 900.0;
        let mut m = straight_beam(4, 5000.0, 70.0);
        m.fixed[0] = [true; 6];
        m.loads[4][2] = -p;
        m.loads[2][0] = p / 3.0;
        let sol_a = assemble_solve(
            &m,
            &Material {
                e: 205000.0,
                nu: 0.3,
            },
        )
        .unwrap();
        let sol_b = assemble_solve(
            &m,
            &Material {
                e: 205000.0 * 7.5,
                nu: 0.3,
            },
        )
        .unwrap();
        for (a, b) in sol_a.n.iter().zip(&sol_b.n) {
            assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-9);
        }
        for (a, b) in sol_a.v_end.iter().zip(&sol_b.v_end) {
            assert_relative_eq!(a[0], b[0], max_relative = 1e-9, epsilon = 1e-9);
            assert_relative_eq!(a[1], b[1], max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn objectivity_under_rigid_rotation() {
        let p = 650.0;
        let mut m = straight_beam(3, 3600.0, 60.0);
        m.fixed[0] = [true; 6];
        m.loads[3][2] = -p;
        let mat = Material::default();
        let sol = assemble_solve(&m, &mat).unwrap();

        let rot = nalgebra::Rotation3::from_euler_angles(0.3, 0.8, -0.4);
        let mut m2 = m.clone();
        for node in &mut m2.nodes {
            node.pos = rot * node.pos;
            node.normal = rot * node.normal;
        }
        for load in &mut m2.loads {
            let f = rot * Vector3::new(load[0], load[1], load[2]);
            load[0] = f[0];
            load[1] = f[1];
            load[2] = f[2];
        }
        let sol2 = assemble_solve(&m2, &mat).unwrap();
        for (a, b) in sol.n.iter().zip(&sol2.n) {
            assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-8);
        }
        for (a, b) in sol.v_end.iter().zip(&sol2.v_end) {
            assert_relative_eq!(rot * a[0], b[0], max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn mechanism_is_reported() {
        // An unrestrained beam is a mechanism.
        let mut m = straight_beam(2, 1000.0, 50.0);
        m.loads[2][2] = -1.0;
        assert!(matches!(
            assemble_solve(&m, &Material::default()),
            Err(Error::SingularStiffness(_))
        ));
    }

    #[test]
    fn truss_like_chain_has_tiny_shear_ratio() {
        // Axially loaded straight chain: shear ratios ~ 0.
        let mut m = straight_beam(3, 3000.0, 50.0);
        m.fixed[0] = [true; 6];
        for i in 1..=3 {
            m.loads[i][0] = 100.0;
        }
        let sol = assemble_solve(&m, &Material::default()).unwrap();
        let ratios = shear_load_ratio(&sol, &m, &[1, 2]);
        assert!(ratios.mean <= 1e-10);
    }
}
