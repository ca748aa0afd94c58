//! Closed-form membrane forces on the patch under uniform normal pressure
//! (Appendix C), the center condition fixing the self-stress parameter I0
//! (§5), residual checks for the equilibrium (Eqs. 8a-c) and compatibility
//! (Eq. 12) conditions, and analytic transport of the whole field through a
//! Laguerre transformation (Appendices B and D).

use nalgebra::Vector3;

use crate::cyclide::{self, CyclideParams, SurfaceSample};
use crate::error::{Error, Result};
use crate::laguerre::{transform_contact_element, transform_curvatures, ContactElement, LaguerreMap};

/// A surface the field can be evaluated on at arbitrary (xi, eta): the base
/// cyclide patch, or the patch pushed through a Laguerre map.
#[derive(Debug, Clone)]
pub enum SurfaceDef {
    Base {
        params: CyclideParams,
        h: f64,
    },
    Transformed {
        params: CyclideParams,
        h: f64,
        map: LaguerreMap,
    },
}

impl SurfaceDef {
    pub fn params(&self) -> &CyclideParams {
        match self {
            SurfaceDef::Base { params, .. } | SurfaceDef::Transformed { params, .. } => params,
        }
    }

    pub fn fd_step(&self) -> f64 {
        match self {
            SurfaceDef::Base { h, .. } | SurfaceDef::Transformed { h, .. } => *h,
        }
    }

    /// Transformed surface point (mm) at (xi, eta); identical to the base
    /// point for `Base`.
    pub fn point(&self, xi: f64, eta: f64) -> Result<Vector3<f64>> {
        match self {
            SurfaceDef::Base { params, .. } => cyclide::eval_point(params, xi, eta),
            SurfaceDef::Transformed { params, h, map } => {
                let base = cyclide::fd_frame(|x, e| cyclide::eval_point(params, x, e), xi, eta, *h)?;
                Ok(transform_contact_element(map, &ContactElement::new(base.p, base.n))?.p)
            }
        }
    }

    /// Frame at (xi, eta). For the transformed surface the frame follows
    /// Appendix D analytically: the contact element and the two curvature
    /// spheres are transformed, then A~i = e^theta / (|n~| k~i) and
    /// theta~ = theta - ln|n~| (Appendix B); an independent finite-difference
    /// kappa2 of the transformed point cloud is kept as cross-check.
    pub fn sample(&self, xi: f64, eta: f64) -> Result<SurfaceSample> {
        match self {
            SurfaceDef::Base { params, h } => cyclide::eval_frame(params, xi, eta, *h),
            SurfaceDef::Transformed { params, h, map } => {
                let base = cyclide::eval_frame(params, xi, eta, *h)?;
                let ce = ContactElement::new(base.p, base.n);
                let new_ce = transform_contact_element(map, &ce)?;
                let (k1, k2, norm) = transform_curvatures(map, &ce, base.kappa1, base.kappa2)?;
                let e_theta = base.e_theta_signed();
                let a1 = e_theta / (norm * k1);
                let a2 = e_theta / (norm * k2);
                if a1 <= 0.0 || a2 <= 0.0 {
                    return Err(Error::CurvatureBlowUp(a1.min(a2)));
                }
                // The transformed point goes through a nested FD (base normal)
                // before the outer second difference, so the cross-check uses
                // a step no smaller than 1e-4 to stay clear of roundoff.
                let fd = cyclide::fd_frame(|x, e| self.point(x, e), xi, eta, h.max(1e-4))?;
                // Align the FD orientation with the transformed normal.
                let sign = if fd.n.dot(&new_ce.n) < 0.0 { -1.0 } else { 1.0 };
                Ok(SurfaceSample {
                    xi,
                    eta,
                    p: new_ce.p,
                    n: new_ce.n,
                    kappa1: k1,
                    kappa2: k2,
                    kappa2_fd: sign * fd.kappa2,
                    a1,
                    a2,
                    theta: base.theta - norm.ln(),
                })
            }
        }
    }
}

/// Membrane force field on a sampled patch: uniform normal pressure `z`
/// (N/mm^2, signed along the sample normals), the self-stress parameter `i0`
/// (N), and per-sample forces `t1`, `t2` (N/mm).
#[derive(Debug, Clone)]
pub struct MembraneField {
    pub surface: SurfaceDef,
    pub n_xi: usize,
    pub n_eta: usize,
    pub samples: Vec<Vec<SurfaceSample>>,
    pub z: f64,
    pub i0: f64,
    pub center: (f64, f64),
    pub t1: Vec<Vec<f64>>,
    pub t2: Vec<Vec<f64>>,
}

/// Closed-form membrane forces of Eq. (C.3).
///
/// Integrating Eq. (8a) along xi with the canal-surface identities
/// (kappa1 = 1/rho1(eta), A1/A2 = rho1/rho2, V = k/(kappa1*A1)) and imposing
/// Eq. (8b) forces the integration constant to be a global constant I0:
///
///   T1 = -Z/(2 kappa2) * (1 - ((A1 - A2)/A2)^2) - I0/(kappa2 A2^2)
///   T2 = -Z/(2 kappa1)                          + I0/(kappa1 A1^2)
///
/// The two closed forms satisfy (8c) identically only when kappa1*A1 =
/// kappa2*A2 holds exactly; on the finite-difference frame T2 is therefore
/// taken from (8c), which coincides with the closed form up to the
/// L-isothermic defect of the frame (~1e-5 relative).
pub fn membrane_forces(s: &SurfaceSample, z: f64, i0: f64) -> Result<(f64, f64)> {
    if s.kappa1 == 0.0 || s.kappa2 == 0.0 {
        return Err(Error::FlatPoint { xi: s.xi, eta: s.eta });
    }
    let ratio = (s.a1 - s.a2) / s.a2;
    let t1 = -z / (2.0 * s.kappa2) * (1.0 - ratio * ratio) - i0 / (s.kappa2 * s.a2 * s.a2);
    let t2 = (-z - s.kappa1 * t1) / s.kappa2;
    Ok((t1, t2))
}

/// Eq. (C.3) with the roles of the two principal directions swapped; used
/// only by the label-convention self-test.
fn membrane_forces_swapped(s: &SurfaceSample, z: f64, i0: f64) -> Result<(f64, f64)> {
    if s.kappa1 == 0.0 || s.kappa2 == 0.0 {
        return Err(Error::FlatPoint { xi: s.xi, eta: s.eta });
    }
    let ratio = (s.a2 - s.a1) / s.a1;
    let t2 = -z / (2.0 * s.kappa1) * (1.0 - ratio * ratio) - i0 / (s.kappa1 * s.a1 * s.a1);
    let t1 = (-z - s.kappa2 * t2) / s.kappa1;
    Ok((t1, t2))
}

fn solve_i0_with<F>(center: &SurfaceSample, z: f64, forces: F) -> Result<f64>
where
    F: Fn(&SurfaceSample, f64, f64) -> Result<(f64, f64)>,
{
    // T1*A2 - T2*A1 is affine in I0; solve it from two evaluations.
    let g = |i0: f64| -> Result<f64> {
        let (t1, t2) = forces(center, z, i0)?;
        Ok(t1 * center.a2 - t2 * center.a1)
    };
    let g0 = g(0.0)?;
    let g1 = g(1.0)?;
    let coeff = g1 - g0;
    if coeff.abs() <= 1e-14 * g0.abs().max(1.0) {
        return Err(Error::ConditionDegenerate(coeff));
    }
    Ok(-g0 / coeff)
}

/// Unique I0 with T1*A2 = T2*A1 at the center sample (§5 condition).
pub fn solve_i0(center: &SurfaceSample, z: f64) -> Result<f64> {
    solve_i0_with(center, z, |s, z, i0| membrane_forces(s, z, i0))
}

/// Sample the surface on an (n_xi + 1) x (n_eta + 1) grid, fix I0 from the
/// center condition, and evaluate the closed-form forces everywhere.
pub fn build_field(
    surface: SurfaceDef,
    n_xi: usize,
    n_eta: usize,
    z: f64,
    center: (f64, f64),
) -> Result<MembraneField> {
    let center_sample = surface.sample(center.0, center.1)?;
    let i0 = solve_i0(&center_sample, z)?;
    let params = *surface.params();
    let mut samples = Vec::with_capacity(n_xi + 1);
    let mut t1 = Vec::with_capacity(n_xi + 1);
    let mut t2 = Vec::with_capacity(n_xi + 1);
    for i in 0..=n_xi {
        let xi = cyclide::lerp(params.xi_range, i, n_xi);
        let mut srow = Vec::with_capacity(n_eta + 1);
        let mut t1row = Vec::with_capacity(n_eta + 1);
        let mut t2row = Vec::with_capacity(n_eta + 1);
        for j in 0..=n_eta {
            let eta = cyclide::lerp(params.eta_range, j, n_eta);
            let s = surface.sample(xi, eta)?;
            let (f1, f2) = membrane_forces(&s, z, i0)?;
            srow.push(s);
            t1row.push(f1);
            t2row.push(f2);
        }
        samples.push(srow);
        t1.push(t1row);
        t2.push(t2row);
    }
    Ok(MembraneField {
        surface,
        n_xi,
        n_eta,
        samples,
        z,
        i0,
        center,
        t1,
        t2,
    })
}

impl MembraneField {
    /// Frame and forces at an arbitrary parameter point (used for member
    /// midpoints during target computation).
    pub fn forces_at(&self, xi: f64, eta: f64) -> Result<(SurfaceSample, f64, f64)> {
        let s = self.surface.sample(xi, eta)?;
        let (t1, t2) = membrane_forces(&s, self.z, self.i0)?;
        Ok((s, t1, t2))
    }

    pub fn grid_steps(&self) -> (f64, f64) {
        let params = self.surface.params();
        (
            (params.xi_range.1 - params.xi_range.0) / self.n_xi as f64,
            (params.eta_range.1 - params.eta_range.0) / self.n_eta as f64,
        )
    }
}

/// Max absolute residuals of Eqs. (8a-c). The tangential residuals are
/// normalized by the largest magnitude of their own constituent terms, the
/// normal residual by |Z|.
#[derive(Debug, Clone, Copy)]
pub struct EquilibriumResiduals {
    pub res_8a: f64,
    pub res_8b: f64,
    pub res_8c: f64,
}

fn residuals_for(field: &MembraneField, t1: &[Vec<f64>], t2: &[Vec<f64>]) -> EquilibriumResiduals {
    let (dxi, deta) = field.grid_steps();
    let (mut num_a, mut den_a) = (0.0f64, 0.0f64);
    let (mut num_b, mut den_b) = (0.0f64, 0.0f64);
    let mut res_c = 0.0f64;
    for i in 0..=field.n_xi {
        for j in 0..=field.n_eta {
            let s = &field.samples[i][j];
            res_c = res_c.max((s.kappa1 * t1[i][j] + s.kappa2 * t2[i][j] + field.z).abs());
            if i >= 1 && i <= field.n_xi - 1 {
                let dt1 = (t1[i + 1][j] - t1[i - 1][j]) / (2.0 * dxi);
                let dln_a2 =
                    (field.samples[i + 1][j].a2.ln() - field.samples[i - 1][j].a2.ln()) / (2.0 * dxi);
                let coupling = dln_a2 * (t1[i][j] - t2[i][j]);
                num_a = num_a.max((dt1 + coupling).abs());
                den_a = den_a.max(dt1.abs().max(coupling.abs()));
            }
            if j >= 1 && j <= field.n_eta - 1 {
                let dt2 = (t2[i][j + 1] - t2[i][j - 1]) / (2.0 * deta);
                let dln_a1 =
                    (field.samples[i][j + 1].a1.ln() - field.samples[i][j - 1].a1.ln()) / (2.0 * deta);
                let coupling = dln_a1 * (t2[i][j] - t1[i][j]);
                num_b = num_b.max((dt2 + coupling).abs());
                den_b = den_b.max(dt2.abs().max(coupling.abs()));
            }
        }
    }
    EquilibriumResiduals {
        res_8a: num_a / den_a.max(f64::MIN_POSITIVE),
        res_8b: num_b / den_b.max(f64::MIN_POSITIVE),
        res_8c: res_c / field.z.abs().max(f64::MIN_POSITIVE),
    }
}

/// Finite-difference residuals of the equilibrium equations (8a-c) over the
/// field grid.
pub fn equilibrium_residuals(field: &MembraneField) -> EquilibriumResiduals {
    residuals_for(field, &field.t1, &field.t2)
}

/// Tangential residuals under the opposite force-label assignment (the C.3
/// formulas applied with the principal directions swapped). The startup
/// self-test asserts these are worse than the implemented assignment,
/// resolving the §3 / Fig. 1 labeling ambiguity numerically.
pub fn equilibrium_residuals_swapped(field: &MembraneField) -> Result<EquilibriumResiduals> {
    let center_sample = field.surface.sample(field.center.0, field.center.1)?;
    let i0 = solve_i0_with(&center_sample, field.z, |s, z, i0| {
        membrane_forces_swapped(s, z, i0)
    })?;
    let mut t1 = vec![vec![0.0; field.n_eta + 1]; field.n_xi + 1];
    let mut t2 = vec![vec![0.0; field.n_eta + 1]; field.n_xi + 1];
    for i in 0..=field.n_xi {
        for j in 0..=field.n_eta {
            let (f1, f2) = membrane_forces_swapped(&field.samples[i][j], field.z, i0)?;
            t1[i][j] = f1;
            t2[i][j] = f2;
        }
    }
    Ok(residuals_for(field, &t1, &t2))
}

/// Asserts the implemented label convention beats the swapped one on the
/// tangential equilibrium residuals. Returns (implemented, swapped) maxima.
pub fn label_convention_self_test(field: &MembraneField) -> Result<(f64, f64)> {
    let own = equilibrium_residuals(field);
    let swapped = equilibrium_residuals_swapped(field)?;
    let own_max = own.res_8a.max(own.res_8b);
    let sw_max = swapped.res_8a.max(swapped.res_8b);
    if own_max >= sw_max {
        return Err(Error::Config(format!(
            "label convention self-test failed: implemented residual {own_max:e} >= swapped {sw_max:e}"
        )));
    }
    Ok((own_max, sw_max))
}

/// Numerical residual of the compatibility condition Eq. (12).
///
/// Eliminating T2 through (8c) reduces the system to two linear first-order
/// equations for T1 alone,
///
///   dT1/dxi  = P*T1 + R,   P = -(ln A2)_xi (kappa1+kappa2)/kappa2,
///                          R = -(ln A2)_xi Z/kappa2,
///   dT1/deta = Q*T1 + S,   Q = (ln kappa2/kappa1)_eta
///                              - (ln A1)_eta (kappa1+kappa2)/kappa1,
///                          S = (ln kappa2/A1... )  [see below],
///
/// with S = Z*((ln kappa2)_eta - (ln A1)_eta)/kappa1. Cross-differentiation
/// makes solvability equivalent to the purely geometric identities
/// P_eta = Q_xi and P*S - Q*R + R_eta - S_xi = 0, which hold exactly for an
/// L-isothermic patch (Upsilon = 0 in Appendix C). The returned value is the
/// larger of the two identities' finite-difference residuals over interior
/// samples, each normalized by its own largest constituent term; it decays
/// at second order in the grid spacing and is independent of I0.
pub fn compatibility_residual(field: &MembraneField) -> f64 {
    let (dxi, deta) = field.grid_steps();
    let n_xi = field.n_xi;
    let n_eta = field.n_eta;
    let coeffs = |i: usize, j: usize| -> (f64, f64, f64, f64) {
        let s = &field.samples[i][j];
        let b_xi =
            (field.samples[i + 1][j].a2.ln() - field.samples[i - 1][j].a2.ln()) / (2.0 * dxi);
        let a_eta =
            (field.samples[i][j + 1].a1.ln() - field.samples[i][j - 1].a1.ln()) / (2.0 * deta);
        let p_eta = (field.samples[i][j + 1].kappa1.abs().ln()
            - field.samples[i][j - 1].kappa1.abs().ln())
            / (2.0 * deta);
        let q_eta = (field.samples[i][j + 1].kappa2.abs().ln()
            - field.samples[i][j - 1].kappa2.abs().ln())
            / (2.0 * deta);
        let sum = s.kappa1 + s.kappa2;
        let p = -b_xi * sum / s.kappa2;
        let r = -b_xi * field.z / s.kappa2;
        let q = q_eta - p_eta - a_eta * sum / s.kappa1;
        let ss = field.z * (q_eta - a_eta) / s.kappa1;
        (p, q, r, ss)
    };
    let (mut num1, mut den1) = (0.0f64, 0.0f64);
    let (mut num2, mut den2) = (0.0f64, 0.0f64);
    for i in 2..=n_xi.saturating_sub(2) {
        for j in 2..=n_eta.saturating_sub(2) {
            let (p, q, r, s) = coeffs(i, j);
            let p_eta = (coeffs(i, j + 1).0 - coeffs(i, j - 1).0) / (2.0 * deta);
            let q_xi = (coeffs(i + 1, j).1 - coeffs(i - 1, j).1) / (2.0 * dxi);
            let r_eta = (coeffs(i, j + 1).2 - coeffs(i, j - 1).2) / (2.0 * deta);
            let s_xi = (coeffs(i + 1, j).3 - coeffs(i - 1, j).3) / (2.0 * dxi);
            num1 = num1.max((p_eta - q_xi).abs());
            den1 = den1.max(p_eta.abs().max(q_xi.abs()));
            num2 = num2.max((p * s - q * r + r_eta - s_xi).abs());
            den2 = den2.max(
                (p * s)
                    .abs()
                    .max((q * r).abs())
                    .max(r_eta.abs())
                    .max(s_xi.abs()),
            );
        }
    }
    let c1 = num1 / den1.max(f64::MIN_POSITIVE);
    let c2 = num2 / den2.max(f64::MIN_POSITIVE);
    c1.max(c2)
}

/// Transport the field through a Laguerre map: geometry and curvatures move
/// per Appendices A/D, and I0 is re-solved from the center condition on the
/// transformed surface (matching §5, which restates the condition after the
/// transformation).
pub fn transform_field(field: &MembraneField, map: &LaguerreMap) -> Result<MembraneField> {
    let surface = match &field.surface {
        SurfaceDef::Base { params, h } => SurfaceDef::Transformed {
            params: *params,
            h: *h,
            map: map.clone(),
        },
        SurfaceDef::Transformed { params, h, map: old } => SurfaceDef::Transformed {
            params: *params,
            h: *h,
            map: LaguerreMap::compose(&[old.clone(), map.clone()])?,
        },
    };
    build_field(surface, field.n_xi, field.n_eta, field.z, field.center)
}

/// Relative mismatch |k1*A1 - k2*A2| / |k1*A1| of the purely
/// finite-difference frame of the (possibly transformed) surface; the
/// independent oracle for the L-isothermic preservation checks.
pub fn fd_l_isothermic_mismatch(surface: &SurfaceDef, xi: f64, eta: f64) -> Result<f64> {
    // Second-difference curvatures of the (possibly nested-FD) point function
    // are roundoff-limited below h ~ 1e-4.
    let h = surface.fd_step().max(1e-4);
    let f = cyclide::fd_frame(|x, e| surface.point(x, e), xi, eta, h)?;
    let lhs = f.kappa1 * f.a1;
    let rhs = f.kappa2 * f.a2;
    Ok(((lhs - rhs) / lhs).abs())
}
