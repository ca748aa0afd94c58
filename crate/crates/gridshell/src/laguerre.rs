//! Cyclographic model of oriented spheres and the Laguerre transformation
//! group (paper §2, Appendices A and D).
//!
//! An oriented sphere with center `c` and signed radius `r` is the 5-vector
//! `(1, c, r)`; an oriented plane with unit normal `n` and support `h` is
//! `(0, n, h)`. The spatial part lives in a pseudo-Euclidean space with the
//! signature (+,+,+,-) inner product [`pe_dot`]; oriented contact of two
//! spheres is `pe_norm_sq(x - y) = 0`.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};

/// Tolerance for the pseudo-orthogonality validation of Eq. (5):
/// roughly 100x double epsilon, leaving headroom for ~10 generator products.
pub const EQ5_TOL: f64 = 1e-12;

/// Signature matrix E_pe = diag(1, 1, 1, -1).
pub fn e_pe() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0))
}

/// pe-inner product x1*y1 + x2*y2 + x3*y3 - x4*y4 (Eq. 1).
pub fn pe_dot(x: &Vector4<f64>, y: &Vector4<f64>) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2] - x[3] * y[3]
}

/// Squared pe-norm (Eq. 2). The sign is meaningful: zero means the vector is
/// a null direction (oriented contact), negative means timelike.
pub fn pe_norm_sq(x: &Vector4<f64>) -> f64 {
    pe_dot(x, x)
}

/// A 5-component homogeneous vector (weight, center/normal, signed radius)
/// representing an oriented sphere (`w = 1`, point when `r = 0`) or an
/// oriented plane (`w = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclographicVector {
    pub w: f64,
    pub c: Vector3<f64>,
    pub r: f64,
}

impl CyclographicVector {
    pub fn sphere(c: Vector3<f64>, r: f64) -> Self {
        Self { w: 1.0, c, r }
    }

    pub fn point(p: Vector3<f64>) -> Self {
        Self::sphere(p, 0.0)
    }

    pub fn plane(n: Vector3<f64>, h: f64) -> Self {
        Self { w: 0.0, c: n, r: h }
    }

    /// Spatial 4-vector (x1..x4).
    pub fn x(&self) -> Vector4<f64> {
        Vector4::new(self.c[0], self.c[1], self.c[2], self.r)
    }
}

/// Plane selector for the pe-rotations of Eq. (7). A pe-rotation "about the
/// x2x3-plane" fixes x2, x3 and applies a hyperbolic rotation to (x1, x4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeRotationPlane {
    X2X3,
    X3X1,
    X1X2,
}

impl PeRotationPlane {
    /// Index of the spatial coordinate mixed with x4.
    fn mixed_axis(self) -> usize {
        match self {
            PeRotationPlane::X2X3 => 0,
            PeRotationPlane::X3X1 => 1,
            PeRotationPlane::X1X2 => 2,
        }
    }
}

/// Laguerre transformation in the form of Eq. (4): the spatial part of a
/// 5-vector (w, x) maps to `t*w + lambda * D * x` with D pseudo-orthogonal.
///
/// Maps are only constructible through the generators below and through
/// [`LaguerreMap::compose`], so Eq. (5) holds by construction; composition
/// still re-validates the product.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LaguerreMap {
    pub d: Matrix4<f64>,
    pub t: Vector4<f64>,
    pub lambda: f64,
}

impl LaguerreMap {
    pub fn identity() -> Self {
        Self {
            d: Matrix4::identity(),
            t: Vector4::zeros(),
            lambda: 1.0,
        }
    }

    /// pe-rotation of Eq. (7) by hyperbolic angle `tau`.
    pub fn pe_rotation(plane: PeRotationPlane, tau: f64) -> Self {
        let i = plane.mixed_axis();
        let mut d = Matrix4::identity();
        d[(i, i)] = tau.cosh();
        d[(3, 3)] = tau.cosh();
        d[(i, 3)] = tau.sinh();
        d[(3, i)] = tau.sinh();
        Self {
            d,
            t: Vector4::zeros(),
            lambda: 1.0,
        }
    }

    /// Euclidean motion: proper rotation `rot` plus translation `shift`.
    pub fn euclidean(rot: Matrix3<f64>, shift: Vector3<f64>) -> Result<Self> {
        let ortho = (rot.transpose() * rot - Matrix3::identity()).abs().max();
        let det = rot.determinant();
        if ortho > 1e-10 || (det - 1.0).abs() > 1e-10 {
            return Err(Error::NotARotation(ortho.max((det - 1.0).abs())));
        }
        let mut d = Matrix4::identity();
        d.fixed_view_mut::<3, 3>(0, 0).copy_from(&rot);
        Ok(Self {
            d,
            t: Vector4::new(shift[0], shift[1], shift[2], 0.0),
            lambda: 1.0,
        })
    }

    /// Offset (parallel) transformation: every sphere radius grows by `d`.
    pub fn offset(d: f64) -> Self {
        Self {
            d: Matrix4::identity(),
            t: Vector4::new(0.0, 0.0, 0.0, d),
            lambda: 1.0,
        }
    }

    /// Similarity scaling by `lambda > 0`.
    pub fn scaling(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::BadScaling(lambda));
        }
        Ok(Self {
            d: Matrix4::identity(),
            t: Vector4::zeros(),
            lambda,
        })
    }

    /// Max-norm residual of Eq. (5), `D^T E_pe D - E_pe`.
    pub fn eq5_residual(&self) -> f64 {
        (self.d.transpose() * e_pe() * self.d - e_pe()).abs().max()
    }

    pub fn validate(&self) -> Result<()> {
        let residual = self.eq5_residual();
        if residual > EQ5_TOL {
            return Err(Error::NotPseudoOrthogonal {
                residual,
                tol: EQ5_TOL,
            });
        }
        Ok(())
    }

    /// Sequential application: `maps[0]` first. The product is re-validated
    /// against Eq. (5); failure signals numerical contamination.
    pub fn compose(maps: &[LaguerreMap]) -> Result<Self> {
        let mut acc = LaguerreMap::identity();
        for m in maps {
            // second map g after first f: x -> g.t*w + g.lambda*g.D*(f.t*w + f.lambda*f.D*x)
            acc = LaguerreMap {
                d: m.d * acc.d,
                t: m.t + m.lambda * m.d * acc.t,
                lambda: m.lambda * acc.lambda,
            };
        }
        acc.validate()?;
        Ok(acc)
    }

    /// Group inverse.
    pub fn inverse(&self) -> Self {
        // D is pseudo-orthogonal, so D^-1 = E_pe D^T E_pe.
        let d_inv = e_pe() * self.d.transpose() * e_pe();
        Self {
            d: d_inv,
            t: -(d_inv * self.t) / self.lambda,
            lambda: 1.0 / self.lambda,
        }
    }

    /// Apply the map to the spatial part of a 5-vector with weight `w`.
    pub fn apply_x(&self, w: f64, x: &Vector4<f64>) -> Vector4<f64> {
        self.t * w + self.lambda * (self.d * x)
    }

    /// Apply the map to a full cyclographic vector (Eq. 4).
    pub fn apply(&self, v: &CyclographicVector) -> CyclographicVector {
        let y = self.apply_x(v.w, &v.x());
        CyclographicVector {
            w: v.w,
            c: Vector3::new(y[0], y[1], y[2]),
            r: y[3],
        }
    }
}

/// A first-order contact element: surface point, unit outward normal, and the
/// `|n~|` bookkeeping factor accumulated by transformations (1 on the
/// original surface).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactElement {
    pub p: Vector3<f64>,
    pub n: Vector3<f64>,
    pub scale: f64,
}

impl ContactElement {
    pub fn new(p: Vector3<f64>, n: Vector3<f64>) -> Self {
        Self { p, n, scale: 1.0 }
    }
}

/// Image of the tangent-plane null vector `(n, -1)` under the map, sign
/// normalized so that the 4th component equals `-|n~|` (Appendix B
/// convention; null vectors are rays, so the flip is legal).
fn transformed_null_normal(map: &LaguerreMap, n: &Vector3<f64>) -> Result<Vector4<f64>> {
    let plane = Vector4::new(n[0], n[1], n[2], -1.0);
    let mut img = map.apply_x(0.0, &plane);
    if img[3] > 0.0 {
        img = -img;
    }
    let norm = img.fixed_rows::<3>(0).norm();
    if norm <= 1e-14 {
        return Err(Error::SingularTransform(norm));
    }
    Ok(img)
}

/// Transform a contact element through the sphere-pencil construction of
/// Appendix A: the point sphere and the tangent plane map to a pencil whose
/// zero-radius member is the new surface point.
pub fn transform_contact_element(map: &LaguerreMap, ce: &ContactElement) -> Result<ContactElement> {
    let img = transformed_null_normal(map, &ce.n)?;
    let n_spatial = Vector3::new(img[0], img[1], img[2]);
    let norm = -img[3];
    let q = map.apply_x(1.0, &Vector4::new(ce.p[0], ce.p[1], ce.p[2], 0.0));
    // Pencil member (q + a*n~, r0 - a*|n~|) has zero radius at a = r0/|n~|.
    let p_new = Vector3::new(q[0], q[1], q[2]) + (q[3] / norm) * n_spatial;
    Ok(ContactElement {
        p: p_new,
        n: n_spatial / norm,
        scale: ce.scale * norm,
    })
}

/// Transform the two principal curvature spheres and read the transformed
/// curvatures off the image radii (Appendix D). Returns `(k1~, k2~, |n~|)`.
///
/// With the finite-difference sign convention k = (r_uu . n)/|r_u|^2 the
/// curvature sphere of a principal direction is the oriented sphere with
/// center `p + n/k` and signed radius `-1/k` (its oriented normal at the
/// contact point, (p - c)/r, equals n). Transporting any other tangent
/// sphere — e.g. the reflected one at `p - n/k` — still passes the tangency
/// check below but does not give the image curvature.
pub fn transform_curvatures(
    map: &LaguerreMap,
    ce: &ContactElement,
    kappa1: f64,
    kappa2: f64,
) -> Result<(f64, f64, f64)> {
    let new_ce = transform_contact_element(map, ce)?;
    let norm = new_ce.scale / ce.scale;
    let mut out = [0.0f64; 2];
    for (slot, kappa) in out.iter_mut().zip([kappa1, kappa2]) {
        if kappa == 0.0 {
            return Err(Error::CurvatureBlowUp(f64::INFINITY));
        }
        let center = ce.p + ce.n / kappa;
        let sphere = Vector4::new(center[0], center[1], center[2], -1.0 / kappa);
        let img = map.apply_x(1.0, &sphere);
        let r_new = img[3];
        if r_new.abs() <= 1e-14 {
            return Err(Error::CurvatureBlowUp(r_new));
        }
        // Consistency: the image sphere must stay in oriented contact with
        // the transformed element, center = p~ - r~ * n~.
        let expected = new_ce.p - r_new * new_ce.n;
        let dev = (Vector3::new(img[0], img[1], img[2]) - expected).norm();
        if dev > 1e-9 * r_new.abs().max(1.0) {
            return Err(Error::SingularTransform(dev));
        }
        *slot = -1.0 / r_new;
    }
    Ok((out[0], out[1], norm))
}
