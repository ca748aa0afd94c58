//! Construct Laguerre maps from the generators, compose them, and transport a
//! contact element (point + unit normal) and its principal curvatures.

use gridshell::laguerre::{
    transform_contact_element, transform_curvatures, ContactElement, LaguerreMap,
    PeRotationPlane,
};
use nalgebra::Vector3;

fn main() -> gridshell::Result<()> {
    let maps = [
        LaguerreMap::pe_rotation(PeRotationPlane::X2X3, 0.1),
        LaguerreMap::pe_rotation(PeRotationPlane::X3X1, 0.2),
        LaguerreMap::pe_rotation(PeRotationPlane::X1X2, 0.3),
        LaguerreMap::offset(0.5),
        LaguerreMap::scaling(2.0)?,
    ];
    let composed = LaguerreMap::compose(&maps)?;
    println!("Eq. (5) residual of the composition: {:e}", composed.eq5_residual());

    let ce = ContactElement::new(Vector3::new(1.0, 0.5, -0.25), Vector3::z());
    let img = transform_contact_element(&composed, &ce)?;
    println!("point  {:?} -> {:?}", ce.p.as_slice(), img.p.as_slice());
    println!("normal {:?} -> {:?}", ce.n.as_slice(), img.n.as_slice());

    let (k1, k2, norm) = transform_curvatures(&composed, &ce, 0.8, -0.3)?;
    println!("curvatures (0.8, -0.3) -> ({k1:.6}, {k2:.6}), |n~| = {norm:.6}");

    let inv = composed.inverse();
    let back = transform_contact_element(&inv, &img)?;
    println!("round-trip error: {:e}", (back.p - ce.p).norm());
    Ok(())
}
