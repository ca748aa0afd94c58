//! Discretize the membrane field into a gridshell: nodes, members, polyline
//! groups, target axial forces, and pressure loads.

use gridshell::cyclide::{CyclideParams, DEFAULT_FD_STEP};
use gridshell::grid::{build_complete, Direction};
use gridshell::membrane::{build_field, SurfaceDef};

fn main() -> gridshell::Result<()> {
    let field = build_field(
        SurfaceDef::Base {
            params: CyclideParams::paper(),
            h: DEFAULT_FD_STEP,
        },
        14,
        16,
        -0.0005,
        (0.0, 0.075),
    )?;
    let model = build_complete(&field)?;
    println!(
        "{} nodes, {} members, {} groups ({} variable), {} objective members",
        model.nodes.len(),
        model.members.len(),
        model.groups.len(),
        model.variable_group_ids().len(),
        model.members.iter().filter(|m| m.in_objective).count()
    );
    let (min_xi, max_xi) = minmax(&model, Direction::Xi);
    let (min_eta, max_eta) = minmax(&model, Direction::Eta);
    println!("xi-member targets in [{min_xi:.1}, {max_xi:.1}] N");
    println!("eta-member targets in [{min_eta:.1}, {max_eta:.1}] N");
    println!("total tributary area: {:.3e} mm^2", model.total_area());
    Ok(())
}

fn minmax(model: &gridshell::grid::GridshellModel, dir: Direction) -> (f64, f64) {
    model
        .members
        .iter()
        .filter(|m| m.in_objective && m.direction == dir)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            (lo.min(m.target_force), hi.max(m.target_force))
        })
}
