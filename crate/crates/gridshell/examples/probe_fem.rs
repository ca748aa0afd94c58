//! Probe: field magnitudes, widths, patch extent.
use gridshell::cyclide::{CyclideParams, DEFAULT_FD_STEP};
use gridshell::grid::{build_complete, Direction};
use gridshell::membrane::{build_field, SurfaceDef};

fn main() {
    let params = CyclideParams::paper();
    println!("xi range {:?}, eta range {:?}", params.xi_range, params.eta_range);
    let field = build_field(
        SurfaceDef::Base { params, h: DEFAULT_FD_STEP },
        14, 16, -0.0005, (0.0, 0.075),
    ).unwrap();
    let (mut t1min, mut t1max) = (f64::MAX, f64::MIN);
    let (mut t2min, mut t2max) = (f64::MAX, f64::MIN);
    for i in 0..=14 { for j in 0..=16 {
        t1min = t1min.min(field.t1[i][j]); t1max = t1max.max(field.t1[i][j]);
        t2min = t2min.min(field.t2[i][j]); t2max = t2max.max(field.t2[i][j]);
    }}
    println!("T1 range [{t1min:.2}, {t1max:.2}] N/mm, T2 range [{t2min:.2}, {t2max:.2}] N/mm");
    println!("I0 = {:.1}", field.i0);
    let model = build_complete(&field).unwrap();
    let p00 = model.nodes[0].position;
    let p0n = model.nodes[16].position;
    let pn0 = model.nodes[14 * 17].position;
    let pnn = model.nodes[14 * 17 + 16].position;
    println!("base corner span xi-side {:.0} mm, eta-side {:.0} mm, diag {:.0}",
        (pn0 - p00).norm(), (p0n - p00).norm(), (pnn - p00).norm());
    for d in [Direction::Xi, Direction::Eta] {
        let ws: Vec<f64> = model.members.iter().filter(|m| m.in_objective && m.direction == d)
            .map(|m| m.tributary_width).collect();
        let mean = ws.iter().sum::<f64>() / ws.len() as f64;
        println!("{d:?} members: mean width {mean:.1} mm");
    }
}
