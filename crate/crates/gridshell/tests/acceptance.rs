//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use nalgebra::{Rotation3, Unit, Vector3, Vector4};
use once_cell::sync::Lazy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridshell::config::{compose_steps, PipelineConfig};
use gridshell::cyclide::{CyclideParams, DEFAULT_FD_STEP};
use gridshell::fem::{assemble_solve, pipe_section, FrameMember, FrameModel, FrameNode, Material};
use gridshell::laguerre::{pe_dot, LaguerreMap, PeRotationPlane, EQ5_TOL};
use gridshell::membrane::{
    build_field, compatibility_residual, equilibrium_residuals, fd_l_isothermic_mismatch,
    transform_field, MembraneField, SurfaceDef,
};
use gridshell::pipeline::{run_pipeline, PipelineOutput};
use gridshell::report::{PAPER_CORNER_TARGETS, PAPER_RISE};

/// Full paper pipeline, shared by the quantitative criteria.
static PIPELINE: Lazy<PipelineOutput> = Lazy::new(|| {
    run_pipeline(&PipelineConfig::paper()).expect("paper pipeline must run")
});

fn base_field(n_xi: usize, n_eta: usize) -> MembraneField {
    build_field(
        SurfaceDef::Base {
            params: CyclideParams::paper(),
            h: DEFAULT_FD_STEP,
        },
        n_xi,
        n_eta,
        -0.0005,
        (0.0, 0.075),
    )
    .expect("paper field")
}

fn verdict(idx: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {idx} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {idx} ({name}) failed: {detail}");
}

#[test]
fn criterion_01_laguerre_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let planes = [
        PeRotationPlane::X2X3,
        PeRotationPlane::X3X1,
        PeRotationPlane::X1X2,
    ];
    let mut max_rel = 0.0f64;
    let mut max_eq5 = 0.0f64;
    for _ in 0..1000 {
        // random composition of t = 0 generators (pe-rotations and pure
        // Euclidean rotations)
        let mut maps = Vec::new();
        for _ in 0..3 {
            if rng.random_bool(0.5) {
                maps.push(LaguerreMap::pe_rotation(
                    planes[rng.random_range(0..3)],
                    rng.random_range(-1.0..1.0),
                ));
            } else {
                let axis = Unit::new_normalize(Vector3::new(
                    rng.random_range(-1.0..1.0f64) + 1e-3,
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ));
                let rot = Rotation3::from_axis_angle(&axis, rng.random_range(-3.0..3.0));
                maps.push(LaguerreMap::euclidean(*rot.matrix(), Vector3::zeros()).unwrap());
            }
        }
        let m = LaguerreMap::compose(&maps).unwrap();
        max_eq5 = max_eq5.max(m.eq5_residual());
        let mut v4 = || {
            Vector4::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        };
        let (x, y) = (v4(), v4());
        let before = pe_dot(&x, &y);
        let after = pe_dot(&(m.d * x), &(m.d * y));
        let scale = x.norm() * y.norm();
        max_rel = max_rel.max((after - before).abs() / scale.max(1e-12));
    }
    verdict(
        1,
        "Laguerre invariance",
        max_rel <= 1e-10 && max_eq5 <= EQ5_TOL,
        &format!("max pe-dot deviation {max_rel:.2e} (<=1e-10), max Eq.5 residual {max_eq5:.2e} (<=1e-12)"),
    );
}

#[test]
fn criterion_02_l_isothermic_preservation() {
    let cfg = PipelineConfig::paper();
    let base = SurfaceDef::Base {
        params: cfg.surface.params(),
        h: cfg.surface.fd_step,
    };
    let map = compose_steps(&cfg.transformation).unwrap();
    let transformed = SurfaceDef::Transformed {
        params: cfg.surface.params(),
        h: cfg.surface.fd_step,
        map: map.clone(),
    };
    let probe: Vec<(f64, f64)> = {
        let params = cfg.surface.params();
        let mut pts = Vec::new();
        for i in 0..=6 {
            for j in 0..=6 {
                let xi = params.xi_range.0
                    + (params.xi_range.1 - params.xi_range.0) * i as f64 / 6.0;
                let eta = params.eta_range.0
                    + (params.eta_range.1 - params.eta_range.0) * j as f64 / 6.0;
                pts.push((xi, eta));
            }
        }
        pts
    };
    let mut before = 0.0f64;
    let mut after = 0.0f64;
    let mut third_form = 0.0f64;
    let h = 1e-5;
    for &(xi, eta) in &probe {
        before = before.max(fd_l_isothermic_mismatch(&base, xi, eta).unwrap());
        after = after.max(fd_l_isothermic_mismatch(&transformed, xi, eta).unwrap());
        // FD third fundamental form: |n_xi|^2 and |n_eta|^2 vs e^{2 theta~}
        let s = transformed.sample(xi, eta).unwrap();
        let n = |x: f64, e: f64| transformed.sample(x, e).unwrap().n;
        let n_xi = (n(xi + h, eta) - n(xi - h, eta)) / (2.0 * h);
        let n_eta = (n(xi, eta + h) - n(xi, eta - h)) / (2.0 * h);
        let e2t = s.e_theta_signed().powi(2);
        third_form = third_form
            .max(((n_xi.norm_squared() - e2t) / e2t).abs())
            .max(((n_eta.norm_squared() - e2t) / e2t).abs());
    }
    verdict(
        2,
        "L-isothermic preservation",
        before <= 1e-4 && after <= 1e-3 && third_form <= 1e-3,
        &format!(
            "|kA| mismatch before {before:.2e} (<=1e-4), after {after:.2e} (<=1e-3), third-form deviation {third_form:.2e} (<=1e-3)"
        ),
    );
}

#[test]
fn criterion_03_membrane_statics() {
    // Frame step 1e-4 for the force residuals keeps the finer grid clear of
    // the second-difference roundoff floor of the 1e-5 default; Eq. (12)
    // stacks another differentiation level on top, so its asymptotic decay
    // is measured on a finer grid pair with step 3e-4.
    let field = |h: f64, n_xi: usize, n_eta: usize| {
        build_field(
            SurfaceDef::Base {
                params: CyclideParams::paper(),
                h,
            },
            n_xi,
            n_eta,
            -0.0005,
            (0.0, 0.075),
        )
        .expect("paper field")
    };
    let coarse = field(1e-4, 14, 16);
    let fine = field(1e-4, 28, 32);
    let rc = equilibrium_residuals(&coarse);
    let rf = equilibrium_residuals(&fine);
    let ratio_a = rc.res_8a / rf.res_8a;
    let ratio_b = rc.res_8b / rf.res_8b;
    let comp_ratio = compatibility_residual(&field(3e-4, 112, 128))
        / compatibility_residual(&field(3e-4, 224, 256));
    let pass = rc.res_8c <= 1e-12
        && rf.res_8c <= 1e-12
        && ratio_a >= 3.0
        && ratio_b >= 3.0
        && comp_ratio >= 3.0;
    verdict(
        3,
        "membrane statics",
        pass,
        &format!(
            "8c residual {:.1e} (<=1e-12); refinement ratios 8a {ratio_a:.1}, 8b {ratio_b:.1}, Eq.12 {comp_ratio:.1} (all >=3)",
            rc.res_8c.max(rf.res_8c)
        ),
    );
}

#[test]
fn criterion_04_i0_anchor() {
    let i0 = PIPELINE.base.field.i0;
    let rel = (i0 + 76850.0).abs() / 76850.0;
    verdict(
        4,
        "I0 anchor",
        rel <= 0.02,
        &format!("I0 = {i0:.1} N vs -76850 N ({:.2}% off, tol 2%)", rel * 100.0),
    );
}

#[test]
fn criterion_05_transformed_geometry() {
    let geo = &PIPELINE.geometry;
    let rise_rel = (geo.rise - PAPER_RISE).abs() / PAPER_RISE;
    let corner_max = geo.rel_errors.iter().cloned().fold(0.0f64, f64::max);
    // Fallback: frame-independent corner-to-corner distances, compared under
    // the corner assignment that best matches the published distances (the
    // coordinate-optimal assignment need not be the distance-optimal one).
    let dist = |p: &[f64; 2], q: &[f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
    let mut dist_max = f64::INFINITY;
    let perms = [
        [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
        [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
        [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
        [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
    ];
    for perm in perms {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let d = dist(&geo.corners[perm[i]], &geo.corners[perm[j]]);
                let t = dist(&PAPER_CORNER_TARGETS[i], &PAPER_CORNER_TARGETS[j]);
                worst = worst.max((d - t).abs() / t);
            }
        }
        dist_max = dist_max.min(worst);
    }
    let pass = rise_rel <= 0.02 && (corner_max <= 0.02 || dist_max <= 0.02);
    verdict(
        5,
        "transformed geometry anchors",
        pass,
        &format!(
            "rise {:.0} mm ({:.2}% off, tol 2%); corner coordinate deviation {:.2}%, distance fallback {:.2}% (tol 2%)",
            geo.rise,
            rise_rel * 100.0,
            corner_max * 100.0,
            dist_max * 100.0
        ),
    );
}

#[test]
fn criterion_06_fem_verification() {
    // simply supported beam under midspan point load
    let material = Material { e: 205000.0, nu: 0.3 };
    let section = pipe_section(50.0).unwrap();
    let n_el = 8usize;
    let len = 4000.0f64;
    let p_load = -1.0e4f64;
    let nodes: Vec<FrameNode> = (0..=n_el)
        .map(|i| FrameNode {
            pos: Vector3::new(len * i as f64 / n_el as f64, 0.0, 0.0),
            normal: Vector3::z(),
        })
        .collect();
    let members: Vec<FrameMember> = (0..n_el)
        .map(|i| FrameMember { a: i, b: i + 1, section })
        .collect();
    let mut fixed = vec![[false; 6]; n_el + 1];
    fixed[0] = [true, true, true, true, false, false];
    fixed[n_el] = [false, true, true, false, false, false];
    let mut loads = vec![[0.0; 6]; n_el + 1];
    loads[n_el / 2][2] = p_load;
    let model = FrameModel { nodes, members, fixed, loads };
    let sol = assemble_solve(&model, &material).unwrap();
    let exact_ss = p_load * len.powi(3) / (48.0 * material.e * section.i);
    let err_ss = ((sol.u[n_el / 2][2] - exact_ss) / exact_ss).abs();

    // cantilever tip load
    let nodes: Vec<FrameNode> = (0..=n_el)
        .map(|i| FrameNode {
            pos: Vector3::new(len * i as f64 / n_el as f64, 0.0, 0.0),
            normal: Vector3::z(),
        })
        .collect();
    let members: Vec<FrameMember> = (0..n_el)
        .map(|i| FrameMember { a: i, b: i + 1, section })
        .collect();
    let mut fixed = vec![[false; 6]; n_el + 1];
    fixed[0] = [true; 6];
    let mut loads = vec![[0.0; 6]; n_el + 1];
    loads[n_el][2] = p_load;
    let model = FrameModel { nodes, members, fixed, loads };
    let sol_c = assemble_solve(&model, &material).unwrap();
    let exact_tip = p_load * len.powi(3) / (3.0 * material.e * section.i);
    let err_c = ((sol_c.u[n_el][2] - exact_tip) / exact_tip).abs();

    // pipeline equilibrium and E-invariance on the optimal design
    let eq = {
        let model = &PIPELINE.base.model;
        let radii = &PIPELINE.base.optimum.radii;
        let frame = model.frame_model(radii).unwrap();
        let sol1 = assemble_solve(&frame, &material).unwrap();
        let soft = Material { e: material.e * 7.5, nu: material.nu };
        let sol2 = assemble_solve(&frame, &soft).unwrap();
        let mut e_inv = 0.0f64;
        for (a, b) in sol1.n.iter().zip(&sol2.n) {
            e_inv = e_inv.max((a - b).abs() / a.abs().max(1.0));
        }
        (sol1.equilibrium_residual, e_inv)
    };
    let pass = err_ss <= 1e-8 && err_c <= 1e-8 && eq.0 <= 1e-8 && eq.1 <= 1e-9;
    verdict(
        6,
        "FEM verification",
        pass,
        &format!(
            "simply-supported err {err_ss:.1e}, cantilever err {err_c:.1e} (<=1e-8); pipeline equilibrium {:.1e} (<=1e-8); E-invariance {:.1e} (<=1e-9)",
            eq.0, eq.1
        ),
    );
}

#[test]
fn criterion_07_optimization_effectiveness() {
    let base_rows = &PIPELINE.base.rows;
    let init = base_rows.iter().find(|r| r.label == "Initial").unwrap();
    let opt = base_rows.iter().find(|r| r.label == "Optimal").unwrap();
    let reduction = opt.mean_dev / init.mean_dev;
    let t = PIPELINE.transformed.as_ref().expect("transformed experiment");
    let t_opt = t.rows.iter().find(|r| r.label == "Optimal").unwrap();
    let base_anchor = opt.mean_dev / 239.0;
    let t_anchor = t_opt.mean_dev / 262.0;
    let pass = reduction <= 0.30
        && (0.5..=2.0).contains(&base_anchor)
        && (0.5..=2.0).contains(&t_anchor);
    verdict(
        7,
        "optimization effectiveness",
        pass,
        &format!(
            "mean dev reduced to {:.1}% of initial (<=30%); optimal mean {:.1} N vs 239 N (x{:.2}), transformed {:.1} N vs 262 N (x{:.2}), tol factor 2",
            reduction * 100.0,
            opt.mean_dev,
            base_anchor,
            t_opt.mean_dev,
            t_anchor
        ),
    );
}

#[test]
fn criterion_08_adjustment_efficacy() {
    let t = PIPELINE.transformed.as_ref().expect("transformed experiment");
    let before = t.rows.iter().find(|r| r.label == "Before adjustment").unwrap();
    let after = t.rows.iter().find(|r| r.label == "After adjustment").unwrap();
    let reopt = t.rows.iter().find(|r| r.label == "Optimal").unwrap();
    let ratio = after.mean_dev / reopt.mean_dev;
    let pass = ratio <= 1.25 && after.mean_dev < before.mean_dev;
    verdict(
        8,
        "adjustment efficacy",
        pass,
        &format!(
            "adjusted mean {:.1} N vs re-optimized {:.1} N (ratio {:.3}, tol 1.25); before adjustment {:.1} N",
            after.mean_dev, reopt.mean_dev, ratio, before.mean_dev
        ),
    );
}

#[test]
fn criterion_09_shear_ratio_sanity() {
    let base_opt = PIPELINE
        .base
        .rows
        .iter()
        .find(|r| r.label == "Optimal")
        .unwrap();
    let t = PIPELINE.transformed.as_ref().expect("transformed experiment");
    let t_opt = t.rows.iter().find(|r| r.label == "Optimal").unwrap();
    let adj = t.rows.iter().find(|r| r.label == "After adjustment").unwrap();
    let worst = base_opt
        .mean_shear_ratio
        .max(t_opt.mean_shear_ratio)
        .max(adj.mean_shear_ratio);
    verdict(
        9,
        "shear ratio sanity",
        worst < 0.2,
        &format!(
            "mean |Q|/load: base optimal {:.3}, transformed optimal {:.3}, adjusted {:.3} (all <0.2)",
            base_opt.mean_shear_ratio, t_opt.mean_shear_ratio, adj.mean_shear_ratio
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let mut cfg = PipelineConfig::paper();
    cfg.grid.n_xi = 7;
    cfg.grid.n_eta = 8;
    cfg.optimization.max_iters = 300;
    let tmp = std::env::temp_dir().join("gridshell_acceptance_det");
    let run = |tag: &str| {
        let mut c = cfg.clone();
        c.outputs = tmp.join(tag);
        let out = run_pipeline(&c).unwrap();
        gridshell::pipeline::export_bundle(&c, &out, &c.outputs).unwrap();
        c.outputs
    };
    let d1 = run("a");
    let d2 = run("b");
    let mut compared = 0usize;
    let mut identical = true;
    for entry in std::fs::read_dir(&d1).unwrap() {
        let name = entry.unwrap().file_name();
        let p1 = d1.join(&name);
        let p2 = d2.join(&name);
        if p1.extension().map(|e| e == "csv").unwrap_or(false) {
            compared += 1;
            if std::fs::read(&p1).unwrap() != std::fs::read(&p2).unwrap() {
                identical = false;
            }
        }
    }
    verdict(
        10,
        "determinism",
        identical && compared >= 3,
        &format!("{compared} CSV files compared, bit-identical: {identical}"),
    );
}
