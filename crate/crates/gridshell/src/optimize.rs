//! Bound-constrained Nelder–Mead sizing of the group radii against the
//! membrane target axial forces (§4), and the stress-ratio adjustment of
//! Eq. (14) used after a Laguerre transformation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble_solve, pipe_section, FrameSolution, Material, PipeSection};
use crate::grid::GridshellModel;

/// Per-step clamp applied to the Eq. (14) area ratio.
pub const EQ14_CLAMP: (f64, f64) = (0.25, 4.0);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationConfig {
    /// Uniform initial radius for every group (mm).
    pub r_init: f64,
    /// Lower bound R_L (mm).
    pub r_lower: f64,
    /// Upper bound R_U (mm).
    pub r_upper: f64,
    pub max_iters: usize,
    /// Relative simplex spread tolerance.
    pub f_tol: f64,
    /// Initial simplex offset as a fraction of (R_U - R_L).
    pub simplex_perturbation: f64,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            r_init: 100.0,
            r_lower: 30.0,
            r_upper: 300.0,
            max_iters: 5000,
            f_tol: 1e-6,
            simplex_perturbation: 0.05,
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_lower > 0.0
            && self.r_lower <= self.r_init
            && self.r_init <= self.r_upper)
        {
            return Err(Error::BadOptimizationConfig(format!(
                "need 0 < R_L <= R_init <= R_U, got R_L={}, R_init={}, R_U={}",
                self.r_lower, self.r_init, self.r_upper
            )));
        }
        if self.f_tol <= 0.0 || self.simplex_perturbation <= 0.0 {
            return Err(Error::BadOptimizationConfig(
                "f_tol and simplex_perturbation must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObjectiveStats {
    /// F = sum over in-objective members of (N - N*)^2 (N^2).
    pub f: f64,
    /// max |N - N*| over in-objective members (N).
    pub max_dev: f64,
    /// mean |N - N*| over in-objective members (N).
    pub mean_dev: f64,
}

/// One FEM analysis: returns the deviation statistics over in-objective
/// members together with the frame solution. `radii` holds one radius per
/// group (indexed by group id).
pub fn objective(
    model: &GridshellModel,
    radii: &[f64],
    material: &Material,
) -> Result<(ObjectiveStats, FrameSolution)> {
    let frame = model.frame_model(radii)?;
    let sol = assemble_solve(&frame, material)?;
    let mut f = 0.0;
    let mut max_dev = 0.0f64;
    let mut sum_dev = 0.0;
    let mut count = 0usize;
    for m in &model.members {
        if m.in_objective {
            let dev = sol.n[m.id] - m.target_force;
            f += dev * dev;
            max_dev = max_dev.max(dev.abs());
            sum_dev += dev.abs();
            count += 1;
        }
    }
    let mean_dev = if count > 0 { sum_dev / count as f64 } else { 0.0 };
    Ok((
        ObjectiveStats {
            f,
            max_dev,
            mean_dev,
        },
        sol,
    ))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Best objective value so far (monotone non-increasing).
    pub f: f64,
    pub max_dev: f64,
    pub mean_dev: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    /// One radius per group id; fixed groups keep their input value.
    pub radii: Vec<f64>,
    pub stats: ObjectiveStats,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
}

/// Minimize F over the variable groups' radii with the standard Nelder–Mead
/// simplex (reflection 1, expansion 2, contraction 0.5, shrink 0.5); bounds
/// are enforced by clipping candidates into [R_L, R_U] before evaluation.
/// Generic over the objective so the unit tests can use analytic functions.
pub fn nelder_mead_core<F>(
    x0: &[f64],
    lower: f64,
    upper: f64,
    cfg: &OptimizationConfig,
    mut eval: F,
) -> Result<(Vec<f64>, ObjectiveStats, usize, usize, bool, Vec<TraceEntry>)>
where
    F: FnMut(&[f64]) -> Result<ObjectiveStats>,
{
    let n = x0.len();
    if n == 0 {
        return Err(Error::BadOptimizationConfig(
            "no variable groups to optimize".into(),
        ));
    }
    let mut evaluations = 0usize;
    let mut eval_clipped = |x: &mut Vec<f64>| -> Result<ObjectiveStats> {
        for v in x.iter_mut() {
            *v = v.clamp(lower, upper);
        }
        evaluations += 1;
        eval(x)
    };

    // Initial simplex: x0 plus one vertex per coordinate offset by
    // +perturbation*(upper-lower), clipped.
    let step = cfg.simplex_perturbation * (upper - lower);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        // step away from the nearer bound so the vertex stays distinct
        if v[i] + step > upper {
            v[i] -= step;
        } else {
            v[i] += step;
        }
        simplex.push(v);
    }
    let mut values: Vec<ObjectiveStats> = Vec::with_capacity(n + 1);
    for v in simplex.iter_mut() {
        values.push(eval_clipped(v)?);
    }

    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut best_so_far = f64::INFINITY;
    let record = |iter: usize, s: &ObjectiveStats, best: &mut f64, tr: &mut Vec<TraceEntry>| {
        if s.f < *best {
            *best = s.f;
            tr.push(TraceEntry {
                iteration: iter,
                f: s.f,
                max_dev: s.max_dev,
                mean_dev: s.mean_dev,
            });
        }
    };

    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;
    let mut iterations = 0usize;
    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        order.sort_by(|&a, &b| values[a].f.total_cmp(&values[b].f));
        let (best, worst, second_worst) = (order[0], order[n], order[n.saturating_sub(1)]);
        record(iter, &values[best], &mut best_so_far, &mut trace);

        // relative simplex spread
        let fb = values[best].f;
        let fw = values[worst].f;
        let spread = (fw - fb).abs() / fb.abs().max(1e-30);
        if spread <= cfg.f_tol {
            converged = true;
            break;
        }

        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for &idx in order.iter().take(n) {
            for k in 0..n {
                centroid[k] += simplex[idx][k] / n as f64;
            }
        }
        let blend = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
            a.iter()
                .zip(b)
                .map(|(&ca, &cb)| ca + t * (ca - cb))
                .collect()
        };

        let mut reflected = blend(&centroid, &simplex[worst], 1.0);
        let fr = eval_clipped(&mut reflected)?;
        if fr.f < values[best].f {
            let mut expanded = blend(&centroid, &simplex[worst], 2.0);
            let fe = eval_clipped(&mut expanded)?;
            if fe.f < fr.f {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr.f < values[second_worst].f {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            // contraction: outside if the reflection improved on the worst,
            // inside otherwise
            let mut contracted = if fr.f < values[worst].f {
                blend(&centroid, &simplex[worst], 0.5)
            } else {
                blend(&centroid, &simplex[worst], -0.5)
            };
            let fc = eval_clipped(&mut contracted)?;
            if fc.f < values[worst].f.min(fr.f) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward best
                let best_pt = simplex[best].clone();
                for &idx in order.iter().skip(1) {
                    let mut v: Vec<f64> = simplex[idx]
                        .iter()
                        .zip(&best_pt)
                        .map(|(&x, &b)| b + 0.5 * (x - b))
                        .collect();
                    values[idx] = eval_clipped(&mut v)?;
                    simplex[idx] = v;
                }
            }
        }
    }
    order.sort_by(|&a, &b| values[a].f.total_cmp(&values[b].f));
    let best = order[0];
    record(iterations, &values[best], &mut best_so_far, &mut trace);
    Ok((
        simplex[best].clone(),
        values[best],
        iterations,
        evaluations,
        converged,
        trace,
    ))
}

/// Optimize the variable groups' radii of `model`; fixed groups stay at
/// `cfg.r_init`. Always returns the best point found.
pub fn nelder_mead(
    model: &GridshellModel,
    material: &Material,
    cfg: &OptimizationConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    let var_ids = model.variable_group_ids();
    let mut radii = vec![cfg.r_init; model.groups.len()];
    let x0 = vec![cfg.r_init; var_ids.len()];
    let expand = |x: &[f64], radii: &mut Vec<f64>| {
        for (slot, &g) in x.iter().zip(&var_ids) {
            radii[g] = *slot;
        }
    };
    let mut work = radii.clone();
    let (x, stats, iterations, evaluations, converged, trace) =
        nelder_mead_core(&x0, cfg.r_lower, cfg.r_upper, cfg, |x| {
            expand(x, &mut work);
            objective(model, &work, material).map(|(s, _)| s)
        })?;
    expand(&x, &mut radii);
    Ok(OptimizationResult {
        radii,
        stats,
        iterations,
        evaluations,
        converged,
        trace,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjustResult {
    pub radii: Vec<f64>,
    /// Members excluded from their group mean because N¹·N* < 0.
    pub sign_mismatches: Vec<usize>,
}

/// Eq. (14) stress-ratio adjustment: analyze the transformed model once with
/// the pre-transformation optimal radii, then scale each variable group's
/// section area by the geometric mean of clamp(N¹/N*, 0.25, 4) over its
/// in-objective members. Members with a force/target sign mismatch drop out
/// of the mean.
pub fn stress_ratio_adjust(
    model_after: &GridshellModel,
    radii_hat: &[f64],
    material: &Material,
) -> Result<AdjustResult> {
    let (_, sol) = objective(model_after, radii_hat, material)?;
    let mut radii = radii_hat.to_vec();
    let mut sign_mismatches = Vec::new();
    for g in &model_after.groups {
        if !g.variable {
            continue;
        }
        let mut log_sum = 0.0;
        let mut count = 0usize;
        for &mid in &g.member_ids {
            let m = &model_after.members[mid];
            if !m.in_objective {
                continue;
            }
            let n1 = sol.n[mid];
            let nt = m.target_force;
            if n1 * nt <= 0.0 {
                sign_mismatches.push(mid);
                continue;
            }
            let ratio = (n1 / nt).clamp(EQ14_CLAMP.0, EQ14_CLAMP.1);
            log_sum += ratio.ln();
            count += 1;
        }
        if count == 0 {
            continue; // nothing usable; keep the old radius
        }
        let factor = (log_sum / count as f64).exp();
        let old_area = pipe_section(radii_hat[g.id])?.a;
        radii[g.id] = PipeSection::radius_for_area(old_area * factor);
    }
    Ok(AdjustResult {
        radii,
        sign_mismatches,
    })
}
