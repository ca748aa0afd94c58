//! Sample the paper's cyclide patch, solve the membrane statics in closed
//! form, and print the equilibrium residuals of Eqs. (8) and the
//! compatibility residual of Eq. (12).

use gridshell::cyclide::{CyclideParams, DEFAULT_FD_STEP};
use gridshell::membrane::{
    build_field, compatibility_residual, equilibrium_residuals, SurfaceDef,
};

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
    println!("I0 = {:.1} N", field.i0);
    let c = &field.samples[7][8];
    println!(
        "mid-sample: kappa1 = {:.3e} 1/mm, kappa2 = {:.3e} 1/mm, T1 = {:.3} N/mm, T2 = {:.3} N/mm",
        c.kappa1, c.kappa2, field.t1[7][8], field.t2[7][8]
    );
    let res = equilibrium_residuals(&field);
    println!(
        "equilibrium residuals: 8a = {:.2e}, 8b = {:.2e}, 8c = {:.2e}",
        res.res_8a, res.res_8b, res.res_8c
    );
    println!("compatibility residual (Eq. 12): {:.2e}", compatibility_residual(&field));
    Ok(())
}
