//! The unconstrained parametrization of a mean-one frailty vector: map a
//! point forward and back, and compare the log-Jacobian with a numerical
//! determinant.

use plp_frailty::dpm::{inverse_transform, transform};

fn main() -> plp_frailty::Result<()> {
    let z = [0.4, 1.7, 0.9, 1.0];
    let x = inverse_transform(&z)?;
    let (back, log_j) = transform(&x);
    println!("z      = {z:?}");
    println!("z*     = {x:.6?}");
    println!("back   = {back:.15?}");
    println!("log|J| = {log_j:.10}");

    // numerical Jacobian of z* -> (a_1, a_2, a_3), a = z / m
    let m = z.len();
    let h = 1e-6;
    let mut jac = vec![vec![0.0; m - 1]; m - 1];
    for k in 0..m - 1 {
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[k] += h;
        xm[k] -= h;
        let (zp, _) = transform(&xp);
        let (zm, _) = transform(&xm);
        for i in 0..m - 1 {
            jac[i][k] = (zp[i] - zm[i]) / (2.0 * h * m as f64);
        }
    }
    let det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1])
        - jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0])
        + jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
    println!("numerical log|J| = {:.10}", det.abs().ln());
    Ok(())
}
