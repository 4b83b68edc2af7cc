//! Solution-level operations: field evaluation on grids, the Miura
//! transform, finite-difference PDE residuals, one-wave asymptotics and
//! residues at singularities.

use crate::determinants::{
    big_delta_x_jets, big_deltas, delta_branch_partials, delta_branch_second_partials,
    delta_branch_with_scale, solution_eval, Branch,
};
use crate::error::{Error, Result};
use crate::spectral::{c_constants, chi_signed, EquationKind, SpectralData};
use crate::tol;
use num_complex::Complex64 as C;

/// Rectangular (x, t) lattice of solution values with a singular mask.
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// Row-major over t (outer) then x (inner).
    pub values: Vec<C>,
    pub singular_mask: Vec<bool>,
}

impl SolutionField {
    pub fn evaluate(sd: &SpectralData, xs: Vec<f64>, ts: Vec<f64>) -> Self {
        let nx = xs.len();
        let mut values = Vec::with_capacity(nx * ts.len());
        let mut mask = Vec::with_capacity(nx * ts.len());
        for &t in &ts {
            let row_start = mask.len();
            for &x in &xs {
                match solution_eval(sd, x, t) {
                    Some(v) => {
                        values.push(v);
                        mask.push(false);
                    }
                    None => {
                        values.push(C::new(f64::NAN, 0.0));
                        mask.push(true);
                    }
                }
            }
            // A denominator zero rarely lands on a grid node; mark the cell
            // where a branch determinant changes sign so masked points sit
            // within one grid cell of the true line.
            for branch in [Branch::Delta1, Branch::Delta2] {
                let vals: Vec<C> = xs
                    .iter()
                    .map(|&x| delta_branch_with_scale(sd, x, t, branch).0)
                    .collect();
                let reals: Vec<f64> = vals
                    .iter()
                    .map(|v| if v.re.abs() >= v.im.abs() { v.re } else { v.im })
                    .collect();
                let realify_ok = vals
                    .iter()
                    .zip(&reals)
                    .all(|(v, r)| (v.norm() - r.abs()) <= 1e-6 * v.norm().max(1e-300));
                if !realify_ok {
                    continue;
                }
                for i in 0..nx.saturating_sub(1) {
                    if reals[i] == 0.0 || (reals[i] > 0.0) != (reals[i + 1] > 0.0) {
                        mask[row_start + i] = true;
                        mask[row_start + i + 1] = true;
                    }
                }
            }
        }
        SolutionField { xs, ts, values, singular_mask: mask }
    }
}

/// xi and its analytic x-derivative from the Delta jets.
fn solution_and_x_derivative(sd: &SpectralData, x: f64, t: f64) -> Option<(C, C)> {
    let (j1, j2) = big_delta_x_jets(sd, x, t, 1);
    let b = big_deltas(sd, x, t);
    if b.d2.norm() < tol::SINGULAR_FIELD * b.d2_scale {
        return None;
    }
    let sign = if sd.n() % 2 == 1 { 2.0 } else { -2.0 };
    let xi = j1[0] / j2[0] * sign;
    let dxi = (j1[1] * j2[0] - j1[0] * j2[1]) / (j2[0] * j2[0]) * sign;
    Some((xi, dxi))
}

/// Miura image M[xi] = xi^2 +- d(xi)/dx of an mKdV solution, with the
/// x-derivative taken analytically. `None` at singular points.
pub fn miura(sd: &SpectralData, plus: bool, x: f64, t: f64) -> Result<Option<C>> {
    if sd.kind != EquationKind::Mkdv {
        return Err(Error::Domain("the Miura transform applies to mKdV data".into()));
    }
    Ok(solution_and_x_derivative(sd, x, t).map(|(xi, dxi)| {
        if plus {
            xi * xi + dxi
        } else {
            xi * xi - dxi
        }
    }))
}

/// The log-second-derivative representation of the Miura image:
/// -2 d^2 ln delta / dx^2 with delta = delta_2 for "+", delta_1 for "-".
pub fn miura_delta_representation(
    sd: &SpectralData,
    plus: bool,
    x: f64,
    t: f64,
) -> Result<Option<C>> {
    if sd.kind != EquationKind::Mkdv {
        return Err(Error::Domain("the Miura transform applies to mKdV data".into()));
    }
    let branch = if plus { Branch::Delta2 } else { Branch::Delta1 };
    let (value, scale) = delta_branch_with_scale(sd, x, t, branch);
    if value.norm() < tol::SINGULAR_FIELD * scale {
        return Ok(None);
    }
    let (_, dx, _) = delta_branch_partials(sd, x, t, branch);
    let (dxx, _, _) = delta_branch_second_partials(sd, x, t, branch);
    // d^2 ln delta = (delta'' delta - delta'^2)/delta^2; the row scaling is
    // x-independent in value but not in derivative -- however all three tags
    // share one scale factor, which cancels in the ratio.
    Ok(Some(-2.0 * (dxx * value - dx * dx) / (value * value)))
}

/// 4th-order central stencils.
fn d1(f: &dyn Fn(f64) -> Option<C>, x: f64, h: f64) -> Option<C> {
    Some((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

fn d2(f: &dyn Fn(f64) -> Option<C>, x: f64, h: f64) -> Option<C> {
    Some(
        (-f(x - 2.0 * h)? + 16.0 * f(x - h)? - 30.0 * f(x)? + 16.0 * f(x + h)?
            - f(x + 2.0 * h)?)
            / (12.0 * h * h),
    )
}

fn d3(f: &dyn Fn(f64) -> Option<C>, x: f64, h: f64) -> Option<C> {
    Some(
        (f(x - 3.0 * h)? - 8.0 * f(x - 2.0 * h)? + 13.0 * f(x - h)? - 13.0 * f(x + h)?
            + 8.0 * f(x + 2.0 * h)?
            - f(x + 3.0 * h)?)
            / (8.0 * h * h * h),
    )
}

/// |LHS - RHS| of the governing equation at (x, t), using 4th-order centered
/// finite differences with step h on solution values. `None` if the stencil
/// touches a singular point.
pub fn pde_residual(sd: &SpectralData, x: f64, t: f64, h: f64) -> Option<f64> {
    match sd.kind {
        EquationKind::Shg => {
            // phi_xt = 4 sinh phi.
            let f = |xx: f64, tt: f64| solution_eval(sd, xx, tt);
            let c1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
            let mut mixed = C::new(0.0, 0.0);
            for (i, ci) in c1.iter().enumerate() {
                if *ci == 0.0 {
                    continue;
                }
                for (j, cj) in c1.iter().enumerate() {
                    if *cj == 0.0 {
                        continue;
                    }
                    let v = f(x + (i as f64 - 2.0) * h, t + (j as f64 - 2.0) * h)?;
                    mixed += v * (ci * cj);
                }
            }
            mixed /= h * h;
            let phi = f(x, t)?;
            Some((mixed - 4.0 * phi.sinh()).norm())
        }
        EquationKind::Mkdv => {
            // psi_t = -1/4 psi_xxx + 3/2 |psi|^2 psi_x.
            let fx = |xx: f64| solution_eval(sd, xx, t);
            let ft = |tt: f64| solution_eval(sd, x, tt);
            let psi = fx(x)?;
            let psi_t = d1(&ft, t, h)?;
            let psi_x = d1(&fx, x, h)?;
            let psi_xxx = d3(&fx, x, h)?;
            let rhs = -0.25 * psi_xxx + 1.5 * psi.norm_sqr() * psi_x;
            Some((psi_t - rhs).norm())
        }
        EquationKind::Nse => {
            // rho_t = (i/2)(rho_xx - 2 |rho|^2 rho).
            let fx = |xx: f64| solution_eval(sd, xx, t);
            let ft = |tt: f64| solution_eval(sd, x, tt);
            let rho = fx(x)?;
            let rho_t = d1(&ft, t, h)?;
            let rho_xx = d2(&fx, x, h)?;
            let rhs = C::new(0.0, 0.5) * (rho_xx - 2.0 * rho.norm_sqr() * rho);
            Some((rho_t - rhs).norm())
        }
    }
}

/// |LHS - RHS| of the KdV equation u_t = -1/4 u_xxx + 3/2 u u_x for a
/// real-valued field given as a closure (used on Miura images).
pub fn kdv_residual(f: &dyn Fn(f64, f64) -> Option<C>, x: f64, t: f64, h: f64) -> Option<f64> {
    let fx = |xx: f64| f(xx, t);
    let ft = |tt: f64| f(x, tt);
    let u = fx(x)?;
    let u_t = d1(&ft, t, h)?;
    let u_x = d1(&fx, x, h)?;
    let u_xxx = d3(&fx, x, h)?;
    let rhs = -0.25 * u_xxx + 1.5 * u * u_x;
    Some((u_t - rhs).norm())
}

/// The interaction coefficient A_j of the one-wave asymptotics
/// (1-based wave index in the statements; 0-based here).
pub fn interaction_coefficient(sd: &SpectralData, j: usize) -> C {
    let n = sd.n();
    let w = sd.omega[j];
    let mut a = C::new(1.0, 0.0);
    match sd.kind {
        EquationKind::Shg => {
            for i in 0..j {
                a *= (w + sd.omega[i]) / (w - sd.omega[i]);
            }
            for i in j + 1..n {
                a *= (sd.omega[i] - w) / (sd.omega[i] + w);
            }
        }
        _ => {
            if (n - 1) % 2 == 1 {
                a = -a;
            }
            for i in 0..j {
                a *= (w.conj() + sd.omega[i]) / (w - sd.omega[i]);
            }
            for i in j + 1..n {
                a *= (sd.omega[i] - w) / (sd.omega[i].conj() + w);
            }
        }
    }
    a
}

/// x-position of the asymptotic free line of wave j at time t; `t_sign`
/// selects the incoming (-1) or outgoing (+1) asymptote.
pub fn asymptote_position(sd: &SpectralData, j: usize, t: f64, t_sign: f64) -> f64 {
    let (_, half_logs) = c_constants(sd);
    let a = interaction_coefficient(sd, j);
    let w = sd.omega[j];
    let theta = sd.theta(w);
    // The incoming line (t -> -inf) sits at chi_j = -ln(A_j)/2 and the
    // outgoing one at +ln(A_j)/2, as the two-wave closed form shows.
    (half_logs[j] - theta.re * t + t_sign * 0.5 * a.norm().ln()) / w.re
}

/// The one-wave asymptotic value at (x, t) for wave j with the phase shift
/// for the chosen time direction applied.
pub fn asymptotic_form(sd: &SpectralData, j: usize, t_sign: f64, x: f64, t: f64) -> C {
    let n = sd.n();
    let a = interaction_coefficient(sd, j);
    let shift = -t_sign * 0.5 * a.norm().ln();
    let sign = if (n + j + 1) % 2 == 0 { 1.0 } else { -1.0 };
    match sd.kind {
        EquationKind::Shg => {
            let chi = chi_signed(sd, j, x, t).re;
            C::new(sign * 2.0 * (chi + shift).tanh().abs().ln(), 0.0)
        }
        _ => {
            let chi2 = chi_signed(sd, j, x, t) * 2.0;
            let phase = C::new(0.0, chi2.im - a.arg()).exp();
            sign * 2.0 * sd.omega[j].re * phase / (chi2.re + 2.0 * shift).sinh()
        }
    }
}

/// The field whose residues classify the particle type: (1/2) d(phi)/dx for
/// SHG, the solution itself for mKdV/NSE.
fn residue_field(sd: &SpectralData, x: f64, t: f64) -> Option<C> {
    match sd.kind {
        EquationKind::Shg => {
            let (v1, dx1, _) = delta_branch_partials(sd, x, t, Branch::Delta1);
            let (v2, dx2, _) = delta_branch_partials(sd, x, t, Branch::Delta2);
            if v1.norm() < 1e-300 || v2.norm() < 1e-300 {
                return None;
            }
            Some(C::new((dx1 / v1).re - (dx2 / v2).re, 0.0))
        }
        _ => solution_eval(sd, x, t),
    }
}

/// Residue (and its sign, the particle type) of the field at a located
/// singularity: the symmetric limit of (x - x0) * value along x, Richardson
/// extrapolated. The modulus doubles as a location-accuracy certificate and
/// must come out within 1e-2 of 1.
pub fn residue_at(sd: &SpectralData, x0: f64, t: f64, _branch: Branch) -> Result<(C, i8)> {
    let estimate = |h: f64| -> Option<C> {
        let p = residue_field(sd, x0 + h, t)?;
        let m = residue_field(sd, x0 - h, t)?;
        Some((p - m) * h * 0.5)
    };
    let h = 1e-3;
    let r1 = estimate(h).ok_or_else(|| Error::Domain("stencil touches a singular point".into()))?;
    let r2 = estimate(h / 2.0).ok_or_else(|| Error::Domain("stencil touches a singular point".into()))?;
    let residue = (4.0 * r2 - r1) / 3.0;
    let modulus = residue.norm();
    if (modulus - 1.0).abs() > 1e-2 {
        return Err(Error::Domain(format!(
            "residue modulus {modulus} is not within 1e-2 of 1; point is off the line"
        )));
    }
    let ty = if residue.re >= 0.0 { 1 } else { -1 };
    Ok((residue, ty))
}
