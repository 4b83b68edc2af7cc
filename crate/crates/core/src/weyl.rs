//! Rational Weyl-Titchmarsh functions v(t, z) = i prod (z + i gamma_k)/(z + i alpha_k)
//! and their explicit time evolution through the integrals of motion omega_k.

use crate::error::{Error, Result};
use crate::linalg::{lstsq, CMat};
use crate::poly::Poly;
use crate::spectral::EquationKind;
use crate::tol;
use num_complex::Complex64 as C;

/// Zero/pole data of the Weyl function: v(z) = i prod (z + i gamma_k)/(z + i alpha_k).
#[derive(Clone, Debug)]
pub struct WeylFunction {
    pub alphas: Vec<C>,
    pub gammas: Vec<C>,
}

impl WeylFunction {
    pub fn new(alphas: Vec<C>, gammas: Vec<C>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != gammas.len() {
            return Err(Error::Domain("need equally many alphas and gammas, N >= 1".into()));
        }
        for (i, a) in alphas.iter().enumerate() {
            for (j, b) in alphas.iter().enumerate() {
                if i != j && (a - b).norm() == 0.0 {
                    return Err(Error::Domain(format!("alpha[{i}] = alpha[{j}]")));
                }
            }
        }
        for (i, a) in gammas.iter().enumerate() {
            for (j, b) in gammas.iter().enumerate() {
                if i != j && (a - b).norm() == 0.0 {
                    return Err(Error::Domain(format!("gamma[{i}] = gamma[{j}]")));
                }
            }
        }
        Ok(WeylFunction { alphas, gammas })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    /// v(z) = i prod (z + i gamma_k) / (z + i alpha_k).
    pub fn eval(&self, z: C) -> C {
        let i = C::new(0.0, 1.0);
        let mut v = i;
        for (&g, &a) in self.gammas.iter().zip(&self.alphas) {
            v *= (z + i * g) / (z + i * a);
        }
        v
    }

    /// P1(z) = prod (z - alpha_k).
    pub fn p1(&self) -> Poly {
        Poly::from_roots(&self.alphas)
    }

    /// P2(z) = prod (z - gamma_k).
    pub fn p2(&self) -> Poly {
        Poly::from_roots(&self.gammas)
    }
}

/// Q(z) = ((-1)^N / 2) [P1(z) P2(-z) + P1(-z) P2(z)]; an even polynomial whose
/// roots come in +- pairs and are integrals of motion.
pub fn q_polynomial(v: &WeylFunction) -> Poly {
    let p1 = v.p1();
    let p2 = v.p2();
    let sum = p1.mul(&p2.reflect()).add(&p1.reflect().mul(&p2));
    let sign = if v.n() % 2 == 0 { 0.5 } else { -0.5 };
    sum.scale(C::new(sign, 0.0))
}

/// All 2N roots of Q, paired as +-omega_k; errors on a numerically repeated
/// root (the evolution formulas assume a simple spectrum).
pub fn q_polynomial_roots(v: &WeylFunction) -> Result<Vec<C>> {
    let q = q_polynomial(v);
    if q.degree() != Some(2 * v.n()) {
        return Err(Error::Domain(format!(
            "Q(z) degenerated to degree {:?}",
            q.degree()
        )));
    }
    let roots = q.roots();
    let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < tol::SIMPLE_ROOT_SEP * scale {
                return Err(Error::RepeatedRoot(roots[i]));
            }
        }
    }
    Ok(roots)
}

/// Theta extended as an odd function from the Re > 0 half plane. For SHG and
/// mKdV this is Theta itself; for NSE (whose Theta is even) the literal
/// formula at a -omega root would contradict its +omega partner, and the odd
/// extension is the reading that keeps the paired equations reciprocal.
fn theta_odd(kind: EquationKind, w: C) -> C {
    if w.re < 0.0 {
        -kind.theta(-w)
    } else {
        kind.theta(w)
    }
}

/// Solves one of the two symmetric-form systems: for every root omega_k,
/// P(omega_k, t) = kappa_k P(-omega_k, t) with kappa_k(t) = (P(omega_k, 0)/P(-omega_k, 0)) exp(-2 t Theta(omega_k)).
/// Unknowns are the elementary symmetric forms sigma_1..sigma_N of the root
/// set of P(., t); the 2N x N system is overdetermined but consistent and is
/// solved by least squares, whose residual certifies validity.
fn evolve_symmetric_forms(
    p0: &Poly,
    roots: &[C],
    t: f64,
    kind: EquationKind,
) -> Result<(Vec<C>, f64)> {
    let n = p0.degree().unwrap();
    let rows = roots.len();
    let mut m = CMat::zeros(rows, n);
    let mut rhs = vec![C::new(0.0, 0.0); rows];
    let mut row_ok = true;
    for (r, &w) in roots.iter().enumerate() {
        let denom = p0.eval(-w);
        if denom.norm() < 1e-14 * p0.max_coeff() {
            row_ok = false;
            break;
        }
        let kappa = p0.eval(w) / denom * (-2.0 * t * theta_odd(kind, w)).exp();
        // P(w) - kappa P(-w) = 0 with P(z) = sum_m (-1)^m sigma_m z^{N-m}:
        // sum_{m>=1} (-1)^m sigma_m [w^{N-m} - kappa (-w)^{N-m}] = -(w^N - kappa (-w)^N).
        for mm in 1..=n {
            let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
            let a = w.powu((n - mm) as u32);
            let b = (-w).powu((n - mm) as u32);
            m[(r, mm - 1)] = sign * (a - kappa * b);
        }
        rhs[r] = -(w.powu(n as u32) - kappa * (-w).powu(n as u32));
    }
    if !row_ok {
        return Err(Error::Domain("a Q-root coincides with a reflected P-root".into()));
    }
    let scale = m.max_abs().max(1e-300);
    let (sigma, resid) =
        lstsq(&m, &rhs).ok_or_else(|| Error::Domain("rank-deficient evolution system".into()))?;
    Ok((sigma, resid / scale))
}

/// Reconstructs a root set from its elementary symmetric forms
/// (P(z) = z^N - sigma_1 z^{N-1} + sigma_2 z^{N-2} - ...).
pub fn roots_from_sigmas(sigmas: &[C]) -> Vec<C> {
    // P(z) = z^N - sigma_1 z^{N-1} + sigma_2 z^{N-2} - ...
    let n = sigmas.len();
    let mut coeffs = vec![C::new(0.0, 0.0); n + 1];
    coeffs[n] = C::new(1.0, 0.0);
    for (m, &s) in sigmas.iter().enumerate() {
        let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[n - m - 1] = sign * s;
    }
    Poly::new(coeffs).roots()
}

/// Result of evolving a Weyl function: the new zero/pole data plus the
/// least-squares residuals of the two linear systems (validity certificate).
#[derive(Clone, Debug)]
pub struct EvolvedWeyl {
    pub v: WeylFunction,
    pub residual_alpha: f64,
    pub residual_gamma: f64,
}

/// Evolves v0 to time t under the flow generated by Theta of the given kind.
pub fn evolve_weyl(v0: &WeylFunction, t: f64, kind: EquationKind) -> Result<EvolvedWeyl> {
    let roots = q_polynomial_roots(v0)?;
    let (sig_a, res_a) = evolve_symmetric_forms(&v0.p1(), &roots, t, kind)?;
    let (sig_g, res_g) = evolve_symmetric_forms(&v0.p2(), &roots, t, kind)?;
    let tol_consistency = 1e-6;
    if res_a > tol_consistency || res_g > tol_consistency {
        return Err(Error::InconsistentData(format!(
            "evolution systems inconsistent: residuals {res_a:.2e}, {res_g:.2e}"
        )));
    }
    let alphas = roots_from_sigmas(&sig_a);
    let gammas = roots_from_sigmas(&sig_g);
    Ok(EvolvedWeyl {
        v: WeylFunction::new(alphas, gammas)?,
        residual_alpha: res_a,
        residual_gamma: res_g,
    })
}
