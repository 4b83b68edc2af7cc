//! Spectral data (Omega, A0) for the three integrable equations and the
//! scalar building blocks derived from it: the flow generator Theta, the
//! signed constant products C_k and the exponents chi_k.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Equation selector; also carries the flow generator Theta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquationKind {
    #[serde(rename = "SHG")]
    Shg,
    #[serde(rename = "MKDV")]
    Mkdv,
    #[serde(rename = "NSE")]
    Nse,
}

impl EquationKind {
    /// Theta(x): 1/x for SHG, -x^3 for mKdV, i x^2 for NSE.
    pub fn theta(&self, z: C) -> C {
        match self {
            EquationKind::Shg => C::new(1.0, 0.0) / z,
            EquationKind::Mkdv => -z * z * z,
            EquationKind::Nse => C::new(0.0, 1.0) * z * z,
        }
    }
}

impl std::fmt::Display for EquationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EquationKind::Shg => write!(f, "SHG"),
            EquationKind::Mkdv => write!(f, "MKDV"),
            EquationKind::Nse => write!(f, "NSE"),
        }
    }
}

/// The parameter pair Omega = {omega_k}, A0 = {alpha_{k,0}} plus equation kind.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub omega: Vec<C>,
    pub alpha0: Vec<C>,
    pub kind: EquationKind,
}

fn is_conjugation_symmetric(set: &[C]) -> bool {
    set.iter().all(|z| {
        z.im == 0.0
            || set
                .iter()
                .any(|w| (w - z.conj()).norm() < 1e-12 * z.norm().max(1.0))
    })
}

impl SpectralData {
    pub fn new(omega: Vec<C>, alpha0: Vec<C>, kind: EquationKind) -> Result<Self> {
        if omega.is_empty() || omega.len() != alpha0.len() {
            return Err(Error::Domain(format!(
                "need N >= 1 with |Omega| = |A0| (got {} and {})",
                omega.len(),
                alpha0.len()
            )));
        }
        for (i, w) in omega.iter().enumerate() {
            if w.re <= 0.0 {
                return Err(Error::Domain(format!("Re omega[{i}] must be positive, got {w}")));
            }
            for (k, w2) in omega.iter().enumerate() {
                if i != k && (w - w2).norm() == 0.0 {
                    return Err(Error::Domain(format!("omega[{i}] = omega[{k}]")));
                }
            }
            for (k, a) in alpha0.iter().enumerate() {
                if (w - a).norm() == 0.0 || (w + a).norm() == 0.0 {
                    return Err(Error::Domain(format!(
                        "omega[{i}] = +/-alpha0[{k}] makes the constants C_k infinite or zero"
                    )));
                }
            }
        }
        if kind == EquationKind::Shg
            && (!is_conjugation_symmetric(&omega) || !is_conjugation_symmetric(&alpha0))
        {
            return Err(Error::Domain(
                "SHG requires Omega and A0 symmetric under complex conjugation".into(),
            ));
        }
        Ok(SpectralData { omega, alpha0, kind })
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn theta(&self, z: C) -> C {
        self.kind.theta(z)
    }
}

/// Signed products C_k = prod_i (omega_k - alpha_i)/(omega_k + alpha_i) and
/// their half-log moduli (the C_k entering chi as written in the evolution
/// theorems). Downstream operations pick whichever they need.
pub fn c_constants(sd: &SpectralData) -> (Vec<C>, Vec<f64>) {
    let signed: Vec<C> = sd
        .omega
        .iter()
        .map(|&w| {
            let mut p = C::new(1.0, 0.0);
            for &a in &sd.alpha0 {
                p *= (w - a) / (w + a);
            }
            p
        })
        .collect();
    let half_logs = signed.iter().map(|c| 0.5 * c.norm().ln()).collect();
    (signed, half_logs)
}

/// chi_k with the real half-log-modulus constant, as the solution theorems
/// write it: chi = omega x + Theta(omega) t - (1/2) ln prod |...|.
/// psi_k = exp(2 chi_k) for mKdV/NSE.
pub fn chi(sd: &SpectralData, k: usize, x: f64, t: f64) -> C {
    let w = sd.omega[k];
    let (_, half_logs) = c_constants(sd);
    w * x + sd.theta(w) * t - half_logs[k]
}

/// chi_k with the full complex half-log of the signed product; this is the
/// variant the determinants need (the sign/phase of C_k toggles the
/// cosh/sinh structure).
pub fn chi_signed(sd: &SpectralData, k: usize, x: f64, t: f64) -> C {
    let w = sd.omega[k];
    let (signed, _) = c_constants(sd);
    w * x + sd.theta(w) * t - 0.5 * signed[k].ln()
}

/// Exponent of the column multiplier at node +omega_k or -omega_k:
/// 2(+-omega x + Theta(+-omega) t -+ (1/2) Ln C_k). For odd Theta (SHG,
/// mKdV) the minus-node value is the negative of the plus-node one; for NSE
/// (even Theta) it is not.
pub fn column_exponent(sd: &SpectralData, k: usize, positive: bool, x: f64, t: f64) -> C {
    let (signed, _) = c_constants(sd);
    let half_log = 0.5 * signed[k].ln();
    let w = if positive { sd.omega[k] } else { -sd.omega[k] };
    let shift = if positive { -half_log } else { half_log };
    (w * x + sd.theta(w) * t + shift) * 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn theta_map_values() {
        assert!((EquationKind::Shg.theta(c(2.0, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((EquationKind::Mkdv.theta(c(2.0, 0.0)) - c(-8.0, 0.0)).norm() < 1e-15);
        assert!((EquationKind::Nse.theta(c(2.0, 0.0)) - c(0.0, 4.0)).norm() < 1e-15);
    }

    #[test]
    fn c_constants_n1_trivial() {
        let sd = SpectralData::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], EquationKind::Shg).unwrap();
        let (signed, half) = c_constants(&sd);
        assert!((signed[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(half[0].abs() < 1e-15);
    }

    #[test]
    fn c_constants_n2_products() {
        let sd = SpectralData::new(
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
            EquationKind::Shg,
        )
        .unwrap();
        let (signed, _) = c_constants(&sd);
        assert!((signed[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((signed[1] - c(0.6, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn c_constants_repulsing_case_signs() {
        // The repulsing two-particle parameter set: one of the C_k is negative.
        let sd = SpectralData::new(
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(1.116515, 0.0), c(-0.71652, 0.0)],
            EquationKind::Shg,
        )
        .unwrap();
        let (signed, _) = c_constants(&sd);
        assert!(signed[0].re < 0.0, "C1 = {}", signed[0]);
        assert!(signed[1].re > 0.0, "C2 = {}", signed[1]);
    }

    #[test]
    fn chi_values() {
        let sd = SpectralData::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], EquationKind::Shg).unwrap();
        // t = x = 0 leaves only the constant term (zero here).
        assert!(chi(&sd, 0, 0.0, 0.0).norm() < 1e-14);
        // omega = 1, alpha = 0, x = 1, t = 2: chi = 1 + 2 = 3.
        assert!((chi(&sd, 0, 1.0, 2.0) - c(3.0, 0.0)).norm() < 1e-14);
        // NSE exponent: imaginary part of 2 chi is 2 omega^2 t.
        let sd = SpectralData::new(vec![c(1.5, 0.0)], vec![c(0.2, 0.0)], EquationKind::Nse).unwrap();
        let e = chi(&sd, 0, 0.3, 0.7) * 2.0;
        assert!((e.im - 2.0 * 1.5 * 1.5 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn invalid_data_rejected() {
        assert!(SpectralData::new(vec![c(-1.0, 0.0)], vec![c(0.0, 0.0)], EquationKind::Shg).is_err());
        assert!(SpectralData::new(
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0)],
            EquationKind::Shg
        )
        .is_err());
        assert!(SpectralData::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], EquationKind::Mkdv).is_err());
        // SHG requires conjugation symmetry.
        assert!(SpectralData::new(vec![c(1.0, 0.5)], vec![c(0.2, 0.0)], EquationKind::Shg).is_err());
        assert!(SpectralData::new(
            vec![c(1.0, 0.5), c(1.0, -0.5)],
            vec![c(0.2, 0.0), c(0.9, 0.0)],
            EquationKind::Shg
        )
        .is_ok());
    }
}
