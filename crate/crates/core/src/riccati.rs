//! The transfer-polynomial coefficient state, its Riccati flow in x, and the
//! inverse problem: recovering the coefficients and then the spectral data
//! from local derivatives of the solution.

use crate::error::{Error, Result};
use crate::interp::basis_solution;
use crate::jet::{b0_jet, derivative_system};
use crate::linalg::{solve, CMat};
use crate::poly::Poly;
use crate::spectral::{column_exponent, SpectralData};
use crate::structured::InterpolationData;
use crate::weyl::roots_from_sigmas;
use num_complex::Complex64 as C;

/// Coefficients (b_0..b_{N-1}, a_1..a_N) of the transfer polynomials at a
/// fixed point (x, t), normalized so that b_0 = -2 Gamma_2x(2x, 0, t) for
/// every N (a_0 = 1 implicit).
#[derive(Clone, Debug)]
pub struct CoefficientState {
    pub b: Vec<C>,
    pub a: Vec<C>,
    pub x: f64,
    pub t: f64,
}

impl CoefficientState {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Packs the state in the jet-algebra layout (b_0.., a_1..).
    pub fn packed(&self) -> Vec<C> {
        let mut v = self.b.clone();
        v.extend_from_slice(&self.a);
        v
    }

    /// The four transfer polynomials:
    /// D11 = (-1)^N sum (-1)^i a_i l^{N-i}, D12 = (-1)^{N+1} sum b_i l^{N-1-i},
    /// D21 = sum (-1)^i b_i l^{N-1-i}, D22 = sum a_i l^{N-i}.
    /// The row-1 signs keep the per-row ratios equal to those of the monic
    /// basis solution under the b_0 = -2 Gamma_2x pinning.
    pub fn d_polys(&self) -> [Poly; 4] {
        let n = self.n();
        let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
        let mut d11 = vec![C::new(0.0, 0.0); n + 1];
        let mut d22 = vec![C::new(0.0, 0.0); n + 1];
        for i in 0..=n {
            let a_i = if i == 0 { C::new(1.0, 0.0) } else { self.a[i - 1] };
            d22[n - i] = a_i;
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            d11[n - i] = a_i * s * sign_n;
        }
        let mut d12 = vec![C::new(0.0, 0.0); n];
        let mut d21 = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            d12[n - 1 - i] = self.b[i] * (-sign_n);
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            d21[n - 1 - i] = self.b[i] * s;
        }
        [Poly::new(d11), Poly::new(d12), Poly::new(d21), Poly::new(d22)]
    }
}

/// The interpolation data of the spectral dynamic system at (x, t): nodes
/// (omega_1..omega_N, -omega_1..-omega_N), mu = 1, nu = (1/eps_k, eps_k) with
/// eps_k the column multiplier exp of the determinant representation.
pub fn spectral_interpolation_data(sd: &SpectralData, x: f64, t: f64) -> Result<InterpolationData> {
    let n = sd.n();
    let mut xi = Vec::with_capacity(2 * n);
    let mut nu = Vec::with_capacity(2 * n);
    for k in 0..n {
        xi.push(sd.omega[k]);
        nu.push((-column_exponent(sd, k, true, x, t)).exp());
    }
    for k in 0..n {
        xi.push(-sd.omega[k]);
        nu.push((-column_exponent(sd, k, false, x, t)).exp());
    }
    let mu = vec![C::new(1.0, 0.0); 2 * n];
    InterpolationData::new(mu, nu, xi)
}

/// Builds the coefficient state at (x, t) from the basis solution of the
/// spectral interpolation data.
pub fn coefficient_state(sd: &SpectralData, x: f64, t: f64) -> Result<CoefficientState> {
    let n = sd.n();
    let data = spectral_interpolation_data(sd, x, t)?;
    let bs = basis_solution(&data)?;
    // a_i from monic D22; b_i = -(monic D12 coefficients), which pins
    // b_0 = -2 Gamma_2x for every N (the per-row sign freedom of the basis
    // solution cannot be fixed by the Riccati flow alone, which is invariant
    // under a global sign flip of the b's).
    let d22 = bs.d22.to_high_to_low();
    let a: Vec<C> = (1..=n).map(|i| d22[i]).collect();
    let mut b = vec![C::new(0.0, 0.0); n];
    let d12 = bs.d12.to_high_to_low();
    let offset = n - d12.len();
    for (j, &c) in d12.iter().enumerate() {
        b[offset + j] = -c;
    }
    Ok(CoefficientState { b, a, x, t })
}

/// d/dx of the state under the Riccati system (original variable, all
/// right sides carry the factor 2):
/// b_i' = 2 (b_0 a_{i+1} - b_{i+1}), b_{N-1}' = 2 b_0 a_N,
/// a_1' = 2 b_0^2, a_i' = 2 b_0 b_{i-1}.
pub fn riccati_rhs(state: &CoefficientState) -> CoefficientState {
    let n = state.n();
    let b0 = state.b[0];
    let mut db = Vec::with_capacity(n);
    for i in 0..n {
        let next_b = if i + 1 < n { state.b[i + 1] } else { C::new(0.0, 0.0) };
        db.push(2.0 * (b0 * state.a[i] - next_b));
    }
    let mut da = Vec::with_capacity(n);
    da.push(2.0 * b0 * b0);
    for i in 2..=n {
        da.push(2.0 * b0 * state.b[i - 1]);
    }
    CoefficientState { b: db, a: da, x: state.x, t: state.t }
}

/// The half-variable jet (d_i = 2^{-i} (d/dx)^i b_0) of the state's b_0,
/// generated exactly through the Riccati relations.
pub fn b0_half_jet(state: &CoefficientState, m: usize) -> Vec<C> {
    b0_jet(state.n(), &state.packed(), m, 1.0)
}

/// Solves the linear system C X = Y of the derivative inverse problem: given
/// the half-variable jet (d_0 .. d_{2N-1}) of b_0 at a point of analyticity,
/// recovers (a_1..a_N, b_1..b_{N-1}); b_0 = d_0.
pub fn coeffs_from_derivatives(jet: &[C], n: usize) -> Result<CoefficientState> {
    if jet.len() < 2 * n {
        return Err(Error::Domain(format!(
            "need the jet through order 2N-1 = {}, got {} values",
            2 * n - 1,
            jet.len()
        )));
    }
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let (rows, rhs) = derivative_system(n, jet);
    let m = CMat::from_rows(&rows);
    let det_scale = m.max_abs().powi((2 * n - 1) as i32).max(1e-300);
    let d = crate::linalg::det(&m);
    if d.norm() < 1e-10 * det_scale {
        return Err(Error::NonGenericPoint(format!(
            "det C = {d} is numerically zero; retry at another x0"
        )));
    }
    let x = solve(&m, &rhs)
        .ok_or_else(|| Error::NonGenericPoint("coefficient system is singular".into()))?;
    let mut b = vec![jet[0]];
    b.extend_from_slice(&x[n..]);
    Ok(CoefficientState { b, a: x[..n].to_vec(), x: 0.0, t: 0.0 })
}

/// Recovered spectral data plus the x0-independent ratio diagnostics.
#[derive(Clone, Debug)]
pub struct RecoveredSpectral {
    pub omega: Vec<C>,
    pub alpha0: Vec<C>,
    /// The signed constants C_k recovered from the transfer ratios.
    pub c_signed: Vec<C>,
}

/// Recovers (Omega, A0) from a coefficient state at a known (x0, t0): the
/// omegas are the positive-real-part roots of D(lambda), the ratios
/// -D11/D12 at those roots expose the constants C_k, and the alphas are
/// roots of the polynomial built from the symmetric forms solved out of the
/// C_k product relations.
pub fn recover_spectral(
    state: &CoefficientState,
    sd_kind: crate::spectral::EquationKind,
) -> Result<RecoveredSpectral> {
    let n = state.n();
    let [d11, d12, d21, d22] = state.d_polys();
    let dpoly = d11.mul(&d22).sub(&d12.mul(&d21));
    if dpoly.degree() != Some(2 * n) {
        return Err(Error::Domain(format!(
            "deg D = {:?}, expected {}",
            dpoly.degree(),
            2 * n
        )));
    }
    let roots = dpoly.roots();
    let mut omega: Vec<C> = roots.iter().copied().filter(|r| r.re > 0.0).collect();
    if omega.len() != n {
        return Err(Error::Domain(format!(
            "expected N = {n} roots with positive real part, found {}",
            omega.len()
        )));
    }
    omega.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let scale = [
        d11.max_coeff(),
        d12.max_coeff(),
        d21.max_coeff(),
        d22.max_coeff(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    // eps_k = -D11(w)/D12(w) = -D21(w)/D22(w); consistency of the two routes
    // certifies a valid coefficient state.
    let mut c_signed = Vec::with_capacity(n);
    for &w in &omega {
        let pw = w.norm().max(1.0).powi(n as i32);
        let (v11, v12, v21, v22) = (d11.eval(w), d12.eval(w), d21.eval(w), d22.eval(w));
        if v12.norm() < 1e-10 * scale * pw || v22.norm() < 1e-10 * scale * pw {
            return Err(Error::Domain("degenerate ratio at a recovered root".into()));
        }
        let r1 = -v11 / v12;
        let r2 = -v21 / v22;
        if (r1 - r2).norm() > 1e-6 * r1.norm().max(1.0) {
            return Err(Error::InconsistentData(format!(
                "transfer ratios disagree at omega = {w}: {r1} vs {r2}"
            )));
        }
        let eps = 0.5 * (r1 + r2);
        // eps = exp(2 (w x0 + Theta(w) t0)) / C_k.
        let psi_raw = ((w * state.x + sd_kind.theta(w) * state.t) * 2.0).exp();
        c_signed.push(psi_raw / eps);
    }
    // C_k = prod_i (w_k - alpha_i)/(w_k + alpha_i): linear system for the
    // symmetric forms sigma_1..sigma_N of the alpha set.
    let mut m = CMat::zeros(n, n);
    let mut rhs = vec![C::new(0.0, 0.0); n];
    for (k, (&w, &ck)) in omega.iter().zip(&c_signed).enumerate() {
        for s in 1..=n {
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            m[(k, s - 1)] = w.powu((n - s) as u32) * (sign - ck);
        }
        rhs[k] = (ck - 1.0) * w.powu(n as u32);
    }
    let sigmas = solve(&m, &rhs)
        .ok_or_else(|| Error::Domain("alpha-recovery system is singular".into()))?;
    let alpha0 = roots_from_sigmas(&sigmas);
    // Reject repeated alphas (degenerate recovery).
    let a_scale = alpha0.iter().map(|a| a.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            if (alpha0[i] - alpha0[j]).norm() < 1e-8 * a_scale {
                return Err(Error::Domain("alpha recovery produced a repeated root".into()));
            }
        }
    }
    Ok(RecoveredSpectral { omega, alpha0, c_signed })
}
