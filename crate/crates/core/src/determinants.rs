//! The determinant machinery behind the explicit solutions: the paired
//! Vandermonde determinants Delta_1/Delta_2, the trigonometric N x N
//! determinants delta_1/delta_2, their analytic partial derivatives, and the
//! dense resolvent route through the matrix S(x, t).
//!
//! All evaluation is done in scaled form: exponential column (or row)
//! magnitudes are divided out so that nothing overflows for |x|, |t| well
//! beyond the double-precision exponent range. Ratios of determinants that
//! share the same scaling are exact.

use crate::error::{Error, Result};
use crate::linalg::{det, solve, CMat};
use crate::spectral::{chi_signed, column_exponent, EquationKind, SpectralData};
use crate::tol;
use num_complex::Complex64 as C;

fn cpowi(z: C, p: i32) -> C {
    if p >= 0 {
        z.powu(p as u32)
    } else {
        C::new(1.0, 0.0) / z.powu((-p) as u32)
    }
}

/// Which of the two trigonometric determinants a singularity branch lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Branch {
    Delta1,
    Delta2,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::Delta1 => write!(f, "delta1"),
            Branch::Delta2 => write!(f, "delta2"),
        }
    }
}

/// sinh/cosh of chi, premultiplied by exp(-s) with s = |Re chi| so the value
/// stays bounded for any argument.
fn scaled_trig(chi: C, s: f64, sinh: bool) -> C {
    let a = (chi - s).exp();
    let b = (-chi - s).exp();
    if sinh {
        (a - b) * 0.5
    } else {
        (a + b) * 0.5
    }
}

/// delta_1/delta_2 base parity: in delta_1, even-derivative columns carry
/// sinh; delta_2 is the complement. Each t- or x-derivative toggles.
fn base_sinh(branch: Branch, col: usize) -> bool {
    match branch {
        Branch::Delta1 => col % 2 == 0,
        Branch::Delta2 => col % 2 == 1,
    }
}

/// Scaled values of (delta_1, delta_2) plus the common log-scale:
/// true delta_i = d_i * exp(log_scale).
#[derive(Clone, Copy, Debug)]
pub struct TrigDeltas {
    pub d1: C,
    pub d2: C,
    pub log_scale: f64,
}

/// Row data shared by all delta evaluations at one (x, t).
struct TrigContext {
    omega: Vec<C>,
    theta: Vec<C>,
    chi: Vec<C>,
    row_scale: Vec<f64>,
    n: usize,
}

impl TrigContext {
    fn new(sd: &SpectralData, x: f64, t: f64) -> Self {
        let n = sd.n();
        let chi: Vec<C> = (0..n).map(|k| chi_signed(sd, k, x, t)).collect();
        let row_scale = chi.iter().map(|c| c.re.abs()).collect();
        TrigContext {
            omega: sd.omega.clone(),
            theta: sd.omega.iter().map(|&w| sd.theta(w)).collect(),
            chi,
            row_scale,
            n,
        }
    }

    /// Entry (j, k) of the chosen branch with dx x-derivatives and dt
    /// t-derivatives applied to row j.
    fn entry(&self, branch: Branch, j: usize, k: usize, dx: u32, dt: u32) -> C {
        let w = self.omega[j];
        let pow = (self.n - k) as i32 + dx as i32;
        let factor = cpowi(w, pow) * self.theta[j].powu(dt);
        let sinh = base_sinh(branch, k) ^ ((dx + dt) % 2 == 1);
        factor * scaled_trig(self.chi[j], self.row_scale[j], sinh)
    }

    /// Scaled determinant with per-row derivative counts.
    fn det_with(&self, branch: Branch, derivs: &[(u32, u32)]) -> C {
        let n = self.n;
        let m = CMat::from_fn(n, n, |j, k| {
            let (dx, dt) = derivs[j];
            self.entry(branch, j, k, dx, dt)
        });
        det(&m)
    }

    fn zero_derivs(&self) -> Vec<(u32, u32)> {
        vec![(0, 0); self.n]
    }

    /// Product of scaled row norms: the magnitude against which a determinant
    /// counts as numerically zero.
    fn hadamard(&self, branch: Branch) -> f64 {
        let mut p = 1.0f64;
        for j in 0..self.n {
            let mut r = 0.0f64;
            for k in 0..self.n {
                r += self.entry(branch, j, k, 0, 0).norm_sqr();
            }
            p *= r.sqrt().max(1e-300);
        }
        p
    }
}

/// Both trigonometric determinants (scaled) for any equation kind. The kind
/// enters only through Theta inside chi.
pub fn trig_deltas(sd: &SpectralData, x: f64, t: f64) -> TrigDeltas {
    let ctx = TrigContext::new(sd, x, t);
    let d0 = ctx.zero_derivs();
    TrigDeltas {
        d1: ctx.det_with(Branch::Delta1, &d0),
        d2: ctx.det_with(Branch::Delta2, &d0),
        log_scale: ctx.row_scale.iter().sum(),
    }
}

/// The SHG pair (delta_1, delta_2); errors for other kinds.
pub fn delta_shg(sd: &SpectralData, x: f64, t: f64) -> Result<TrigDeltas> {
    if sd.kind != EquationKind::Shg {
        return Err(Error::Domain("delta_shg requires SHG spectral data".into()));
    }
    Ok(trig_deltas(sd, x, t))
}

/// Scaled branch determinant.
pub fn delta_branch(sd: &SpectralData, x: f64, t: f64, branch: Branch) -> C {
    let ctx = TrigContext::new(sd, x, t);
    ctx.det_with(branch, &ctx.zero_derivs())
}

/// Scaled branch determinant together with the magnitude scale against which
/// "numerically zero" is judged.
pub fn delta_branch_with_scale(sd: &SpectralData, x: f64, t: f64, branch: Branch) -> (C, f64) {
    let ctx = TrigContext::new(sd, x, t);
    (ctx.det_with(branch, &ctx.zero_derivs()), ctx.hadamard(branch))
}

/// Analytic first partials (d/dx, d/dt) of the scaled branch determinant.
/// Same scaling as `delta_branch`, so ratios of the three are exact.
pub fn delta_branch_partials(sd: &SpectralData, x: f64, t: f64, branch: Branch) -> (C, C, C) {
    let ctx = TrigContext::new(sd, x, t);
    let base = ctx.zero_derivs();
    let value = ctx.det_with(branch, &base);
    let mut ddx = C::new(0.0, 0.0);
    let mut ddt = C::new(0.0, 0.0);
    for j in 0..ctx.n {
        let mut d = base.clone();
        d[j] = (1, 0);
        ddx += ctx.det_with(branch, &d);
        d[j] = (0, 1);
        ddt += ctx.det_with(branch, &d);
    }
    (value, ddx, ddt)
}

/// d(delta)/d(chi_j) restricted to a single row: the building block for the
/// action-angle partials d(delta)/d(q_j).
pub fn delta_branch_dt_single_row(
    sd: &SpectralData,
    x: f64,
    t: f64,
    branch: Branch,
    row: usize,
) -> C {
    let ctx = TrigContext::new(sd, x, t);
    let mut d = ctx.zero_derivs();
    d[row] = (0, 1);
    ctx.det_with(branch, &d)
}

/// Second partials (d2/dx2, d2/dxdt, d2/dt2) of the scaled branch determinant.
pub fn delta_branch_second_partials(
    sd: &SpectralData,
    x: f64,
    t: f64,
    branch: Branch,
) -> (C, C, C) {
    let ctx = TrigContext::new(sd, x, t);
    let n = ctx.n;
    let mut dxx = C::new(0.0, 0.0);
    let mut dxt = C::new(0.0, 0.0);
    let mut dtt = C::new(0.0, 0.0);
    for j in 0..n {
        let mut d = ctx.zero_derivs();
        d[j] = (2, 0);
        dxx += ctx.det_with(branch, &d);
        d[j] = (1, 1);
        dxt += ctx.det_with(branch, &d);
        d[j] = (0, 2);
        dtt += ctx.det_with(branch, &d);
        // Cross terms run over ordered pairs of distinct rows.
        for k in 0..n {
            if k == j {
                continue;
            }
            let mut d2 = ctx.zero_derivs();
            d2[j] = (1, 0);
            d2[k] = (1, 0);
            dxx += ctx.det_with(branch, &d2);
            d2[j] = (1, 0);
            d2[k] = (0, 1);
            dxt += ctx.det_with(branch, &d2);
            d2[j] = (0, 1);
            d2[k] = (0, 1);
            dtt += ctx.det_with(branch, &d2);
        }
    }
    (dxx, dxt, dtt)
}

/// Column data for the big paired-Vandermonde determinants at one (x, t).
struct BigContext {
    nodes: Vec<C>,
    theta: Vec<C>,
    /// exp(exponent - scale) per column.
    eps_scaled: Vec<C>,
    /// exp(-scale) per column (applied to the multiplier-free rows).
    pure_scaled: Vec<f64>,
    n: usize,
}

impl BigContext {
    fn new(sd: &SpectralData, x: f64, t: f64) -> Self {
        let n = sd.n();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut eps_scaled = Vec::with_capacity(2 * n);
        let mut pure_scaled = Vec::with_capacity(2 * n);
        for k in 0..2 * n {
            let positive = k < n;
            let idx = if positive { k } else { k - n };
            let node = if positive { sd.omega[idx] } else { -sd.omega[idx] };
            let e = column_exponent(sd, idx, positive, x, t);
            let s = e.re.max(0.0);
            nodes.push(node);
            eps_scaled.push((e - s).exp());
            pure_scaled.push((-s).exp());
        }
        let theta = nodes.iter().map(|&z| sd.theta(z)).collect();
        BigContext { nodes, theta, eps_scaled, pure_scaled, n }
    }

    fn pure_row(&self, p: u32) -> Vec<C> {
        (0..2 * self.n)
            .map(|c| self.nodes[c].powu(p) * self.pure_scaled[c])
            .collect()
    }

    fn eps_row(&self, p: u32, dx: u32, dt: u32) -> Vec<C> {
        (0..2 * self.n)
            .map(|c| {
                let z = self.nodes[c];
                z.powu(p) * (2.0 * z).powu(dx) * (2.0 * self.theta[c]).powu(dt) * self.eps_scaled[c]
            })
            .collect()
    }

    /// Scaled determinant: pure rows with powers `pure_powers`, multiplier
    /// rows with powers `eps_powers` and per-row x-derivative counts `dx`.
    fn det_rows(&self, pure_powers: &[u32], eps_powers: &[u32], dx: &[u32]) -> C {
        let n2 = 2 * self.n;
        debug_assert_eq!(pure_powers.len() + eps_powers.len(), n2);
        let mut rows: Vec<Vec<C>> = Vec::with_capacity(n2);
        for &p in pure_powers {
            rows.push(self.pure_row(p));
        }
        for (i, &p) in eps_powers.iter().enumerate() {
            rows.push(self.eps_row(p, dx[i], 0));
        }
        det(&CMat::from_rows(&rows))
    }

    fn hadamard(&self, pure_powers: &[u32], eps_powers: &[u32]) -> f64 {
        let mut prod = 1.0f64;
        for &p in pure_powers {
            let r: f64 = self.pure_row(p).iter().map(|z| z.norm_sqr()).sum();
            prod *= r.sqrt().max(1e-300);
        }
        for &p in eps_powers {
            let r: f64 = self.eps_row(p, 0, 0).iter().map(|z| z.norm_sqr()).sum();
            prod *= r.sqrt().max(1e-300);
        }
        prod
    }
}

fn delta1_layout(n: usize) -> (Vec<u32>, Vec<u32>) {
    let pure: Vec<u32> = (0..n.saturating_sub(1) as u32).collect();
    let eps: Vec<u32> = (0..=n as u32).collect();
    (pure, eps)
}

fn delta2_layout(n: usize) -> (Vec<u32>, Vec<u32>) {
    let pure: Vec<u32> = (0..n as u32).collect();
    let eps: Vec<u32> = (0..n as u32).collect();
    (pure, eps)
}

/// Scaled values of the 2N x 2N determinants (Delta_1, Delta_2) sharing one
/// column scaling, plus the scale magnitude of Delta_2 for singularity masks
/// and the common log-scale (true Delta_i = d_i * exp(log_scale)).
#[derive(Clone, Copy, Debug)]
pub struct BigDeltas {
    pub d1: C,
    pub d2: C,
    pub d2_scale: f64,
    pub log_scale: f64,
}

pub fn big_deltas(sd: &SpectralData, x: f64, t: f64) -> BigDeltas {
    let ctx = BigContext::new(sd, x, t);
    let (p1, e1) = delta1_layout(ctx.n);
    let (p2, e2) = delta2_layout(ctx.n);
    let dx1 = vec![0u32; e1.len()];
    let dx2 = vec![0u32; e2.len()];
    let log_scale: f64 = (0..2 * ctx.n).map(|c| -ctx.pure_scaled[c].ln()).sum();
    BigDeltas {
        d1: ctx.det_rows(&p1, &e1, &dx1),
        d2: ctx.det_rows(&p2, &e2, &dx2),
        d2_scale: ctx.hadamard(&p2, &e2),
        log_scale,
    }
}

/// The spec'd pair for mKdV/NSE.
pub fn delta_mkdv_nse(sd: &SpectralData, x: f64, t: f64) -> Result<BigDeltas> {
    if sd.kind == EquationKind::Shg {
        return Err(Error::Domain("delta_mkdv_nse requires mKdV or NSE data".into()));
    }
    Ok(big_deltas(sd, x, t))
}

/// x-derivatives 0..=m of Delta_1 and Delta_2 (scaled, common scaling).
/// Each differentiation acts on the multiplier rows only and multiplies the
/// affected row by 2 * node columnwise, so the m-th derivative is a sum over
/// distributions of m among the multiplier rows with multinomial weights.
pub fn big_delta_x_jets(sd: &SpectralData, x: f64, t: f64, m: usize) -> (Vec<C>, Vec<C>) {
    let ctx = BigContext::new(sd, x, t);
    let mut out = Vec::with_capacity(2);
    for layout in [delta1_layout(ctx.n), delta2_layout(ctx.n)] {
        let (pure, eps) = layout;
        let rows = eps.len();
        let mut jets = vec![C::new(0.0, 0.0); m + 1];
        // Enumerate derivative distributions d over the eps rows, total <= m.
        let mut dist = vec![0u32; rows];
        enumerate_distributions(&mut dist, 0, m as u32, &mut |d: &[u32]| {
            let total: u32 = d.iter().sum();
            let mut weight = 1.0f64;
            // multinomial total! / prod d_i!
            let mut rem = total;
            for &di in d {
                weight *= binomial(rem, di);
                rem -= di;
            }
            let v = ctx.det_rows(&pure, &eps, d);
            jets[total as usize] += v * weight;
        });
        out.push(jets);
    }
    let d2 = out.pop().unwrap();
    let d1 = out.pop().unwrap();
    (d1, d2)
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut r = 1.0f64;
    for i in 0..k {
        r = r * ((n - i) as f64) / ((i + 1) as f64);
    }
    r
}

fn enumerate_distributions(dist: &mut Vec<u32>, idx: usize, budget: u32, f: &mut impl FnMut(&[u32])) {
    if idx == dist.len() {
        f(dist);
        return;
    }
    for v in 0..=budget {
        dist[idx] = v;
        enumerate_distributions(dist, idx + 1, budget - v, f);
    }
    dist[idx] = 0;
}

/// Gamma_2x(2x, 0, t) = ((-1)^N / 2) Delta_1 / Delta_2. `None` marks a
/// singular point (Delta_2 numerically zero).
pub fn gamma_2x(sd: &SpectralData, x: f64, t: f64) -> Option<C> {
    let b = big_deltas(sd, x, t);
    if b.d2.norm() < tol::SINGULAR_FIELD * b.d2_scale {
        return None;
    }
    let sign = if sd.n() % 2 == 0 { 1.0 } else { -1.0 };
    Some(b.d1 / b.d2 * 0.5 * sign)
}

/// The matrix S(x, t) of the operator construction, with raw exponentials and
/// explicit alphas (no C_k folding). Columns carry the node multipliers
/// evaluated at +omega_k / -omega_k.
pub fn s_matrix_raw(sd: &SpectralData, x: f64, t: f64) -> CMat {
    let n = sd.n();
    let psi: Vec<C> = (0..2 * n)
        .map(|c| {
            let positive = c < n;
            let idx = if positive { c } else { c - n };
            let node = if positive { sd.omega[idx] } else { -sd.omega[idx] };
            ((node * x + sd.theta(node) * t) * 2.0).exp()
        })
        .collect();
    let nodes: Vec<C> = (0..2 * n)
        .map(|c| if c < n { sd.omega[c] } else { -sd.omega[c - n] })
        .collect();
    CMat::from_fn(2 * n, 2 * n, |i, c| {
        if i < n {
            C::new(1.0, 0.0) / (sd.alpha0[i] + nodes[c])
        } else {
            psi[c] / (nodes[c] - sd.alpha0[i - n])
        }
    })
}

/// Independent resolvent route for Gamma_2x through a dense solve with
/// S(x, t); usable only where the raw exponentials stay in range.
pub fn gamma_2x_resolvent(sd: &SpectralData, x: f64, t: f64) -> Result<C> {
    let n = sd.n();
    let s = s_matrix_raw(sd, x, t);
    let mut e = vec![C::new(0.0, 0.0); 2 * n];
    for item in e.iter_mut().take(n) {
        *item = C::new(1.0, 0.0);
    }
    let z = solve(&s, &e).ok_or_else(|| Error::Domain("S(x,t) is singular at this point".into()))?;
    let mut acc = C::new(0.0, 0.0);
    for c in 0..2 * n {
        let positive = c < n;
        let idx = if positive { c } else { c - n };
        let node = if positive { sd.omega[idx] } else { -sd.omega[idx] };
        let psi = ((node * x + sd.theta(node) * t) * 2.0).exp();
        acc += psi * z[c];
    }
    Ok(acc * 0.5)
}

/// Solution value at one point; `None` marks a singular point.
///
/// mKdV/NSE: xi = 2 (-1)^{N-1} Delta_1 / Delta_2. SHG: phi = 2 ln |delta_1 / delta_2|.
pub fn solution_eval(sd: &SpectralData, x: f64, t: f64) -> Option<C> {
    match sd.kind {
        EquationKind::Shg => {
            let ctx = TrigContext::new(sd, x, t);
            let d0 = ctx.zero_derivs();
            let d1 = ctx.det_with(Branch::Delta1, &d0);
            let d2 = ctx.det_with(Branch::Delta2, &d0);
            let scale1 = ctx.hadamard(Branch::Delta1);
            let scale2 = ctx.hadamard(Branch::Delta2);
            if d1.norm() < tol::SINGULAR_FIELD * scale1 || d2.norm() < tol::SINGULAR_FIELD * scale2
            {
                return None;
            }
            Some(C::new(2.0 * (d1.norm() / d2.norm()).ln(), 0.0))
        }
        _ => {
            let b = big_deltas(sd, x, t);
            if b.d2.norm() < tol::SINGULAR_FIELD * b.d2_scale {
                return None;
            }
            let sign = if sd.n() % 2 == 1 { 1.0 } else { -1.0 };
            Some(b.d1 / b.d2 * 2.0 * sign)
        }
    }
}

/// The signed (complex) ratio delta_1/delta_2, kept separate from the modulus
/// route for residue-type classification.
pub fn delta_ratio(sd: &SpectralData, x: f64, t: f64) -> Option<C> {
    let ctx = TrigContext::new(sd, x, t);
    let d0 = ctx.zero_derivs();
    let d1 = ctx.det_with(Branch::Delta1, &d0);
    let d2 = ctx.det_with(Branch::Delta2, &d0);
    if d2.norm() < tol::SINGULAR_FIELD * ctx.hadamard(Branch::Delta2) {
        return None;
    }
    Some(d1 / d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::c_constants;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn sd(kind: EquationKind, omega: &[(f64, f64)], alpha: &[(f64, f64)]) -> SpectralData {
        SpectralData::new(
            omega.iter().map(|&(a, b)| c(a, b)).collect(),
            alpha.iter().map(|&(a, b)| c(a, b)).collect(),
            kind,
        )
        .unwrap()
    }

    #[test]
    fn n1_shg_deltas_are_sinh_cosh() {
        // omega > alpha0 > 0: delta1 = omega sinh chi, delta2 = omega cosh chi
        // (the spec-level statement drops the common omega factor).
        let s = sd(EquationKind::Shg, &[(1.3, 0.0)], &[(0.4, 0.0)]);
        let (x, t) = (0.37, -0.81);
        let d = trig_deltas(&s, x, t);
        let chi = chi_signed(&s, 0, x, t);
        let scale = d.log_scale.exp();
        assert!((d.d1 * scale - 1.3 * chi.sinh()).norm() < 1e-12);
        assert!((d.d2 * scale - 1.3 * chi.cosh()).norm() < 1e-12);
    }

    #[test]
    fn n1_shg_deltas_swap_when_alpha_dominates() {
        // omega < alpha0: C < 0 and the roles of sinh and cosh swap (up to the
        // constant phase that the modulus ratio ignores).
        let s = sd(EquationKind::Shg, &[(0.6, 0.0)], &[(1.9, 0.0)]);
        let (x, t) = (0.2, 0.5);
        let d = trig_deltas(&s, x, t);
        let (signed, half) = c_constants(&s);
        assert!(signed[0].re < 0.0);
        let chi_mod = c(0.6 * x, 0.0) + s.theta(c(0.6, 0.0)) * t - half[0];
        let scale = d.log_scale.exp();
        // |delta1| ~ omega |cosh chi~|, |delta2| ~ omega |sinh chi~|.
        assert!((d.d1.norm() * scale - 0.6 * chi_mod.cosh().norm()).abs() < 1e-10);
        assert!((d.d2.norm() * scale - 0.6 * chi_mod.sinh().norm()).abs() < 1e-10);
    }

    #[test]
    fn n2_shg_matches_two_wave_closed_form() {
        // Both C_k > 0: the closed two-wave form with sinh(eta_1), sinh(eta_2).
        let s = sd(EquationKind::Shg, &[(1.0, 0.0), (2.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]);
        let (x, t) = (0.31, -0.47);
        let chi1 = chi_signed(&s, 0, x, t);
        let chi2 = chi_signed(&s, 1, x, t);
        let eta1 = chi1 + chi2;
        let eta2 = chi2 - chi1;
        let (w1, w2) = (1.0, 2.0);
        let num = (w1 - w2) * eta1.sinh() - (w1 + w2) * eta2.sinh();
        let den = (w1 - w2) * eta1.sinh() + (w1 + w2) * eta2.sinh();
        let expect = 2.0 * (num.norm() / den.norm()).ln();
        let got = solution_eval(&s, x, t).unwrap();
        assert!((got.re - expect).abs() < 1e-10, "{} vs {}", got.re, expect);
    }

    #[test]
    fn gamma_ratio_matches_dense_resolvent() {
        // The Delta_1/Delta_2 route against the dense S(x,t) solve, all kinds,
        // N = 1..3. This pins every sign and row-layout convention.
        let cases: Vec<SpectralData> = vec![
            sd(EquationKind::Shg, &[(1.0, 0.0)], &[(0.3, 0.0)]),
            sd(EquationKind::Mkdv, &[(1.0, 0.0)], &[(0.3, 0.0)]),
            sd(EquationKind::Nse, &[(1.0, 0.0)], &[(0.3, 0.0)]),
            sd(EquationKind::Shg, &[(1.0, 0.0), (2.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]),
            sd(EquationKind::Mkdv, &[(1.0, 0.0), (2.0, 0.0)], &[(0.2, 0.0), (0.7, 0.0)]),
            sd(EquationKind::Nse, &[(0.8, 0.0), (1.7, 0.0)], &[(0.3, 0.0), (1.1, 0.0)]),
            sd(
                EquationKind::Shg,
                &[(0.5, 0.0), (1.0, 0.0), (1.5, 0.0)],
                &[(0.2, 0.0), (1.1, 0.0), (1.3, 0.0)],
            ),
            sd(
                EquationKind::Mkdv,
                &[(0.5, 0.0), (0.9, 0.0), (1.4, 0.0)],
                &[(0.1, 0.0), (0.6, 0.0), (1.2, 0.0)],
            ),
            sd(
                EquationKind::Shg,
                &[(2.0, 0.2), (2.0, -0.2)],
                &[(0.1, 0.0), (1.0, 0.0)],
            ),
        ];
        for s in &cases {
            for &(x, t) in &[(0.17, 0.23), (-0.4, 0.6), (0.9, -0.35)] {
                let via_delta = gamma_2x(s, x, t);
                let via_dense = gamma_2x_resolvent(s, x, t);
                if let (Some(a), Ok(b)) = (via_delta, via_dense) {
                    assert!(
                        (a - b).norm() < 1e-8 * b.norm().max(1.0),
                        "kind {:?} N={} at ({x},{t}): {a} vs {b}",
                        s.kind,
                        s.n()
                    );
                }
            }
        }
    }

    #[test]
    fn n1_mkdv_solution_is_csch() {
        // omega = 1, alpha = 0: psi(x, t) = 2 csch(2(x - t)).
        let s = sd(EquationKind::Mkdv, &[(1.0, 0.0)], &[(0.0, 0.0)]);
        for &(x, t) in &[(0.7, 0.2), (1.4, -0.3), (-0.8, 0.4)] {
            let got = solution_eval(&s, x, t).unwrap();
            let expect = 2.0 / (2.0 * (x - t)).sinh();
            assert!((got - c(expect, 0.0)).norm() < 1e-10, "{got} vs {expect}");
        }
    }

    #[test]
    fn n1_shg_solution_is_log_tanh() {
        let s = sd(EquationKind::Shg, &[(1.0, 0.0)], &[(0.0, 0.0)]);
        for &(x, t) in &[(0.7, 0.2), (1.4, -0.3), (-0.8, 0.4)] {
            let got = solution_eval(&s, x, t).unwrap().re;
            let expect = 2.0 * (x + t).tanh().abs().ln();
            assert!((got - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn n1_nse_solution_closed_form() {
        // omega real: rho = 2 omega e^{2 i omega^2 t} / sinh(2(omega x - C)).
        let s = sd(EquationKind::Nse, &[(1.2, 0.0)], &[(0.4, 0.0)]);
        let (_, half) = c_constants(&s);
        for &(x, t) in &[(0.9, 0.3), (0.4, -0.6)] {
            let got = solution_eval(&s, x, t).unwrap();
            let phase = c(0.0, 2.0 * 1.2 * 1.2 * t).exp();
            let expect = 2.0 * 1.2 * phase / (2.0 * (1.2 * x - half[0])).sinh();
            assert!((got - expect).norm() < 1e-10, "{got} vs {expect}");
        }
    }

    #[test]
    fn n1_gamma_closed_form() {
        // Gamma_2x = -(omega/2) csch(2 chi) for SHG.
        let s = sd(EquationKind::Shg, &[(1.4, 0.0)], &[(0.5, 0.0)]);
        let (x, t) = (0.52, 0.11);
        let chi = chi_signed(&s, 0, x, t);
        let got = gamma_2x(&s, x, t).unwrap();
        let expect = -(1.4 / 2.0) / (2.0 * chi).sinh();
        assert!((got - expect).norm() < 1e-11, "{got} vs {expect}");
    }

    #[test]
    fn big_delta_factorizes_into_trig_deltas() {
        // Delta_2 = const(omega) * delta_1 * delta_2 over (x, t): the product
        // structure behind the det S <=> delta_1 delta_2 equivalence.
        for s in [
            sd(EquationKind::Shg, &[(1.0, 0.0), (2.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]),
            sd(
                EquationKind::Shg,
                &[(0.5, 0.0), (1.0, 0.0), (1.5, 0.0)],
                &[(0.2, 0.0), (1.1, 0.0), (1.3, 0.0)],
            ),
            sd(EquationKind::Mkdv, &[(1.0, 0.0), (2.0, 0.0)], &[(0.2, 0.0), (0.7, 0.0)]),
        ] {
            let mut ratio_ref: Option<C> = None;
            for &(x, t) in &[(0.3, 0.1), (-0.2, 0.45), (0.8, -0.6), (0.05, 0.9)] {
                let big = big_deltas(&s, x, t);
                let trig = trig_deltas(&s, x, t);
                let prod = trig.d1 * trig.d2;
                if prod.norm() < 1e-8 || big.d2.norm() < 1e-12 {
                    continue;
                }
                // Undo the differing scalings before comparing.
                let ctx_scale: f64 = 2.0 * trig.log_scale;
                let big_scale: f64 = {
                    let mut ssum = 0.0;
                    for k in 0..s.n() {
                        for pos in [true, false] {
                            ssum += column_exponent(&s, k, pos, x, t).re.max(0.0);
                        }
                    }
                    ssum
                };
                let ratio = big.d2 / prod * (big_scale - ctx_scale).exp();
                if let Some(r) = ratio_ref {
                    assert!(
                        (ratio - r).norm() < 1e-7 * r.norm(),
                        "kind {:?}: {ratio} vs {r}",
                        s.kind
                    );
                } else {
                    ratio_ref = Some(ratio);
                }
            }
            assert!(ratio_ref.is_some());
        }
    }

    #[test]
    fn scaled_evaluation_survives_extreme_arguments() {
        let s = sd(EquationKind::Mkdv, &[(1.0, 0.0), (2.0, 0.0)], &[(0.2, 0.0), (0.7, 0.0)]);
        // Raw exponentials here are e^{~800}, far outside f64 range.
        let (d, scale) = delta_branch_with_scale(&s, 50.0, -50.0, Branch::Delta1);
        assert!(d.norm().is_finite());
        assert!(scale.is_finite() && scale > 0.0);
        let b = big_deltas(&s, 50.0, -50.0);
        assert!(b.d1.norm().is_finite() && b.d2.norm().is_finite());
    }

    #[test]
    fn partials_match_finite_differences() {
        // The scaled values at neighbouring points carry different scale
        // factors, so the finite difference must reinstate exp(log_scale)
        // relative to the centre point before comparing.
        let cases = [
            sd(EquationKind::Shg, &[(1.0, 0.0), (2.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]),
            sd(EquationKind::Mkdv, &[(1.0, 0.0), (2.0, 0.0)], &[(0.2, 0.0), (0.7, 0.0)]),
        ];
        for s in &cases {
            let (x, t) = (0.4, 0.2);
            let s0 = trig_deltas(s, x, t).log_scale;
            let value_at = |branch: Branch, xx: f64, tt: f64| {
                let d = trig_deltas(s, xx, tt);
                let v = match branch {
                    Branch::Delta1 => d.d1,
                    Branch::Delta2 => d.d2,
                };
                v * (d.log_scale - s0).exp()
            };
            for branch in [Branch::Delta1, Branch::Delta2] {
                let (_, dx, dt) = delta_branch_partials(s, x, t, branch);
                let h = 1e-6;
                let fd_x = (value_at(branch, x + h, t) - value_at(branch, x - h, t)) / (2.0 * h);
                let fd_t = (value_at(branch, x, t + h) - value_at(branch, x, t - h)) / (2.0 * h);
                assert!((dx - fd_x).norm() < 1e-7 * dx.norm().max(1.0), "{dx} vs {fd_x}");
                assert!((dt - fd_t).norm() < 1e-7 * dt.norm().max(1.0), "{dt} vs {fd_t}");
            }
        }
    }

    #[test]
    fn delta_second_partials_match_finite_differences() {
        let s = sd(EquationKind::Shg, &[(1.0, 0.0), (2.0, 0.0)], &[(0.0, 0.0), (0.5, 0.0)]);
        let (x, t) = (0.4, 0.2);
        let s0 = trig_deltas(&s, x, t).log_scale;
        let value_at = |xx: f64, tt: f64| {
            let d = trig_deltas(&s, xx, tt);
            d.d1 * (d.log_scale - s0).exp()
        };
        let (dxx, dxt, dtt) = delta_branch_second_partials(&s, x, t, Branch::Delta1);
        let h = 1e-4;
        let fd_xx = (value_at(x + h, t) - 2.0 * value_at(x, t) + value_at(x - h, t)) / (h * h);
        let fd_tt = (value_at(x, t + h) - 2.0 * value_at(x, t) + value_at(x, t - h)) / (h * h);
        let fd_xt = (value_at(x + h, t + h) - value_at(x + h, t - h) - value_at(x - h, t + h)
            + value_at(x - h, t - h))
            / (4.0 * h * h);
        assert!((dxx - fd_xx).norm() < 1e-5 * dxx.norm().max(1.0), "{dxx} vs {fd_xx}");
        assert!((dtt - fd_tt).norm() < 1e-5 * dtt.norm().max(1.0), "{dtt} vs {fd_tt}");
        assert!((dxt - fd_xt).norm() < 1e-5 * dxt.norm().max(1.0), "{dxt} vs {fd_xt}");
    }

    #[test]
    fn big_delta_x_jets_match_finite_differences() {
        let s = sd(EquationKind::Mkdv, &[(1.0, 0.0), (2.0, 0.0)], &[(0.2, 0.0), (0.7, 0.0)]);
        let (x, t) = (0.3, 0.15);
        let (j1, j2) = big_delta_x_jets(&s, x, t, 2);
        let s0 = big_deltas(&s, x, t).log_scale;
        let h = 1e-5;
        for (jet, pick) in [(&j1, 0usize), (&j2, 1usize)] {
            let f = |xx: f64| {
                let b = big_deltas(&s, xx, t);
                let v = if pick == 0 { b.d1 } else { b.d2 };
                v * (b.log_scale - s0).exp()
            };
            let r_analytic = jet[1] / jet[0];
            let r_fd = (f(x + h) - f(x - h)) / (2.0 * h) / f(x);
            assert!(
                (r_analytic - r_fd).norm() < 1e-7 * r_analytic.norm().max(1.0),
                "{r_analytic} vs {r_fd}"
            );
            let r2_analytic = jet[2] / jet[0];
            let r2_fd = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h) / f(x);
            assert!(
                (r2_analytic - r2_fd).norm() < 1e-4 * r2_analytic.norm().max(1.0),
                "{r2_analytic} vs {r2_fd}"
            );
        }
    }
}
