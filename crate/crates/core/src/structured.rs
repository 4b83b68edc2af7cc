//! Paired Cauchy and paired Vandermonde matrices and the exact relations
//! between their determinants.

use crate::error::{Error, Result};
use crate::linalg::{det, svd_values_and_right, CMat};
use crate::poly::Poly;
use crate::tol;
use num_complex::Complex64 as C;

/// Interpolation data (mu, nu, xi): three lists of length 2N.
///
/// The nodes xi must be pairwise distinct and no index may have mu and nu
/// simultaneously zero.
#[derive(Clone, Debug)]
pub struct InterpolationData {
    pub mu: Vec<C>,
    pub nu: Vec<C>,
    pub xi: Vec<C>,
}

impl InterpolationData {
    pub fn new(mu: Vec<C>, nu: Vec<C>, xi: Vec<C>) -> Result<Self> {
        if mu.len() != nu.len() || mu.len() != xi.len() {
            return Err(Error::Domain(format!(
                "mu, nu, xi must have equal length (got {}, {}, {})",
                mu.len(),
                nu.len(),
                xi.len()
            )));
        }
        if mu.is_empty() || mu.len() % 2 != 0 {
            return Err(Error::Domain(format!(
                "data length must be 2N with N >= 1, got {}",
                mu.len()
            )));
        }
        let scale = xi.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for i in 0..xi.len() {
            for j in i + 1..xi.len() {
                if xi[i] == xi[j] {
                    return Err(Error::CoincidentNodes { i, j, value: xi[i] });
                }
                if (xi[i] - xi[j]).norm() < tol::NODE_PROXIMITY_WARN * scale {
                    // Near-coincidence is the caller's risk; strict equality
                    // above is the hard error.
                    eprintln!(
                        "warning: nodes xi[{i}] and xi[{j}] are within {:.1e} relative",
                        tol::NODE_PROXIMITY_WARN
                    );
                }
            }
        }
        for i in 0..mu.len() {
            if mu[i].norm() == 0.0 && nu[i].norm() == 0.0 {
                return Err(Error::Domain(format!(
                    "mu[{i}] and nu[{i}] are simultaneously zero"
                )));
            }
        }
        Ok(InterpolationData { mu, nu, xi })
    }

    pub fn n(&self) -> usize {
        self.mu.len() / 2
    }

    /// Indices where mu vanishes (the i_k of the parametrizing polynomials).
    pub fn mu_zero_indices(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&i| self.mu[i].norm() == 0.0).collect()
    }

    /// Indices where nu vanishes (the j_m).
    pub fn nu_zero_indices(&self) -> Vec<usize> {
        (0..self.nu.len()).filter(|&i| self.nu[i].norm() == 0.0).collect()
    }
}

/// The N x N matrix with entries (mu_i nu_{N+j} - nu_i mu_{N+j}) / (xi_i - xi_{N+j}).
#[derive(Clone, Debug)]
pub struct PairedCauchyMatrix {
    pub entries: CMat,
}

pub fn build_paired_cauchy(data: &InterpolationData) -> Result<PairedCauchyMatrix> {
    let n = data.n();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let denom = data.xi[i] - data.xi[n + j];
            if denom.norm() == 0.0 {
                return Err(Error::CoincidentNodes { i, j: n + j, value: data.xi[i] });
            }
            m[(i, j)] = (data.mu[i] * data.nu[n + j] - data.nu[i] * data.mu[n + j]) / denom;
        }
    }
    Ok(PairedCauchyMatrix { entries: m })
}

/// Determinant of a dense square matrix (LU with partial pivoting).
pub fn det_dense(m: &CMat) -> C {
    det(m)
}

/// Closed form for det {1/(xi_i - xi_{N+j})}: the classical Cauchy determinant
/// over the split node set. The sign factor (-1)^{N(N-1)/2} is required to
/// match the dense determinant.
pub fn cauchy_det_closed_form(xi: &[C]) -> Result<C> {
    if xi.len() % 2 != 0 || xi.is_empty() {
        return Err(Error::Domain("node list must have length 2N".into()));
    }
    let n = xi.len() / 2;
    for i in 0..xi.len() {
        for j in i + 1..xi.len() {
            if xi[i] == xi[j] {
                return Err(Error::CoincidentNodes { i, j, value: xi[i] });
            }
        }
    }
    let mut num = C::new(1.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            num *= xi[i] - xi[j];
            num *= xi[n + i] - xi[n + j];
        }
    }
    let mut den = C::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            den *= xi[i] - xi[n + j];
        }
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(num / den * sign)
}

/// The stacked 2N x 2N matrix [V_{N-1}(mu, xi); V_{N-1}(nu, xi)].
#[derive(Clone, Debug)]
pub struct PairedVandermondeMatrix {
    pub entries: CMat,
}

/// Generalized Vandermonde block V_k(eta, zeta): rows zeta_j^p eta_j for p = 0..=k.
pub fn vandermonde_block(k: usize, eta: &[C], zeta: &[C]) -> CMat {
    let cols = eta.len();
    CMat::from_fn(k + 1, cols, |p, j| zeta[j].powu(p as u32) * eta[j])
}

pub fn build_paired_vandermonde(data: &InterpolationData) -> PairedVandermondeMatrix {
    let n = data.n();
    let top = vandermonde_block(n - 1, &data.mu, &data.xi);
    let bottom = vandermonde_block(n - 1, &data.nu, &data.xi);
    let mut m = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        m.set_row(i, top.row(i));
        m.set_row(n + i, bottom.row(i));
    }
    PairedVandermondeMatrix { entries: m }
}

/// det V of the paired Vandermonde matrix.
pub fn delta(data: &InterpolationData) -> C {
    det(&build_paired_vandermonde(data).entries)
}

/// Computes det S, Delta = det V and the closed-form factor, and checks the
/// identity det S = (-1)^{N(N-1)/2} Delta prod (xi_i - xi_j)^{-1}.
pub fn det_relation(data: &InterpolationData) -> Result<(C, C, C)> {
    let n = data.n();
    let s = build_paired_cauchy(data)?;
    let det_s = det(&s.entries);
    let dv = delta(data);
    let mut factor = C::new(1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            factor /= data.xi[i] - data.xi[n + j];
        }
    }
    let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = dv * factor * sign;
    let scale = det_s.norm().max(rhs.norm()).max(1e-300);
    if (det_s - rhs).norm() > 1e-6 * scale {
        return Err(Error::Inconsistency(format!(
            "det S = {det_s} but (-1)^(N(N-1)/2) Delta / prod = {rhs}"
        )));
    }
    Ok((det_s, dv, factor * sign))
}

/// Parametrizing polynomials Q1, Q2 of the singularity criterion, stored with
/// the mandatory node factors over the mu/nu zero sets already included.
#[derive(Clone, Debug)]
pub struct ParametrizingPolynomials {
    pub q1: Poly,
    pub q2: Poly,
    pub mu_zero_indices: Vec<usize>,
    pub nu_zero_indices: Vec<usize>,
}

impl ParametrizingPolynomials {
    /// Builds Q1 = Q1~ * prod over nu-zeros, Q2 = Q2~ * prod over mu-zeros and
    /// enforces the degree bounds deg Q1~ <= N-1-r, deg Q2~ <= N-1-p.
    pub fn new(data: &InterpolationData, q1_tilde: Poly, q2_tilde: Poly) -> Result<Self> {
        let n = data.n();
        let mu_zeros = data.mu_zero_indices();
        let nu_zeros = data.nu_zero_indices();
        let p = mu_zeros.len();
        let r = nu_zeros.len();
        if let Some(d) = q1_tilde.degree() {
            if d + r > n.saturating_sub(1) {
                return Err(Error::Domain(format!(
                    "deg Q1~ = {d} exceeds N-1-r = {}",
                    n as i64 - 1 - r as i64
                )));
            }
        }
        if let Some(d) = q2_tilde.degree() {
            if d + p > n.saturating_sub(1) {
                return Err(Error::Domain(format!(
                    "deg Q2~ = {d} exceeds N-1-p = {}",
                    n as i64 - 1 - p as i64
                )));
            }
        }
        let q1 = q1_tilde.mul(&Poly::from_roots(
            &nu_zeros.iter().map(|&j| data.xi[j]).collect::<Vec<_>>(),
        ));
        let q2 = q2_tilde.mul(&Poly::from_roots(
            &mu_zeros.iter().map(|&i| data.xi[i]).collect::<Vec<_>>(),
        ));
        Ok(ParametrizingPolynomials { q1, q2, mu_zero_indices: mu_zeros, nu_zero_indices: nu_zeros })
    }
}

/// Max residual of the singularity criterion mu_n Q1(xi_n) + nu_n Q2(xi_n) = 0,
/// normalized by the data and coefficient magnitudes.
pub fn singularity_witness(data: &InterpolationData, polys: &ParametrizingPolynomials) -> f64 {
    let scale = (polys.q1.max_coeff() + polys.q2.max_coeff()).max(1e-300)
        * data
            .xi
            .iter()
            .map(|z| z.norm().max(1.0).powi(data.n() as i32))
            .fold(1.0, f64::max)
        * data
            .mu
            .iter()
            .zip(&data.nu)
            .map(|(m, n)| m.norm() + n.norm())
            .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for k in 0..data.mu.len() {
        let r = (data.mu[k] * polys.q1.eval(data.xi[k]) + data.nu[k] * polys.q2.eval(data.xi[k]))
            .norm();
        worst = worst.max(r / scale);
    }
    worst
}

/// Attempts to solve the homogeneous system (2.3) for the coefficients of the
/// parametrizing polynomials. Returns the recovered polynomials together with
/// the smallest singular value of the system (the witness residual): a value
/// near zero certifies det S = 0.
pub fn solve_witness(data: &InterpolationData) -> Result<(ParametrizingPolynomials, f64)> {
    let n = data.n();
    let mu_zeros = data.mu_zero_indices();
    let nu_zeros = data.nu_zero_indices();
    let p = mu_zeros.len();
    let r = nu_zeros.len();
    if r >= n || p >= n {
        return Err(Error::Domain(
            "no admissible parametrizing polynomials: too many zero parameters".into(),
        ));
    }
    let base1 = Poly::from_roots(&nu_zeros.iter().map(|&j| data.xi[j]).collect::<Vec<_>>());
    let base2 = Poly::from_roots(&mu_zeros.iter().map(|&i| data.xi[i]).collect::<Vec<_>>());
    let n1 = n - r; // number of Q1~ coefficients
    let n2 = n - p;
    let rows = data.mu.len();
    let mut m = CMat::zeros(rows, n1 + n2);
    for k in 0..rows {
        let x = data.xi[k];
        let b1 = base1.eval(x) * data.mu[k];
        let b2 = base2.eval(x) * data.nu[k];
        for c in 0..n1 {
            m[(k, c)] = b1 * x.powu(c as u32);
        }
        for c in 0..n2 {
            m[(k, n1 + c)] = b2 * x.powu(c as u32);
        }
    }
    let (sv, v) = svd_values_and_right(&m);
    let smallest = *sv.last().unwrap();
    let largest = sv[0].max(1e-300);
    let ncols = n1 + n2;
    let mut q1t = vec![C::new(0.0, 0.0); n1];
    let mut q2t = vec![C::new(0.0, 0.0); n2];
    for c in 0..n1 {
        q1t[c] = v[(c, ncols - 1)];
    }
    for c in 0..n2 {
        q2t[c] = v[(n1 + c, ncols - 1)];
    }
    let polys = ParametrizingPolynomials::new(data, Poly::new(q1t), Poly::new(q2t))?;
    Ok((polys, smallest / largest))
}

/// Lemma relating a paired Cauchy matrix over sets (omega, alpha, gamma) split
/// m/n to the paired Vandermonde determinant with substituted multipliers.
/// Returns (det S, det V, closed-form ratio det S / det V).
pub fn pc_pv_bridge(
    omega: &[C],
    alpha: &[C],
    gamma: &[C],
    m: usize,
    n: usize,
) -> Result<(C, C, C)> {
    let total = m + n;
    if omega.len() != total || alpha.len() != total || gamma.len() != total {
        return Err(Error::Domain("omega, alpha, gamma must have length m+n".into()));
    }
    for i in 0..total {
        for k in 0..total {
            if i != k && (omega[i] == omega[k] || alpha[i] == alpha[k]) {
                return Err(Error::Domain(format!(
                    "coincident omega or alpha at indices {i}, {k}"
                )));
            }
            if omega[i] == -alpha[k] {
                return Err(Error::Domain(format!("omega[{i}] = -alpha[{k}] is forbidden")));
            }
        }
    }
    // S: first m rows 1/(omega_k + alpha_i), last n rows gamma_k/(omega_k + alpha_{m+i}).
    let s = CMat::from_fn(total, total, |i, k| {
        if i < m {
            C::new(1.0, 0.0) / (omega[k] + alpha[i])
        } else {
            gamma[k] / (omega[k] + alpha[i])
        }
    });
    let det_s = det(&s);
    // epsilon_k = gamma_k prod_{i<=m, j>m} (omega_k + alpha_i)/(omega_k + alpha_j).
    let eps: Vec<C> = (0..total)
        .map(|k| {
            let mut e = gamma[k];
            for i in 0..m {
                e *= omega[k] + alpha[i];
            }
            for j in m..total {
                e /= omega[k] + alpha[j];
            }
            e
        })
        .collect();
    let ones = vec![C::new(1.0, 0.0); total];
    let mut v = CMat::zeros(total, total);
    if m > 0 {
        let top = vandermonde_block(m - 1, &ones, omega);
        for i in 0..m {
            v.set_row(i, top.row(i));
        }
    }
    if n > 0 {
        let bottom = vandermonde_block(n - 1, &eps, omega);
        for i in 0..n {
            v.set_row(m + i, bottom.row(i));
        }
    }
    let det_v = det(&v);
    let mut ratio = C::new(1.0, 0.0);
    for l in 0..m {
        for k in l + 1..m {
            ratio *= alpha[k] - alpha[l];
        }
    }
    for j in m..total {
        for i in j + 1..total {
            ratio *= alpha[i] - alpha[j];
        }
    }
    for k in 0..total {
        for i in 0..m {
            ratio /= omega[k] + alpha[i];
        }
    }
    let lhs = det_s;
    let rhs = ratio * det_v;
    let scale = lhs.norm().max(rhs.norm()).max(1e-300);
    if (lhs - rhs).norm() > 1e-6 * scale {
        return Err(Error::Inconsistency(format!(
            "paired Cauchy/Vandermonde bridge violated: det S = {lhs}, factor * det V = {rhs}"
        )));
    }
    Ok((det_s, det_v, ratio))
}


#[cfg(test)]
mod combinatorial_oracle {
    //! Brute-force subset expansion of the paired Vandermonde determinant:
    //! Delta = sum over N-subsets rho of {1..2N} of
    //! (-1)^{N(N+1)/2 + sum rho} prod mu_rho prod nu_rhobar
    //! prod_{i<j in rho}(xi_i - xi_j) prod_{i<j in rhobar}(xi_i - xi_j).
    //! Exponential cost; test oracle only.

    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn subsets(n2: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn rec(start: usize, n2: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if current.len() == k {
                out.push(current.clone());
                return;
            }
            for i in start..n2 {
                current.push(i);
                rec(i + 1, n2, k, current, out);
                current.pop();
            }
        }
        rec(0, n2, k, &mut current, &mut out);
        out
    }

    fn delta_brute_force(data: &InterpolationData) -> C {
        let n = data.n();
        let mut total = C::new(0.0, 0.0);
        for rho in subsets(2 * n, n) {
            let rhobar: Vec<usize> = (0..2 * n).filter(|i| !rho.contains(i)).collect();
            // 1-based index sum in the sign factor.
            let idx_sum: usize = rho.iter().map(|&i| i + 1).sum::<usize>() + n * (n + 1) / 2;
            let sign = if idx_sum % 2 == 0 { 1.0 } else { -1.0 };
            let mut term = C::new(sign, 0.0);
            for &i in &rho {
                term *= data.mu[i];
            }
            for &j in &rhobar {
                term *= data.nu[j];
            }
            for a in 0..n {
                for b in a + 1..n {
                    term *= data.xi[rho[a]] - data.xi[rho[b]];
                    term *= data.xi[rhobar[a]] - data.xi[rhobar[b]];
                }
            }
            total += term;
        }
        total
    }

    #[test]
    fn subset_expansion_matches_dense_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3usize {
            for _ in 0..10 {
                let mu: Vec<C> = (0..2 * n)
                    .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let nu: Vec<C> = (0..2 * n)
                    .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                    .collect();
                let xi: Vec<C> = (0..2 * n)
                    .map(|k| C::new(k as f64 + rng.gen_range(0.0..0.6), rng.gen_range(-1.0..1.0)))
                    .collect();
                let data = match InterpolationData::new(mu, nu, xi) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let dense = delta(&data);
                let brute = delta_brute_force(&data);
                assert!(
                    (dense - brute).norm() < 1e-10 * dense.norm().max(brute.norm()).max(1.0),
                    "N={n}: dense {dense} vs subset expansion {brute}"
                );
            }
        }
    }
}
