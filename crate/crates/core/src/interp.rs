//! Basis solution of the interpolation problem, the associated transfer
//! matrix-function, and the inverse interpolation problem.

use crate::error::{Error, Result};
use crate::linalg::{det, solve, CMat};
use crate::poly::Poly;
use crate::structured::{build_paired_cauchy, det_relation, vandermonde_block, InterpolationData};
use crate::tol;
use num_complex::Complex64 as C;

/// Normalized basis solution: 2x2 matrix polynomial {D_ij} with
/// deg D11 = deg D22 = N (both monic), deg D12, D21 <= N-1, vanishing against
/// (nu_k, mu_k)^T at every node xi_k.
#[derive(Clone, Debug)]
pub struct BasisSolution {
    pub n: usize,
    pub d11: Poly,
    pub d12: Poly,
    pub d21: Poly,
    pub d22: Poly,
}

impl BasisSolution {
    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        match (i, j) {
            (0, 0) => &self.d11,
            (0, 1) => &self.d12,
            (1, 0) => &self.d21,
            (1, 1) => &self.d22,
            _ => panic!("index out of range"),
        }
    }

    /// D(lambda) = D11 D22 - D12 D21.
    pub fn det_poly(&self) -> Poly {
        self.d11.mul(&self.d22).sub(&self.d12.mul(&self.d21))
    }

    pub fn eval(&self, lambda: C) -> [[C; 2]; 2] {
        [
            [self.d11.eval(lambda), self.d12.eval(lambda)],
            [self.d21.eval(lambda), self.d22.eval(lambda)],
        ]
    }
}

/// One bordered-determinant polynomial: the (2N+1) x (2N+1) matrix whose last
/// column carries powers of lambda in `border_rows`, expanded along that
/// column so that each coefficient is a 2N x 2N minor.
fn bordered_poly(body: &CMat, border_rows: &[usize]) -> Poly {
    let size = body.rows; // 2N+1 rows including border rows; body has 2N cols
    debug_assert_eq!(body.cols + 1, size);
    let mut coeffs = vec![C::new(0.0, 0.0); border_rows.len()];
    for (power, &row) in border_rows.iter().enumerate() {
        // Minor: delete `row` and the last column.
        let mut minor = CMat::zeros(size - 1, size - 1);
        let mut mi = 0;
        for i in 0..size {
            if i == row {
                continue;
            }
            for j in 0..size - 1 {
                minor[(mi, j)] = body[(i, j)];
            }
            mi += 1;
        }
        let sign = if (row + size - 1) % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[power] = det(&minor) * sign;
    }
    Poly::new(coeffs)
}

/// Stacks `top` (k1+1 rows) over `bottom` (k2+1 rows) into the bordered body.
fn stack(top: &CMat, bottom: &CMat) -> CMat {
    let rows = top.rows + bottom.rows;
    let mut m = CMat::zeros(rows, top.cols);
    for i in 0..top.rows {
        m.set_row(i, top.row(i));
    }
    for i in 0..bottom.rows {
        m.set_row(top.rows + i, bottom.row(i));
    }
    m
}

/// Constructs the normalized basis solution from interpolation data.
///
/// Each D_ij is read off a bordered paired-Vandermonde determinant; the
/// lambda-power coefficients are cofactor minors along the border column.
/// Requires det S != 0 (equivalently Delta != 0).
pub fn basis_solution(data: &InterpolationData) -> Result<BasisSolution> {
    let n = data.n();
    let (_, delta, _) = det_relation(data)?;
    let v = crate::structured::build_paired_vandermonde(data);
    let scale = v.entries.max_abs().powi(2 * n as i32).max(1e-300);
    if delta.norm() <= tol::SINGULAR_REL * scale.min(1e12) {
        return Err(Error::SingularS { delta });
    }

    let v_mu_low = vandermonde_block(n - 1, &data.mu, &data.xi);
    let v_mu_high = vandermonde_block(n, &data.mu, &data.xi);
    let v_nu_low = vandermonde_block(n - 1, &data.nu, &data.xi);
    let v_nu_high = vandermonde_block(n, &data.nu, &data.xi);

    // D11: [V_{N-1}(mu) | 0 ; V_N(nu) | Lambda_N], border rows are the nu block.
    let body11 = stack(&v_mu_low, &v_nu_high);
    let d11 = bordered_poly(&body11, &(n..2 * n + 1).collect::<Vec<_>>());
    // D12: [V_{N-1}(mu) | Lambda_{N-1} ; V_N(nu) | 0].
    let body12 = stack(&v_mu_low, &v_nu_high);
    let d12 = bordered_poly(&body12, &(0..n).collect::<Vec<_>>());
    // D21: [V_N(mu) | 0 ; V_{N-1}(nu) | Lambda_{N-1}].
    let body21 = stack(&v_mu_high, &v_nu_low);
    let d21 = bordered_poly(&body21, &(n + 1..2 * n + 1).collect::<Vec<_>>());
    // D22: [V_N(mu) | Lambda_N ; V_{N-1}(nu) | 0].
    let body22 = stack(&v_mu_high, &v_nu_low);
    let d22 = bordered_poly(&body22, &(0..n + 1).collect::<Vec<_>>());

    // Normalize both rows so D11 and D22 are monic of degree N.
    if d11.degree() != Some(n) || d22.degree() != Some(n) {
        return Err(Error::Inconsistency(format!(
            "basis solution degrees N={n}: got deg D11 = {:?}, deg D22 = {:?}",
            d11.degree(),
            d22.degree()
        )));
    }
    let s1 = C::new(1.0, 0.0) / d11.leading();
    let s2 = C::new(1.0, 0.0) / d22.leading();
    let mut bs = BasisSolution {
        n,
        d11: d11.scale(s1),
        d12: d12.scale(s1),
        d21: d21.scale(s2),
        d22: d22.scale(s2),
    };
    for p in [&mut bs.d12, &mut bs.d21] {
        p.trim_relative(1e-13);
    }
    Ok(bs)
}

/// Max normalized residual of the interpolation conditions
/// nu_k D_{i1}(xi_k) + mu_k D_{i2}(xi_k) = 0.
pub fn verify_ip(bs: &BasisSolution, data: &InterpolationData) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..data.mu.len() {
        let x = data.xi[k];
        let xs = x.norm().max(1.0).powi(bs.n as i32);
        for i in 0..2 {
            let r = data.nu[k] * bs.entry(i, 0).eval(x) + data.mu[k] * bs.entry(i, 1).eval(x);
            let scale = (data.nu[k].norm() * bs.entry(i, 0).max_coeff()
                + data.mu[k].norm() * bs.entry(i, 1).max_coeff())
                * xs;
            worst = worst.max(r.norm() / scale.max(1e-300));
        }
    }
    worst
}

/// Transfer matrix-function: numerator polynomials over prod (g_i - lambda)
/// with g = first N nodes of xi.
#[derive(Clone, Debug)]
pub struct TransferFunction {
    pub basis: BasisSolution,
    pub poles: Vec<C>,
    /// Row scalings mapping the normalized basis back to the raw bordered
    /// determinants, so W_A(infinity) = I.
    row_scale: [C; 2],
}

impl TransferFunction {
    pub fn new(data: &InterpolationData) -> Result<Self> {
        let n = data.n();
        let basis = basis_solution(data)?;
        // Raw D11 and D22 before monic normalization carry leading (-1)^N
        // relative to Delta; restore it so the rational function tends to I.
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(TransferFunction {
            basis,
            poles: data.xi[..n].to_vec(),
            row_scale: [C::new(sign, 0.0), C::new(sign, 0.0)],
        })
    }

    /// Evaluates via the polynomial representation.
    pub fn eval(&self, lambda: C) -> Result<[[C; 2]; 2]> {
        let mut denom = C::new(1.0, 0.0);
        for &g in &self.poles {
            let f = g - lambda;
            if f.norm() < 1e-12 * g.norm().max(1.0) {
                return Err(Error::Pole(lambda));
            }
            denom *= f;
        }
        let d = self.basis.eval(lambda);
        Ok([
            [self.row_scale[0] * d[0][0] / denom, self.row_scale[0] * d[0][1] / denom],
            [self.row_scale[1] * d[1][0] / denom, self.row_scale[1] * d[1][1] / denom],
        ])
    }
}

/// Direct resolvent evaluation of W_A(lambda) = I - Pi2^T S^{-1} (A - lambda I)^{-1} Pi1
/// using dense solves; the independent route against the polynomial form.
pub fn eval_transfer_resolvent(data: &InterpolationData, lambda: C) -> Result<[[C; 2]; 2]> {
    let n = data.n();
    let s = build_paired_cauchy(data)?;
    // a_i = mu_i, c_i = -nu_i (i < N), b_j = nu_{N+j}, d_j = mu_{N+j}.
    let pi1 = CMat::from_fn(n, 2, |i, j| if j == 0 { data.mu[i] } else { -data.nu[i] });
    let pi2 = CMat::from_fn(n, 2, |i, j| if j == 0 { data.nu[n + i] } else { data.mu[n + i] });
    let mut w = [[C::new(0.0, 0.0); 2]; 2];
    for col in 0..2 {
        // y = (A - lambda I)^{-1} Pi1[:, col]
        let mut y = vec![C::new(0.0, 0.0); n];
        for i in 0..n {
            let d = data.xi[i] - lambda;
            if d.norm() < 1e-12 * data.xi[i].norm().max(1.0) {
                return Err(Error::Pole(lambda));
            }
            y[i] = pi1[(i, col)] / d;
        }
        let z = solve(&s.entries, &y).ok_or(Error::SingularS { delta: C::new(0.0, 0.0) })?;
        for row in 0..2 {
            let mut acc = C::new(0.0, 0.0);
            for i in 0..n {
                acc += pi2[(i, row)] * z[i];
            }
            w[row][col] = if row == col { C::new(1.0, 0.0) - acc } else { -acc };
        }
    }
    Ok(w)
}

/// W_B(lambda) = I + Pi2^T (B - lambda I)^{-1} S^{-1} Pi1 (the inverse of W_A).
pub fn eval_transfer_inverse(data: &InterpolationData, lambda: C) -> Result<[[C; 2]; 2]> {
    let n = data.n();
    let s = build_paired_cauchy(data)?;
    let pi1 = CMat::from_fn(n, 2, |i, j| if j == 0 { data.mu[i] } else { -data.nu[i] });
    let pi2 = CMat::from_fn(n, 2, |i, j| if j == 0 { data.nu[n + i] } else { data.mu[n + i] });
    let mut w = [[C::new(0.0, 0.0); 2]; 2];
    for col in 0..2 {
        let rhs: Vec<C> = (0..n).map(|i| pi1[(i, col)]).collect();
        let z = solve(&s.entries, &rhs).ok_or(Error::SingularS { delta: C::new(0.0, 0.0) })?;
        for row in 0..2 {
            let mut acc = C::new(0.0, 0.0);
            for i in 0..n {
                let d = data.xi[n + i] - lambda;
                if d.norm() < 1e-12 * data.xi[n + i].norm().max(1.0) {
                    return Err(Error::Pole(lambda));
                }
                acc += pi2[(i, row)] * z[i] / d;
            }
            w[row][col] = if row == col { C::new(1.0, 0.0) + acc } else { acc };
        }
    }
    Ok(w)
}

/// Both ratio routes D12/D11 and D22/D21 at a root of D(lambda). They agree
/// for a valid basis solution; vanishing denominators signal the degenerate
/// cases of the inverse problem.
pub fn consistency_of_ratios(bs: &BasisSolution, root: C) -> Result<(C, C)> {
    let d = bs.eval(root);
    let scale = [
        bs.d11.max_coeff(),
        bs.d12.max_coeff(),
        bs.d21.max_coeff(),
        bs.d22.max_coeff(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
        * root.norm().max(1.0).powi(bs.n as i32);
    let tiny = 1e-8 * scale.max(1e-300);
    if d[0][0].norm() < tiny || d[1][0].norm() < tiny {
        return Err(Error::Domain(
            "zero denominator in ratio; degenerate case 2/3 of the inverse problem".into(),
        ));
    }
    Ok((d[0][1] / d[0][0], d[1][1] / d[1][0]))
}

/// Solves the inverse interpolation problem: recovers (mu, nu, xi) from a
/// basis solution, up to the per-node ratios. Free scalar choices are set
/// to 1 for determinism.
pub fn iip_solve(bs: &BasisSolution) -> Result<InterpolationData> {
    let n = bs.n;
    // Condition a): degree layout.
    if bs.d11.degree() != Some(n) || bs.d22.degree() != Some(n) {
        return Err(Error::Domain("deg D11 and deg D22 must equal N".into()));
    }
    if bs.d12.degree().map_or(false, |d| d >= n) || bs.d21.degree().map_or(false, |d| d >= n) {
        return Err(Error::Domain("deg D12 and deg D21 must be at most N-1".into()));
    }
    // Condition b): no common roots within rows.
    for (a, b) in [(&bs.d11, &bs.d12), (&bs.d21, &bs.d22)] {
        if !a.is_zero() && !b.is_zero() {
            let res = a.resultant(b);
            let scale = a.max_coeff().powi(b.degree().unwrap_or(0) as i32 + 1)
                * b.max_coeff().powi(a.degree().unwrap_or(0) as i32 + 1);
            if res.norm() < 1e-10 * scale.max(1e-300) {
                return Err(Error::CommonRowRoot(C::new(f64::NAN, 0.0)));
            }
        }
    }
    // Condition c): simple roots of D.
    let dpoly = bs.det_poly();
    if dpoly.degree() != Some(2 * n) {
        return Err(Error::Domain(format!(
            "deg D = {:?}, expected 2N = {}",
            dpoly.degree(),
            2 * n
        )));
    }
    let roots = dpoly.roots();
    let max_root = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < tol::SIMPLE_ROOT_SEP * max_root {
                return Err(Error::RepeatedRoot(roots[i]));
            }
        }
    }
    let one = C::new(1.0, 0.0);
    let mut mu = Vec::with_capacity(2 * n);
    let mut nu = Vec::with_capacity(2 * n);
    let coeff_scale = [
        bs.d11.max_coeff(),
        bs.d12.max_coeff(),
        bs.d21.max_coeff(),
        bs.d22.max_coeff(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    for &r in &roots {
        let d = bs.eval(r);
        let tiny = 1e-7 * coeff_scale * r.norm().max(1.0).powi(n as i32);
        let row1_zero = d[0][0].norm() < tiny && d[1][0].norm() < tiny;
        let col2_zero = d[0][1].norm() < tiny && d[1][1].norm() < tiny;
        if row1_zero {
            // Case 2: D_{k1}(root) = 0 for k = 1, 2 => mu = 0 there.
            mu.push(C::new(0.0, 0.0));
            nu.push(one);
        } else if col2_zero {
            // Case 3: D_{k2}(root) = 0 for k = 1, 2 => nu = 0 there.
            mu.push(one);
            nu.push(C::new(0.0, 0.0));
        } else {
            // Case 1: the interpolation condition nu D_{i1} + mu D_{i2} = 0
            // fixes nu/mu = -D_{i2}/D_{i1}; take the better-conditioned row.
            let ratio = if d[0][0].norm() >= d[1][0].norm() {
                -d[0][1] / d[0][0]
            } else {
                -d[1][1] / d[1][0]
            };
            mu.push(one);
            nu.push(ratio);
        }
    }
    InterpolationData::new(mu, nu, roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn random_data(rng: &mut ChaCha8Rng, n: usize) -> InterpolationData {
        loop {
            let mu: Vec<C> = (0..2 * n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            let nu: Vec<C> = (0..2 * n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            let xi: Vec<C> = (0..2 * n).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            if let Ok(d) = InterpolationData::new(mu, nu, xi) {
                let mut min_sep = f64::INFINITY;
                for i in 0..2 * n {
                    for j in i + 1..2 * n {
                        min_sep = min_sep.min((d.xi[i] - d.xi[j]).norm());
                    }
                }
                if min_sep > 0.3 {
                    if let Ok((dets, _, _)) = det_relation(&d) {
                        if dets.norm() > 1e-3 {
                            return d;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn n1_forced_degenerate_structure() {
        // mu = (0, 1): Property 2.4 forces D11(xi_1) = D21(xi_1) = 0, so
        // D11 = lambda - g and D21 (degree <= 0 with a root) vanishes.
        let g = c(0.7, 0.0);
        let h = c(-1.3, 0.0);
        let data = InterpolationData::new(
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.4, 0.0)],
            vec![g, h],
        )
        .unwrap();
        let bs = basis_solution(&data).unwrap();
        assert!((bs.d11.eval(g)).norm() < 1e-12);
        assert!(bs.d21.is_zero(), "D21 = {:?}", bs.d21);
        assert!(verify_ip(&bs, &data) < tol::IP_RESIDUAL);
    }

    #[test]
    fn ip_conditions_and_property_2_3() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for n in 1..=4 {
            for _ in 0..10 {
                let data = random_data(&mut rng, n);
                let bs = basis_solution(&data).unwrap();
                assert!(verify_ip(&bs, &data) < tol::IP_RESIDUAL, "N={n}");
                // Property 2.3: D11 D22 - D12 D21 = prod (lambda - xi_k).
                let lhs = bs.det_poly();
                let rhs = Poly::from_roots(&data.xi);
                let diff = lhs.sub(&rhs);
                assert!(
                    diff.max_coeff() < 1e-9 * rhs.max_coeff().max(1.0),
                    "N={n}: coefficient mismatch {}",
                    diff.max_coeff()
                );
            }
        }
    }

    #[test]
    fn rescaling_invariance_property_2_2() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let data = random_data(&mut rng, 3);
        let bs = basis_solution(&data).unwrap();
        let mut scaled = data.clone();
        for k in 0..6 {
            let s = c(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
            scaled.mu[k] *= s;
            scaled.nu[k] *= s;
        }
        let bs2 = basis_solution(&scaled).unwrap();
        for (p, q) in [
            (&bs.d11, &bs2.d11),
            (&bs.d12, &bs2.d12),
            (&bs.d21, &bs2.d21),
            (&bs.d22, &bs2.d22),
        ] {
            let diff = p.sub(q);
            assert!(diff.max_coeff() < 1e-9 * p.max_coeff().max(1.0));
        }
    }

    #[test]
    fn zero_parameter_properties_2_4_2_5() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut data = random_data(&mut rng, 3);
        data.mu[2] = c(0.0, 0.0);
        data.nu[4] = c(0.0, 0.0);
        if data.nu[2].norm() == 0.0 {
            data.nu[2] = c(1.0, 0.0);
        }
        if data.mu[4].norm() == 0.0 {
            data.mu[4] = c(1.0, 0.0);
        }
        if det_relation(&data).unwrap().0.norm() < 1e-6 {
            return; // pathological draw
        }
        let bs = basis_solution(&data).unwrap();
        let tinies = 1e-9 * bs.d11.max_coeff() * data.xi[2].norm().max(1.0).powi(3);
        assert!(bs.d11.eval(data.xi[2]).norm() < tinies);
        assert!(bs.d21.eval(data.xi[2]).norm() < tinies);
        assert!(bs.d22.eval(data.xi[4]).norm() < tinies);
        assert!(bs.d12.eval(data.xi[4]).norm() < tinies);
    }

    #[test]
    fn row_pairs_have_no_common_roots_property_2_6() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let data = random_data(&mut rng, 3);
        let bs = basis_solution(&data).unwrap();
        for (a, b) in [(&bs.d11, &bs.d12), (&bs.d21, &bs.d22)] {
            let r = a.resultant(b);
            assert!(r.norm() > 1e-10);
        }
    }

    #[test]
    fn perturbed_solution_fails_ip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = random_data(&mut rng, 2);
        let mut bs = basis_solution(&data).unwrap();
        assert!(verify_ip(&bs, &data) < 1e-9);
        let mut coeffs = bs.d12.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(c(0.0, 0.0));
        }
        coeffs[0] += c(1e-3, 0.0);
        bs.d12 = Poly::new(coeffs);
        assert!(verify_ip(&bs, &data) > 1e-4);
    }

    #[test]
    fn transfer_polynomial_matches_resolvent() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 1..=3 {
            let data = random_data(&mut rng, n);
            let tf = TransferFunction::new(&data).unwrap();
            for _ in 0..5 {
                let lambda = c(rng.gen_range(-4.0..4.0), rng.gen_range(0.5..3.0));
                let w1 = tf.eval(lambda).unwrap();
                let w2 = eval_transfer_resolvent(&data, lambda).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let scale = w2[i][j].norm().max(1.0);
                        assert!(
                            (w1[i][j] - w2[i][j]).norm() < 1e-9 * scale,
                            "N={n} ({i},{j}): {} vs {}",
                            w1[i][j],
                            w2[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_inverse_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let data = random_data(&mut rng, 3);
        for _ in 0..10 {
            let lambda = c(rng.gen_range(-4.0..4.0), rng.gen_range(0.5..3.0));
            let wa = eval_transfer_resolvent(&data, lambda).unwrap();
            let wb = eval_transfer_inverse(&data, lambda).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = c(0.0, 0.0);
                    for k in 0..2 {
                        acc += wa[i][k] * wb[k][j];
                    }
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((acc - c(expect, 0.0)).norm() < 1e-8, "{acc}");
                }
            }
        }
    }

    #[test]
    fn transfer_tends_to_identity_at_infinity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let data = random_data(&mut rng, 2);
        let tf = TransferFunction::new(&data).unwrap();
        let w = tf.eval(c(1e8, 1e8)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((w[i][j] - c(expect, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn ratios_agree_at_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let data = random_data(&mut rng, 2);
        let bs = basis_solution(&data).unwrap();
        let roots = bs.det_poly().roots();
        let mut checked = 0;
        for r in roots {
            match consistency_of_ratios(&bs, r) {
                Ok((r1, r2)) => {
                    assert!(
                        (r1 - r2).norm() < tol::RATIO_AGREE * r1.norm().max(1.0),
                        "{r1} vs {r2}"
                    );
                    checked += 1;
                }
                Err(_) => {}
            }
        }
        assert!(checked > 0);
        // A perturbed solution spoils the agreement at the original nodes
        // (at roots of its own determinant the identity is automatic).
        let mut bad = bs.clone();
        let mut coeffs = bad.d12.coeffs.clone();
        coeffs[0] += c(5e-2, 0.0);
        bad.d12 = Poly::new(coeffs);
        let mut max_dev = 0.0f64;
        for &r in &data.xi {
            if let Ok((r1, r2)) = consistency_of_ratios(&bad, r) {
                max_dev = max_dev.max((r1 - r2).norm() / r1.norm().max(1.0));
            }
        }
        assert!(max_dev > 1e-4, "max deviation {max_dev}");
    }

    #[test]
    fn iip_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for n in 1..=3 {
            for _ in 0..10 {
                let data = random_data(&mut rng, n);
                let bs = basis_solution(&data).unwrap();
                let recovered = iip_solve(&bs).unwrap();
                let bs2 = basis_solution(&recovered).unwrap();
                for (p, q) in [
                    (&bs.d11, &bs2.d11),
                    (&bs.d12, &bs2.d12),
                    (&bs.d21, &bs2.d21),
                    (&bs.d22, &bs2.d22),
                ] {
                    let diff = p.sub(q);
                    assert!(
                        diff.max_coeff() < 1e-7 * p.max_coeff().max(1.0),
                        "N={n}, diff={}",
                        diff.max_coeff()
                    );
                }
            }
        }
    }

    #[test]
    fn iip_degenerate_case_assigns_zero_mu() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let mut data = random_data(&mut rng, 2);
        data.mu[1] = c(0.0, 0.0);
        if data.nu[1].norm() == 0.0 {
            data.nu[1] = c(1.0, 0.0);
        }
        if det_relation(&data).unwrap().0.norm() < 1e-6 {
            return;
        }
        let bs = basis_solution(&data).unwrap();
        let rec = iip_solve(&bs).unwrap();
        // One recovered node must carry mu = 0 (and nu = 1).
        let zeros: Vec<_> = rec.mu.iter().filter(|m| m.norm() == 0.0).collect();
        assert_eq!(zeros.len(), 1);
        // And the roundtrip still matches.
        let bs2 = basis_solution(&rec).unwrap();
        let diff = bs.det_poly().sub(&bs2.det_poly());
        assert!(diff.max_coeff() < 1e-7 * bs.det_poly().max_coeff());
    }

    #[test]
    fn iip_rejects_double_root() {
        // Construct D with a double root: D11 = (l-1)^2, D22 = (l-2)^2, D12 = D21 = 0
        // has D = (l-1)^2 (l-2)^2 with double roots.
        let bs = BasisSolution {
            n: 2,
            d11: Poly::from_roots(&[c(1.0, 0.0), c(1.0, 0.0)]),
            d12: Poly::zero(),
            d21: Poly::zero(),
            d22: Poly::from_roots(&[c(2.0, 0.0), c(2.0, 0.0)]),
        };
        match iip_solve(&bs) {
            Err(Error::RepeatedRoot(_)) => {}
            other => panic!("expected repeated-root rejection, got {other:?}"),
        }
    }
}
