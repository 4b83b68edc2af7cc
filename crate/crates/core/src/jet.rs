//! Formal polynomial algebra used by the inverse problems: repeated
//! differentiation of the Riccati coefficient system, with either numeric
//! state evaluation (forward jets) or linear-in-unknowns bookkeeping (the
//! reconstruction systems), is done symbolically here. The ambiguous matrix
//! recursions of the source procedures are bypassed: the systems are derived
//! from the differential equations directly.

use num_complex::Complex64 as C;
use std::collections::HashMap;

/// Sparse multivariate polynomial over variables indexed 0..nvars.
#[derive(Clone, Debug, Default)]
pub struct MPoly {
    /// exponent vector -> coefficient
    pub terms: HashMap<Vec<u8>, C>,
    pub nvars: usize,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { terms: HashMap::new(), nvars }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = MPoly::zero(nvars);
        if c.norm() != 0.0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0u8; nvars];
        e[idx] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, C::new(1.0, 0.0));
        p
    }

    pub fn add_assign(&mut self, other: &MPoly) {
        for (e, c) in &other.terms {
            let entry = self.terms.entry(e.clone()).or_insert(C::new(0.0, 0.0));
            *entry += c;
            if entry.norm() == 0.0 {
                self.terms.remove(e);
            }
        }
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scale(&self, s: C) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        if s.norm() == 0.0 {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = out.terms.entry(e).or_insert(C::new(0.0, 0.0));
                *entry += ca * cb;
            }
        }
        out.terms.retain(|_, c| c.norm() != 0.0);
        out
    }

    /// Chain-rule derivative: sum over variables of (d self/d v) * rule(v).
    pub fn differentiate(&self, rule: &dyn Fn(usize) -> MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            for v in 0..self.nvars {
                if e[v] == 0 {
                    continue;
                }
                let mut e2 = e.clone();
                e2[v] -= 1;
                let mut partial = MPoly::zero(self.nvars);
                partial.terms.insert(e2, c * e[v] as f64);
                out.add_assign(&partial.mul(&rule(v)));
            }
        }
        out
    }

    pub fn eval(&self, values: &[C]) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut term = *c;
            for (v, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    term *= values[v];
                }
            }
            acc += term;
        }
        acc
    }

    /// Structural equality up to a coefficient tolerance.
    pub fn approx_eq(&self, other: &MPoly, tol: f64) -> bool {
        let mut diff = self.clone();
        diff.add_assign(&other.scale(C::new(-1.0, 0.0)));
        diff.terms.values().all(|c| c.norm() <= tol)
    }
}

/// Variable layout of the Riccati state: b_0..b_{N-1} then a_1..a_N.
pub fn b_var(n: usize, i: usize) -> usize {
    debug_assert!(i < n);
    i
}

pub fn a_var(n: usize, i: usize) -> usize {
    debug_assert!(1 <= i && i <= n);
    n + i - 1
}

/// d/dx rule of the Riccati system with overall coefficient `scale`
/// (2 in the original variable, 1 in the half variable):
/// b_i' = scale (b_0 a_{i+1} - b_{i+1}) (b_N = 0), a_1' = scale b_0^2,
/// a_i' = scale b_0 b_{i-1} for i >= 2.
pub fn riccati_rule(n: usize, scale: f64) -> impl Fn(usize) -> MPoly {
    move |v: usize| -> MPoly {
        let nv = 2 * n;
        let b0 = MPoly::var(nv, b_var(n, 0));
        if v < n {
            // b_v' = scale (b_0 a_{v+1} - b_{v+1})
            let mut p = b0.mul(&MPoly::var(nv, a_var(n, v + 1)));
            if v + 1 < n {
                p.add_assign(&MPoly::var(nv, b_var(n, v + 1)).scale(C::new(-1.0, 0.0)));
            }
            p.scale(C::new(scale, 0.0))
        } else {
            let i = v - n + 1; // a_i
            if i == 1 {
                b0.mul(&b0).scale(C::new(scale, 0.0))
            } else {
                b0.mul(&MPoly::var(nv, b_var(n, i - 1)))
                    .scale(C::new(scale, 0.0))
            }
        }
    }
}

/// Forward jet of b_0 at a point with numeric state values
/// (b_0..b_{N-1}, a_1..a_N): returns b_0, b_0', .., b_0^{(m)} under the
/// chosen convention.
pub fn b0_jet(n: usize, state: &[C], m: usize, scale: f64) -> Vec<C> {
    let rule = riccati_rule(n, scale);
    let mut expr = MPoly::var(2 * n, b_var(n, 0));
    let mut out = Vec::with_capacity(m + 1);
    out.push(expr.eval(state));
    for _ in 0..m {
        expr = expr.differentiate(&rule);
        out.push(expr.eval(state));
    }
    out
}

/// Forward jet of the Miura image q = b_0^2 + sign * b_0' (half-variable
/// convention) expressed through the state and differentiated formally.
pub fn q_jet(n: usize, state: &[C], m: usize, plus: bool) -> Vec<C> {
    let rule = riccati_rule(n, 1.0);
    let nv = 2 * n;
    let b0 = MPoly::var(nv, b_var(n, 0));
    let b0p = b0.differentiate(&rule);
    let mut expr = b0.mul(&b0);
    expr.add_assign(&b0p.scale(C::new(if plus { 1.0 } else { -1.0 }, 0.0)));
    let mut out = Vec::with_capacity(m + 1);
    out.push(expr.eval(state));
    for _ in 0..m {
        expr = expr.differentiate(&rule);
        out.push(expr.eval(state));
    }
    out
}

/// A quantity linear in the reconstruction unknowns (a_1..a_N, b_1..b_{N-1}),
/// with coefficients polynomial in the known jet variables d_0..d_{jet_vars-1}
/// (d_i = the i-th derivative of b_0).
#[derive(Clone, Debug)]
pub struct LinJet {
    pub constant: MPoly,
    /// coefficient of each unknown, in the order a_1..a_N, b_1..b_{N-1}
    pub coeffs: Vec<MPoly>,
    pub n: usize,
    pub jet_vars: usize,
}

impl LinJet {
    fn zero(n: usize, jet_vars: usize) -> Self {
        LinJet {
            constant: MPoly::zero(jet_vars),
            coeffs: vec![MPoly::zero(jet_vars); 2 * n - 1],
            n,
            jet_vars,
        }
    }

    fn unknown_a(n: usize, jet_vars: usize, i: usize) -> usize {
        debug_assert!((1..=n).contains(&i));
        let _ = jet_vars;
        i - 1
    }

    fn unknown_b(n: usize, jet_vars: usize, i: usize) -> usize {
        debug_assert!((1..=n - 1).contains(&i));
        let _ = jet_vars;
        n + i - 1
    }

    /// d/du in the half-variable convention: d(d_i) = d_{i+1};
    /// d(a_1) = d_0^2, d(a_i) = d_0 b_{i-1}, d(b_i) = d_0 a_{i+1} - b_{i+1}
    /// (with b_0 identified with d_0 and b_N = 0), all of which keep the
    /// expression linear in the unknowns.
    fn differentiate(&self) -> LinJet {
        let n = self.n;
        let jv = self.jet_vars;
        let shift_rule = |v: usize| -> MPoly {
            if v + 1 < jv {
                MPoly::var(jv, v + 1)
            } else {
                MPoly::zero(jv)
            }
        };
        let d0 = MPoly::var(jv, 0);
        let mut out = LinJet::zero(n, jv);
        out.constant = self.constant.differentiate(&shift_rule);
        // Unknown derivatives.
        for i in 1..=n {
            let c = &self.coeffs[Self::unknown_a(n, jv, i)];
            if c.terms.is_empty() {
                continue;
            }
            // coefficient' * a_i stays put
            out.coeffs[Self::unknown_a(n, jv, i)]
                .add_assign(&c.differentiate(&shift_rule));
            // + coefficient * a_i'
            if i == 1 {
                out.constant.add_assign(&c.mul(&d0).mul(&d0));
            } else {
                // a_i' = d_0 b_{i-1}
                out.coeffs[Self::unknown_b(n, jv, i - 1)].add_assign(&c.mul(&d0));
            }
        }
        for i in 1..n {
            let c = &self.coeffs[Self::unknown_b(n, jv, i)];
            if c.terms.is_empty() {
                continue;
            }
            out.coeffs[Self::unknown_b(n, jv, i)]
                .add_assign(&c.differentiate(&shift_rule));
            // b_i' = d_0 a_{i+1} - b_{i+1}
            out.coeffs[Self::unknown_a(n, jv, i + 1)].add_assign(&c.mul(&d0));
            if i + 1 < n {
                out.coeffs[Self::unknown_b(n, jv, i + 1)]
                    .add_assign(&c.scale(C::new(-1.0, 0.0)));
            }
        }
        out
    }
}

/// Builds the linear reconstruction system for the derivative problem: rows
/// i = 1..2N-1 assert that the i-th half-variable derivative of b_0,
/// expanded through the Riccati relations, equals the given jet value d_i.
/// Returns (matrix rows as coefficient vectors, right-hand side), both
/// evaluated at the numeric jet.
pub fn derivative_system(n: usize, jet: &[C]) -> (Vec<Vec<C>>, Vec<C>) {
    let unknowns = 2 * n - 1;
    let jv = 2 * n + 1;
    debug_assert!(jet.len() >= 2 * n);
    // E_1 = b_0' = d_0 a_1 - b_1.
    let mut e = LinJet::zero(n, jv);
    e.coeffs[LinJet::unknown_a(n, jv, 1)] = MPoly::var(jv, 0);
    if n > 1 {
        e.coeffs[LinJet::unknown_b(n, jv, 1)] = MPoly::constant(jv, C::new(-1.0, 0.0));
    }
    let mut rows = Vec::with_capacity(unknowns);
    let mut rhs = Vec::with_capacity(unknowns);
    let jetv: Vec<C> = (0..jv)
        .map(|i| jet.get(i).copied().unwrap_or(C::new(0.0, 0.0)))
        .collect();
    for i in 1..=unknowns {
        let row: Vec<C> = e.coeffs.iter().map(|c| c.eval(&jetv)).collect();
        rows.push(row);
        rhs.push(jetv[i] - e.constant.eval(&jetv));
        if i < unknowns {
            e = e.differentiate();
        }
    }
    (rows, rhs)
}

/// The theta sequence of the reflectionless-potential machinery, as formal
/// polynomials in the jet of q: theta_1 = q, theta_2 = -q', theta_3 = q'' - q^2,
/// theta_{i+1} = -theta_i' - sum_{j=1}^{i-1} theta_{i-j} theta_j.
pub fn vartheta_polys(count: usize, jet_vars: usize) -> Vec<MPoly> {
    let shift_rule = |v: usize| -> MPoly {
        if v + 1 < jet_vars {
            MPoly::var(jet_vars, v + 1)
        } else {
            MPoly::zero(jet_vars)
        }
    };
    let mut thetas: Vec<MPoly> = Vec::with_capacity(count);
    thetas.push(MPoly::var(jet_vars, 0)); // theta_1 = q
    if count >= 2 {
        thetas.push(thetas[0].differentiate(&shift_rule).scale(C::new(-1.0, 0.0)));
    }
    for i in 2..count {
        // theta_{i+1} with theta index = position + 1.
        let mut next = thetas[i - 1]
            .differentiate(&shift_rule)
            .scale(C::new(-1.0, 0.0));
        for j in 1..=i - 1 {
            let prod = thetas[i - j - 1].mul(&thetas[j - 1]);
            next.add_assign(&prod.scale(C::new(-1.0, 0.0)));
        }
        thetas.push(next);
    }
    thetas
}

/// Binomial coefficient as f64 (for small jet arithmetic).
pub fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0f64;
    for i in 0..k {
        r = r * ((n - i) as f64) / ((i + 1) as f64);
    }
    r
}

/// Numeric theta values theta_1..theta_count from a numeric q jet.
pub fn vartheta_values(count: usize, q_jet: &[C]) -> Vec<C> {
    let jv = q_jet.len();
    vartheta_polys(count, jv)
        .into_iter()
        .map(|p| p.eval(q_jet))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn b0_jet_matches_hand_derivatives_n1() {
        // N = 1, full convention: b0' = 2 b0 a1, b0'' = 2 b0' a1 + 2 b0 a1'
        // with a1' = 2 b0^2.
        let b0 = c(0.7, 0.0);
        let a1 = c(-1.3, 0.0);
        let jet = b0_jet(1, &[b0, a1], 2, 2.0);
        assert!((jet[0] - b0).norm() < 1e-15);
        assert!((jet[1] - 2.0 * b0 * a1).norm() < 1e-14);
        let b0p = 2.0 * b0 * a1;
        let expect = 2.0 * b0p * a1 + 2.0 * b0 * (2.0 * b0 * b0);
        assert!((jet[2] - expect).norm() < 1e-14);
    }

    #[test]
    fn q_jet_matches_example_structure_n2() {
        // q = b0 (a1 + b0) - b1; q' = q (a1 + b0) - b0 (a2 + b1);
        // q'' = q'(a1+b0) - q(a2+b1) + q^2 (half convention).
        let b0 = c(0.4, 0.1);
        let b1 = c(-0.3, 0.2);
        let a1 = c(0.8, -0.5);
        let a2 = c(-0.6, 0.3);
        let state = [b0, b1, a1, a2];
        let jet = q_jet(2, &state, 3, true);
        let q = b0 * (a1 + b0) - b1;
        assert!((jet[0] - q).norm() < 1e-13);
        let qp = q * (a1 + b0) - b0 * (a2 + b1);
        assert!((jet[1] - qp).norm() < 1e-13, "{} vs {qp}", jet[1]);
        let qpp = qp * (a1 + b0) - q * (a2 + b1) + q * q;
        assert!((jet[2] - qpp).norm() < 1e-12, "{} vs {qpp}", jet[2]);
        let qppp = (qpp - q * q) * (a1 + b0) - qp * (a2 + b1) + 4.0 * q * qp;
        assert!((jet[3] - qppp).norm() < 1e-12, "{} vs {qppp}", jet[3]);
    }

    #[test]
    fn derivative_system_matches_worked_n2_matrix() {
        // The worked N = 2 inversion: C = [[d0, 0, -1], [d1, -d0, 0],
        // [d2, -d1, -d0^2]], Y = [d1, d2 - d0^3, d3 - 4 d1 d0^2]
        // with unknown order (a1, a2, b1).
        let jet = [c(0.9, 0.0), c(-0.4, 0.0), c(0.33, 0.0), c(1.7, 0.0)];
        let (rows, rhs) = derivative_system(2, &jet);
        let d0 = jet[0];
        let d1 = jet[1];
        let d2 = jet[2];
        let d3 = jet[3];
        let expect_rows = [
            [d0, c(0.0, 0.0), c(-1.0, 0.0)],
            [d1, -d0, c(0.0, 0.0)],
            [d2, -d1, -d0 * d0],
        ];
        let expect_rhs = [d1, d2 - d0 * d0 * d0, d3 - 4.0 * d1 * d0 * d0];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (rows[i][j] - expect_rows[i][j]).norm() < 1e-13,
                    "row {i} col {j}: {} vs {}",
                    rows[i][j],
                    expect_rows[i][j]
                );
            }
            assert!((rhs[i] - expect_rhs[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn vartheta_symbolic_identities() {
        // theta_3 = q'' - q^2 must come out of the recursion symbolically.
        let jv = 6;
        let polys = vartheta_polys(4, jv);
        let mut expect3 = MPoly::var(jv, 2);
        let q = MPoly::var(jv, 0);
        expect3.add_assign(&q.mul(&q).scale(c(-1.0, 0.0)));
        assert!(polys[2].approx_eq(&expect3, 1e-14), "theta_3 mismatch: {:?}", polys[2]);
        // theta_4 = -theta_3' - 2 theta_1 theta_2 = -(q''' - 2 q q') + 2 q q'
        //         = -q''' + 4 q q'.
        let mut expect4 = MPoly::var(jv, 3).scale(c(-1.0, 0.0));
        expect4.add_assign(&q.mul(&MPoly::var(jv, 1)).scale(c(4.0, 0.0)));
        assert!(polys[3].approx_eq(&expect4, 1e-14), "theta_4 mismatch");
    }

    #[test]
    fn vartheta_of_zero_potential_vanishes() {
        let jet = vec![c(0.0, 0.0); 8];
        let th = vartheta_values(6, &jet);
        for v in th {
            assert_eq!(v.norm(), 0.0);
        }
    }
}
