//! Complex polynomials with dense coefficient storage.
//!
//! Coefficients are stored low-to-high: `coeffs[k]` multiplies `lambda^k`.
//! Root finding uses the Aberth-Ehrlich simultaneous iteration followed by a
//! Newton polish step, which is robust for the small degrees (<= 12) that
//! occur here.

use crate::linalg::{det, CMat};
use num_complex::Complex64 as C;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C>,
}

impl Poly {
    pub fn new(coeffs: Vec<C>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![C::new(1.0, 0.0)] }
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    /// Coefficients given highest power first (the serialization order).
    pub fn from_high_to_low(coeffs: &[C]) -> Self {
        let mut v: Vec<C> = coeffs.to_vec();
        v.reverse();
        Poly::new(v)
    }

    pub fn to_high_to_low(&self) -> Vec<C> {
        let mut v = self.coeffs.clone();
        v.reverse();
        v
    }

    pub fn from_roots(roots: &[C]) -> Self {
        let mut p = Poly::one();
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, C::new(1.0, 0.0)]));
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> C {
        *self.coeffs.last().unwrap_or(&C::new(0.0, 0.0))
    }

    fn trim(&mut self) {
        while let Some(c) = self.coeffs.last() {
            if c.norm() == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    /// Drops trailing coefficients that are negligible relative to the largest.
    pub fn trim_relative(&mut self, rel: f64) {
        let scale = self.max_coeff();
        while let Some(c) = self.coeffs.last() {
            if c.norm() <= rel * scale {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((i + 1) as f64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![C::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// p(-lambda).
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { *c } else { -c })
                .collect(),
        )
    }

    /// All complex roots (with multiplicity) via Aberth-Ehrlich + Newton polish.
    pub fn roots(&self) -> Vec<C> {
        let n = match self.degree() {
            None | Some(0) => return vec![],
            Some(n) => n,
        };
        let lead = self.leading();
        let monic: Vec<C> = self.coeffs.iter().map(|c| c / lead).collect();
        // Cauchy bound for the root radius.
        let radius = 1.0
            + monic[..n]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        // Deterministic initial guesses on a slightly irrational spiral.
        let mut z: Vec<C> = (0..n)
            .map(|k| {
                let angle = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
                C::from_polar(radius * 0.8 + 0.1 * k as f64 / n as f64, angle)
            })
            .collect();
        let p = Poly::new(monic.clone());
        let dp = p.derivative();
        for _ in 0..200 {
            let mut max_step = 0.0f64;
            let zs = z.clone();
            for i in 0..n {
                let pi = p.eval(zs[i]);
                let dpi = dp.eval(zs[i]);
                if pi.norm() == 0.0 {
                    continue;
                }
                let newton = if dpi.norm() > 0.0 { pi / dpi } else { C::new(1e-3, 0.0) };
                let mut s = C::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        let d = zs[i] - zs[j];
                        if d.norm() > 1e-300 {
                            s += C::new(1.0, 0.0) / d;
                        }
                    }
                }
                let denom = C::new(1.0, 0.0) - newton * s;
                let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
                z[i] = zs[i] - step;
                max_step = max_step.max(step.norm());
            }
            if max_step < 1e-14 * (1.0 + radius) {
                break;
            }
        }
        // Newton polish.
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let pv = p.eval(*zi);
                let dv = dp.eval(*zi);
                if dv.norm() > 1e-300 {
                    let step = pv / dv;
                    if step.norm() < 1.0 {
                        *zi -= step;
                    }
                }
            }
        }
        z
    }

    /// Resultant of two polynomials via the Sylvester matrix determinant.
    pub fn resultant(&self, other: &Poly) -> C {
        let (m, n) = match (self.degree(), other.degree()) {
            (Some(m), Some(n)) => (m, n),
            _ => return C::new(0.0, 0.0),
        };
        if m == 0 {
            return self.coeffs[0].powu(n as u32);
        }
        if n == 0 {
            return other.coeffs[0].powu(m as u32);
        }
        let size = m + n;
        let mut s = CMat::zeros(size, size);
        let a = self.to_high_to_low();
        let b = other.to_high_to_low();
        for i in 0..n {
            for (j, &c) in a.iter().enumerate() {
                s[(i, i + j)] = c;
            }
        }
        for i in 0..m {
            for (j, &c) in b.iter().enumerate() {
                s[(n + i, i + j)] = c;
            }
        }
        det(&s)
    }
}
