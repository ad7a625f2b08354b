//! Dense homogeneous and inhomogeneous trivariate polynomials over complex
//! scalars.
//!
//! Coefficients are stored densely in graded-lexicographic order with
//! `x > y > z`: within degree `d` the monomial `x^i y^j z^k` sits at index
//! `t(t+1)/2 + k` where `t = j + k`. Degrees stay small here, so the dense
//! layout keeps multiplication-by-form and differential-operator matrices
//! trivial to assemble.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, CMat, CVec};

/// Number of monomials of exact degree `d`: `(d+1)(d+2)/2`.
pub fn slots(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// A trivariate monomial `x^i y^j z^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Monomial {
    pub fn new(x: u32, y: u32, z: u32) -> Self {
        Monomial { x, y, z }
    }

    pub fn degree(&self) -> usize {
        (self.x + self.y + self.z) as usize
    }

    /// Index within the graded-lex block of its degree.
    pub fn index(&self) -> usize {
        let t = (self.y + self.z) as usize;
        t * (t + 1) / 2 + self.z as usize
    }

    /// Inverse of [`Monomial::index`] for a given degree.
    pub fn from_index(degree: usize, index: usize) -> Self {
        let mut t = 0usize;
        while (t + 1) * (t + 2) / 2 <= index {
            t += 1;
        }
        let k = index - t * (t + 1) / 2;
        Monomial {
            x: (degree - t) as u32,
            y: (t - k) as u32,
            z: k as u32,
        }
    }

    /// All monomials of degree `d` in graded-lex order.
    pub fn of_degree(d: usize) -> impl Iterator<Item = Monomial> {
        (0..slots(d)).map(move |i| Monomial::from_index(d, i))
    }
}

/// Homogeneous trivariate polynomial with dense complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoly {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl HPoly {
    pub fn zero(degree: usize) -> Self {
        HPoly {
            degree,
            coeffs: vec![Complex64::ZERO; slots(degree)],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        HPoly {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// The coordinate variable for `axis` 0, 1, 2 (x, y, z).
    pub fn variable(axis: usize) -> Self {
        let mut p = HPoly::zero(1);
        p.coeffs[axis] = Complex64::ONE;
        p
    }

    /// Linear form `a·x + b·y + c·z` from its coefficient vector.
    pub fn linear_form(v: &Vector3<Complex64>) -> Self {
        let mut p = HPoly::zero(1);
        p.coeffs[0] = v[0];
        p.coeffs[1] = v[1];
        p.coeffs[2] = v[2];
        p
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != slots(degree) {
            return Err(Error::Invalid(format!(
                "degree {} needs {} coefficients, got {}",
                degree,
                slots(degree),
                coeffs.len()
            )));
        }
        Ok(HPoly { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: Monomial) -> Complex64 {
        debug_assert_eq!(m.degree(), self.degree);
        self.coeffs[m.index()]
    }

    pub fn set_coeff(&mut self, m: Monomial, c: Complex64) {
        debug_assert_eq!(m.degree(), self.degree);
        self.coeffs[m.index()] = c;
    }

    pub fn add_to_coeff(&mut self, m: Monomial, c: Complex64) {
        debug_assert_eq!(m.degree(), self.degree);
        self.coeffs[m.index()] += c;
    }

    /// Euclidean norm of the coefficient vector; the norm used by every
    /// residual certificate in the crate.
    pub fn norm(&self) -> f64 {
        // + 0.0 normalizes the empty-sum identity −0.0.
        (self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() + 0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::ZERO)
    }

    /// Largest imaginary part; small values mean the polynomial is real.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn monomials(&self) -> impl Iterator<Item = (Monomial, Complex64)> + '_ {
        let d = self.degree;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::ZERO)
            .map(move |(i, c)| (Monomial::from_index(d, i), *c))
    }

    pub fn add(&self, other: &HPoly) -> HPoly {
        assert_eq!(self.degree, other.degree, "degree mismatch in add");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        HPoly {
            degree: self.degree,
            coeffs,
        }
    }

    pub fn sub(&self, other: &HPoly) -> HPoly {
        assert_eq!(self.degree, other.degree, "degree mismatch in sub");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        HPoly {
            degree: self.degree,
            coeffs,
        }
    }

    pub fn scaled(&self, c: Complex64) -> HPoly {
        HPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact monomial convolution.
    pub fn mul(&self, other: &HPoly) -> HPoly {
        let degree = self.degree + other.degree;
        let mut out = HPoly::zero(degree);
        for (ma, ca) in self.monomials() {
            for (mb, cb) in other.monomials() {
                let m = Monomial::new(ma.x + mb.x, ma.y + mb.y, ma.z + mb.z);
                out.coeffs[m.index()] += ca * cb;
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> HPoly {
        let mut out = HPoly::constant(Complex64::ONE);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Evaluation via precomputed coordinate powers.
    pub fn eval(&self, v: &Vector3<Complex64>) -> Complex64 {
        let d = self.degree;
        let mut px = Vec::with_capacity(d + 1);
        let mut py = Vec::with_capacity(d + 1);
        let mut pz = Vec::with_capacity(d + 1);
        px.push(Complex64::ONE);
        py.push(Complex64::ONE);
        pz.push(Complex64::ONE);
        for i in 1..=d {
            px.push(px[i - 1] * v[0]);
            py.push(py[i - 1] * v[1]);
            pz.push(pz[i - 1] * v[2]);
        }
        let mut acc = Complex64::ZERO;
        for (m, c) in self.monomials() {
            acc += c * px[m.x as usize] * py[m.y as usize] * pz[m.z as usize];
        }
        acc
    }

    /// Partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> HPoly {
        if self.degree == 0 {
            return HPoly::zero(0);
        }
        let mut out = HPoly::zero(self.degree - 1);
        for (m, c) in self.monomials() {
            let e = [m.x, m.y, m.z][axis];
            if e == 0 {
                continue;
            }
            let mut t = [m.x, m.y, m.z];
            t[axis] -= 1;
            out.add_to_coeff(Monomial::new(t[0], t[1], t[2]), c * Complex64::new(e as f64, 0.0));
        }
        out
    }

    /// Directional derivative `u·∇`.
    pub fn directional_derivative(&self, u: &Vector3<Complex64>) -> HPoly {
        let mut out = HPoly::zero(self.degree.saturating_sub(1));
        for axis in 0..3 {
            if u[axis] != Complex64::ZERO {
                out = out.add(&self.partial(axis).scaled(u[axis]));
            }
        }
        out
    }

    /// Substitution `p((x, y, z)·M)` (row-vector convention): variable `x`
    /// maps to the linear form with coefficients in column 0 of `M`, etc.
    pub fn compose_linear(&self, m: &Matrix3<Complex64>) -> HPoly {
        let images: Vec<HPoly> = (0..3)
            .map(|col| {
                HPoly::linear_form(&Vector3::new(m[(0, col)], m[(1, col)], m[(2, col)]))
            })
            .collect();
        let d = self.degree;
        // Power tables for the three image forms.
        let table = |p: &HPoly| -> Vec<HPoly> {
            let mut t = vec![HPoly::constant(Complex64::ONE)];
            for i in 1..=d {
                t.push(t[i - 1].mul(p));
            }
            t
        };
        let tx = table(&images[0]);
        let ty = table(&images[1]);
        let tz = table(&images[2]);
        let mut out = HPoly::zero(d);
        for (mon, c) in self.monomials() {
            let prod = tx[mon.x as usize]
                .mul(&ty[mon.y as usize])
                .mul(&tz[mon.z as usize]);
            out = out.add(&prod.scaled(c));
        }
        out
    }

    pub fn conj(&self) -> HPoly {
        HPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Inhomogeneous polynomial: at most one homogeneous part per degree, kept
/// sorted ascending, zero parts dropped.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    parts: Vec<HPoly>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { parts: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::from_hpoly(HPoly::constant(c))
    }

    pub fn from_hpoly(h: HPoly) -> Self {
        if h.is_zero() {
            Poly::zero()
        } else {
            Poly { parts: vec![h] }
        }
    }

    pub fn from_parts(parts: Vec<HPoly>) -> Self {
        let mut p = Poly::zero();
        for h in parts {
            p.add_hpoly_in_place(&h);
        }
        p
    }

    pub fn parts(&self) -> &[HPoly] {
        &self.parts
    }

    pub fn part(&self, degree: usize) -> Option<&HPoly> {
        self.parts.iter().find(|h| h.degree() == degree)
    }

    pub fn degree(&self) -> Option<usize> {
        self.parts.last().map(|h| h.degree())
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn norm(&self) -> f64 {
        (self.parts.iter().map(|h| h.norm() * h.norm()).sum::<f64>() + 0.0).sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.parts.iter().map(|h| h.max_imag()).fold(0.0, f64::max)
    }

    pub fn add_hpoly_in_place(&mut self, h: &HPoly) {
        if h.is_zero() {
            return;
        }
        match self.parts.binary_search_by_key(&h.degree(), |p| p.degree()) {
            Ok(i) => {
                let s = self.parts[i].add(h);
                if s.is_zero() {
                    self.parts.remove(i);
                } else {
                    self.parts[i] = s;
                }
            }
            Err(i) => self.parts.insert(i, h.clone()),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for h in &other.parts {
            out.add_hpoly_in_place(h);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scaled(-Complex64::ONE))
    }

    pub fn scaled(&self, c: Complex64) -> Poly {
        if c == Complex64::ZERO {
            return Poly::zero();
        }
        Poly {
            parts: self.parts.iter().map(|h| h.scaled(c)).collect(),
        }
    }

    pub fn eval(&self, v: &Vector3<Complex64>) -> Complex64 {
        self.parts.iter().map(|h| h.eval(v)).sum()
    }

    /// Split into parts of even and odd degree; `even + odd = self`.
    pub fn parity_split(&self) -> (Poly, Poly) {
        let mut even = Poly::zero();
        let mut odd = Poly::zero();
        for h in &self.parts {
            if h.degree() % 2 == 0 {
                even.add_hpoly_in_place(h);
            } else {
                odd.add_hpoly_in_place(h);
            }
        }
        (even, odd)
    }
}

/// Homogenize a parity-pure polynomial on `{q = 1}`: each part of degree
/// `k` is multiplied by `q^((m−k)/2)` where `m` is the top degree. The
/// result agrees with the input on the surface.
pub fn homogenize_on_surface(p: &Poly, q: &HPoly) -> Result<HPoly> {
    assert_eq!(q.degree(), 2, "homogenization needs a quadratic form");
    let Some(top) = p.degree() else {
        return Ok(HPoly::zero(0));
    };
    if p.parts().iter().any(|h| (top - h.degree()) % 2 != 0) {
        return Err(Error::MixedParity);
    }
    let mut out = HPoly::zero(top);
    for h in p.parts() {
        let k = (top - h.degree()) / 2;
        out = out.add(&q.pow(k).mul(h));
    }
    Ok(out)
}

/// Matrix of multiplication by `q` from `V(d − deg q)` to `V(d)`.
pub fn mul_by_form_matrix(q: &HPoly, target_degree: usize) -> CMat {
    let dq = q.degree();
    assert!(target_degree >= dq);
    let dr = target_degree - dq;
    let mut m = CMat::zeros(slots(target_degree), slots(dr));
    for (mq, cq) in q.monomials() {
        for col in 0..slots(dr) {
            let mr = Monomial::from_index(dr, col);
            let row = Monomial::new(mq.x + mr.x, mq.y + mr.y, mq.z + mr.z).index();
            m[(row, col)] += cq;
        }
    }
    m
}

/// Divide `p` by the form `q` in least squares, certifying the residual:
/// returns `r` with `‖q·r − p‖ ≤ tol · max(1, ‖p‖)`.
///
/// Division by a non-monomial form has no stable term-order algorithm at
/// floating precision, so the quotient is recovered from the
/// multiplication-by-`q` matrix instead.
pub fn divide_by_form(p: &HPoly, q: &HPoly, tol: f64) -> Result<HPoly> {
    if q.is_zero() {
        return Err(Error::Invalid("division by the zero form".into()));
    }
    if p.degree() < q.degree() {
        return Err(Error::Invalid(format!(
            "cannot divide degree {} by degree {}",
            p.degree(),
            q.degree()
        )));
    }
    let m = mul_by_form_matrix(q, p.degree());
    let rhs = CVec::from_vec(p.coeffs().to_vec());
    let sol = lstsq(&m, &rhs, 1e-13);
    let dr = p.degree() - q.degree();
    let r = HPoly::from_coeffs(dr, sol.iter().cloned().collect())?;
    let residual = q.mul(&r).sub(p).norm();
    if residual <= tol * p.norm().max(1.0) {
        Ok(r)
    } else {
        Err(Error::NotDivisible { residual })
    }
}
