//! Quadratic-form bookkeeping: validation, reduction to a sum of squares,
//! the second-order operator `Δ_Q`, and a rational parametrization of the
//! conic `{Q = 0}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;

use crate::config::DEGENERACY_TOL;
use crate::conic::{BinaryForm, ConicParam};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::poly::{HPoly, Monomial};

fn frobenius(m: &Matrix3<Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Flip a column by ±1 so its largest-modulus entry has positive real part
/// (positive imaginary part on a tie). Column sign flips preserve `A·Aᵀ`.
fn canonical_column_sign(col: &Vector3<Complex64>) -> Complex64 {
    let mut best = 0usize;
    for i in 1..3 {
        if col[i].norm() > col[best].norm() {
            best = i;
        }
    }
    let w = col[best];
    let flip = w.re < -1e-13 * w.norm() || (w.re.abs() <= 1e-13 * w.norm() && w.im < 0.0);
    if flip {
        -Complex64::ONE
    } else {
        Complex64::ONE
    }
}

/// Takagi-style factorization of a complex symmetric matrix via its SVD:
/// `B = U Σ Uᵀ` with `U = W·diag((S̄)^{1/2})`, `S = Wᵀ V` diagonal unitary.
/// Returns `A = U·Σ^{1/2}`, or `None` when repeated singular values leave
/// `S` non-diagonal.
fn takagi_factor(b: &Matrix3<Complex64>) -> Option<Matrix3<Complex64>> {
    let svd = b.svd(true, true);
    let w = svd.u?;
    let vt = svd.v_t?;
    let v = vt.adjoint();
    let sv = svd.singular_values;
    // Sort columns by descending singular value for a deterministic result.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &c| sv[c].partial_cmp(&sv[a]).unwrap());
    let s = w.transpose() * v;
    // Off-diagonal mass signals repeated singular values; bail to the
    // congruence fallback in that case.
    let mut off = 0.0_f64;
    for r in 0..3 {
        for c in 0..3 {
            if r != c {
                off = off.max(s[(r, c)].norm());
            }
        }
    }
    if off > 1e-8 {
        return None;
    }
    let mut a = Matrix3::zeros();
    for (new_col, &old) in order.iter().enumerate() {
        let phase = s[(old, old)].conj().sqrt();
        let scale = phase * Complex64::new(sv[old].sqrt(), 0.0);
        let col: Vector3<Complex64> = w.column(old) * scale;
        let sgn = canonical_column_sign(&col);
        for r in 0..3 {
            a[(r, new_col)] = col[r] * sgn;
        }
    }
    Some(a)
}

/// Symmetric-congruence fallback: pivoted `LDLᵀ`-style reduction
/// `Tᵀ B T = D`, then `A = T⁻ᵀ·D^{1/2}` with columns ordered by norm.
fn congruence_factor(b: &Matrix3<Complex64>) -> Option<Matrix3<Complex64>> {
    let scale = frobenius(b);
    let mut m = *b;
    let mut t = Matrix3::<Complex64>::identity();
    for s in 0..3 {
        // Choose the largest remaining diagonal pivot.
        let mut piv = s;
        for r in s..3 {
            if m[(r, r)].norm() > m[(piv, piv)].norm() {
                piv = r;
            }
        }
        if m[(piv, piv)].norm() < 1e-14 * scale {
            // All remaining diagonals vanish; make one with a congruence
            // v_r ← v_r + v_c at the largest off-diagonal entry.
            let (mut br, mut bc, mut best) = (s, s, 0.0);
            for r in s..3 {
                for c in (r + 1)..3 {
                    if m[(r, c)].norm() > best {
                        best = m[(r, c)].norm();
                        br = r;
                        bc = c;
                    }
                }
            }
            if best < 1e-14 * scale {
                return None; // numerically singular block
            }
            let mut g = Matrix3::<Complex64>::identity();
            g[(bc, br)] = Complex64::ONE; // column op: col_br += col_bc
            m = g.transpose() * m * g;
            t *= g;
            piv = br;
        }
        if piv != s {
            let mut g = Matrix3::<Complex64>::identity();
            g[(piv, piv)] = Complex64::ZERO;
            g[(s, s)] = Complex64::ZERO;
            g[(piv, s)] = Complex64::ONE;
            g[(s, piv)] = Complex64::ONE;
            m = g.transpose() * m * g;
            t *= g;
        }
        let d = m[(s, s)];
        let mut g = Matrix3::<Complex64>::identity();
        for r in (s + 1)..3 {
            g[(s, r)] = -m[(s, r)] / d;
        }
        m = g.transpose() * m * g;
        t *= g;
    }
    let tinv = t.try_inverse()?;
    let mut a = tinv.transpose();
    for c in 0..3 {
        let root = m[(c, c)].sqrt();
        for r in 0..3 {
            a[(r, c)] *= root;
        }
    }
    // Order columns by descending norm, then canonicalize signs.
    let mut cols: Vec<Vector3<Complex64>> = (0..3).map(|c| a.column(c).into_owned()).collect();
    cols.sort_by(|u, v| v.norm().partial_cmp(&u.norm()).unwrap());
    let mut out = Matrix3::zeros();
    for (c, col) in cols.iter().enumerate() {
        let sgn = canonical_column_sign(col);
        for r in 0..3 {
            out[(r, c)] = col[r] * sgn;
        }
    }
    Some(out)
}

/// Invertible `A` with `A·Aᵀ = B`, chosen deterministically. Complex square
/// roots take the principal branch (argument in `(−π, π]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub a: Matrix3<Complex64>,
}

/// Cached square operator on `V(m)` used by the harmonic split.
pub(crate) struct GradedOp {
    pub lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    pub cond: f64,
}

/// A validated nondegenerate quadratic form `Q(v) = ⟨vB, v⟩` with its
/// derived data: `B⁻¹`, a reduction `A·Aᵀ = B`, and the conic
/// parametrization. A per-degree factorization cache for the graded solves
/// lives behind a mutex; results are as if uncached.
#[derive(Clone)]
pub struct QuadForm {
    b: Matrix3<Complex64>,
    b_inv: Matrix3<Complex64>,
    a: Matrix3<Complex64>,
    a_inv: Matrix3<Complex64>,
    alpha: ConicParam,
    real: bool,
    /// `(positive, negative)` inertia for real forms.
    signature: Option<(usize, usize)>,
    pub(crate) graded_cache: Arc<Mutex<HashMap<usize, Arc<GradedOp>>>>,
}

impl std::fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadForm")
            .field("b", &self.b)
            .field("real", &self.real)
            .finish()
    }
}

impl PartialEq for QuadForm {
    fn eq(&self, other: &Self) -> bool {
        self.b == other.b
    }
}

impl QuadForm {
    /// Validate a coefficient matrix: must be symmetric and nondegenerate
    /// (`|det B| > 1e−12·‖B‖³`, which over ℂ is irreducibility of the conic).
    pub fn from_matrix(m: Matrix3<Complex64>) -> Result<Self> {
        let scale = frobenius(&m);
        if scale == 0.0 {
            return Err(Error::Degenerate { det: 0.0 });
        }
        let asym = frobenius(&(m - m.transpose()));
        if asym > 1e-10 * scale {
            return Err(Error::Invalid("coefficient matrix is not symmetric".into()));
        }
        let b = (m + m.transpose()) * Complex64::new(0.5, 0.0);
        let det = b.determinant();
        if det.norm() <= DEGENERACY_TOL * scale.powi(3) {
            return Err(Error::Degenerate { det: det.norm() });
        }
        let b_inv = b.try_inverse().ok_or(Error::Degenerate { det: det.norm() })?;
        let real = b.iter().all(|c| c.im == 0.0);

        let a = takagi_factor(&b)
            .or_else(|| congruence_factor(&b))
            .ok_or(Error::Degenerate { det: det.norm() })?;
        let resid = frobenius(&(a * a.transpose() - b));
        if resid > 1e-10 * scale {
            return Err(Error::SolveFailure { cond: resid / scale });
        }
        let a_inv = a.try_inverse().ok_or(Error::Degenerate { det: det.norm() })?;

        let signature = if real {
            let br = Matrix3::from_fn(|r, c| b[(r, c)].re);
            let eig = nalgebra::SymmetricEigen::new(br);
            let pos = eig.eigenvalues.iter().filter(|&&e| e > 0.0).count();
            Some((pos, 3 - pos))
        } else {
            None
        };

        let alpha = ConicParam::from_reduction_inverse(&a_inv);

        Ok(QuadForm {
            b,
            b_inv,
            a,
            a_inv,
            alpha,
            real,
            signature,
            graded_cache: Arc::new(Mutex::new(HashMap::new())),
        })
    }

    /// Validate a degree-2 polynomial as a quadratic form.
    pub fn from_hpoly(p: &HPoly) -> Result<Self> {
        if p.degree() != 2 {
            return Err(Error::Invalid(format!(
                "quadratic form must have degree 2, got {}",
                p.degree()
            )));
        }
        let half = Complex64::new(0.5, 0.0);
        let g = |x, y, z| p.coeff(Monomial::new(x, y, z));
        let b = Matrix3::new(
            g(2, 0, 0),
            g(1, 1, 0) * half,
            g(1, 0, 1) * half,
            g(1, 1, 0) * half,
            g(0, 2, 0),
            g(0, 1, 1) * half,
            g(1, 0, 1) * half,
            g(0, 1, 1) * half,
            g(0, 0, 2),
        );
        QuadForm::from_matrix(b)
    }

    pub fn sphere() -> Self {
        QuadForm::from_matrix(Matrix3::identity()).unwrap()
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.b
    }

    pub fn inverse_matrix(&self) -> &Matrix3<Complex64> {
        &self.b_inv
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Inertia `(positive, negative)` for real forms.
    pub fn signature(&self) -> Option<(usize, usize)> {
        self.signature
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature == Some((3, 0))
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature == Some((0, 3))
    }

    pub fn reduction(&self) -> Reduction {
        Reduction { a: self.a }
    }

    pub fn reduction_inv(&self) -> &Matrix3<Complex64> {
        &self.a_inv
    }

    pub fn conic_param(&self) -> &ConicParam {
        &self.alpha
    }

    pub fn eval(&self, v: &Vector3<Complex64>) -> Complex64 {
        (v.transpose() * self.b * v)[(0, 0)]
    }

    pub fn as_hpoly(&self) -> HPoly {
        let mut p = HPoly::zero(2);
        p.set_coeff(Monomial::new(2, 0, 0), self.b[(0, 0)]);
        p.set_coeff(Monomial::new(0, 2, 0), self.b[(1, 1)]);
        p.set_coeff(Monomial::new(0, 0, 2), self.b[(2, 2)]);
        p.set_coeff(Monomial::new(1, 1, 0), self.b[(0, 1)] * Complex64::new(2.0, 0.0));
        p.set_coeff(Monomial::new(1, 0, 1), self.b[(0, 2)] * Complex64::new(2.0, 0.0));
        p.set_coeff(Monomial::new(0, 1, 1), self.b[(1, 2)] * Complex64::new(2.0, 0.0));
        p
    }

    /// `Δ_Q p = Σ b^{jk} ∂_j ∂_k p`, of degree `deg p − 2` (zero polynomial
    /// of degree 0 when `deg p < 2`).
    pub fn laplacian(&self, p: &HPoly) -> HPoly {
        if p.degree() < 2 {
            return HPoly::zero(0);
        }
        let mut out = HPoly::zero(p.degree() - 2);
        for j in 0..3 {
            for k in 0..3 {
                let c = self.b_inv[(j, k)];
                if c == Complex64::ZERO {
                    continue;
                }
                out = out.add(&p.partial(j).partial(k).scaled(c));
            }
        }
        out
    }

    /// Matrix of `Δ_Q: V(d) → V(d−2)` in the monomial bases.
    pub fn laplacian_matrix(&self, d: usize) -> CMat {
        assert!(d >= 2);
        let rows = crate::poly::slots(d - 2);
        let cols = crate::poly::slots(d);
        let mut m = CMat::zeros(rows, cols);
        for col in 0..cols {
            let mut e = HPoly::zero(d);
            e.set_coeff(Monomial::from_index(d, col), Complex64::ONE);
            let img = self.laplacian(&e);
            for (mon, c) in img.monomials() {
                m[(mon.index(), col)] = c;
            }
        }
        m
    }

    /// A random point of the complex surface `{Q = 1}`: a random direction
    /// rescaled by the principal branch of `Q(v)^{−1/2}`.
    pub fn random_surface_point<R: Rng>(&self, rng: &mut R) -> Vector3<Complex64> {
        loop {
            let v = Vector3::new(
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            );
            let qv = self.eval(&v);
            if qv.norm() > 1e-6 * v.norm_squared() {
                let t = (Complex64::ONE / qv).sqrt();
                return v * t;
            }
        }
    }

    /// A random point of the real surface `{Q = 1} ⊂ ℝ³`, when nonempty.
    pub fn random_real_surface_point<R: Rng>(&self, rng: &mut R) -> Option<Vector3<f64>> {
        if !self.real || self.is_negative_definite() {
            return None;
        }
        for _ in 0..200 {
            let v = Vector3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            );
            let vc = v.map(|t| Complex64::new(t, 0.0));
            let qv = self.eval(&vc).re;
            if qv > 1e-6 * v.norm_squared() {
                return Some(v / qv.sqrt());
            }
        }
        None
    }

    /// Upper-triangle entries `[b00, b01, b02, b11, b12, b22]`.
    pub fn upper_triangle(&self) -> [Complex64; 6] {
        [
            self.b[(0, 0)],
            self.b[(0, 1)],
            self.b[(0, 2)],
            self.b[(1, 1)],
            self.b[(1, 2)],
            self.b[(2, 2)],
        ]
    }

    pub fn from_upper_triangle(e: &[Complex64; 6]) -> Result<Self> {
        QuadForm::from_matrix(Matrix3::new(
            e[0], e[1], e[2], e[1], e[3], e[4], e[2], e[4], e[5],
        ))
    }
}

/// The sphere parametrization `α = (i(u0²−u1²), 2i·u0u1, u0²+u1²)` as three
/// degree-2 binary forms.
pub fn sphere_alpha() -> [BinaryForm; 3] {
    let i = Complex64::I;
    [
        BinaryForm::from_coeffs(vec![i, Complex64::ZERO, -i]),
        BinaryForm::from_coeffs(vec![
            Complex64::ZERO,
            Complex64::new(0.0, 2.0),
            Complex64::ZERO,
        ]),
        BinaryForm::from_coeffs(vec![Complex64::ONE, Complex64::ZERO, Complex64::ONE]),
    ]
}
