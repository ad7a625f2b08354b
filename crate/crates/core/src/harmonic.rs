//! `Q`-harmonic decomposition of `V(d)` and the polynomial Dirichlet solver
//! on `{Q = 1}`.
//!
//! The split `V(d) = Ker(Δ_Q) ⊕ Q·V(d−2)` is computed by solving the
//! invertible graded system `Δ_Q(Q·r) = Δ_Q(p)` rather than by classical
//! sphere-specific formulas; the same code path works for every
//! nondegenerate `Q`. Factorizations are cached per `(Q, degree)`.

use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SURFACE_SAMPLES;
use crate::error::{Error, Result};
use crate::linalg::{cond, lstsq, CMat, CVec};
use crate::poly::{homogenize_on_surface, slots, HPoly, Monomial, Poly};
use crate::quadform::{GradedOp, QuadForm};

fn graded_operator(q: &QuadForm, m: usize) -> Result<Arc<GradedOp>> {
    if let Some(op) = q.graded_cache.lock().unwrap().get(&m) {
        return Ok(op.clone());
    }
    let qh = q.as_hpoly();
    let n = slots(m);
    let mut mat = CMat::zeros(n, n);
    for col in 0..n {
        let mut e = HPoly::zero(m);
        e.set_coeff(Monomial::from_index(m, col), Complex64::ONE);
        let img = q.laplacian(&qh.mul(&e));
        for (mon, c) in img.monomials() {
            mat[(mon.index(), col)] = c;
        }
    }
    let cnd = cond(&mat);
    let op = Arc::new(GradedOp {
        lu: mat.lu(),
        cond: cnd,
    });
    q.graded_cache.lock().unwrap().insert(m, op.clone());
    Ok(op)
}

/// Split `p = h + Q·r` with `Δ_Q h = 0`, solving `Δ_Q(Q·r) = Δ_Q(p)` for
/// `r ∈ V(d−2)`.
pub fn harmonic_split(p: &HPoly, q: &QuadForm) -> Result<(HPoly, HPoly)> {
    let d = p.degree();
    if d < 2 {
        return Ok((p.clone(), HPoly::zero(0)));
    }
    let op = graded_operator(q, d - 2)?;
    if op.cond > 1e12 {
        return Err(Error::SolveFailure { cond: op.cond });
    }
    let rhs_poly = q.laplacian(p);
    let rhs = CVec::from_vec(rhs_poly.coeffs().to_vec());
    let sol = op.lu.solve(&rhs).ok_or(Error::SolveFailure { cond: op.cond })?;
    let r = HPoly::from_coeffs(d - 2, sol.iter().cloned().collect())?;
    let h = p.sub(&q.as_hpoly().mul(&r));
    Ok((h, r))
}

/// The components `f_k` of `p = Σ_k Q^((d−k)/2)·f_k` with `Δ_Q f_k = 0`,
/// listed by descending degree `k = d, d−2, …`.
#[derive(Clone, Debug)]
pub struct HarmonicDecomposition {
    components: Vec<HPoly>,
    top_degree: usize,
}

impl HarmonicDecomposition {
    /// `(degree, component)` pairs, descending degree.
    pub fn components(&self) -> impl Iterator<Item = (usize, &HPoly)> {
        self.components
            .iter()
            .enumerate()
            .map(move |(i, h)| (self.top_degree - 2 * i, h))
    }

    pub fn component_of_degree(&self, k: usize) -> Option<&HPoly> {
        self.components().find(|(d, _)| *d == k).map(|(_, h)| h)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Rebuild `Σ_k Q^((d−k)/2)·f_k`.
    pub fn resum(&self, q: &QuadForm) -> HPoly {
        let qh = q.as_hpoly();
        let mut acc = HPoly::zero(self.top_degree);
        for (i, h) in self.components.iter().enumerate() {
            acc = acc.add(&qh.pow(i).mul(h));
        }
        acc
    }

    /// Largest `‖Δ_Q f_k‖ / ‖f_k‖` over nonzero components.
    pub fn harmonicity_residual(&self, q: &QuadForm) -> f64 {
        self.components
            .iter()
            .filter(|h| h.norm() > 0.0)
            .map(|h| q.laplacian(h).norm() / h.norm())
            .fold(0.0, f64::max)
    }
}

/// Iterate [`harmonic_split`] on successive remainders.
pub fn harmonic_decompose(p: &HPoly, q: &QuadForm) -> Result<HarmonicDecomposition> {
    let top = p.degree();
    let mut components = Vec::new();
    let mut current = p.clone();
    loop {
        let (h, r) = harmonic_split(&current, q)?;
        components.push(h);
        if current.degree() < 2 {
            break;
        }
        current = r;
    }
    Ok(HarmonicDecomposition {
        components,
        top_degree: top,
    })
}

/// How the particular solution of `Δ_Q T = M` is chosen; both must lead to
/// the same Dirichlet solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletStrategy {
    /// Minimum-norm least squares over all of `V(k+2)`.
    MinNorm,
    /// Particular solution constrained to `Q·V(k)`.
    QMultiple,
}

/// Solve `{Δ_Q P = M, P|_S = N|_S}` on `{Q = 1}`.
///
/// `T` with `Δ_Q T = M` is found per graded piece (`Δ_Q` is onto), then the
/// harmonic components of `N − T` supply the boundary correction; their sum
/// restricts to the same surface values.
pub fn dirichlet_solve(m: &Poly, n: &Poly, q: &QuadForm) -> Result<Poly> {
    dirichlet_solve_with(m, n, q, DirichletStrategy::MinNorm)
}

pub fn dirichlet_solve_with(
    m: &Poly,
    n: &Poly,
    q: &QuadForm,
    strategy: DirichletStrategy,
) -> Result<Poly> {
    let mut t = Poly::zero();
    for part in m.parts() {
        let k = part.degree();
        let tk = match strategy {
            DirichletStrategy::MinNorm => {
                let mat = q.laplacian_matrix(k + 2);
                let rhs = CVec::from_vec(part.coeffs().to_vec());
                let sol = lstsq(&mat, &rhs, 1e-13);
                HPoly::from_coeffs(k + 2, sol.iter().cloned().collect())?
            }
            DirichletStrategy::QMultiple => {
                let op = graded_operator(q, k)?;
                if op.cond > 1e12 {
                    return Err(Error::SolveFailure { cond: op.cond });
                }
                let rhs = CVec::from_vec(part.coeffs().to_vec());
                let s = op
                    .lu
                    .solve(&rhs)
                    .ok_or(Error::SolveFailure { cond: op.cond })?;
                let s = HPoly::from_coeffs(k, s.iter().cloned().collect())?;
                q.as_hpoly().mul(&s)
            }
        };
        t.add_hpoly_in_place(&tk);
    }

    // Boundary correction: harmonic R with R|_S = (N − T)|_S.
    let w = n.sub(&t);
    let mut r = Poly::zero();
    let (even, odd) = w.parity_split();
    for part in [even, odd] {
        if part.is_zero() {
            continue;
        }
        let h = homogenize_on_surface(&part, &q.as_hpoly())?;
        let dec = harmonic_decompose(&h, q)?;
        for (_, f) in dec.components() {
            r.add_hpoly_in_place(f);
        }
    }
    Ok(t.add(&r))
}

/// Certification report for a Dirichlet solution.
#[derive(Clone, Debug)]
pub struct DirichletReport {
    /// `‖Δ_Q P − M‖` over `max(1, ‖M‖)`.
    pub laplacian_residual: f64,
    /// Max `|P − N|` over sampled surface points, relative to the scale of
    /// `N` and `P`.
    pub surface_residual: f64,
}

/// Evaluate both Dirichlet defects on `SURFACE_SAMPLES` seeded surface
/// points.
pub fn verify_dirichlet(p: &Poly, m: &Poly, n: &Poly, q: &QuadForm, seed: u64) -> DirichletReport {
    let mut lap = Poly::zero();
    for part in p.parts() {
        lap.add_hpoly_in_place(&q.laplacian(part));
    }
    let laplacian_residual = lap.sub(m).norm() / m.norm().max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = p.norm().max(n.norm()).max(1.0);
    let mut worst = 0.0_f64;
    for _ in 0..SURFACE_SAMPLES {
        let v: Vector3<Complex64> = q.random_surface_point(&mut rng);
        let defect = (p.eval(&v) - n.eval(&v)).norm();
        worst = worst.max(defect / scale);
    }
    DirichletReport {
        laplacian_residual,
        surface_residual: worst,
    }
}
