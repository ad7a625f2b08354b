//! Inner products on the totally real surface `Υ_Q`, orthonormal harmonic
//! bases, and Fourier components.
//!
//! The measure is the pullback of the round sphere measure through the
//! reduction: Gauss–Legendre in `cos φ` times the uniform trapezoid in `θ`
//! integrates polynomials of total degree `≤ 2n−1` exactly. Because every
//! grid point satisfies `Q(v) = 1` to rounding, multiplication by `Q` is an
//! isometry of these inner products on the nose; no separate
//! synchronization pass is needed.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::Multipole;
use crate::error::{Error, Result};
use crate::harmonic::harmonic_split;
use crate::poly::{slots, HPoly, Monomial, Poly};
use crate::quadform::QuadForm;

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on
/// the recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P'_n via the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_prev = if n == 1 { 1.0 } else { p0 };
            let dpn = n as f64 * (x * pn - pn_prev) / (x * x - 1.0);
            let dx = pn / dpn;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let pn = if n == 1 { x } else { p1 };
        let pn_prev = if n == 1 { 1.0 } else { p0 };
        let dpn = n as f64 * (x * pn - pn_prev) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
    }
    (nodes, weights)
}

/// Quadrature grid on `Υ_Q`: sphere nodes pulled back through the
/// reduction, with weights. Exact for polynomial integrands of total
/// degree `≤ 2·order − 1`.
#[derive(Clone, Debug)]
pub struct SurfaceGrid {
    pub points: Vec<Vector3<Complex64>>,
    pub weights: Vec<f64>,
    /// The sphere angles of each node, for sampled-function input.
    pub angles: Vec<(f64, f64)>,
    pub order: usize,
}

impl SurfaceGrid {
    pub fn new(q: &QuadForm, order: usize) -> Self {
        let (cn, cw) = gauss_legendre(order);
        let m = 2 * order.max(1);
        let a_inv_t = q.reduction_inv().transpose();
        let mut points = Vec::with_capacity(order * m);
        let mut weights = Vec::with_capacity(order * m);
        let mut angles = Vec::with_capacity(order * m);
        for (c, wphi) in cn.iter().zip(&cw) {
            let phi = c.acos();
            let sin_phi = (1.0 - c * c).sqrt();
            for j in 0..m {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let lam = Vector3::new(
                    Complex64::new(theta.cos() * sin_phi, 0.0),
                    Complex64::new(theta.sin() * sin_phi, 0.0),
                    Complex64::new(*c, 0.0),
                );
                // Row convention: the surface point is Λ·A⁻¹.
                points.push(a_inv_t * lam);
                weights.push(wphi * 2.0 * std::f64::consts::PI / m as f64);
                angles.push((theta, phi));
            }
        }
        SurfaceGrid {
            points,
            weights,
            angles,
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values_of_hpoly(&self, p: &HPoly) -> Vec<Complex64> {
        self.points.iter().map(|v| p.eval(v)).collect()
    }

    pub fn values_of_poly(&self, p: &Poly) -> Vec<Complex64> {
        self.points.iter().map(|v| p.eval(v)).collect()
    }

    /// `⟨a, b⟩ = Σ w·a·conj(b)` over the grid.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (x, y))| Complex64::new(*w, 0.0) * x * y.conj())
            .sum()
    }

    pub fn norm(&self, a: &[Complex64]) -> f64 {
        self.inner(a, a).re.max(0.0).sqrt()
    }
}

/// Hermitian surface inner product of two polynomials at the given order
/// (exact when `order ≥ (deg f + deg g)/2 + 1`).
pub fn inner_product(f: &Poly, g: &Poly, q: &QuadForm, order: usize) -> Complex64 {
    let grid = SurfaceGrid::new(q, order);
    let fv = grid.values_of_poly(f);
    let gv = grid.values_of_poly(g);
    grid.inner(&fv, &gv)
}

/// Closed-form sphere integral of the monomial `x^a y^b z^c`: zero for any
/// odd exponent, else `4π·(a−1)!!(b−1)!!(c−1)!!/(a+b+c+1)!!`.
pub fn sphere_monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    fn dfact(n: i64) -> f64 {
        let mut acc = 1.0;
        let mut k = n;
        while k > 1 {
            acc *= k as f64;
            k -= 2;
        }
        acc
    }
    4.0 * std::f64::consts::PI * dfact(a as i64 - 1) * dfact(b as i64 - 1) * dfact(c as i64 - 1)
        / dfact((a + b + c + 1) as i64)
}

/// `2k+1` orthonormal `Q`-harmonics of degree `k` under the surface inner
/// product, with their grid values cached.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub degree: usize,
    pub polys: Vec<HPoly>,
    pub values: Vec<Vec<Complex64>>,
}

/// Project the monomials of `V(k)` to harmonics and orthonormalize under
/// the grid inner product.
pub fn harmonic_basis(k: usize, q: &QuadForm, grid: &SurfaceGrid) -> Result<HarmonicBasis> {
    let expected = 2 * k + 1;
    let mut polys: Vec<HPoly> = Vec::new();
    let mut values: Vec<Vec<Complex64>> = Vec::new();
    for idx in 0..slots(k) {
        let mut e = HPoly::zero(k);
        e.set_coeff(Monomial::from_index(k, idx), Complex64::ONE);
        let (h, _) = harmonic_split(&e, q)?;
        let mut vals = grid.values_of_hpoly(&h);
        let before = grid.norm(&vals);
        if before == 0.0 {
            continue;
        }
        let mut poly = h;
        // Modified Gram–Schmidt with one reorthogonalization pass.
        for _ in 0..2 {
            for (bp, bv) in polys.iter().zip(&values) {
                let c = grid.inner(&vals, bv);
                poly = poly.sub(&bp.scaled(c));
                for (v, b) in vals.iter_mut().zip(bv) {
                    *v -= c * b;
                }
            }
        }
        let after = grid.norm(&vals);
        if after <= 1e-8 * before {
            continue;
        }
        let inv = Complex64::new(1.0 / after, 0.0);
        polys.push(poly.scaled(inv));
        values.push(vals.iter().map(|v| v * inv).collect());
        if polys.len() == expected {
            break;
        }
    }
    if polys.len() != expected {
        return Err(Error::RankDeficiency {
            expected,
            got: polys.len(),
        });
    }
    Ok(HarmonicBasis {
        degree: k,
        polys,
        values,
    })
}

/// One degree of a Fourier analysis.
#[derive(Clone, Debug)]
pub struct FourierComponent {
    pub degree: usize,
    pub component: HPoly,
    /// `Σ |⟨f, b⟩|²` over the degree's basis.
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct FourierReport {
    pub components: Vec<FourierComponent>,
    /// `‖f‖² − Σ_k ‖f_k‖²`; non-negative up to quadrature error.
    pub parseval_residual: f64,
    pub total_energy: f64,
}

/// Fourier components of grid samples: `f_k = Σ_b ⟨f, b⟩·b` over each
/// degree's orthonormal harmonics.
pub fn fourier_components(
    f_values: &[Complex64],
    q: &QuadForm,
    kmax: usize,
    grid: &SurfaceGrid,
) -> Result<FourierReport> {
    assert_eq!(f_values.len(), grid.len(), "samples must sit on the grid");
    let total_energy = grid.inner(f_values, f_values).re;
    let mut components = Vec::new();
    let mut captured = 0.0;
    for k in 0..=kmax {
        let basis = harmonic_basis(k, q, grid)?;
        let mut comp = HPoly::zero(k);
        let mut energy = 0.0;
        for (bp, bv) in basis.polys.iter().zip(&basis.values) {
            let c = grid.inner(f_values, bv);
            energy += c.norm_sqr();
            comp = comp.add(&bp.scaled(c));
        }
        captured += energy;
        components.push(FourierComponent {
            degree: k,
            component: comp,
            energy,
        });
    }
    Ok(FourierReport {
        components,
        parseval_residual: total_energy - captured,
        total_energy,
    })
}

/// Per-degree size report for multipoles against the components they
/// represent: `ρ(w, 0) = ‖Θ(w)‖` on the surface, the component norm, and
/// their ratio (an empirical lower bound for the inverse separation angle;
/// no convergence claim is attached).
#[derive(Clone, Debug)]
pub struct NormBoundRow {
    pub degree: usize,
    pub rho: f64,
    pub component_norm: f64,
    pub ratio: f64,
    /// Surface mismatch `‖Θ(w) − f − Q·(…)‖`-style diagnostic: distance of
    /// the expanded product from the component on the grid after removing
    /// the component itself.
    pub mismatch: f64,
}

pub fn multipole_norm_bound_check(
    pairs: &[(HPoly, Multipole)],
    q: &QuadForm,
    order: usize,
) -> Vec<NormBoundRow> {
    let grid = SurfaceGrid::new(q, order.max(2));
    pairs
        .iter()
        .map(|(f, w)| {
            let fv = grid.values_of_hpoly(f);
            let component_norm = grid.norm(&fv);
            if w.is_zero() {
                return NormBoundRow {
                    degree: f.degree(),
                    rho: 0.0,
                    component_norm,
                    ratio: if component_norm > 0.0 { 0.0 } else { 1.0 },
                    mismatch: component_norm,
                };
            }
            let exp = w.expand();
            let ev = grid.values_of_hpoly(&exp);
            let rho = grid.norm(&ev);
            // On the surface the product and the component agree exactly
            // when w represents f (they differ by Q·R = R there only off
            // the harmonic part); report the raw surface distance of the
            // full evaluations as the mismatch diagnostic.
            let mismatch = {
                let sum: f64 = grid
                    .weights
                    .iter()
                    .zip(ev.iter().zip(&fv))
                    .map(|(wt, (a, b))| wt * (a - b).norm_sqr())
                    .sum();
                sum.sqrt()
            };
            NormBoundRow {
                degree: f.degree(),
                rho,
                component_norm,
                ratio: if component_norm > 0.0 {
                    rho / component_norm
                } else {
                    f64::INFINITY
                },
                mismatch,
            }
        })
        .collect()
}

/// Monte-Carlo Gaussian-weighted inner product on a non-compact real
/// surface `{Q = 1}` (indefinite real `Q`): the area form times
/// `exp(−‖v‖²)`. Returns the estimate and its standard error.
pub fn gaussian_inner_product(
    f: &Poly,
    g: &Poly,
    q: &QuadForm,
    samples: usize,
    seed: u64,
) -> Result<(Complex64, f64)> {
    if !q.is_real() {
        return Err(Error::Invalid(
            "the Gaussian-weighted product needs a real form".into(),
        ));
    }
    let Some((pos, _neg)) = q.signature() else {
        return Err(Error::Invalid("signature unavailable".into()));
    };
    if pos == 0 {
        return Err(Error::Invalid("{Q = 1} is empty".into()));
    }
    if pos == 3 {
        return Err(Error::Invalid(
            "definite form: use the compact-surface quadrature instead".into(),
        ));
    }
    let br = nalgebra::Matrix3::from_fn(|r, c| q.matrix()[(r, c)].re);
    let eig = nalgebra::SymmetricEigen::new(br);
    // Order eigenpairs positive-first.
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mu: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let o = nalgebra::Matrix3::<f64>::from_columns(&[
        eig.eigenvectors.column(idx[0]).into_owned(),
        eig.eigenvectors.column(idx[1]).into_owned(),
        eig.eigenvectors.column(idx[2]).into_owned(),
    ]);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Complex64::ZERO;
    let mut acc_re2 = 0.0_f64;
    let mut acc_im2 = 0.0_f64;
    let gaussian = |rng: &mut ChaCha8Rng| -> f64 {
        // Box–Muller.
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let eval_at = |w: &Vector3<f64>| -> Complex64 {
        let v = o * w;
        let vc = v.map(|t| Complex64::new(t, 0.0));
        let weight = (-v.norm_squared()).exp();
        f.eval(&vc) * g.eval(&vc).conj() * Complex64::new(weight, 0.0)
    };

    for _ in 0..samples {
        let contribution = if pos == 2 {
            // One sheet: radial circle times an axis coordinate.
            let (m1, m2, m3) = (mu[0], mu[1], -mu[2]);
            let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            let s = gaussian(&mut rng);
            let pdf_s = (-0.5 * s * s).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let r = (1.0 + m3 * s * s).sqrt();
            let rp = m3 * s / r;
            let w = Vector3::new(
                r * theta.cos() / m1.sqrt(),
                r * theta.sin() / m2.sqrt(),
                s,
            );
            let dt = Vector3::new(-r * theta.sin() / m1.sqrt(), r * theta.cos() / m2.sqrt(), 0.0);
            let ds = Vector3::new(rp * theta.cos() / m1.sqrt(), rp * theta.sin() / m2.sqrt(), 1.0);
            let jac = dt.cross(&ds).norm();
            let pdf = pdf_s / (2.0 * std::f64::consts::PI);
            eval_at(&w) * Complex64::new(jac / pdf, 0.0)
        } else {
            // Two sheets over the (w2, w3) plane.
            let (m1, m2, m3) = (mu[0], -mu[1], -mu[2]);
            let w2 = gaussian(&mut rng);
            let w3 = gaussian(&mut rng);
            let pdf = (-0.5 * (w2 * w2 + w3 * w3)).exp() / (2.0 * std::f64::consts::PI);
            let h = ((1.0 + m2 * w2 * w2 + m3 * w3 * w3) / m1).sqrt();
            let h2 = m2 * w2 / (m1 * h);
            let h3 = m3 * w3 / (m1 * h);
            let jac = (1.0 + h2 * h2 + h3 * h3).sqrt();
            let plus = eval_at(&Vector3::new(h, w2, w3));
            let minus = eval_at(&Vector3::new(-h, w2, w3));
            (plus + minus) * Complex64::new(jac / pdf, 0.0)
        };
        acc += contribution;
        acc_re2 += contribution.re * contribution.re;
        acc_im2 += contribution.im * contribution.im;
    }
    let n = samples as f64;
    let mean = acc / Complex64::new(n, 0.0);
    let var_re = (acc_re2 / n - mean.re * mean.re).max(0.0);
    let var_im = (acc_im2 / n - mean.im * mean.im).max(0.0);
    let stderr = ((var_re + var_im) / n).sqrt();
    Ok((mean, stderr))
}
