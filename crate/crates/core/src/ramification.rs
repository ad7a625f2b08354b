//! Ramification and moduli diagnostics: discriminant membership of factored
//! polynomials, tangent-cone nullity, projection of divisors through a
//! pencil of lines with fiber counting, and the dimension-defect calculator
//! for factorization spaces over higher-degree forms.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Tolerances, FIBER_MULT_LIMIT};
use crate::conic::{proj_roots, BinaryForm, ConicDivisor, ProjPoint};
use crate::error::{Error, Result};
use crate::linalg::{rank_with_gap, CMat};
use crate::quadform::QuadForm;

/// Restrict a linear form to the conic: the binary quadratic
/// `Σ_i ℓ_i·α_i(u)`.
pub fn restrict_line(l: &Vector3<Complex64>, q: &QuadForm) -> BinaryForm {
    let alpha = q.conic_param().forms();
    let mut acc = BinaryForm::from_coeffs(vec![Complex64::ZERO; 3]);
    for i in 0..3 {
        if l[i] != Complex64::ZERO {
            acc = acc.add(&alpha[i].scaled(l[i]));
        }
    }
    acc
}

/// Divisor cut on the conic by a product of linear forms.
pub fn divisor_of_lines(
    forms: &[Vector3<Complex64>],
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<ConicDivisor> {
    if forms.is_empty() {
        return Err(Error::Invalid("need at least one linear form".into()));
    }
    let mut prod = BinaryForm::constant(Complex64::ONE);
    for l in forms {
        if l.norm() == 0.0 {
            return Err(Error::DivisibleInput);
        }
        prod = prod.mul(&restrict_line(l, q));
    }
    proj_roots(&prod, tols.cluster_tol, tols.max_root_iters)
}

/// Does the divisor of `Π L_j` on the conic carry a point of multiplicity
/// at least two? Returns the witness point if so.
pub fn is_ramified(
    forms: &[Vector3<Complex64>],
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<(bool, Option<ProjPoint>)> {
    let divisor = divisor_of_lines(forms, q, tols)?;
    let witness = divisor
        .points()
        .iter()
        .find(|(_, m)| *m >= 2)
        .map(|(p, _)| *p);
    Ok((witness.is_some(), witness))
}

/// Dimension of the space of non-obvious first-order deformations of the
/// factored polynomial `Π L_j` that stay on `{Q = 0}`: sample the conic,
/// assemble the linear system `Σ_j M_j(α(t))·Π_{i≠j} L_i(α(t)) = 0` over
/// the 3d unknown coefficients of the `M_j`, and subtract the d−1 obvious
/// solutions `{M_j = α_j·L_j, Σα_j = 0}`.
pub fn tangent_nullity(
    forms: &[Vector3<Complex64>],
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<usize> {
    let d = forms.len();
    if d == 0 {
        return Err(Error::Invalid("need at least one linear form".into()));
    }
    let alpha = q.conic_param();
    let samples = 2 * d + 5;
    for attempt in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0_FFEE ^ attempt);
        let mut mat = CMat::zeros(samples, 3 * d);
        for row in 0..samples {
            let t = ProjPoint::new(
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            );
            let x = alpha.unit_image(&t);
            let values: Vec<Complex64> = forms
                .iter()
                .map(|l| l[0] * x[0] + l[1] * x[1] + l[2] * x[2])
                .collect();
            for j in 0..d {
                let mut others = Complex64::ONE;
                for (i, v) in values.iter().enumerate() {
                    if i != j {
                        others *= v;
                    }
                }
                for c in 0..3 {
                    mat[(row, 3 * j + c)] = x[c] * others;
                }
            }
            // Row scaling keeps products of many line values from skewing
            // the singular spectrum.
            let rn = mat.row(row).norm();
            if rn > 0.0 {
                for c in 0..3 * d {
                    mat[(row, c)] /= Complex64::new(rn, 0.0);
                }
            }
        }
        match rank_with_gap(&mat, tols.rank_tol, 10.0) {
            Ok(r) => {
                let nullity = 3 * d - r;
                return Ok(nullity - (d - 1));
            }
            Err(Error::RankIndeterminate) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RankIndeterminate)
}

/// The base point of a pencil of lines, off the conic, with a fixed
/// orthonormal basis of the lines through it (the dual coordinates chart).
#[derive(Clone, Debug)]
pub struct PencilCenter {
    pub point: Vector3<Complex64>,
    basis: [Vector3<Complex64>; 2],
}

impl PencilCenter {
    pub fn new(p: &Vector3<Complex64>, q: &QuadForm) -> Result<Self> {
        let n = p.norm();
        if n == 0.0 {
            return Err(Error::Invalid("pencil center must be nonzero".into()));
        }
        let point = p / Complex64::new(n, 0.0);
        let qp = q.eval(&point).norm();
        let scale = q.matrix().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if qp <= 1e-8 * scale {
            return Err(Error::Invalid(
                "pencil center lies on the conic {Q = 0}".into(),
            ));
        }
        // Lines ℓ through the center satisfy ⟨ℓ, p⟩ = 0 (bilinear); a basis
        // comes from the largest coordinate of p.
        let mut best = 0usize;
        for i in 1..3 {
            if point[i].norm() > point[best].norm() {
                best = i;
            }
        }
        let (a, b) = ((best + 1) % 3, (best + 2) % 3);
        let mut v1: Vector3<Complex64> = Vector3::zeros();
        v1[a] = point[best];
        v1[best] = -point[a];
        let mut v2: Vector3<Complex64> = Vector3::zeros();
        v2[b] = point[best];
        v2[best] = -point[b];
        // Hermitian Gram–Schmidt inside the pencil plane.
        let v1 = v1 / Complex64::new(v1.norm(), 0.0);
        let proj: Complex64 = v2.dotc(&v1);
        let v2 = v2 - v1 * proj.conj();
        let v2 = v2 / Complex64::new(v2.norm(), 0.0);
        Ok(PencilCenter {
            point,
            basis: [v1, v2],
        })
    }

    /// Chart coordinates of a line through the center.
    pub fn coords(&self, line: &Vector3<Complex64>) -> ProjPoint {
        let c0: Complex64 = line.dotc(&self.basis[0]).conj();
        let c1: Complex64 = line.dotc(&self.basis[1]).conj();
        ProjPoint::new(c0, c1)
    }

    /// Line with the given chart coordinates.
    pub fn line(&self, p: &ProjPoint) -> Vector3<Complex64> {
        self.basis[0] * p.u0 + self.basis[1] * p.u1
    }
}

/// Chart coordinates of the two pencil lines tangent to the conic: the
/// roots of the chart discriminant. The restriction of `c0·b0 + c1·b1` to
/// the conic is a binary quadratic in `u`; its `u`-discriminant is a
/// quadratic form in `(c0, c1)` whose roots mark the tangencies.
pub fn pencil_tangents(
    center: &PencilCenter,
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<Vec<ProjPoint>> {
    let r0 = restrict_line(&center.basis[0], q);
    let r1 = restrict_line(&center.basis[1], q);
    let (a0, a1, a2) = (r0.coeffs()[0], r0.coeffs()[1], r0.coeffs()[2]);
    let (b0, b1, b2) = (r1.coeffs()[0], r1.coeffs()[1], r1.coeffs()[2]);
    let four = Complex64::new(4.0, 0.0);
    let disc = BinaryForm::from_coeffs(vec![
        a1 * a1 - four * a0 * a2,
        Complex64::new(2.0, 0.0) * a1 * b1 - four * (a0 * b2 + b0 * a2),
        b1 * b1 - four * b0 * b2,
    ]);
    let div = proj_roots(&disc, tols.cluster_tol, tols.max_root_iters)?;
    Ok(div.points().iter().map(|(p, _)| *p).collect())
}

/// Multiset of pencil lines (chart coordinates) with multiplicities.
#[derive(Clone, Debug)]
pub struct PencilDivisor {
    pub lines: Vec<(ProjPoint, usize)>,
}

impl PencilDivisor {
    pub fn total_multiplicity(&self) -> usize {
        self.lines.iter().map(|(_, m)| m).sum()
    }
}

/// Project each divisor point through the pencil: the line joining it to
/// the center, with multiplicities adding when two points land on the same
/// line (an involution pair).
pub fn gamma_project(
    div: &ConicDivisor,
    center: &PencilCenter,
    q: &QuadForm,
    tols: &Tolerances,
) -> PencilDivisor {
    let alpha = q.conic_param();
    let mut lines: Vec<(ProjPoint, usize)> = Vec::new();
    for (p, m) in div.points() {
        let x = alpha.unit_image(p);
        let l = x.cross(&center.point);
        let coords = center.coords(&l);
        match lines
            .iter_mut()
            .find(|(seen, _)| seen.chordal(&coords) <= tols.cluster_tol)
        {
            Some((_, mult)) => *mult += m,
            None => lines.push((coords, *m)),
        }
    }
    lines.sort_by(|a, b| {
        a.0.sort_key()
            .partial_cmp(&b.0.sort_key())
            .unwrap()
    });
    PencilDivisor { lines }
}

/// The two conic points on a pencil line (or one, at a tangency).
fn line_conic_points(
    line: &Vector3<Complex64>,
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<Vec<(ProjPoint, usize)>> {
    let restricted = restrict_line(line, q);
    let div = proj_roots(&restricted, tols.cluster_tol, tols.max_root_iters)?;
    Ok(div.points().to_vec())
}

/// Enumerate the fiber of the pencil projection over a target divisor:
/// every way of distributing each line's multiplicity over its two conic
/// points (one at a tangency). The generic count is `2^d`.
pub fn gamma_fiber(
    target: &PencilDivisor,
    center: &PencilCenter,
    q: &QuadForm,
    tols: &Tolerances,
) -> Result<Vec<ConicDivisor>> {
    let total = target.total_multiplicity();
    if total > FIBER_MULT_LIMIT {
        return Err(Error::ExplosionGuard {
            size: total as u128,
            limit: FIBER_MULT_LIMIT as u128,
        });
    }
    // Options per line: list of point-weight assignments.
    let mut per_line: Vec<Vec<Vec<(ProjPoint, usize)>>> = Vec::new();
    for (coords, m) in &target.lines {
        let line = center.line(coords);
        let pts = line_conic_points(&line, q, tols)?;
        let mut options = Vec::new();
        match pts.len() {
            1 => {
                // Tangent line: all multiplicity sits at the tangency.
                options.push(vec![(pts[0].0, *m)]);
            }
            2 => {
                for t in 0..=*m {
                    let mut opt = Vec::new();
                    if *m - t > 0 {
                        opt.push((pts[0].0, *m - t));
                    }
                    if t > 0 {
                        opt.push((pts[1].0, t));
                    }
                    options.push(opt);
                }
            }
            n => {
                return Err(Error::Invalid(format!(
                    "a pencil line met the conic in {n} clusters"
                )))
            }
        }
        per_line.push(options);
    }

    // Cartesian product with tolerance-aware merging and dedup.
    let mut fibers: Vec<ConicDivisor> = Vec::new();
    let mut stack: Vec<usize> = vec![0; per_line.len()];
    loop {
        let mut points: Vec<(ProjPoint, usize)> = Vec::new();
        for (line_idx, &choice) in stack.iter().enumerate() {
            for (p, m) in &per_line[line_idx][choice] {
                match points
                    .iter_mut()
                    .find(|(seen, _)| seen.chordal(p) <= tols.cluster_tol)
                {
                    Some((_, mult)) => *mult += m,
                    None => points.push((*p, *m)),
                }
            }
        }
        let candidate = ConicDivisor::new(points);
        let dup = fibers.iter().any(|f| {
            f.matching_distance(&candidate)
                .is_some_and(|d| d <= tols.cluster_tol)
        });
        if !dup {
            fibers.push(candidate);
        }
        // Advance the mixed-radix counter.
        let mut i = 0;
        loop {
            if i == stack.len() {
                return Ok(fibers);
            }
            stack[i] += 1;
            if stack[i] < per_line[i].len() {
                break;
            }
            stack[i] = 0;
            i += 1;
        }
    }
}

/// Coefficients of the binary form with the pencil divisor as its roots
/// (the Viète map), normalized to unit norm.
pub fn viete_coordinates(div: &PencilDivisor) -> Vec<Complex64> {
    let mut acc = BinaryForm::constant(Complex64::ONE);
    for (p, m) in &div.lines {
        let factor = BinaryForm::from_coeffs(vec![p.u1, -p.u0]);
        for _ in 0..*m {
            acc = acc.mul(&factor);
        }
    }
    let n = acc.norm();
    acc.coeffs().iter().map(|c| c / n).collect()
}

/// `|b² − 4ac|` of the normalized degree-2 Viète coordinates: the
/// discriminant parabola equation in the chart `(x, y, z) = (b, a, c)`.
pub fn discriminant_parabola_residual(viete: &[Complex64]) -> f64 {
    assert_eq!(viete.len(), 3, "degree-2 Viète coordinates expected");
    let (a, b, c) = (viete[0], viete[1], viete[2]);
    (b * b - a * c * Complex64::new(4.0, 0.0)).norm()
}

/// Dimension defect `dim V_Q^⊥(d) − dim M_Q(ω)` for factorizations
/// subordinate to the partition `ω = (d_1 ≥ … ≥ d_s)` on a surface of
/// degree `l`: `(s−1)(l²−3l+2)/2` when all `d_i ≥ l`, and the mixed-degree
/// count otherwise. Always an integer.
pub fn dim_defect(l: u32, partition: &[u32]) -> Result<i64> {
    if l == 0 {
        return Err(Error::Invalid("the form degree l must be positive".into()));
    }
    if partition.is_empty() || partition.contains(&0) {
        return Err(Error::Invalid(
            "partition entries must be positive".into(),
        ));
    }
    let l = l as i64;
    let s = partition.len() as i64;
    let d: i64 = partition.iter().map(|&x| x as i64).sum();
    if partition.iter().all(|&di| di as i64 >= l) {
        return Ok((s - 1) * (l * l - 3 * l + 2) / 2);
    }
    // Mixed degrees: twice the defect stays integral throughout.
    let mut twice = l * (2 * d - l + 3);
    for &di in partition {
        let di = di as i64;
        if di >= l {
            twice -= l * (2 * di - l + 3);
        } else {
            twice -= di * (di + 3);
        }
    }
    twice += 2 * (s - 1);
    debug_assert_eq!(twice % 2, 0);
    Ok(twice / 2)
}
