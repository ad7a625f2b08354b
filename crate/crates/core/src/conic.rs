//! Restriction of polynomials to the conic `{Q = 0}` as binary forms,
//! projective root-finding with multiplicity clustering, and construction of
//! lines through divisor points.
//!
//! All root distances use the chordal (Fubini–Study) metric on ℂP¹, which is
//! scale-free and treats roots at infinity like any other point.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::HPoly;
use crate::quadform::{sphere_alpha, QuadForm};

/// Binary form `Σ_j c_j u0^{d−j} u1^j`; index `j` is the `u1`-power.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryForm {
    coeffs: Vec<Complex64>,
}

impl BinaryForm {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty());
        BinaryForm { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        BinaryForm { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, u0: Complex64, u1: Complex64) -> Complex64 {
        let d = self.degree();
        let mut p0 = vec![Complex64::ONE; d + 1];
        let mut p1 = vec![Complex64::ONE; d + 1];
        for i in 1..=d {
            p0[i] = p0[i - 1] * u0;
            p1[i] = p1[i - 1] * u1;
        }
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * p0[d - j] * p1[j])
            .sum()
    }

    pub fn mul(&self, other: &BinaryForm) -> BinaryForm {
        let mut out = vec![Complex64::ZERO; self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        BinaryForm { coeffs: out }
    }

    pub fn pow(&self, k: usize) -> BinaryForm {
        let mut out = BinaryForm::constant(Complex64::ONE);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> BinaryForm {
        BinaryForm {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &BinaryForm) -> BinaryForm {
        let n = self.coeffs.len().max(other.coeffs.len());
        // Align by u1-power from the constant end; forms of equal degree in
        // practice.
        assert_eq!(
            self.degree(),
            other.degree(),
            "binary form degree mismatch in add"
        );
        let mut out = vec![Complex64::ZERO; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        BinaryForm { coeffs: out }
    }
}

/// Point of ℂP¹, held as a unit vector with the larger-modulus coordinate
/// rotated to the positive real axis. Normalization is idempotent.
#[derive(Clone, Copy, Debug)]
pub struct ProjPoint {
    pub u0: Complex64,
    pub u1: Complex64,
}

impl ProjPoint {
    pub fn new(u0: Complex64, u1: Complex64) -> Self {
        let n = (u0.norm_sqr() + u1.norm_sqr()).sqrt();
        assert!(n > 0.0, "projective point needs a nonzero representative");
        let (mut a, mut b) = (u0 / n, u1 / n);
        let m = if a.norm() >= b.norm() { a } else { b };
        let phase = m.conj() / m.norm();
        a *= phase;
        b *= phase;
        ProjPoint { u0: a, u1: b }
    }

    pub fn infinity() -> Self {
        ProjPoint::new(Complex64::ONE, Complex64::ZERO)
    }

    pub fn zero() -> Self {
        ProjPoint::new(Complex64::ZERO, Complex64::ONE)
    }

    /// Chordal (Fubini–Study) distance `|u0 v1 − u1 v0|` on unit vectors.
    pub fn chordal(&self, other: &ProjPoint) -> f64 {
        (self.u0 * other.u1 - self.u1 * other.u0).norm()
    }

    pub fn conj(&self) -> ProjPoint {
        ProjPoint::new(self.u0.conj(), self.u1.conj())
    }

    /// Deterministic sort key.
    pub fn sort_key(&self) -> [f64; 4] {
        [self.u0.re, self.u0.im, self.u1.re, self.u1.im]
    }
}

fn key_cmp(a: &[f64; 4], b: &[f64; 4]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Multiset of projective points with multiplicities; the intersection
/// divisor of a curve with the conic.
#[derive(Clone, Debug)]
pub struct ConicDivisor {
    points: Vec<(ProjPoint, usize)>,
}


impl ConicDivisor {
    pub fn new(mut points: Vec<(ProjPoint, usize)>) -> Self {
        points.sort_by(|a, b| key_cmp(&a.0.sort_key(), &b.0.sort_key()));
        ConicDivisor { points }
    }

    pub fn points(&self) -> &[(ProjPoint, usize)] {
        &self.points
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.points.iter().map(|(_, m)| *m as u32).collect()
    }

    pub fn has_multiple_point(&self) -> bool {
        self.points.iter().any(|(_, m)| *m >= 2)
    }

    /// Greatest chordal distance from each point of `self` to its best
    /// match in `other`, provided multiplicities agree; `None` otherwise.
    pub fn matching_distance(&self, other: &ConicDivisor) -> Option<f64> {
        if self.points.len() != other.points.len() {
            return None;
        }
        let mut used = vec![false; other.points.len()];
        let mut worst = 0.0_f64;
        for (p, m) in &self.points {
            let mut best: Option<(usize, f64)> = None;
            for (i, (q, mq)) in other.points.iter().enumerate() {
                if used[i] || mq != m {
                    continue;
                }
                let d = p.chordal(q);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            let (i, d) = best?;
            used[i] = true;
            worst = worst.max(d);
        }
        Some(worst)
    }
}

/// Rational parametrization `α : ℂP¹ → {Q = 0}` as three coprime binary
/// quadratics, normalized to unit sup-coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicParam {
    alpha: [BinaryForm; 3],
}

impl ConicParam {
    /// Push the sphere parametrization through `A⁻¹` (row convention:
    /// coordinates are `α_sphere(u)·A⁻¹`).
    pub fn from_reduction_inverse(a_inv: &Matrix3<Complex64>) -> Self {
        let s = sphere_alpha();
        let mut alpha = [
            BinaryForm::from_coeffs(vec![Complex64::ZERO; 3]),
            BinaryForm::from_coeffs(vec![Complex64::ZERO; 3]),
            BinaryForm::from_coeffs(vec![Complex64::ZERO; 3]),
        ];
        for (m, slot) in alpha.iter_mut().enumerate() {
            let mut acc = BinaryForm::from_coeffs(vec![Complex64::ZERO; 3]);
            for (t, st) in s.iter().enumerate() {
                acc = acc.add(&st.scaled(a_inv[(t, m)]));
            }
            *slot = acc;
        }
        // Common rescale to unit sup-coefficient keeps restriction scales
        // predictable.
        let sup = alpha
            .iter()
            .flat_map(|f| f.coeffs().iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        let inv = Complex64::new(1.0 / sup, 0.0);
        ConicParam {
            alpha: [
                alpha[0].scaled(inv),
                alpha[1].scaled(inv),
                alpha[2].scaled(inv),
            ],
        }
    }

    pub fn forms(&self) -> &[BinaryForm; 3] {
        &self.alpha
    }

    pub fn eval(&self, u0: Complex64, u1: Complex64) -> Vector3<Complex64> {
        Vector3::new(
            self.alpha[0].eval(u0, u1),
            self.alpha[1].eval(u0, u1),
            self.alpha[2].eval(u0, u1),
        )
    }

    pub fn eval_point(&self, p: &ProjPoint) -> Vector3<Complex64> {
        self.eval(p.u0, p.u1)
    }

    /// Image of `p`, scaled to a unit vector.
    pub fn unit_image(&self, p: &ProjPoint) -> Vector3<Complex64> {
        let v = self.eval_point(p);
        v / Complex64::new(v.norm(), 0.0)
    }

    /// Coefficient norm of the quartic `Q(α(u))`; the defining property
    /// makes it vanish.
    pub fn residual_on(&self, q: &QuadForm) -> f64 {
        let b = q.matrix();
        let mut acc = BinaryForm::from_coeffs(vec![Complex64::ZERO; 5]);
        for r in 0..3 {
            for c in 0..3 {
                if b[(r, c)] == Complex64::ZERO {
                    continue;
                }
                acc = acc.add(&self.alpha[r].mul(&self.alpha[c]).scaled(b[(r, c)]));
            }
        }
        acc.norm()
    }
}

/// Restrict a homogeneous `p` to the conic: the binary form `p(α(u))` of
/// degree `2·deg p` (the zero form exactly when `Q` divides `p`).
pub fn restrict_to_conic(p: &HPoly, alpha: &ConicParam) -> BinaryForm {
    let d = p.degree();
    let table = |f: &BinaryForm| -> Vec<BinaryForm> {
        let mut t = vec![BinaryForm::constant(Complex64::ONE)];
        for i in 1..=d {
            t.push(t[i - 1].mul(f));
        }
        t
    };
    let t0 = table(&alpha.forms()[0]);
    let t1 = table(&alpha.forms()[1]);
    let t2 = table(&alpha.forms()[2]);
    let mut acc = vec![Complex64::ZERO; 2 * d + 1];
    for (m, c) in p.monomials() {
        let prod = t0[m.x as usize].mul(&t1[m.y as usize]).mul(&t2[m.z as usize]);
        // prod has degree 2(x+y+z) = 2d.
        for (j, v) in prod.coeffs().iter().enumerate() {
            acc[j] += c * v;
        }
    }
    BinaryForm::from_coeffs(acc)
}

/// Scale against which a restricted form counts as the zero form:
/// `‖p‖·(3·sup|α|)^deg` bounds the restriction of any unit-norm input.
pub fn restriction_scale(p: &HPoly, alpha: &ConicParam) -> f64 {
    let sup = alpha
        .forms()
        .iter()
        .flat_map(|f| f.coeffs().iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    p.norm() * (3.0 * sup).powi(p.degree() as i32).max(1.0)
}

/// True when the restriction is negligible against the input scale, i.e.
/// the polynomial is numerically divisible by `Q`.
pub fn restriction_is_zero(b: &BinaryForm, p: &HPoly, alpha: &ConicParam) -> bool {
    b.norm() <= 1e-12 * restriction_scale(p, alpha).max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    // coeffs[0] is the leading coefficient.
    let mut acc = Complex64::ZERO;
    for c in coeffs {
        acc = acc * z + c;
    }
    acc
}

fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::new((n - i) as f64, 0.0))
        .collect()
}

/// Simultaneous Aberth–Ehrlich iteration on a monic-normalized polynomial.
/// Deterministic: fixed initialization circle (Fujiwara radius, equispaced
/// angles with a golden-angle offset).
fn aberth(coeffs: &[Complex64], max_iters: usize) -> std::result::Result<Vec<Complex64>, Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let deriv = poly_derivative(&monic);

    // Fujiwara-style bound on root magnitudes.
    let mut radius = 0.0_f64;
    for (j, c) in monic[1..].iter().enumerate() {
        let k = j + 1;
        let mag = if k == n { c.norm() / 2.0 } else { c.norm() };
        radius = radius.max(mag.powf(1.0 / k as f64));
    }
    radius = (2.0 * radius).max(1e-3);

    const GOLDEN_ANGLE: f64 = 2.0 * std::f64::consts::PI * 0.618_033_988_749_894_9;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + GOLDEN_ANGLE;
            Complex64::from_polar(radius, ang)
        })
        .collect();

    run_aberth(&monic, &deriv, &mut z, max_iters)
}

/// Evaluation together with a backward-error bound: once `|p(z)|` drops
/// below the rounding noise of the evaluation itself, the point is a root
/// to working precision (the only reachable state near multiple roots).
fn eval_with_bound(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let mut acc = Complex64::ZERO;
    let mut mag = 0.0_f64;
    let az = z.norm();
    for c in coeffs {
        acc = acc * z + c;
        mag = mag * az + c.norm();
    }
    (acc, mag * (coeffs.len() as f64) * 4.0 * f64::EPSILON)
}

/// Core Aberth loop on a provided starting configuration. A point stops
/// moving once its correction is tiny or its residual reaches the
/// evaluation noise floor. Returns `Ok` on convergence and `Err(current
/// iterate)` otherwise.
fn run_aberth(
    monic: &[Complex64],
    deriv: &[Complex64],
    z: &mut [Complex64],
    max_iters: usize,
) -> std::result::Result<Vec<Complex64>, Vec<Complex64>> {
    let n = z.len();
    let mut settled = vec![false; n];
    for _ in 0..max_iters {
        let mut all_settled = true;
        for k in 0..n {
            if settled[k] {
                continue;
            }
            let (pv, noise) = eval_with_bound(monic, z[k]);
            if pv.norm() <= noise {
                settled[k] = true;
                continue;
            }
            let dv = poly_eval(deriv, z[k]);
            let w = if dv == Complex64::ZERO {
                Complex64::new(1e-12, 1e-12)
            } else {
                pv / dv
            };
            let mut s = Complex64::ZERO;
            for l in 0..n {
                if l != k {
                    let diff = z[k] - z[l];
                    if diff != Complex64::ZERO {
                        s += Complex64::ONE / diff;
                    }
                }
            }
            let denom = Complex64::ONE - w * s;
            let corr = if denom == Complex64::ZERO { w } else { w / denom };
            z[k] -= corr;
            if corr.norm() <= 1e-14 * (1.0 + z[k].norm()) {
                settled[k] = true;
            } else {
                all_settled = false;
            }
        }
        if all_settled {
            return Ok(z.to_vec());
        }
    }
    Err(z.to_vec())
}

/// Companion-matrix fallback: eigenvalues of the realified companion matrix
/// seed a fresh Aberth run. The 2n×2n real block matrix has the roots and
/// their conjugates as eigenvalues; Newton polishing sorts out which ones
/// actually lie on the polynomial.
fn companion_seed(coeffs: &[Complex64], max_iters: usize) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let deriv = poly_derivative(&monic);

    let mut comp = DMatrix::<f64>::zeros(2 * n, 2 * n);
    // Companion of the monic polynomial: subdiagonal ones, last column
    // −a_{n−j}; realified as [[X, −Y], [Y, X]].
    for r in 0..n {
        let c_last = -monic[n - r];
        if r > 0 {
            comp[(r, r - 1)] = 1.0;
            comp[(n + r, n + r - 1)] = 1.0;
        }
        comp[(r, n - 1)] = c_last.re;
        comp[(r, 2 * n - 1)] = -c_last.im;
        comp[(n + r, n - 1)] = c_last.im;
        comp[(n + r, 2 * n - 1)] = c_last.re;
    }
    let eig = comp.complex_eigenvalues();
    let mut candidates: Vec<(f64, Complex64)> = eig
        .iter()
        .map(|l| {
            let mut t = *l;
            // A few Newton steps pull candidates onto nearby roots.
            for _ in 0..20 {
                let pv = poly_eval(&monic, t);
                let dv = poly_eval(&deriv, t);
                if dv == Complex64::ZERO {
                    break;
                }
                let step = pv / dv;
                t -= step;
                if step.norm() <= 1e-15 * (1.0 + t.norm()) {
                    break;
                }
            }
            (poly_eval(&monic, t).norm(), t)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut z: Vec<Complex64> = candidates.into_iter().take(n).map(|(_, t)| t).collect();
    if z.len() < n {
        return None;
    }
    run_aberth(&monic, &deriv, &mut z, max_iters).ok()
}

/// All roots of a binary form in ℂP¹ with multiplicities recovered by
/// chordal clustering at `cluster_tol`.
pub fn proj_roots(b: &BinaryForm, cluster_tol: f64, max_iters: usize) -> Result<ConicDivisor> {
    let scale = b.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroForm);
    }
    let mut coeffs = b.coeffs().to_vec();

    // Leading-coefficient dropoff: roots at [1:0].
    let mut at_infinity = 0usize;
    while coeffs.len() > 1 && coeffs[0].norm() <= 1e-13 * scale {
        coeffs.remove(0);
        at_infinity += 1;
    }
    // Trailing dropoff: roots at [0:1].
    let mut at_zero = 0usize;
    while coeffs.len() > 1 && coeffs[coeffs.len() - 1].norm() <= 1e-13 * scale {
        coeffs.pop();
        at_zero += 1;
    }

    let mut points: Vec<ProjPoint> = Vec::new();
    points.extend(std::iter::repeat_n(ProjPoint::infinity(), at_infinity));
    points.extend(std::iter::repeat_n(ProjPoint::zero(), at_zero));

    if coeffs.len() > 1 {
        let roots = match aberth(&coeffs, max_iters) {
            Ok(r) => r,
            Err(_) => companion_seed(&coeffs, max_iters)
                .ok_or(Error::NoConvergence { iterations: max_iters })?,
        };
        // Final polish on the dehomogenized polynomial.
        let lead = coeffs[0];
        let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
        let deriv = poly_derivative(&monic);
        for r in roots {
            let mut t = r;
            for _ in 0..3 {
                let (pv, noise) = eval_with_bound(&monic, t);
                let dv = poly_eval(&deriv, t);
                if dv == Complex64::ZERO || pv.norm() <= noise {
                    break;
                }
                t -= pv / dv;
            }
            points.push(ProjPoint::new(t, Complex64::ONE));
        }
    }

    let mut divisor = cluster_points(points, cluster_tol);
    refine_and_merge(&mut divisor, b.coeffs(), cluster_tol);
    Ok(divisor)
}

/// Refine a candidate multiplicity-`m` point as a simple root of the
/// `(m−1)`-th derivative, then verify that the whole derivative chain
/// `p, p', …, p^{(m−1)}` vanishes at it to backward-error accuracy.
/// Returns the refined point when the claim holds. Charts are chosen so
/// the coordinate stays small (roots at infinity use the reversed
/// polynomial).
fn certify_multiplicity(
    normalized: &[Complex64],
    p: &ProjPoint,
    m: usize,
    max_move: f64,
) -> Option<ProjPoint> {
    let n = normalized.len() - 1;
    if m == 0 || m > n {
        return None;
    }
    let t_chart = p.u1.norm() >= p.u0.norm();
    let chart0: Vec<Complex64> = if t_chart {
        normalized.to_vec()
    } else {
        normalized.iter().rev().cloned().collect()
    };
    let mut chain = vec![chart0];
    for j in 1..=m {
        let d = poly_derivative(&chain[j - 1]);
        chain.push(d);
    }
    let mut t = if t_chart { p.u0 / p.u1 } else { p.u1 / p.u0 };
    let start = t;
    if m >= 2 {
        // Newton on p^{(m−1)}, a simple root there.
        let target = &chain[m - 1];
        let deriv = &chain[m];
        let mut ok = false;
        for _ in 0..60 {
            let (pv, noise) = eval_with_bound(target, t);
            if pv.norm() <= noise {
                ok = true;
                break;
            }
            let dv = poly_eval(deriv, t);
            if dv == Complex64::ZERO || !t.is_finite() {
                break;
            }
            let step = pv / dv;
            t -= step;
            if step.norm() <= 1e-15 * (1.0 + t.norm()) {
                ok = true;
                break;
            }
        }
        if !ok || !t.is_finite() || (t - start).norm() > max_move * (1.0 + start.norm()) {
            return None;
        }
    }
    for item in chain.iter().take(m) {
        let (pv, noise) = eval_with_bound(item, t);
        if pv.norm() > 100.0 * noise {
            return None;
        }
    }
    Some(if t_chart {
        ProjPoint::new(t, Complex64::ONE)
    } else {
        ProjPoint::new(Complex64::ONE, t)
    })
}

/// Post-pass on a clustered divisor: polish multiple points via the
/// derivative chain and merge nearby points whose union certifies as a
/// single higher-multiplicity root. An exact `m`-fold root scatters the
/// numeric roots by `O(ε^(1/m))`, far beyond any fixed link radius, so
/// merges are proposed geometrically and accepted only when certified.
fn refine_and_merge(divisor: &mut ConicDivisor, coeffs: &[Complex64], cluster_tol: f64) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return;
    }
    let normalized: Vec<Complex64> = coeffs.iter().map(|c| c / scale).collect();

    // Polish the multiplicities the base clustering already found.
    for (p, m) in &mut divisor.points {
        if *m >= 2 {
            if let Some(better) = certify_multiplicity(&normalized, p, *m, 0.01) {
                *p = better;
            }
        }
    }

    // Certified agglomeration for scatter beyond the link radius.
    let candidate_radius = cluster_tol.max(0.05);
    'outer: loop {
        let pts = &divisor.points;
        let mut order: Vec<(f64, usize, usize)> = Vec::new();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = pts[i].0.chordal(&pts[j].0);
                if d <= candidate_radius {
                    order.push((d, i, j));
                }
            }
        }
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (_, i, j) in order {
            let m = divisor.points[i].1 + divisor.points[j].1;
            // Midpoint seed for the certification.
            let seed = ProjPoint::new(
                divisor.points[i].0.u0 + divisor.points[j].0.u0,
                divisor.points[i].0.u1 + divisor.points[j].0.u1,
            );
            let max_move = (3.0 * divisor.points[i].0.chordal(&divisor.points[j].0))
                .max(10.0 * cluster_tol);
            if let Some(center) = certify_multiplicity(&normalized, &seed, m, max_move) {
                let keep = center;
                let (hi, lo) = (i.max(j), i.min(j));
                divisor.points.remove(hi);
                divisor.points.remove(lo);
                divisor.points.push((keep, m));
                continue 'outer;
            }
        }
        break;
    }
    divisor
        .points
        .sort_by(|a, b| key_cmp(&a.0.sort_key(), &b.0.sort_key()));
}

/// Single-linkage clustering under the chordal metric; each cluster becomes
/// one divisor point at the cluster mean with the cluster size as
/// multiplicity.
fn cluster_points(mut points: Vec<ProjPoint>, tol: f64) -> ConicDivisor {
    points.sort_by(|a, b| key_cmp(&a.sort_key(), &b.sort_key()));
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if points[i].chordal(&points[j]) <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut clusters: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }
    let merged = clusters
        .values()
        .map(|members| {
            // Mean of the canonical unit representatives; for a scattered
            // multiple root the symmetric perturbations cancel.
            let mut s0 = Complex64::ZERO;
            let mut s1 = Complex64::ZERO;
            for &i in members {
                s0 += points[i].u0;
                s1 += points[i].u1;
            }
            (ProjPoint::new(s0, s1), members.len())
        })
        .collect();
    ConicDivisor::new(merged)
}

// ---------------------------------------------------------------------------
// Lines
// ---------------------------------------------------------------------------

/// Canonicalize a line coefficient vector: unit Hermitian norm, largest-
/// modulus coordinate rotated real positive.
pub fn canonical_vector(v: &Vector3<Complex64>) -> Vector3<Complex64> {
    let n = v.norm();
    assert!(n > 0.0, "cannot canonicalize the zero vector");
    let w = v / Complex64::new(n, 0.0);
    let mut best = 0usize;
    for i in 1..3 {
        if w[i].norm() > w[best].norm() {
            best = i;
        }
    }
    let phase = w[best].conj() / w[best].norm();
    w * phase
}

/// Coefficients of the linear form vanishing at `α(p1)` and `α(p2)`: the
/// cross product of the two image points, canonicalized.
pub fn line_through(
    p1: &ProjPoint,
    p2: &ProjPoint,
    alpha: &ConicParam,
    coincidence_tol: f64,
) -> Result<Vector3<Complex64>> {
    if p1.chordal(p2) <= coincidence_tol {
        return Err(Error::CoincidentPoints);
    }
    let x1 = alpha.unit_image(p1);
    let x2 = alpha.unit_image(p2);
    let l = x1.cross(&x2);
    if l.norm() == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(canonical_vector(&l))
}

/// The polar line of `α(p)` with respect to `B`: coefficients `α(p)·B`.
/// It meets the conic doubly at `p`.
pub fn tangent_line(p: &ProjPoint, q: &QuadForm, alpha: &ConicParam) -> Vector3<Complex64> {
    let x = alpha.unit_image(p);
    let l = q.matrix() * x;
    canonical_vector(&l)
}
