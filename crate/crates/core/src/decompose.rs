//! The decomposition engine: leading multipole extraction, full recursive
//! decomposition on `{Q = 1}`, enumeration of all decompositions, and
//! evaluation.
//!
//! A homogeneous `p` not divisible by `Q` equals `λ·Π_ν L_ν + Q·R`, where
//! the lines `L_ν` realize a parcelling of the intersection divisor of `p`
//! with the conic: secant lines through point pairs, tangent lines at
//! weight-2 points. Extracting the product and dividing the remainder by
//! `Q` walks the degree down by two per round; parity splitting and
//! homogenization on the surface reduce the general case to this one.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Tolerances, PROBE_CLEARANCE, PROBE_RETRIES};
use crate::conic::{
    line_through, proj_roots, restrict_to_conic, restriction_is_zero, tangent_line, ConicDivisor,
    ProjPoint,
};
use crate::error::{Error, Result};
use crate::parcelling::{
    canonical_parcelling, count_parcellings, enumerate_parcellings, GenParcelling,
    MultiplicityFn, ParcellingMode,
};
use crate::poly::{divide_by_form, homogenize_on_surface, HPoly, Poly};
use crate::quadform::QuadForm;

/// Which canonical parcelling drives [`decompose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Real coefficients and real `Q`. Unique for positive-definite forms
    /// (the conic has no real points, so the conjugation-equivariant
    /// pairing is forced). Negative-definite forms are rejected: we read
    /// the signature restriction as requiring `{Q = 1}` to be nonempty
    /// over ℝ. Indefinite forms fall back to the generic deterministic
    /// choice when no equivariant pairing exists, and clear the
    /// uniqueness flag.
    Real,
    /// Deterministic canonical choice over ℂ.
    Complex,
}

/// A scalar and an unordered list of unit 3-vectors: `λ·Π_j ⟨v_j, ·⟩`.
/// Canonical form fixes each vector's scale and phase and sorts the list;
/// the zero multipole is `λ = 0` with no vectors.
#[derive(Clone, Debug)]
pub struct Multipole {
    pub lambda: Complex64,
    pub vectors: Vec<Vector3<Complex64>>,
    pub real_mode: bool,
}

fn vec_key(v: &Vector3<Complex64>) -> [f64; 6] {
    [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im]
}

fn key_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap() {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

impl Multipole {
    pub fn zero() -> Self {
        Multipole {
            lambda: Complex64::ZERO,
            vectors: Vec::new(),
            real_mode: false,
        }
    }

    pub fn constant(c: Complex64, real_mode: bool) -> Self {
        Multipole {
            lambda: c,
            vectors: Vec::new(),
            real_mode,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lambda == Complex64::ZERO
    }

    pub fn degree(&self) -> usize {
        self.vectors.len()
    }

    /// Build from a scalar and raw vectors, absorbing all scales into `λ`.
    pub fn new(lambda: Complex64, vectors: Vec<Vector3<Complex64>>, real_mode: bool) -> Self {
        let mut m = Multipole {
            lambda,
            vectors,
            real_mode,
        };
        m.canonicalize();
        m
    }

    /// Canonicalization: unit vectors; phase pinned (complex: largest-
    /// modulus coordinate real positive; real: first nonzero coordinate
    /// positive); vectors sorted lexicographically; in real mode `λ ≥ 0`,
    /// restored by flipping the last vector if needed. Idempotent.
    pub fn canonicalize(&mut self) {
        if self.lambda.norm() == 0.0 || self.vectors.iter().any(|v| v.norm() == 0.0) {
            self.lambda = Complex64::ZERO;
            self.vectors.clear();
            return;
        }
        let snap = |v: &mut Vector3<Complex64>| {
            // Shed imaginary dust so canonical real output is exactly real.
            let n = v.norm();
            for i in 0..3 {
                if v[i].im.abs() <= 1e-9 * n {
                    v[i].im = 0.0;
                }
                if v[i].re.abs() <= 1e-9 * n {
                    v[i].re = 0.0;
                }
            }
        };
        for v in &mut self.vectors {
            let n = v.norm();
            self.lambda *= Complex64::new(n, 0.0);
            *v /= Complex64::new(n, 0.0);
            if self.real_mode {
                snap(v);
                let lead = (0..3).find(|&i| v[i].norm() > 0.0).unwrap();
                let phase = v[lead].conj() / v[lead].norm();
                self.lambda *= phase.conj();
                *v *= phase;
                snap(v);
            } else {
                let mut best = 0usize;
                for i in 1..3 {
                    if v[i].norm() > v[best].norm() {
                        best = i;
                    }
                }
                let phase = v[best].conj() / v[best].norm();
                self.lambda *= phase.conj();
                *v *= phase;
            }
        }
        self.vectors
            .sort_by(|a, b| key_cmp(&vec_key(a), &vec_key(b)));
        if self.real_mode {
            if self.lambda.im.abs() <= 1e-9 * self.lambda.norm() {
                self.lambda.im = 0.0;
            }
            if self.lambda.re < 0.0 && self.lambda.im == 0.0 && !self.vectors.is_empty() {
                self.lambda = -self.lambda;
                let last = self.vectors.len() - 1;
                self.vectors[last] = -self.vectors[last];
                self.vectors
                    .sort_by(|a, b| key_cmp(&vec_key(a), &vec_key(b)));
            }
        }
        // Normalize negative zeros left behind by sign flips.
        let clean = |c: &mut Complex64| {
            if c.re == 0.0 {
                c.re = 0.0;
            }
            if c.im == 0.0 {
                c.im = 0.0;
            }
        };
        clean(&mut self.lambda);
        for v in &mut self.vectors {
            for i in 0..3 {
                clean(&mut v[i]);
            }
        }
    }

    /// Expand back to the polynomial `λ·Π_j L_j`.
    pub fn expand(&self) -> HPoly {
        if self.is_zero() {
            return HPoly::zero(0);
        }
        let mut acc = HPoly::constant(self.lambda);
        for v in &self.vectors {
            acc = acc.mul(&HPoly::linear_form(v));
        }
        acc
    }

    /// Value of the product at `v` (bilinear pairing with each vector).
    pub fn eval(&self, v: &Vector3<Complex64>) -> Complex64 {
        let mut acc = self.lambda;
        for w in &self.vectors {
            acc *= w[0] * v[0] + w[1] * v[1] + w[2] * v[2];
        }
        acc
    }

    /// Best-matching distance: minimum over vector assignments of the
    /// largest vector distance, plus the relative `λ` distance. Infinite
    /// for different degrees.
    pub fn distance(&self, other: &Multipole) -> f64 {
        if self.degree() != other.degree() {
            return f64::INFINITY;
        }
        let lam_scale = self.lambda.norm().max(other.lambda.norm()).max(1e-300);
        let lam_dist = (self.lambda - other.lambda).norm() / lam_scale;
        if self.degree() == 0 {
            return lam_dist;
        }
        let k = self.degree();
        let dist = |a: &Vector3<Complex64>, b: &Vector3<Complex64>| (a - b).norm();
        let best = if k <= 7 {
            // Exhaustive assignment for the small degrees in practice.
            let mut used = vec![false; k];
            fn rec(
                i: usize,
                used: &mut Vec<bool>,
                a: &[Vector3<Complex64>],
                b: &[Vector3<Complex64>],
                cur: f64,
                best: &mut f64,
                dist: &dyn Fn(&Vector3<Complex64>, &Vector3<Complex64>) -> f64,
            ) {
                if cur >= *best {
                    return;
                }
                if i == a.len() {
                    *best = cur;
                    return;
                }
                for j in 0..b.len() {
                    if !used[j] {
                        used[j] = true;
                        rec(i + 1, used, a, b, cur.max(dist(&a[i], &b[j])), best, dist);
                        used[j] = false;
                    }
                }
            }
            let mut best = f64::INFINITY;
            rec(
                0,
                &mut used,
                &self.vectors,
                &other.vectors,
                0.0,
                &mut best,
                &dist,
            );
            best
        } else {
            // Greedy fallback for large degrees.
            let mut used = vec![false; k];
            let mut worst = 0.0_f64;
            for a in &self.vectors {
                let mut pick = (usize::MAX, f64::INFINITY);
                for (j, b) in other.vectors.iter().enumerate() {
                    if !used[j] {
                        let d = dist(a, b);
                        if d < pick.1 {
                            pick = (j, d);
                        }
                    }
                }
                used[pick.0] = true;
                worst = worst.max(pick.1);
            }
            worst
        };
        best + lam_dist
    }

    /// Deterministic ordering key for canonical output.
    pub fn sort_key(&self) -> Vec<f64> {
        let mut k = vec![self.degree() as f64, self.lambda.re, self.lambda.im];
        for v in &self.vectors {
            k.extend_from_slice(&vec_key(v));
        }
        k
    }
}

/// The intersection divisor of `p` with the conic (`Z(p, Q)` with
/// multiplicities). Fails with [`Error::DivisibleInput`] when `Q | p`.
pub fn divisor_of(p: &HPoly, q: &QuadForm, tols: &Tolerances) -> Result<ConicDivisor> {
    let alpha = q.conic_param();
    let b = restrict_to_conic(p, alpha);
    if restriction_is_zero(&b, p, alpha) {
        return Err(Error::DivisibleInput);
    }
    proj_roots(&b, tols.cluster_tol, tols.max_root_iters)
}

/// Deterministic probe point on the conic, kept `PROBE_CLEARANCE ×
/// cluster_tol` away from every divisor point. The sequence is fixed
/// (internal constant seed) so results do not depend on any caller seed.
fn probe_point(divisor: &ConicDivisor, tols: &Tolerances) -> Result<ProjPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E37_79B9_7F4A_7C15);
    for _ in 0..(PROBE_RETRIES * 4) {
        let t = ProjPoint::new(
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        );
        let clear = divisor
            .points()
            .iter()
            .map(|(p, _)| p.chordal(&t))
            .fold(f64::INFINITY, f64::min);
        if clear > PROBE_CLEARANCE * tols.cluster_tol {
            return Ok(t);
        }
    }
    Err(Error::ProbeDegenerate)
}

/// Extract the leading multipole of `p` along a parcelling of its divisor:
/// `p = λ·Π_ν L_ν + Q·r`, returning the canonical multipole and the
/// certified quotient `r`.
pub fn leading_multipole(
    p: &HPoly,
    q: &QuadForm,
    divisor: &ConicDivisor,
    parc: &GenParcelling,
    real_mode: bool,
    tols: &Tolerances,
) -> Result<(Multipole, HPoly)> {
    let alpha = q.conic_param();
    let d = p.degree();
    if parc.len() != d {
        return Err(Error::Invalid(format!(
            "parcelling has {} parcels, polynomial degree is {}",
            parc.len(),
            d
        )));
    }

    let mut lines: Vec<Vector3<Complex64>> = Vec::with_capacity(d);
    for &(i, j) in parc.parcels() {
        let line = if i == j {
            tangent_line(&divisor.points()[i].0, q, alpha)
        } else {
            line_through(
                &divisor.points()[i].0,
                &divisor.points()[j].0,
                alpha,
                tols.cluster_tol,
            )?
        };
        lines.push(line);
    }

    // λ = p(x)/Π L_ν(x) at a probe point x on the conic away from the
    // divisor; both sides are homogeneous of the same degree, so the
    // representative scale cancels.
    let probe = probe_point(divisor, tols)?;
    let x = alpha.unit_image(&probe);
    let mut denom = Complex64::ONE;
    for l in &lines {
        denom *= l[0] * x[0] + l[1] * x[1] + l[2] * x[2];
    }
    if denom.norm() == 0.0 {
        return Err(Error::ProbeDegenerate);
    }
    let lambda = p.eval(&x) / denom;

    let multipole = Multipole::new(lambda, lines, real_mode);
    let residue = p.sub(&multipole.expand());
    // Below degree 2 the residue cannot hold a factor of Q: it must vanish.
    let r = if p.degree() < 2 {
        let resid = residue.norm();
        if resid > tols.div_tol * p.norm().max(1.0) {
            return Err(Error::NotDivisible { residual: resid });
        }
        HPoly::zero(0)
    } else {
        divide_by_form(&residue, &q.as_hpoly(), tols.div_tol)?
    };
    Ok((multipole, r))
}

/// The sequence of multipoles `w_0 … w_d` representing a polynomial on
/// `{Q = 1}`, with re-expansion diagnostics.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub surface: QuadForm,
    /// `multipoles[k]` has degree `k` (or is the zero multipole).
    pub multipoles: Vec<Multipole>,
    pub policy: Policy,
    /// Whether the canonical choice is provably unique (real definite).
    pub unique: bool,
    /// Max relative re-expansion error over the certification samples.
    pub residual: f64,
}

impl Decomposition {
    /// `Σ_k scaleᵏ·λ_k·Π_j ⟨v_{k,j}, v⟩` for `v` on `{Q = 1}` and
    /// `|scale| ≤ 1`; at `scale = 1` this reproduces the source polynomial.
    pub fn evaluate(&self, v: &Vector3<Complex64>, scale: Complex64) -> Result<Complex64> {
        let dev = (self.surface.eval(v) - Complex64::ONE).norm();
        if dev > 1e-8 {
            return Err(Error::OffSurface { deviation: dev });
        }
        let mut acc = Complex64::ZERO;
        let mut s = Complex64::ONE;
        for w in &self.multipoles {
            acc += s * w.eval(v);
            s *= scale;
        }
        Ok(acc)
    }

    /// The represented polynomial as an explicit sum of products.
    pub fn expand(&self) -> Poly {
        let mut acc = Poly::zero();
        for w in &self.multipoles {
            if !w.is_zero() {
                acc.add_hpoly_in_place(&w.expand());
            }
        }
        acc
    }
}

fn bottom_multipole(h: &HPoly, real_mode: bool) -> Multipole {
    match h.degree() {
        0 => {
            if h.norm() == 0.0 {
                Multipole::zero()
            } else {
                let mut c = h.coeffs()[0];
                if real_mode && c.im.abs() <= 1e-9 * c.norm() {
                    c.im = 0.0;
                }
                Multipole::constant(c, real_mode)
            }
        }
        1 => {
            let v = Vector3::new(h.coeffs()[0], h.coeffs()[1], h.coeffs()[2]);
            if v.norm() == 0.0 {
                Multipole::zero()
            } else {
                Multipole::new(Complex64::ONE, vec![v], real_mode)
            }
        }
        _ => unreachable!("bottom of the recursion is degree ≤ 1"),
    }
}

fn parcelling_for(
    divisor: &ConicDivisor,
    q: &QuadForm,
    policy: Policy,
    tols: &Tolerances,
    unique: &mut bool,
) -> Result<GenParcelling> {
    let alpha = q.conic_param();
    match policy {
        Policy::Complex => {
            canonical_parcelling(divisor, ParcellingMode::Generic, alpha, tols.cluster_tol)
        }
        Policy::Real => {
            match canonical_parcelling(divisor, ParcellingMode::RealDefinite, alpha, tols.cluster_tol)
            {
                Ok(p) => Ok(p),
                Err(Error::NotConjugateClosed) if !q.is_positive_definite() => {
                    // Indefinite real surface: no equivariant pairing exists
                    // here; fall back to the generic deterministic choice.
                    *unique = false;
                    canonical_parcelling(divisor, ParcellingMode::Generic, alpha, tols.cluster_tol)
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// Decompose a polynomial on `{Q = 1}`: parity split, homogenize each part,
/// then peel leading multipoles until the degree drops below 2.
pub fn decompose(p: &Poly, q: &QuadForm, policy: Policy, tols: &Tolerances) -> Result<Decomposition> {
    if policy == Policy::Real {
        if !q.is_real() {
            return Err(Error::Invalid(
                "real policy requires a real quadratic form".into(),
            ));
        }
        if q.is_negative_definite() {
            // Signature −3: the real surface {Q = 1} is empty.
            return Err(Error::Invalid(
                "real policy: {Q = 1} has no real points for a negative-definite form".into(),
            ));
        }
        if p.max_imag() > 1e-12 * p.norm().max(1.0) {
            return Err(Error::Invalid(
                "real policy requires real coefficients".into(),
            ));
        }
    }
    let real_mode = policy == Policy::Real;
    let degree = p.degree().unwrap_or(0);
    let mut unique = real_mode && q.is_positive_definite();
    let mut slots: Vec<Multipole> = (0..=degree).map(|_| Multipole::zero()).collect();

    let (even, odd) = p.parity_split();
    for part in [even, odd] {
        let Some(_) = part.degree() else { continue };
        let mut h = homogenize_on_surface(&part, &q.as_hpoly())?;
        loop {
            let m = h.degree();
            if h.norm() <= 1e-14 * p.norm().max(1.0) {
                break;
            }
            if m <= 1 {
                slots[m] = bottom_multipole(&h, real_mode);
                break;
            }
            let alpha = q.conic_param();
            let restricted = restrict_to_conic(&h, alpha);
            if restriction_is_zero(&restricted, &h, alpha) {
                // Divisible level: the slot stays zero and a factor of Q
                // comes out.
                h = divide_by_form(&h, &q.as_hpoly(), tols.div_tol)?;
                continue;
            }
            let divisor = proj_roots(&restricted, tols.cluster_tol, tols.max_root_iters)?;
            let parc = parcelling_for(&divisor, q, policy, tols, &mut unique)?;
            let (w, r) = leading_multipole(&h, q, &divisor, &parc, real_mode, tols)?;
            slots[m] = w;
            h = r;
        }
    }

    let mut dec = Decomposition {
        surface: q.clone(),
        multipoles: slots,
        policy,
        unique,
        residual: 0.0,
    };
    dec.residual = reexpansion_residual(&dec, p);
    Ok(dec)
}

/// Max relative error of the re-expanded decomposition against `p` on a
/// fixed set of surface samples.
fn reexpansion_residual(dec: &Decomposition, p: &Poly) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0DDC_0FFE_E005_EED5);
    let scale = p.norm().max(1.0);
    let mut worst = 0.0_f64;
    for _ in 0..40 {
        let v = dec.surface.random_surface_point(&mut rng);
        let got = dec.evaluate(&v, Complex64::ONE).unwrap_or(Complex64::ZERO);
        worst = worst.max((got - p.eval(&v)).norm() / scale);
    }
    worst
}

/// All leading multipoles of `p` over every generalized parcelling of its
/// divisor, deduplicated canonically. For a simple divisor the count is
/// `(2d−1)!!`. Extraction is parallel over parcellings; dedup runs in the
/// enumeration order and the result is sorted, so the output is
/// deterministic.
pub fn enumerate_decompositions(
    p: &HPoly,
    q: &QuadForm,
    cap: u128,
    tols: &Tolerances,
) -> Result<Vec<Multipole>> {
    use rayon::prelude::*;

    let divisor = divisor_of(p, q, tols)?;
    let mu = MultiplicityFn::from_divisor(&divisor)?;
    let total = count_parcellings(&mu);
    if total > cap {
        return Err(Error::ExplosionGuard {
            size: total,
            limit: cap,
        });
    }
    let extracted: Result<Vec<Multipole>> = enumerate_parcellings(&mu)?
        .par_iter()
        .map(|parc| leading_multipole(p, q, &divisor, parc, false, tols).map(|(w, _)| w))
        .collect();
    let mut out: Vec<Multipole> = Vec::new();
    for w in extracted? {
        if !out.iter().any(|seen| seen.distance(&w) <= tols.dedup_tol) {
            out.push(w);
        }
    }
    out.sort_by(|a, b| key_cmp(&a.sort_key(), &b.sort_key()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::poly::{slots as dim_slots, Monomial};

    fn hp(text: &str) -> HPoly {
        parse_poly(text).unwrap().parts()[0].clone()
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn random_hpoly(d: usize, rng: &mut ChaCha8Rng, real: bool) -> HPoly {
        let mut p = HPoly::zero(d);
        for i in 0..dim_slots(d) {
            let im = if real { 0.0 } else { rng.random::<f64>() - 0.5 };
            p.set_coeff(
                Monomial::from_index(d, i),
                Complex64::new(rng.random::<f64>() - 0.5, im),
            );
        }
        p
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let v1 = Vector3::new(
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(0.5, 0.0),
        );
        let v2 = Vector3::new(
            Complex64::new(-3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 1.0),
        );
        let m = Multipole::new(Complex64::new(2.0, -1.0), vec![v1, v2], false);
        let mut again = m.clone();
        again.canonicalize();
        assert!(m.distance(&again) < 1e-14);
        for v in &m.vectors {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        // Expansion is preserved by canonicalization.
        let raw = Multipole {
            lambda: Complex64::new(2.0, -1.0),
            vectors: vec![v1, v2],
            real_mode: false,
        };
        assert!(m.expand().sub(&raw.expand()).norm() < 1e-12 * raw.expand().norm());
    }

    #[test]
    fn leading_multipole_of_a_factored_input() {
        // p = xy on the sphere with the parcelling from its own factors
        // gives λ = 1 and the axis vectors, with zero remainder.
        let sphere = QuadForm::sphere();
        let p = hp("x*y");
        let divisor = divisor_of(&p, &sphere, &tols()).unwrap();
        assert_eq!(divisor.points().len(), 4);
        // Find the parcelling whose lines are x and y: enumerate and pick
        // the one with remainder ~0 and axis vectors.
        let mu = MultiplicityFn::from_divisor(&divisor).unwrap();
        let mut hit = false;
        for parc in enumerate_parcellings(&mu).unwrap() {
            let Ok((w, r)) = leading_multipole(&p, &sphere, &divisor, &parc, true, &tols()) else {
                continue;
            };
            if r.norm() < 1e-9 {
                hit = true;
                assert!((w.lambda - Complex64::ONE).norm() < 1e-9);
                let ex = Vector3::new(Complex64::ONE, Complex64::ZERO, Complex64::ZERO);
                let ey = Vector3::new(Complex64::ZERO, Complex64::ONE, Complex64::ZERO);
                let d0 = w.vectors[0].clone() - ex;
                let d1 = w.vectors[1].clone() - ey;
                let d0b = w.vectors[0].clone() - ey;
                let d1b = w.vectors[1].clone() - ex;
                assert!(
                    (d0.norm() < 1e-8 && d1.norm() < 1e-8)
                        || (d0b.norm() < 1e-8 && d1b.norm() < 1e-8)
                );
            }
        }
        assert!(hit, "no parcelling reproduced the factorization");
    }

    #[test]
    fn z_squared_has_two_decompositions() {
        // z² = z·z and z² = −(x+iy)(x−iy) + Q.
        let sphere = QuadForm::sphere();
        let p = hp("z^2");
        let all = enumerate_decompositions(&p, &sphere, 1000, &tols()).unwrap();
        assert_eq!(all.len(), 2);

        // One of them is the tangent-tangent choice with λ = −1 and
        // remainder 1.
        let divisor = divisor_of(&p, &sphere, &tols()).unwrap();
        let mu = MultiplicityFn::from_divisor(&divisor).unwrap();
        let mut seen_tangent = false;
        let mut seen_split = false;
        for parc in enumerate_parcellings(&mu).unwrap() {
            let (w, r) = leading_multipole(&p, &sphere, &divisor, &parc, false, &tols()).unwrap();
            let is_tangent = parc.parcels().iter().all(|&(i, j)| i == j);
            if is_tangent {
                seen_tangent = true;
                // z² = −(x+iy)(x−iy) + Q: the product expands to −x²−y²
                // (λ = −1 on the unnormalized lines; scales live in λ here)
                // and the remainder is 1.
                let want = hp("x^2+y^2").scaled(-Complex64::ONE);
                assert!(w.expand().sub(&want).norm() < 1e-8, "product is −(x²+y²)");
                assert!((r.coeffs()[0] - Complex64::ONE).norm() < 1e-8, "r = 1");
            } else {
                seen_split = true;
                // The split parcelling realizes z·z with remainder 0.
                assert!((w.lambda - Complex64::ONE).norm() < 1e-8);
                assert!(r.norm() < 1e-8);
                let ez = Vector3::new(Complex64::ZERO, Complex64::ZERO, Complex64::ONE);
                for v in &w.vectors {
                    assert!((v - ez).norm() < 1e-7);
                }
            }
        }
        assert!(seen_tangent && seen_split);
    }

    #[test]
    fn decompose_reference_example() {
        // x² + y² − 2z² = Q − 3z² on the sphere: λ0 = 1 and λ2 = 3 with
        // vectors ±e_z.
        let sphere = QuadForm::sphere();
        let p = parse_poly("x^2+y^2-2*z^2").unwrap();
        let dec = decompose(&p, &sphere, Policy::Real, &tols()).unwrap();
        assert!(dec.unique);
        assert!(dec.residual < 1e-9, "residual {}", dec.residual);

        let w0 = &dec.multipoles[0];
        assert!((w0.lambda - Complex64::ONE).norm() < 1e-9);
        let w2 = &dec.multipoles[2];
        assert!((w2.lambda - Complex64::new(3.0, 0.0)).norm() < 1e-8);
        let ez = Vector3::new(Complex64::ZERO, Complex64::ZERO, Complex64::ONE);
        let d_plus = w2.vectors.iter().map(|v| (v + ez).norm()).fold(f64::INFINITY, f64::min);
        let d_minus = w2.vectors.iter().map(|v| (v - ez).norm()).fold(f64::INFINITY, f64::min);
        assert!(d_plus < 1e-7 && d_minus < 1e-7, "vectors are ±e_z");
        assert!(dec.multipoles[1].is_zero());

        // Evaluation: at (0,0,1), scale 1 → −2; scale 0 → λ0.
        let v = Vector3::new(Complex64::ZERO, Complex64::ZERO, Complex64::ONE);
        let val = dec.evaluate(&v, Complex64::ONE).unwrap();
        assert!((val - Complex64::new(-2.0, 0.0)).norm() < 1e-9);
        let val0 = dec.evaluate(&v, Complex64::ZERO).unwrap();
        assert!((val0 - Complex64::ONE).norm() < 1e-9);

        // Off-surface points are rejected.
        let off = Vector3::new(Complex64::ZERO, Complex64::ZERO, Complex64::new(2.0, 0.0));
        assert!(matches!(
            dec.evaluate(&off, Complex64::ONE),
            Err(Error::OffSurface { .. })
        ));
    }

    #[test]
    fn decompose_constants_and_degree_one() {
        let sphere = QuadForm::sphere();
        let dec = decompose(&parse_poly("7").unwrap(), &sphere, Policy::Real, &tols()).unwrap();
        assert_eq!(dec.multipoles.len(), 1);
        assert!((dec.multipoles[0].lambda - Complex64::new(7.0, 0.0)).norm() < 1e-12);

        let dec = decompose(&parse_poly("z").unwrap(), &sphere, Policy::Real, &tols()).unwrap();
        assert_eq!(dec.multipoles.len(), 2);
        assert!(dec.multipoles[0].is_zero());
        assert!((dec.multipoles[1].lambda - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn decompose_round_trip_random_real() {
        let sphere = QuadForm::sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for d in 2..=5usize {
            let p = Poly::from_parts(vec![
                random_hpoly(d, &mut rng, true),
                random_hpoly(d - 1, &mut rng, true),
            ]);
            let dec = decompose(&p, &sphere, Policy::Real, &tols()).unwrap();
            assert!(
                dec.residual <= 1e-8,
                "degree {d}: residual {}",
                dec.residual
            );
            // Product degrees follow the expected staircase shape.
            for (k, w) in dec.multipoles.iter().enumerate() {
                if !w.is_zero() {
                    assert_eq!(w.degree(), k);
                }
            }
        }
    }

    #[test]
    fn decompose_on_a_complex_form() {
        // Complex policy on a non-real quadratic form.
        let qh = hp("x^2+y^2+z^2+(0+1i)*x*y");
        let q = QuadForm::from_hpoly(&qh).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Poly::from_hpoly(random_hpoly(4, &mut rng, false));
        let dec = decompose(&p, &q, Policy::Complex, &tols()).unwrap();
        assert!(dec.residual <= 1e-8, "residual {}", dec.residual);
        assert!(!dec.unique);
    }

    #[test]
    fn real_policy_on_an_indefinite_form() {
        // Existence without uniqueness: real decomposition on a
        // hyperboloid. Real divisor points pair through real secant
        // lines, so the vectors stay real; the uniqueness flag is off.
        let q = QuadForm::from_hpoly(&hp("x^2+y^2-z^2")).unwrap();
        let p = parse_poly("x*y+z").unwrap();
        let dec = decompose(&p, &q, Policy::Real, &tols()).unwrap();
        assert!(!dec.unique);
        assert!(dec.residual <= 1e-8, "residual {}", dec.residual);
        for w in &dec.multipoles {
            for v in &w.vectors {
                let imag = (0..3).map(|i| v[i].im.abs()).fold(0.0, f64::max);
                assert!(imag < 1e-7, "vectors stay real on real parcels");
            }
        }

        // Random real inputs on the same surface round-trip as well.
        let mut rng = ChaCha8Rng::seed_from_u64(88);
        for d in 2..=4usize {
            let p = Poly::from_parts(vec![
                random_hpoly(d, &mut rng, true),
                random_hpoly(d - 1, &mut rng, true),
            ]);
            let dec = decompose(&p, &q, Policy::Real, &tols()).unwrap();
            assert!(dec.residual <= 1e-8, "degree {d}: residual {}", dec.residual);
        }
    }

    #[test]
    fn real_policy_rejects_bad_inputs() {
        let sphere = QuadForm::sphere();
        let p = parse_poly("(1+2i)*x").unwrap();
        assert!(decompose(&p, &sphere, Policy::Real, &tols()).is_err());

        let neg = QuadForm::from_hpoly(&hp("-x^2-y^2-z^2")).unwrap();
        assert!(decompose(&parse_poly("x").unwrap(), &neg, Policy::Real, &tols()).is_err());
    }

    #[test]
    fn enumeration_counts_match_double_factorials() {
        let sphere = QuadForm::sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for d in 2..=3usize {
            let raw = random_hpoly(d, &mut rng, false);
            let (h, _) = crate::harmonic::harmonic_split(&raw, &sphere).unwrap();
            let all = enumerate_decompositions(&h, &sphere, 10_000, &tols()).unwrap();
            let want: u128 = crate::parcelling::kappa(d as u32).unwrap() as u128;
            assert_eq!(all.len() as u128, want, "degree {d}");
        }
    }

    #[test]
    fn remainder_is_probe_independent() {
        // With the parcelling fixed, the remainder does not depend on the
        // probe point: recompute λ at several independent conic points and
        // rebuild the quotient each time.
        let sphere = QuadForm::sphere();
        let alpha = sphere.conic_param();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_hpoly(4, &mut rng, false);
        let divisor = divisor_of(&p, &sphere, &tols()).unwrap();
        let mu = MultiplicityFn::from_divisor(&divisor).unwrap();
        let parc = &enumerate_parcellings(&mu).unwrap()[0];
        let (w, r1) = leading_multipole(&p, &sphere, &divisor, parc, false, &tols()).unwrap();
        let product = w.expand().scaled(Complex64::ONE / w.lambda);
        for _ in 0..5 {
            // A fresh probe away from the divisor.
            let probe = loop {
                let t = ProjPoint::new(
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                );
                let clear = divisor
                    .points()
                    .iter()
                    .map(|(q, _)| q.chordal(&t))
                    .fold(f64::INFINITY, f64::min);
                if clear > 1e-3 {
                    break t;
                }
            };
            let x = alpha.unit_image(&probe);
            let lambda2 = p.eval(&x) / product.eval(&x);
            let residue = p.sub(&product.scaled(lambda2));
            let r2 = divide_by_form(&residue, &sphere.as_hpoly(), 1e-9).unwrap();
            assert!(
                r1.sub(&r2).norm() <= 1e-8 * r1.norm().max(1.0),
                "remainder moved with the probe"
            );
        }
    }

    #[test]
    fn canonical_vectors_are_orthogonally_equivariant() {
        // For real definite Q and U preserving Q, the canonical vectors of
        // p∘U are the canonical vectors of p times Uᵀ (row convention),
        // after re-canonicalization.
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let g = nalgebra::Matrix3::<f64>::from_fn(|_, _| rng.random::<f64>() - 0.5);
        let spd = g * g.transpose() + nalgebra::Matrix3::identity() * 0.4;
        let q = QuadForm::from_matrix(spd.map(|t| Complex64::new(t, 0.0))).unwrap();
        let a = q.reduction().a;
        let a_inv = *q.reduction_inv();
        for trial in 0..10 {
            // U = A·O·A⁻¹ is real for a real reduction of a definite form.
            let o = nalgebra::Matrix3::<f64>::from_fn(|_, _| rng.random::<f64>() - 0.5)
                .qr()
                .q()
                .map(|t| Complex64::new(t, 0.0));
            let u = a * o * a_inv;
            assert!(u.iter().map(|c| c.im.abs()).fold(0.0, f64::max) < 1e-10);

            let d = 2 + trial % 3;
            let p = Poly::from_hpoly(random_hpoly(d, &mut rng, true));
            let pu = Poly::from_hpoly(p.parts()[0].compose_linear(&u));
            let dec = decompose(&p, &q, Policy::Real, &tols()).unwrap();
            let dec_u = decompose(&pu, &q, Policy::Real, &tols()).unwrap();
            for (w, wu) in dec.multipoles.iter().zip(&dec_u.multipoles) {
                if w.is_zero() {
                    assert!(wu.is_zero());
                    continue;
                }
                // Transform w's vectors by Uᵀ (columns: U·v) and
                // re-canonicalize before comparing.
                let moved = Multipole::new(
                    w.lambda,
                    w.vectors.iter().map(|v| u * v).collect(),
                    true,
                );
                assert!(
                    moved.distance(wu) <= 1e-7,
                    "equivariance broke at degree {} (distance {})",
                    w.degree(),
                    moved.distance(wu)
                );
            }
        }
    }

    #[test]
    fn decompose_handles_divisible_chains() {
        let sphere = QuadForm::sphere();
        let q = sphere.as_hpoly();

        // p = Q²: every slot above zero is empty and λ₀ = 1.
        let p = Poly::from_hpoly(q.mul(&q));
        let dec = decompose(&p, &sphere, Policy::Real, &tols()).unwrap();
        assert!((dec.multipoles[0].lambda - Complex64::ONE).norm() < 1e-10);
        for k in 1..=4 {
            assert!(dec.multipoles[k].is_zero(), "slot {k}");
        }
        assert!(dec.residual < 1e-9);

        // p = Q·(x+z) + z: the top level divides out and the rest lands in
        // the degree-1 slot as (x+2z)… no: Q(x+z) + z ≡ x + 2z on {Q=1}.
        let xz = hp("x+z");
        let p = Poly::from_hpoly(q.mul(&xz)).add(&parse_poly("z").unwrap());
        let dec = decompose(&p, &sphere, Policy::Real, &tols()).unwrap();
        assert!(dec.multipoles[3].is_zero());
        let w1 = &dec.multipoles[1];
        let want = hp("x+2*z");
        let got = w1.expand();
        assert!(got.sub(&want).norm() < 1e-9, "degree-1 slot is x+2z");
        assert!(dec.residual < 1e-9);

        // The zero polynomial decomposes to a single zero slot.
        let dec = decompose(&Poly::zero(), &sphere, Policy::Real, &tols()).unwrap();
        assert_eq!(dec.multipoles.len(), 1);
        assert!(dec.multipoles[0].is_zero());
    }

    #[test]
    fn enumerate_handles_triple_points_at_default_tolerance() {
        // z³ meets the conic in two triple points; the certified merging
        // must recover μ = {3,3} at the default clustering radius, giving
        // the two decompositions z·z·z and tangent·tangent·secant.
        let sphere = QuadForm::sphere();
        let p = hp("z^3");
        let divisor = divisor_of(&p, &sphere, &tols()).unwrap();
        assert_eq!(divisor.points().len(), 2);
        assert!(divisor.points().iter().all(|(_, m)| *m == 3));
        let all = enumerate_decompositions(&p, &sphere, 100, &tols()).unwrap();
        assert_eq!(all.len(), 2);
        for w in &all {
            assert_eq!(w.degree(), 3);
            // Each leading product differs from p by a multiple of Q.
            let residue = p.sub(&w.expand());
            assert!(divide_by_form(&residue, &sphere.as_hpoly(), 1e-8).is_ok());
        }
    }

    #[test]
    fn divisible_input_is_rejected() {
        let sphere = QuadForm::sphere();
        let p = sphere.as_hpoly().mul(&hp("x"));
        assert!(matches!(
            divisor_of(&p, &sphere, &tols()),
            Err(Error::DivisibleInput)
        ));
    }
}
