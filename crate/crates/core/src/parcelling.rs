//! Combinatorics of (generalized) parcellings of multiplicity functions:
//! enumeration, counting, and canonical selection.
//!
//! A parcel assigns total weight 2 to the points of a divisor, either as a
//! pair of distinct points (a secant line) or as weight 2 at one point (a
//! tangent line). A generalized parcelling splits the whole multiplicity
//! function into such parcels.

use num_complex::Complex64;

use crate::config::PARCEL_L1_LIMIT;
use crate::conic::{ConicDivisor, ConicParam};
use crate::error::{Error, Result};

/// `κ(d) = (2d−1)!! = (2d)!/(2^d·d!)`, the number of pairings of `2d`
/// simple points. `κ(0) = 1` by the empty-product convention.
///
/// ```
/// assert_eq!(multipole::parcelling::kappa(3).unwrap(), 15);
/// assert!(multipole::parcelling::kappa(17).is_err());
/// ```
pub fn kappa(d: u32) -> Result<u64> {
    if d > 16 {
        return Err(Error::Overflow { d });
    }
    let mut acc: u64 = 1;
    for k in 1..=d as u64 {
        acc *= 2 * k - 1;
    }
    Ok(acc)
}

/// Multiplicities aligned with a [`ConicDivisor`]'s points. The ℓ₁ norm is
/// even for intersection divisors (`2d` in total).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityFn {
    entries: Vec<u32>,
}

impl MultiplicityFn {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.contains(&0) {
            return Err(Error::Invalid("multiplicities must be positive".into()));
        }
        if entries.iter().sum::<u32>() % 2 != 0 {
            return Err(Error::Invalid("total multiplicity must be even".into()));
        }
        Ok(MultiplicityFn { entries })
    }

    pub fn from_divisor(div: &ConicDivisor) -> Result<Self> {
        MultiplicityFn::new(div.multiplicities())
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn l1(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One weight-2 parcel, encoded as an ordered index pair `(i, j)` with
/// `i ≤ j`; `i == j` is a weight-2 parcel at one point.
pub type Parcel = (usize, usize);

/// A generalized parcelling: a multiset of parcels whose weights sum to the
/// multiplicity function pointwise. Parcels are kept sorted, which makes
/// the encoding canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GenParcelling {
    parcels: Vec<Parcel>,
}

impl GenParcelling {
    pub fn new(mut parcels: Vec<Parcel>) -> Self {
        for p in &mut parcels {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        parcels.sort();
        GenParcelling { parcels }
    }

    pub fn parcels(&self) -> &[Parcel] {
        &self.parcels
    }

    pub fn len(&self) -> usize {
        self.parcels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parcels.is_empty()
    }

    /// Check both defining conditions against `mu` exactly.
    pub fn is_parcelling_of(&self, mu: &MultiplicityFn) -> bool {
        let mut acc = vec![0u32; mu.len()];
        for &(i, j) in &self.parcels {
            if i >= mu.len() || j >= mu.len() {
                return false;
            }
            acc[i] += 1;
            acc[j] += 1;
        }
        acc == mu.entries()
    }
}

fn enumerate_rec(
    remaining: &mut [u32],
    min_parcel: Parcel,
    current: &mut Vec<Parcel>,
    out: &mut Vec<GenParcelling>,
) {
    let Some(i) = remaining.iter().position(|&m| m > 0) else {
        out.push(GenParcelling {
            parcels: current.clone(),
        });
        return;
    };
    // Parcels are emitted in nondecreasing order, so each multiset of
    // parcels is produced exactly once.
    let floor = if min_parcel.0 == i { min_parcel } else { (i, i) };
    if floor <= (i, i) && remaining[i] >= 2 {
        remaining[i] -= 2;
        current.push((i, i));
        enumerate_rec(remaining, (i, i), current, out);
        current.pop();
        remaining[i] += 2;
    }
    let j_start = floor.1.max(i + 1);
    for j in j_start..remaining.len() {
        if remaining[j] == 0 {
            continue;
        }
        remaining[i] -= 1;
        remaining[j] -= 1;
        current.push((i, j));
        enumerate_rec(remaining, (i, j), current, out);
        current.pop();
        remaining[i] += 1;
        remaining[j] += 1;
    }
}

/// Exhaustive, duplicate-free enumeration of the generalized parcellings of
/// `mu`, in lexicographic order of their sorted parcel encodings.
pub fn enumerate_parcellings(mu: &MultiplicityFn) -> Result<Vec<GenParcelling>> {
    if mu.l1() > PARCEL_L1_LIMIT {
        return Err(Error::ExplosionGuard {
            size: mu.l1() as u128,
            limit: PARCEL_L1_LIMIT as u128,
        });
    }
    let mut remaining = mu.entries().to_vec();
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate_rec(&mut remaining, (0, 0), &mut current, &mut out);
    Ok(out)
}

fn count_rec(remaining: &mut [u32], min_parcel: Parcel) -> u128 {
    let Some(i) = remaining.iter().position(|&m| m > 0) else {
        return 1;
    };
    let mut total = 0u128;
    let floor = if min_parcel.0 == i { min_parcel } else { (i, i) };
    if floor <= (i, i) && remaining[i] >= 2 {
        remaining[i] -= 2;
        total += count_rec(remaining, (i, i));
        remaining[i] += 2;
    }
    let j_start = floor.1.max(i + 1);
    for j in j_start..remaining.len() {
        if remaining[j] == 0 {
            continue;
        }
        remaining[i] -= 1;
        remaining[j] -= 1;
        total += count_rec(remaining, (i, j));
        remaining[i] += 1;
        remaining[j] += 1;
    }
    total
}

/// `κ(μ)`: the number of distinct generalized parcellings, without
/// materializing them.
pub fn count_parcellings(mu: &MultiplicityFn) -> u128 {
    let mut remaining = mu.entries().to_vec();
    count_rec(&mut remaining, (0, 0))
}

/// Policy for picking one parcelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParcellingMode {
    /// Equivariant pairing under the conic's real structure: each point
    /// pairs with its conjugate (unique when the conic has no real
    /// points); real points fill tangent self-parcels and any odd
    /// leftovers pair with each other through real secant lines.
    RealDefinite,
    /// Deterministic tie-break: weight-2 parcels at multiple points first,
    /// then greedy pairing in `(arg, modulus)` order of `u1/u0`.
    Generic,
}

/// The conjugation involution of the divisor under the conic's real
/// structure: index `i` maps to the point whose image on the conic is the
/// complex conjugate of `α(p_i)`.
pub fn conjugation_involution(
    div: &ConicDivisor,
    alpha: &ConicParam,
    tol: f64,
) -> Result<Vec<usize>> {
    let pts = div.points();
    let images: Vec<_> = pts.iter().map(|(p, _)| alpha.unit_image(p)).collect();
    let mut sigma = vec![usize::MAX; pts.len()];
    for (i, img) in images.iter().enumerate() {
        let conj = img.map(|c| c.conj());
        let mut best = (usize::MAX, f64::INFINITY);
        for (j, cand) in images.iter().enumerate() {
            // Fubini–Study distance between projective points of ℂP².
            let dot: Complex64 = conj.dotc(cand);
            let dist = (1.0 - dot.norm_sqr().min(1.0)).sqrt();
            if dist < best.1 {
                best = (j, dist);
            }
        }
        if best.1 > tol {
            return Err(Error::NotConjugateClosed);
        }
        sigma[i] = best.0;
    }
    // Must be an involution preserving multiplicities.
    for (i, &j) in sigma.iter().enumerate() {
        if sigma[j] != i || pts[i].1 != pts[j].1 {
            return Err(Error::NotConjugateClosed);
        }
    }
    Ok(sigma)
}

/// Pick the canonical parcelling of a divisor.
pub fn canonical_parcelling(
    div: &ConicDivisor,
    mode: ParcellingMode,
    alpha: &ConicParam,
    conj_tol: f64,
) -> Result<GenParcelling> {
    match mode {
        ParcellingMode::RealDefinite => {
            let sigma = conjugation_involution(div, alpha, conj_tol)?;
            let mut parcels = Vec::new();
            // Real (conjugation-fixed) points: even multiplicity sits in
            // tangent self-parcels; odd leftovers pair with each other
            // through real secant lines, in canonical point order.
            let mut real_leftovers = Vec::new();
            for (i, &(_, m)) in div.points().iter().enumerate() {
                let j = sigma[i];
                if j == i {
                    parcels.extend(std::iter::repeat_n((i, i), m / 2));
                    if m % 2 != 0 {
                        real_leftovers.push(i);
                    }
                } else if i < j {
                    parcels.extend(std::iter::repeat_n((i, j), m));
                }
            }
            // A conjugation-closed divisor always leaves an even number of
            // odd real points (the non-real part has even total).
            if real_leftovers.len() % 2 != 0 {
                return Err(Error::NotConjugateClosed);
            }
            for pair in real_leftovers.chunks(2) {
                parcels.push((pair[0], pair[1]));
            }
            Ok(GenParcelling::new(parcels))
        }
        ParcellingMode::Generic => {
            let mut parcels = Vec::new();
            let mut leftovers = Vec::new();
            for (i, &(p, m)) in div.points().iter().enumerate() {
                parcels.extend(std::iter::repeat_n((i, i), m / 2));
                if m % 2 == 1 {
                    let (arg, modulus) = if p.u0.norm() < 1e-14 {
                        (0.0, f64::INFINITY)
                    } else {
                        let r = p.u1 / p.u0;
                        (r.arg(), r.norm())
                    };
                    leftovers.push((arg, modulus, i));
                }
            }
            leftovers.sort_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap()
                    .then(a.1.partial_cmp(&b.1).unwrap())
            });
            debug_assert!(leftovers.len() % 2 == 0);
            for pair in leftovers.chunks(2) {
                parcels.push((pair[0].2, pair[1].2));
            }
            Ok(GenParcelling::new(parcels))
        }
    }
}

/// All parcellings each of whose parcels is invariant under the conjugation
/// involution (so each parcel's line is real).
pub fn enumerate_equivariant_parcellings(
    div: &ConicDivisor,
    alpha: &ConicParam,
    conj_tol: f64,
) -> Result<Vec<GenParcelling>> {
    let sigma = conjugation_involution(div, alpha, conj_tol)?;
    let mu = MultiplicityFn::from_divisor(div)?;
    let all = enumerate_parcellings(&mu)?;
    Ok(all
        .into_iter()
        .filter(|p| {
            p.parcels().iter().all(|&(i, j)| {
                (sigma[i] == j && sigma[j] == i) || (i == j && sigma[i] == i)
            })
        })
        .collect())
}
