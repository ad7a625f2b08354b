//! Numerical decomposition of polynomials on quadratic surfaces into
//! multipoles.
//!
//! A polynomial restricted to a surface `{Q(x, y, z) = 1}` (with `Q` a
//! nondegenerate quadratic form, real or complex) can be rewritten as a sum
//! of products of linear forms, one product per degree. The coefficient
//! vectors of those linear forms are the *multipole vectors* of the
//! polynomial. This crate computes such decompositions and the supporting
//! machinery:
//!
//! - dense trivariate polynomial arithmetic with certified division
//!   ([`poly`]),
//! - quadratic-form bookkeeping, the second-order operator `Δ_Q` and a
//!   rational parametrization of the conic `{Q = 0}` ([`quadform`]),
//! - `Q`-harmonic splitting and a polynomial Dirichlet solver
//!   ([`harmonic`]),
//! - projective root-finding on the conic with multiplicity clustering
//!   ([`conic`]),
//! - the pairing combinatorics that label the finitely many decompositions
//!   ([`parcelling`]),
//! - the decomposition engine itself ([`decompose`]),
//! - Maxwell directional-derivative representations ([`maxwell`]),
//! - ramification and fiber-counting diagnostics ([`ramification`]),
//! - surface quadrature, orthonormal harmonic bases and Fourier components
//!   ([`quadrature`]).
//!
//! All scalars are `f64` complex pairs; every certification is numeric with
//! explicit tolerances (see [`config::Tolerances`]).
//!
//! ```
//! use multipole::{decompose, parse_poly, Policy, QuadForm, Tolerances};
//!
//! // On the unit sphere, x² + y² − 2z² = 1 − 3z².
//! let p = parse_poly("x^2+y^2-2*z^2").unwrap();
//! let sphere = QuadForm::sphere();
//! let dec = decompose::decompose(&p, &sphere, Policy::Real, &Tolerances::default()).unwrap();
//! assert!(dec.unique);
//! assert!((dec.multipoles[0].lambda.re - 1.0).abs() < 1e-8);
//! assert!((dec.multipoles[2].lambda.re - 3.0).abs() < 1e-8);
//! assert!(dec.residual < 1e-9);
//! ```

pub mod config;
pub mod conic;
pub mod decompose;
pub mod error;
pub mod harmonic;
pub mod linalg;
pub mod maxwell;
pub mod parcelling;
pub mod parse;
pub mod poly;
pub mod quadform;
pub mod quadrature;
pub mod ramification;

pub use config::Tolerances;
pub use conic::{BinaryForm, ConicDivisor, ConicParam, ProjPoint};
pub use decompose::{Decomposition, Multipole, Policy};
pub use error::{Error, Result};
pub use harmonic::HarmonicDecomposition;
pub use num_complex::Complex64;
pub use parcelling::{GenParcelling, MultiplicityFn};
pub use parse::{format_poly, parse_poly};
pub use poly::{HPoly, Monomial, Poly};
pub use quadform::QuadForm;
