//! Command-line surface for multipole decompositions on quadratic
//! surfaces. One binary, subcommand per operation, deterministic JSON
//! output (`--json`) with a versioned schema.

use clap::{Args, Parser, Subcommand};
use multipole::conic::ProjPoint;
use multipole::decompose::{decompose, enumerate_decompositions, Multipole, Policy};
use multipole::harmonic::{dirichlet_solve, harmonic_decompose, verify_dirichlet};
use multipole::maxwell::{maxwell_apply, maxwell_from_harmonic};
use multipole::parcelling::{count_parcellings, enumerate_parcellings, MultiplicityFn};
use multipole::poly::{HPoly, Poly};
use multipole::quadrature::{fourier_components, SurfaceGrid};
use multipole::ramification::{
    dim_defect, gamma_fiber, is_ramified, tangent_nullity, PencilCenter, PencilDivisor,
};
use multipole::{format_poly, parse_poly, Complex64, Error, QuadForm, Tolerances};
use nalgebra::Vector3;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "multipole",
    about = "Decompose polynomials on quadratic surfaces {Q = 1} into products of linear forms",
    version
)]
struct Cli {
    /// Emit machine-readable JSON (schema 1); identical inputs and seed
    /// produce byte-identical output.
    #[arg(long, global = true)]
    json: bool,

    /// Quadratic form as a polynomial expression, e.g. "x^2+y^2+z^2".
    #[arg(long, global = true)]
    quadform: Option<String>,

    /// Quadratic form as JSON upper-triangle entries
    /// `[[re,im]×6]` = `[b00, b01, b02, b11, b12, b22]`.
    #[arg(long, global = true, conflicts_with = "quadform")]
    quadform_matrix: Option<String>,

    /// Chordal clustering radius for projective roots.
    #[arg(long, global = true)]
    cluster_tol: Option<f64>,

    /// Relative divisibility-certification tolerance.
    #[arg(long, global = true)]
    div_tol: Option<f64>,

    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,

    /// Seed for sampled diagnostics (env QM_SEED overrides the default).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print the numeric defaults and exit.
    #[arg(long, global = true)]
    show_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a polynomial on {Q = 1} into multipoles.
    Decompose(DecomposeArgs),
    /// Q-harmonic components of a homogeneous polynomial.
    Harmonics(HarmonicsArgs),
    /// Solve the polynomial Dirichlet problem {Δ_Q P = M, P|_S = N|_S}.
    Dirichlet(DirichletArgs),
    /// Maxwell directional-derivative representations.
    Maxwell(MaxwellArgs),
    /// Count or enumerate generalized parcellings of a multiplicity list.
    Parcellings(ParcellingsArgs),
    /// Test whether a set of lines meets the conic with a multiple point.
    Ramified(FormsArgs),
    /// Dimension of non-obvious first-order deformations of a line set.
    Nullity(FormsArgs),
    /// Enumerate fibers of the pencil projection over a line divisor.
    GammaFibers(GammaFibersArgs),
    /// Dimension defect of factorization spaces on degree-l surfaces.
    Dims(DimsArgs),
    /// Fourier components of a polynomial or sampled function.
    Fourier(FourierArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// Polynomial expression.
    #[arg(long)]
    poly: String,
    /// Canonical policy: real (unique on definite forms) or complex.
    #[arg(long, default_value = "real")]
    policy: String,
    /// Enumerate all leading multipoles instead (homogeneous input only).
    #[arg(long)]
    enumerate: bool,
    /// Enumeration cap on the parcelling count.
    #[arg(long, default_value_t = 10_000)]
    cap: u128,
}

#[derive(Args)]
struct HarmonicsArgs {
    #[arg(long)]
    poly: String,
}

#[derive(Args)]
struct DirichletArgs {
    /// Right-hand side M of Δ_Q P = M.
    #[arg(long)]
    laplacian: String,
    /// Boundary values N on {Q = 1}.
    #[arg(long)]
    boundary: String,
}

#[derive(Args)]
struct MaxwellArgs {
    /// Directions as JSON `[[[re,im],[re,im],[re,im]], ...]`; emits the
    /// resulting polynomial.
    #[arg(long, conflicts_with = "represent")]
    apply: Option<String>,
    /// Recover directions and scalar for a harmonic polynomial.
    #[arg(long, requires = "poly")]
    represent: bool,
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Args)]
struct ParcellingsArgs {
    /// Comma-separated multiplicities, e.g. 1,1,1,1.
    #[arg(long)]
    mults: String,
    #[arg(long, conflicts_with = "enumerate")]
    count_only: bool,
    #[arg(long)]
    enumerate: bool,
}

#[derive(Args)]
struct FormsArgs {
    /// A linear form, repeatable: polynomial expression of degree 1.
    #[arg(long = "form", required = true)]
    forms: Vec<String>,
}

#[derive(Args)]
struct GammaFibersArgs {
    /// Pencil center as JSON `[[re,im],[re,im],[re,im]]`.
    #[arg(long)]
    center: String,
    /// A line through the center (JSON 3-vector), repeatable.
    #[arg(long = "line", required = true)]
    lines: Vec<String>,
    /// Comma-separated multiplicities, one per line (default all 1).
    #[arg(long)]
    mults: Option<String>,
}

#[derive(Args)]
struct DimsArgs {
    #[arg(long)]
    quadform_degree: u32,
    /// Comma-separated partition, e.g. 3,3.
    #[arg(long)]
    partition: String,
}

#[derive(Args)]
struct FourierArgs {
    /// Polynomial expression to analyze.
    #[arg(long, conflicts_with = "samples")]
    poly: Option<String>,
    /// CSV of `theta,phi,re[,im]` samples on the quadrature grid.
    #[arg(long)]
    samples: Option<String>,
    /// Highest component degree.
    #[arg(long, default_value_t = 6)]
    kmax: usize,
    /// Quadrature order (default: kmax + 2).
    #[arg(long)]
    order: Option<usize>,
    /// Print the quadrature grid (theta,phi,weight CSV) and exit.
    #[arg(long)]
    emit_grid: bool,
}

// --------------------------------------------------------------------------
// JSON payloads
// --------------------------------------------------------------------------

fn c_pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn vec3_json(v: &Vector3<Complex64>) -> [[f64; 2]; 3] {
    [c_pair(v[0]), c_pair(v[1]), c_pair(v[2])]
}

#[derive(Serialize)]
struct PointJson {
    u: [f64; 4],
}

fn point_json(p: &ProjPoint) -> PointJson {
    PointJson {
        u: [p.u0.re, p.u0.im, p.u1.re, p.u1.im],
    }
}

#[derive(Serialize)]
struct DivisorPointJson {
    u: [f64; 4],
    mult: usize,
}

#[derive(Serialize)]
struct SurfaceJson {
    upper_triangle: [[f64; 2]; 6],
}

fn surface_json(q: &QuadForm) -> SurfaceJson {
    let e = q.upper_triangle();
    SurfaceJson {
        upper_triangle: [
            c_pair(e[0]),
            c_pair(e[1]),
            c_pair(e[2]),
            c_pair(e[3]),
            c_pair(e[4]),
            c_pair(e[5]),
        ],
    }
}

#[derive(Serialize)]
struct MultipoleJson {
    degree: usize,
    lambda: [f64; 2],
    vectors: Vec<[[f64; 2]; 3]>,
}

fn multipole_json(w: &Multipole) -> MultipoleJson {
    MultipoleJson {
        degree: w.degree(),
        lambda: c_pair(w.lambda),
        vectors: w.vectors.iter().map(vec3_json).collect(),
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: u32,
    command: &'static str,
    seed: u64,
    result: T,
}

#[derive(Serialize)]
struct ErrorJson {
    schema: u32,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

fn emit<T: Serialize>(json: bool, command: &'static str, seed: u64, result: T, human: String) {
    if json {
        let env = Envelope {
            schema: 1,
            command,
            seed,
            result,
        };
        println!("{}", serde_json::to_string(&env).expect("serialize"));
    } else {
        println!("{human}");
    }
}

// --------------------------------------------------------------------------
// Input parsing helpers
// --------------------------------------------------------------------------

fn parse_hpoly(text: &str) -> Result<HPoly, Error> {
    let p = parse_poly(text)?;
    match p.parts() {
        [single] => Ok(single.clone()),
        _ => Err(Error::Invalid(format!(
            "expected a homogeneous polynomial, got degrees {:?}",
            p.parts().iter().map(|h| h.degree()).collect::<Vec<_>>()
        ))),
    }
}

fn parse_linear_form(text: &str) -> Result<Vector3<Complex64>, Error> {
    let h = parse_hpoly(text)?;
    if h.degree() != 1 {
        return Err(Error::Invalid(format!(
            "expected a linear form, got degree {}",
            h.degree()
        )));
    }
    Ok(Vector3::new(h.coeffs()[0], h.coeffs()[1], h.coeffs()[2]))
}

fn parse_c_pair(v: &serde_json::Value) -> Result<Complex64, Error> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Invalid("expected [re, im]".into()))?;
    let re = arr[0]
        .as_f64()
        .ok_or_else(|| Error::Invalid("expected a number".into()))?;
    let im = arr[1]
        .as_f64()
        .ok_or_else(|| Error::Invalid("expected a number".into()))?;
    Ok(Complex64::new(re, im))
}

fn parse_cvec3(text: &str) -> Result<Vector3<Complex64>, Error> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| Error::Invalid("expected a JSON 3-vector".into()))?;
    Ok(Vector3::new(
        parse_c_pair(&arr[0])?,
        parse_c_pair(&arr[1])?,
        parse_c_pair(&arr[2])?,
    ))
}

fn parse_mults(text: &str) -> Result<Vec<u32>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| Error::Invalid(format!("bad multiplicity {s:?}: {e}")))
        })
        .collect()
}

fn quadform_from_flags(cli: &Cli) -> Result<QuadForm, Error> {
    if let Some(text) = &cli.quadform_matrix {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
        let arr = v
            .as_array()
            .filter(|a| a.len() == 6)
            .ok_or_else(|| Error::Invalid("expected 6 upper-triangle entries".into()))?;
        let mut e = [Complex64::ZERO; 6];
        for (slot, item) in e.iter_mut().zip(arr) {
            *slot = parse_c_pair(item)?;
        }
        return QuadForm::from_upper_triangle(&e);
    }
    let text = cli.quadform.as_deref().unwrap_or("x^2+y^2+z^2");
    QuadForm::from_hpoly(&parse_hpoly(text)?)
}

fn tolerances_from_flags(cli: &Cli) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(v) = cli.cluster_tol {
        t.cluster_tol = v;
    }
    if let Some(v) = cli.div_tol {
        t.div_tol = v;
    }
    if let Some(v) = cli.rank_tol {
        t.rank_tol = v;
    }
    t
}

// --------------------------------------------------------------------------
// Subcommand bodies
// --------------------------------------------------------------------------

fn run(cli: &Cli, seed: u64) -> Result<(), Error> {
    let tols = tolerances_from_flags(cli);

    if cli.show_config {
        #[derive(Serialize)]
        struct Config<'a> {
            schema: u32,
            tolerances: &'a Tolerances,
            seed: u64,
            parcel_l1_limit: u32,
            fiber_mult_limit: usize,
            surface_samples: usize,
        }
        let cfg = Config {
            schema: 1,
            tolerances: &tols,
            seed,
            parcel_l1_limit: multipole::config::PARCEL_L1_LIMIT,
            fiber_mult_limit: multipole::config::FIBER_MULT_LIMIT,
            surface_samples: multipole::config::SURFACE_SAMPLES,
        };
        println!("{}", serde_json::to_string_pretty(&cfg).expect("serialize"));
        return Ok(());
    }

    let Some(command) = &cli.command else {
        return Err(Error::Invalid(
            "no subcommand; see --help for the list".into(),
        ));
    };

    match command {
        Command::Decompose(args) => {
            let q = quadform_from_flags(cli)?;
            let policy = match args.policy.as_str() {
                "real" => Policy::Real,
                "complex" => Policy::Complex,
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown policy {other:?}; use real or complex"
                    )))
                }
            };
            if args.enumerate {
                let h = parse_hpoly(&args.poly)?;
                let all = enumerate_decompositions(&h, &q, args.cap, &tols)?;
                #[derive(Serialize)]
                struct Out {
                    surface: SurfaceJson,
                    count: usize,
                    multipoles: Vec<MultipoleJson>,
                }
                let human = format!("{} distinct leading multipoles", all.len());
                emit(
                    cli.json,
                    "decompose",
                    seed,
                    Out {
                        surface: surface_json(&q),
                        count: all.len(),
                        multipoles: all.iter().map(multipole_json).collect(),
                    },
                    human,
                );
                return Ok(());
            }
            let p = parse_poly(&args.poly)?;
            let dec = decompose(&p, &q, policy, &tols)?;
            #[derive(Serialize)]
            struct Out {
                surface: SurfaceJson,
                policy: &'static str,
                unique: bool,
                multipoles: Vec<MultipoleJson>,
                residual: f64,
            }
            let mut human = String::new();
            for (k, w) in dec.multipoles.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                human.push_str(&format!(
                    "degree {k}: lambda = {:+.6}{:+.6}i, vectors:\n",
                    w.lambda.re, w.lambda.im
                ));
                for v in &w.vectors {
                    human.push_str(&format!(
                        "  ({:+.6}{:+.6}i, {:+.6}{:+.6}i, {:+.6}{:+.6}i)\n",
                        v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im
                    ));
                }
            }
            human.push_str(&format!(
                "re-expansion residual {:.3e}, unique: {}",
                dec.residual, dec.unique
            ));
            emit(
                cli.json,
                "decompose",
                seed,
                Out {
                    surface: surface_json(&q),
                    policy: if policy == Policy::Real { "real" } else { "complex" },
                    unique: dec.unique,
                    multipoles: dec.multipoles.iter().map(multipole_json).collect(),
                    residual: dec.residual,
                },
                human,
            );
        }
        Command::Harmonics(args) => {
            let q = quadform_from_flags(cli)?;
            let p = parse_hpoly(&args.poly)?;
            let dec = harmonic_decompose(&p, &q)?;
            #[derive(Serialize)]
            struct Component {
                degree: usize,
                poly: String,
                harmonic_residual: f64,
            }
            #[derive(Serialize)]
            struct Out {
                components: Vec<Component>,
                resum_residual: f64,
            }
            let comps: Vec<Component> = dec
                .components()
                .map(|(k, f)| Component {
                    degree: k,
                    poly: format_poly(&Poly::from_hpoly(f.clone())),
                    harmonic_residual: if f.norm() > 0.0 {
                        q.laplacian(f).norm() / f.norm()
                    } else {
                        0.0
                    },
                })
                .collect();
            let resum = dec.resum(&q).sub(&p).norm() / p.norm().max(1.0);
            let human = comps
                .iter()
                .map(|c| {
                    format!(
                        "degree {}: {} (Δ residual {:.2e})",
                        c.degree, c.poly, c.harmonic_residual
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                cli.json,
                "harmonics",
                seed,
                Out {
                    components: comps,
                    resum_residual: resum,
                },
                format!("{human}\nresum residual {resum:.3e}"),
            );
        }
        Command::Dirichlet(args) => {
            let q = quadform_from_flags(cli)?;
            let m = parse_poly(&args.laplacian)?;
            let n = parse_poly(&args.boundary)?;
            let p = dirichlet_solve(&m, &n, &q)?;
            let rep = verify_dirichlet(&p, &m, &n, &q, seed);
            #[derive(Serialize)]
            struct Out {
                solution: String,
                laplacian_residual: f64,
                surface_residual: f64,
            }
            let text = format_poly(&p);
            emit(
                cli.json,
                "dirichlet",
                seed,
                Out {
                    solution: text.clone(),
                    laplacian_residual: rep.laplacian_residual,
                    surface_residual: rep.surface_residual,
                },
                format!(
                    "P = {text}\nlaplacian residual {:.3e}, surface residual {:.3e}",
                    rep.laplacian_residual, rep.surface_residual
                ),
            );
        }
        Command::Maxwell(args) => {
            let q = quadform_from_flags(cli)?;
            if let Some(dirs_text) = &args.apply {
                let v: serde_json::Value = serde_json::from_str(dirs_text)
                    .map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
                let arr = v
                    .as_array()
                    .ok_or_else(|| Error::Invalid("expected a JSON array of 3-vectors".into()))?;
                let mut dirs = Vec::new();
                for item in arr {
                    let inner = item
                        .as_array()
                        .filter(|a| a.len() == 3)
                        .ok_or_else(|| Error::Invalid("expected a 3-vector".into()))?;
                    dirs.push(Vector3::new(
                        parse_c_pair(&inner[0])?,
                        parse_c_pair(&inner[1])?,
                        parse_c_pair(&inner[2])?,
                    ));
                }
                let n = maxwell_apply(&q, &dirs);
                #[derive(Serialize)]
                struct Out {
                    poly: String,
                }
                let text = format_poly(&Poly::from_hpoly(n));
                emit(cli.json, "maxwell", seed, Out { poly: text.clone() }, text);
            } else if args.represent {
                let p = parse_hpoly(args.poly.as_deref().unwrap())?;
                let rep = maxwell_from_harmonic(&p, &q, &tols)?;
                #[derive(Serialize)]
                struct Out {
                    dirs: Vec<[[f64; 2]; 3]>,
                    lambda: [f64; 2],
                    distance: f64,
                    parcelling_index: usize,
                }
                let human = format!(
                    "{} directions, lambda = {:+.6}{:+.6}i, certificate {:.3e}",
                    rep.dirs.len(),
                    rep.lambda.re,
                    rep.lambda.im,
                    rep.distance
                );
                emit(
                    cli.json,
                    "maxwell",
                    seed,
                    Out {
                        dirs: rep.dirs.iter().map(vec3_json).collect(),
                        lambda: c_pair(rep.lambda),
                        distance: rep.distance,
                        parcelling_index: rep.parcelling_index,
                    },
                    human,
                );
            } else {
                return Err(Error::Invalid("use --apply or --represent".into()));
            }
        }
        Command::Parcellings(args) => {
            let mults = parse_mults(&args.mults)?;
            let mu = MultiplicityFn::new(mults)?;
            if args.count_only || !args.enumerate {
                let count = count_parcellings(&mu);
                #[derive(Serialize)]
                struct Out {
                    count: String,
                }
                emit(
                    cli.json,
                    "parcellings",
                    seed,
                    Out {
                        count: count.to_string(),
                    },
                    count.to_string(),
                );
            } else {
                let all = enumerate_parcellings(&mu)?;
                #[derive(Serialize)]
                struct Out {
                    count: usize,
                    parcellings: Vec<Vec<[usize; 2]>>,
                }
                let listed: Vec<Vec<[usize; 2]>> = all
                    .iter()
                    .map(|p| p.parcels().iter().map(|&(i, j)| [i, j]).collect())
                    .collect();
                let human = all
                    .iter()
                    .map(|p| {
                        p.parcels()
                            .iter()
                            .map(|&(i, j)| format!("({i},{j})"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect::<Vec<_>>()
                    .join("\n");
                emit(
                    cli.json,
                    "parcellings",
                    seed,
                    Out {
                        count: all.len(),
                        parcellings: listed,
                    },
                    human,
                );
            }
        }
        Command::Ramified(args) => {
            let q = quadform_from_flags(cli)?;
            let forms = args
                .forms
                .iter()
                .map(|f| parse_linear_form(f))
                .collect::<Result<Vec<_>, _>>()?;
            let (ram, witness) = is_ramified(&forms, &q, &tols)?;
            #[derive(Serialize)]
            struct Out {
                ramified: bool,
                witness: Option<PointJson>,
            }
            emit(
                cli.json,
                "ramified",
                seed,
                Out {
                    ramified: ram,
                    witness: witness.as_ref().map(point_json),
                },
                format!(
                    "ramified: {ram}{}",
                    match &witness {
                        Some(w) => format!(
                            " at [{:+.6}{:+.6}i : {:+.6}{:+.6}i]",
                            w.u0.re, w.u0.im, w.u1.re, w.u1.im
                        ),
                        None => String::new(),
                    }
                ),
            );
        }
        Command::Nullity(args) => {
            let q = quadform_from_flags(cli)?;
            let forms = args
                .forms
                .iter()
                .map(|f| parse_linear_form(f))
                .collect::<Result<Vec<_>, _>>()?;
            let nullity = tangent_nullity(&forms, &q, &tols)?;
            #[derive(Serialize)]
            struct Out {
                nullity: usize,
            }
            emit(
                cli.json,
                "nullity",
                seed,
                Out { nullity },
                nullity.to_string(),
            );
        }
        Command::GammaFibers(args) => {
            let q = quadform_from_flags(cli)?;
            let center_v = parse_cvec3(&args.center)?;
            let center = PencilCenter::new(&center_v, &q)?;
            let mults = match &args.mults {
                Some(text) => parse_mults(text)?,
                None => vec![1; args.lines.len()],
            };
            if mults.len() != args.lines.len() {
                return Err(Error::Invalid(format!(
                    "{} lines but {} multiplicities",
                    args.lines.len(),
                    mults.len()
                )));
            }
            let mut lines = Vec::new();
            for (text, m) in args.lines.iter().zip(&mults) {
                let l = parse_cvec3(text)?;
                let pairing =
                    l[0] * center.point[0] + l[1] * center.point[1] + l[2] * center.point[2];
                if pairing.norm() > 1e-6 * l.norm() {
                    return Err(Error::Invalid(
                        "a line does not pass through the center".into(),
                    ));
                }
                lines.push((center.coords(&l), *m as usize));
            }
            let target = PencilDivisor { lines };
            let fibers = gamma_fiber(&target, &center, &q, &tols)?;
            #[derive(Serialize)]
            struct Out {
                count: usize,
                fibers: Vec<Vec<DivisorPointJson>>,
            }
            let listed: Vec<Vec<DivisorPointJson>> = fibers
                .iter()
                .map(|f| {
                    f.points()
                        .iter()
                        .map(|(p, m)| DivisorPointJson {
                            u: [p.u0.re, p.u0.im, p.u1.re, p.u1.im],
                            mult: *m,
                        })
                        .collect()
                })
                .collect();
            emit(
                cli.json,
                "gamma-fibers",
                seed,
                Out {
                    count: fibers.len(),
                    fibers: listed,
                },
                format!("{} fibers", fibers.len()),
            );
        }
        Command::Dims(args) => {
            let partition = parse_mults(&args.partition)?;
            let defect = dim_defect(args.quadform_degree, &partition)?;
            #[derive(Serialize)]
            struct Out {
                defect: i64,
            }
            emit(cli.json, "dims", seed, Out { defect }, defect.to_string());
        }
        Command::Fourier(args) => {
            let q = quadform_from_flags(cli)?;
            let order = args.order.unwrap_or(args.kmax + 2);
            let grid = SurfaceGrid::new(&q, order);
            if args.emit_grid {
                let mut out = String::from("theta,phi,weight\n");
                for ((theta, phi), w) in grid.angles.iter().zip(&grid.weights) {
                    out.push_str(&format!("{theta},{phi},{w}\n"));
                }
                print!("{out}");
                return Ok(());
            }
            let values = if let Some(text) = &args.poly {
                let p = parse_poly(text)?;
                grid.values_of_poly(&p)
            } else if let Some(path) = &args.samples {
                read_samples(path, &grid)?
            } else {
                return Err(Error::Invalid("provide --poly or --samples".into()));
            };
            let rep = fourier_components(&values, &q, args.kmax, &grid)?;
            #[derive(Serialize)]
            struct Component {
                degree: usize,
                poly: String,
                energy: f64,
            }
            #[derive(Serialize)]
            struct Out {
                components: Vec<Component>,
                parseval_residual: f64,
                total_energy: f64,
            }
            let comps: Vec<Component> = rep
                .components
                .iter()
                .map(|c| Component {
                    degree: c.degree,
                    poly: format_poly(&Poly::from_hpoly(c.component.clone())),
                    energy: c.energy,
                })
                .collect();
            let human = comps
                .iter()
                .map(|c| format!("degree {}: energy {:.6e}: {}", c.degree, c.energy, c.poly))
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                cli.json,
                "fourier",
                seed,
                Out {
                    components: comps,
                    parseval_residual: rep.parseval_residual,
                    total_energy: rep.total_energy,
                },
                format!(
                    "{human}\nParseval residual {:.3e} of {:.6e}",
                    rep.parseval_residual, rep.total_energy
                ),
            );
        }
    }
    Ok(())
}

/// Match CSV samples (theta, phi, re[, im]) to the quadrature grid nodes.
fn read_samples(path: &str, grid: &SurfaceGrid) -> Result<Vec<Complex64>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("theta") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(Error::Invalid(format!(
                "line {}: expected theta,phi,re[,im]",
                lineno + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Invalid(format!("line {}: {e}", lineno + 1)))
        };
        let theta = parse(fields[0])?;
        let phi = parse(fields[1])?;
        let re = parse(fields[2])?;
        let im = if fields.len() > 3 { parse(fields[3])? } else { 0.0 };
        rows.push((theta, phi, Complex64::new(re, im)));
    }
    if rows.len() != grid.len() {
        return Err(Error::Invalid(format!(
            "{} samples but the order-{} grid has {} nodes (use --emit-grid)",
            rows.len(),
            grid.order,
            grid.len()
        )));
    }
    let mut values = vec![None; grid.len()];
    for (theta, phi, v) in rows {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, (gt, gp)) in grid.angles.iter().enumerate() {
            // Angular distance with θ wraparound.
            let dt = (theta - gt).rem_euclid(2.0 * std::f64::consts::PI);
            let dt = dt.min(2.0 * std::f64::consts::PI - dt);
            let d = dt.hypot(phi - gp);
            if d < best.1 {
                best = (i, d);
            }
        }
        if best.1 > 1e-6 {
            return Err(Error::Invalid(format!(
                "sample at ({theta}, {phi}) is {:.2e} away from the nearest grid node",
                best.1
            )));
        }
        if values[best.0].is_some() {
            return Err(Error::Invalid(format!(
                "duplicate sample for grid node {}",
                best.0
            )));
        }
        values[best.0] = Some(v);
    }
    Ok(values.into_iter().map(|v| v.unwrap()).collect())
}

fn main() {
    let cli = Cli::parse();
    let seed = cli
        .seed
        .or_else(|| std::env::var("QM_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0);
    match run(&cli, seed) {
        Ok(()) => {}
        Err(e) => {
            if cli.json {
                let payload = ErrorJson {
                    schema: 1,
                    error: ErrorBody {
                        code: e.code(),
                        message: e.to_string(),
                    },
                };
                println!("{}", serde_json::to_string(&payload).expect("serialize"));
            } else {
                eprintln!("error: {e}");
            }
            std::process::exit(1);
        }
    }
}
