//! Batch command line interface to the banklaine toolkit.
//!
//! Every library operation is reachable from exactly one subcommand (the
//! `coverage` command prints and checks the table). Output goes to stdout
//! or, with `--out`, atomically to a file; `--format` picks json, csv, or
//! text. Runs are deterministic: identical inputs give identical bytes.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 validation failure,
//! 64 usage error.

mod io;

use crate::io::{
    emit, fmt12, fmt_c64, geometric_ladder, jcx, jnum, parse_c64, parse_c64_list, parse_f64_list,
    CliError, OutputFormat, Rendered,
};
use banklaine::families::{self, F0Spec, Theorem4Spec};
use banklaine::growth::{self, Case, ClassificationResult, GrowthError, RayDirection};
use banklaine::num::log_abs_sin;
use banklaine::ode::{self, CoefficientModel, InitPair, JetSample};
use banklaine::qc::{self, OrientedAsymptoticValue, RegionSpec};
use banklaine::quad::{integrate_along, PathSpec};
use banklaine::trees::{self, CellDecompositionSpec, LabeledTree};
use banklaine::{cx, C64};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::path::PathBuf;

/// Which subcommand exposes each library operation.
const OP_COVERAGE: &[(&str, &str)] = &[
    ("integrate_along", "integrate"),
    ("eval_Fm", "eval --family Fm"),
    ("eval_Gm", "eval --family Gm"),
    ("eval_f2", "eval --family f2"),
    ("eval_F0", "eval --family F0"),
    ("asympt_constant", "asympt-constant"),
    ("integrate_equation", "ode solve"),
    ("product_E", "ode solve --emit product"),
    ("ratio_F", "ode solve --emit ratio"),
    ("bank_laine_E_from_F", "e-from-f"),
    ("coefficient_from_E", "coefficient"),
    ("schwarzian", "schwarzian"),
    ("elementary_family", "family elementary"),
    ("theorem4_family", "family theorem4"),
    ("find_real_zeros", "zeros"),
    ("count_zeros_argument_principle", "count"),
    ("estimate_order", "order"),
    ("estimate_lambda", "lambda"),
    ("estimate_indicator", "indicator"),
    ("indicator_of_A_from_E", "hA"),
    ("check_bounded_ratio", "bounded-ratio"),
    ("c2_lemma_check", "lemma c2"),
    ("koebe_bound_check", "lemma koebe"),
    ("asymptotic_values_Fm", "asympt-values"),
    ("classify_orders", "classify"),
    ("validate_tree", "tree validate"),
    ("check_real_zeros_poles", "tree real-check"),
    ("split_tree", "tree split"),
    ("count_singularities", "tree count"),
    ("classify", "tree classify"),
    ("sector_plan", "tree sectors"),
    ("builtin_tree", "tree builtin"),
    ("boundary_stretch_q", "qc stretch"),
    ("extend_Q", "qc extend"),
    ("strip_interpolation_phi", "qc phi"),
    ("modified_tangent_T", "qc tangent"),
    ("horizontal_interpolation_tau", "qc tau"),
    ("beltrami", "qc beltrami"),
    ("logarea", "qc logarea"),
    ("strip_tail_bound", "qc tailbound"),
    ("boundary_match_check", "qc match"),
];

#[derive(Parser)]
#[command(name = "banklaine", version, about = "Bank-Laine function toolkit")]
struct Cli {
    /// Numerical tolerance handed to quadrature and solvers.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate a family kernel along a polyline or ray.
    Integrate(IntegrateArgs),
    /// Evaluate one of the explicit families at a point.
    Eval(EvalArgs),
    /// Limit constant of G_m along the positive axis.
    AsymptConstant {
        #[arg(long)]
        m: u32,
    },
    /// Second-order linear ODE machinery.
    #[command(subcommand)]
    Ode(OdeCmd),
    /// Bank-Laine function E = F/F' from the jets of a quotient F.
    EFromF(JetSourceArgs),
    /// Coefficient A recovered from the jets of E.
    Coefficient(CoefficientArgs),
    /// Schwarzian derivative of a quotient F.
    Schwarzian(JetSourceArgs),
    /// Closed-form families and their parameters.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Real zeros of E with Bank-Laine residuals.
    Zeros(ZerosArgs),
    /// Zero count inside a rectangle by the argument principle.
    Count(CountArgs),
    /// Order of growth from a radius ladder.
    Order(OrderArgs),
    /// Exponent of convergence of the real zeros.
    Lambda(LambdaArgs),
    /// Phragmen-Lindelof indicator on a theta grid.
    Indicator(IndicatorArgs),
    /// Indicator of the coefficient A derived from the indicator of E.
    #[command(name = "hA")]
    HA(IndicatorArgs),
    /// Check |E(x)| = O(x) along a real ray.
    BoundedRatio(BoundedRatioArgs),
    /// Predicted growth data for a classification case.
    Classify {
        #[arg(long, value_parser = parse_case)]
        case: Case,
        #[arg(long)]
        m: u32,
    },
    /// Asymptotic values of F_m over C*.
    AsymptValues {
        #[arg(long)]
        m: u32,
    },
    /// Chord and distortion lemma checks.
    #[command(subcommand)]
    Lemma(LemmaCmd),
    /// Labeled plane trees: validation, splitting, classification.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Quasiconformal interpolation maps and their dilatation.
    #[command(subcommand)]
    Qc(QcCmd),
    /// Print and verify the operation coverage table.
    Coverage,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Integrand kernel: fm (e^{t^m}) or gm ((e^{-t^m}-1)/t).
    #[arg(long, value_enum)]
    kernel: Kernel,
    #[arg(long)]
    m: u32,
    /// Polyline anchors, e.g. 0,1+1i,2i.
    #[arg(long, allow_hyphen_values = true)]
    path: Option<String>,
    /// Ray as start,angle (radians), adaptively truncated.
    #[arg(long, allow_hyphen_values = true)]
    ray: Option<String>,
    /// Hard truncation radius for the ray.
    #[arg(long)]
    trunc: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Fm,
    Gm,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    family: EvalFamily,
    /// Family index m (Fm, Gm, f2).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    z: C64,
    /// F0 only: numerator coefficients of R0, ascending.
    #[arg(long, allow_hyphen_values = true)]
    r0_num: Option<String>,
    /// F0 only: denominator coefficients of R0, ascending.
    #[arg(long, allow_hyphen_values = true)]
    r0_den: Option<String>,
    /// F0 only: base point xi.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    xi: f64,
    /// F0 only: additive constant c0.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c0: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalFamily {
    #[value(name = "Fm")]
    Fm,
    #[value(name = "Gm")]
    Gm,
    #[value(name = "f2")]
    F2,
    #[value(name = "F0")]
    F0,
}

#[derive(Subcommand)]
enum OdeCmd {
    /// Integrate w'' + A w = 0 along a path for the standard pair.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Coefficient model: const:<c>, poly:<c0,c1,...>, elementary:<p0,p1,...>.
    #[arg(long)]
    coeff: String,
    /// Path anchors, e.g. 0,20i.
    #[arg(long, allow_hyphen_values = true)]
    path: String,
    #[arg(long, value_enum, default_value_t = Emit::Pair)]
    emit: Emit,
    /// Number of output rows along the path (plus the start point).
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Emit {
    /// Both solutions and their derivatives.
    Pair,
    /// Jets of the product E = w1 w2.
    Product,
    /// Jets of the quotient F = w2 / w1.
    Ratio,
}

#[derive(Args)]
struct JetSourceArgs {
    /// Source of the F-jets.
    #[arg(long, value_enum)]
    family: JetFamily,
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    z: C64,
    #[command(flatten)]
    theorem4: Theorem4Args,
}

#[derive(Clone, Copy, ValueEnum)]
enum JetFamily {
    /// tan z, the ratio of the pair (cos, sin).
    Tan,
    /// The exceptional quotient L(u) of two unimodular exponentials.
    Theorem4,
}

#[derive(Args, Clone)]
struct Theorem4Args {
    /// Mobius coefficients l0,l1,l2,l3 of L(w) = (l0 w + l1)/(l2 w + l3).
    #[arg(long, allow_hyphen_values = true)]
    l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b2: Option<f64>,
}

#[derive(Args)]
struct CoefficientArgs {
    /// Source of the E-jets.
    #[arg(long, value_enum)]
    family: EFamily,
    /// Polynomial p for the elementary family, ascending coefficients.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    z: C64,
}

#[derive(Clone, Copy, ValueEnum)]
enum EFamily {
    /// E = sin z cos z.
    Sincos,
    /// E = (1/2) e^{-2p}.
    Elementary,
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Coefficient, product, and log-modulus of the elementary pair.
    Elementary {
        /// Polynomial p, ascending coefficients.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
    /// Jets of the exceptional quotient F = L(u).
    Theorem4 {
        #[command(flatten)]
        spec: Theorem4Args,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long, value_enum, default_value_t = RealEFamily::Sincos)]
    family: RealEFamily,
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    /// Minimum separation between reported zeros.
    #[arg(long, default_value_t = 0.5)]
    sep: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RealEFamily {
    Sincos,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    family: EFamily,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// One rectangle corner.
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    corner1: C64,
    /// The opposite corner.
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    corner2: C64,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long, value_enum)]
    family: EFamily,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long)]
    rmax: f64,
    #[arg(long, default_value_t = 16)]
    rungs: usize,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(long, value_enum, default_value_t = RealEFamily::Sincos)]
    family: RealEFamily,
    /// Zeros are collected on [0.05, rmax].
    #[arg(long)]
    rmax: f64,
}

#[derive(Args)]
struct IndicatorArgs {
    #[arg(long, value_enum, default_value_t = RealEFamily::Sincos)]
    family: RealEFamily,
    /// Order used for normalization.
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    rmax: f64,
    /// Number of theta grid points on [-pi, pi].
    #[arg(long, default_value_t = 181)]
    thetas: usize,
    #[arg(long, default_value_t = 8)]
    rungs: usize,
}

#[derive(Args)]
struct BoundedRatioArgs {
    #[arg(long, value_enum, default_value_t = RealEFamily::Sincos)]
    family: RealEFamily,
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long)]
    xmax: f64,
    #[arg(long, default_value_t = 16)]
    rungs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Plus,
    Minus,
}

#[derive(Subcommand)]
enum LemmaCmd {
    /// Chord lemma on the arch alpha sin(pi x / length).
    C2 {
        #[arg(long)]
        length: f64,
        #[arg(long, allow_hyphen_values = true)]
        amplitude: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Koebe distortion bound for a univalent map on a half-plane.
    Koebe {
        #[arg(long, value_enum)]
        phi: Phi,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z0: C64,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Phi {
    Id,
    Square,
    Log1p,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Emit the builtin tree with m asymptotic values.
    Builtin {
        #[arg(long)]
        m: u32,
    },
    /// Validate a tree against the imaginary-ladder decomposition.
    Validate {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Ladder levels; defaults to half the number of C* faces.
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Do all non-real vertices touch tracts over 0 and infinity?
    RealCheck {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Number of singularities over C*.
    Count {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Case and predicted orders of the encoded function.
    Classify {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Split at a twig vertex, adding two asymptotic values.
    Split {
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        vertex: i64,
    },
    /// Sector openings and rotation constants for a case.
    Sectors {
        #[arg(long, value_parser = parse_case)]
        case: Case,
        #[arg(long)]
        m: u32,
    },
}

#[derive(Subcommand)]
enum QcCmd {
    /// Boundary stretch q_a(y).
    Stretch {
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Odd increasing C^1 extension Q of the stretch.
    Extend {
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Strip interpolation phi_a on the right half-plane.
    Phi {
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
    /// Modified tangent T_a = v_a of phi_a.
    Tangent {
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
    /// Horizontal interpolation tau for the boundary map h(x) = x + shift.
    Tau {
        #[arg(long, allow_hyphen_values = true)]
        shift: f64,
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        z: C64,
    },
    /// Finite-difference Beltrami coefficient of an interpolation map.
    Beltrami(BeltramiArgs),
    /// Logarithmic area of a region.
    Logarea {
        /// half-strip:<k>, pinched:<k>,<lambda>, annular:<r1>,<r2>,<t1>,<t2>,
        /// trunc-sector:<r1>,<t1>,<t2>, or exp-band:<bound>.
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 40.0)]
        truncation: f64,
    },
    /// Closed-form bound on the logarithmic area of a pinched strip.
    Tailbound {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// Sup mismatch between T_a and its prescribed boundary ray behavior.
    Match {
        #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
        a: C64,
        /// Approach direction theta_+ in {0, +-pi/2, pi}.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        t_lo: f64,
        #[arg(long, default_value_t = 20.0)]
        t_hi: f64,
    },
}

#[derive(Args)]
struct BeltramiArgs {
    #[arg(long, value_enum)]
    map: QcMap,
    /// Asymptotic value for the phi map.
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    a: Option<C64>,
    /// Boundary shift for the tau map.
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<f64>,
    #[arg(long, value_parser = parse_c64, allow_hyphen_values = true)]
    z: Option<C64>,
    /// Sample grid x0:x1:nx,y0:y1:ny (CSV-friendly).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum QcMap {
    Phi,
    Tau,
}

fn parse_case(s: &str) -> Result<Case, String> {
    match s {
        "i" => Ok(Case::I),
        "ii" => Ok(Case::II),
        "iii" => Ok(Case::III),
        _ => Err(format!("unknown case '{s}'; expected i, ii, or iii")),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(64);
                }
            }
        }
    };
    let format = cli.format;
    let out = cli.out.clone();
    match run(cli).and_then(|r| emit(&r, format, out.as_deref())) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.code());
        }
    }
}

fn run(cli: Cli) -> Result<Rendered, CliError> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    match cli.cmd {
        Cmd::Integrate(a) => cmd_integrate(a, tol),
        Cmd::Eval(a) => cmd_eval(a, tol),
        Cmd::AsymptConstant { m } => {
            let v = families::asympt_constant::<f64>(m, tol)?;
            Ok(scalar_result(v, tol))
        }
        Cmd::Ode(OdeCmd::Solve(a)) => cmd_ode_solve(a, tol),
        Cmd::EFromF(a) => {
            let jet = jet_source(&a)?;
            let v = ode::bank_laine_E_from_F(&jet)?;
            Ok(value_result(v))
        }
        Cmd::Coefficient(a) => {
            let jet = e_jet_source(a.family, a.p.as_deref(), a.z)?;
            let v = ode::coefficient_from_E(&jet)?;
            Ok(value_result(v))
        }
        Cmd::Schwarzian(a) => {
            let jet = jet_source(&a)?;
            let v = ode::schwarzian(&jet)?;
            Ok(value_result(v))
        }
        Cmd::Family(f) => cmd_family(f, tol),
        Cmd::Zeros(a) => cmd_zeros(a),
        Cmd::Count(a) => cmd_count(a, tol),
        Cmd::Order(a) => cmd_order(a),
        Cmd::Lambda(a) => cmd_lambda(a),
        Cmd::Indicator(a) => cmd_indicator(a, false),
        Cmd::HA(a) => cmd_indicator(a, true),
        Cmd::BoundedRatio(a) => cmd_bounded_ratio(a),
        Cmd::Classify { case, m } => {
            let r = growth::classify_orders::<f64>(case, m).map_err(admissibility_err)?;
            Ok(classification_result(&r))
        }
        Cmd::AsymptValues { m } => {
            let vals = growth::asymptotic_values_Fm::<f64>(m, tol)?;
            let text = vals.iter().map(|v| fmt_c64(*v)).collect::<Vec<_>>().join("\n");
            Ok(Rendered::new(
                json!({"values": vals.iter().map(|v| jcx(*v)).collect::<Vec<_>>()}),
                text,
            ))
        }
        Cmd::Lemma(l) => cmd_lemma(l),
        Cmd::Tree(t) => cmd_tree(t),
        Cmd::Qc(q) => cmd_qc(q),
        Cmd::Coverage => cmd_coverage(),
    }
}

fn value_result(v: C64) -> Rendered {
    Rendered::new(json!({"value": jcx(v)}), format!("value = {}", fmt_c64(v)))
}

fn scalar_result(v: f64, err: f64) -> Rendered {
    Rendered::new(
        json!({"value": jnum(v), "err": jnum(err)}),
        format!("value = {}\nerr <= {}", fmt12(v), fmt12(err)),
    )
}

fn admissibility_err(e: GrowthError) -> CliError {
    if let GrowthError::InvalidM { case, m } = e {
        let constraint = match case {
            Case::I => "m ≥ 1",
            Case::II => "m ≥ 2",
            Case::III => "m is even, m≥4",
        };
        CliError::Validation(format!("case {case} requires {constraint}; got m = {m}"))
    } else {
        e.into()
    }
}

fn classification_result(r: &ClassificationResult<f64>) -> Rendered {
    let lambda = match r.lambda {
        Some(l) => jnum(l),
        None => Value::Null,
    };
    let text = format!(
        "case {}  m = {}  rho = {}  lambda = {}  template = {}",
        r.case,
        r.m,
        fmt12(r.rho),
        r.lambda.map(fmt12).unwrap_or_else(|| "none".into()),
        r.template.tag()
    );
    Rendered::new(
        json!({
            "case": r.case.to_string(),
            "m": r.m,
            "rho": jnum(r.rho),
            "lambda": lambda,
            "template": r.template.tag(),
        }),
        text,
    )
}

// ---------------------------------------------------------------------------
// Families and quadrature

fn cmd_integrate(a: IntegrateArgs, tol: f64) -> Result<Rendered, CliError> {
    if a.m < 1 {
        return Err(CliError::Validation("kernel index m must be >= 1".into()));
    }
    let path = match (&a.path, &a.ray) {
        (Some(p), None) => PathSpec::Segments(parse_c64_list(p).map_err(CliError::Usage)?),
        (None, Some(r)) => {
            let parts = parse_c64_list(r).map_err(CliError::Usage)?;
            if parts.len() != 2 || parts[1].im != 0.0 {
                return Err(CliError::Usage(
                    "--ray wants start,angle with a real angle".into(),
                ));
            }
            PathSpec::Ray {
                start: parts[0],
                angle: parts[1].re,
                r_trunc: a.trunc,
            }
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --path or --ray".into(),
            ))
        }
    };
    let m = a.m;
    let r = match a.kernel {
        Kernel::Fm => integrate_along(|t: C64| t.powu(m).exp(), &path, tol)?,
        Kernel::Gm => integrate_along(
            |t: C64| banklaine::num::expm1_cx(-t.powu(m)) / t,
            &path,
            tol,
        )?,
    };
    let trunc = match r.truncation_radius {
        Some(t) => jnum(t),
        None => Value::Null,
    };
    Ok(Rendered::new(
        json!({
            "value": jcx(r.value),
            "err": jnum(r.err),
            "evaluations": r.evaluations,
            "truncation_radius": trunc,
        }),
        format!(
            "value = {}\nerr <= {}\nevaluations = {}",
            fmt_c64(r.value),
            fmt12(r.err),
            r.evaluations
        ),
    ))
}

fn cmd_eval(a: EvalArgs, tol: f64) -> Result<Rendered, CliError> {
    let need_m = || {
        a.m.ok_or_else(|| CliError::Usage("this family needs --m".into()))
    };
    let v = match a.family {
        EvalFamily::Fm => families::eval_Fm(need_m()?, a.z, tol)?,
        EvalFamily::Gm => families::eval_Gm(need_m()?, a.z, tol)?,
        EvalFamily::F2 => families::eval_f2(need_m()?, a.z, tol)?,
        EvalFamily::F0 => {
            let num = a
                .r0_num
                .as_deref()
                .ok_or_else(|| CliError::Usage("F0 needs --r0-num".into()))?;
            let den = a
                .r0_den
                .as_deref()
                .ok_or_else(|| CliError::Usage("F0 needs --r0-den".into()))?;
            let spec = F0Spec {
                r0_num: parse_f64_list(num).map_err(CliError::Usage)?,
                r0_den: parse_f64_list(den).map_err(CliError::Usage)?,
                xi: a.xi,
                c0: a.c0,
            };
            families::eval_F0(&spec, a.z, tol)?
        }
    };
    Ok(Rendered::new(
        json!({"value": jcx(v), "err": jnum(tol)}),
        format!("value = {}\nerr <= {}", fmt_c64(v), fmt12(tol)),
    ))
}

fn theorem4_spec(t: &Theorem4Args) -> Result<Theorem4Spec<f64>, CliError> {
    let l = t
        .l
        .as_deref()
        .ok_or_else(|| CliError::Usage("theorem4 needs --l l0,l1,l2,l3".into()))?;
    let l = parse_f64_list(l).map_err(CliError::Usage)?;
    if l.len() != 4 {
        return Err(CliError::Usage("--l wants exactly four coefficients".into()));
    }
    let want = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::Usage(format!("theorem4 needs --{name}")))
    };
    Ok(Theorem4Spec {
        l: [l[0], l[1], l[2], l[3]],
        a1: want(t.a1, "a1")?,
        b1: want(t.b1, "b1")?,
        a2: want(t.a2, "a2")?,
        b2: want(t.b2, "b2")?,
    })
}

fn jet_source(a: &JetSourceArgs) -> Result<JetSample<f64>, CliError> {
    match a.family {
        JetFamily::Tan => Ok(ode::tan_jets(a.z)),
        JetFamily::Theorem4 => {
            let spec = theorem4_spec(&a.theorem4)?;
            Ok(ode::theorem4_family(&spec)?.jet(a.z)?)
        }
    }
}

fn e_jet_source(family: EFamily, p: Option<&str>, z: C64) -> Result<JetSample<f64>, CliError> {
    match family {
        EFamily::Sincos => Ok(ode::sincos_E_jets(z)),
        EFamily::Elementary => {
            let p = p.ok_or_else(|| CliError::Usage("elementary needs --p".into()))?;
            let p = parse_f64_list(p).map_err(CliError::Usage)?;
            Ok(ode::elementary_family(&p).E_jet(z))
        }
    }
}

fn jet_json(j: &JetSample<f64>) -> Value {
    json!({
        "z": jcx(j.z),
        "value": jcx(j.value),
        "d1": jcx(j.d1),
        "d2": jcx(j.d2),
        "d3": jcx(j.d3),
    })
}

fn cmd_family(f: FamilyCmd, _tol: f64) -> Result<Rendered, CliError> {
    match f {
        FamilyCmd::Elementary { p, z } => {
            let p = parse_f64_list(&p).map_err(CliError::Usage)?;
            let fam = ode::elementary_family(&p);
            let a = fam.coefficient().eval(z);
            let e = fam.E_jet(z);
            let log_abs = fam.log_abs_E(z);
            Ok(Rendered::new(
                json!({
                    "a": jcx(a),
                    "e": jcx(e.value),
                    "e_d1": jcx(e.d1),
                    "log_abs_e": jnum(log_abs),
                }),
                format!(
                    "A(z) = {}\nE(z) = {}\nlog|E| = {}",
                    fmt_c64(a),
                    fmt_c64(e.value),
                    fmt12(log_abs)
                ),
            ))
        }
        FamilyCmd::Theorem4 { spec, z } => {
            let spec = theorem4_spec(&spec)?;
            let jet = ode::theorem4_family(&spec)?.jet(z)?;
            Ok(Rendered::new(
                jet_json(&jet),
                format!("F(z) = {}\nF'(z) = {}", fmt_c64(jet.value), fmt_c64(jet.d1)),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// ODE

fn parse_coefficient(s: &str) -> Result<CoefficientModel<f64>, CliError> {
    let (kind, payload) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage("--coeff wants kind:params".into()))?;
    match kind {
        "const" => Ok(CoefficientModel::Constant(
            parse_c64(payload).map_err(CliError::Usage)?,
        )),
        "poly" => Ok(CoefficientModel::Polynomial(
            parse_f64_list(payload).map_err(CliError::Usage)?,
        )),
        "elementary" => Ok(CoefficientModel::Elementary {
            p: parse_f64_list(payload).map_err(CliError::Usage)?,
        }),
        _ => Err(CliError::Usage(format!(
            "unknown coefficient model '{kind}'; expected const, poly, or elementary"
        ))),
    }
}

fn cmd_ode_solve(a: SolveArgs, tol: f64) -> Result<Rendered, CliError> {
    let coeff = parse_coefficient(&a.coeff)?;
    let anchors = parse_c64_list(&a.path).map_err(CliError::Usage)?;
    let path = PathSpec::Segments(anchors);
    let pair = ode::integrate_equation(&coeff, &path, InitPair::standard(), tol)?;
    let n = a.samples.max(1);
    let total = pair.param_len();
    let params: Vec<f64> = (0..=n).map(|j| total * j as f64 / n as f64).collect();
    let drift = pair.wronskian_drift();

    let (rows_json, rows_text): (Vec<Value>, Vec<String>) = match a.emit {
        Emit::Pair => {
            let mut js = Vec::new();
            let mut ts = Vec::new();
            for &t in &params {
                let s = pair.eval_param(t)?;
                js.push(json!({
                    "t": jnum(s.t),
                    "z": jcx(s.z),
                    "w1": jcx(s.w1),
                    "w1_d": jcx(s.w1_d),
                    "w2": jcx(s.w2),
                    "w2_d": jcx(s.w2_d),
                }));
                ts.push(format!(
                    "t = {}  z = {}  w1 = {}  w2 = {}",
                    fmt12(s.t),
                    fmt_c64(s.z),
                    fmt_c64(s.w1),
                    fmt_c64(s.w2)
                ));
            }
            (js, ts)
        }
        Emit::Product => {
            let jets = ode::product_E(&pair)?;
            let step = (jets.len() - 1).max(1) as f64 / n as f64;
            let picked: Vec<&JetSample<f64>> = (0..=n)
                .map(|j| &jets[((j as f64 * step).round() as usize).min(jets.len() - 1)])
                .collect();
            (
                picked.iter().map(|j| jet_json(j)).collect(),
                picked
                    .iter()
                    .map(|j| format!("z = {}  E = {}", fmt_c64(j.z), fmt_c64(j.value)))
                    .collect(),
            )
        }
        Emit::Ratio => {
            let jets = ode::ratio_F(&pair, &params)?;
            (
                jets.iter().map(jet_json).collect(),
                jets.iter()
                    .map(|j| format!("z = {}  F = {}", fmt_c64(j.z), fmt_c64(j.value)))
                    .collect(),
            )
        }
    };
    Ok(Rendered::new(
        json!({"wronskian_drift": jnum(drift), "samples": rows_json}),
        format!(
            "wronskian drift = {}\n{}",
            fmt12(drift),
            rows_text.join("\n")
        ),
    ))
}

// ---------------------------------------------------------------------------
// Growth

fn sincos_value_derivative(x: f64) -> (f64, f64) {
    (x.sin() * x.cos(), (2.0 * x).cos())
}

fn log_abs_from(family: EFamily, p: Option<&str>) -> Result<Box<dyn Fn(C64) -> f64>, CliError> {
    match family {
        EFamily::Sincos => Ok(Box::new(|z: C64| {
            0.5f64.ln() + log_abs_sin(z * 2.0)
        })),
        EFamily::Elementary => {
            let p = p.ok_or_else(|| CliError::Usage("elementary needs --p".into()))?;
            let p = parse_f64_list(p).map_err(CliError::Usage)?;
            let fam = ode::elementary_family(&p);
            Ok(Box::new(move |z: C64| fam.log_abs_E(z)))
        }
    }
}

fn cmd_zeros(a: ZerosArgs) -> Result<Rendered, CliError> {
    let RealEFamily::Sincos = a.family;
    if !(a.to > a.from) || !(a.sep > 0.0) {
        return Err(CliError::Usage(
            "zeros wants --to > --from and --sep > 0".into(),
        ));
    }
    let list = growth::find_real_zeros(sincos_value_derivative, (a.from, a.to), a.sep)?;
    let max_residual = list.residuals.iter().copied().fold(0.0, f64::max);
    let mut csv = String::from("x,e_prime,residual\n");
    for i in 0..list.zeros.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt12(list.zeros[i]),
            fmt12(list.e_prime[i]),
            fmt12(list.residuals[i])
        ));
    }
    let mut r = Rendered::new(
        json!({
            "count": list.zeros.len(),
            "max_residual": jnum(max_residual),
            "zeros": list.zeros.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
            "e_prime": list.e_prime.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
        }),
        format!(
            "{} zeros in [{}, {}], max Bank-Laine residual {}",
            list.zeros.len(),
            fmt12(a.from),
            fmt12(a.to),
            fmt12(max_residual)
        ),
    );
    r.csv = Some(csv);
    Ok(r)
}

fn cmd_count(a: CountArgs, tol: f64) -> Result<Rendered, CliError> {
    let f: Box<dyn Fn(C64) -> C64> = match a.family {
        EFamily::Sincos => Box::new(|z: C64| ode::sincos_E_jets(z).value),
        EFamily::Elementary => {
            let p = a
                .p
                .as_deref()
                .ok_or_else(|| CliError::Usage("elementary needs --p".into()))?;
            let p = parse_f64_list(p).map_err(CliError::Usage)?;
            let fam = ode::elementary_family(&p);
            Box::new(move |z: C64| fam.E_jet(z).value)
        }
    };
    let n = growth::count_zeros_argument_principle(f, (a.corner1, a.corner2), tol)?;
    Ok(Rendered::new(
        json!({"count": n}),
        format!("{n} zeros inside the rectangle"),
    ))
}

fn cmd_order(a: OrderArgs) -> Result<Rendered, CliError> {
    if !(a.rmax > 1.0) || a.rungs < 8 {
        return Err(CliError::Usage(
            "order wants --rmax > 1 and --rungs >= 8".into(),
        ));
    }
    let f = log_abs_from(a.family, a.p.as_deref())?;
    let ladder = geometric_ladder(1.0, a.rmax, a.rungs);
    let est = growth::estimate_order(f, &ladder)?;
    Ok(Rendered::new(
        json!({
            "rho_hat": jnum(est.rho_hat),
            "residual": jnum(est.residual),
            "r_lo": jnum(est.r_range.0),
            "r_hi": jnum(est.r_range.1),
        }),
        format!(
            "rho_hat = {} (rms residual {})",
            fmt12(est.rho_hat),
            fmt12(est.residual)
        ),
    ))
}

fn cmd_lambda(a: LambdaArgs) -> Result<Rendered, CliError> {
    let RealEFamily::Sincos = a.family;
    if !(a.rmax > 1.0) {
        return Err(CliError::Usage("lambda wants --rmax > 1".into()));
    }
    let zeros = growth::find_real_zeros(sincos_value_derivative, (0.05, a.rmax), 0.5)?;
    let est = growth::estimate_lambda(&zeros)?;
    Ok(Rendered::new(
        json!({
            "lambda_hat": jnum(est.rho_hat),
            "residual": jnum(est.residual),
            "zeros_used": zeros.zeros.len(),
        }),
        format!(
            "lambda_hat = {} from {} zeros",
            fmt12(est.rho_hat),
            zeros.zeros.len()
        ),
    ))
}

fn cmd_indicator(a: IndicatorArgs, of_coefficient: bool) -> Result<Rendered, CliError> {
    let RealEFamily::Sincos = a.family;
    if !(a.rho > 0.0) || !(a.rmax > 1.0) || a.thetas < 5 || a.rungs < 3 {
        return Err(CliError::Usage(
            "indicator wants --rho > 0, --rmax > 1, --thetas >= 5, --rungs >= 3".into(),
        ));
    }
    let thetas: Vec<f64> = (0..a.thetas)
        .map(|j| -PI + 2.0 * PI * j as f64 / (a.thetas - 1) as f64)
        .collect();
    let ladder = geometric_ladder(a.rmax / 8.0, a.rmax, a.rungs);
    let log_abs = |z: C64| 0.5f64.ln() + log_abs_sin(z * 2.0);
    let mut h = growth::estimate_indicator(log_abs, a.rho, &thetas, &ladder);
    if of_coefficient {
        h = growth::indicator_of_A_from_E(&h);
    }
    let mut csv = String::from("theta,h,rho,c\n");
    for (t, v) in h.thetas.iter().zip(h.h.iter()) {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt12(*t),
            fmt12(*v),
            fmt12(h.rho),
            fmt12(h.c)
        ));
    }
    let mut r = Rendered::new(
        json!({
            "rho": jnum(h.rho),
            "c": jnum(h.c),
            "template": h.template.tag(),
            "sup_residual": jnum(h.sup_residual),
            "low_confidence": h.low_confidence,
            "samples": h.thetas.iter().zip(h.h.iter())
                .map(|(t, v)| json!({"theta": jnum(*t), "h": jnum(*v)}))
                .collect::<Vec<_>>(),
        }),
        format!(
            "h ~= {} * {} (sup residual {})",
            fmt12(h.c),
            h.template.tag(),
            fmt12(h.sup_residual)
        ),
    );
    r.csv = Some(csv);
    Ok(r)
}

fn cmd_bounded_ratio(a: BoundedRatioArgs) -> Result<Rendered, CliError> {
    let RealEFamily::Sincos = a.family;
    if !(a.xmax > 1.0) || a.rungs < 2 {
        return Err(CliError::Usage(
            "bounded-ratio wants --xmax > 1 and --rungs >= 2".into(),
        ));
    }
    let dir = match a.direction {
        Direction::Plus => RayDirection::Positive,
        Direction::Minus => RayDirection::Negative,
    };
    let ladder = geometric_ladder(1.0, a.xmax, a.rungs);
    let rep = growth::check_bounded_ratio(|x: f64| x.sin() * x.cos(), dir, &ladder);
    Ok(Rendered::new(
        json!({
            "max_ratio": jnum(rep.max_ratio),
            "tail_growing": rep.tail_growing,
            "ratios": rep.ratios.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
        }),
        format!(
            "max |E(x)/x| = {}, tail growing: {}",
            fmt12(rep.max_ratio),
            rep.tail_growing
        ),
    ))
}

fn cmd_lemma(l: LemmaCmd) -> Result<Rendered, CliError> {
    match l {
        LemmaCmd::C2 {
            length,
            amplitude,
            samples,
        } => {
            if !(length > 0.0) || samples < 16 {
                return Err(CliError::Usage(
                    "c2 wants --length > 0 and --samples >= 16".into(),
                ));
            }
            let xs: Vec<f64> = (0..samples)
                .map(|j| length * j as f64 / (samples - 1) as f64)
                .collect();
            let fs: Vec<f64> = xs
                .iter()
                .map(|&x| amplitude * (PI * x / length).sin())
                .collect();
            let pass = growth::c2_lemma_check(&xs, &fs)?;
            Ok(Rendered::new(
                json!({"pass": pass}),
                format!("chord bound holds: {pass}"),
            ))
        }
        LemmaCmd::Koebe { phi, z0, z } => {
            let d1: Box<dyn Fn(C64) -> C64> = match phi {
                Phi::Id => Box::new(|_| cx(1.0, 0.0)),
                Phi::Square => Box::new(|w: C64| w * 2.0),
                Phi::Log1p => Box::new(|w: C64| (w + 1.0).inv()),
            };
            let pass = growth::koebe_bound_check(d1, z0, z);
            Ok(Rendered::new(
                json!({"pass": pass}),
                format!("distortion bound holds: {pass}"),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Trees

fn load_tree(path: &std::path::Path) -> Result<LabeledTree, CliError> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("not JSON: {e}")))?;
    Ok(trees::from_json(&v)?)
}

fn tree_result(tree: &LabeledTree) -> Rendered {
    let rays = tree.edges.iter().filter(|e| e.is_ray()).count();
    Rendered::new(
        trees::to_json(tree),
        format!(
            "tree with {} vertices, {} edges ({} rays), {} faces, m = {}",
            tree.vertices.len(),
            tree.edges.len(),
            rays,
            tree.faces.len(),
            trees::count_singularities(tree)
        ),
    )
}

fn cmd_tree(t: TreeCmd) -> Result<Rendered, CliError> {
    match t {
        TreeCmd::Builtin { m } => Ok(tree_result(&trees::builtin_tree(m)?)),
        TreeCmd::Validate { input, levels } => {
            let tree = load_tree(&input)?;
            let levels = levels
                .unwrap_or_else(|| (trees::count_singularities(&tree) as u32 / 2).max(1));
            let celldec = CellDecompositionSpec::imaginary_ladder(levels);
            let report = trees::validate_tree(&tree, &celldec);
            match report.violations.first() {
                None => Ok(Rendered::new(json!({"valid": true}), "valid".into())),
                Some(first) => Err(CliError::Validation(format!("invalid tree: {first}"))),
            }
        }
        TreeCmd::RealCheck { input } => {
            let tree = load_tree(&input)?;
            let pass = trees::check_real_zeros_poles(&tree);
            Ok(Rendered::new(
                json!({"real_zeros_poles": pass}),
                format!("all zeros and poles real: {pass}"),
            ))
        }
        TreeCmd::Count { input } => {
            let tree = load_tree(&input)?;
            let m = trees::count_singularities(&tree);
            Ok(Rendered::new(
                json!({"m": m}),
                format!("{m} singularities over C*"),
            ))
        }
        TreeCmd::Classify { input } => {
            let tree = load_tree(&input)?;
            let r = trees::classify(&tree).map_err(|e| match e {
                trees::TreeError::Orders(g) => admissibility_err(g),
                other => other.into(),
            })?;
            Ok(classification_result(&r))
        }
        TreeCmd::Split { input, vertex } => {
            let tree = load_tree(&input)?;
            Ok(tree_result(&trees::split_tree(&tree, vertex)?))
        }
        TreeCmd::Sectors { case, m } => {
            let plan = trees::sector_plan(case, m).map_err(admissibility_err)?;
            let sectors: Vec<Value> = plan
                .sectors
                .iter()
                .map(|s| {
                    json!({
                        "opening": jnum(s.opening),
                        "rotation": jcx(s.rotation),
                        "kind": match s.kind {
                            trees::SectorKind::Large => "large",
                            trees::SectorKind::Small => "small",
                        },
                    })
                })
                .collect();
            let text = plan
                .sectors
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    format!("S_{j}: opening {}  e = {}", fmt12(s.opening), fmt_c64(s.rotation))
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Rendered::new(
                json!({
                    "case": plan.case.to_string(),
                    "rho": jnum(plan.rho),
                    "sectors": sectors,
                }),
                format!("case {}  rho = {}\n{}", plan.case, fmt12(plan.rho), text),
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Quasiconformal toolkit

fn cmd_qc(q: QcCmd) -> Result<Rendered, CliError> {
    match q {
        QcCmd::Stretch { a, y } => {
            let v = qc::boundary_stretch_q(a, y)?;
            Ok(Rendered::new(
                json!({"value": jnum(v)}),
                format!("q = {}", fmt12(v)),
            ))
        }
        QcCmd::Extend { a, y } => {
            let v = qc::extend_Q(a, y)?;
            let knot = qc::QExtension::new(a)?.knot();
            Ok(Rendered::new(
                json!({"value": jnum(v), "knot": jnum(knot)}),
                format!("Q = {} (knot at {})", fmt12(v), fmt12(knot)),
            ))
        }
        QcCmd::Phi { a, z } => Ok(value_result(qc::strip_interpolation_phi(a, z)?)),
        QcCmd::Tangent { a, z } => Ok(value_result(qc::modified_tangent_T(a, z)?)),
        QcCmd::Tau { shift, z } => {
            let h = move |x: f64| x + shift;
            Ok(value_result(qc::horizontal_interpolation_tau(&h, z)?))
        }
        QcCmd::Beltrami(a) => cmd_beltrami(a),
        QcCmd::Logarea { region, truncation } => {
            let region = parse_region(&region)?;
            let v = qc::logarea(&region, truncation)?;
            Ok(Rendered::new(
                json!({"value": jnum(v)}),
                format!("logarea = {}", fmt12(v)),
            ))
        }
        QcCmd::Tailbound { k } => {
            let v = qc::strip_tail_bound::<f64>(k)?;
            Ok(Rendered::new(
                json!({"value": jnum(v)}),
                format!("bound = {}", fmt12(v)),
            ))
        }
        QcCmd::Match { a, theta, t_lo, t_hi } => {
            let oriented = OrientedAsymptoticValue::try_new(a, theta)?;
            let v = qc::boundary_match_check(a, &oriented, (t_lo, t_hi))?;
            Ok(Rendered::new(
                json!({"max_mismatch": jnum(v)}),
                format!("max mismatch = {}", fmt12(v)),
            ))
        }
    }
}

fn qc_map(a: &BeltramiArgs) -> Result<Box<dyn Fn(C64) -> C64>, CliError> {
    match a.map {
        QcMap::Phi => {
            let va = a
                .a
                .ok_or_else(|| CliError::Usage("the phi map needs --a".into()))?;
            Ok(Box::new(move |w: C64| {
                qc::strip_interpolation_phi(va, w).unwrap_or(cx(f64::NAN, f64::NAN))
            }))
        }
        QcMap::Tau => {
            let shift = a
                .shift
                .ok_or_else(|| CliError::Usage("the tau map needs --shift".into()))?;
            Ok(Box::new(move |w: C64| {
                qc::horizontal_interpolation_tau(&|x: f64| x + shift, w)
                    .unwrap_or(cx(f64::NAN, f64::NAN))
            }))
        }
    }
}

fn beltrami_at(
    map: &dyn Fn(C64) -> C64,
    z: C64,
    fd_step: f64,
) -> Result<qc::BeltramiSample<f64>, CliError> {
    let s = qc::beltrami(map, z, fd_step)?;
    if !(s.mu.re.is_finite() && s.mu.im.is_finite() && s.K.is_finite()) {
        return Err(CliError::Numerical(format!(
            "finite-difference stencil left the map's domain near {}",
            fmt_c64(z)
        )));
    }
    Ok(s)
}

fn cmd_beltrami(a: BeltramiArgs) -> Result<Rendered, CliError> {
    if !(a.fd_step > 0.0) {
        return Err(CliError::Usage("--fd-step must be positive".into()));
    }
    let map = qc_map(&a)?;
    match (&a.z, &a.grid) {
        (Some(z), None) => {
            let s = beltrami_at(map.as_ref(), *z, a.fd_step)?;
            Ok(Rendered::new(
                json!({"z": jcx(s.z), "mu": jcx(s.mu), "k": jnum(s.K)}),
                format!("mu = {}  K = {}", fmt_c64(s.mu), fmt12(s.K)),
            ))
        }
        (None, Some(grid)) => {
            let (xs, ys) = parse_grid(grid)?;
            let mut rows = Vec::new();
            let mut csv = String::from("x,y,re_mu,im_mu,K\n");
            for &y in &ys {
                for &x in &xs {
                    let s = beltrami_at(map.as_ref(), cx(x, y), a.fd_step)?;
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        fmt12(x),
                        fmt12(y),
                        fmt12(s.mu.re),
                        fmt12(s.mu.im),
                        fmt12(s.K)
                    ));
                    rows.push(json!({
                        "x": jnum(x),
                        "y": jnum(y),
                        "mu": jcx(s.mu),
                        "k": jnum(s.K),
                    }));
                }
            }
            let max_k = rows
                .iter()
                .filter_map(|r| r["k"].as_f64())
                .fold(1.0f64, f64::max);
            let mut r = Rendered::new(
                json!({"samples": rows, "max_k": jnum(max_k)}),
                format!("{} samples, max K = {}", xs.len() * ys.len(), fmt12(max_k)),
            );
            r.csv = Some(csv);
            Ok(r)
        }
        _ => Err(CliError::Usage(
            "give exactly one of --z or --grid".into(),
        )),
    }
}

/// Grid syntax: x0:x1:nx,y0:y1:ny.
fn parse_grid(s: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let bad = || CliError::Usage(format!("cannot parse grid '{s}'; want x0:x1:nx,y0:y1:ny"));
    let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
    let axis = |part: &str| -> Result<Vec<f64>, CliError> {
        let f: Vec<&str> = part.split(':').collect();
        if f.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = f[0].parse().map_err(|_| bad())?;
        let hi: f64 = f[1].parse().map_err(|_| bad())?;
        let n: usize = f[2].parse().map_err(|_| bad())?;
        if n < 1 || (n > 1 && !(hi > lo)) {
            return Err(bad());
        }
        Ok((0..n)
            .map(|j| {
                if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * j as f64 / (n - 1) as f64
                }
            })
            .collect())
    };
    Ok((axis(xs)?, axis(ys)?))
}

fn parse_region(s: &str) -> Result<RegionSpec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("cannot parse region '{s}': {what}"));
    let (kind, payload) = s
        .split_once(':')
        .ok_or_else(|| bad("want kind:params"))?;
    let nums = parse_f64_list(payload).map_err(|e| bad(&e))?;
    match (kind, nums.as_slice()) {
        ("half-strip", [k]) => Ok(RegionSpec::HalfStrip { k: *k as i32 }),
        ("pinched", [k, lambda]) => Ok(RegionSpec::PinchedStrip {
            k: *k as i32,
            lambda: *lambda,
        }),
        ("annular", [r1, r2, t1, t2]) => Ok(RegionSpec::AnnularSector {
            r1: *r1,
            r2: *r2,
            theta1: *t1,
            theta2: *t2,
        }),
        ("trunc-sector", [r1, t1, t2]) => Ok(RegionSpec::TruncatedSector {
            r1: *r1,
            theta1: *t1,
            theta2: *t2,
        }),
        ("exp-band", [b]) => Ok(RegionSpec::ExpPreimageBand { bound: *b }),
        _ => Err(bad("unknown kind or wrong parameter count")),
    }
}

// ---------------------------------------------------------------------------
// Coverage

fn cmd_coverage() -> Result<Rendered, CliError> {
    let root = Cli::command();
    let mut seen = std::collections::BTreeSet::new();
    for (op, invocation) in OP_COVERAGE {
        if !seen.insert(*op) {
            return Err(CliError::Validation(format!(
                "operation '{op}' appears twice in the coverage table"
            )));
        }
        let mut node = &root;
        let mut tokens = invocation.split_whitespace().peekable();
        while let Some(tok) = tokens.peek() {
            if tok.starts_with("--") {
                break;
            }
            let tok = tokens.next().unwrap();
            node = node.find_subcommand(tok).ok_or_else(|| {
                CliError::Validation(format!(
                    "coverage table maps '{op}' to unknown subcommand '{tok}'"
                ))
            })?;
        }
        let mut expect_value = false;
        for tok in tokens {
            if expect_value {
                expect_value = false;
                continue;
            }
            let long = tok.trim_start_matches("--");
            if !node.get_arguments().any(|arg| arg.get_long() == Some(long)) {
                return Err(CliError::Validation(format!(
                    "coverage table maps '{op}' to unknown flag '--{long}'"
                )));
            }
            expect_value = true;
        }
    }
    let rows: Vec<Value> = OP_COVERAGE
        .iter()
        .map(|(op, invocation)| json!({"op": op, "command": invocation}))
        .collect();
    let text = OP_COVERAGE
        .iter()
        .map(|(op, invocation)| format!("{op}: banklaine {invocation}"))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Rendered::new(
        json!({"count": OP_COVERAGE.len(), "ops": rows}),
        text,
    ))
}
