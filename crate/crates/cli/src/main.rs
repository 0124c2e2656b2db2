use std::cmp::Ordering;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use verlinde_core::theta::{self, ModulusPoint};
use verlinde_core::verlinde::DEFAULT_MAX_BITS;
use verlinde_core::{Ball, ComplexBall, Dyadic, Error, EvalOptions, Result};

mod complex;
mod record;
mod run;
mod sweep;

use complex::parse_complex;
use record::{ComplexCell, Format, ParamVal, Record, ReportCell, ValueCell};
use run::{elapsed_ms, Formula};

/// Certified evaluation of Verlinde-type dimension formulas, Quot-scheme
/// intersection numbers, and Jacobi theta identities.
#[derive(Parser)]
#[command(name = "verlinde", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Initial working precision in bits; escalates automatically on demand.
    /// Defaults to VERLINDE_PRECISION_BITS or 128.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,

    /// Hard ceiling for precision escalation.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BITS)]
    max_precision_bits: u32,

    /// Output format for result records.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Radius tolerance for residual and matrix checks (decimal literal).
    #[arg(long, global = true, default_value = "1e-20")]
    tolerance: String,
}

#[derive(Subcommand)]
enum Command {
    /// Certified dimension of the level-k space of sections at rank r, genus g.
    SuVerlinde {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
    },
    /// Certified top intersection number of a Quot scheme of rank-k subsheaves.
    Quot {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
        /// Evaluate via the roots-of-unity product instead of the subset sum.
        #[arg(long)]
        roots_form: bool,
    },
    /// Dimension formula at composite rank hr, level kr, degree hd.
    ArbDegree {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        g: u32,
    },
    /// The same dimension computed as a count of conformal blocks.
    ConformalBlock {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        g: u32,
    },
    /// Verify a cross-multiplied identity between two certified evaluations.
    Check {
        #[command(subcommand)]
        identity: CheckCmd,
    },
    /// Evaluate a theta series at a point of the upper half-plane.
    ThetaEval {
        /// Modulus, e.g. "i", "2i", "1+2i" (needs Im tau >= 1/10).
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        /// Argument, e.g. "0", "0.3", "0.1+0.2i".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// zero: both characteristics 0; half: both 1/2 (the odd series).
        #[arg(long, value_enum, default_value_t = ThetaKind::Zero)]
        kind: ThetaKind,
    },
    /// Residual of the quadratic addition identity; must enclose zero.
    ThetaAddition {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Coefficient matrix expressing theta(z+w)·theta(w−z) over squared theta
    /// products; rank-level duality predicts it is diagonal.
    DualityMatrix {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Run one command over integer ranges, appending one record per tuple.
    Table {
        /// Range spec like "su-verlinde:r=1..5,k=0..5,g=1..4" (inclusive);
        /// check variants are spelled check-su-quot, check-st-sym, ...
        #[arg(long)]
        sweep: String,
        /// Append records here instead of stdout; tuples already present are
        /// skipped, so interrupted sweeps resume.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// (r+k)^g · dimension == r^g · intersection number.
    SuQuot {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
    },
    /// (h+k)^g · arbitrary-degree dimension == h^g · intersection at (hr, kr).
    ArbQuot {
        #[arg(long)]
        h: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        g: u32,
    },
    /// Intersection numbers are symmetric in r and k.
    StSym {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
    },
    /// k^g · dim(r,k,g) == r^g · dim(k,r,g).
    RankLevel {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
    },
    /// Subset form and roots-of-unity form of the intersection number agree.
    ViForms {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        g: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ThetaKind {
    Zero,
    Half,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidParams(_)
                | Error::ZeroDenominator
                | Error::NotInUpperHalfPlane
                | Error::ImTauTooSmall
                | Error::ParameterTooLarge(_) => 2,
                Error::PrecisionExhausted { .. } => 3,
                // numeric machinery failed in a way more precision cannot fix
                _ => 4,
            })
        }
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    let initial = resolve_initial(cli.precision_bits)?;
    if cli.max_precision_bits < 2 {
        return Err(Error::InvalidParams(
            "--max-precision-bits must be at least 2".into(),
        ));
    }
    let opts = EvalOptions {
        initial_bits: Some(initial),
        max_bits: cli.max_precision_bits,
        parallel: true,
    };
    let tol = parse_tolerance(&cli.tolerance)?;

    match &cli.command {
        Command::SuVerlinde { r, k, g } => {
            emit(Formula::SuVerlinde, &ints(&[*r, *k, *g]), &opts, cli.format)
        }
        Command::Quot { r, k, g, roots_form } => {
            let f = if *roots_form { Formula::QuotRoots } else { Formula::Quot };
            emit(f, &ints(&[*r, *k, *g]), &opts, cli.format)
        }
        Command::ArbDegree { h, k, r, d, g } => {
            emit(Formula::ArbDegree, &ints(&[*h, *k, *r, *d, *g]), &opts, cli.format)
        }
        Command::ConformalBlock { h, k, r, d, g } => {
            emit(Formula::ConformalBlock, &ints(&[*h, *k, *r, *d, *g]), &opts, cli.format)
        }
        Command::Check { identity } => match identity {
            CheckCmd::SuQuot { r, k, g } => {
                emit(Formula::CheckSuQuot, &ints(&[*r, *k, *g]), &opts, cli.format)
            }
            CheckCmd::ArbQuot { h, k, r, d, g } => {
                emit(Formula::CheckArbQuot, &ints(&[*h, *k, *r, *d, *g]), &opts, cli.format)
            }
            CheckCmd::StSym { r, k, g } => {
                emit(Formula::CheckStSym, &ints(&[*r, *k, *g]), &opts, cli.format)
            }
            CheckCmd::RankLevel { r, k, g } => {
                emit(Formula::CheckRankLevel, &ints(&[*r, *k, *g]), &opts, cli.format)
            }
            CheckCmd::ViForms { r, k, g } => {
                emit(Formula::CheckViForms, &ints(&[*r, *k, *g]), &opts, cli.format)
            }
        },
        Command::ThetaEval { tau, z, kind } => theta_eval(tau, z, *kind, initial, cli.format),
        Command::ThetaAddition { tau, z, w } => {
            theta_addition(tau, z, w, initial, cli.max_precision_bits, &tol, cli.format)
        }
        Command::DualityMatrix { tau } => {
            duality_matrix(tau, initial, cli.max_precision_bits, &tol, cli.format)
        }
        Command::Table { sweep, out } => {
            sweep::run_table(sweep, out.as_deref(), &opts, cli.format)
        }
    }
}

fn ints(vals: &[u32]) -> Vec<i64> {
    vals.iter().map(|v| *v as i64).collect()
}

fn emit(f: Formula, vals: &[i64], opts: &EvalOptions, format: Format) -> Result<ExitCode> {
    let record = f.run(vals, opts)?;
    println!("{}", record.render(format));
    Ok(match &record.report {
        Some(r) if !r.holds => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn resolve_initial(flag: Option<u32>) -> Result<u32> {
    if let Some(bits) = flag {
        return Ok(bits);
    }
    match std::env::var("VERLINDE_PRECISION_BITS") {
        Ok(s) => s.trim().parse().map_err(|_| {
            Error::InvalidParams(format!(
                "VERLINDE_PRECISION_BITS must be a positive integer, got '{s}'"
            ))
        }),
        Err(_) => Ok(128),
    }
}

/// Lower bound of the tolerance literal, so an enclosure is never accepted
/// on the strength of decimal round-off.
fn parse_tolerance(s: &str) -> Result<Dyadic> {
    let b = Ball::from_decimal_str(s, 64)
        .map_err(|_| Error::InvalidParams(format!("cannot parse tolerance '{s}'")))?;
    let lo = b.mid().sub(&b.rad().to_dyadic());
    if lo.is_zero() || lo.is_negative() {
        return Err(Error::InvalidParams("tolerance must be positive".into()));
    }
    Ok(lo)
}

fn complex_param(name: &str, literal: &str) -> (String, ParamVal) {
    (name.to_string(), ParamVal::Text(literal.trim().to_string()))
}

fn radius_dyadic(c: &ComplexBall) -> Dyadic {
    c.re().rad().add(c.im().rad()).to_dyadic()
}

fn theta_eval(tau: &str, z: &str, kind: ThetaKind, prec: u32, format: Format) -> Result<ExitCode> {
    let start = Instant::now();
    let tau_b = parse_complex(tau, prec).map_err(Error::InvalidParams)?;
    let z_b = parse_complex(z, prec).map_err(Error::InvalidParams)?;
    let point = ModulusPoint::new(tau_b, z_b);
    let tv = match kind {
        ThetaKind::Zero => theta::theta00(&point, prec)?,
        ThetaKind::Half => theta::theta_half_half(&point, prec)?,
    };
    let cell = ComplexCell::from_ball(&tv.value);
    let record = Record {
        command: "theta-eval".into(),
        params: vec![
            (
                "kind".to_string(),
                ParamVal::Text(match kind {
                    ThetaKind::Zero => "zero".into(),
                    ThetaKind::Half => "half".into(),
                }),
            ),
            complex_param("tau", tau),
            complex_param("z", z),
        ],
        error_radius: cell.rad.clone(),
        value: ValueCell::Complex(cell),
        certified: false,
        precision_bits: prec,
        elapsed_ms: elapsed_ms(start),
        report: None,
    };
    println!("{}", record.render(format));
    Ok(ExitCode::SUCCESS)
}

fn theta_addition(
    tau: &str,
    z: &str,
    w: &str,
    initial: u32,
    max_bits: u32,
    tol: &Dyadic,
    format: Format,
) -> Result<ExitCode> {
    let start = Instant::now();
    let mut bits = initial.clamp(2, max_bits);
    loop {
        let tau_b = parse_complex(tau, bits).map_err(Error::InvalidParams)?;
        let z_b = parse_complex(z, bits).map_err(Error::InvalidParams)?;
        let w_b = parse_complex(w, bits).map_err(Error::InvalidParams)?;
        let residual = theta::addition_residual(&tau_b, &z_b, &w_b, bits)?;
        let rad = radius_dyadic(&residual);
        let contains = residual.contains_zero();
        // A ball excluding zero is a proof of violation at any precision; a
        // ball containing zero only counts once its radius is below tolerance.
        if !contains || rad.cmp_value(tol) != Ordering::Greater {
            let cell = ComplexCell::from_ball(&residual);
            let record = Record {
                command: "theta-addition".into(),
                params: vec![
                    complex_param("tau", tau),
                    complex_param("z", z),
                    complex_param("w", w),
                ],
                error_radius: cell.rad.clone(),
                value: ValueCell::Complex(cell),
                certified: false,
                precision_bits: bits,
                elapsed_ms: elapsed_ms(start),
                report: Some(ReportCell {
                    holds: contains,
                    lhs: None,
                    rhs: None,
                    label: if contains {
                        "quadratic addition identity residual encloses zero".into()
                    } else {
                        "quadratic addition identity residual excludes zero".into()
                    },
                }),
            };
            println!("{}", record.render(format));
            return Ok(if contains {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        if bits >= max_bits {
            return Err(Error::PrecisionExhausted { cap: max_bits });
        }
        bits = (bits * 2).min(max_bits);
    }
}

fn duality_matrix(
    tau: &str,
    initial: u32,
    max_bits: u32,
    tol: &Dyadic,
    format: Format,
) -> Result<ExitCode> {
    let start = Instant::now();
    let mut bits = initial.clamp(2, max_bits);
    loop {
        let tau_b = parse_complex(tau, bits).map_err(Error::InvalidParams)?;
        let m = theta::duality_matrix_rk1(&tau_b, bits)?;
        let off_enclose_zero = m[0][1].contains_zero() && m[1][0].contains_zero();
        let diagonals_agree = m[0][0].re().overlaps(m[1][1].re())
            && m[0][0].im().overlaps(m[1][1].im());
        let off_rad = {
            let a = radius_dyadic(&m[0][1]);
            let b = radius_dyadic(&m[1][0]);
            if a.cmp_value(&b) == Ordering::Less { b } else { a }
        };
        let tight = off_rad.cmp_value(tol) != Ordering::Greater;
        if (!off_enclose_zero || !diagonals_agree) || tight {
            let holds = off_enclose_zero && diagonals_agree;
            let cells = Box::new([
                [
                    ComplexCell::from_ball(&m[0][0]),
                    ComplexCell::from_ball(&m[0][1]),
                ],
                [
                    ComplexCell::from_ball(&m[1][0]),
                    ComplexCell::from_ball(&m[1][1]),
                ],
            ]);
            let max_rad = m
                .iter()
                .flatten()
                .map(radius_dyadic)
                .max_by(|a, b| a.cmp_value(b))
                .expect("four entries");
            let record = Record {
                command: "duality-matrix".into(),
                params: vec![complex_param("tau", tau)],
                value: ValueCell::Matrix(cells),
                certified: false,
                precision_bits: bits,
                error_radius: record::decimal_upper(&max_rad, 3),
                elapsed_ms: elapsed_ms(start),
                report: Some(ReportCell {
                    holds,
                    lhs: None,
                    rhs: None,
                    label: if holds {
                        "off-diagonal entries enclose zero; diagonal entries agree".into()
                    } else {
                        "matrix is provably not diagonal with equal diagonal".into()
                    },
                }),
            };
            println!("{}", record.render(format));
            return Ok(if holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        if bits >= max_bits {
            return Err(Error::PrecisionExhausted { cap: max_bits });
        }
        bits = (bits * 2).min(max_bits);
    }
}
