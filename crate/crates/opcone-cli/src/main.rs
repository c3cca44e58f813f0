//! `opcone`: membership checks, maps, state geometry and demos from the command line.

mod demos;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opcone::finite::{self, ChannelMap, HSElement};
use opcone::function::{self, L2Element};
use opcone::hilbert::{self, HVector, StatePoint, UnitalSpace};
use opcone::json::{self, JsonForm, UnitalMeasureDto};
use opcone::linalg::{self, CMat};
use opcone::matrix::{self, HMatrix, QuantumCone, DEFAULT_BUDGET};
use opcone::pietsch;
use opcone::states::{self, FactorizationOutcome, UnitalMeasure};
use opcone::supports::{MapK, MapOnX};
use opcone::{Error, Kind};
use serde_json::json;

use report::{RunReport, EXIT_NON_MEMBER, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "opcone", version, about = "Unital cones in Hilbert spaces and their matrix quantizations")]
struct Cli {
    /// Input JSON file for commands that take a single value.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Search budget for violation and witness searches.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Compact JSON output (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership of a vector, matrix or function in a cone.
    Check(CheckArgs),
    /// Reproduce a worked example and assert its numbers.
    Demo {
        #[arg(value_enum)]
        name: demos::Demo,
    },
    /// Factor a unital positive map on a finite space and bound its summing norm.
    Pietsch {
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Test an n×n matrix against the HSₙ cone.
    Hs {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Entanglement-breaking check for φ: H → M_m.
    Eb {
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Unital measures on the state space.
    #[command(subcommand)]
    States(StatesCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Cone {
    /// The level-1 cone of H.
    C,
    Min,
    Max,
    Co,
    Cl,
    Cu,
    /// HSₙ; `hs3` etc. also fix n.
    Hs,
    Hs2,
    Hs3,
    Hs4,
    Psd,
    L2,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long, value_enum)]
    cone: Cone,
    #[arg(long)]
    vector: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    function: Option<PathBuf>,
    /// Expected matrix level; rejected if it differs from the input.
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum StatesCommand {
    /// `∫ t dμ`, `‖ι‖₂` and the conditional expectation defects.
    Integral {
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// The mass chain at one atom or at all of them.
    Mass {
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long)]
        atom: Option<usize>,
    },
    /// Complete point masses at states to a unital measure when possible.
    Concentrate {
        /// `{"space": …, "atoms": [{"s0": […], "c": m}, …]}` with `c` the prescribed mass.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Factor `T: K → H` through `L²(X, μ)`.
    Factorize {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

/// A failure that is reported without a verdict.
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Json(_) | Error::Shape(_) | Error::SpaceMismatch(_) | Error::InvalidSpace(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Domain(other),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    input: Option<PathBuf>,
    tol: f64,
    budget: usize,
}

impl Ctx {
    fn path<'a>(&'a self, specific: &'a Option<PathBuf>, what: &str) -> std::result::Result<&'a Path, Failure> {
        specific
            .as_deref()
            .or(self.input.as_deref())
            .ok_or_else(|| Failure::Usage(format!("missing input: pass --{what} FILE or --input FILE")))
    }

    fn read<T: JsonForm>(&self, path: &Path, rep: &mut RunReport) -> std::result::Result<T, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        rep.digest(&path.display().to_string(), &bytes);
        let text = String::from_utf8_lossy(&bytes);
        json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(v) = std::env::var("OPCONE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("opcone: OPCONE_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let name = command_name(&cli.command);
    let mut rep = RunReport::new(name, cli.seed, cli.tol);
    let ctx = Ctx { input: cli.input.clone(), tol: cli.tol, budget: cli.budget.unwrap_or(DEFAULT_BUDGET) };
    let result = match &cli.command {
        Command::Check(a) => check(&ctx, a, &mut rep),
        Command::Demo { name } => demos::run(*name, &mut rep, ctx.budget).map_err(Failure::from),
        Command::Pietsch { map, samples } => pietsch_cmd(&ctx, map, *samples, &mut rep),
        Command::Hs { n, matrix } => hs(&ctx, *n, matrix, &mut rep),
        Command::Eb { map } => eb(&ctx, map, &mut rep),
        Command::States(s) => states_cmd(&ctx, s, &mut rep),
    };
    match result {
        Ok(()) => {
            let rep = rep.finish();
            let out = if cli.pretty { serde_json::to_string_pretty(&rep) } else { serde_json::to_string(&rep) };
            let _ = writeln!(std::io::stdout().lock(), "{}", out.expect("report serializes"));
            for c in rep.failures() {
                eprintln!("opcone: claim failed: {} (expected {:?}, got {:?})", c.claim, c.expected, c.actual);
            }
            ExitCode::from(rep.exit)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("opcone: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("opcone: {e}");
            ExitCode::from(EXIT_NON_MEMBER)
        }
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Check(a) => format!("check {:?}", a.cone).to_lowercase(),
        Command::Demo { name } => format!("demo {}", name.to_possible_value().expect("named").get_name()),
        Command::Pietsch { .. } => "pietsch".into(),
        Command::Hs { .. } => "hs".into(),
        Command::Eb { .. } => "eb".into(),
        Command::States(s) => match s {
            StatesCommand::Integral { .. } => "states integral".into(),
            StatesCommand::Mass { .. } => "states mass".into(),
            StatesCommand::Concentrate { .. } => "states concentrate".into(),
            StatesCommand::Factorize { .. } => "states factorize".into(),
        },
    }
}

fn read_level(ctx: &Ctx, a: &CheckArgs, rep: &mut RunReport) -> std::result::Result<HMatrix, Failure> {
    let z: HMatrix = ctx.read(ctx.path(&a.matrix, "matrix")?, rep)?;
    if let Some(l) = a.level {
        if l != z.n() {
            return Err(Failure::Usage(format!("--level {l} but the matrix has level {}", z.n())));
        }
    }
    Ok(z)
}

/// Accepts `{"matrix": …}` or a bare matrix.
fn read_square(ctx: &Ctx, path: &Path, rep: &mut RunReport) -> std::result::Result<CMat, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    rep.digest(&path.display().to_string(), &bytes);
    let text = String::from_utf8_lossy(&bytes);
    let _ = ctx;
    let m = json::from_str::<HSElement>(&text)
        .map(|x| x.matrix)
        .or_else(|_| json::from_str::<CMat>(&text))
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if m.nrows() != m.ncols() {
        return Err(Failure::Usage(format!("{}: matrix is not square", path.display())));
    }
    Ok(m)
}

fn check(ctx: &Ctx, a: &CheckArgs, rep: &mut RunReport) -> Outcome {
    let (budget, seed, tol) = (ctx.budget, rep.seed, ctx.tol);
    match a.cone {
        Cone::C => {
            let v: HVector = ctx.read(ctx.path(&a.vector, "vector")?, rep)?;
            let skew = v.im().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let margin = if skew > tol { -skew } else { hilbert::cone_margin(&v) };
            rep.set_bool(hilbert::in_cone(&v, tol), margin);
            rep.details = json!({ "hermitian": v.is_hermitian(tol), "order_norm": hilbert::order_norm(&v) });
        }
        Cone::Min => {
            let v = matrix::in_min_tol(&read_level(ctx, a, rep)?, budget, seed, tol)?;
            rep.set_verdict(&v);
            rep.details = json::to_value(&v);
        }
        Cone::Max => {
            let v = matrix::certify_max_tol(&read_level(ctx, a, rep)?, budget, seed, tol)?;
            rep.set_verdict(&v);
            rep.details = json::to_value(&v);
        }
        Cone::Co | Cone::Cl | Cone::Cu => {
            let which = match a.cone {
                Cone::Co => QuantumCone::Co,
                Cone::Cl => QuantumCone::Cl,
                _ => QuantumCone::Cu,
            };
            let v = matrix::in_quantum_cone(&read_level(ctx, a, rep)?, which, budget, seed)?;
            rep.set_verdict(&v);
            rep.details = json::to_value(&v);
        }
        Cone::Hs | Cone::Hs2 | Cone::Hs3 | Cone::Hs4 | Cone::Psd => {
            let m = read_square(ctx, ctx.path(&a.matrix, "matrix")?, rep)?;
            let want = match a.cone {
                Cone::Hs2 => Some(2),
                Cone::Hs3 => Some(3),
                Cone::Hs4 => Some(4),
                _ => a.level,
            };
            if let Some(n) = want {
                if n != m.nrows() {
                    return Err(Failure::Usage(format!("expected a {n}×{n} matrix, got {}×{}", m.nrows(), m.nrows())));
                }
            }
            let x = HSElement::new(m)?;
            let lmin = linalg::lambda_min(&x.matrix);
            if a.cone == Cone::Psd {
                rep.set_bool(lmin >= -tol, lmin);
            } else {
                rep.set_bool(finite::in_hs_cone(&x, tol), finite::hs_margin(&x));
            }
            rep.details = json!({ "lambda_min": lmin, "tau": x.tau().re, "norm2": x.norm2() });
        }
        Cone::L2 => {
            let eta: L2Element = ctx.read(ctx.path(&a.function, "function")?, rep)?;
            let skew = eta.values().iter().fold(0.0f64, |m, x| m.max(x.im.abs()));
            let margin = if skew > tol { -skew } else { function::l2_cone_margin(&eta)? };
            rep.set_bool(function::in_l2_cone_tol(&eta, tol)?, margin);
            rep.details = json!({ "norm": eta.norm(), "min_value": eta.min_value() });
        }
    }
    Ok(())
}

fn pietsch_cmd(ctx: &Ctx, map: &Option<PathBuf>, samples: usize, rep: &mut RunReport) -> Outcome {
    let t: MapOnX = ctx.read(ctx.path(map, "map")?, rep)?;
    let f = pietsch::factorize(&t)?;
    let b = pietsch::summing_norm_lp(&t, samples, rep.seed)?;
    let ratio = pietsch::domination_ratio(&t, &f.mu, samples, rep.seed);
    let recon = f.reconstruct().distance(&t);
    rep.at_most("T₂ ι T₁ = T", recon, ctx.tol);
    rep.at_most("‖Tv‖ ≤ 2√2 ∫|v| dμ on samples", ratio, f.bound);
    rep.at_most("π(T) upper ≤ 2√2", b.upper, f.bound + 1e-6);
    rep.settle_checks();
    rep.details = json!({
        "measure": json::to_value(&*f.mu),
        "t2": json::to_value(&f.t2),
        "t1_norm": f.t1_norm,
        "t2_norm": f.t2_norm,
        "t2_hs_norm": f.t2_hs_norm,
        "bound": f.bound,
        "summing_norm": {"lower": b.lower, "upper": b.upper, "constraints": b.constraints, "measure": b.measure},
        "domination_ratio": ratio,
    });
    Ok(())
}

fn hs(ctx: &Ctx, n: Option<usize>, matrix: &Option<PathBuf>, rep: &mut RunReport) -> Outcome {
    let m = read_square(ctx, ctx.path(matrix, "matrix")?, rep)?;
    if let Some(n) = n {
        if n != m.nrows() {
            return Err(Failure::Usage(format!("--n {n} but the matrix is {}×{}", m.nrows(), m.nrows())));
        }
    }
    let x = HSElement::new(m)?;
    let space = finite::hs_space(x.n());
    let coords = finite::hs_coordinates(&space, &x)?;
    let lmin = linalg::lambda_min(&x.matrix);
    rep.set_bool(finite::in_hs_cone(&x, ctx.tol), finite::hs_margin(&x));
    rep.details = json!({
        "n": x.n(),
        "tau": x.tau().re,
        "norm2": x.norm2(),
        "zero_part_norm2": x.zero_part().norm2(),
        "lambda_min": lmin,
        "psd": lmin >= -ctx.tol,
        "eigenvalues": linalg::eigvalsh(&x.matrix),
        "coordinates": json::to_value(&coords),
    });
    Ok(())
}

fn eb(ctx: &Ctx, map: &Option<PathBuf>, rep: &mut RunReport) -> Outcome {
    let phi: ChannelMap = ctx.read(ctx.path(map, "map")?, rep)?;
    let r = finite::eb_check(&phi.space, &phi.phi, ctx.budget, rep.seed)?;
    rep.set_kind(r.verdict);
    rep.margin = Some(r.dual_max.margin.min(r.min_positive.margin));
    rep.details = json!({
        "agree": r.agree,
        "min_positive": json::to_value(&r.min_positive),
        "dual_max": json::to_value(&r.dual_max),
    });
    Ok(())
}

fn read_measure(ctx: &Ctx, p: &Option<PathBuf>, rep: &mut RunReport) -> std::result::Result<UnitalMeasure, Failure> {
    ctx.read(ctx.path(p, "measure")?, rep)
}

fn states_cmd(ctx: &Ctx, cmd: &StatesCommand, rep: &mut RunReport) -> Outcome {
    match cmd {
        StatesCommand::Integral { measure } => {
            let mu = read_measure(ctx, measure, rep)?;
            let sp = mu.space().clone();
            let err = mu.integral().distance(&HVector::unit(&sp));
            let ce = states::conditional_expectation(&mu);
            rep.at_most("∫ t dμ = e", err, ctx.tol);
            rep.at_most("‖ι‖₂ ≤ √2", states::iota_hs_norm(&mu), 2f64.sqrt() + ctx.tol);
            rep.at_most("P² = P", ce.idempotence_defect(), 1e-10);
            rep.at_most("P* = P", ce.self_adjoint_defect(), 1e-10);
            rep.settle_checks();
            rep.details = json!({ "atoms": mu.len(), "rank_p": ce.rank(), "iota_hs_norm": states::iota_hs_norm(&mu) });
        }
        StatesCommand::Mass { measure, atom } => {
            let mu = read_measure(ctx, measure, rep)?;
            let atoms: Vec<usize> = match atom {
                Some(a) => vec![*a],
                None => (0..mu.len()).collect(),
            };
            let mut rows = Vec::new();
            for a in atoms {
                let ch = states::mass_bounds(&mu, a)?;
                rep.holds(&format!("mass chain at atom {a}"), ch.holds(ctx.tol));
                rows.push(json!({
                    "atom": a, "mass": ch.mass, "mass_bound": ch.mass_bound, "chain": ch.links(),
                }));
            }
            rep.settle_checks();
            rep.details = json!({ "atoms": rows });
        }
        StatesCommand::Concentrate { points } => {
            let path = ctx.path(points, "points")?;
            let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            rep.digest(&path.display().to_string(), &bytes);
            let dto: UnitalMeasureDto = serde_json::from_slice(&bytes)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let space: Arc<UnitalSpace> = json::from_value(serde_json::to_value(&dto.space).expect("dto"))?;
            let pts = dto
                .atoms
                .iter()
                .map(|a| Ok((StatePoint::from_real(&space, &a.s0, ctx.tol)?, a.c)))
                .collect::<opcone::Result<Vec<_>>>()?;
            let c = states::concentration_feasible(&space, &pts, ctx.tol)?;
            rep.set_bool(c.feasible, c.rhs - c.lhs);
            rep.details = json!({
                "lhs": c.lhs,
                "rhs": c.rhs,
                "measure": c.measure.as_ref().map(json::to_value),
            });
        }
        StatesCommand::Factorize { map, measure, samples } => {
            let t: MapK = ctx.read(map, rep)?;
            let mu = read_measure(ctx, measure, rep)?;
            match states::l2_factorize(&t, &mu, *samples, rep.seed)? {
                FactorizationOutcome::Factored(f) => {
                    rep.set_kind(Kind::Member);
                    rep.margin = Some(f.positivity_margin);
                    rep.details = json!({
                        "factored": true,
                        "s": f.s.row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
                        "residuals": f.residuals,
                        "composition_defect": f.composition_defect,
                        "unital_defect": f.unital_defect,
                        "rank": f.rank,
                        "exact_measure": f.is_exact(),
                        "exactness_defect": f.exactness_defect,
                        "positivity_margin": f.positivity_margin,
                    });
                }
                FactorizationOutcome::NotFactorable { f, residual } => {
                    rep.set_kind(Kind::NonMember);
                    rep.margin = Some(-residual);
                    rep.details = json!({ "factored": false, "basis_vector": f, "residual": residual });
                }
            }
        }
    }
    Ok(())
}
