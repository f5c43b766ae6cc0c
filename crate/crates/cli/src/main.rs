//! `gramroot`: square roots and inverse square roots of sparse Gram matrices.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every requested output was written |
//! | 1 | I/O failure |
//! | 2 | bad command line |
//! | 3 | invalid input (parse error, bad mesh, dimension mismatch, bad parameter) |
//! | 4 | input is not SPD, or violates the requested n0 class |
//! | 5 | an iteration did not converge |
//! | 6 | the requested truncation order is not tabulated |
//!
//! Outputs are written to a temporary file next to the destination and
//! renamed into place only when complete, so a failed run leaves nothing
//! behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use gramroot::gram::{
    assemble_pyramid_gram, assemble_rwg_gram, barycentric_refine, extract_edges,
    galerkin_transform, TriMesh,
};
use gramroot::matfun::{
    cpe_coefficients, cpe_order, cpe_tabulated, cpe_tabulated_rationals, normalize_operator,
    pae_coefficients, pae_integers, select_cpe_order, tse_coefficients, tse_rationals, Expansion,
    ExpansionSpec, Kind, Method, N0Class, ScaledOperand, CPE1_SAFETY, TABULATED_TERMS,
};
use gramroot::oracle::singular_values;
use gramroot::sparse::IterOptions;
use gramroot::study::{convergence_study, rows_to_csv, StudyConfig};
use gramroot::{mm, Error};

#[derive(Parser, Debug)]
#[command(
    name = "gramroot",
    version,
    about = "Square roots and inverse square roots of sparse SPD Gram matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble a Gram matrix from an OFF triangle mesh
    Gram(GramArgs),
    /// Compute √G as a dense matrix
    Sqrt(MatfunArgs),
    /// Compute √G⁻¹ as a dense matrix
    Invsqrt(MatfunArgs),
    /// Tabulate the error of each expansion against the eigendecomposition
    Convergence(ConvergenceArgs),
    /// Print expansion coefficients as CSV
    Coeffs(CoeffsArgs),
    /// Compute √G_left⁻¹ · T · √G_right⁻¹
    Normalize(NormalizeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Basis {
    Rwg,
    Pyramid,
}

#[derive(Args, Debug)]
struct GramArgs {
    /// OFF mesh file
    mesh: PathBuf,
    #[arg(long, value_enum)]
    basis: Basis,
    /// Assemble on the barycentric refinement of the mesh
    #[arg(long)]
    refine: bool,
    /// Matrix Market combination matrix R; the output becomes Rᵀ G R
    #[arg(long)]
    combination: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct IterArgs {
    /// Relative tolerance of the power iterations
    #[arg(long, default_value_t = 1e-10)]
    tol_norm: f64,
    /// Iteration budget of the power iterations
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Seed of the power-iteration start vectors
    #[arg(long, default_value_t = IterOptions::DEFAULT_SEED)]
    seed: u64,
}

impl IterArgs {
    fn options(&self) -> IterOptions {
        IterOptions::new(self.tol_norm, self.max_iter).with_seed(self.seed)
    }
}

#[derive(Args, Debug, Clone)]
struct ExpansionArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Truncation order
    #[arg(long, conflicts_with = "delta", required_unless_present = "delta")]
    order: Option<usize>,
    /// Target accuracy; the order is taken from the truncation table (cpe1, cpe2)
    #[arg(long)]
    delta: Option<f64>,
    /// Coefficient class for cpe2, e.g. 1e-1
    #[arg(long, value_parser = parse_class)]
    n0_class: Option<N0Class>,
    /// Chebyshev interval bound for cpe1; estimated when omitted
    #[arg(long)]
    n0: Option<f64>,
    /// Verify that the scaled spectrum respects the cpe2 class bound
    #[arg(long)]
    strict_n0: bool,
}

#[derive(Args, Debug)]
struct MatfunArgs {
    /// Matrix Market file holding a symmetric positive definite matrix
    matrix: PathBuf,
    #[command(flatten)]
    expansion: ExpansionArgs,
    #[command(flatten)]
    iter: IterArgs,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    matrix: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "tse,cpe1,cpe2,pae")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind, default_value = "sqrt,invsqrt")]
    kinds: Vec<Kind>,
    #[arg(long, default_value_t = 1)]
    min_order: usize,
    #[arg(long, default_value_t = 9)]
    max_order: usize,
    /// Coefficient class for cpe2; chosen from the spectrum when omitted
    #[arg(long, value_parser = parse_class)]
    n0_class: Option<N0Class>,
    #[command(flatten)]
    iter: IterArgs,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    /// Required for tse, cpe1 and cpe2
    #[arg(long, value_parser = parse_kind)]
    kind: Option<Kind>,
    /// Highest coefficient index (default 9, or 19 for cpe2)
    #[arg(long)]
    order: Option<usize>,
    /// Interval bound for cpe1
    #[arg(long)]
    n0: Option<f64>,
    /// Tabulated class for cpe2
    #[arg(long, value_parser = parse_class)]
    n0_class: Option<N0Class>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    /// Matrix Market file holding T
    t: PathBuf,
    #[arg(long)]
    g_left: PathBuf,
    /// Defaults to the left Gram
    #[arg(long)]
    g_right: Option<PathBuf>,
    #[command(flatten)]
    expansion: ExpansionArgs,
    #[command(flatten)]
    iter: IterArgs,
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the singular values of the result as CSV
    #[arg(long)]
    singular_values: Option<PathBuf>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_class(s: &str) -> Result<N0Class, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => 1,
            Error::Parse { .. }
            | Error::Mesh(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_) => 3,
            Error::NotSpd(_) | Error::ClassViolation { .. } => 4,
            Error::NotConverged { .. } => 5,
            Error::Unavailable { .. } => 6,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T> = Result<T, Failure>;

/// Output staged in a temporary file beside its destination.
struct Staged {
    file: NamedTempFile,
    dest: PathBuf,
}

fn stage(dest: &Path, contents: &str) -> CliResult<Staged> {
    let dir = match dest.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = NamedTempFile::new_in(dir)?;
    file.write_all(contents.as_bytes())?;
    file.as_file().sync_all()?;
    Ok(Staged {
        file,
        dest: dest.to_path_buf(),
    })
}

/// Moves every staged file into place; on failure removes the ones already
/// moved.
fn commit(staged: Vec<Staged>) -> CliResult<()> {
    let mut done: Vec<PathBuf> = Vec::new();
    for s in staged {
        match s.file.persist(&s.dest) {
            Ok(_) => done.push(s.dest),
            Err(e) => {
                for p in &done {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.error.into());
            }
        }
    }
    Ok(())
}

fn write_outputs(outputs: &[(&Path, String)]) -> CliResult<()> {
    let staged = outputs
        .iter()
        .map(|(p, c)| stage(p, c))
        .collect::<CliResult<Vec<_>>>()?;
    commit(staged)
}

fn cmd_gram(args: &GramArgs) -> CliResult<()> {
    let mut mesh = TriMesh::load_off(&args.mesh)?;
    if args.refine {
        mesh = barycentric_refine(&mesh);
    }
    let mut g = match args.basis {
        Basis::Pyramid => assemble_pyramid_gram(&mesh),
        Basis::Rwg => assemble_rwg_gram(&mesh, &extract_edges(&mesh)),
    };
    if let Some(path) = &args.combination {
        g = galerkin_transform(&g, &mm::load_combination(path)?)?;
    }
    eprintln!(
        "assembled {0}x{0} Gram with {1} stored nonzeros",
        g.dim(),
        g.nnz()
    );
    write_outputs(&[(&args.out, mm::write_sparse_sym(&g))])
}

fn invalid(msg: impl Into<String>) -> Failure {
    Error::InvalidParameter(msg.into()).into()
}

/// Turns the command-line expansion flags into a spec, resolving `--delta`
/// to an order.
fn resolve_spec(
    e: &ExpansionArgs,
    kind: Kind,
    op: &ScaledOperand<'_>,
    opts: &IterOptions,
) -> CliResult<ExpansionSpec> {
    let mut spec = ExpansionSpec::new(e.method, kind, 0).strict(e.strict_n0);
    if let Some(class) = e.n0_class {
        spec = spec.with_n0_class(class);
    }
    if let Some(n0) = e.n0 {
        spec = spec.with_n0(n0);
    }
    spec.order = match (e.order, e.delta) {
        (Some(order), _) => order,
        (None, Some(delta)) => match e.method {
            Method::Cpe2 => {
                let class = e
                    .n0_class
                    .ok_or_else(|| invalid("--delta with cpe2 requires --n0-class"))?;
                cpe_order(kind, class, delta)?.ok_or(Error::Unavailable {
                    kind: kind.name(),
                    n0_class: class.bound(),
                    delta,
                })?
            }
            Method::Cpe1 => {
                let n0 = match e.n0 {
                    Some(n0) => n0,
                    None => {
                        let n0 = CPE1_SAFETY * op.min_scaled_eigenvalue(opts)?;
                        spec = spec.with_n0(n0);
                        n0
                    }
                };
                select_cpe_order(kind, n0, delta)?
            }
            Method::Tse | Method::Pae => {
                return Err(invalid(
                    "--delta is supported for cpe1 and cpe2 only; give --order",
                ))
            }
        },
        (None, None) => unreachable!("clap requires --order or --delta"),
    };
    Ok(spec)
}

fn cmd_matfun(args: &MatfunArgs, kind: Kind) -> CliResult<()> {
    let g = mm::load_sparse_sym(&args.matrix)?;
    let opts = args.iter.options();
    let op = ScaledOperand::new(&g, &opts)?;
    let spec = resolve_spec(&args.expansion, kind, &op, &opts)?;
    let exp = Expansion::build(&spec, &op, &opts)?;
    let f = exp.eval_dense(&op)?;
    eprintln!(
        "{kind} by {} at order {} (norm {:e}{})",
        spec.method,
        exp.order(),
        op.norm(),
        exp.n0().map(|n| format!(", n0 {n:e}")).unwrap_or_default()
    );
    write_outputs(&[(&args.out, mm::write_dense(f.as_matrix()))])
}

fn cmd_convergence(args: &ConvergenceArgs) -> CliResult<()> {
    if args.min_order > args.max_order {
        return Err(invalid("--min-order exceeds --max-order"));
    }
    let g = mm::load_sparse_sym(&args.matrix)?;
    let cfg = StudyConfig {
        methods: args.methods.clone(),
        kinds: args.kinds.clone(),
        min_order: args.min_order,
        max_order: args.max_order,
        n0_class: args.n0_class,
        iter: args.iter.options(),
    };
    let rows = convergence_study(&g, &cfg)?;
    write_outputs(&[(&args.out, rows_to_csv(&rows))])
}

fn cmd_coeffs(args: &CoeffsArgs) -> CliResult<()> {
    let need_kind = || {
        args.kind
            .ok_or_else(|| invalid(format!("--kind is required for {}", args.method)))
    };
    // columns: n, value, exact rational (when known), quadrature (cpe2 cross-check)
    let mut rows: Vec<(f64, String, String)> = Vec::new();
    match args.method {
        Method::Tse => {
            let kind = need_kind()?;
            let order = args.order.unwrap_or(9);
            let values = tse_coefficients(kind, order).values;
            for (v, r) in values.iter().zip(tse_rationals(kind, order)) {
                rows.push((*v, r.to_string(), String::new()));
            }
        }
        Method::Pae => {
            let order = args.order.unwrap_or(9);
            for (v, c) in pae_coefficients(order)
                .values
                .iter()
                .zip(pae_integers(order))
            {
                rows.push((*v, c.to_string(), String::new()));
            }
        }
        Method::Cpe1 => {
            let kind = need_kind()?;
            let n0 = args
                .n0
                .or(args.n0_class.map(N0Class::bound))
                .ok_or_else(|| invalid("--n0 or --n0-class is required for cpe1"))?;
            for v in cpe_coefficients(kind, n0, args.order.unwrap_or(9))?.values {
                rows.push((v, String::new(), String::new()));
            }
        }
        Method::Cpe2 => {
            let kind = need_kind()?;
            let class = args
                .n0_class
                .ok_or_else(|| invalid("--n0-class is required for cpe2"))?;
            let order = args.order.unwrap_or(TABULATED_TERMS - 1);
            if order >= TABULATED_TERMS {
                return Err(invalid(format!(
                    "cpe2 tables stop at order {}",
                    TABULATED_TERMS - 1
                )));
            }
            let tab = cpe_tabulated(kind, class).values;
            let rat = cpe_tabulated_rationals(kind, class);
            let quad = cpe_coefficients(kind, class.bound(), order)?.values;
            for n in 0..=order {
                rows.push((
                    tab[n],
                    format!("{}/{}", rat[n].0, rat[n].1),
                    format!("{:.16e}", quad[n]),
                ));
            }
        }
    }
    let mut csv = String::from("n,value,rational,quadrature\n");
    for (n, (v, r, q)) in rows.iter().enumerate() {
        writeln!(csv, "{n},{v:.16e},{r},{q}").unwrap();
    }
    write_outputs(&[(&args.out, csv)])
}

fn cmd_normalize(args: &NormalizeArgs) -> CliResult<()> {
    let t = mm::load_dense(&args.t)?;
    let gl = mm::load_sparse_sym(&args.g_left)?;
    let gr = match &args.g_right {
        Some(p) => mm::load_sparse_sym(p)?,
        None => gl.clone(),
    };
    let opts = args.iter.options();
    let op = ScaledOperand::new(&gl, &opts)?;
    if args.expansion.delta.is_some() && args.g_right.is_some() {
        return Err(invalid(
            "--delta resolves the order from --g-left; give --order when the Grams differ",
        ));
    }
    let spec = resolve_spec(&args.expansion, Kind::InvSqrt, &op, &opts)?;
    let result = normalize_operator(&t, &gl, &gr, &spec, &opts)?;
    let mut outputs = vec![(args.out.as_path(), mm::write_dense(&result))];
    if let Some(path) = &args.singular_values {
        let mut csv = String::from("index,singular_value\n");
        for (i, s) in singular_values(&result)?.iter().enumerate() {
            writeln!(csv, "{i},{s:.16e}").unwrap();
        }
        outputs.push((path.as_path(), csv));
    }
    write_outputs(&outputs)
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gram(a) => cmd_gram(a),
        Command::Sqrt(a) => cmd_matfun(a, Kind::Sqrt),
        Command::Invsqrt(a) => cmd_matfun(a, Kind::InvSqrt),
        Command::Convergence(a) => cmd_convergence(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::Normalize(a) => cmd_normalize(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
