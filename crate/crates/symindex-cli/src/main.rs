//! Command-line surface: JSON/TSV reports over the toolkit operations, with
//! deterministic output for fixed seeds and distinct exit codes per error
//! family (parse = 2, precondition = 3, search exhausted = 4, guard = 5).

mod report;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use report::{digest_inputs, emit, CliError, ExitCode};
use serde_json::json;
use std::path::PathBuf;
use symindex::iteration::{self, PathIndexData};
use symindex::kronecker;
use symindex::modsolve::{self, AffineRelation};
use symindex::morse;
use symindex::numeric::{parse_rational_text, parse_scalar_text, ScalarValue};
use symindex::oracle::{self, LinearPath};

#[derive(Parser)]
#[command(name = "symindex", version, about = "Index iteration toolkit for symplectic paths")]
struct Cli {
    /// Output format for tabular results.
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Index table rows for a range of iterates.
    Iterate(IterateArgs),
    /// Mean index of a path.
    Mean(MeanArgs),
    /// Common index jump search.
    Jump(JumpArgs),
    /// Order-interchange experiment for a pair of orbits.
    Commute(CommuteArgs),
    /// Ceiling-congruence solving.
    SolveMod(SolveModArgs),
    /// Morse series and inequalities for a census.
    Morse(MorseArgs),
    /// Ellipsoid census construction and checks.
    Ellipsoid(EllipsoidArgs),
    /// Crossing-count index of a linear Hamiltonian path.
    Oracle(OracleArgs),
    /// Splitting numbers by the spectral-parameter probe.
    Splitting(SplittingArgs),
    /// Strict schema validation of an input document.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct IterateArgs {
    /// Path-data JSON file.
    #[arg(long)]
    path: PathBuf,
    /// Iterate range, e.g. `1..10` or a single `m`.
    #[arg(long, default_value = "1..10")]
    m: String,
}

#[derive(Args)]
struct MeanArgs {
    #[arg(long)]
    path: PathBuf,
}

#[derive(Args)]
struct JumpArgs {
    /// Path-data JSON files, one per orbit.
    #[arg(long, num_args = 1.., required = true)]
    paths: Vec<PathBuf>,
    /// Residual bound ε (rational, e.g. `1/1000`).
    #[arg(long)]
    eps: String,
    /// Divisibility constraint on T.
    #[arg(long, default_value_t = 1)]
    m0: u64,
    /// Number of tuples to collect.
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long, default_value_t = 100_000_000)]
    t_bound: u64,
    #[arg(long, default_value_t = 1)]
    seed: i64,
    /// Extra relation file: JSON list of integer vectors k with k·v ∈ Z.
    #[arg(long)]
    relations: Option<PathBuf>,
    /// Skip the automatic same-field relation derivation.
    #[arg(long)]
    no_auto_relations: bool,
}

#[derive(Args)]
struct CommuteArgs {
    #[arg(long, num_args = 2.., required = true)]
    paths: Vec<PathBuf>,
    /// First orbit (1-based).
    #[arg(long)]
    alpha: usize,
    /// Second orbit (1-based).
    #[arg(long)]
    beta: usize,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 1)]
    m0: u64,
    #[arg(long, default_value_t = 100_000_000)]
    t_bound: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    attempts: usize,
    #[arg(long)]
    relations: Option<PathBuf>,
    #[arg(long)]
    no_auto_relations: bool,
}

#[derive(Args)]
struct SolveModArgs {
    /// Semicolon-separated scalars, e.g. `s:0,1,2;s:0,1,3`.
    #[arg(long)]
    alphas: String,
    /// Modulus N.
    #[arg(long)]
    n: u64,
    /// Comma-separated target classes, e.g. `-1,1,4`.
    #[arg(long, allow_hyphen_values = true)]
    targets: String,
    /// Relation file: JSON list of {target, terms: [[idx, "p/q"]], offset: "p/q"}.
    #[arg(long)]
    relations: Option<PathBuf>,
    /// Derive same-field relations automatically.
    #[arg(long)]
    auto_relations: bool,
    /// Use the brute scan instead of the window strategies.
    #[arg(long)]
    brute: bool,
    #[arg(long, default_value_t = 10_000_000)]
    bound: u64,
}

#[derive(Args)]
struct MorseArgs {
    #[arg(long)]
    census: PathBuf,
    #[arg(long)]
    imax: i64,
    /// Report style: `summary` or `series`.
    #[arg(long, default_value = "summary")]
    report: String,
}

#[derive(Args)]
struct EllipsoidArgs {
    /// Semicolon-separated squared radii, e.g. `1;s:0,1,2`.
    #[arg(long)]
    radii: String,
    /// Run the full census checks (ellipticity, nondegeneracy, mean indices,
    /// Morse inequalities, oracle spot checks).
    #[arg(long)]
    check_all: bool,
    #[arg(long, default_value_t = 200)]
    imax: i64,
}

#[derive(Args)]
struct OracleArgs {
    /// Linear path JSON file ({"n", "A", "tau"}).
    #[arg(long)]
    path: PathBuf,
    /// Spectral parameter as an angle ratio in [0,1).
    #[arg(long, default_value = "0")]
    omega: String,
    /// Compute on the m-fold iterate of the path.
    #[arg(long, default_value_t = 1)]
    m: u64,
}

#[derive(Args)]
struct SplittingArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    omega: String,
    #[arg(long, default_value_t = 12)]
    steps: u32,
}

#[derive(Args)]
struct ValidateArgs {
    /// Document kind: path-data, census, linear-path.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    file: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let started = std::time::Instant::now();
    let outcome = run(&cli);
    let elapsed = started.elapsed();
    match outcome {
        Ok(()) => {
            eprintln!("elapsed: {:.1} ms", elapsed.as_secs_f64() * 1e3);
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code as i32);
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| CliError::new(ExitCode::Parse, format!("{e:#}")))
}

fn parse_path_data(path: &PathBuf) -> Result<PathIndexData, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new(
            ExitCode::Parse,
            format!("{} (at {}:{}:{})", e, path.display(), e.line(), e.column()),
        )
    })
}

fn parse_linear_path(path: &PathBuf) -> Result<LinearPath, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::new(
            ExitCode::Parse,
            format!("{} (at {}:{}:{})", e, path.display(), e.line(), e.column()),
        )
    })
}

fn parse_scalar_arg(s: &str) -> Result<ScalarValue, CliError> {
    parse_scalar_text(s).map_err(|e| CliError::new(ExitCode::Parse, format!("scalar {s:?}: {e}")))
}

fn parse_rational_arg(s: &str) -> Result<BigRational, CliError> {
    parse_rational_text(s)
        .map_err(|e| CliError::new(ExitCode::Parse, format!("rational {s:?}: {e}")))
}

fn parse_m_range(s: &str) -> Result<(u64, u64), CliError> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a
            .trim()
            .parse()
            .map_err(|_| CliError::new(ExitCode::Parse, format!("bad range start {a:?}")))?;
        let hi: u64 = b
            .trim()
            .parse()
            .map_err(|_| CliError::new(ExitCode::Parse, format!("bad range end {b:?}")))?;
        if lo == 0 || hi < lo {
            return Err(CliError::new(ExitCode::Parse, "empty iterate range".into()));
        }
        Ok((lo, hi))
    } else {
        let m: u64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::new(ExitCode::Parse, format!("bad iterate {s:?}")))?;
        Ok((m, m))
    }
}

fn scalar_list(arg: &str) -> Result<Vec<ScalarValue>, CliError> {
    arg.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_scalar_arg)
        .collect()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Iterate(a) => cmd_iterate(cli, a),
        Command::Mean(a) => cmd_mean(cli, a),
        Command::Jump(a) => cmd_jump(cli, a),
        Command::Commute(a) => cmd_commute(cli, a),
        Command::SolveMod(a) => cmd_solve_mod(cli, a),
        Command::Morse(a) => cmd_morse(cli, a),
        Command::Ellipsoid(a) => cmd_ellipsoid(cli, a),
        Command::Oracle(a) => cmd_oracle(cli, a),
        Command::Splitting(a) => cmd_splitting(cli, a),
        Command::Validate(a) => cmd_validate(cli, a),
    }
}

fn cmd_iterate(cli: &Cli, a: &IterateArgs) -> Result<(), CliError> {
    let data = parse_path_data(&a.path)?;
    let (lo, hi) = parse_m_range(&a.m)?;
    let rows = iteration::iteration_rows(&data, lo..=hi).map_err(CliError::from)?;
    if cli.format == Format::Tsv {
        println!("m\ti_gamma\tnu\ti_ekeland\tband_top");
        for r in &rows {
            println!(
                "{}\t{}\t{}\t{}\t{}",
                r.m, r.i_gamma, r.nu, r.i_ekeland, r.band_top
            );
        }
        return Ok(());
    }
    emit(
        "iterate",
        digest_inputs(&[&a.path])?,
        None,
        json!({ "rows": rows }),
    )
}

fn cmd_mean(_cli: &Cli, a: &MeanArgs) -> Result<(), CliError> {
    let data = parse_path_data(&a.path)?;
    let mean = iteration::mean_index(&data);
    emit(
        "mean",
        digest_inputs(&[&a.path])?,
        None,
        json!({
            "mean_index": mean.value,
            "decimal": mean.value.to_f64(),
        }),
    )
}

fn relations_from_file(file: &Option<PathBuf>, h: usize) -> Result<Vec<Vec<BigInt>>, CliError> {
    let Some(path) = file else {
        return Ok(Vec::new());
    };
    let text = read_file(path)?;
    let raw: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::new(ExitCode::Parse, format!("relations: {e}")))?;
    let out: Vec<Vec<BigInt>> = raw
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect::<Vec<_>>())
        .collect();
    for r in &out {
        if r.len() != h {
            return Err(CliError::new(
                ExitCode::Parse,
                format!("relation length {} does not match h = {h}", r.len()),
            ));
        }
    }
    Ok(out)
}

fn build_jump_problem(
    paths: &[PathBuf],
    eps: &str,
    m0: u64,
    relations: &Option<PathBuf>,
    no_auto: bool,
) -> Result<kronecker::JumpProblem, CliError> {
    let data: Vec<PathIndexData> = paths
        .iter()
        .map(parse_path_data)
        .collect::<Result<_, _>>()?;
    let eps = parse_rational_arg(eps)?;
    // First build without extra relations to learn the component vector.
    let probe = kronecker::build_problem(data.clone(), eps.clone(), m0, Vec::new())
        .map_err(CliError::from)?;
    let mut rels = if no_auto {
        Vec::new()
    } else {
        kronecker::derive_integer_relations(probe.v())
    };
    rels.extend(relations_from_file(relations, probe.dimension())?);
    kronecker::build_problem(data, eps, m0, rels).map_err(CliError::from)
}

fn cmd_jump(_cli: &Cli, a: &JumpArgs) -> Result<(), CliError> {
    let problem = build_jump_problem(&a.paths, &a.eps, a.m0, &a.relations, a.no_auto_relations)?;
    let vertex = kronecker::pick_vertex(&problem, a.seed).map_err(CliError::from)?;
    let tuples =
        kronecker::find_tuples(&problem, &vertex, a.count, a.t_bound).map_err(CliError::from)?;
    let files: Vec<&PathBuf> = a.paths.iter().collect();
    emit(
        "jump",
        digest_inputs(&files)?,
        Some(a.seed),
        json!({
            "big_m": problem.big_m(),
            "dimension": problem.dimension(),
            "vertex": vertex,
            "tuples": tuples,
        }),
    )
}

fn cmd_commute(_cli: &Cli, a: &CommuteArgs) -> Result<(), CliError> {
    if a.alpha == 0 || a.beta == 0 {
        return Err(CliError::new(
            ExitCode::Precondition,
            "orbit indices are 1-based".into(),
        ));
    }
    let problem = build_jump_problem(&a.paths, &a.eps, a.m0, &a.relations, a.no_auto_relations)?;
    let report = kronecker::commutation_experiment(
        &problem,
        a.alpha - 1,
        a.beta - 1,
        a.t_bound,
        a.seed,
        a.attempts,
    )
    .map_err(CliError::from)?;
    let files: Vec<&PathBuf> = a.paths.iter().collect();
    emit(
        "commute",
        digest_inputs(&files)?,
        Some(a.seed as i64),
        serde_json::to_value(&report).expect("report serializes"),
    )
}

fn cmd_solve_mod(_cli: &Cli, a: &SolveModArgs) -> Result<(), CliError> {
    let alphas = scalar_list(&a.alphas)?;
    let targets: Vec<i64> = a
        .targets
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| CliError::new(ExitCode::Parse, format!("bad target {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let mut relations: Vec<AffineRelation> = Vec::new();
    if a.auto_relations {
        relations.extend(modsolve::derive_affine_relations(&alphas));
    }
    if let Some(path) = &a.relations {
        let text = read_file(path)?;
        #[derive(serde::Deserialize)]
        struct RelWire {
            target: usize,
            terms: Vec<(usize, String)>,
            offset: String,
        }
        let raw: Vec<RelWire> = serde_json::from_str(&text)
            .map_err(|e| CliError::new(ExitCode::Parse, format!("relations: {e}")))?;
        for r in raw {
            relations.push(AffineRelation {
                target: r.target,
                terms: r
                    .terms
                    .into_iter()
                    .map(|(i, c)| Ok((i, parse_rational_arg(&c)?)))
                    .collect::<Result<_, CliError>>()?,
                offset: parse_rational_arg(&r.offset)?,
            });
        }
    }
    let problem = modsolve::CongruenceProblem::new(alphas, a.n, targets, relations)
        .map_err(CliError::from)?;
    let solution = if a.brute {
        modsolve::solve_brute(&problem, a.bound)
    } else {
        modsolve::solve_window(&problem)
    }
    .map_err(CliError::from)?;
    let verified = problem.verify(&solution).map_err(CliError::from)?;
    emit(
        "solve-mod",
        Default::default(),
        None,
        json!({
            "solution": solution,
            "verified": verified,
        }),
    )
}

fn cmd_morse(cli: &Cli, a: &MorseArgs) -> Result<(), CliError> {
    let text = read_file(&a.census)?;
    let census = morse::census_from_json(&text).map_err(CliError::from)?;
    let series = morse::assemble_series(&census, a.imax).map_err(CliError::from)?;
    let report = morse::morse_inequalities(&series);
    if cli.format == Format::Tsv && a.report == "series" {
        println!("i\tM_i\tb_i");
        for i in 0..=series.i_max {
            println!("{}\t{}\t{}", i, series.m_at(i), morse::betti(i));
        }
        return Ok(());
    }
    let payload = if a.report == "series" {
        json!({
            "series": (0..=series.i_max).map(|i| series.m_at(i)).collect::<Vec<_>>(),
            "safe_degree": series.safe_degree,
            "report": report,
        })
    } else {
        json!({
            "safe_degree": series.safe_degree,
            "report": report,
            "contributions": series.ledger.len(),
        })
    };
    emit("morse", digest_inputs(&[&a.census])?, None, payload)
}

fn cmd_ellipsoid(_cli: &Cli, a: &EllipsoidArgs) -> Result<(), CliError> {
    let radii = scalar_list(&a.radii)?;
    let system = oracle::build_ellipsoid(&radii).map_err(CliError::from)?;
    let mut orbits = Vec::new();
    for (j, orbit) in system.orbits.iter().enumerate() {
        let mean = iteration::mean_index(&orbit.data);
        orbits.push(json!({
            "orbit": j + 1,
            "period": orbit.period,
            "i1": orbit.data.i1(),
            "nu1": orbit.data.nu1(),
            "circle_multiplicity": orbit.data.circle_multiplicity(),
            "mean_index": mean.value,
            "rho_contribution": iteration::rho_contribution(&orbit.data),
        }));
    }
    let mut payload = json!({
        "orbits": orbits,
        "count": system.orbits.len(),
    });
    if a.check_all {
        let mut checks = Vec::new();
        let n = system.orbits.len();
        for orbit in &system.orbits {
            let elliptic = orbit.data.circle_multiplicity() == 2 * n as u32;
            let nondegenerate = orbit.data.nu1() == 1;
            let mean_ok =
                iteration::mean_index_exceeds(&iteration::mean_index(&orbit.data).value, 2)
                    .map_err(CliError::from)?;
            // Oracle spot check on a few iterates.
            let mut oracle_ok = true;
            for m in [1u64, 2, 5] {
                let path = orbit.path.iterated(m).map_err(CliError::from)?;
                let by_crossing =
                    oracle::crossing_index(&path, &ScalarValue::zero()).map_err(CliError::from)?;
                let by_formula = iteration::iterate(&orbit.data, m).map_err(CliError::from)?;
                if BigInt::from(by_crossing) != by_formula.i_m {
                    oracle_ok = false;
                }
            }
            checks.push(json!({
                "elliptic": elliptic,
                "nondegenerate": nondegenerate,
                "mean_index_above_2": mean_ok,
                "oracle_agrees": oracle_ok,
            }));
        }
        // Morse inequalities for the census of nondegenerate profiles.
        let census: Vec<morse::CriticalTypeProfile> = system
            .orbits
            .iter()
            .map(|o| morse::nondegenerate_profile(&o.data))
            .collect::<Result<_, _>>()
            .map_err(CliError::from)?;
        let series = morse::assemble_series(&census, a.imax).map_err(CliError::from)?;
        let report = morse::morse_inequalities(&series);
        let odd_clear = (0..=series.safe_degree)
            .filter(|i| i % 2 == 1)
            .all(|i| series.m_at(i) == 0);
        payload["checks"] = json!({
            "per_orbit": checks,
            "morse": report,
            "odd_degrees_empty": odd_clear,
        });
    }
    emit("ellipsoid", Default::default(), None, payload)
}

fn cmd_oracle(_cli: &Cli, a: &OracleArgs) -> Result<(), CliError> {
    let path = parse_linear_path(&a.path)?;
    let omega = parse_scalar_arg(&a.omega)?;
    let path = if a.m > 1 {
        path.iterated(a.m).map_err(CliError::from)?
    } else {
        path
    };
    let index = oracle::crossing_index(&path, &omega).map_err(CliError::from)?;
    emit(
        "oracle",
        digest_inputs(&[&a.path])?,
        None,
        json!({ "omega": omega, "m": a.m, "index": index }),
    )
}

fn cmd_splitting(_cli: &Cli, a: &SplittingArgs) -> Result<(), CliError> {
    let path = parse_linear_path(&a.path)?;
    let omega = parse_scalar_arg(&a.omega)?;
    let (s_plus, s_minus) =
        oracle::splitting_probe(&path, &omega, a.steps).map_err(CliError::from)?;
    emit(
        "splitting",
        digest_inputs(&[&a.path])?,
        None,
        json!({ "omega": omega, "s_plus": s_plus, "s_minus": s_minus }),
    )
}

fn cmd_validate(_cli: &Cli, a: &ValidateArgs) -> Result<(), CliError> {
    let text = read_file(&a.file)?;
    let verdict = match a.kind.as_str() {
        "path-data" => serde_json::from_str::<PathIndexData>(&text)
            .map(|_| ())
            .map_err(|e| format!("{e}")),
        "census" => morse::census_from_json(&text)
            .map(|_| ())
            .map_err(|e| format!("{e}")),
        "linear-path" => serde_json::from_str::<LinearPath>(&text)
            .map(|_| ())
            .map_err(|e| format!("{e}")),
        other => {
            return Err(CliError::new(
                ExitCode::Parse,
                format!("unknown document kind {other:?}"),
            ))
        }
    };
    match verdict {
        Ok(()) => emit(
            "validate",
            digest_inputs(&[&a.file])?,
            None,
            json!({ "valid": true, "kind": a.kind }),
        ),
        Err(msg) => Err(CliError::new(
            ExitCode::Parse,
            format!("invalid {} document: {msg}", a.kind),
        )),
    }
}
