//! `dofb` — analyze layered two-unicast networks and run transmission
//! schemes from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error,
//! 3 subset cap exceeded, 4 scheme/network mismatch, 5 decode failure.
//! Every command writes exactly one JSON document to stdout; tables and
//! diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dofb::bottleneck::{
    construct_degraded_bc, find_bottlenecks, find_omniscient, prior_bound, BottleneckError, Dest,
    DEFAULT_SUBSET_CAP,
};
use dofb::engine::{simulate, SchemeProgram, SymbolSpace};
use dofb::family::{gen_family, params_from_name};
use dofb::field::PrimeField;
use dofb::network::{parse_network, serialize_network, LayeredNetwork};
use dofb::rank::DEFAULT_RANK_TRIALS;
use dofb::region::{
    build_region, compare_bounds, expressible_by_bottleneck_bounds, in_s, sum_dof, HalfPlane,
};
use dofb::schemes::{parse_scheme, scheme_for_family, SchemeError};
use dofb::verify::{render_row, run_all};
use dofb::{BottleneckCertificate, OmniscientCertificate};

#[derive(Parser)]
#[command(
    name = "dofb",
    version,
    about = "Bottleneck analysis, exact DoF outer bounds, and scheme \
             simulation for layered two-unicast networks with delayed \
             channel knowledge"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Network selection shared by most subcommands: a built-in family or a
/// JSON file.
#[derive(Args)]
struct NetworkArgs {
    /// Built-in family name (fig-2d1d2, fig-3d1d2, fig-full-dof,
    /// d1d2-one-half, m-d1d2, two-bounds, set-size-to-rank).
    #[arg(long)]
    family: Option<String>,
    /// Family size parameter (m-d1d2, two-bounds).
    #[arg(long)]
    m: Option<usize>,
    /// Extra-relay count (set-size-to-rank).
    #[arg(long)]
    k: Option<usize>,
    /// Path to a network JSON file (alternative to --family).
    #[arg(long)]
    net: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family's canonical network JSON.
    Generate {
        #[command(flatten)]
        network: NetworkArgs,
        /// Also write the document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report bottleneck certificates, bounds, and the outer DoF region.
    Analyze {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest pruned parent set to scan exhaustively.
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a transmission scheme and report decode results.
    Simulate {
        #[command(flatten)]
        network: NetworkArgs,
        /// Scheme to run: a built-in name (defaults to the family's own
        /// scheme) or a path to a scheme JSON file.
        #[arg(long)]
        scheme: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the outer region's vertices as CSV (plus a JSON report on
    /// stdout).
    Region {
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
        /// CSV output path (required).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full verification suite.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn load_network(args: &NetworkArgs) -> Result<LayeredNetwork, Failure> {
    match (&args.family, &args.net) {
        (Some(_), Some(_)) => Err(fail(2, "use exactly one of --family and --net")),
        (None, None) => Err(fail(2, "one of --family or --net is required")),
        (Some(name), None) => {
            let params = params_from_name(name, args.m, args.k).map_err(|e| fail(2, e))?;
            gen_family(&params).map_err(|e| fail(2, e))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
            parse_network(&text).map_err(|e| fail(2, e))
        }
    }
}

/// Prints the single stdout JSON document (and mirrors it to `out`).
fn emit(document: String, out: &Option<PathBuf>) -> Result<(), Failure> {
    if let Some(path) = out {
        fs::write(path, &document)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))?;
    }
    print!("{document}");
    Ok(())
}

fn to_pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn run(command: Command) -> Result<u8, Failure> {
    let field = PrimeField::from_env().map_err(|e| fail(2, e))?;
    match command {
        Command::Generate { network, out } => {
            if network.net.is_some() {
                return Err(fail(2, "generate takes --family, not --net"));
            }
            let net = load_network(&network)?;
            emit(serialize_network(&net), &out)?;
            Ok(0)
        }
        Command::Analyze {
            network,
            seed,
            subset_cap,
            out,
        } => {
            let net = load_network(&network)?;
            let report = analyze(&net, field, seed, subset_cap)?;
            emit(to_pretty(&report), &out)?;
            Ok(0)
        }
        Command::Simulate {
            network,
            scheme,
            trials,
            seed,
            out,
        } => {
            if trials == 0 {
                return Err(fail(2, "--trials must be at least 1"));
            }
            let (net, program, space) = resolve_simulation(&network, &scheme)?;
            let report = simulate(&net, &program, space, trials, seed, field)
                .map_err(|e| fail(4, format!("scheme does not fit the network: {e}")))?;
            let decoded = report.achieved.is_some();
            let (d1, d2) = (report.decode_d1, report.decode_d2);
            emit(to_pretty(&report), &out)?;
            if decoded {
                Ok(0)
            } else {
                eprintln!("decode failure: d1 {d1}/{trials}, d2 {d2}/{trials}");
                Ok(5)
            }
        }
        Command::Region {
            network,
            seed,
            subset_cap,
            out,
        } => {
            let net = load_network(&network)?;
            let report = analyze(&net, field, seed, subset_cap)?;
            let mut csv = String::from("D1,D2\n");
            for [x, y] in &report.region.vertices {
                csv.push_str(&format!("{x},{y}\n"));
            }
            fs::write(&out, csv)
                .map_err(|e| fail(2, format!("cannot write {}: {e}", out.display())))?;
            print!("{}", to_pretty(&report.region));
            Ok(0)
        }
        Command::VerifyAll { seed } => {
            let rows = run_all(field, seed);
            let pass = rows.iter().all(|r| r.pass);
            for row in &rows {
                eprintln!("{}", render_row(row));
            }
            let report = VerifyReport {
                seed,
                modulus: field.modulus(),
                pass,
                rows,
            };
            print!("{}", to_pretty(&report));
            Ok(if pass { 0 } else { 1 })
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    modulus: u64,
    pass: bool,
    rows: Vec<dofb::verify::CheckRow>,
}

#[derive(Serialize)]
struct BoundReport {
    dest: Dest,
    new: String,
    prior: String,
    new_intercept: String,
    prior_intercept: String,
    gap: String,
}

#[derive(Serialize)]
struct RegionReport {
    seed: u64,
    modulus: u64,
    constraints: Vec<String>,
    vertices: Vec<[String; 2]>,
    sum_dof: String,
}

#[derive(Serialize)]
struct ExpressibleReport {
    expressible: bool,
    witness: Option<[String; 2]>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    seed: u64,
    modulus: u64,
    omniscient: Vec<OmniscientCertificate>,
    certificates: Vec<BottleneckCertificate>,
    bounds: Vec<BoundReport>,
    region: RegionReport,
    #[serde(rename = "in_S")]
    in_s: bool,
    expressible: ExpressibleReport,
    degraded_bc_ok: bool,
}

fn bottleneck_failure(e: BottleneckError) -> Failure {
    match &e {
        BottleneckError::CapExceeded { .. } => fail(3, e),
        _ => fail(2, e),
    }
}

fn analyze(
    net: &LayeredNetwork,
    field: PrimeField,
    seed: u64,
    subset_cap: usize,
) -> Result<AnalyzeReport, Failure> {
    let certificates = find_bottlenecks(net, field, DEFAULT_RANK_TRIALS, seed, subset_cap)
        .map_err(bottleneck_failure)?;
    let omniscient = find_omniscient(net).map_err(bottleneck_failure)?;

    let mut bounds = Vec::new();
    let mut degraded_bc_ok = true;
    for cert in &certificates {
        let new = HalfPlane::dof_bound(cert.dest, cert.rho as i64);
        let prior = prior_bound(net, &cert.node, cert.dest, subset_cap)
            .map_err(bottleneck_failure)?
            .expect("certificate nodes have a prior bound");
        let gap = compare_bounds(&new, &prior)
            .map_err(|e| fail(2, format!("bound comparison failed: {e}")))?;
        bounds.push(BoundReport {
            dest: cert.dest,
            new: new.to_string(),
            prior: prior.to_string(),
            new_intercept: gap.new_intercept.to_string(),
            prior_intercept: gap.prior_intercept.to_string(),
            gap: gap.gap.to_string(),
        });
        degraded_bc_ok &= construct_degraded_bc(net, cert, field, seed).is_ok();
    }

    let region = build_region(&certificates);
    let sum = sum_dof(&region);
    let verdict = expressible_by_bottleneck_bounds(&region);
    Ok(AnalyzeReport {
        seed,
        modulus: field.modulus(),
        omniscient,
        certificates,
        bounds,
        region: RegionReport {
            seed,
            modulus: field.modulus(),
            constraints: region.constraints.iter().map(|c| c.to_string()).collect(),
            vertices: region
                .vertices
                .iter()
                .map(|(x, y)| [x.to_string(), y.to_string()])
                .collect(),
            sum_dof: sum.to_string(),
        },
        in_s: in_s(sum),
        expressible: ExpressibleReport {
            expressible: verdict.expressible,
            witness: verdict
                .witness
                .map(|(m1, m2)| [m1.to_string(), m2.to_string()]),
        },
        degraded_bc_ok,
    })
}

/// Picks the network and scheme for `simulate`.
///
/// The scheme comes from `--scheme` (a file path if one exists, else a
/// built-in family name), defaulting to the `--family`'s own scheme. The
/// network comes from `--net` or `--family`, defaulting to the built-in
/// scheme's home network.
fn resolve_simulation(
    network: &NetworkArgs,
    scheme: &Option<String>,
) -> Result<(LayeredNetwork, SchemeProgram, SymbolSpace), Failure> {
    let explicit_net = match (&network.family, &network.net) {
        (Some(_), Some(_)) => {
            return Err(fail(2, "use exactly one of --family and --net"));
        }
        (None, None) => None,
        _ => Some(load_network(network)?),
    };

    let scheme_source = scheme
        .as_ref()
        .or(network.family.as_ref())
        .ok_or_else(|| fail(2, "simulate needs --scheme, --family, or both"))?;

    if Path::new(scheme_source).is_file() {
        let text = fs::read_to_string(scheme_source)
            .map_err(|e| fail(2, format!("cannot read {scheme_source}: {e}")))?;
        let (space, program) = parse_scheme(&text)
            .map_err(|e| fail(2, format!("invalid scheme file {scheme_source}: {e}")))?;
        let net = explicit_net
            .ok_or_else(|| fail(2, "a scheme file needs --family or --net for the network"))?;
        return Ok((net, program, space));
    }

    let params = params_from_name(scheme_source, network.m, network.k).map_err(|e| fail(2, e))?;
    let bundle = scheme_for_family(&params).map_err(|e| match e {
        SchemeError::NoScheme(_) => fail(4, e),
        SchemeError::Family(err) => fail(2, err),
    })?;
    let net = explicit_net.unwrap_or(bundle.network);
    Ok((net, bundle.program, bundle.space))
}
