//! Command-line front end: generation, certification, solving, volumes,
//! bounds, and set-system tooling, all emitting JSON with an embedded run
//! manifest.
//!
//! Exit codes: 0 on pass, 2 when an operation ran but its verification
//! failed, 1 on usage or input errors. `-` means stdin/stdout everywhere a
//! file path is accepted.

mod manifest;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use jointslab::algebra::FieldDesc;
use jointslab::bounds::{constant_c, sharp_bound, ConstantVariant};
use jointslab::config::verify_configuration;
use jointslab::generators::{
    bollobas_eccles_configuration, project_generic, reguli_configuration, tight_configuration,
    ReguliPolicy,
};
use jointslab::optimize::{
    counting_report, polytope_volume_equal, polytope_volume_lattice, solve_z, ShavedPolytope,
};
use jointslab::setsys::{
    be_partial_shadow_certificate, blow_up, construction_2_3, construction_kkk,
    multiplicity_report, partial_shadow, tight_system, JointSetSystem, PartialShadowMode,
};
use jointslab::vanishing::{certify_vanishing, shaved_box_check, uniform_weights};
use jointslab::JointsConfiguration;

use manifest::{read_input, write_output, Manifest};

#[derive(Parser)]
#[command(name = "jointslab", version, about = "Exact toolkit for joints configurations")]
struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named configuration.
    Gen(GenArgs),
    /// Certify the vanishing system of a configuration by exact rank.
    Certify(CertifyArgs),
    /// Shaved-box check of the product polynomial on a tight configuration.
    Shave(ShaveArgs),
    /// Equalize the per-joint load sigma by the gap-splitting solver.
    Solvez(SolvezArgs),
    /// Shaved-polytope volume, closed form or lattice count.
    Vol(VolArgs),
    /// Volume counting report with the line-count chain.
    Report(ReportArgs),
    /// Minimum line count for a given number of joints.
    Bound(BoundArgs),
    /// Multiplicity constants.
    Const(ConstArgs),
    /// Joint set system tools.
    Setsys(SetsysArgs),
    /// Partial shadow values: certificates and bounded exhaustive search.
    Shadow(ShadowArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// d-wise intersections of M general-position hyperplanes.
    Tight {
        #[arg(long)]
        d: usize,
        #[arg(long = "M")]
        m: usize,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// The 6-joint, 12-line projected configuration in F^4.
    Be {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// The reguli family over the rationals in F^3.
    Reguli {
        #[arg(long)]
        n: usize,
        /// Use seeded rationals instead of the deterministic prime policy.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Project a joint set system to a configuration in its own dimension.
    Project {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        target_dim: Option<usize>,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    n: u32,
    /// `uniform` or a path to a JSON array of rational weight strings.
    #[arg(long, default_value = "uniform")]
    z: String,
    /// Field the elimination runs over. Rational configurations default to a
    /// reduction into F_1009 for speed; pass `Q` to audit in exact rationals.
    #[arg(long)]
    field: Option<String>,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct ShaveArgs {
    #[arg(long)]
    d: usize,
    #[arg(long = "M")]
    m: usize,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SolvezArgs {
    #[arg(long = "in")]
    input: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: u64,
    /// Mantissa bits of the solver arithmetic.
    #[arg(long, default_value_t = 128)]
    prec: u32,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VolMode {
    Exact,
    Lattice,
}

#[derive(Args)]
struct VolArgs {
    /// Comma-separated rational beta values, e.g. `1/3,1/3,1/3`.
    #[arg(long)]
    beta: String,
    #[arg(long, default_value = "1")]
    r: String,
    #[arg(long, value_enum)]
    mode: VolMode,
    /// Lattice resolution.
    #[arg(long, default_value_t = 300)]
    n: u32,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: String,
    /// Lattice resolution for the per-joint volume estimates.
    #[arg(long)]
    n: u32,
    /// `solve` (default) or `uniform`.
    #[arg(long, default_value = "solve")]
    z: String,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long = "J")]
    j: u64,
    #[arg(long)]
    d: u32,
    /// Curve mode: the same bound applies to the total curve degree.
    #[arg(long)]
    curve: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstVariantArg {
    NuStar,
    Nu,
    UpperKm,
}

#[derive(Args)]
struct ConstArgs {
    /// Comma-separated k values.
    #[arg(long)]
    k: String,
    /// Comma-separated m values.
    #[arg(long)]
    m: String,
    #[arg(long, value_enum, default_value = "nu-star")]
    variant: ConstVariantArg,
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Args)]
struct SetsysArgs {
    #[command(subcommand)]
    action: SetsysAction,
}

#[derive(Subcommand)]
enum SetsysAction {
    /// Certify every joint set of a system.
    Verify {
        #[arg(default_value = "-")]
        input: String,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Per-joint multiplicity hypergraph report (M, nu, nu*).
    Mult {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Replace each ground element by n copies.
    Blowup {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        n: u32,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
    /// Emit a named construction.
    Gen {
        /// One of `2-3`, `kkk`, `be`, `tight`.
        kind: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long = "M")]
        m: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(short, long, default_value = "-")]
        output: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShadowModeArg {
    Certificate,
    Exhaustive,
}

#[derive(Args)]
struct ShadowArgs {
    #[arg(long)]
    r: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum)]
    mode: ShadowModeArg,
    /// Ground-set cap for exhaustive search.
    #[arg(long, default_value_t = 9)]
    ground: u32,
    /// Certificate source: `be` or a JSON file `{"A": [...], "B": [...]}`.
    #[arg(long, default_value = "be")]
    cert: String,
    #[arg(short, long, default_value = "-")]
    output: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap treats --help/--version as errors with successful intent
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli.command) {
        Ok(pass) => std::process::exit(if pass { 0 } else { 2 }),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

/// Seed override through the environment, taking precedence over flags.
fn effective_seed(flag: u64) -> u64 {
    std::env::var("JOINTSLAB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(flag)
}

fn parse_field(s: &str) -> Result<FieldDesc> {
    FieldDesc::parse(s).map_err(|e| anyhow!("{e}"))
}

fn parse_ratio_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',')
        .map(|part| {
            FieldDesc::Rational
                .parse_scalar(part)
                .map_err(|e| anyhow!("{e}"))
                .map(|v| v.as_ratio().expect("rational field").clone())
        })
        .collect()
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|part| part.trim().parse::<u32>().context("integer list"))
        .collect()
}

/// Rounds to 12 significant digits for stable JSON bodies.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(11 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn load_config(manifest: &mut Manifest, path: &str) -> Result<JointsConfiguration> {
    let raw = read_input(manifest, path)?;
    let value: Value = serde_json::from_str(&raw).context("configuration JSON")?;
    // accept both bare configurations and tool output with a result wrapper
    let body = value.get("result").and_then(|r| r.get("config")).unwrap_or(&value);
    JointsConfiguration::from_json(body).map_err(|e| anyhow!("{e}"))
}

fn load_system(manifest: &mut Manifest, path: &str) -> Result<JointSetSystem> {
    let raw = read_input(manifest, path)?;
    let value: Value = serde_json::from_str(&raw).context("set-system JSON")?;
    let body = value.get("result").and_then(|r| r.get("system")).unwrap_or(&value);
    JointSetSystem::from_json(body).map_err(|e| anyhow!("{e}"))
}

fn weights_for(
    manifest: &mut Manifest,
    spec: &str,
    cfg: &JointsConfiguration,
) -> Result<Vec<BigRational>> {
    if spec == "uniform" {
        return Ok(uniform_weights(cfg.joints.len()));
    }
    let raw = read_input(manifest, spec)?;
    let strings: Vec<String> = serde_json::from_str(&raw).context("weight JSON array")?;
    if strings.len() != cfg.joints.len() {
        bail!("{} weights for {} joints", strings.len(), cfg.joints.len());
    }
    strings
        .iter()
        .map(|s| {
            FieldDesc::Rational
                .parse_scalar(s)
                .map(|v| v.as_ratio().unwrap().clone())
                .map_err(|e| anyhow!("{e}"))
        })
        .collect()
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen(args) => run_gen(args),
        Command::Certify(args) => run_certify(args),
        Command::Shave(args) => run_shave(args),
        Command::Solvez(args) => run_solvez(args),
        Command::Vol(args) => run_vol(args),
        Command::Report(args) => run_report(args),
        Command::Bound(args) => run_bound(args),
        Command::Const(args) => run_const(args),
        Command::Setsys(args) => run_setsys(args),
        Command::Shadow(args) => run_shadow(args),
    }
}

fn emit_config(
    output: &str,
    manifest: Manifest,
    cfg: &JointsConfiguration,
) -> Result<()> {
    let stats = verify_configuration(cfg)
        .map_err(|v| anyhow!("generated configuration invalid: {}", v[0]))?;
    write_output(output, manifest.finish(), json!({
        "config": cfg.to_json(),
        "stats": stats,
    }))
}

fn run_gen(args: GenArgs) -> Result<bool> {
    match args.kind {
        GenKind::Tight { d, m, field, seed, output } => {
            let seed = effective_seed(seed);
            let manifest = Manifest::new(Some(seed), Some(field.clone()));
            let field = parse_field(&field)?;
            let tight = tight_configuration(m, d, field, seed)?;
            emit_config(&output, manifest, &tight.cfg)?;
            Ok(true)
        }
        GenKind::Be { field, seed, output } => {
            let seed = effective_seed(seed);
            let manifest = Manifest::new(Some(seed), Some(field.clone()));
            let field = parse_field(&field)?;
            let cfg = bollobas_eccles_configuration(field, seed)?;
            emit_config(&output, manifest, &cfg)?;
            Ok(true)
        }
        GenKind::Reguli { n, seed, output } => {
            let manifest = Manifest::new(seed.map(effective_seed), None);
            let policy = match seed {
                Some(s) => ReguliPolicy::Seeded(effective_seed(s)),
                None => ReguliPolicy::Deterministic,
            };
            let cfg = reguli_configuration(n, policy)?;
            emit_config(&output, manifest, &cfg)?;
            Ok(true)
        }
        GenKind::Project { input, target_dim, field, seed, output } => {
            let seed = effective_seed(seed);
            let mut manifest = Manifest::new(Some(seed), Some(field.clone()));
            let field = parse_field(&field)?;
            let sys = load_system(&mut manifest, &input)?;
            if let Some(want) = target_dim {
                if want != sys.d() as usize {
                    bail!(
                        "target dimension {want} does not match the system dimension {}",
                        sys.d()
                    );
                }
            }
            let cfg = project_generic(&sys, field, seed)?;
            emit_config(&output, manifest, &cfg)?;
            Ok(true)
        }
    }
}

fn run_certify(args: CertifyArgs) -> Result<bool> {
    let mut manifest = Manifest::new(None, args.field.clone());
    let mut cfg = load_config(&mut manifest, &args.input)?;
    match &args.field {
        Some(field) => {
            cfg = cfg.to_field(parse_field(field)?).map_err(|e| anyhow!("{e}"))?;
        }
        None => {
            // rational inputs reduce into F_1009 by default for elimination
            // speed; prime-field inputs certify over their own field
            if cfg.field == FieldDesc::Rational {
                cfg = cfg
                    .to_field(FieldDesc::Prime { p: 1009 })
                    .map_err(|e| anyhow!("{e}"))?;
            }
        }
    }
    if let Err(violations) = verify_configuration(&cfg) {
        let result = json!({
            "pass": false,
            "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        });
        write_output(&args.output, manifest.finish(), result)?;
        return Ok(false);
    }
    let z = weights_for(&mut manifest, &args.z, &cfg)?;
    let cert = certify_vanishing(&cfg, &z, args.n)?;
    let pass = cert.pass;
    write_output(&args.output, manifest.finish(), cert.to_json())?;
    Ok(pass)
}

fn run_shave(args: ShaveArgs) -> Result<bool> {
    let seed = effective_seed(args.seed);
    let manifest = Manifest::new(Some(seed), Some(args.field.clone()));
    let field = parse_field(&args.field)?;
    let tight = tight_configuration(args.m, args.d, field, seed)?;
    let report = shaved_box_check(&tight, args.n)?;
    let pass = report.pass;
    write_output(&args.output, manifest.finish(), report.to_json())?;
    Ok(pass)
}

fn run_solvez(args: SolvezArgs) -> Result<bool> {
    let mut manifest = Manifest::new(None, None);
    let cfg = load_config(&mut manifest, &args.input)?;
    let report = solve_z(&cfg, args.tol, args.max_iter, args.prec)?;
    let pass = report.converged;
    write_output(&args.output, manifest.finish(), serde_json::to_value(&report)?)?;
    Ok(pass)
}

fn run_vol(args: VolArgs) -> Result<bool> {
    let manifest = Manifest::new(None, None);
    let beta = parse_ratio_list(&args.beta)?;
    let r = parse_ratio_list(&args.r)?
        .into_iter()
        .next()
        .ok_or_else(|| anyhow!("empty cap"))?;
    let result = match args.mode {
        VolMode::Exact => {
            if beta.windows(2).any(|w| w[0] != w[1]) {
                bail!("exact mode needs all beta equal; use --mode lattice for mixed beta");
            }
            if r != BigRational::from_integer(1.into()) {
                bail!("exact mode only covers the unit cap r = 1");
            }
            let v = polytope_volume_equal(&beta[0], beta.len() as u32);
            json!({
                "mode": "exact",
                "volume": v.to_string(),
                "volume_f64": sig12(jointslab::BigFloat::from_rational(&v, 64).to_f64()),
            })
        }
        VolMode::Lattice => {
            let poly = ShavedPolytope { beta, r };
            let v = polytope_volume_lattice(&poly, args.n);
            json!({
                "mode": "lattice",
                "n": v.n,
                "count": v.count,
                "volume": v.normalized,
                "volume_f64": sig12(v.normalized_f64),
            })
        }
    };
    write_output(&args.output, manifest.finish(), result)?;
    Ok(true)
}

fn run_report(args: ReportArgs) -> Result<bool> {
    let mut manifest = Manifest::new(None, None);
    let cfg = load_config(&mut manifest, &args.input)?;
    let z = match args.z.as_str() {
        "uniform" => uniform_weights(cfg.joints.len()),
        "solve" => {
            let solved = solve_z(&cfg, 1e-9, 100_000, 128)?;
            if !solved.converged {
                bail!("weight solver did not converge; rerun with --z uniform to inspect");
            }
            solved
                .z
                .iter()
                .map(|s| {
                    FieldDesc::Rational
                        .parse_scalar(s)
                        .map(|v| v.as_ratio().unwrap().clone())
                        .map_err(|e| anyhow!("{e}"))
                })
                .collect::<Result<Vec<_>>>()?
        }
        other => bail!("unknown weight mode {other:?}; use solve or uniform"),
    };
    let report = counting_report(&cfg, &z, args.n)?;
    let pass = report.pass;
    let result = json!({
        "sum_vol": sig12(report.sum_lattice_f64),
        "sum_vol_upper": report.sum_upper,
        "target": report.target,
        "exact_ok": report.exact_ok,
        "bound_x": sig12(report.bound_x),
        "bound_L": sig12(report.bound_l),
        "chain_ok": report.chain_ok,
        "pass": report.pass,
    });
    write_output(&args.output, manifest.finish(), result)?;
    Ok(pass)
}

fn run_bound(args: BoundArgs) -> Result<bool> {
    let manifest = Manifest::new(None, None);
    let bound = sharp_bound(args.j, args.d, args.tol, 128)?;
    let mut result = json!({
        "x": sig12(bound.x.to_f64()),
        "L_min": sig12(bound.l_min.to_f64()),
    });
    if args.curve {
        result["curve"] = json!(true);
        result["deg_C_min"] = json!(sig12(bound.l_min.to_f64()));
    }
    write_output(&args.output, manifest.finish(), result)?;
    Ok(true)
}

fn run_const(args: ConstArgs) -> Result<bool> {
    let manifest = Manifest::new(None, None);
    let k = parse_u32_list(&args.k)?;
    let m = parse_u32_list(&args.m)?;
    let variant = match args.variant {
        ConstVariantArg::NuStar => ConstantVariant::NuStar,
        ConstVariantArg::Nu => ConstantVariant::Nu,
        ConstVariantArg::UpperKm => ConstantVariant::UpperKM,
    };
    let value = constant_c(&k, &m, variant, 128)?;
    write_output(
        &args.output,
        manifest.finish(),
        json!({"value": sig12(value.to_f64())}),
    )?;
    Ok(true)
}

fn run_setsys(args: SetsysArgs) -> Result<bool> {
    match args.action {
        SetsysAction::Verify { input, output } => {
            let mut manifest = Manifest::new(None, None);
            let sys = load_system(&mut manifest, &input)?;
            let report = sys.verify();
            let pass = report.ok;
            write_output(&output, manifest.finish(), serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        SetsysAction::Mult { input, tol, seed, output } => {
            let seed = effective_seed(seed);
            let mut manifest = Manifest::new(Some(seed), None);
            let sys = load_system(&mut manifest, &input)?;
            let report = multiplicity_report(&sys, tol, seed);
            let pass = report.ok;
            write_output(&output, manifest.finish(), serde_json::to_value(&report)?)?;
            Ok(pass)
        }
        SetsysAction::Blowup { input, n, output } => {
            let mut manifest = Manifest::new(None, None);
            let sys = load_system(&mut manifest, &input)?;
            let blown = blow_up(&sys, n);
            let result = json!({
                "system": blown.to_json(),
                "ratio": sig12(blown.ratio()),
                "ratio_before": sig12(sys.ratio()),
            });
            write_output(&output, manifest.finish(), result)?;
            Ok(true)
        }
        SetsysAction::Gen { kind, k, m, d, output } => {
            let manifest = Manifest::new(None, None);
            let sys = match kind.as_str() {
                "2-3" => construction_2_3(),
                "kkk" => construction_kkk(k.ok_or_else(|| anyhow!("kkk needs --k"))?),
                "be" => jointslab::setsys::bollobas_eccles_system(),
                "tight" => tight_system(
                    m.ok_or_else(|| anyhow!("tight needs --M"))?,
                    d.ok_or_else(|| anyhow!("tight needs --d"))?,
                ),
                other => bail!("unknown construction {other:?}"),
            };
            write_output(&output, manifest.finish(), json!({"system": sys.to_json()}))?;
            Ok(true)
        }
    }
}

fn run_shadow(args: ShadowArgs) -> Result<bool> {
    let mut manifest = Manifest::new(None, None);
    let mode = match args.mode {
        ShadowModeArg::Exhaustive => PartialShadowMode::Exhaustive { ground_cap: args.ground },
        ShadowModeArg::Certificate => {
            let (a, b) = if args.cert == "be" {
                be_partial_shadow_certificate()
            } else {
                let raw = read_input(&mut manifest, &args.cert)?;
                let value: Value = serde_json::from_str(&raw).context("certificate JSON")?;
                let parse_family = |key: &str| -> Result<Vec<Vec<u32>>> {
                    serde_json::from_value(value[key].clone())
                        .with_context(|| format!("family {key}"))
                };
                (parse_family("A")?, parse_family("B")?)
            };
            PartialShadowMode::Certificate { a, b }
        }
    };
    let result = partial_shadow(args.r, args.m, args.k, mode)?;
    let pass = result.valid;
    write_output(&args.output, manifest.finish(), serde_json::to_value(&result)?)?;
    Ok(pass)
}
