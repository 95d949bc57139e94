//! `capbody` — generate, validate, solve and verify spherical cap packings
//! and their illumination direction sets.
//!
//! Exit codes: 0 on success, 1 on a verification/audit failure, 2 on
//! invalid input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use capbody::cap::{
    is_centrally_symmetric, is_unconditional, k_tangent_radius, ktangent_sets_compatible,
    validate_packing, CapBody, Packing, PackingCheck,
};
use capbody::configs::{self, GenConfig};
use capbody::illumination::{verify_illumination, DirectionSet};
use capbody::oracle::mc_verify;
use capbody::solver3d::solve_central_s2;
use capbody::solver4d::{
    search_cap_evading_three_tangent_system, search_cap_evading_two_tangent_system,
    solve_unconditional_s3, stranded_distance, three_tangent_escape_radius_bound,
    two_tangent_escape_radius_bound,
};
use capbody::sphere::{TolerancePolicy, UnitVector};
use capbody::SolveError;

#[derive(Parser)]
#[command(
    name = "capbody",
    about = "Cap bodies of the unit ball: packings, illumination directions and certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a packing: `central-s2`, `unconditional-s3`, or
    /// `canned:<octahedron-s2|eight-2t|sixteen-4t|four-2t|eight-3t>`.
    Generate {
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Target cap count (counts every orbit member; for
        /// unconditional-s3 this is the number of caps added on top of the
        /// seed family).
        #[arg(long = "n-caps", default_value_t = 10)]
        n_caps: usize,
        /// Radius range as `lo,hi`.
        #[arg(long, default_value = "0.05,0.6")]
        radii: String,
        /// Seed the unconditional generator with a canned tangent family.
        #[arg(long = "seed-family")]
        seed_family: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a packing or cap-body JSON file and report its symmetries.
    Validate { input: PathBuf },
    /// Produce illumination directions for a packing (6 on S², 8 on S³).
    Solve {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a direction set against a packing or body; optionally
    /// cross-check with the Monte Carlo oracle.
    Verify {
        input: PathBuf,
        directions: PathBuf,
        /// Sample count for the Monte Carlo cross-check.
        #[arg(long)]
        oracle: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the reference-case table; with --audit also recompute the
    /// stranded distances and run the escape-cap searches.
    Cases {
        #[arg(long)]
        audit: bool,
        /// Grid resolution for the escape-cap searches.
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Find the point of a packing farthest from every cap.
    Stranded {
        input: PathBuf,
        /// Grid size (defaults to 1e5 on S², 1e6 on S³).
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

enum CliError {
    Invalid(String),
    VerificationFailed(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Invalid(_) => ExitCode::from(2),
            CliError::VerificationFailed(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::VerificationFailed(m) => m,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    let tol = TolerancePolicy::default();
    match cmd {
        Command::Generate {
            kind,
            seed,
            n_caps,
            radii,
            seed_family,
            out,
            format,
        } => generate(&kind, seed, n_caps, &radii, seed_family.as_deref(), out, format, &tol),
        Command::Validate { input } => validate(&input, &tol),
        Command::Solve { input, out } => solve(&input, out, &tol),
        Command::Verify {
            input,
            directions,
            oracle,
            seed,
            out,
        } => verify(&input, &directions, oracle, seed, out, &tol),
        Command::Cases {
            audit,
            resolution,
            format,
        } => cases(audit, resolution, format),
        Command::Stranded {
            input,
            resolution,
            out,
            format,
        } => stranded(&input, resolution, out, format, &tol),
    }
}

fn parse_radii(s: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(invalid(format!("--radii expects `lo,hi`, got `{s}`")));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad radius `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad radius `{}`", parts[1])))?;
    if !(0.0 < lo && lo <= hi && hi < std::f64::consts::FRAC_PI_2) {
        return Err(invalid(format!("radius range ({lo}, {hi}) outside (0, π/2)")));
    }
    Ok((lo, hi))
}

fn read_json(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: not JSON: {e}", path.display())))
}

/// A packing or cap-body file, normalized to both views.
fn read_geometry(path: &PathBuf, tol: &TolerancePolicy) -> Result<(Packing, CapBody), CliError> {
    let value = read_json(path)?;
    if value.get("caps").is_some() {
        let p: Packing = serde_json::from_value(value)
            .map_err(|e| invalid(format!("{}: invalid packing: {e}", path.display())))?;
        let body = CapBody::from_packing(&p, tol)
            .map_err(|e| invalid(format!("{}: packing has no dual body: {e}", path.display())))?;
        Ok((p, body))
    } else if value.get("vertices").is_some() {
        let body: CapBody = serde_json::from_value(value)
            .map_err(|e| invalid(format!("{}: invalid cap body: {e}", path.display())))?;
        let p = body.to_packing(tol);
        Ok((p, body))
    } else {
        Err(invalid(format!(
            "{}: expected a `caps` or `vertices` field",
            path.display()
        )))
    }
}

/// A direction-set file: either `{"dim", "directions"}` or any JSON object
/// with a `directions` array (e.g. a solution file).
fn read_directions(path: &PathBuf) -> Result<DirectionSet, CliError> {
    let value = read_json(path)?;
    let dirs = value
        .get("directions")
        .ok_or_else(|| invalid(format!("{}: no `directions` field", path.display())))?;
    let raw: Vec<Vec<f64>> = serde_json::from_value(dirs.clone())
        .map_err(|e| invalid(format!("{}: bad directions array: {e}", path.display())))?;
    if raw.is_empty() {
        return Err(invalid(format!("{}: empty direction set", path.display())));
    }
    let dim = raw[0].len();
    let mut units = Vec::with_capacity(raw.len());
    for d in &raw {
        units.push(
            UnitVector::new(d.clone(), &TolerancePolicy::default())
                .map_err(|e| invalid(format!("{}: bad direction {d:?}: {e}", path.display())))?,
        );
    }
    DirectionSet::new(dim, units).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(text: String, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn packing_csv(p: &Packing) -> String {
    let mut s = String::new();
    let headers: Vec<String> = (1..=p.dim()).map(|i| format!("x{i}")).collect();
    let _ = writeln!(s, "{},radius", headers.join(","));
    for cap in p.caps() {
        let coords: Vec<String> = cap.center().coords().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{},{}", coords.join(","), cap.radius());
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn generate(
    kind: &str,
    seed: u64,
    n_caps: usize,
    radii: &str,
    seed_family: Option<&str>,
    out: Option<PathBuf>,
    format: Format,
    tol: &TolerancePolicy,
) -> Result<(), CliError> {
    let radius_range = parse_radii(radii)?;
    let cfg = GenConfig {
        seed,
        n_caps,
        radius_range,
        ..GenConfig::default()
    };

    let (packing, stalled) = if let Some(name) = kind.strip_prefix("canned:") {
        let p = configs::canned(name).ok_or_else(|| {
            invalid(format!(
                "unknown canned case `{name}` (expected one of {:?})",
                configs::CANNED_NAMES
            ))
        })?;
        (p, false)
    } else {
        match kind {
            "central-s2" => {
                let g = configs::generate_central_s2(&cfg, tol);
                (g.packing, g.stalled)
            }
            "unconditional-s3" => {
                let family = match seed_family {
                    Some(name) => Some(configs::canned(name).ok_or_else(|| {
                        invalid(format!("unknown seed family `{name}`"))
                    })?),
                    None => None,
                };
                let g = configs::generate_unconditional_s3(&cfg, family.as_ref(), tol);
                (g.packing, g.stalled)
            }
            other => {
                return Err(invalid(format!(
                    "unknown kind `{other}` (expected central-s2, unconditional-s3 or canned:<case>)"
                )))
            }
        }
    };

    if stalled {
        eprintln!(
            "warning: generation stalled after {} consecutive rejections; emitting {} caps",
            cfg.max_rejections,
            packing.len()
        );
    }

    let text = match format {
        Format::Csv => packing_csv(&packing),
        Format::Json if stalled => {
            let mut v = serde_json::to_value(&packing).expect("packing serializes");
            v["stalled"] = json!(true);
            serde_json::to_string_pretty(&v).expect("json")
        }
        Format::Json => serde_json::to_string_pretty(&packing).expect("json"),
    };
    emit(text, out)
}

fn validate(input: &PathBuf, tol: &TolerancePolicy) -> Result<(), CliError> {
    let (packing, body) = read_geometry(input, tol)?;
    let check = validate_packing(packing.caps(), tol);
    let report = json!({
        "valid": check.is_ok(),
        "dim": packing.dim(),
        "caps": packing.len(),
        "vertices": body.vertices().len(),
        "centrally_symmetric": is_centrally_symmetric(&packing, tol),
        "unconditional": is_unconditional(&packing, tol),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    match check {
        PackingCheck::Ok => Ok(()),
        PackingCheck::Violation { i, j, overlap } => Err(invalid(format!(
            "caps {i} and {j} overlap by {overlap:.3e}"
        ))),
    }
}

fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::InternalContradiction(_) => CliError::VerificationFailed(e.to_string()),
        other => invalid(other.to_string()),
    }
}

fn solve(input: &PathBuf, out: Option<PathBuf>, tol: &TolerancePolicy) -> Result<(), CliError> {
    let (packing, _) = read_geometry(input, tol)?;
    let solution = match packing.dim() {
        3 => {
            let sol = solve_central_s2(&packing, tol).map_err(solve_error)?;
            json!({
                "dim": 3,
                "case": format!("{:?}", sol.branch),
                "frame": sol.rotation.rows(),
                "directions": sol.directions.directions.iter()
                    .map(|u| u.coords().to_vec()).collect::<Vec<_>>(),
                "certificate": sol.certificate,
            })
        }
        4 => {
            let sol = solve_unconditional_s3(&packing, tol).map_err(solve_error)?;
            json!({
                "dim": 4,
                "case": format!("{:?}", sol.case.kind),
                "axis_map": { "perm": sol.case.axis_map.perm, "signs": sol.case.axis_map.signs },
                "directions": sol.directions.directions.iter()
                    .map(|u| u.coords().to_vec()).collect::<Vec<_>>(),
                "certificate": sol.certificate,
            })
        }
        d => return Err(invalid(format!("no solver for dimension {d}"))),
    };
    emit(serde_json::to_string_pretty(&solution).expect("json"), out)
}

fn verify(
    input: &PathBuf,
    directions: &PathBuf,
    oracle: Option<usize>,
    seed: u64,
    out: Option<PathBuf>,
    tol: &TolerancePolicy,
) -> Result<(), CliError> {
    let (_, body) = read_geometry(input, tol)?;
    let dirs = read_directions(directions)?;
    if dirs.dim != body.dim() {
        return Err(invalid(format!(
            "dimension mismatch: body is {}-dimensional, directions are {}-dimensional",
            body.dim(),
            dirs.dim
        )));
    }

    let verification = verify_illumination(&body, &dirs, tol);
    let mut failure = match &verification {
        Ok(_) => None,
        Err(e) => Some(e.to_string()),
    };
    let mut report = match &verification {
        Ok(cert) => json!({ "certificate": cert }),
        Err(e) => json!({ "certificate": null, "failure": e.to_string() }),
    };

    if let Some(n) = oracle {
        let mc = mc_verify(&body, &dirs, n, seed, tol);
        if mc.unlit > 0 && failure.is_none() {
            failure = Some(format!("oracle found {} unlit samples", mc.unlit));
        }
        report["oracle"] = serde_json::to_value(&mc).expect("report serializes");
    }

    emit(serde_json::to_string_pretty(&report).expect("json"), out)?;
    match failure {
        None => Ok(()),
        Some(msg) => Err(CliError::VerificationFailed(msg)),
    }
}

struct CaseRow {
    name: String,
    value: String,
    expected: String,
    pass: bool,
}

fn cases(audit: bool, resolution: f64, format: Format) -> Result<(), CliError> {
    let mut rows: Vec<CaseRow> = Vec::new();
    let mut row = |name: &str, value: String, expected: String, pass: bool| {
        rows.push(CaseRow {
            name: name.to_string(),
            value,
            expected,
            pass,
        });
    };

    let targets = [
        (2usize, std::f64::consts::FRAC_PI_4),
        (3, (1.0f64 / 3.0).sqrt().asin()),
        (4, std::f64::consts::FRAC_PI_6),
    ];
    for (k, expected) in targets {
        let v = k_tangent_radius(k, 4).expect("k in range");
        row(
            &format!("k-tangent radius k={k}"),
            format!("{v:.10}"),
            format!("{expected:.10}"),
            (v - expected).abs() < 1e-12,
        );
    }

    for k1 in 2..=4usize {
        for k2 in k1..=4usize {
            let got = ktangent_sets_compatible(k1, k2, 4);
            let expected = k1 == 2 && k2 == 2;
            row(
                &format!("families ({k1},{k2}) compatible"),
                got.to_string(),
                expected.to_string(),
                got == expected,
            );
        }
    }

    let pi6 = std::f64::consts::FRAC_PI_6;
    let th2 = two_tangent_escape_radius_bound();
    let th3 = three_tangent_escape_radius_bound();
    row(
        "two-tangent escape threshold < π/6",
        format!("{th2:.10}"),
        format!("< {pi6:.10}"),
        th2 < pi6,
    );
    row(
        "three-tangent escape threshold < π/6",
        format!("{th3:.10}"),
        format!("< {pi6:.10}"),
        th3 < pi6,
    );

    if audit {
        let s = stranded_distance(&configs::eight_2t(), 1_000_000);
        let expected = std::f64::consts::PI / 12.0;
        row(
            "stranded distance, eight 2-tangent caps",
            format!("{:.10}", s.dist),
            format!("{expected:.10}"),
            (s.dist - expected).abs() < 1e-6,
        );
        let s = stranded_distance(&configs::sixteen_4t(), 1_000_000);
        let expected = std::f64::consts::FRAC_PI_6;
        row(
            "stranded distance, sixteen 4-tangent caps",
            format!("{:.10}", s.dist),
            format!("{expected:.10}"),
            (s.dist - expected).abs() < 1e-6,
        );

        let two = search_cap_evading_two_tangent_system(resolution);
        row(
            &format!("two-tangent escape search @{resolution:.0e}"),
            match &two {
                None => "no feasible cap".into(),
                Some(c) => format!("found {c:?}"),
            },
            "no feasible cap".into(),
            two.is_none(),
        );
        let three = search_cap_evading_three_tangent_system(resolution);
        row(
            &format!("three-tangent escape search @{resolution:.0e}"),
            match &three {
                None => "no feasible cap".into(),
                Some(c) => format!("found {c:?}"),
            },
            "no feasible cap".into(),
            three.is_none(),
        );
    }

    let all_pass = rows.iter().all(|r| r.pass);
    match format {
        Format::Csv => {
            println!("check,value,expected,pass");
            for r in &rows {
                println!(
                    "{},{},{},{}",
                    r.name.replace(',', ";"),
                    r.value.replace(',', ";"),
                    r.expected.replace(',', ";"),
                    r.pass
                );
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "check": r.name,
                        "value": r.value,
                        "expected": r.expected,
                        "pass": r.pass,
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "rows": v, "all_pass": all_pass }))
                    .expect("json")
            );
        }
    }
    if all_pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed("case audit failed".into()))
    }
}

fn stranded(
    input: &PathBuf,
    resolution: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
    tol: &TolerancePolicy,
) -> Result<(), CliError> {
    let (packing, _) = read_geometry(input, tol)?;
    if packing.is_empty() {
        return Err(invalid("stranded point needs a non-empty packing"));
    }
    let grid = resolution.unwrap_or(if packing.dim() <= 3 { 100_000 } else { 1_000_000 });
    let s = stranded_distance(&packing, grid);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "point": s.point.coords(),
            "dist": s.dist,
        }))
        .expect("json"),
        Format::Csv => {
            let coords: Vec<String> = s.point.coords().iter().map(|x| x.to_string()).collect();
            format!("{},{}\n", coords.join(","), s.dist)
        }
    };
    emit(text, out)
}
