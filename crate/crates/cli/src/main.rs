use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbcmc::curvature::analyze_point;
use fbcmc::delaunay::z_at_knots;
use fbcmc::freeboundary::{find_n0, g_function, violation_points};
use fbcmc::mesh::{export_obj_objects, revolve, sphere};
use fbcmc::{
    classify, AnalysisConfig, AnalysisReport, DelaunayParams, Error, Family, QuadratureConfig,
    RootConfig, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;

mod output;

use output::{cell, open_sink, to_json};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_NO_PORTION: u8 = 4;

/// Delaunay surfaces as free boundary CMC surfaces in a ball.
#[derive(Parser)]
#[command(name = "fbcmc", version, about)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,

    /// Output format. Defaults to csv for `profile` and `scan`, text otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true, env = "FBCMC_ABS_TOL", default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, global = true, env = "FBCMC_REL_TOL", default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, global = true, env = "FBCMC_MAX_SUBDIVISIONS", default_value_t = 1000)]
    max_subdivisions: usize,
    #[arg(long, global = true, env = "FBCMC_X_TOL", default_value_t = 1e-12)]
    x_tol: f64,
    #[arg(long, global = true, env = "FBCMC_F_TOL", default_value_t = 1e-10)]
    f_tol: f64,
    #[arg(long, global = true, env = "FBCMC_MAX_ITERATIONS", default_value_t = 200)]
    max_iterations: usize,
    /// Samples along a portion for the gap minimum and enclosure checks.
    #[arg(long, global = true, env = "FBCMC_SAMPLES", default_value_t = 2048)]
    samples: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ParamArgs {
    /// Mean curvature H > 0.
    #[arg(long = "H", allow_negative_numbers = true)]
    h: f64,
    /// Delaunay parameter B ≥ 0, B ≠ 1.
    #[arg(long = "B", allow_negative_numbers = true)]
    b: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one parameter pair and report the free boundary portion.
    Analyze {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Dump the generatrix, curvatures and gap at evenly spaced arc lengths.
    Profile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        s_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_max: f64,
        /// Number of rows.
        #[arg(long, default_value_t = 101)]
        n: usize,
    },
    /// Classify every cell of an (H, B) grid.
    Scan {
        #[arg(long)]
        h_min: f64,
        #[arg(long)]
        h_max: f64,
        #[arg(long, default_value_t = 10)]
        h_steps: usize,
        #[arg(long)]
        b_min: f64,
        #[arg(long)]
        b_max: f64,
        #[arg(long, default_value_t = 10)]
        b_steps: usize,
    },
    /// Export the free boundary portion as a Wavefront OBJ file.
    Mesh {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
        /// Rings along the meridian and vertices per ring.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Append the bounding sphere of radius R0 as a second object.
        #[arg(long)]
        include_sphere: bool,
    },
    /// List the points t_n where the pinching gap goes negative (unduloids).
    Violations {
        #[command(flatten)]
        params: ParamArgs,
        /// How many points to list; defaults to n0 + 3.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run the built-in acceptance checks.
    Verify,
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams { .. }
            | Error::InvalidConfig(_)
            | Error::InvalidRange { .. }
            | Error::WrongFamily { .. }
            | Error::ZeroNeck => EXIT_INPUT,
            Error::NoRoot { .. } => EXIT_NO_PORTION,
            _ => EXIT_NUMERIC,
        };
        Fail(code, e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(EXIT_NUMERIC, format!("i/o error: {e}"))
    }
}

fn input(msg: impl Into<String>) -> Fail {
    Fail(EXIT_INPUT, msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn analysis_config(t: &TolArgs) -> Result<AnalysisConfig, Fail> {
    let quad = QuadratureConfig {
        abs_tol: t.abs_tol,
        rel_tol: t.rel_tol,
        max_subdivisions: t.max_subdivisions,
    };
    let root = RootConfig {
        x_tol: t.x_tol,
        f_tol: t.f_tol,
        max_iterations: t.max_iterations,
    };
    quad.validate()?;
    root.validate()?;
    if t.samples < 16 {
        return Err(input("--samples must be at least 16"));
    }
    Ok(AnalysisConfig {
        quad,
        root,
        n_samples: t.samples,
        ..AnalysisConfig::default()
    })
}

fn run(cli: &Cli) -> Result<u8, Fail> {
    let cfg = analysis_config(&cli.tol)?;
    let fmt = |default| cli.format.unwrap_or(default);
    let out = cli.output.as_deref();
    match &cli.command {
        Command::Analyze { params } => {
            let p = DelaunayParams::new(params.h, params.b)?;
            let report = classify(&p, &cfg)?;
            let mut w = open_sink(out)?;
            write_analysis(&mut w, &report, fmt(Format::Text))?;
            w.flush()?;
            Ok(0)
        }
        Command::Profile { params, s_min, s_max, n } => {
            let p = DelaunayParams::new(params.h, params.b)?;
            if !(s_min < s_max) || *n == 0 {
                return Err(input(format!("need s-min < s-max and n ≥ 1 (got [{s_min}, {s_max}], n={n})")));
            }
            let rows = profile_rows(&p, *s_min, *s_max, *n, &cfg.quad)?;
            let mut w = open_sink(out)?;
            write_profile(&mut w, &rows, fmt(Format::Csv))?;
            w.flush()?;
            Ok(0)
        }
        Command::Scan { h_min, h_max, h_steps, b_min, b_max, b_steps } => {
            let hs = grid(*h_min, *h_max, *h_steps, "H")?;
            let bs = grid(*b_min, *b_max, *b_steps, "B")?;
            let cells: Vec<(f64, f64)> =
                hs.iter().flat_map(|&h| bs.iter().map(move |&b| (h, b))).collect();
            let rows: Vec<ScanRow> = cells.par_iter().map(|&(h, b)| scan_cell(h, b, &cfg)).collect();
            let mut w = open_sink(out)?;
            write_scan(&mut w, &rows, fmt(Format::Csv))?;
            w.flush()?;
            Ok(0)
        }
        Command::Mesh { params, out: path, resolution, include_sphere } => {
            let p = DelaunayParams::new(params.h, params.b)?;
            if *resolution < 3 {
                return Err(input("--resolution must be at least 3"));
            }
            let report = classify(&p, &cfg)?;
            let Some(portion) = report.portion else {
                return Err(Fail(
                    EXIT_NO_PORTION,
                    format!("no free boundary portion ({:?})", report.verdict),
                ));
            };
            let band = revolve(&p, -portion.s_bar, portion.s_bar, *resolution, *resolution, &cfg.quad)?;
            let ball;
            let mut objects = vec![("portion", &band)];
            if *include_sphere {
                ball = sphere(portion.r0, *resolution, *resolution)?;
                objects.push(("sphere", &ball));
            }
            let mut file = BufWriter::new(File::create(path)?);
            export_obj_objects(&objects, &mut file)?;
            file.flush()?;
            let mut w = open_sink(out)?;
            writeln!(
                w,
                "wrote {} ({} vertices, {} triangles, R0 = {})",
                path.display(),
                objects.iter().map(|(_, m)| m.vertices.len()).sum::<usize>(),
                objects.iter().map(|(_, m)| m.triangles.len()).sum::<usize>(),
                cell(Some(portion.r0)),
            )?;
            w.flush()?;
            Ok(0)
        }
        Command::Violations { params, count } => {
            let p = DelaunayParams::new(params.h, params.b)?;
            let n = match count {
                Some(c) => *c,
                None => find_n0(&p, &cfg.quad)? + cfg.extra_violations,
            };
            let pts = violation_points(&p, n, &cfg.quad)?;
            let mut w = open_sink(out)?;
            match fmt(Format::Text) {
                Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&to_json(&pts)).unwrap())?,
                Format::Csv | Format::Text => {
                    writeln!(w, "n,t,z,lambda1,lambda2,gap")?;
                    for v in &pts {
                        let c = |x| cell(Some(x));
                        writeln!(w, "{},{},{},{},{},{}", v.n, c(v.t), c(v.z), c(v.lambda1), c(v.lambda2), c(v.gap))?;
                    }
                }
            }
            w.flush()?;
            Ok(0)
        }
        Command::Verify => {
            let results = fbcmc::verify::run_all(&cfg);
            let mut w = open_sink(out)?;
            for r in &results {
                match fmt(Format::Text) {
                    Format::Json => writeln!(w, "{}", to_json(r))?,
                    Format::Csv | Format::Text => writeln!(
                        w,
                        "{} {:<5} {:<50} worst {:.3e} (tol {:.0e})  {}",
                        if r.passed { "PASS" } else { "FAIL" },
                        r.id,
                        r.name,
                        r.worst,
                        r.tolerance,
                        r.detail
                    )?,
                }
            }
            w.flush()?;
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                eprintln!("{failed} of {} checks failed", results.len());
                return Ok(EXIT_VERIFY);
            }
            Ok(0)
        }
    }
}

fn grid(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>, Fail> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi || (steps > 1 && lo == hi) {
        return Err(input(format!("bad {name} range [{lo}, {hi}] with {steps} steps")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn write_analysis(w: &mut dyn Write, r: &AnalysisReport, fmt: Format) -> std::io::Result<()> {
    let p = &r.params;
    let portion = r.portion.as_ref();
    match fmt {
        Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&to_json(r)).unwrap()),
        Format::Csv => {
            writeln!(w, "H,B,family,verdict,s0,r0,z0,zAtS0,sBar,R0,scaledH,minGap,n0")?;
            writeln!(
                w,
                "{},{},{},{:?},{},{},{},{},{},{},{},{},{}",
                cell(Some(p.h())),
                cell(Some(p.b())),
                p.family(),
                r.verdict,
                cell(r.s0),
                cell(r.r0),
                cell(r.z0),
                cell(r.z_at_s0),
                cell(portion.map(|q| q.s_bar)),
                cell(portion.map(|q| q.r0)),
                cell(portion.map(|q| q.scaled_params.h())),
                cell(portion.map(|q| q.min_gap)),
                r.n0.map(|n| n.to_string()).unwrap_or_default(),
            )
        }
        Format::Text => {
            writeln!(w, "H = {}, B = {} ({})", p.h(), p.b(), p.family())?;
            writeln!(w, "verdict: {:?}", r.verdict)?;
            let line = |w: &mut dyn Write, k: &str, v: Option<f64>| match v {
                Some(x) => writeln!(w, "  {k:<8} {}", cell(Some(x))),
                None => Ok(()),
            };
            line(w, "s0", r.s0)?;
            line(w, "r0", r.r0)?;
            line(w, "z0", r.z0)?;
            line(w, "z(s0)", r.z_at_s0)?;
            if let Some(q) = portion {
                line(w, "s̄", Some(q.s_bar))?;
                line(w, "R0", Some(q.r0))?;
                line(w, "H·R0", Some(q.scaled_params.h()))?;
                line(w, "minGap", Some(q.min_gap))?;
            }
            if let Some(n0) = r.n0 {
                writeln!(w, "  {:<8} {n0}", "n0")?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProfileRow {
    s: f64,
    x: f64,
    z: f64,
    dx: f64,
    dz: f64,
    ddx: f64,
    ddz: f64,
    k1: f64,
    k2: f64,
    u: f64,
    lambda1: f64,
    lambda2: f64,
    phi_sq: f64,
    gap: f64,
    g: Option<f64>,
}

fn profile_rows(
    p: &DelaunayParams,
    s_min: f64,
    s_max: f64,
    n: usize,
    quad: &QuadratureConfig,
) -> Result<Vec<ProfileRow>, Fail> {
    let knots: Vec<f64> = if n == 1 {
        vec![s_min]
    } else {
        (0..n).map(|i| s_min + (s_max - s_min) * i as f64 / (n - 1) as f64).collect()
    };
    let zs = z_at_knots(p, &knots, quad)?;
    Ok(knots
        .iter()
        .zip(zs)
        .map(|(&s, z)| {
            let st = p.state_with_z(s, z);
            let a = analyze_point(&st);
            ProfileRow {
                s,
                x: st.x,
                z,
                dx: st.dx,
                dz: st.dz,
                ddx: st.ddx,
                ddz: st.ddz,
                k1: a.k1,
                k2: a.k2,
                u: a.support,
                lambda1: a.lambda1,
                lambda2: a.lambda2,
                phi_sq: a.phi_sq,
                gap: a.gap,
                g: g_function(&st).ok(),
            }
        })
        .collect())
}

fn write_profile(w: &mut dyn Write, rows: &[ProfileRow], fmt: Format) -> std::io::Result<()> {
    if fmt == Format::Json {
        return writeln!(w, "{}", serde_json::to_string_pretty(&to_json(&rows)).unwrap());
    }
    writeln!(w, "s,x,z,dx,dz,ddx,ddz,k1,k2,u,lambda1,lambda2,phiSq,gap,g")?;
    for r in rows {
        let vals = [
            r.s, r.x, r.z, r.dx, r.dz, r.ddx, r.ddz, r.k1, r.k2, r.u, r.lambda1, r.lambda2, r.phi_sq,
            r.gap,
        ];
        let mut line: Vec<String> = vals.iter().map(|&v| cell(Some(v))).collect();
        line.push(cell(r.g));
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ScanRow {
    #[serde(rename = "H")]
    h: f64,
    #[serde(rename = "B")]
    b: f64,
    family: Option<Family>,
    verdict: Verdict,
    /// `z(s0) - z0`, unduloids only.
    z_s0_minus_z0: Option<f64>,
    /// `s̄` for unduloids, `r̄` for nodoids.
    s_bar: Option<f64>,
    #[serde(rename = "R0")]
    r0: Option<f64>,
    #[serde(rename = "scaledH")]
    scaled_h: Option<f64>,
    min_gap: Option<f64>,
    error: Option<String>,
}

fn scan_cell(h: f64, b: f64, cfg: &AnalysisConfig) -> ScanRow {
    let mut row = ScanRow {
        h,
        b,
        family: None,
        verdict: Verdict::Invalid,
        z_s0_minus_z0: None,
        s_bar: None,
        r0: None,
        scaled_h: None,
        min_gap: None,
        error: None,
    };
    let report = DelaunayParams::new(h, b).and_then(|p| classify(&p, cfg));
    match report {
        Ok(r) => {
            row.family = Some(r.params.family());
            row.verdict = r.verdict;
            row.z_s0_minus_z0 = r.z_at_s0.zip(r.z0).map(|(a, b)| a - b);
            if let Some(q) = r.portion {
                row.s_bar = Some(q.s_bar);
                row.r0 = Some(q.r0);
                row.scaled_h = Some(q.scaled_params.h());
                row.min_gap = Some(q.min_gap);
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn write_scan(w: &mut dyn Write, rows: &[ScanRow], fmt: Format) -> std::io::Result<()> {
    if fmt == Format::Json {
        return writeln!(w, "{}", serde_json::to_string_pretty(&to_json(&rows)).unwrap());
    }
    writeln!(w, "H,B,family,verdict,zS0MinusZ0,sBar,R0,scaledH,minGap")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:?},{},{},{},{},{}",
            cell(Some(r.h)),
            cell(Some(r.b)),
            r.family.map(|f| f.to_string()).unwrap_or_default(),
            r.verdict,
            cell(r.z_s0_minus_z0),
            cell(r.s_bar),
            cell(r.r0),
            cell(r.scaled_h),
            cell(r.min_gap),
        )?;
    }
    Ok(())
}
