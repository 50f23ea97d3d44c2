//! The `qtoric` command line. Every subcommand reads fan documents and
//! prints a deterministic JSON report (SVG for `plot`).
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! errors (unreadable input, schema violations, unsupported requests).

mod json;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use qtoric::chart::{build_atlas, build_chart, bundle_transitions, forget_calibration, gluing, verify_cocycle, Chart, ChartError};
use qtoric::classical::{class_group, dual_cone, gale_transform, git_presentation, hilbert_basis, stabilizer_report, toric_relations, ClassicalContext, DEFAULT_DEGREE_BOUND};
use qtoric::fan::CalibratedFan;
use qtoric::io::{emit_svg, FanDocument, MorphismDocument, View};
use qtoric::morphism::{glue_compatibility, induced_chart_morphism, induced_family};
use qtoric::scalar::DEFAULT_MAX_BITS;
use qtoric::IrrationalBasis;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

/// Exit status and the text destined for standard output and error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "qtoric", version, about = "Exact linear and lattice data of calibrated quantum fans")]
struct Cli {
    /// Precision budget of the sign oracle, in bits
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BITS)]
    max_bits: u32,
    /// Write the report to this file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add all faces and pairwise intersections to the fan before use
    #[arg(long, global = true)]
    close_fan: bool,
    /// Include wall-clock timing in the report, which then varies between runs
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the fan axioms and the generator set
    Validate { fan: PathBuf },
    /// Chart presentation of one cone
    Chart {
        fan: PathBuf,
        #[arg(long)]
        cone: usize,
    },
    /// Transitions between the charts of maximal cones, with cocycle checks
    Glue { fan: PathBuf },
    /// Check a fan morphism and the chart morphisms it induces
    Morphism { source: PathBuf, target: PathBuf, morphism: PathBuf },
    /// Hilbert basis, binomial relations and class group of a rational cone
    Classical {
        fan: PathBuf,
        #[arg(long)]
        cone: usize,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree_bound: usize,
    },
    /// Integer Gale transform of the calibration
    Gale { fan: PathBuf },
    /// Quotient presentation of the fan over its used generators
    Git { fan: PathBuf },
    /// SVG drawing of a fan in dimension at most 3
    Plot {
        fan: PathBuf,
        #[arg(long, default_value_t = 400.0)]
        size: f64,
        #[arg(long, default_value_t = 35.0)]
        azimuth: f64,
        #[arg(long, default_value_t = 25.0)]
        elevation: f64,
    },
}

struct Context {
    max_bits: u32,
    close: bool,
    inputs: Vec<Value>,
}

struct Report {
    passed: bool,
    results: Value,
    raw: Option<String>,
}

type Res<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

impl Context {
    fn read(&mut self, path: &Path) -> Res<String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.inputs.push(json!({"file": name, "sha256": hex::encode(Sha256::digest(text.as_bytes()))}));
        Ok(text)
    }

    fn fan(&mut self, path: &Path) -> Res<(FanDocument, CalibratedFan)> {
        let text = self.read(path)?;
        let doc = FanDocument::parse(&text).map_err(|e| format!("{}: {}", path.display(), e))?;
        let field = doc.field(self.max_bits);
        let cf = doc.calibrated_fan(&field, self.close).map_err(|e| format!("{}: {}", path.display(), e))?;
        Ok((doc, cf))
    }
}

fn cone_sets(cf: &CalibratedFan) -> Value {
    Value::Array(cf.fan.cones().iter().map(|c| json::set(&c.rays)).collect())
}

fn check_cone(cf: &CalibratedFan, cone: usize) -> Res<()> {
    if cone >= cf.fan.len() {
        return Err(format!("cone {} out of range: the fan has {} cones", cone, cf.fan.len()));
    }
    Ok(())
}

fn validate(ctx: &mut Context, fan: &Path) -> Res<Report> {
    let (_, cf) = ctx.fan(fan)?;
    let report = cf.validate().map_err(err)?;
    Ok(Report {
        passed: report.passed(),
        results: json!({
            "d": cf.d(),
            "N": cf.n(),
            "cones": cone_sets(&cf),
            "axioms": serde_json::to_value(&report.checks).map_err(err)?,
        }),
        raw: None,
    })
}

fn chart_value(chart: &Chart, basis: &IrrationalBasis) -> Value {
    json!({
        "cone": chart.cone_id,
        "I": chart.i_set,
        "I_tilde": chart.i_tilde,
        "J": chart.j_set,
        "labels": chart.labels,
        "chi": chart.chi,
        "multiplicative": chart.multiplicative,
        "h_bar": json::matrix(&chart.h_bar, basis),
        "psi": json::matrix(&chart.psi, basis),
        "phi": json::matrix(&chart.phi, basis),
        "P_chi": json::int_matrix(&chart.p_chi),
        "ker_basis": chart.ker_basis.iter().map(|v| json::vector(&json::normalized_line(v), basis)).collect::<Vec<_>>(),
        "xi": {"rank": chart.xi.rank, "basis": json::int_rows(&chart.xi.basis)},
    })
}

fn chart(ctx: &mut Context, fan: &Path, cone: usize) -> Res<Report> {
    let (doc, cf) = ctx.fan(fan)?;
    check_cone(&cf, cone)?;
    let basis = doc.basis();
    let chart = build_chart(&cf, cone).map_err(err)?;
    let mut results = chart_value(&chart, basis);
    let invariant = chart.verify_invariant();
    results["invariant_holds"] = json!(invariant);
    results["standard_presentation"] = json!(chart.matches_standard_presentation());
    let band = forget_calibration(&chart).map_err(err)?;
    results["band_rank"] = json!(band.band_rank);
    results["stabilizer"] = match stabilizer_report(&cf.cal, &chart) {
        Ok(s) => json!({
            "calibrated": {"connected_dim": s.calibrated.connected_dim, "discrete_rank": s.calibrated.free_rank, "torsion": json::int_vector(&s.calibrated.torsion)},
            "gale": {"connected_dim": s.gale.connected_dim, "discrete_rank": s.gale.free_rank, "torsion": json::int_vector(&s.gale.torsion)},
            "verdict": s.verdict,
        }),
        Err(e) => json!({"unavailable": e.to_string()}),
    };
    Ok(Report { passed: invariant, results, raw: None })
}

fn glue(ctx: &mut Context, fan: &Path) -> Res<Report> {
    let (doc, cf) = ctx.fan(fan)?;
    let basis = doc.basis();
    let atlas = build_atlas(&cf).map_err(err)?;
    let maximal = cf.fan.maximal_cones().map_err(err)?;
    let mut transitions = Vec::new();
    let mut failures = Vec::new();
    for (x, &s) in maximal.iter().enumerate() {
        for &t in &maximal[x + 1..] {
            match gluing(&cf, &atlas[s], &atlas[t]) {
                Ok((fwd, bwd)) => {
                    for tr in [fwd, bwd] {
                        transitions.push(json!({
                            "from": tr.from,
                            "to": tr.to,
                            "union": tr.union,
                            "K_from": tr.k_from,
                            "K_to": tr.k_to,
                            "linear": json::matrix(&tr.map_linear, basis),
                            "lattice": json::int_matrix(&tr.map_int),
                        }));
                    }
                }
                Err(e @ (ChartError::TransitionFailure(_) | ChartError::NoCommonFace(..))) => failures.push(e.to_string()),
                Err(e) => return Err(err(e)),
            }
        }
    }
    let mut cocycles = Vec::new();
    for (x, &a) in maximal.iter().enumerate() {
        for (y, &b) in maximal.iter().enumerate().skip(x + 1) {
            for &c in &maximal[y + 1..] {
                let holds = verify_cocycle(&atlas[a], &atlas[b], &atlas[c]).map_err(err)?;
                if !holds {
                    failures.push(format!("cocycle fails for cones {}, {}, {}", a, b, c));
                }
                cocycles.push(json!({"cones": [a, b, c], "holds": holds}));
            }
        }
    }
    let bundles: Vec<Value> = if failures.is_empty() {
        bundle_transitions(&cf, &atlas)
            .map_err(err)?
            .into_iter()
            .map(|b| {
                if !b.verified {
                    failures.push(format!("bundle transition {} -> {} fails", b.sigma, b.tau));
                }
                json!({"sigma": b.sigma, "tau": b.tau, "K": b.k_set, "T": json::int_matrix(&b.t_map), "verified": b.verified})
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(Report {
        passed: failures.is_empty(),
        results: json!({
            "maximal_cones": maximal,
            "transitions": transitions,
            "cocycles": cocycles,
            "bundle_transitions": bundles,
            "witnesses": failures,
        }),
        raw: None,
    })
}

fn morphism(ctx: &mut Context, source: &Path, target: &Path, morphism: &Path) -> Res<Report> {
    let (src_doc, src) = ctx.fan(source)?;
    let (tgt_doc, tgt) = ctx.fan(target)?;
    let names = |d: &FanDocument| d.symbols.iter().map(|s| s.name.clone()).collect::<Vec<_>>();
    if names(&src_doc) != names(&tgt_doc) {
        return Err("source and target documents declare different symbols".into());
    }
    let text = ctx.read(morphism)?;
    let mdoc = MorphismDocument::parse(&text, src_doc.basis()).map_err(|e| format!("{}: {}", morphism.display(), e))?;
    let m = mdoc.morphism(&src, &tgt).map_err(|e| format!("{}: {}", morphism.display(), e))?;
    let report = m.validate(&src, &tgt).map_err(err)?;
    let mut results = Map::new();
    results.insert("axioms".into(), serde_json::to_value(&report.checks).map_err(err)?);
    let mut passed = report.passed();
    if passed {
        let basis = src_doc.basis();
        let atlas = build_atlas(&src).map_err(err)?;
        let atlas_t = build_atlas(&tgt).map_err(err)?;
        let mut charts = Vec::new();
        for sigma in src.fan.maximal_cones().map_err(err)? {
            let Some(t) = m.target_cone(&src, &tgt, sigma).map_err(err)? else { continue };
            let cm = induced_chart_morphism(&m, &src, &tgt, &atlas[sigma], &atlas_t[t]).map_err(err)?;
            charts.push(json!({
                "source_cone": sigma,
                "target_cone": t,
                "L_tilde": json::matrix(&cm.l_tilde, basis),
                "H_chichi": json::int_matrix(&cm.h_chichi),
                "block_form": cm.block_form,
            }));
        }
        let family = induced_family(&m, &src, &tgt, &atlas, &atlas_t).map_err(err)?;
        let glue = glue_compatibility(&src, &family, &atlas, &atlas_t).map_err(err)?;
        passed = glue.compatible;
        results.insert("chart_morphisms".into(), Value::Array(charts));
        results.insert(
            "glue_compatibility".into(),
            json!({"compatible": glue.compatible, "failing_pairs": glue.failing_pairs}),
        );
    }
    Ok(Report { passed, results: Value::Object(results), raw: None })
}

fn classical(ctx: &mut Context, fan: &Path, cone: usize, degree_bound: usize) -> Res<Report> {
    let (_, cf) = ctx.fan(fan)?;
    check_cone(&cf, cone)?;
    let cctx = ClassicalContext::new(&cf.cal).map_err(err)?;
    let fc = cf.fan.cone(cone);
    let dual = dual_cone(&fc.cone).map_err(err)?;
    let hilbert = hilbert_basis(&dual).map_err(err)?;
    let rel = toric_relations(&hilbert, degree_bound).map_err(err)?;
    let cg = class_group(&cctx, &fc.rays);
    let relations: Vec<Value> = rel
        .relations
        .iter()
        .map(|b| json!({"lhs": b.lhs, "rhs": b.rhs, "binomial": format!("{} - {}", json::monomial(&b.lhs), json::monomial(&b.rhs))}))
        .collect();
    Ok(Report {
        passed: true,
        results: json!({
            "cone": cone,
            "hilbert": json::int_rows(&hilbert),
            "relations": relations,
            "degree_bound": rel.degree_bound,
            "class_group": {"free_rank": cg.free_rank, "torsion": json::int_vector(&cg.torsion)},
        }),
        raw: None,
    })
}

fn gale(ctx: &mut Context, fan: &Path) -> Res<Report> {
    let (_, cf) = ctx.fan(fan)?;
    let g = gale_transform(&cf.cal).map_err(err)?;
    Ok(Report {
        passed: true,
        results: json!({
            "k": json::int_rows(&g.k),
            "kernel_rank": g.kernel_rank,
            "expected_rank": g.expected_rank,
            "certified_exact": g.certified_exact,
            "non_exact": !g.certified_exact,
        }),
        raw: None,
    })
}

fn git(ctx: &mut Context, fan: &Path) -> Res<Report> {
    let (doc, cf) = ctx.fan(fan)?;
    let g = git_presentation(&cf).map_err(err)?;
    let basis = doc.basis();
    let cones: Vec<Value> = g.cones.iter().map(json::set).collect();
    Ok(Report {
        passed: true,
        results: json!({
            "A": g.a,
            "A_tilde": g.a_tilde,
            "cones": cones,
            "phi": json::matrix(&g.chart.phi, basis),
            "ker_basis": g.chart.ker_basis.iter().map(|v| json::vector(&json::normalized_line(v), basis)).collect::<Vec<_>>(),
        }),
        raw: None,
    })
}

fn plot(ctx: &mut Context, fan: &Path, view: View) -> Res<Report> {
    let (_, cf) = ctx.fan(fan)?;
    let svg = emit_svg(&cf.fan, &view).map_err(err)?;
    Ok(Report { passed: true, results: Value::Null, raw: Some(svg) })
}

/// Runs one command line; the first item is the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut ctx = Context {
        max_bits: cli.max_bits,
        close: cli.close_fan,
        inputs: Vec::new(),
    };
    let start = Instant::now();
    let mut options = Map::new();
    options.insert("max_bits".into(), json!(cli.max_bits));
    options.insert("close_fan".into(), json!(cli.close_fan));
    let (name, result) = match &cli.command {
        Command::Validate { fan } => ("validate", validate(&mut ctx, fan)),
        Command::Chart { fan, cone } => {
            options.insert("cone".into(), json!(cone));
            ("chart", chart(&mut ctx, fan, *cone))
        }
        Command::Glue { fan } => ("glue", glue(&mut ctx, fan)),
        Command::Morphism { source, target, morphism: m } => ("morphism", morphism(&mut ctx, source, target, m)),
        Command::Classical { fan, cone, degree_bound } => {
            options.insert("cone".into(), json!(cone));
            options.insert("degree_bound".into(), json!(degree_bound));
            ("classical", classical(&mut ctx, fan, *cone, *degree_bound))
        }
        Command::Gale { fan } => ("gale", gale(&mut ctx, fan)),
        Command::Git { fan } => ("git", git(&mut ctx, fan)),
        Command::Plot { fan, size, azimuth, elevation } => (
            "plot",
            plot(
                &mut ctx,
                fan,
                View {
                    size: *size,
                    azimuth: *azimuth,
                    elevation: *elevation,
                },
            ),
        ),
    };
    let report = match result {
        Ok(r) => r,
        Err(msg) => {
            return Outcome {
                code: EXIT_ERROR,
                stdout: String::new(),
                stderr: format!("qtoric {}: error: {}\n", name, msg),
            }
        }
    };
    let code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
    let text = match report.raw {
        Some(raw) => raw,
        None => {
            let mut doc = json!({
                "command": name,
                "inputs": ctx.inputs,
                "options": options,
                "passed": report.passed,
                "results": report.results,
            });
            if cli.timing {
                doc["timing_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome {
                code: EXIT_ERROR,
                stdout: String::new(),
                stderr: format!("qtoric {}: error: {}: {}\n", name, path.display(), e),
            },
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

