//! `coltri`: colored-triangulation combinatorics from the command line.
//!
//! One subcommand tree per library module. All machine output is JSON (or
//! CSV where a table is the natural shape); `--out FILE` redirects it.
//! Exit codes: 0 success, 1 domain error (structured JSON on stderr),
//! 2 usage error.

use clap::{Args, Parser, Subcommand};
use coltri_core::{
    bubbles, enhance, gluing, graph::ColoredGraph, maps, quartic, rat, Error, Pairing, Rat,
};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "coltri", version, about = "edge-colored graphs, bubble gluings and their maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bubble constructors and pairings.
    Bubble {
        #[command(subcommand)]
        cmd: BubbleCmd,
    },
    /// Elementary graph operations.
    Graph {
        #[command(subcommand)]
        cmd: GraphCmd,
    },
    /// Gluing enumeration.
    Glue {
        #[command(subcommand)]
        cmd: GlueCmd,
    },
    /// Enhancement calculus.
    Enhance {
        #[command(subcommand)]
        cmd: EnhanceCmd,
    },
    /// Combinatorial maps and the stuffed-map bijection.
    Map {
        #[command(subcommand)]
        cmd: MapCmd,
    },
    /// Quartic generating functions, critical points and exponents.
    Gf {
        #[command(subcommand)]
        cmd: GfCmd,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Pretty-print JSON output (a thin rendering; the compact JSON is the
    /// stable surface).
    #[arg(long)]
    human: bool,
}

#[derive(Subcommand)]
enum BubbleCmd {
    /// Melonic bubble from a sequence of dipole insertions.
    Melonic {
        #[arg(long)]
        d: u8,
        /// Comma-separated insertions "eIDX:COLOR", applied in order to the
        /// current sorted edge list, e.g. "e0:1,e4:2".
        #[arg(long, default_value = "")]
        insert: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Necklace bubble of length 2p.
    Necklace {
        #[arg(long)]
        d: u8,
        #[arg(long)]
        p: usize,
        /// Half of the colors, comma separated, e.g. "1,3".
        #[arg(long)]
        split: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Face-maximizing pairing of a bubble.
    Pairing {
        #[arg(long)]
        bubble: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Invariant report (coloring, regularity, shade balance).
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Face census per color pair, with open paths for open graphs.
    Faces {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Gurau degree of a closed connected gluing.
    Degree {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Boundary bubble of an open gluing.
    Boundary {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Canonical key.
    Canon {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum GlueCmd {
    /// Enumerate connected closed gluings of b copies of a bubble (CSV).
    Enumerate {
        #[arg(long)]
        bubble: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, value_parser = ["labeled", "rooted", "unlabeled"])]
        mode: String,
        /// Cap on the total number of color-0 edges.
        #[arg(long, default_value_t = gluing::GLUING_EDGE_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fit the face maximum F_max(b) and read off the enhancement.
    Fit {
        #[arg(long)]
        bubble: PathBuf,
        #[arg(long, default_value_t = 3)]
        b_max: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum EnhanceCmd {
    /// Enhancement of the boundary bubble of an open gluing.
    Inherited {
        /// The open gluing H (alias: --bubble).
        #[arg(long, visible_alias = "bubble")]
        graph: PathBuf,
        /// Enhancement of the glued bubble, e.g. "2" or "4".
        #[arg(long)]
        s_base: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Enhancement from a partition of the colors into slices.
    Slice {
        #[arg(long)]
        bubble: PathBuf,
        /// Parts separated by '|', colors by ',', e.g. "1,2,3|4,5".
        #[arg(long)]
        partition: String,
        /// Override the per-slice enhancements, e.g. "2,1".
        #[arg(long)]
        slice_s: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Candidate enhancement from a pairing.
    Pairing {
        #[arg(long)]
        bubble: PathBuf,
        /// Pairs "w:b,w:b"; the face-maximizing pairing when omitted.
        #[arg(long)]
        pairs: Option<String>,
        /// Verify against the empirical slope over b = 1..=N.
        #[arg(long)]
        verify_b_max: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// The map M(B, π) of a bubble and pairing.
    Bubble {
        #[arg(long)]
        bubble: PathBuf,
        /// Pairs "w:b,w:b"; the face-maximizing pairing when omitted.
        #[arg(long)]
        pairs: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Stuffed Walsh map of a closed gluing, with per-color face counts.
    Stuffed {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        bubble: PathBuf,
        #[arg(long)]
        pairs: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum GfCmd {
    /// Series expansion of f_k(t, λ).
    Series {
        #[arg(long)]
        k: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        order: usize,
        /// Emit CSV rows "n,coefficient" instead of JSON.
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Critical points of the algebraic system.
    Critical {
        #[arg(long)]
        k: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Singular exponent estimate at the dominant critical point.
    Exponent {
        #[arg(long)]
        k: String,
        #[arg(long)]
        lambda: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Rooted dominant-map counts against the series coefficients.
    Oracle {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        e_max: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Regime grid over (k, λ) as CSV; interior points are conjectural.
    PhaseDiagram {
        /// "MIN:MAX:STEPS", e.g. "1/2:3:5".
        #[arg(long)]
        k_range: String,
        /// "MIN:MAX:STEPS", e.g. "0:6:6".
        #[arg(long)]
        lambda_range: String,
        #[command(flatten)]
        out: OutArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": err.to_string(),
                "kind": error_kind(&err),
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidGraph(_) => "invalid-graph",
        Error::UnexpectedColorZero => "unexpected-color-zero",
        Error::NotClosed(_) => "not-closed",
        Error::NotOpen => "not-open",
        Error::Disconnected => "disconnected",
        Error::NoSuchEdge(_) => "no-such-edge",
        Error::BadParameter(_) => "bad-parameter",
        Error::CapExceeded(_) => "cap-exceeded",
        Error::PairingCapExceeded { .. } => "pairing-cap-exceeded",
        Error::DisconnectedSlice(_) => "disconnected-slice",
        Error::BubbleMismatch { .. } => "bubble-mismatch",
        Error::MalformedMap(_) => "malformed-map",
        Error::NoCriticalPoint => "no-critical-point",
        Error::Json(_) => "json",
    }
}

/// Precision for critical solving and decimal rendering; at least 30 digits.
fn precision_digits() -> Result<u32, Error> {
    match std::env::var("TENSOR_PRECISION_DIGITS") {
        Err(_) => Ok(50),
        Ok(s) => {
            let digits: u32 = s
                .parse()
                .map_err(|_| Error::BadParameter(format!("TENSOR_PRECISION_DIGITS={s} is not a number")))?;
            if digits < 30 {
                return Err(Error::BadParameter(
                    "TENSOR_PRECISION_DIGITS must be at least 30".into(),
                ));
            }
            Ok(digits)
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Bubble { cmd } => run_bubble(cmd),
        Command::Graph { cmd } => run_graph(cmd),
        Command::Glue { cmd } => run_glue(cmd),
        Command::Enhance { cmd } => run_enhance(cmd),
        Command::Map { cmd } => run_map(cmd),
        Command::Gf { cmd } => run_gf(cmd),
    }
}

fn emit(out: &OutArg, content: &str) -> Result<(), Error> {
    let rendered = if out.human {
        match serde_json::from_str::<serde_json::Value>(content) {
            Ok(v) => serde_json::to_string_pretty(&v)?,
            Err(_) => content.to_string(), // CSV stays as-is
        }
    } else {
        content.to_string()
    };
    match &out.out {
        None => {
            println!("{rendered}");
            Ok(())
        }
        Some(path) => fs::write(path, format!("{rendered}\n"))
            .map_err(|e| Error::BadParameter(format!("cannot write {}: {e}", path.display()))),
    }
}

fn load_graph(path: &PathBuf) -> Result<ColoredGraph, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::BadParameter(format!("cannot read {}: {e}", path.display())))?;
    ColoredGraph::from_json_str(&text)
}

fn parse_insertions(s: &str) -> Result<Vec<(usize, u8)>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|item| {
            let item = item.trim();
            let body = item
                .strip_prefix('e')
                .ok_or_else(|| Error::BadParameter(format!("insertion {item} must look like e0:1")))?;
            let (idx, color) = body
                .split_once(':')
                .ok_or_else(|| Error::BadParameter(format!("insertion {item} must look like e0:1")))?;
            Ok((
                idx.parse()
                    .map_err(|_| Error::BadParameter(format!("bad edge index in {item}")))?,
                color
                    .parse()
                    .map_err(|_| Error::BadParameter(format!("bad color in {item}")))?,
            ))
        })
        .collect()
}

fn parse_colors(s: &str) -> Result<Vec<u8>, Error> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse()
                .map_err(|_| Error::BadParameter(format!("bad color {c}")))
        })
        .collect()
}

fn parse_pairs(s: &str) -> Result<Pairing, Error> {
    let pairs = s
        .split(',')
        .map(|item| {
            let (w, b) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::BadParameter(format!("pair {item} must look like 0:1")))?;
            Ok((
                w.parse().map_err(|_| Error::BadParameter(format!("bad white id in {item}")))?,
                b.parse().map_err(|_| Error::BadParameter(format!("bad black id in {item}")))?,
            ))
        })
        .collect::<Result<Vec<(usize, usize)>, Error>>()?;
    Ok(Pairing::new(pairs))
}

fn pairing_for(bubble: &ColoredGraph, pairs: &Option<String>) -> Result<Pairing, Error> {
    match pairs {
        Some(s) => {
            let pairing = parse_pairs(s)?;
            pairing.check(bubble)?;
            Ok(pairing)
        }
        None => Ok(bubbles::best_pairing(bubble)?.0),
    }
}

fn parse_range(s: &str) -> Result<(Rat, Rat, usize), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::BadParameter(format!("range {s} must look like MIN:MAX:STEPS")));
    }
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| Error::BadParameter(format!("bad step count in {s}")))?;
    if steps < 1 {
        return Err(Error::BadParameter("steps must be positive".into()));
    }
    Ok((parse_rat(parts[0])?, parse_rat(parts[1])?, steps))
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::BadParameter(format!("cannot parse rational {s}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.starts_with('-') { -1 } else { 1 };
        let i: BigInt = int.parse().map_err(|_| bad())?;
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Rat::new(i * &scale + BigInt::from(sign) * f, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Decimal rendering of a rational to a fixed number of digits.
fn to_decimal(r: &Rat, digits: u32) -> String {
    let negative = r.is_negative();
    let r = r.abs();
    let whole = r.numer() / r.denom();
    let mut rem = r.numer() - &whole * r.denom();
    let mut frac = String::new();
    for _ in 0..digits {
        if rem.is_zero() {
            break;
        }
        rem *= BigInt::from(10);
        let digit = &rem / r.denom();
        frac.push_str(&digit.to_string());
        rem -= digit * r.denom();
    }
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

fn bubble_json(g: &ColoredGraph) -> serde_json::Value {
    serde_json::from_str(&g.to_json_string()).expect("graph JSON is valid")
}

fn run_bubble(cmd: BubbleCmd) -> Result<(), Error> {
    match cmd {
        BubbleCmd::Melonic { d, insert, out } => {
            let insertions = parse_insertions(&insert)?;
            let spec = bubbles::melonic_bubble(d, &insertions)?;
            emit(&out, &spec.graph.to_json_string())
        }
        BubbleCmd::Necklace { d, p, split, out } => {
            let split = parse_colors(&split)?;
            let spec = bubbles::necklace_bubble(d, p, &split)?;
            emit(&out, &spec.graph.to_json_string())
        }
        BubbleCmd::Pairing { bubble, out } => {
            let g = load_graph(&bubble)?;
            let (pairing, f_max) = bubbles::best_pairing(&g)?;
            let payload = serde_json::json!({
                "graph": bubble_json(&g),
                "pairs": pairing.pairs,
                "closure_faces": f_max,
            });
            emit(&out, &payload.to_string())
        }
    }
}

fn run_graph(cmd: GraphCmd) -> Result<(), Error> {
    match cmd {
        GraphCmd::Validate { graph, out } => {
            let g = load_graph(&graph)?;
            let report = g.validate();
            let payload = serde_json::json!({
                "passed": report.passed(),
                "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            emit(&out, &payload.to_string())
        }
        GraphCmd::Faces { graph, out } => {
            let g = load_graph(&graph)?;
            let census = g.faces()?;
            let per: serde_json::Map<String, serde_json::Value> = (1..=g.d())
                .map(|c| (format!("F_0{c}"), census.f_0c(c).into()))
                .collect();
            let payload = serde_json::json!({
                "faces": per,
                "total": census.total(),
                "open_paths": census.open_paths().iter()
                    .map(|p| serde_json::json!({"color": p.color, "white": p.white_end, "black": p.black_end}))
                    .collect::<Vec<_>>(),
            });
            emit(&out, &payload.to_string())
        }
        GraphCmd::Degree { graph, out } => {
            let g = load_graph(&graph)?;
            let omega = g.gurau_degree()?;
            let census = g.faces()?;
            let payload = serde_json::json!({
                "omega": omega,
                "faces": census.total(),
                "zero_edges": g.zero_edge_count(),
                "bubbles": g.bubble_components().len(),
            });
            emit(&out, &payload.to_string())
        }
        GraphCmd::Boundary { graph, out } => {
            let g = load_graph(&graph)?;
            let boundary = g.boundary_bubble()?;
            emit(&out, &boundary.to_json_string())
        }
        GraphCmd::Canon { graph, out } => {
            let g = load_graph(&graph)?;
            let payload = serde_json::json!({ "key": g.canonical_key() });
            emit(&out, &payload.to_string())
        }
    }
}

fn run_glue(cmd: GlueCmd) -> Result<(), Error> {
    match cmd {
        GlueCmd::Enumerate { bubble, count, mode, cap, out } => {
            let g = load_graph(&bubble)?;
            let mode = match mode.as_str() {
                "labeled" => gluing::GluingMode::Labeled,
                "rooted" => gluing::GluingMode::Rooted,
                _ => gluing::GluingMode::Unlabeled,
            };
            if cap == 0 {
                return Err(Error::BadParameter("cap must be positive".into()));
            }
            let copies = vec![g.clone(); count];
            let en = gluing::enumerate_gluings_of(&copies, mode, cap)?;
            let mut csv = String::from("graph_key");
            for c in 1..=en.d {
                csv.push_str(&format!(",F_0{c}"));
            }
            csv.push_str(",F,E,omega,delta,count\n");
            for o in &en.outcomes {
                let delta = en.d as i64 - o.omega;
                csv.push_str(&o.key.to_string());
                for f in &o.f_per_color {
                    csv.push_str(&format!(",{f}"));
                }
                csv.push_str(&format!(
                    ",{},{},{},{},{}\n",
                    o.f_total, o.zero_edges, o.omega, delta, o.count
                ));
            }
            emit(&out, csv.trim_end())
        }
        GlueCmd::Fit { bubble, b_max, out } => {
            let g = load_graph(&bubble)?;
            let fit = gluing::empirical_enhancement(&g, b_max)?;
            let payload = serde_json::json!({
                "f_max_per_b": fit.f_max_per_b,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "exact_fit": fit.exact_fit,
                "s": fit.s.to_string(),
                "delta_max": fit.delta_max.to_string(),
            });
            emit(&out, &payload.to_string())
        }
    }
}

fn run_enhance(cmd: EnhanceCmd) -> Result<(), Error> {
    match cmd {
        EnhanceCmd::Inherited { graph, s_base, out } => {
            let g = load_graph(&graph)?;
            let s = parse_rat(&s_base)?;
            let record = enhance::inherited_enhancement(&g, &s)?;
            emit(&out, &serde_json::to_string(&record)?)
        }
        EnhanceCmd::Slice { bubble, partition, slice_s, out } => {
            let g = load_graph(&bubble)?;
            let parts = partition
                .split('|')
                .map(parse_colors)
                .collect::<Result<Vec<_>, Error>>()?;
            let overrides = match slice_s {
                None => None,
                Some(s) => Some(
                    s.split(',')
                        .map(parse_rat)
                        .collect::<Result<Vec<_>, Error>>()?,
                ),
            };
            let record = enhance::slice_enhancement(&g, &parts, overrides.as_deref())?;
            emit(&out, &serde_json::to_string(&record)?)
        }
        EnhanceCmd::Pairing { bubble, pairs, verify_b_max, out } => {
            let g = load_graph(&bubble)?;
            let pairing = pairing_for(&g, &pairs)?;
            let mut record = enhance::pairing_enhancement(&g, &pairing)?;
            if let Some(b_max) = verify_b_max {
                enhance::verify_pairing_enhancement(&g, &mut record, b_max)?;
            }
            emit(&out, &serde_json::to_string(&record)?)
        }
    }
}

fn run_map(cmd: MapCmd) -> Result<(), Error> {
    match cmd {
        MapCmd::Bubble { bubble, pairs, out } => {
            let g = load_graph(&bubble)?;
            let pairing = pairing_for(&g, &pairs)?;
            let m = maps::bubble_map(&g, &pairing)?;
            emit(&out, &m.to_json_string())
        }
        MapCmd::Stuffed { graph, bubble, pairs, out } => {
            let g = load_graph(&graph)?;
            let b = load_graph(&bubble)?;
            let pairing = pairing_for(&b, &pairs)?;
            let w = maps::to_stuffed_map(&g, &b, &pairing)?;
            let faces: serde_json::Map<String, serde_json::Value> = (1..=w.d())
                .map(|c| (format!("F_0{c}"), w.face_count(c).into()))
                .collect();
            let payload = serde_json::json!({
                "map": serde_json::from_str::<serde_json::Value>(&w.map.to_json_string())?,
                "faces": faces,
                "total_faces": w.total_faces(),
                "copies": w.copies(),
                "projected_is_tree": w.projected().is_tree(),
            });
            emit(&out, &payload.to_string())
        }
    }
}

fn run_gf(cmd: GfCmd) -> Result<(), Error> {
    let digits = precision_digits()?;
    match cmd {
        GfCmd::Series { k, lambda, order, csv, out } => {
            let k = parse_rat(&k)?;
            let lambda = parse_rat(&lambda)?;
            let f = quartic::quartic_series(&k, &lambda, order);
            if csv {
                let mut body = String::from("n,coefficient\n");
                for n in 0..=order {
                    body.push_str(&format!("{n},{}\n", f.coeff(n)));
                }
                emit(&out, body.trim_end())
            } else {
                let payload = serde_json::json!({
                    "k": k.to_string(),
                    "lambda": lambda.to_string(),
                    "order": order,
                    "coefficients": (0..=order).map(|n| f.coeff(n).to_string()).collect::<Vec<_>>(),
                });
                emit(&out, &payload.to_string())
            }
        }
        GfCmd::Critical { k, lambda, out } => {
            let k = parse_rat(&k)?;
            let lambda = parse_rat(&lambda)?;
            let points = quartic::critical_points(&k, &lambda, digits)?;
            let as_json = |p: &quartic::CriticalPoint| {
                serde_json::json!({
                    "u": p.u.to_f64(),
                    "t": p.t.to_f64(),
                    "f": p.f.to_f64(),
                    "u_decimal": to_decimal(&p.u, digits),
                    "t_decimal": to_decimal(&p.t, digits),
                    "f_decimal": to_decimal(&p.f, digits),
                    "exact": p.exact,
                    "t_exact": if p.exact { Some(p.t.to_string()) } else { None },
                    "f_exact": if p.exact { Some(p.f.to_string()) } else { None },
                    "regime": p.regime,
                })
            };
            let payload = serde_json::json!({
                "k": k.to_string(),
                "lambda": lambda.to_string(),
                "t": points[0].t.to_f64(),
                "f": points[0].f.to_f64(),
                "regime": points[0].regime,
                "dominant": as_json(&points[0]),
                "points": points.iter().map(as_json).collect::<Vec<_>>(),
            });
            emit(&out, &payload.to_string())
        }
        GfCmd::Exponent { k, lambda, out } => {
            let k = parse_rat(&k)?;
            let lambda = parse_rat(&lambda)?;
            let est = quartic::singular_exponent(&k, &lambda, digits)?;
            let regime = match est.regime {
                Some(r) => serde_json::to_value(r)?,
                None => serde_json::Value::String("unclassified".into()),
            };
            let payload = serde_json::json!({
                "k": k.to_string(),
                "lambda": lambda.to_string(),
                "estimate": est.estimate,
                "regime": regime,
                "t_c": est.critical.t.to_f64(),
                "f_c": est.critical.f.to_f64(),
            });
            emit(&out, &payload.to_string())
        }
        GfCmd::Oracle { k, e_max, out } => {
            let counts = quartic::enumerate_dominant_rooted_maps(k, e_max)?;
            let graded = quartic::lambda_graded_coefficients(&rat(k as i64, 1), e_max);
            let rows: Vec<serde_json::Value> = counts
                .iter()
                .map(|(&(e, e_m), &count)| {
                    let coefficient = graded[e][e_m].clone();
                    serde_json::json!({
                        "edges": e,
                        "mono_edges": e_m,
                        "rooted_maps": count,
                        "series_coefficient": coefficient.to_string(),
                        "matches": coefficient == rat(count as i64, 1),
                    })
                })
                .collect();
            let payload = serde_json::json!({"k": k, "rows": rows});
            emit(&out, &payload.to_string())
        }
        GfCmd::PhaseDiagram { k_range, lambda_range, out } => {
            let (k_min, k_max, k_steps) = parse_range(&k_range)?;
            let (l_min, l_max, lambda_steps) = parse_range(&lambda_range)?;
            let mut csv = String::from("k,lambda,u_c,t_c,f_c,regime,status\n");
            for i in 0..=k_steps {
                let k = &k_min + (&k_max - &k_min) * rat(i as i64, 1) / rat(k_steps as i64, 1);
                if !k.is_positive() {
                    continue;
                }
                for j in 0..=lambda_steps {
                    let l = &l_min
                        + (&l_max - &l_min) * rat(j as i64, 1) / rat(lambda_steps as i64, 1);
                    if l.is_negative() {
                        continue;
                    }
                    let (p, established) = quartic::phase_point(&k, &l, digits)?;
                    let regime = match p.regime {
                        quartic::Regime::Planar => "planar",
                        quartic::Regime::Tree => "tree",
                        quartic::Regime::BabyUniverse => "baby-universe",
                    };
                    csv.push_str(&format!(
                        "{},{},{:.12},{:.12},{:.12},{},{}\n",
                        k,
                        l,
                        p.u.to_f64().unwrap_or(f64::NAN),
                        p.t.to_f64().unwrap_or(f64::NAN),
                        p.f.to_f64().unwrap_or(f64::NAN),
                        regime,
                        if established { "established" } else { "conjectural" },
                    ));
                }
            }
            emit(&out, csv.trim_end())
        }
    }
}
