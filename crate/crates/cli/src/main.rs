//! Command-line front end.
//!
//! Subcommands: `bounds`, `cover`, `pack`, `gen`, `decompose`, `pick`,
//! `verify`, `gap-demo`. Inputs are JSON files; outputs are JSON (or TSV
//! for `gap-demo`) on standard output, deterministic byte for byte given
//! identical inputs and seeds.
//!
//! Exit codes: 0 success (and `verify` pass), 1 failed verification,
//! 2 malformed input or violated precondition, 3 infeasible or unbounded
//! program, 4 desk-scale limit or unsupported construction.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use joincover::codes::lower_bound_instance;
use joincover::cover::{
    algorithm_b, bcq, exact_max_packing, exact_min_cover, greedy_packing, verify_cover,
};
use joincover::error::Error;
use joincover::graphs::{decompose, Graph};
use joincover::lpbounds::{
    agm_bound, lp_lb, lp_ub, lp_ub_star, pmb_bound, DegreeConstraint, Hypergraph,
};
use joincover::pick::pick_subset;
use joincover::rational::{rat_from_str, rat_to_f64, rat_to_string};
use joincover::relation::{naive_join, AttrSet, QueryInstance, Relation};
use joincover::rounding::{gap_demo, GapInstanceParams};

#[derive(Parser)]
#[command(name = "joincover", about = "Join covers, packings and their bounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Greedy,
    Exact,
    #[value(name = "algB", alias = "algb")]
    AlgB,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeArg {
    Auto,
    Rs,
    Crt,
}

#[derive(Subcommand)]
enum Command {
    /// LP bounds for a query instance at a radius parameter.
    Bounds {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        delta: usize,
        /// Extra degree constraints as JSON: a list of {x, y, exponent, guard}.
        #[arg(long)]
        pmb: Option<PathBuf>,
    },
    /// Compute a join cover.
    Cover {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        delta: usize,
        #[arg(long, value_enum, default_value = "greedy")]
        method: MethodArg,
        /// Attribute subset for the oracle-driven method, e.g. "0,1,2".
        #[arg(long)]
        subset: Option<String>,
    },
    /// Compute a join packing.
    Pack {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        delta: usize,
        #[arg(long, value_enum, default_value = "greedy")]
        method: MethodArg,
    },
    /// Generate a worst-case instance and its codebook for a graph.
    Gen {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "N")]
        n_bound: u64,
        #[arg(long)]
        delta: usize,
        #[arg(long, value_enum, default_value = "auto")]
        code: CodeArg,
        /// Write the instance here instead of stdout.
        #[arg(long)]
        out_instance: Option<PathBuf>,
        /// Write the codebook here instead of stdout.
        #[arg(long)]
        out_codebook: Option<PathBuf>,
    },
    /// Core/star/singleton decomposition of a graph.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Case classification and subset pick for a graph.
    Pick {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        delta: usize,
    },
    /// Check a cover file against a query instance.
    Verify {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        delta: usize,
    },
    /// Sample a covering/packing gap instance and report measured bounds.
    #[command(name = "gap-demo")]
    GapDemo {
        #[arg(long)]
        n: usize,
        /// Sampling slack as a rational, e.g. "3/10".
        #[arg(long)]
        eps: String,
        #[arg(long)]
        seed: u64,
        /// Degree constant as a rational.
        #[arg(long, default_value = "7/2")]
        constant: String,
        #[arg(long, default_value_t = 6)]
        trials: usize,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SchemaMismatch(_) | Error::InvalidInput(_) | Error::Precondition(_) => 2,
        Error::Infeasible(_) | Error::Unbounded(_) => 3,
        Error::DeskScaleLimit(_) | Error::Unsupported(_) => 4,
        Error::RetriesExhausted(_) | Error::Internal(_) => 4,
    }
}

fn read_json(path: &PathBuf) -> Result<serde_json::Value, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{} is not JSON: {e}", path.display())))
}

fn parse_subset(text: &str, n: usize) -> Result<AttrSet, Error> {
    let mut set = AttrSet::new();
    for part in text.split(',') {
        let v: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad attribute index {part:?}")))?;
        if v >= n {
            return Err(Error::InvalidInput(format!("attribute {v} out of range")));
        }
        set.insert(v);
    }
    Ok(set)
}

fn query_hypergraph(q: &QueryInstance) -> Result<Hypergraph, Error> {
    Hypergraph::new(q.attr_count(), q.edges().to_vec())
}

/// The subset the bounds and oracle-driven cover use: the case-table pick
/// for graphs, the best enumerated subset otherwise.
fn default_subset(q: &QueryInstance, delta: usize) -> Result<AttrSet, Error> {
    if q.max_arity() <= 2 {
        let edges: Vec<(usize, usize)> = q
            .edges()
            .iter()
            .map(|e| if e.len() == 1 { (e[0], e[0]) } else { (e[0], e[1]) })
            .collect();
        let g = Graph::new(q.attr_count(), edges)?;
        Ok(pick_subset(&g, delta)?.0)
    } else {
        let h = query_hypergraph(q)?;
        let s = q.attr_count() - delta + 1;
        let report = lp_ub_star(&h, s)?;
        Ok((0..q.attr_count())
            .filter(|v| report.solution.contains_key(&format!("z[{v}]")))
            .collect())
    }
}

fn parse_degree_constraints(
    value: &serde_json::Value,
) -> Result<Vec<DegreeConstraint>, Error> {
    let list = value
        .as_array()
        .ok_or_else(|| Error::InvalidInput("degree constraints must be a JSON list".into()))?;
    let mut out = Vec::new();
    for item in list {
        let attrs = |key: &str| -> Result<AttrSet, Error> {
            serde_json::from_value::<Vec<usize>>(item[key].clone())
                .map(|v| v.into_iter().collect())
                .map_err(|e| Error::InvalidInput(format!("bad {key}: {e}")))
        };
        let exponent = rat_from_str(
            item["exponent"]
                .as_str()
                .ok_or_else(|| Error::InvalidInput("missing exponent".into()))?,
        )?;
        let guard = item["guard"]
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("missing guard".into()))? as usize;
        out.push(DegreeConstraint { x: attrs("x")?, y: attrs("y")?, exponent, guard });
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<Option<u8>, Error> {
    match cli.command {
        Command::Bounds { query, delta, pmb } => {
            let q = QueryInstance::from_json(&read_json(&query)?)?;
            let n = q.attr_count();
            if delta == 0 || delta > n {
                return Err(Error::Precondition(format!("delta={delta} outside 1..={n}")));
            }
            let s = n - delta + 1;
            let h = query_hypergraph(&q)?;
            let subset = default_subset(&q, delta)?;
            let extra = match pmb {
                Some(path) => parse_degree_constraints(&read_json(&path)?)?,
                None => Vec::new(),
            };
            let agm = agm_bound(&h, &subset)?;
            let pmb_report = pmb_bound(&h, &subset, &extra)?;
            let lb = lp_lb(&h, s)?;
            let ub = lp_ub(&h, s)?;
            let ub_star = lp_ub_star(&h, s)?;
            let out = serde_json::json!({
                "delta": delta,
                "s": s,
                "subset": subset.iter().copied().collect::<Vec<_>>(),
                "agm": agm.to_json(),
                "pmb": pmb_report.to_json(),
                "lp_lb": lb.to_json(),
                "lp_ub": ub.to_json(),
                "lp_ub_star": ub_star.to_json(),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(None)
        }
        Command::Cover { query, delta, method, subset } => {
            let q = QueryInstance::from_json(&read_json(&query)?)?;
            let join = naive_join(&q);
            let result = match method {
                MethodArg::Greedy => greedy_packing(&join, delta)?,
                MethodArg::Exact => exact_min_cover(&join, delta)?,
                MethodArg::AlgB => {
                    let s = match subset {
                        Some(text) => parse_subset(&text, q.attr_count())?,
                        None => default_subset(&q, delta)?,
                    };
                    algorithm_b(&q, delta, &s, &|inst| bcq(inst))?
                }
            };
            println!("{}", serde_json::to_string_pretty(&result.to_json(&q)).unwrap());
            Ok(None)
        }
        Command::Pack { query, delta, method } => {
            let q = QueryInstance::from_json(&read_json(&query)?)?;
            let join = naive_join(&q);
            let result = match method {
                MethodArg::Exact => exact_max_packing(&join, delta)?,
                _ => greedy_packing(&join, delta)?,
            };
            println!("{}", serde_json::to_string_pretty(&result.to_json(&q)).unwrap());
            Ok(None)
        }
        Command::Gen { graph, n_bound, delta, code, out_instance, out_codebook } => {
            let g = Graph::from_json(&read_json(&graph)?)?;
            let inst = lower_bound_instance(&g, n_bound, delta)?;
            match code {
                CodeArg::Auto => {}
                CodeArg::Rs => {
                    if inst.row == 6 {
                        return Err(Error::Unsupported(
                            "this graph and radius call for the residue construction".into(),
                        ));
                    }
                }
                CodeArg::Crt => {
                    if inst.row != 6 {
                        return Err(Error::Unsupported(
                            "the residue construction applies to the singleton-heavy case only"
                                .into(),
                        ));
                    }
                }
            }
            let instance_json = inst.query.to_json();
            let codebook_json = inst.codebook.to_json();
            let summary = serde_json::json!({
                "row": inst.row,
                "predicted_cover_size": inst.predicted_cover_size.to_string(),
            });
            match (&out_instance, &out_codebook) {
                (Some(pi), Some(pc)) => {
                    std::fs::write(pi, serde_json::to_string_pretty(&instance_json).unwrap())
                        .map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
                    std::fs::write(pc, serde_json::to_string_pretty(&codebook_json).unwrap())
                        .map_err(|e| Error::InvalidInput(format!("write failed: {e}")))?;
                    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
                }
                _ => {
                    let out = serde_json::json!({
                        "row": inst.row,
                        "predicted_cover_size": inst.predicted_cover_size.to_string(),
                        "instance": instance_json,
                        "codebook": codebook_json,
                    });
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
            }
            Ok(None)
        }
        Command::Decompose { graph } => {
            let g = Graph::from_json(&read_json(&graph)?)?;
            let d = decompose(&g)?;
            println!("{}", serde_json::to_string_pretty(&d.to_json()).unwrap());
            Ok(None)
        }
        Command::Pick { graph, delta } => {
            let g = Graph::from_json(&read_json(&graph)?)?;
            let (set, case) = pick_subset(&g, delta)?;
            let out = serde_json::json!({
                "row": case.row,
                "s": case.s,
                "S": set.iter().copied().collect::<Vec<_>>(),
                "exponent": rat_to_string(&case.predicted_exponent),
            });
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(None)
        }
        Command::Verify { query, cover, delta } => {
            let q = QueryInstance::from_json(&read_json(&query)?)?;
            let join = naive_join(&q);
            let cover_json = read_json(&cover)?;
            let rows_json = cover_json
                .get("tuples")
                .and_then(|t| t.as_array())
                .ok_or_else(|| Error::InvalidInput("cover file needs a tuples list".into()))?;
            let mut rows = Vec::new();
            for row in rows_json {
                let syms: Vec<String> = serde_json::from_value(row.clone())
                    .map_err(|e| Error::InvalidInput(format!("bad cover tuple: {e}")))?;
                if syms.len() != q.attr_count() {
                    return Err(Error::InvalidInput("cover tuple has wrong width".into()));
                }
                let interned: Result<Vec<u32>, Error> = syms
                    .iter()
                    .enumerate()
                    .map(|(a, sym)| {
                        q.domain(a).id_of(sym).ok_or_else(|| {
                            Error::InvalidInput(format!("symbol {sym:?} not in domain {a}"))
                        })
                    })
                    .collect();
                rows.push(interned?);
            }
            let relation = Relation::new((0..q.attr_count()).collect(), rows)?;
            if verify_cover(&join, &relation, delta) {
                println!("pass");
                Ok(None)
            } else {
                println!("fail");
                Ok(Some(1))
            }
        }
        Command::GapDemo { n, eps, seed, constant, trials } => {
            let params = GapInstanceParams {
                base_size: n,
                epsilon: rat_from_str(&eps)?,
                degree_constant: rat_from_str(&constant)?,
            };
            let report = gap_demo(&params, seed, trials)?;
            println!("n\teps\tlp_lb\tlp_ub\tratio\ttrials");
            println!(
                "{}\t{}\t{}\t{}\t{:.6}\t{}",
                report.base_size,
                rat_to_string(&report.epsilon),
                rat_to_string(&report.packing_lower),
                rat_to_string(&report.cover_measured),
                rat_to_f64(&report.ratio),
                report.trials
            );
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(code)) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
