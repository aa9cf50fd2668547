//! Command line front end. [`run`] does all the work so the binary is a thin
//! wrapper and tests can drive commands in-process.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bv::{mean_local_level_count, sweep, DEFAULT_SAMPLE_DEPTH_CAP};
use crate::error::{Error, Result};
use crate::eval::{series_error_bound, takagi_exact, takagi_partial, takagi_series, SeriesKind};
use crate::local::{enumerate_members, infinite_level_family, level_half_family, local_level_set, Cardinality, DEFAULT_MEMBER_CAP};
use crate::numbers::{format_decimal, format_rat, parse_rat, BinExp, Rat, Tail};
use crate::omega::{
    catalan, cover_measure_bound, enumerate_breakpoints, enumerate_gap_intervals, in_omega_l, in_omega_l_rat, project_omega_l, Breakpoint,
    DEFAULT_HALF_DEPTH_CAP,
};

#[derive(Debug, Parser)]
#[command(name = "takagi", version, about = "Exact Takagi function evaluation and level-set structure")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Render rationals as decimals with this many digits instead of `p/q`.
    #[arg(long, global = true, value_name = "DIGITS")]
    pub decimal: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact τ(x), optionally with a partial approximant or series sum.
    Eval {
        x: String,
        #[arg(long, value_name = "N")]
        partial: Option<usize>,
        #[arg(long, value_name = "TERMS")]
        series: Option<usize>,
    },
    /// The local level set through x (a rational `p/q` or expansion `0.pre(per)`).
    Localset {
        x: String,
        /// Leading blocks to enumerate for an uncountable set.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_MEMBER_CAP)]
        cap: usize,
    },
    /// Membership in and projection onto the deficient digit set.
    Omega {
        #[command(subcommand)]
        action: OmegaAction,
    },
    /// Balanced breakpoints with 2m digits.
    Breakpoints {
        m: usize,
        #[arg(long, default_value_t = DEFAULT_HALF_DEPTH_CAP)]
        cap: usize,
    },
    /// Gap intervals removed from [0, 1) to form the deficient digit set.
    Gaps {
        #[arg(long = "max-2m", value_name = "N")]
        max_2m: usize,
        #[arg(long, default_value_t = DEFAULT_HALF_DEPTH_CAP)]
        cap: usize,
    },
    /// The points x_k (and 1 - x_k) of the level set at 1/2; `inf` gives 1/6.
    LevelHalf { k: String },
    /// Member k of the level set through a balanced breakpoint B.
    Family { breakpoint: String, k: u64 },
    /// Sweep x, τ, τ^L, τ^S over the grid k/2^depth.
    Sample {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_DEPTH_CAP)]
        cap: usize,
    },
    /// Variation, exact coarea integral, and a seeded estimate of the mean
    /// local level count of τ^L.
    Coarea {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OmegaAction {
    Check { x: String },
    Project { x: String },
}

/// One command's output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub results: BTreeMap<String, Value>,
    /// Rows of a tabular result, emitted as the CSV body.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

struct Render {
    decimal: Option<usize>,
}

impl Render {
    fn rat(&self, x: &Rat) -> String {
        match self.decimal {
            Some(d) => format_decimal(x, d),
            None => format_rat(x),
        }
    }

    fn val(&self, x: &Rat) -> Value {
        Value::String(self.rat(x))
    }
}

fn parse_point(text: &str) -> Result<BinExp> {
    if text.trim().starts_with("0.") {
        BinExp::parse(text)
    } else {
        BinExp::from_rational(&parse_rat(text)?, Tail::Low)
    }
}

fn record(command: &str, inputs: &[(&str, String)]) -> OutputRecord {
    OutputRecord {
        command: command.to_string(),
        inputs: inputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        results: BTreeMap::new(),
        table: None,
    }
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> Result<OutputRecord> {
    let r = Render { decimal: cli.output.decimal };
    let out = match &cli.command {
        Command::Eval { x, partial, series } => {
            let xr = parse_rat(x)?;
            let mut rec = record("eval", &[("x", format_rat(&xr))]);
            rec.results.insert("tau".into(), r.val(&takagi_exact(&xr)?));
            if let Some(n) = partial {
                rec.inputs.insert("partial".into(), n.to_string());
                rec.results.insert("tau_partial".into(), r.val(&takagi_partial(&xr, *n)?));
            }
            if let Some(terms) = series {
                let b = BinExp::from_rational(&xr, Tail::Low)?;
                rec.inputs.insert("series".into(), terms.to_string());
                rec.results.insert("series".into(), r.val(&takagi_series(&b, *terms, SeriesKind::DeficientDigit)?));
                rec.results.insert("series_bound".into(), r.val(&series_error_bound(*terms)));
            }
            rec
        }
        Command::Localset { x, depth, cap } => {
            let b = parse_point(x)?;
            let desc = local_level_set(&b);
            let members = enumerate_members(&desc, *depth, *cap)?;
            let mut rec = record("localset", &[("x", b.to_string()), ("depth", depth.to_string())]);
            let res = &mut rec.results;
            res.insert("level".into(), r.val(&desc.level));
            res.insert("left_endpoint".into(), json!(desc.left_endpoint.to_string()));
            match desc.cardinality {
                Cardinality::Finite { exponent } => {
                    res.insert("cardinality".into(), json!("finite"));
                    res.insert("cardinality_exponent".into(), json!(exponent));
                }
                Cardinality::Uncountable => {
                    res.insert("cardinality".into(), json!("uncountable"));
                }
            }
            res.insert("hausdorff_dim".into(), r.val(&desc.hausdorff_dim));
            let horizon = desc.balance.points().last().copied().unwrap_or(0) + 2 * desc.balance.cycle().map_or(0, |c| c.period);
            res.insert("balance_points".into(), json!(desc.balance.points_up_to(horizon)));
            res.insert("balance_periodic".into(), json!(desc.balance.cycle().is_some()));
            res.insert("members".into(), json!(members.iter().map(|m| m.to_string()).collect::<Vec<_>>()));
            res.insert("member_values".into(), json!(members.iter().map(|m| r.rat(&m.to_rational())).collect::<Vec<_>>()));
            rec
        }
        Command::Omega { action: OmegaAction::Check { x } } => {
            let mut rec;
            let (member, variant) = if x.trim().starts_with("0.") {
                let b = BinExp::parse(x)?;
                rec = record("omega check", &[("x", b.to_string())]);
                (in_omega_l(&b), None)
            } else {
                let xr = parse_rat(x)?;
                rec = record("omega check", &[("x", format_rat(&xr))]);
                let v = in_omega_l_rat(&xr)?;
                (v.is_some(), Some(v))
            };
            rec.results.insert("in_omega".into(), json!(member));
            if let Some(v) = variant {
                let name = match v {
                    Some(Tail::Low) => "low",
                    Some(Tail::High) => "high",
                    None => "none",
                };
                rec.results.insert("variant".into(), json!(name));
            }
            rec
        }
        Command::Omega { action: OmegaAction::Project { x } } => {
            let b = parse_point(x)?;
            let p = project_omega_l(&b);
            let mut rec = record("omega project", &[("x", b.to_string())]);
            rec.results.insert("projection".into(), json!(p.to_string()));
            rec.results.insert("projection_value".into(), r.val(&p.to_rational()));
            rec
        }
        Command::Breakpoints { m, cap } => {
            let bps = enumerate_breakpoints(*m, *cap)?;
            let mut rec = record("breakpoints", &[("m", m.to_string())]);
            rec.results.insert("count".into(), json!(bps.len()));
            rec.results.insert("catalan".into(), json!(catalan(*m).to_string()));
            if *m >= 1 {
                rec.results.insert("cover_bound".into(), r.val(&cover_measure_bound(*m)?));
            }
            rec.table = Some(Table {
                header: vec!["B".into(), "bits".into(), "small".into()],
                rows: bps
                    .iter()
                    .map(|b| vec![r.rat(&b.value), b.expansion().to_string(), b.is_small().to_string()])
                    .collect(),
            });
            rec
        }
        Command::Gaps { max_2m, cap } => {
            let gaps = enumerate_gap_intervals(*max_2m, *cap)?;
            let mut rec = record("gaps", &[("max_2m", max_2m.to_string())]);
            rec.results.insert("count".into(), json!(gaps.len()));
            rec.table = Some(Table {
                header: ["two_m", "B", "x_minus", "x_plus", "tau_x_minus", "tau_x_plus"].map(String::from).to_vec(),
                rows: gaps
                    .iter()
                    .map(|g| {
                        vec![
                            g.breakpoint.two_m().to_string(),
                            r.rat(&g.breakpoint.value),
                            r.rat(&g.x_minus),
                            r.rat(&g.x_plus),
                            r.rat(&g.tau_minus()),
                            r.rat(&g.tau_plus()),
                        ]
                    })
                    .collect(),
            });
            rec
        }
        Command::LevelHalf { k } => {
            let kk = match k.trim() {
                "inf" | "infinity" | "∞" => None,
                s => Some(s.parse::<u64>().map_err(|_| Error::Parse(format!("bad index {s:?}")))?),
            };
            let x = level_half_family(kk);
            let mut rec = record("level-half", &[("k", k.trim().to_string())]);
            rec.results.insert("x".into(), r.val(&x));
            rec.results.insert("reflected".into(), r.val(&(Rat::from_integer(1.into()) - &x)));
            rec.results.insert("tau".into(), r.val(&takagi_exact(&x)?));
            rec
        }
        Command::Family { breakpoint, k } => {
            let bp = Breakpoint::try_from_rat(&parse_rat(breakpoint)?)?;
            if *k == 0 {
                return Err(Error::domain("family index k must be positive"));
            }
            let (x, y) = infinite_level_family(&bp, *k);
            let mut rec = record("family", &[("breakpoint", format_rat(&bp.value)), ("k", k.to_string())]);
            rec.results.insert("x".into(), r.val(&x));
            rec.results.insert("level".into(), r.val(&y));
            rec.results.insert("tau".into(), r.val(&takagi_exact(&x)?));
            rec
        }
        Command::Sample { depth, cap } => {
            let rows = sweep(*depth, *cap)?;
            let mut rec = record("sample", &[("depth", depth.to_string())]);
            rec.results.insert("points".into(), json!(rows.len()));
            rec.table = Some(Table {
                header: ["x", "tau", "tauL", "tauS"].map(String::from).to_vec(),
                rows: rows.iter().map(|row| row.iter().map(|v| r.rat(v)).collect()).collect(),
            });
            rec
        }
        Command::Coarea { depth, samples, seed } => {
            let rep = mean_local_level_count(*depth, *samples, *seed)?;
            let mut rec = record(
                "coarea",
                &[("depth", depth.to_string()), ("samples", samples.to_string()), ("seed", seed.to_string())],
            );
            let res = &mut rec.results;
            res.insert("total_variation".into(), r.val(&rep.total_variation));
            res.insert("coarea_integral".into(), r.val(&rep.coarea_integral));
            res.insert("coarea_equals_variation".into(), json!(rep.coarea_integral == rep.total_variation));
            res.insert("mean_estimate".into(), r.val(&rep.mean_estimate));
            res.insert("mean_exact".into(), r.val(&rep.mean_exact));
            res.insert("note".into(), json!("grid-based estimate of the local level set count, not an exact value"));
            rec.table = Some(Table {
                header: vec!["t".into(), "N_estimate".into()],
                rows: rep.levels.iter().map(|(t, n)| vec![r.rat(t), n.to_string()]).collect(),
            });
            rec
        }
    };
    Ok(out)
}

/// Writes a record as JSON or CSV. CSV emits the table when there is one,
/// otherwise `key,value` rows for inputs and results.
pub fn write_record<W: Write>(rec: &OutputRecord, format: Format, out: &mut W) -> Result<()> {
    let io = |e: std::io::Error| Error::domain(format!("write failed: {e}"));
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rec).map_err(|e| Error::domain(e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            let csv_err = |e: csv::Error| Error::domain(e.to_string());
            match &rec.table {
                Some(t) => {
                    w.write_record(&t.header).map_err(csv_err)?;
                    for row in &t.rows {
                        w.write_record(row).map_err(csv_err)?;
                    }
                }
                None => {
                    w.write_record(["key", "value"]).map_err(csv_err)?;
                    for (k, v) in &rec.inputs {
                        w.write_record([k.as_str(), v.as_str()]).map_err(csv_err)?;
                    }
                    for (k, v) in &rec.results {
                        let text = match v {
                            Value::String(s) => s.clone(),
                            Value::Array(items) => items
                                .iter()
                                .map(|i| i.as_str().map(String::from).unwrap_or_else(|| i.to_string()))
                                .collect::<Vec<_>>()
                                .join(" "),
                            other => other.to_string(),
                        };
                        w.write_record([k.as_str(), text.as_str()]).map_err(csv_err)?;
                    }
                }
            }
            w.flush().map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command, and writes its
/// output. Returns the process exit code: 0, 2 for usage, parse and domain
/// errors, 3 for resource caps.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli).and_then(|rec| write_record(&rec, cli.output.format, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
