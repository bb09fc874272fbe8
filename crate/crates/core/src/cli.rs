//! Command-line driver. Output is deterministic: JSON objects keep a fixed
//! field order and matrices are laid out in label order.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::algebra::{LaurentQ, MultiPoly};
use crate::blockan::{
    cartan_entry, d_invariant, end_dim, graded_cartan, h_count, recover_invariants, verma_mult, CartanWindow,
    MatrixOracle,
};
use crate::cache::Cache;
use crate::center::{e_super, hc_series_coeff, in_i, in_j, is_row_symmetric};
use crate::characters::{ch_simple_w, ch_verma_w, char_dimension, comp_char_json, decompose_char};
use crate::combinat::{BlockKey, Composition, MoveSet, Window};
use crate::qcanon::{canonical, dual_canonical, pairing, parse_key, parse_signs, TensorVec};
use crate::verify::{self, Options, Profile};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "glblocks", version, about = "Exact block computations for gl(m|n) and quantum tensor space")]
pub struct Cli {
    /// Collapse graded outputs to their values at q = 1.
    #[arg(long, global = true)]
    pub q_at_1: bool,
    /// Disable the on-disk result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// JSON file with defaults: {"threads": k, "cache": bool}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct BlockArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Block key such as "mu=0;nu=2:1;t=1".
    #[arg(long)]
    pub block: String,
}

impl BlockArgs {
    fn key(&self) -> Result<BlockKey> {
        BlockKey::parse(&self.block, self.m, self.n)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CharKind {
    Verma,
    Simple,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Moves {
    Morita,
    Derived,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CenterOp {
    ESuper,
    Series,
    Member,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Enumerate block keys whose cores lie in a window.
    Blocks {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
    },
    /// Verma or simple character of a block label.
    Char {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value = "verma")]
        kind: CharKind,
        /// Also decompose into simple characters.
        #[arg(long)]
        decompose: bool,
    },
    /// Multiplicity of a simple in a Verma module.
    VermaMult {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        kappa: String,
    },
    /// Cartan matrix on a window of labels.
    Cartan {
        #[command(flatten)]
        block: BlockArgs,
        /// Row labels: compositions of t supported in lo..hi.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Column labels (defaults to the row window).
        #[arg(long, allow_hyphen_values = true)]
        col_window: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Graded Cartan entries, as one entry or on a window.
    GradedCartan {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Number of simples in the projective cover of a label.
    H {
        #[arg(long)]
        lambda: String,
    },
    /// Endomorphism dimension of P(t eps_i) and its rescaled invariant.
    EndDim {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long, allow_hyphen_values = true)]
        i: i64,
    },
    /// Recover (t, gamma) from Cartan JSON on stdin.
    Recover,
    /// Closure of a block under Morita and derived moves.
    Equiv {
        #[command(flatten)]
        block: BlockArgs,
        #[arg(long, value_enum, default_value = "both")]
        moves: Moves,
        #[arg(long, default_value_t = 6)]
        max_width: usize,
    },
    /// Supersymmetric polynomials and membership in I and J.
    Center {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        op: CenterOp,
        #[arg(long)]
        r: Option<usize>,
        /// Polynomial as JSON terms [{"exponents":[..],"coeff":"p/q"}].
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value_t = 0)]
        s_minus: usize,
    },
    /// Dual canonical (or canonical) basis vectors and their pairings.
    Cb {
        #[arg(long = "N")]
        rank: usize,
        #[arg(long)]
        signs: String,
        /// Index tableau, e.g. "2;2" or "1,2;3".
        #[arg(long)]
        key: String,
        #[arg(long)]
        canonical: bool,
        /// Pair the canonical vector at `key` with the dual canonical one here.
        #[arg(long)]
        pair_with: Option<String>,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value = "quick")]
        profile: String,
        /// Perturb the given criterion (harness self-test).
        #[arg(long)]
        inject: Option<u32>,
        /// Comma-separated criterion ids.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Config {
    threads: Option<usize>,
    cache: Option<bool>,
}

/// Outcome of a command: text to print and the exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn ok(stdout: String) -> Result<Outcome> {
    Ok(Outcome { stdout, code: EXIT_OK })
}

fn label(c: &Composition) -> String {
    c.short()
}

fn window(s: &str) -> Result<Window> {
    s.parse()
}

fn lq_json(v: &LaurentQ, q_at_1: bool) -> Value {
    if q_at_1 {
        Value::String(v.eval1().to_string())
    } else {
        v.to_json_value()
    }
}

fn csv_text(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn matrix_out<E>(m: &CartanWindow<E>, format: Format, cell: impl Fn(&E) -> Value) -> Result<String> {
    match format {
        Format::Json => {
            let v = json!({
                "rows": m.rows.iter().map(label).collect::<Vec<_>>(),
                "cols": m.cols.iter().map(label).collect::<Vec<_>>(),
                "entries": m.entries.iter().map(|r| r.iter().map(&cell).collect::<Vec<_>>()).collect::<Vec<_>>(),
            });
            Ok(v.to_string())
        }
        Format::Csv => {
            let mut header = vec!["label".to_string()];
            header.extend(m.cols.iter().map(label));
            let rows = m
                .rows
                .iter()
                .zip(&m.entries)
                .map(|(r, es)| {
                    let mut line = vec![label(r)];
                    line.extend(es.iter().map(|e| match cell(e) {
                        Value::String(s) => s,
                        other => other.to_string(),
                    }));
                    line
                })
                .collect();
            csv_text(header, rows)
        }
    }
}

fn tensor_json(v: &TensorVec, q_at_1: bool) -> Value {
    let mut terms = v.terms_json();
    if q_at_1 {
        if let Value::Array(items) = &mut terms {
            for (item, (_, c)) in items.iter_mut().zip(v.terms().collect::<Vec<_>>().into_iter().rev()) {
                item["coeff"] = lq_json(c, true);
            }
        }
    }
    json!({ "terms": terms })
}

fn read_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("config {}: {e}", p.display())))
        }
    }
}

/// Runs a parsed command. `stdin` is only read by `recover`.
pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Outcome> {
    let config = read_config(&cli.config)?;
    if let Some(k) = config.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    let cache = if cli.no_cache || config.cache == Some(false) {
        None
    } else {
        Some(Cache::from_env_or("cache"))
    };
    let q1 = cli.q_at_1;
    match &cli.cmd {
        Cmd::Blocks { m, n, window: w } => {
            let w = window(w)?;
            let keys = BlockKey::all_in(*m, *n, w.lo, w.hi);
            let out: Vec<Value> = keys
                .iter()
                .map(|k| json!({"key": k.short(), "t": k.t, "gamma": label(&k.gamma())}))
                .collect();
            ok(Value::Array(out).to_string())
        }
        Cmd::Char { block, lambda, kind, decompose } => {
            let xi = block.key()?;
            let lam: Composition = lambda.parse()?;
            let ch = match kind {
                CharKind::Verma => ch_verma_w(&xi, &lam)?,
                CharKind::Simple => ch_simple_w(&xi, &lam)?,
            };
            let mut out = json!({"character": comp_char_json(&ch), "dimension": char_dimension(&ch).to_string()});
            if *decompose {
                let dec = decompose_char(&ch, &xi)?;
                out["decomposition"] = dec.iter().map(|(k, v)| json!({"label": label(k), "multiplicity": v})).collect();
            }
            ok(out.to_string())
        }
        Cmd::VermaMult { lambda, kappa } => ok(verma_mult(&lambda.parse()?, &kappa.parse()?)?.to_string()),
        Cmd::Cartan { block, window: w, col_window, format } => {
            let xi = block.key()?;
            let rw = window(w)?;
            let cw = match col_window {
                Some(c) => window(c)?,
                None => rw,
            };
            let m = CartanWindow::build(
                Composition::all_in(xi.t, rw.lo, rw.hi),
                Composition::all_in(xi.t, cw.lo, cw.hi),
                |l, k| cartan_entry(&xi, l, k),
            )?;
            ok(matrix_out(&m, *format, |e: &BigInt| Value::String(e.to_string()))?)
        }
        Cmd::GradedCartan { block, lambda, kappa, window: w, format } => {
            let xi = block.key()?;
            match (lambda, kappa, w) {
                (Some(l), Some(k), None) => ok(lq_json(&graded_cartan(&xi, &l.parse()?, &k.parse()?)?, q1).to_string()),
                (None, None, Some(w)) => {
                    let w = window(w)?;
                    let labels = Composition::all_in(xi.t, w.lo, w.hi);
                    let m = CartanWindow::build(labels.clone(), labels, |l, k| graded_cartan(&xi, l, k))?;
                    ok(matrix_out(&m, *format, |e| match format {
                        Format::Csv if !q1 => Value::String(e.to_string()),
                        _ => lq_json(e, q1),
                    })?)
                }
                _ => Err(Error::Invalid("give either --lambda and --kappa, or --window".into())),
            }
        }
        Cmd::H { lambda } => ok(h_count(&lambda.parse()?).to_string()),
        Cmd::EndDim { block, i } => {
            let xi = block.key()?;
            let out = json!({"end_dim": end_dim(&xi, *i)?.to_string(), "d": d_invariant(&xi, *i)?.to_string()});
            ok(out.to_string())
        }
        Cmd::Recover => {
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(|e| Error::Invalid(format!("stdin: {e}")))?;
            let data = MatrixOracle::from_json(&text)?;
            let (t, gamma) = recover_invariants(&data)?;
            ok(json!({"t": t, "gamma": gamma.parts()}).to_string())
        }
        Cmd::Equiv { block, moves, max_width } => {
            let xi = block.key()?;
            let ms = match moves {
                Moves::Morita => MoveSet::Morita,
                Moves::Derived => MoveSet::Derived,
                Moves::Both => MoveSet::Both,
            };
            let out: Vec<Value> = xi
                .closure(ms, *max_width)
                .iter()
                .map(|k| {
                    let (t, m, n, g) = k.invariant_signature();
                    json!({"key": k.short(), "m": k.m, "n": k.n, "signature": {"t": t, "m": m, "n": n, "gamma_transpose": label(&g)}})
                })
                .collect();
            ok(Value::Array(out).to_string())
        }
        Cmd::Center { m, n, op, r, poly, s_minus } => {
            let need_r = || r.ok_or_else(|| Error::Invalid("--r is required".into()));
            match op {
                CenterOp::ESuper => ok(e_super(need_r()?, *m, *n)?.to_json_value().to_string()),
                CenterOp::Series => ok(hc_series_coeff(need_r()?, *m, *n)?.to_json_value().to_string()),
                CenterOp::Member => {
                    let text = poly.as_ref().ok_or_else(|| Error::Invalid("--poly is required".into()))?;
                    let v: Value = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("--poly: {e}")))?;
                    let f = MultiPoly::from_json_value(*m, *n, &v).map_err(Error::Invalid)?;
                    let out = json!({
                        "symmetric": is_row_symmetric(&f),
                        "in_I": in_i(&f),
                        "in_J": in_j(&f, *s_minus)?,
                    });
                    ok(out.to_string())
                }
            }
        }
        Cmd::Cb { rank, signs, key, canonical: want_canonical, pair_with } => {
            let signs = parse_signs(signs)?;
            let key = parse_key(key)?;
            let c = cache.as_ref();
            match pair_with {
                Some(other) => {
                    let a = canonical(*rank, &signs, &key, c)?;
                    let b = dual_canonical(*rank, &signs, &parse_key(other)?, c)?;
                    ok(lq_json(&pairing(&a, &b)?, q1).to_string())
                }
                None => {
                    let v = if *want_canonical {
                        canonical(*rank, &signs, &key, c)?
                    } else {
                        dual_canonical(*rank, &signs, &key, c)?
                    };
                    ok(tensor_json(&v, q1).to_string())
                }
            }
        }
        Cmd::Verify { profile, inject, only } => {
            let profile: Profile = profile.parse()?;
            let opts = Options { profile, inject: *inject };
            let report = match only {
                None => verify::run(opts),
                Some(list) => {
                    let ids = list
                        .split(',')
                        .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad criterion id {x:?}"))))
                        .collect::<Result<Vec<u32>>>()?;
                    verify::run_selected(opts, &ids)
                }
            };
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))?;
            Ok(Outcome {
                stdout: text,
                code: if report.passed { EXIT_OK } else { EXIT_VERIFY },
            })
        }
    }
}

/// Full entry point: parses `args`, runs, and writes to the given streams.
pub fn main_with(args: Vec<String>, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(o) => {
            let _ = writeln!(out, "{}", o.stdout.trim_end());
            o.code
        }
        Err(Error::Invalid(msg)) => {
            let _ = writeln!(err, "error: invalid input: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_COMPUTE
        }
    }
}
