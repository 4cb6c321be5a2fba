use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mzv::lincomb::rational_to_string;
use mzv::relations::builtins;
use mzv::{
    eval_an, eval_mzv, eval_nested_sum, extended_dsr, functional_by_family, gen_relations,
    pfd_full_reduce, shuffle, shuffle_regularize, stuffle, trace_commutative_diagram, verify,
    verify_functional, z_map, AnIndex, Bindings, Error, EvalParams, Exponent, LinComb, MzvIndex,
    NestedSumExpr, Relation, Word,
};

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "mzv",
    about = "Shuffle algebra, nested-sum decompositions, and double shuffle relations for multiple zeta values",
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EvalFlags {
    /// Config file (TOML or JSON) with evaluator defaults.
    #[arg(long)]
    config: Option<String>,
    /// Truncation for the MZV recursion.
    #[arg(long)]
    mzv_m: Option<usize>,
    /// Per-variable truncation for direct sums.
    #[arg(long)]
    direct_m: Option<usize>,
    /// Euler-Maclaurin tail terms (0, 1, or 2).
    #[arg(long)]
    tail_order: Option<u8>,
    /// Target absolute tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Working float precision in bits.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Slot bindings like s1=2.5 (repeatable).
    #[arg(long = "bind", value_name = "NAME=VALUE")]
    bind: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Shuffle product of two words.
    Shuffle { w1: String, w2: String },
    /// Harmonic (stuffle) product of two words.
    Stuffle { w1: String, w2: String },
    /// MZV index of an admissible word.
    Zmap { word: String },
    /// Triangular index of a prefixed shuffle state.
    Layout {
        /// Prefix sequence, comma separated (may be empty).
        #[arg(long, default_value = "")]
        r: String,
        /// Left factor sequence.
        #[arg(long)]
        p: String,
        /// Right factor sequence.
        #[arg(long)]
        q: String,
        /// Use the outer-power layout with this exponent instead of a prefix.
        #[arg(long, conflicts_with = "r")]
        xr: Option<i64>,
    },
    /// Step-by-step trace of shuffle steps against decompositions.
    PfdTrace {
        w1: String,
        w2: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Reduce a triangular index to a combination of MZVs.
    Reduce {
        /// Flat entry list s11,s12,...,sNN.
        entries: String,
        #[arg(long)]
        rank: usize,
    },
    /// Numerically evaluate an MZV, triangular index, or nested sum.
    Eval {
        /// MZV index like 2,1 (entries may be slots).
        #[arg(long, conflicts_with_all = ["an", "nested"])]
        mzv: Option<String>,
        /// Flat triangular index (requires --rank).
        #[arg(long, requires = "rank")]
        an: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        /// Nested-sum expression as JSON.
        #[arg(long, conflicts_with = "an")]
        nested: Option<String>,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Generate independent finite double shuffle relations.
    GenDsr {
        #[arg(long)]
        max_weight: i64,
    },
    /// Extended double shuffle relations via regularization.
    ExtDsr {
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
    },
    /// Build (and optionally verify) a functional relation family.
    Functional {
        #[arg(long)]
        family: String,
        #[arg(long)]
        p1: i64,
        #[arg(long, default_value_t = 2)]
        p2: i64,
        /// Value for slot s1; verification runs when all slots are bound.
        #[arg(long)]
        s1: Option<f64>,
        /// Value for slot s2.
        #[arg(long)]
        s2: Option<f64>,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Verify relations numerically.
    Verify {
        /// Relation file (JSON: one relation or an array).
        #[arg(long, conflicts_with = "builtin")]
        file: Option<String>,
        /// Built-in named identity.
        #[arg(long)]
        builtin: Option<String>,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Shuffle regularization of a word.
    Regularize {
        #[arg(long)]
        word: String,
    },
}

fn parse_bindings(binds: &[String]) -> Result<Bindings, Error> {
    let mut out = Bindings::new();
    for b in binds {
        let (name, val) = b
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad binding {b:?}, expected NAME=VALUE")))?;
        let v: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad binding value {val:?}")))?;
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

fn load_config(path: &str) -> Result<EvalParams, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
    let mut p = EvalParams::default();
    let table: BTreeMap<String, Value> = if path.ends_with(".toml") {
        let t: toml::Value = text
            .parse()
            .map_err(|e| Error::Parse(format!("bad TOML: {e}")))?;
        let json = serde_json::to_value(t).map_err(|e| Error::Parse(e.to_string()))?;
        serde_json::from_value(json).map_err(|e| Error::Parse(e.to_string()))?
    } else {
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?
    };
    if let Some(v) = table.get("mzv_m").and_then(|v| v.as_u64()) {
        p.mzv_m = v as usize;
    }
    if let Some(v) = table.get("direct_m").and_then(|v| v.as_u64()) {
        p.direct_m = v as usize;
    }
    if let Some(v) = table.get("tail_order").and_then(|v| v.as_u64()) {
        p.tail_order = v as u8;
    }
    if let Some(v) = table.get("tolerance").and_then(|v| v.as_f64()) {
        p.tolerance = v;
    }
    if let Some(v) = table.get("precision_bits").and_then(|v| v.as_u64()) {
        p.precision_bits = v as u32;
    }
    Ok(p)
}

fn resolve_params(flags: &EvalFlags) -> Result<(EvalParams, Bindings), Error> {
    let mut p = match &flags.config {
        Some(path) => load_config(path)?,
        None => EvalParams::default(),
    };
    if let Some(v) = flags.mzv_m {
        p.mzv_m = v;
    }
    if let Some(v) = flags.direct_m {
        p.direct_m = v;
    }
    if let Some(v) = flags.tail_order {
        p.tail_order = v;
    }
    if let Some(v) = flags.tol {
        p.tolerance = v;
    }
    if let Some(v) = flags.precision_bits {
        p.precision_bits = v;
    }
    p.validate()?;
    Ok((p, parse_bindings(&flags.bind)?))
}

fn parse_exponents(s: &str) -> Result<Vec<Exponent>, Error> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|e| e.trim().parse()).collect()
}

fn parse_zseq(s: &str) -> Result<Vec<i64>, Error> {
    // Accept "2,1", "z2z1", or word syntax like "xyy".
    if s.contains(',') || s.chars().all(|c| c.is_ascii_digit()) {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad z-sequence entry {t:?}")))
            })
            .collect()
    } else {
        let w: Word = s.parse()?;
        Ok(w.to_zseq()?)
    }
}

fn word_comb_json(lc: &LinComb<Word>) -> Value {
    json!({
        "terms": lc.iter().map(|(w, c)| json!({
            "coeff": rational_to_string(c),
            "word": w.to_string(),
        })).collect::<Vec<_>>(),
    })
}

fn mzv_comb_json(lc: &LinComb<MzvIndex>) -> Value {
    json!({
        "terms": lc.iter().map(|(k, c)| json!({
            "coeff": rational_to_string(c),
            "ks": k.to_json()["ks"],
        })).collect::<Vec<_>>(),
    })
}

fn emit(format: Format, json: Value, text: String) {
    match format {
        Format::Json => println!("{json}"),
        Format::Text => println!("{text}"),
    }
}

fn eval_result_output(format: Format, value: f64, bound: f64) {
    emit(
        format,
        json!({
            "value": format!("{value:.15e}"),
            "error_bound": format!("{bound:.6e}"),
            "heuristic": true,
        }),
        format!("{value:.15e}  (error bound {bound:.6e}, heuristic)"),
    );
}

fn verify_output(format: Format, label: &str, out: &mzv::VerifyOutcome) {
    emit(
        format,
        json!({
            "relation": label,
            "residual": format!("{:.6e}", out.residual),
            "combined_bound": format!("{:.6e}", out.combined_bound),
            "pass": out.pass,
        }),
        format!(
            "{}: {} residual {:.6e} (bound {:.6e})",
            label,
            if out.pass { "PASS" } else { "FAIL" },
            out.residual,
            out.combined_bound
        ),
    );
}

fn run(cli: Cli) -> Result<bool, Error> {
    let format = cli.format;
    match cli.command {
        Command::Shuffle { w1, w2 } => {
            let a = LinComb::singleton(w1.parse::<Word>()?);
            let b = LinComb::singleton(w2.parse::<Word>()?);
            let s = shuffle(&a, &b);
            emit(format, word_comb_json(&s), s.to_string());
        }
        Command::Stuffle { w1, w2 } => {
            let a = LinComb::singleton(w1.parse::<Word>()?);
            let b = LinComb::singleton(w2.parse::<Word>()?);
            let s = stuffle(&a, &b)?;
            emit(format, word_comb_json(&s), s.to_string());
        }
        Command::Zmap { word } => {
            let k = z_map(&word.parse()?)?;
            emit(format, k.to_json(), k.to_string());
        }
        Command::Layout { r, p, q, xr } => {
            let pe = parse_exponents(&p)?;
            let qe = parse_exponents(&q)?;
            let ix = match xr {
                Some(rr) => mzv::xr_layout(rr, &pe, &qe)?,
                None => mzv::shuffle_state_layout(&parse_exponents(&r)?, &pe, &qe)?,
            };
            emit(format, ix.to_json(), ix.to_string());
        }
        Command::PfdTrace { w1, w2, max_steps } => {
            let tr = trace_commutative_diagram(&parse_zseq(&w1)?, &parse_zseq(&w2)?, max_steps)?;
            let mut text = String::new();
            for (i, step) in tr.steps.iter().enumerate() {
                text.push_str(&format!(
                    "step {i}: {}\n  algebra:  {}\n  analysis: {} exprs\n",
                    if step.matched { "ok" } else { "MISMATCH" },
                    step.algebra,
                    step.analysis.len(),
                ));
            }
            text.push_str(if tr.completed {
                "completed: all states terminal"
            } else {
                "not completed (max steps reached)"
            });
            emit(format, tr.to_json(), text);
        }
        Command::Reduce { entries, rank } => {
            let ix = AnIndex::from_flat(rank, &parse_exponents(&entries)?)?;
            let lc = pfd_full_reduce(&ix)?;
            emit(format, mzv_comb_json(&lc), lc.to_string());
        }
        Command::Eval {
            mzv: mzv_ix,
            an,
            rank,
            nested,
            eval,
        } => {
            let (params, bindings) = resolve_params(&eval)?;
            let r = if let Some(ks) = mzv_ix {
                let k = MzvIndex {
                    ks: parse_exponents(&ks)?,
                };
                eval_mzv::<f64>(&k, &bindings, &params)?
            } else if let Some(flat) = an {
                let ix = AnIndex::from_flat(rank.unwrap(), &parse_exponents(&flat)?)?;
                eval_an::<f64>(&ix, &bindings, &params)?
            } else if let Some(src) = nested {
                let v: Value = serde_json::from_str(&src)
                    .map_err(|e| Error::Parse(format!("bad expression JSON: {e}")))?;
                eval_nested_sum::<f64>(&NestedSumExpr::from_json(&v)?, &bindings, &params)?
            } else {
                return Err(Error::Invalid(
                    "eval needs one of --mzv, --an, --nested".into(),
                ));
            };
            eval_result_output(format, r.value, r.error_bound);
        }
        Command::GenDsr { max_weight } => {
            let rels = gen_relations(max_weight);
            let text = rels
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                format,
                Value::Array(rels.iter().map(|r| r.to_json()).collect()),
                text,
            );
        }
        Command::ExtDsr { w1, w2 } => {
            let rels = extended_dsr(&w1.parse()?, &w2.parse()?)?;
            let text = rels
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                format,
                Value::Array(rels.iter().map(|r| r.to_json()).collect()),
                text,
            );
        }
        Command::Functional {
            family,
            p1,
            p2,
            s1,
            s2,
            eval,
        } => {
            let needs_two = matches!(family.as_str(), "5-2" | "5-4" | "5-6");
            let tail: Vec<Exponent> = if needs_two {
                vec![Exponent::slot("s2"), Exponent::slot("s1")]
            } else {
                vec![Exponent::slot("s1")]
            };
            let rel = functional_by_family(&family, p1, p2, &tail)?;
            let (params, mut bindings) = resolve_params(&eval)?;
            if let Some(v) = s1 {
                bindings.insert("s1".into(), v);
            }
            if let Some(v) = s2 {
                bindings.insert("s2".into(), v);
            }
            let all_bound = rel.slots.iter().all(|s| bindings.contains_key(s));
            if all_bound {
                let out = verify_functional(&rel, &bindings, &params)?;
                verify_output(format, &family, &out);
                return Ok(out.pass);
            }
            emit(format, rel.to_json(), format!("{rel:#?}"));
        }
        Command::Verify {
            file,
            builtin,
            eval,
        } => {
            let (params, bindings) = resolve_params(&eval)?;
            let rels: Vec<(String, Relation)> = if let Some(name) = builtin {
                let all = builtins();
                let rel = all
                    .get(&name)
                    .ok_or_else(|| Error::Invalid(format!("unknown builtin {name:?}")))?
                    .clone();
                vec![(name, rel)]
            } else if let Some(path) = file {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
                let items: Vec<Value> = match v {
                    Value::Array(a) => a,
                    other => vec![other],
                };
                items
                    .into_iter()
                    .enumerate()
                    .map(|(i, item)| Ok((format!("relation[{i}]"), Relation::from_json(&item)?)))
                    .collect::<Result<_, Error>>()?
            } else {
                return Err(Error::Invalid("verify needs --file or --builtin".into()));
            };
            let mut all_pass = true;
            for (label, rel) in &rels {
                let out = verify(rel, &bindings, &params)?;
                verify_output(format, label, &out);
                all_pass &= out.pass;
            }
            return Ok(all_pass);
        }
        Command::Regularize { word } => {
            let p = shuffle_regularize(&LinComb::singleton(word.parse()?))?;
            emit(format, p.to_json(), p.to_string());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
