//! Command-line surface: argument parsing, dispatch, serialization and
//! cache management.
//!
//! Exit codes: 0 success / verified; 1 usage or precondition error;
//! 2 internal invariant violation or verification failure. Output is
//! deterministic and byte-identical across `--jobs` settings.

use crate::cartan::{build_cartan, CorootVector, LieType, RootSystem};
use crate::grassmann::{self, Partition, Q2COutcome};
use crate::pw;
use crate::qhring::{QHElement, QuantumEngine};
use crate::reduce::{self, ReduceOutcome};
use crate::weyl::{self, ParabolicSubset, WeylElement, DEFAULT_GROUP_CEILING};
use crate::{Error, Report, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num::BigInt;
use rayon::prelude::*;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    /// Sign vanishing criterion and the rewrite identities.
    Theorem1,
    /// The Grassmannian reduction algorithm against the engine.
    Theorem2,
    /// Filtration, leading-term and grading properties.
    Filtration,
    /// Peterson-Woodward transport against the Pieri oracle on
    /// Gr(2,4)/Gr(2,5), plus λ_B uniqueness.
    Pw,
    /// x-element invariants and the two-step flag correspondence.
    Grassmann,
}

#[derive(Parser, Debug)]
#[command(
    name = "qschubert",
    about = "Exact quantum Schubert calculus on generalized flag varieties",
    version
)]
struct Cli {
    /// Lie type (A, B, C, D, E, F, G)
    #[arg(long, global = true, default_value = "A", value_name = "LETTER")]
    r#type: String,
    /// Rank of the root system
    #[arg(long, global = true, default_value_t = 2)]
    rank: usize,
    /// Directory for the product/expansion cache (or QSCHUBERT_CACHE)
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for verification and table enumeration (0 = default)
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    output: OutputFormat,
    /// Restrict transfer rewrites to the literal common value 2
    #[arg(long, global = true)]
    strict_theorem: bool,
    /// Upper bound on Weyl group enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CEILING)]
    ceiling: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full quantum product σ^u ⋆ σ^v
    Product {
        /// Element: word "2 1 2", one-line "[3,1,2,4]", or "e"
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// One structure constant N_{u,v}^{w,λ}
    Coeff {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        /// Coroot vector "1,1,0"
        #[arg(long)]
        lambda: String,
    },
    /// Rewrite a quantum constant with Grassmannian u into a classical one
    Reduce {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        lambda: String,
        /// Descent position k of u
        #[arg(long, value_name = "K")]
        grassmannian: usize,
        /// Emit the rewrite chain
        #[arg(long)]
        trace: bool,
    },
    /// Peterson-Woodward lift of a degree class
    PwLift {
        /// Δ_P as simple indices "1,3"
        #[arg(long)]
        parabolic: String,
        #[arg(long)]
        lambda: String,
        /// Optional w ∈ W^P to transport
        #[arg(long)]
        w: Option<String>,
    },
    /// Quantum-to-classical triple on Gr(k,N)
    Q2c {
        /// Grassmannian as "k,N" (for Gr(k,N))
        #[arg(long, value_name = "K,N")]
        grassmannian: String,
        #[arg(long)]
        degree: i64,
        /// Partitions "2,1" ("0" for the empty one)
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Exhaustive identity verification
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Stream every structure constant as sorted JSON lines
    Table,
}

/// A validated request: every argument has been parsed against the
/// selected root system before any computation starts.
pub struct CommandRequest {
    pub rs: Arc<RootSystem>,
    pub jobs: usize,
    pub output: OutputFormat,
    pub strict: bool,
    pub ceiling: usize,
    pub cache_dir: Option<PathBuf>,
    pub action: Action,
}

pub enum Action {
    Product {
        u: WeylElement,
        v: WeylElement,
    },
    Coeff {
        u: WeylElement,
        v: WeylElement,
        w: WeylElement,
        lambda: CorootVector,
    },
    Reduce {
        u: WeylElement,
        v: WeylElement,
        w: WeylElement,
        lambda: CorootVector,
        k: usize,
        trace: bool,
    },
    PwLift {
        parabolic: ParabolicSubset,
        lambda: CorootVector,
        w: Option<WeylElement>,
    },
    Q2c {
        k: usize,
        degree: i64,
        u: Partition,
        v: Partition,
        w: Partition,
    },
    Verify {
        target: VerifyTarget,
    },
    Table,
}

fn validate(cli: Cli) -> Result<CommandRequest> {
    let lie_type = LieType::parse(&cli.r#type)?;
    let (lie_type, rank) = match &cli.command {
        // Gr(k,N) lives on A_{N-1} regardless of --type/--rank.
        Command::Q2c { grassmannian, .. } => {
            let (_, n_total) = parse_grassmannian_pair(grassmannian)?;
            (LieType::A, n_total - 1)
        }
        _ => (lie_type, cli.rank),
    };
    let rs = Arc::new(build_cartan(lie_type, rank)?);
    let action = match cli.command {
        Command::Product { u, v } => Action::Product {
            u: weyl::parse_element(&rs, &u)?,
            v: weyl::parse_element(&rs, &v)?,
        },
        Command::Coeff { u, v, w, lambda } => Action::Coeff {
            u: weyl::parse_element(&rs, &u)?,
            v: weyl::parse_element(&rs, &v)?,
            w: weyl::parse_element(&rs, &w)?,
            lambda: CorootVector::parse(&lambda, rs.rank())?,
        },
        Command::Reduce {
            u,
            v,
            w,
            lambda,
            grassmannian,
            trace,
        } => Action::Reduce {
            u: weyl::parse_element(&rs, &u)?,
            v: weyl::parse_element(&rs, &v)?,
            w: weyl::parse_element(&rs, &w)?,
            lambda: CorootVector::parse(&lambda, rs.rank())?,
            k: grassmannian,
            trace,
        },
        Command::PwLift {
            parabolic,
            lambda,
            w,
        } => Action::PwLift {
            parabolic: ParabolicSubset::parse(&parabolic, rs.rank())?,
            lambda: CorootVector::parse(&lambda, rs.rank())?,
            w: w.map(|s| weyl::parse_element(&rs, &s)).transpose()?,
        },
        Command::Q2c {
            grassmannian,
            degree,
            u,
            v,
            w,
        } => {
            let (k, _) = parse_grassmannian_pair(&grassmannian)?;
            Action::Q2c {
                k,
                degree,
                u: Partition::parse(&u)?,
                v: Partition::parse(&v)?,
                w: Partition::parse(&w)?,
            }
        }
        Command::Verify { target } => Action::Verify { target },
        Command::Table => Action::Table,
    };
    Ok(CommandRequest {
        rs,
        jobs: cli.jobs,
        output: cli.output,
        strict: cli.strict_theorem,
        ceiling: cli.ceiling,
        cache_dir: cli.cache_dir.or_else(|| {
            std::env::var_os("QSCHUBERT_CACHE").map(PathBuf::from)
        }),
        action,
    })
}

fn parse_grassmannian_pair(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!(
            "expected --grassmannian k,N (e.g. \"2,4\"), got {s:?}"
        )));
    }
    let k = parts[0]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad k in {s:?}")))?;
    let n_total = parts[1]
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad N in {s:?}")))?;
    if k == 0 || k >= n_total || n_total < 2 {
        return Err(Error::Parse(format!("Gr({k},{n_total}) is not a Grassmannian")));
    }
    Ok((k, n_total))
}

/// Parse an argument vector into a validated request.
pub fn parse_args<I, S>(argv: I) -> Result<CommandRequest>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    validate(cli)
}

fn coeff_json(n: &BigInt) -> serde_json::Value {
    match i64::try_from(n) {
        Ok(v) => serde_json::Value::from(v),
        Err(_) => serde_json::Value::from(n.to_string()),
    }
}

fn word_string(word: &[usize]) -> String {
    if word.is_empty() {
        "e".to_string()
    } else {
        word.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Terms of an element, sorted by (ℓ(w), canonical word, λ).
fn sorted_terms(rs: &RootSystem, e: &QHElement) -> Vec<(Vec<usize>, Vec<i64>, BigInt)> {
    let mut terms: Vec<(u32, Vec<usize>, Vec<i64>, BigInt)> = e
        .terms()
        .map(|(k, n)| {
            (
                k.w.length(),
                k.w.canonical_word(rs),
                k.lambda.0.clone(),
                n.clone(),
            )
        })
        .collect();
    terms.sort();
    terms
        .into_iter()
        .map(|(_, word, lambda, n)| (word, lambda, n))
        .collect()
}

fn render_product(rs: &RootSystem, e: &QHElement, output: OutputFormat) -> String {
    let terms = sorted_terms(rs, e);
    match output {
        OutputFormat::Json => {
            let arr: Vec<serde_json::Value> = terms
                .into_iter()
                .map(|(w, lambda, n)| {
                    serde_json::json!({
                        "w": word_string(&w),
                        "lambda": lambda,
                        "coeff": coeff_json(&n),
                    })
                })
                .collect();
            serde_json::json!({ "terms": arr }).to_string()
        }
        OutputFormat::Text => {
            if terms.is_empty() {
                return "0".to_string();
            }
            terms
                .into_iter()
                .map(|(w, lambda, n)| {
                    let q = if lambda.iter().all(|&a| a == 0) {
                        String::new()
                    } else {
                        format!(
                            "q({}) ",
                            lambda
                                .iter()
                                .map(|a| a.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        )
                    };
                    format!("{n} {q}σ[{}]", word_string(&w))
                })
                .collect::<Vec<_>>()
                .join("\n")
        }
    }
}

fn render_report(name: &str, report: &Report, output: OutputFormat) -> (i32, String) {
    let code = if report.ok() { 0 } else { 2 };
    let text = match output {
        OutputFormat::Json => serde_json::json!({
            "suite": name,
            "checks": report.checks,
            "violations": report.violations,
        })
        .to_string(),
        OutputFormat::Text => {
            let mut lines = Vec::new();
            for v in &report.violations {
                lines.push(format!("VIOLATION {v}"));
            }
            lines.push(format!(
                "{name}: {} checks, {} violations",
                report.checks,
                report.violations.len()
            ));
            lines.join("\n")
        }
    };
    (code, text)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

/// Execute a validated request. Returns (exit code, stdout payload).
pub fn run(request: &CommandRequest) -> Result<(i32, String)> {
    let engine = QuantumEngine::with_ceiling(request.rs.clone(), request.ceiling);
    let cache_path = request
        .cache_dir
        .as_ref()
        .map(|dir| dir.join(engine.cache_file_name()));
    if let Some(path) = &cache_path {
        engine.load_cache(path)?;
    }
    let result = dispatch(request, &engine)?;
    if let Some(path) = &cache_path {
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        engine
            .save_cache(path)
            .map_err(|e| Error::Precondition(format!("cannot write cache: {e}")))?;
    }
    Ok(result)
}

fn dispatch(request: &CommandRequest, engine: &QuantumEngine) -> Result<(i32, String)> {
    let rs = request.rs.as_ref();
    match &request.action {
        Action::Product { u, v } => {
            let product = engine.product(u, v)?;
            Ok((0, render_product(rs, &product, request.output)))
        }
        Action::Coeff { u, v, w, lambda } => {
            let value = engine.coefficient(u, v, w, lambda)?;
            let text = match request.output {
                OutputFormat::Json => serde_json::json!({"value": coeff_json(&value)}).to_string(),
                OutputFormat::Text => format!("value: {value}"),
            };
            Ok((0, text))
        }
        Action::Reduce {
            u,
            v,
            w,
            lambda,
            k,
            trace,
        } => {
            let quad = reduce::Quad {
                u: u.clone(),
                v: v.clone(),
                w: w.clone(),
                lambda: lambda.clone(),
            };
            let (outcome, steps) = reduce::reduce_grassmannian(rs, *k, &quad)?;
            let value = match &outcome {
                ReduceOutcome::Vanishes(_) => BigInt::from(0),
                ReduceOutcome::Reduced(t) => {
                    engine.coefficient(&t.u, &t.v, &t.w, &CorootVector::zero(rs.rank()))?
                }
            };
            match request.output {
                OutputFormat::Json => {
                    let mut obj = serde_json::json!({"value": coeff_json(&value)});
                    if *trace {
                        obj["trace"] = reduce::trace_to_json(rs, &steps);
                    }
                    Ok((0, obj.to_string()))
                }
                OutputFormat::Text => {
                    let mut lines = vec![format!("value: {value}")];
                    if *trace {
                        for s in &steps {
                            let alpha = s
                                .alpha
                                .map(|a| format!(" α={a}"))
                                .unwrap_or_default();
                            let after = s
                                .after
                                .as_ref()
                                .map(|q| format!(" -> {}", q.display(rs)))
                                .unwrap_or_default();
                            lines.push(format!(
                                "{}{alpha} {}{after}",
                                s.tag.as_str(),
                                s.before.display(rs)
                            ));
                        }
                    }
                    Ok((0, lines.join("\n")))
                }
            }
        }
        Action::PwLift {
            parabolic,
            lambda,
            w,
        } => {
            let lift = pw::lambda_b(rs, parabolic, lambda)?;
            let w_lift = w
                .as_ref()
                .map(|w| pw::psi_lift(rs, parabolic, lambda, w))
                .transpose()?;
            match request.output {
                OutputFormat::Json => {
                    let mut obj = serde_json::json!({
                        "lambda_b": lift.lambda_b.0,
                        "delta_p_prime": lift.delta_p_prime.indices(),
                        "omega_factor": weyl::format_word(rs, &lift.omega_factor),
                    });
                    if let Some((_, lifted)) = &w_lift {
                        obj["w_lift"] = serde_json::Value::from(weyl::format_word(rs, lifted));
                    }
                    Ok((0, obj.to_string()))
                }
                OutputFormat::Text => {
                    let mut lines = vec![
                        format!("lambda_b: {}", lift.lambda_b),
                        format!("delta_p_prime: {}", lift.delta_p_prime),
                        format!(
                            "omega_factor: {}",
                            weyl::format_word(rs, &lift.omega_factor)
                        ),
                    ];
                    if let Some((_, lifted)) = &w_lift {
                        lines.push(format!("w_lift: {}", weyl::format_word(rs, lifted)));
                    }
                    Ok((0, lines.join("\n")))
                }
            }
        }
        Action::Q2c {
            k,
            degree,
            u,
            v,
            w,
        } => {
            let pu = grassmann::permutation_of_partition(rs, *k, u)?;
            let pv = grassmann::permutation_of_partition(rs, *k, v)?;
            let pw_ = grassmann::permutation_of_partition(rs, *k, w)?;
            match grassmann::quantum_to_classical(rs, *k, &pu, &pv, &pw_, *degree)? {
                Q2COutcome::Vanishes(reason) => {
                    let text = match request.output {
                        OutputFormat::Json => {
                            serde_json::json!({"vanishes": reason}).to_string()
                        }
                        OutputFormat::Text => format!("vanishes: {reason}"),
                    };
                    Ok((0, text))
                }
                Q2COutcome::Triple { ux, vx, w_tilde } => {
                    let value = engine.coefficient(
                        &ux,
                        &vx,
                        &w_tilde,
                        &CorootVector::zero(rs.rank()),
                    )?;
                    let text = match request.output {
                        OutputFormat::Json => serde_json::json!({
                            "ux": weyl::format_word(rs, &ux),
                            "vx": weyl::format_word(rs, &vx),
                            "w_tilde": weyl::format_word(rs, &w_tilde),
                            "value": coeff_json(&value),
                        })
                        .to_string(),
                        OutputFormat::Text => format!(
                            "ux: {}\nvx: {}\nw_tilde: {}\nvalue: {value}",
                            weyl::format_word(rs, &ux),
                            weyl::format_word(rs, &vx),
                            weyl::format_word(rs, &w_tilde),
                        ),
                    };
                    Ok((0, text))
                }
            }
        }
        Action::Verify { target } => {
            let strict = request.strict;
            let jobs = request.jobs;
            let (name, report) = match target {
                VerifyTarget::Theorem1 => {
                    let rep = with_pool(jobs, || -> Result<Report> {
                        let a = reduce::verify_theorem1(engine)?;
                        let b = reduce::verify_transfer(engine, strict)?;
                        Ok(a.merge(b).finalize())
                    })?;
                    ("theorem1", rep)
                }
                VerifyTarget::Theorem2 => {
                    ("theorem2", with_pool(jobs, || reduce::verify_theorem2(engine))?)
                }
                VerifyTarget::Filtration => {
                    ("filtration", with_pool(jobs, || reduce::verify_filtration(engine))?)
                }
                VerifyTarget::Pw => {
                    // pinned desk-scale suites: Gr(2,4), Gr(2,5), A3 uniqueness
                    let rep = with_pool(jobs, || -> Result<Report> {
                        let a3 = Arc::new(build_cartan(LieType::A, 3)?);
                        let a4 = Arc::new(build_cartan(LieType::A, 4)?);
                        let e3 = QuantumEngine::new(a3.clone());
                        let e4 = QuantumEngine::new(a4);
                        let mut rep = grassmann::verify_pw_agreement(&e3, 2)?;
                        rep = rep.merge(grassmann::verify_pw_agreement(&e4, 2)?);
                        rep = rep.merge(pw::verify_lambda_b_uniqueness(&a3, 2)?);
                        Ok(rep.finalize())
                    })?;
                    ("pw", rep)
                }
                VerifyTarget::Grassmann => {
                    let rep = with_pool(jobs, || -> Result<Report> {
                        let e3 = QuantumEngine::new(Arc::new(build_cartan(LieType::A, 3)?));
                        let e4 = QuantumEngine::new(Arc::new(build_cartan(LieType::A, 4)?));
                        let mut rep = grassmann::verify_x_invariants(5)?;
                        rep = rep.merge(grassmann::verify_q2c(&e3, 2)?);
                        rep = rep.merge(grassmann::verify_q2c(&e4, 2)?);
                        Ok(rep.finalize())
                    })?;
                    ("grassmann", rep)
                }
            };
            Ok(render_report(name, &report, request.output))
        }
        Action::Table => {
            let lines = with_pool(request.jobs, || -> Result<Vec<String>> {
                let group = engine.full_group()?;
                let pairs: Vec<(&WeylElement, &WeylElement)> = group
                    .iter()
                    .flat_map(|u| group.iter().map(move |v| (u, v)))
                    .collect();
                let mut keyed = pairs
                    .par_iter()
                    .map(|(u, v)| {
                        let product = engine.product(u, v)?;
                        let uw = u.canonical_word(rs);
                        let vw = v.canonical_word(rs);
                        Ok(sorted_terms(rs, &product)
                            .into_iter()
                            .map(|(ww, lambda, n)| {
                                (
                                    (u.length(), uw.clone(), v.length(), vw.clone()),
                                    ww,
                                    lambda,
                                    n,
                                )
                            })
                            .collect::<Vec<_>>())
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect::<Vec<_>>();
                keyed.sort();
                Ok(keyed
                    .into_iter()
                    .map(|((_, uw, _, vw), ww, lambda, n)| {
                        serde_json::json!({
                            "u": word_string(&uw),
                            "v": word_string(&vw),
                            "w": word_string(&ww),
                            "lambda": lambda,
                            "coeff": coeff_json(&n),
                        })
                        .to_string()
                    })
                    .collect())
            })?;
            Ok((0, lines.join("\n")))
        }
    }
}

/// Entry point used by the binary: parse, run, map errors to exit codes.
pub fn main_entry<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let request = match validate(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match run(&request) {
        Ok((code, output)) => {
            if !output.is_empty() {
                println!("{output}");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Invariant(_) => 2,
                _ => 1,
            }
        }
    }
}
