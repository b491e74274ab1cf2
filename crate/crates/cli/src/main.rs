use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use freerat::free_product::{FPElement, FactorModel, FreeProduct, Syllable};
use freerat::gaps::{self, FamilyShape, ScanConfig};
use freerat::positivize::positivize_total;
use freerat::rational::acceptor::{intersect_positive, member, Acceptor};
use freerat::rational::enumerate::enumerate_bounded;
use freerat::rational::expr::RatExpr;
use freerat::rational::standard_form::standard_form;
use freerat::refuter;
use freerat::sign::{split_product, SignModel};
use freerat::verbal::{self, CyclicProduct, FreeGroup, GroupModel, VerbalQuery};
use freerat::word::{self, Word};

const SCHEMA_VERSION: u32 = 1;
const MAX_CAP_LEN: usize = 64;
const MAX_SAMPLES: usize = 1_000_000;

#[derive(Parser)]
#[command(
    name = "freerat",
    version,
    about = "Free groups, rational sets and verbal-set refutation"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Length cap for enumerations and samples.
    #[arg(long, global = true)]
    cap_len: Option<usize>,
    /// Number of random samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Order of factor A (omit for ℤ).
    #[arg(long, global = true)]
    a_order: Option<u32>,
    /// Order of factor B (omit for ℤ).
    #[arg(long, global = true)]
    b_order: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free-group words.
    #[command(subcommand)]
    Word(WordCmd),
    /// Elements of the free product A∗B.
    #[command(subcommand)]
    Fp(FpCmd),
    /// Rational subsets of F₂ given as s-expressions.
    #[command(subcommand)]
    Rat(RatCmd),
    /// Sign functions, product splits and positivization.
    #[command(subcommand)]
    Sign(SignCmd),
    /// Gap profiles and γ scans.
    #[command(subcommand)]
    Gaps(GapsCmd),
    /// Values of a word in a group.
    #[command(subcommand)]
    Verbal(VerbalCmd),
    /// Refute a rational description of the positive values of a word.
    Refute {
        #[arg(long)]
        word: String,
        /// S-expression file, or an inline s-expression.
        #[arg(long)]
        expr: String,
    },
    /// Replay every certificate of a saved refutation report.
    Replay {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Subcommand)]
enum WordCmd {
    Reduce {
        w: String,
    },
    Inverse {
        w: String,
    },
    Pow {
        w: String,
        k: i64,
    },
    Cyclic {
        w: String,
    },
    Root {
        w: String,
        #[arg(long)]
        e: u32,
    },
    Profile {
        w: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    Bezout {
        w: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        rank: Option<usize>,
    },
}

#[derive(Subcommand)]
enum FpCmd {
    Reduce { u: String },
    Core { u: String },
    Cyclic { u: String },
}

#[derive(Args)]
struct ExprArg {
    /// S-expression file, or an inline s-expression.
    #[arg(long)]
    expr: String,
}

#[derive(Subcommand)]
enum RatCmd {
    Member {
        #[command(flatten)]
        expr: ExprArg,
        #[arg(long)]
        word: String,
    },
    Enum {
        #[command(flatten)]
        expr: ExprArg,
    },
    Positive {
        #[command(flatten)]
        expr: ExprArg,
    },
    StandardForm {
        #[command(flatten)]
        expr: ExprArg,
    },
}

#[derive(Subcommand)]
enum SignCmd {
    /// Find u with S·u⁻¹ and u·T positive.
    Split {
        /// Comma-separated elements.
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
    },
    Positivize {
        #[command(flatten)]
        expr: ExprArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Single,
    Cumulative,
}

#[derive(Subcommand)]
enum GapsCmd {
    Profile {
        #[arg(long)]
        u: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2)]
        e: u64,
    },
    Scan {
        #[arg(long)]
        word: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2)]
        exp_bound: i64,
        #[arg(long)]
        positive: bool,
        #[arg(long)]
        csv: bool,
    },
    Exhaustive {
        #[arg(long, default_value_t = 2)]
        e: u64,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 2)]
        exp_bound: i64,
    },
    Family {
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        e: u64,
        #[arg(long, value_enum, default_value_t = Shape::Single)]
        shape: Shape,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum VerbalCmd {
    Enum {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 2)]
        products: usize,
    },
    Member {
        #[arg(long)]
        word: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 2)]
        products: usize,
    },
    Length {
        #[arg(long)]
        word: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 3)]
        products: usize,
    },
    Dichotomy {
        #[arg(long)]
        word: String,
        /// Comma-separated positive elements of E.
        #[arg(long)]
        e: String,
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, default_value = "1")]
        q: String,
        #[arg(long, default_value_t = 3)]
        budget: usize,
    },
}

enum Output {
    Text(String),
    Json(Value),
    Csv(String),
}

struct Run {
    output: Output,
    ok: bool,
}

impl Run {
    fn json(command: &str, cli: &Cli, result: impl Serialize) -> Result<Run> {
        Ok(Run {
            output: Output::Json(envelope(command, cli, serde_json::to_value(result)?)),
            ok: true,
        })
    }

    fn text(s: impl ToString) -> Run {
        Run {
            output: Output::Text(s.to_string()),
            ok: true,
        }
    }
}

fn envelope(command: &str, cli: &Cli, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": cli.seed,
        "result": result,
    })
}

fn cap(value: Option<usize>, default: usize, max: usize, name: &str) -> Result<usize> {
    let v = value.unwrap_or(default);
    if v > max {
        bail!("--{name} {v} exceeds the hard limit {max}");
    }
    Ok(v)
}

fn parse_word(s: &str) -> Result<Word> {
    s.parse().map_err(|e| anyhow::anyhow!("word {s:?}: {e}"))
}

fn read_expr(arg: &str) -> Result<RatExpr> {
    let text = if arg.trim_start().starts_with('(') {
        arg.to_string()
    } else {
        fs::read_to_string(Path::new(arg)).with_context(|| format!("reading {arg}"))?
    };
    text.trim()
        .parse()
        .map_err(|e| anyhow::anyhow!("expression: {e}"))
}

fn free_product(cli: &Cli) -> Result<FreeProduct> {
    let model = |m: Option<u32>| m.map_or(FactorModel::InfiniteCyclic, FactorModel::FiniteCyclic);
    Ok(FreeProduct::new(model(cli.a_order), model(cli.b_order))?)
}

fn parse_element(fp: &FreeProduct, s: &str) -> Result<FPElement> {
    fp.parse(s.trim())
        .map_err(|e| anyhow::anyhow!("element {s:?}: {e}"))
}

fn parse_elements(fp: &FreeProduct, s: &str) -> Result<Vec<FPElement>> {
    s.split(',').map(|x| parse_element(fp, x)).collect()
}

fn parse_syllable(fp: &FreeProduct, s: &str) -> Result<Syllable> {
    fp.parse_syllable(s.trim())
        .map_err(|e| anyhow::anyhow!("syllable {s:?}: {e}"))
}

fn rank_of(w: &Word, rank: Option<usize>) -> usize {
    rank.unwrap_or(w.max_generator().max(1) as usize)
}

fn run_word(cli: &Cli, cmd: &WordCmd) -> Result<Run> {
    Ok(match cmd {
        WordCmd::Reduce { w } => Run::text(parse_word(w)?),
        WordCmd::Inverse { w } => Run::text(parse_word(w)?.inverse()),
        WordCmd::Pow { w, k } => Run::text(parse_word(w)?.pow(*k)),
        WordCmd::Cyclic { w } => {
            let (conjugator, core) = parse_word(w)?.cyclic_reduce();
            Run::json(
                "word cyclic",
                cli,
                json!({ "conjugator": conjugator, "core": core }),
            )?
        }
        WordCmd::Root { w, e } => {
            let u = parse_word(w)?;
            Run::json(
                "word root",
                cli,
                json!({ "word": u, "e": e, "root": word::root_extract(&u, *e) }),
            )?
        }
        WordCmd::Profile { w, rank } => {
            let u = parse_word(w)?;
            let r = rank_of(&u, *rank);
            let profile = word::exponent_profile(&u, r)?;
            let class = word::classify_word(&u, r)?;
            Run::json(
                "word profile",
                cli,
                json!({ "profile": profile, "class": class }),
            )?
        }
        WordCmd::Bezout { w, g, rank } => {
            let u = parse_word(w)?;
            let t = word::bezout_transcript(&u, rank_of(&u, *rank), &parse_word(g)?)?;
            Run::json("word bezout", cli, t)?
        }
    })
}

fn run_fp(cli: &Cli, cmd: &FpCmd) -> Result<Run> {
    let fp = free_product(cli)?;
    Ok(match cmd {
        FpCmd::Reduce { u } => Run::text(parse_element(&fp, u)?),
        FpCmd::Core { u } => {
            let d = fp.core_decompose(&parse_element(&fp, u)?)?;
            Run::json("fp core", cli, d)?
        }
        FpCmd::Cyclic { u } => {
            let x = parse_element(&fp, u)?;
            let c = fp.cyclic_form(&x)?;
            Run::json(
                "fp cyclic",
                cli,
                json!({ "element": x.to_string(), "cyclic_form": c.to_string(), "support": c.support() }),
            )?
        }
    })
}

fn run_rat(cli: &Cli, cmd: &RatCmd) -> Result<Run> {
    Ok(match cmd {
        RatCmd::Member { expr, word } => {
            let e = read_expr(&expr.expr)?;
            let g = parse_word(word)?;
            Run::json(
                "rat member",
                cli,
                json!({ "expr": e, "word": g, "member": member(&e, &g) }),
            )?
        }
        RatCmd::Enum { expr } => {
            let e = read_expr(&expr.expr)?;
            let len = cap(cli.cap_len, 6, MAX_CAP_LEN, "cap-len")?;
            let words = enumerate_bounded(&e, len)?;
            Run::json(
                "rat enum",
                cli,
                json!({ "expr": e, "cap_len": len, "count": words.len(), "words": words }),
            )?
        }
        RatCmd::Positive { expr } => {
            let e = read_expr(&expr.expr)?;
            let a = intersect_positive(&e).minimize();
            Run::json(
                "rat positive",
                cli,
                json!({ "expr": e, "finite": a.is_finite(), "acceptor": a.export() }),
            )?
        }
        RatCmd::StandardForm { expr } => {
            let e = read_expr(&expr.expr)?;
            let sf = standard_form(&e);
            let text: Vec<String> = sf.summands.iter().map(|s| s.to_string()).collect();
            Run::json(
                "rat standard-form",
                cli,
                json!({ "expr": e, "complexity": e.complexity(), "summands": text }),
            )?
        }
    })
}

fn run_sign(cli: &Cli, cmd: &SignCmd) -> Result<Run> {
    Ok(match cmd {
        SignCmd::Split { s, t } => {
            let fp = free_product(cli)?;
            let sign = SignModel::standard(fp);
            let trace = split_product(&parse_elements(&fp, s)?, &parse_elements(&fp, t)?, &sign)?;
            Run::json("sign split", cli, trace)?
        }
        SignCmd::Positivize { expr } => {
            let e = read_expr(&expr.expr)?;
            let p = positivize_total(&e)?;
            let equivalent =
                Acceptor::from_expr(&p.expr, 2).equivalent(&Acceptor::from_expr(&e, 2));
            Run::json(
                "sign positivize",
                cli,
                json!({ "input": e, "output": p.expr, "equivalent": equivalent, "trace": p.trace }),
            )?
        }
    })
}

fn csv_with_header<R: Serialize>(
    header: Value,
    rows: impl IntoIterator<Item = R>,
) -> Result<String> {
    let mut out = format!("# {header}\n");
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    out.push_str(&String::from_utf8(writer.into_inner()?)?);
    Ok(out)
}

#[derive(Serialize)]
struct FamilyRow {
    n: usize,
    syllable_length: usize,
    gamma: usize,
    max_k: usize,
}

fn run_gaps(cli: &Cli, cmd: &GapsCmd) -> Result<Run> {
    let fp = free_product(cli)?;
    Ok(match cmd {
        GapsCmd::Profile { u, b, e } => {
            let x = parse_element(&fp, u)?;
            let b = parse_syllable(&fp, b)?;
            let profile = gaps::gap_profile(&fp, &x, b)?;
            let table: Vec<Value> = profile
                .table
                .iter()
                .map(|(k, (pos, neg))| json!({ "k": k, "b": pos, "b_inverse": neg }))
                .collect();
            Run::json(
                "gaps profile",
                cli,
                json!({ "u": x.to_string(), "b": b, "e": e, "table": table, "gamma": profile.gamma(*e) }),
            )?
        }
        GapsCmd::Scan {
            word,
            b,
            exp_bound,
            positive,
            csv,
        } => {
            let config = ScanConfig {
                seed: cli.seed,
                samples: cap(cli.samples, 10_000, MAX_SAMPLES, "samples")?,
                max_len: cap(cli.cap_len, 40, MAX_CAP_LEN, "cap-len")?,
                exp_bound: *exp_bound,
                positive: *positive,
            };
            let report =
                gaps::criterion_scan(&fp, &parse_word(word)?, parse_syllable(&fp, b)?, &config)?;
            if *csv {
                let header = envelope(
                    "gaps scan",
                    cli,
                    json!({ "w": report.w, "e": report.e, "b": report.b, "config": report.config, "max_gamma": report.max_gamma }),
                );
                Run {
                    output: Output::Csv(csv_with_header(header, &report.samples)?),
                    ok: true,
                }
            } else {
                Run::json("gaps scan", cli, report)?
            }
        }
        GapsCmd::Exhaustive { e, b, exp_bound } => {
            let len = cap(cli.cap_len, 12, 16, "cap-len")?;
            let b = parse_syllable(&fp, b)?;
            let (max, h) = gaps::exhaustive_power_gamma(&fp, *e, b, len, *exp_bound)?;
            Run::json(
                "gaps exhaustive",
                cli,
                json!({ "e": e, "b": b, "cap_len": len, "exp_bound": exp_bound, "max_gamma": max, "attained_by": h.to_string() }),
            )?
        }
        GapsCmd::Family {
            u,
            v,
            p,
            q,
            n,
            e,
            shape,
            csv,
        } => {
            let [u, v, p, q] = [u, v, p, q].map(|s| parse_element(&fp, s));
            let (u, v, p, q) = (u?, v?, p?, q?);
            let shape = match shape {
                Shape::Single => FamilyShape::Single,
                Shape::Cumulative => FamilyShape::Cumulative,
            };
            let report = gaps::unbounded_family(&fp, &p, &u, &v, &q, *n, *e, shape)?;
            if *csv {
                let rows = report
                    .members
                    .iter()
                    .map(|m| {
                        let profile = gaps::gap_profile(&fp, &m.element, report.b)?;
                        Ok(FamilyRow {
                            n: m.n,
                            syllable_length: m.syllable_length,
                            gamma: m.gamma,
                            max_k: profile.max_k(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let header = envelope(
                    "gaps family",
                    cli,
                    json!({ "u": u.to_string(), "v": v.to_string(), "b": report.b, "e": e, "n_max": n }),
                );
                Run {
                    output: Output::Csv(csv_with_header(header, rows)?),
                    ok: true,
                }
            } else {
                Run::json(
                    "gaps family",
                    cli,
                    json!({
                        "report": report,
                        "non_decreasing": report.non_decreasing(),
                        "strict_increases": report.strict_increases(),
                    }),
                )?
            }
        }
    })
}

fn verbal_in<G>(
    cli: &Cli,
    cmd: &VerbalCmd,
    group: G,
    parse: impl Fn(&str) -> Result<G::Elem>,
) -> Result<Run>
where
    G: GroupModel,
    G::Elem: Serialize,
{
    Ok(match cmd {
        VerbalCmd::Enum { word, products } => {
            let len = cap(cli.cap_len, 2, 6, "cap-len")?;
            let q = VerbalQuery::new(group, parse_word(word)?, len, *products);
            let values = q.enumerate_values()?;
            Run::json(
                "verbal enum",
                cli,
                json!({ "word": q.w, "cap_len": len, "count": values.len(), "values": values }),
            )?
        }
        VerbalCmd::Member { word, g, products } => {
            let len = cap(cli.cap_len, 2, 6, "cap-len")?;
            let q = VerbalQuery::new(group, parse_word(word)?, len, *products);
            let answer = q.is_value(&parse(g)?)?;
            Run::json(
                "verbal member",
                cli,
                json!({ "word": q.w, "answer": answer }),
            )?
        }
        VerbalCmd::Length { word, g, products } => {
            let len = cap(cli.cap_len, 2, 6, "cap-len")?;
            let q = VerbalQuery::new(group, parse_word(word)?, len, *products);
            let report = q.w_length(&parse(g)?)?;
            Run::json(
                "verbal length",
                cli,
                json!({ "word": q.w, "report": report }),
            )?
        }
        VerbalCmd::Dichotomy { .. } => unreachable!("handled by the caller"),
    })
}

fn run_verbal(cli: &Cli, cmd: &VerbalCmd) -> Result<Run> {
    if let VerbalCmd::Dichotomy {
        word,
        e,
        p,
        q,
        budget,
    } = cmd
    {
        let fp = FreeProduct::integers();
        let result = verbal::support_dichotomy_check(
            &parse_elements(&fp, e)?,
            &parse_element(&fp, p)?,
            &parse_element(&fp, q)?,
            &parse_word(word)?,
            *budget,
        )?;
        return Run::json("verbal dichotomy", cli, result);
    }
    if cli.a_order.is_some() || cli.b_order.is_some() {
        let fp = free_product(cli)?;
        verbal_in(cli, cmd, CyclicProduct { fp, exp_bound: 2 }, |s| {
            parse_element(&fp, s)
        })
    } else {
        let rank = match cmd {
            VerbalCmd::Enum { word, .. }
            | VerbalCmd::Member { word, .. }
            | VerbalCmd::Length { word, .. } => parse_word(word)?.max_generator().max(2),
            VerbalCmd::Dichotomy { .. } => 2,
        };
        verbal_in(cli, cmd, FreeGroup { rank }, parse_word)
    }
}

fn run_refute(cli: &Cli, word: &str, expr: &str) -> Result<Run> {
    let e = read_expr(expr)?;
    let w = parse_word(word)?;
    let report = refuter::refute(&e, &w)?;
    let replay = refuter::replay(&report);
    let mut run = Run::json(
        "refute",
        cli,
        json!({ "report": report, "replayed": replay.is_ok() }),
    )?;
    if let Err(err) = replay {
        eprintln!("certificate replay failed: {err}");
        run.ok = false;
    }
    Ok(run)
}

fn run_replay(cli: &Cli, path: &Path) -> Result<Run> {
    let value: Value = serde_json::from_str(
        &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
    )?;
    let inner = value.pointer("/result/report").cloned().unwrap_or(value);
    let report: refuter::RefutationReport =
        serde_json::from_value(inner).context("not a refutation report")?;
    let replay = refuter::replay(&report);
    let mut run = Run::json(
        "replay",
        cli,
        json!({ "replayed": replay.is_ok(), "error": replay.as_ref().err().map(|e| e.to_string()) }),
    )?;
    if let Err(err) = replay {
        eprintln!("certificate replay failed: {err}");
        run.ok = false;
    }
    Ok(run)
}

fn run(cli: &Cli) -> Result<Run> {
    match &cli.command {
        Command::Word(c) => run_word(cli, c),
        Command::Fp(c) => run_fp(cli, c),
        Command::Rat(c) => run_rat(cli, c),
        Command::Sign(c) => run_sign(cli, c),
        Command::Gaps(c) => run_gaps(cli, c),
        Command::Verbal(c) => run_verbal(cli, c),
        Command::Refute { word, expr } => run_refute(cli, word, expr),
        Command::Replay { report } => run_replay(cli, report),
    }
}

fn emit(cli: &Cli, output: &Output) -> Result<()> {
    let text = match output {
        Output::Text(s) => format!("{s}\n"),
        Output::Json(v) => format!("{}\n", serde_json::to_string_pretty(v)?),
        Output::Csv(s) => s.clone(),
    };
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&cli, &r.output).map(|_| r.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
