//! The `novk` command line.
//!
//! Exit status: 0 on success, 1 on domain errors, 2 on usage errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dtc::{
    build_rho_matrix, eval_dtc_word, generator_ids, l_lambda_dim, mu_dtc_bounds,
    presentation_dtc_data, rank_over_laurent_field, rho_dtc_bounds,
    single_generator_refutation_search, span_member_bounded, DtcGenerator, DtcWord, SpanResult,
    MIN_GENERATORS_CAP,
};
use crate::fpgroup::{
    abelianization, dim_hom_r, is_cyclic, min_generators, parse_presentation, todd_coxeter,
    Abelianizer, FiniteGroupTable, FpError, Presentation, DEFAULT_MAX_COSETS,
};
use crate::freeprod::{ProductWord, Window};
use crate::laurent::{CoefficientRing, LaurentSeries};
use crate::novhom::{
    hn_connected_sum, homology, hurewicz_map_word, ml_check, pro_abelianize, AbelianSystemWindow,
    ChainComplex,
};
use crate::report::{build_report, Case};

#[derive(Debug, Parser)]
#[command(
    name = "novk",
    version,
    about = "Novikov fundamental group and homology workbench"
)]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite groups from presentations.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Words in the level-indexed free product.
    Word {
        #[command(subcommand)]
        op: WordOp,
    },
    /// Generators and relations up to deck transformations and completion.
    Dtc {
        #[command(subcommand)]
        op: DtcOp,
    },
    /// Homology, Novikov homology and Laurent series arithmetic.
    Novikov {
        #[command(subcommand)]
        op: NovikovOp,
    },
    /// Letterwise abelianization and Mittag-Leffler checks.
    Hurewicz {
        #[command(subcommand)]
        op: HurewiczOp,
    },
    /// Full report for a bundled example.
    Report {
        #[arg(value_enum)]
        case: ReportCase,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportCase {
    Poincare,
    Rp4,
}

#[derive(Debug, Args)]
pub struct GroupInput {
    /// Presentation file (`gens: a b` / `rel: ...` lines).
    #[arg(short = 'f', long = "file")]
    pub file: PathBuf,
    /// Coset budget for enumeration.
    #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
    pub max_cosets: usize,
}

#[derive(Debug, Subcommand)]
pub enum GroupOp {
    /// Order, elements and multiplication table.
    Enumerate(GroupInput),
    Abelianize(GroupInput),
    IsCyclic(GroupInput),
    /// Dimension of Hom(G, R).
    DimHom(GroupInput),
    /// Minimal number of generators.
    MinGens {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, default_value_t = MIN_GENERATORS_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum WordOp {
    /// Normal form of a word such as `[0:a][0:a][1:b]`.
    Reduce {
        #[command(flatten)]
        input: GroupInput,
        word: String,
    },
    Mul {
        #[command(flatten)]
        input: GroupInput,
        left: String,
        right: String,
    },
    Inv {
        #[command(flatten)]
        input: GroupInput,
        word: String,
    },
    /// Deck transformation: add `--by` to every level.
    Shift {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, allow_hyphen_values = true)]
        by: i64,
        word: String,
    },
    /// Truncation to level `--at`.
    Zip {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, allow_hyphen_values = true)]
        at: i64,
        word: String,
    },
    Height {
        #[command(flatten)]
        input: GroupInput,
        word: String,
    },
    Power {
        #[command(flatten)]
        input: GroupInput,
        #[arg(short = 'n', long, allow_hyphen_values = true)]
        n: i64,
        word: String,
    },
    CyclicReduce {
        #[command(flatten)]
        input: GroupInput,
        word: String,
    },
}

#[derive(Debug, Args)]
pub struct DtcGens {
    /// Generator `NAME=WORD` or `NAME@HEIGHT=WORD`; repeatable. Defaults to
    /// the level-0 letters of the presentation generators.
    #[arg(long = "gen")]
    pub gens: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum DtcOp {
    /// Evaluate a DTC word `{k:name^e}...` at level `--at`.
    Eval {
        #[command(flatten)]
        input: GroupInput,
        #[command(flatten)]
        gens: DtcGens,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        at: i64,
        word: String,
    },
    /// Bounded search for a DTC word reaching a target.
    SpanMember {
        #[command(flatten)]
        input: GroupInput,
        #[command(flatten)]
        gens: DtcGens,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        at: i64,
        #[arg(long, default_value = "0:2")]
        window: Window,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        target: String,
    },
    MuBounds {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, default_value_t = MIN_GENERATORS_CAP)]
        cap: usize,
    },
    RhoBounds(GroupInput),
    /// Relation matrix over the Laurent polynomials.
    RhoMatrix {
        #[command(flatten)]
        input: GroupInput,
        #[command(flatten)]
        gens: DtcGens,
        /// Relation as a DTC word; repeatable. Defaults to the level-0
        /// relators of the presentation.
        #[arg(long = "rel")]
        rels: Vec<String>,
    },
    /// Dimension of the equivariant homomorphisms to the Novikov field.
    LDim {
        #[command(flatten)]
        input: GroupInput,
        #[command(flatten)]
        gens: DtcGens,
        #[arg(long = "rel")]
        rels: Vec<String>,
    },
    /// Bounded search for a single generator up to DTC.
    RefuteSingle {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, default_value = "0:1")]
        window: Window,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
}

#[derive(Debug, Args)]
pub struct RingArgs {
    /// Coefficient ring: `Z`, `Q` or `Z/n`.
    #[arg(long, default_value = "Z")]
    pub ring: CoefficientRing,
    /// Truncation degree of the inputs.
    #[arg(long, allow_hyphen_values = true, default_value_t = 10)]
    pub trunc: i64,
}

#[derive(Debug, Subcommand)]
pub enum LaurentOp {
    Mul {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(allow_hyphen_values = true)]
        left: String,
        #[arg(allow_hyphen_values = true)]
        right: String,
    },
    Invert {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(allow_hyphen_values = true)]
        series: String,
    },
    Truncate {
        #[command(flatten)]
        ring: RingArgs,
        /// New truncation degree.
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(allow_hyphen_values = true)]
        series: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum NovikovOp {
    /// Homology of a chain complex; all degrees unless `--degree` is given.
    Homology {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Novikov homology of `T^n # X` from a chain complex of `X`.
    HnSum {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long = "dim", short = 'n')]
        dim: i64,
    },
    Laurent {
        #[command(subcommand)]
        op: LaurentOp,
    },
}

#[derive(Debug, Subcommand)]
pub enum HurewiczOp {
    /// Letterwise abelianization of a word, one vector per level.
    Map {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, default_value = "0:2")]
        window: Window,
        word: String,
    },
    ProAbelianize {
        #[command(flatten)]
        input: GroupInput,
        #[arg(long, default_value = "0:2")]
        window: Window,
    },
    /// Mittag-Leffler check on the pro-abelianization of `-f`, or on a JSON
    /// system given by `--system`.
    MlCheck {
        #[arg(short = 'f', long = "file", conflicts_with = "system")]
        file: Option<PathBuf>,
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        #[arg(long, default_value = "0:3")]
        window: Window,
        #[arg(short = 'k', long, default_value_t = 1)]
        k: usize,
    },
}

/// A domain error, rendered on stderr with exit status 1.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Output {
    text: String,
    json: Value,
}

fn out(text: impl Into<String>, json: Value) -> Result<Output, Failure> {
    Ok(Output {
        text: text.into(),
        json,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_presentation(input: &GroupInput) -> Result<Presentation, Failure> {
    parse_presentation(&read(&input.file)?)
        .map_err(|e| Failure(format!("{}: {e}", input.file.display())))
}

fn load_group(input: &GroupInput) -> Result<Arc<FiniteGroupTable>, Failure> {
    let p = load_presentation(input)?;
    Ok(Arc::new(todd_coxeter(&p, input.max_cosets)?))
}

fn parse_pw(text: &str, g: &Arc<FiniteGroupTable>) -> Result<ProductWord, Failure> {
    Ok(ProductWord::parse(text, Arc::clone(g))?)
}

fn word_json(w: &ProductWord) -> Value {
    let names = w.group().element_names();
    json!({
        "word": w.to_string(),
        "letters": w.letters().iter().map(|l| json!({"level": l.level, "element": names[l.element]})).collect::<Vec<_>>(),
    })
}

fn load_gens(args: &DtcGens, g: &Arc<FiniteGroupTable>) -> Result<Vec<DtcGenerator>, Failure> {
    if args.gens.is_empty() {
        return Ok(presentation_dtc_data(g).0);
    }
    args.gens
        .iter()
        .map(|s| {
            let (head, word) = s.split_once('=').ok_or_else(|| {
                Failure(format!(
                    "generator '{s}' must look like NAME=WORD or NAME@HEIGHT=WORD"
                ))
            })?;
            let word = parse_pw(word, g)?;
            match head.split_once('@') {
                Some((name, h)) => {
                    let h: i64 = h
                        .trim()
                        .parse()
                        .map_err(|_| Failure(format!("invalid height '{h}' in '{s}'")))?;
                    Ok(DtcGenerator::with_height(name.trim(), word, h)?)
                }
                None => Ok(DtcGenerator::new(head.trim(), word)),
            }
        })
        .collect()
}

fn load_rels(
    rels: &[String],
    gens: &[DtcGenerator],
    g: &FiniteGroupTable,
) -> Result<Vec<DtcWord>, Failure> {
    if rels.is_empty() {
        return Ok(crate::dtc::presentation_relations(g.presentation()));
    }
    let ids = generator_ids(gens);
    rels.iter().map(|r| Ok(DtcWord::parse(r, &ids)?)).collect()
}

fn group_cmd(op: &GroupOp) -> Result<Output, Failure> {
    match op {
        GroupOp::Enumerate(input) => {
            let g = load_group(input)?;
            let names = g.element_names();
            let table: Vec<Vec<usize>> = (0..g.order())
                .map(|a| (0..g.order()).map(|b| g.mul(a, b)).collect())
                .collect();
            let mut text = format!("order {}\n", g.order());
            for (i, n) in names.iter().enumerate() {
                let _ = writeln!(text, "{i}: {n}");
            }
            out(
                text.trim_end(),
                json!({"order": g.order(), "elements": names, "multiplication": table}),
            )
        }
        GroupOp::Abelianize(input) => {
            let ab = abelianization(&load_presentation(input)?);
            out(
                ab.to_string(),
                serde_json::to_value(&ab).expect("serializable"),
            )
        }
        GroupOp::IsCyclic(input) => {
            let c = is_cyclic(&*load_group(input)?);
            out(c.to_string(), json!({"cyclic": c}))
        }
        GroupOp::DimHom(input) => {
            let d = dim_hom_r(&load_presentation(input)?);
            out(d.to_string(), json!({"dim_hom_r": d}))
        }
        GroupOp::MinGens { input, cap } => {
            let m = min_generators(&*load_group(input)?, *cap)?;
            if m > *cap {
                out(
                    format!("> {cap}"),
                    json!({"min_generators": null, "cap": cap}),
                )
            } else {
                out(m.to_string(), json!({"min_generators": m, "cap": cap}))
            }
        }
    }
}

fn word_out(w: ProductWord) -> Result<Output, Failure> {
    out(w.to_string(), word_json(&w))
}

fn word_cmd(op: &WordOp) -> Result<Output, Failure> {
    match op {
        WordOp::Reduce { input, word } => word_out(parse_pw(word, &load_group(input)?)?),
        WordOp::Mul { input, left, right } => {
            let g = load_group(input)?;
            word_out(parse_pw(left, &g)?.mul(&parse_pw(right, &g)?)?)
        }
        WordOp::Inv { input, word } => word_out(parse_pw(word, &load_group(input)?)?.inv()),
        WordOp::Shift { input, by, word } => {
            word_out(parse_pw(word, &load_group(input)?)?.shift(*by))
        }
        WordOp::Zip { input, at, word } => word_out(parse_pw(word, &load_group(input)?)?.zip(*at)),
        WordOp::Power { input, n, word } => {
            word_out(parse_pw(word, &load_group(input)?)?.power(*n))
        }
        WordOp::Height { input, word } => {
            let h = parse_pw(word, &load_group(input)?)?.height();
            out(
                h.map_or_else(|| "none".to_string(), |h| h.to_string()),
                json!({"height": h}),
            )
        }
        WordOp::CyclicReduce { input, word } => {
            let (w, core) = parse_pw(word, &load_group(input)?)?.cyclic_reduce();
            out(
                format!("conjugator {w}\ncore {core}"),
                json!({"conjugator": word_json(&w), "core": word_json(&core)}),
            )
        }
    }
}

fn dtc_cmd(op: &DtcOp) -> Result<Output, Failure> {
    match op {
        DtcOp::Eval {
            input,
            gens,
            at,
            word,
        } => {
            let g = load_group(input)?;
            let gens = load_gens(gens, &g)?;
            let w = DtcWord::parse(word, &generator_ids(&gens))?;
            let v = eval_dtc_word(&w, &gens, *at)?;
            out(v.to_string(), word_json(&v))
        }
        DtcOp::SpanMember {
            input,
            gens,
            at,
            window,
            max_len,
            target,
        } => {
            let g = load_group(input)?;
            let gens = load_gens(gens, &g)?;
            let target = parse_pw(target, &g)?;
            let ids = generator_ids(&gens);
            match span_member_bounded(&target, &gens, *at, *window, *max_len)? {
                SpanResult::Member(w) => {
                    let shown = w.display(&ids).to_string();
                    out(
                        format!("member {shown}"),
                        json!({"member": true, "witness": shown}),
                    )
                }
                SpanResult::Unknown { exhausted } => {
                    let text = if exhausted {
                        "not a member: the generated subgroup was exhausted"
                    } else {
                        "unknown within bounds"
                    };
                    out(text, json!({"member": null, "exhausted": exhausted}))
                }
            }
        }
        DtcOp::MuBounds { input, cap } => {
            let b = mu_dtc_bounds(&*load_group(input)?, *cap)?;
            out(
                b.to_string(),
                serde_json::to_value(&b).expect("serializable"),
            )
        }
        DtcOp::RhoBounds(input) => {
            let p = load_presentation(input)?;
            let g = match todd_coxeter(&p, input.max_cosets) {
                Ok(g) => Some(g),
                Err(FpError::CosetLimitExceeded { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let b = rho_dtc_bounds(&p, g.as_ref())?;
            out(
                b.to_string(),
                serde_json::to_value(&b).expect("serializable"),
            )
        }
        DtcOp::RhoMatrix { input, gens, rels } => {
            let g = load_group(input)?;
            let gens = load_gens(gens, &g)?;
            let rels = load_rels(rels, &gens, &g)?;
            let m = build_rho_matrix(&gens, &rels)?;
            let rank = rank_over_laurent_field(&m);
            let entries: Vec<Vec<String>> = (0..m.rows())
                .map(|i| m.row(i).iter().map(ToString::to_string).collect())
                .collect();
            out(
                format!("{m}\nrank {rank}"),
                json!({"matrix": entries, "rank": rank}),
            )
        }
        DtcOp::LDim { input, gens, rels } => {
            let g = load_group(input)?;
            let gens = load_gens(gens, &g)?;
            let rels = load_rels(rels, &gens, &g)?;
            let d = l_lambda_dim(&gens, &rels)?;
            out(d.to_string(), json!({"l_lambda_dim": d}))
        }
        DtcOp::RefuteSingle {
            input,
            window,
            max_len,
        } => {
            let g = load_group(input)?;
            let r = single_generator_refutation_search(&g, *window, *max_len)?;
            let survivors: Vec<String> = r.survivors.iter().map(ToString::to_string).collect();
            let text = if survivors.is_empty() {
                format!(
                    "no single generator among {} candidates (window {window}, length <= {max_len})",
                    r.candidates_examined
                )
            } else {
                format!(
                    "{} of {} candidates reach every level-0 letter: {}",
                    survivors.len(),
                    r.candidates_examined,
                    survivors.join(" ")
                )
            };
            out(
                text,
                json!({"candidates": r.candidates_examined, "survivors": survivors, "refuted": r.survivors.is_empty()}),
            )
        }
    }
}

fn series_json(s: &LaurentSeries) -> Value {
    json!({"series": s.to_string(), "truncation": s.truncation(), "valuation": s.valuation(), "ring": s.ring().to_string()})
}

fn laurent_cmd(op: &LaurentOp) -> Result<Output, Failure> {
    let r = match op {
        LaurentOp::Mul { ring, left, right } => {
            let a = LaurentSeries::parse(left, ring.ring, ring.trunc)?;
            let b = LaurentSeries::parse(right, ring.ring, ring.trunc)?;
            a.mul(&b)?
        }
        LaurentOp::Invert { ring, series } => {
            LaurentSeries::parse(series, ring.ring, ring.trunc)?.invert()?
        }
        LaurentOp::Truncate { ring, to, series } => {
            LaurentSeries::parse(series, ring.ring, ring.trunc)?.truncate(*to)?
        }
    };
    out(
        format!("{r} + O(t^{})", r.truncation() + 1),
        series_json(&r),
    )
}

fn novikov_cmd(op: &NovikovOp) -> Result<Output, Failure> {
    match op {
        NovikovOp::Homology { complex, degree } => {
            let c = ChainComplex::from_json(&read(complex)?)?;
            let degrees: Vec<usize> = match degree {
                Some(d) => vec![*d],
                None => (0..=c.top()).collect(),
            };
            let mut text = Vec::new();
            let mut records = Vec::new();
            for d in degrees {
                let h = homology(&c, d)?;
                text.push(format!("H_{d} = {h}"));
                records.push(json!({"degree": d, "rank": h.rank, "torsion": h.torsion}));
            }
            out(text.join("\n"), json!({ "homology": records }))
        }
        NovikovOp::HnSum {
            complex,
            degree,
            dim,
        } => {
            let c = ChainComplex::from_json(&read(complex)?)?;
            let m = hn_connected_sum(&c, *degree, *dim)?;
            out(
                format!("HN_{degree} = {m}"),
                json!({"degree": degree, "module": m.to_string(), "free_rank": m.free_rank, "torsion": m.torsion}),
            )
        }
        NovikovOp::Laurent { op } => laurent_cmd(op),
    }
}

fn hurewicz_cmd(op: &HurewiczOp) -> Result<Output, Failure> {
    match op {
        HurewiczOp::Map {
            input,
            window,
            word,
        } => {
            let g = load_group(input)?;
            let ab = Abelianizer::new(g.presentation());
            let x = parse_pw(word, &g)?;
            let family = hurewicz_map_word(&x, &ab, *window)?;
            let text: Vec<String> = window
                .levels()
                .zip(&family)
                .map(|(k, v)| {
                    let v: Vec<String> = v.iter().map(i64::to_string).collect();
                    format!("level {k}: [{}]", v.join(", "))
                })
                .collect();
            out(
                text.join("\n"),
                json!({"window": window.to_string(), "moduli": ab.moduli(), "levels": family}),
            )
        }
        HurewiczOp::ProAbelianize { input, window } => {
            let g = load_group(input)?;
            let sys = pro_abelianize(&g, *window);
            let groups: Vec<_> = (0..sys.groups.len()).map(|j| sys.group(j)).collect();
            let text: Vec<String> = sys
                .levels()
                .zip(&groups)
                .map(|(h, a)| format!("level {h}: {a}"))
                .collect();
            out(
                text.join("\n"),
                json!({"window": window.to_string(), "groups": groups, "system": sys}),
            )
        }
        HurewiczOp::MlCheck {
            file,
            system,
            max_cosets,
            window,
            k,
        } => {
            let sys = match (file, system) {
                (_, Some(path)) => {
                    let raw: AbelianSystemWindow = serde_json::from_str(&read(path)?)?;
                    AbelianSystemWindow::new(raw.lo, raw.groups, raw.maps)?
                }
                (Some(file), None) => {
                    let g = load_group(&GroupInput {
                        file: file.clone(),
                        max_cosets: *max_cosets,
                    })?;
                    pro_abelianize(&g, *window)
                }
                (None, None) => return Err(Failure("ml-check needs -f or --system".into())),
            };
            let r = ml_check(&sys, *k)?;
            out(
                r.to_string(),
                serde_json::to_value(&r).expect("serializable"),
            )
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Group { op } => group_cmd(op),
        Command::Word { op } => word_cmd(op),
        Command::Dtc { op } => dtc_cmd(op),
        Command::Novikov { op } => novikov_cmd(op),
        Command::Hurewicz { op } => hurewicz_cmd(op),
        Command::Report { case } => {
            let r = build_report(match case {
                ReportCase::Poincare => Case::Poincare,
                ReportCase::Rp4 => Case::Rp4,
            });
            out(
                r.to_string().trim_end(),
                serde_json::to_value(&r).expect("serializable"),
            )
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = if cli.json {
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&o.json).expect("serializable")
                )
            } else {
                writeln!(stdout, "{}", o.text)
            };
            0
        }
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}
