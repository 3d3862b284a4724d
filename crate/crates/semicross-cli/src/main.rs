//! Command-line front end: element arithmetic, Green partitions,
//! cross-section construction/verification/enumeration/counting, and
//! Cayley-table I/O.
//!
//! Exit codes: 0 on success, 1 on mathematical verification failure,
//! 2 on usage errors. `SEMICROSS_MAX_SIZE` overrides the element limit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use semicross::cross_section::{
    build_isn_r_cross_section, build_wreath_r_cross_section, invert_cross_section,
    is_cross_section, CrossSection, OrderedPartition,
};
use semicross::green::{green_classes, GreenRelation};
use semicross::isn::PartialBijection;
use semicross::notation::{format_decomposition, format_element, parse_element};
use semicross::search::{
    brute_force_cross_sections, wreath_count_report, SearchConfig, SearchError,
};
use semicross::semigroup::{CayleyTable, ElementId, FiniteInverseSemigroup, DEFAULT_MAX_ELEMENTS};
use semicross::wreath::{build_wreath, iterated_wreath_limited};

const DEFAULT_SEED: u64 = 0x5eed;
/// Above this size, associativity in `paut verify-iso` is sampled.
const EXHAUSTIVE_VERIFY_LIMIT: usize = 200;

#[derive(Parser)]
#[command(
    name = "semicross",
    about = "Exact workbench for finite inverse semigroups: IS_n arithmetic, partial wreath products, Green's relations, cross-sections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    R,
    L,
}

impl From<RelationArg> for GreenRelation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::R => GreenRelation::R,
            RelationArg::L => GreenRelation::L,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply elements left to right and print the canonical form
    Multiply {
        /// Ambient rank n
        #[arg(long)]
        n: u8,
        /// Ambient semigroup: isn or wreath (wreath = IS_n ≀ IS_n)
        #[arg(long, default_value = "isn")]
        semigroup: String,
        /// Elements in notation ("(1 2)[3]", "e", "0"; wreath: "(1:e; [1 2])")
        #[arg(required = true, num_args = 1..)]
        elements: Vec<String>,
    },
    /// Print the chain decomposition of an element
    Decompose {
        #[arg(long)]
        n: u8,
        element: String,
    },
    /// Dump the Green class partition
    Green {
        #[arg(long)]
        semigroup: String,
        #[arg(long, default_value_t = 2)]
        n: u8,
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, enumerate, count, or verify cross-sections
    #[command(name = "cross-sections")]
    CrossSections {
        #[command(subcommand)]
        action: CrossSectionCmd,
    },
    /// Iterated partial wreath powers of IS_n (partial tree automorphisms)
    Paut {
        #[arg(long)]
        n: u8,
        #[arg(long)]
        k: u32,
        #[command(subcommand)]
        action: PautCmd,
    },
    /// Cayley table import/export
    Cayley {
        #[command(subcommand)]
        action: CayleyCmd,
    },
}

#[derive(Args)]
struct SectionTarget {
    /// Ambient semigroup: isn, wreath (IS_n ≀ IS_n), or cayley:<path>
    #[arg(long)]
    semigroup: String,
    /// Rank n (ignored for cayley)
    #[arg(long, default_value_t = 2)]
    n: u8,
    #[arg(long, value_enum, default_value = "r")]
    relation: RelationArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CrossSectionCmd {
    /// Build the chain-generator construction for an ordered partition
    Build {
        #[command(flatten)]
        target: SectionTarget,
        /// Ordered partition, e.g. "2<1|3"
        #[arg(long)]
        partition: String,
        /// Inner sections for wreath builds: one partition spec per block,
        /// comma-separated, e.g. "1<2,2<1"
        #[arg(long)]
        inner: Option<String>,
    },
    /// Enumerate all cross-sections by exhaustive search
    Enumerate {
        #[command(flatten)]
        target: SectionTarget,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Timeout in seconds
        #[arg(long, default_value_t = 600)]
        timeout: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compare the brute-force count against the closed forms
    Count {
        #[command(flatten)]
        target: SectionTarget,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 600)]
        timeout: u64,
    },
    /// Verify a cross-section JSON dump
    Verify {
        #[command(flatten)]
        target: SectionTarget,
        /// Path to the cross-section JSON ({relation, ambient, members})
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum PautCmd {
    /// Print element and idempotent counts
    Info {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the inverse-semigroup axiom suite
    VerifyIso {
        /// Associativity sample count for large semigroups
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CayleyCmd {
    /// Write the Cayley table of a built-in semigroup as JSON
    Export {
        #[arg(long)]
        semigroup: String,
        #[arg(long, default_value_t = 2)]
        n: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a Cayley table file and print a summary
    Import {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

/// 0 = success, 1 = verification failure, 2 = usage error.
enum Failure {
    Verification(String),
    Usage(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Failure {
        Failure::Usage(e.to_string())
    }
    fn verification(e: impl std::fmt::Display) -> Failure {
        Failure::Verification(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(0),
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn element_limit() -> usize {
    match std::env::var("SEMICROSS_MAX_SIZE") {
        Ok(v) => v.parse().unwrap_or(DEFAULT_MAX_ELEMENTS),
        Err(_) => DEFAULT_MAX_ELEMENTS,
    }
}

fn load_semigroup(kind: &str, n: u8) -> Result<FiniteInverseSemigroup, Failure> {
    let limit = element_limit();
    match kind {
        "isn" => FiniteInverseSemigroup::from_isn_limited(n, limit).map_err(Failure::usage),
        "wreath" => {
            let inner =
                FiniteInverseSemigroup::from_isn_limited(n, limit).map_err(Failure::usage)?;
            build_wreath(&inner, n, limit).map_err(Failure::usage)
        }
        other => {
            if let Some(path) = other.strip_prefix("cayley:") {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?;
                let table: CayleyTable = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("bad table JSON: {e}")))?;
                FiniteInverseSemigroup::from_cayley_table(&table).map_err(Failure::usage)
            } else {
                Err(Failure::Usage(format!(
                    "unknown semigroup {other:?}: expected isn, wreath, or cayley:<path>"
                )))
            }
        }
    }
}

fn parse_member(s: &FiniteInverseSemigroup, text: &str) -> Result<ElementId, Failure> {
    if let Some((n, _)) = s.isn_parts() {
        let e = parse_element(text, n).map_err(Failure::usage)?;
        return s
            .isn_id_of(&e)
            .ok_or_else(|| Failure::Usage(format!("{text:?} is not an element")));
    }
    if let Some((ctx, _)) = s.wreath_parts() {
        let e = ctx.parse_element(text).map_err(Failure::usage)?;
        return s
            .wreath_id_of(&e)
            .ok_or_else(|| Failure::Usage(format!("{text:?} is not an element")));
    }
    // Table-backed: match on labels.
    for i in 0..s.size() as ElementId {
        if s.element_text(i) == text {
            return Ok(i);
        }
    }
    Err(Failure::Usage(format!("no element labelled {text:?}")))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn describe_witness(
    s: &FiniteInverseSemigroup,
    w: &semicross::cross_section::CrossSectionViolation,
) -> String {
    use semicross::cross_section::CrossSectionViolation as V;
    let t = |x: ElementId| s.element_text(x);
    match w {
        V::NotInSemigroup { element } => format!("element id {element} is out of range"),
        V::DuplicateMember { element } => format!("member {} listed twice", t(*element)),
        V::NotClosed { a, b, product } => format!(
            "not closed: {}·{} = {} is not a member",
            t(*a),
            t(*b),
            t(*product)
        ),
        V::ClassMissed { representative } => {
            format!("class of idempotent {} has no member", t(*representative))
        }
        V::ClassDoubled {
            representative,
            first,
            second,
        } => format!(
            "class of idempotent {} holds both {} and {}",
            t(*representative),
            t(*first),
            t(*second)
        ),
    }
}

fn search_config(jobs: usize, timeout: u64) -> SearchConfig {
    SearchConfig {
        parallel_branching: jobs > 1,
        timeout: Duration::from_secs(timeout),
        ..SearchConfig::default()
    }
}

fn init_jobs(jobs: usize) {
    if jobs > 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Multiply {
            n,
            semigroup,
            elements,
        } => {
            match semigroup.as_str() {
                "isn" => {
                    let mut acc = PartialBijection::identity(n);
                    for text in &elements {
                        let e = parse_element(text, n).map_err(Failure::usage)?;
                        acc = acc.compose(&e).map_err(Failure::usage)?;
                    }
                    println!("{}", format_element(&acc));
                }
                "wreath" => {
                    let s = load_semigroup("wreath", n)?;
                    let mut ids: Vec<ElementId> = Vec::new();
                    for text in &elements {
                        ids.push(parse_member(&s, text)?);
                    }
                    let mut acc = ids[0];
                    for &x in &ids[1..] {
                        acc = s.product(acc, x);
                    }
                    println!("{}", s.element_text(acc));
                }
                other => {
                    return Err(Failure::Usage(format!(
                        "multiply supports isn and wreath, got {other:?}"
                    )))
                }
            }
            Ok(())
        }

        Command::Decompose { n, element } => {
            let e = parse_element(&element, n).map_err(Failure::usage)?;
            println!("{}", format_decomposition(&e.chain_decomposition()));
            Ok(())
        }

        Command::Green {
            semigroup,
            n,
            relation,
            format,
            out,
        } => {
            let s = load_semigroup(&semigroup, n)?;
            let relation = GreenRelation::from(relation);
            let g = green_classes(&s, relation);
            let classes: Vec<Vec<String>> = g
                .classes
                .iter()
                .map(|c| c.iter().map(|&x| s.element_text(x)).collect())
                .collect();
            let content = match format {
                Format::Json => serde_json::to_string_pretty(&json!({
                    "relation": relation.as_str(),
                    "classes": classes,
                }))
                .expect("serializable"),
                Format::Text => {
                    let mut lines = vec![format!(
                        "{} classes of {} under {}",
                        classes.len(),
                        s.describe(),
                        relation
                    )];
                    for c in &classes {
                        lines.push(format!("  {{{}}}", c.join(", ")));
                    }
                    lines.join("\n")
                }
                Format::Tsv => classes
                    .iter()
                    .map(|c| c.join("\t"))
                    .collect::<Vec<_>>()
                    .join("\n"),
            };
            emit(&out, &content)
        }

        Command::CrossSections { action } => cross_sections(action),

        Command::Paut { n, k, action } => {
            let s = iterated_wreath_limited(n, k, element_limit()).map_err(Failure::usage)?;
            match action {
                PautCmd::Info { format } => {
                    let elements = s.size();
                    let idempotents = s.idempotents().len();
                    match format {
                        Format::Json => println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "n": n,
                                "k": k,
                                "elements": elements,
                                "idempotents": idempotents,
                            }))
                            .expect("serializable")
                        ),
                        _ => {
                            println!("elements: {elements}");
                            println!("idempotents: {idempotents}");
                        }
                    }
                    Ok(())
                }
                PautCmd::VerifyIso { samples, seed } => {
                    let assoc = if s.size() <= EXHAUSTIVE_VERIFY_LIMIT {
                        None
                    } else {
                        Some(samples)
                    };
                    s.verify_inverse_semigroup(assoc, seed)
                        .map_err(Failure::verification)?;
                    println!("ok: inverse-semigroup axioms hold for {}", s.describe());
                    Ok(())
                }
            }
        }

        Command::Cayley { action } => match action {
            CayleyCmd::Export { semigroup, n, out } => {
                let s = load_semigroup(&semigroup, n)?;
                let table = s.export_cayley_table();
                emit(
                    &out,
                    &serde_json::to_string_pretty(&table).expect("serializable"),
                )
            }
            CayleyCmd::Import { input } => {
                let text = fs::read_to_string(&input)
                    .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
                let table: CayleyTable = serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("bad table JSON: {e}")))?;
                let s = FiniteInverseSemigroup::from_cayley_table(&table)
                    .map_err(Failure::verification)?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "size": s.size(),
                        "idempotents": s.idempotents().len(),
                        "unit": s.unit().map(|u| s.element_text(u)),
                        "zero": s.zero().map(|z| s.element_text(z)),
                    }))
                    .expect("serializable")
                );
                Ok(())
            }
        },
    }
}

fn cross_sections(action: CrossSectionCmd) -> Result<(), Failure> {
    match action {
        CrossSectionCmd::Build {
            target,
            partition,
            inner,
        } => {
            let s = load_semigroup(&target.semigroup, target.n)?;
            let relation = GreenRelation::from(target.relation);
            let section = if s.isn_parts().is_some() {
                let p = OrderedPartition::parse(&partition, target.n).map_err(Failure::usage)?;
                build_isn_r_cross_section(&s, &p).map_err(Failure::verification)?
            } else if let Some((ctx, _)) = s.wreath_parts() {
                let p =
                    OrderedPartition::parse(&partition, ctx.base_size()).map_err(Failure::usage)?;
                let inner_spec = inner.ok_or_else(|| {
                    Failure::Usage(
                        "wreath builds need --inner with one partition per block".to_string(),
                    )
                })?;
                let inner_semigroup = ctx.inner().clone();
                let (inner_n, _) = inner_semigroup
                    .isn_parts()
                    .ok_or_else(|| Failure::Usage("inner semigroup is not IS_n".to_string()))?;
                let sections: Vec<CrossSection> = inner_spec
                    .split(',')
                    .map(|spec| {
                        let ip = OrderedPartition::parse(spec.trim(), inner_n)
                            .map_err(Failure::usage)?;
                        build_isn_r_cross_section(&inner_semigroup, &ip)
                            .map_err(Failure::verification)
                    })
                    .collect::<Result<_, _>>()?;
                build_wreath_r_cross_section(&s, &p, &sections).map_err(Failure::verification)?
            } else {
                return Err(Failure::Usage(
                    "build requires an isn or wreath semigroup".to_string(),
                ));
            };
            let section = match relation {
                GreenRelation::R => section,
                GreenRelation::L => {
                    invert_cross_section(&section).map_err(Failure::verification)?
                }
            };
            emit(
                &target.out,
                &serde_json::to_string_pretty(&section.to_json()).expect("serializable"),
            )
        }

        CrossSectionCmd::Enumerate {
            target,
            jobs,
            timeout,
            format,
        } => {
            init_jobs(jobs);
            let s = load_semigroup(&target.semigroup, target.n)?;
            let relation = GreenRelation::from(target.relation);
            let cfg = search_config(jobs, timeout);
            let sections = match brute_force_cross_sections(&s, relation, &cfg) {
                Ok(sections) => sections,
                Err(SearchError::Timeout { elapsed, found }) => {
                    return Err(Failure::Verification(format!(
                        "search timed out after {elapsed:?}; {} cross-sections found so far (non-exhaustive)",
                        found.len()
                    )))
                }
                Err(e) => return Err(Failure::usage(e)),
            };
            let content = match format {
                Format::Json => serde_json::to_string_pretty(&json!({
                    "relation": relation.as_str(),
                    "ambient": s.describe(),
                    "count": sections.len(),
                    "sections": sections
                        .iter()
                        .map(|c| c.members().iter().map(|&m| s.element_text(m)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }))
                .expect("serializable"),
                Format::Tsv => sections
                    .iter()
                    .map(|c| {
                        c.members()
                            .iter()
                            .map(|&m| s.element_text(m))
                            .collect::<Vec<_>>()
                            .join("\t")
                    })
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Text => {
                    let mut lines = vec![format!(
                        "{} {}-cross-sections of {}",
                        sections.len(),
                        relation,
                        s.describe()
                    )];
                    for c in &sections {
                        let texts: Vec<String> =
                            c.members().iter().map(|&m| s.element_text(m)).collect();
                        lines.push(format!("  {{{}}}", texts.join(", ")));
                    }
                    lines.join("\n")
                }
            };
            emit(&target.out, &content)
        }

        CrossSectionCmd::Count {
            target,
            jobs,
            timeout,
        } => {
            init_jobs(jobs);
            if target.semigroup != "wreath" {
                return Err(Failure::Usage(
                    "count compares the closed forms for IS_n ≀ IS_n; use --semigroup wreath"
                        .to_string(),
                ));
            }
            let relation = GreenRelation::from(target.relation);
            let cfg = search_config(jobs, timeout);
            let report = wreath_count_report(target.n, relation, &cfg).map_err(|e| match e {
                SearchError::Timeout { elapsed, found } => Failure::Verification(format!(
                    "search timed out after {elapsed:?}; {} cross-sections found so far (non-exhaustive)",
                    found.len()
                )),
                other => Failure::usage(other),
            })?;
            emit(
                &target.out,
                &serde_json::to_string_pretty(&report).expect("serializable"),
            )
        }

        CrossSectionCmd::Verify { target, input } => {
            let s = load_semigroup(&target.semigroup, target.n)?;
            let relation = GreenRelation::from(target.relation);
            let text = fs::read_to_string(&input)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
            let dump: Value = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("bad JSON: {e}")))?;
            let member_texts = dump["members"]
                .as_array()
                .ok_or_else(|| Failure::Usage("missing members array".to_string()))?;
            let mut members = Vec::new();
            for mt in member_texts {
                let mt = mt
                    .as_str()
                    .ok_or_else(|| Failure::Usage("members must be strings".to_string()))?;
                members.push(parse_member(&s, mt)?);
            }
            match is_cross_section(&s, relation, &members) {
                Ok(()) => {
                    emit(
                        &target.out,
                        &serde_json::to_string_pretty(&json!({"ok": true}))
                            .expect("serializable"),
                    )?;
                    Ok(())
                }
                Err(witness) => {
                    let msg = describe_witness(&s, &witness);
                    emit(
                        &target.out,
                        &serde_json::to_string_pretty(&json!({
                            "ok": false,
                            "witness": msg,
                        }))
                        .expect("serializable"),
                    )?;
                    Err(Failure::Verification(msg))
                }
            }
        }
    }
}
