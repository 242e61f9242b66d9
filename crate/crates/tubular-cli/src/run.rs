//! Command dispatch: builds the engine from the geometry header, parses
//! the object arguments, runs the requested computation and renders
//! either text with citations or a machine document.

use crate::machine::{self, Document, GeometryDoc, SequenceDoc, VerdictsDoc};
use crate::parse::{self, ParseError};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use tubular::geometry::GeometryError;
use tubular::homext::{ClassifyReport, Engine, FormalObject, HomExtError, IndecDescriptor};
use tubular::ktheory::KTheoryError;
use tubular::scalar::Scalar;
use tubular::sequences::SequenceError;

use tubular::tube;
use tubular::Geometry;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    KTheory(#[from] KTheoryError),
    #[error("{0}")]
    Sequence(#[from] SequenceError),
    #[error("{0}")]
    HomExt(#[from] HomExtError),
    #[error("no geometry: pass --geometry \"weights=(…); ordinary=…\" or --config <file>")]
    MissingGeometry,
    #[error("cannot read config file: {0}")]
    Config(String),
    #[error("no lattice class available for `{0}` (only line bundles and slope-inf tube objects carry classes)")]
    ClassUnavailable(String),
    #[error("expected a single indecomposable coherent object, got `{0}`")]
    NotOneCoherent(String),
    #[error("selftest failed")]
    SelftestFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Parser, Debug)]
#[command(
    name = "tubular",
    about = "Calculator for sheaf categories over a genus-one weighted projective line",
    version
)]
pub struct Cli {
    /// Geometry header, e.g. "weights=(2,2,2,2); ordinary=a,b"
    #[arg(long, global = true)]
    pub geometry: Option<String>,

    /// File containing the geometry header
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Exit with status 2 when every verdict of the answer is unknown
    #[arg(long, global = true)]
    pub strict: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hom and Ext1 between two formal objects
    Homext { a: String, b: String },
    /// Lattice class, rank/degree/slope and status tags of an object
    Class { a: String },
    /// Euler form of two classed objects
    Euler { a: String, b: String },
    /// Verify the lattice identities for the configured geometry
    Rrcheck,
    /// Perpendicularity of a coherent object to the slope-q limits
    Perp { q: String, e: String },
    /// Left approximation into the slope-q divisible class
    ApproxLeft { q: String, f: String },
    /// Right approximation from the slope-q divisible class (finite q)
    ApproxRight { q: String, f: String },
    /// Budget-one left approximation at slope infinity
    ConstructGeneric { f: String },
    /// Classify a q-torsion-free divisible object
    Decompose { q: String, x: String },
    /// Split along the torsion pair at q
    Split {
        q: String,
        x: String,
        /// Use the weak pair (slopes >= q on the torsion side)
        #[arg(long)]
        weak: bool,
    },
    /// Run the brute-force conformance and lattice identity suites
    Selftest {
        #[arg(long, default_value_t = 5)]
        max_rank: usize,
        #[arg(long, default_value_t = 8)]
        max_len: u32,
    },
}

pub struct Outcome {
    pub text: String,
    pub unknown_only: bool,
}

fn load_geometry(cli: &Cli) -> Result<Geometry, CliError> {
    let header = if let Some(h) = &cli.geometry {
        h.clone()
    } else if let Some(path) = &cli.config {
        std::fs::read_to_string(path).map_err(|e| CliError::Config(e.to_string()))?
    } else {
        return Err(CliError::MissingGeometry);
    };
    Ok(parse::parse_geometry(header.trim())?)
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Selftest { max_rank, max_len } => selftest(cli, *max_rank, *max_len),
        _ => {
            let geo = load_geometry(cli)?;
            let engine = Engine::new(&geo)?;
            with_engine(cli, &engine)
        }
    }
}

fn single_coherent(f: &FormalObject) -> Result<IndecDescriptor, CliError> {
    match f.summands() {
        [(d, 1)] if d.is_coherent() => Ok(d.clone()),
        _ => Err(CliError::NotOneCoherent(f.to_string())),
    }
}

fn with_engine(cli: &Cli, engine: &Engine) -> Result<Outcome, CliError> {
    let geo = engine.geometry();
    let mut doc = Document::new(command_name(&cli.command));
    doc.geometry = Some(GeometryDoc::from(geo));
    let mut unknown_only = false;
    let mut text = String::new();
    use std::fmt::Write;

    match &cli.command {
        Command::Homext { a, b } => {
            let fa = parse::parse_formal(a, geo)?;
            let fb = parse::parse_formal(b, geo)?;
            let rep = engine.hom_ext(&fa, &fb);
            unknown_only = rep.hom.is_unknown() && rep.ext1.is_unknown();
            doc.inputs = vec![fa.to_string(), fb.to_string()];
            doc.citations = rep.citations.iter().map(|s| s.to_string()).collect();
            doc.verdicts = Some(VerdictsDoc::from(&rep));
            writeln!(text, "Hom({fa}, {fb}) = {}", rep.hom).unwrap();
            if let Some(e) = rep.hom_endolength {
                writeln!(text, "  endolength over the generic endomorphism ring: {e}").unwrap();
            }
            writeln!(text, "Ext1({fa}, {fb}) = {}", rep.ext1).unwrap();
            if let Some(e) = rep.ext1_endolength {
                writeln!(text, "  endolength over the generic endomorphism ring: {e}").unwrap();
            }
            write_citations(&mut text, &rep.citations);
        }
        Command::Class { a } => {
            let fa = parse::parse_formal(a, geo)?;
            doc.inputs = vec![fa.to_string()];
            writeln!(text, "object: {fa}").unwrap();
            let mut result = serde_json::Map::new();
            if let Some(class) = engine.formal_class(&fa) {
                let table = engine.table();
                let rk = table.rank(&class).as_i64();
                let deg = table.degree(&class).as_i64();
                writeln!(text, "class coordinates: {:?}", class.coords()).unwrap();
                writeln!(text, "rank = {rk}, degree = {deg}").unwrap();
                result.insert(
                    "class".into(),
                    serde_json::json!(class.coords().to_vec()),
                );
                result.insert("rank".into(), serde_json::json!(rk));
                result.insert("degree".into(), serde_json::json!(deg));
                match table.slope(&class) {
                    Ok(s) => {
                        writeln!(text, "slope = {s}").unwrap();
                        result.insert("slope".into(), serde_json::json!(s.to_string()));
                    }
                    Err(e) => {
                        writeln!(text, "slope undefined: {e}").unwrap();
                        result.insert("slope".into(), serde_json::Value::Null);
                    }
                }
            } else if let Some((rk, deg)) = engine.formal_rank_degree(&fa) {
                writeln!(text, "rank = {rk}, degree = {deg} (no lattice class at finite slope)")
                    .unwrap();
                result.insert("rank".into(), serde_json::json!(rk));
                result.insert("degree".into(), serde_json::json!(deg));
            } else {
                writeln!(text, "no lattice class; status tags only").unwrap();
            }
            let mut tags = Vec::new();
            for (d, _) in fa.summands() {
                let status = engine.pure_injectivity_status(d);
                let indec_note = match d {
                    IndecDescriptor::Pruefer { .. } | IndecDescriptor::Adic { .. } => {
                        " [indecomposable: C3.7]"
                    }
                    IndecDescriptor::Generic { .. } => " [unique per slope]",
                    _ => "",
                };
                writeln!(text, "{d}: {} [{}]{indec_note}", status.label(), status.citation())
                    .unwrap();
                tags.push(serde_json::json!({
                    "summand": d.to_string(),
                    "pure_injectivity": status.label(),
                    "citation": status.citation(),
                }));
            }
            result.insert("tags".into(), serde_json::Value::Array(tags));
            doc.result = Some(serde_json::Value::Object(result));
        }
        Command::Euler { a, b } => {
            let fa = parse::parse_formal(a, geo)?;
            let fb = parse::parse_formal(b, geo)?;
            doc.inputs = vec![fa.to_string(), fb.to_string()];
            let ca = engine
                .formal_class(&fa)
                .ok_or_else(|| CliError::ClassUnavailable(fa.to_string()))?;
            let cb = engine
                .formal_class(&fb)
                .ok_or_else(|| CliError::ClassUnavailable(fb.to_string()))?;
            let value = engine.table().euler(&ca, &cb).as_i64();
            writeln!(text, "<[{fa}], [{fb}]> = {value}").unwrap();
            doc.result = Some(serde_json::json!({ "euler": value }));
        }
        Command::Rrcheck => {
            let table = engine.table();
            let basis = table.basis_classes();
            let mut serre_ok = true;
            let mut rr_ok = true;
            for x in &basis {
                let tx = table.tau_class(x);
                for y in &basis {
                    serre_ok &= table.euler(x, y) == -table.euler(y, &tx);
                    rr_ok &= table.riemann_roch(x, y)
                        == table.rank(x) * table.degree(y) - table.rank(y) * table.degree(x);
                }
            }
            let radical = table.symmetrized_radical_basis().len();
            let pairing = table.euler(table.u(), table.w()).as_i64();
            writeln!(
                text,
                "Serre-duality identity on all {n}×{n} basis pairs: {}",
                pass_word(serre_ok),
                n = basis.len()
            )
            .unwrap();
            writeln!(
                text,
                "Riemann-Roch identity on all basis pairs: {}",
                pass_word(rr_ok)
            )
            .unwrap();
            writeln!(
                text,
                "radical rank = {radical}, <u,w> = {pairing} (p = {})",
                table.p()
            )
            .unwrap();
            doc.result = Some(serde_json::json!({
                "serre": serre_ok,
                "riemann_roch": rr_ok,
                "radical_rank": radical,
                "uw_pairing": pairing,
            }));
            doc.citations = vec!["P2.1".into(), "P2.4iv".into()];
        }
        Command::Perp { q, e } => {
            let slope = parse::parse_slope_arg(q)?;
            let fe = parse::parse_formal(e, geo)?;
            let d = single_coherent(&fe)?;
            doc.inputs = vec![slope.to_string(), d.to_string()];
            let member = engine.perp_slope_membership(&d, slope)?;
            let es = engine.descriptor_slope(&d);
            writeln!(
                text,
                "{d} is{} perpendicular to the slope-{slope} limit objects",
                if member { "" } else { " NOT" }
            )
            .unwrap();
            writeln!(text, "slope of the object: {es} (membership ⇔ slope = q)").unwrap();
            doc.citations = vec!["C3.6".into()];
            doc.result = Some(serde_json::json!({
                "member": member,
                "object_slope": es.to_string(),
            }));
        }
        Command::ApproxLeft { q, f } => {
            let slope = parse::parse_slope_arg(q)?;
            let ff = parse::parse_formal(f, geo)?;
            doc.inputs = vec![slope.to_string(), ff.to_string()];
            let seq = engine.left_approximation(&ff, slope)?;
            render_sequence(&mut text, &mut doc, &seq);
        }
        Command::ApproxRight { q, f } => {
            let slope = parse::parse_slope_arg(q)?;
            let ff = parse::parse_formal(f, geo)?;
            doc.inputs = vec![slope.to_string(), ff.to_string()];
            let seq = engine.right_approximation(&ff, slope)?;
            render_sequence(&mut text, &mut doc, &seq);
        }
        Command::ConstructGeneric { f } => {
            let ff = parse::parse_formal(f, geo)?;
            doc.inputs = vec![ff.to_string()];
            let seq = engine.construct_generic(&ff)?;
            render_sequence(&mut text, &mut doc, &seq);
        }
        Command::Decompose { q, x } => {
            let slope = parse::parse_slope_arg(q)?;
            let fx = parse::parse_formal(x, geo)?;
            doc.inputs = vec![slope.to_string(), fx.to_string()];
            match engine.classify_torsionfree_divisible(&fx, slope) {
                ClassifyReport::GenericSum { multiplicity } => {
                    writeln!(
                        text,
                        "≅ direct sum of {multiplicity} copies of generic({slope}) [T5.2]"
                    )
                    .unwrap();
                    doc.citations = vec!["T5.2".into()];
                    doc.result = Some(serde_json::json!({
                        "shape": "generic-sum",
                        "multiplicity": multiplicity,
                    }));
                }
                ClassifyReport::WqNormalForm {
                    pruefer_part,
                    generic_multiplicity,
                } => {
                    writeln!(
                        text,
                        "normal form tW ⊕ W/tW = ({pruefer_part}) ⊕ {generic_multiplicity}*generic({slope}) [T6.4]"
                    )
                    .unwrap();
                    doc.citations = vec!["T6.4".into()];
                    doc.result = Some(serde_json::json!({
                        "shape": "wq-normal-form",
                        "pruefer_part": pruefer_part.to_string(),
                        "generic_multiplicity": generic_multiplicity,
                    }));
                }
                ClassifyReport::NotInWq {
                    offender,
                    reason,
                    citation,
                } => {
                    writeln!(text, "not in the divisible class at {slope}").unwrap();
                    writeln!(text, "offending summand: {offender} ({reason}) [{citation}]")
                        .unwrap();
                    doc.citations = vec![citation.to_string()];
                    doc.result = Some(serde_json::json!({
                        "shape": "not-in-wq",
                        "offender": offender.to_string(),
                        "reason": reason,
                    }));
                }
            }
        }
        Command::Split { q, x, weak } => {
            let slope = parse::parse_slope_arg(q)?;
            let fx = parse::parse_formal(x, geo)?;
            doc.inputs = vec![slope.to_string(), fx.to_string()];
            let (torsion, free) = engine.torsion_pair_split(&fx, slope, *weak)?;
            let cite = if *weak { "R6.2" } else { "P6.1" };
            writeln!(text, "torsion part: {torsion}").unwrap();
            writeln!(text, "torsion-free part: {free}").unwrap();
            writeln!(text, "[{cite}] split torsion pair at q = {slope}").unwrap();
            doc.citations = vec![cite.into()];
            doc.result = Some(serde_json::json!({
                "torsion": torsion.to_string(),
                "free": free.to_string(),
                "weak": weak,
            }));
        }
        Command::Selftest { .. } => unreachable!("handled in dispatch"),
    }

    let rendered = match cli.format {
        Format::Text => text.trim_end().to_string(),
        Format::Machine => doc.render(),
    };
    Ok(Outcome {
        text: rendered,
        unknown_only,
    })
}

fn render_sequence(text: &mut String, doc: &mut Document, seq: &tubular::sequences::ExactSequence) {
    use std::fmt::Write;
    writeln!(text, "0 → {} → {} → {} → 0   [{}]", seq.sub, seq.mid, seq.quot, seq.kind).unwrap();
    if let tubular::sequences::SeqTerm::PrueferFamily { mult, .. } = &seq.quot {
        writeln!(text, "cokernel multiplicities:").unwrap();
        for (&(arm, socle), m) in &mult.exceptional {
            writeln!(text, "  arm e{arm}, socle {socle}: {m}").unwrap();
        }
        writeln!(text, "  every ordinary point: {}", mult.ordinary_default).unwrap();
        for (label, m) in &mult.ordinary_overrides {
            writeln!(text, "  ordinary {label}: {m}").unwrap();
        }
        doc.multiplicities = Some(machine::MultDoc::from(mult));
    }
    for check in &seq.checks {
        writeln!(
            text,
            "check {}: {} ({})",
            check.name,
            pass_word(check.passed),
            check.detail
        )
        .unwrap();
    }
    if let Some(note) = &seq.note {
        writeln!(text, "note: {note}").unwrap();
    }
    doc.citations = vec![seq.kind.to_string()];
    doc.sequence = Some(SequenceDoc::from(seq));
}

fn write_citations(text: &mut String, citations: &[&'static str]) {
    use std::fmt::Write;
    if citations.is_empty() {
        writeln!(text, "citations: none (unknown cells carry no rule)").unwrap();
        return;
    }
    writeln!(text, "citations:").unwrap();
    for c in citations {
        let statement = tubular::homext::rule_statement(c).unwrap_or("");
        writeln!(text, "  {c}: {statement}").unwrap();
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Homext { .. } => "homext",
        Command::Class { .. } => "class",
        Command::Euler { .. } => "euler",
        Command::Rrcheck => "rrcheck",
        Command::Perp { .. } => "perp",
        Command::ApproxLeft { .. } => "approx-left",
        Command::ApproxRight { .. } => "approx-right",
        Command::ConstructGeneric { .. } => "construct-generic",
        Command::Decompose { .. } => "decompose",
        Command::Split { .. } => "split",
        Command::Selftest { .. } => "selftest",
    }
}

/// Oracle conformance over all tube ranks up to `max_rank` and lengths up
/// to `max_len`, plus the lattice identity suite over all four weight
/// types.
fn selftest(cli: &Cli, max_rank: usize, max_len: u32) -> Result<Outcome, CliError> {
    use std::fmt::Write;
    let mut text = String::new();
    let mut pairs = 0u64;
    let mut mismatches = 0u64;
    for d in 1..=max_rank {
        for s1 in 0..d {
            for s2 in 0..d {
                for l1 in 1..=max_len {
                    for l2 in 1..=max_len {
                        let formula = tube::hom_dim_raw(d, (s1, l1), (s2, l2)) as usize;
                        let brute = tubular::oracle::oracle_hom_dim(
                            &tubular::oracle::rep_of_tube::<tubular::OracleCoeff>(d, s1, l1),
                            &tubular::oracle::rep_of_tube::<tubular::OracleCoeff>(d, s2, l2),
                        );
                        pairs += 1;
                        if formula != brute {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    writeln!(
        text,
        "tube conformance: {pairs} pairs (rank ≤ {max_rank}, length ≤ {max_len}), {mismatches} mismatches"
    )
    .unwrap();

    let mut lattice_ok = true;
    for weights in tubular::geometry::TUBULAR_TYPES {
        let geo = tubular::make_geometry(weights, &[])?;
        let table = tubular::ktheory::build_euler_table::<tubular::Coeff>(&geo)?;
        let basis = table.basis_classes();
        for x in &basis {
            let tx = table.tau_class(x);
            for y in &basis {
                lattice_ok &= table.euler(x, y) == -table.euler(y, &tx);
                lattice_ok &= table.riemann_roch(x, y)
                    == table.rank(x) * table.degree(y) - table.rank(y) * table.degree(x);
            }
        }
        lattice_ok &= table.euler(table.u(), table.w()).as_i64() == table.p();
    }
    writeln!(
        text,
        "lattice identities over all four weight types: {}",
        pass_word(lattice_ok)
    )
    .unwrap();
    let ok = mismatches == 0 && lattice_ok;
    writeln!(text, "selftest: {}", pass_word(ok)).unwrap();

    let rendered = match cli.format {
        Format::Text => text.trim_end().to_string(),
        Format::Machine => {
            let mut doc = Document::new("selftest");
            doc.result = Some(serde_json::json!({
                "pairs_checked": pairs,
                "mismatches": mismatches,
                "lattice_identities": lattice_ok,
                "pass": ok,
            }));
            doc.render()
        }
    };
    if !ok {
        return Err(CliError::SelftestFailed);
    }
    Ok(Outcome {
        text: rendered,
        unknown_only: false,
    })
}
