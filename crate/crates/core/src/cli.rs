//! Command-line front door: reads the JSON and PD formats, runs every
//! operation, and prints JSON (or tables with `--pretty`).
//!
//! Exit codes: 0 on success, 1 on domain errors (the error name is part of
//! the machine-readable contract), 2 on I/O or input-parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::diagram::{parse_pd, DiagramError};
use crate::explore::{standard_system, tb_range_search, ExploreError};
use crate::feasibility::FeasibilityError;
use crate::model::{knot_fixture, FixtureName, LegendrianModel, ModelError};
use crate::product::{
    frontspin, infinite_family_tb, perturb_product, product_tb, ProductError,
};
use crate::rational::Rational;
use crate::sign::Sign;
use crate::triple::{triple_tb, triple_vs_iterated, TripleError};

#[derive(Parser)]
#[command(
    name = "legprod",
    version,
    about = "Exact invariants of Legendrian products from combinatorial chord data"
)]
struct Cli {
    /// Human-readable tables instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structural invariant of a model file
    Validate { model: PathBuf },
    /// Thurston-Bennequin number as the signed chord count
    Tb { model: PathBuf },
    /// Two-factor product tb; --perturb lists the perturbed chords
    Product {
        k: PathBuf,
        l: PathBuf,
        #[arg(long)]
        perturb: bool,
        /// Separate duplicate actions by deterministic offsets
        #[arg(long)]
        strict: bool,
    },
    /// Three-knot product tb; --audit prints both computation routes
    Triple {
        k1: PathBuf,
        k2: PathBuf,
        k3: PathBuf,
        #[arg(long)]
        audit: bool,
    },
    /// Product with a dominating-action unknot one dimension up
    Frontspin { l: PathBuf },
    /// tb family from adding cancelling chord pairs inside a window
    Family {
        k: PathBuf,
        l: PathBuf,
        /// Distinguished chord label of L inside the window
        #[arg(long)]
        e: String,
        #[arg(long)]
        pairs: u32,
        #[arg(long)]
        za: String,
        #[arg(long)]
        zb: String,
        /// Leading sign of each added pair: 1 or -1
        #[arg(long, allow_hyphen_values = true)]
        sign: String,
    },
    /// Parse a PD file; --tb, --faces or --constraints select the output
    Diagram {
        file: PathBuf,
        #[arg(long)]
        tb: bool,
        #[arg(long)]
        faces: bool,
        #[arg(long)]
        constraints: bool,
    },
    /// Randomized tb range search over the knot fixtures
    Explore {
        /// Comma-separated fixture names (or k1,k2,k3 aliases)
        #[arg(long, default_value = "stabilized_unknot,r1_unknot,trefoil")]
        fixtures: String,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a named knot fixture at given actions
    Fixtures {
        name: String,
        /// Comma-separated label=value pairs, e.g. a1=5,a2=5
        #[arg(long)]
        actions: String,
    },
}

pub fn run<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message (including --help/--version)
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(failure) => {
            let payload = json!({"error": failure.name, "message": failure.message});
            let _ = writeln!(out, "{payload}");
            failure.exit_code
        }
    }
}

struct Failure {
    exit_code: i32,
    name: &'static str,
    message: String,
}

impl Failure {
    fn domain(name: &'static str, message: impl ToString) -> Failure {
        Failure {
            exit_code: 1,
            name,
            message: message.to_string(),
        }
    }

    fn input(name: &'static str, message: impl ToString) -> Failure {
        Failure {
            exit_code: 2,
            name,
            message: message.to_string(),
        }
    }
}

fn model_error_name(e: &ModelError) -> &'static str {
    match e {
        ModelError::InvalidModel(_) => "InvalidModel",
        ModelError::UnknownWhitneySign(_) => "UnknownWhitneySign",
        ModelError::BadChordOrder { .. } => "BadChordOrder",
        ModelError::ConstraintViolated(_) => "ConstraintViolated",
        ModelError::MissingAction(_) => "MissingAction",
        ModelError::UnexpectedAction(_) => "UnexpectedAction",
        ModelError::UnknownFixture(_) => "UnknownFixture",
    }
}

fn product_error_name(e: &ProductError) -> &'static str {
    match e {
        ProductError::Model(m) => model_error_name(m),
        ProductError::ActionTie(_) => "ActionTie",
        ProductError::ActionCollision(_) => "ActionCollision",
        ProductError::ParityViolation(..) => "ParityViolation",
        ProductError::WindowViolation(_) => "WindowViolation",
        ProductError::UnknownChordLabel(_) => "UnknownChordLabel",
    }
}

fn triple_error_name(e: &TripleError) -> &'static str {
    match e {
        TripleError::Model(m) => model_error_name(m),
        TripleError::Product(p) => product_error_name(p),
        TripleError::DegenerateTriple(..) => "DegenerateTriple",
        TripleError::NotAKnot(_) => "NotAKnot",
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        Failure::domain(model_error_name(&e), e)
    }
}

impl From<ProductError> for Failure {
    fn from(e: ProductError) -> Failure {
        Failure::domain(product_error_name(&e), e)
    }
}

impl From<TripleError> for Failure {
    fn from(e: TripleError) -> Failure {
        Failure::domain(triple_error_name(&e), e)
    }
}

impl From<DiagramError> for Failure {
    fn from(e: DiagramError) -> Failure {
        match &e {
            DiagramError::Parse(_) => Failure::input("ParseError", e),
            DiagramError::Invalid(_) => Failure::input("InvalidDiagram", e),
            DiagramError::Model(m) => Failure::domain(model_error_name(m), e),
        }
    }
}

impl From<ExploreError> for Failure {
    fn from(e: ExploreError) -> Failure {
        match &e {
            ExploreError::InfeasibleBase => Failure::domain("InfeasibleBase", e),
            ExploreError::DuplicateFixture => Failure::domain("DuplicateFixture", e),
            ExploreError::Triple(t) => Failure::domain(triple_error_name(t), e),
        }
    }
}

impl From<FeasibilityError> for Failure {
    fn from(e: FeasibilityError) -> Failure {
        let name = match &e {
            FeasibilityError::UnknownVariable(_) => "UnknownVariable",
            FeasibilityError::EmptyConstraint => "EmptyConstraint",
            FeasibilityError::NegatedEquality => "NegatedEquality",
            FeasibilityError::Infeasible => "Infeasible",
        };
        Failure::domain(name, e)
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input("IoError", format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<LegendrianModel, Failure> {
    let text = read_file(path)?;
    LegendrianModel::from_json(&text)
        .map_err(|e| Failure::input("ParseError", format!("{}: {e}", path.display())))
}

fn parse_rational(text: &str) -> Result<Rational, Failure> {
    text.parse()
        .map_err(|e| Failure::input("ParseError", format!("`{text}`: {e}")))
}

fn parse_sign(text: &str) -> Result<Sign, Failure> {
    match text {
        "1" | "+1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        _ => Err(Failure::input(
            "ParseError",
            format!("sign must be 1 or -1, got `{text}`"),
        )),
    }
}

fn parse_actions(text: &str) -> Result<BTreeMap<String, Rational>, Failure> {
    let mut out = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.is_empty()) {
        let (label, value) = part.split_once('=').ok_or_else(|| {
            Failure::input("ParseError", format!("expected label=value, got `{part}`"))
        })?;
        out.insert(label.trim().to_string(), parse_rational(value.trim())?);
    }
    Ok(out)
}

fn emit<W: Write>(out: &mut W, value: serde_json::Value) -> Result<(), Failure> {
    writeln!(out, "{value}").map_err(|e| Failure::input("IoError", e))
}

fn dispatch<W: Write>(cli: &Cli, out: &mut W) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { model } => {
            let m = load_model(model)?;
            let report = m.validate();
            if cli.pretty {
                writeln!(out, "{report}").map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(out, serde_json::to_value(&report).unwrap())
            }
        }
        Command::Tb { model } => {
            let m = load_model(model)?;
            let tb = m.chord_sum_tb()?;
            if cli.pretty {
                writeln!(out, "tb = {tb}").map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(out, json!({ "tb": tb }))
            }
        }
        Command::Product {
            k,
            l,
            perturb,
            strict,
        } => {
            let km = load_model(k)?;
            let lm = load_model(l)?;
            let tb = product_tb(&km, &lm)?;
            if !perturb {
                return if cli.pretty {
                    writeln!(out, "tb = {tb}").map_err(|e| Failure::input("IoError", e))?;
                    Ok(())
                } else {
                    emit(out, json!({ "tb": tb }))
                };
            }
            let (chords, model) = perturb_product(&km, &lm, *strict)?;
            if cli.pretty {
                writeln!(out, "tb = {tb}").map_err(|e| Failure::input("IoError", e))?;
                writeln!(out, "{:<4} {:<12} {:<12} {:>12} {:>5}", "kind", "parent K", "parent L", "action", "sign")
                    .map_err(|e| Failure::input("IoError", e))?;
                for c in &chords {
                    writeln!(
                        out,
                        "{:<4} {:<12} {:<12} {:>12} {:>5}",
                        c.kind.to_string(),
                        c.parent_k,
                        c.parent_l,
                        c.action.to_string(),
                        c.sign.to_string()
                    )
                    .map_err(|e| Failure::input("IoError", e))?;
                }
                Ok(())
            } else {
                emit(
                    out,
                    json!({
                        "tb": tb,
                        "chords": serde_json::to_value(&chords).unwrap(),
                        "model": serde_json::to_value(&model).unwrap(),
                    }),
                )
            }
        }
        Command::Triple { k1, k2, k3, audit } => {
            let m1 = load_model(k1)?;
            let m2 = load_model(k2)?;
            let m3 = load_model(k3)?;
            if *audit {
                let audit = triple_vs_iterated(&m1, &m2, &m3)?;
                if cli.pretty {
                    writeln!(
                        out,
                        "closed form = {}, iterated = {}, agree = {}",
                        audit.closed_form, audit.iterated, audit.agree
                    )
                    .map_err(|e| Failure::input("IoError", e))?;
                    Ok(())
                } else {
                    emit(out, serde_json::to_value(audit).unwrap())
                }
            } else {
                let tb = triple_tb(&m1, &m2, &m3)?;
                if cli.pretty {
                    writeln!(out, "tb = {tb}").map_err(|e| Failure::input("IoError", e))?;
                    Ok(())
                } else {
                    emit(out, json!({ "tb": tb }))
                }
            }
        }
        Command::Frontspin { l } => {
            let lm = load_model(l)?;
            let spun = frontspin(&lm)?;
            let tb = spun.chord_sum_tb()?;
            if cli.pretty {
                writeln!(out, "tb = {tb} (dimension {})", spun.dim)
                    .map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(
                    out,
                    json!({ "tb": tb, "model": serde_json::to_value(&spun).unwrap() }),
                )
            }
        }
        Command::Family {
            k,
            l,
            e,
            pairs,
            za,
            zb,
            sign,
        } => {
            let km = load_model(k)?;
            let lm = load_model(l)?;
            let za = parse_rational(za)?;
            let zb = parse_rational(zb)?;
            let sign = parse_sign(sign)?;
            let values = infinite_family_tb(&km, &lm, e, *pairs, za, zb, sign)?;
            if cli.pretty {
                writeln!(
                    out,
                    "{}",
                    values
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
                .map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(out, json!({ "values": values }))
            }
        }
        Command::Diagram {
            file,
            tb,
            faces,
            constraints,
        } => {
            let text = read_file(file)?;
            let pd = parse_pd(&text)?;
            if *tb {
                return emit(out, json!({ "tb": pd.tb() }));
            }
            if *faces {
                return emit(
                    out,
                    json!({ "faces": serde_json::to_value(pd.faces()).unwrap() }),
                );
            }
            if *constraints {
                return emit(out, serde_json::to_value(pd.area_constraints()).unwrap());
            }
            let signs: Vec<i64> = pd.crossing_signs().iter().map(|s| s.as_i64()).collect();
            if cli.pretty {
                writeln!(
                    out,
                    "{} crossings, signs [{}], tb = {}",
                    pd.crossing_count(),
                    signs
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    pd.tb()
                )
                .map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(
                    out,
                    json!({
                        "crossings": pd.crossing_count(),
                        "signs": signs,
                        "tb": pd.tb(),
                    }),
                )
            }
        }
        Command::Explore {
            fixtures,
            budget,
            seed,
        } => {
            let names: Vec<&str> = fixtures.split(',').collect();
            if names.len() != 3 {
                return Err(Failure::input(
                    "ParseError",
                    "expected exactly three fixture names",
                ));
            }
            let parse = |n: &str| FixtureName::parse(n.trim()).map_err(Failure::from);
            let trio = [parse(names[0])?, parse(names[1])?, parse(names[2])?];
            let sys = standard_system(trio);
            let report = tb_range_search(trio, &sys, *budget, *seed)?;
            if cli.pretty {
                writeln!(
                    out,
                    "min = {:?}, max = {:?}, {} distinct values over {} evaluations",
                    report.min_found,
                    report.max_found,
                    report.values_seen.len(),
                    report.evaluations
                )
                .map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(out, serde_json::to_value(&report).unwrap())
            }
        }
        Command::Fixtures { name, actions } => {
            let fixture = FixtureName::parse(name)?;
            let actions = parse_actions(actions)?;
            let (model, constraints) = knot_fixture(fixture, &actions)?;
            if cli.pretty {
                writeln!(out, "tb = {}", model.chord_sum_tb()?)
                    .map_err(|e| Failure::input("IoError", e))?;
                Ok(())
            } else {
                emit(
                    out,
                    json!({
                        "model": serde_json::to_value(&model).unwrap(),
                        "constraints": serde_json::to_value(&constraints).unwrap(),
                    }),
                )
            }
        }
    }
}
