//! `lineconf`: batch certificate runs over line configurations.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or parse error, 3 search
//! budget exhausted.

mod manifest;
mod objects;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use lineconf::config::{is_morphism, validate_parts};
use lineconf::degree::{build_degree_ledger, expand_power, DivisorPolynomial, IntersectionRules};
use lineconf::iso::{are_isomorphic, automorphism_group, homogeneity_check};
use lineconf::schema::{to_dot, ConfigDoc};
use lineconf::vconfig::{
    check_numeric_relations, classify_v_configurations, closed_form_discrepancies,
    derive_parameters, is_v_configuration, transposed_identity_checks,
    verify_reconstruction_argument, CheckStatus, SearchBudget, VInvariants, Verdict,
};

use manifest::{Check, RunManifest, Status};
use objects::{group_tokens, resolve, resolve_all};

#[derive(Parser, Debug)]
#[command(
    name = "lineconf",
    version,
    about = "Line configurations over F2: enumeration and verification runs"
)]
struct Cli {
    /// Print the run manifest as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Run twice and fail unless both outputs agree outside timing fields.
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a configuration in the standard schema.
    Enumerate {
        /// Catalog name (fano, p3, p1^2, q-minus 3, schlaefli, points 5) or schema file.
        #[arg(required = true, num_args = 1..)]
        object: Vec<String>,
        /// Emit the incidence graph in DOT instead.
        #[arg(long)]
        dot: bool,
        /// Append the incidence profile.
        #[arg(long)]
        profile: bool,
    },
    /// Run one verification.
    #[command(subcommand)]
    Verify(Verify),
    /// Search for V-configurations with the parameters forced by V.
    Classify {
        #[arg(required = true, num_args = 1..)]
        object: Vec<String>,
        /// Node limit such as 1e8, or a time limit such as 30s.
        #[arg(long, value_parser = parse_budget)]
        budget: Budget,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        /// Require exactly one class, isomorphic to this object.
        #[arg(long, num_args = 1..)]
        expect: Option<Vec<String>>,
    },
    /// Degree ledger with its cross-checks.
    Ledger {
        /// Overrides of top intersection numbers, e.g. "4,0=24;0,4=-1".
        #[arg(long, allow_hyphen_values = true)]
        rules: Option<String>,
    },
    /// Closed-form values that disagree with the measured quadric profiles.
    Discrepancies {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u32, 3])]
        n: Vec<u32>,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Line axioms: three distinct points per line, two lines meet at most once.
    Axioms {
        #[arg(required = true, num_args = 1..)]
        object: Vec<String>,
    },
    /// Distance identities of a symmetric configuration.
    Numerics {
        #[arg(required = true, num_args = 1..)]
        object: Vec<String>,
        /// V, enabling the identities for V-configurations.
        #[arg(long, num_args = 1..)]
        against: Option<Vec<String>>,
    },
    /// W is a V-configuration.
    Vconfig {
        /// W then V.
        #[arg(required = true, num_args = 2..)]
        objects: Vec<String>,
    },
    /// Structure of lines relative to each root of W.
    Reconstruction {
        /// W then V.
        #[arg(required = true, num_args = 2..)]
        objects: Vec<String>,
    },
    /// Isomorphism witness between two configurations.
    Iso {
        #[arg(required = true, num_args = 2..)]
        objects: Vec<String>,
    },
    /// Automorphism group order.
    Aut {
        #[arg(required = true, num_args = 1..)]
        object: Vec<String>,
        #[arg(long)]
        expect: Option<u128>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Budget {
    Nodes(u64),
    Seconds(f64),
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    let t = s.replace('_', "");
    if let Some(secs) = t.strip_suffix('s') {
        return match secs.parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(Budget::Seconds(x)),
            _ => Err(format!("not a time limit: {s}")),
        };
    }
    if let Ok(n) = t.parse::<u64>() {
        return Ok(Budget::Nodes(n));
    }
    let x: f64 = t.parse().map_err(|_| format!("not a node count: {s}"))?;
    if !x.is_finite() || x < 0.0 || x.fract() != 0.0 || x > 9.0e18 {
        return Err(format!("not a node count: {s}"));
    }
    Ok(Budget::Nodes(x as u64))
}

enum Output {
    Document(String),
    Manifest(Box<RunManifest>),
}

impl Output {
    fn render(&self, json: bool, with_timing: bool) -> String {
        match self {
            Output::Document(s) => s.clone(),
            Output::Manifest(m) if json => m.to_json(with_timing),
            Output::Manifest(m) => m.to_text(with_timing),
        }
    }
}

fn joined(tokens: &[String]) -> String {
    group_tokens(tokens).join(" ")
}

fn status(s: CheckStatus) -> Status {
    match s {
        CheckStatus::Pass => Status::Pass,
        CheckStatus::Fail => Status::Fail,
        CheckStatus::Inapplicable => Status::Inapplicable,
    }
}

fn to_value(x: impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("serializes")
}

fn enumerate(object: &[String], dot: bool, profile: bool) -> Result<Output, String> {
    let c = resolve(&joined(object))?.config;
    if dot {
        return Ok(Output::Document(to_dot(&c)));
    }
    let mut doc = ConfigDoc::from_config(&c);
    if profile {
        doc = doc.with_profile(&c);
    }
    Ok(Output::Document(doc.to_json()))
}

fn axioms(object: &[String]) -> Result<RunManifest, String> {
    let name = joined(object);
    // schema files are checked as written, before construction
    let (n, lines) = if Path::new(&name).is_file() {
        let text = std::fs::read_to_string(&name).map_err(|e| format!("{name}: {e}"))?;
        let doc = ConfigDoc::from_json(&text).map_err(|e| format!("{name}: {e}"))?;
        (doc.points.len(), doc.lines)
    } else {
        let c = resolve(&name)?.config;
        (c.num_points(), c.lines().to_vec())
    };
    let r = validate_parts(n, &lines);
    let mut m = RunManifest::new("verify axioms").param("object", &name);
    m.check(Check::new(
        "every line has three distinct points of the configuration",
        Status::from_bool(r.malformed.is_empty()),
        r.malformed.join("; "),
    ));
    let pairs: Vec<String> = r
        .violations
        .iter()
        .take(10)
        .map(|(a, b)| format!("lines {a} and {b}"))
        .collect();
    m.check(Check::new(
        "two distinct lines share at most one point",
        Status::from_bool(r.violations.is_empty()),
        pairs.join(", "),
    ));
    m.text = format!("{n} points, {} lines\n", lines.len());
    m.payload = to_value(&r);
    Ok(m)
}

fn numerics(object: &[String], against: Option<&[String]>) -> Result<RunManifest, String> {
    let w = resolve(&joined(object))?;
    let v = against.map(|a| resolve(&joined(a))).transpose()?;
    let mut m = RunManifest::new("verify numerics").param("w", &w.name);
    if let Some(v) = &v {
        m = m.param("v", &v.name);
    }
    let report = check_numeric_relations(&w.config, v.as_ref().map(|v| &v.config));
    for c in &report.checks {
        let mut detail = match (c.lhs, c.rhs) {
            (Some(l), Some(r)) => format!("{l} vs {r}"),
            _ => String::new(),
        };
        if let Some(note) = &c.note {
            if !detail.is_empty() {
                detail.push_str("; ");
            }
            detail.push_str(note);
        }
        m.check(Check::new(
            format!("({}) {}", c.item, c.statement),
            status(c.status),
            detail,
        ));
    }
    let profile = w.config.profile();
    let transposed = if profile.symmetric {
        transposed_identity_checks(&profile)
    } else {
        Vec::new()
    };
    let mut info = String::new();
    for c in transposed.iter().filter(|c| c.status == CheckStatus::Fail) {
        info.push_str(&format!(
            "note: {} does not hold: {} vs {}\n",
            c.statement,
            c.lhs.unwrap_or_default(),
            c.rhs.unwrap_or_default()
        ));
    }
    m.text = info;
    m.payload = json!({ "profile": profile, "report": report, "transposed_products": transposed });
    Ok(m)
}

fn vconfig(objects: &[String]) -> Result<RunManifest, String> {
    let [w, v]: [_; 2] = resolve_all(objects, 2)?
        .try_into()
        .map_err(|_| "expected W and V")?;
    let mut m = RunManifest::new("verify vconfig")
        .param("w", &w.name)
        .param("v", &v.name);
    let r = is_v_configuration(&w.config, &v.config);
    let detail = match &r.failure {
        None => format!("{} of {} points", r.witnesses.len(), w.config.num_points()),
        Some(f) => format!("point {}: {}", f.point, f.reason),
    };
    m.check(Check::new(
        "a correspondence phi_p exists at every point",
        Status::from_bool(r.holds),
        detail,
    ));
    m.payload = to_value(&r);
    Ok(m)
}

fn reconstruction(objects: &[String]) -> Result<RunManifest, String> {
    let [w, v]: [_; 2] = resolve_all(objects, 2)?
        .try_into()
        .map_err(|_| "expected W and V")?;
    let mut m = RunManifest::new("verify reconstruction")
        .param("w", &w.name)
        .param("v", &v.name);
    let r = verify_reconstruction_argument(&w.config, &v.config);
    if !r.applicable {
        m.check(Check::new(
            "reconstruction",
            Status::Inapplicable,
            r.note.clone().unwrap_or_default(),
        ));
    } else {
        m.check(Check::new(
            "(a) every line avoiding the root meets W_1 once and W_2 twice",
            Status::from_bool(r.lines_split),
            format!("{} roots", r.roots_checked),
        ));
        m.check(Check::new(
            "(b) each point of W_1 is collinear with half of W_2",
            Status::from_bool(r.half_split),
            format!("w_{{1,2}} = {}, w_2 = {}", r.w12, r.w2),
        ));
        m.check(Check::new(
            "(c) W_2 points are determined by their choice of points on the root's lines",
            Status::from_bool(r.choices_injective),
            String::new(),
        ));
        if !r.failures.is_empty() {
            m.text = r
                .failures
                .iter()
                .take(5)
                .map(|f| format!("  {f}\n"))
                .collect();
        }
    }
    m.payload = to_value(&r);
    Ok(m)
}

fn iso(objects: &[String]) -> Result<RunManifest, String> {
    let [a, b]: [_; 2] = resolve_all(objects, 2)?
        .try_into()
        .map_err(|_| "expected two objects")?;
    let mut m = RunManifest::new("verify iso")
        .param("a", &a.name)
        .param("b", &b.name);
    match are_isomorphic(&a.config, &b.config) {
        Some(w) => {
            let ok = is_morphism(&w.map, &a.config, &b.config).unwrap_or(false);
            m.check(Check::new("isomorphism found", Status::Pass, String::new()));
            m.check(Check::new(
                "witness maps lines onto lines",
                Status::from_bool(ok),
                String::new(),
            ));
            let pairs: Vec<String> = w
                .map
                .iter()
                .enumerate()
                .map(|(x, y)| format!("{x}->{y}"))
                .collect();
            m.text = format!("witness: {}\n", pairs.join(" "));
            m.payload = json!({ "map": w.map });
        }
        None => {
            m.check(Check::new(
                "isomorphism found",
                Status::Fail,
                "the search is exhaustive",
            ));
        }
    }
    Ok(m)
}

fn aut(object: &[String], expect: Option<u128>) -> Result<RunManifest, String> {
    let c = resolve(&joined(object))?;
    let mut m = RunManifest::new("verify aut").param("object", &c.name);
    let g = automorphism_group(&c.config);
    if let Some(e) = expect {
        m = m.param("expect", e.to_string());
        m.check(Check::new(
            format!("order = {e}"),
            Status::from_bool(g.order == e),
            g.order.to_string(),
        ));
    }
    let transitive = homogeneity_check(&c.config);
    m.summary = format!("|Aut| = {}, transitive on points: {transitive}", g.order);
    m.payload = json!({
        "order": g.order.to_string(),
        "base": g.base,
        "orbit_sizes": g.orbit_sizes,
        "generators": g.generators.len(),
        "transitive": transitive,
    });
    Ok(m)
}

fn classify(
    object: &[String],
    budget: Budget,
    time_limit: Option<f64>,
    expect: Option<&[String]>,
) -> Result<RunManifest, String> {
    let v = resolve(&joined(object))?;
    let expected = expect.map(|e| resolve(&joined(e))).transpose()?;
    let time_limit = match (budget, time_limit) {
        (Budget::Seconds(b), Some(t)) => Some(b.min(t)),
        (Budget::Seconds(b), None) => Some(b),
        (Budget::Nodes(_), t) => t,
    };
    let max_time = match time_limit {
        Some(t) if t.is_finite() && t > 0.0 => Some(Duration::from_secs_f64(t)),
        Some(t) => return Err(format!("bad time limit {t}")),
        None => None,
    };
    let max_nodes = match budget {
        Budget::Nodes(n) => n,
        Budget::Seconds(_) => u64::MAX,
    };
    let mut m = RunManifest::new("classify").param("v", &v.name);
    if let Budget::Nodes(n) = budget {
        m = m.param("budget", n);
    }
    if let Some(t) = time_limit {
        m = m.param("time_limit_s", t);
    }
    let table = match VInvariants::measure(&v.config).and_then(derive_parameters) {
        Ok(t) => t,
        Err(e) => {
            m.check(Check::new(
                "parameters derivable from V",
                Status::Fail,
                e.to_string(),
            ));
            return Ok(m);
        }
    };
    let mut text = String::from("parameter table:\n");
    for s in &table.steps {
        text.push_str(&format!(
            "  {:<16} = {:>5}   {}\n",
            s.quantity, s.value, s.identity
        ));
    }
    for r in &table.rejected_branches {
        text.push_str(&format!("  rejected: {r}\n"));
    }
    let out = classify_v_configurations(
        &v.config,
        SearchBudget {
            max_nodes,
            max_time,
        },
    )
    .map_err(|e| e.to_string())?;
    let s = &out.stats;
    text.push_str(&format!(
        "search: {} nodes, {} leaves, {} canonical checks, {} isomorph rejections\n",
        s.nodes, s.leaves, s.canonical_checks, s.isomorph_rejections
    ));
    for (why, n) in &s.rejections {
        text.push_str(&format!("  rejected ({why}): {n}\n"));
    }
    match out.verdict {
        Verdict::Complete => m.check(Check::new(
            "search complete",
            Status::Pass,
            format!("{} class(es)", out.classes.len()),
        )),
        Verdict::BudgetExhausted => {
            m.budget_exhausted = true;
            m.check(Check::new(
                "search complete",
                Status::Inapplicable,
                format!(
                    "budget exhausted after {} nodes, {} class(es) so far",
                    s.nodes,
                    out.classes.len()
                ),
            ));
        }
    }
    if let Some(e) = &expected {
        if out.verdict == Verdict::Complete {
            let unique =
                out.classes.len() == 1 && are_isomorphic(&out.classes[0], &e.config).is_some();
            m.check(Check::new(
                format!("exactly one class, isomorphic to {}", e.name),
                Status::from_bool(unique),
                String::new(),
            ));
        }
    }
    for (i, c) in out.classes.iter().enumerate() {
        text.push_str(&format!(
            "class {}: {} points, {} lines\n",
            i + 1,
            c.num_points(),
            c.lines().len()
        ));
        text.push_str(&ConfigDoc::from_config(c).to_json());
    }
    m.summary = match out.verdict {
        Verdict::Complete => format!("complete: {} class(es)", out.classes.len()),
        Verdict::BudgetExhausted => format!(
            "budget exhausted: {} class(es) found so far",
            out.classes.len()
        ),
    };
    m.text = text;
    let classes: Vec<ConfigDoc> = out.classes.iter().map(ConfigDoc::from_config).collect();
    m.payload =
        json!({ "verdict": out.verdict, "table": table, "stats": out.stats, "classes": classes });
    Ok(m)
}

fn ledger(rules: Option<&str>) -> Result<RunManifest, String> {
    let rules = match rules {
        Some(r) => IntersectionRules::parse_overrides(r).map_err(|e| e.to_string())?,
        None => IntersectionRules::default(),
    };
    let mut m = RunManifest::new("ledger");
    let overrides: Vec<String> = rules
        .top_values
        .iter()
        .map(|((a, b), v)| format!("{a},{b}={v}"))
        .collect();
    m = m.param("rules", overrides.join(";"));
    let l = match build_degree_ledger(&rules) {
        Ok(l) => l,
        Err(e) => {
            m.check(Check::new("ledger computable", Status::Fail, e.to_string()));
            return Ok(m);
        }
    };
    let expansion = expand_power(&DivisorPolynomial::gamma00_class(), rules.ambient_dim)
        .map_err(|e| e.to_string())?;
    let mut text = format!("(2Θ-4E)^{} = {expansion}\n", rules.ambient_dim);
    for e in &l.entries {
        text.push_str(&format!(
            "  {:<24} {:>5}   {}\n",
            e.locus, e.local_degree, e.basis
        ));
    }
    text.push_str(&format!("  {:<24} {:>5}\n", "total", l.total));
    m.text = text;
    for c in &l.cross_checks {
        m.check(Check::new(
            &c.name,
            Status::from_bool(c.pass),
            format!("expected {}, found {}", c.expected, c.found),
        ));
    }
    m.summary = format!("total {}", l.total);
    m.payload = to_value(&l);
    Ok(m)
}

fn discrepancies(ns: &[u32]) -> Result<RunManifest, String> {
    let d = closed_form_discrepancies(ns).map_err(|e| e.to_string())?;
    let mut m = RunManifest::new("discrepancies").param("n", ns);
    m.text = d
        .iter()
        .map(|x| {
            format!(
                "n={} {}: closed form {} = {}, measured {} (difference {})\n",
                x.n, x.quantity, x.closed_form, x.closed_value, x.measured, x.difference
            )
        })
        .collect();
    m.summary = format!("{} discrepancies", d.len());
    m.payload = to_value(&d);
    Ok(m)
}

fn execute(cli: &Cli) -> Result<Output, String> {
    let manifest = match &cli.command {
        Command::Enumerate {
            object,
            dot,
            profile,
        } => return enumerate(object, *dot, *profile),
        Command::Verify(v) => match v {
            Verify::Axioms { object } => axioms(object),
            Verify::Numerics { object, against } => numerics(object, against.as_deref()),
            Verify::Vconfig { objects } => vconfig(objects),
            Verify::Reconstruction { objects } => reconstruction(objects),
            Verify::Iso { objects } => iso(objects),
            Verify::Aut { object, expect } => aut(object, *expect),
        },
        Command::Classify {
            object,
            budget,
            time_limit,
            expect,
        } => classify(object, *budget, *time_limit, expect.as_deref()),
        Command::Ledger { rules } => ledger(rules.as_deref()),
        Command::Discrepancies { n } => discrepancies(n),
    }?;
    Ok(Output::Manifest(Box::new(manifest)))
}

fn timed(cli: &Cli) -> Result<Output, String> {
    let start = Instant::now();
    let mut out = execute(cli)?;
    if let Output::Manifest(m) = &mut out {
        m.wall_ms = start.elapsed().as_millis() as u64;
        m.finish();
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = match timed(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.seedless {
        let again = match timed(&cli) {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let same = out.render(cli.json, false) == again.render(cli.json, false);
        match &mut out {
            Output::Manifest(m) => {
                m.check(Check::new(
                    "repeat run identical outside timing",
                    Status::from_bool(same),
                    String::new(),
                ));
                m.summary.clear();
                m.finish();
            }
            Output::Document(_) if !same => {
                eprintln!("error: repeated run produced different output");
                return ExitCode::from(1);
            }
            Output::Document(_) => {}
        }
    }
    print!("{}", out.render(cli.json, true));
    let code = match &out {
        Output::Document(_) => 0,
        Output::Manifest(m) => m.exit_code(),
    };
    ExitCode::from(code as u8)
}
