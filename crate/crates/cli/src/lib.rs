//! Command implementations behind the `minorlab` binary. Each command returns
//! its rendered output together with the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use minorlab::algebra::{find_identity, find_zero, semilattice_violation};
use minorlab::poset::{build_preorder, export_dot, verify_dcc, DccCheck, Strategy, Universe};
use minorlab::semilattice::TermVectorJson;
use minorlab::{
    c_degree, canonicalize, downset_representatives, generate_clone, is_c_minor, minimal_decomposition, Budget,
    CloneLimits, CloneTable, Domain, DownsetConfig, Error, MeetClone, Operation, SemilatticeStructure, TermVector,
};
use serde::Deserialize;
use serde_json::json;
use thiserror::Error as ThisError;

pub const EXIT_OK: i32 = 0;
/// Not a minor, not a semilattice, or a failed verification.
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::ResourceLimit { .. }) => EXIT_BUDGET,
            _ => EXIT_INPUT,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    #[default]
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?} (expected json, dot or text)")),
        }
    }
}

/// Settings shared by all commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Preset name or path to a clone file.
    pub clone: String,
    pub semilattice: Option<PathBuf>,
    pub max_arity: Option<usize>,
    pub max_part_size: usize,
    pub budget: u64,
    pub e_cap: usize,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub strategy: Strategy,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            clone: "meet".into(),
            semilattice: None,
            max_arity: None,
            max_part_size: CloneLimits::default().max_part_size,
            budget: Budget::DEFAULT_LIMIT,
            e_cap: DownsetConfig::default().e_cap,
            samples: 100,
            seed: 0,
            format: Format::Text,
            strategy: Strategy::Generic,
        }
    }
}

impl RunConfig {
    fn downset_config(&self) -> DownsetConfig {
        DownsetConfig { e_cap: self.e_cap, check_budget: self.budget }
    }

    fn limits(&self) -> CloneLimits {
        CloneLimits { max_part_size: self.max_part_size }
    }

    /// The semilattice given by `--semilattice`, else the chain on `domain`.
    fn semilattice(&self, domain: Domain) -> CliResult<SemilatticeStructure> {
        let s = match &self.semilattice {
            Some(path) => parse_semilattice(&read(path)?)?,
            None => SemilatticeStructure::chain(domain.size())?,
        };
        if s.domain() != domain {
            return Err(Error::DomainMismatch(domain.size(), s.domain().size()).into());
        }
        Ok(s)
    }

    fn clone_spec(&self, domain: Domain) -> CliResult<CloneSpec> {
        if ["meet", "meet0", "meet1", "meet01"].contains(&self.clone.as_str()) {
            let family = MeetClone::preset(&self.clone, self.semilattice(domain)?)?;
            return Ok(CloneSpec { generators: family.generators(), max_arity: None, family: Some(family) });
        }
        let file: CloneFile = parse_json(&read(Path::new(&self.clone))?)?;
        for g in &file.generators {
            if g.domain() != domain {
                return Err(Error::DomainMismatch(domain.size(), g.domain().size()).into());
            }
        }
        let family = match &file.named {
            Some(name) => {
                let s = match file.generators.iter().find(|g| g.arity() == 2) {
                    Some(meet) => SemilatticeStructure::new(meet.clone())?,
                    None => self.semilattice(domain)?,
                };
                let family = MeetClone::preset(name, s)?;
                if !file.generators.is_empty() && !same_set(&family.generators(), &file.generators) {
                    return Err(CliError::Usage(format!("generators do not match the named clone {name:?}")));
                }
                Some(family)
            }
            None => recognize(&file.generators),
        };
        let generators = match (&family, file.generators.is_empty()) {
            (Some(f), true) => f.generators(),
            _ => file.generators,
        };
        Ok(CloneSpec { generators, max_arity: file.max_arity, family })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CloneFile {
    #[serde(default)]
    generators: Vec<Operation>,
    #[serde(default)]
    max_arity: Option<usize>,
    #[serde(default)]
    named: Option<String>,
}

/// A clone given by generators, with its semilattice description when it
/// has one.
struct CloneSpec {
    generators: Vec<Operation>,
    max_arity: Option<usize>,
    family: Option<MeetClone>,
}

impl CloneSpec {
    fn table(&self, domain: Domain, arity: usize, config: &RunConfig) -> CliResult<CloneTable> {
        let arity = arity.max(config.max_arity.unwrap_or(0)).max(self.max_arity.unwrap_or(0)).max(1);
        Ok(match &self.family {
            Some(f) => f.table(arity, config.limits())?,
            None => generate_clone(domain, &self.generators, arity, config.limits())?,
        })
    }

    fn label(&self, op: &Operation) -> String {
        self.family.as_ref().and_then(|f| f.describe(op)).map(|t| t.to_string()).unwrap_or_else(|| op.digest())
    }
}

fn same_set(a: &[Operation], b: &[Operation]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    a.dedup();
    b.sort();
    b.dedup();
    a == b
}

/// Generators of the form `{∧}` plus some of its unary zero and identity constants.
fn recognize(generators: &[Operation]) -> Option<MeetClone> {
    let binary: Vec<&Operation> = generators.iter().filter(|g| g.arity() == 2).collect();
    let [meet] = binary.as_slice() else { return None };
    let s = SemilatticeStructure::new((*meet).clone()).ok()?;
    let zero = s.zero().is_some_and(|z| generators.iter().any(|g| g.arity() == 1 && g.constant_value() == Some(z)));
    let identity =
        s.identity().is_some_and(|e| generators.iter().any(|g| g.arity() == 1 && g.constant_value() == Some(e)));
    let family = MeetClone::new(s, zero, identity).ok()?;
    same_set(&family.generators(), generators).then_some(family)
}

/// Rendered output and exit code of one command.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { code: EXIT_OK, text }
    }

    fn negative(text: String) -> Self {
        Outcome { code: EXIT_NEGATIVE, text }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| Error::from(e).into())
}

pub fn read_operation(path: &Path) -> CliResult<Operation> {
    parse_json(&read(path)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeetTableJson {
    domain: usize,
    meet: Vec<Vec<usize>>,
}

/// A binary operation given either as `{"domain", "meet": [[..]]}` or as an
/// operation `{"domain", "arity": 2, "table"}`.
fn parse_binary(text: &str) -> CliResult<Operation> {
    if let Ok(m) = serde_json::from_str::<MeetTableJson>(text) {
        let d = Domain::new(m.domain)?;
        if m.meet.len() != d.size() || m.meet.iter().any(|row| row.len() != d.size()) {
            return Err(Error::TableLength { expected: d.size() * d.size(), found: m.meet.iter().map(Vec::len).sum() }.into());
        }
        let mut table = Vec::with_capacity(d.size() * d.size());
        for &v in m.meet.iter().flatten() {
            if v >= d.size() {
                return Err(Error::ElementOutOfRange { elem: v, size: d.size() }.into());
            }
            table.push(v as u8);
        }
        return Ok(Operation::new(d, 2, table)?);
    }
    let op: Operation = parse_json(text)?;
    if op.arity() != 2 {
        return Err(Error::ArityMismatch { expected: 2, found: op.arity() }.into());
    }
    Ok(op)
}

fn parse_semilattice(text: &str) -> CliResult<SemilatticeStructure> {
    Ok(SemilatticeStructure::new(parse_binary(text)?)?)
}

/// Reports whether a binary table is a semilattice, with its identity and zero.
pub fn cmd_validate(path: &Path, config: &RunConfig) -> CliResult<Outcome> {
    let op = parse_binary(&read(path)?)?;
    let violation = semilattice_violation(&op);
    let (identity, zero) = (find_identity(&op), find_zero(&op));
    if config.format == Format::Json {
        let body = json!({
            "semilattice": violation.is_none(),
            "violation": violation.as_ref().map(ToString::to_string),
            "identity": identity,
            "zero": zero,
        });
        let code = if violation.is_none() { EXIT_OK } else { EXIT_NEGATIVE };
        return Ok(Outcome { code, text: pretty(&body) });
    }
    Ok(match violation {
        Some(v) => Outcome::negative(format!("not a semilattice: {v}\n")),
        None => {
            let show = |x: Option<u8>| x.map_or("none".to_string(), |v| v.to_string());
            Outcome::ok(format!(
                "valid semilattice on {}\nidentity: {}\nzero: {}\n",
                op.domain(),
                show(identity),
                show(zero)
            ))
        }
    })
}

/// Decides `f ⊑_C g` and prints a witness.
pub fn cmd_minor(f_path: &Path, g_path: &Path, config: &RunConfig) -> CliResult<Outcome> {
    let f = read_operation(f_path)?;
    let g = read_operation(g_path)?;
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch(f.domain().size(), g.domain().size()).into());
    }
    let spec = config.clone_spec(f.domain())?;
    let mut budget = Budget::new(config.budget);
    let witness: Option<(String, Vec<String>)> = match &spec.family {
        Some(family) => family.find_minor(&f, &g, &mut budget)?.map(|w| {
            let terms = w.terms.iter().map(ToString::to_string).collect();
            (w.term_text(), terms)
        }),
        None => {
            let table = spec.table(f.domain(), f.arity(), config)?;
            is_c_minor(&f, &g, &table, &mut budget)?.map(|d| {
                let labels: Vec<String> = d.inner.iter().map(|h| spec.label(h)).collect();
                (labels.join(" "), labels)
            })
        }
    };
    if config.format == Format::Json {
        let body = json!({
            "minor": witness.is_some(),
            "witness": witness.as_ref().map(|w| &w.1),
            "nodes": budget.used(),
        });
        let code = if witness.is_some() { EXIT_OK } else { EXIT_NEGATIVE };
        return Ok(Outcome { code, text: pretty(&body) });
    }
    Ok(match witness {
        Some((text, _)) => Outcome::ok(format!("{text}\n")),
        None => Outcome::negative(format!(
            "NOT A MINOR\nno inner tuple exists; exhaustive search visited {} of {} allowed nodes\n",
            budget.used(),
            budget.limit()
        )),
    })
}

/// Prints the C-degree and a minimal decomposition.
pub fn cmd_degree(f_path: &Path, config: &RunConfig) -> CliResult<Outcome> {
    let f = read_operation(f_path)?;
    let spec = config.clone_spec(f.domain())?;
    let table = spec.table(f.domain(), f.arity(), config)?;
    let mut budget = Budget::new(config.budget);
    let degree = c_degree(&f, &table, &mut budget)?;
    let decomposition = if degree == 0 { None } else { Some(minimal_decomposition(&f, &table, &mut budget)?) };
    let inner: Option<Vec<String>> =
        decomposition.as_ref().map(|d| d.inner.iter().map(|h| spec.label(h)).collect());
    if config.format == Format::Json {
        let body = json!({
            "degree": degree,
            "inner": inner,
            "outer": decomposition.as_ref().map(|d| &d.outer),
        });
        return Ok(Outcome::ok(pretty(&body)));
    }
    let mut text = format!("degree: {degree}\n");
    if let (Some(d), Some(inner)) = (&decomposition, &inner) {
        let _ = writeln!(text, "inner: {}", inner.join(" "));
        let _ = writeln!(text, "outer: {}", d.outer);
    }
    Ok(Outcome::ok(text))
}

/// Canonical form of `g(terms)` with both substitution witnesses.
pub fn cmd_canon(g_path: &Path, terms_path: &Path, config: &RunConfig) -> CliResult<Outcome> {
    let g = read_operation(g_path)?;
    let tv_json: TermVectorJson = parse_json(&read(terms_path)?)?;
    let tv = TermVector::try_from(tv_json)?;
    let s = config.semilattice(g.domain())?;
    let c = canonicalize(&g, &tv, &s)?;
    let psi: Vec<String> = c.psi.terms().iter().map(ToString::to_string).collect();
    let xi: Vec<String> = c.witness.xi.iter().map(ToString::to_string).collect();
    if config.format == Format::Json {
        let body = json!({
            "E": c.system,
            "psi": psi,
            "pi": c.witness.pi,
            "xi": xi,
            "f": c.f,
            "f_prime": c.f_prime,
            "verified": true,
        });
        return Ok(Outcome::ok(pretty(&body)));
    }
    let pi: Vec<String> = c.witness.pi.iter().map(ToString::to_string).collect();
    Ok(Outcome::ok(format!(
        "E = {}\nΨ = ({})\nπ = ({})\nξ = ({})\nf = {}\nf' = {}\nverified\n",
        c.system,
        psi.join(", "),
        pi.join(", "),
        xi.join(", "),
        c.f,
        c.f_prime
    )))
}

/// One representative per class below `f`.
pub fn cmd_downset(f_path: &Path, config: &RunConfig) -> CliResult<Outcome> {
    let f = read_operation(f_path)?;
    let spec = config.clone_spec(f.domain())?;
    let family = spec.family.as_ref().ok_or(Error::StrategyUnavailable)?;
    let ds = downset_representatives(&f, family, config.downset_config())?;
    if config.format == Format::Json {
        let body = json!({
            "function": f,
            "candidates": ds.candidate_count(),
            "classes": ds.report(),
        });
        return Ok(Outcome::ok(pretty(&body)));
    }
    let mut text = format!("{} classes below {} ({} candidates)\n", ds.len(), f, ds.candidate_count());
    for (i, class) in ds.classes().iter().enumerate() {
        let constants = if class.source.has_constants() {
            let fixed: Vec<String> =
                class.source.constants.iter().map(|c| c.map_or("_".to_string(), |v| v.to_string())).collect();
            format!(" constants=({})", fixed.join(","))
        } else {
            String::new()
        };
        let _ = writeln!(
            text,
            "{i}: {} E={} sampled={}{constants}",
            class.representative, class.source.system, class.class_size_sampled
        );
    }
    Ok(Outcome::ok(text))
}

/// `all:K:A1,A2,...` or a universe JSON file.
pub fn parse_universe(spec: &str) -> CliResult<Universe> {
    if let Some(rest) = spec.strip_prefix("all:") {
        let usage = || CliError::Usage(format!("bad universe spec {spec:?} (expected all:K:ARITIES)"));
        let (k, arities) = rest.split_once(':').ok_or_else(usage)?;
        let k: usize = k.parse().map_err(|_| usage())?;
        let arities =
            arities.split(',').map(|a| a.trim().parse::<usize>().map_err(|_| usage())).collect::<CliResult<Vec<_>>>()?;
        return Ok(Universe::all(Domain::new(k)?, &arities)?);
    }
    parse_json(&read(Path::new(spec))?)
}

/// The minor poset of a universe.
pub fn cmd_poset(universe_spec: &str, config: &RunConfig) -> CliResult<Outcome> {
    let universe = parse_universe(universe_spec)?;
    let spec = config.clone_spec(universe.domain())?;
    let table = spec.table(universe.domain(), universe.max_arity(), config)?;
    let poset = build_preorder(&universe, &table, config.strategy, config.budget)?;
    let text = match config.format {
        Format::Json => poset.to_json() + "\n",
        Format::Dot => export_dot(&poset, spec.family.as_ref()),
        Format::Text => poset.to_text(spec.family.as_ref()),
    };
    Ok(Outcome::ok(text))
}

/// Poset laws plus sampled cross-checks against term-level down-sets.
pub fn cmd_dcc(universe_spec: &str, config: &RunConfig) -> CliResult<Outcome> {
    let universe = parse_universe(universe_spec)?;
    let spec = config.clone_spec(universe.domain())?;
    let table = spec.table(universe.domain(), universe.max_arity(), config)?;
    let poset = build_preorder(&universe, &table, config.strategy, config.budget)?;
    let check = spec.family.as_ref().map(|family| DccCheck {
        family,
        samples: config.samples,
        max_inner_arity: 5,
        seed: config.seed,
        downset: config.downset_config(),
        max_function_arity: 3,
    });
    let report = verify_dcc(&poset, check.as_ref())?;
    let code = if report.passed() { EXIT_OK } else { EXIT_NEGATIVE };
    let text = match config.format {
        Format::Json => pretty(&serde_json::to_value(&report).map_err(Error::from)?),
        _ => {
            let mut t = format!(
                "classes: {}\nantisymmetric: {}\ntransitive: {}\nlargest down-set: {}\ncross-checked classes: {}\nsampled minors: {}\n",
                report.classes,
                report.antisymmetric,
                report.transitive,
                report.largest_downset,
                report.classes_cross_checked,
                report.sampled_minors
            );
            for failure in &report.failures {
                let _ = writeln!(t, "failure: {failure}");
            }
            t.push_str(if report.passed() { "passed\n" } else { "FAILED\n" });
            t
        }
    };
    Ok(Outcome { code, text })
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values serialize") + "\n"
}
