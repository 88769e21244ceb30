//! Command-line surface: datum validation, module construction and
//! analysis, almost split sequence checks and the classification harness.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constructors::{self, BasisKind, ConstructError, EtaParam, Family, FamilyTag};
use crate::cyclo::CycloError;
use crate::datum::{DatumError, DatumKind, DatumSpec, GroupDatum, TopSubclass, Weight};
use crate::homology::{self, ArFamily, Factors, HomologyError, LoewyType, SesReport, Verdict};
use crate::repmod::{ModuleError, ModuleFile, ModuleRep, RelationReport};

/// Exit code for a check that ran and failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit code for malformed or out-of-domain input.
pub const EXIT_INVALID: i32 = 2;

/// Default cap on the summed dimension of all modules one command builds.
pub const DEFAULT_BUDGET: usize = 4096;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(DatumError, ConstructError, ModuleError, CycloError, serde_json::Error);

impl From<HomologyError> for CliError {
    fn from(e: HomologyError) -> Self {
        match e {
            HomologyError::Construct(c) => CliError::Invalid(c.to_string()),
            HomologyError::DatumMismatch => CliError::Invalid(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "drinfeld-reps", version, about = "Exact modules over Drinfeld doubles of rank-one pointed Hopf algebras")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for randomized isomorphism witnesses and sequence maps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Datum validation.
    #[command(subcommand)]
    Datum(DatumCmd),
    /// Weight enumeration.
    #[command(subcommand)]
    Weights(WeightsCmd),
    /// Module construction and analysis.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Almost split sequence checks.
    #[command(subcommand)]
    Ar(ArCmd),
    /// Enumerate the classified families within bounds and check them.
    Classify(ClassifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum DatumCmd {
    Check { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum WeightsCmd {
    List { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum ModuleCmd {
    /// Build a family member and write its module file.
    Build {
        datum: PathBuf,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        l: u64,
        /// Weight as `[g..;h..]`.
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<i64>,
        /// Rational literal or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
        #[arg(long)]
        basis: Option<BasisArg>,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every defining relation.
    Verify { module: PathBuf },
    /// Socle and radical series, factors, type and family match.
    Analyze {
        module: PathBuf,
        /// Band parameters tried when matching against band families.
        #[arg(long, default_value = "1,-1,2,-2,0,inf", allow_hyphen_values = true)]
        etas: String,
    },
    /// Decide whether two modules are isomorphic.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Natural,
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceArg {
    /// Sequences around projectives and their syzygy shifts.
    Syzygy,
    TString,
    TbarString,
    MBand,
    WBand,
    All,
}

impl SequenceArg {
    fn families(self) -> Vec<ArFamily> {
        match self {
            SequenceArg::Syzygy => vec![ArFamily::SyzygyHeart, ArFamily::SyzygyShift, ArFamily::CosyzygyShift],
            SequenceArg::TString => vec![ArFamily::TString],
            SequenceArg::TbarString => vec![ArFamily::TbarString],
            SequenceArg::MBand => vec![ArFamily::MBand],
            SequenceArg::WBand => vec![ArFamily::WBand],
            SequenceArg::All => ArFamily::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ArCmd {
    /// Build the named sequences and check the almost split conditions.
    Check {
        datum: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        sequence: SequenceArg,
        #[arg(long, default_value_t = 1)]
        max_t: u64,
        /// Restrict to one `l`.
        #[arg(long)]
        l: Option<u64>,
        /// Restrict to one weight.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        etas: String,
    },
}

#[derive(Debug, clap::Args)]
pub struct ClassifyArgs {
    pub datum: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_t: u64,
    #[arg(long, default_value_t = 2)]
    pub max_s: u64,
    #[arg(long, default_value = "1,-1", allow_hyphen_values = true)]
    pub etas: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
}

/// Text or JSON rendering plus the process exit code.
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

/// Parses arguments, runs the command and renders errors. Never panics on
/// bad input.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (code, String::new(), text) };
        }
    };
    match execute(&cli) {
        Ok(out) => (out.code, out.stdout, String::new()),
        Err(e) => (e.exit_code(), String::new(), format!("error: {e}\n")),
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Datum(DatumCmd::Check { file }) => cmd_datum(&*load_datum(file)?, fmt),
        Command::Weights(WeightsCmd::List { file }) => cmd_weights(&*load_datum(file)?, fmt),
        Command::Module(ModuleCmd::Build {
            datum,
            family,
            l,
            lambda,
            t,
            s,
            eta,
            basis,
            out,
        }) => {
            let d = load_datum(datum)?;
            let mut tag = FamilyTag::new(family.parse::<Family>()?, *l, parse_weight(lambda)?);
            tag.t = *t;
            tag.s = *s;
            tag.eta = eta.as_deref().map(EtaParam::parse).transpose()?;
            tag.basis = basis.map(|b| match b {
                BasisArg::Natural => BasisKind::Natural,
                BasisArg::Standard => BasisKind::Standard,
            });
            cmd_build(&d, &tag, out.as_deref())
        }
        Command::Module(ModuleCmd::Verify { module }) => cmd_verify(&load_module(module)?, fmt),
        Command::Module(ModuleCmd::Analyze { module, etas }) => {
            cmd_analyze(&load_module(module)?, &parse_etas(etas)?, fmt, cli.seed)
        }
        Command::Module(ModuleCmd::Compare { a, b }) => {
            cmd_compare(&load_module(a)?, &load_module(b)?, fmt, cli.seed)
        }
        Command::Ar(ArCmd::Check {
            datum,
            sequence,
            max_t,
            l,
            lambda,
            etas,
        }) => {
            let d = load_datum(datum)?;
            let lambda = lambda.as_deref().map(parse_weight).transpose()?;
            let req = ArRequest {
                families: sequence.families(),
                max_t: *max_t,
                l: *l,
                lambda,
                etas: parse_etas(etas)?,
            };
            cmd_ar(&d, &req, fmt, cli.seed)
        }
        Command::Classify(args) => {
            let d = load_datum(&args.datum)?;
            let bounds = ClassifyBounds {
                max_t: args.max_t,
                max_s: args.max_s,
                etas: parse_etas(&args.etas)?,
                budget: args.budget,
            };
            cmd_classify(&d, &bounds, fmt, cli.seed)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn load_datum(path: &Path) -> Result<Arc<GroupDatum>, CliError> {
    let spec: DatumSpec = serde_json::from_str(&read(path)?)?;
    Ok(Arc::new(GroupDatum::from_spec(&spec)?))
}

pub fn load_module(path: &Path) -> Result<ModuleRep, CliError> {
    let file: ModuleFile = serde_json::from_str(&read(path)?)?;
    Ok(ModuleRep::from_file(file)?)
}

fn parse_weight(s: &str) -> Result<Weight, CliError> {
    Ok(s.parse::<Weight>()?)
}

/// Comma-separated band parameters.
pub fn parse_etas(s: &str) -> Result<Vec<EtaParam>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| EtaParam::parse(p).map_err(CliError::from))
        .collect()
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Failed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize>(fmt: Format, v: &T, text: impl FnOnce(&T) -> String, ok: bool) -> Result<Output, CliError> {
    let stdout = match fmt {
        Format::Json => json(v)?,
        Format::Text => text(v),
    };
    Ok(Output {
        stdout,
        code: if ok { 0 } else { EXIT_FAILED },
    })
}

/// Factors as a list, since JSON object keys must be strings.
fn factors_list<S: serde::Serializer>(f: &Factors, ser: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        l: u64,
        lambda: &'a Weight,
        multiplicity: usize,
    }
    ser.collect_seq(f.iter().map(|(k, &multiplicity)| Entry {
        l: k.l,
        lambda: &k.lambda,
        multiplicity,
    }))
}

fn factors_text(f: &Factors) -> String {
    if f.is_empty() {
        return "0".into();
    }
    f.iter()
        .map(|(k, v)| if *v == 1 { k.to_string() } else { format!("{v} {k}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Serialize)]
pub struct DatumReport {
    pub kind: DatumKind,
    pub orders: Vec<u64>,
    /// `ρ = ζ_N^{rho_exp}` with `N` the field order.
    pub rho_exp: u64,
    pub field_order: u64,
    pub n: u64,
    pub m: u64,
    #[serde(rename = "K")]
    pub k: usize,
    pub counts: BTreeMap<u64, u64>,
}

pub fn datum_report(d: &GroupDatum) -> DatumReport {
    DatumReport {
        kind: d.kind(),
        orders: d.group().orders().to_vec(),
        rho_exp: d.rho_exp(),
        field_order: d.field_order(),
        n: d.n(),
        m: d.m(),
        k: d.kernel_k().len(),
        counts: d.simple_counts(),
    }
}

fn cmd_datum(d: &GroupDatum, fmt: Format) -> Result<Output, CliError> {
    let r = datum_report(d);
    render(
        fmt,
        &r,
        |r| {
            let mut s = String::new();
            let _ = writeln!(s, "kind        {}", r.kind);
            let _ = writeln!(s, "group       Z{:?}", r.orders);
            let _ = writeln!(s, "rho         zeta_{}^{}", r.field_order, r.rho_exp);
            let _ = writeln!(s, "n           {}", r.n);
            let _ = writeln!(s, "m           {}", r.m);
            let _ = writeln!(s, "|K|         {}", r.k);
            let _ = writeln!(s, "simples     dim  count");
            for (dim, c) in &r.counts {
                let _ = writeln!(s, "            {dim:>3}  {c:>5}");
            }
            s
        },
        true,
    )
}

#[derive(Serialize)]
struct WeightRow {
    weight: Weight,
    l: u64,
    d: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    top: Option<TopSubclass>,
    sigma: Weight,
    tau: Weight,
}

fn cmd_weights(d: &GroupDatum, fmt: Format) -> Result<Output, CliError> {
    let rows: Vec<WeightRow> = d
        .enumerate_weights()
        .into_iter()
        .map(|c| WeightRow {
            sigma: d.sigma(&c.weight),
            tau: d.tau(&c.weight, 1),
            weight: c.weight,
            l: c.l,
            d: c.d,
            top: c.top,
        })
        .collect();
    render(
        fmt,
        &rows,
        |rows| {
            let mut s = format!("{:<16} {:>3} {:>3} {:<9} {:<16} {:<16}\n", "weight", "l", "d", "top", "sigma", "tau");
            for r in rows {
                let top = match r.top {
                    Some(TopSubclass::Generic) => "I'_n",
                    Some(TopSubclass::Boundary) => "I''_n",
                    None => "-",
                };
                let _ = writeln!(
                    s,
                    "{:<16} {:>3} {:>3} {:<9} {:<16} {:<16}",
                    r.weight.to_string(),
                    r.l,
                    r.d,
                    top,
                    r.sigma.to_string(),
                    r.tau.to_string()
                );
            }
            s
        },
        true,
    )
}

fn cmd_build(d: &Arc<GroupDatum>, tag: &FamilyTag, out: Option<&Path>) -> Result<Output, CliError> {
    let m = constructors::build(d, tag)?;
    let text = json(&m.to_file())?;
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
            Ok(Output {
                stdout: format!("{tag}: dim {} written to {}\n", m.dim(), path.display()),
                code: 0,
            })
        }
        None => Ok(Output { stdout: text, code: 0 }),
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub relations: RelationReport,
    pub all_hold: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<(Weight, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_kernel_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_kernel_dim: Option<usize>,
}

fn cmd_verify(m: &ModuleRep, fmt: Format) -> Result<Output, CliError> {
    let relations = m.verify_relations();
    let all_hold = relations.all_hold();
    let weights = m.weight_spaces().ok().map(|w| w.multiset());
    let r = VerifyReport {
        dim: m.dim(),
        all_hold,
        weights,
        x_kernel_dim: all_hold.then(|| m.x_kernel().cols()),
        xi_kernel_dim: all_hold.then(|| m.xi_kernel().cols()),
        relations,
    };
    render(
        fmt,
        &r,
        |r| {
            let mut s = format!("dim {}\n", r.dim);
            for (name, check) in &r.relations.checks {
                let _ = writeln!(s, "  {:<28} {}", name, if check.holds { "ok" } else { "FAIL" });
            }
            if let (Some(a), Some(b)) = (r.x_kernel_dim, r.xi_kernel_dim) {
                let _ = writeln!(s, "dim ker x = {a}, dim ker xi = {b}");
            }
            let _ = writeln!(s, "{}", if r.all_hold { "all relations hold" } else { "relations FAIL" });
            s
        },
        all_hold,
    )
}

#[derive(Serialize)]
pub struct Layer {
    pub dim: usize,
    #[serde(serialize_with = "factors_list")]
    pub factors: Factors,
}

#[derive(Serialize)]
pub struct Analysis {
    pub dim: usize,
    pub end_dim: usize,
    pub end_local_dim: usize,
    pub indecomposable: bool,
    pub loewy: LoewyType,
    #[serde(serialize_with = "factors_list")]
    pub socle: Factors,
    #[serde(serialize_with = "factors_list")]
    pub head: Factors,
    /// Dimensions of `rad^i M`.
    pub radical_series: Vec<usize>,
    /// Dimensions and new constituents of `soc^i M`.
    pub socle_series: Vec<Layer>,
    pub composition_length: usize,
    pub family: Option<FamilyTag>,
}

/// Structure of a module that satisfies the relations.
pub fn analyze(m: &ModuleRep, etas: &[EtaParam], seed: u64) -> Result<Analysis, HomologyError> {
    if m.dim() == 0 {
        return Err(HomologyError::ZeroModule);
    }
    let end_dim = homology::hom_space(m, m)?.len();
    let end_local_dim = homology::end_local_dim(m)?;
    let (_, socle) = homology::socle_with_factors(m)?;
    let (_, head) = homology::radical_with_factors(m)?;
    let rad: Vec<usize> = homology::radical_series(m)?.iter().map(|s| s.module.dim()).collect();
    let soc: Vec<Layer> = homology::socle_series(m)?
        .into_iter()
        .map(|(s, f)| Layer {
            dim: s.module.dim(),
            factors: f,
        })
        .collect();
    let loewy = LoewyType {
        s: homology::factor_length(&head),
        t: homology::factor_length(&socle),
        rl: rad.len() - 1,
    };
    let composition_length = soc.iter().map(|l| homology::factor_length(&l.factors)).sum();
    let family = if end_local_dim == 1 {
        match_family(m, loewy, etas, seed)?
    } else {
        None
    };
    Ok(Analysis {
        dim: m.dim(),
        end_dim,
        end_local_dim,
        indecomposable: end_local_dim == 1,
        loewy,
        socle,
        head,
        radical_series: rad,
        socle_series: soc,
        composition_length,
        family,
    })
}

/// Candidate tags consistent with the type and dimension of `m`, built
/// from its weight support.
fn family_candidates(m: &ModuleRep, loewy: LoewyType, etas: &[EtaParam]) -> Result<Vec<FamilyTag>, HomologyError> {
    let d = m.datum_arc();
    let (n, mm) = (d.n(), d.m());
    let dim = m.dim() as u64;
    let support: Vec<Weight> = m.weight_spaces()?.weights.clone();
    let mut out = Vec::new();
    for w in &support {
        let l = d.class_of(w);
        let mut push = |tag: FamilyTag| out.push(tag);
        match (loewy.rl, loewy.s, loewy.t) {
            (1, 1, 1) if l == dim => push(FamilyTag::new(Family::V, l, w.clone())),
            (3, 1, 1) if l < n && dim == 2 * n => push(FamilyTag::new(Family::P, l, w.clone())),
            (2, s, t) if l < n => {
                if s == t + 1 {
                    push(FamilyTag::new(Family::OmegaPower, l, w.clone()).with_s(t as i64));
                } else if t == s + 1 {
                    push(FamilyTag::new(Family::OmegaPower, l, w.clone()).with_s(-(s as i64)));
                } else if s == t {
                    let t = t as u64;
                    if mm > 1 {
                        push(FamilyTag::new(Family::Tt, l, w.clone()).with_t(t));
                        push(FamilyTag::new(Family::Ttbar, l, w.clone()).with_t(t));
                        if t.is_multiple_of(mm) {
                            for eta in etas.iter().filter(|e| !matches!(e, EtaParam::Infinity)) {
                                if matches!(eta, EtaParam::Finite(c) if c.is_zero()) {
                                    continue;
                                }
                                push(FamilyTag::new(Family::Mt, l, w.clone()).with_t(t / mm).with_eta(eta.clone()));
                            }
                        }
                    } else {
                        for eta in etas {
                            push(FamilyTag::new(Family::Wt, l, w.clone()).with_t(t).with_eta(eta.clone()));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

fn match_family(m: &ModuleRep, loewy: LoewyType, etas: &[EtaParam], seed: u64) -> Result<Option<FamilyTag>, HomologyError> {
    let target = m.weight_spaces()?.multiset();
    for tag in family_candidates(m, loewy, etas)? {
        let Ok(c) = constructors::build(m.datum_arc(), &tag) else {
            continue;
        };
        if c.dim() != m.dim() || c.weight_spaces()?.multiset() != target {
            continue;
        }
        if homology::is_isomorphic(m, &c, seed)?.is_yes() {
            return Ok(Some(tag));
        }
    }
    Ok(None)
}

fn cmd_analyze(m: &ModuleRep, etas: &[EtaParam], fmt: Format, seed: u64) -> Result<Output, CliError> {
    let rel = m.verify_relations();
    if !rel.all_hold() {
        return Err(CliError::Failed(format!("relations fail: {}", rel.failures().join(", "))));
    }
    let a = analyze(m, etas, seed)?;
    render(
        fmt,
        &a,
        |a| {
            let mut s = String::new();
            let _ = writeln!(s, "dim               {}", a.dim);
            let _ = writeln!(s, "dim End           {}", a.end_dim);
            let _ = writeln!(s, "dim End/J         {}", a.end_local_dim);
            let _ = writeln!(s, "indecomposable    {}", a.indecomposable);
            let _ = writeln!(s, "type              {}", a.loewy);
            let _ = writeln!(s, "length            {}", a.composition_length);
            let _ = writeln!(s, "socle             {}", factors_text(&a.socle));
            let _ = writeln!(s, "head              {}", factors_text(&a.head));
            let _ = writeln!(s, "radical series    {:?}", a.radical_series);
            for (i, l) in a.socle_series.iter().enumerate() {
                let _ = writeln!(s, "soc^{}             dim {:<4} new {}", i + 1, l.dim, factors_text(&l.factors));
            }
            let fam = a
                .family
                .as_ref()
                .map_or_else(|| "outside classified grid or bounds".to_string(), ToString::to_string);
            let _ = writeln!(s, "family            {fam}");
            s
        },
        true,
    )
}

fn cmd_compare(a: &ModuleRep, b: &ModuleRep, fmt: Format, seed: u64) -> Result<Output, CliError> {
    for (name, m) in [("first", a), ("second", b)] {
        let rel = m.verify_relations();
        if !rel.all_hold() {
            return Err(CliError::Failed(format!("{name} module: relations fail: {}", rel.failures().join(", "))));
        }
    }
    let v = homology::is_isomorphic(a, b, seed)?;
    render(fmt, &v, |v| format!("{v}\n"), true)
}

/// Which sequences `ar check` builds.
pub struct ArRequest {
    pub families: Vec<ArFamily>,
    pub max_t: u64,
    pub l: Option<u64>,
    pub lambda: Option<Weight>,
    pub etas: Vec<EtaParam>,
}

struct ArJob {
    family: ArFamily,
    l: u64,
    w: Weight,
    t: u64,
    eta: Option<EtaParam>,
}

/// Builds and checks every requested sequence; one report each, in a
/// deterministic order.
pub fn ar_reports(d: &Arc<GroupDatum>, req: &ArRequest, seed: u64) -> Result<Vec<SesReport>, CliError> {
    let mut jobs = Vec::new();
    for &family in &req.families {
        if !family.applies(d.m()) {
            continue;
        }
        for l in 1..d.n() {
            if req.l.is_some_and(|x| x != l) {
                continue;
            }
            for w in d.weights_in_class(l) {
                if req.lambda.as_ref().is_some_and(|x| *x != w) {
                    continue;
                }
                let ts: Vec<u64> = if family == ArFamily::SyzygyHeart {
                    vec![0]
                } else {
                    (family.first_index()..=req.max_t).collect()
                };
                let etas: Vec<Option<EtaParam>> = match family {
                    ArFamily::MBand => req
                        .etas
                        .iter()
                        .filter(|e| matches!(e, EtaParam::Finite(c) if !c.is_zero()))
                        .cloned()
                        .map(Some)
                        .collect(),
                    ArFamily::WBand => req.etas.iter().cloned().map(Some).collect(),
                    _ => vec![None],
                };
                for t in ts {
                    for eta in &etas {
                        jobs.push(ArJob {
                            family,
                            l,
                            w: w.clone(),
                            t,
                            eta: eta.clone(),
                        });
                    }
                }
            }
        }
    }
    jobs.par_iter()
        .map(|j| {
            homology::build_ar_sequence(d, j.family, j.l, &j.w, j.t, j.eta.as_ref(), seed)
                .map(|b| b.report)
                .map_err(CliError::from)
        })
        .collect()
}

fn cmd_ar(d: &Arc<GroupDatum>, req: &ArRequest, fmt: Format, seed: u64) -> Result<Output, CliError> {
    let reports = ar_reports(d, req, seed)?;
    let ok = reports.iter().all(SesReport::is_ar_candidate);
    render(
        fmt,
        &reports,
        |rs| {
            let mut s = format!(
                "{:<44} {:<14} {:>5} {:>5} {:>6} {:>9} {:>6}  {}\n",
                "sequence", "dims", "exact", "split", "ends", "A~O^2C", "A~exp", "verdict"
            );
            for r in rs {
                let ends = format!(
                    "{}/{}",
                    r.left_end_local_dim.map_or("-".into(), |v| v.to_string()),
                    r.right_end_local_dim.map_or("-".into(), |v| v.to_string())
                );
                let label = |v: &Option<Verdict>| v.as_ref().map_or("-", Verdict::label);
                let _ = writeln!(
                    s,
                    "{:<44} {:<14} {:>5} {:>5} {:>6} {:>9} {:>6}  {}",
                    r.name,
                    format!("{:?}", r.dims),
                    r.exact,
                    r.split,
                    ends,
                    label(&r.left_is_translate),
                    label(&r.left_matches_expected),
                    if r.is_ar_candidate() { "PASS" } else { "FAIL" }
                );
            }
            let passed = rs.iter().filter(|r| r.is_ar_candidate()).count();
            let _ = writeln!(s, "{passed}/{} sequences pass", rs.len());
            s
        },
        ok,
    )
}

/// Bounds for [`classify`].
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyBounds {
    pub max_t: u64,
    pub max_s: u64,
    pub etas: Vec<EtaParam>,
    pub budget: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub tag: FamilyTag,
    pub dim: usize,
    pub relations_hold: bool,
    pub end_local_dim: usize,
    pub loewy: LoewyType,
    pub expected_loewy: LoewyType,
    pub checks_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub datum: DatumSpec,
    pub bounds: ClassifyBounds,
    pub entries: Vec<ManifestEntry>,
    /// Set when the dimension budget cut the enumeration short.
    pub truncated: bool,
    pub skipped: Vec<String>,
    /// Band parameters that do not apply to the datum and were dropped.
    pub ignored_etas: Vec<String>,
    pub counts: BTreeMap<Family, usize>,
    pub max_dim: usize,
    pub total_dim: usize,
    /// Index pairs certified isomorphic.
    pub isomorphic_pairs: Vec<(usize, usize)>,
    pub undecided_pairs: Vec<(usize, usize)>,
    /// Row `i` has `Y`, `N` or `?` against each entry `j`.
    pub distinctness: Vec<String>,
    pub all_distinct: bool,
    pub all_pass: bool,
}

/// Parameters, expected type and estimated dimension of every family member
/// within bounds, in a fixed order.
pub fn classification_grid(d: &GroupDatum, bounds: &ClassifyBounds) -> (Vec<(FamilyTag, LoewyType, usize)>, Vec<String>) {
    let (n, m) = (d.n(), d.m());
    let ty = |s: u64, t: u64, rl: usize| LoewyType {
        s: s as usize,
        t: t as usize,
        rl,
    };
    let mut out = Vec::new();
    let mut ignored = Vec::new();
    for c in d.enumerate_weights() {
        out.push((FamilyTag::new(Family::V, c.l, c.weight), ty(1, 1, 1), c.l as usize));
    }
    let finite_nonzero: Vec<EtaParam> = bounds
        .etas
        .iter()
        .filter(|e| matches!(e, EtaParam::Finite(c) if !c.is_zero()))
        .cloned()
        .collect();
    if m > 1 {
        for e in bounds.etas.iter().filter(|e| !finite_nonzero.contains(e)) {
            ignored.push(e.to_string());
        }
    }
    for l in 1..n {
        for w in d.weights_in_class(l) {
            out.push((FamilyTag::new(Family::P, l, w.clone()), ty(1, 1, 3), 2 * n as usize));
        }
        for s in 1..=bounds.max_s {
            for w in d.weights_in_class(l) {
                let dim = (s * n + if s % 2 == 0 { l } else { n - l }) as usize;
                out.push((FamilyTag::new(Family::OmegaPower, l, w.clone()).with_s(s as i64), ty(s + 1, s, 2), dim));
                out.push((FamilyTag::new(Family::OmegaPower, l, w.clone()).with_s(-(s as i64)), ty(s, s + 1, 2), dim));
            }
        }
        for t in 1..=bounds.max_t {
            let dim = (t * n) as usize;
            if m > 1 {
                for w in d.weights_in_class(l) {
                    out.push((FamilyTag::new(Family::Tt, l, w.clone()).with_t(t), ty(t, t, 2), dim));
                    out.push((FamilyTag::new(Family::Ttbar, l, w.clone()).with_t(t), ty(t, t, 2), dim));
                }
                for w in tau_orbit_representatives(d, l) {
                    for eta in &finite_nonzero {
                        out.push((
                            FamilyTag::new(Family::Mt, l, w.clone()).with_t(t).with_eta(eta.clone()),
                            ty(t * m, t * m, 2),
                            dim * m as usize,
                        ));
                    }
                }
            } else {
                for w in d.weights_in_class(l) {
                    for eta in &bounds.etas {
                        out.push((
                            FamilyTag::new(Family::Wt, l, w.clone()).with_t(t).with_eta(eta.clone()),
                            ty(t, t, 2),
                            dim,
                        ));
                    }
                }
            }
        }
    }
    (out, ignored)
}

/// Least weight of each `τ`-orbit in `I_l`.
pub fn tau_orbit_representatives(d: &GroupDatum, l: u64) -> Vec<Weight> {
    let ws = d.weights_in_class(l);
    ws.iter()
        .filter(|w| (1..d.m() as i64).all(|k| d.tau(w, k) >= **w))
        .cloned()
        .collect()
}

/// Builds every family member within bounds, checks relations,
/// indecomposability and type, and decides all pairwise isomorphisms.
pub fn classify(d: &Arc<GroupDatum>, bounds: &ClassifyBounds, seed: u64) -> Result<Manifest, CliError> {
    let (grid, ignored_etas) = classification_grid(d, bounds);
    let mut planned = Vec::new();
    let mut skipped = Vec::new();
    let mut total = 0;
    for (tag, ty, dim) in grid {
        if total + dim > bounds.budget {
            skipped.push(tag.to_string());
            continue;
        }
        total += dim;
        planned.push((tag, ty));
    }
    let built: Vec<(ManifestEntry, ModuleRep)> = planned
        .par_iter()
        .map(|(tag, ty)| -> Result<_, CliError> {
            let m = constructors::build(d, tag)?;
            let relations_hold = m.verify_relations().all_hold();
            let end_local_dim = homology::end_local_dim(&m)?;
            let loewy = homology::loewy_type(&m)?;
            let entry = ManifestEntry {
                name: tag.to_string(),
                tag: tag.clone(),
                dim: m.dim(),
                relations_hold,
                end_local_dim,
                loewy,
                expected_loewy: *ty,
                checks_pass: relations_hold && end_local_dim == 1 && loewy == *ty,
            };
            Ok((entry, m))
        })
        .collect::<Result<_, _>>()?;
    let k = built.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let verdicts: Vec<Verdict> = pairs
        .par_iter()
        .map(|&(i, j)| homology::is_isomorphic(&built[i].1, &built[j].1, seed))
        .collect::<Result<_, _>>()?;
    let mut grid = vec![vec!['N'; k]; k];
    let mut isomorphic_pairs = Vec::new();
    let mut undecided_pairs = Vec::new();
    for (i, row) in grid.iter_mut().enumerate() {
        row[i] = 'Y';
    }
    for (&(i, j), v) in pairs.iter().zip(&verdicts) {
        let c = match v {
            Verdict::Yes { .. } => {
                isomorphic_pairs.push((i, j));
                'Y'
            }
            Verdict::No { .. } => 'N',
            Verdict::Undecided { .. } => {
                undecided_pairs.push((i, j));
                '?'
            }
        };
        grid[i][j] = c;
        grid[j][i] = c;
    }
    let entries: Vec<ManifestEntry> = built.into_iter().map(|(e, _)| e).collect();
    let mut counts = BTreeMap::new();
    for e in &entries {
        *counts.entry(e.tag.family).or_insert(0) += 1;
    }
    let all_distinct = isomorphic_pairs.is_empty() && undecided_pairs.is_empty();
    let all_pass = entries.iter().all(|e| e.checks_pass) && all_distinct;
    Ok(Manifest {
        datum: d.to_spec(),
        bounds: bounds.clone(),
        max_dim: entries.iter().map(|e| e.dim).max().unwrap_or(0),
        total_dim: total,
        entries,
        truncated: !skipped.is_empty(),
        skipped,
        ignored_etas,
        counts,
        isomorphic_pairs,
        undecided_pairs,
        distinctness: grid.into_iter().map(|r| r.into_iter().collect()).collect(),
        all_distinct,
        all_pass,
    })
}

fn cmd_classify(d: &Arc<GroupDatum>, bounds: &ClassifyBounds, fmt: Format, seed: u64) -> Result<Output, CliError> {
    let start = std::time::Instant::now();
    let manifest = classify(d, bounds, seed)?;
    // wall time goes to stderr so that stdout stays reproducible
    eprintln!("classify: {:.2?}", start.elapsed());
    render(
        fmt,
        &manifest,
        |mf| {
            let mut s = format!(
                "{:>4}  {:<34} {:>4}  {:<16} {:>5} {:>6}  {}\n",
                "#", "module", "dim", "type", "rels", "End/J", "check"
            );
            for (i, e) in mf.entries.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{:>4}  {:<34} {:>4}  {:<16} {:>5} {:>6}  {}",
                    i,
                    e.name,
                    e.dim,
                    e.loewy.to_string(),
                    if e.relations_hold { "ok" } else { "FAIL" },
                    e.end_local_dim,
                    if e.checks_pass { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(s, "counts:");
            for (f, c) in &mf.counts {
                let _ = writeln!(s, "  {f:<12} {c}");
            }
            let _ = writeln!(s, "entries {}  max dim {}  total dim {}", mf.entries.len(), mf.max_dim, mf.total_dim);
            if !mf.ignored_etas.is_empty() {
                let _ = writeln!(s, "ignored eta values: {}", mf.ignored_etas.join(", "));
            }
            if mf.truncated {
                let _ = writeln!(s, "TRUNCATED by budget: {} members skipped", mf.skipped.len());
            }
            let _ = writeln!(
                s,
                "pairwise: {} isomorphic, {} undecided; all distinct: {}",
                mf.isomorphic_pairs.len(),
                mf.undecided_pairs.len(),
                mf.all_distinct
            );
            s
        },
        manifest.all_pass,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::samples::*;

    #[test]
    fn grid_dimension_estimates_match_builds() {
        let d = Arc::new(z4_nilpotent());
        let bounds = ClassifyBounds {
            max_t: 2,
            max_s: 2,
            etas: vec![EtaParam::from_int(1)],
            budget: DEFAULT_BUDGET,
        };
        for (tag, _, dim) in classification_grid(&d, &bounds).0 {
            assert_eq!(constructors::build(&d, &tag).unwrap().dim(), dim, "{tag}");
        }
    }

    #[test]
    fn tau_orbits_cover_class() {
        let d = z4_nilpotent();
        let reps = tau_orbit_representatives(&d, 1);
        assert_eq!(reps.len() as u64 * d.m(), d.weights_in_class(1).len() as u64);
    }

    #[test]
    fn parse_errors_are_invalid_input() {
        let (code, _, err) = run(["drinfeld-reps", "datum", "check", "/nonexistent.json"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("nonexistent"));
        let (code, _, _) = run(["drinfeld-reps", "bogus"]);
        assert_eq!(code, EXIT_INVALID);
    }

    #[test]
    fn budget_truncates() {
        let d = Arc::new(z2_nilpotent());
        let bounds = ClassifyBounds {
            max_t: 1,
            max_s: 1,
            etas: vec![EtaParam::from_int(1)],
            budget: 6,
        };
        let mf = classify(&d, &bounds, 0).unwrap();
        assert!(mf.truncated);
        assert!(mf.total_dim <= 6);
    }
}
