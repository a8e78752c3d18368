//! Argument parsing and subcommand dispatch.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use schemeforge_core::chartab::{
    closed_form_mstar, closed_form_psl2, compare_tables, double_coset_table_checked, scheme_character_table_with,
    transfer_to_group_table, verify_candidate_table, verify_orthogonality, CandidateReport, CharacterTable, ChartabError,
    GroupCharacterTable,
};
use schemeforge_core::loopcore::{inner_orbits, loop_scheme, OrbitPolicy, TableLoop, EXACT_ORBIT_LIMIT};
use schemeforge_core::permgroup::linear::{psl2, sl2, LinearAction};
use schemeforge_core::permgroup::{closure, group_scheme, Permutation, PermutationGroup};
use schemeforge_core::pipeline::paige_scheme;
use schemeforge_core::scheme::{fuse, intersection_numbers, verify_scheme_axioms, AssociationScheme, RepPolicy};
use schemeforge_core::zorn::PaigeLoop;

use crate::config::{OutputFormat, Overrides, RunConfig, CAP_ELEMENTS_ENV};
use crate::error::CliError;
use crate::export;
use crate::formats::{
    parse_json, to_json, Document, GroupJson, GroupTableJson, PaigeLoopJson, SchemeJson, TableJson,
};
use crate::ingest::{parse_generators, parse_loop_table};
use crate::parallel::{map_ordered, orbitals_parallel};

#[derive(Debug, Parser)]
#[command(name = "schemeforge", version, about = "Association schemes and character tables from groups and Moufang loops")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// RNG seed, decimal or 0x-prefixed hex [default: 0xA55C]
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,
    /// TOML run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write results here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report errors as JSON on stderr
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest Paige loop order to build
    #[arg(long, global = true)]
    pub cap_elements: Option<usize>,
    /// Largest n² for explicit relation matrices
    #[arg(long, global = true)]
    pub cap_relations: Option<usize>,
    /// Largest permutation group order to enumerate
    #[arg(long, global = true)]
    pub cap_order: Option<usize>,
    #[arg(long, global = true)]
    pub eigen_tol: Option<f64>,
    #[arg(long, global = true)]
    pub compare_tol: Option<f64>,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            format: self.format,
            threads: self.threads,
            cap_elements: self.cap_elements,
            cap_relations: self.cap_relations,
            cap_order: self.cap_order,
            eigen_tol: self.eigen_tol,
            compare_tol: self.compare_tol,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Paige's loop M*(q)
    #[command(subcommand)]
    Paige(PaigeCmd),
    /// Permutation groups
    #[command(subcommand)]
    Group(GroupCmd),
    /// Association schemes
    #[command(subcommand)]
    Scheme(SchemeCmd),
    /// Character tables
    #[command(subcommand)]
    Chartable(ChartableCmd),
    /// Re-emit a document in the chosen --format
    Export(InputArgs),
}

/// Where a single document comes from; stdin when no file is named.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input file (`-` for stdin)
    pub input: Option<PathBuf>,
    /// Read from stdin
    #[arg(long, conflicts_with = "input")]
    pub stdin: bool,
}

#[derive(Debug, Subcommand)]
pub enum PaigeCmd {
    /// Element list of M*(q)
    Build {
        #[arg(long)]
        q: u32,
    },
    /// Character table of the scheme of M*(q)
    Table {
        #[arg(long)]
        q: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Action {
    ProjectiveLine,
    RightRegular,
    Vectors,
}

impl From<Action> for LinearAction {
    fn from(a: Action) -> Self {
        match a {
            Action::ProjectiveLine => LinearAction::ProjectiveLine,
            Action::RightRegular => LinearAction::RightRegular,
            Action::Vectors => LinearAction::Vectors,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    Psl2 {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "projective-line")]
        action: Action,
    },
    Sl2 {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value = "vectors")]
        action: Action,
    },
    /// Close a generator file
    FromFile {
        #[command(flatten)]
        input: InputArgs,
        /// Degree for cycle-notation generators
        #[arg(long)]
        degree: Option<usize>,
    },
}

/// A group given by a generator file, or by group JSON / generators on
/// stdin.
#[derive(Debug, Clone, Args)]
pub struct GroupSource {
    #[arg(long)]
    pub gens: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Subcommand)]
pub enum SchemeCmd {
    /// Orbitals of a transitive group
    Orbitals {
        #[command(flatten)]
        group: GroupSource,
        /// Number of points (the degree)
        #[arg(long)]
        points: Option<usize>,
    },
    /// Conjugacy-class scheme of a group
    GroupScheme {
        #[command(flatten)]
        group: GroupSource,
    },
    /// Inner-orbit scheme of a loop
    LoopScheme {
        /// Use M*(q)
        #[arg(long, conflicts_with = "input")]
        paige: Option<u32>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Merge classes, e.g. `--cells 1,2` or `--cells "1,2;3,4"`
    Fuse {
        #[arg(long)]
        cells: String,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check the scheme axioms
    Verify {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChartableCmd {
    /// Character table of a scheme
    Compute {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Closed-form table of M*(q), q a power of 2
    OracleMstar {
        #[arg(long)]
        q: u64,
    },
    /// Closed-form table of the group scheme of PSL(2,q), q a power of 2
    OraclePsl2 {
        #[arg(long)]
        q: u64,
    },
    /// Orthogonality (and, with --scheme, the eigenvalue relations) of one
    /// or more tables
    Verify {
        /// Table files; stdin when none
        inputs: Vec<PathBuf>,
        #[arg(long, conflicts_with = "inputs")]
        stdin: bool,
        /// Scheme the tables claim to belong to
        #[arg(long)]
        scheme: Option<PathBuf>,
    },
    /// Match two tables up to row and column order
    Compare { first: PathBuf, second: PathBuf },
    /// Group character table from a group-scheme table
    Transfer {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Coset-scheme table from double cosets, checked against the orbitals
    DoubleCoset {
        #[arg(long, conflicts_with = "gens")]
        psl2: Option<u32>,
        #[arg(long)]
        gens: Option<PathBuf>,
        /// Take H as the stabilizer of this point
        #[arg(long, conflicts_with = "subgroup")]
        stabilizer: Option<usize>,
        /// Generator file for H
        #[arg(long)]
        subgroup: Option<PathBuf>,
    },
}

/// What a subcommand produced.
enum Output {
    Table(CharacterTable),
    GroupTable(GroupCharacterTable),
    Scheme(SchemeJson),
    Paige(PaigeLoopJson),
    Group(GroupJson),
    /// A verification report and whether it passed.
    Report(Value, bool),
}

struct Ctx<'a> {
    cfg: RunConfig,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn read(&mut self, input: &InputArgs) -> Result<String, CliError> {
        match &input.input {
            Some(p) if p.as_os_str() != "-" => read_file(p),
            _ => self.read_stdin(),
        }
    }

    fn read_stdin(&mut self) -> Result<String, CliError> {
        let mut s = String::new();
        self.stdin.read_to_string(&mut s).map_err(|e| CliError::io("<stdin>", e))?;
        Ok(s)
    }

    fn read_path(&mut self, p: &Path) -> Result<String, CliError> {
        if p.as_os_str() == "-" {
            self.read_stdin()
        } else {
            read_file(p)
        }
    }

    fn scheme(&mut self, input: &InputArgs) -> Result<AssociationScheme, CliError> {
        let text = self.read(input)?;
        parse_json::<SchemeJson>(&text)?.to_scheme(self.cfg.caps.elements)
    }

    fn table(&mut self, input: &InputArgs) -> Result<CharacterTable, CliError> {
        let text = self.read(input)?;
        parse_json::<TableJson>(&text)?.to_table()
    }

    /// Generators from `--gens`, or from stdin as group JSON or a generator
    /// list.
    fn generators(&mut self, src: &GroupSource, degree: Option<usize>) -> Result<Vec<Permutation>, CliError> {
        let text = match &src.gens {
            Some(p) => read_file(p)?,
            None => self.read(&src.input)?,
        };
        if text.trim_start().starts_with('{') {
            let g: GroupJson = parse_json(&text)?;
            return g.generators.into_iter().map(|im| Permutation::new(im).map_err(CliError::from)).collect();
        }
        Ok(parse_generators(&text, degree)?)
    }

    fn group(&mut self, src: &GroupSource, degree: Option<usize>) -> Result<PermutationGroup, CliError> {
        let gens = self.generators(src, degree)?;
        Ok(closure(gens, self.cfg.caps.order)?)
    }

    fn scheme_out(&self, s: &AssociationScheme) -> Result<Output, CliError> {
        Ok(Output::Scheme(SchemeJson::from_scheme(s, self.cfg.caps.relations)?))
    }

    fn table_of(&self, s: &AssociationScheme) -> Result<CharacterTable, CliError> {
        Ok(scheme_character_table_with(s, self.cfg.seed, self.cfg.tolerances.eigen)?.1)
    }
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))
}

/// `"1,2;3,4"` → `[[0], [1,2], [3,4], …]`, with every unmentioned class as
/// its own cell.
fn parse_cells(spec: &str, classes: usize) -> Result<Vec<Vec<usize>>, CliError> {
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for part in spec.split([';', '|']).map(str::trim).filter(|p| !p.is_empty()) {
        let cell = part
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad class index {t:?} in --cells"))))
            .collect::<Result<Vec<_>, _>>()?;
        cells.push(cell);
    }
    let mentioned: Vec<usize> = cells.iter().flatten().copied().collect();
    if let Some(&c) = mentioned.iter().find(|&&c| c >= classes) {
        return Err(CliError::Usage(format!("class {c} does not exist (the scheme has {classes} classes)")));
    }
    for c in 0..classes {
        if !mentioned.contains(&c) {
            cells.push(vec![c]);
        }
    }
    cells.iter_mut().for_each(|c| c.sort_unstable());
    cells.sort_by_key(|c| c.first().copied());
    Ok(cells)
}

/// Column orders that carry the table's valencies onto the scheme's, with
/// the identity class fixed; at most `limit` of them.
fn column_alignments(from: &[u64], to: &[usize], limit: usize) -> Vec<Vec<usize>> {
    fn extend(j: usize, from: &[u64], to: &[usize], used: &mut [bool], cols: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if j == from.len() {
            out.push(cols.clone());
            return;
        }
        for t in 1..to.len() {
            if !used[t] && to[t] as u64 == from[j] {
                used[t] = true;
                cols.push(t);
                extend(j + 1, from, to, used, cols, out, limit);
                cols.pop();
                used[t] = false;
            }
        }
    }
    let mut out = Vec::new();
    if from.len() != to.len() || from.is_empty() {
        return out;
    }
    let mut used = vec![false; to.len()];
    used[0] = true;
    extend(1, from, to, &mut used, &mut vec![0], &mut out, limit);
    out
}

/// Valency-preserving column orders tried when matching a table to a scheme.
const MAX_ALIGNMENTS: usize = 5040;

fn table_report(t: &CharacterTable, scheme: Option<&AssociationScheme>, tol: f64) -> Result<(Value, bool), CliError> {
    let orth = verify_orthogonality(&t.p, &t.valencies, &t.multiplicities, t.n, tol);
    let mut passed = orth.passed;
    let mut report = json!({
        "orthogonality": {
            "row_residual": orth.row_residual,
            "column_residual": orth.column_residual,
            "passed": orth.passed,
        },
    });
    if let Some(s) = scheme {
        let b = intersection_numbers(s, RepPolicy::Default)?;
        let mut best: Option<(Vec<usize>, CandidateReport)> = None;
        for cols in column_alignments(&t.valencies, s.valencies(), MAX_ALIGNMENTS) {
            let c = verify_candidate_table(&t.permute_columns(&cols).p, &b, tol);
            let better = best.as_ref().is_none_or(|(_, r)| c.eigen_residual < r.eigen_residual);
            let done = c.passed;
            if done || better {
                best = Some((cols, c));
            }
            if done {
                break;
            }
        }
        report["candidate"] = match best {
            Some((cols, c)) => {
                passed &= c.passed;
                json!({
                    "columns": cols,
                    "eigen_residual": c.eigen_residual,
                    "shape_residual": c.shape_residual,
                    "passed": c.passed,
                    "failure": c.failure,
                })
            }
            None => {
                passed = false;
                json!({ "passed": false, "failure": "valencies do not match the scheme" })
            }
        };
    }
    report["passed"] = json!(passed);
    Ok((report, passed))
}

fn run_command(cmd: &Command, ctx: &mut Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg.clone();
    match cmd {
        Command::Paige(PaigeCmd::Build { q }) => {
            Ok(Output::Paige(PaigeLoopJson::from(&PaigeLoop::build(*q, cfg.caps.elements)?)))
        }
        Command::Paige(PaigeCmd::Table { q }) => {
            let ps = paige_scheme(*q, cfg.seed, cfg.caps.elements)?;
            Ok(Output::Table(ctx.table_of(&ps.scheme)?))
        }
        Command::Group(g) => {
            let group = match g {
                GroupCmd::Psl2 { q, action } => psl2(*q, (*action).into())?,
                GroupCmd::Sl2 { q, action } => sl2(*q, (*action).into())?,
                GroupCmd::FromFile { input, degree } => {
                    ctx.group(&GroupSource { gens: None, input: input.clone() }, *degree)?
                }
            };
            if group.order()? > cfg.caps.order {
                return Err(CliError::Cap(format!("group order exceeds --cap-order {}", cfg.caps.order)));
            }
            Ok(Output::Group(GroupJson::from_group(&group)?))
        }
        Command::Scheme(SchemeCmd::Orbitals { group, points }) => {
            let gens = ctx.generators(group, *points)?;
            let g = PermutationGroup::from_generators(gens)?;
            let n = points.unwrap_or(g.degree());
            let s = orbitals_parallel(&g, n, cfg.caps.relations, cfg.threads)?;
            ctx.scheme_out(&s)
        }
        Command::Scheme(SchemeCmd::GroupScheme { group }) => {
            let g = ctx.group(group, None)?;
            ctx.scheme_out(&group_scheme(&g, cfg.caps.relations)?)
        }
        Command::Scheme(SchemeCmd::LoopScheme { paige, input }) => {
            let s = match paige {
                Some(q) => paige_scheme(*q, cfg.seed, cfg.caps.elements)?.scheme,
                None => {
                    let lp: Arc<TableLoop> = Arc::new(parse_loop_table(&ctx.read(input)?)?);
                    let policy = if lp.table().len() <= EXACT_ORBIT_LIMIT * EXACT_ORBIT_LIMIT {
                        OrbitPolicy::Exact
                    } else {
                        OrbitPolicy::randomized(cfg.seed)
                    };
                    let classes = inner_orbits(&lp, policy)?;
                    loop_scheme(lp, &classes)?
                }
            };
            ctx.scheme_out(&s)
        }
        Command::Scheme(SchemeCmd::Fuse { cells, input }) => {
            let s = ctx.scheme(input)?;
            let cells = parse_cells(cells, s.class_count())?;
            ctx.scheme_out(&fuse(&s, &cells)?)
        }
        Command::Scheme(SchemeCmd::Verify { input }) => {
            let s = ctx.scheme(input)?;
            let r = verify_scheme_axioms(&s);
            let violations: Vec<String> = r.violations.iter().map(ToString::to_string).collect();
            let report = json!({
                "passed": r.passed,
                "commutative": r.commutative,
                "n": s.n(),
                "d": s.d(),
                "violations": violations,
            });
            Ok(Output::Report(report, r.passed))
        }
        Command::Chartable(c) => run_chartable(c, ctx),
        Command::Export(input) => {
            let text = ctx.read(input)?;
            Ok(match parse_json::<Document>(&text)? {
                Document::Table(t) => Output::Table(t.to_table()?),
                Document::GroupTable(g) => Output::GroupTable(group_table_from_json(g)?),
                Document::Scheme(s) => {
                    if let crate::formats::RelationsJson::Matrix(_) = s.relations {
                        s.to_scheme(cfg.caps.elements)?;
                    }
                    Output::Scheme(s)
                }
                Document::Paige(p) => Output::Paige(p),
                Document::Group(g) => Output::Group(g),
                Document::Field(f) => {
                    f.to_spec()?;
                    Output::Report(serde_json::to_value(&f).expect("serializable"), true)
                }
            })
        }
    }
}

fn group_table_from_json(g: GroupTableJson) -> Result<GroupCharacterTable, CliError> {
    let size = g.degrees.len();
    if g.class_sizes.len() != size || g.t.len() != size || g.t.iter().any(|r| r.len() != size) {
        return Err(crate::error::ParseError::new(1, 1, "group table: T must be square and match degrees").into());
    }
    Ok(GroupCharacterTable {
        t: g.t.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect(),
        degrees: g.degrees,
        class_sizes: g.class_sizes,
    })
}

fn run_chartable(cmd: &ChartableCmd, ctx: &mut Ctx) -> Result<Output, CliError> {
    let cfg = ctx.cfg.clone();
    match cmd {
        ChartableCmd::Compute { input } => {
            let s = ctx.scheme(input)?;
            Ok(Output::Table(ctx.table_of(&s)?))
        }
        ChartableCmd::OracleMstar { q } => Ok(Output::Table(closed_form_mstar(*q)?)),
        ChartableCmd::OraclePsl2 { q } => Ok(Output::Table(closed_form_psl2(*q)?)),
        ChartableCmd::Verify { inputs, stdin: _, scheme } => {
            let scheme = match scheme {
                Some(p) => {
                    let text = ctx.read_path(p)?;
                    Some(parse_json::<SchemeJson>(&text)?.to_scheme(cfg.caps.elements)?)
                }
                None => None,
            };
            let mut docs = Vec::new();
            if inputs.is_empty() {
                docs.push(("<stdin>".to_string(), ctx.read_stdin()?));
            } else {
                for p in inputs {
                    docs.push((p.display().to_string(), ctx.read_path(p)?));
                }
            }
            let tables = docs
                .iter()
                .map(|(_, text)| parse_json::<TableJson>(text).map_err(CliError::from).and_then(|t| t.to_table()))
                .collect::<Result<Vec<_>, _>>()?;
            let tol = cfg.tolerances.compare;
            let results = map_ordered(&tables, cfg.threads, |t| table_report(t, scheme.as_ref(), tol));
            let mut passed = true;
            let mut reports = Vec::new();
            for ((name, _), r) in docs.iter().zip(results) {
                let (mut report, ok) = r?;
                passed &= ok;
                report["source"] = json!(name);
                reports.push(report);
            }
            Ok(Output::Report(json!({ "passed": passed, "tables": reports }), passed))
        }
        ChartableCmd::Compare { first, second } => {
            let a = parse_json::<TableJson>(&ctx.read_path(first)?)?.to_table()?;
            let b = parse_json::<TableJson>(&ctx.read_path(second)?)?.to_table()?;
            Ok(match compare_tables(&a, &b, cfg.tolerances.compare) {
                Ok(m) => Output::Report(
                    json!({ "passed": true, "rows": m.rows, "cols": m.cols, "max_diff": m.max_diff }),
                    true,
                ),
                Err(e) => {
                    Output::Report(json!({ "passed": false, "reason": e.reason, "max_diff": e.max_diff }), false)
                }
            })
        }
        ChartableCmd::Transfer { input } => {
            let t = ctx.table(input)?;
            Ok(Output::GroupTable(transfer_to_group_table(&t)?))
        }
        ChartableCmd::DoubleCoset { psl2: q, gens, stabilizer, subgroup } => {
            let g = match (q, gens) {
                (Some(q), _) => psl2(*q, LinearAction::ProjectiveLine)?,
                (None, Some(p)) => closure(parse_generators(&read_file(p)?, None)?, cfg.caps.order)?,
                (None, None) => return Err(CliError::Usage("give --psl2 Q or --gens FILE".into())),
            };
            let h = match (stabilizer, subgroup) {
                (Some(x), _) => {
                    if *x >= g.degree() {
                        return Err(CliError::Usage(format!("point {x} is outside degree {}", g.degree())));
                    }
                    g.stabilizer(*x)?
                }
                (None, Some(p)) => {
                    let hg = closure(parse_generators(&read_file(p)?, Some(g.degree()))?, cfg.caps.order)?;
                    let mut idx = hg
                        .elements()?
                        .iter()
                        .map(|e| g.index_of(e).ok_or_else(|| CliError::Usage("subgroup is not contained in G".into())))
                        .collect::<Result<Vec<_>, _>>()?;
                    idx.sort_unstable();
                    idx
                }
                (None, None) => g.stabilizer(0)?,
            };
            match double_coset_table_checked(&g, &h, cfg.seed, cfg.tolerances.compare) {
                Ok((dct, _, _)) => Ok(Output::Table(dct)),
                Err(ChartabError::MismatchWithOrbitalTable { max_diff }) => Err(CliError::Verification(format!(
                    "double-coset table differs from the orbital table (max difference {max_diff:e})"
                ))),
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn unsupported(format: OutputFormat, what: &str) -> CliError {
    CliError::Usage(format!("{format:?} output is not available for {what}").to_lowercase())
}

fn render(out: &Output, cfg: &RunConfig) -> Result<String, CliError> {
    let seed = cfg.seed;
    Ok(match (out, cfg.format) {
        (Output::Table(t), OutputFormat::Json) => to_json(&TableJson::from(t)),
        (Output::Table(t), OutputFormat::Csv) => export::table_csv(t),
        (Output::Table(t), OutputFormat::Latex) => export::table_latex(t, seed),
        (Output::Table(t), OutputFormat::Text) => export::table_text(t, seed),
        (Output::GroupTable(g), OutputFormat::Json) => to_json(&GroupTableJson::from(g)),
        (Output::GroupTable(g), OutputFormat::Csv) => export::group_table_csv(g),
        (Output::GroupTable(g), OutputFormat::Text) => export::group_table_text(g, seed),
        (Output::GroupTable(_), f) => return Err(unsupported(f, "group tables")),
        (Output::Scheme(s), OutputFormat::Json) => to_json(s),
        (Output::Scheme(s), OutputFormat::Text) => {
            let rel = match &s.relations {
                crate::formats::RelationsJson::Matrix(_) => "matrix".to_string(),
                crate::formats::RelationsJson::Source(src) => serde_json::to_string(src).expect("serializable"),
            };
            format!("# seed=0x{seed:X}\nn={} d={} valencies={:?} relations={rel}\n", s.n, s.d, s.valencies)
        }
        (Output::Scheme(s), OutputFormat::Csv) => match &s.relations {
            crate::formats::RelationsJson::Matrix(rows) => rows
                .iter()
                .map(|r| r.iter().map(u8::to_string).collect::<Vec<_>>().join(",") + "\n")
                .collect(),
            _ => return Err(unsupported(OutputFormat::Csv, "function-backed schemes")),
        },
        (Output::Scheme(_), f) => return Err(unsupported(f, "schemes")),
        (Output::Paige(p), OutputFormat::Json) => to_json(p),
        (Output::Paige(p), OutputFormat::Text) => format!("q={} order={}\n", p.q, p.order),
        (Output::Paige(_), f) => return Err(unsupported(f, "loops")),
        (Output::Group(g), OutputFormat::Json) => to_json(g),
        (Output::Group(g), OutputFormat::Text) => {
            format!("degree={} order={} generators={}\n", g.degree, g.order, g.generators.len())
        }
        (Output::Group(_), f) => return Err(unsupported(f, "groups")),
        (Output::Report(v, _), OutputFormat::Text) => {
            let pass = if v["passed"].as_bool().unwrap_or(true) { "PASS" } else { "FAIL" };
            format!("# seed=0x{seed:X}\n{pass} {v}\n")
        }
        (Output::Report(v, _), _) => to_json(v),
    })
}

fn report_error(e: &CliError, json_errors: bool, stderr: &mut dyn Write) {
    let _ = if json_errors {
        writeln!(stderr, "{}", json!({ "error": { "kind": e.kind(), "detail": e.to_string() } }))
    } else {
        writeln!(stderr, "schemeforge: error: {e}")
    };
}

fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let env_cap = std::env::var(CAP_ELEMENTS_ENV).ok();
    let cfg = RunConfig::resolve(cli.global.config.as_deref(), env_cap.as_deref(), &cli.global.overrides())?;
    let _ = writeln!(stderr, "schemeforge: {}", cfg.echo());
    let mut ctx = Ctx { cfg, stdin };
    let out = run_command(&cli.command, &mut ctx)?;
    let text = render(&out, &ctx.cfg)?;
    match &cli.global.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| CliError::io(p, e))?,
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?,
    }
    match out {
        Output::Report(_, false) => Err(CliError::Verification("residual exceeds tolerance; see the report".into())),
        _ => Ok(()),
    }
}

/// Runs one invocation and returns its exit code: 0 on success, 1 when a
/// verification or computation fails, 2 for usage and input errors.
pub fn run_with<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let json_errors = args.iter().any(|a| a == "--json-errors");
            if json_errors {
                report_error(&CliError::Usage(e.to_string().trim().to_string()), true, stderr);
            } else {
                let _ = write!(stderr, "{e}");
            }
            return 2;
        }
    };
    match execute(&cli, stdin, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e, cli.global.json_errors, stderr);
            e.exit_code()
        }
    }
}
