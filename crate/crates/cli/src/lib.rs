//! Command-line front end: loads a system from a file or a generator,
//! dispatches one subcommand and renders the report as text or JSON.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use involutor_core::delta::cohomology;
use involutor_core::duality::{double_duality_test, minimal_parametrizations, rank, SUBSET_BUDGET};
use involutor_core::geometry::{
    dalembertian, make_beltrami, make_conformal_killing, make_einstein, make_killing,
    make_stress_divergence, metric_sym_weights, ricci_operator, riemann_operator, weyl_operator,
    ConstMetric,
};
use involutor_core::inverse_systems::{
    inverse_system, modular_equation, parametric_jets, section_basis,
};
use involutor_core::jets::jet_name;
use involutor_core::sequences::{
    compatibility_conditions, euler_check, janet_sequence, resolution, TrackedBasis,
};
use involutor_core::text::{parse_system, render_row, SystemFile};
use involutor_core::{complete, DiffOp, Error, JetSystem, OpMatrix};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "involutor",
    version,
    about = "Exact analysis of linear systems of PDEs"
)]
pub struct Cli {
    /// Emit a JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// System description file.
    pub file: Option<PathBuf>,
    /// Use a generated operator instead of a file.
    #[arg(long, value_enum)]
    pub gen: Option<GenKind>,
    /// Dimension for generated operators.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = MetricKind::Euclidean)]
    pub metric: MetricKind,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Involutive completion with board and characters.
    Complete(Input),
    /// Generating compatibility conditions.
    Cc(Input),
    /// Janet sequence, or a free resolution with `--resolution`.
    Sequence {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        length: usize,
        #[arg(long)]
        resolution: bool,
    },
    /// Formal adjoint, optionally under the metric pairing on symmetric tensors.
    Adjoint {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        weighted: bool,
    },
    /// Double-duality test for parametrizability.
    Paramtest(Input),
    /// Minimal parametrizations by column selection.
    Minparam {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = SUBSET_BUDGET)]
        budget: usize,
        /// Select columns of this parametrization instead of the canonical one.
        #[arg(long, conflicts_with = "from_gen")]
        from: Option<PathBuf>,
        /// Generated parametrization to select columns of (same `--n`, `--metric`).
        #[arg(long, value_enum)]
        from_gen: Option<GenKind>,
    },
    /// δ-cohomology of the symbol at one form degree and order.
    Cohomology {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        form: usize,
        #[arg(long)]
        order: usize,
    },
    /// Differential rank of the presented module.
    Rank(Input),
    /// Basis sections of the inverse system and their modular equations.
    Sections {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Normal forms of the rows modulo the module of another operator.
    Reduce {
        #[command(flatten)]
        input: Input,
        /// Operator file generating the module.
        #[arg(long, conflicts_with = "by_gen")]
        by: Option<PathBuf>,
        /// Generated operator generating the module (same `--n`, `--metric`).
        #[arg(long, value_enum)]
        by_gen: Option<GenKind>,
    },
    /// Print a generated operator as a system file.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MetricKind::Euclidean)]
        metric: MetricKind,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Killing,
    ConformalKilling,
    Einstein,
    StressDivergence,
    Beltrami,
    Riemann,
    Ricci,
    Weyl,
    /// □ applied to every row of the Weyl operator.
    BoxWeyl,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    Euclidean,
    Minkowski,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Engine(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Engine(Error::Malformed(_)) => 2,
            CliError::Engine(Error::Invariant(_)) => 3,
            CliError::Engine(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Engine(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A loaded operator with the text its hash is taken over.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub name: String,
    pub op: OpMatrix,
    pub canonical: String,
}

impl Loaded {
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn metric(kind: MetricKind, n: usize) -> ConstMetric {
    match kind {
        MetricKind::Euclidean => ConstMetric::euclidean(n),
        MetricKind::Minkowski => ConstMetric::minkowski(n),
    }
}

pub fn generate(kind: GenKind, n: usize, m: MetricKind) -> CliResult<OpMatrix> {
    if n == 0 || n > involutor_core::jets::MAX_N {
        return Err(CliError::Usage(format!(
            "--n must be between 1 and {}",
            involutor_core::jets::MAX_N
        )));
    }
    let w = metric(m, n);
    let op = match kind {
        GenKind::Killing => make_killing(&w),
        GenKind::ConformalKilling => make_conformal_killing(&w)?,
        GenKind::Einstein => make_einstein(&w)?,
        GenKind::StressDivergence => make_stress_divergence(n),
        GenKind::Beltrami => {
            if n != 3 {
                return Err(CliError::Usage("beltrami needs --n 3".into()));
            }
            make_beltrami()
        }
        GenKind::Riemann => riemann_operator(&w),
        GenKind::Ricci => ricci_operator(&w),
        GenKind::Weyl => weyl_operator(&w)?,
        GenKind::BoxWeyl => {
            let box_op = dalembertian(&w);
            weyl_operator(&w)?.map_rows(|p| box_op.mul(p))
        }
    };
    Ok(op)
}

trait MapRows {
    fn map_rows(&self, f: impl Fn(&DiffOp) -> DiffOp) -> OpMatrix;
}

impl MapRows for OpMatrix {
    fn map_rows(&self, f: impl Fn(&DiffOp) -> DiffOp) -> OpMatrix {
        let rows = self
            .rows()
            .iter()
            .map(|r| r.iter().map(&f).collect())
            .collect();
        OpMatrix::from_rows(self.n(), self.ncols(), rows).expect("same shape")
    }
}

fn gen_name(kind: GenKind) -> String {
    kind.to_possible_value()
        .map(|v| v.get_name().replace('-', "_"))
        .unwrap_or_default()
}

fn load_file(path: &Path) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let sys = parse_system(&text)?;
    Ok(Loaded {
        name: sys.name.clone(),
        op: sys.to_opmatrix(),
        canonical: sys.to_string(),
    })
}

fn load_gen(kind: GenKind, n: usize, m: MetricKind) -> CliResult<Loaded> {
    let op = generate(kind, n, m)?;
    let name = format!("{}{n}", gen_name(kind));
    let canonical = format!(
        "# gen {kind:?} n={n} metric={m:?}\n{}",
        SystemFile::from_opmatrix(&name, &op)
    );
    Ok(Loaded {
        name,
        op,
        canonical,
    })
}

pub fn load(input: &Input) -> CliResult<Loaded> {
    match (&input.file, input.gen) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either a file or --gen, not both".into(),
        )),
        (Some(p), None) => load_file(p),
        (None, Some(kind)) => {
            let n = input
                .n
                .ok_or_else(|| CliError::Usage("--gen needs --n".into()))?;
            load_gen(kind, n, input.metric)
        }
        (None, None) => Err(CliError::Usage(
            "missing input: a system file or --gen".into(),
        )),
    }
}

/// The report of one command.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub input_hash: String,
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    pub boards: Vec<String>,
    pub characters: Vec<Value>,
    pub verdict: Option<String>,
    pub torsion: Option<Vec<Value>>,
    pub operators: Vec<OpMatrix>,
    pub extra: Map<String, Value>,
    pub text: String,
}

fn index_label(mu: &involutor_core::MultiIndex) -> String {
    if mu.is_zero() {
        return "0".into();
    }
    let sep = if mu.n() > 9 { "," } else { "" };
    mu.axes()
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

pub fn entry_json(p: &DiffOp) -> Value {
    let mut m = Map::new();
    for (mu, c) in p.terms() {
        m.insert(index_label(mu), Value::String(c.to_string()));
    }
    Value::Object(m)
}

pub fn row_json(row: &[DiffOp]) -> Value {
    Value::Array(row.iter().map(entry_json).collect())
}

pub fn operator_json(d: &OpMatrix) -> Value {
    json!({
        "n": d.n(),
        "rows": d.nrows(),
        "cols": d.ncols(),
        "entries": d.rows().iter().map(|r| row_json(r)).collect::<Vec<_>>(),
    })
}

impl Report {
    fn new(command: &str, input: &Loaded) -> Self {
        Report {
            command: command.into(),
            input_hash: input.hash(),
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!(self.command));
        m.insert("input_hash".into(), json!(self.input_hash));
        m.insert("dims".into(), json!(self.dims));
        m.insert("orders".into(), json!(self.orders));
        m.insert("boards".into(), json!(self.boards));
        m.insert("characters".into(), Value::Array(self.characters.clone()));
        if let Some(v) = &self.verdict {
            m.insert("verdict".into(), json!(v));
        }
        if let Some(t) = &self.torsion {
            m.insert("torsion".into(), Value::Array(t.clone()));
        }
        m.insert(
            "operators".into(),
            Value::Array(self.operators.iter().map(operator_json).collect()),
        );
        for (k, v) in &self.extra {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn block(&mut self, title: &str, body: &str) {
        self.line(format!("{title}:"));
        for l in body.lines() {
            self.line(format!("  {l}"));
        }
    }
}

fn render_operator(d: &OpMatrix) -> String {
    if d.nrows() == 0 {
        return "(none)\n".into();
    }
    d.rows()
        .iter()
        .map(|r| format!("{} = 0\n", render_row(r)))
        .collect()
}

fn characters_json(ch: &involutor_core::jets::Characters) -> Value {
    json!({ "q": ch.q, "alpha": ch.alpha, "beta": ch.beta })
}

fn board_of(d: &OpMatrix) -> CliResult<(String, Value)> {
    let s = JetSystem::from_opmatrix(d).autoreduce()?;
    let done = complete(&s)?;
    let board = done.system.janet_board()?.render();
    Ok((board, characters_json(&done.system.characters())))
}

fn cmd_complete(input: &Loaded) -> CliResult<Report> {
    let mut rep = Report::new("complete", input);
    let s = JetSystem::from_opmatrix(&input.op).autoreduce()?;
    let r = complete(&s)?;
    let board = r.system.janet_board()?;
    let ch = r.system.characters();
    let dims: Vec<usize> = r.system.solution_dims(2).iter().map(|d| d.dim).collect();
    rep.line(format!(
        "system {}: involutive at order {} (jet order {})",
        input.name, r.order, r.jet_order
    ));
    rep.line(format!(
        "formally integrable as given: {}",
        if r.formally_integrable { "yes" } else { "no" }
    ));
    let change: Vec<Vec<String>> = r
        .change
        .matrix()
        .iter()
        .map(|row| row.iter().map(|c| c.to_string()).collect())
        .collect();
    if !r.change.is_identity() {
        let rows: Vec<String> = change
            .iter()
            .map(|row| format!("[{}]", row.join(" ")))
            .collect();
        rep.line(format!("coordinates x = A x', A = [{}]", rows.join(" ")));
    }
    rep.block("solved system", &r.system.to_string());
    rep.block("board", &board.render());
    rep.line(format!(
        "characters: alpha = {:?}, beta = {:?}",
        ch.alpha, ch.beta
    ));
    rep.line(format!("dim R_q.. = {dims:?}"));
    rep.dims = dims;
    rep.orders = vec![r.order];
    rep.boards = vec![board.render()];
    rep.characters = vec![characters_json(&ch)];
    rep.verdict = Some(
        if r.formally_integrable {
            "formally integrable"
        } else {
            "completed"
        }
        .into(),
    );
    rep.operators = vec![r.system.to_opmatrix(), r.original_frame.to_opmatrix()];
    rep.extra.insert("change".into(), json!(change));
    rep.extra.insert("classes".into(), json!(board.classes()));
    rep.extra
        .insert("leaders".into(), json!(r.system.leader_names()));
    Ok(rep)
}

fn cmd_cc(input: &Loaded) -> CliResult<Report> {
    let mut rep = Report::new("cc", input);
    let cc = compatibility_conditions(&input.op)?;
    rep.dims = vec![input.op.ncols(), input.op.nrows(), cc.nrows()];
    rep.orders = (0..cc.nrows()).map(|r| cc.row_order(r)).collect();
    rep.line(format!("{} compatibility condition(s)", cc.nrows()));
    rep.block("operator", &render_operator(&cc));
    if cc.nrows() > 0 && !cc.is_zero() {
        let (board, ch) = board_of(&cc)?;
        rep.block("board", &board);
        rep.boards.push(board);
        rep.characters.push(ch);
    }
    rep.verdict = Some(
        if cc.nrows() == 0 {
            "no compatibility conditions"
        } else {
            "compatibility conditions"
        }
        .into(),
    );
    rep.operators = vec![cc];
    Ok(rep)
}

fn cmd_sequence(input: &Loaded, length: usize, free: bool) -> CliResult<Report> {
    let mut rep = Report::new("sequence", input);
    let seq = if free {
        resolution(&input.op, length)?
    } else {
        janet_sequence(&input.op, length)?
    };
    let euler = euler_check(&seq)?;
    rep.line(format!(
        "{}: dims {:?}, orders {:?}",
        if free { "resolution" } else { "Janet sequence" },
        seq.dims,
        seq.orders
    ));
    for (r, d) in seq.operators.iter().enumerate() {
        rep.block(&format!("D{r}"), &render_operator(d));
    }
    rep.line(format!(
        "Spencer bundles {:?}, Janet bundles {:?}, alpha {}",
        seq.spencer, seq.janet_bundles, seq.alpha
    ));
    rep.line(format!("Euler sum {}", seq.euler));
    let verdict = if seq.strictly_exact() {
        "strictly exact"
    } else if seq.formally_exact() {
        "formally exact"
    } else {
        "truncated"
    };
    rep.line(format!("verdict: {verdict}"));
    if let Some(first) = seq.operators.first() {
        if !first.is_zero() {
            let (board, ch) = board_of(first)?;
            rep.boards.push(board);
            rep.characters.push(ch);
        }
    }
    rep.dims = seq.dims.clone();
    rep.orders = seq.orders.clone();
    rep.verdict = Some(verdict.into());
    rep.extra.insert("euler".into(), json!(seq.euler));
    rep.extra.insert("alpha".into(), json!(seq.alpha));
    rep.extra.insert("spencer".into(), json!(seq.spencer));
    rep.extra
        .insert("janet_bundles".into(), json!(seq.janet_bundles));
    rep.extra
        .insert("euler_janet".into(), json!([euler.janet.0, euler.janet.1]));
    rep.extra.insert(
        "euler_spencer".into(),
        json!([euler.spencer.0, euler.spencer.1]),
    );
    rep.operators = seq.operators;
    Ok(rep)
}

fn cmd_adjoint(
    input: &Loaded,
    gen: Option<GenKind>,
    n: Option<usize>,
    m: MetricKind,
    weighted: bool,
) -> CliResult<Report> {
    let mut rep = Report::new("adjoint", input);
    let ad = if weighted {
        if gen != Some(GenKind::Einstein) {
            return Err(CliError::Usage(
                "--weighted applies to --gen einstein".into(),
            ));
        }
        let w = metric(m, n.unwrap_or(0));
        let sw = metric_sym_weights(&w)?;
        input.op.adjoint_weighted(&sw, &sw)?
    } else {
        input.op.adjoint()
    };
    let selfadj = ad == input.op;
    rep.block("adjoint", &render_operator(&ad));
    let verdict = if selfadj {
        "self-adjoint"
    } else {
        "not self-adjoint"
    };
    rep.line(format!("verdict: {verdict}"));
    rep.dims = vec![ad.nrows(), ad.ncols()];
    rep.orders = vec![ad.order()];
    rep.verdict = Some(verdict.into());
    rep.operators = vec![ad];
    Ok(rep)
}

fn cmd_paramtest(input: &Loaded) -> CliResult<Report> {
    let mut rep = Report::new("paramtest", input);
    let t = double_duality_test(&input.op)?;
    let verdict = if t.parametrizable {
        "parametrizable"
    } else {
        "not parametrizable"
    };
    rep.line(format!("verdict: {verdict}"));
    rep.line(format!("rank: {}", t.rank));
    rep.block("parametrization", &render_operator(&t.parametrization));
    rep.line(format!(
        "D1' has {} rows of order {}",
        t.d1_prime.nrows(),
        t.d1_prime.order()
    ));
    if !t.torsion.is_empty() {
        rep.line(format!("torsion: {} generator(s)", t.torsion.len()));
        for (i, z) in t.torsion.iter().enumerate() {
            rep.line(format!(
                "  z{}: {}    annihilated by {}",
                i + 1,
                render_row(&z.residue),
                z.annihilator
            ));
        }
    }
    rep.dims = vec![
        input.op.ncols(),
        input.op.nrows(),
        t.b.nrows(),
        t.parametrization.ncols(),
        t.d1_prime.nrows(),
    ];
    rep.orders = vec![
        input.op.order(),
        t.parametrization.order(),
        t.d1_prime.order(),
    ];
    rep.verdict = Some(verdict.into());
    rep.torsion = Some(
        t.torsion
            .iter()
            .map(|z| {
                json!({
                    "residue": row_json(&z.residue),
                    "annihilator": entry_json(&z.annihilator),
                    "certificate": row_json(&z.certificate),
                })
            })
            .collect(),
    );
    rep.extra.insert("rank".into(), json!(t.rank));
    rep.operators = vec![t.adjoint, t.b, t.parametrization, t.d1_prime];
    Ok(rep)
}

fn cmd_minparam(input: &Loaded, budget: usize, from: Option<&Loaded>) -> CliResult<Report> {
    let mut rep = Report::new("minparam", input);
    let t = double_duality_test(&input.op)?;
    rep.extra.insert("rank".into(), json!(t.rank));
    if !t.parametrizable {
        rep.line("verdict: not parametrizable");
        rep.verdict = Some("not parametrizable".into());
        return Ok(rep);
    }
    let param = match from {
        Some(p) => {
            if p.op.n() != input.op.n() || p.op.nrows() != input.op.ncols() {
                return Err(CliError::Usage(
                    "the parametrization does not fit the operator".into(),
                ));
            }
            if !input.op.compose(&p.op)?.is_zero() {
                return Err(CliError::Engine(Error::Precondition(
                    "the given operator is not a parametrization".into(),
                )));
            }
            rep.extra.insert("from_hash".into(), json!(p.hash()));
            p.op.clone()
        }
        None => t.parametrization.clone(),
    };
    let found = minimal_parametrizations(&input.op, &param, budget)?;
    rep.line(format!(
        "{} minimal parametrization(s) with {} potential(s)",
        found.len(),
        t.rank
    ));
    for f in &found {
        let cols: Vec<usize> = f.columns.iter().map(|c| c + 1).collect();
        rep.block(&format!("columns {cols:?}"), &render_operator(&f.operator));
    }
    rep.dims = vec![param.ncols(), t.rank, found.len()];
    rep.orders = found.iter().map(|f| f.operator.order()).collect();
    rep.verdict = Some(
        if found.is_empty() {
            "none found"
        } else {
            "parametrizable"
        }
        .into(),
    );
    rep.extra.insert(
        "columns".into(),
        json!(found.iter().map(|f| f.columns.clone()).collect::<Vec<_>>()),
    );
    rep.operators = found.into_iter().map(|f| f.operator).collect();
    Ok(rep)
}

fn cmd_cohomology(input: &Loaded, form: usize, order: usize) -> CliResult<Report> {
    let mut rep = Report::new("cohomology", input);
    let s = JetSystem::from_opmatrix(&input.op).autoreduce()?;
    let q = s.order();
    if order < q {
        return Err(CliError::Usage(format!(
            "--order must be at least the system order {q}"
        )));
    }
    if form > s.n() {
        return Err(CliError::Usage(format!(
            "--form must be at most n = {}",
            s.n()
        )));
    }
    let d = cohomology(&s, form, order - q)?;
    let c = d
        .cell(form, order)
        .ok_or_else(|| CliError::Engine(Error::Invariant("missing cell".into())))?;
    rep.line(format!(
        "H^{form} at order {order}: {} (cochains {}, coboundaries {}, cocycles {})",
        c.cohomology, c.cochains, c.coboundaries, c.cocycles
    ));
    rep.dims = vec![c.cochains, c.coboundaries, c.cocycles, c.cohomology];
    rep.orders = vec![order];
    rep.verdict = Some(format!("H^{form}_{order} = {}", c.cohomology));
    Ok(rep)
}

fn cmd_rank(input: &Loaded) -> CliResult<Report> {
    let mut rep = Report::new("rank", input);
    let r = rank(&input.op)?;
    rep.line(format!("rank: {r}"));
    rep.dims = vec![r];
    rep.verdict = Some(if r == 0 {
        "torsion module".into()
    } else {
        format!("rank {r}")
    });
    Ok(rep)
}

fn cmd_sections(input: &Loaded, order: Option<usize>) -> CliResult<Report> {
    let mut rep = Report::new("sections", input);
    let inv = inverse_system(&input.op)?;
    let q = order.unwrap_or(inv.order);
    let basis = section_basis(&inv.system, q);
    rep.line(format!("{} basis section(s) at order {q}", basis.len()));
    let eqs: Vec<String> = basis
        .iter()
        .map(|f| modular_equation(f).to_string())
        .collect();
    for e in &eqs {
        rep.line(format!("  E = {e}"));
    }
    rep.dims = vec![basis.len()];
    rep.orders = vec![q];
    rep.extra.insert("modular_equations".into(), json!(eqs));
    let m = inv.system.m();
    let par: Vec<String> = parametric_jets(&inv.system, q)
        .iter()
        .map(|(k, mu)| jet_name(*k, mu, m))
        .collect();
    rep.extra.insert("parametric".into(), json!(par));
    if let Some(dim) = inv.dim() {
        let gens = inv.generators()?;
        let g: Vec<String> = gens
            .iter()
            .map(|f| modular_equation(f).to_string())
            .collect();
        rep.line(format!(
            "finite type, dim R = {dim}, generated by {} section(s):",
            g.len()
        ));
        for e in &g {
            rep.line(format!("  E = {e}"));
        }
        rep.dims.push(dim);
        rep.verdict = Some(format!("finite type, dim R = {dim}"));
        rep.extra.insert("generators".into(), json!(g));
    } else {
        rep.verdict = Some("not of finite type".into());
    }
    Ok(rep)
}

fn cmd_reduce(input: &Loaded, by: &Loaded) -> CliResult<Report> {
    let mut rep = Report::new("reduce", input);
    if by.op.ncols() != input.op.ncols() || by.op.n() != input.op.n() {
        return Err(CliError::Usage(
            "the two operators act on different unknowns".into(),
        ));
    }
    let mut tb = TrackedBasis::new(&by.op)?;
    let (n, m) = (input.op.n(), input.op.ncols());
    let mut quot = OpMatrix::zero(n, 0, by.op.nrows());
    let mut res = OpMatrix::zero(n, 0, m);
    let mut zero = 0;
    for r in 0..input.op.nrows() {
        let red = tb.reduce(input.op.row(r))?;
        if red.is_zero() {
            zero += 1;
            let back = OpMatrix::from_rows(n, by.op.nrows(), vec![red.quotient.clone()])?
                .compose(&by.op)?;
            if back.row(0) != input.op.row(r) {
                return Err(CliError::Engine(Error::Invariant(format!(
                    "certificate of row {} does not recompose",
                    r + 1
                ))));
            }
        }
        quot.push_row(red.quotient);
        res.push_row(red.residue);
    }
    let verdict = if zero == input.op.nrows() {
        "all rows reduce to zero".to_string()
    } else {
        format!("{} of {} rows reduce to zero", zero, input.op.nrows())
    };
    rep.line(format!("verdict: {verdict}"));
    rep.block("residues", &render_operator(&res));
    rep.dims = vec![input.op.nrows(), zero];
    rep.orders = vec![quot.order()];
    rep.verdict = Some(verdict);
    rep.extra.insert("by_hash".into(), json!(by.hash()));
    rep.operators = vec![quot, res];
    Ok(rep)
}

fn cmd_gen(kind: GenKind, n: usize, m: MetricKind) -> CliResult<Report> {
    let input = load_gen(kind, n, m)?;
    let mut rep = Report::new("gen", &input);
    rep.text = format!("{}\n", SystemFile::from_opmatrix(&input.name, &input.op));
    rep.dims = vec![input.op.nrows(), input.op.ncols()];
    rep.orders = vec![input.op.order()];
    rep.operators = vec![input.op];
    Ok(rep)
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Complete(i) => cmd_complete(&load(i)?),
        Command::Cc(i) => cmd_cc(&load(i)?),
        Command::Sequence {
            input,
            length,
            resolution,
        } => cmd_sequence(&load(input)?, *length, *resolution),
        Command::Adjoint { input, weighted } => {
            cmd_adjoint(&load(input)?, input.gen, input.n, input.metric, *weighted)
        }
        Command::Paramtest(i) => cmd_paramtest(&load(i)?),
        Command::Minparam {
            input,
            budget,
            from,
            from_gen,
        } => {
            let from = match (from, from_gen) {
                (Some(p), _) => Some(load_file(p)?),
                (None, Some(k)) => {
                    let n = input
                        .n
                        .ok_or_else(|| CliError::Usage("--from-gen needs --n".into()))?;
                    Some(load_gen(*k, n, input.metric)?)
                }
                (None, None) => None,
            };
            cmd_minparam(&load(input)?, *budget, from.as_ref())
        }
        Command::Cohomology { input, form, order } => cmd_cohomology(&load(input)?, *form, *order),
        Command::Rank(i) => cmd_rank(&load(i)?),
        Command::Sections { input, order } => cmd_sections(&load(input)?, *order),
        Command::Reduce { input, by, by_gen } => {
            let by = match (by, by_gen) {
                (Some(p), None) => load_file(p)?,
                (None, Some(k)) => {
                    let n = input
                        .n
                        .ok_or_else(|| CliError::Usage("--by-gen needs --n".into()))?;
                    load_gen(*k, n, input.metric)?
                }
                _ => {
                    return Err(CliError::Usage(
                        "reduce needs --by FILE or --by-gen KIND".into(),
                    ))
                }
            };
            cmd_reduce(&load(input)?, &by)
        }
        Command::Gen { kind, n, metric } => cmd_gen(*kind, *n, *metric),
    }
}

/// Parses arguments, runs the command and returns (stdout, stderr, exit code).
pub fn main_with<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                (text, String::new(), 0)
            } else {
                (String::new(), text, code)
            };
        }
    };
    match run(&cli) {
        Ok(rep) => {
            let out = if cli.json {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&rep.to_json()).expect("serializable")
                )
            } else {
                rep.text
            };
            (out, String::new(), 0)
        }
        Err(e) => (String::new(), format!("error: {e}\n"), e.exit_code()),
    }
}
