use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hyperstate::bellcontext::{
    b3_scenario, bell_value, bell_value_exact, bn_operator, bnp_operator, hardy_forbidden, lhv_max, lhv_min,
    mermin_operator, noncontextual_max, DichotomicScenario, Term, Q,
};
use hyperstate::cvlab::{self, CubicCell, Weight, WeightedHypergraph};
use hyperstate::entangle::{self, GateNoiseProfile, WitnessKind};
use hyperstate::hgraph::{incidence, layers_from_signature, mask_of, vertices_of, weight_signature, Edge};
use hyperstate::hgqec::{self, CodeTuple};
use hyperstate::magiclab::{self, TruthTable};
use hyperstate::quditlab::{self, MultiHypergraph};
use hyperstate::rewrite::{self, RewriteResult};
use hyperstate::simkit::{build_state, expectation_sum, Bipartition, Pauli};
use hyperstate::stabgen;
use hyperstate::Hypergraph;

use crate::document::{HypergraphDocument, Kind};
use crate::dot::to_dot;
use crate::{num, CliError, Context, Format, Report};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a document and build its state
    Build { file: PathBuf },
    /// One amplitude of the state
    Amp(AmpArgs),
    /// Stabilizer generators and their verification
    Stab { file: PathBuf },
    /// Apply a graphical rewrite rule
    Rewrite(RewriteArgs),
    /// Entanglement measures
    Entangle(EntangleArgs),
    /// Entanglement witness value
    Witness(WitnessArgs),
    /// Gate-noise randomization and purity scaling
    Randomize(RandomizeArgs),
    /// Bell and Hardy expressions
    Bell(BellArgs),
    /// Mermin operator versus its noncontextual bound
    Mermin { file: PathBuf },
    /// Stabilizer Rényi entropy and related magic quantities
    Magic(MagicArgs),
    /// Census of symmetric hypergraph codes
    QecSearch(QecSearchArgs),
    /// Checks for one code tuple
    QecVerify(QecVerifyArgs),
    /// Qudit hypergraph analysis
    Qudit(QuditArgs),
    /// Continuous-variable operations and measurements
    Cv(CvArgs),
    /// Graphviz rendering
    ExportDot { file: PathBuf },
}

#[derive(Debug, Args)]
pub struct AmpArgs {
    file: PathBuf,
    /// Basis index; qubit/qudit 1 is the least significant digit
    #[arg(long, conflicts_with = "digits")]
    index: Option<usize>,
    /// Digit string, qubit/qudit 1 first, e.g. 011
    #[arg(long)]
    digits: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Rule {
    Z,
    X,
    Y,
    Cz,
    Cnot,
    Epc,
    MeasureZ,
}

#[derive(Debug, Args)]
pub struct RewriteArgs {
    file: PathBuf,
    #[arg(long, value_enum)]
    rule: Rule,
    #[arg(long)]
    vertex: Option<usize>,
    /// Comma-separated vertices for cz
    #[arg(long)]
    edge: Option<String>,
    #[arg(long)]
    controls: Option<String>,
    #[arg(long)]
    target: Option<usize>,
    #[arg(long)]
    outcome: Option<u8>,
}

#[derive(Debug, Args)]
pub struct EntangleArgs {
    file: PathBuf,
    /// Geometric measure against biseparable states
    #[arg(long)]
    em: bool,
    /// Geometric measure against fully separable states
    #[arg(long)]
    eg: bool,
    /// Negativity across a cut given as the vertices of one side
    #[arg(long)]
    negativity: Option<String>,
    #[arg(long)]
    gmn: bool,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WitnessChoice {
    Projector,
    Stabilizer,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "projector")]
    kind: WitnessChoice,
    #[arg(long)]
    param: Option<f64>,
    /// Gate success probability per cardinality, e.g. 3=0.9; evaluates on the randomized state
    #[arg(long)]
    noise: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RandomizeArgs {
    file: Option<PathBuf>,
    /// Gate success probability per cardinality, e.g. 3=0.9
    #[arg(long)]
    noise: Vec<String>,
    /// Same success probability for every cardinality in the document
    #[arg(long)]
    uniform: Option<f64>,
    /// Purity sampling over random k-uniform hypergraphs: n,k
    #[arg(long)]
    scaling: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PauliChoice {
    X,
    Y,
}

#[derive(Debug, Args)]
pub struct BellArgs {
    file: PathBuf,
    #[arg(long)]
    b3: bool,
    #[arg(long)]
    bn: bool,
    #[arg(long, value_enum)]
    bnp: Option<PauliChoice>,
    #[arg(long)]
    hardy: bool,
}

#[derive(Debug, Args)]
pub struct MagicArgs {
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Number of stabilizer states on this many qubits
    #[arg(long)]
    count: Option<usize>,
    /// Mean SRE of random k-uniform hypergraph states: n,k
    #[arg(long)]
    random: Option<String>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Debug, Args)]
pub struct QecSearchArgs {
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Args)]
pub struct QecVerifyArgs {
    #[arg(long)]
    n: usize,
    /// Negative weights of |D>, comma-separated
    #[arg(long)]
    weights: String,
    #[arg(long)]
    l: usize,
    /// Detection sweep up to this error weight
    #[arg(long, default_value_t = 1)]
    detect: usize,
}

#[derive(Debug, Args)]
pub struct QuditArgs {
    file: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    file: PathBuf,
    /// Operation `name:arg:arg`, applied in order: cz:1,2:w  disp-p:i:s  disp-q:i:s
    /// squeeze:i:r  squeeze-xi:i:xi  rotate:i:n  measure-q:i:q  measure-p:i:p (last)
    #[arg(long = "op")]
    ops: Vec<String>,
    #[arg(long)]
    nullifiers: bool,
}

pub fn execute(cmd: Command, ctx: &mut Context) -> Result<Report, CliError> {
    match cmd {
        Command::Build { file } => build(&ctx.load(&file)?),
        Command::Amp(a) => amp(a, ctx),
        Command::Stab { file } => stab(&ctx.load(&file)?),
        Command::Rewrite(a) => rewrite_cmd(a, ctx),
        Command::Entangle(a) => entangle_cmd(a, ctx),
        Command::Witness(a) => witness(a, ctx),
        Command::Randomize(a) => randomize(a, ctx),
        Command::Bell(a) => bell(a, ctx),
        Command::Mermin { file } => mermin(&ctx.load(&file)?),
        Command::Magic(a) => magic(a, ctx),
        Command::QecSearch(a) => qec_search(a),
        Command::QecVerify(a) => qec_verify(a),
        Command::Qudit(a) => qudit(a, ctx),
        Command::Cv(a) => cv(a, ctx),
        Command::ExportDot { file } => {
            let doc = ctx.load(&file)?;
            Ok(Report { dot: Some(to_dot(&doc)), preferred: Some(Format::Dot), ..Default::default() }
                .with("dot", to_dot(&doc)))
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("`{t}` is not a vertex number"))))
        .collect()
}

fn parse_weight(s: &str) -> Result<Weight, CliError> {
    if let Ok(q) = s.trim().parse::<Weight>() {
        return Ok(q);
    }
    let x: f64 = s.trim().parse().map_err(|_| usage(format!("`{s}` is not a number or fraction")))?;
    Ok(cvlab::weight_from_f64(x)?)
}

fn q_value(q: Q) -> Value {
    num(*q.numer() as f64 / *q.denom() as f64)
}

fn parse_noise(items: &[String]) -> Result<GateNoiseProfile, CliError> {
    let mut probs = Vec::new();
    for it in items {
        let (k, p) = it.split_once('=').ok_or_else(|| usage(format!("noise `{it}` is not k=p")))?;
        let k: usize = k.trim().parse().map_err(|_| usage(format!("bad cardinality in `{it}`")))?;
        let p: f64 = p.trim().parse().map_err(|_| usage(format!("bad probability in `{it}`")))?;
        probs.push((k, p));
    }
    Ok(GateNoiseProfile::new(probs)?)
}

fn cardinalities(h: &Hypergraph) -> Vec<usize> {
    let mut ks: Vec<usize> = h.edges().map(|e| e.count_ones() as usize).collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

fn vertex_lists(es: impl IntoIterator<Item = Edge>) -> Value {
    json!(es.into_iter().map(vertices_of).collect::<Vec<_>>())
}

fn build(doc: &HypergraphDocument) -> Result<Report, CliError> {
    let r = Report::default().with("document", doc.to_value());
    match doc.kind {
        Kind::Qubit => {
            let h = doc.hypergraph()?;
            let s = build_state(&h)?;
            let neg = s.amps().iter().filter(|a| a.re < 0.0).count();
            Ok(r.with("dimension", s.amps().len())
                .with("negative_amplitudes", neg)
                .with("max_cardinality", h.max_cardinality()))
        }
        Kind::Qudit => {
            let h = doc.multi()?;
            let s = quditlab::qudit_build(&h)?;
            Ok(r.with("dimension", s.amps().len()).with("max_cardinality", h.max_cardinality()))
        }
        Kind::Cv => {
            let h = doc.weighted()?;
            let ns: Vec<String> =
                (1..=h.n()).map(|i| cvlab::nullifier(&h, i).map(|x| x.render())).collect::<Result<_, _>>()?;
            Ok(r.with("nullifiers", ns))
        }
    }
}

fn amp(a: AmpArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = ctx.load(&a.file)?;
    let (base, amps) = match doc.kind {
        Kind::Qubit => (2usize, build_state(&doc.hypergraph()?)?.into_amps()),
        Kind::Qudit => {
            let h = doc.multi()?;
            (h.d() as usize, quditlab::qudit_build(&h)?.amps().to_vec())
        }
        Kind::Cv => return Err(CliError::Domain("cv states have no finite amplitude table".into())),
    };
    let idx = match (a.index, &a.digits) {
        (Some(i), _) => i,
        (None, Some(ds)) => {
            if ds.len() != doc.n {
                return Err(usage(format!("expected {} digits", doc.n)));
            }
            let mut idx = 0;
            for c in ds.chars().rev() {
                let v = c.to_digit(36).filter(|&v| (v as usize) < base).ok_or_else(|| usage(format!("bad digit `{c}`")))?;
                idx = idx * base + v as usize;
            }
            idx
        }
        (None, None) => return Err(usage("give --index or --digits")),
    };
    let z = amps.get(idx).ok_or_else(|| CliError::Domain(format!("index {idx} outside 0..{}", amps.len())))?;
    Ok(Report::default().with("index", idx).with("re", num(z.re)).with("im", num(z.im)))
}

fn render_generator(h: &Hypergraph, i: usize) -> Result<String, CliError> {
    let (_, adj) = incidence(h, i)?;
    let mut out = format!("X{i}");
    let mut sign = false;
    for a in adj {
        match a.count_ones() {
            0 => sign = !sign,
            1 => out.push_str(&format!(" Z{}", vertices_of(a)[0])),
            _ => out.push_str(&format!(
                " CZ({})",
                vertices_of(a).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
            )),
        }
    }
    Ok(if sign { format!("-{out}") } else { out })
}

fn stab(doc: &HypergraphDocument) -> Result<Report, CliError> {
    match doc.kind {
        Kind::Qubit => {
            let h = doc.hypergraph()?;
            let gens: Vec<String> = (1..=h.n()).map(|i| render_generator(&h, i)).collect::<Result<_, _>>()?;
            let (ess, spanned) = stabgen::essential_vertices(&h);
            let mut r = Report::default()
                .with("generators", gens)
                .with("verified", stabgen::verify(&h)?)
                .with("essential_vertices", vertices_of(ess))
                .with("essential_edges", vertex_lists(spanned));
            if let Some(sig) = weight_signature(&h) {
                let ks: Vec<usize> = layers_from_signature(&sig)?.into_iter().collect();
                if !ks.is_empty() && ks.iter().all(|&k| k >= 2) && h.edge_count() > 0 {
                    let v = stabgen::palindrome(h.n(), &ks)?;
                    r.set("palindrome", json!({ "layers": ks, "x": v.x, "minus_x": v.minus_x, "y": v.y }));
                }
            }
            Ok(r)
        }
        Kind::Qudit => {
            let h = doc.multi()?;
            Ok(Report::default().with("verified", quditlab::verify_stabilizers(&h)?))
        }
        Kind::Cv => Err(CliError::Domain("use `cv --nullifiers` for cv documents".into())),
    }
}

fn rewrite_cmd(a: RewriteArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let h = ctx.load(&a.file)?.hypergraph()?;
    let vertex = || a.vertex.ok_or_else(|| usage("this rule needs --vertex"));
    let RewriteResult { h: out, sign } = match a.rule {
        Rule::Z => rewrite::rw_z(&h, vertex()?)?,
        Rule::X => rewrite::rw_x(&h, vertex()?)?,
        Rule::Y => rewrite::rw_y(&h, vertex()?)?,
        Rule::Epc => rewrite::rw_epc(&h, vertex()?)?,
        Rule::Cz => {
            let e = parse_list(a.edge.as_deref().ok_or_else(|| usage("cz needs --edge"))?)?;
            if e.iter().any(|&v| v == 0 || v > h.n()) {
                return Err(CliError::Domain("edge vertex out of range".into()));
            }
            rewrite::rw_cz(&h, mask_of(&e))?
        }
        Rule::Cnot => {
            let c = parse_list(a.controls.as_deref().ok_or_else(|| usage("cnot needs --controls"))?)?;
            if c.iter().any(|&v| v == 0 || v > h.n()) {
                return Err(CliError::Domain("control vertex out of range".into()));
            }
            rewrite::rw_cknot(&h, mask_of(&c), a.target.ok_or_else(|| usage("cnot needs --target"))?)?
        }
        Rule::MeasureZ => rewrite::rw_measure_z(&h, vertex()?, a.outcome.ok_or_else(|| usage("measure-z needs --outcome"))?)?,
    };
    Ok(Report::default().with("sign", sign).with("document", HypergraphDocument::from_hypergraph(&out).to_value()))
}

fn entangle_cmd(a: EntangleArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = ctx.load(&a.file)?;
    let mut r = Report::default();
    if doc.kind == Kind::Qudit {
        if a.eg || a.gmn || a.negativity.is_some() {
            return Err(CliError::Domain("qudit documents support --em only".into()));
        }
        let s = quditlab::qudit_build(&doc.multi()?)?;
        return Ok(r.with("E_M", num(quditlab::em_qudit_numeric(&s)?)));
    }
    let h = doc.hypergraph()?;
    let s = build_state(&h)?;
    let any = a.eg || a.gmn || a.negativity.is_some();
    if a.em || !any {
        r.set("E_M", num(entangle::em_geometric(&s)?));
    }
    if a.eg {
        let res = entangle::eg_full(&s, a.restarts, a.iterations, ctx.seed)?;
        r.set("E_G", num(res.value));
    }
    if let Some(cut) = &a.negativity {
        let cut = Bipartition::from_vertices(h.n(), &parse_list(cut)?)?;
        r.set("negativity", num(entangle::negativity(&s.density(), &cut)?));
    }
    if a.gmn {
        r.set("gmn", num(entangle::gmn(&s.density())?));
    }
    Ok(r)
}

fn witness(a: WitnessArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let h = ctx.load(&a.file)?.hypergraph()?;
    let kind = match a.kind {
        WitnessChoice::Projector => WitnessKind::Projector,
        WitnessChoice::Stabilizer => WitnessKind::Stabilizer,
    };
    let param = a.param.unwrap_or_else(|| entangle::witness_default_param(kind, &h));
    let value = if a.noise.is_empty() {
        entangle::witness_value_pure(kind, &h, &build_state(&h)?, Some(param))?
    } else {
        let m = entangle::randomize(&h, &parse_noise(&a.noise)?)?;
        entangle::witness_value(kind, &h, &m, Some(param))?
    };
    Ok(Report::default()
        .with("value", num(value))
        .with("param", num(param))
        .with("gme_detected", value < -ctx.tolerance))
}

fn randomize(a: RandomizeArgs, ctx: &mut Context) -> Result<Report, CliError> {
    if let Some(spec) = &a.scaling {
        let nk = parse_list(spec)?;
        let [n, k] = nk[..] else { return Err(usage("--scaling takes n,k")) };
        let (mean, var) = entangle::purity_scaling_experiment(n, k, a.p, a.samples, ctx.seed)?;
        return Ok(Report::default()
            .with("n", n)
            .with("k", k)
            .with("samples", a.samples)
            .with("mean_purity", mean)
            .with("variance", var)
            .with("reference", 2f64.powi(-(n as i32) / 2)));
    }
    let file = a.file.as_ref().ok_or_else(|| usage("randomize needs a document or --scaling"))?;
    let h = ctx.load(file)?.hypergraph()?;
    let noise = match a.uniform {
        Some(p) => GateNoiseProfile::uniform(&cardinalities(&h), p)?,
        None if !a.noise.is_empty() => parse_noise(&a.noise)?,
        None => return Err(usage("give --noise k=p or --uniform p")),
    };
    let m = entangle::randomize(&h, &noise)?;
    let mut eig: Vec<Value> =
        m.eigenvalues().into_iter().filter(|&x| x > ctx.tolerance).map(num).collect();
    eig.truncate(64);
    let fid = entangle::witness_value(WitnessKind::Projector, &h, &m, Some(1.0))?;
    Ok(Report::default()
        .with("purity", num(m.purity()))
        .with("fidelity", num(1.0 - fid))
        .with("eigenvalues", eig))
}

fn settings_string(ps: &[Pauli]) -> String {
    ps.iter().map(|p| format!("{p:?}")).collect()
}

fn bell(a: BellArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let chosen = [a.b3, a.bn, a.bnp.is_some(), a.hardy].iter().filter(|&&x| x).count();
    if chosen != 1 {
        return Err(usage("choose exactly one of --b3, --bn, --bnp, --hardy"));
    }
    let h = ctx.load(&a.file)?.hypergraph()?;
    let n = h.n();
    if a.hardy {
        let s = build_state(&h)?;
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for (outcomes, settings) in hardy_forbidden(n)? {
            let term = Term::Prob {
                coef: Q::from_integer(1),
                settings: settings.iter().map(|&p| Some(p)).collect(),
                outcomes: outcomes.clone(),
            };
            let p = bell_value(&s, &DichotomicScenario::new(n, vec![term])?)?;
            worst = worst.max(p.abs());
            let pattern: String = outcomes.iter().map(|&o| if o > 0 { '+' } else { '-' }).collect();
            rows.push(json!({ "outcomes": pattern, "settings": settings_string(&settings), "probability": num(p) }));
        }
        return Ok(Report::default().with("forbidden", rows).with("all_zero", worst < ctx.tolerance));
    }
    let (sc, lower) = if a.b3 {
        if n != 3 {
            return Err(CliError::Domain("B_3 needs a three-qubit document".into()));
        }
        (b3_scenario(), true)
    } else if a.bn {
        (bn_operator(n)?.0, false)
    } else {
        let p = match a.bnp {
            Some(PauliChoice::X) => Pauli::X,
            _ => Pauli::Y,
        };
        (bnp_operator(n, p)?.0, false)
    };
    let exact = bell_value_exact(&h, &sc).ok();
    let value = match exact {
        Some(q) => *q.numer() as f64 / *q.denom() as f64,
        None => bell_value(&build_state(&h)?, &sc)?,
    };
    let bound = if lower { lhv_min(&sc)? } else { lhv_max(&sc)? };
    let bf = *bound.numer() as f64 / *bound.denom() as f64;
    let violation = if lower { value < bf - ctx.tolerance } else { value > bf + ctx.tolerance };
    let mut r = Report::default().with("value", num(value)).with("lhv_bound", q_value(bound)).with("violation", violation);
    if let Some(q) = exact {
        r.set("exact", q.to_string());
    }
    Ok(r)
}

fn mermin(doc: &HypergraphDocument) -> Result<Report, CliError> {
    let h = doc.hypergraph()?;
    let (op, expr) = mermin_operator(&h)?;
    let quantum = expectation_sum(&build_state(&h)?, &op)?.re;
    let bound = noncontextual_max(&expr)?;
    Ok(Report::default()
        .with("quantum_value", num(quantum))
        .with("noncontextual_bound", q_value(bound))
        .with("symbols", expr.symbols.len()))
}

fn magic(a: MagicArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let mut r = Report::default();
    if let Some(n) = a.count {
        r.set("stabilizer_states", magiclab::stabilizer_count(n).to_string());
    }
    if let Some(spec) = &a.random {
        let nk = parse_list(spec)?;
        let [n, k] = nk[..] else { return Err(usage("--random takes n,k")) };
        r.set("mean_sre", num(magiclab::random_uniform_magic(n, k, a.samples, a.alpha, ctx.seed)?));
        r.set("bound", num(magiclab::random_magic_bound(n, k, a.alpha)));
    }
    if let Some(file) = &a.file {
        let h = ctx.load(file)?.hypergraph()?;
        let s = build_state(&h)?;
        let sre = magiclab::sre(&s, a.alpha)?;
        r.set("alpha", a.alpha);
        r.set("sre", num(sre.value));
        r.set("degree_bound", num(magiclab::degree_bound(&h, a.alpha)?));
        r.set("average_degree", num(magiclab::average_degree(&h)));
        if h.n() <= 5 {
            r.set("non_quadraticity", magiclab::non_quadraticity(&TruthTable::from_hypergraph(&h)?)?);
        }
        if h.n() <= 4 {
            r.set("d_min", num(magiclab::d_min(&s)?));
        }
    }
    if r.body.is_empty() {
        return Err(usage("give a document, --count or --random"));
    }
    Ok(r)
}

fn qec_search(a: QecSearchArgs) -> Result<Report, CliError> {
    let codes = hgqec::enumerate_codes(a.n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Domain(e.to_string());
    w.write_record(["n", "M", "l", "genuine"]).map_err(err)?;
    let mut rows = Vec::new();
    for t in &codes {
        let g = t.is_genuine()?;
        w.write_record([t.n.to_string(), t.m_mask().to_string(), t.l.to_string(), g.to_string()]).map_err(err)?;
        rows.push(json!({ "n": t.n, "M": t.m_mask(), "weights": t.weights(), "l": t.l, "genuine": g }));
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| CliError::Domain(e.to_string()))?)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(Report { csv: Some(csv), preferred: Some(Format::Csv), ..Default::default() }
        .with("n", a.n)
        .with("count", codes.len())
        .with("codes", rows))
}

fn qec_verify(a: QecVerifyArgs) -> Result<Report, CliError> {
    let t = CodeTuple::new(a.n, parse_list(&a.weights)?, a.l)?;
    let d2 = hgqec::distance2_check(&t)?;
    let cw = hgqec::tuple_codewords(&t)?;
    let det = hgqec::detect_check(&cw, a.detect)?;
    let layers: Vec<usize> = t.d_layers()?.into_iter().collect();
    let mut r = Report::default()
        .with("n", t.n)
        .with("M", t.m_mask())
        .with("l", t.l)
        .with("d_layers", layers)
        .with("genuine", t.is_genuine()?)
        .with("binomial_check", hgqec::binomial_check(&t))
        .with("distance2", d2.holds())
        .with("detect_weight", a.detect)
        .with("detects", det.pass)
        .with("worst", num(det.worst));
    if let Some(v) = d2.violated() {
        r.set("violated", v);
    }
    Ok(r)
}

fn elementary_m(h: &MultiHypergraph) -> Option<u32> {
    let full: Edge = if h.n() >= 32 { u32::MAX } else { (1 << h.n()) - 1 };
    match h.edges().iter().collect::<Vec<_>>()[..] {
        [(&e, &m)] if e == full && h.phase_power() == 0 => Some(m),
        _ => None,
    }
}

fn qudit(a: QuditArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let h = ctx.load(&a.file)?.multi()?;
    let s = quditlab::qudit_build(&h)?;
    let mut r = Report::default()
        .with("d", h.d())
        .with("E_M", num(quditlab::em_qudit_numeric(&s)?))
        .with("reduced_rank", quditlab::reduced_rank_numeric(&s, 1)?)
        .with("stabilizers_verified", quditlab::verify_stabilizers(&h)?);
    if let Some(m) = elementary_m(&h) {
        r.set("elementary_m", m);
        r.set("E_M_closed", num(quditlab::em_elementary_closed(h.n(), h.d(), m)?));
        r.set("rank_closed", quditlab::elementary_rank(h.d(), m)?);
    }
    Ok(r)
}

fn cv(a: CvArgs, ctx: &mut Context) -> Result<Report, CliError> {
    let mut h: WeightedHypergraph = ctx.load(&a.file)?.weighted()?;
    let mut r = Report::default();
    let count = a.ops.len();
    for (k, op) in a.ops.iter().enumerate() {
        let parts: Vec<&str> = op.split(':').collect();
        let idx = |j: usize| -> Result<usize, CliError> {
            parts.get(j).ok_or_else(|| usage(format!("`{op}` is missing arguments")))?.trim().parse().map_err(|_| usage(format!("bad mode in `{op}`")))
        };
        let val = |j: usize| parse_weight(parts.get(j).ok_or_else(|| usage(format!("`{op}` is missing arguments")))?);
        h = match parts[0] {
            "cz" => cvlab::cv_cz(&h, &parse_list(parts.get(1).copied().unwrap_or(""))?, &val(2)?)?,
            "disp-p" => cvlab::cv_disp_momentum(&h, idx(1)?, &val(2)?)?,
            "disp-q" => cvlab::cv_disp_position(&h, idx(1)?, &val(2)?)?,
            "squeeze" => cvlab::cv_squeeze(&h, idx(1)?, &val(2)?)?,
            "squeeze-xi" => {
                let xi: f64 = parts.get(2).and_then(|t| t.parse().ok()).ok_or_else(|| usage(format!("bad xi in `{op}`")))?;
                cvlab::cv_squeeze_xi(&h, idx(1)?, xi)?
            }
            "rotate" => {
                let n: f64 = parts.get(2).and_then(|t| t.parse().ok()).ok_or_else(|| usage(format!("bad angle in `{op}`")))?;
                match cvlab::cv_rotate(&h, idx(1)?, n)? {
                    cvlab::Rotated::Hypergraph(g) => g,
                    cvlab::Rotated::LeavesHypergraphClass => {
                        return Err(CliError::Domain(format!("`{op}` leaves the hypergraph class")))
                    }
                }
            }
            "measure-q" => cvlab::cv_measure_q(&h, idx(1)?, &val(2)?)?,
            "measure-p" => {
                if k + 1 != count {
                    return Err(usage("measure-p must be the last operation"));
                }
                let res = cvlab::cv_measure_p(&h, idx(1)?)?;
                r.set("residual_factors", res.factor_count());
                match cvlab::simplify_cubic_cell(&res, &val(2)?) {
                    CubicCell::Simplified { h: g, survivors, fourier_mode } => {
                        r.set("simplified", true);
                        r.set("survivors", survivors.to_vec());
                        r.set("fourier_mode", fourier_mode);
                        g
                    }
                    CubicCell::NoSimplification(why) => {
                        r.set("simplified", false);
                        r.set("reason", why);
                        let integrand: Vec<Value> = res
                            .integrand
                            .iter()
                            .map(|(e, w)| json!({ "edge": vertices_of(*e), "weight": w.to_string() }))
                            .collect();
                        r.set("integrand", integrand);
                        res.untouched
                    }
                }
            }
            other => return Err(usage(format!("unknown cv operation `{other}`"))),
        };
    }
    if a.nullifiers {
        let ns: Vec<String> = (1..=h.n()).map(|i| cvlab::nullifier(&h, i).map(|x| x.render())).collect::<Result<_, _>>()?;
        r.set("nullifiers", ns);
    }
    Ok(r.with("document", HypergraphDocument::from_weighted(&h).to_value()))
}
