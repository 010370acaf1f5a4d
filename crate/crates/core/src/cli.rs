//! Command-line entry points. Every subcommand reads instance bundles and
//! writes one JSON report; the exit code is 0 when all checks pass, 1 when
//! a mathematical check fails (the report then carries a witness) and 2 on
//! malformed input.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::descent::{
    assemble_descent_hodge, descent_check, descent_row, hypercover_check, simplicial_resolution, DownSets, DownSetsAndPoint,
    Resolver,
};
use crate::filtcx::{Chain, TriFilteredComplex, Which};
use crate::finspace::{
    bar_complex, godement_cohomology, mayer_vietoris_check, monad_t, sheaf_cohomology, vanishing_check, FinitePoset,
    PosetSheaf, Stratification,
};
use crate::generate::{self, Defect, HodgeSize, DEFECTS};
use crate::hodge::{prop_grf_degeneration, theorem1, validate_hodge_complex, CHodgeStructure};
use crate::json::{
    BlowDownJson, CoefficientsJson, ComplexJson, HodgeComplexJson, InputError, InstanceBundle, Kind, PosetJson,
    RowJson, SheafJson, SimplicialJson,
};
use crate::qlinalg::Q;
use crate::specseq::{direct_filtration, recursive_filtration, SpectralSequence};

#[derive(Parser, Debug)]
#[command(name = "hodgekit", version, about = "Exact checks on trifiltered complexes, Hodge complexes and finite spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for generated instances.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Size bound: total dimension for complexes, number of points for posets.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Degree through which descent and bar checks run.
    #[arg(long, global = true)]
    pub degree_bound: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Emit a generated instance bundle.
    Generate {
        #[arg(value_enum)]
        kind: GenKind,
        /// Axiom to break for `invalid-hodge-complex` (default: chosen by the seed).
        #[arg(long, value_enum)]
        defect: Option<DefectArg>,
    },
    /// HC1 to HC3 on a hodge-complex bundle.
    Validate { input: String },
    /// Hodge structures on cohomology with the degeneration certificate.
    Mhs { input: String },
    /// Pages of the spectral sequence of one filtration.
    Pages {
        input: String,
        #[arg(long, value_enum, default_value = "w")]
        filtration: FiltArg,
        /// Plain-text grid of dimensions instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Degeneration pages of the W, F and Fbar spectral sequences.
    Degeneration { input: String },
    /// Sheaf cohomology (or complex cohomology for a complex bundle).
    Cohomology { input: String },
    /// Stratification, monad and bar-complex checks on a stratified sheaf.
    BarCheck { input: String },
    /// Mayer-Vietoris for a blow-down square.
    MvCheck { input: String },
    /// Simplicial resolution of a poset through level `--degree-bound` + 1.
    Resolve {
        input: String,
        #[arg(long, value_enum, default_value = "down-sets")]
        resolver: ResolverArg,
    },
    /// Surjectivity of each level of a simplicial bundle onto its cycle object.
    HypercoverCheck { input: String },
    /// Descent through `--degree-bound`: a row bundle, or a simplicial bundle and a sheaf bundle.
    DescentCheck {
        #[arg(required = true, num_args = 1..=2)]
        inputs: Vec<String>,
    },
    /// Hodge structures on the total complex of a descent row.
    Assemble { input: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    HodgeComplex,
    InvalidHodgeComplex,
    NondegenerateControl,
    Poset,
    StratifiedSheaf,
    Circle,
    BlowDown,
    BlowDownExample,
    Simplicial,
    Row,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectArg {
    NotStrictF,
    NotStrictFbar,
    NotOpposed,
    WrongWeight,
    NotAComplex,
}

impl From<DefectArg> for Defect {
    fn from(d: DefectArg) -> Defect {
        match d {
            DefectArg::NotStrictF => Defect::NotStrictF,
            DefectArg::NotStrictFbar => Defect::NotStrictFbar,
            DefectArg::NotOpposed => Defect::NotOpposed,
            DefectArg::WrongWeight => Defect::WrongWeight,
            DefectArg::NotAComplex => Defect::NotAComplex,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltArg {
    W,
    F,
    Fbar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolverArg {
    DownSets,
    DownSetsAndPoint,
}

/// Text for stdout, a log line for stderr and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub log: String,
}

impl Outcome {
    fn report(code: i32, v: Value, log: String) -> Self {
        Outcome { code, output: serde_json::to_string_pretty(&v).expect("report serializes") + "\n", log }
    }
}

/// Reads each path (`-` for stdin) and runs the subcommand.
pub fn run(cli: &Cli) -> Outcome {
    let read = |p: &str| -> Result<String, InputError> {
        if p == "-" {
            std::io::read_to_string(std::io::stdin()).map_err(|e| InputError::Malformed(e.to_string()))
        } else {
            std::fs::read_to_string(p).map_err(|e| InputError::Malformed(format!("{p}: {e}")))
        }
    };
    let paths: Vec<&String> = match &cli.command {
        Command::Generate { .. } => vec![],
        Command::DescentCheck { inputs } => inputs.iter().collect(),
        Command::Validate { input }
        | Command::Mhs { input }
        | Command::Pages { input, .. }
        | Command::Degeneration { input }
        | Command::Cohomology { input }
        | Command::BarCheck { input }
        | Command::MvCheck { input }
        | Command::Resolve { input, .. }
        | Command::HypercoverCheck { input }
        | Command::Assemble { input } => vec![input],
    };
    let mut texts = Vec::new();
    for p in paths {
        match read(p) {
            Ok(t) => texts.push(t),
            Err(e) => return failure(e),
        }
    }
    execute(cli, &texts)
}

fn failure(e: InputError) -> Outcome {
    match e {
        InputError::Malformed(m) => Outcome::report(2, json!({ "error": m }), format!("malformed input: {m}")),
        InputError::Check(c) => Outcome::report(1, json!({ "passed": false, "failure": c }), format!("check failed: {c}")),
    }
}

/// Runs the subcommand on already-read bundle texts.
pub fn execute(cli: &Cli, inputs: &[String]) -> Outcome {
    match dispatch(cli, inputs) {
        Ok(o) => o,
        Err(e) => failure(e),
    }
}

fn lib(e: crate::error::Error) -> InputError {
    InputError::Malformed(e.to_string())
}

fn bundle(text: &str) -> Result<InstanceBundle, InputError> {
    InstanceBundle::from_json(text)
}

fn hodge_input(text: &str) -> Result<TriFilteredComplex, InputError> {
    let b = bundle(text)?;
    b.expect(Kind::HodgeComplex)?;
    b.payload::<HodgeComplexJson>()?.to_trifiltered()
}

fn sheaf_input(b: &InstanceBundle) -> Result<(PosetSheaf, Option<Stratification>), InputError> {
    b.expect(Kind::Sheaf)?;
    let s: SheafJson = b.payload()?;
    Ok((s.to_sheaf()?, s.to_stratification()?))
}

fn verdict(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn chain_dims(c: &Chain<Q>) -> BTreeMap<i32, usize> {
    c.jumps().into_iter().map(|p| (p, c.dim_at(p))).collect()
}

#[derive(Serialize)]
struct StructureReport {
    degree: i32,
    dim: usize,
    opposed: bool,
    /// `[n, p, q, h^{p,q}]` on `Gr^W_n`.
    hodge_numbers: Vec<[i64; 4]>,
    #[serde(rename = "F")]
    f: BTreeMap<i32, usize>,
    #[serde(rename = "Fbar")]
    fbar: BTreeMap<i32, usize>,
    /// `dim W_n` at the jumps of the increasing weight filtration.
    #[serde(rename = "W")]
    w: BTreeMap<i32, usize>,
}

fn structure_report(degree: i32, h: &CHodgeStructure<Q>, opposed: bool) -> StructureReport {
    let hodge_numbers = h.hodge_numbers().into_iter().map(|((n, p, q), d)| [n as i64, p as i64, q as i64, d as i64]).collect();
    let w = h.weights().into_iter().map(|n| (n, h.weight_step(n).dim())).collect();
    StructureReport { degree, dim: h.dim(), opposed, hodge_numbers, f: chain_dims(&h.f), fbar: chain_dims(&h.fbar), w }
}

fn dispatch(cli: &Cli, inputs: &[String]) -> Result<Outcome, InputError> {
    match &cli.command {
        Command::Generate { kind, defect } => generate_bundle(cli, *kind, *defect),
        Command::Validate { .. } => {
            let t = hodge_input(&inputs[0])?;
            Ok(match validate_hodge_complex(&t) {
                Ok(_) => Outcome::report(
                    0,
                    json!({ "passed": true, "valid": true, "total_dim": t.complex.total_dim() }),
                    "HC1-HC3 hold".into(),
                ),
                Err(f) => {
                    let log = format!("{:?} fails: {}", f.axiom, f.detail);
                    Outcome::report(1, json!({ "passed": false, "valid": false, "failure": f }), log)
                }
            })
        }
        Command::Mhs { .. } => {
            let t = hodge_input(&inputs[0])?;
            let a = match validate_hodge_complex(&t) {
                Ok(a) => a,
                Err(f) => return Ok(Outcome::report(1, json!({ "passed": false, "failure": f }), f.detail)),
            };
            let th = theorem1(&a);
            let structures: Vec<StructureReport> =
                th.structures.iter().map(|s| structure_report(s.degree, &s.structure, s.opposed)).collect();
            let ok = th.certified();
            let opposed_fail: Vec<i32> = th.structures.iter().filter(|s| !s.opposed).map(|s| s.degree).collect();
            Ok(Outcome::report(
                verdict(ok),
                json!({
                    "passed": ok,
                    "structures": structures,
                    "degeneration": { "W": th.w_degeneration, "F": th.f_degeneration, "Fbar": th.fbar_degeneration },
                    "e1_pure": th.e1_pure,
                    "e2_pure": th.e2_pure,
                    "d2_zero": th.d2_zero,
                    "witness": { "non_opposed_degrees": opposed_fail },
                }),
                format!("{} degrees", th.structures.len()),
            ))
        }
        Command::Pages { filtration, text, .. } => {
            let t = hodge_input(&inputs[0])?;
            let (main, others) = match filtration {
                FiltArg::W => (Which::W, [Which::F, Which::Fbar]),
                FiltArg::F => (Which::F, [Which::W, Which::Fbar]),
                FiltArg::Fbar => (Which::Fbar, [Which::W, Which::F]),
            };
            let ss = SpectralSequence::new(&t.complex, t.filtration(main));
            if *text {
                return Ok(Outcome { code: 0, output: render_grid(&ss), log: String::new() });
            }
            let mut pages = Vec::new();
            for r in 0..=ss.stable_page() {
                let page = ss.page(r);
                let filts: Vec<_> = others
                    .iter()
                    .map(|&w| {
                        let f = t.filtration(w);
                        (w.name(), if r == 0 { direct_filtration(&ss, f, 0) } else { recursive_filtration(&ss, f, r) })
                    })
                    .collect();
                let entries: Vec<Value> = page
                    .entries()
                    .map(|e| {
                        let fl: BTreeMap<&str, BTreeMap<i32, usize>> = filts
                            .iter()
                            .map(|(name, pf)| (*name, pf.chain(e.p, e.q).map(chain_dims).unwrap_or_default()))
                            .collect();
                        json!({ "p": e.p, "q": e.q, "dim": e.dim(), "filtrations": fl })
                    })
                    .collect();
                let rr = r as i32;
                let diffs: Vec<Value> = page
                    .entries()
                    .filter(|e| page.dim(e.p + rr, e.q - rr + 1) > 0 && e.dim() > 0)
                    .map(|e| {
                        json!({
                            "from": [e.p, e.q],
                            "to": [e.p + rr, e.q - rr + 1],
                            "matrix": crate::json::MatrixJson::from_matrix(&page.d(e.p, e.q)),
                        })
                    })
                    .collect();
                pages.push(json!({ "r": r, "entries": entries, "differentials": diffs }));
            }
            Ok(Outcome::report(
                0,
                json!({ "filtration": main.name(), "degeneration_page": ss.degeneration_page(), "stable_page": ss.stable_page(), "pages": pages }),
                format!("{} pages", ss.stable_page() + 1),
            ))
        }
        Command::Degeneration { .. } => {
            let t = hodge_input(&inputs[0])?;
            let page = |w: Which| SpectralSequence::new(&t.complex, t.filtration(w)).degeneration_page();
            let (w, f, fb) = (page(Which::W), page(Which::F), page(Which::Fbar));
            let validity = validate_hodge_complex(&t);
            let grf: Vec<Value> = match &validity {
                Ok(a) => {
                    let (lo, hi) = t.f.bounds();
                    (lo..hi).map(|i| serde_json::to_value(prop_grf_degeneration(a, i)).expect("serializes")).collect()
                }
                Err(_) => vec![],
            };
            let ok = validity.is_ok() && w <= 2 && f == 1 && fb == 1;
            let mut report = json!({ "passed": ok, "W": w, "F": f, "Fbar": fb, "gr_f": grf });
            if let Err(fl) = validity {
                report["failure"] = serde_json::to_value(fl).expect("serializes");
            }
            Ok(Outcome::report(verdict(ok), report, format!("W {w}, F {f}, Fbar {fb}")))
        }
        Command::Cohomology { .. } => {
            let b = bundle(&inputs[0])?;
            if b.kind == Kind::Complex {
                let c = b.payload::<ComplexJson>()?.to_complex()?;
                let betti: BTreeMap<i32, usize> = c.degrees().map(|n| (n, c.betti(n))).collect();
                return Ok(Outcome::report(0, json!({ "passed": true, "betti": betti }), String::new()));
            }
            let (f, _) = sheaf_input(&b)?;
            let h = sheaf_cohomology(&f);
            let depth = h.len() + 1;
            let g = godement_cohomology(&f, depth);
            let agree = g[..depth - 1].iter().zip(&h).all(|(a, b)| a == b) && g[h.len()..depth - 1].iter().all(|&d| d == 0);
            let report = json!({ "passed": agree, "dims": h, "godement": g, "godement_depth": depth });
            Ok(Outcome::report(verdict(agree), report, format!("H^* dims {h:?}")))
        }
        Command::BarCheck { .. } => {
            let b = bundle(&inputs[0])?;
            let (f, strat) = sheaf_input(&b)?;
            let strat = strat.unwrap_or_else(|| Stratification::trivial(f.base()));
            let n_max = cli.degree_bound.unwrap_or(f.base().height() + 2);
            let cc = f.is_constant_constructible(&strat);
            let closure = strat.closure_lemma_holds();
            let van = vanishing_check(&strat);
            let monad = monad_t(&strat, &f).map_err(lib)?.laws();
            let (_, bar) = bar_complex(&strat, &f, n_max).map_err(lib)?;
            let ok = cc && closure && van.holds && monad.holds() && bar.holds();
            let report = json!({
                "passed": ok,
                "constant_constructible": cc,
                "closure_lemma": closure,
                "vanishing": { "holds": van.holds, "witness": van.counterexample },
                "monad": { "left_unit": monad.left_unit, "right_unit": monad.right_unit, "associative": monad.associative },
                "bar": {
                    "n_max": bar.n_max,
                    "cosimplicial": bar.cosimplicial,
                    "natural": bar.natural,
                    "d_squared_zero": bar.d_squared_zero,
                    "matches_iterated": bar.matches_iterated,
                    "contracting": bar.contracting,
                },
            });
            Ok(Outcome::report(verdict(ok), report, format!("{} atoms", strat.len())))
        }
        Command::MvCheck { .. } => {
            let b = bundle(&inputs[0])?;
            b.expect(Kind::BlowDown)?;
            let (sq, f) = b.payload::<BlowDownJson>()?.to_blow_down()?;
            let rep = mayer_vietoris_check(&sq, &f).map_err(lib)?;
            let bad: Vec<usize> = rep.stalks.iter().filter(|s| !s.2).map(|s| s.0).collect();
            let report = json!({
                "passed": rep.holds(),
                "exact": rep.exact,
                "quasi_iso": rep.quasi_iso,
                "dims": rep.dims,
                "witness": { "failing_points": bad, "detail": rep.failure },
            });
            Ok(Outcome::report(verdict(rep.holds()), report, String::new()))
        }
        Command::Resolve { resolver, .. } => {
            let b = bundle(&inputs[0])?;
            b.expect(Kind::Poset)?;
            let p = b.payload::<PosetJson>()?.to_poset()?;
            let top = cli.degree_bound.unwrap_or(2) + 1;
            let r: &dyn Resolver = match resolver {
                ResolverArg::DownSets => &DownSets,
                ResolverArg::DownSetsAndPoint => &DownSetsAndPoint,
            };
            let x = simplicial_resolution(&p, r, top).map_err(lib)?;
            let out = InstanceBundle::new(Kind::Simplicial, b.seed, &SimplicialJson::from_space(&x));
            let sizes: Vec<usize> = (0..=top).map(|n| x.level(n).len()).collect();
            Ok(Outcome { code: 0, output: out.to_json() + "\n", log: format!("level sizes {sizes:?}") })
        }
        Command::HypercoverCheck { .. } => {
            let b = bundle(&inputs[0])?;
            b.expect(Kind::Simplicial)?;
            let x = b.payload::<SimplicialJson>()?.to_space()?;
            let rep = hypercover_check(&x);
            let report = json!({
                "passed": rep.holds,
                "witness": { "failing_level": rep.failing_level, "missed": rep.missed },
            });
            Ok(Outcome::report(verdict(rep.holds), report, String::new()))
        }
        Command::DescentCheck { .. } => {
            let (x, f) = match inputs {
                [one] => {
                    let b = bundle(one)?;
                    b.expect(Kind::Row)?;
                    let r: RowJson = b.payload()?;
                    (r.simplicial.to_space()?, r.sheaf.to_sheaf()?)
                }
                [a, c] => {
                    let (a, c) = (bundle(a)?, bundle(c)?);
                    a.expect(Kind::Simplicial)?;
                    (a.payload::<SimplicialJson>()?.to_space()?, sheaf_input(&c)?.0)
                }
                _ => return Err(InputError::Malformed("descent-check takes one or two inputs".into())),
            };
            let k = cli.degree_bound.unwrap_or(2);
            let rep = descent_check(&x, &f, k).map_err(lib)?;
            let witness: Vec<Value> = rep.failures.iter().map(|(u, d)| json!({ "open": u, "degree": d })).collect();
            let report = json!({ "passed": rep.holds, "degree_bound": rep.degree_bound, "witness": witness });
            Ok(Outcome::report(verdict(rep.holds), report, String::new()))
        }
        Command::Assemble { .. } => {
            let b = bundle(&inputs[0])?;
            b.expect(Kind::Row)?;
            let r: RowJson = b.payload()?;
            let x = r.simplicial.to_space()?;
            let f = r.sheaf.to_sheaf()?;
            let v = r.coefficients.to_coefficients()?;
            let row = descent_row(&x, &f, &v).map_err(lib)?;
            let dh = assemble_descent_hodge(&row).map_err(lib)?;
            let th = &dh.theorem;
            let top = x.top() as i32;
            let structures: Vec<StructureReport> = th
                .structures
                .iter()
                .filter(|s| s.degree < top)
                .map(|s| structure_report(s.degree, &s.structure, s.opposed))
                .collect();
            let ok = th.certified();
            let report = json!({
                "passed": ok,
                "reliable_below": top,
                "structures": structures,
                "degeneration": { "W": th.w_degeneration, "F": th.f_degeneration, "Fbar": th.fbar_degeneration },
                "witness": { "non_opposed_degrees": th.structures.iter().filter(|s| !s.opposed).map(|s| s.degree).collect::<Vec<_>>() },
            });
            Ok(Outcome::report(verdict(ok), report, String::new()))
        }
    }
}

fn render_grid(ss: &SpectralSequence) -> String {
    let mut out = String::new();
    for r in 0..=ss.stable_page() {
        let page = ss.page(r);
        let pos = page.positions();
        out.push_str(&format!("E_{r}\n"));
        if pos.is_empty() {
            out.push_str("  (zero)\n");
            continue;
        }
        let (plo, phi) = (pos.iter().map(|x| x.0).min().unwrap(), pos.iter().map(|x| x.0).max().unwrap());
        let (qlo, qhi) = (pos.iter().map(|x| x.1).min().unwrap(), pos.iter().map(|x| x.1).max().unwrap());
        for q in (qlo..=qhi).rev() {
            out.push_str(&format!("{q:>4} |"));
            for p in plo..=phi {
                let d = page.dim(p, q);
                out.push_str(&if d == 0 { "    .".to_string() } else { format!("{d:>5}") });
            }
            out.push('\n');
        }
        out.push_str("     +");
        out.push_str(&"-----".repeat((phi - plo + 1) as usize));
        out.push_str("\n      ");
        for p in plo..=phi {
            out.push_str(&format!("{p:>5}"));
        }
        out.push('\n');
    }
    out
}

fn generate_bundle(cli: &Cli, kind: GenKind, defect: Option<DefectArg>) -> Result<Outcome, InputError> {
    let seed = cli.seed.unwrap_or(0);
    let mut rng = generate::rng(seed);
    let points = cli.size.unwrap_or(6);
    if points == 0 {
        return Err(InputError::Malformed("--size must be positive".into()));
    }
    let mut log = format!("seed {seed}");
    let b = match kind {
        GenKind::HodgeComplex => {
            let size = HodgeSize { max_dim: cli.size.unwrap_or(40), ..HodgeSize::default() };
            size.check().map_err(lib)?;
            let (a, how) = generate::random_hodge_complex(&mut rng, &size);
            log.push_str(&format!(", built by {how:?}"));
            InstanceBundle::new(Kind::HodgeComplex, Some(seed), &HodgeComplexJson::from_trifiltered(&a))
        }
        GenKind::InvalidHodgeComplex => {
            let d = match defect {
                Some(d) => d.into(),
                None => DEFECTS[(seed % DEFECTS.len() as u64) as usize],
            };
            let inst = generate::invalid_instance(&mut rng, d);
            log.push_str(&format!(", defect {:?}, expected {:?}", inst.defect, inst.expected));
            InstanceBundle::new(Kind::HodgeComplex, Some(seed), &inst.data)
        }
        GenKind::NondegenerateControl => {
            InstanceBundle::new(Kind::HodgeComplex, None, &HodgeComplexJson::from_trifiltered(&generate::nondegenerate_control()))
        }
        GenKind::Poset => {
            let p = generate::random_connected_poset(&mut rng, points.min(8), points);
            InstanceBundle::new(Kind::Poset, Some(seed), &PosetJson::from_poset(&p))
        }
        GenKind::StratifiedSheaf => {
            let s = generate::random_stratified_poset(&mut rng, points.min(10), 4);
            let f = generate::random_cc_sheaf(&mut rng, &s, 3);
            InstanceBundle::new(Kind::Sheaf, Some(seed), &SheafJson::from_sheaf(&f, Some(&s)))
        }
        GenKind::Circle => {
            let c = FinitePoset::circle();
            let f = PosetSheaf::constant(&c, 1);
            InstanceBundle::new(Kind::Sheaf, None, &SheafJson::from_sheaf(&f, Some(&Stratification::trivial(&c))))
        }
        GenKind::BlowDown => {
            let sq = generate::random_blow_down(&mut rng, points.clamp(2, 8));
            let f = generate::random_cc_sheaf(&mut rng, &Stratification::by_points(&sq.x), 2);
            InstanceBundle::new(Kind::BlowDown, Some(seed), &BlowDownJson::from_blow_down(&sq, Some(&f)))
        }
        GenKind::BlowDownExample => {
            InstanceBundle::new(Kind::BlowDown, None, &BlowDownJson::from_blow_down(&generate::blow_down_example(), None))
        }
        GenKind::Simplicial | GenKind::Row => {
            let p = generate::random_connected_poset(&mut rng, points.min(5), 2);
            let top = cli.degree_bound.unwrap_or(2) + 1;
            let x = simplicial_resolution(&p, &DownSets, top).map_err(lib)?;
            if kind == GenKind::Simplicial {
                InstanceBundle::new(Kind::Simplicial, Some(seed), &SimplicialJson::from_space(&x))
            } else {
                let s = generate::random_stratification(&mut rng, &p, 3);
                let f = generate::random_cc_sheaf(&mut rng, &s, 2);
                let row = RowJson {
                    simplicial: SimplicialJson::from_space(&x),
                    sheaf: SheafJson::from_sheaf(&f, Some(&s)),
                    coefficients: CoefficientsJson { weight: 0, hodge: vec![(0, 1)] },
                };
                InstanceBundle::new(Kind::Row, Some(seed), &row)
            }
        }
    };
    Ok(Outcome { code: 0, output: b.to_json() + "\n", log })
}

