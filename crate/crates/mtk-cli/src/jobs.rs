//! Running one job of a workspace.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use mtk_core::base::{FamFn, Family, FinFn, Sorts};
use mtk_core::convolution::{convolution_vs_lift, Convolution};
use mtk_core::lifting::{check_free_components, check_lift_theorem, compare_routes, lift_lax_functor, lift_object, lift_via_monad_route};
use mtk_core::monad::{
    alg_coeq_oracle, alg_coeq_sequential, check_simple_hypothesis, comparison_iso, free_algebra, Algebra, CoeqConfig,
    IdentityMonad, MSetMonad, Monad, Monoid,
};
use mtk_core::multicat::Multicat;
use mtk_core::multitensor::{CatTensor, EGraph, TensorMap};
use mtk_core::suites::{axiom_suite, family_tuples, gamma_suite};
use mtk_core::MtkError;

use crate::error::{describe, Status};
use crate::workspace::{CoeqAlgebraSpec, JobSpec, Mode, MonadSpec, Which, Workspace};

/// Overrides given on the command line.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Settings {
    pub bound: Option<usize>,
    pub budget: Option<usize>,
    pub mode: Option<Mode>,
}

impl Settings {
    pub fn config(&self) -> CoeqConfig {
        self.budget.map(CoeqConfig::with_budget).unwrap_or_default()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JobOutcome {
    pub index: usize,
    pub command: String,
    pub target: String,
    pub status: Status,
    pub summary: String,
    pub result: Value,
}

/// Element names, sizes and unary actions of an algebra over a multicategory.
#[derive(Clone, Debug, Serialize)]
pub struct ValueTable {
    pub sizes: BTreeMap<String, usize>,
    pub elements: BTreeMap<String, Vec<String>>,
    pub actions: Vec<ActionTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionTable {
    pub op: String,
    pub src: String,
    pub tgt: String,
    pub map: Vec<(String, String)>,
}

fn value_table(mc: &Multicat, e: &CatTensor, alg: &Algebra) -> Result<ValueTable, MtkError> {
    let objs = mc.objects();
    let sizes = objs.iter().enumerate().map(|(i, o)| (o.clone(), alg.carrier.part(i).len())).collect();
    let elements = objs
        .iter()
        .enumerate()
        .map(|(i, o)| (o.clone(), alg.carrier.part(i).labels().iter().map(|l| l.to_string()).collect()))
        .collect();
    let mut actions = Vec::new();
    for (op_i, op) in mc.ops().iter().enumerate() {
        if op.src.len() != 1 || mc.is_identity(op_i) {
            continue;
        }
        let mut map = Vec::new();
        for x in alg.carrier.part(op.src[0]).labels() {
            let l = e.element(op_i, vec![x.clone()]);
            let y = alg.action.apply_label(op.tgt, &l).ok_or_else(|| MtkError::UnknownLabel(l.to_string()))?;
            map.push((x.to_string(), y.to_string()));
        }
        actions.push(ActionTable { op: op.name.clone(), src: objs[op.src[0]].clone(), tgt: objs[op.tgt].clone(), map });
    }
    Ok(ValueTable { sizes, elements, actions })
}

fn size_summary(t: &ValueTable) -> String {
    t.sizes.iter().map(|(o, n)| format!("{o}={n}")).collect::<Vec<_>>().join(" ")
}

/// A finished job, or the error that stopped it.
struct Done {
    status: Status,
    summary: String,
    result: Value,
}

fn passed(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

pub fn run(ws: &Workspace, index: usize, job: &JobSpec, settings: &Settings) -> JobOutcome {
    let (target, outcome) = match job {
        JobSpec::Tensor { multicat, tuple, mode } => {
            let mode = settings.mode.or(*mode).unwrap_or(Mode::LiftExplicit);
            (format!("{multicat} ({})", tuple.join(", ")), run_tensor(ws, multicat, tuple, mode, settings))
        }
        JobSpec::Lift { multicat, tuple } => {
            (format!("{multicat} ({})", tuple.join(", ")), run_lift(ws, multicat, tuple, settings))
        }
        JobSpec::Check { which, multicat, graph, functor, bound, max_arity, max_length } => {
            let name = multicat.clone().or_else(|| functor.clone()).or_else(|| graph.clone()).unwrap_or_default();
            let args = CheckArgs {
                multicat: multicat.as_deref(),
                graph: graph.as_deref(),
                functor: functor.as_deref(),
                bound: settings.bound.or(*bound),
                max_arity: *max_arity,
                max_length: *max_length,
            };
            (format!("{} {name}", which_name(*which)), run_check(ws, *which, &args, settings))
        }
        JobSpec::Coeq { monad, algebra, source_sizes, f, g } => {
            (monad_name(monad), run_coeq(ws, monad, algebra, source_sizes, f, g, settings))
        }
    };
    let done = outcome.unwrap_or_else(|err| match err {
        JobError::Cli(msg) => Done { status: Status::InputError, summary: msg.clone(), result: json!({ "error": msg }) },
        JobError::Core(e) => {
            let msg = describe(&e);
            Done { status: Status::of_error(&e), summary: msg.clone(), result: json!({ "error": msg }) }
        }
    });
    JobOutcome { index, command: job.command().into(), target, status: done.status, summary: done.summary, result: done.result }
}

enum JobError {
    Cli(String),
    Core(MtkError),
}

impl From<MtkError> for JobError {
    fn from(e: MtkError) -> JobError {
        JobError::Core(e)
    }
}

impl From<crate::error::CliError> for JobError {
    fn from(e: crate::error::CliError) -> JobError {
        JobError::Cli(e.to_string())
    }
}

type JobResult = Result<Done, JobError>;

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Axioms => "axioms",
        Which::Gamma => "gamma",
        Which::LiftTheorem => "lift-theorem",
        Which::ConvolutionEquivalence => "convolution-equivalence",
        Which::FreeComponents => "free-components",
    }
}

fn monad_name(m: &MonadSpec) -> String {
    match m {
        MonadSpec::Mset { elements, .. } => format!("M-set over {{{}}}", elements.join(",")),
        MonadSpec::E1 { multicat } => format!("E1 of {multicat}"),
        MonadSpec::Identity { .. } => "identity".into(),
    }
}

fn tuple_algebras(ws: &Workspace, multicat: &str, tuple: &[String]) -> Result<Vec<Algebra>, JobError> {
    tuple
        .iter()
        .map(|p| {
            let (base, alg) = ws.presheaf(p)?;
            if base != multicat {
                return Err(JobError::Cli(format!("presheaf {p} lives over {base}, not {multicat}")));
            }
            Ok(alg)
        })
        .collect()
}

fn run_tensor(ws: &Workspace, multicat: &str, tuple: &[String], mode: Mode, settings: &Settings) -> JobResult {
    let mc = ws.multicat(multicat)?;
    let e = CatTensor::new(mc)?;
    let algs = tuple_algebras(ws, multicat, tuple)?;
    if algs.is_empty() {
        return Err(JobError::Cli("the tuple is empty".into()));
    }
    let cfg = settings.config();
    let mode_name = to_value(&mode);
    if algs.len() == 1 {
        if mode == Mode::Convolution {
            let conv = Convolution::new(mc)?;
            if !conv.unit_map(&conv.copresheaf_of(&algs[0])?)?.is_bijection() {
                return Err(MtkError::IsoNotFound("unit of the convolution is not bijective".into()).into());
            }
        }
        let table = value_table(mc, &e, &algs[0])?;
        let summary = size_summary(&table);
        return Ok(Done {
            status: Status::Pass,
            summary,
            result: json!({ "mode": mode_name, "arity": 1, "identity": true, "value": table }),
        });
    }
    let (alg, extra) = match mode {
        Mode::Convolution => {
            let conv = Convolution::new(mc)?;
            let cs = algs.iter().map(|a| conv.copresheaf_of(a)).collect::<Result<Vec<_>, _>>()?;
            let co = conv.coend(&cs)?;
            let relations = co.presentation.relations;
            (conv.algebra_of(&co.value)?, json!({ "generators": co.presentation.generators.sizes(), "relations": relations }))
        }
        Mode::LiftExplicit => {
            let r = lift_object(&e, &algs, &cfg)?;
            (r.algebra, json!({ "stage": r.stage, "trace": r.trace.export() }))
        }
        Mode::LiftMonad => {
            let r = lift_via_monad_route(&e, &algs, &cfg)?;
            (r.algebra, json!({ "stage": r.stage, "fast_path": r.fast_path }))
        }
    };
    let table = value_table(mc, &e, &alg)?;
    Ok(Done {
        status: Status::Pass,
        summary: size_summary(&table),
        result: json!({ "mode": mode_name, "arity": algs.len(), "budget": cfg.budget, "value": table, "details": extra }),
    })
}

fn run_lift(ws: &Workspace, multicat: &str, tuple: &[String], settings: &Settings) -> JobResult {
    let mc = ws.multicat(multicat)?;
    let e = CatTensor::new(mc)?;
    let algs = tuple_algebras(ws, multicat, tuple)?;
    if algs.is_empty() {
        return Err(JobError::Cli("the tuple is empty".into()));
    }
    let cfg = settings.config();
    let r = lift_object(&e, &algs, &cfg)?;
    let table = value_table(mc, &e, &r.algebra)?;
    let (routes, agree) = match compare_routes(&e, &algs, &cfg) {
        Ok(c) => (to_value(&c), true),
        Err(MtkError::IsoNotFound(msg)) => (json!({ "error": msg }), false),
        Err(err) => return Err(err.into()),
    };
    let summary = format!("{} (stage {}, routes agree: {agree})", size_summary(&table), r.stage);
    Ok(Done {
        status: passed(agree),
        summary,
        result: json!({
            "budget": cfg.budget,
            "value": table,
            "stage": r.stage,
            "trace": r.trace.export(),
            "routes": routes,
            "routes_agree": agree,
        }),
    })
}

struct CheckArgs<'a> {
    multicat: Option<&'a str>,
    graph: Option<&'a str>,
    functor: Option<&'a str>,
    bound: Option<usize>,
    max_arity: Option<usize>,
    max_length: Option<usize>,
}

fn need<'a>(v: Option<&'a str>, what: &str) -> Result<&'a str, JobError> {
    v.ok_or_else(|| JobError::Cli(format!("this check needs a {what}")))
}

fn run_check(ws: &Workspace, which: Which, args: &CheckArgs<'_>, settings: &Settings) -> JobResult {
    let cfg = settings.config();
    let cap = 1u128 << 20;
    match which {
        Which::Axioms => {
            let mc = ws.multicat(need(args.multicat, "multicat")?)?;
            let rep = axiom_suite(mc, args.bound.unwrap_or(2))?;
            let summary = format!(
                "{} tuples, {} unit and {} associativity instances",
                rep.report.tuples, rep.report.unit_instances, rep.report.assoc_instances
            );
            Ok(Done { status: passed(rep.report.passed), summary, result: to_value(&rep) })
        }
        Which::Gamma => {
            let mc = ws.multicat(need(args.multicat, "multicat")?)?;
            let len = args.max_length.unwrap_or(3);
            let rep = gamma_suite(mc, args.bound.unwrap_or(2), len, len.min(2))?;
            let summary = format!("{} graphs, {} path-like instances", rep.graphs, rep.pathlike.instances);
            Ok(Done { status: passed(rep.passed), summary, result: to_value(&rep) })
        }
        Which::LiftTheorem => {
            let name = need(args.multicat, "multicat")?;
            let mc = ws.multicat(name)?;
            let e = CatTensor::new(mc)?;
            let graph = match args.graph {
                Some(g) => {
                    let (base, graph) = ws.graph(g)?;
                    if base != name {
                        return Err(JobError::Cli(format!("graph {g} lives over {base}, not {name}")));
                    }
                    graph
                }
                None => {
                    let hom = Family::of_sizes(e.sorts(), &vec![args.bound.unwrap_or(2); e.sorts().len()])?;
                    EGraph::new(1, |_, _| hom.clone())
                }
            };
            let rep = check_lift_theorem(&e, &graph, &cfg, cap)?;
            let summary = format!("{} = {} structures", rep.e_categories, rep.lifted_categories);
            Ok(Done { status: passed(rep.passed), summary, result: json!({ "budget": cfg.budget, "report": rep }) })
        }
        Which::ConvolutionEquivalence => {
            let mc = ws.multicat(need(args.multicat, "multicat")?)?;
            let bound = args.bound.unwrap_or(2);
            let rep = convolution_vs_lift(mc, bound, args.max_arity.unwrap_or(3), 2, &cfg)?;
            let summary =
                format!("{} tuples, {} substitution squares, {} failures", rep.tuples, rep.subst_squares, rep.failures.len());
            Ok(Done { status: passed(rep.passed), summary, result: json!({ "budget": cfg.budget, "report": rep }) })
        }
        Which::FreeComponents => {
            let k = ws.functor(need(args.functor, "functor")?)?;
            let psi = TensorMap::from_functor(&k)?;
            let lift = lift_lax_functor(&psi, &cfg)?;
            let bound = args.bound.unwrap_or(2);
            let max_arity = args.max_arity.unwrap_or(usize::MAX).min(psi.source.multicat().arity_bound());
            let tuples = family_tuples(psi.source.sorts(), bound, max_arity);
            let rep = check_free_components(&lift, &tuples)?;
            let summary = format!("{} tuples, {} failures", rep.tuples, rep.failures.len());
            Ok(Done {
                status: passed(rep.passed),
                summary,
                result: json!({ "value_bound": bound, "max_arity": max_arity, "report": rep }),
            })
        }
    }
}

fn run_coeq(
    ws: &Workspace,
    monad: &MonadSpec,
    alg: &CoeqAlgebraSpec,
    source_sizes: &[usize],
    f: &[Vec<usize>],
    g: &[Vec<usize>],
    settings: &Settings,
) -> JobResult {
    let cfg = settings.config();
    match monad {
        MonadSpec::Mset { elements, table, sorts } => {
            let names: Vec<&str> = elements.iter().map(String::as_str).collect();
            let t = MSetMonad::new(Monoid::new(&names, table.clone())?, &Sorts::names(sorts));
            let carrier = Family::of_sizes(&t.sorts, &alg.sizes)?;
            let b = t.algebra_from_table(&carrier, &alg.action)?;
            coeq_with(&t, &b, source_sizes, f, g, &cfg)
        }
        MonadSpec::Identity { sorts } => {
            let t = IdentityMonad::new(&Sorts::names(sorts));
            let carrier = Family::of_sizes(&t.sorts, &alg.sizes)?;
            let b = free_algebra(&t, &carrier)?;
            coeq_with(&t, &b, source_sizes, f, g, &cfg)
        }
        MonadSpec::E1 { multicat } => {
            let e = CatTensor::new(ws.multicat(multicat)?)?;
            let p = alg.presheaf.as_deref().ok_or_else(|| JobError::Cli("an E1 coequaliser needs a presheaf".into()))?;
            let (base, b) = ws.presheaf(p)?;
            if base != *multicat {
                return Err(JobError::Cli(format!("presheaf {p} lives over {base}, not {multicat}")));
            }
            coeq_with(&e.unary_part(), &b, source_sizes, f, g, &cfg)
        }
    }
}

fn parallel_map(src: &Family, cod: &Family, tables: &[Vec<usize>]) -> Result<FamFn, MtkError> {
    if tables.len() != src.sorts().len() {
        return Err(MtkError::Input(format!("expected {} tables, got {}", src.sorts().len(), tables.len())));
    }
    let comps = tables
        .iter()
        .enumerate()
        .map(|(s, t)| FinFn::new(src.part(s).clone(), cod.part(s).clone(), t.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    FamFn::new(src.clone(), cod.clone(), comps)
}

fn coeq_with<T: Monad>(
    t: &T,
    b: &Algebra,
    source_sizes: &[usize],
    f: &[Vec<usize>],
    g: &[Vec<usize>],
    cfg: &CoeqConfig,
) -> JobResult {
    let src = Family::of_sizes(b.carrier.sorts(), source_sizes)?;
    let f = parallel_map(&src, &b.carrier, f)?;
    let g = parallel_map(&src, &b.carrier, g)?;
    let hyp = check_simple_hypothesis(t, &f, &g)?;
    let seq = alg_coeq_sequential(t, b, &f, &g, cfg)?;
    let (oracle, oproj) = alg_coeq_oracle(t, b, &f, &g)?;
    let agree = comparison_iso(t, (&seq.algebra, &seq.proj), (&oracle, &oproj)).is_ok();
    let trace = seq.trace.export();
    let summary = format!(
        "sizes {:?}, stabilised at {}, oracle agrees: {agree}",
        seq.algebra.carrier.sizes(),
        trace.stabilised_at.map_or("-".to_string(), |s| s.to_string())
    );
    Ok(Done {
        status: passed(agree),
        summary,
        result: json!({
            "budget": cfg.budget,
            "sizes": seq.algebra.carrier.sizes(),
            "oracle_sizes": oracle.carrier.sizes(),
            "oracle_agrees": agree,
            "simple_hypothesis": hyp,
            "trace": trace,
        }),
    })
}
