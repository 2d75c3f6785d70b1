//! The workspace file: named multicategories, presheaves, graphs and
//! functors, and the list of jobs to run against them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use mtk_core::base::{Family, FinSet, Label, Sorts};
use mtk_core::monad::Algebra;
use mtk_core::multicat::{self, Multicat, MulticatFunctor, MulticatSpec, ValidationReport};
use mtk_core::multitensor::{CatTensor, EGraph};

use crate::error::CliError;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default)]
    pub multicategories: BTreeMap<String, MulticatEntry>,
    #[serde(default)]
    pub presheaves: BTreeMap<String, PresheafSpec>,
    #[serde(default)]
    pub graphs: BTreeMap<String, GraphSpec>,
    #[serde(default)]
    pub functors: BTreeMap<String, FunctorSpec>,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

/// Either a bundled fixture or explicit tables.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MulticatEntry {
    Fixture { fixture: String },
    Tables(MulticatSpec),
}

/// A copresheaf on the linear part, given by elements per object and the
/// action of every non-identity unary multimap.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresheafSpec {
    pub base: String,
    #[serde(default)]
    pub elements: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub actions: Vec<ActionSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub op: String,
    pub src: String,
    pub tgt: String,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub base: String,
    pub objects: usize,
    /// Unlisted homs are empty.
    #[serde(default)]
    pub homs: Vec<HomSizes>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSizes {
    pub from: usize,
    pub to: usize,
    pub sizes: BTreeMap<String, usize>,
}

/// A functor identical on objects sending each multimap to the one of the
/// same name in the target unless renamed.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorSpec {
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub rename: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Convolution,
    LiftExplicit,
    LiftMonad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Axioms,
    Gamma,
    LiftTheorem,
    ConvolutionEquivalence,
    FreeComponents,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobSpec {
    Tensor {
        multicat: String,
        tuple: Vec<String>,
        #[serde(default)]
        mode: Option<Mode>,
    },
    Lift {
        multicat: String,
        tuple: Vec<String>,
    },
    Check {
        which: Which,
        #[serde(default)]
        multicat: Option<String>,
        #[serde(default)]
        graph: Option<String>,
        #[serde(default)]
        functor: Option<String>,
        #[serde(default)]
        bound: Option<usize>,
        #[serde(default)]
        max_arity: Option<usize>,
        #[serde(default)]
        max_length: Option<usize>,
    },
    Coeq {
        monad: MonadSpec,
        algebra: CoeqAlgebraSpec,
        source_sizes: Vec<usize>,
        f: Vec<Vec<usize>>,
        g: Vec<Vec<usize>>,
    },
}

impl JobSpec {
    pub fn command(&self) -> &'static str {
        match self {
            JobSpec::Tensor { .. } => "tensor",
            JobSpec::Lift { .. } => "lift",
            JobSpec::Check { .. } => "check",
            JobSpec::Coeq { .. } => "coeq",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MonadSpec {
    /// `M × -` for a monoid with element 0 the unit.
    Mset {
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        #[serde(default = "single_sort")]
        sorts: Vec<String>,
    },
    /// The unary part of a multicategory.
    E1 { multicat: String },
    Identity {
        #[serde(default = "single_sort")]
        sorts: Vec<String>,
    },
}

fn single_sort() -> Vec<String> {
    vec!["*".into()]
}

/// Carrier sizes per sort and, for monoid actions, `action[s][m][x]`; for
/// the unary part of a multicategory, a named presheaf.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeqAlgebraSpec {
    #[serde(default)]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub action: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub presheaf: Option<String>,
}

/// Parses the text of a workspace file. Blank input is the empty workspace.
pub fn parse(text: &str) -> Result<WorkspaceFile, CliError> {
    if text.trim().is_empty() {
        return Ok(WorkspaceFile::default());
    }
    serde_json::from_str(text).map_err(|e| {
        CliError::Input(format!("parse error at line {}, column {}: {e}", e.line(), e.column()))
    })
}

pub fn fixture(name: &str) -> Option<Multicat> {
    Some(match name {
        "m1" => multicat::m1(),
        "m3" => multicat::m3(),
        "m4" => multicat::m4(),
        "m4_collapsed" => multicat::m4_collapsed(),
        "nonpromonoidal" => multicat::nonpromonoidal(),
        _ => return None,
    })
}

/// The multicategories built (structurally) from a workspace, each with its
/// validation report.
pub fn build_multicats(file: &WorkspaceFile) -> Result<BTreeMap<String, (Multicat, ValidationReport)>, CliError> {
    let mut out = BTreeMap::new();
    for (name, entry) in &file.multicategories {
        let mc = match entry {
            MulticatEntry::Fixture { fixture: f } => {
                fixture(f).ok_or_else(|| CliError::Input(format!("multicategory {name}: unknown fixture {f}")))?
            }
            MulticatEntry::Tables(spec) => Multicat::from_spec_unchecked(spec)
                .map_err(|e| CliError::Input(format!("multicategory {name}: {e}")))?,
        };
        let report = mc.validate();
        out.insert(name.clone(), (mc, report));
    }
    Ok(out)
}

/// A workspace whose references all resolve and whose multicategories are
/// all valid.
pub struct Workspace {
    pub multicats: BTreeMap<String, Multicat>,
    pub file: WorkspaceFile,
}

impl Workspace {
    pub fn resolve(file: WorkspaceFile) -> Result<Workspace, CliError> {
        let built = build_multicats(&file)?;
        let mut multicats = BTreeMap::new();
        for (name, (mc, report)) in built {
            if !report.valid {
                return Err(CliError::Input(format!("multicategory {name} is not valid; run `mtk validate`")));
            }
            multicats.insert(name, mc);
        }
        let ws = Workspace { multicats, file };
        for name in ws.file.presheaves.keys() {
            ws.presheaf(name)?;
        }
        for name in ws.file.graphs.keys() {
            ws.graph(name)?;
        }
        for name in ws.file.functors.keys() {
            ws.functor(name)?;
        }
        Ok(ws)
    }

    pub fn multicat(&self, name: &str) -> Result<&Multicat, CliError> {
        self.multicats.get(name).ok_or_else(|| CliError::Input(format!("unknown multicategory {name}")))
    }

    /// A presheaf as an algebra of the unary part of its base, with its
    /// base name.
    pub fn presheaf(&self, name: &str) -> Result<(String, Algebra), CliError> {
        let spec = self.file.presheaves.get(name).ok_or_else(|| CliError::Input(format!("unknown presheaf {name}")))?;
        let mc = self.multicat(&spec.base)?;
        let bad = |msg: String| CliError::Input(format!("presheaf {name}: {msg}"));
        let e = CatTensor::new(mc).map_err(|err| bad(err.to_string()))?;
        for obj in spec.elements.keys() {
            if mc.object_index(obj).is_none() {
                return Err(bad(format!("unknown object {obj}")));
            }
        }
        let parts = mc
            .objects()
            .iter()
            .map(|o| {
                let names = spec.elements.get(o).cloned().unwrap_or_default();
                FinSet::new(names.into_iter().map(Label::Name)).map_err(|err| bad(err.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let carrier = Family::new(e.sorts().clone(), parts).map_err(|err| bad(err.to_string()))?;
        let mut tables = BTreeMap::new();
        for a in &spec.actions {
            let (src, tgt) = match (mc.object_index(&a.src), mc.object_index(&a.tgt)) {
                (Some(s), Some(t)) => (s, t),
                _ => return Err(bad(format!("action {} has unknown objects", a.op))),
            };
            let op = mc.find_op(&[src], tgt, &a.op).ok_or_else(|| bad(format!("no unary multimap {}", a.op)))?;
            tables.insert(op, &a.map);
        }
        let e1 = e.eval_fam(std::slice::from_ref(&carrier)).map_err(|err| bad(err.to_string()))?;
        let action = mtk_core::base::FamFn::from_labels(&e1, &carrier, |_, l| {
            let (op, args) = e.parse(l)?;
            if mc.is_identity(op) {
                return Ok(args[0].clone());
            }
            let table = tables.get(&op).ok_or_else(|| {
                mtk_core::MtkError::Input(format!("missing action of {}", mc.describe(op)))
            })?;
            let x = args[0].to_string();
            let y = table.get(&x).ok_or_else(|| mtk_core::MtkError::Input(format!("{} has no image of {x}", mc.op(op).name)))?;
            Ok(Label::Name(y.clone()))
        })
        .map_err(|err| bad(err.to_string()))?;
        let alg = Algebra::new(&e.unary_part(), carrier, action).map_err(|err| bad(err.to_string()))?;
        Ok((spec.base.clone(), alg))
    }

    pub fn graph(&self, name: &str) -> Result<(String, EGraph<Family>), CliError> {
        let spec = self.file.graphs.get(name).ok_or_else(|| CliError::Input(format!("unknown graph {name}")))?;
        let mc = self.multicat(&spec.base)?;
        let sorts = Sorts::names(mc.objects());
        let n = spec.objects;
        let mut homs = vec![Family::empty(&sorts); n * n];
        for h in &spec.homs {
            if h.from >= n || h.to >= n {
                return Err(CliError::Input(format!("graph {name}: hom ({}, {}) is out of range", h.from, h.to)));
            }
            let mut sizes = vec![0; sorts.len()];
            for (obj, &k) in &h.sizes {
                let i = mc.object_index(obj).ok_or_else(|| CliError::Input(format!("graph {name}: unknown object {obj}")))?;
                sizes[i] = k;
            }
            homs[h.from * n + h.to] =
                Family::of_sizes(&sorts, &sizes).map_err(|e| CliError::Input(format!("graph {name}: {e}")))?;
        }
        Ok((spec.base.clone(), EGraph::new(n, |a, b| homs[a * n + b].clone())))
    }

    pub fn functor(&self, name: &str) -> Result<MulticatFunctor, CliError> {
        let spec = self.file.functors.get(name).ok_or_else(|| CliError::Input(format!("unknown functor {name}")))?;
        let source = self.multicat(&spec.source)?.clone();
        let target = self.multicat(&spec.target)?.clone();
        let rename = spec.rename.clone();
        let k = MulticatFunctor::new(source, target, move |n| rename.get(n).cloned().unwrap_or_else(|| n.to_string()))
            .map_err(|e| CliError::Input(format!("functor {name}: {e}")))?;
        let problems = k.check();
        if !problems.is_empty() {
            return Err(CliError::Input(format!("functor {name}: {}", problems.join("; "))));
        }
        Ok(k)
    }
}
