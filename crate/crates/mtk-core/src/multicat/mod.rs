//! Finite, arity-bounded multicategories: objects, multimaps with non-empty
//! source sequences, identities and an explicit substitution table.

mod fixtures;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::base::{CatMor, FinCat, Label};
use crate::error::{MtkError, Result};

pub use fixtures::{discrete, m1, m3, m4, m4_collapsed, monoid_multicat, monoid_operad, nonpromonoidal, random_multicat, semigroup_operad};

/// A multimap `src -> tgt` named `name`; names are unique within a hom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Op {
    pub src: Vec<usize>,
    pub tgt: usize,
    pub name: String,
}

/// Reference to a multimap in the JSON schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefSpec {
    pub src: Vec<String>,
    pub tgt: String,
    pub elem: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomSpec {
    pub src: Vec<String>,
    pub tgt: String,
    pub elems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstSpec {
    pub outer: RefSpec,
    pub inners: Vec<RefSpec>,
    pub result: RefSpec,
}

/// Raw tables as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MulticatSpec {
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_bound: Option<usize>,
    #[serde(default)]
    pub multihoms: Vec<HomSpec>,
    pub identities: BTreeMap<String, String>,
    #[serde(default)]
    pub subst: Vec<SubstSpec>,
}

/// A finite multicategory truncated at an arity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multicat {
    objects: Vec<String>,
    arity_bound: usize,
    ops: Vec<Op>,
    homs: HashMap<(Vec<usize>, usize), Vec<usize>>,
    by_tgt: Vec<Vec<usize>>,
    identities: Vec<usize>,
    subst: HashMap<(usize, Vec<usize>), usize>,
    by_label: HashMap<Label, usize>,
}

/// Complete list of axiom failures within the arity bound.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub arity_bound: usize,
    pub unit_instances: usize,
    pub assoc_instances: usize,
    pub unit_violations: Vec<String>,
    pub assoc_violations: Vec<String>,
    pub closure_gaps: Vec<String>,
}

impl Multicat {
    /// Builds the tables without checking the axioms. Structural problems
    /// (unknown objects, ill-typed entries, arity 0) are still errors.
    /// Substitutions required by the unit laws are filled in when absent.
    pub fn from_spec_unchecked(spec: &MulticatSpec) -> Result<Multicat> {
        let objects = spec.objects.clone();
        let obj = |name: &str| -> Result<usize> {
            objects
                .iter()
                .position(|o| o == name)
                .ok_or_else(|| MtkError::InvalidMulticat(format!("unknown object {name}")))
        };
        let mut sorted = objects.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != objects.len() {
            return Err(MtkError::InvalidMulticat("duplicate object".into()));
        }
        let mut raw: BTreeMap<(Vec<usize>, usize), Vec<String>> = BTreeMap::new();
        for h in &spec.multihoms {
            if h.src.is_empty() {
                return Err(MtkError::InvalidMulticat("nullary multimaps are not supported".into()));
            }
            let src = h.src.iter().map(|s| obj(s)).collect::<Result<Vec<_>>>()?;
            let tgt = obj(&h.tgt)?;
            let entry = raw.entry((src, tgt)).or_default();
            for e in &h.elems {
                if entry.contains(e) {
                    return Err(MtkError::InvalidMulticat(format!("duplicate element {e} in a hom")));
                }
                entry.push(e.clone());
            }
        }
        for (o, id) in &spec.identities {
            let x = obj(o)?;
            let entry = raw.entry((vec![x], x)).or_default();
            if !entry.contains(id) {
                entry.push(id.clone());
            }
        }
        for (i, o) in objects.iter().enumerate() {
            if !spec.identities.contains_key(o) {
                return Err(MtkError::InvalidMulticat(format!("object {o} (index {i}) has no identity")));
            }
        }
        let max_arity = raw.keys().map(|(s, _)| s.len()).max().unwrap_or(1);
        let arity_bound = spec.arity_bound.unwrap_or(max_arity.max(1));
        if arity_bound == 0 {
            return Err(MtkError::InvalidMulticat("arity bound must be at least 1".into()));
        }
        if max_arity > arity_bound {
            return Err(MtkError::ArityExceeded { got: max_arity, bound: arity_bound });
        }
        let mut ops: Vec<Op> = raw
            .iter()
            .flat_map(|((src, tgt), names)| {
                names.iter().map(move |n| Op { src: src.clone(), tgt: *tgt, name: n.clone() })
            })
            .collect();
        ops.sort_by(|a, b| (a.src.len(), &a.src, a.tgt, &a.name).cmp(&(b.src.len(), &b.src, b.tgt, &b.name)));
        let mut mc = Multicat {
            objects,
            arity_bound,
            ops: Vec::new(),
            homs: HashMap::new(),
            by_tgt: Vec::new(),
            identities: Vec::new(),
            subst: HashMap::new(),
            by_label: HashMap::new(),
        };
        mc.install_ops(ops);
        mc.identities = mc
            .objects
            .iter()
            .enumerate()
            .map(|(x, o)| mc.find_op(&[x], x, &spec.identities[o]).expect("identity inserted"))
            .collect();
        for s in &spec.subst {
            let outer = mc.resolve(&s.outer)?;
            let inners = s.inners.iter().map(|r| mc.resolve(r)).collect::<Result<Vec<_>>>()?;
            let result = mc.resolve(&s.result)?;
            mc.check_entry_type(outer, &inners, result)?;
            if let Some(prev) = mc.subst.insert((outer, inners.clone()), result) {
                if prev != result {
                    return Err(MtkError::InvalidMulticat(format!(
                        "conflicting substitution entries for {}",
                        mc.describe_config(outer, &inners)
                    )));
                }
            }
        }
        mc.fill_unit_entries();
        Ok(mc)
    }

    /// Builds and validates; invalid tables are rejected with the report.
    pub fn from_tables(spec: &MulticatSpec) -> Result<Multicat> {
        let mc = Multicat::from_spec_unchecked(spec)?;
        let report = mc.validate();
        if !report.valid {
            let mut lines = report.unit_violations.clone();
            lines.extend(report.assoc_violations.iter().cloned());
            lines.extend(report.closure_gaps.iter().cloned());
            return Err(MtkError::InvalidMulticat(lines.join("; ")));
        }
        Ok(mc)
    }

    /// Direct constructor used by the built-in fixtures; `subst` is a
    /// function computing every required composite.
    pub(crate) fn generate(
        objects: Vec<String>,
        arity_bound: usize,
        ops: Vec<Op>,
        identity_names: Vec<String>,
        mut subst: impl FnMut(&Multicat, usize, &[usize]) -> Option<usize>,
    ) -> Result<Multicat> {
        let mut mc = Multicat {
            objects,
            arity_bound,
            ops: Vec::new(),
            homs: HashMap::new(),
            by_tgt: Vec::new(),
            identities: Vec::new(),
            subst: HashMap::new(),
            by_label: HashMap::new(),
        };
        let mut ops = ops;
        ops.sort_by(|a, b| (a.src.len(), &a.src, a.tgt, &a.name).cmp(&(b.src.len(), &b.src, b.tgt, &b.name)));
        if ops.iter().any(|o| o.src.is_empty() || o.src.len() > arity_bound) {
            return Err(MtkError::InvalidMulticat("multimap arity out of range".into()));
        }
        mc.install_ops(ops);
        mc.identities = (0..mc.objects.len())
            .map(|x| {
                mc.find_op(&[x], x, &identity_names[x])
                    .ok_or_else(|| MtkError::InvalidMulticat(format!("missing identity {}", identity_names[x])))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut entries = Vec::new();
        for outer in 0..mc.ops.len() {
            for inners in mc.configurations(outer, mc.arity_bound) {
                if let Some(r) = subst(&mc, outer, &inners) {
                    entries.push(((outer, inners), r));
                }
            }
        }
        for ((outer, inners), r) in entries {
            mc.check_entry_type(outer, &inners, r)?;
            mc.subst.insert((outer, inners), r);
        }
        mc.fill_unit_entries();
        Ok(mc)
    }

    fn install_ops(&mut self, ops: Vec<Op>) {
        self.homs.clear();
        self.by_tgt = vec![Vec::new(); self.objects.len()];
        self.by_label.clear();
        for (i, op) in ops.iter().enumerate() {
            self.homs.entry((op.src.clone(), op.tgt)).or_default().push(i);
            self.by_tgt[op.tgt].push(i);
        }
        self.ops = ops;
        for i in 0..self.ops.len() {
            let l = self.op_label(i);
            self.by_label.insert(l, i);
        }
    }

    fn fill_unit_entries(&mut self) {
        for i in 0..self.ops.len() {
            let op = self.ops[i].clone();
            let left = (self.identities[op.tgt], vec![i]);
            self.subst.entry(left).or_insert(i);
            let right = (i, op.src.iter().map(|&s| self.identities[s]).collect::<Vec<_>>());
            self.subst.entry(right).or_insert(i);
        }
    }

    fn resolve(&self, r: &RefSpec) -> Result<usize> {
        let src = r
            .src
            .iter()
            .map(|s| self.object_index(s))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| MtkError::InvalidMulticat(format!("unknown object in {:?}", r.src)))?;
        let tgt = self
            .object_index(&r.tgt)
            .ok_or_else(|| MtkError::InvalidMulticat(format!("unknown object {}", r.tgt)))?;
        self.find_op(&src, tgt, &r.elem)
            .ok_or_else(|| MtkError::InvalidMulticat(format!("unknown multimap {} : {:?} -> {}", r.elem, r.src, r.tgt)))
    }

    fn check_entry_type(&self, outer: usize, inners: &[usize], result: usize) -> Result<()> {
        let o = &self.ops[outer];
        if inners.len() != o.src.len() {
            return Err(MtkError::InvalidMulticat(format!(
                "substitution into {} needs {} inner multimaps",
                self.describe(outer),
                o.src.len()
            )));
        }
        for (k, &i) in inners.iter().enumerate() {
            if self.ops[i].tgt != o.src[k] {
                return Err(MtkError::InvalidMulticat(format!(
                    "inner multimap {} does not land in input {k} of {}",
                    self.describe(i),
                    self.describe(outer)
                )));
            }
        }
        let src: Vec<usize> = inners.iter().flat_map(|&i| self.ops[i].src.iter().copied()).collect();
        let r = &self.ops[result];
        if r.src != src || r.tgt != o.tgt {
            return Err(MtkError::InvalidMulticat(format!(
                "result {} has the wrong type for {}",
                self.describe(result),
                self.describe_config(outer, inners)
            )));
        }
        Ok(())
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &Op {
        &self.ops[i]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn is_identity(&self, i: usize) -> bool {
        self.identities.contains(&i)
    }

    /// Multimaps `src -> tgt` in order.
    pub fn hom(&self, src: &[usize], tgt: usize) -> &[usize] {
        self.homs.get(&(src.to_vec(), tgt)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Multimaps with target `tgt`.
    pub fn ops_into(&self, tgt: usize) -> &[usize] {
        &self.by_tgt[tgt]
    }

    pub fn find_op(&self, src: &[usize], tgt: usize, name: &str) -> Option<usize> {
        self.hom(src, tgt).iter().copied().find(|&i| self.ops[i].name == name)
    }

    /// Canonical label `[[sources], target, name]` of a multimap.
    pub fn op_label(&self, i: usize) -> Label {
        let op = &self.ops[i];
        Label::Tuple(vec![
            Label::Tuple(op.src.iter().map(|&s| Label::Name(self.objects[s].clone())).collect()),
            Label::Name(self.objects[op.tgt].clone()),
            Label::Name(op.name.clone()),
        ])
    }

    pub fn op_by_label(&self, l: &Label) -> Option<usize> {
        self.by_label.get(l).copied()
    }

    pub fn describe(&self, i: usize) -> String {
        let op = &self.ops[i];
        let src: Vec<&str> = op.src.iter().map(|&s| self.objects[s].as_str()).collect();
        format!("{}:({})->{}", op.name, src.join(","), self.objects[op.tgt])
    }

    pub fn describe_config(&self, outer: usize, inners: &[usize]) -> String {
        let inner: Vec<String> = inners.iter().map(|&i| self.describe(i)).collect();
        format!("{}; {}", self.describe(outer), inner.join(" | "))
    }

    /// The composite `σ(outer; inners)`, when tabulated.
    pub fn subst(&self, outer: usize, inners: &[usize]) -> Option<usize> {
        self.subst.get(&(outer, inners.to_vec())).copied()
    }

    pub fn subst_entries(&self) -> impl Iterator<Item = (&(usize, Vec<usize>), &usize)> {
        self.subst.iter()
    }

    /// Every tuple of multimaps that can be substituted into `outer` with
    /// total arity at most `max_total`.
    pub fn configurations(&self, outer: usize, max_total: usize) -> Vec<Vec<usize>> {
        let src = self.ops[outer].src.clone();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.configs_rec(&src, 0, max_total, &mut cur, &mut out);
        out
    }

    fn configs_rec(&self, src: &[usize], total: usize, max_total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = cur.len();
        if k == src.len() {
            out.push(cur.clone());
            return;
        }
        let remaining = src.len() - k - 1;
        for &i in &self.by_tgt[src[k]] {
            let t = total + self.ops[i].src.len();
            if t + remaining > max_total {
                continue;
            }
            cur.push(i);
            self.configs_rec(src, t, max_total, cur, out);
            cur.pop();
        }
    }

    /// Exhaustive check of the unit and associativity laws and of closure
    /// under substitution up to the arity bound.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport { arity_bound: self.arity_bound, ..Default::default() };
        let a = self.arity_bound;
        for i in 0..self.ops.len() {
            let op = &self.ops[i];
            rep.unit_instances += 2;
            if self.subst(self.identities[op.tgt], &[i]) != Some(i) {
                rep.unit_violations.push(format!("left unit fails at {}", self.describe(i)));
            }
            let ids: Vec<usize> = op.src.iter().map(|&s| self.identities[s]).collect();
            if self.subst(i, &ids) != Some(i) {
                rep.unit_violations.push(format!("right unit fails at {}", self.describe(i)));
            }
        }
        for outer in 0..self.ops.len() {
            for inners in self.configurations(outer, a) {
                if self.subst(outer, &inners).is_none() {
                    rep.closure_gaps.push(format!("missing substitution {}", self.describe_config(outer, &inners)));
                }
            }
        }
        for outer in 0..self.ops.len() {
            for inners in self.configurations(outer, a) {
                let inner_srcs: Vec<usize> = inners.iter().flat_map(|&i| self.ops[i].src.iter().copied()).collect();
                let budget = a;
                let mut stack = Vec::new();
                self.assoc_rec(outer, &inners, &inner_srcs, 0, budget, &mut stack, &mut rep);
            }
        }
        rep.unit_violations.sort();
        rep.assoc_violations.sort();
        rep.assoc_violations.dedup();
        rep.closure_gaps.sort();
        rep.valid = rep.unit_violations.is_empty() && rep.assoc_violations.is_empty() && rep.closure_gaps.is_empty();
        rep
    }

    /// Enumerates the second-level inner multimaps one position at a time and
    /// compares both bracketings once a full configuration is chosen.
    #[allow(clippy::too_many_arguments)]
    fn assoc_rec(
        &self,
        outer: usize,
        inners: &[usize],
        inner_srcs: &[usize],
        total: usize,
        budget: usize,
        stack: &mut Vec<usize>,
        rep: &mut ValidationReport,
    ) {
        let k = stack.len();
        if k == inner_srcs.len() {
            rep.assoc_instances += 1;
            let left = self.subst(outer, inners).and_then(|mid| self.subst(mid, stack));
            let mut firsts = Vec::new();
            let mut pos = 0;
            let mut ok = true;
            for &i in inners {
                let n = self.ops[i].src.len();
                match self.subst(i, &stack[pos..pos + n]) {
                    Some(r) => firsts.push(r),
                    None => ok = false,
                }
                pos += n;
            }
            let right = if ok { self.subst(outer, &firsts) } else { None };
            if let (Some(l), Some(r)) = (left, right) {
                if l != r {
                    let deep: Vec<String> = stack.iter().map(|&i| self.describe(i)).collect();
                    rep.assoc_violations.push(format!(
                        "associativity fails at {} ; {}: {} vs {}",
                        self.describe_config(outer, inners),
                        deep.join(" | "),
                        self.describe(l),
                        self.describe(r)
                    ));
                }
            }
            return;
        }
        let remaining = inner_srcs.len() - k - 1;
        for &i in &self.by_tgt[inner_srcs[k]] {
            let t = total + self.ops[i].src.len();
            if t + remaining > budget {
                continue;
            }
            stack.push(i);
            self.assoc_rec(outer, inners, inner_srcs, t, budget, stack, rep);
            stack.pop();
        }
    }

    /// The category of objects and unary multimaps.
    pub fn linear_part(&self) -> Result<FinCat> {
        let report = self.validate();
        if !report.valid {
            return Err(MtkError::InvalidMulticat("linear part of an invalid multicategory".into()));
        }
        let unary: Vec<usize> = (0..self.ops.len()).filter(|&i| self.ops[i].src.len() == 1).collect();
        let pos: HashMap<usize, usize> = unary.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mors = unary
            .iter()
            .map(|&i| CatMor { src: self.ops[i].src[0], tgt: self.ops[i].tgt, label: self.op_label(i) })
            .collect();
        let mut comp = HashMap::new();
        for &f in &unary {
            for &g in &unary {
                if self.ops[f].tgt == self.ops[g].src[0] {
                    let h = self.subst(g, &[f]).expect("closed under unary composition");
                    comp.insert((pos[&g], pos[&f]), pos[&h]);
                }
            }
        }
        let ids = self.identities.iter().map(|i| pos[i]).collect();
        FinCat::new(self.objects.clone(), mors, ids, comp)
    }

    /// Exports the tables in the JSON schema; every stored substitution is
    /// listed.
    pub fn to_spec(&self) -> MulticatSpec {
        let r = |i: usize| {
            let op = &self.ops[i];
            RefSpec {
                src: op.src.iter().map(|&s| self.objects[s].clone()).collect(),
                tgt: self.objects[op.tgt].clone(),
                elem: op.name.clone(),
            }
        };
        let mut homs: Vec<(&(Vec<usize>, usize), &Vec<usize>)> = self.homs.iter().collect();
        homs.sort_by(|a, b| (a.0 .0.len(), a.0).cmp(&(b.0 .0.len(), b.0)));
        let multihoms = homs
            .into_iter()
            .map(|((src, tgt), elems)| HomSpec {
                src: src.iter().map(|&s| self.objects[s].clone()).collect(),
                tgt: self.objects[*tgt].clone(),
                elems: elems.iter().map(|&i| self.ops[i].name.clone()).collect(),
            })
            .collect();
        let mut entries: Vec<(&(usize, Vec<usize>), &usize)> = self.subst.iter().collect();
        entries.sort();
        MulticatSpec {
            objects: self.objects.clone(),
            arity_bound: Some(self.arity_bound),
            multihoms,
            identities: self
                .objects
                .iter()
                .enumerate()
                .map(|(x, o)| (o.clone(), self.ops[self.identities[x]].name.clone()))
                .collect(),
            subst: entries
                .into_iter()
                .map(|((o, inn), res)| SubstSpec { outer: r(*o), inners: inn.iter().map(|&i| r(i)).collect(), result: r(*res) })
                .collect(),
        }
    }

    /// Replaces one substitution entry; used to inject faults in tests.
    pub fn with_subst_entry(&self, outer: usize, inners: &[usize], result: usize) -> Result<Multicat> {
        self.check_entry_type(outer, inners, result)?;
        let mut mc = self.clone();
        mc.subst.insert((outer, inners.to_vec()), result);
        Ok(mc)
    }
}

/// A functor between multicategories that is the identity on objects,
/// given by its action on multimaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticatFunctor {
    pub source: Multicat,
    pub target: Multicat,
    pub on_ops: Vec<usize>,
}

impl MulticatFunctor {
    /// Builds the functor from a rule on multimap names and checks that it
    /// preserves types, identities and substitution.
    pub fn new(source: Multicat, target: Multicat, rule: impl Fn(&str) -> String) -> Result<MulticatFunctor> {
        if source.objects != target.objects {
            return Err(MtkError::InvalidMulticat("functor must be the identity on objects".into()));
        }
        let on_ops = (0..source.ops.len())
            .map(|i| {
                let op = &source.ops[i];
                let name = rule(&op.name);
                target.find_op(&op.src, op.tgt, &name).ok_or_else(|| {
                    MtkError::InvalidMulticat(format!("no image {name} for {}", source.describe(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let f = MulticatFunctor { source, target, on_ops };
        let problems = f.check();
        if !problems.is_empty() {
            return Err(MtkError::InvalidMulticat(problems.join("; ")));
        }
        Ok(f)
    }

    pub fn identity(mc: &Multicat) -> MulticatFunctor {
        MulticatFunctor { source: mc.clone(), target: mc.clone(), on_ops: (0..mc.ops.len()).collect() }
    }

    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        for x in 0..self.source.objects.len() {
            if self.on_ops[self.source.identity(x)] != self.target.identity(x) {
                out.push(format!("identity of {} is not preserved", self.source.objects[x]));
            }
        }
        for ((outer, inners), &r) in &self.source.subst {
            let img: Vec<usize> = inners.iter().map(|&i| self.on_ops[i]).collect();
            if self.target.subst(self.on_ops[*outer], &img) != Some(self.on_ops[r]) {
                out.push(format!("substitution {} is not preserved", self.source.describe_config(*outer, inners)));
            }
        }
        out.sort();
        out
    }
}
