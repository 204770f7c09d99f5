//! Program equivalence schemas, loaded from a JSON manifest and checked
//! instance by instance.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::denote::{equal_open, Bounds, Verdict};
use crate::error::Error;
use crate::signature::{Signature, Sort};
use crate::syntax::{parse_core_term, parse_type, Term, Type};
use crate::typing::{check, Context};
use crate::worlds::World;

use super::obs::{contexts, obs_diff};
use super::report::{Failure, TestReport};

pub const BUILTIN_MANIFEST: &str = include_str!("../../equations/gs.json");

/// Runs of each side the observational cross-check may spend per instance.
pub const ADEQUACY_BUDGET: usize = 4_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Stated,
    Reconstructed,
    NegativeControl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Equal,
    NotEqual,
}

/// An equation with metavariables: `$l1, $l2, ...` name the layout's cells in
/// order and `$k1, $k2, ...` range over the signature's sorts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSchema {
    pub name: String,
    pub source: Source,
    pub layout: Vec<String>,
    pub ctx: Vec<(String, String)>,
    pub left: String,
    pub right: String,
    #[serde(rename = "type")]
    pub ty: String,
    pub expect: Expect,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub sorts: BTreeMap<String, Sort>,
    pub layout: World,
    pub ctx: Context,
    pub left: Term,
    pub right: Term,
    pub ty: Type,
}

impl Instance {
    pub fn describe(&self) -> String {
        let sorts: Vec<String> = self.sorts.iter().map(|(k, s)| format!("{k}={s}")).collect();
        format!("[{}] at {}: {}  vs  {}", sorts.join(", "), self.layout, self.left, self.right)
    }
}

pub fn load_schemas(json: &str) -> Result<Vec<EquationSchema>, Error> {
    serde_json::from_str(json).map_err(|e| Error::Manifest(e.to_string()))
}

pub fn builtin_schemas() -> Vec<EquationSchema> {
    load_schemas(BUILTIN_MANIFEST).expect("the bundled manifest parses")
}

/// Splits `$x12` style metavariables out of `text`, calling `f` on each.
fn rewrite(text: &str, mut f: impl FnMut(char, usize) -> String) -> String {
    let mut out = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '$' {
            out.push(c);
            continue;
        }
        let kind = chars.next().unwrap_or('$');
        let mut digits = String::new();
        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            digits.push(*d);
            chars.next();
        }
        match digits.parse::<usize>() {
            Ok(n) => out.push_str(&f(kind, n)),
            Err(_) => {
                out.push('$');
                out.push(kind);
            }
        }
    }
    out
}

impl EquationSchema {
    fn texts(&self) -> impl Iterator<Item = &String> {
        self.layout
            .iter()
            .chain(self.ctx.iter().map(|(_, t)| t))
            .chain([&self.left, &self.right, &self.ty])
    }

    /// Sort metavariables in order of first index.
    pub fn sort_vars(&self) -> Vec<String> {
        let mut found = std::collections::BTreeSet::new();
        for t in self.texts() {
            rewrite(t, |kind, n| {
                if kind == 'k' {
                    found.insert(n);
                }
                String::new()
            });
        }
        found.into_iter().map(|n| format!("$k{n}")).collect()
    }

    fn substitute(&self, text: &str, sorts: &BTreeMap<String, Sort>) -> String {
        rewrite(text, |kind, n| match kind {
            'l' => format!("#{}", n - 1),
            'k' => sorts.get(&format!("$k{n}")).map(|s| s.to_string()).unwrap_or_else(|| format!("$k{n}")),
            other => format!("${other}{n}"),
        })
    }

    /// Every instantiation of the sort metavariables over `sig`.
    pub fn instantiate(&self, sig: &Signature) -> Result<Vec<Instance>, Error> {
        let vars = self.sort_vars();
        let all: Vec<Sort> = sig.sorts().cloned().collect();
        let mut assignments: Vec<BTreeMap<String, Sort>> = vec![BTreeMap::new()];
        for v in &vars {
            assignments = assignments
                .into_iter()
                .flat_map(|a| {
                    all.iter().map(move |s| {
                        let mut a = a.clone();
                        a.insert(v.clone(), s.clone());
                        a
                    })
                })
                .collect();
        }
        assignments
            .into_iter()
            .map(|sorts| {
                let layout_sorts: Vec<Sort> =
                    self.layout.iter().map(|k| Sort::new(&self.substitute(k, &sorts))).collect();
                for k in &layout_sorts {
                    if !all.contains(k) {
                        return Err(Error::Manifest(format!("{}: unknown sort {k} in layout", self.name)));
                    }
                }
                let layout = World::contiguous(layout_sorts.iter());
                let mut ctx = Context::new();
                for (x, t) in &self.ctx {
                    ctx.insert(x.clone(), parse_type(sig, &self.substitute(t, &sorts))?);
                }
                let ty = parse_type(sig, &self.substitute(&self.ty, &sorts))?;
                let left = parse_core_term(sig, &layout, &ctx, &self.substitute(&self.left, &sorts))?;
                let right = parse_core_term(sig, &layout, &ctx, &self.substitute(&self.right, &sorts))?;
                Ok(Instance { sorts, layout, ctx, left, right, ty })
            })
            .collect()
    }
}

pub fn equation_bounds(world: usize) -> Bounds {
    Bounds { world, value: 64 }
}

enum Outcome {
    Equal,
    Refuted(String),
    Failed(String),
}

fn check_instance(sig: &Signature, inst: &Instance, bound: usize, cross_check: bool) -> Outcome {
    for side in [&inst.left, &inst.right] {
        if let Err(e) = check(sig, &inst.layout, &inst.ctx, side, &inst.ty) {
            return Outcome::Failed(format!("{side} does not have type {}: {e}", inst.ty));
        }
    }
    let verdict = match equal_open(sig, &inst.layout, &inst.ctx, &inst.left, &inst.right, &inst.ty, equation_bounds(bound)) {
        Ok(v) => v,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    match verdict {
        Verdict::NotEqual(w) => Outcome::Refuted(w.to_string()),
        Verdict::Approximate(why) => Outcome::Failed(format!("no definite answer: {why}")),
        Verdict::Equal => {
            if cross_check {
                if let Some(w) = obs_diff(sig, &inst.layout, &inst.ctx, &inst.left, &inst.right, &inst.ty, ADEQUACY_BUDGET) {
                    return Outcome::Failed(format!("denotations agree but a context tells them apart\n{w}"));
                }
                if let Some(why) = compositionality_spot_check(sig, inst, bound, 2) {
                    return Outcome::Failed(why);
                }
            }
            Outcome::Equal
        }
    }
}

/// Plugs both sides into the first `n` observation contexts and asks the
/// model again.
pub fn compositionality_spot_check(sig: &Signature, inst: &Instance, bound: usize, n: usize) -> Option<String> {
    for plug in contexts(sig, &inst.layout, &inst.ty, 2).into_iter().take(n) {
        let (l, r) = (plug.fill(&inst.left), plug.fill(&inst.right));
        match equal_open(sig, &inst.layout, &inst.ctx, &l, &r, &Type::bool(), equation_bounds(bound)) {
            Ok(Verdict::Equal) => {}
            Ok(v) => return Some(format!("plugged into {plug}: {v}")),
            Err(e) => return Some(format!("plugged into {plug}: {e}")),
        }
    }
    None
}

/// Checks every instantiation of `schema` over `sig` at extensions of at
/// most `bound` cells. A negative control passes when some instantiation is
/// refuted with a witness.
pub fn check_equation(schema: &EquationSchema, sig: &Signature, bound: usize, cross_check: bool) -> TestReport {
    let mut report = TestReport::new(format!("equation {}", schema.name)).bound("world", bound);
    let instances = match schema.instantiate(sig) {
        Ok(i) => i,
        Err(e) => {
            report.instances = 1;
            report.fail(schema.name.clone(), e.to_string());
            return report;
        }
    };
    let outcomes: Vec<Outcome> = instances.par_iter().map(|i| check_instance(sig, i, bound, cross_check)).collect();
    let mut refuted = None;
    let results = instances.iter().zip(outcomes).map(|(inst, o)| match (o, schema.expect) {
        (Outcome::Equal, _) => None,
        (Outcome::Failed(why), _) => Some(Failure { instance: inst.describe(), witness: why }),
        (Outcome::Refuted(w), Expect::Equal) => Some(Failure { instance: inst.describe(), witness: w }),
        (Outcome::Refuted(w), Expect::NotEqual) => {
            refuted.get_or_insert_with(|| format!("refuted at {}\n{w}", inst.describe()));
            None
        }
    });
    let results: Vec<Option<Failure>> = results.collect();
    report.absorb(results);
    if schema.expect == Expect::NotEqual {
        match refuted {
            Some(w) => report.note(w),
            None => report.fail(schema.name.clone(), "no instantiation was refuted"),
        }
    }
    report
}

/// All schemas over `sig`, merged into one report.
pub fn check_equations(schemas: &[EquationSchema], sig: &Signature, bound: usize, cross_check: bool) -> TestReport {
    let mut report = TestReport::new("gs").bound("world", bound);
    for s in schemas {
        let r = check_equation(s, sig, bound, cross_check);
        if r.passed() && s.expect == Expect::NotEqual {
            report.note(format!("{} (negative control) refuted as expected", s.name));
        }
        report.merge(r);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_has_fourteen_equations_and_a_control() {
        let s = builtin_schemas();
        assert_eq!(s.iter().filter(|s| s.expect == Expect::Equal).count(), 14);
        assert_eq!(s.iter().filter(|s| s.source == Source::Stated).count(), 1);
        assert_eq!(s.iter().filter(|s| s.source == Source::NegativeControl).count(), 1);
    }

    #[test]
    fn metavariables_are_substituted() {
        let commute = builtin_schemas().into_iter().find(|s| s.name == "update-update-commute").unwrap();
        assert_eq!(commute.sort_vars(), vec!["$k1", "$k2"]);
        let inst = commute.instantiate(&Signature::linked_list()).unwrap();
        assert_eq!(inst.len(), 9);
        assert_eq!(inst[0].layout.len(), 2);
    }

    #[test]
    fn lookup_update_holds_on_the_constant_signature() {
        let s = builtin_schemas().into_iter().find(|s| s.name == "lookup-update").unwrap();
        let r = check_equation(&s, &Signature::constant_bool(), 3, true);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn negative_control_is_refuted() {
        let s = builtin_schemas().into_iter().find(|s| s.expect == Expect::NotEqual).unwrap();
        let r = check_equation(&s, &Signature::constant_bool(), 3, false);
        assert!(r.passed(), "{r}");
        assert!(r.notes[0].contains("refuted"));
    }
}
