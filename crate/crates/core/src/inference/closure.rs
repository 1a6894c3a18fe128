//! Forward chaining to a least fixpoint.
//!
//! Inference rules and the relation property axioms are compiled into one rule list and
//! evaluated semi-naively. In each round, every derivation must use at least one fact
//! that is new since the previous round.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use crate::ontology::{
    Conclusion, Fact, FactPattern, KnowledgeBase, RelationProperty, RuleKind, Term,
};

/// Variable name -> concept key.
pub type Binding = BTreeMap<String, String>;

struct CompiledRule<'a> {
    hypothesis: Cow<'a, [FactPattern]>,
    conclusion: Cow<'a, FactPattern>,
}

fn var(name: &str) -> Term {
    Term::Var {
        name: name.to_owned(),
        class: None,
    }
}

fn pattern(relation: &str, args: &[&str]) -> FactPattern {
    FactPattern {
        relation: relation.to_owned(),
        args: args.iter().map(|a| var(a)).collect(),
    }
}

fn compile(kb: &KnowledgeBase) -> Vec<CompiledRule<'_>> {
    let mut rules: Vec<CompiledRule<'_>> = kb
        .rules_of_kind(RuleKind::Infer)
        .filter_map(|rule| match &rule.conclusion {
            Conclusion::Infer(conclusion) => Some(CompiledRule {
                hypothesis: Cow::Borrowed(&rule.hypothesis),
                conclusion: Cow::Borrowed(conclusion),
            }),
            Conclusion::Offence(_) => None,
        })
        .collect();
    for (key, relation) in kb.relations() {
        if relation.arity() != 2 {
            continue;
        }
        if relation.is(RelationProperty::Symmetric) {
            rules.push(CompiledRule {
                hypothesis: Cow::Owned(vec![pattern(key, &["a", "b"])]),
                conclusion: Cow::Owned(pattern(key, &["b", "a"])),
            });
        }
        if relation.is(RelationProperty::Transitive) {
            rules.push(CompiledRule {
                hypothesis: Cow::Owned(vec![pattern(key, &["a", "b"]), pattern(key, &["b", "c"])]),
                conclusion: Cow::Owned(pattern(key, &["a", "c"])),
            });
        }
    }
    rules
}

type FactIndex<'f> = BTreeMap<&'f str, Vec<&'f Fact>>;

fn index<'f>(facts: impl IntoIterator<Item = &'f Fact>) -> FactIndex<'f> {
    let mut out: FactIndex<'f> = BTreeMap::new();
    for fact in facts {
        out.entry(fact.relation.as_str()).or_default().push(fact);
    }
    out
}

/// Extends `binding` so that `pattern` matches `fact`. Every occurrence of a variable must
/// satisfy its own class constraint.
pub(crate) fn unify(
    pattern: &FactPattern,
    fact: &Fact,
    binding: &Binding,
    kb: &KnowledgeBase,
) -> Option<Binding> {
    if pattern.relation != fact.relation || pattern.args.len() != fact.args.len() {
        return None;
    }
    let mut out = binding.clone();
    for (term, value) in pattern.args.iter().zip(&fact.args) {
        match term {
            Term::Concept(c) => {
                if c != value {
                    return None;
                }
            }
            Term::Var { name, class } => {
                if class.as_ref().is_some_and(|class| !kb.fits(value, class)) {
                    return None;
                }
                match out.get(name) {
                    Some(bound) if bound != value => return None,
                    Some(_) => {}
                    None => {
                        out.insert(name.clone(), value.clone());
                    }
                }
            }
        }
    }
    Some(out)
}

pub(crate) fn instantiate(pattern: &FactPattern, binding: &Binding) -> Option<Fact> {
    let args = pattern
        .args
        .iter()
        .map(|term| match term {
            Term::Concept(c) => Some(c.clone()),
            Term::Var { name, .. } => binding.get(name).cloned(),
        })
        .collect::<Option<Vec<_>>>()?;
    Some(Fact {
        relation: pattern.relation.clone(),
        args,
    })
}

/// A join of `patterns` against `all`; when `delta_at` is set, that pattern must match a
/// fact from `delta` instead.
struct Join<'p, 'i, 'f> {
    patterns: &'p [FactPattern],
    delta_at: Option<usize>,
    all: &'i FactIndex<'f>,
    delta: &'i FactIndex<'f>,
    kb: &'p KnowledgeBase,
}

impl Join<'_, '_, '_> {
    fn solve(&self, pos: usize, binding: Binding, out: &mut Vec<Binding>) {
        let Some(pattern) = self.patterns.get(pos) else {
            out.push(binding);
            return;
        };
        let source = if self.delta_at == Some(pos) {
            self.delta
        } else {
            self.all
        };
        for fact in source.get(pattern.relation.as_str()).into_iter().flatten() {
            if let Some(next) = unify(pattern, fact, &binding, self.kb) {
                self.solve(pos + 1, next, out);
            }
        }
    }

    fn bindings(&self) -> Vec<Binding> {
        let mut out = Vec::new();
        self.solve(0, Binding::new(), &mut out);
        out
    }
}

/// All bindings of `patterns` against `facts`.
pub fn match_patterns(
    patterns: &[FactPattern],
    facts: &BTreeSet<Fact>,
    kb: &KnowledgeBase,
) -> Vec<Binding> {
    let all = index(facts);
    Join {
        patterns,
        delta_at: None,
        all: &all,
        delta: &all,
        kb,
    }
    .bindings()
}

/// Least fixpoint of `facts` under the KB's inference rules plus symmetry and
/// transitivity of the relations that declare them.
pub fn infer_closure(kb: &KnowledgeBase, facts: &BTreeSet<Fact>) -> BTreeSet<Fact> {
    let rules = compile(kb);
    let mut all = facts.clone();
    let mut delta = facts.clone();
    while !delta.is_empty() {
        let mut fresh = BTreeSet::new();
        {
            let all_index = index(&all);
            let delta_index = index(&delta);
            for rule in &rules {
                for delta_at in 0..rule.hypothesis.len() {
                    let bindings = Join {
                        patterns: &rule.hypothesis,
                        delta_at: Some(delta_at),
                        all: &all_index,
                        delta: &delta_index,
                        kb,
                    }
                    .bindings();
                    for binding in &bindings {
                        if let Some(fact) = instantiate(&rule.conclusion, binding) {
                            if !all.contains(&fact) {
                                fresh.insert(fact);
                            }
                        }
                    }
                }
            }
        }
        all.extend(fresh.iter().cloned());
        delta = fresh;
    }
    all
}
