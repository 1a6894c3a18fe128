//! Reference implementations for differential testing, and random fixture generators.
//!
//! The oracles trade speed for obviousness. Closure recomputes everything each round by
//! trying every variable assignment over the concepts seen so far; offence matching tries
//! every assignment over the matched concepts. Class membership is derived afresh from the
//! concepts and the class map.

mod generate;

use std::collections::{BTreeMap, BTreeSet};

pub use generate::{closure_case, offence_case, ClosureCase, OffenceCase, DOCUMENT_ID};

use crate::inference::{Binding, MatchResult};
use crate::ontology::{
    Conclusion, Fact, FactPattern, KnowledgeBase, RelationProperty, RuleKind, Term,
};
use crate::text::normalize_term;

/// Concept key -> classes it belongs to: itself, its kind, and the kind's ancestors.
pub fn memberships(kb: &KnowledgeBase) -> BTreeMap<String, BTreeSet<String>> {
    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (parent, subs) in kb.classes() {
        for sub in subs {
            parents
                .entry(sub.as_str())
                .or_default()
                .push(parent.as_str());
        }
    }
    kb.concepts()
        .map(|(key, concept)| {
            let mut classes = BTreeSet::from([key.to_owned()]);
            if let Some(kind) = concept.kind() {
                let mut visited = BTreeSet::new();
                let mut stack = vec![normalize_term(kind)];
                while let Some(class) = stack.pop() {
                    if !visited.insert(class.clone()) {
                        continue;
                    }
                    stack.extend(
                        parents
                            .get(class.as_str())
                            .into_iter()
                            .flatten()
                            .map(|p| (*p).to_owned()),
                    );
                    classes.insert(class);
                }
            }
            (key.to_owned(), classes)
        })
        .collect()
}

/// Calls `f` once for every map from `vars` to `domain`.
fn for_each_assignment(vars: &[String], domain: &[String], mut f: impl FnMut(&Binding)) {
    if domain.is_empty() && !vars.is_empty() {
        return;
    }
    let mut digits = vec![0usize; vars.len()];
    loop {
        let binding: Binding = vars
            .iter()
            .zip(&digits)
            .map(|(v, &i)| (v.clone(), domain[i].clone()))
            .collect();
        f(&binding);
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                return;
            }
            digits[pos] += 1;
            if digits[pos] < domain.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn variables(patterns: &[FactPattern]) -> Vec<String> {
    let set: BTreeSet<String> = patterns
        .iter()
        .flat_map(|p| p.variables().map(str::to_owned))
        .collect();
    set.into_iter().collect()
}

/// The fact `pattern` denotes under `binding`, or `None` if a class constraint fails.
fn ground(
    pattern: &FactPattern,
    binding: &Binding,
    member: &BTreeMap<String, BTreeSet<String>>,
    check_classes: bool,
) -> Option<Fact> {
    let mut args = Vec::with_capacity(pattern.args.len());
    for term in &pattern.args {
        match term {
            Term::Concept(c) => args.push(c.clone()),
            Term::Var { name, class } => {
                let value = binding.get(name)?;
                if let (true, Some(class)) = (check_classes, class) {
                    if !member.get(value).is_some_and(|m| m.contains(class)) {
                        return None;
                    }
                }
                args.push(value.clone());
            }
        }
    }
    Some(Fact {
        relation: pattern.relation.clone(),
        args,
    })
}

fn holds(
    hypothesis: &[FactPattern],
    binding: &Binding,
    member: &BTreeMap<String, BTreeSet<String>>,
    facts: &BTreeSet<Fact>,
) -> bool {
    hypothesis
        .iter()
        .all(|p| ground(p, binding, member, true).is_some_and(|f| facts.contains(&f)))
}

/// Closure of `facts` by naive iteration. Conclusion class constraints are not checked.
pub fn naive_closure(kb: &KnowledgeBase, facts: &BTreeSet<Fact>) -> BTreeSet<Fact> {
    let member = memberships(kb);
    let rules: Vec<(&[FactPattern], &FactPattern, Vec<String>)> = kb
        .rules_of_kind(RuleKind::Infer)
        .filter_map(|rule| match &rule.conclusion {
            Conclusion::Infer(c) => {
                Some((rule.hypothesis.as_slice(), c, variables(&rule.hypothesis)))
            }
            Conclusion::Offence(_) => None,
        })
        .collect();

    let mut all = facts.clone();
    loop {
        let mut next = all.clone();
        for fact in &all {
            let Some(relation) = kb.relation_by_key(&fact.relation) else {
                continue;
            };
            if relation.arity() != 2 || fact.args.len() != 2 {
                continue;
            }
            if relation.is(RelationProperty::Symmetric) {
                next.insert(Fact::new(&fact.relation, &[&fact.args[1], &fact.args[0]]));
            }
            if relation.is(RelationProperty::Transitive) {
                for other in &all {
                    if other.relation == fact.relation && other.args[0] == fact.args[1] {
                        next.insert(Fact::new(&fact.relation, &[&fact.args[0], &other.args[1]]));
                    }
                }
            }
        }
        let domain: Vec<String> = all
            .iter()
            .flat_map(|f| f.args.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for (hypothesis, conclusion, vars) in &rules {
            for_each_assignment(vars, &domain, |binding| {
                if holds(hypothesis, binding, &member, &all) {
                    if let Some(fact) = ground(conclusion, binding, &member, false) {
                        next.insert(fact);
                    }
                }
            });
        }
        if next.len() == all.len() {
            return all;
        }
        all = next;
    }
}

/// Facts induced from a match: each matched relation over every tuple of matched concepts
/// whose members belong to the relation's parameter classes.
pub fn induced_facts(kb: &KnowledgeBase, matched: &MatchResult) -> BTreeSet<Fact> {
    let member = memberships(kb);
    let concepts: Vec<String> = matched.concepts.iter().cloned().collect();
    let mut out = BTreeSet::new();
    for key in &matched.relations {
        let Some(relation) = kb.relation_by_key(key) else {
            continue;
        };
        let slots: Vec<String> = (0..relation.arity()).map(|i| format!("slot{i}")).collect();
        for_each_assignment(&slots, &concepts, |binding| {
            let args: Vec<&String> = slots.iter().map(|s| &binding[s]).collect();
            let fits = args
                .iter()
                .zip(&relation.conc)
                .all(|(a, class)| member.get(*a).is_some_and(|m| m.contains(class)));
            if fits {
                out.insert(Fact::new(key, &args));
            }
        });
    }
    out
}

/// Offence rule id -> every binding over matched concepts under which its hypothesis
/// holds in the closure of the induced facts. Rules with no binding are omitted.
pub fn brute_force_offences(
    kb: &KnowledgeBase,
    matched: &MatchResult,
) -> BTreeMap<String, BTreeSet<Binding>> {
    let member = memberships(kb);
    let closure = naive_closure(kb, &induced_facts(kb, matched));
    let concepts: Vec<String> = matched.concepts.iter().cloned().collect();
    let mut out = BTreeMap::new();
    for rule in kb.rules_of_kind(RuleKind::Offence) {
        let mut bindings = BTreeSet::new();
        for_each_assignment(&variables(&rule.hypothesis), &concepts, |binding| {
            if holds(&rule.hypothesis, binding, &member, &closure) {
                bindings.insert(binding.clone());
            }
        });
        if !bindings.is_empty() {
            out.insert(rule.id.clone(), bindings);
        }
    }
    out
}
