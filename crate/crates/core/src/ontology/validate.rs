use std::collections::{BTreeMap, BTreeSet};

use super::model::{AttrValue, Conclusion, FactPattern, Penalty, Term};
use super::KnowledgeBase;
use crate::corpus::{Corpus, LegalRef};
use crate::text::normalize_term;
use crate::violation::Violation;

/// Every broken invariant of `kb` with respect to `corpus`. Empty iff the KB is valid.
pub fn validate_kb(kb: &KnowledgeBase, corpus: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    let known_classes = kb.known_classes();

    for (key, concept) in kb.concepts() {
        let subject = format!("concept:{key}");
        if key.is_empty() {
            out.push(Violation::new(&subject, "name", "concept name is empty"));
        }
        check_keywords(&subject, &concept.keywords, &mut out);
        if !concept.keywords.is_empty() && !concept.keywords.contains(key) {
            out.push(Violation::new(
                &subject,
                "keywords-name",
                format!("keywords do not include the concept name {key:?}"),
            ));
        }
        if concept.language.trim().is_empty() {
            out.push(Violation::new(
                &subject,
                "language",
                "language tag is empty",
            ));
        }
        match concept.attrs.get("legal") {
            None | Some(AttrValue::Legal(_)) => {}
            Some(AttrValue::Text(_)) => out.push(Violation::new(
                &subject,
                "legal-attr",
                "attrs.legal must be a list of citations",
            )),
        }
        for reference in concept.legal_refs() {
            check_ref(&subject, reference, corpus, &mut out);
        }
    }

    for (key, relation) in kb.relations() {
        let subject = format!("relation:{key}");
        if relation.conc.is_empty() {
            out.push(Violation::new(
                &subject,
                "arity",
                "relation has no parameters",
            ));
        }
        for name in &relation.conc {
            if kb.concept_by_key(name).is_none() {
                out.push(Violation::new(
                    &subject,
                    "undeclared-concept",
                    format!("parameter {name:?} is not a declared concept"),
                ));
            }
        }
        if !relation.prop.is_empty() && relation.arity() != 2 {
            out.push(Violation::new(
                &subject,
                "property-arity",
                format!(
                    "properties require a binary relation, arity is {}",
                    relation.arity()
                ),
            ));
        }
        check_keywords(&subject, &relation.keywords, &mut out);
    }

    for rule in kb.rules() {
        let subject = format!("rule:{}", rule.id);
        if rule.id.trim().is_empty() {
            out.push(Violation::new(&subject, "id", "rule id is empty"));
        }
        if rule.hypothesis.is_empty() {
            out.push(Violation::new(
                &subject,
                "hypothesis",
                "hypothesis is empty",
            ));
        }
        let mut seen = BTreeSet::new();
        for pattern in &rule.hypothesis {
            if !seen.insert(pattern) {
                out.push(Violation::new(
                    &subject,
                    "hypothesis",
                    format!("pattern {pattern} repeated"),
                ));
            }
            check_pattern(&subject, pattern, kb, &known_classes, &mut out);
        }
        match &rule.conclusion {
            Conclusion::Infer(pattern) => {
                check_pattern(&subject, pattern, kb, &known_classes, &mut out);
                let bound = rule.hypothesis_variables();
                for var in pattern.variables() {
                    if !bound.contains(var) {
                        out.push(Violation::new(
                            &subject,
                            "unbound-variable",
                            format!("conclusion variable ?{var} does not occur in the hypothesis"),
                        ));
                    }
                }
            }
            Conclusion::Offence(outcome) => {
                check_ref(&subject, &outcome.legal_ref, corpus, &mut out);
                check_penalty(&subject, &outcome.penalty, &mut out);
            }
        }
    }

    check_class_cycles(kb.classes(), &mut out);

    if kb.stored_index() != &kb.rebuilt_index() {
        out.push(Violation::new(
            "keyword-index",
            "index-mismatch",
            "keyword index is not the inverse of entity keywords",
        ));
    }
    out
}

fn check_keywords(subject: &str, keywords: &BTreeSet<String>, out: &mut Vec<Violation>) {
    if keywords.is_empty() {
        out.push(Violation::new(
            subject,
            "keywords-empty",
            "keyword set is empty",
        ));
    }
    for keyword in keywords {
        if keyword.is_empty() || normalize_term(keyword) != *keyword {
            out.push(Violation::new(
                subject,
                "keyword-normalization",
                format!("keyword {keyword:?} is not normalised"),
            ));
        }
    }
}

fn check_ref(subject: &str, reference: &LegalRef, corpus: &Corpus, out: &mut Vec<Violation>) {
    let problems = reference.check();
    if !problems.is_empty() {
        out.push(Violation::new(
            subject,
            "malformed-ref",
            format!("{reference}: {}", problems.join(", ")),
        ));
        return;
    }
    if let Err(err) = corpus.resolve(reference) {
        out.push(Violation::new(subject, "dangling-ref", err.to_string()));
    }
}

fn check_penalty(subject: &str, penalty: &Penalty, out: &mut Vec<Violation>) {
    for bound in [penalty.fine_min, penalty.fine_max].into_iter().flatten() {
        if bound < 0 {
            out.push(Violation::new(
                subject,
                "penalty",
                format!("negative fine {bound}"),
            ));
        }
    }
    if let (Some(min), Some(max)) = (penalty.fine_min, penalty.fine_max) {
        if min > max {
            out.push(Violation::new(
                subject,
                "penalty",
                format!("fine_min {min} exceeds fine_max {max}"),
            ));
        }
    }
}

fn check_pattern(
    subject: &str,
    pattern: &FactPattern,
    kb: &KnowledgeBase,
    known_classes: &BTreeSet<String>,
    out: &mut Vec<Violation>,
) {
    match kb.relation_by_key(&pattern.relation) {
        None => out.push(Violation::new(
            subject,
            "undeclared-relation",
            format!("{pattern}: relation {:?} is not declared", pattern.relation),
        )),
        Some(relation) if relation.arity() != pattern.args.len() => out.push(Violation::new(
            subject,
            "arity",
            format!(
                "{pattern}: {} arguments, relation declares {}",
                pattern.args.len(),
                relation.arity()
            ),
        )),
        Some(_) => {}
    }
    for arg in &pattern.args {
        match arg {
            Term::Concept(name) if kb.concept_by_key(name).is_none() => out.push(Violation::new(
                subject,
                "undeclared-concept",
                format!("{pattern}: {name:?} is not a declared concept"),
            )),
            Term::Var {
                class: Some(class), ..
            } if !known_classes.contains(class) => out.push(Violation::new(
                subject,
                "unknown-class",
                format!("{pattern}: class {class:?} is not declared"),
            )),
            Term::Var { name, .. } if name.is_empty() => out.push(Violation::new(
                subject,
                "variable",
                format!("{pattern}: empty variable name"),
            )),
            _ => {}
        }
    }
}

fn check_class_cycles(classes: &BTreeMap<String, BTreeSet<String>>, out: &mut Vec<Violation>) {
    // A class reaching itself through subclass edges.
    for start in classes.keys() {
        let mut stack: Vec<&String> = classes[start].iter().collect();
        let mut seen = BTreeSet::new();
        while let Some(class) = stack.pop() {
            if class == start {
                out.push(Violation::new(
                    format!("class:{start}"),
                    "class-cycle",
                    "class is its own subclass",
                ));
                break;
            }
            if seen.insert(class) {
                if let Some(subs) = classes.get(class) {
                    stack.extend(subs);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::corpus::Corpus;
    use crate::ontology::{KbError, KnowledgeBase, OntologyFile};

    fn violations(raw: &str) -> Vec<crate::Violation> {
        let file = OntologyFile::parse(raw.as_bytes()).unwrap();
        match KnowledgeBase::from_file(&Corpus::default(), file) {
            Ok(_) => vec![],
            Err(KbError::Validation(v)) => v,
            Err(other) => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_keywords_is_one_violation() {
        let v = violations(r#"{"concepts": [{"name": "A", "meaning": "m", "keywords": []}]}"#);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "keywords-empty");
    }

    #[test]
    fn name_must_be_a_keyword() {
        let v = violations(r#"{"concepts": [{"name": "A", "meaning": "m", "keywords": ["b"]}]}"#);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "keywords-name");
    }

    #[test]
    fn offence_rule_citing_unknown_article() {
        let v = violations(
            r#"{"concepts": [{"name": "a", "meaning": "m", "keywords": ["a"]}],
                "relations": [{"name": "r", "conc": ["a"], "meaning": "m", "keywords": ["r"]}],
                "rules": [{"id": "o1", "kind": "offence", "hypothesis": [{"relation": "r", "args": ["a"]}],
                           "conclusion": {"legal_ref": {"document_id": "X", "article": "999"},
                                          "penalty": {"fine_min": 1, "fine_max": 2, "subject": "s"},
                                          "summary": "s"}}]}"#,
        );
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "dangling-ref");
        assert_eq!(v[0].subject, "rule:o1");
    }

    #[test]
    fn rule_shape_violations() {
        let v = violations(
            r#"{"concepts": [{"name": "a", "meaning": "m", "keywords": ["a"]}],
                "relations": [
                    {"name": "r", "conc": ["a", "a"], "meaning": "m", "keywords": ["r"], "prop": ["transitive"]},
                    {"name": "u", "conc": ["a"], "meaning": "m", "keywords": ["u"], "prop": ["symmetric"]}],
                "rules": [
                    {"id": "i1", "kind": "infer", "hypothesis": [{"relation": "r", "args": ["?x", "?y"]}],
                     "conclusion": {"relation": "r", "args": ["?x", "?z"]}},
                    {"id": "i2", "kind": "infer", "hypothesis": [{"relation": "r", "args": ["?x"]}],
                     "conclusion": {"relation": "nope", "args": ["?x"]}},
                    {"id": "i3", "kind": "infer", "hypothesis": [{"relation": "r", "args": ["?x:martian", "a"]}],
                     "conclusion": {"relation": "r", "args": ["?x", "ghost"]}}]}"#,
        );
        let rules: Vec<_> = v.iter().map(|v| v.rule.as_str()).collect();
        assert!(rules.contains(&"property-arity"), "{rules:?}");
        assert!(rules.contains(&"unbound-variable"));
        assert!(rules.contains(&"arity"));
        assert!(rules.contains(&"undeclared-relation"));
        assert!(rules.contains(&"unknown-class"));
        assert!(rules.contains(&"undeclared-concept"));
    }

    #[test]
    fn penalty_bounds() {
        let v = violations(
            r#"{"concepts": [{"name": "a", "meaning": "m", "keywords": ["a"]}],
                "relations": [{"name": "r", "conc": ["a"], "meaning": "m", "keywords": ["r"]}],
                "rules": [{"id": "o1", "kind": "offence", "hypothesis": [{"relation": "r", "args": ["a"]}],
                           "conclusion": {"legal_ref": {"document_id": "X", "article": "1", "point": "a"},
                                          "penalty": {"fine_min": 5, "fine_max": 2, "subject": "s"},
                                          "summary": "s"}}]}"#,
        );
        let rules: Vec<_> = v.iter().map(|v| v.rule.as_str()).collect();
        assert!(rules.contains(&"penalty"));
        assert!(rules.contains(&"malformed-ref"));
    }

    #[test]
    fn class_cycle() {
        let v = violations(r#"{"classes": {"a": ["b"], "b": ["a"]}}"#);
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.rule == "class-cycle"));
    }
}
