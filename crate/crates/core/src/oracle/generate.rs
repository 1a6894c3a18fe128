//! Seeded random knowledge bases. Every generated ontology passes validation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, CorpusDocument, DocType, LegalRef, Level, ProvisionNode};
use crate::inference::MatchResult;
use crate::ontology::{
    AttrValue, Concept, Conclusion, Fact, FactPattern, KnowledgeBase, OffenceOutcome, OntologyFile,
    Penalty, Relation, RelationProperty, Rule, Term,
};

pub const DOCUMENT_ID: &str = "1/2020/ND-CP";
const ARTICLES: usize = 4;
const CLAUSES: usize = 3;
/// Concepts that may serve as classes: kinds, relation parameters and variable constraints.
const CLASS_CONCEPTS: usize = 4;
const VARS: [&str; 3] = ["x", "y", "z"];

pub struct ClosureCase {
    pub kb: KnowledgeBase,
    pub facts: BTreeSet<Fact>,
}

pub struct OffenceCase {
    pub kb: KnowledgeBase,
    pub corpus: Corpus,
    pub matched: MatchResult,
}

fn node(level: Level, label: &str, text: &str, children: Vec<ProvisionNode>) -> ProvisionNode {
    ProvisionNode {
        level,
        label: label.to_owned(),
        heading: None,
        text: text.to_owned(),
        children,
    }
}

/// One decree with a single chapter of articles `1..=4`, each with clauses `1..=3`.
pub fn corpus() -> Corpus {
    let articles = (1..=ARTICLES)
        .map(|a| {
            let clauses = (1..=CLAUSES)
                .map(|c| {
                    node(
                        Level::Clause,
                        &c.to_string(),
                        &format!("Clause {c} of article {a}."),
                        Vec::new(),
                    )
                })
                .collect();
            node(Level::Article, &a.to_string(), "", clauses)
        })
        .collect();
    let document = CorpusDocument {
        document_id: DOCUMENT_ID.to_owned(),
        title: "Generated decree".to_owned(),
        doc_type: DocType::Decree,
        language: "en".to_owned(),
        root: node(
            Level::Document,
            DOCUMENT_ID,
            "",
            vec![node(Level::Chapter, "I", "", articles)],
        ),
    };
    Corpus::from_documents(vec![document]).expect("generated corpus is valid")
}

struct Shape {
    concepts: Vec<String>,
    /// Concepts that facts and rule constants draw from.
    active: Vec<String>,
    relations: Vec<(String, usize)>,
}

fn concept_name(i: usize) -> String {
    format!("c{i}")
}

fn skeleton(rng: &mut ChaCha8Rng, max_concepts: usize, max_active: usize) -> (OntologyFile, Shape) {
    let n = rng.random_range(CLASS_CONCEPTS..=max_concepts);
    let names: Vec<String> = (0..n).map(concept_name).collect();

    let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for i in 1..CLASS_CONCEPTS {
        if rng.random_bool(0.5) {
            let parent = rng.random_range(0..i);
            classes
                .entry(concept_name(parent))
                .or_default()
                .push(concept_name(i));
        }
    }

    let concepts = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut attrs = BTreeMap::new();
            if i > 0 && rng.random_bool(0.6) {
                let kind = rng.random_range(0..i.min(CLASS_CONCEPTS));
                attrs.insert("kind".to_owned(), AttrValue::Text(concept_name(kind)));
            }
            Concept {
                name: name.clone(),
                meaning: format!("Concept {i}."),
                attrs,
                keywords: BTreeSet::from([name.clone()]),
                language: "en".to_owned(),
            }
        })
        .collect();

    let class_names = &names[..CLASS_CONCEPTS];
    let relation_count = rng.random_range(1..=6);
    let mut relations = Vec::new();
    let mut shapes = Vec::new();
    for i in 0..relation_count {
        let arity = match rng.random_range(0..10) {
            0 => 3,
            1 | 2 => 1,
            _ => 2,
        };
        let mut prop = BTreeSet::new();
        if arity == 2 {
            if rng.random_bool(0.3) {
                prop.insert(RelationProperty::Symmetric);
            }
            if rng.random_bool(0.3) {
                prop.insert(RelationProperty::Transitive);
            }
        }
        let name = format!("r{i}");
        relations.push(Relation {
            name: name.clone(),
            conc: (0..arity)
                .map(|_| class_names.choose(rng).unwrap().clone())
                .collect(),
            meaning: format!("Relation {i}."),
            prop,
            keywords: BTreeSet::from([name.clone()]),
        });
        shapes.push((name, arity));
    }

    let active = names[..n.min(max_active)].to_vec();
    let file = OntologyFile {
        classes,
        concepts,
        relations,
        rules: Vec::new(),
    };
    (
        file,
        Shape {
            concepts: names,
            active,
            relations: shapes,
        },
    )
}

fn random_pattern(rng: &mut ChaCha8Rng, shape: &Shape, vars: &[&str]) -> FactPattern {
    let (relation, arity) = shape.relations.choose(rng).unwrap();
    let args = (0..*arity)
        .map(|_| {
            if rng.random_bool(0.2) {
                Term::concept(shape.active.choose(rng).unwrap())
            } else {
                let class = rng
                    .random_bool(0.25)
                    .then(|| shape.concepts[rng.random_range(0..CLASS_CONCEPTS)].clone());
                Term::var(vars.choose(rng).unwrap(), class.as_deref())
            }
        })
        .collect();
    FactPattern {
        relation: relation.clone(),
        args,
    }
}

fn random_hypothesis(rng: &mut ChaCha8Rng, shape: &Shape) -> Vec<FactPattern> {
    let len = rng.random_range(1..=3);
    let mut out: Vec<FactPattern> = Vec::new();
    for _ in 0..len {
        let pattern = random_pattern(rng, shape, &VARS);
        if !out.contains(&pattern) {
            out.push(pattern);
        }
    }
    out
}

fn infer_rule(rng: &mut ChaCha8Rng, shape: &Shape, id: String) -> Rule {
    let hypothesis = random_hypothesis(rng, shape);
    let bound: Vec<&str> = hypothesis.iter().flat_map(|p| p.variables()).collect();
    let (relation, arity) = shape.relations.choose(rng).unwrap();
    let args = (0..*arity)
        .map(|_| match bound.choose(rng) {
            Some(var) if rng.random_bool(0.85) => Term::var(var, None),
            _ => Term::concept(shape.active.choose(rng).unwrap()),
        })
        .collect();
    Rule {
        id,
        hypothesis,
        conclusion: Conclusion::Infer(FactPattern {
            relation: relation.clone(),
            args,
        }),
    }
}

fn offence_rule(rng: &mut ChaCha8Rng, shape: &Shape, id: String) -> Rule {
    let article = rng.random_range(1..=ARTICLES).to_string();
    let clause = rng.random_range(1..=CLAUSES).to_string();
    let fine_min = rng.random_range(1..=20) * 100_000;
    let summary = format!("Offence {id}");
    Rule {
        id,
        hypothesis: random_hypothesis(rng, shape),
        conclusion: Conclusion::Offence(OffenceOutcome {
            legal_ref: LegalRef::article(DOCUMENT_ID, &article).with_clause(&clause),
            penalty: Penalty {
                fine_min: Some(fine_min),
                fine_max: Some(fine_min + rng.random_range(0..=10) * 100_000),
                supplementary: Vec::new(),
                subject: "individual".to_owned(),
            },
            summary,
        }),
    }
}

fn random_fact(rng: &mut ChaCha8Rng, shape: &Shape) -> Fact {
    let (relation, arity) = shape.relations.choose(rng).unwrap();
    let args: Vec<&String> = (0..*arity)
        .map(|_| shape.active.choose(rng).unwrap())
        .collect();
    Fact::new(relation, &args)
}

/// Up to 50 concepts, 20 inference rules and 25 initial facts over at most 10 concepts.
pub fn closure_case(seed: u64) -> ClosureCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut file, shape) = skeleton(&mut rng, 50, 10);
    let rule_count = rng.random_range(0..=20);
    file.rules = (0..rule_count)
        .map(|i| infer_rule(&mut rng, &shape, format!("infer-{i}")))
        .collect();
    let fact_count = rng.random_range(0..=25);
    let facts = (0..fact_count)
        .map(|_| random_fact(&mut rng, &shape))
        .collect();
    let kb = KnowledgeBase::from_file(&corpus(), file).expect("generated ontology is valid");
    ClosureCase { kb, facts }
}

/// Up to 12 concepts and 20 rules, at most 5 of them inference rules, and a random match.
pub fn offence_case(seed: u64) -> OffenceCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut file, shape) = skeleton(&mut rng, 12, 8);
    let infer_count = rng.random_range(0..=5);
    let offence_count = rng.random_range(1..=15);
    let mut rules: Vec<Rule> = (0..infer_count)
        .map(|i| infer_rule(&mut rng, &shape, format!("infer-{i}")))
        .collect();
    rules
        .extend((0..offence_count).map(|i| offence_rule(&mut rng, &shape, format!("offence-{i}"))));
    file.rules = rules;
    let corpus = corpus();
    let kb = KnowledgeBase::from_file(&corpus, file).expect("generated ontology is valid");
    let matched = MatchResult {
        concepts: shape
            .active
            .iter()
            .filter(|_| rng.random_bool(0.7))
            .cloned()
            .collect(),
        relations: shape
            .relations
            .iter()
            .filter(|_| rng.random_bool(0.7))
            .map(|(name, _)| name.clone())
            .collect(),
        ..MatchResult::default()
    };
    OffenceCase {
        kb,
        corpus,
        matched,
    }
}
