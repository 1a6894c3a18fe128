//! Matching keywords to the knowledge base, rule inference, and ranked answers.

mod answer;
mod closure;
mod matching;
mod ranking;

pub use answer::answer_query;
pub use closure::{infer_closure, match_patterns, Binding};
pub use matching::{
    find_offences, induce_facts, match_concepts_and_rules, MatchResult, OffenceMatch,
};
pub use ranking::{compare_items, rank_results, Answer, AnswerItem};
