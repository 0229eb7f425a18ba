//! Example files shipped with the engine.

pub const PAPER_S25: &str = include_str!("../scenarios/paper_s25.lud");
pub const BOMBE: &str = include_str!("../scenarios/bombe.lud");
pub const AME: &str = include_str!("../scenarios/ame.lud");
pub const MANY_QUESTIONS: &str = include_str!("../scenarios/many_questions.lud");
pub const QUESTION_ANSWER: &str = include_str!("../scenarios/question_answer.lud");
pub const DELOCALIZATION: &str = include_str!("../scenarios/delocalization.lud");

/// `(file name, contents)` for every shipped example.
pub const ALL: [(&str, &str); 6] = [
    ("paper_s25.lud", PAPER_S25),
    ("bombe.lud", BOMBE),
    ("ame.lud", AME),
    ("many_questions.lud", MANY_QUESTIONS),
    ("question_answer.lud", QUESTION_ANSWER),
    ("delocalization.lud", DELOCALIZATION),
];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
