//! Answer normalization, arithmetic answers, exact match and batch
//! evaluation reports.

mod expr;
mod report;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Deserialize;

pub use expr::{eval_expression, eval_postfix, parse_expression, BinOp, Expr, Instr, MAX_DEPTH};
pub use report::{evaluate, evaluate_with, EvalOptions};

use crate::model::Language;
use crate::text::normalized_tokens;

/// Canonical class of an answer. Numbers are held in hundredths, rounded
/// half away from zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalAnswer {
    Yes,
    No,
    Unknown,
    Number { cents: i64 },
    Text(Vec<String>),
}

impl CanonicalAnswer {
    pub fn number_value(&self) -> Option<f64> {
        match self {
            CanonicalAnswer::Number { cents } => Some(*cents as f64 / 100.0),
            _ => None,
        }
    }
}

impl fmt::Display for CanonicalAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalAnswer::Yes => f.write_str("yes"),
            CanonicalAnswer::No => f.write_str("no"),
            CanonicalAnswer::Unknown => f.write_str("unknown"),
            CanonicalAnswer::Number { cents } => {
                let sign = if *cents < 0 { "-" } else { "" };
                let abs = cents.unsigned_abs();
                write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
            }
            CanonicalAnswer::Text(tokens) => f.write_str(&tokens.join(" ")),
        }
    }
}

/// Rounds to hundredths, half away from zero. `None` for values that are not
/// finite or do not fit.
pub fn round_cents(x: f64) -> Option<i64> {
    if !x.is_finite() {
        return None;
    }
    let scaled = x * 100.0;
    // absorb representation error at the .xx5 boundary (1.005 is stored as 1.00499..)
    let nudged = scaled + scaled.signum() * scaled.abs().max(1.0) * 1e-12;
    let r = nudged.round();
    (r.abs() < 9.0e15).then_some(r as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnswerOptions {
    /// Compare equations by their value. When off, only bare numbers become
    /// `Number` and equations are compared as text.
    pub equations_by_value: bool,
}

impl Default for AnswerOptions {
    fn default() -> Self {
        AnswerOptions {
            equations_by_value: true,
        }
    }
}

#[derive(Deserialize)]
struct FormTable {
    yes: Vec<String>,
    no: Vec<String>,
    unknown: Vec<String>,
}

const FORMS_JSON: &str = include_str!("../../data/answer_forms.json");

fn forms(lang: Language) -> &'static HashMap<String, CanonicalAnswer> {
    static TABLES: OnceLock<[HashMap<String, CanonicalAnswer>; 2]> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let raw: HashMap<String, FormTable> =
            serde_json::from_str(FORMS_JSON).expect("bundled answer_forms.json is valid");
        let build = |langs: &[&str]| {
            let mut map = HashMap::new();
            for l in langs {
                let t = &raw[*l];
                for (list, class) in [
                    (&t.yes, CanonicalAnswer::Yes),
                    (&t.no, CanonicalAnswer::No),
                    (&t.unknown, CanonicalAnswer::Unknown),
                ] {
                    for form in list {
                        map.insert(normalized_tokens(form).join(" "), class.clone());
                    }
                }
            }
            map
        };
        // Chinese answers mix in English special forms often enough to accept both.
        [build(&["en"]), build(&["en", "zh"])]
    });
    match lang {
        Language::En => &tables[0],
        Language::Zh => &tables[1],
    }
}

fn strip_sentence_end(text: &str) -> &str {
    text.trim()
        .trim_end_matches(['.', '。', '!', '！', '?', '？'])
        .trim_end()
}

/// Normalizes with default options.
pub fn normalize_answer(text: &str, lang: Language) -> CanonicalAnswer {
    normalize_answer_with(text, lang, AnswerOptions::default())
}

/// Special forms (yes / no / do not know) first, then arithmetic, then
/// lowercased punctuation-free tokens.
pub fn normalize_answer_with(text: &str, lang: Language, opts: AnswerOptions) -> CanonicalAnswer {
    let tokens = normalized_tokens(text);
    if let Some(class) = forms(lang).get(&tokens.join(" ")) {
        return class.clone();
    }
    if let Ok(e) = parse_expression(strip_sentence_end(text)) {
        let is_literal = matches!(e, Expr::Number(_) | Expr::Percent(_) | Expr::Pi);
        if opts.equations_by_value || is_literal {
            if let Some(cents) = e.eval().ok().and_then(round_cents) {
                return CanonicalAnswer::Number { cents };
            }
        }
    }
    match numeric_token(&tokens) {
        Some(cents) => CanonicalAnswer::Number { cents },
        None => CanonicalAnswer::Text(tokens),
    }
}

/// A lone numeric token such as the `19` in `$19`.
fn numeric_token(tokens: &[String]) -> Option<i64> {
    match tokens {
        [t] if t.bytes().all(|b| b.is_ascii_digit() || b == b'.') => {
            t.parse::<f64>().ok().and_then(round_cents)
        }
        _ => None,
    }
}

/// Exact match under answer normalization.
pub fn em(gold: &str, pred: &str, lang: Language) -> bool {
    em_with(gold, pred, lang, AnswerOptions::default())
}

pub fn em_with(gold: &str, pred: &str, lang: Language, opts: AnswerOptions) -> bool {
    normalize_answer_with(gold, lang, opts) == normalize_answer_with(pred, lang, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(tokens: &[&str]) -> CanonicalAnswer {
        CanonicalAnswer::Text(tokens.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn special_forms() {
        assert_eq!(
            normalize_answer("Do not know.", Language::En),
            CanonicalAnswer::Unknown
        );
        assert_eq!(
            normalize_answer("I don't know", Language::En),
            CanonicalAnswer::Unknown
        );
        assert_eq!(normalize_answer("Yes.", Language::En), CanonicalAnswer::Yes);
        assert_eq!(normalize_answer(" NO ", Language::En), CanonicalAnswer::No);
        assert_eq!(
            normalize_answer("不知道。", Language::Zh),
            CanonicalAnswer::Unknown
        );
        assert_eq!(normalize_answer("是的", Language::Zh), CanonicalAnswer::Yes);
        assert_eq!(normalize_answer("Yes", Language::Zh), CanonicalAnswer::Yes);
        assert_eq!(
            normalize_answer("不知道", Language::En),
            text(&["不", "知", "道"])
        );
    }

    #[test]
    fn numbers_and_text() {
        assert_eq!(
            normalize_answer("36 kilograms.", Language::En),
            text(&["36", "kilograms"])
        );
        assert_eq!(
            normalize_answer("19.", Language::En),
            CanonicalAnswer::Number { cents: 1900 }
        );
        assert_eq!(
            normalize_answer("10 + 10 × 90%.", Language::En),
            CanonicalAnswer::Number { cents: 1900 }
        );
        assert_eq!(
            normalize_answer("4666.666", Language::En),
            CanonicalAnswer::Number { cents: 466667 }
        );
        assert_eq!(normalize_answer("1 ÷ 0", Language::En), text(&["1", "0"]));
        assert_eq!(
            normalize_answer("Original price.", Language::En),
            text(&["original", "price"])
        );
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_cents(1.005), Some(101));
        assert_eq!(round_cents(2.675), Some(268));
        assert_eq!(round_cents(-1.005), Some(-101));
        assert_eq!(round_cents(4.7123), Some(471));
        assert_eq!(round_cents(0.004), Some(0));
        assert_eq!(round_cents(f64::NAN), None);
        assert_eq!(round_cents(1e300), None);
    }

    #[test]
    fn exact_match() {
        assert!(!em("1203.4", "1204.4", Language::En));
        assert!(em("19", "10 + 10 × 90%", Language::En));
        assert!(em("yes", "Yes.", Language::En));
        assert!(em("19", "19.0", Language::En));
        assert!(em("$19", "19", Language::En));
        assert!(!em("36 kilograms", "36", Language::En));
        assert!(em("4666.67", "4200 ÷ 90%", Language::En));
        assert!(em("4.71", "π × 1.5", Language::En));
    }

    #[test]
    fn equations_as_text_switch() {
        let by_text = AnswerOptions {
            equations_by_value: false,
        };
        assert!(!em_with("19", "10 + 10 × 90%", Language::En, by_text));
        assert!(em_with("19", "19.00", Language::En, by_text));
        assert!(em_with("10 + 10 × 90%", "10+10×90%", Language::En, by_text));
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(CanonicalAnswer::Number { cents: -5 }.to_string(), "-0.05");
        assert_eq!(
            CanonicalAnswer::Number { cents: 466667 }.to_string(),
            "4666.67"
        );
        assert_eq!(text(&["original", "price"]).to_string(), "original price");
    }

    proptest::proptest! {
        #[test]
        fn normalization_is_idempotent(s in "[a-z0-9 .+×%()-]{0,16}|yes|no|do not know|[0-9]{1,5}\\.[0-9]{1,3}") {
            let once = normalize_answer(&s, Language::En);
            let twice = normalize_answer(&once.to_string(), Language::En);
            proptest::prop_assert_eq!(once, twice);
        }

        #[test]
        fn em_is_reflexive_and_symmetric(a in "[a-z0-9 .+×%]{0,12}", b in "[a-z0-9 .+×%]{0,12}") {
            proptest::prop_assert!(em(&a, &a, Language::En));
            proptest::prop_assert_eq!(em(&a, &b, Language::En), em(&b, &a, Language::En));
        }
    }
}
