//! Tokenization shared by statistics, node similarity and answer
//! normalization.
//!
//! A token is a maximal run of non-CJK word characters (letters, digits,
//! underscore); whitespace and punctuation separate tokens. A decimal point
//! between two digits stays inside the number. Every CJK ideograph is a token
//! on its own.

pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2EBEF
        | 0x30000..=0x3134F)
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits `text` into tokens, preserving case.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if is_cjk(c) {
            if let Some(s) = start.take() {
                tokens.push(&text[s..i]);
            }
            tokens.push(&text[i..i + c.len_utf8()]);
        } else if is_word(c) {
            start.get_or_insert(i);
        } else if c == '.'
            && start.is_some()
            && text[..i].ends_with(|p: char| p.is_ascii_digit())
            && chars.peek().is_some_and(|&(_, n)| n.is_ascii_digit())
        {
            // decimal point inside a number
        } else if let Some(s) = start.take() {
            tokens.push(&text[s..i]);
        }
    }
    if let Some(s) = start {
        tokens.push(&text[s..]);
    }
    tokens
}

/// Lowercased tokens.
pub fn normalized_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(str::to_lowercase).collect()
}

pub fn token_count(text: &str) -> usize {
    tokenize(text).len()
}
