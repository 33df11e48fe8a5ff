use std::borrow::Cow;

use quick_xml::escape::resolve_html5_entity;

/// Replaces markup tags with a blank and decodes character/entity
/// references. Unknown entities become a blank.
pub fn strip_markup(text: &str) -> Cow<'_, str> {
    if !text.contains(['<', '&']) {
        return Cow::Borrowed(text);
    }
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find(['<', '&']) {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        if let Some(after) = tail.strip_prefix('<') {
            let opens_tag = after
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || matches!(c, '/' | '!' | '?'));
            match tail.find('>') {
                Some(end) if opens_tag => {
                    out.push(' ');
                    rest = &tail[end + 1..];
                }
                _ => {
                    out.push(' ');
                    rest = &tail[1..];
                }
            }
        } else {
            match decode_reference(tail) {
                Some((decoded, consumed)) => {
                    out.push_str(&decoded);
                    rest = &tail[consumed..];
                }
                None => {
                    out.push(' ');
                    rest = &tail[1..];
                }
            }
        }
    }
    out.push_str(rest);
    Cow::Owned(out)
}

// `tail` starts with '&'. Returns the replacement text and bytes consumed.
fn decode_reference(tail: &str) -> Option<(String, usize)> {
    let end = tail[1..]
        .char_indices()
        .take(32)
        .find(|&(_, c)| c == ';' || c.is_whitespace() || c == '&' || c == '<')
        .filter(|&(_, c)| c == ';')
        .map(|(i, _)| i + 1)?;
    let name = &tail[1..end];
    let consumed = end + 1;
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return Some((char::from_u32(code).unwrap_or(' ').to_string(), consumed));
    }
    match resolve_html5_entity(name) {
        Some(s) => Some((s.to_string(), consumed)),
        None if !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric()) => {
            Some((" ".to_string(), consumed))
        }
        None => None,
    }
}

/// Splits text into lowercased words.
///
/// Markup is removed first; a word is then any maximal run of Unicode
/// letters or digits. Case is folded by mapping to upper then lower case, so
/// that e.g. `ß` and `SS` agree.
pub fn tokenize(text: &str) -> Vec<String> {
    let plain = strip_markup(text);
    let folded = plain.to_uppercase().to_lowercase();
    folded
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn punctuation_and_case() {
        assert_eq!(tokenize("The cat, the hat!"), ["the", "cat", "the", "hat"]);
    }

    #[test]
    fn markup_is_a_separator() {
        assert_eq!(tokenize("<b>Hello</b>world"), ["hello", "world"]);
        assert_eq!(tokenize("a<br/>b <img src=\"x.png\">c"), ["a", "b", "c"]);
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize(" ,;! ").is_empty());
    }

    #[test]
    fn entities_are_decoded() {
        assert_eq!(tokenize("caf&eacute; &amp; bar"), ["café", "bar"]);
        assert_eq!(tokenize("x&#39;y &#x41;"), ["x", "y", "a"]);
        assert_eq!(tokenize("fish &chips"), ["fish", "chips"]);
    }

    #[test]
    fn unicode_words() {
        assert_eq!(tokenize("Straße, ΟΔΟΣ 2005"), ["strasse", "οδος", "2005"]);
    }

    #[test]
    fn stray_angle_bracket() {
        assert_eq!(tokenize("a < b > c"), ["a", "b", "c"]);
        assert_eq!(tokenize("x<3"), ["x", "3"]);
    }

    proptest! {
        #[test]
        fn case_insensitive(s in "[a-zA-Z0-9À-ÿΑ-ωА-я ,.!?<>/\"'-]{0,40}") {
            prop_assert_eq!(tokenize(&s.to_uppercase()), tokenize(&s));
        }

        #[test]
        fn tokens_are_nonempty_alphanumeric(s in "\\PC{0,60}") {
            for t in tokenize(&s) {
                prop_assert!(!t.is_empty());
                prop_assert!(t.chars().all(char::is_alphanumeric));
            }
        }
    }
}
