//! Decoding of the LaTeX accent and letter escapes found in BibTeX values.
//!
//! Grouping braces are removed, accent commands are folded into composed
//! code points, and anything unrecognised is copied through verbatim with a
//! warning.

use unicode_normalization::UnicodeNormalization;

use crate::error::{Diagnostic, Error, Location, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub text: String,
    pub warnings: Vec<Diagnostic>,
}

/// Combining mark for a single-character accent command (`\"u`, `\'e`, ...).
fn symbol_accent(c: char) -> Option<char> {
    Some(match c {
        '"' => '\u{0308}',
        '\'' => '\u{0301}',
        '`' => '\u{0300}',
        '^' => '\u{0302}',
        '~' => '\u{0303}',
        '=' => '\u{0304}',
        '.' => '\u{0307}',
        _ => return None,
    })
}

/// Combining mark for a letter-named accent command (`\c{c}`, `\v{s}`, ...).
fn named_accent(name: &str) -> Option<char> {
    Some(match name {
        "c" => '\u{0327}',
        "v" => '\u{030C}',
        "u" => '\u{0306}',
        "H" => '\u{030B}',
        "k" => '\u{0328}',
        "r" => '\u{030A}',
        "d" => '\u{0323}',
        "b" => '\u{0331}',
        _ => return None,
    })
}

fn named_letter(name: &str) -> Option<&'static str> {
    Some(match name {
        "ss" => "ß",
        "o" => "ø",
        "O" => "Ø",
        "aa" => "å",
        "AA" => "Å",
        "ae" => "æ",
        "AE" => "Æ",
        "oe" => "œ",
        "OE" => "Œ",
        "l" => "ł",
        "L" => "Ł",
        "i" => "ı",
        "j" => "ȷ",
        _ => return None,
    })
}

/// Checks that braces balance, ignoring `\{` and `\}`.
fn check_braces(raw: &str, base: usize) -> Result<()> {
    let bytes = raw.as_bytes();
    let mut open = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => i += 1,
            b'{' => open.push(i),
            b'}' if open.pop().is_none() => {
                return Err(Error::parse(Location::Offset(base + i), "unbalanced `}`"));
            }
            _ => {}
        }
        i += 1;
    }
    match open.pop() {
        Some(at) => Err(Error::parse(Location::Offset(base + at), "unclosed `{`")),
        None => Ok(()),
    }
}

pub fn decode_latex_escapes(raw: &str) -> Result<Decoded> {
    decode_at(raw, 0)
}

/// Like [`decode_latex_escapes`], reporting offsets relative to `base`.
pub(crate) fn decode_at(raw: &str, base: usize) -> Result<Decoded> {
    check_braces(raw, base)?;
    let mut decoder = Decoder {
        raw,
        base,
        pos: 0,
        out: String::with_capacity(raw.len()),
        warnings: Vec::new(),
    };
    decoder.run();
    Ok(Decoded {
        text: decoder.out.nfc().collect(),
        warnings: decoder.warnings,
    })
}

struct Decoder<'a> {
    raw: &'a str,
    base: usize,
    pos: usize,
    out: String,
    warnings: Vec<Diagnostic>,
}

impl Decoder<'_> {
    fn peek(&self) -> Option<char> {
        self.raw[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn warn(&mut self, at: usize, message: String) {
        self.warnings
            .push(Diagnostic::new(Location::Offset(self.base + at), message));
    }

    fn run(&mut self) {
        while let Some(c) = self.bump() {
            match c {
                '{' | '}' => {}
                '\\' => self.escape(self.pos - 1),
                _ => self.out.push(c),
            }
        }
    }

    fn escape(&mut self, start: usize) {
        let Some(next) = self.peek() else {
            self.warn(start, "trailing backslash".to_string());
            self.out.push('\\');
            return;
        };

        if let Some(mark) = symbol_accent(next) {
            self.bump();
            self.accent(start, mark);
        } else if next.is_ascii_alphabetic() {
            let name_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                self.bump();
            }
            let name = &self.raw[name_start..self.pos];
            if let Some(letter) = named_letter(name) {
                self.out.push_str(letter);
                self.skip_spaces();
            } else if let Some(mark) = named_accent(name) {
                self.skip_spaces();
                self.accent(start, mark);
            } else {
                self.warn(start, format!("unknown command `\\{name}` kept verbatim"));
                self.out.push('\\');
                self.out.push_str(name);
            }
        } else if matches!(next, '&' | '%' | '$' | '#' | '_' | '{' | '}') {
            self.bump();
            self.out.push(next);
        } else {
            self.bump();
            self.warn(start, format!("unknown escape `\\{next}` kept verbatim"));
            self.out.push('\\');
            self.out.push(next);
        }
    }

    fn skip_spaces(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    /// Reads the accent argument (`u`, `{u}`, `\i`, `{\i}`) and emits the
    /// base letter followed by `mark`.
    fn accent(&mut self, start: usize, mark: char) {
        let arg_start = self.pos;
        let base = match self.peek() {
            Some('{') => {
                let close = self.matching_brace(self.pos);
                let inner = self.raw[self.pos + 1..close].trim();
                self.pos = close + 1;
                accent_base(inner)
            }
            Some('\\') => {
                let rest = &self.raw[self.pos..];
                let base = ["\\i", "\\j"]
                    .iter()
                    .find(|cmd| {
                        rest.starts_with(*cmd)
                            && !rest[2..].starts_with(|c: char| c.is_ascii_alphabetic())
                    })
                    .map(|cmd| cmd.chars().nth(1).unwrap());
                if base.is_some() {
                    self.pos += 2;
                }
                base
            }
            Some(c) if c.is_alphabetic() => {
                self.bump();
                Some(c)
            }
            _ => None,
        };

        match base {
            Some(letter) => {
                self.out.push(letter);
                self.out.push(mark);
            }
            None => {
                self.pos = arg_start;
                let command = &self.raw[start..arg_start];
                self.warn(
                    start,
                    format!("accent `{command}` without a letter kept verbatim"),
                );
                self.out.push_str(command);
            }
        }
    }

    fn matching_brace(&self, open: usize) -> usize {
        let bytes = self.raw.as_bytes();
        let mut depth = 0usize;
        let mut i = open;
        while i < bytes.len() {
            match bytes[i] {
                b'\\' => i += 1,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        return i;
                    }
                }
                _ => {}
            }
            i += 1;
        }
        unreachable!("braces were checked before decoding")
    }
}

fn accent_base(inner: &str) -> Option<char> {
    match inner {
        "\\i" => return Some('i'),
        "\\j" => return Some('j'),
        _ => {}
    }
    let mut chars = inner.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_alphabetic() => Some(c),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(raw: &str) -> String {
        decode_latex_escapes(raw).unwrap().text
    }

    #[test]
    fn umlaut_forms() {
        assert_eq!(text(r#"N{\"u}rnberg"#), "Nürnberg");
        assert_eq!(text(r#"N\"urnberg"#), "Nürnberg");
        assert_eq!(text(r#"N\"{u}rnberg"#), "Nürnberg");
        assert_eq!(text(r#"Universit{\"a}t"#), "Universität");
    }

    #[test]
    fn other_accents() {
        assert_eq!(text(r"{\'e}"), "é");
        assert_eq!(text(r"{\`a}"), "à");
        assert_eq!(text(r"{\^o}"), "ô");
        assert_eq!(text(r"\~n"), "ñ");
        assert_eq!(text(r"\c{c}"), "ç");
        assert_eq!(text(r"\v{s}"), "š");
        assert_eq!(text(r#"\"{\i}"#), "ï");
        assert_eq!(text(r"\'\i"), "í");
    }

    #[test]
    fn composed_to_single_code_point() {
        assert_eq!(text(r#"{\"u}"#).chars().count(), 1);
        assert_eq!(text(r"{\'E}").chars().count(), 1);
    }

    #[test]
    fn letter_commands() {
        assert_eq!(text(r"{\ss}"), "ß");
        assert_eq!(text(r"Stra\ss e"), "Straße");
        assert_eq!(text(r"{\o}rsted"), "ørsted");
        assert_eq!(text(r#"\AA{}ngstr\"om"#), "Ångström");
    }

    #[test]
    fn plain_text_is_unchanged() {
        let decoded = decode_latex_escapes("plain text").unwrap();
        assert_eq!(decoded.text, "plain text");
        assert!(decoded.warnings.is_empty());
    }

    #[test]
    fn grouping_braces_are_dropped() {
        assert_eq!(text("The {AUA} effect"), "The AUA effect");
        assert_eq!(text(r"R\&D \{x\}"), "R&D {x}");
    }

    #[test]
    fn unknown_commands_pass_through_with_warning() {
        let decoded = decode_latex_escapes(r"\textbf{bold}").unwrap();
        assert_eq!(decoded.text, r"\textbfbold");
        assert_eq!(decoded.warnings.len(), 1);
        assert_eq!(decoded.warnings[0].location, Location::Offset(0));

        let decoded = decode_latex_escapes(r"a \\ b").unwrap();
        assert_eq!(decoded.text, r"a \\ b");
        assert_eq!(decoded.warnings.len(), 1);
    }

    #[test]
    fn accent_without_letter_is_verbatim() {
        let decoded = decode_latex_escapes(r#"\"{12}"#).unwrap();
        assert_eq!(decoded.text, r#"\"12"#);
        assert_eq!(decoded.warnings.len(), 1);
    }

    #[test]
    fn unbalanced_braces_report_offsets() {
        let err = decode_latex_escapes("ab}c").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                location: Location::Offset(2),
                ..
            }
        ));
        let err = decode_latex_escapes("x{{y}").unwrap_err();
        assert!(matches!(
            err,
            Error::Parse {
                location: Location::Offset(1),
                ..
            }
        ));
        assert!(decode_latex_escapes(r"\{ balanced").is_ok());
    }

    #[test]
    fn alphabetic_count_matches_notation() {
        let cases = [
            (r#"{\"u}"#, 1),
            (r#"N{\"u}rnberg"#, 8),
            (r"{\ss}", 1),
            (r"Stra{\ss}e", 6),
            (
                r#"Friedrich-Alexander-Universit{\"a}t Erlangen-N{\"u}rnberg (FAU)"#,
                48,
            ),
            (r"\c{c}\v{s}\'{e}", 3),
        ];
        for (raw, letters) in cases {
            let decoded = text(raw);
            assert_eq!(
                decoded.chars().filter(|c| c.is_alphabetic()).count(),
                letters,
                "{raw}"
            );
        }
    }
}
