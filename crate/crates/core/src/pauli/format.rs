//! Hamiltonian text format.
//!
//! ```text
//! # comment
//! qubits 4
//! component total
//! 0.5 1:X 2:Z
//! -0.25
//! ```
//!
//! Header lines are `key value` pairs; `qubits` is required and must come
//! before any term. A term line is a coefficient followed by `index:letter`
//! entries; an empty letter list is the identity term. Extra header keys
//! (`ell`, `ancillas`, `clockT`, `component`, ...) are carried as metadata.

use super::{Hamiltonian, Letter, PauliError, PauliTerm, PauliWord, Result};
use std::collections::BTreeMap;

pub type Metadata = BTreeMap<String, String>;

fn parse_err(line: usize, msg: impl Into<String>) -> PauliError {
    PauliError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parse the text format. Returns the Hamiltonian and any extra header
/// metadata.
pub fn parse_hamiltonian(text: &str) -> Result<(Hamiltonian, Metadata)> {
    let mut qubits: Option<usize> = None;
    let mut metadata = Metadata::new();
    let mut terms: Vec<PauliTerm> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().unwrap();

        if head.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            // Header line.
            let value: Vec<&str> = fields.collect();
            if value.is_empty() {
                return Err(parse_err(lineno, format!("header '{head}' has no value")));
            }
            let value = value.join(" ");
            if head == "qubits" {
                let q: usize = value
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad qubit count '{value}'")))?;
                qubits = Some(q);
            } else {
                metadata.insert(head.to_string(), value);
            }
            continue;
        }

        // Term line.
        let q = qubits.ok_or_else(|| parse_err(lineno, "term before 'qubits' header"))?;
        let coeff: f64 = head
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad coefficient '{head}'")))?;
        let mut letters = Vec::new();
        for field in fields {
            let (idx_str, letter_str) = field
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("bad letter entry '{field}'")))?;
            let index: usize = idx_str
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad qubit index '{idx_str}'")))?;
            let letter = match letter_str {
                "X" => Letter::X,
                "Z" => Letter::Z,
                other => return Err(parse_err(lineno, format!("unknown letter '{other}'"))),
            };
            letters.push((index, letter));
        }
        let word =
            PauliWord::from_letters(q, letters).map_err(|e| parse_err(lineno, e.to_string()))?;
        terms.push(PauliTerm::new(coeff, word));
    }

    let q = qubits.ok_or_else(|| parse_err(0, "missing 'qubits' header"))?;
    Ok((Hamiltonian::new(q, terms)?, metadata))
}

/// Serialize to the text format. Metadata keys are emitted after `qubits`,
/// sorted; term order is preserved.
pub fn write_hamiltonian(h: &Hamiltonian, metadata: &Metadata) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {}\n", h.num_qubits()));
    for (key, value) in metadata {
        out.push_str(&format!("{key} {value}\n"));
    }
    for term in h.terms() {
        out.push_str(&format!("{}", term.coeff));
        for (idx, letter) in term.word.letters() {
            out.push_str(&format!(" {idx}:{letter}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_terms() {
        let text = "qubits 3\ncomponent total\n0.5 1:X 2:Z\n-0.25\n0.125 3:Z\n";
        let (h, meta) = parse_hamiltonian(text).unwrap();
        assert_eq!(h.num_terms(), 3);
        assert_eq!(meta.get("component").map(String::as_str), Some("total"));
        let written = write_hamiltonian(&h, &meta);
        assert_eq!(written, text);
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let text = "# header comment\nqubits 1\n\n1 1:Z # inline\n";
        let (h, _) = parse_hamiltonian(text).unwrap();
        assert_eq!(h.num_terms(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "qubits 2\n0.5 5:X\n";
        match parse_hamiltonian(text) {
            Err(PauliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_hamiltonian("0.5 1:X\n") {
            Err(PauliError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn identity_term_round_trips() {
        let (h, _) = parse_hamiltonian("qubits 2\n0.75\n").unwrap();
        assert!(h.terms()[0].word.is_identity());
        assert_eq!(write_hamiltonian(&h, &Metadata::new()), "qubits 2\n0.75\n");
    }
}
