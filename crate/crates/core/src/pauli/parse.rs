//! Text format for Pauli sums.
//!
//! ```text
//! sum   := term (('+' | '-') term)*
//! term  := coeff word
//! coeff := real | '(' real ',' real ')'
//! word  := [IXYZ]{n}            qubit 0 is the leftmost letter
//! ```
//!
//! Whitespace between tokens is ignored. Generator files hold one operator per
//! line; `#` starts a comment that runs to the end of the line.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::string::{PauliString, MAX_QUBITS};
use super::sum::PauliSum;
use crate::error::{Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    line_start: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Self {
            bytes: text.as_bytes(),
            pos: 0,
            line,
            line_start: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.pos - self.line_start + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            match b {
                b'\n' => {
                    self.pos += 1;
                    self.line += 1;
                    self.line_start = self.pos;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, want: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == want => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error(format!(
                "expected '{}', found '{}'",
                want as char, b as char
            ))),
            None => Err(self.error(format!("expected '{}', found end of input", want as char))),
        }
    }

    fn real(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let at = |i: usize| self.bytes.get(i).copied();
        let mut i = start;
        if matches!(at(i), Some(b'+') | Some(b'-')) {
            i += 1;
        }
        let digits_from = i;
        while matches!(at(i), Some(b'0'..=b'9')) {
            i += 1;
        }
        let mut mantissa_digits = i - digits_from;
        if at(i) == Some(b'.') {
            i += 1;
            let frac = i;
            while matches!(at(i), Some(b'0'..=b'9')) {
                i += 1;
            }
            mantissa_digits += i - frac;
        }
        if mantissa_digits == 0 {
            return Err(self.error("expected a real number"));
        }
        if matches!(at(i), Some(b'e') | Some(b'E')) {
            let mut j = i + 1;
            if matches!(at(j), Some(b'+') | Some(b'-')) {
                j += 1;
            }
            let exp_from = j;
            while matches!(at(j), Some(b'0'..=b'9')) {
                j += 1;
            }
            if j == exp_from {
                self.pos = j;
                return Err(self.error("malformed exponent"));
            }
            i = j;
        }
        let lexeme = std::str::from_utf8(&self.bytes[start..i]).expect("ascii lexeme");
        let value: f64 = lexeme
            .parse()
            .map_err(|_| self.error(format!("malformed number {lexeme:?}")))?;
        if !value.is_finite() {
            return Err(self.error(format!("number {lexeme:?} overflows double precision")));
        }
        self.pos = i;
        Ok(value)
    }

    fn coeff(&mut self) -> Result<Complex64> {
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let re = self.real()?;
            self.expect(b',')?;
            let im = self.real()?;
            self.expect(b')')?;
            Ok(Complex64::new(re, im))
        } else {
            Ok(Complex64::new(self.real()?, 0.0))
        }
    }

    fn word(&mut self, n: Option<usize>) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b'I' | b'X' | b'Y' | b'Z')) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(self.pos) {
                Some(&b) => self.error(format!("expected a Pauli word, found '{}'", b as char)),
                None => self.error("expected a Pauli word, found end of input"),
            });
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .to_owned();
        if let Some(n) = n {
            if word.len() != n {
                let col = start - self.line_start + 1;
                return Err(Error::Parse {
                    line: self.line,
                    column: col,
                    message: format!(
                        "Pauli word {word:?} has length {}, expected {n}",
                        word.len()
                    ),
                });
            }
        }
        if word.len() > MAX_QUBITS {
            return Err(self.error(format!("Pauli word longer than {MAX_QUBITS} qubits")));
        }
        Ok((word, start))
    }
}

fn word_to_string(word: &str) -> PauliString {
    let factors: Vec<(usize, char)> = word.chars().enumerate().collect();
    PauliString::from_factors(word.len(), &factors).expect("validated word")
}

fn parse_sum(cur: &mut Cursor<'_>, mut n: Option<usize>) -> Result<PauliSum> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    loop {
        let c = cur.coeff()? * sign;
        let (word, _) = cur.word(n)?;
        n.get_or_insert(word.len());
        terms.push((word_to_string(&word), c));
        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.pos += 1;
                sign = 1.0;
            }
            Some(b'-') => {
                cur.pos += 1;
                sign = -1.0;
            }
            Some(b) => {
                return Err(cur.error(format!(
                    "expected '+', '-' or end of line, found '{}'",
                    b as char
                )))
            }
        }
    }
    PauliSum::from_terms(n.expect("at least one term"), terms)
}

/// Parse a single operator on `n` qubits.
pub fn parse_pauli_sum(text: &str, n: usize) -> Result<PauliSum> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    let mut cur = Cursor::new(text, 1);
    parse_sum(&mut cur, Some(n))
}

/// Parse a generator file: one operator per non-empty line, `#` comments.
///
/// When `n` is `None` the width is taken from the first word in the file.
pub fn parse_generator_file(text: &str, n: Option<usize>) -> Result<Vec<PauliSum>> {
    let mut width = n;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(content, idx + 1);
        let sum = parse_sum(&mut cur, width)?;
        width.get_or_insert(sum.num_qubits());
        out.push(sum);
    }
    Ok(out)
}

fn push_real(out: &mut String, v: f64) {
    // Debug formatting of f64 is the shortest string that round-trips.
    write!(out, "{v:?}").unwrap();
}

/// Render a sum in the text format; `parse_pauli_sum` reads it back exactly.
pub fn format_pauli_sum(sum: &PauliSum) -> String {
    let mut out = String::new();
    if sum.is_empty() {
        out.push_str("0 ");
        out.extend(std::iter::repeat('I').take(sum.num_qubits()));
        return out;
    }
    for (k, (p, c)) in sum.terms().iter().enumerate() {
        if k > 0 {
            out.push_str(" + ");
        }
        if c.im == 0.0 {
            push_real(&mut out, c.re);
        } else {
            out.push('(');
            push_real(&mut out, c.re);
            out.push(',');
            push_real(&mut out, c.im);
            out.push(')');
        }
        write!(out, " {p}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_sum() {
        let s = parse_pauli_sum("1.0 XI + 0.5 ZZ", 2).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            s.coefficient(&word_to_string("XI")),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            s.coefficient(&word_to_string("ZZ")),
            Complex64::new(0.5, 0.0)
        );
    }

    #[test]
    fn complex_coefficient() {
        let s = parse_pauli_sum("(0,1) Y", 1).unwrap();
        assert_eq!(
            s.terms(),
            &[(word_to_string("Y"), Complex64::new(0.0, 1.0))]
        );
    }

    #[test]
    fn cancellation_gives_empty_sum() {
        assert!(parse_pauli_sum("1 XX + -1 XX", 2).unwrap().is_empty());
        assert!(parse_pauli_sum("1 XX - 1 XX", 2).unwrap().is_empty());
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse_pauli_sum("(0.5,-2)YZ+3e-1XX", 2).unwrap();
        let b = parse_pauli_sum("  ( 0.5 , -2 )  YZ +  3e-1   XX ", 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn minus_separator_negates() {
        let s = parse_pauli_sum("1 X - -2 Z - 3 Y", 1).unwrap();
        assert_eq!(
            s.coefficient(&word_to_string("Z")),
            Complex64::new(2.0, 0.0)
        );
        assert_eq!(
            s.coefficient(&word_to_string("Y")),
            Complex64::new(-3.0, 0.0)
        );
    }

    #[test]
    fn errors_carry_position() {
        match parse_pauli_sum("1 XI + 2 XQ", 2) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_pauli_sum("1 XII", 2),
            Err(Error::Parse { column: 3, .. })
        ));
        assert!(matches!(parse_pauli_sum("X", 1), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_pauli_sum("1e999 X", 1),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pauli_sum("(1,2 X", 1),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_pauli_sum("1 X +", 1),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn generator_file_with_comments() {
        let text = "# tfim\n1 ZZI + 1 IZZ  # bonds\n\n1 XII + 1 IXI + 1 IIX\n";
        let ops = parse_generator_file(text, None).unwrap();
        assert_eq!(ops.len(), 2);
        assert_eq!(ops[1].len(), 3);
        match parse_generator_file("1 XX\n1 XXX\n", None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn format_round_trips() {
        let s = parse_pauli_sum("0.1 XYZ + (1e-300,-2.5) ZZI + -7 III", 3).unwrap();
        let text = format_pauli_sum(&s);
        assert_eq!(parse_pauli_sum(&text, 3).unwrap(), s);
        let empty = PauliSum::zero(2).unwrap();
        assert_eq!(format_pauli_sum(&empty), "0 II");
        assert!(parse_pauli_sum(&format_pauli_sum(&empty), 2)
            .unwrap()
            .is_empty());
    }
}
