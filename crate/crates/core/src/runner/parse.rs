//! Line-oriented pulse sequence files.
//!
//! ```text
//! # factoring 4, first stage
//! n=4
//! larmor=100,200,400,800
//! J=10
//! J2=0.4
//! omega=0.1
//! pulse 2 2 1 pi/2 pi/2
//! pulse 3 1 1 pi/2 pi/2 0.2
//! ```
//!
//! `pulse <k> <mu> <nu> <theta> <phi> [omega]`; angles are either decimals
//! or rational multiples of pi (`pi`, `-pi/2`, `3pi/4`, `2*pi`). An
//! optional `label=<text>` header names the sequence.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::error::Error;
use crate::protocols::PulseSequence;
use crate::pulses::Pulse;
use crate::register::ChainConfig;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

/// Parses an angle such as `pi/2`, `-3pi/4`, `2*pi` or `0.25`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let s = text.trim();
    if let Some(pos) = s.find("pi") {
        let (head, tail) = (&s[..pos], &s[pos + 2..]);
        let (negative, coeff) = match head.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, head.strip_prefix('+').unwrap_or(head)),
        };
        let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
        let num: f64 = if coeff.is_empty() {
            1.0
        } else {
            coeff.parse::<u32>().ok()? as f64
        };
        let den: f64 = if tail.is_empty() {
            1.0
        } else {
            let d = tail.strip_prefix('/')?.parse::<u32>().ok()?;
            if d == 0 {
                return None;
            }
            d as f64
        };
        let value = pi_fraction(num, den);
        Some(if negative { -value } else { value })
    } else {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

#[inline]
fn pi_fraction(num: f64, den: f64) -> f64 {
    num * PI / den
}

/// Formats an angle so that [`parse_angle`] recovers the identical value,
/// using the `pi` notation whenever the value is a simple multiple of pi.
pub fn format_angle(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    let mag = value.abs();
    let sign = if value < 0.0 { "-" } else { "" };
    for den in 1..=16u32 {
        let num = (mag / PI * den as f64).round();
        if !(1.0..=64.0).contains(&num) {
            continue;
        }
        if pi_fraction(num, den as f64) == mag {
            let num = num as u32;
            let head = if num == 1 { String::new() } else { num.to_string() };
            let tail = if den == 1 { String::new() } else { format!("/{den}") };
            return format!("{sign}{head}pi{tail}");
        }
    }
    format!("{value}")
}

#[derive(Default)]
struct Header {
    n: Option<(usize, usize)>,
    larmor: Option<(Vec<f64>, usize)>,
    j1: Option<f64>,
    j2: Option<f64>,
    omega: Option<(f64, usize)>,
    label: Option<String>,
}

struct PulseLine<'a> {
    line: usize,
    toks: Vec<Token<'a>>,
}

fn parse_number(tok: &str, line: usize, column: usize, what: &str) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::new(line, column, format!("invalid {what} {tok:?}")))
}

/// Parses and validates a sequence file.
pub fn parse_sequence_file(text: &str) -> Result<(ChainConfig, PulseSequence), Error> {
    let mut header = Header::default();
    let mut pulse_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let toks = tokens(content);
        if toks[0].text == "pulse" {
            pulse_lines.push(PulseLine { line: line_no, toks });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(ParseError::new(
                line_no,
                toks[0].column,
                format!("expected `key=value` or `pulse ...`, found {:?}", toks[0].text),
            )
            .into());
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        let key_col = content.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let value_col = eq + 2 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        match key {
            "n" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(line_no, value_col, format!("invalid qubit count {value:?}")))?;
                header.n = Some((n, line_no));
            }
            "larmor" => {
                let mut freqs = Vec::new();
                let mut col = value_col;
                for part in value.split(',') {
                    let trimmed = part.trim();
                    let off = part.len() - part.trim_start().len();
                    freqs.push(parse_number(trimmed, line_no, col + off, "Larmor frequency")?);
                    col += part.len() + 1;
                }
                header.larmor = Some((freqs, line_no));
            }
            "J" => header.j1 = Some(parse_number(value, line_no, value_col, "coupling J")?),
            "J2" => header.j2 = Some(parse_number(value, line_no, value_col, "coupling J2")?),
            "omega" => header.omega = Some((parse_number(value, line_no, value_col, "Rabi frequency")?, line_no)),
            "label" => header.label = Some(value.to_string()),
            other => {
                return Err(ParseError::new(line_no, key_col, format!("unknown header key {other:?}")).into());
            }
        }
    }

    let last = text.lines().count().max(1);
    let (larmor, larmor_line) = header
        .larmor
        .ok_or_else(|| ParseError::new(last, 1, "missing `larmor=` header"))?;
    if let Some((n, n_line)) = header.n {
        if n != larmor.len() {
            return Err(ParseError::new(
                n_line,
                1,
                format!("n={n} but {} Larmor frequencies given", larmor.len()),
            )
            .into());
        }
    }
    let j1 = header.j1.ok_or_else(|| ParseError::new(last, 1, "missing `J=` header"))?;
    let j2 = header.j2.unwrap_or(0.0);
    let (omega, omega_line) = header
        .omega
        .ok_or_else(|| ParseError::new(last, 1, "missing `omega=` header"))?;

    let config = ChainConfig::new(larmor, j1, j2)
        .map_err(|e| ParseError::new(larmor_line, 1, e.to_string()))?;
    let mut sequence = PulseSequence::new(config.clone(), omega, header.label.unwrap_or_default())
        .map_err(|e| ParseError::new(omega_line, 1, e.to_string()))?;

    for pl in pulse_lines {
        let t = &pl.toks;
        if t.len() != 6 && t.len() != 7 {
            return Err(ParseError::new(
                pl.line,
                t[0].column,
                format!("pulse needs `k mu nu theta phi [omega]`, got {} fields", t.len() - 1),
            )
            .into());
        }
        let int = |tok: &Token, what: &str| -> Result<i64, ParseError> {
            tok.text
                .parse::<i64>()
                .map_err(|_| ParseError::new(pl.line, tok.column, format!("invalid {what} {:?}", tok.text)))
        };
        let k = int(&t[1], "qubit index")?;
        if k < 0 {
            return Err(ParseError::new(pl.line, t[1].column, "qubit index must be non-negative").into());
        }
        let mu = int(&t[2], "offset mu")?;
        let nu = int(&t[3], "offset nu")?;
        let angle = |tok: &Token, what: &str| {
            parse_angle(tok.text)
                .ok_or_else(|| ParseError::new(pl.line, tok.column, format!("invalid {what} {:?}", tok.text)))
        };
        let theta = angle(&t[4], "rotation angle")?;
        let phi = angle(&t[5], "phase")?;
        let rabi = match t.get(6) {
            Some(tok) => parse_number(tok.text, pl.line, tok.column, "Rabi frequency")?,
            None => omega,
        };
        let pulse = Pulse {
            k: k as usize,
            mu: mu as i32,
            nu: nu as i32,
            theta,
            phi,
            rabi,
        };
        sequence.push_pulse(pulse).map_err(|e| {
            let column = match e {
                Error::QubitOutOfRange { .. } => t[1].column,
                Error::InvalidOffsets { .. } => t[2].column,
                _ => t[4].column,
            };
            ParseError::new(pl.line, column, e.to_string())
        })?;
    }
    Ok((config, sequence))
}

/// Writes a sequence in the file format read by [`parse_sequence_file`].
pub fn serialize_sequence(sequence: &PulseSequence) -> String {
    let c = &sequence.config;
    let mut out = String::new();
    if !sequence.label.is_empty() {
        let _ = writeln!(out, "label={}", sequence.label);
    }
    let _ = writeln!(out, "n={}", c.n());
    let larmor: Vec<String> = c.larmor().iter().map(|w| format!("{w}")).collect();
    let _ = writeln!(out, "larmor={}", larmor.join(","));
    let _ = writeln!(out, "J={}", c.j1());
    let _ = writeln!(out, "J2={}", c.j2());
    let _ = writeln!(out, "omega={}", sequence.rabi);
    for p in &sequence.pulses {
        let _ = write!(
            out,
            "pulse {} {} {} {} {}",
            p.k,
            p.mu,
            p.nu,
            format_angle(p.theta),
            format_angle(p.phi)
        );
        if p.rabi != sequence.rabi {
            let _ = write!(out, " {}", p.rabi);
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_sequence(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const HEADER: &str = "n=4\nlarmor=100,200,400,800\nJ=10\nJ2=0.4\nomega=0.1\n";

    #[test]
    fn first_shor_pulse() {
        let text = format!("{HEADER}pulse 2 2 1 pi/2 pi/2\n");
        let (config, seq) = parse_sequence_file(&text).unwrap();
        assert_eq!(config, ChainConfig::default_chain());
        assert_eq!(seq.pulses, vec![Pulse::new(2, 2, 1, FRAC_PI_2, FRAC_PI_2, 0.1).unwrap()]);
    }

    #[test]
    fn empty_pulse_list() {
        let (_, seq) = parse_sequence_file(HEADER).unwrap();
        assert!(seq.is_empty());
    }

    #[test]
    fn border_qubit_rejects_mu_two() {
        let text = format!("{HEADER}# comment\npulse 0 2 1 pi 0\n");
        let err = parse_sequence_file(&text).unwrap_err();
        match err {
            Error::Parse(p) => {
                assert_eq!(p.line, 7);
                assert_eq!(p.column, 9);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn diagnostics_name_the_line() {
        let err = parse_sequence_file("n=4\nlarmor=100,200,x,800\n").unwrap_err();
        let Error::Parse(p) = err else { panic!() };
        assert_eq!((p.line, p.column), (2, 16));
        let err = parse_sequence_file(&format!("{HEADER}pulse 1 0 1 halfpi 0\n")).unwrap_err();
        let Error::Parse(p) = err else { panic!() };
        assert_eq!((p.line, p.column), (6, 13));
        let err = parse_sequence_file("n=2\nlarmor=100,140\nJ=20\nomega=0.1\n").unwrap_err();
        let Error::Parse(p) = err else { panic!() };
        assert_eq!(p.line, 2);
        assert!(p.message.contains("degenerate"));
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi"), Some(PI));
        assert_eq!(parse_angle("-pi/2"), Some(-FRAC_PI_2));
        assert_eq!(parse_angle("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_angle("0.25"), Some(0.25));
        assert_eq!(parse_angle("pi/0"), None);
        assert_eq!(parse_angle("xpi"), None);
        assert_eq!(format_angle(-FRAC_PI_2), "-pi/2");
        assert_eq!(format_angle(3.0 * PI / 4.0), "3pi/4");
        assert_eq!(format_angle(0.3), "0.3");
    }
}
