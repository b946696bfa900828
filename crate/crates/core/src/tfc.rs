//! Reader and writer for the RevLib `.tfc` reversible-circuit format.
//!
//! A file has a header of dotted metadata lines (`.v`, `.i`, `.o`, `.c`),
//! then a body of gates between `BEGIN` and `END`, one per line:
//!
//! ```text
//! .v a,b,c,d
//! BEGIN
//! t3 a,b,d
//! t2 a,b
//! END
//! ```
//!
//! Only connectivity matters downstream, so gate semantics are not modelled.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::circuit::Gate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TfcError {
    #[error("line {line}: no `.v` variable list before BEGIN")]
    MissingVariables { line: usize },
    #[error("line {line}: gate references unknown variable `{name}`")]
    UnknownOperand { line: usize, name: String },
    #[error("line {line}: gate prefix declares arity {declared} but lists {found} operands")]
    ArityMismatch { line: usize, declared: usize, found: usize },
    #[error("line {line}: operand `{name}` appears twice in one gate")]
    DuplicateOperand { line: usize, name: String },
    #[error("BEGIN on line {line} has no matching END")]
    UnterminatedBody { line: usize },
    #[error("line {line}: malformed gate prefix `{token}`")]
    MalformedGatePrefix { line: usize, token: String },
    #[error("line {line}: invalid variable name `{name}`")]
    InvalidVariable { line: usize, name: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

impl TfcError {
    /// 1-based source line the error refers to.
    pub fn line(&self) -> usize {
        match self {
            TfcError::MissingVariables { line }
            | TfcError::UnknownOperand { line, .. }
            | TfcError::ArityMismatch { line, .. }
            | TfcError::DuplicateOperand { line, .. }
            | TfcError::UnterminatedBody { line }
            | TfcError::MalformedGatePrefix { line, .. }
            | TfcError::InvalidVariable { line, .. }
            | TfcError::Malformed { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Toffoli,
    Fredkin,
}

impl GateKind {
    fn prefix(self) -> char {
        match self {
            GateKind::Toffoli => 't',
            GateKind::Fredkin => 'f',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGate {
    pub kind: GateKind,
    pub declared_arity: usize,
    pub operands: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TfcDocument {
    pub variables: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub constants: Vec<String>,
    /// Unrecognised dotted header lines, kept verbatim.
    pub extra_metadata: Vec<String>,
    pub gates: Vec<RawGate>,
}

fn split_list(rest: &str) -> Vec<String> {
    rest.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(',') && !name.chars().any(char::is_whitespace)
}

/// Parses `.tfc` text. LF and CRLF line endings are both accepted.
pub fn parse_tfc(text: &str) -> Result<TfcDocument, TfcError> {
    let mut doc = TfcDocument::default();
    let mut seen_vars = false;
    let mut known: HashSet<String> = HashSet::new();
    let mut begin_line: Option<usize> = None;
    let mut ended = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if ended {
            return Err(TfcError::Malformed {
                line: line_no,
                message: "content after END".into(),
            });
        }

        if begin_line.is_none() {
            if line.eq_ignore_ascii_case("BEGIN") {
                if !seen_vars {
                    return Err(TfcError::MissingVariables { line: line_no });
                }
                begin_line = Some(line_no);
                continue;
            }
            let Some(meta) = line.strip_prefix('.') else {
                return Err(TfcError::Malformed {
                    line: line_no,
                    message: format!("unexpected header line `{line}`"),
                });
            };
            let (key, rest) = match meta.find(char::is_whitespace) {
                Some(pos) => (&meta[..pos], meta[pos..].trim()),
                None => (meta, ""),
            };
            match key {
                "v" => {
                    if seen_vars {
                        return Err(TfcError::Malformed {
                            line: line_no,
                            message: "duplicate `.v` line".into(),
                        });
                    }
                    for name in split_list(rest) {
                        if !valid_name(&name) || !known.insert(name.clone()) {
                            return Err(TfcError::InvalidVariable { line: line_no, name });
                        }
                        doc.variables.push(name);
                    }
                    if doc.variables.is_empty() {
                        return Err(TfcError::MissingVariables { line: line_no });
                    }
                    seen_vars = true;
                }
                "i" | "o" => {
                    let names = split_list(rest);
                    for name in &names {
                        if !known.contains(name) {
                            return Err(TfcError::UnknownOperand {
                                line: line_no,
                                name: name.clone(),
                            });
                        }
                    }
                    if key == "i" {
                        doc.inputs = names;
                    } else {
                        doc.outputs = names;
                    }
                }
                "c" => doc.constants = split_list(rest),
                _ => doc.extra_metadata.push(line.to_string()),
            }
            continue;
        }

        if line.eq_ignore_ascii_case("END") {
            ended = true;
            continue;
        }
        doc.gates.push(parse_gate(line, line_no, &known)?);
    }

    match (begin_line, ended) {
        (None, _) if !seen_vars => Err(TfcError::MissingVariables {
            line: text.lines().count().max(1),
        }),
        (None, _) => Err(TfcError::Malformed {
            line: text.lines().count().max(1),
            message: "missing BEGIN".into(),
        }),
        (Some(line), false) => Err(TfcError::UnterminatedBody { line }),
        (Some(_), true) => Ok(doc),
    }
}

fn parse_gate(line: &str, line_no: usize, known: &HashSet<String>) -> Result<RawGate, TfcError> {
    let (token, rest) = match line.find(char::is_whitespace) {
        Some(pos) => (&line[..pos], line[pos..].trim()),
        None => (line, ""),
    };
    let malformed = || TfcError::MalformedGatePrefix {
        line: line_no,
        token: token.to_string(),
    };
    let mut chars = token.chars();
    let kind = match chars.next() {
        Some('t' | 'T') => GateKind::Toffoli,
        Some('f' | 'F') => GateKind::Fredkin,
        _ => return Err(malformed()),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let declared_arity: usize = digits.parse().map_err(|_| malformed())?;
    if declared_arity == 0 {
        return Err(malformed());
    }

    let operands = split_list(rest);
    if operands.len() != declared_arity {
        return Err(TfcError::ArityMismatch {
            line: line_no,
            declared: declared_arity,
            found: operands.len(),
        });
    }
    let mut seen = HashSet::new();
    for name in &operands {
        if !known.contains(name) {
            return Err(TfcError::UnknownOperand {
                line: line_no,
                name: name.clone(),
            });
        }
        if !seen.insert(name.as_str()) {
            return Err(TfcError::DuplicateOperand {
                line: line_no,
                name: name.clone(),
            });
        }
    }
    Ok(RawGate {
        kind,
        declared_arity,
        operands,
    })
}

impl TfcDocument {
    /// Interns qubit names to indices in `.v` order.
    pub fn to_gate_list(&self) -> (usize, Vec<Gate>) {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                Gate::new(g.operands.iter().map(|name| {
                    self.variables
                        .iter()
                        .position(|v| v == name)
                        .expect("operand validated at parse time")
                }))
            })
            .collect();
        (self.variables.len(), gates)
    }

    /// Index of a variable name, if declared.
    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

impl fmt::Display for TfcDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, ".v {}", self.variables.join(","))?;
        if !self.inputs.is_empty() {
            writeln!(f, ".i {}", self.inputs.join(","))?;
        }
        if !self.outputs.is_empty() {
            writeln!(f, ".o {}", self.outputs.join(","))?;
        }
        if !self.constants.is_empty() {
            writeln!(f, ".c {}", self.constants.join(","))?;
        }
        for extra in &self.extra_metadata {
            writeln!(f, "{extra}")?;
        }
        writeln!(f, "BEGIN")?;
        for g in &self.gates {
            writeln!(f, "{}{} {}", g.kind.prefix(), g.declared_arity, g.operands.join(","))?;
        }
        writeln!(f, "END")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) const ADDER: &str =
        "  .v a,b,c,d\n  .i a,b,c\n  .o d,c\n  .c 0\n  BEGIN\n  t3 a,b,d\n  t2 a,b\n  t3 b,c,d\n  t2 b,c\n  END\n";

    #[test]
    fn parses_three_bit_adder() {
        let doc = parse_tfc(ADDER).unwrap();
        assert_eq!(doc.variables, ["a", "b", "c", "d"]);
        assert_eq!(doc.inputs, ["a", "b", "c"]);
        assert_eq!(doc.outputs, ["d", "c"]);
        assert_eq!(doc.constants, ["0"]);
        let arities: Vec<_> = doc.gates.iter().map(|g| g.declared_arity).collect();
        assert_eq!(arities, [3, 2, 3, 2]);
        assert!(doc.gates.iter().all(|g| g.kind == GateKind::Toffoli));
    }

    #[test]
    fn adder_gate_list() {
        let (n, gates) = parse_tfc(ADDER).unwrap().to_gate_list();
        assert_eq!(n, 4);
        let sets: Vec<Vec<usize>> = gates.iter().map(|g| g.operands().to_vec()).collect();
        assert_eq!(sets, vec![vec![0, 1, 3], vec![0, 1], vec![1, 2, 3], vec![1, 2]]);
    }

    #[test]
    fn empty_body() {
        let doc = parse_tfc(".v a\nBEGIN\nEND").unwrap();
        assert_eq!(doc.variables.len(), 1);
        assert!(doc.gates.is_empty());
        let (n, gates) = doc.to_gate_list();
        assert_eq!((n, gates.len()), (1, 0));
    }

    #[test]
    fn interning_follows_v_order() {
        let doc = parse_tfc(".v d,c,b,a\nBEGIN\nt2 a,b\nEND\n").unwrap();
        let (_, gates) = doc.to_gate_list();
        assert_eq!(gates[0].operands(), &[2, 3]);
    }

    #[test]
    fn unknown_operand() {
        let err = parse_tfc(".v a,b\nBEGIN\nt2 a,c\nEND").unwrap_err();
        assert_eq!(
            err,
            TfcError::UnknownOperand {
                line: 3,
                name: "c".into()
            }
        );
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_tfc("BEGIN\nEND"),
            Err(TfcError::MissingVariables { line: 1 })
        ));
        assert!(matches!(
            parse_tfc(".v a,b\nBEGIN\nt3 a,b\nEND"),
            Err(TfcError::ArityMismatch {
                declared: 3,
                found: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_tfc(".v a,b\nBEGIN\nt2 a,a\nEND"),
            Err(TfcError::DuplicateOperand { .. })
        ));
        assert!(matches!(
            parse_tfc(".v a,b\nBEGIN\nt2 a,b\n"),
            Err(TfcError::UnterminatedBody { line: 2 })
        ));
        for bad in ["x2 a,b", "t a,b", "tt a,b", "t0", "p2 a,b"] {
            let text = format!(".v a,b\nBEGIN\n{bad}\nEND");
            assert!(
                matches!(parse_tfc(&text), Err(TfcError::MalformedGatePrefix { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn comments_whitespace_and_crlf() {
        let text = "# adder\r\n.v a, b ,c\r\n\r\n.model foo\r\nBEGIN\r\n# gate\r\nt2   a , b\r\nf3 a,b,c\r\nEND\r\n";
        let doc = parse_tfc(text).unwrap();
        assert_eq!(doc.variables, ["a", "b", "c"]);
        assert_eq!(doc.extra_metadata, [".model foo"]);
        assert_eq!(doc.gates[0].operands, ["a", "b"]);
        assert_eq!(doc.gates[1].kind, GateKind::Fredkin);
        assert_eq!(parse_tfc(&text.replace("\r\n", "\n")).unwrap(), doc);
    }

    #[test]
    fn display_round_trip_adder() {
        let doc = parse_tfc(ADDER).unwrap();
        assert_eq!(parse_tfc(&doc.to_string()).unwrap(), doc);
    }

    fn arb_doc() -> impl Strategy<Value = TfcDocument> {
        (1usize..8).prop_flat_map(|n| {
            let vars: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
            let gate =
                (any::<bool>(), Just(vars.clone()).prop_shuffle(), 1usize..=n).prop_map(|(tof, shuffled, k)| RawGate {
                    kind: if tof { GateKind::Toffoli } else { GateKind::Fredkin },
                    declared_arity: k,
                    operands: shuffled[..k].to_vec(),
                });
            (Just(vars), prop::collection::vec(gate, 0..12), any::<bool>()).prop_map(|(variables, gates, io)| {
                TfcDocument {
                    inputs: if io { variables[..1].to_vec() } else { vec![] },
                    outputs: vec![],
                    constants: if io { vec!["0".into()] } else { vec![] },
                    extra_metadata: vec![],
                    variables,
                    gates,
                }
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(doc in arb_doc()) {
            let text = doc.to_string();
            prop_assert_eq!(parse_tfc(&text).unwrap(), doc.clone());
            prop_assert_eq!(parse_tfc(&text.replace('\n', "\r\n")).unwrap(), doc);
        }
    }
}
