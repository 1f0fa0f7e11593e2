//! Text formats: the netlist and circuit grammars and the state-spec string.
//!
//! Both file formats share one line discipline: `#` starts a comment, blank
//! lines are skipped, the first non-comment line must be `electrons <n>`, and
//! every following line describes one element or gate. All angles are radians.

use std::fmt;

use spinnet_core::gates::{Circuit, GateKind, GateOp};
use spinnet_core::hardware::{DetectorTarget, HardwareElement, ModeMask, Netlist, RashbaAxis};
use spinnet_core::linalg::C64;
use spinnet_core::state::{Dof, PureState, QubitRef};

/// What went wrong on a given line.
#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    MissingHeader,
    DuplicateHeader,
    UnknownKeyword(String),
    MissingField(&'static str),
    UnexpectedField(String),
    MalformedNumber(String),
    MalformedElectron(String),
    MalformedQubit(String),
    ElectronOutOfRange { electron: usize, count: usize },
    DistinctElectronsRequired,
    BadFieldValue { field: &'static str, value: String },
    InvalidCount(String),
    BadStateSpec(String),
    Semantic(String),
}

/// A grammar error with the 1-based line it occurred on.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ParseErrorKind::MissingHeader => {
                write!(f, "expected `electrons <n>` before any elements")
            }
            ParseErrorKind::DuplicateHeader => write!(f, "duplicate `electrons` header"),
            ParseErrorKind::UnknownKeyword(k) => write!(f, "unknown keyword `{k}`"),
            ParseErrorKind::MissingField(name) => write!(f, "missing field `{name}`"),
            ParseErrorKind::UnexpectedField(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::MalformedNumber(v) => write!(f, "malformed number `{v}`"),
            ParseErrorKind::MalformedElectron(v) => {
                write!(f, "expected electron reference like `e0`, got `{v}`")
            }
            ParseErrorKind::MalformedQubit(v) => {
                write!(f, "expected qubit like `s0` or `k1`, got `{v}`")
            }
            ParseErrorKind::ElectronOutOfRange { electron, count } => {
                write!(f, "electron {electron} out of range for {count} electrons")
            }
            ParseErrorKind::DistinctElectronsRequired => {
                write!(f, "distinct electrons required")
            }
            ParseErrorKind::BadFieldValue { field, value } => {
                write!(f, "bad value `{value}` for field `{field}`")
            }
            ParseErrorKind::InvalidCount(v) => write!(f, "invalid electron count `{v}`"),
            ParseErrorKind::BadStateSpec(v) => {
                write!(f, "bad state spec token `{v}` (expected like `u0` or `d1`)")
            }
            ParseErrorKind::Semantic(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// Strips comments and yields `(line_number, tokens)` for non-empty lines.
fn tokenized_lines(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let code = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = code.split_whitespace().collect();
            if tokens.is_empty() {
                None
            } else {
                Some((i + 1, tokens))
            }
        })
        .collect()
}

fn parse_header(line: usize, tokens: &[&str]) -> Result<usize, ParseError> {
    if tokens[0] != "electrons" {
        return Err(err(line, ParseErrorKind::MissingHeader));
    }
    if tokens.len() != 2 {
        return Err(err(line, ParseErrorKind::MissingField("electron count")));
    }
    let n: usize = tokens[1]
        .parse()
        .map_err(|_| err(line, ParseErrorKind::InvalidCount(tokens[1].to_string())))?;
    if n == 0 {
        return Err(err(line, ParseErrorKind::InvalidCount(tokens[1].to_string())));
    }
    Ok(n)
}

fn parse_electron(line: usize, token: &str, count: usize) -> Result<usize, ParseError> {
    let idx = token
        .strip_prefix('e')
        .and_then(|rest| rest.parse::<usize>().ok())
        .ok_or_else(|| err(line, ParseErrorKind::MalformedElectron(token.to_string())))?;
    if idx >= count {
        return Err(err(
            line,
            ParseErrorKind::ElectronOutOfRange {
                electron: idx,
                count,
            },
        ));
    }
    Ok(idx)
}

fn parse_qubit(line: usize, token: &str, count: usize) -> Result<QubitRef, ParseError> {
    let (dof, rest) = match token.split_at(1) {
        ("s", rest) => (Dof::Spin, rest),
        ("k", rest) => (Dof::Mode, rest),
        _ => return Err(err(line, ParseErrorKind::MalformedQubit(token.to_string()))),
    };
    let electron: usize = rest
        .parse()
        .map_err(|_| err(line, ParseErrorKind::MalformedQubit(token.to_string())))?;
    if electron >= count {
        return Err(err(
            line,
            ParseErrorKind::ElectronOutOfRange { electron, count },
        ));
    }
    Ok(QubitRef { electron, dof })
}

/// `key=value` fields after the positional tokens.
struct Fields<'a> {
    line: usize,
    entries: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(line: usize, tokens: &[&'a str]) -> Result<Self, ParseError> {
        let mut entries = Vec::new();
        for t in tokens {
            match t.split_once('=') {
                Some((k, v)) => entries.push((k, v)),
                None => return Err(err(line, ParseErrorKind::UnexpectedField(t.to_string()))),
            }
        }
        Ok(Fields { line, entries })
    }

    fn take(&mut self, name: &'static str) -> Result<&'a str, ParseError> {
        match self.entries.iter().position(|(k, _)| *k == name) {
            Some(i) => Ok(self.entries.remove(i).1),
            None => Err(err(self.line, ParseErrorKind::MissingField(name))),
        }
    }

    fn angle(&mut self, name: &'static str) -> Result<f64, ParseError> {
        let raw = self.take(name)?;
        let value: f64 = raw
            .parse()
            .map_err(|_| err(self.line, ParseErrorKind::MalformedNumber(raw.to_string())))?;
        if !value.is_finite() {
            return Err(err(self.line, ParseErrorKind::MalformedNumber(raw.to_string())));
        }
        Ok(value)
    }

    fn finish(self) -> Result<(), ParseError> {
        if let Some((k, _)) = self.entries.first() {
            return Err(err(self.line, ParseErrorKind::UnexpectedField(k.to_string())));
        }
        Ok(())
    }
}

/// Parses the netlist grammar.
pub fn parse_netlist(text: &str) -> Result<Netlist, ParseError> {
    let lines = tokenized_lines(text);
    let Some((first_line, first_tokens)) = lines.first() else {
        return Err(err(1, ParseErrorKind::MissingHeader));
    };
    let count = parse_header(*first_line, first_tokens)?;

    let mut elements = Vec::new();
    for (line, tokens) in lines.iter().skip(1) {
        let line = *line;
        match tokens[0] {
            "electrons" => return Err(err(line, ParseErrorKind::DuplicateHeader)),
            "bs" => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("electron")));
                }
                let electron = parse_electron(line, tokens[1], count)?;
                let mut fields = Fields::parse(line, &tokens[2..])?;
                let theta = fields.angle("theta")?;
                fields.finish()?;
                elements.push(HardwareElement::BeamSplitter { electron, theta });
            }
            "abphase" => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("electron")));
                }
                let electron = parse_electron(line, tokens[1], count)?;
                let mut fields = Fields::parse(line, &tokens[2..])?;
                let phi = fields.angle("phi")?;
                fields.finish()?;
                elements.push(HardwareElement::AbPhase { electron, phi });
            }
            "rashba" => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("electron")));
                }
                let electron = parse_electron(line, tokens[1], count)?;
                let mut fields = Fields::parse(line, &tokens[2..])?;
                let axis = match fields.take("axis")? {
                    "x" => RashbaAxis::X,
                    "z" => RashbaAxis::Z,
                    other => {
                        return Err(err(
                            line,
                            ParseErrorKind::BadFieldValue {
                                field: "axis",
                                value: other.to_string(),
                            },
                        ))
                    }
                };
                let theta = fields.angle("theta")?;
                let mask = match fields.take("mode")? {
                    "both" => ModeMask::Both,
                    "1" => ModeMask::Mode1Only,
                    other => {
                        return Err(err(
                            line,
                            ParseErrorKind::BadFieldValue {
                                field: "mode",
                                value: other.to_string(),
                            },
                        ))
                    }
                };
                fields.finish()?;
                elements.push(HardwareElement::Rashba {
                    electron,
                    axis,
                    theta,
                    mask,
                });
            }
            "coulomb" => {
                if tokens.len() < 3 {
                    return Err(err(line, ParseErrorKind::MissingField("electrons")));
                }
                let e1 = parse_electron(line, tokens[1], count)?;
                let e2 = parse_electron(line, tokens[2], count)?;
                if e1 == e2 {
                    return Err(err(line, ParseErrorKind::DistinctElectronsRequired));
                }
                let mut fields = Fields::parse(line, &tokens[3..])?;
                let phi = fields.angle("phi")?;
                fields.finish()?;
                elements.push(HardwareElement::CoulombCoupler {
                    electrons: (e1, e2),
                    phi,
                });
            }
            "detector" => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("electron")));
                }
                let electron = parse_electron(line, tokens[1], count)?;
                let mut fields = Fields::parse(line, &tokens[2..])?;
                let target = match fields.take("target")? {
                    "mode" => DetectorTarget::Mode,
                    "full" => DetectorTarget::Full,
                    other => {
                        return Err(err(
                            line,
                            ParseErrorKind::BadFieldValue {
                                field: "target",
                                value: other.to_string(),
                            },
                        ))
                    }
                };
                fields.finish()?;
                elements.push(HardwareElement::Detector { electron, target });
            }
            other => return Err(err(line, ParseErrorKind::UnknownKeyword(other.to_string()))),
        }
    }

    Netlist::new(count, elements)
        .map_err(|e| err(*first_line, ParseErrorKind::Semantic(e.to_string())))
}

/// Canonical text of a netlist; floats print in shortest round-trip form.
pub fn print_netlist(netlist: &Netlist) -> String {
    let mut out = format!("electrons {}\n", netlist.n_electrons);
    for element in &netlist.elements {
        match element {
            HardwareElement::BeamSplitter { electron, theta } => {
                out.push_str(&format!("bs e{electron} theta={theta}\n"));
            }
            HardwareElement::AbPhase { electron, phi } => {
                out.push_str(&format!("abphase e{electron} phi={phi}\n"));
            }
            HardwareElement::Rashba {
                electron,
                axis,
                theta,
                mask,
            } => {
                let axis = match axis {
                    RashbaAxis::X => "x",
                    RashbaAxis::Z => "z",
                };
                let mask = match mask {
                    ModeMask::Both => "both",
                    ModeMask::Mode1Only => "1",
                };
                out.push_str(&format!(
                    "rashba e{electron} axis={axis} theta={theta} mode={mask}\n"
                ));
            }
            HardwareElement::CoulombCoupler { electrons, phi } => {
                out.push_str(&format!(
                    "coulomb e{} e{} phi={phi}\n",
                    electrons.0, electrons.1
                ));
            }
            HardwareElement::Detector { electron, target } => {
                let target = match target {
                    DetectorTarget::Mode => "mode",
                    DetectorTarget::Full => "full",
                };
                out.push_str(&format!("detector e{electron} target={target}\n"));
            }
        }
    }
    out
}

/// Parses the gate-circuit grammar (`h|p|rx|rz|not|cnot|cphase|swap` over
/// `s<i>`/`k<i>` qubits, control first for two-qubit gates).
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let lines = tokenized_lines(text);
    let Some((first_line, first_tokens)) = lines.first() else {
        return Err(err(1, ParseErrorKind::MissingHeader));
    };
    let count = parse_header(*first_line, first_tokens)?;

    let mut ops = Vec::new();
    for (line, tokens) in lines.iter().skip(1) {
        let line = *line;
        let build = |kind: GateKind,
                     angle: Option<f64>,
                     targets: Vec<QubitRef>|
         -> Result<GateOp, ParseError> {
            GateOp::new(kind, angle, targets)
                .map_err(|e| err(line, ParseErrorKind::Semantic(e.to_string())))
        };
        match tokens[0] {
            "electrons" => return Err(err(line, ParseErrorKind::DuplicateHeader)),
            kw @ ("h" | "not") => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("qubit")));
                }
                let q = parse_qubit(line, tokens[1], count)?;
                Fields::parse(line, &tokens[2..])?.finish()?;
                let kind = if kw == "h" { GateKind::H } else { GateKind::Not };
                ops.push(build(kind, None, vec![q])?);
            }
            kw @ ("p" | "rx" | "rz") => {
                if tokens.len() < 2 {
                    return Err(err(line, ParseErrorKind::MissingField("qubit")));
                }
                let q = parse_qubit(line, tokens[1], count)?;
                let mut fields = Fields::parse(line, &tokens[2..])?;
                let (kind, field): (GateKind, &'static str) = match kw {
                    "p" => (GateKind::P, "phi"),
                    "rx" => (GateKind::Rx, "theta"),
                    _ => (GateKind::Rz, "theta"),
                };
                let angle = fields.angle(field)?;
                fields.finish()?;
                ops.push(build(kind, Some(angle), vec![q])?);
            }
            "cnot" => {
                if tokens.len() < 3 {
                    return Err(err(line, ParseErrorKind::MissingField("qubits")));
                }
                let c = parse_qubit(line, tokens[1], count)?;
                let t = parse_qubit(line, tokens[2], count)?;
                Fields::parse(line, &tokens[3..])?.finish()?;
                ops.push(build(GateKind::CNot, None, vec![c, t])?);
            }
            "cphase" => {
                if tokens.len() < 3 {
                    return Err(err(line, ParseErrorKind::MissingField("qubits")));
                }
                let c = parse_qubit(line, tokens[1], count)?;
                let t = parse_qubit(line, tokens[2], count)?;
                let mut fields = Fields::parse(line, &tokens[3..])?;
                let phi = fields.angle("phi")?;
                fields.finish()?;
                ops.push(build(GateKind::CPhase, Some(phi), vec![c, t])?);
            }
            "swap" => {
                if tokens.len() < 3 {
                    return Err(err(line, ParseErrorKind::MissingField("qubits")));
                }
                let a = parse_qubit(line, tokens[1], count)?;
                let b = parse_qubit(line, tokens[2], count)?;
                Fields::parse(line, &tokens[3..])?.finish()?;
                ops.push(build(GateKind::Swap, None, vec![a, b])?);
            }
            other => return Err(err(line, ParseErrorKind::UnknownKeyword(other.to_string()))),
        }
    }

    Circuit::new(count, ops).map_err(|e| err(*first_line, ParseErrorKind::Semantic(e.to_string())))
}

/// Per-electron initial state string like `u0,d1`: spin `u`/`d`, mode `0`/`1`.
pub fn parse_state_spec(spec: &str, n_electrons: usize) -> Result<PureState, ParseError> {
    let tokens: Vec<&str> = spec.split(',').collect();
    if tokens.len() != n_electrons {
        return Err(err(
            1,
            ParseErrorKind::Semantic(format!(
                "state spec has {} electrons, netlist has {n_electrons}",
                tokens.len()
            )),
        ));
    }
    let mut index = 0usize;
    for (e, token) in tokens.iter().enumerate() {
        let bytes = token.as_bytes();
        if bytes.len() != 2 {
            return Err(err(1, ParseErrorKind::BadStateSpec(token.to_string())));
        }
        let spin = match bytes[0] {
            b'u' => 0usize,
            b'd' => 1usize,
            _ => return Err(err(1, ParseErrorKind::BadStateSpec(token.to_string()))),
        };
        let mode = match bytes[1] {
            b'0' => 0usize,
            b'1' => 1usize,
            _ => return Err(err(1, ParseErrorKind::BadStateSpec(token.to_string()))),
        };
        index |= spin << (2 * e);
        index |= mode << (2 * e + 1);
    }
    PureState::basis_state(n_electrons, index)
        .map_err(|e| err(1, ParseErrorKind::Semantic(e.to_string())))
}

/// Label like `u0,d1` for a register basis index.
pub fn basis_label(n_electrons: usize, index: usize) -> String {
    (0..n_electrons)
        .map(|e| {
            let spin = if (index >> (2 * e)) & 1 == 0 { 'u' } else { 'd' };
            let mode = if (index >> (2 * e + 1)) & 1 == 0 { '0' } else { '1' };
            format!("{spin}{mode}")
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Builds a 2x2 matrix from eight row-major floats (re, im pairs).
pub fn matrix_from_floats(values: &[f64; 8]) -> spinnet_core::Matrix {
    let c = |re: f64, im: f64| C64::new(re, im);
    let mut m = spinnet_core::Matrix::zeros(2);
    m[(0, 0)] = c(values[0], values[1]);
    m[(0, 1)] = c(values[2], values[3]);
    m[(1, 0)] = c(values[4], values[5]);
    m[(1, 1)] = c(values[6], values[7]);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinnet_core::hardware::pbs_hardware_netlist;
    use spinnet_core::linalg::equiv_up_to_global_phase;
    use spinnet_core::{circuit_unitary, netlist_unitary};
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn parses_a_single_splitter() {
        let netlist = parse_netlist("electrons 1\nbs e0 theta=0.7853981634\n").unwrap();
        assert_eq!(netlist.n_electrons, 1);
        assert_eq!(netlist.elements.len(), 1);
        match &netlist.elements[0] {
            HardwareElement::BeamSplitter { electron: 0, theta } => {
                assert!((theta - FRAC_PI_4).abs() < 1e-9);
            }
            other => panic!("unexpected element {other:?}"),
        }
    }

    #[test]
    fn pbs_file_round_trips_to_the_builtin_netlist() {
        let text = print_netlist(&pbs_hardware_netlist());
        let parsed = parse_netlist(&text).unwrap();
        let a = netlist_unitary(&parsed).unwrap();
        let b = netlist_unitary(&pbs_hardware_netlist()).unwrap();
        assert!(equiv_up_to_global_phase(&a, &b, 1e-12).unwrap());
        assert_eq!(parsed, pbs_hardware_netlist());
    }

    #[test]
    fn rejects_coulomb_on_one_electron() {
        let result = parse_netlist("electrons 2\ncoulomb e0 e0 phi=3.14\n");
        assert_eq!(
            result.unwrap_err().kind,
            ParseErrorKind::DistinctElectronsRequired
        );
    }

    #[test]
    fn error_lines_are_reported() {
        let text = "electrons 1\n# comment\n\nbs e0 theta=oops\n";
        let e = parse_netlist(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(matches!(e.kind, ParseErrorKind::MalformedNumber(_)));
    }

    #[test]
    fn missing_header_is_detected() {
        let e = parse_netlist("bs e0 theta=1\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::MissingHeader));
        let e2 = parse_netlist("").unwrap_err();
        assert!(matches!(e2.kind, ParseErrorKind::MissingHeader));
    }

    #[test]
    fn out_of_range_electron_is_rejected() {
        let e = parse_netlist("electrons 1\nbs e3 theta=0.5\n").unwrap_err();
        assert!(matches!(
            e.kind,
            ParseErrorKind::ElectronOutOfRange { electron: 3, count: 1 }
        ));
    }

    #[test]
    fn unknown_keyword_is_rejected() {
        let e = parse_netlist("electrons 1\nwobble e0\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownKeyword(_)));
    }

    #[test]
    fn print_parse_is_idempotent() {
        let text = "electrons 2\n# device\nrashba e0 axis=z theta=1.5707963267948966 mode=1\ncoulomb e0 e1 phi=3.141592653589793\ndetector e1 target=full\n";
        let once = print_netlist(&parse_netlist(text).unwrap());
        let twice = print_netlist(&parse_netlist(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn circuit_grammar_covers_all_keywords() {
        let text = "electrons 2\nh k0\np k0 phi=1.1\nrx s0 theta=0.5\nrz k1 theta=-0.3\nnot s1\ncnot s0 k0\ncphase k0 k1 phi=3.1\nswap s0 k0\n";
        let circuit = parse_circuit(text).unwrap();
        assert_eq!(circuit.ops.len(), 8);
        assert!(circuit_unitary(&circuit).is_ok());
    }

    #[test]
    fn circuit_rejects_duplicate_qubits() {
        let e = parse_circuit("electrons 1\ncnot s0 s0\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Semantic(_)));
        assert_eq!(e.line, 2);
    }

    #[test]
    fn state_spec_builds_the_right_basis_state() {
        let state = parse_state_spec("u0,d1", 2).unwrap();
        // spin down is bit 1 at flat 2, mode 1 is bit at flat 3.
        assert!((state.amplitude(0b1100).norm() - 1.0).abs() < 1e-12);
        assert_eq!(basis_label(2, 0b1100), "u0,d1");
    }

    #[test]
    fn state_spec_rejects_bad_tokens() {
        assert!(parse_state_spec("x0", 1).is_err());
        assert!(parse_state_spec("u0", 2).is_err());
        assert!(parse_state_spec("u2", 1).is_err());
    }
}
