//! The reverse-engineering compiler: unitary decomposition, circuit rewriting
//! and lowering of gate circuits onto hardware netlists.
//!
//! Lowering is phase-exact: the compiled netlist reproduces the circuit
//! unitary up to one global phase. Where a bare physical element differs from
//! its ideal gate by branch phases (the one-mode spin flip, the PBS), the
//! lowering appends the diagonal phase elements that cancel the difference.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::gates::{circuit_unitary, Circuit, GateKind, GateOp};
use crate::hardware::{
    swap_sigma_k_elements_not_heavy, HardwareElement, ModeMask, Netlist, RashbaAxis,
    PBS_AB_PHI, PBS_RASHBA_THETA, PBS_SPLITTER_THETA,
};
pub use crate::hardware::SwapVariant;
use crate::linalg::{equiv_up_to_global_phase, C64, Matrix};
use crate::state::{Dof, QubitRef};

// ---------------------------------------------------------------------------
// Euler decomposition
// ---------------------------------------------------------------------------

/// Angles of `U = e^{i global_phase} Rz(theta1) Rx(theta2) Rz(theta3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    pub global_phase: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

fn wrap_angle(x: f64) -> f64 {
    let mut v = x % (2.0 * PI);
    if v > PI {
        v -= 2.0 * PI;
    }
    if v <= -PI {
        v += 2.0 * PI;
    }
    v
}

/// Angles for one SU(2) representative; `v` must have unit determinant.
fn su2_zxz(v00: C64, v01: C64) -> (f64, f64, f64) {
    let eps = 1e-12;
    let beta = v01.norm().atan2(v00.norm());
    if v01.norm() <= eps {
        // Diagonal: only theta1 + theta3 is determined, pick theta3 = 0.
        (wrap_angle(v00.arg()), beta, 0.0)
    } else if v00.norm() <= eps {
        // Antidiagonal: only theta1 - theta3 is determined, pick theta3 = 0.
        (wrap_angle(v01.arg() - FRAC_PI_2), beta, 0.0)
    } else {
        let sum = wrap_angle(v00.arg());
        let diff = wrap_angle(v01.arg() - FRAC_PI_2);
        (
            wrap_angle((sum + diff) / 2.0),
            beta,
            wrap_angle((sum - diff) / 2.0),
        )
    }
}

/// Decomposes a 2x2 unitary into the zxz rotation form of this crate's
/// convention, `U = e^{i lambda} Rz(t1) Rx(t2) Rz(t3)`.
///
/// The two SU(2) representatives (`lambda` and `lambda - pi`) both solve the
/// problem; the one with the smaller `|t1| + |t3|` is reported, which makes
/// the Hadamard come out as `lambda = -pi/2`, `t1 = t2 = t3 = pi/4`.
pub fn euler_zxz(u: &Matrix) -> Result<EulerAngles> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch(u.dim(), 2));
    }
    if !u.is_unitary(1e-10) {
        return Err(Error::NotUnitary(1e-10));
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let lambda0 = det.arg() / 2.0;

    let mut best: Option<EulerAngles> = None;
    for lambda in [lambda0, wrap_angle(lambda0 - PI)] {
        let rot = C64::from_polar(1.0, -lambda);
        let (t1, t2, t3) = su2_zxz(u[(0, 0)] * rot, u[(0, 1)] * rot);
        let candidate = EulerAngles {
            global_phase: lambda,
            theta1: t1,
            theta2: t2,
            theta3: t3,
        };
        let cost = t1.abs() + t3.abs();
        let better = match &best {
            None => true,
            Some(b) => cost < b.theta1.abs() + b.theta3.abs() - 1e-15,
        };
        if better {
            best = Some(candidate);
        }
    }
    Ok(best.expect("two candidates were examined"))
}

/// Rebuilds the unitary described by a set of Euler angles.
pub fn euler_reconstruct(angles: &EulerAngles) -> Matrix {
    use crate::gates::gate_unitary;
    let rz1 = gate_unitary(GateKind::Rz, Some(angles.theta1)).unwrap();
    let rx = gate_unitary(GateKind::Rx, Some(angles.theta2)).unwrap();
    let rz3 = gate_unitary(GateKind::Rz, Some(angles.theta3)).unwrap();
    rz1.mul(&rx)
        .mul(&rz3)
        .scale(C64::from_polar(1.0, angles.global_phase))
}

// ---------------------------------------------------------------------------
// Rewrite rules
// ---------------------------------------------------------------------------

/// A validated peephole rule: `pattern` may be replaced by `replacement`
/// anywhere it appears as a consecutive window.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    name: String,
    pattern: Vec<GateOp>,
    replacement: Vec<GateOp>,
}

impl RewriteRule {
    /// Registers a rule after checking that both sides have the same unitary
    /// up to a global phase (tolerance 1e-9).
    pub fn new(name: &str, pattern: Vec<GateOp>, replacement: Vec<GateOp>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidRule(name.to_string()));
        }
        let n_electrons = pattern
            .iter()
            .chain(replacement.iter())
            .flat_map(|op| op.targets.iter())
            .map(|q| q.electron + 1)
            .max()
            .unwrap_or(1);
        let lhs = circuit_unitary(&Circuit::new(n_electrons, pattern.clone())?)?;
        let rhs = circuit_unitary(&Circuit::new(n_electrons, replacement.clone())?)?;
        if !equiv_up_to_global_phase(&lhs, &rhs, 1e-9)? {
            return Err(Error::InvalidRule(name.to_string()));
        }
        Ok(RewriteRule {
            name: name.to_string(),
            pattern,
            replacement,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pattern(&self) -> &[GateOp] {
        &self.pattern
    }

    pub fn replacement(&self) -> &[GateOp] {
        &self.replacement
    }
}

fn ops_match(window: &[GateOp], pattern: &[GateOp]) -> bool {
    window.iter().zip(pattern.iter()).all(|(a, b)| {
        a.kind == b.kind
            && a.targets == b.targets
            && match (a.angle, b.angle) {
                (None, None) => true,
                (Some(x), Some(y)) => (x - y).abs() <= 1e-12,
                _ => false,
            }
    })
}

/// Left-to-right single-pass replacement, repeated to a fixpoint.
///
/// Each pass scans once, replacing the first matching rule at each position
/// and resuming after the replacement. Passes repeat until nothing changes;
/// more than 1000 passes is treated as a non-terminating rule set. In debug
/// builds every application is checked to preserve the circuit unitary up to
/// global phase.
pub fn peephole_rewrite(circuit: &Circuit, rules: &[RewriteRule]) -> Result<Circuit> {
    const MAX_PASSES: usize = 1000;
    let reference = if cfg!(debug_assertions) {
        Some(circuit_unitary(circuit)?)
    } else {
        None
    };

    let mut ops = circuit.ops.clone();
    for _pass in 0..MAX_PASSES {
        let mut changed = false;
        let mut out: Vec<GateOp> = Vec::with_capacity(ops.len());
        let mut i = 0;
        while i < ops.len() {
            let mut applied = false;
            for rule in rules {
                let plen = rule.pattern.len();
                if i + plen <= ops.len() && ops_match(&ops[i..i + plen], &rule.pattern) {
                    out.extend(rule.replacement.iter().cloned());
                    i += plen;
                    applied = true;
                    changed = true;
                    if let Some(reference) = &reference {
                        let mut candidate = out.clone();
                        candidate.extend(ops[i..].iter().cloned());
                        let current = circuit_unitary(&Circuit::new(
                            circuit.n_electrons,
                            candidate,
                        )?)?;
                        debug_assert!(
                            equiv_up_to_global_phase(reference, &current, 1e-9)?,
                            "rule {} broke the circuit unitary",
                            rule.name
                        );
                    }
                    break;
                }
            }
            if !applied {
                out.push(ops[i].clone());
                i += 1;
            }
        }
        if !changed {
            return Circuit::new(circuit.n_electrons, ops);
        }
        ops = out;
    }
    Err(Error::NonTerminatingRules(MAX_PASSES))
}

/// Generators for the rules induced by the gate-set identities.
pub mod rules {
    use super::*;

    /// `g g -> (nothing)` for any self-inverse gate op.
    pub fn cancel_involution(op: GateOp) -> Result<RewriteRule> {
        RewriteRule::new(
            &format!("cancel-{}", op.kind.name()),
            vec![op.clone(), op],
            vec![],
        )
    }

    /// `P(phi) -> Rz(-phi/2)` up to the global phase `e^{i phi/2}`.
    pub fn phase_to_rz(target: QubitRef, phi: f64) -> Result<RewriteRule> {
        RewriteRule::new(
            "phase-to-rz",
            vec![GateOp::p(target, phi)],
            vec![GateOp::rz(target, -phi / 2.0)],
        )
    }

    /// `H -> Rz(pi/4) Rx(pi/4) Rz(pi/4)` up to a global phase.
    pub fn hadamard_to_zxz(target: QubitRef) -> Result<RewriteRule> {
        RewriteRule::new(
            "hadamard-to-zxz",
            vec![GateOp::h(target)],
            vec![
                GateOp::rz(target, FRAC_PI_4),
                GateOp::rx(target, FRAC_PI_4),
                GateOp::rz(target, FRAC_PI_4),
            ],
        )
    }

    /// `SWAP(a, b) -> three alternating CNOTs`, in either arrangement.
    pub fn swap_to_cnots(a: QubitRef, b: QubitRef, variant: SwapVariant) -> Result<RewriteRule> {
        let ops = match variant {
            SwapVariant::PbsHeavy => vec![
                GateOp::cnot(a, b),
                GateOp::cnot(b, a),
                GateOp::cnot(a, b),
            ],
            SwapVariant::NotHeavy => vec![
                GateOp::cnot(b, a),
                GateOp::cnot(a, b),
                GateOp::cnot(b, a),
            ],
        };
        RewriteRule::new("swap-to-cnots", vec![GateOp::swap(a, b)], ops)
    }

    /// `CNOT(c, t) -> H(t) C(pi)(c, t) H(t)`.
    pub fn cnot_to_cphase(control: QubitRef, target: QubitRef) -> Result<RewriteRule> {
        RewriteRule::new(
            "cnot-to-cphase",
            vec![GateOp::cnot(control, target)],
            vec![
                GateOp::h(target),
                GateOp::cphase(control, target, PI),
                GateOp::h(target),
            ],
        )
    }
}

// ---------------------------------------------------------------------------
// SWAP(spin, mode) gate circuits
// ---------------------------------------------------------------------------

/// The two three-CNOT circuits realizing SWAP between the spin and mode of
/// electron 0. `PbsHeavy` uses the spin-controlled CNOT twice, `NotHeavy`
/// once.
pub fn swap_sigma_k_circuit(variant: SwapVariant) -> Circuit {
    let s = QubitRef::spin(0);
    let k = QubitRef::mode(0);
    let ops = match variant {
        SwapVariant::PbsHeavy => vec![
            GateOp::cnot(s, k),
            GateOp::cnot(k, s),
            GateOp::cnot(s, k),
        ],
        SwapVariant::NotHeavy => vec![
            GateOp::cnot(k, s),
            GateOp::cnot(s, k),
            GateOp::cnot(k, s),
        ],
    };
    Circuit::new(1, ops).unwrap()
}

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

fn unsupported(op: &GateOp) -> Error {
    let targets: Vec<String> = op.targets.iter().map(|t| t.to_string()).collect();
    Error::UnsupportedGate(format!("{} on {}", op.kind.name(), targets.join(", ")))
}

fn spin_rotation(electron: usize, axis: RashbaAxis, theta: f64) -> HardwareElement {
    HardwareElement::Rashba {
        electron,
        axis,
        theta,
        mask: ModeMask::Both,
    }
}

/// Mode-qubit Hadamard as phases around a balanced splitter; exact, with no
/// leftover global phase: `H = P(-pi/2) Rx(pi/4) P(-pi/2)`.
fn mode_hadamard(electron: usize) -> Vec<HardwareElement> {
    vec![
        HardwareElement::AbPhase {
            electron,
            phi: -FRAC_PI_2,
        },
        HardwareElement::BeamSplitter {
            electron,
            theta: FRAC_PI_4,
        },
        HardwareElement::AbPhase {
            electron,
            phi: -FRAC_PI_2,
        },
    ]
}

/// The PBS stage plus the diagonal phase elements that cancel its branch
/// phases, so the whole group equals `CNOT(spin, mode)` up to `e^{i pi/4}`.
fn cnot_spin_control(electron: usize) -> Vec<HardwareElement> {
    vec![
        HardwareElement::BeamSplitter {
            electron,
            theta: PBS_SPLITTER_THETA,
        },
        HardwareElement::Rashba {
            electron,
            axis: RashbaAxis::Z,
            theta: PBS_RASHBA_THETA,
            mask: ModeMask::Mode1Only,
        },
        HardwareElement::AbPhase {
            electron,
            phi: PBS_AB_PHI,
        },
        HardwareElement::BeamSplitter {
            electron,
            theta: PBS_SPLITTER_THETA,
        },
        // Branch-phase correction: spin, flux and one-mode phases that undo
        // the interferometer's residual diagonal.
        spin_rotation(electron, RashbaAxis::Z, FRAC_PI_4),
        HardwareElement::AbPhase {
            electron,
            phi: FRAC_PI_2,
        },
        HardwareElement::Rashba {
            electron,
            axis: RashbaAxis::Z,
            theta: FRAC_PI_2,
            mask: ModeMask::Mode1Only,
        },
    ]
}

/// One-mode spin flip plus the flux phase that makes it an exact
/// `CNOT(mode, spin)`.
fn cnot_mode_control(electron: usize) -> Vec<HardwareElement> {
    vec![
        HardwareElement::Rashba {
            electron,
            axis: RashbaAxis::X,
            theta: FRAC_PI_2,
            mask: ModeMask::Mode1Only,
        },
        HardwareElement::AbPhase {
            electron,
            phi: -FRAC_PI_2,
        },
    ]
}

/// `C(phi)` between the spin and mode of one electron.
fn cphase_same_electron(electron: usize, phi: f64) -> Vec<HardwareElement> {
    vec![
        HardwareElement::Rashba {
            electron,
            axis: RashbaAxis::Z,
            theta: -phi / 2.0,
            mask: ModeMask::Mode1Only,
        },
        HardwareElement::AbPhase {
            electron,
            phi: phi / 2.0,
        },
    ]
}

/// `CNOT` between the mode qubits of two electrons, via the Coulomb coupler
/// conjugated by mode Hadamards on the target.
fn cnot_mode_mode(control: usize, target: usize) -> Vec<HardwareElement> {
    let mut v = mode_hadamard(target);
    v.push(HardwareElement::CoulombCoupler {
        electrons: (control, target),
        phi: PI,
    });
    v.extend(mode_hadamard(target));
    v
}

fn lower_single(op: &GateOp) -> Result<Vec<HardwareElement>> {
    let q = op.targets[0];
    let e = q.electron;
    let theta = op.angle;
    Ok(match (q.dof, op.kind) {
        (_, GateKind::Identity) => vec![],
        (Dof::Spin, GateKind::Rx) => vec![spin_rotation(e, RashbaAxis::X, theta.unwrap())],
        (Dof::Spin, GateKind::Rz) => vec![spin_rotation(e, RashbaAxis::Z, theta.unwrap())],
        (Dof::Spin, GateKind::Not) => vec![spin_rotation(e, RashbaAxis::X, FRAC_PI_2)],
        (Dof::Spin, GateKind::P) => {
            vec![spin_rotation(e, RashbaAxis::Z, -theta.unwrap() / 2.0)]
        }
        (Dof::Spin, GateKind::H) => vec![
            spin_rotation(e, RashbaAxis::Z, FRAC_PI_4),
            spin_rotation(e, RashbaAxis::X, FRAC_PI_4),
            spin_rotation(e, RashbaAxis::Z, FRAC_PI_4),
        ],
        (Dof::Mode, GateKind::Rx) => vec![HardwareElement::BeamSplitter {
            electron: e,
            theta: theta.unwrap(),
        }],
        (Dof::Mode, GateKind::P) => vec![HardwareElement::AbPhase {
            electron: e,
            phi: theta.unwrap(),
        }],
        (Dof::Mode, GateKind::Rz) => vec![HardwareElement::AbPhase {
            electron: e,
            phi: -2.0 * theta.unwrap(),
        }],
        (Dof::Mode, GateKind::Not) => vec![HardwareElement::BeamSplitter {
            electron: e,
            theta: FRAC_PI_2,
        }],
        (Dof::Mode, GateKind::H) => mode_hadamard(e),
        _ => return Err(unsupported(op)),
    })
}

fn lower_pair(op: &GateOp) -> Result<Vec<HardwareElement>> {
    let (a, b) = (op.targets[0], op.targets[1]);
    match op.kind {
        GateKind::CNot => {
            if a.electron == b.electron {
                match (a.dof, b.dof) {
                    (Dof::Spin, Dof::Mode) => Ok(cnot_spin_control(a.electron)),
                    (Dof::Mode, Dof::Spin) => Ok(cnot_mode_control(a.electron)),
                    _ => Err(unsupported(op)),
                }
            } else if a.dof == Dof::Mode && b.dof == Dof::Mode {
                Ok(cnot_mode_mode(a.electron, b.electron))
            } else {
                // No element couples the spin of one electron to another
                // electron; only mode-mode interactions exist.
                Err(unsupported(op))
            }
        }
        GateKind::CPhase => {
            let phi = op.angle.unwrap();
            if a.electron == b.electron {
                Ok(cphase_same_electron(a.electron, phi))
            } else if a.dof == Dof::Mode && b.dof == Dof::Mode {
                Ok(vec![HardwareElement::CoulombCoupler {
                    electrons: (a.electron, b.electron),
                    phi,
                }])
            } else {
                Err(unsupported(op))
            }
        }
        GateKind::Swap => {
            if a.electron == b.electron {
                // Spin-mode exchange: the six-element device is phase-exact.
                Ok(swap_sigma_k_elements_not_heavy(a.electron))
            } else if a.dof == Dof::Mode && b.dof == Dof::Mode {
                let (e1, e2) = (a.electron, b.electron);
                let mut v = cnot_mode_mode(e1, e2);
                v.extend(cnot_mode_mode(e2, e1));
                v.extend(cnot_mode_mode(e1, e2));
                Ok(v)
            } else {
                Err(unsupported(op))
            }
        }
        _ => Err(unsupported(op)),
    }
}

/// Compiles a gate circuit to a hardware netlist.
///
/// The result reproduces the circuit unitary up to a global phase (tolerance
/// 1e-9, see the round-trip tests). Gates with no physical realization --
/// anything coupling a spin across electrons -- are rejected by name.
pub fn lower_to_netlist(circuit: &Circuit) -> Result<Netlist> {
    let mut elements = Vec::new();
    for op in &circuit.ops {
        let lowered = match op.targets.len() {
            1 => lower_single(op)?,
            _ => lower_pair(op)?,
        };
        elements.extend(lowered);
    }
    Netlist::new(circuit.n_electrons, elements)
}

/// Number of physical elements in a netlist; detectors are not counted.
pub fn hardware_cost(netlist: &Netlist) -> usize {
    netlist.elements.iter().filter(|e| !e.is_detector()).count()
}
