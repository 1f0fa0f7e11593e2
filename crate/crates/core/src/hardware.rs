//! The physical element set and its compilation to register unitaries.
//!
//! Elements act on the quantum wires of single electrons (beam splitters,
//! Aharonov-Bohm phases, Rashba regions) or couple the mode qubits of two
//! electrons (Coulomb coupler). Detectors are placeholders for projective
//! measurement and have no unitary.
//!
//! Basis order within one electron is `|up;0>, |down;0>, |up;1>, |down;1>`
//! (spin is the low bit, mode the high bit of the electron's index pair).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::gates::{gate_unitary, GateKind};
use crate::linalg::{equiv_up_to_global_phase, C64, Matrix};
use crate::state::{embed_unitary, PureState, QubitRef};

/// Rotation axis of a Rashba region, set by the static field direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RashbaAxis {
    X,
    Z,
}

/// Whether a Rashba region covers both wires or only the 1-mode wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeMask {
    Both,
    Mode1Only,
}

/// What a detector reads out: the mode qubit alone (non-absorbing charge
/// detection) or the electron's full spin and mode state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectorTarget {
    Mode,
    Full,
}

/// One physical element in wire order.
#[derive(Clone, Debug, PartialEq)]
pub enum HardwareElement {
    /// Tunneling junction: `Rx(theta)` on the electron's mode qubit.
    BeamSplitter { electron: usize, theta: f64 },
    /// Flux between the wires: `P(phi)` on the mode qubit.
    AbPhase { electron: usize, phi: f64 },
    /// Spin rotation `R_axis(theta)`, either unconditionally or only on the
    /// 1-mode wire (making it a mode-controlled spin gate).
    Rashba {
        electron: usize,
        axis: RashbaAxis,
        theta: f64,
        mask: ModeMask,
    },
    /// Controlled phase `C(phi)` between two electrons' mode qubits.
    CoulombCoupler {
        electrons: (usize, usize),
        phi: f64,
    },
    /// Projective readout marker; inert for unitary compilation.
    Detector {
        electron: usize,
        target: DetectorTarget,
    },
}

impl HardwareElement {
    pub fn electrons(&self) -> Vec<usize> {
        match self {
            HardwareElement::BeamSplitter { electron, .. }
            | HardwareElement::AbPhase { electron, .. }
            | HardwareElement::Rashba { electron, .. }
            | HardwareElement::Detector { electron, .. } => vec![*electron],
            HardwareElement::CoulombCoupler { electrons, .. } => {
                vec![electrons.0, electrons.1]
            }
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            HardwareElement::BeamSplitter { theta, .. } => Some(*theta),
            HardwareElement::AbPhase { phi, .. } => Some(*phi),
            HardwareElement::Rashba { theta, .. } => Some(*theta),
            HardwareElement::CoulombCoupler { phi, .. } => Some(*phi),
            HardwareElement::Detector { .. } => None,
        }
    }

    pub fn is_detector(&self) -> bool {
        matches!(self, HardwareElement::Detector { .. })
    }

    fn validate(&self, n_electrons: usize) -> Result<()> {
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::NonFiniteAngle);
            }
        }
        if let HardwareElement::CoulombCoupler { electrons, .. } = self {
            if electrons.0 == electrons.1 {
                return Err(Error::CouplerSameElectron);
            }
        }
        for e in self.electrons() {
            if e >= n_electrons {
                return Err(Error::QubitOutOfRange(QubitRef::mode(e), n_electrons));
            }
        }
        Ok(())
    }
}

/// Ordered element list over a register; order is physical traversal order.
#[derive(Clone, Debug, PartialEq)]
pub struct Netlist {
    pub n_electrons: usize,
    pub elements: Vec<HardwareElement>,
}

impl Netlist {
    pub fn new(n_electrons: usize, elements: Vec<HardwareElement>) -> Result<Self> {
        if n_electrons == 0 {
            return Err(Error::EmptyRegister);
        }
        for el in &elements {
            el.validate(n_electrons)?;
        }
        Ok(Netlist {
            n_electrons,
            elements,
        })
    }

}

/// Device parameters in natural units (`hbar = e = c = 1`).
///
/// `flux` is measured in flux quanta, `tunneling_integral` is the
/// time-integrated tunneling rate in units of `hbar`, and the Rashba coupling
/// constant absorbs the gyromagnetic prefactor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardwareParams {
    /// Rashba coupling strength.
    pub alpha: f64,
    /// Applied static electric field.
    pub e_field: f64,
    /// Length of the Rashba region.
    pub length: f64,
    /// Enclosed magnetic flux in flux quanta.
    pub flux: f64,
    /// Integrated tunneling rate of a beam splitter.
    pub tunneling_integral: f64,
}

/// Which element's angle map to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleMap {
    AbPhase,
    BeamSplitter,
    Rashba,
}

/// Maps device parameters to the element's rotation angle.
///
/// The Rashba angle depends only on the region length and field strength --
/// there is deliberately no velocity parameter, reflecting that the underlying
/// phase is topological and dispersion-free.
pub fn physical_to_angle(params: &HardwareParams, which: AngleMap) -> f64 {
    match which {
        AngleMap::AbPhase => 2.0 * PI * params.flux,
        AngleMap::BeamSplitter => -params.tunneling_integral,
        AngleMap::Rashba => params.alpha * params.e_field * params.length,
    }
}

fn rashba_rotation(axis: RashbaAxis, theta: f64) -> Matrix {
    match axis {
        RashbaAxis::X => gate_unitary(GateKind::Rx, Some(theta)).unwrap(),
        RashbaAxis::Z => gate_unitary(GateKind::Rz, Some(theta)).unwrap(),
    }
}

/// Block matrix `diag(1, U)` -- `U` applied iff the control (high) bit is set.
fn controlled(u: &Matrix) -> Matrix {
    let mut m = Matrix::identity(4);
    for r in 0..2 {
        for c in 0..2 {
            m[(2 + r, 2 + c)] = u[(r, c)];
        }
    }
    m
}

/// Full-register unitary of one element. Detectors are refused.
pub fn element_unitary(element: &HardwareElement, n_electrons: usize) -> Result<Matrix> {
    element.validate(n_electrons)?;
    let n_qubits = 2 * n_electrons;
    match element {
        HardwareElement::BeamSplitter { electron, theta } => embed_unitary(
            n_qubits,
            &gate_unitary(GateKind::Rx, Some(*theta))?,
            &[QubitRef::mode(*electron).flat()],
        ),
        HardwareElement::AbPhase { electron, phi } => embed_unitary(
            n_qubits,
            &gate_unitary(GateKind::P, Some(*phi))?,
            &[QubitRef::mode(*electron).flat()],
        ),
        HardwareElement::Rashba {
            electron,
            axis,
            theta,
            mask,
        } => {
            let rot = rashba_rotation(*axis, *theta);
            match mask {
                ModeMask::Both => {
                    embed_unitary(n_qubits, &rot, &[QubitRef::spin(*electron).flat()])
                }
                ModeMask::Mode1Only => embed_unitary(
                    n_qubits,
                    &controlled(&rot),
                    // Control (mode) on the written matrix's high bit.
                    &[
                        QubitRef::spin(*electron).flat(),
                        QubitRef::mode(*electron).flat(),
                    ],
                ),
            }
        }
        HardwareElement::CoulombCoupler { electrons, phi } => embed_unitary(
            n_qubits,
            &gate_unitary(GateKind::CPhase, Some(*phi))?,
            &[
                QubitRef::mode(electrons.1).flat(),
                QubitRef::mode(electrons.0).flat(),
            ],
        ),
        HardwareElement::Detector { .. } => Err(Error::DetectorInUnitary),
    }
}

/// Ordered product of element unitaries (first element rightmost).
pub fn netlist_unitary(netlist: &Netlist) -> Result<Matrix> {
    let dim = 1usize << (2 * netlist.n_electrons);
    let mut u = Matrix::identity(dim);
    for element in &netlist.elements {
        u = element_unitary(element, netlist.n_electrons)?.mul(&u);
    }
    Ok(u)
}

/// Applies one element to a state without materializing the full-register
/// matrix. Detectors are refused here; simulation front ends turn them into
/// measurements.
pub fn apply_element(state: &PureState, element: &HardwareElement) -> Result<PureState> {
    element.validate(state.n_electrons())?;
    match element {
        HardwareElement::BeamSplitter { electron, theta } => state.apply_gate(
            &gate_unitary(GateKind::Rx, Some(*theta))?,
            &[QubitRef::mode(*electron)],
        ),
        HardwareElement::AbPhase { electron, phi } => state.apply_gate(
            &gate_unitary(GateKind::P, Some(*phi))?,
            &[QubitRef::mode(*electron)],
        ),
        HardwareElement::Rashba {
            electron,
            axis,
            theta,
            mask,
        } => {
            let rot = rashba_rotation(*axis, *theta);
            match mask {
                ModeMask::Both => state.apply_gate(&rot, &[QubitRef::spin(*electron)]),
                ModeMask::Mode1Only => state.apply_gate(
                    &controlled(&rot),
                    &[QubitRef::spin(*electron), QubitRef::mode(*electron)],
                ),
            }
        }
        HardwareElement::CoulombCoupler { electrons, phi } => state.apply_gate(
            &gate_unitary(GateKind::CPhase, Some(*phi))?,
            &[QubitRef::mode(electrons.1), QubitRef::mode(electrons.0)],
        ),
        HardwareElement::Detector { .. } => Err(Error::DetectorInUnitary),
    }
}

/// Runs every element of a netlist over a state; detectors are refused.
pub fn run_netlist(state: &PureState, netlist: &Netlist) -> Result<PureState> {
    let mut s = state.clone();
    for element in &netlist.elements {
        s = apply_element(&s, element)?;
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// The polarizing beam splitter
// ---------------------------------------------------------------------------

/// First and second splitter angle of the standalone PBS (50/50 junctions).
pub const PBS_SPLITTER_THETA: f64 = FRAC_PI_4;
/// Aharonov-Bohm phase of the PBS, i.e. a quarter flux quantum.
pub const PBS_AB_PHI: f64 = FRAC_PI_2;
/// Rashba angle of the PBS's 1-mode region.
pub const PBS_RASHBA_THETA: f64 = FRAC_PI_2;

/// Residual branch phases of the hardware PBS relative to the ideal
/// `CNOT(spin, mode)`, indexed by input basis state `|up;0>, |down;0>,
/// |up;1>, |down;1>` and normalized so the `|up;0>` branch carries zero.
///
/// No choice of splitter angles and flux removes these: perfect routing pins
/// the interferometer phases to `alpha_up = 0 or pi (mod 2pi)` per spin
/// sector, which forces one transmitted sector onto `diag(1,-1)` or one
/// reflected sector onto `+-i sigma_x` with unequal branch phases. The scan
/// test below re-derives this exhaustively.
pub const PBS_RESIDUAL_PHASES: [f64; 4] = [0.0, FRAC_PI_2, PI, FRAC_PI_2];

/// The ideal `CNOT(spin, mode)` on one electron: spin up passes through,
/// spin down switches wire.
pub fn pbs_behavioral() -> Matrix {
    let cnot = gate_unitary(GateKind::CNot, None).unwrap();
    // Control (spin) on the written matrix's high bit, mode is the target.
    embed_unitary(2, &cnot, &[QubitRef::mode(0).flat(), QubitRef::spin(0).flat()]).unwrap()
}

fn pbs_elements(electron: usize, splitter_theta: f64) -> Vec<HardwareElement> {
    vec![
        HardwareElement::BeamSplitter {
            electron,
            theta: splitter_theta,
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
            theta: splitter_theta,
        },
    ]
}

/// The four-element Mach-Zehnder realization of the PBS on electron 0.
pub fn pbs_hardware_netlist() -> Netlist {
    Netlist::new(1, pbs_elements(0, PBS_SPLITTER_THETA)).unwrap()
}

/// Comparison of the hardware PBS against the behavioral `CNOT(spin, mode)`.
#[derive(Clone, Debug)]
pub struct PbsEquivalenceReport {
    /// True iff the two unitaries agree up to one global phase.
    pub global_phase_equal: bool,
    /// True iff they agree up to a diagonal of branch phases.
    pub diagonal_equivalent: bool,
    /// True iff those branch phases depend on spin alone.
    pub spin_diagonal: bool,
    /// Branch phase per input basis state, `|up;0>` branch normalized to 0.
    pub residual_phases: [f64; 4],
    /// Probability that each input basis state exits on its routed wire.
    pub routing_probabilities: [f64; 4],
}

/// Routed output index for input `(spin, mode)`: mode flips iff spin is down.
fn routed_output(input: usize) -> usize {
    let spin = input & 1;
    let mode = (input >> 1) & 1;
    spin | ((mode ^ spin) << 1)
}

/// Evaluates the hardware PBS against the ideal gate.
pub fn pbs_equivalence_report(tol: f64) -> PbsEquivalenceReport {
    assert!(tol > 0.0, "tolerance must be positive");
    let u = netlist_unitary(&pbs_hardware_netlist()).unwrap();
    let ideal = pbs_behavioral();

    let mut routing = [0.0f64; 4];
    let mut raw = [0.0f64; 4];
    for input in 0..4 {
        let entry = u[(routed_output(input), input)];
        routing[input] = entry.norm_sqr();
        raw[input] = entry.arg();
    }
    let mut residual = [0.0f64; 4];
    for input in 0..4 {
        let mut d = raw[input] - raw[0];
        while d <= -PI {
            d += 2.0 * PI;
        }
        while d > PI {
            d -= 2.0 * PI;
        }
        residual[input] = d;
    }

    // U compared against (branch diagonal) x CNOT, phases taken from U itself.
    let mut dressed = Matrix::zeros(4);
    for input in 0..4 {
        let out = routed_output(input);
        dressed[(out, input)] = C64::from_polar(1.0, raw[input]);
    }
    let diagonal_equivalent = u.max_abs_diff(&dressed) <= tol;
    let global_phase_equal = equiv_up_to_global_phase(&u, &ideal, tol).unwrap();
    let spin_diagonal = (residual[0] - residual[2]).abs() <= tol
        && (residual[1] - residual[3]).abs() <= tol;

    PbsEquivalenceReport {
        global_phase_equal,
        diagonal_equivalent,
        spin_diagonal,
        residual_phases: residual,
        routing_probabilities: routing,
    }
}

// ---------------------------------------------------------------------------
// Structural SWAP(spin, mode) devices
// ---------------------------------------------------------------------------

/// Which of the two three-CNOT arrangements a SWAP device follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapVariant {
    /// Two PBS stages around one spin flip: nine elements.
    PbsHeavy,
    /// Two spin flips around one PBS stage: six elements.
    NotHeavy,
}

/// Splitter angle of the PBS stage inside the six-element SWAP device.
///
/// Any angle from the routing-perfect family works for routing; `3 pi / 4`
/// makes the branch phases cancel against the two spin flips so the composite
/// equals SWAP exactly rather than up to a diagonal.
pub const SWAP_INNER_SPLITTER_THETA: f64 = 3.0 * FRAC_PI_4;

fn spin_flip_on_mode1(electron: usize) -> HardwareElement {
    HardwareElement::Rashba {
        electron,
        axis: RashbaAxis::X,
        theta: FRAC_PI_2,
        mask: ModeMask::Mode1Only,
    }
}

/// Six-element SWAP(spin, mode) device on the given electron; equals the
/// SWAP gate exactly (no residual phase).
pub(crate) fn swap_sigma_k_elements_not_heavy(electron: usize) -> Vec<HardwareElement> {
    let mut v = vec![spin_flip_on_mode1(electron)];
    v.extend(pbs_elements(electron, SWAP_INNER_SPLITTER_THETA));
    v.push(spin_flip_on_mode1(electron));
    v
}

/// Hardware netlist of a SWAP(spin, mode) device on electron 0.
pub fn swap_sigma_k_netlist(variant: SwapVariant) -> Netlist {
    let elements = match variant {
        SwapVariant::PbsHeavy => {
            let mut v = pbs_elements(0, PBS_SPLITTER_THETA);
            v.push(spin_flip_on_mode1(0));
            v.extend(pbs_elements(0, PBS_SPLITTER_THETA));
            v
        }
        SwapVariant::NotHeavy => swap_sigma_k_elements_not_heavy(0),
    };
    Netlist::new(1, elements).unwrap()
}
