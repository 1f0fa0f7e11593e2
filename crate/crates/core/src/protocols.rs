//! Executable entanglement protocols, from single-electron entanglers to
//! Bell tests.
//!
//! Every protocol runs at the abstract gate layer by default. Entry points
//! with a [`Layer`] switch can instead evolve the state through the literal
//! hardware elements; routing and entanglement figures agree between layers,
//! only branch phases differ (see the layer tests).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::gates::{apply_op, gate_unitary, GateKind, GateOp};
use crate::hardware::{apply_element, pbs_behavioral, HardwareElement, ModeMask, RashbaAxis};
use crate::linalg::{C64, Matrix, ZERO};
use crate::metrics::entanglement_entropy;
use crate::state::{embed_unitary, MeasurementRecord, PureState, QubitRef};

/// Whether a protocol evolves through ideal gates or literal elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Gate,
    Hardware,
}

/// The four Bell states as reported by a Bell analyzer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    /// Fixed bijection from the analyzer's computational-basis bits
    /// `(b1, b2)`, the inverse of the Bell-generation circuit.
    pub fn from_bits(b1: bool, b2: bool) -> Self {
        match (b1, b2) {
            (false, false) => BellOutcome::PhiPlus,
            (true, false) => BellOutcome::PhiMinus,
            (false, true) => BellOutcome::PsiPlus,
            (true, true) => BellOutcome::PsiMinus,
        }
    }

    pub fn index(self) -> usize {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }

    pub fn all() -> [BellOutcome; 4] {
        [
            BellOutcome::PhiPlus,
            BellOutcome::PhiMinus,
            BellOutcome::PsiPlus,
            BellOutcome::PsiMinus,
        ]
    }

    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi_plus",
            BellOutcome::PhiMinus => "phi_minus",
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PsiMinus => "psi_minus",
        }
    }

    /// Two-qubit amplitudes, little-endian in (first, second) qubit order.
    pub fn amplitudes(self) -> [C64; 4] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h = C64::new(r, 0.0);
        match self {
            BellOutcome::PhiPlus => [h, ZERO, ZERO, h],
            BellOutcome::PhiMinus => [h, ZERO, ZERO, -h],
            BellOutcome::PsiPlus => [ZERO, h, h, ZERO],
            BellOutcome::PsiMinus => [ZERO, -h, h, ZERO],
        }
    }
}

/// A protocol run: final state, the measurements taken along the way, and
/// named scalar results.
#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub final_state: PureState,
    pub records: Vec<MeasurementRecord>,
    pub derived: BTreeMap<String, f64>,
}

// ---------------------------------------------------------------------------
// Entanglers
// ---------------------------------------------------------------------------

/// Entangles the spin and mode of one electron: a balanced splitter followed
/// by a spin flip on the 1-mode wire. From `|up;0>` this yields
/// `(|up;0> + i |down;1>)/sqrt(2)`.
pub fn spin_mode_entangler(state: &PureState, electron: usize) -> Result<PureState> {
    spin_mode_entangler_layered(state, electron, Layer::Gate)
}

/// Layered variant: the hardware path drives the literal two elements, whose
/// flipped branch differs from the ideal by the spin-flip phase `i`.
pub fn spin_mode_entangler_layered(
    state: &PureState,
    electron: usize,
    layer: Layer,
) -> Result<PureState> {
    let k = QubitRef::mode(electron);
    let s = QubitRef::spin(electron);
    let split = apply_op(state, &GateOp::rx(k, FRAC_PI_4))?;
    match layer {
        Layer::Gate => apply_op(&split, &GateOp::cnot(k, s)),
        Layer::Hardware => apply_element(
            &split,
            &HardwareElement::Rashba {
                electron,
                axis: RashbaAxis::X,
                theta: FRAC_PI_2,
                mask: ModeMask::Mode1Only,
            },
        ),
    }
}

/// Coulomb coupling strength at which the mode-mode entangler produces a
/// maximally entangled Bell state (`i |Psi+>` on the modes).
pub const MODE_ENTANGLER_COUPLING: f64 = PI;

/// Entangles the modes of two electrons injected on their 0-wires: balanced
/// splitters on both, a Coulomb coupler of strength `phi`, then another
/// splitter on the second electron.
pub fn mode_mode_entangler(phi: f64) -> Result<ProtocolResult> {
    let k0 = QubitRef::mode(0);
    let k1 = QubitRef::mode(1);
    let mut state = PureState::new_register(2)?;
    state = apply_op(&state, &GateOp::rx(k0, FRAC_PI_4))?;
    state = apply_op(&state, &GateOp::rx(k1, FRAC_PI_4))?;
    state = apply_op(&state, &GateOp::cphase(k0, k1, phi))?;
    state = apply_op(&state, &GateOp::rx(k1, FRAC_PI_4))?;

    let mut derived = BTreeMap::new();
    derived.insert(
        "mode_entropy_bits".to_string(),
        entanglement_entropy(&state, &[k0])?,
    );
    derived.insert(
        "bell_fidelity".to_string(),
        state.fidelity(&mode_bell_target()?)?,
    );
    let spin_rho = state.reduced_density(&[QubitRef::spin(0), QubitRef::spin(1)])?;
    derived.insert("spin_up_up_population".to_string(), spin_rho[(0, 0)].re);
    derived.insert(
        "spin_entropy_bits".to_string(),
        entanglement_entropy(&state, &[QubitRef::spin(0)])?,
    );

    Ok(ProtocolResult {
        final_state: state,
        records: vec![],
        derived,
    })
}

/// `|up up> (x) i(|01> + |10>)/sqrt(2)` -- the ideal mode-entangled output.
fn mode_bell_target() -> Result<PureState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 16];
    amps[2] = C64::new(0.0, r); // modes (1, 0)
    amps[8] = C64::new(0.0, r); // modes (0, 1)
    PureState::from_amplitudes(2, amps)
}

// ---------------------------------------------------------------------------
// Bell measurement and entanglement swapping
// ---------------------------------------------------------------------------

/// Bell-basis measurement of qubits `(q1, q2)`: the analyzer applies
/// `CNOT(q1, q2)` then `H(q1)` and measures both in the computational basis.
/// The measured pair is consumed -- it is left collapsed in the rotated
/// frame, not undone.
pub fn bell_measure(
    state: &PureState,
    q1: QubitRef,
    q2: QubitRef,
    seed: u64,
) -> Result<(BellOutcome, PureState)> {
    let (outcome, record) = bell_measure_record(state, q1, q2, seed)?;
    Ok((outcome, record.post_state))
}

fn bell_measure_record(
    state: &PureState,
    q1: QubitRef,
    q2: QubitRef,
    seed: u64,
) -> Result<(BellOutcome, MeasurementRecord)> {
    if q1 == q2 {
        return Err(Error::DuplicateTargets);
    }
    let rotated = apply_op(&apply_op(state, &GateOp::cnot(q1, q2))?, &GateOp::h(q1))?;
    let record = rotated.measure(&[q1, q2], seed)?;
    let outcome = BellOutcome::from_bits(record.outcome[0], record.outcome[1]);
    Ok((outcome, record))
}

/// Entangles the spins of two electrons that never interacted, by preparing
/// each electron in a spin-mode Bell state and Bell-measuring the two modes.
pub fn entanglement_swapping(seed: u64) -> Result<ProtocolResult> {
    entanglement_swapping_layered(seed, Layer::Gate)
}

pub fn entanglement_swapping_layered(seed: u64, layer: Layer) -> Result<ProtocolResult> {
    let mut state = PureState::new_register(2)?;
    state = spin_mode_entangler_layered(&state, 0, layer)?;
    state = spin_mode_entangler_layered(&state, 1, layer)?;

    // The analyzer stage is layer-independent: its hardware lowering (mode
    // Hadamard and Coulomb-coupled mode CNOT) equals the gate circuit
    // exactly, so the gates are applied directly.

    let (outcome, record) =
        bell_measure_record(&state, QubitRef::mode(0), QubitRef::mode(1), seed)?;
    let post = record.post_state.clone();

    let spins = [QubitRef::spin(0), QubitRef::spin(1)];
    let spin_rho = post.reduced_density(&spins)?;
    let spin_entropy = entanglement_entropy(&post, &[spins[0]])?;
    let spin_concurrence = crate::metrics::concurrence(&spin_rho)?;
    let spin_bell = closest_bell_state(&spin_rho);

    let mut derived = BTreeMap::new();
    derived.insert("outcome_index".to_string(), outcome.index() as f64);
    derived.insert("outcome_probability".to_string(), record.probability);
    derived.insert("spin_entropy_bits".to_string(), spin_entropy);
    derived.insert("spin_concurrence".to_string(), spin_concurrence);
    derived.insert("spin_bell_index".to_string(), spin_bell as f64);

    Ok(ProtocolResult {
        final_state: post,
        records: vec![record],
        derived,
    })
}

/// Index of the Bell state with the largest overlap `<bell| rho |bell>`.
/// Phases of the state drop out, so `i |Psi+>` still reports `PsiPlus`.
fn closest_bell_state(rho: &Matrix) -> usize {
    let mut best = (0usize, -1.0f64);
    for outcome in BellOutcome::all() {
        let amps = outcome.amplitudes();
        let mut overlap = ZERO;
        for r in 0..4 {
            for c in 0..4 {
                overlap += amps[r].conj() * rho[(r, c)] * amps[c];
            }
        }
        if overlap.re > best.1 {
            best = (outcome.index(), overlap.re);
        }
    }
    best.0
}

// ---------------------------------------------------------------------------
// Entanglement transfer and hyper-entanglement
// ---------------------------------------------------------------------------

/// Moves entanglement from the mode pair onto the spin pair by swapping spin
/// and mode inside each electron. Both swaps are single-particle gates.
pub fn entanglement_transfer(state: &PureState) -> Result<PureState> {
    if state.n_electrons() != 2 {
        return Err(Error::WrongRegisterSize(state.n_electrons(), 2));
    }
    let mut s = apply_op(
        state,
        &GateOp::swap(QubitRef::spin(0), QubitRef::mode(0)),
    )?;
    s = apply_op(&s, &GateOp::swap(QubitRef::spin(1), QubitRef::mode(1)))?;
    Ok(s)
}

/// Turns two internally entangled electrons into a hyper-entangled pair:
/// first `SWAP(k1, k2)` across the electrons, then `SWAP(spin, mode)` inside
/// the first.
pub fn hyper_entangler(state: &PureState) -> Result<PureState> {
    if state.n_electrons() != 2 {
        return Err(Error::WrongRegisterSize(state.n_electrons(), 2));
    }
    let mut s = apply_op(
        state,
        &GateOp::swap(QubitRef::mode(0), QubitRef::mode(1)),
    )?;
    s = apply_op(&s, &GateOp::swap(QubitRef::spin(0), QubitRef::mode(0)))?;
    Ok(s)
}

// ---------------------------------------------------------------------------
// Orientable Stern-Gerlach
// ---------------------------------------------------------------------------

/// Spinor polarized along the axis at angle `theta0` from Oz in the y-z
/// plane: the +1 eigenvector of `cos(theta0) sigma_z + sin(theta0) sigma_y`.
pub fn polarized_spinor(theta0: f64) -> (C64, C64) {
    (
        C64::new((theta0 / 2.0).cos(), 0.0),
        C64::new(0.0, (theta0 / 2.0).sin()),
    )
}

/// Probability that the orientable Stern-Gerlach at axis angle `theta`
/// reports spin-up for an incoming spin `(alpha, beta)`.
///
/// The device rotates the spin by `e^{-i theta sigma_x / 2}` and then routes
/// it through the PBS; spin-up exits on the input wire. `theta` is the
/// measurement-axis angle in the y-z plane, so a fully polarized input at
/// axis angle `theta0` produces `cos^2((theta - theta0)/2)`.
pub fn stern_gerlach_p_up(theta: f64, spin: (C64, C64)) -> Result<f64> {
    let norm = spin.0.norm_sqr() + spin.1.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedSpin(norm));
    }
    let mut amps = vec![ZERO; 4];
    amps[0] = spin.0;
    amps[1] = spin.1;
    let state = PureState::from_amplitudes(1, amps)?;

    // e^{-i theta sigma_x / 2} is Rx(-theta/2) in this crate's convention.
    let rot = gate_unitary(GateKind::Rx, Some(-theta / 2.0))?;
    let rotated = state.apply_gate(&rot, &[QubitRef::spin(0)])?;
    let routed = rotated.apply_gate(
        &pbs_behavioral(),
        &[QubitRef::spin(0), QubitRef::mode(0)],
    )?;
    // Spin-up routes onto the input wire 0.
    Ok(routed.amplitude(0).norm_sqr() + routed.amplitude(1).norm_sqr())
}

/// `p_up` for a fully polarized input at axis angle `theta0`.
pub fn stern_gerlach_p_up_polarized(theta: f64, theta0: f64) -> f64 {
    stern_gerlach_p_up(theta, polarized_spinor(theta0)).expect("spinor is normalized")
}

/// `p_up` for an unpolarized input, modeled as the average over a polarized
/// spinor and its antipodal partner. Constant 1/2 at every angle.
pub fn stern_gerlach_unpolarized_p_up(theta: f64, theta0: f64) -> f64 {
    let a = stern_gerlach_p_up_polarized(theta, theta0);
    let b = stern_gerlach_p_up_polarized(theta, theta0 + PI);
    (a + b) / 2.0
}

// ---------------------------------------------------------------------------
// Spin-spin correlation and the CHSH combination
// ---------------------------------------------------------------------------

/// `sigma . n` for an axis at angle `theta` from Oz in the y-z plane.
fn spin_axis_operator(theta: f64) -> Matrix {
    let (c, s) = (theta.cos(), theta.sin());
    Matrix::from_rows(&[
        &[C64::new(c, 0.0), C64::new(0.0, -s)],
        &[C64::new(0.0, s), C64::new(-c, 0.0)],
    ])
}

/// Exact two-spin correlation `<(sigma_1 . n_1)(sigma_2 . n_2)>` of a
/// two-electron register, with both axes in the y-z measurement plane.
pub fn chsh_correlation(state: &PureState, n1: f64, n2: f64) -> Result<f64> {
    if state.n_electrons() != 2 {
        return Err(Error::WrongRegisterSize(state.n_electrons(), 2));
    }
    let op1 = embed_unitary(4, &spin_axis_operator(n1), &[QubitRef::spin(0).flat()])?;
    let op2 = embed_unitary(4, &spin_axis_operator(n2), &[QubitRef::spin(1).flat()])?;
    let observable = op1.mul(&op2);
    let mut expectation = ZERO;
    for r in 0..state.dim() {
        for c in 0..state.dim() {
            let e = observable[(r, c)];
            if e != ZERO {
                expectation += state.amplitude(r).conj() * e * state.amplitude(c);
            }
        }
    }
    Ok(expectation.re)
}

/// Canonical CHSH settings `(a, a', b, b')` for which the spin Bell state
/// with perfect y-z correlations reaches `2 sqrt 2`.
pub const CHSH_CANONICAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4];

/// The CHSH combination `P(a,b) - P(a,b') + P(a',b) + P(a',b')`.
pub fn chsh_s(state: &PureState, a: f64, a_prime: f64, b: f64, b_prime: f64) -> Result<f64> {
    Ok(chsh_correlation(state, a, b)? - chsh_correlation(state, a, b_prime)?
        + chsh_correlation(state, a_prime, b)?
        + chsh_correlation(state, a_prime, b_prime)?)
}

/// Two-electron register with the spins in the given Bell state and both
/// modes on wire 0.
pub fn spin_bell_register(which: BellOutcome) -> Result<PureState> {
    let amps2 = which.amplitudes();
    let mut amps = vec![ZERO; 16];
    // Spin qubits are flat bits 0 and 2.
    amps[0] = amps2[0];
    amps[1] = amps2[1];
    amps[4] = amps2[2];
    amps[5] = amps2[3];
    PureState::from_amplitudes(2, amps)
}
