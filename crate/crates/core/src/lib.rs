//! Simulation and compilation for spintronic quantum networks.
//!
//! Flying electrons in pairs of quantum wires carry two qubits each: the spin
//! and the wire index (mode). This crate provides
//!
//! * a dense state-vector simulator over such registers,
//! * the abstract gate set with its defining identities,
//! * the physical element set (beam splitters, Aharonov-Bohm phases, Rashba
//!   regions, Coulomb couplers, detectors) and its compilation to unitaries,
//! * a two-way compiler between the layers (Euler decomposition, rewrite
//!   rules, gate-to-netlist lowering),
//! * the entanglement protocols built from those pieces, and
//! * the entanglement and polarization metrics used to score them.
//!
//! Conventions are fixed once, in [`state`] (basis encoding) and [`gates`]
//! (rotation sign convention `R(theta) = e^{i theta sigma}`); everything else
//! follows from those.
//!
//! ```
//! use spinnet_core::metrics::entanglement_entropy;
//! use spinnet_core::protocols::spin_mode_entangler;
//! use spinnet_core::state::{PureState, QubitRef};
//!
//! // One electron in spin-up on wire 0, pushed through the entangler:
//! // a balanced splitter and a spin flip on the 1-mode wire.
//! let register = PureState::new_register(1).unwrap();
//! let entangled = spin_mode_entangler(&register, 0).unwrap();
//!
//! // Its spin and mode now share exactly one ebit.
//! let ebits = entanglement_entropy(&entangled, &[QubitRef::spin(0)]).unwrap();
//! assert!((ebits - 1.0).abs() < 1e-10);
//! ```

pub mod error;
pub mod gates;
pub mod hardware;
pub mod linalg;
pub mod metrics;
pub mod protocols;
pub mod state;
pub mod synthesis;

pub use error::{Error, Result};
pub use gates::{circuit_unitary, gate_unitary, verify_identities, Circuit, GateKind, GateOp};
pub use hardware::{
    apply_element, element_unitary, netlist_unitary, pbs_behavioral, pbs_equivalence_report,
    pbs_hardware_netlist, physical_to_angle, run_netlist, swap_sigma_k_netlist, HardwareElement,
    HardwareParams, Netlist,
};
pub use linalg::{equiv_up_to_global_phase, global_phase_between, Matrix, C64};
pub use metrics::{concurrence, entanglement_entropy, fit_polarization, PolarizationFit};
pub use protocols::{
    bell_measure, chsh_correlation, entanglement_swapping, entanglement_transfer,
    hyper_entangler, mode_mode_entangler, spin_mode_entangler, stern_gerlach_p_up, BellOutcome,
    ProtocolResult,
};
pub use state::{Dof, MeasurementRecord, PureState, QubitRef};
pub use synthesis::{
    euler_zxz, hardware_cost, lower_to_netlist, peephole_rewrite, swap_sigma_k_circuit,
    EulerAngles, RewriteRule, SwapVariant,
};
