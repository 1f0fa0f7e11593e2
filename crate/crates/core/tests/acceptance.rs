//! Acceptance suite: one test per advertised guarantee, each printing a
//! PASS line with the checked tolerance when it holds.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_state, random_unitary};
use spinnet_core::gates::{circuit_unitary, gate_unitary, verify_identities, Circuit, GateKind, GateOp};
use spinnet_core::hardware::{
    netlist_unitary, pbs_behavioral, pbs_equivalence_report, pbs_hardware_netlist,
    swap_sigma_k_netlist, SwapVariant,
};
use spinnet_core::linalg::{equiv_up_to_global_phase, global_phase_between, C64, Matrix, ZERO};
use spinnet_core::metrics::entanglement_entropy;
use spinnet_core::protocols::{
    chsh_correlation, chsh_s, entanglement_swapping, entanglement_transfer, hyper_entangler,
    mode_mode_entangler, spin_bell_register, spin_mode_entangler, stern_gerlach_p_up_polarized,
    stern_gerlach_unpolarized_p_up, BellOutcome, CHSH_CANONICAL_ANGLES,
    MODE_ENTANGLER_COUPLING,
};
use spinnet_core::state::{embed_unitary, PureState, QubitRef};
use spinnet_core::synthesis::{
    euler_reconstruct, euler_zxz, hardware_cost, lower_to_netlist, swap_sigma_k_circuit,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// 1. Every gate-set identity holds with its written phases at 1e-10.
#[test]
fn acceptance_01_identity_suite() {
    let report = verify_identities(1e-10);
    for check in &report.checks {
        assert!(
            check.passed,
            "identity '{}' failed with error {:e}",
            check.name, check.max_error
        );
    }
    assert!(report.all_passed());
    println!("PASS acceptance 01: six gate identities hold at 1e-10");
}

/// 2. The four-element PBS reproduces the routing table exactly and matches
///    CNOT(spin, mode) up to its documented branch-phase diagonal.
#[test]
fn acceptance_02_pbs_routing_and_equivalence() {
    let netlist = pbs_hardware_netlist();
    assert_eq!(netlist.elements.len(), 4);

    let report = pbs_equivalence_report(1e-10);
    for (input, p) in report.routing_probabilities.iter().enumerate() {
        assert!(
            (p - 1.0).abs() < 1e-10,
            "routing probability for input {input} is {p}"
        );
    }
    assert!(
        report.diagonal_equivalent,
        "hardware PBS must equal a branch-phase diagonal times CNOT(spin, mode)"
    );
    // The residual is the documented constant diagonal (1, i, -1, i).
    let u = netlist_unitary(&netlist).unwrap();
    let diag = Matrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 1.0)]);
    assert!(u.max_abs_diff(&diag.mul(&pbs_behavioral())) < 1e-10);
    println!("PASS acceptance 02: PBS routing exact at 1e-10, documented diagonal equivalence");
}

/// 3. Both SWAP(spin, mode) decompositions equal SWAP up to global phase;
///    their hardware realizations cost exactly 9 and 6 elements.
#[test]
fn acceptance_03_swap_decompositions_and_costs() {
    let swap = embed_unitary(
        2,
        &gate_unitary(GateKind::Swap, None).unwrap(),
        &[QubitRef::mode(0).flat(), QubitRef::spin(0).flat()],
    )
    .unwrap();
    for variant in [SwapVariant::PbsHeavy, SwapVariant::NotHeavy] {
        let u = circuit_unitary(&swap_sigma_k_circuit(variant)).unwrap();
        assert!(
            equiv_up_to_global_phase(&u, &swap, 1e-9).unwrap(),
            "{variant:?} circuit does not equal SWAP"
        );
    }
    assert_eq!(hardware_cost(&swap_sigma_k_netlist(SwapVariant::PbsHeavy)), 9);
    assert_eq!(hardware_cost(&swap_sigma_k_netlist(SwapVariant::NotHeavy)), 6);
    println!("PASS acceptance 03: SWAP decompositions at 1e-9, hardware costs 9 and 6");
}

/// 4. The spin-mode entangler maps |up;0> to (|up;0> + i|down;1>)/sqrt(2)
///    exactly, creating one ebit.
#[test]
fn acceptance_04_spin_mode_entangler() {
    let out = spin_mode_entangler(&PureState::new_register(1).unwrap(), 0).unwrap();
    assert!((out.amplitude(0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    assert!((out.amplitude(3) - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-12);
    assert!(out.amplitude(1).norm() < 1e-12);
    assert!(out.amplitude(2).norm() < 1e-12);
    let entropy = entanglement_entropy(&out, &[QubitRef::spin(0)]).unwrap();
    assert!((entropy - 1.0).abs() < 1e-10);
    println!("PASS acceptance 04: spin-mode entangler exact at 1e-12, entropy 1 ebit at 1e-10");
}

/// 5. At the derived coupling the mode-mode entangler emits i|Psi+> on the
///    modes with untouched spins.
#[test]
fn acceptance_05_mode_mode_entangler() {
    let result = mode_mode_entangler(MODE_ENTANGLER_COUPLING).unwrap();
    assert!(result.derived["bell_fidelity"] > 1.0 - 1e-10);
    assert!((result.derived["spin_up_up_population"] - 1.0).abs() < 1e-10);
    assert!(result.derived["spin_entropy_bits"].abs() < 1e-10);
    println!("PASS acceptance 05: mode-mode entangler Bell fidelity > 1 - 1e-10, spins untouched");
}

/// 6. Entanglement swapping over 10^4 seeded shots: every Bell outcome
///    lands in [0.23, 0.27] and every post-measurement spin pair is
///    maximally entangled.
#[test]
fn acceptance_06_entanglement_swapping_statistics() {
    let shots = 10_000usize;
    let mut counts = [0usize; 4];
    for seed in 0..shots {
        let result = entanglement_swapping(seed as u64).unwrap();
        counts[result.derived["outcome_index"] as usize] += 1;
        assert!(
            result.derived["spin_concurrence"] > 1.0 - 1e-9,
            "seed {seed}: concurrence {}",
            result.derived["spin_concurrence"]
        );
    }
    for (i, &n) in counts.iter().enumerate() {
        let f = n as f64 / shots as f64;
        assert!(
            (0.23..=0.27).contains(&f),
            "outcome {i} frequency {f} outside [0.23, 0.27]"
        );
    }
    println!("PASS acceptance 06: swapping outcome frequencies in [0.23, 0.27], concurrence > 1 - 1e-9");
}

/// 7. Entanglement transfer reproduces the exact state map and moves one
///    ebit from the modes to the spins.
#[test]
fn acceptance_07_entanglement_transfer() {
    let mut amps = vec![ZERO; 16];
    amps[0] = c(FRAC_1_SQRT_2, 0.0);
    amps[10] = c(FRAC_1_SQRT_2, 0.0);
    let input = PureState::from_amplitudes(2, amps).unwrap();
    let out = entanglement_transfer(&input).unwrap();

    let mut expect = vec![ZERO; 16];
    expect[0] = c(FRAC_1_SQRT_2, 0.0);
    expect[5] = c(FRAC_1_SQRT_2, 0.0);
    for (b, (got, want)) in out.amplitudes().iter().zip(expect.iter()).enumerate() {
        assert!((got - want).norm() < 1e-12, "basis {b}");
    }

    let mode_before = entanglement_entropy(&input, &[QubitRef::mode(0)]).unwrap();
    let spin_before = entanglement_entropy(&input, &[QubitRef::spin(0)]).unwrap();
    let mode_after = entanglement_entropy(&out, &[QubitRef::mode(0)]).unwrap();
    let spin_after = entanglement_entropy(&out, &[QubitRef::spin(0)]).unwrap();
    assert!((mode_before - 1.0).abs() < 1e-10 && mode_after.abs() < 1e-10);
    assert!(spin_before.abs() < 1e-10 && (spin_after - 1.0).abs() < 1e-10);
    println!("PASS acceptance 07: transfer exact at 1e-12, entropy bookkeeping at 1e-10");
}

/// 8. The hyper-entangler output is (|up up> + i|down down>)(|00> + i|11>)/2
///    with a clean spins-vs-modes cut and two redistributed ebits.
#[test]
fn acceptance_08_hyper_entangler() {
    let mut state = PureState::new_register(2).unwrap();
    state = spin_mode_entangler(&state, 0).unwrap();
    state = spin_mode_entangler(&state, 1).unwrap();
    let out = hyper_entangler(&state).unwrap();

    let mut expect = vec![ZERO; 16];
    expect[0] = c(0.5, 0.0);
    expect[5] = c(0.0, 0.5);
    expect[10] = c(0.0, 0.5);
    expect[15] = c(-0.5, 0.0);
    for (b, (got, want)) in out.amplitudes().iter().zip(expect.iter()).enumerate() {
        assert!((got - want).norm() < 1e-12, "basis {b}");
    }

    // Schmidt rank 1 across spins x modes: zero entropy and a unit top
    // eigenvalue of the reduced spin-pair state.
    let cut = entanglement_entropy(&out, &[QubitRef::spin(0), QubitRef::spin(1)]).unwrap();
    assert!(cut.abs() < 1e-10);
    let rho = out
        .reduced_density(&[QubitRef::spin(0), QubitRef::spin(1)])
        .unwrap();
    let (values, _) = rho.hermitian_eigen();
    assert!((values[3] - 1.0).abs() < 1e-10, "top eigenvalue {}", values[3]);

    let ebits = entanglement_entropy(&out, &[QubitRef::spin(0)]).unwrap()
        + entanglement_entropy(&out, &[QubitRef::mode(0)]).unwrap();
    assert!((ebits - 2.0).abs() < 1e-10);
    println!("PASS acceptance 08: hyper-entangler exact at 1e-12, rank-1 cut, 2 ebits at 1e-10");
}

/// 9. Orientable Stern-Gerlach: 37-angle sweep follows the half-angle
///    cosine law at 1e-9 (and the paper-angle view its cos^2 form);
///    unpolarized input sits at 1/2 to 1e-12.
#[test]
fn acceptance_09_stern_gerlach_sweep() {
    let theta0 = 0.3;
    let points = 37usize;
    let mut max_resid = 0.0f64;
    let mut half_resid = 0.0f64;
    for i in 0..points {
        let theta = 2.0 * PI * i as f64 / (points - 1) as f64;
        let p = stern_gerlach_p_up_polarized(theta, theta0);
        max_resid = max_resid.max((p - ((theta - theta0) / 2.0).cos().powi(2)).abs());

        // Half-angle view (the --paper-angle convention): device angle
        // t = theta/2 against cos^2(t - t0).
        let t = theta / 2.0;
        let t0 = theta0 / 2.0;
        half_resid = half_resid.max((p - (t - t0).cos().powi(2)).abs());

        let u = stern_gerlach_unpolarized_p_up(theta, theta0);
        assert!((u - 0.5).abs() < 1e-12, "unpolarized at {theta}: {u}");
    }
    assert!(max_resid < 1e-9, "axis-angle residual {max_resid:e}");
    assert!(half_resid < 1e-9, "half-angle residual {half_resid:e}");

    // The fitted curve recovers the polarization from the sweep data alone.
    let samples: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / (points - 1) as f64;
            (theta / 2.0, stern_gerlach_p_up_polarized(theta, theta0))
        })
        .collect();
    let fit = spinnet_core::metrics::fit_polarization(&samples).unwrap();
    assert!(fit.residual < 1e-9, "fit residual {:e}", fit.residual);
    assert!((fit.degree - 1.0).abs() < 1e-7);
    let dist = {
        let d = (fit.theta0 - theta0 / 2.0).rem_euclid(PI);
        d.min(PI - d)
    };
    assert!(dist < 1e-6, "fitted theta0 {}", fit.theta0);
    println!("PASS acceptance 09: Stern-Gerlach cosine law at 1e-9 over 37 angles, unpolarized flat at 1e-12");
}

/// 10. CHSH: the canonical settings reach 2 sqrt 2 on the spin Bell state
///     analytically; correlations stay within [-1, 1] on random inputs.
#[test]
fn acceptance_10_chsh() {
    let state = spin_bell_register(BellOutcome::PhiMinus).unwrap();
    let [a, ap, b, bp] = CHSH_CANONICAL_ANGLES;
    let s = chsh_s(&state, a, ap, b, bp).unwrap();
    assert!(
        (s - 2.0 * SQRT_2).abs() < 1e-10,
        "S = {s}, expected 2 sqrt 2"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for _ in 0..100 {
        let state = random_state(2, &mut rng);
        let n1 = (rng.gen::<f64>() - 0.5) * 2.0 * PI;
        let n2 = (rng.gen::<f64>() - 0.5) * 2.0 * PI;
        let p = chsh_correlation(&state, n1, n2).unwrap();
        assert!(p.abs() <= 1.0 + 1e-12, "correlation {p} out of range");
    }
    println!("PASS acceptance 10: CHSH S = 2 sqrt 2 at 1e-10, correlations bounded on 100 random inputs");
}

/// 11. Compiler round-trip: every supported gate survives lowering up to a
///     global phase at 1e-9, and Euler decomposition reconstructs 100
///     random SU(2) matrices below 1e-9.
#[test]
fn acceptance_11_compiler_round_trip() {
    let s0 = QubitRef::spin(0);
    let k0 = QubitRef::mode(0);
    let k1 = QubitRef::mode(1);
    let supported: Vec<(usize, GateOp)> = vec![
        (1, GateOp::rx(s0, 0.7)),
        (1, GateOp::rz(s0, -1.1)),
        (1, GateOp::not(s0)),
        (1, GateOp::p(s0, 0.9)),
        (1, GateOp::h(s0)),
        (1, GateOp::identity(s0)),
        (1, GateOp::rx(k0, 0.7)),
        (1, GateOp::rz(k0, -1.1)),
        (1, GateOp::not(k0)),
        (1, GateOp::p(k0, 0.9)),
        (1, GateOp::h(k0)),
        (1, GateOp::cnot(s0, k0)),
        (1, GateOp::cnot(k0, s0)),
        (1, GateOp::cphase(s0, k0, 1.3)),
        (1, GateOp::cphase(k0, s0, -0.5)),
        (1, GateOp::swap(s0, k0)),
        (2, GateOp::cphase(k0, k1, 0.8)),
        (2, GateOp::cnot(k0, k1)),
        (2, GateOp::cnot(k1, k0)),
        (2, GateOp::swap(k0, k1)),
    ];
    for (n, op) in supported {
        let circuit = Circuit::new(n, vec![op.clone()]).unwrap();
        let ideal = circuit_unitary(&circuit).unwrap();
        let lowered = netlist_unitary(&lower_to_netlist(&circuit).unwrap()).unwrap();
        assert!(
            global_phase_between(&lowered, &ideal, 1e-9).unwrap().is_some(),
            "lowering of {:?} on {:?} drifted",
            op.kind,
            op.targets
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for i in 0..100 {
        let u = random_unitary(2, &mut rng);
        let angles = euler_zxz(&u).unwrap();
        let err = euler_reconstruct(&angles).max_abs_diff(&u);
        assert!(err < 1e-9, "case {i}: reconstruction error {err:e}");
    }
    println!("PASS acceptance 11: lowering round-trips at 1e-9 for all supported gates; Euler on 100 random unitaries at 1e-9");
}

/// 12. Gate embedding matches the explicit Kronecker construction on 50
///     random draws over registers of up to three electrons.
#[test]
fn acceptance_12_embedding_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut max_err = 0.0f64;
    for case in 0..50 {
        let n_electrons = rng.gen_range(1..=3usize);
        let n_qubits = 2 * n_electrons;
        let state = random_state(n_electrons, &mut rng);

        let two_qubit = rng.gen::<bool>() && n_qubits >= 2;
        let (gate, flats) = if two_qubit {
            let f0 = rng.gen_range(0..n_qubits);
            let mut f1 = rng.gen_range(0..n_qubits);
            while f1 == f0 {
                f1 = rng.gen_range(0..n_qubits);
            }
            (random_unitary(4, &mut rng), vec![f0, f1])
        } else {
            (random_unitary(2, &mut rng), vec![rng.gen_range(0..n_qubits)])
        };

        // Explicit construction: permute each factor into a full Kronecker
        // product, qubit j of the register taken little-endian.
        let expanded = embed_unitary(n_qubits, &gate, &flats).unwrap();
        let manual = kron_oracle(n_qubits, &gate, &flats);
        max_err = max_err.max(expanded.max_abs_diff(&manual));

        // And the state path agrees with the matrix path.
        let refs: Vec<QubitRef> = flats
            .iter()
            .map(|&f| {
                if f % 2 == 0 {
                    QubitRef::spin(f / 2)
                } else {
                    QubitRef::mode(f / 2)
                }
            })
            .collect();
        let via_gate = state.apply_gate(&gate, &refs).unwrap();
        let mut via_matrix = vec![ZERO; state.dim()];
        for (r, out) in via_matrix.iter_mut().enumerate() {
            for col in 0..state.dim() {
                *out += manual[(r, col)] * state.amplitude(col);
            }
        }
        for (b, (a, m)) in via_gate.amplitudes().iter().zip(via_matrix.iter()).enumerate() {
            let d = (a - m).norm();
            assert!(d < 1e-12, "case {case} basis {b}: diff {d:e}");
        }
        assert!((via_gate.norm() - 1.0).abs() < 1e-12);
    }
    assert!(max_err < 1e-12, "max embedding error {max_err:e}");
    println!("PASS acceptance 12: embedding matches Kronecker oracle at 1e-12 on 50 draws");
}

/// Independent construction of an embedded gate from explicit Kronecker
/// products: identity factors folded around the gate, with adjacent-swap
/// conjugation to reach arbitrary target slots. Shares no index arithmetic
/// with the implementation under test.
fn kron_oracle(n_qubits: usize, gate: &Matrix, flats: &[usize]) -> Matrix {
    let id2 = Matrix::identity(2);
    if flats.len() == 1 {
        // high (x) ... (x) U at slot j (x) ... (x) low
        let mut m = Matrix::identity(1);
        for q in (0..n_qubits).rev() {
            m = m.kron(if q == flats[0] { gate } else { &id2 });
        }
        return m;
    }

    // Two targets: bring them to slots (0, 1) with adjacent transpositions,
    // apply high-identities (x) gate, and undo the permutation.
    let swap4 = gate_unitary(GateKind::Swap, None).unwrap();
    let adjacent_swap = |j: usize| -> Matrix {
        let mut m = Matrix::identity(1);
        let mut q = n_qubits;
        while q > 0 {
            if q - 1 == j + 1 {
                m = m.kron(&swap4);
                q -= 2;
            } else {
                m = m.kron(&id2);
                q -= 1;
            }
        }
        m
    };

    // positions[p] = which logical wire currently sits on slot p.
    let mut positions: Vec<usize> = (0..n_qubits).collect();
    let mut perm = Matrix::identity(1 << n_qubits);
    let move_to = |positions: &mut Vec<usize>, perm: &mut Matrix, wire: usize, slot: usize| {
        let mut at = positions.iter().position(|&w| w == wire).unwrap();
        while at > slot {
            let step = adjacent_swap(at - 1);
            *perm = step.mul(perm);
            positions.swap(at, at - 1);
            at -= 1;
        }
        while at < slot {
            let step = adjacent_swap(at);
            *perm = step.mul(perm);
            positions.swap(at, at + 1);
            at += 1;
        }
    };
    move_to(&mut positions, &mut perm, flats[0], 0);
    move_to(&mut positions, &mut perm, flats[1], 1);

    let mut core = Matrix::identity(1);
    for _ in 0..(n_qubits - 2) {
        core = core.kron(&id2);
    }
    let core = core.kron(gate);
    perm.adjoint().mul(&core).mul(&perm)
}
