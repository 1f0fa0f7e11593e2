//! Electron registers as dense state vectors.
//!
//! Each electron carries two qubits: a spin qubit and a mode (which-wire)
//! qubit. Qubits are numbered flat as `2 * electron + dof`, with spin at the
//! even slot and mode at the odd one, and basis indices are little-endian in
//! that flat numbering (qubit 0 is the least significant bit). Spin up and
//! mode 0 encode bit value 0; spin down and mode 1 encode bit value 1.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, Matrix, ONE, ZERO};

/// Dense registers above this size are refused outright.
pub const MAX_ELECTRONS: usize = 10;

/// Which degree of freedom of an electron a qubit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dof {
    Spin,
    Mode,
}

/// One qubit of one electron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitRef {
    pub electron: usize,
    pub dof: Dof,
}

impl QubitRef {
    pub fn spin(electron: usize) -> Self {
        QubitRef {
            electron,
            dof: Dof::Spin,
        }
    }

    pub fn mode(electron: usize) -> Self {
        QubitRef {
            electron,
            dof: Dof::Mode,
        }
    }

    /// Flat index into the register: `2 * electron + (0 spin | 1 mode)`.
    pub fn flat(self) -> usize {
        2 * self.electron + match self.dof {
            Dof::Spin => 0,
            Dof::Mode => 1,
        }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dof {
            Dof::Spin => write!(f, "s{}", self.electron),
            Dof::Mode => write!(f, "k{}", self.electron),
        }
    }
}

/// Normalized pure state of an `n`-electron register (4^n amplitudes).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_electrons: usize,
    amps: Vec<C64>,
}

/// Outcome of one projective measurement, with everything needed to replay it.
#[derive(Clone, Debug)]
pub struct MeasurementRecord {
    /// Qubits measured, in the order their bits appear in `outcome`.
    pub measured: Vec<QubitRef>,
    /// One bit per measured qubit; `outcome[j]` belongs to `measured[j]`.
    pub outcome: Vec<bool>,
    /// Born probability of this outcome before renormalization.
    pub probability: f64,
    /// Renormalized projection of the input state.
    pub post_state: PureState,
    /// Seed that produced the outcome.
    pub seed: u64,
}

impl MeasurementRecord {
    /// Outcome bits packed little-endian: bit `j` is `measured[j]`.
    pub fn outcome_index(&self) -> usize {
        self.outcome
            .iter()
            .enumerate()
            .map(|(j, &b)| (b as usize) << j)
            .sum()
    }
}

impl PureState {
    /// Product state with every electron in spin-up, mode 0.
    pub fn new_register(n_electrons: usize) -> Result<Self> {
        if n_electrons == 0 {
            return Err(Error::EmptyRegister);
        }
        if n_electrons > MAX_ELECTRONS {
            return Err(Error::RegisterTooLarge(n_electrons));
        }
        let mut amps = vec![ZERO; 1 << (2 * n_electrons)];
        amps[0] = ONE;
        Ok(PureState { n_electrons, amps })
    }

    /// Wraps raw amplitudes, enforcing length 4^n and unit norm within 1e-12.
    pub fn from_amplitudes(n_electrons: usize, amps: Vec<C64>) -> Result<Self> {
        if n_electrons == 0 {
            return Err(Error::EmptyRegister);
        }
        if n_electrons > MAX_ELECTRONS {
            return Err(Error::RegisterTooLarge(n_electrons));
        }
        let dim = 1usize << (2 * n_electrons);
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(amps.len(), dim));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::UnnormalizedState(norm_sq));
        }
        Ok(PureState { n_electrons, amps })
    }

    /// Computational basis state from a basis index.
    pub fn basis_state(n_electrons: usize, index: usize) -> Result<Self> {
        let mut state = PureState::new_register(n_electrons)?;
        if index >= state.dim() {
            return Err(Error::BasisIndexOutOfRange(index, state.dim()));
        }
        state.amps[0] = ZERO;
        state.amps[index] = ONE;
        Ok(state)
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_electrons
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, basis: usize) -> C64 {
        self.amps[basis]
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_targets(&self, targets: &[QubitRef]) -> Result<()> {
        for (i, t) in targets.iter().enumerate() {
            if t.electron >= self.n_electrons {
                return Err(Error::QubitOutOfRange(*t, self.n_electrons));
            }
            if targets[..i].contains(t) {
                return Err(Error::DuplicateTargets);
            }
        }
        Ok(())
    }

    /// Applies `gate` to the given qubits, identity elsewhere.
    ///
    /// `targets[0]` is the least significant bit of the gate's own basis, so a
    /// two-qubit gate written as `|hi lo>` blocks takes its `lo` qubit first.
    pub fn apply_gate(&self, gate: &Matrix, targets: &[QubitRef]) -> Result<PureState> {
        let m = targets.len();
        if m == 0 || m > 2 {
            return Err(Error::UnsupportedArity(m));
        }
        self.check_targets(targets)?;
        let gdim = 1usize << m;
        if gate.dim() != gdim {
            return Err(Error::DimensionMismatch(gate.dim(), gdim));
        }
        if !gate.is_unitary(1e-10) {
            return Err(Error::NotUnitary(1e-10));
        }

        let flats: Vec<usize> = targets.iter().map(|t| t.flat()).collect();
        let target_mask: usize = flats.iter().map(|&f| 1usize << f).sum();
        let mut out = vec![ZERO; self.amps.len()];
        for rest in 0..self.amps.len() {
            if rest & target_mask != 0 {
                continue;
            }
            for g_out in 0..gdim {
                let b_out = compose(rest, &flats, g_out);
                let mut acc = ZERO;
                for g_in in 0..gdim {
                    let entry = gate[(g_out, g_in)];
                    if entry == ZERO {
                        continue;
                    }
                    acc += entry * self.amps[compose(rest, &flats, g_in)];
                }
                out[b_out] = acc;
            }
        }
        Ok(PureState {
            n_electrons: self.n_electrons,
            amps: out,
        })
    }

    /// Projective measurement of `targets` in the computational basis.
    ///
    /// The outcome is sampled from the Born distribution with a ChaCha8 stream
    /// seeded by `seed`, so identical inputs reproduce identical records.
    /// Measuring only mode qubits leaves any spin superposition riding on the
    /// surviving branch untouched.
    pub fn measure(&self, targets: &[QubitRef], seed: u64) -> Result<MeasurementRecord> {
        if targets.is_empty() {
            return Err(Error::EmptyMeasurement);
        }
        self.check_targets(targets)?;
        let flats: Vec<usize> = targets.iter().map(|t| t.flat()).collect();
        let m = flats.len();

        let mut probs = vec![0.0f64; 1 << m];
        for (b, a) in self.amps.iter().enumerate() {
            probs[extract(b, &flats)] += a.norm_sqr();
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: f64 = rng.gen();
        // Fall back to the most likely outcome if rounding leaves the
        // cumulative sum a hair short of u; never select a zero branch.
        let mut picked = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(o, _)| o)
            .unwrap();
        let mut cumulative = 0.0;
        for (o, &p) in probs.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                picked = o;
                break;
            }
        }
        let probability = probs[picked];

        let inv = 1.0 / probability.sqrt();
        let amps: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                if extract(b, &flats) == picked {
                    a * inv
                } else {
                    ZERO
                }
            })
            .collect();

        Ok(MeasurementRecord {
            measured: targets.to_vec(),
            outcome: (0..m).map(|j| picked >> j & 1 == 1).collect(),
            probability,
            post_state: PureState {
                n_electrons: self.n_electrons,
                amps,
            },
            seed,
        })
    }

    /// Partial trace over everything outside `keep`.
    ///
    /// The reduced basis is little-endian in the order of `keep`: bit `j` of a
    /// reduced index is the qubit `keep[j]`.
    pub fn reduced_density(&self, keep: &[QubitRef]) -> Result<Matrix> {
        if keep.is_empty() || keep.len() >= self.n_qubits() {
            return Err(Error::InvalidSubset);
        }
        self.check_targets(keep)?;
        let flats: Vec<usize> = keep.iter().map(|t| t.flat()).collect();
        let keep_mask: usize = flats.iter().map(|&f| 1usize << f).sum();
        let kdim = 1usize << flats.len();

        let mut rho = Matrix::zeros(kdim);
        for rest in 0..self.amps.len() {
            if rest & keep_mask != 0 {
                continue;
            }
            for r in 0..kdim {
                let ar = self.amps[compose(rest, &flats, r)];
                if ar == ZERO {
                    continue;
                }
                for c in 0..kdim {
                    rho[(r, c)] += ar * self.amps[compose(rest, &flats, c)].conj();
                }
            }
        }
        Ok(rho)
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`; equals 1 iff the states match up to a global phase.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Max-abs amplitude difference after aligning global phase against the
    /// largest amplitude of `other`.
    pub fn max_diff_up_to_phase(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let (mut best, mut best_norm) = (0usize, -1.0f64);
        for (i, a) in other.amps.iter().enumerate() {
            if a.norm() > best_norm {
                best_norm = a.norm();
                best = i;
            }
        }
        let phase = (self.amps[best] / other.amps[best]).arg();
        let rot = C64::from_polar(1.0, phase);
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b * rot).norm())
            .fold(0.0, f64::max))
    }
}

/// Inserts the bits of `sub` (little-endian over `flats`) into `rest`.
fn compose(rest: usize, flats: &[usize], sub: usize) -> usize {
    let mut b = rest;
    for (j, &f) in flats.iter().enumerate() {
        b |= ((sub >> j) & 1) << f;
    }
    b
}

/// Gathers the bits of `basis` at `flats` into a little-endian sub-index.
fn extract(basis: usize, flats: &[usize]) -> usize {
    flats
        .iter()
        .enumerate()
        .map(|(j, &f)| ((basis >> f) & 1) << j)
        .sum()
}

/// Expands `gate` on the listed flat qubit slots to a full register unitary.
///
/// Same index convention as [`PureState::apply_gate`]: `flats[0]` carries the
/// gate's least significant bit.
pub fn embed_unitary(n_qubits: usize, gate: &Matrix, flats: &[usize]) -> Result<Matrix> {
    let m = flats.len();
    let gdim = 1usize << m;
    if gate.dim() != gdim {
        return Err(Error::DimensionMismatch(gate.dim(), gdim));
    }
    for (i, &f) in flats.iter().enumerate() {
        if f >= n_qubits {
            return Err(Error::QubitOutOfRange(
                QubitRef {
                    electron: f / 2,
                    dof: if f % 2 == 0 { Dof::Spin } else { Dof::Mode },
                },
                n_qubits / 2,
            ));
        }
        if flats[..i].contains(&f) {
            return Err(Error::DuplicateTargets);
        }
    }
    let dim = 1usize << n_qubits;
    let target_mask: usize = flats.iter().map(|&f| 1usize << f).sum();
    let mut out = Matrix::zeros(dim);
    for rest in 0..dim {
        if rest & target_mask != 0 {
            continue;
        }
        for g_out in 0..gdim {
            for g_in in 0..gdim {
                let entry = gate[(g_out, g_in)];
                if entry == ZERO {
                    continue;
                }
                out[(compose(rest, flats, g_out), compose(rest, flats, g_in))] = entry;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    fn amp(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn new_register_is_all_up_mode_zero() {
        let s = PureState::new_register(1).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);

        let s2 = PureState::new_register(2).unwrap();
        assert_eq!(s2.dim(), 16);
        assert_eq!(s2.amplitude(0), ONE);
        assert!((s2.norm() - 1.0).abs() < 1e-15);

        let s3 = PureState::new_register(3).unwrap();
        assert!((s3.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_and_oversized_registers_are_rejected() {
        assert!(matches!(PureState::new_register(0), Err(Error::EmptyRegister)));
        assert!(matches!(
            PureState::new_register(MAX_ELECTRONS + 1),
            Err(Error::RegisterTooLarge(_))
        ));
    }

    #[test]
    fn flat_indexing_is_a_bijection() {
        let mut seen = [false; 8];
        for e in 0..4 {
            for dof in [Dof::Spin, Dof::Mode] {
                let f = QubitRef { electron: e, dof }.flat();
                assert!(!seen[f]);
                seen[f] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn not_on_spin_flips_spin_bit() {
        let not = Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        let s = PureState::new_register(1).unwrap();
        let out = s.apply_gate(&not, &[QubitRef::spin(0)]).unwrap();
        // spin down, mode 0 is basis index 1
        assert_eq!(out.amplitude(1), ONE);
    }

    #[test]
    fn gate_application_rejects_bad_input() {
        let s = PureState::new_register(1).unwrap();
        let not = Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        assert!(matches!(
            s.apply_gate(&not, &[QubitRef::spin(3)]),
            Err(Error::QubitOutOfRange(..))
        ));
        let skew = Matrix::from_rows(&[&[ONE, ONE], &[ZERO, ONE]]);
        assert!(matches!(
            s.apply_gate(&skew, &[QubitRef::spin(0)]),
            Err(Error::NotUnitary(_))
        ));
        let cnot = Matrix::identity(4);
        assert!(matches!(
            s.apply_gate(&cnot, &[QubitRef::spin(0), QubitRef::spin(0)]),
            Err(Error::DuplicateTargets)
        ));
    }

    /// (|up;0> + i|down;1>)/sqrt(2): indices 0 and 3 of a one-electron register.
    fn entangled_pair() -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_amplitudes(1, vec![amp(r, 0.0), ZERO, ZERO, amp(0.0, r)]).unwrap()
    }

    #[test]
    fn mode_measurement_collapses_born_branch() {
        let s = entangled_pair();
        for seed in 0..20u64 {
            let rec = s.measure(&[QubitRef::mode(0)], seed).unwrap();
            assert!((rec.probability - 0.5).abs() < 1e-12);
            if rec.outcome == vec![false] {
                assert!((rec.post_state.amplitude(0) - ONE).norm() < 1e-12);
            } else {
                // phase i survives renormalization
                assert!((rec.post_state.amplitude(3) - I).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_outcome_measured_with_probability_one() {
        let s = PureState::basis_state(1, 3).unwrap(); // |down;1>
        let rec = s.measure(&[QubitRef::spin(0)], 42).unwrap();
        assert_eq!(rec.outcome, vec![true]);
        assert!((rec.probability - 1.0).abs() < 1e-12);
        assert_eq!(rec.post_state.amplitudes(), s.amplitudes());
    }

    #[test]
    fn same_seed_same_outcome() {
        let s = entangled_pair();
        let a = s.measure(&[QubitRef::mode(0)], 7).unwrap();
        let b = s.measure(&[QubitRef::mode(0)], 7).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.post_state.amplitudes(), b.post_state.amplitudes());
    }

    #[test]
    fn measurement_statistics_match_born_rule() {
        let s = entangled_pair();
        let mut ones = 0usize;
        let shots = 10_000;
        for seed in 0..shots {
            let rec = s.measure(&[QubitRef::mode(0)], seed as u64).unwrap();
            if rec.outcome[0] {
                ones += 1;
            }
        }
        let freq = ones as f64 / shots as f64;
        assert!((0.48..=0.52).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn mode_measurement_is_non_absorbing_for_spin() {
        // Spin superposition identical on both mode branches.
        let (alpha, beta) = (amp(0.6, 0.0), amp(0.0, 0.8));
        let c0 = amp(0.28, 0.0);
        let c1 = (1.0f64 - c0.norm_sqr()).sqrt();
        let amps = vec![alpha * c0, beta * c0, alpha * c1, beta * c1];
        let s = PureState::from_amplitudes(1, amps).unwrap();

        let rec = s.measure(&[QubitRef::mode(0)], 3).unwrap();
        let rho = rec.post_state.reduced_density(&[QubitRef::spin(0)]).unwrap();
        // Expected pure projector |chi><chi| for chi = alpha|up> + beta|down>.
        let expect = Matrix::from_rows(&[
            &[alpha * alpha.conj(), alpha * beta.conj()],
            &[beta * alpha.conj(), beta * beta.conj()],
        ]);
        assert!(rho.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn reduced_density_of_entangled_pair_is_maximally_mixed() {
        let s = entangled_pair();
        let rho = s.reduced_density(&[QubitRef::spin(0)]).unwrap();
        let half = amp(0.5, 0.0);
        assert!((rho[(0, 0)] - half).norm() < 1e-12);
        assert!((rho[(1, 1)] - half).norm() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_density_of_product_state_is_projector() {
        let s = PureState::new_register(1).unwrap();
        let rho = s.reduced_density(&[QubitRef::spin(0)]).unwrap();
        assert!((rho[(0, 0)] - ONE).norm() < 1e-12);
        assert!(rho[(1, 1)].norm() < 1e-12);
    }

    #[test]
    fn reduced_density_rejects_improper_subsets() {
        let s = PureState::new_register(1).unwrap();
        assert!(matches!(s.reduced_density(&[]), Err(Error::InvalidSubset)));
        assert!(matches!(
            s.reduced_density(&[QubitRef::spin(0), QubitRef::mode(0)]),
            Err(Error::InvalidSubset)
        ));
    }

    #[test]
    fn embed_matches_manual_kron() {
        // X on qubit 0 of two qubits = I (x) X in math (high (x) low) order.
        let x = Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]);
        let embedded = embed_unitary(2, &x, &[0]).unwrap();
        let manual = Matrix::identity(2).kron(&x);
        assert!(embedded.max_abs_diff(&manual) < 1e-15);
    }
}
