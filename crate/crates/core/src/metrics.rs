//! Entanglement and polarization figures of merit.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{C64, Matrix};
use crate::state::{PureState, QubitRef};

/// Von Neumann entropy in bits of the reduced state on `subset`.
///
/// One ebit means the subset is maximally entangled with the rest.
pub fn entanglement_entropy(state: &PureState, subset: &[QubitRef]) -> Result<f64> {
    let rho = state.reduced_density(subset)?;
    Ok(entropy_of_density(&rho))
}

/// `-sum lambda log2 lambda` over the spectrum, with `0 log 0 := 0`.
/// Tiny negative eigenvalues from floating-point noise are clipped.
pub fn entropy_of_density(rho: &Matrix) -> f64 {
    let (values, _) = rho.hermitian_eigen();
    let mut s = 0.0;
    for &w in &values {
        if w > 1e-15 {
            s -= w * w.log2();
        }
    }
    s
}

/// Wootters concurrence of a two-qubit density matrix.
///
/// Computed from the spin-flipped spectrum: the decreasingly sorted square
/// roots `lambda_i` of the eigenvalues of `rho rho~` give
/// `max(0, l1 - l2 - l3 - l4)`. The eigenvalues are obtained from the
/// Hermitian product `sqrt(rho) rho~ sqrt(rho)`, which shares them.
pub fn concurrence(rho: &Matrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(rho.dim(), 4));
    }
    if !rho.is_hermitian(1e-8) {
        return Err(Error::InvalidDensityMatrix);
    }
    if (rho.trace().re - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidDensityMatrix);
    }
    let (values, _) = rho.hermitian_eigen();
    if values[0] < -1e-8 {
        return Err(Error::InvalidDensityMatrix);
    }

    let yy = spin_flip_matrix();
    let rho_tilde = yy.mul(&rho.conjugate()).mul(&yy);
    let root = rho.hermitian_sqrt();
    let m = root.mul(&rho_tilde).mul(&root);
    let (mut spectrum, _) = m.hermitian_eigen();
    // Rank-deficient inputs leave noise-level eigenvalues whose square roots
    // would pollute the sum; clip relative to the leading eigenvalue.
    let floor = spectrum.iter().cloned().fold(0.0, f64::max) * 1e-12;
    for w in spectrum.iter_mut() {
        *w = if *w <= floor { 0.0 } else { w.sqrt() };
    }
    spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((spectrum[0] - spectrum[1] - spectrum[2] - spectrum[3]).max(0.0))
}

/// Concurrence of a pure two-qubit state `(a, b, c, d)`: `2 |ad - bc|`.
pub fn concurrence_pure(amps: &[C64; 4]) -> f64 {
    2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm()
}

fn spin_flip_matrix() -> Matrix {
    // sigma_y (x) sigma_y
    let mut m = Matrix::zeros(4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Result of fitting `p(theta) = a + b cos^2(theta - theta0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationFit {
    /// `(p_max - p_min) / (p_max + p_min)` of the fitted curve, in [0, 1].
    pub degree: f64,
    /// Fitted polarization angle, reduced to `[0, pi)`.
    pub theta0: f64,
    /// Root-mean-square misfit.
    pub residual: f64,
    /// Fitted baseline `a`.
    pub offset: f64,
    /// Fitted amplitude `b`, canonicalized to be nonnegative.
    pub amplitude: f64,
}

/// Least-squares fit of the orientable Stern-Gerlach response curve.
///
/// For each candidate `theta0` the optimal `(a, b)` follow from a closed-form
/// 2x2 normal-equation solve; `theta0` itself is located by a coarse grid
/// followed by golden-section refinement, both deterministic.
pub fn fit_polarization(samples: &[(f64, f64)]) -> Result<PolarizationFit> {
    let mut unique: Vec<f64> = Vec::new();
    for &(theta, _) in samples {
        if !unique.iter().any(|&u| (u - theta).abs() < 1e-9) {
            unique.push(theta);
        }
    }
    if samples.len() < 4 || unique.len() < 4 {
        return Err(Error::DegenerateFit);
    }

    let sse = |theta0: f64| linear_fit(samples, theta0).2;

    // cos^2 makes the objective pi-periodic; scan then refine.
    let grid = 64;
    let mut best = (0.0f64, f64::INFINITY);
    for i in 0..grid {
        let theta0 = PI * i as f64 / grid as f64;
        let err = sse(theta0);
        if err < best.1 {
            best = (theta0, err);
        }
    }
    let step = PI / grid as f64;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let golden = 0.5 * (3.0 - 5.0f64.sqrt());
    let (mut x1, mut x2) = (lo + golden * (hi - lo), hi - golden * (hi - lo));
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + golden * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - golden * (hi - lo);
            f2 = sse(x2);
        }
    }
    let theta0 = 0.5 * (lo + hi);
    let (a, b, err) = linear_fit(samples, theta0);

    // Canonical form: nonnegative amplitude, theta0 in [0, pi).
    let (a, b, mut theta0) = if b < 0.0 {
        (a + b, -b, theta0 + PI / 2.0)
    } else {
        (a, b, theta0)
    };
    theta0 = theta0.rem_euclid(PI);

    let p_max = a + b;
    let p_min = a;
    let denom = p_max + p_min;
    let degree = if denom.abs() < 1e-12 {
        0.0
    } else {
        ((p_max - p_min) / denom).clamp(0.0, 1.0)
    };
    Ok(PolarizationFit {
        degree,
        theta0,
        residual: (err / samples.len() as f64).sqrt(),
        offset: a,
        amplitude: b,
    })
}

/// Optimal `(a, b)` and the squared error for a fixed `theta0`.
fn linear_fit(samples: &[(f64, f64)], theta0: f64) -> (f64, f64, f64) {
    let n = samples.len() as f64;
    let (mut sc, mut scc, mut sp, mut scp) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(theta, p) in samples {
        let cv = (theta - theta0).cos().powi(2);
        sc += cv;
        scc += cv * cv;
        sp += p;
        scp += cv * p;
    }
    let det = n * scc - sc * sc;
    let (a, b) = if det.abs() < 1e-12 {
        (sp / n, 0.0)
    } else {
        ((scc * sp - sc * scp) / det, (n * scp - sc * sp) / det)
    };
    let mut err = 0.0;
    for &(theta, p) in samples {
        let fit = a + b * (theta - theta0).cos().powi(2);
        err += (fit - p) * (fit - p);
    }
    (a, b, err)
}
