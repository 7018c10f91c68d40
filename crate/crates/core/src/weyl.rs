//! The canonical maximally entangled basis of `d ⊗ d` and the Weyl
//! operators that generate it from `|Ψ₀₀⟩`.
//!
//! With `ω = exp(2πi/d)`:
//!
//! * `|Ψ_nm⟩ = (1/√d) Σ_j ω^{jn} |j⟩ ⊗ |(j+m) mod d⟩`
//! * `U_nm = Σ_j ω^{jn} |j⟩⟨(j+m) mod d|`, so `(U_nm ⊗ I)|Ψ₀₀⟩ = |Ψ_nm⟩`
//! * `V_nm = (U_{(d−n) mod d, m})†`, so `(I ⊗ V_nm)|Ψ₀₀⟩ = |Ψ_nm⟩` and
//!   `V_nm|j⟩ = ω^{jn}|(j+m) mod d⟩`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{root_of_unity, ComplexMatrix, LinalgError, StateVector, C64, OPERATOR_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeylError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("index ({n},{m}) out of range for d = {d}")]
    IndexOutOfRange { d: usize, n: usize, m: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Label `(n, m)` of a canonical maximally entangled state in `d ⊗ d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BellIndex {
    d: usize,
    n: usize,
    m: usize,
}

impl BellIndex {
    pub fn new(d: usize, n: usize, m: usize) -> Result<Self, WeylError> {
        if d < 2 {
            return Err(WeylError::InvalidDimension(d));
        }
        if n >= d || m >= d {
            return Err(WeylError::IndexOutOfRange { d, n, m });
        }
        Ok(Self { d, n, m })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Position in row-major `(n, m)` order.
    pub fn position(&self) -> usize {
        self.n * self.d + self.m
    }

    /// Inverse of [`BellIndex::position`].
    pub fn from_position(d: usize, position: usize) -> Result<Self, WeylError> {
        if d < 2 {
            return Err(WeylError::InvalidDimension(d));
        }
        Self::new(d, position / d, position % d)
    }

    /// All `d²` indices in row-major order.
    pub fn all(d: usize) -> impl Iterator<Item = BellIndex> {
        (0..d * d).map(move |p| BellIndex { d, n: p / d, m: p % d })
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Phase `exp(2πi·numerator/modulus)` with the numerator reduced mod `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylPhase {
    numerator: usize,
    modulus: usize,
}

impl WeylPhase {
    pub fn new(numerator: i64, modulus: usize) -> Self {
        Self {
            numerator: numerator.rem_euclid(modulus as i64) as usize,
            modulus,
        }
    }

    pub fn numerator(&self) -> usize {
        self.numerator
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn to_complex(&self) -> C64 {
        root_of_unity(self.modulus, self.numerator as i64)
    }
}

fn omega_pow(d: usize, k: usize) -> C64 {
    root_of_unity(d, k as i64)
}

/// `U_nm = Σ_j ω^{jn} |j⟩⟨(j+m) mod d|`.
pub fn weyl_u(idx: BellIndex) -> ComplexMatrix {
    let BellIndex { d, n, m } = idx;
    let mut u = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        u[(j, (j + m) % d)] = omega_pow(d, (j * n) % d);
    }
    u
}

/// `V_nm = (U_{(d−n) mod d, m})†`.
pub fn weyl_v(idx: BellIndex) -> ComplexMatrix {
    let BellIndex { d, n, m } = idx;
    weyl_u(BellIndex { d, n: (d - n) % d, m }).adjoint()
}

/// `|Ψ_nm⟩` on dims `[d, d]`.
pub fn bell_state(idx: BellIndex) -> StateVector {
    let BellIndex { d, n, m } = idx;
    let amp = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for j in 0..d {
        amps[j * d + (j + m) % d] = omega_pow(d, (j * n) % d) * amp;
    }
    StateVector::new(vec![d, d], amps).expect("canonical states are normalised")
}

fn same_dimension(a: BellIndex, b: BellIndex) -> Result<usize, WeylError> {
    if a.d != b.d {
        return Err(WeylError::DimensionMismatch(a.d, b.d));
    }
    Ok(a.d)
}

/// `U_a (U_b)† = phase · U_c` with phase `exp[2πi(m_b − m_a) n_b / d]` and
/// `c = (n_a − n_b, m_a − m_b) mod d`.
pub fn compose_u(a: BellIndex, b: BellIndex) -> Result<(WeylPhase, BellIndex), WeylError> {
    let d = same_dimension(a, b)?;
    let phase = WeylPhase::new((b.m as i64 - a.m as i64) * b.n as i64, d);
    let idx = BellIndex {
        d,
        n: (d + a.n - b.n) % d,
        m: (d + a.m - b.m) % d,
    };
    Ok((phase, idx))
}

/// `V_a (V_b)† = phase · V_c` with phase `exp[2πi(n_b − n_a) m_b / d]` and
/// `c = (n_a − n_b, m_a − m_b) mod d`.
pub fn compose_v(a: BellIndex, b: BellIndex) -> Result<(WeylPhase, BellIndex), WeylError> {
    let d = same_dimension(a, b)?;
    let phase = WeylPhase::new((b.n as i64 - a.n as i64) * b.m as i64, d);
    let idx = BellIndex {
        d,
        n: (d + a.n - b.n) % d,
        m: (d + a.m - b.m) % d,
    };
    Ok((phase, idx))
}

/// `|Tr(v1† v2)| ≤ 1e−10`; equivalent to orthogonality of
/// `(I ⊗ v1)|Ψ₀₀⟩` and `(I ⊗ v2)|Ψ₀₀⟩`.
pub fn trace_orthogonal(v1: &ComplexMatrix, v2: &ComplexMatrix) -> Result<bool, WeylError> {
    if !v1.is_square() || v1.rows() != v2.rows() || v1.cols() != v2.cols() {
        return Err(WeylError::DimensionMismatch(v1.rows(), v2.rows()));
    }
    let tr = v1.adjoint().matmul(v2)?.trace();
    Ok(tr.norm() <= OPERATOR_TOL)
}

/// `(I ⊗ v)|Ψ₀₀⟩` for an arbitrary operator `v` on the second factor.
pub fn twisted_reference(v: &ComplexMatrix) -> Result<StateVector, WeylError> {
    let d = v.rows();
    if d < 2 || !v.is_square() {
        return Err(WeylError::InvalidDimension(d));
    }
    let reference = bell_state(BellIndex { d, n: 0, m: 0 });
    let op = crate::linalg::kron(&ComplexMatrix::identity(d), v);
    Ok(reference.apply(&op)?)
}

/// Parameters of a pair of orthogonal two-qubit maximally entangled states
/// `(|00'⟩ + e^{iθ}|11'⟩)/√2` and `(|01'⟩ + e^{iδ}|10'⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitPair {
    pub theta: f64,
    pub delta: f64,
}

/// Local unitaries and phases mapping the canonical two-qubit basis onto
/// the four-state extension of a [`TwoQubitPair`].
#[derive(Clone, Debug)]
pub struct Canonicalization {
    pub u_a: ComplexMatrix,
    pub v_b: ComplexMatrix,
    /// `phases[k]` multiplies `(U_A ⊗ V_B)|Ψ⟩` for `Ψ` in the order
    /// `Ψ₀₀, Ψ₀₁, Ψ₁₀, Ψ₁₁`.
    pub phases: [C64; 4],
}

/// The four states `ψ₁..ψ₄` generated by `pair` (plus/minus variants of
/// each of the two members), in the order matched by
/// [`two_qubit_canonicalize`].
pub fn two_qubit_family(pair: TwoQubitPair) -> [StateVector; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(s, 0.0);
    let et = C64::from_polar(s, pair.theta);
    let ed = C64::from_polar(s, pair.delta);
    let build = |amps: [C64; 4]| StateVector::new(vec![2, 2], amps.to_vec()).expect("unit norm");
    [
        build([one, zero, zero, et]),
        build([zero, one, ed, zero]),
        build([one, zero, zero, -et]),
        build([zero, one, -ed, zero]),
    ]
}

/// Solves `α + β = θ`, `β − α = δ` and returns `U_A = diag(1, e^{iβ})`,
/// `V_B = diag(1, e^{iα})` together with the phases `(1, e^{−iα}, 1, e^{−iα})`.
pub fn two_qubit_canonicalize(pair: TwoQubitPair) -> Canonicalization {
    let beta = (pair.theta + pair.delta) / 2.0;
    let alpha = (pair.theta - pair.delta) / 2.0;
    let one = C64::new(1.0, 0.0);
    let u_a = ComplexMatrix::from_diagonal(&[one, C64::from_polar(1.0, beta)]);
    let v_b = ComplexMatrix::from_diagonal(&[one, C64::from_polar(1.0, alpha)]);
    let back = C64::from_polar(1.0, -alpha);
    Canonicalization {
        u_a,
        v_b,
        phases: [one, back, one, back],
    }
}
