//! Exact, branch-enumerating simulation of qudit teleportation through a
//! possibly unknown maximally entangled channel.
//!
//! A protocol is fixed by a reference channel `|Ω⟩`, Alice's measurement
//! basis `{(U_i ⊗ I)|Ω⟩}` and Bob's correction unitaries `T_i`. Running it
//! through a channel `(I ⊗ V)|Ω⟩` leaves Bob with `T_i V T_i†|φ⟩` on branch
//! `i` (for the standard protocol). The simulation below never uses that
//! closed form; it evolves the three-qudit state explicitly and projects.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inner, kron, root_of_unity, ComplexMatrix, LinalgError, StateVector, C64, NORM_TOL, OPERATOR_TOL};
use crate::weyl::{bell_state, weyl_u, BellIndex, WeylError};

/// Branches below this probability are treated as impossible when
/// enumerating Bob's measurement outcomes.
const BRANCH_EPS: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TeleportError {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("channel is not maximally entangled (reduced state deviates from I/d by {deviation:e})")]
    NotMaximallyEntangled { deviation: f64 },
    #[error("measurement states {0} and {1} are not orthonormal")]
    MeasurementNotOrthonormal(usize, usize),
    #[error("correction {0} is not unitary")]
    CorrectionNotUnitary(usize),
    #[error("expected {expected} unitaries, found {found}")]
    WrongUnitaryCount { expected: usize, found: usize },
    #[error("two-copy readout was inconclusive for hidden {hidden}: got {got}")]
    Inconclusive { hidden: BellIndex, got: BellIndex },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

pub type Result<T> = std::result::Result<T, TeleportError>;

/// `P(|Ω⟩; U_1, …, U_{d²})` with explicit corrections.
#[derive(Clone, Debug)]
pub struct TeleportProtocol {
    d: usize,
    reference_channel: StateVector,
    measurement_unitaries: Vec<ComplexMatrix>,
    corrections: Vec<ComplexMatrix>,
    measurement_states: Vec<StateVector>,
}

impl TeleportProtocol {
    pub fn new(
        reference_channel: StateVector,
        measurement_unitaries: Vec<ComplexMatrix>,
        corrections: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let d = single_dim(&reference_channel)?;
        let count = d * d;
        for list in [&measurement_unitaries, &corrections] {
            if list.len() != count {
                return Err(TeleportError::WrongUnitaryCount {
                    expected: count,
                    found: list.len(),
                });
            }
        }
        check_maximally_entangled(&reference_channel, d)?;
        let id = ComplexMatrix::identity(d);
        let measurement_states = measurement_unitaries
            .iter()
            .map(|u| {
                if u.rows() != d || u.cols() != d {
                    return Err(TeleportError::DimensionMismatch {
                        expected: d,
                        found: u.rows(),
                    });
                }
                Ok(reference_channel.apply(&kron(u, &id))?)
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..count {
            for b in a..count {
                let overlap = measurement_states[a].inner(&measurement_states[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                if (overlap - C64::new(target, 0.0)).norm() > OPERATOR_TOL {
                    return Err(TeleportError::MeasurementNotOrthonormal(a, b));
                }
            }
        }
        for (i, t) in corrections.iter().enumerate() {
            if t.rows() != d || !t.is_unitary(NORM_TOL) {
                return Err(TeleportError::CorrectionNotUnitary(i));
            }
        }
        Ok(Self {
            d,
            reference_channel,
            measurement_unitaries,
            corrections,
            measurement_states,
        })
    }

    /// Reference `(W ⊗ I)|Ψ₀₀⟩`, measurement `{(W_i ⊗ I)|Ω⟩}` and
    /// corrections `T_i = W_i W W*` (`W*` the entry-wise conjugate), which
    /// teleports exactly through the reference channel.
    pub fn twisted(w: &ComplexMatrix, ws: Vec<ComplexMatrix>) -> Result<Self> {
        let d = w.rows();
        if d < 2 {
            return Err(TeleportError::InvalidDimension(d));
        }
        let psi00 = bell_state(BellIndex::new(d, 0, 0)?);
        let reference = psi00.apply(&kron(w, &ComplexMatrix::identity(d)))?;
        let ww = w.matmul(&w.conj())?;
        let corrections = ws
            .iter()
            .map(|wi| wi.matmul(&ww))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(reference, ws, corrections)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn reference_channel(&self) -> &StateVector {
        &self.reference_channel
    }

    pub fn measurement_unitaries(&self) -> &[ComplexMatrix] {
        &self.measurement_unitaries
    }

    pub fn corrections(&self) -> &[ComplexMatrix] {
        &self.corrections
    }

    pub fn correction(&self, outcome: usize) -> &ComplexMatrix {
        &self.corrections[outcome]
    }

    /// `(U_i ⊗ I)|Ω⟩`.
    pub fn measurement_state(&self, outcome: usize) -> &StateVector {
        &self.measurement_states[outcome]
    }
}

/// `P₀₀^(d)`: reference `Ψ₀₀`, measurement unitaries `U_nm` in row-major
/// order, Bob corrects outcome `(n, m)` with `U_nm`.
pub fn standard_protocol(d: usize) -> Result<TeleportProtocol> {
    if d < 2 {
        return Err(TeleportError::InvalidDimension(d));
    }
    let us: Vec<ComplexMatrix> = BellIndex::all(d).map(weyl_u).collect();
    TeleportProtocol::new(bell_state(BellIndex::new(d, 0, 0)?), us.clone(), us)
}

/// One of Alice's `d²` measurement outcomes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeBranch {
    pub outcome: usize,
    pub probability: f64,
    pub output_state: StateVector,
}

fn single_dim(channel: &StateVector) -> Result<usize> {
    let dims = channel.dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(TeleportError::DimensionMismatch {
            expected: 2,
            found: dims.len(),
        });
    }
    if dims[0] < 2 {
        return Err(TeleportError::InvalidDimension(dims[0]));
    }
    Ok(dims[0])
}

fn check_maximally_entangled(channel: &StateVector, d: usize) -> Result<()> {
    let target = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
    let mut deviation: f64 = 0.0;
    for keep in [0, 1] {
        let red = channel.reduced_density(&[keep])?;
        deviation = deviation.max(red.max_abs_diff(&target)?);
    }
    if deviation > OPERATOR_TOL {
        return Err(TeleportError::NotMaximallyEntangled { deviation });
    }
    Ok(())
}

/// The operator `V` with `(I ⊗ V)|Ψ₀₀⟩ = channel`, i.e. `V[k, j] = √d·ψ[j, k]`.
pub fn channel_operator(channel: &StateVector) -> Result<ComplexMatrix> {
    let d = single_dim(channel)?;
    let a = channel.amplitudes();
    let s = (d as f64).sqrt();
    Ok(ComplexMatrix::from_fn(d, d, |k, j| a[j * d + k] * s))
}

/// Teleports `probe` through `channel` with `protocol`, enumerating every
/// measurement outcome of Alice.
pub fn run_teleport(
    protocol: &TeleportProtocol,
    channel: &StateVector,
    probe: &StateVector,
) -> Result<Vec<OutcomeBranch>> {
    let d = protocol.d;
    let cd = single_dim(channel)?;
    if cd != d {
        return Err(TeleportError::DimensionMismatch { expected: d, found: cd });
    }
    if probe.dim() != d {
        return Err(TeleportError::DimensionMismatch {
            expected: d,
            found: probe.dim(),
        });
    }
    check_maximally_entangled(channel, d)?;

    // probe (Alice) ⊗ channel (Alice, Bob), factor order [probe, A, B].
    let joint = probe.tensor(channel);
    let amps = joint.amplitudes();
    (0..d * d)
        .map(|outcome| {
            let meas = protocol.measurement_state(outcome).amplitudes();
            let bob: Vec<C64> = (0..d)
                .map(|k| meas.iter().enumerate().map(|(xy, m)| m.conj() * amps[xy * d + k]).sum())
                .collect();
            let probability = bob.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let collapsed = StateVector::normalized(vec![d], bob)?;
            let output_state = collapsed.apply(protocol.correction(outcome))?;
            Ok(OutcomeBranch {
                outcome,
                probability,
                output_state,
            })
        })
        .collect()
}

/// True iff all branch outputs coincide up to phase (pairwise fidelity
/// `≥ 1 − 1e−10`), i.e. Bob ends with a pure state regardless of outcome.
pub fn pure_output_check(protocol: &TeleportProtocol, channel: &StateVector, probe: &StateVector) -> Result<bool> {
    let branches = run_teleport(protocol, channel, probe)?;
    for (a, ba) in branches.iter().enumerate() {
        for bb in &branches[a + 1..] {
            if ba.output_state.fidelity(&bb.output_state) < 1.0 - OPERATOR_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Outcome of the two-copy readout for one hidden index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TwoCopyReport {
    pub hidden: BellIndex,
    /// Set when every branch pair and every Bob outcome agreed.
    pub recovered: Option<BellIndex>,
    pub branch_pairs: usize,
    pub successful_pairs: usize,
}

/// Bob's readouts `(n, m)` for one pair of teleported outputs: measure the
/// first in the computational basis, then the second in the shifted
/// Fourier basis selected by the first result.
fn bob_readouts(d: usize, first: &StateVector, second: &StateVector) -> Vec<(usize, usize)> {
    let scale = 1.0 / (d as f64).sqrt();
    let mut leaves = Vec::new();
    for (m, amp) in first.amplitudes().iter().enumerate() {
        if amp.norm_sqr() <= BRANCH_EPS {
            continue;
        }
        for n in 0..d {
            let mut basis = vec![C64::new(0.0, 0.0); d];
            for j in 0..d {
                basis[(j + m) % d] = root_of_unity(d, (j * n) as i64) * scale;
            }
            if inner(&basis, second.amplitudes()).norm_sqr() > BRANCH_EPS {
                leaves.push((n, m));
            }
        }
    }
    leaves
}

/// Runs the two-copy procedure for `hidden` over all `d⁴` pairs of Alice
/// outcomes and reports how many pairs read back `hidden` unambiguously.
pub fn two_copy_report(d: usize, hidden: BellIndex) -> Result<TwoCopyReport> {
    if d < 2 {
        return Err(TeleportError::InvalidDimension(d));
    }
    if hidden.d() != d {
        return Err(TeleportError::DimensionMismatch {
            expected: d,
            found: hidden.d(),
        });
    }
    let protocol = standard_protocol(d)?;
    let channel = bell_state(hidden);
    let copy1 = run_teleport(&protocol, &channel, &StateVector::basis(d, 0)?)?;
    let copy2 = run_teleport(&protocol, &channel, &StateVector::uniform(d))?;

    let mut successful_pairs = 0;
    for b1 in &copy1 {
        for b2 in &copy2 {
            let leaves = bob_readouts(d, &b1.output_state, &b2.output_state);
            let ok = !leaves.is_empty() && leaves.iter().all(|&(n, m)| n == hidden.n() && m == hidden.m());
            if ok {
                successful_pairs += 1;
            }
        }
    }
    let branch_pairs = copy1.len() * copy2.len();
    Ok(TwoCopyReport {
        hidden,
        recovered: (successful_pairs == branch_pairs).then_some(hidden),
        branch_pairs,
        successful_pairs,
    })
}

/// Two-copy discrimination of the full canonical basis. Errors with
/// [`TeleportError::Inconclusive`] if any branch pair reads back anything
/// other than `hidden`.
pub fn two_copy_discriminate(d: usize, hidden: BellIndex) -> Result<BellIndex> {
    if d < 2 {
        return Err(TeleportError::InvalidDimension(d));
    }
    if hidden.d() != d {
        return Err(TeleportError::DimensionMismatch {
            expected: d,
            found: hidden.d(),
        });
    }
    let protocol = standard_protocol(d)?;
    let channel = bell_state(hidden);
    let copy1 = run_teleport(&protocol, &channel, &StateVector::basis(d, 0)?)?;
    let copy2 = run_teleport(&protocol, &channel, &StateVector::uniform(d))?;
    for b1 in &copy1 {
        for b2 in &copy2 {
            for (n, m) in bob_readouts(d, &b1.output_state, &b2.output_state) {
                let got = BellIndex::new(d, n, m)?;
                if got != hidden {
                    return Err(TeleportError::Inconclusive { hidden, got });
                }
            }
        }
    }
    Ok(hidden)
}
