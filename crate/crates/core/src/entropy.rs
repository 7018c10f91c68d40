//! Relative-entropy bound for `d + 1` canonical states.
//!
//! Two copies of an unknown member of a set of `d + 1` canonical states,
//! shared as `AB` and `CD`, form the mixture
//! `ρ = (1/(d+1)) Σ_i P[Ψ_i ⊗ Ψ_i]`. The separable reference
//! `σ = (1/d²) Σ_nm P[Ψ_nm^{AC} ⊗ Ψ_nm^{BD}]` upper-bounds the relative
//! entropy of entanglement of `ρ` across `AC : BD`. A value of
//! `S(ρ ‖ σ)` strictly below `log₂ d` is the certificate computed here.
//!
//! All operators live in `A, C, B, D` factor order.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eig_hermitian, kron_vec, strides, ComplexMatrix, HermitianEigenDecomposition, LinalgError, StateVector, C64,
};
use crate::weyl::{bell_state, BellIndex, WeylError};

/// Eigenvalues at or below this are treated as zero.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of `σ` on the null space of `ρ` above which the supports differ.
pub const LEAKAGE_TOL: f64 = 1e-10;
/// Required gap below `log₂ d`.
pub const BOUND_MARGIN: f64 = 1e-9;
const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("expected {expected} states, got {found}")]
    WrongSetSize { expected: usize, found: usize },
    #[error("set contains duplicate index {0}")]
    DuplicateIndex(BellIndex),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid cut layout: {0}")]
    InvalidLayout(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

pub type Result<T> = std::result::Result<T, EntropyError>;

/// Hermitian, unit-trace, positive semidefinite matrix together with its
/// spectral decomposition.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: HermitianEigenDecomposition,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            }
            .into());
        }
        let asym = matrix.hermitian_defect();
        if asym > DENSITY_TOL {
            return Err(EntropyError::InvalidDensity(format!("asymmetry {asym:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(EntropyError::InvalidDensity(format!("trace {tr}")));
        }
        let spectrum = eig_hermitian(&matrix)?;
        let min = spectrum.eigenvalues[0];
        if min < -DENSITY_TOL {
            return Err(EntropyError::InvalidDensity(format!("eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix, spectrum })
    }

    /// Uniform mixture of the projectors onto `states`.
    pub fn uniform_mixture(states: &[StateVector]) -> Result<Self> {
        let first = states
            .first()
            .ok_or(EntropyError::WrongSetSize { expected: 1, found: 0 })?;
        let n = first.dim();
        let w = 1.0 / states.len() as f64;
        let mut m = ComplexMatrix::zeros(n, n);
        for s in states {
            if s.dim() != n {
                return Err(EntropyError::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
            let a = s.amplitudes();
            for r in 0..n {
                if a[r] == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    m[(r, c)] += a[r] * a[c].conj() * w;
                }
            }
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    pub fn eigen(&self) -> &HermitianEigenDecomposition {
        &self.spectrum
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|l| l * l).sum()
    }

    pub fn rank(&self) -> usize {
        self.spectrum.eigenvalues.iter().filter(|&&l| l > SUPPORT_TOL).count()
    }

    /// `-tr ρ log₂ ρ`.
    pub fn von_neumann_entropy(&self) -> f64 {
        -self
            .spectrum
            .eigenvalues
            .iter()
            .filter(|&&l| l > SUPPORT_TOL)
            .map(|&l| l * l.log2())
            .sum::<f64>()
    }
}

/// Factor dimensions plus a reordering; `permutation[k]` is the source
/// factor placed at position `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutLayout {
    factor_dims: Vec<usize>,
    permutation: Vec<usize>,
}

impl CutLayout {
    pub fn new(factor_dims: Vec<usize>, permutation: Vec<usize>) -> Result<Self> {
        if factor_dims.len() != permutation.len() {
            return Err(EntropyError::InvalidLayout(format!(
                "{} factors but permutation of length {}",
                factor_dims.len(),
                permutation.len()
            )));
        }
        if permutation.iter().copied().sorted().ne(0..permutation.len()) {
            return Err(EntropyError::InvalidLayout(format!(
                "{permutation:?} is not a permutation"
            )));
        }
        Ok(Self {
            factor_dims,
            permutation,
        })
    }

    /// `A, B, C, D → A, C, B, D` with every factor of dimension `d`.
    pub fn ac_bd(d: usize) -> Self {
        Self::new(vec![d; 4], vec![0, 2, 1, 3]).expect("fixed permutation")
    }

    pub fn identity(factor_dims: Vec<usize>) -> Self {
        let n = factor_dims.len();
        Self::new(factor_dims, (0..n).collect()).expect("identity permutation")
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn permuted_dims(&self) -> Vec<usize> {
        self.permutation.iter().map(|&f| self.factor_dims[f]).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.permutation.len()];
        for (k, &f) in self.permutation.iter().enumerate() {
            inv[f] = k;
        }
        Self {
            factor_dims: self.permuted_dims(),
            permutation: inv,
        }
    }

    /// `map[new_flat] = old_flat`.
    fn index_map(&self) -> Vec<usize> {
        let old_strides = strides(&self.factor_dims);
        let new_dims = self.permuted_dims();
        let total: usize = self.factor_dims.iter().product();
        (0..total)
            .map(|mut flat| {
                let mut old = 0;
                for k in (0..new_dims.len()).rev() {
                    let digit = flat % new_dims[k];
                    flat /= new_dims[k];
                    old += digit * old_strides[self.permutation[k]];
                }
                old
            })
            .collect()
    }
}

impl fmt::Display for CutLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.factor_dims, self.permutation)
    }
}

/// Reorders the tensor factors of `state` according to `layout`.
pub fn permute_subsystems(state: &StateVector, layout: &CutLayout) -> Result<StateVector> {
    if state.dims() != layout.factor_dims() {
        return Err(EntropyError::DimensionMismatch {
            expected: layout.factor_dims().iter().product(),
            found: state.dim(),
        });
    }
    let amps = state.amplitudes();
    let permuted = layout.index_map().into_iter().map(|old| amps[old]).collect();
    Ok(StateVector::new(layout.permuted_dims(), permuted)?)
}

/// Conjugates an operator on `layout.factor_dims` by the factor reordering.
pub fn permute_operator(op: &ComplexMatrix, layout: &CutLayout) -> Result<ComplexMatrix> {
    let total: usize = layout.factor_dims().iter().product();
    if op.rows() != total || op.cols() != total {
        return Err(EntropyError::DimensionMismatch {
            expected: total,
            found: op.rows(),
        });
    }
    let map = layout.index_map();
    Ok(ComplexMatrix::from_fn(total, total, |r, c| op[(map[r], map[c])]))
}

fn validate_indices(set: &[BellIndex]) -> Result<usize> {
    let d = set
        .first()
        .ok_or(EntropyError::WrongSetSize { expected: 2, found: 0 })?
        .d();
    if let Some(bad) = set.iter().find(|i| i.d() != d) {
        return Err(EntropyError::DimensionMismatch {
            expected: d,
            found: bad.d(),
        });
    }
    if let Some(dup) = set.iter().duplicates().next() {
        return Err(EntropyError::DuplicateIndex(*dup));
    }
    Ok(d)
}

/// `Ψ_i^{AB} ⊗ Ψ_i^{CD}` in `A, C, B, D` order.
pub fn two_copy_state(idx: BellIndex) -> Result<StateVector> {
    let d = idx.d();
    let psi = bell_state(idx);
    let abcd = StateVector::new(vec![d; 4], kron_vec(psi.amplitudes(), psi.amplitudes()))?;
    permute_subsystems(&abcd, &CutLayout::ac_bd(d))
}

/// Uniform mixture of two copies of each member, any number of distinct
/// members.
pub fn build_rho_mixture(set: &[BellIndex]) -> Result<DensityMatrix> {
    validate_indices(set)?;
    let states = set.iter().map(|&i| two_copy_state(i)).collect::<Result<Vec<_>>>()?;
    DensityMatrix::uniform_mixture(&states)
}

/// [`build_rho_mixture`] restricted to exactly `d + 1` members.
pub fn build_rho_states(set: &[BellIndex]) -> Result<DensityMatrix> {
    let d = validate_indices(set)?;
    if set.len() != d + 1 {
        return Err(EntropyError::WrongSetSize {
            expected: d + 1,
            found: set.len(),
        });
    }
    build_rho_mixture(set)
}

/// `(1/d²) Σ_nm P[Ψ_nm^{AC} ⊗ Ψ_nm^{BD}]`; already in `A, C, B, D` order.
pub fn build_rho_separable(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(WeylError::InvalidDimension(d).into());
    }
    let states = BellIndex::all(d)
        .map(|i| {
            let psi = bell_state(i);
            StateVector::new(vec![d; 4], kron_vec(psi.amplitudes(), psi.amplitudes()))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    DensityMatrix::uniform_mixture(&states)
}

/// `tr Q† M Q` restricted to column `k`: `⟨q_k|M|q_k⟩`.
fn diagonal_in_basis(m: &ComplexMatrix, q: &ComplexMatrix, k: usize) -> f64 {
    let col = q.column(k);
    let mq = m.mul_vec(&col).expect("square and conforming");
    col.iter().zip(&mq).map(|(a, b)| a.conj() * b).sum::<C64>().re
}

/// `S(σ ‖ ρ) = tr σ (log₂ σ − log₂ ρ)`, or `+∞` when the support of `σ`
/// is not contained in the support of `ρ`.
pub fn relative_entropy(sigma: &DensityMatrix, rho: &DensityMatrix) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(EntropyError::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    let q = &rho.eigen().eigenvectors;
    let mut cross = 0.0;
    for (k, &mu) in rho.eigenvalues().iter().enumerate() {
        let weight = diagonal_in_basis(sigma.matrix(), q, k);
        if mu <= SUPPORT_TOL {
            if weight > LEAKAGE_TOL {
                return Ok(f64::INFINITY);
            }
        } else {
            cross += weight * mu.log2();
        }
    }
    Ok(-sigma.von_neumann_entropy() - cross)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyBoundCheck {
    pub value: f64,
    pub bound: f64,
    /// `bound − value`.
    pub gap: f64,
    pub pass: bool,
    pub diagnostic: Option<String>,
}

fn bound_check_against(set: &[BellIndex], separable: &DensityMatrix, d: usize) -> Result<EntropyBoundCheck> {
    let rho = build_rho_states(set)?;
    let value = relative_entropy(&rho, separable)?;
    let bound = (d as f64).log2();
    let pass = value < bound - BOUND_MARGIN;
    let diagnostic = if value.is_infinite() {
        Some("support of the (d+1)-state mixture is not contained in the support of the separable state".into())
    } else if !pass {
        Some(format!("value {value} is not below log2 d - {BOUND_MARGIN:e}"))
    } else {
        None
    };
    Ok(EntropyBoundCheck {
        value,
        bound,
        gap: bound - value,
        pass,
        diagnostic,
    })
}

/// `S(ρ^{(d+1)} ‖ ρ^S)` against `log₂ d`.
pub fn entropy_bound_check(set: &[BellIndex]) -> Result<EntropyBoundCheck> {
    let d = validate_indices(set)?;
    let separable = build_rho_separable(d)?;
    bound_check_against(set, &separable, d)
}

/// [`entropy_bound_check`] over many sets of one dimension, sharing the
/// separable reference. Results are in input order.
pub fn entropy_bound_sweep(d: usize, sets: &[Vec<BellIndex>]) -> Result<Vec<EntropyBoundCheck>> {
    let separable = build_rho_separable(d)?;
    sets.par_iter()
        .map(|set| {
            let sd = validate_indices(set)?;
            if sd != d {
                return Err(EntropyError::DimensionMismatch { expected: d, found: sd });
            }
            bound_check_against(set, &separable, d)
        })
        .collect()
}
