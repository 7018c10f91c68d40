//! Probe-state feasibility for teleportation-based discrimination.
//!
//! A set of channels `(I ⊗ V_i)|Ψ₀₀⟩` is discriminated by teleporting a
//! probe `|φ⟩` when the images `V_i|φ⟩` are pairwise orthogonal. Existence
//! of such a probe is decided here in two stages: a catalog of structured
//! probes known to work for particular families, then a multi-restart
//! projected gradient search minimising
//!
//! `F(φ) = Σ_{i<j} |⟨φ| V_j† V_i |φ⟩|²`
//!
//! over the unit sphere. The search can find probes, never rule them out,
//! so failure is reported as [`SearchStatus::Undecided`] together with the
//! best objective value reached.

use std::fmt;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inner, l2_norm, root_of_unity, ComplexMatrix, LinalgError, StateVector, C64, OPERATOR_TOL};
use crate::teleport::TeleportProtocol;
use crate::weyl::{weyl_v, BellIndex, WeylError};

/// Number of restarts evaluated together before checking for success.
/// Fixed so results do not depend on the size of the thread pool.
const RESTART_CHUNK: usize = 8;
/// Restarts spent on sets that cannot be feasible for dimension reasons.
const TOKEN_RESTARTS: usize = 8;
const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistinguishError {
    #[error("invalid state set: {0}")]
    InvalidSet(String),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("operation requires a canonical (Bell-index) state set")]
    NotCanonical,
    #[error("need at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subset size k = {k} must satisfy 2 <= k <= {max}")]
    InvalidSubsetSize { k: usize, max: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

pub type Result<T> = std::result::Result<T, DistinguishError>;

#[derive(Clone, Debug)]
enum Members {
    Canonical(Vec<BellIndex>),
    General(Vec<ComplexMatrix>),
}

/// Channels `(I ⊗ V_i)|Ψ₀₀⟩` to be told apart, either by canonical index
/// or by explicit unitaries.
#[derive(Clone, Debug)]
pub struct StateSet {
    d: usize,
    members: Members,
}

impl StateSet {
    pub fn canonical(d: usize, members: Vec<BellIndex>) -> Result<Self> {
        if members.is_empty() {
            return Err(DistinguishError::InvalidSet("empty set".into()));
        }
        if let Some(bad) = members.iter().find(|i| i.d() != d) {
            return Err(DistinguishError::DimensionMismatch {
                expected: d,
                found: bad.d(),
            });
        }
        if members.iter().duplicates().next().is_some() {
            return Err(DistinguishError::InvalidSet("duplicate members".into()));
        }
        Ok(Self {
            d,
            members: Members::Canonical(members),
        })
    }

    /// Convenience: canonical set from `(n, m)` pairs.
    pub fn from_pairs(d: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let members = pairs
            .iter()
            .map(|&(n, m)| BellIndex::new(d, n, m))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::canonical(d, members)
    }

    /// General set; every member must be unitary and the members pairwise
    /// trace-orthogonal.
    pub fn general(d: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::general_overlapping(d, operators)?;
        let ops = set.operators();
        for (a, b) in (0..ops.len()).tuple_combinations() {
            let tr = ops[a].adjoint().matmul(&ops[b])?.trace().norm();
            if tr > OPERATOR_TOL {
                return Err(DistinguishError::InvalidSet(format!(
                    "members {a} and {b} are not trace-orthogonal (|Tr| = {tr:.3e})"
                )));
            }
        }
        Ok(set)
    }

    /// General set without the trace-orthogonality requirement; members
    /// must still be distinct unitaries.
    pub fn general_overlapping(d: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(DistinguishError::InvalidSet("empty set".into()));
        }
        for (i, v) in operators.iter().enumerate() {
            if v.rows() != d || v.cols() != d {
                return Err(DistinguishError::DimensionMismatch {
                    expected: d,
                    found: v.rows(),
                });
            }
            if !v.is_unitary(1e-12) {
                return Err(DistinguishError::InvalidSet(format!("member {i} is not unitary")));
            }
        }
        for (a, b) in (0..operators.len()).tuple_combinations() {
            if operators[a].max_abs_diff(&operators[b])? <= OPERATOR_TOL {
                return Err(DistinguishError::InvalidSet(format!("members {a} and {b} coincide")));
            }
        }
        Ok(Self {
            d,
            members: Members::General(operators),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Canonical(m) => m.len(),
            Members::General(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn canonical_members(&self) -> Option<&[BellIndex]> {
        match &self.members {
            Members::Canonical(m) => Some(m),
            Members::General(_) => None,
        }
    }

    /// The unitaries `V_i`.
    pub fn operators(&self) -> Vec<ComplexMatrix> {
        match &self.members {
            Members::Canonical(m) => m.iter().copied().map(weyl_v).collect(),
            Members::General(m) => m.clone(),
        }
    }

    pub fn is_pairwise_trace_orthogonal(&self) -> bool {
        let ops = self.operators();
        (0..ops.len()).tuple_combinations().all(|(a, b)| {
            ops[a]
                .adjoint()
                .matmul(&ops[b])
                .map(|p| p.trace().norm() <= OPERATOR_TOL)
                .unwrap_or(false)
        })
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.members {
            Members::Canonical(m) => write!(f, "d={} {{{}}}", self.d, m.iter().join(",")),
            Members::General(m) => write!(f, "d={} general set of {} unitaries", self.d, m.len()),
        }
    }
}

/// Knobs of the feasibility search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub feasibility_tolerance: f64,
    pub infeasibility_threshold: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iterations: 2000,
            gradient_tolerance: 1e-9,
            feasibility_tolerance: 1e-8,
            infeasibility_threshold: 1e-6,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(DistinguishError::InvalidConfig("restarts must be at least 1".into()));
        }
        for (name, v) in [
            ("gradient_tolerance", self.gradient_tolerance),
            ("feasibility_tolerance", self.feasibility_tolerance),
            ("infeasibility_threshold", self.infeasibility_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DistinguishError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SearchStatus {
    FeasibleByCatalog,
    FeasibleBySearch,
    Undecided,
}

impl SearchStatus {
    pub fn is_feasible(self) -> bool {
        !matches!(self, SearchStatus::Undecided)
    }
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SearchStatus::FeasibleByCatalog => "FeasibleByCatalog",
            SearchStatus::FeasibleBySearch => "FeasibleBySearch",
            SearchStatus::Undecided => "Undecided",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeSearchResult {
    pub status: SearchStatus,
    /// The feasible probe, or for undecided sets the best minimiser found.
    pub probe: Option<StateVector>,
    /// Max pairwise overlap magnitude of the images of `probe`.
    pub defect: f64,
    pub best_objective: f64,
    pub restarts_used: usize,
    pub seed: u64,
    /// `best_objective > infeasibility_threshold`: the search stalled well
    /// away from zero.
    pub above_infeasibility_threshold: bool,
}

/// `max_{i<j} |⟨s_i|s_j⟩|`.
pub fn orthogonality_defect(states: &[StateVector]) -> Result<f64> {
    if states.len() < 2 {
        return Err(DistinguishError::TooFewStates(states.len()));
    }
    let dim = states[0].dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(DistinguishError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    Ok(states
        .iter()
        .tuple_combinations()
        .map(|(a, b)| a.inner(b).norm())
        .fold(0.0, f64::max))
}

/// Sum of squared expectation values `F(φ) = Σ_k |⟨φ|A_k|φ⟩|²` over a fixed
/// list of overlap operators.
#[derive(Clone, Debug)]
pub struct OverlapObjective {
    d: usize,
    terms: Vec<ComplexMatrix>,
    adjoints: Vec<ComplexMatrix>,
}

impl OverlapObjective {
    fn from_terms(d: usize, terms: Vec<ComplexMatrix>) -> Self {
        let adjoints = terms.iter().map(ComplexMatrix::adjoint).collect();
        Self { d, terms, adjoints }
    }

    /// Terms `V_j† V_i` for every pair `i < j` of the set.
    pub fn plain(set: &StateSet) -> Self {
        let ops = set.operators();
        let terms = (0..ops.len())
            .tuple_combinations()
            .map(|(i, j)| &ops[j].adjoint() * &ops[i])
            .collect();
        Self::from_terms(set.d, terms)
    }

    /// Terms `T_k V_j† V_i T_k†` for every correction `T_k` of `protocol`
    /// and every pair `i < j`.
    pub fn conjugated(set: &StateSet, protocol: &TeleportProtocol) -> Result<Self> {
        if protocol.d() != set.d {
            return Err(DistinguishError::DimensionMismatch {
                expected: set.d,
                found: protocol.d(),
            });
        }
        let plain = Self::plain(set);
        let terms = protocol
            .corrections()
            .iter()
            .flat_map(|t| {
                let t_adj = t.adjoint();
                plain.terms.iter().map(move |a| &(t * a) * &t_adj).collect::<Vec<_>>()
            })
            .collect();
        Ok(Self::from_terms(set.d, terms))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn expectations(&self, phi: &[C64]) -> impl Iterator<Item = C64> + '_ {
        let phi = phi.to_vec();
        self.terms.iter().map(move |a| {
            let w = a.mul_vec(&phi).expect("probe dimension checked by caller");
            inner(&phi, &w)
        })
    }

    /// `F(φ)`; `φ` need not be normalised.
    pub fn value(&self, phi: &[C64]) -> f64 {
        self.expectations(phi).map(|z| z.norm_sqr()).sum()
    }

    /// `max_k |⟨φ|A_k|φ⟩|`.
    pub fn defect(&self, phi: &[C64]) -> f64 {
        self.expectations(phi).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Euclidean gradient of `F` over `ℝ^{2d}`, packed as
    /// `∂F/∂Re φ + i ∂F/∂Im φ = 2 Σ_k (conj(z_k) A_k φ + z_k A_k† φ)`.
    pub fn gradient(&self, phi: &[C64]) -> Vec<C64> {
        let mut g = vec![C64::new(0.0, 0.0); phi.len()];
        for (a, a_adj) in self.terms.iter().zip(&self.adjoints) {
            let aphi = a.mul_vec(phi).expect("probe dimension checked by caller");
            let z = inner(phi, &aphi);
            let adj_phi = a_adj.mul_vec(phi).expect("probe dimension checked by caller");
            for ((gk, x), y) in g.iter_mut().zip(&aphi).zip(&adj_phi) {
                *gk += (z.conj() * x + z * y) * 2.0;
            }
        }
        g
    }
}

fn real_dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

fn normalize(v: &mut [C64]) {
    let n = l2_norm(v);
    for z in v.iter_mut() {
        *z /= n;
    }
}

struct Descent {
    phi: Vec<C64>,
    value: f64,
}

/// Projected gradient descent on the unit sphere with a Barzilai–Borwein
/// trial step and Armijo backtracking.
fn descend(obj: &OverlapObjective, mut phi: Vec<C64>, cfg: &SearchConfig) -> Descent {
    normalize(&mut phi);
    let target = cfg.feasibility_tolerance * cfg.feasibility_tolerance;
    let tangent = |phi: &[C64], g: Vec<C64>| -> Vec<C64> {
        let radial = real_dot(phi, &g);
        g.iter().zip(phi).map(|(gk, p)| gk - p * radial).collect()
    };
    let mut f = obj.value(&phi);
    let mut gt = tangent(&phi, obj.gradient(&phi));
    let mut step = 0.1;
    for _ in 0..cfg.max_iterations {
        if f <= target {
            break;
        }
        let gnorm2 = real_dot(&gt, &gt);
        if gnorm2.sqrt() < cfg.gradient_tolerance {
            break;
        }
        let mut alpha = step;
        let (cand, fc) = loop {
            let mut cand: Vec<C64> = phi.iter().zip(&gt).map(|(p, g)| p - g * alpha).collect();
            normalize(&mut cand);
            let fc = obj.value(&cand);
            if fc <= f - ARMIJO_C * alpha * gnorm2 || alpha < MIN_STEP {
                break (cand, fc);
            }
            alpha *= 0.5;
        };
        if alpha < MIN_STEP {
            break;
        }
        let gt_new = tangent(&cand, obj.gradient(&cand));
        let s: Vec<C64> = cand.iter().zip(&phi).map(|(a, b)| a - b).collect();
        let y: Vec<C64> = gt_new.iter().zip(&gt).map(|(a, b)| a - b).collect();
        let sy = real_dot(&s, &y);
        step = if sy > 0.0 {
            (real_dot(&s, &s) / sy).clamp(1e-10, 1e10)
        } else {
            (alpha * 2.0).min(1e10)
        };
        phi = cand;
        f = fc;
        gt = gt_new;
    }
    Descent { phi, value: f }
}

/// Rotation-invariant complex Gaussian start for restart `index`.
fn random_start(d: usize, seed: u64, index: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        })
        .collect()
}

struct RestartOutcome {
    best: Descent,
    restarts_used: usize,
    feasible: bool,
}

/// Runs up to `restarts` descents, stopping at the lowest-index restart
/// that reaches the feasibility target.
fn run_restarts(obj: &OverlapObjective, cfg: &SearchConfig, restarts: usize) -> RestartOutcome {
    let target = cfg.feasibility_tolerance * cfg.feasibility_tolerance;
    let mut best: Option<(Descent, usize)> = None;
    let mut start = 0;
    while start < restarts {
        let end = (start + RESTART_CHUNK).min(restarts);
        let batch: Vec<Descent> = (start..end)
            .into_par_iter()
            .map(|r| descend(obj, random_start(obj.d, cfg.seed, r), cfg))
            .collect();
        for (offset, run) in batch.into_iter().enumerate() {
            let index = start + offset;
            let feasible = run.value <= target && obj.defect(&run.phi) <= cfg.feasibility_tolerance;
            let better = best.as_ref().is_none_or(|(b, _)| run.value < b.value);
            if better || feasible {
                best = Some((run, index));
            }
            if feasible {
                let (best, _) = best.expect("just set");
                return RestartOutcome {
                    best,
                    restarts_used: index + 1,
                    feasible: true,
                };
            }
        }
        start = end;
    }
    RestartOutcome {
        best: best.expect("at least one restart").0,
        restarts_used: restarts,
        feasible: false,
    }
}

/// Shared driver for plain and conjugated searches.
fn search_with(set: &StateSet, obj: &OverlapObjective, cfg: &SearchConfig) -> Result<ProbeSearchResult> {
    cfg.validate()?;
    if set.len() < 2 {
        return Err(DistinguishError::TooFewStates(set.len()));
    }
    let finish = |status, phi: Vec<C64>, best_objective: f64, restarts_used| -> Result<ProbeSearchResult> {
        let probe = StateVector::normalized(vec![set.d], phi)?;
        let defect = obj.defect(probe.amplitudes());
        debug_assert!(defect * defect <= 2.0 * obj.value(probe.amplitudes()) + 1e-15);
        Ok(ProbeSearchResult {
            status,
            probe: Some(probe),
            defect,
            best_objective,
            restarts_used,
            seed: cfg.seed,
            above_infeasibility_threshold: best_objective > cfg.infeasibility_threshold,
        })
    };

    if set.canonical_members().is_some() {
        if let Some(p) = catalog_candidates(set)?
            .into_iter()
            .find(|p| obj.defect(p.amplitudes()) <= cfg.feasibility_tolerance)
        {
            let value = obj.value(p.amplitudes());
            return finish(SearchStatus::FeasibleByCatalog, p.amplitudes().to_vec(), value, 0);
        }
    }

    if set.len() > set.d {
        // More than d pairwise orthogonal vectors cannot exist in dimension d.
        let run = run_restarts(obj, cfg, cfg.restarts.min(TOKEN_RESTARTS));
        return finish(SearchStatus::Undecided, run.best.phi, run.best.value, run.restarts_used);
    }

    let run = run_restarts(obj, cfg, cfg.restarts);
    let status = if run.feasible {
        SearchStatus::FeasibleBySearch
    } else {
        SearchStatus::Undecided
    };
    finish(status, run.best.phi, run.best.value, run.restarts_used)
}

/// The four `d = 4` probes used for `{n₁,n₂}×{m₁,m₂}` grids, keyed by the
/// m-difference.
fn grid_probe(m_difference: usize) -> Option<StateVector> {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let amps = match m_difference {
        1 => vec![one, i, one, i],
        2 => vec![one, one, -one, one],
        3 => vec![one, -i, one, -i],
        _ => return None,
    };
    Some(StateVector::normalized(vec![4], amps).expect("non-zero"))
}

/// Catalog candidates applicable to the set, in catalog order.
fn catalog_candidates(set: &StateSet) -> Result<Vec<StateVector>> {
    let members = set.canonical_members().ok_or(DistinguishError::NotCanonical)?;
    let d = set.d;
    let mut out = Vec::new();
    if members.iter().map(|i| i.m()).all_equal() {
        out.push(StateVector::uniform(d));
    }
    if members.iter().map(|i| i.n()).all_equal() {
        out.push(StateVector::basis(d, 0)?);
    }
    if d == 4 && members.len() == 4 {
        let ns: Vec<usize> = members.iter().map(|i| i.n()).unique().sorted().collect();
        let ms: Vec<usize> = members.iter().map(|i| i.m()).unique().sorted().collect();
        if ns.len() == 2 && ms.len() == 2 {
            if let Some(p) = grid_probe(ms[1] - ms[0]) {
                out.push(p);
            }
        }
    }
    if d == 3 {
        let w = root_of_unity(3, 1);
        let one = C64::new(1.0, 0.0);
        out.push(StateVector::normalized(vec![3], vec![one, w, one])?);
    }
    Ok(out)
}

/// First catalog probe whose images under the set are pairwise orthogonal
/// within the default feasibility tolerance.
pub fn catalog_probe(set: &StateSet) -> Result<Option<StateVector>> {
    let tol = SearchConfig::default().feasibility_tolerance;
    let obj = OverlapObjective::plain(set);
    Ok(catalog_candidates(set)?
        .into_iter()
        .find(|p| obj.defect(p.amplitudes()) <= tol))
}

/// Looks for `|φ⟩` with `{V_i|φ⟩}` pairwise orthogonal.
pub fn probe_search(set: &StateSet, cfg: &SearchConfig) -> Result<ProbeSearchResult> {
    search_with(set, &OverlapObjective::plain(set), cfg)
}

/// Looks for a single `|φ⟩` that works on every measurement outcome of
/// `protocol`: `⟨φ|T_k V_j† V_i T_k†|φ⟩ = 0` for all `k` and `i ≠ j`.
pub fn conjugated_probe_search(
    set: &StateSet,
    protocol: &TeleportProtocol,
    cfg: &SearchConfig,
) -> Result<ProbeSearchResult> {
    let obj = OverlapObjective::conjugated(set, protocol)?;
    search_with(set, &obj, cfg)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusRow {
    pub members: Vec<BellIndex>,
    pub status: SearchStatus,
    pub defect: f64,
    pub best_objective: f64,
    pub probe: Option<StateVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusReport {
    pub d: usize,
    pub k: usize,
    pub rows: Vec<CensusRow>,
    pub feasible_by_catalog: usize,
    pub feasible_by_search: usize,
    pub undecided: usize,
}

impl CensusReport {
    pub fn feasible(&self) -> usize {
        self.feasible_by_catalog + self.feasible_by_search
    }
}

/// Classifies the `k`-subsets of the canonical basis (lexicographic in
/// row-major index order, at most `limit` of them).
pub fn classify_sets(d: usize, k: usize, cfg: &SearchConfig, limit: Option<usize>) -> Result<CensusReport> {
    if d < 2 {
        return Err(WeylError::InvalidDimension(d).into());
    }
    if k < 2 || k > d * d {
        return Err(DistinguishError::InvalidSubsetSize { k, max: d * d });
    }
    cfg.validate()?;
    let subsets: Vec<Vec<BellIndex>> = BellIndex::all(d)
        .combinations(k)
        .take(limit.unwrap_or(usize::MAX))
        .collect();
    let rows = subsets
        .into_par_iter()
        .map(|members| {
            let set = StateSet::canonical(d, members.clone())?;
            let r = probe_search(&set, cfg)?;
            Ok(CensusRow {
                members,
                status: r.status,
                defect: r.defect,
                best_objective: r.best_objective,
                probe: r.probe,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let count = |s: SearchStatus| rows.iter().filter(|r| r.status == s).count();
    Ok(CensusReport {
        d,
        k,
        feasible_by_catalog: count(SearchStatus::FeasibleByCatalog),
        feasible_by_search: count(SearchStatus::FeasibleBySearch),
        undecided: count(SearchStatus::Undecided),
        rows,
    })
}

/// `{Ψ₁₁, Ψ₂₁, Ψ₁₃, Ψ₂₃}` in `5 ⊗ 5`.
pub fn suspected_counterexample_set() -> StateSet {
    StateSet::from_pairs(5, &[(1, 1), (2, 1), (1, 3), (2, 3)]).expect("valid indices")
}

/// High-effort search on [`suspected_counterexample_set`].
pub fn suspected_counterexample_check() -> Result<ProbeSearchResult> {
    let cfg = SearchConfig {
        restarts: 512,
        max_iterations: 5000,
        ..SearchConfig::default()
    };
    probe_search(&suspected_counterexample_set(), &cfg)
}

/// The three-member `3 ⊗ 3` set `{I, S, F}` with `S|j⟩ = |j+1⟩` and `F`
/// the Fourier matrix whose columns are `(1/√3) Σ_k ω^{jk}|k⟩`.
///
/// `Tr F = i` and `Tr S†F ≠ 0`, so the corresponding states are not
/// pairwise orthogonal; the set is built with
/// [`StateSet::general_overlapping`].
pub fn dissociation_set() -> StateSet {
    let d = 3;
    let s = 1.0 / (d as f64).sqrt();
    let shift = ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let fourier = ComplexMatrix::from_fn(d, d, |r, c| root_of_unity(d, (r * c) as i64) * s);
    StateSet::general_overlapping(d, vec![ComplexMatrix::identity(d), shift, fourier]).expect("unitary and distinct")
}
