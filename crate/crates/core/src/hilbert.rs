//! Operators, states, effects and POM containers on a finite-dimensional
//! Hilbert space, with the probability rule and the POM axiom checks.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{CMatrix, CVector, Error, Result, C64};

/// A bounded operator, stored as a dense square complex matrix.
///
/// Hermiticity, positivity and unitarity are predicates with an explicit
/// tolerance; nothing about them is assumed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: CMatrix,
}

/// Eigen-decomposition of the Hermitian part of an operator.
///
/// Eigenvalues are ascending. Each eigenvector is normalised and its
/// largest-magnitude component (first one on ties) is real and positive.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Operator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidArgument("operator dimension must be positive".into()));
        }
        Ok(Self { mat })
    }

    /// Builds a `dim × dim` operator from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { mat: DMatrix::from_fn(dim, dim, f) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
        Self { mat: DMatrix::from_diagonal(&d) }
    }

    pub fn diagonal_complex(values: &[C64]) -> Self {
        Self { mat: DMatrix::from_diagonal(&DVector::from_column_slice(values)) }
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &CVector) -> Self {
        Self { mat: v * v.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<C64> {
        self.mat.transpose().iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { mat: &self.mat * C64::new(s, 0.0) }
    }

    pub fn compose(&self, other: &Operator) -> Self {
        Self { mat: &self.mat * &other.mat }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.mat * v
    }

    /// `U A U*`.
    pub fn conjugate_by(&self, u: &Operator) -> Self {
        Self { mat: &u.mat * &self.mat * u.mat.adjoint() }
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    fn hermitian_part(&self) -> CMatrix {
        (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0)
    }

    /// Eigen-decomposition of `(A + A*)/2`.
    pub fn eigh(&self) -> Eigen {
        hermitian_eigen(self.hermitian_part())
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.hermitian_part().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("dimension is positive")
    }

    /// Hermitian within `tol` and no eigenvalue below `-tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// `‖U*U − I‖₂`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let m = self.mat.adjoint() * &self.mat - DMatrix::<C64>::identity(n, n);
        spectral_norm(&m)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Operator (spectral) norm, the largest singular value.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.mat)
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &Operator) -> f64 {
        spectral_norm(&(&self.mat - &other.mat))
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat + &rhs.mat }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator { mat: &self.mat - &rhs.mat }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.compose(rhs)
    }
}

/// Eigen-decomposition of a Hermitian matrix with the reproducible ordering
/// and phase convention described on [`Eigen`].
pub fn hermitian_eigen(h: CMatrix) -> Eigen {
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v = eig.eigenvectors.column(k).into_owned();
        let mut best = 0;
        for i in 0..n {
            if v[i].norm() > v[best].norm() + 1e-12 {
                best = i;
            }
        }
        let pivot = v[best];
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            v *= phase;
        }
        vectors.set_column(col, &v);
    }
    Eigen { values, vectors }
}

/// Largest singular value, via the Hermitian eigensolve of `A*A`.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    let defect = {
        let mut worst = 0.0f64;
        for i in 0..a.nrows() {
            for j in i..a.ncols() {
                worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
            }
        }
        worst
    };
    if defect == 0.0 {
        return a.clone().symmetric_eigenvalues().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    }
    let gram = a.adjoint() * a;
    let top = gram.symmetric_eigenvalues().iter().fold(0.0f64, |m, &v| m.max(v));
    top.max(0.0).sqrt()
}

/// Modified Gram–Schmidt. Fails on a vector whose residual is negligible.
pub fn orthonormalize(vectors: &[CVector]) -> Result<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let scale = v.norm();
        let mut w = v.clone();
        for u in &out {
            let c = u.dotc(&w);
            w -= u * c;
        }
        let r = w.norm();
        if scale == 0.0 || r <= 1e-12 * scale {
            return Err(Error::DependentVector { index });
        }
        out.push(w / C64::new(r, 0.0));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// States

/// One term `weight·|vector⟩⟨vector|` of a spectral decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTerm {
    pub weight: f64,
    #[serde(with = "complex_vec")]
    pub vector: CVector,
}

/// A density operator, optionally carrying the spectral data it was built
/// from.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    op: Operator,
    spectral: Option<Vec<SpectralTerm>>,
}

/// Builds a state from weighted vectors: the vectors are orthonormalised
/// (modified Gram–Schmidt) and the weights renormalised to sum to one.
pub fn make_state(spectral: Vec<(f64, CVector)>) -> Result<State> {
    let dim = spectral
        .first()
        .map(|(_, v)| v.len())
        .ok_or(Error::ZeroWeight)?;
    for (w, v) in &spectral {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidState(format!("weight {w} is negative or not finite")));
        }
    }
    let total: f64 = spectral.iter().map(|(w, _)| w).sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    let vectors: Vec<CVector> = spectral.iter().map(|(_, v)| v.clone()).collect();
    let basis = orthonormalize(&vectors)?;
    let terms: Vec<SpectralTerm> = spectral
        .iter()
        .zip(basis)
        .map(|((w, _), vector)| SpectralTerm { weight: w / total, vector })
        .collect();
    Ok(State::from_terms(dim, terms))
}

impl State {
    fn from_terms(dim: usize, terms: Vec<SpectralTerm>) -> Self {
        let mut mat = CMatrix::zeros(dim, dim);
        for t in &terms {
            mat += &t.vector * t.vector.adjoint() * C64::new(t.weight, 0.0);
        }
        Self { op: Operator { mat }, spectral: Some(terms) }
    }

    /// Validates an operator as a density operator.
    pub fn from_operator(op: Operator, tol: f64) -> Result<Self> {
        let herm = op.hermitian_defect();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let lo = op.min_eigenvalue();
        if lo < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo:.3e}")));
        }
        let tr = op.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::TraceDefect((tr.re - 1.0).abs().max(tr.im.abs())));
        }
        Ok(Self { op, spectral: None })
    }

    pub fn pure(v: CVector) -> Result<Self> {
        make_state(vec![(1.0, v)])
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { op: Operator::identity(dim).scaled(1.0 / dim as f64), spectral: None }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn spectral(&self) -> Option<&[SpectralTerm]> {
        self.spectral.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Spectral data, computing it from the operator when absent. Terms with
    /// weight below `1e-14` are dropped.
    pub fn spectral_terms(&self) -> Vec<SpectralTerm> {
        if let Some(s) = &self.spectral {
            return s.clone();
        }
        let eig = self.op.eigh();
        eig.values
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &w)| w > 1e-14)
            .map(|(k, &w)| SpectralTerm { weight: w, vector: eig.vectors.column(k).into_owned() })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StateRepr {
    Spectral { spectral: Vec<SpectralTerm> },
    Operator { op: Operator },
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.spectral {
            Some(terms) => StateRepr::Spectral { spectral: terms.clone() }.serialize(s),
            None => StateRepr::Operator { op: self.op.clone() }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match StateRepr::deserialize(d)? {
            StateRepr::Spectral { spectral } => {
                make_state(spectral.into_iter().map(|t| (t.weight, t.vector)).collect())
                    .map_err(D::Error::custom)
            }
            StateRepr::Operator { op } => {
                State::from_operator(op, crate::GRID_TOL).map_err(D::Error::custom)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Effects and POMs

/// An operator with spectrum in `[0, 1]` (within tolerance).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Effect(Operator);

impl Effect {
    pub fn new(op: Operator, tol: f64) -> Result<Self> {
        let herm = op.hermitian_defect();
        if herm > tol {
            return Err(Error::InvalidEffect(format!("not Hermitian (defect {herm:.3e})")));
        }
        let ev = op.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if lo < -tol || hi > 1.0 + tol {
            return Err(Error::InvalidEffect(format!("spectrum [{lo:.3e}, {hi:.3e}] leaves [0, 1]")));
        }
        Ok(Self(op))
    }

    /// Wraps an operator without validation; [`check_pom_axioms`] is the
    /// place where constructed effects get verified.
    pub fn new_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `I − E`.
    pub fn complement(&self) -> Effect {
        Effect(&Operator::identity(self.dim()) - &self.0)
    }
}

/// The outcome-space cell an effect is attached to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    /// A group element or coset representative, as a coordinate tuple.
    Group { element: Vec<usize> },
    /// A half-open interval `[lo, hi)`.
    Interval { lo: f64, hi: f64 },
    /// A phase-space rectangle `[q0, q1) × [p0, p1)`.
    Rectangle { q: [f64; 2], p: [f64; 2] },
    /// The whole outcome space.
    Whole,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    pub cell: Cell,
}

impl Outcome {
    pub fn new(label: impl Into<String>, cell: Cell) -> Self {
        Self { label: label.into(), cell }
    }
}

/// A finite POM: one effect per cell of a partition of the outcome space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pom {
    pub space_tag: String,
    outcomes: Vec<Outcome>,
    effects: Vec<Effect>,
}

impl Pom {
    pub fn new(space_tag: impl Into<String>, outcomes: Vec<Outcome>, effects: Vec<Effect>) -> Result<Self> {
        if outcomes.len() != effects.len() {
            return Err(Error::MalformedPom(format!(
                "{} outcomes but {} effects",
                outcomes.len(),
                effects.len()
            )));
        }
        if let Some(first) = effects.first() {
            let d = first.dim();
            if let Some(bad) = effects.iter().find(|e| e.dim() != d) {
                return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
            }
        }
        Ok(Self { space_tag: space_tag.into(), outcomes, effects })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Hilbert-space dimension, `None` for an empty POM.
    pub fn dim(&self) -> Option<usize> {
        self.effects.first().map(Effect::dim)
    }

    /// Sum of all effects.
    pub fn total(&self) -> Result<Operator> {
        let d = self.dim().ok_or(Error::EmptyPom)?;
        let mut acc = CMatrix::zeros(d, d);
        for e in &self.effects {
            acc += e.op().matrix();
        }
        Operator::new(acc)
    }
}

impl<'de> Deserialize<'de> for Pom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Repr {
            space_tag: String,
            outcomes: Vec<Outcome>,
            effects: Vec<Effect>,
        }
        let r = Repr::deserialize(d)?;
        Pom::new(r.space_tag, r.outcomes, r.effects).map_err(D::Error::custom)
    }
}

/// Result of [`check_pom_axioms`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PomReport {
    pub pass: bool,
    /// `max(0, −λ_min)` over all effects.
    pub worst_negativity: f64,
    /// `‖Σ E − I‖₂`.
    pub normalization_defect: f64,
    /// Index of the effect with the lowest eigenvalue.
    pub worst_effect: usize,
    pub tol: f64,
}

/// Positivity (axiom 1) and normalisation (axiom 2). Additivity holds by
/// construction since a [`Pom`] is indexed by disjoint cells.
pub fn check_pom_axioms(pom: &Pom, tol: f64) -> Result<PomReport> {
    if pom.is_empty() {
        return Err(Error::EmptyPom);
    }
    let mut worst_negativity = 0.0f64;
    let mut worst_effect = 0;
    let mut lowest = f64::INFINITY;
    let mut herm_defect = 0.0f64;
    for (i, e) in pom.effects.iter().enumerate() {
        herm_defect = herm_defect.max(e.op().hermitian_defect());
        let lo = e.op().min_eigenvalue();
        if lo < lowest {
            lowest = lo;
            worst_effect = i;
        }
        worst_negativity = worst_negativity.max(-lo);
    }
    let d = pom.dim().expect("nonempty");
    let normalization_defect = pom.total()?.distance(&Operator::identity(d));
    let pass = worst_negativity <= tol && normalization_defect <= tol && herm_defect <= tol;
    Ok(PomReport { pass, worst_negativity, normalization_defect, worst_effect, tol })
}

/// Outcome probabilities of a POM in a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    /// Clamped to `[0, 1]` and renormalised.
    pub probs: Vec<f64>,
    /// `Re tr(ρ E_i)` as computed.
    pub raw: Vec<f64>,
    /// `max(|Σ raw − 1|, max_i (−raw_i))`.
    pub defect: f64,
}

impl ProbVector {
    pub fn from_raw(raw: Vec<f64>) -> Self {
        let sum: f64 = raw.iter().sum();
        let neg = raw.iter().fold(0.0f64, |m, &p| m.max(-p));
        let defect = (sum - 1.0).abs().max(neg);
        let clamped: Vec<f64> = raw.iter().map(|p| p.clamp(0.0, 1.0)).collect();
        let total: f64 = clamped.iter().sum();
        let probs = if total > 0.0 { clamped.iter().map(|p| p / total).collect() } else { clamped };
        Self { probs, raw, defect }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `p_i = Re tr(ρ E_i)`.
pub fn outcome_distribution(state: &State, pom: &Pom) -> Result<ProbVector> {
    let d = pom.dim().ok_or(Error::EmptyPom)?;
    if state.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: state.dim() });
    }
    let rho = state.op().matrix();
    let raw = pom
        .effects
        .iter()
        .map(|e| {
            // tr(ρE) = Σ_ij ρ_ij E_ji
            let m = e.op().matrix();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                for j in 0..d {
                    acc += rho[(i, j)] * m[(j, i)];
                }
            }
            acc.re
        })
        .collect();
    Ok(ProbVector::from_raw(raw))
}

/// An effect is regular when its spectrum extends both above and below 1/2.
pub fn effect_is_regular(effect: &Effect, tol: f64) -> bool {
    let ev = effect.op().eigenvalues();
    ev[ev.len() - 1] > 0.5 + tol && ev[0] < 0.5 - tol
}

/// `‖ab − ba‖₂`.
pub fn commutator_norm(a: &Operator, b: &Operator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    Ok(spectral_norm(&c))
}

// ---------------------------------------------------------------------------
// JSON: complex = [re, im]; Operator = {dim, entries} with row-major entries.

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr { dim: self.dim(), entries: self.row_major().iter().map(|z| [z.re, z.im]).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = OperatorRepr::deserialize(d)?;
        let entries: Vec<C64> = r.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Operator::from_row_major(r.dim, &entries).map_err(D::Error::custom)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mat)
    }
}

/// Serde adapter for complex vectors as `[[re, im], ...]`.
pub mod complex_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::{CVector, C64};

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVector, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(CVector::from_iterator(raw.len(), raw.iter().map(|[re, im]| C64::new(*re, *im))))
    }
}

/// Serde adapter for `Vec<C64>` as `[[re, im], ...]`.
pub mod complex_slice {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }
}
