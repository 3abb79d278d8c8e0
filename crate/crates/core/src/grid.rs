//! Uniform periodic grids on the line, wave functions sampled on them, and
//! the unitary discrete Fourier map between position and momentum nodes.
//!
//! Convention: for `x_j = x0 + j·dx` and `p_k = 2π(k − n/2)/(n·dx)`,
//!
//! ```text
//! ψ̂(p_k) = dx/√(2π) · Σ_j e^{−i p_k x_j} ψ(x_j)
//! ```
//!
//! which is unitary between `Σ|ψ|²·dx` and `Σ|ψ̂|²·dp`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::hilbert::{orthonormalize, SpectralTerm, State};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid1D {
    n: usize,
    x0: f64,
    dx: f64,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    n: usize,
    x0: f64,
    dx: f64,
}

impl TryFrom<GridRepr> for Grid1D {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        Grid1D::new(r.n, r.x0, r.dx)
    }
}

impl From<Grid1D> for GridRepr {
    fn from(g: Grid1D) -> Self {
        GridRepr { n: g.n, x0: g.x0, dx: g.dx }
    }
}

impl Default for Grid1D {
    /// `n = 4096` nodes over `[−20, 20)`.
    fn default() -> Self {
        Self::symmetric(4096, 20.0).expect("valid default grid")
    }
}

impl Grid1D {
    pub fn new(n: usize, x0: f64, dx: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} must be a power of two ≥ 16")));
        }
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad spacing dx = {dx} or origin x0 = {x0}")));
        }
        Ok(Self { n, x0, dx })
    }

    /// `n` nodes covering `[−half_width, half_width)`, with a node at 0.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        Self::new(n, -half_width, 2.0 * half_width / n as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Momentum spacing `2π/(n·dx)`.
    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dx)
    }

    /// Period `n·dx`.
    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.p(k)).collect()
    }

    /// Whether `x ↦ −x` maps nodes to nodes (modulo the period).
    pub fn is_symmetric(&self) -> bool {
        let r = (-self.x0 / self.dx) - (self.n / 2) as f64;
        r.abs() < 1e-9
    }

    /// Index `j'` with `x_{j'} ≡ −x_j` modulo the period. Requires a
    /// symmetric grid.
    pub fn reflect_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    /// Nearest node index to `x` after periodic reduction.
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x0) / self.dx).round() as i64;
        t.rem_euclid(self.n as i64) as usize
    }

    /// The nodes' position on the grid as fractional index `(x − x0)/dx`.
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.x0) / self.dx
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x0 - 1e-12 && x <= self.x0 + self.length() + 1e-12
    }

    fn planner(&self) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        let mut planner = FftPlanner::new();
        (planner.plan_fft_forward(self.n), planner.plan_fft_inverse(self.n))
    }

    /// Position samples to momentum samples.
    pub fn to_momentum(&self, psi: &[C64]) -> Vec<C64> {
        let (fwd, _) = self.planner();
        self.to_momentum_with(&*fwd, psi)
    }

    pub(crate) fn to_momentum_with(&self, fwd: &dyn Fft<f64>, psi: &[C64]) -> Vec<C64> {
        assert_eq!(psi.len(), self.n);
        let mut buf: Vec<C64> = psi
            .iter()
            .enumerate()
            .map(|(j, &v)| if j % 2 == 0 { v } else { -v })
            .collect();
        fwd.process(&mut buf);
        let scale = self.dx / (2.0 * PI).sqrt();
        buf.iter()
            .enumerate()
            .map(|(k, &v)| v * C64::from_polar(scale, -self.p(k) * self.x0))
            .collect()
    }

    /// Momentum samples back to position samples.
    pub fn from_momentum(&self, phi: &[C64]) -> Vec<C64> {
        let (_, inv) = self.planner();
        self.from_momentum_with(&*inv, phi)
    }

    pub(crate) fn from_momentum_with(&self, inv: &dyn Fft<f64>, phi: &[C64]) -> Vec<C64> {
        assert_eq!(phi.len(), self.n);
        let mut buf: Vec<C64> = phi
            .iter()
            .enumerate()
            .map(|(k, &v)| v * C64::from_polar(1.0, self.p(k) * self.x0))
            .collect();
        inv.process(&mut buf);
        let scale = (2.0 * PI).sqrt() / (self.dx * self.n as f64);
        buf.iter()
            .enumerate()
            .map(|(j, &v)| if j % 2 == 0 { v * scale } else { -v * scale })
            .collect()
    }

    /// The Fourier map in orthonormal coordinates, `(1/√n)·e^{−i p_k x_j}`.
    pub fn fourier_matrix(&self) -> CMatrix {
        let s = 1.0 / (self.n as f64).sqrt();
        CMatrix::from_fn(self.n, self.n, |k, j| C64::from_polar(s, -self.p(k) * self.x(j)))
    }
}

/// Complex samples `ψ(x_j)` of a function on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    pub grid: Grid1D,
    #[serde(with = "crate::hilbert::complex_slice")]
    pub values: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch { expected: grid.n(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        Self { grid, values: grid.positions().into_iter().map(f).collect() }
    }

    /// Samples scaled to orthonormal coordinates, `ψ_j·√dx`.
    pub fn from_coords(grid: Grid1D, c: &CVector) -> Result<Self> {
        let s = 1.0 / grid.dx().sqrt();
        Self::new(grid, c.iter().map(|v| v * s).collect())
    }

    pub fn coords(&self) -> CVector {
        let s = self.grid.dx().sqrt();
        CVector::from_iterator(self.values.len(), self.values.iter().map(|v| v * s))
    }

    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero wave function".into()));
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(self)
    }

    /// `⟨self, other⟩ = Σ conj(self)·other·dx`.
    pub fn inner(&self, other: &WaveFunction) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<C64>() * self.grid.dx()
    }

    /// Momentum-space samples on the conjugate grid.
    pub fn momentum(&self) -> Vec<C64> {
        self.grid.to_momentum(&self.values)
    }

    /// Position probability density `|ψ(x_j)|²`.
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

/// A density operator on a grid, kept in spectral form since the dense
/// matrix is too large at production grid sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridStateRepr", into = "GridStateRepr")]
pub struct GridState {
    grid: Grid1D,
    terms: Vec<(f64, WaveFunction)>,
}

#[derive(Serialize, Deserialize)]
struct GridStateRepr {
    grid: Grid1D,
    spectral: Vec<SpectralTerm>,
}

impl TryFrom<GridStateRepr> for GridState {
    type Error = Error;
    fn try_from(r: GridStateRepr) -> Result<Self> {
        let terms = r
            .spectral
            .into_iter()
            .map(|t| (t.weight, t.vector.iter().copied().collect()))
            .collect();
        GridState::new(r.grid, terms)
    }
}

impl From<GridState> for GridStateRepr {
    fn from(s: GridState) -> Self {
        GridStateRepr {
            grid: s.grid,
            spectral: s
                .terms
                .into_iter()
                .map(|(weight, wf)| SpectralTerm {
                    weight,
                    vector: CVector::from_vec(wf.values),
                })
                .collect(),
        }
    }
}

impl GridState {
    /// Orthonormalises the sampled vectors (in `L²` with measure `dx`) and
    /// renormalises the weights to sum to one.
    pub fn new(grid: Grid1D, spectral: Vec<(f64, Vec<C64>)>) -> Result<Self> {
        if spectral.is_empty() {
            return Err(Error::ZeroWeight);
        }
        let mut coords = Vec::with_capacity(spectral.len());
        for (w, v) in &spectral {
            if v.len() != grid.n() {
                return Err(Error::DimensionMismatch { expected: grid.n(), found: v.len() });
            }
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidState(format!("weight {w} is negative or not finite")));
            }
            coords.push(CVector::from_column_slice(v));
        }
        let total: f64 = spectral.iter().map(|(w, _)| w).sum();
        if total <= 0.0 {
            return Err(Error::ZeroWeight);
        }
        let basis = orthonormalize(&coords)?;
        let terms = spectral
            .iter()
            .zip(basis)
            .map(|((w, _), c)| Ok((w / total, WaveFunction::from_coords(grid, &c)?)))
            .collect::<Result<_>>()?;
        Ok(Self { grid, terms })
    }

    pub fn pure(psi: WaveFunction) -> Result<Self> {
        Self::new(psi.grid, vec![(1.0, psi.values)])
    }

    pub fn mixture(terms: Vec<(f64, WaveFunction)>) -> Result<Self> {
        let grid = terms.first().ok_or(Error::ZeroWeight)?.1.grid;
        if terms.iter().any(|(_, w)| w.grid != grid) {
            return Err(Error::GridMismatch("mixture components live on different grids".into()));
        }
        Self::new(grid, terms.into_iter().map(|(w, wf)| (w, wf.values)).collect())
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn terms(&self) -> &[(f64, WaveFunction)] {
        &self.terms
    }

    /// Position density `Σ λ |φ(x_j)|²`.
    pub fn position_density(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n()];
        for (w, wf) in &self.terms {
            for (o, v) in out.iter_mut().zip(&wf.values) {
                *o += w * v.norm_sqr();
            }
        }
        out
    }

    /// Momentum density `Σ λ |φ̂(p_k)|²`.
    pub fn momentum_density(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n()];
        for (w, wf) in &self.terms {
            for (o, v) in out.iter_mut().zip(wf.momentum()) {
                *o += w * v.norm_sqr();
            }
        }
        out
    }

    /// Dense density operator in orthonormal coordinates. Only sensible on
    /// small grids.
    pub fn to_state(&self) -> Result<State> {
        State::from_operator(self.to_operator(), 1e-9)
    }

    pub fn to_operator(&self) -> crate::Operator {
        let n = self.grid.n();
        let mut m = CMatrix::zeros(n, n);
        for (w, wf) in &self.terms {
            let c = wf.coords();
            m += &c * c.adjoint() * C64::new(*w, 0.0);
        }
        crate::Operator::new(m).expect("square")
    }

    /// Largest deviation of the spectral data from trace one and
    /// orthonormality.
    pub fn trace_defect(&self) -> f64 {
        let sum: f64 = self.terms.iter().map(|(w, _)| w).sum();
        let mut worst = (sum - 1.0).abs();
        for (i, (_, a)) in self.terms.iter().enumerate() {
            for (j, (_, b)) in self.terms.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid1D, centre: f64) -> WaveFunction {
        WaveFunction::from_fn(grid, |x| C64::new(PI.powf(-0.25) * (-(x - centre).powi(2) / 2.0).exp(), 0.0))
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(8, 0.0, 1.0).is_err());
        assert!(Grid1D::new(48, 0.0, 1.0).is_err());
        assert!(Grid1D::new(64, 0.0, 0.0).is_err());
        assert!(Grid1D::new(64, 0.0, 0.1).is_ok());
    }

    #[test]
    fn default_grid() {
        let g = Grid1D::default();
        assert_eq!(g.n(), 4096);
        assert!((g.dx() - 40.0 / 4096.0).abs() < 1e-15);
        assert!(g.is_symmetric());
        assert_eq!(g.x(2048), 0.0);
        assert_eq!(g.p(2048), 0.0);
    }

    #[test]
    fn reflection_on_symmetric_grid() {
        let g = Grid1D::symmetric(64, 5.0).unwrap();
        for j in 1..64 {
            assert!((g.x(g.reflect_index(j)) + g.x(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_is_its_own_transform() {
        let g = Grid1D::symmetric(256, 15.0).unwrap();
        let psi = gaussian(g, 0.0);
        let phi = psi.momentum();
        for k in 0..g.n() {
            let expected = PI.powf(-0.25) * (-g.p(k).powi(2) / 2.0).exp();
            assert!((phi[k] - C64::new(expected, 0.0)).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn shifted_gaussian_transform_phase() {
        let g = Grid1D::new(256, -12.0, 24.0 / 256.0).unwrap();
        let psi = gaussian(g, 1.5);
        let phi = psi.momentum();
        for k in 0..g.n() {
            let p = g.p(k);
            let expected = C64::from_polar(PI.powf(-0.25) * (-p * p / 2.0).exp(), -1.5 * p);
            assert!((phi[k] - expected).norm() < 1e-11);
        }
    }

    #[test]
    fn round_trip_and_unitarity() {
        let g = Grid1D::new(128, -3.0, 0.07).unwrap();
        let psi: Vec<C64> = (0..128).map(|j| C64::new((j as f64 * 0.37).sin(), (j as f64 * 0.11).cos())).collect();
        let phi = g.to_momentum(&psi);
        let back = g.from_momentum(&phi);
        for (a, b) in psi.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        let nx: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
        let np: f64 = phi.iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dp();
        assert!((nx - np).abs() < 1e-12 * nx);
    }

    #[test]
    fn fourier_matrix_matches_fft() {
        let g = Grid1D::new(32, -1.3, 0.2).unwrap();
        let f = g.fourier_matrix();
        assert!((&f.adjoint() * &f - CMatrix::identity(32, 32)).norm() < 1e-12);
        let wf = WaveFunction::from_fn(g, |x| C64::new((-x * x).exp(), x));
        let via_matrix = &f * wf.coords();
        let via_fft = wf.momentum();
        for k in 0..32 {
            assert!((via_matrix[k] - via_fft[k] * g.dp().sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_state_orthonormalises() {
        let g = Grid1D::symmetric(64, 8.0).unwrap();
        let a = gaussian(g, 0.0);
        let b = gaussian(g, 1.0);
        let s = GridState::new(g, vec![(3.0, a.values), (1.0, b.values)]).unwrap();
        assert!(s.trace_defect() < 1e-12);
        assert!((s.terms()[0].0 - 0.75).abs() < 1e-15);
        let st = s.to_state().unwrap();
        assert!((st.op().trace().re - 1.0).abs() < 1e-12);
        let json = serde_json::to_string(&s).unwrap();
        let back: GridState = serde_json::from_str(&json).unwrap();
        assert!(back.to_operator().distance(&s.to_operator()) < 1e-12);
    }
}
