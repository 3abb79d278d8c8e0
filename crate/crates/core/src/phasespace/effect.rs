use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::states::hermite_functions;
use super::weyl::shift_spectral;
use crate::grid::GridState;
use crate::hilbert::Effect;
use crate::quadrature::composite;
use crate::{CMatrix, Error, Operator, Result, WaveFunction, C64};

/// A rectangle `[q₁,q₂)×[p₁,p₂)` in phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct PhaseSpaceCell {
    q: (f64, f64),
    p: (f64, f64),
}

impl PhaseSpaceCell {
    pub fn new(q: (f64, f64), p: (f64, f64)) -> Result<Self> {
        for (lo, hi) in [q, p] {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::DegenerateInterval(lo, hi));
            }
        }
        Ok(Self { q, p })
    }

    /// `[−h, h)²`.
    pub fn square(h: f64) -> Result<Self> {
        Self::new((-h, h), (-h, h))
    }

    pub fn q(&self) -> (f64, f64) {
        self.q
    }

    pub fn p(&self) -> (f64, f64) {
        self.p
    }

    pub fn translated(&self, dq: f64, dp: f64) -> Self {
        Self { q: (self.q.0 + dq, self.q.1 + dq), p: (self.p.0 + dp, self.p.1 + dp) }
    }
}

impl TryFrom<[[f64; 2]; 2]> for PhaseSpaceCell {
    type Error = Error;
    fn try_from(v: [[f64; 2]; 2]) -> Result<Self> {
        Self::new((v[0][0], v[0][1]), (v[1][0], v[1][1]))
    }
}

impl From<PhaseSpaceCell> for [[f64; 2]; 2] {
    fn from(c: PhaseSpaceCell) -> Self {
        [[c.q.0, c.q.1], [c.p.0, c.p.1]]
    }
}

/// Quadrature and truncation settings for [`phase_space_effect`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectOptions {
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Longest panel in either direction.
    pub max_panel: f64,
    /// Number of Hermite functions spanning the compression space.
    pub basis_size: usize,
}

impl Default for EffectOptions {
    fn default() -> Self {
        Self { order: 16, max_panel: 2.0, basis_size: 12 }
    }
}

fn check_inside(t: &GridState, cell: &PhaseSpaceCell) -> Result<()> {
    let g = t.grid();
    let (xl, xr) = (g.x0(), g.x0() + g.length());
    let (pl, pr) = (g.p(0), g.p(0) + g.n() as f64 * g.dp());
    let eps = 1e-9;
    if cell.q.0 < xl - eps || cell.q.1 > xr + eps || cell.p.0 < pl - eps || cell.p.1 > pr + eps {
        return Err(Error::OutsideGrid(format!(
            "cell {:?}×{:?} exceeds the window [{xl}, {xr}]×[{pl}, {pr}]",
            cell.q, cell.p
        )));
    }
    Ok(())
}

/// `Σ_nodes w·(1/2π)·Σ λ A Aᴴ` with `A_a = ⟨v_a, W(q,p)φ⟩`.
fn gram(t: &GridState, cell: &PhaseSpaceCell, opts: &EffectOptions, probes: &[WaveFunction]) -> Result<CMatrix> {
    check_inside(t, cell)?;
    let g = t.grid();
    let n = g.n();
    let qs = composite(cell.q.0, cell.q.1, opts.order, opts.max_panel)?;
    let ps = composite(cell.p.0, cell.p.1, opts.order, opts.max_panel)?;
    let k = probes.len();
    // Boost kernel scaled by the quadrature weight. The `e^{−ipq/2}` factor
    // is a common phase of each column and cancels in `A Aᴴ`.
    let boost = CMatrix::from_fn(n, ps.len(), |j, c| {
        let (p, w) = ps[c];
        C64::from_polar(g.dx() * (w / TAU).sqrt(), p * g.x(j))
    });
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out = CMatrix::zeros(k, k);
    let mut overlap = CMatrix::zeros(k, n);
    for (lambda, phi) in t.terms() {
        for &(q, wq) in &qs {
            let moved = shift_spectral(&g, &*fwd, &*inv, q, &phi.values);
            for (a, v) in probes.iter().enumerate() {
                for j in 0..n {
                    overlap[(a, j)] = v.values[j].conj() * moved[j];
                }
            }
            let amp = &overlap * &boost;
            out += &amp * amp.adjoint() * C64::new(lambda * wq, 0.0);
        }
    }
    Ok(out)
}

/// `G_T(Z) = (1/2π)∬_Z W(q,p) T W(q,p)* dq dp`, compressed to the span of
/// the first `opts.basis_size` Hermite functions on `T`'s grid.
pub fn phase_space_effect(t: &GridState, cell: &PhaseSpaceCell, opts: &EffectOptions) -> Result<Effect> {
    let basis = hermite_functions(t.grid(), opts.basis_size);
    let g = gram(t, cell, opts, &basis)?;
    let herm = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    Effect::new(Operator::new(herm)?, 1e-9)
}

/// `tr[S·G_T(Z)]` on the full grid, without compression.
pub fn cell_probability(t: &GridState, s: &GridState, cell: &PhaseSpaceCell, opts: &EffectOptions) -> Result<f64> {
    if s.grid() != t.grid() {
        return Err(Error::GridMismatch("T and S live on different grids".into()));
    }
    let probes: Vec<WaveFunction> = s.terms().iter().map(|(_, v)| v.clone()).collect();
    let g = gram(t, cell, opts, &probes)?;
    Ok(s.terms().iter().enumerate().map(|(m, (mu, _))| mu * g[(m, m)].re).sum())
}
