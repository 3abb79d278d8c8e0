use std::f64::consts::TAU;
use std::io::Write;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::grid::GridState;
use crate::{Error, Result, C64};

/// Window and sampling of a phase-space density. Ranges are half-open;
/// strides thin the output but not the integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellGrid {
    pub q_range: (f64, f64),
    pub p_range: (f64, f64),
    pub q_stride: usize,
    pub p_stride: usize,
}

impl CellGrid {
    /// The whole periodic window, every `stride`-th node in each direction.
    pub fn full(stride: usize) -> Self {
        Self {
            q_range: (f64::NEG_INFINITY, f64::INFINITY),
            p_range: (f64::NEG_INFINITY, f64::INFINITY),
            q_stride: stride.max(1),
            p_stride: stride.max(1),
        }
    }
}

/// Sampled `h(q, p)` with bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceDensity {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Row-major in `q`: `values[i·p.len() + k] = h(q_i, p_k)`.
    pub values: Vec<f64>,
    /// `∬ h` over the window.
    pub integral: f64,
    /// `1 − integral`.
    pub leakage: f64,
    pub min_value: f64,
    /// `(q, ∫ h(q, p) dp)` over the whole momentum grid, at every sampled `q`.
    pub q_marginal: Vec<(f64, f64)>,
}

impl PhaseSpaceDensity {
    pub fn at(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.p.len() + k]
    }

    /// `q,p,value` rows.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "q,p,value")?;
        for (i, q) in self.q.iter().enumerate() {
            for (k, p) in self.p.iter().enumerate() {
                writeln!(w, "{q},{p},{}", self.at(i, k))?;
            }
        }
        Ok(())
    }
}

/// Leakage above which [`phase_space_density`] reports failure.
pub const LEAKAGE_LIMIT: f64 = 0.01;

/// `h(q, p) = (1/2π)·tr[S·W(q,p) T W(q,p)*]` for `q` on the lattice of grid
/// shifts and `p` on the momentum grid.
pub fn phase_space_density(t: &GridState, s: &GridState, cells: &CellGrid) -> Result<PhaseSpaceDensity> {
    let grid = t.grid();
    if s.grid() != grid {
        return Err(Error::GridMismatch("T and S live on different grids".into()));
    }
    let n = grid.n();
    let half = (n / 2) as i64;
    let shifts: Vec<i64> = (-half..half)
        .filter(|&m| {
            let q = m as f64 * grid.dx();
            q >= cells.q_range.0 && q < cells.q_range.1
        })
        .collect();
    let in_p: Vec<bool> = (0..n).map(|k| grid.p(k) >= cells.p_range.0 && grid.p(k) < cells.p_range.1).collect();
    let p_out: Vec<usize> = (0..n).filter(|&k| in_p[k]).step_by(cells.p_stride.max(1)).collect();

    let inv = FftPlanner::new().plan_fft_inverse(n);
    let scale = grid.dx() * grid.dx() / TAU;
    let mut row = vec![0.0; n];
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let mut integral = 0.0;
    let mut min_value = f64::INFINITY;
    let mut q = Vec::new();
    let mut values = Vec::new();
    let mut q_marginal = Vec::new();

    for (idx, &m) in shifts.iter().enumerate() {
        row.iter_mut().for_each(|v| *v = 0.0);
        for (mu, sv) in s.terms() {
            for (lambda, phi) in t.terms() {
                for j in 0..n {
                    let src = (j as i64 - m).rem_euclid(n as i64) as usize;
                    let g = sv.values[j].conj() * phi.values[src];
                    buf[j] = if j % 2 == 0 { g } else { -g };
                }
                inv.process(&mut buf);
                let w = mu * lambda * scale;
                for (r, b) in row.iter_mut().zip(&buf) {
                    *r += w * b.norm_sqr();
                }
            }
        }
        let dp = grid.dp();
        integral += row.iter().zip(&in_p).filter(|(_, &keep)| keep).map(|(v, _)| v).sum::<f64>() * dp * grid.dx();
        min_value = min_value.min(row.iter().copied().fold(f64::INFINITY, f64::min));
        if idx % cells.q_stride.max(1) == 0 {
            let qv = m as f64 * grid.dx();
            q.push(qv);
            q_marginal.push((qv, row.iter().sum::<f64>() * dp));
            values.extend(p_out.iter().map(|&k| row[k]));
        }
    }
    let leakage = 1.0 - integral;
    if leakage > LEAKAGE_LIMIT {
        return Err(Error::WindowLeakage { leakage, limit: LEAKAGE_LIMIT });
    }
    Ok(PhaseSpaceDensity {
        q,
        p: p_out.iter().map(|&k| grid.p(k)).collect(),
        values,
        integral,
        leakage,
        min_value,
        q_marginal,
    })
}
