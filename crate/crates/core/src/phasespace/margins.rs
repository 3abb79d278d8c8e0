use crate::grid::GridState;
use crate::posmom::measure::{Density, ProbMeasure1D};
use crate::{Error, Result};

/// Largest trace or orthonormality defect accepted by [`margins_of_gt`].
pub const TRACE_TOL: f64 = 1e-8;

/// Position and momentum margins of `G_T`.
///
/// `e(q) = Σ λ|φ(−q)|²` on the position lattice and `f(p) = Σ λ|φ̂(−p)|²` on
/// the momentum lattice. The grid must be symmetric so that reflection maps
/// nodes to nodes.
pub fn margins_of_gt(t: &GridState) -> Result<(ProbMeasure1D, ProbMeasure1D)> {
    let defect = t.trace_defect();
    if defect > TRACE_TOL {
        return Err(Error::TraceDefect(defect));
    }
    let g = t.grid();
    if !g.is_symmetric() {
        return Err(Error::InvalidGrid("margins need a grid symmetric about the origin".into()));
    }
    let reflect = |v: Vec<f64>| (0..g.n()).map(|j| v[g.reflect_index(j)]).collect::<Vec<_>>();
    let pos = reflect(t.position_density());
    let mom = reflect(t.momentum_density());
    let rho = ProbMeasure1D::new(vec![], Some(Density { x0: g.x0(), dx: g.dx(), values: pos }));
    let nu = ProbMeasure1D::new(vec![], Some(Density { x0: g.p(0), dx: g.dp(), values: mom }));
    Ok((rho?, nu?))
}
