use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// A density sampled on a uniform lattice `x0 + i·dx`.
///
/// The sample at a node is read as a constant density over the cell
/// `[x_i − dx/2, x_i + dx/2)`, so the cumulative distribution is piecewise
/// linear and continuous.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl Density {
    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Left edge of the first cell.
    fn left(&self) -> f64 {
        self.x0 - self.dx / 2.0
    }

    /// Right edge of the last cell.
    pub fn right(&self) -> f64 {
        self.left() + self.values.len() as f64 * self.dx
    }
}

/// A probability measure on the line: finitely many atoms plus an optional
/// sampled density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct ProbMeasure1D {
    atoms: Vec<(f64, f64)>,
    density: Option<Density>,
    /// `prefix[i]` = density mass of the first `i` cells.
    prefix: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    density: Option<Density>,
}

impl TryFrom<MeasureRepr> for ProbMeasure1D {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        ProbMeasure1D::new(r.atoms, r.density)
    }
}

impl From<ProbMeasure1D> for MeasureRepr {
    fn from(m: ProbMeasure1D) -> Self {
        MeasureRepr { atoms: m.atoms, density: m.density }
    }
}

const MASS_TOL: f64 = 1e-9;

impl ProbMeasure1D {
    /// Validates total mass 1 (to 1e-9), nonnegative weights and values, and
    /// distinct atom locations.
    pub fn new(atoms: Vec<(f64, f64)>, density: Option<Density>) -> Result<Self> {
        let m = Self::unnormalized(atoms, density)?;
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(m)
    }

    /// Rescales to total mass 1, returning the measure and the original mass.
    pub fn normalized(atoms: Vec<(f64, f64)>, density: Option<Density>) -> Result<(Self, f64)> {
        let m = Self::unnormalized(atoms, density)?;
        let total = m.total_mass();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidMeasure(format!("total mass {total}")));
        }
        Ok((m.scaled(1.0 / total), total))
    }

    fn unnormalized(mut atoms: Vec<(f64, f64)>, density: Option<Density>) -> Result<Self> {
        for &(x, w) in &atoms {
            if !x.is_finite() || !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidMeasure(format!("bad atom ({x}, {w})")));
            }
        }
        atoms.retain(|&(_, w)| w > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidMeasure("atom locations must be distinct".into()));
        }
        let density = match density {
            Some(d) => {
                if !(d.dx > 0.0 && d.dx.is_finite() && d.x0.is_finite()) {
                    return Err(Error::InvalidMeasure(format!("bad density lattice dx = {}", d.dx)));
                }
                if d.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidMeasure("density values must be nonnegative".into()));
                }
                if d.values.is_empty() { None } else { Some(d) }
            }
            None => None,
        };
        let mut prefix = vec![0.0];
        if let Some(d) = &density {
            let mut acc = 0.0;
            for v in &d.values {
                acc += v * d.dx;
                prefix.push(acc);
            }
        }
        Ok(Self { atoms, density, prefix })
    }

    fn scaled(self, s: f64) -> Self {
        let atoms = self.atoms.iter().map(|&(x, w)| (x, w * s)).collect();
        let density = self.density.map(|d| Density { values: d.values.iter().map(|v| v * s).collect(), ..d });
        Self::unnormalized(atoms, density).expect("scaling preserves validity")
    }

    pub fn dirac(t: f64) -> Self {
        Self::new(vec![(t, 1.0)], None).expect("valid")
    }

    /// A normalised density sampled on `x0 + i·dx`.
    pub fn from_density(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        Ok(Self::normalized(vec![], Some(Density { x0, dx, values }))?.0)
    }

    /// `N(mean, σ²)` sampled on nodes `x0 + i·dx`, `i < n`.
    pub fn gaussian_on(mean: f64, sigma: f64, x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidMeasure(format!("σ = {sigma}")));
        }
        let values = (0..n)
            .map(|i| {
                let z = (x0 + i as f64 * dx - mean) / sigma;
                (-z * z / 2.0).exp() / (sigma * (2.0 * PI).sqrt())
            })
            .collect();
        Self::from_density(x0, dx, values)
    }

    /// Uniform on `[a, b]`, cells aligned with the endpoints.
    pub fn uniform(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(b > a) || cells == 0 {
            return Err(Error::DegenerateInterval(a, b));
        }
        let dx = (b - a) / cells as f64;
        Self::new(vec![], Some(Density { x0: a + dx / 2.0, dx, values: vec![1.0 / (b - a); cells] }))
    }

    /// `t·self + (1 − t)·other`. Densities must share a lattice spacing and
    /// be offset by a whole number of cells.
    pub fn mix(&self, t: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("mixing weight {t}")));
        }
        let mut atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(x, w)| (x, t * w)).collect();
        for &(x, w) in &other.atoms {
            match atoms.iter_mut().find(|a| a.0 == x) {
                Some(a) => a.1 += (1.0 - t) * w,
                None => atoms.push((x, (1.0 - t) * w)),
            }
        }
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(a), None) => Some(Density { values: a.values.iter().map(|v| v * t).collect(), ..a.clone() }),
            (None, Some(b)) => Some(Density { values: b.values.iter().map(|v| v * (1.0 - t)).collect(), ..b.clone() }),
            (Some(a), Some(b)) => Some(merge_densities(a, t, b, 1.0 - t)?),
        };
        Self::new(atoms, density)
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn density_mass(&self) -> f64 {
        *self.prefix.last().expect("nonempty prefix")
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.density_mass()
    }

    /// Density mass of `(−∞, t]`.
    fn density_cdf(&self, t: f64) -> f64 {
        let Some(d) = &self.density else { return 0.0 };
        let u = (t - d.left()) / d.dx;
        if u <= 0.0 {
            return 0.0;
        }
        let n = d.values.len();
        if u >= n as f64 {
            return self.prefix[n];
        }
        let i = u.floor() as usize;
        self.prefix[i] + d.values[i] * d.dx * (u - i as f64)
    }

    /// Density mass of an interval (endpoints carry no mass).
    pub fn density_mass_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.density_cdf(b) - self.density_cdf(a)).max(0.0)
    }

    fn atoms_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.atoms.iter().filter(|a| pred(a.0)).map(|a| a.1).sum()
    }

    /// `ρ([a, b])`.
    pub fn mass_closed(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return 0.0;
        }
        self.density_mass_between(a, b) + self.atoms_in_closed(a, b)
    }

    fn atoms_in_closed(&self, a: f64, b: f64) -> f64 {
        let lo = self.atoms.partition_point(|x| x.0 < a);
        let hi = self.atoms.partition_point(|x| x.0 <= b);
        self.atoms[lo..hi.max(lo)].iter().map(|x| x.1).sum()
    }

    /// `ρ((a, b))`.
    pub fn mass_open(&self, a: f64, b: f64) -> f64 {
        self.density_mass_between(a, b) + self.atoms_where(|x| a < x && x < b)
    }

    /// `ρ([a, b))`, either endpoint may be infinite.
    pub fn mass_half_open(&self, a: f64, b: f64) -> f64 {
        self.density_mass_between(a, b) + self.atoms_where(|x| a <= x && x < b)
    }

    pub fn mean(&self) -> f64 {
        self.moments().1
    }

    /// Variance, taking density samples as point masses at the nodes.
    pub fn variance(&self) -> f64 {
        let (m0, m1, m2) = self.raw_moments();
        m2 / m0 - (m1 / m0).powi(2)
    }

    /// `(mass, mean, variance)`.
    pub fn moments(&self) -> (f64, f64, f64) {
        let (m0, m1, m2) = self.raw_moments();
        (m0, m1 / m0, m2 / m0 - (m1 / m0).powi(2))
    }

    fn raw_moments(&self) -> (f64, f64, f64) {
        let mut m = (0.0, 0.0, 0.0);
        for &(x, w) in &self.atoms {
            m.0 += w;
            m.1 += w * x;
            m.2 += w * x * x;
        }
        if let Some(d) = &self.density {
            for (i, v) in d.values.iter().enumerate() {
                let x = d.node(i);
                let w = v * d.dx;
                m.0 += w;
                m.1 += w * x;
                m.2 += w * x * x;
            }
        }
        m
    }

    /// Image under `x ↦ −x`.
    pub fn reflected(&self) -> Self {
        let atoms = self.atoms.iter().map(|&(x, w)| (-x, w)).collect();
        let density = self.density.as_ref().map(|d| {
            let n = d.values.len();
            Density { x0: -(d.x0 + (n - 1) as f64 * d.dx), dx: d.dx, values: d.values.iter().rev().copied().collect() }
        });
        Self::unnormalized(atoms, density).expect("reflection preserves validity")
    }

    /// Every point where the cumulative distribution changes slope or
    /// jumps: cell edges and atom locations.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.atoms.iter().map(|a| a.0).collect();
        if let Some(d) = &self.density {
            out.extend((0..=d.values.len()).map(|i| d.left() + i as f64 * d.dx));
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// `ρ̂(ξ) = ∫ e^{−iξx} dρ(x)`, exact for the cell model.
    pub fn characteristic(&self, xi: f64) -> C64 {
        let mut acc: C64 = self.atoms.iter().map(|&(x, w)| C64::from_polar(w, -xi * x)).sum();
        if let Some(d) = &self.density {
            let u = xi * d.dx / 2.0;
            let sinc = if u.abs() < 1e-8 { 1.0 - u * u / 6.0 } else { u.sin() / u };
            let s: C64 = d.values.iter().enumerate().map(|(i, v)| C64::from_polar(v * d.dx, -xi * d.node(i))).sum();
            acc += s * sinc;
        }
        acc
    }

    /// Total-variation distance `sup_A |ρ(A) − σ(A)|` for measures whose
    /// densities share a lattice (or are absent).
    pub fn total_variation(&self, other: &Self) -> Result<f64> {
        let mut atoms_diff = 0.0;
        let mut locs: Vec<f64> = self.atoms.iter().chain(&other.atoms).map(|a| a.0).collect();
        locs.sort_by(f64::total_cmp);
        locs.dedup();
        for x in locs {
            let a = self.atoms.iter().find(|p| p.0 == x).map_or(0.0, |p| p.1);
            let b = other.atoms.iter().find(|p| p.0 == x).map_or(0.0, |p| p.1);
            atoms_diff += (a - b).abs();
        }
        let dens_diff = match (&self.density, &other.density) {
            (None, None) => 0.0,
            (Some(a), None) | (None, Some(a)) => a.values.iter().sum::<f64>() * a.dx,
            (Some(a), Some(b)) => {
                let m = merge_densities(a, 1.0, b, -1.0)?;
                m.values.iter().map(|v| v.abs()).sum::<f64>() * m.dx
            }
        };
        Ok(0.5 * (atoms_diff + dens_diff))
    }
}

/// `s·a + t·b` on the union of the two lattices. Values may go negative
/// when a coefficient is negative.
fn merge_densities(a: &Density, s: f64, b: &Density, t: f64) -> Result<Density> {
    if (a.dx - b.dx).abs() > 1e-12 * a.dx {
        return Err(Error::GridMismatch(format!("density spacings {} and {}", a.dx, b.dx)));
    }
    let offset = (b.x0 - a.x0) / a.dx;
    if (offset - offset.round()).abs() > 1e-6 {
        return Err(Error::GridMismatch("density lattices are not aligned".into()));
    }
    let offset = offset.round() as i64;
    let start = offset.min(0);
    let end = (a.values.len() as i64).max(offset + b.values.len() as i64);
    let mut values = vec![0.0; (end - start) as usize];
    for (i, v) in a.values.iter().enumerate() {
        values[(i as i64 - start) as usize] += s * v;
    }
    for (i, v) in b.values.iter().enumerate() {
        values[(i as i64 + offset - start) as usize] += t * v;
    }
    Ok(Density { x0: a.x0 + start as f64 * a.dx, dx: a.dx, values })
}
