use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::group::{annihilator, quotient_cotransform, Cosets, FiniteAbelianGroup, Subgroup};
use crate::hilbert::{orthonormalize, spectral_norm};
use crate::{CMatrix, CVector, Cell, Effect, Error, Operator, Outcome, Pom, Result, C64};

/// One isotypic block of a representation diagonal in the dual basis:
/// a weight on each dual element and a multiplicity space dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    /// Dual-element index to weight; missing entries are zero.
    pub weights: BTreeMap<usize, f64>,
    pub mult: usize,
}

/// Serialised form of a [`DiagonalRep`] (the group is supplied separately).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    pub blocks: Vec<BlockSpec>,
}

/// A unitary representation of a finite abelian group, decomposed into
/// blocks whose weight supports in the dual group are pairwise disjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalRep {
    group: FiniteAbelianGroup,
    weights: Vec<Vec<f64>>,
    mults: Vec<usize>,
    basis: Vec<BasisLabel>,
}

/// Basis vector `δ_point ⊗ f_slot` of block `block`, normalised in the
/// block's weighted space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisLabel {
    pub block: usize,
    pub point: usize,
    pub slot: usize,
}

impl DiagonalRep {
    pub fn new(group: FiniteAbelianGroup, spec: &RepSpec) -> Result<Self> {
        let order = group.order();
        let mut weights = Vec::with_capacity(spec.blocks.len());
        let mut mults = Vec::with_capacity(spec.blocks.len());
        let mut owner: Vec<Option<usize>> = vec![None; order];
        for (k, b) in spec.blocks.iter().enumerate() {
            if b.mult == 0 {
                return Err(Error::InvalidRepresentation(format!("block {k} has multiplicity 0")));
            }
            let mut w = vec![0.0; order];
            for (&x, &v) in &b.weights {
                if x >= order {
                    return Err(Error::InvalidRepresentation(format!("dual index {x} out of range")));
                }
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidRepresentation(format!("weight {v} at {x} is negative")));
                }
                if v > 0.0 {
                    if let Some(other) = owner[x] {
                        return Err(Error::InvalidRepresentation(format!(
                            "blocks {other} and {k} both charge dual element {x}"
                        )));
                    }
                    owner[x] = Some(k);
                }
                w[x] = v;
            }
            weights.push(w);
            mults.push(b.mult);
        }
        if owner.iter().all(Option::is_none) {
            return Err(Error::InvalidRepresentation("all weights vanish".into()));
        }
        let mut basis = Vec::new();
        for (k, w) in weights.iter().enumerate() {
            for (x, &v) in w.iter().enumerate() {
                if v > 0.0 {
                    basis.extend((0..mults[k]).map(|slot| BasisLabel { block: k, point: x, slot }));
                }
            }
        }
        Ok(Self { group, weights, mults, basis })
    }

    /// A single block with uniform weight on every dual element.
    pub fn uniform(group: FiniteAbelianGroup, mult: usize) -> Result<Self> {
        let n = group.order();
        let weights = (0..n).map(|x| (x, 1.0 / n as f64)).collect();
        Self::new(group, &RepSpec { blocks: vec![BlockSpec { weights, mult }] })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn num_blocks(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, block: usize, point: usize) -> f64 {
        self.weights[block][point]
    }

    pub fn mult(&self, block: usize) -> usize {
        self.mults[block]
    }

    /// Dual elements charged by `block`, ascending.
    pub fn support(&self, block: usize) -> Vec<usize> {
        self.weights[block].iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(x, _)| x).collect()
    }

    pub fn basis(&self) -> &[BasisLabel] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `ρ = Σ_k ρ_k`.
    pub fn total_weight(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.group.order()];
        for w in &self.weights {
            for (o, v) in out.iter_mut().zip(w) {
                *o += v;
            }
        }
        out
    }

    /// `U(g)`, diagonal with entries `⟨x, g⟩`.
    pub fn unitary(&self, g: usize) -> Operator {
        let d: Vec<C64> = self.basis.iter().map(|b| self.group.pairing(b.point, g)).collect();
        Operator::diagonal_complex(&d)
    }

    pub fn to_spec(&self) -> RepSpec {
        RepSpec {
            blocks: self
                .weights
                .iter()
                .zip(&self.mults)
                .map(|(w, &mult)| BlockSpec {
                    weights: w.iter().enumerate().filter(|(_, &v)| v > 0.0).map(|(x, &v)| (x, v)).collect(),
                    mult,
                })
                .collect(),
        }
    }
}

/// Output of [`covariance_densities`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Densities {
    /// Always true for finite groups, since `ν̃ ≥ ρ` pointwise.
    pub admits: bool,
    /// `ν̃(x) = Σ_{y∈H⊥} ρ(x + y)`, times the optional rescaling.
    pub nu_tilde: Vec<f64>,
    /// `α_k(x) = ρ_k(x)/ν̃(x)` on the support of `ρ_k`, zero elsewhere.
    pub alpha: Vec<Vec<f64>>,
}

pub fn covariance_densities(rep: &DiagonalRep, h: &Subgroup) -> Result<Densities> {
    covariance_densities_rescaled(rep, h, None)
}

/// As [`covariance_densities`], with `ν` replaced by `β·ν` for a positive
/// function `β` on `Ĝ/H⊥` (indexed like the cosets of `H⊥`).
pub fn covariance_densities_rescaled(rep: &DiagonalRep, h: &Subgroup, beta: Option<&[f64]>) -> Result<Densities> {
    let g = rep.group();
    let hperp = annihilator(g, h)?;
    let dual_cosets = hperp.cosets();
    if let Some(b) = beta {
        if b.len() != dual_cosets.len() {
            return Err(Error::DimensionMismatch { expected: dual_cosets.len(), found: b.len() });
        }
        if b.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument("rescaling must be positive".into()));
        }
    }
    let rho = rep.total_weight();
    let nu_tilde: Vec<f64> = g
        .elements()
        .map(|x| {
            let base: f64 = hperp.elements().iter().map(|&y| rho[g.add(x, y)]).sum();
            base * beta.map_or(1.0, |b| b[dual_cosets.coset_of(x)])
        })
        .collect();
    let alpha = (0..rep.num_blocks())
        .map(|k| {
            g.elements()
                .map(|x| {
                    let w = rep.weight(k, x);
                    if w > 0.0 { w / nu_tilde[x] } else { 0.0 }
                })
                .collect()
        })
        .collect();
    Ok(Densities { admits: true, nu_tilde, alpha })
}

/// Isometries `W_k(x): C^{mult_k} → C^{aux_dim}`, one per block and per
/// charged dual element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryFamily {
    pub aux_dim: usize,
    pub blocks: Vec<IsometryBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryBlock {
    #[serde(with = "matrix_map")]
    pub entries: BTreeMap<usize, CMatrix>,
}

impl IsometryFamily {
    /// Checks shapes against `rep` and `W*W = I` to 1e-12.
    pub fn validate(&self, rep: &DiagonalRep) -> Result<()> {
        if self.blocks.len() != rep.num_blocks() {
            return Err(Error::DimensionMismatch { expected: rep.num_blocks(), found: self.blocks.len() });
        }
        for (k, blk) in self.blocks.iter().enumerate() {
            for x in rep.support(k) {
                let w = blk.entries.get(&x).ok_or_else(|| {
                    Error::InvalidArgument(format!("isometry missing for block {k} at dual element {x}"))
                })?;
                if w.nrows() != self.aux_dim || w.ncols() != rep.mult(k) {
                    return Err(Error::DimensionMismatch { expected: self.aux_dim * rep.mult(k), found: w.len() });
                }
                let defect = spectral_norm(&(w.adjoint() * w - CMatrix::identity(w.ncols(), w.ncols())));
                if defect > 1e-12 {
                    return Err(Error::NotAnIsometry { block: k, point: x, defect });
                }
            }
        }
        Ok(())
    }

    /// The same isometry at every charged point of every block.
    pub fn constant(rep: &DiagonalRep, aux_dim: usize, w: &CMatrix) -> Self {
        let blocks = (0..rep.num_blocks())
            .map(|k| IsometryBlock { entries: rep.support(k).into_iter().map(|x| (x, w.clone())).collect() })
            .collect();
        Self { aux_dim, blocks }
    }

    /// Independent random isometries (orthonormalised uniform samples).
    pub fn random<R: Rng>(rep: &DiagonalRep, aux_dim: usize, rng: &mut R) -> Result<Self> {
        let blocks = (0..rep.num_blocks())
            .map(|k| {
                let entries = rep
                    .support(k)
                    .into_iter()
                    .map(|x| Ok((x, random_isometry(rng, aux_dim, rep.mult(k))?)))
                    .collect::<Result<_>>()?;
                Ok(IsometryBlock { entries })
            })
            .collect::<Result<_>>()?;
        Ok(Self { aux_dim, blocks })
    }

    /// `V·W_k(x)` for every entry.
    pub fn left_multiplied(&self, v: &CMatrix) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| IsometryBlock { entries: b.entries.iter().map(|(&x, w)| (x, v * w)).collect() })
            .collect();
        Self { aux_dim: v.nrows(), blocks }
    }
}

/// A random `rows × cols` matrix with orthonormal columns.
pub fn random_isometry<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Result<CMatrix> {
    if cols > rows {
        return Err(Error::InvalidArgument(format!("no isometry C^{cols} → C^{rows}")));
    }
    let cols_v: Vec<CVector> = (0..cols)
        .map(|_| CVector::from_fn(rows, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        .collect();
    let q = orthonormalize(&cols_v)?;
    Ok(CMatrix::from_columns(&q))
}

/// A random `d × d` unitary.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> Result<CMatrix> {
    random_isometry(rng, d, d)
}

fn space_tag(group: &FiniteAbelianGroup, h: &Subgroup) -> String {
    format!("{}/{:?}", group.label(), h.elements())
}

fn coset_cell(group: &FiniteAbelianGroup, rep: usize) -> Cell {
    Cell::Group { element: group.coords(rep) }
}

/// The covariant POM on `G/H` determined by `rep`, `H` and the isometry
/// family `w`, using the push-forward densities.
pub fn build_covariant_pom(rep: &DiagonalRep, h: &Subgroup, w: &IsometryFamily) -> Result<Pom> {
    let dens = covariance_densities(rep, h)?;
    build_covariant_pom_with(rep, h, w, &dens)
}

/// As [`build_covariant_pom`] with caller-supplied densities.
pub fn build_covariant_pom_with(rep: &DiagonalRep, h: &Subgroup, w: &IsometryFamily, dens: &Densities) -> Result<Pom> {
    w.validate(rep)?;
    let g = rep.group();
    let hperp = annihilator(g, h)?;
    let cosets = h.cosets();
    let basis = rep.basis();
    let dim = basis.len();

    for b in basis {
        if dens.alpha[b.block][b.point] <= 0.0 {
            return Err(Error::VanishingDensity { block: b.block, point: b.point });
        }
    }

    // F̄(1_ċ)(y) for every coset ċ and every y ∈ H⊥.
    let n_cos = cosets.len();
    let fbar: Vec<Vec<C64>> = (0..n_cos)
        .map(|c| {
            let mut omega = vec![C64::new(0.0, 0.0); n_cos];
            omega[c] = C64::new(1.0, 0.0);
            quotient_cotransform(g, &cosets, &hperp, &omega)
        })
        .collect();
    let hperp_pos: BTreeMap<usize, usize> = hperp.elements().iter().enumerate().map(|(i, &y)| (y, i)).collect();

    let mut mats = vec![CMatrix::zeros(dim, dim); n_cos];
    for (r, a) in basis.iter().enumerate() {
        for (s, b) in basis.iter().enumerate() {
            let y = g.sub(a.point, b.point);
            let Some(&yi) = hperp_pos.get(&y) else { continue };
            let wa = &w.blocks[a.block].entries[&a.point];
            let wb = &w.blocks[b.block].entries[&b.point];
            let gram: C64 = (0..w.aux_dim).map(|t| wa[(t, a.slot)].conj() * wb[(t, b.slot)]).sum();
            let alpha_ratio = (dens.alpha[b.block][b.point] / dens.alpha[a.block][a.point]).sqrt();
            let coord = (rep.weight(a.block, a.point) / rep.weight(b.block, b.point)).sqrt();
            let kernel = gram * alpha_ratio * coord;
            for (m, f) in mats.iter_mut().zip(&fbar) {
                m[(r, s)] = f[yi] * kernel;
            }
        }
    }

    let outcomes = cosets
        .reps()
        .iter()
        .map(|&c| Outcome::new(format!("{:?}", g.coords(c)), coset_cell(g, c)))
        .collect();
    let effects = mats.into_iter().map(|m| Effect::new_unchecked(Operator::new(m).expect("square"))).collect();
    Pom::new(space_tag(g, h), outcomes, effects)
}

/// Action of `G` on the coset cells of a POM built over `G/H`.
pub fn coset_action<'a>(group: &'a FiniteAbelianGroup, cosets: &'a Cosets) -> impl Fn(usize, &Cell) -> Option<Cell> + 'a {
    move |a, cell| match cell {
        Cell::Group { element } => {
            let c = group.index(element).ok()?;
            Some(coset_cell(group, cosets.rep_of(group.add(a, c))))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub pass: bool,
    /// `max ‖U(g)E(X)U(g)* − E(g[X])‖₂`.
    pub max_defect: f64,
    pub worst_element: usize,
    pub worst_cell: usize,
    pub tol: f64,
}

/// Checks `U(g)E(X)U(g)* = E(g[X])` for every listed group element and
/// every cell of `pom`.
pub fn verify_covariance(
    pom: &Pom,
    elements: impl IntoIterator<Item = usize>,
    unitary: impl Fn(usize) -> Operator,
    action: impl Fn(usize, &Cell) -> Option<Cell>,
    tol: f64,
) -> Result<CovarianceReport> {
    if pom.is_empty() {
        return Err(Error::EmptyPom);
    }
    let mut report = CovarianceReport { pass: true, max_defect: 0.0, worst_element: 0, worst_cell: 0, tol };
    for g in elements {
        let u = unitary(g);
        for (i, (outcome, effect)) in pom.outcomes().iter().zip(pom.effects()).enumerate() {
            let moved = action(g, &outcome.cell)
                .and_then(|c| pom.outcomes().iter().position(|o| o.cell == c))
                .ok_or(Error::ActionNotClosed { element: g, cell: i })?;
            let defect = effect.op().conjugate_by(&u).distance(pom.effects()[moved].op());
            if defect > report.max_defect {
                report.max_defect = defect;
                report.worst_element = g;
                report.worst_cell = i;
            }
        }
    }
    report.pass = report.max_defect <= tol;
    Ok(report)
}

/// Candidate intertwiners: per block, per charged dual element, a unitary on
/// the multiplicity space.
pub type Intertwiners = Vec<BTreeMap<usize, CMatrix>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub max_defect: f64,
    /// `(j, k, x, y)` at the largest defect.
    pub witness: Option<(usize, usize, usize, usize)>,
    /// `max ‖S E(X) S* − E′(X)‖₂`, computed when the pointwise condition holds.
    pub conjugation_defect: Option<f64>,
}

/// Decides whether `S` intertwines the isometry families `w` and `w2`
/// pointwise, and if so confirms that `S` conjugates `e` into `e2`.
#[allow(clippy::too_many_arguments)]
pub fn verify_pom_equivalence(
    rep: &DiagonalRep,
    h: &Subgroup,
    e: &Pom,
    e2: &Pom,
    w: &IsometryFamily,
    w2: &IsometryFamily,
    s: &Intertwiners,
    tol: f64,
) -> Result<EquivalenceReport> {
    w.validate(rep)?;
    w2.validate(rep)?;
    if s.len() != rep.num_blocks() {
        return Err(Error::DimensionMismatch { expected: rep.num_blocks(), found: s.len() });
    }
    for (k, blk) in s.iter().enumerate() {
        for x in rep.support(k) {
            let u = blk
                .get(&x)
                .ok_or_else(|| Error::InvalidArgument(format!("intertwiner missing for block {k} at {x}")))?;
            let m = rep.mult(k);
            if u.nrows() != m || u.ncols() != m {
                return Err(Error::DimensionMismatch { expected: m * m, found: u.len() });
            }
            let defect = spectral_norm(&(u.adjoint() * u - CMatrix::identity(m, m)));
            if defect > tol {
                return Err(Error::NotUnitary { context: format!("S_{k}({x})"), defect });
            }
        }
    }
    let g = rep.group();
    let dens = covariance_densities(rep, h)?;
    let hperp = annihilator(g, h)?;

    let mut max_defect = 0.0f64;
    let mut witness = None;
    for j in 0..rep.num_blocks() {
        for x in rep.support(j) {
            for k in 0..rep.num_blocks() {
                for &y in hperp.elements() {
                    let xy = g.add(x, y);
                    let a = dens.alpha[k][xy];
                    if a <= 0.0 {
                        continue;
                    }
                    let lhs = w.blocks[j].entries[&x].adjoint() * &w.blocks[k].entries[&xy];
                    let rhs = s[j][&x].adjoint()
                        * w2.blocks[j].entries[&x].adjoint()
                        * &w2.blocks[k].entries[&xy]
                        * &s[k][&xy];
                    let d = a.sqrt() * spectral_norm(&(lhs - rhs));
                    if d > max_defect {
                        max_defect = d;
                        witness = Some((j, k, x, y));
                    }
                }
            }
        }
    }
    let equivalent = max_defect <= tol;
    let conjugation_defect = if equivalent {
        let dim = rep.dim();
        let mut big = DMatrix::<C64>::zeros(dim, dim);
        // Block-diagonal S, written in the basis ordering of `rep`.
        let mut start = 0;
        while start < dim {
            let b = rep.basis()[start];
            let m = rep.mult(b.block);
            big.view_mut((start, start), (m, m)).copy_from(&s[b.block][&b.point]);
            start += m;
        }
        let s_op = Operator::new(big)?;
        let d = e
            .effects()
            .iter()
            .zip(e2.effects())
            .map(|(a, b)| a.op().conjugate_by(&s_op).distance(b.op()))
            .fold(0.0f64, f64::max);
        Some(d)
    } else {
        None
    };
    Ok(EquivalenceReport { equivalent, max_defect, witness, conjugation_defect })
}

/// The identity intertwiner for `rep`.
pub fn identity_intertwiners(rep: &DiagonalRep) -> Intertwiners {
    (0..rep.num_blocks())
        .map(|k| {
            let m = rep.mult(k);
            rep.support(k).into_iter().map(|x| (x, CMatrix::identity(m, m))).collect()
        })
        .collect()
}

mod matrix_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::{CMatrix, C64};

    type Rows = Vec<Vec<[f64; 2]>>;

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, CMatrix>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<usize, Rows> = m
            .iter()
            .map(|(&k, w)| {
                let rows = (0..w.nrows()).map(|r| (0..w.ncols()).map(|c| [w[(r, c)].re, w[(r, c)].im]).collect()).collect();
                (k, rows)
            })
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, CMatrix>, D::Error> {
        use serde::de::Error;
        let raw = BTreeMap::<usize, Rows>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, rows)| {
                let nr = rows.len();
                let nc = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != nc) {
                    return Err(D::Error::custom(format!("ragged matrix at key {k}")));
                }
                Ok((k, CMatrix::from_fn(nr, nc, |r, c| C64::new(rows[r][c][0], rows[r][c][1]))))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check_pom_axioms;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_column() -> CMatrix {
        CMatrix::from_element(1, 1, C64::new(1.0, 0.0))
    }

    #[test]
    fn z2_densities() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
        let h = Subgroup::trivial(&g);
        let d = covariance_densities(&rep, &h).unwrap();
        assert!(d.admits);
        // Push-forward: ν̃ ≡ 1/2 + 1/2 = 1, so α = ρ/ν̃ = 1/2.
        assert_eq!(d.nu_tilde, vec![1.0, 1.0]);
        assert_eq!(d.alpha[0], vec![0.5, 0.5]);
        // Rescaling ν by β = 1/2 normalises α to 1.
        let r = covariance_densities_rescaled(&rep, &h, Some(&[0.5])).unwrap();
        assert_eq!(r.alpha[0], vec![1.0, 1.0]);
    }

    #[test]
    fn z4_point_mass_densities() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let rep = DiagonalRep::new(g, &RepSpec { blocks: vec![BlockSpec { weights: BTreeMap::from([(1, 1.0)]), mult: 1 }] }).unwrap();
        let d = covariance_densities(&rep, &h).unwrap();
        assert_eq!(d.alpha[0], vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn sharp_case_is_conjugated_dft() {
        for n in [2usize, 3] {
            let g = FiniteAbelianGroup::cyclic(n).unwrap();
            let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
            let h = Subgroup::trivial(&g);
            let w = IsometryFamily::constant(&rep, 1, &unit_column());
            let pom = build_covariant_pom(&rep, &h, &w).unwrap();
            // F_{x,g} = ⟨x,g⟩/√n; E(g) = F P_g F*.
            let f = CMatrix::from_fn(n, n, |x, a| g.pairing(x, a) / (n as f64).sqrt());
            for (a, e) in pom.effects().iter().enumerate() {
                let mut p = CMatrix::zeros(n, n);
                p[(a, a)] = C64::new(1.0, 0.0);
                let expected = &f * p * f.adjoint();
                assert!((e.op().matrix() - expected).norm() < 1e-14);
            }
            let eff: Vec<Operator> = pom.effects().iter().map(|e| e.op().clone()).collect();
            for a in &eff {
                assert!(a.compose(a).distance(a) < 1e-14, "sharp effects are projections");
            }
        }
    }

    #[test]
    fn whole_group_quotient_is_trivial() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
        let h = Subgroup::whole(&g);
        let w = IsometryFamily::constant(&rep, 1, &unit_column());
        let pom = build_covariant_pom(&rep, &h, &w).unwrap();
        assert_eq!(pom.len(), 1);
        assert!(pom.effects()[0].op().distance(&Operator::identity(2)) < 1e-15);
    }

    #[test]
    fn permuted_effects_fail_covariance() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
        let h = Subgroup::trivial(&g);
        let w = IsometryFamily::constant(&rep, 1, &unit_column());
        let pom = build_covariant_pom(&rep, &h, &w).unwrap();
        let cosets = h.cosets();
        let ok = verify_covariance(&pom, g.elements(), |a| rep.unitary(a), coset_action(&g, &cosets), 1e-10).unwrap();
        assert!(ok.pass && ok.max_defect < 1e-14);

        let mut effects = pom.effects().to_vec();
        effects.swap(0, 1);
        let bad = Pom::new(pom.space_tag.clone(), pom.outcomes().to_vec(), effects).unwrap();
        let r = verify_covariance(&bad, g.elements(), |a| rep.unitary(a), coset_action(&g, &cosets), 1e-10).unwrap();
        assert!(!r.pass && r.max_defect > 0.1);
    }

    #[test]
    fn unclosed_action_is_an_error() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
        let h = Subgroup::trivial(&g);
        let pom = build_covariant_pom(&rep, &h, &IsometryFamily::constant(&rep, 1, &unit_column())).unwrap();
        let r = verify_covariance(&pom, g.elements(), |a| rep.unitary(a), |_, _| None, 1e-10);
        assert!(matches!(r, Err(Error::ActionNotClosed { .. })));
    }

    #[test]
    fn rejects_non_isometries_and_overlaps() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 1).unwrap();
        let w = IsometryFamily::constant(&rep, 1, &CMatrix::from_element(1, 1, C64::new(2.0, 0.0)));
        assert!(matches!(
            build_covariant_pom(&rep, &Subgroup::trivial(&g), &w),
            Err(Error::NotAnIsometry { .. })
        ));
        let overlap = RepSpec {
            blocks: vec![
                BlockSpec { weights: BTreeMap::from([(0, 1.0)]), mult: 1 },
                BlockSpec { weights: BTreeMap::from([(0, 1.0)]), mult: 1 },
            ],
        };
        assert!(DiagonalRep::new(g, &overlap).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let rep = DiagonalRep::uniform(g, 2).unwrap();
        let w = IsometryFamily::random(&rep, 3, &mut rng).unwrap();
        let e = build_covariant_pom(&rep, &h, &w).unwrap();
        let id = identity_intertwiners(&rep);

        let same = verify_pom_equivalence(&rep, &h, &e, &e, &w, &w, &id, 1e-9).unwrap();
        assert!(same.equivalent && same.conjugation_defect.unwrap() < 1e-12);

        let v = random_unitary(&mut rng, 3).unwrap();
        let w2 = w.left_multiplied(&v);
        let e2 = build_covariant_pom(&rep, &h, &w2).unwrap();
        let rotated = verify_pom_equivalence(&rep, &h, &e, &e2, &w, &w2, &id, 1e-9).unwrap();
        assert!(rotated.equivalent && rotated.conjugation_defect.unwrap() < 1e-12);

        let w3 = IsometryFamily::random(&rep, 3, &mut rng).unwrap();
        let e3 = build_covariant_pom(&rep, &h, &w3).unwrap();
        let other = verify_pom_equivalence(&rep, &h, &e, &e3, &w, &w3, &id, 1e-9).unwrap();
        assert!(!other.equivalent && other.witness.is_some() && other.conjugation_defect.is_none());
    }

    #[test]
    fn intertwined_family_is_equivalent() {
        // W′_k(x) = W_k(x)·S_k(x)* gives S_j* W′_j* W′_k S_k = W_j* W_k.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let rep = DiagonalRep::uniform(g, 2).unwrap();
        let w = IsometryFamily::random(&rep, 2, &mut rng).unwrap();
        let s: Intertwiners = vec![rep.support(0).into_iter().map(|x| (x, random_unitary(&mut rng, 2).unwrap())).collect()];
        let w2 = IsometryFamily {
            aux_dim: 2,
            blocks: vec![IsometryBlock {
                entries: w.blocks[0].entries.iter().map(|(&x, m)| (x, m * s[0][&x].adjoint())).collect(),
            }],
        };
        let e = build_covariant_pom(&rep, &h, &w).unwrap();
        let e2 = build_covariant_pom(&rep, &h, &w2).unwrap();
        let r = verify_pom_equivalence(&rep, &h, &e, &e2, &w, &w2, &s, 1e-9).unwrap();
        assert!(r.equivalent, "defect {}", r.max_defect);
        assert!(r.conjugation_defect.unwrap() < 1e-12);
    }

    #[test]
    fn non_unitary_intertwiner_is_an_error() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let h = Subgroup::trivial(&g);
        let rep = DiagonalRep::uniform(g, 1).unwrap();
        let w = IsometryFamily::constant(&rep, 1, &unit_column());
        let e = build_covariant_pom(&rep, &h, &w).unwrap();
        let s = vec![rep.support(0).into_iter().map(|x| (x, CMatrix::from_element(1, 1, C64::new(2.0, 0.0)))).collect()];
        assert!(matches!(verify_pom_equivalence(&rep, &h, &e, &e, &w, &w, &s, 1e-9), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        let rep = DiagonalRep::uniform(g.clone(), 2).unwrap();
        let w = IsometryFamily::random(&rep, 2, &mut rng).unwrap();
        let back: IsometryFamily = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back.blocks.len(), 1);
        for (x, m) in &w.blocks[0].entries {
            assert!((m - &back.blocks[0].entries[x]).norm() < 1e-15);
        }
        let spec: RepSpec = serde_json::from_str(&serde_json::to_string(&rep.to_spec()).unwrap()).unwrap();
        assert_eq!(DiagonalRep::new(g, &spec).unwrap(), rep);
    }

    fn two_block_rep(g: &FiniteAbelianGroup, rng: &mut ChaCha8Rng) -> DiagonalRep {
        let n = g.order();
        let mut blocks = vec![
            BlockSpec { weights: BTreeMap::new(), mult: 1 },
            BlockSpec { weights: BTreeMap::new(), mult: 2 },
        ];
        for x in 0..n {
            let k = rng.random_range(0..2);
            blocks[k].weights.insert(x, rng.random_range(0.1..1.0));
        }
        blocks.retain(|b| !b.weights.is_empty());
        DiagonalRep::new(g.clone(), &RepSpec { blocks }).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn built_poms_are_covariant(seed in any::<u64>(), which in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, gens): (FiniteAbelianGroup, Vec<usize>) = match which {
                0 => (FiniteAbelianGroup::cyclic(4).unwrap(), vec![2]),
                1 => (FiniteAbelianGroup::cyclic(6).unwrap(), vec![3]),
                2 => (FiniteAbelianGroup::new(vec![2, 2]).unwrap(), vec![1]),
                _ => (FiniteAbelianGroup::cyclic(5).unwrap(), vec![]),
            };
            let h = Subgroup::generated(&g, &gens).unwrap();
            let rep = two_block_rep(&g, &mut rng);
            let w = IsometryFamily::random(&rep, 3, &mut rng).unwrap();
            let pom = build_covariant_pom(&rep, &h, &w).unwrap();
            prop_assert!(check_pom_axioms(&pom, 1e-10).unwrap().pass);
            let cosets = h.cosets();
            let r = verify_covariance(&pom, g.elements(), |a| rep.unitary(a), coset_action(&g, &cosets), 1e-10).unwrap();
            prop_assert!(r.pass, "defect {}", r.max_defect);
        }

        #[test]
        fn rescaling_nu_leaves_pom_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = FiniteAbelianGroup::cyclic(6).unwrap();
            let h = Subgroup::generated(&g, &[2]).unwrap();
            let rep = two_block_rep(&g, &mut rng);
            let w = IsometryFamily::random(&rep, 2, &mut rng).unwrap();
            let hp = annihilator(&g, &h).unwrap();
            let beta: Vec<f64> = (0..hp.cosets().len()).map(|_| rng.random_range(0.1..5.0)).collect();
            let d1 = covariance_densities(&rep, &h).unwrap();
            let d2 = covariance_densities_rescaled(&rep, &h, Some(&beta)).unwrap();
            let p1 = build_covariant_pom_with(&rep, &h, &w, &d1).unwrap();
            let p2 = build_covariant_pom_with(&rep, &h, &w, &d2).unwrap();
            for (a, b) in p1.effects().iter().zip(p2.effects()) {
                prop_assert!(a.op().distance(b.op()) < 1e-12);
            }
        }
    }
}
