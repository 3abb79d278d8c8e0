use super::group::{annihilator, quotient_cotransform, Cosets, FiniteAbelianGroup, Subgroup};
use crate::hilbert::spectral_norm;
use crate::{CMatrix, CVector, Error, Result, C64};

/// The two realisations of the induced representation that Σ connects.
///
/// The source space holds functions `f(g, ẋ)` on `G × Ĝ/H⊥` with
/// `f(g + h, ẋ) = conj⟨x, h⟩ f(g, ẋ)` for `h ∈ H`, normed by
/// `Σ_{ġ, ẋ} |f(g, ẋ)|² ν(ẋ) / |G/H|`. The target space is `L²(Ĝ, ν̃)` with
/// `ν̃(x) = ν(ẋ)`. Source functions are stored densely, index
/// `g · |Ĝ/H⊥| + coset(x)`.
#[derive(Clone, Debug)]
pub struct SigmaSpace {
    group: FiniteAbelianGroup,
    h: Subgroup,
    hperp: Subgroup,
    g_cosets: Cosets,
    x_cosets: Cosets,
    nu: Vec<f64>,
}

impl SigmaSpace {
    /// `nu` is a positive weight per coset of `H⊥`, indexed like
    /// [`SigmaSpace::dual_cosets`].
    pub fn new(group: &FiniteAbelianGroup, h: &Subgroup, nu: Vec<f64>) -> Result<Self> {
        let hperp = annihilator(group, h)?;
        let x_cosets = hperp.cosets();
        if nu.len() != x_cosets.len() {
            return Err(Error::DimensionMismatch { expected: x_cosets.len(), found: nu.len() });
        }
        if nu.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument("ν must be positive on every coset".into()));
        }
        Ok(Self { group: group.clone(), h: h.clone(), g_cosets: h.cosets(), x_cosets, hperp, nu })
    }

    pub fn with_unit_nu(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Self> {
        let n = annihilator(group, h)?.cosets().len();
        Self::new(group, h, vec![1.0; n])
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn hperp(&self) -> &Subgroup {
        &self.hperp
    }

    pub fn cosets(&self) -> &Cosets {
        &self.g_cosets
    }

    pub fn dual_cosets(&self) -> &Cosets {
        &self.x_cosets
    }

    pub fn source_len(&self) -> usize {
        self.group.order() * self.x_cosets.len()
    }

    fn idx(&self, g: usize, xc: usize) -> usize {
        g * self.x_cosets.len() + xc
    }

    /// `ν̃(x) = ν(ẋ)`.
    pub fn nu_tilde(&self) -> Vec<f64> {
        self.group.elements().map(|x| self.nu[self.x_cosets.coset_of(x)]).collect()
    }

    /// Extends values given on coset representatives (`rep_values[ġ][ẋ]`)
    /// to an equivariant function on all of `G`.
    pub fn extend(&self, rep_values: &[Vec<C64>]) -> Vec<C64> {
        let mut f = vec![C64::new(0.0, 0.0); self.source_len()];
        for g in self.group.elements() {
            let c = self.g_cosets.coset_of(g);
            let r = self.g_cosets.reps()[c];
            let h = self.group.sub(g, r);
            for (xc, &x) in self.x_cosets.reps().iter().enumerate() {
                f[self.idx(g, xc)] = self.group.pairing(x, h).conj() * rep_values[c][xc];
            }
        }
        f
    }

    /// `max |f(g + h, ẋ) − conj⟨x, h⟩ f(g, ẋ)|`.
    pub fn equivariance_defect(&self, f: &[C64]) -> f64 {
        let mut worst = 0.0f64;
        for g in self.group.elements() {
            for &h in self.h.elements() {
                let gh = self.group.add(g, h);
                for (xc, &x) in self.x_cosets.reps().iter().enumerate() {
                    let d = f[self.idx(gh, xc)] - self.group.pairing(x, h).conj() * f[self.idx(g, xc)];
                    worst = worst.max(d.norm());
                }
            }
        }
        worst
    }

    /// `(Σf)(x) = Σ_ġ ⟨x, g⟩ f(g, ẋ) / |G/H|`.
    pub fn sigma_transform(&self, f: &[C64]) -> Result<Vec<C64>> {
        if f.len() != self.source_len() {
            return Err(Error::DimensionMismatch { expected: self.source_len(), found: f.len() });
        }
        let defect = self.equivariance_defect(f);
        if defect > 1e-9 {
            return Err(Error::NotEquivariant(defect));
        }
        let n = self.g_cosets.len() as f64;
        Ok(self
            .group
            .elements()
            .map(|x| {
                let xc = self.x_cosets.coset_of(x);
                self.g_cosets
                    .reps()
                    .iter()
                    .map(|&g| self.group.pairing(x, g) * f[self.idx(g, xc)])
                    .sum::<C64>()
                    / n
            })
            .collect())
    }

    /// `(Σ*φ)(g, ẋ) = Σ_{y∈H⊥} conj⟨x + y, g⟩ φ(x + y)`.
    pub fn sigma_adjoint(&self, phi: &[C64]) -> Vec<C64> {
        let mut f = vec![C64::new(0.0, 0.0); self.source_len()];
        for g in self.group.elements() {
            for (xc, &x) in self.x_cosets.reps().iter().enumerate() {
                f[self.idx(g, xc)] = self
                    .hperp
                    .elements()
                    .iter()
                    .map(|&y| {
                        let z = self.group.add(x, y);
                        self.group.pairing(z, g).conj() * phi[z]
                    })
                    .sum();
            }
        }
        f
    }

    pub fn source_norm(&self, f: &[C64]) -> f64 {
        let n = self.g_cosets.len() as f64;
        let mut s = 0.0;
        for &g in self.g_cosets.reps() {
            for xc in 0..self.x_cosets.len() {
                s += f[self.idx(g, xc)].norm_sqr() * self.nu[xc] / n;
            }
        }
        s.sqrt()
    }

    pub fn target_norm(&self, phi: &[C64]) -> f64 {
        phi.iter().zip(self.nu_tilde()).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
    }

    /// `(λ(a)f)(g, ẋ) = f(g − a, ẋ)`.
    pub fn translate(&self, a: usize, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for g in self.group.elements() {
            let src = self.group.sub(g, a);
            for xc in 0..self.x_cosets.len() {
                out[self.idx(g, xc)] = f[self.idx(src, xc)];
            }
        }
        out
    }

    /// `(Λ(a)φ)(x) = ⟨x, a⟩ φ(x)`.
    pub fn modulate(&self, a: usize, phi: &[C64]) -> Vec<C64> {
        phi.iter().enumerate().map(|(x, v)| self.group.pairing(x, a) * v).collect()
    }

    /// Multiplication by `ω(ġ)`, `omega` indexed like [`SigmaSpace::cosets`].
    pub fn multiply(&self, omega: &[C64], f: &[C64]) -> Vec<C64> {
        let mut out = f.to_vec();
        for g in self.group.elements() {
            let w = omega[self.g_cosets.coset_of(g)];
            for xc in 0..self.x_cosets.len() {
                out[self.idx(g, xc)] *= w;
            }
        }
        out
    }

    /// Orthonormal basis of the source space.
    pub fn source_basis(&self) -> Vec<Vec<C64>> {
        let (nc, nx) = (self.g_cosets.len(), self.x_cosets.len());
        let mut out = Vec::with_capacity(nc * nx);
        for c in 0..nc {
            for xc in 0..nx {
                let mut reps = vec![vec![C64::new(0.0, 0.0); nx]; nc];
                reps[c][xc] = C64::new((nc as f64 / self.nu[xc]).sqrt(), 0.0);
                out.push(self.extend(&reps));
            }
        }
        out
    }

    /// Target vector in orthonormal coordinates, `φ(x)·√ν̃(x)`.
    fn target_coords(&self, phi: &[C64]) -> CVector {
        let nt = self.nu_tilde();
        CVector::from_iterator(phi.len(), phi.iter().zip(nt).map(|(v, w)| v * w.sqrt()))
    }

    /// Matrix of `op ∘ Σ` between orthonormal bases.
    fn matrix_of(&self, mut op: impl FnMut(&[C64]) -> Result<Vec<C64>>) -> Result<CMatrix> {
        let basis = self.source_basis();
        let cols = basis
            .iter()
            .map(|b| op(b).map(|phi| self.target_coords(&phi)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_columns(&cols))
    }

    /// `‖Σ*Σ − I‖₂` in orthonormal coordinates.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let m = self.matrix_of(|f| self.sigma_transform(f))?;
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let d = m.ncols();
        Ok(spectral_norm(&(m.adjoint() * &m - CMatrix::identity(d, d)))
            .max(spectral_norm(&(&m * m.adjoint() - CMatrix::identity(d, d)))))
    }

    /// `‖Σλ(a) − Λ(a)Σ‖₂`.
    pub fn intertwining_defect(&self, a: usize) -> Result<f64> {
        let lhs = self.matrix_of(|f| self.sigma_transform(&self.translate(a, f)))?;
        let rhs = self.matrix_of(|f| self.sigma_transform(f).map(|phi| self.modulate(a, &phi)))?;
        Ok(spectral_norm(&(lhs - rhs)))
    }
}

/// `(P̃(ω)φ)(x) = Σ_{y∈H⊥} F̄(ω)(y) φ(x − y)` for `ω` on `G/H` (indexed like
/// `h.cosets()`) and `φ` on the dual group.
pub fn translated_pvm_apply(group: &FiniteAbelianGroup, h: &Subgroup, omega: &[C64], phi: &[C64]) -> Result<Vec<C64>> {
    let hperp = annihilator(group, h)?;
    let cosets = h.cosets();
    if omega.len() != cosets.len() {
        return Err(Error::DimensionMismatch { expected: cosets.len(), found: omega.len() });
    }
    if phi.len() != group.order() {
        return Err(Error::DimensionMismatch { expected: group.order(), found: phi.len() });
    }
    let fbar = quotient_cotransform(group, &cosets, &hperp, omega);
    Ok(group
        .elements()
        .map(|x| {
            hperp
                .elements()
                .iter()
                .zip(&fbar)
                .map(|(&y, &c)| c * phi[group.sub(x, y)])
                .sum()
        })
        .collect())
}

/// Matrix of `P̃(ω)` in the standard basis of `C^Ĝ`.
pub fn translated_pvm_matrix(group: &FiniteAbelianGroup, h: &Subgroup, omega: &[C64]) -> Result<CMatrix> {
    let n = group.order();
    let cols = (0..n)
        .map(|x| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[x] = C64::new(1.0, 0.0);
            translated_pvm_apply(group, h, omega, &e).map(|v| CVector::from_vec(v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Operator;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn space(n: usize, gen: usize, rng: &mut ChaCha8Rng) -> SigmaSpace {
        let g = FiniteAbelianGroup::cyclic(n).unwrap();
        let h = Subgroup::generated(&g, &[gen]).unwrap();
        let k = annihilator(&g, &h).unwrap().cosets().len();
        SigmaSpace::new(&g, &h, (0..k).map(|_| rng.random_range(0.2..3.0)).collect()).unwrap()
    }

    fn random_equivariant(s: &SigmaSpace, rng: &mut ChaCha8Rng) -> Vec<C64> {
        let reps: Vec<Vec<C64>> = (0..s.cosets().len()).map(|_| random_vec(rng, s.dual_cosets().len())).collect();
        s.extend(&reps)
    }

    #[test]
    fn identity_coset_constant() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let s = SigmaSpace::with_unit_nu(&g, &h).unwrap();
        let mut reps = vec![vec![c(0.0); 2]; 2];
        reps[0] = vec![c(1.0); 2];
        let f = s.extend(&reps);
        let phi = s.sigma_transform(&f).unwrap();
        for v in phi {
            assert!((v - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn z2_is_two_point_cotransform() {
        let g = FiniteAbelianGroup::cyclic(2).unwrap();
        let h = Subgroup::trivial(&g);
        let s = SigmaSpace::with_unit_nu(&g, &h).unwrap();
        // Ĝ/H⊥ is a single point, so f is a function on Z₂.
        let f = vec![C64::new(0.3, 0.1), C64::new(-0.7, 0.4)];
        let phi = s.sigma_transform(&f).unwrap();
        let dft = [[c(0.5), c(0.5)], [c(0.5), c(-0.5)]];
        for x in 0..2 {
            let expected = dft[x][0] * f[0] + dft[x][1] * f[1];
            assert!((phi[x] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_equivariant_input() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let s = SigmaSpace::with_unit_nu(&g, &h).unwrap();
        let mut f = vec![c(0.0); s.source_len()];
        f[0] = c(1.0);
        assert!(matches!(s.sigma_transform(&f), Err(Error::NotEquivariant(_))));
    }

    #[test]
    fn unitary_and_intertwining() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, gen) in [(4, 2), (6, 3), (6, 2), (8, 0)] {
            let s = space(n, gen, &mut rng);
            assert!(s.unitarity_defect().unwrap() < 1e-12);
            for a in 0..n {
                assert!(s.intertwining_defect(a).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_omega_is_identity() {
        let g = FiniteAbelianGroup::cyclic(6).unwrap();
        let h = Subgroup::generated(&g, &[3]).unwrap();
        let m = translated_pvm_matrix(&g, &h, &vec![c(1.0); 3]).unwrap();
        assert!((m - CMatrix::identity(6, 6)).norm() < 1e-14);
    }

    #[test]
    fn one_coset_indicator_z4() {
        // F̄(1_ċ)(y) = ⟨y,c⟩/2 on H⊥ = {0,2}: P̃φ(x) = (φ(x) + ⟨2,c⟩φ(x−2))/2.
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, &[2]).unwrap();
        let phi = vec![C64::new(1.0, 2.0), c(-1.0), C64::new(0.0, 3.0), c(0.5)];
        for coset in 0..2 {
            let mut omega = vec![c(0.0); 2];
            omega[coset] = c(1.0);
            let out = translated_pvm_apply(&g, &h, &omega, &phi).unwrap();
            let sign = if coset == 0 { 1.0 } else { -1.0 };
            for x in 0..4 {
                let expected = (phi[x] + phi[(x + 2) % 4] * sign) / 2.0;
                assert!((out[x] - expected).norm() < 1e-15);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn norm_preserved(seed in any::<u64>(), which in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = if which == 0 { space(4, 2, &mut rng) } else { space(6, 3, &mut rng) };
            let f = random_equivariant(&s, &mut rng);
            let phi = s.sigma_transform(&f).unwrap();
            prop_assert!((s.source_norm(&f) - s.target_norm(&phi)).abs() < 1e-12);
            let back = s.sigma_adjoint(&phi);
            for (a, b) in f.iter().zip(&back) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn pvm_is_conjugated_multiplication(seed in any::<u64>(), which in 0usize..2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = if which == 0 { space(4, 2, &mut rng) } else { space(6, 3, &mut rng) };
            let omega = random_vec(&mut rng, s.cosets().len());
            let phi = random_vec(&mut rng, s.group().order());
            let direct = translated_pvm_apply(s.group(), &Subgroup::generated(s.group(), &[if which == 0 { 2 } else { 3 }]).unwrap(), &omega, &phi).unwrap();
            let via = s.sigma_transform(&s.multiply(&omega, &s.sigma_adjoint(&phi))).unwrap();
            for (a, b) in direct.iter().zip(&via) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn real_unit_omega_gives_effect(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
            let h = Subgroup::generated(&g, &[2]).unwrap();
            let omega: Vec<C64> = (0..h.cosets().len()).map(|_| c(rng.random_range(0.0..1.0))).collect();
            let m = Operator::new(translated_pvm_matrix(&g, &h, &omega).unwrap()).unwrap();
            prop_assert!(m.is_hermitian(1e-12));
            let ev = m.eigenvalues();
            prop_assert!(ev[0] >= -1e-10 && ev[ev.len() - 1] <= 1.0 + 1e-10);
        }
    }
}
