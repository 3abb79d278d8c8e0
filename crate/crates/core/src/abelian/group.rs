use std::collections::BTreeSet;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// `Z_{n_1} × … × Z_{n_r}`. Elements are linear indices in mixed radix with
/// the last coordinate varying fastest. The dual group uses the same moduli.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct FiniteAbelianGroup {
    moduli: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    moduli: Vec<usize>,
}

impl TryFrom<GroupRepr> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(r: GroupRepr) -> Result<Self> {
        FiniteAbelianGroup::new(r.moduli)
    }
}

impl From<FiniteAbelianGroup> for GroupRepr {
    fn from(g: FiniteAbelianGroup) -> Self {
        GroupRepr { moduli: g.moduli }
    }
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() || moduli.contains(&0) {
            return Err(Error::InvalidGroup(format!("moduli {moduli:?} must be nonempty and positive")));
        }
        Ok(Self { moduli })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn coords(&self, mut g: usize) -> Vec<usize> {
        let mut c = vec![0; self.moduli.len()];
        for (slot, &n) in c.iter_mut().zip(&self.moduli).rev() {
            *slot = g % n;
            g /= n;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.moduli.len() {
            return Err(Error::DimensionMismatch { expected: self.moduli.len(), found: coords.len() });
        }
        let mut g = 0;
        for (&c, &n) in coords.iter().zip(&self.moduli) {
            if c >= n {
                return Err(Error::InvalidArgument(format!("coordinate {c} out of range for Z_{n}")));
            }
            g = g * n + c;
        }
        Ok(g)
    }

    fn combine(&self, a: usize, b: usize, f: impl Fn(usize, usize, usize) -> usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let mut g = 0;
        for ((&x, &y), &n) in ca.iter().zip(&cb).zip(&self.moduli) {
            g = g * n + f(x, y, n);
        }
        g
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + y) % n)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.combine(a, b, |x, y, n| (x + n - y) % n)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.sub(0, a)
    }

    /// `⟨x, g⟩ = exp(2πi Σ x_i g_i / n_i)` for `x` in the dual group.
    pub fn pairing(&self, x: usize, g: usize) -> C64 {
        C64::from_polar(1.0, TAU * self.pairing_turns(x, g))
    }

    /// The pairing's phase in turns, reduced to `[0, 1)`.
    pub fn pairing_turns(&self, x: usize, g: usize) -> f64 {
        let (cx, cg) = (self.coords(x), self.coords(g));
        let t: f64 = cx
            .iter()
            .zip(&cg)
            .zip(&self.moduli)
            .map(|((&a, &b), &n)| ((a * b) % n) as f64 / n as f64)
            .sum();
        t.fract()
    }

    pub fn label(&self) -> String {
        self.moduli.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("x")
    }
}

/// A subgroup, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<usize>,
}

impl Subgroup {
    /// The subgroup generated by `generators`.
    pub fn generated(parent: &FiniteAbelianGroup, generators: &[usize]) -> Result<Self> {
        let order = parent.order();
        if let Some(&bad) = generators.iter().find(|&&g| g >= order) {
            return Err(Error::NotASubgroup(format!("generator {bad} is not an element of {}", parent.label())));
        }
        let mut set = BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(a) = frontier.pop() {
            for &g in generators {
                let b = parent.add(a, g);
                if set.insert(b) {
                    frontier.push(b);
                }
            }
        }
        Ok(Self { parent: parent.clone(), elements: set.into_iter().collect() })
    }

    /// Validates an explicit element list.
    pub fn from_elements(parent: &FiniteAbelianGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if !set.contains(&0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        if let Some(&bad) = set.iter().find(|&&g| g >= parent.order()) {
            return Err(Error::NotASubgroup(format!("{bad} is not an element of {}", parent.label())));
        }
        for &a in &set {
            for &b in &set {
                let c = parent.add(a, b);
                if !set.contains(&c) {
                    return Err(Error::NotASubgroup(format!("{a} + {b} = {c} not in the set")));
                }
            }
        }
        Ok(Self { parent: parent.clone(), elements: set.into_iter().collect() })
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self { parent: parent.clone(), elements: vec![0] }
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        Self { parent: parent.clone(), elements: parent.elements().collect() }
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    /// Cosets of this subgroup in its parent.
    pub fn cosets(&self) -> Cosets {
        Cosets::new(self)
    }
}

/// `H⊥ = {y ∈ Ĝ : ⟨y, h⟩ = 1 for all h ∈ H}`, as a subgroup of the dual.
pub fn annihilator(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Subgroup> {
    if h.parent() != group {
        return Err(Error::NotASubgroup(format!(
            "subgroup of {} used with {}",
            h.parent().label(),
            group.label()
        )));
    }
    let elements: Vec<usize> = group
        .elements()
        .filter(|&y| h.elements().iter().all(|&g| (group.pairing(y, g) - 1.0).norm() < 1e-9))
        .collect();
    Ok(Subgroup { parent: group.clone(), elements })
}

/// The partition of a group into cosets of a subgroup. Each coset is
/// represented by its smallest element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cosets {
    reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl Cosets {
    fn new(h: &Subgroup) -> Self {
        let g = h.parent();
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for a in g.elements() {
            if coset_of[a] != usize::MAX {
                continue;
            }
            for &s in h.elements() {
                coset_of[g.add(a, s)] = reps.len();
            }
            reps.push(a);
        }
        Self { reps, coset_of }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    /// Position of the coset containing `g` in [`Cosets::reps`].
    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    pub fn rep_of(&self, g: usize) -> usize {
        self.reps[self.coset_of[g]]
    }
}

/// Fourier cotransform from `G/H` to `H⊥`:
/// `F̄(ω)(y) = Σ_ċ ⟨y, c⟩ ω(ċ) / |G/H|`.
///
/// With weight `1/|G/H|` per coset and counting measure on `H⊥` this map is
/// unitary, and `F̄(1)` is the point mass at the trivial character.
/// `omega` is indexed like [`Cosets::reps`]; the result like `hperp.elements()`.
pub fn quotient_cotransform(group: &FiniteAbelianGroup, cosets: &Cosets, hperp: &Subgroup, omega: &[C64]) -> Vec<C64> {
    let n = cosets.len() as f64;
    hperp
        .elements()
        .iter()
        .map(|&y| {
            cosets
                .reps()
                .iter()
                .zip(omega)
                .map(|(&c, &w)| group.pairing(y, c) * w)
                .sum::<C64>()
                / n
        })
        .collect()
}
