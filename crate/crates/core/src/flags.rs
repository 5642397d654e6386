//! Flags of subspaces, self-duality, the lattice of a flag, and decisions
//! on whether two flags (optionally paired with subspaces) are isometric.

use crate::error::{Error, Result};
use crate::extend::{
    ensure, extend_preserving_self_dual_flag, extend_preserving_subspace_split, Certificate, Extension,
};
use crate::maps::{Isometry, LinearMap};
use crate::space::{same_ambient, Subspace};
use crate::witt::{subspace_isometric, witt_extend};

/// A chain `{0} = V₀ ⊆ V₁ ⊆ … ⊆ V_k = V`. Repeated members are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flag {
    members: Vec<Subspace>,
}

impl Flag {
    pub fn new(members: Vec<Subspace>) -> Result<Flag> {
        if members.len() < 2 {
            return Err(Error::InvalidFlag("a flag needs at least {0} and the whole space".into()));
        }
        if !members[0].is_zero() {
            return Err(Error::InvalidFlag("the first member must be the zero subspace".into()));
        }
        for (i, pair) in members.windows(2).enumerate() {
            if !same_ambient(pair[0].ambient(), pair[1].ambient()) {
                return Err(Error::AmbientMismatch);
            }
            if !pair[0].is_subspace_of(&pair[1])? {
                return Err(Error::InvalidFlag(format!("member {i} is not contained in member {}", i + 1)));
            }
        }
        Ok(Flag { members })
    }

    /// The flag `{0, V}`.
    pub fn trivial(v: &Subspace) -> Flag {
        Flag { members: vec![Subspace::zero(v.ambient()), v.clone()] }
    }

    /// The flag `{0, A, A⊥, V}` for a totally isotropic `A ⊆ V`.
    pub fn isotropic(a: &Subspace, v: &Subspace) -> Result<Flag> {
        if !a.is_totally_isotropic() {
            return Err(Error::NotTotallyIsotropic);
        }
        Flag::new(vec![Subspace::zero(v.ambient()), a.clone(), a.perp_within(v)?, v.clone()])
    }

    pub fn container(&self) -> &Subspace {
        self.members.last().expect("flags are nonempty")
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Subspace {
        &self.members[i]
    }

    /// Number of steps: the index of the last member.
    pub fn k(&self) -> usize {
        self.members.len() - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.members.iter().map(Subspace::dim).collect()
    }

    /// `V_{k−i} = V_i⊥` for every `i`, perps taken inside the container.
    pub fn is_self_dual(&self) -> Result<bool> {
        let k = self.k();
        for i in 0..=k {
            if self.members[k - i] != self.members[i].perp_within(self.container())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `V_i⊥ ∩ V_j`, perp taken inside the container. Zero for `i > k`.
    pub fn lattice_entry(&self, i: usize, j: usize) -> Result<Subspace> {
        if i > self.k() {
            return Ok(Subspace::zero(self.container().ambient()));
        }
        self.members[i].perp_within(self.container())?.intersect(&self.members[j])
    }

    /// The flag `{E ∩ V_i}` inside `E`.
    pub fn slice(&self, e: &Subspace) -> Result<Flag> {
        let members = self.members.iter().map(|m| e.intersect(m)).collect::<Result<Vec<_>>>()?;
        Flag::new(members)
    }
}

/// Dimensions of the subspaces `V_i⊥ ∩ V_j` and their diagonal sum `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagLattice {
    /// `dims[i][j] = dim(V_i⊥ ∩ V_j)`.
    pub dims: Vec<Vec<usize>>,
    /// `T = Σ V_i⊥ ∩ V_i`.
    pub t: Subspace,
}

pub fn flag_lattice(f: &Flag) -> Result<FlagLattice> {
    let k = f.k();
    let mut dims = vec![vec![0; k + 1]; k + 1];
    let mut t = Subspace::zero(f.container().ambient());
    for (i, row) in dims.iter_mut().enumerate() {
        for (j, d) in row.iter_mut().enumerate() {
            let entry = f.lattice_entry(i, j)?;
            *d = entry.dim();
            if i == j {
                t = t.sum(&entry)?;
            }
        }
    }
    Ok(FlagLattice { dims, t })
}

fn member_certificate(f: &Flag, f2: &Flag, i: usize) -> Result<Option<Certificate>> {
    let (a, b) = (f.member(i), f2.member(i));
    if a.dim() != b.dim() {
        return Ok(Some(Certificate::DimensionMismatch { clause: format!("member {i}"), left: a.clone(), right: b.clone() }));
    }
    if !subspace_isometric(a, b)? {
        return Ok(Some(Certificate::NotIsometric { clause: format!("member {i}"), left: a.clone(), right: b.clone() }));
    }
    Ok(None)
}

fn length_certificate(f: &Flag, f2: &Flag) -> Option<Certificate> {
    (f.k() != f2.k()).then(|| Certificate::LengthMismatch { clause: "flag length".into(), left: f.k(), right: f2.k() })
}

fn check_members_mapped(m: &Isometry, f: &Flag, f2: &Flag) -> Result<()> {
    for (a, b) in f.members().iter().zip(f2.members()) {
        ensure(m.image_of(a)? == *b, "flag member is not mapped onto its target")?;
    }
    Ok(())
}

/// Whether some isometry of the containers maps each member of one
/// self-dual flag onto the matching member of the other.
pub fn self_dual_flags_isometric(f: &Flag, f2: &Flag) -> Result<Extension> {
    if !f.is_self_dual()? || !f2.is_self_dual()? {
        return Err(Error::FlagNotSelfDual);
    }
    if let Some(c) = length_certificate(f, f2) {
        return Ok(Extension::Blocked(c));
    }
    let k = f.k();
    for i in (1..=k / 2).chain([k]) {
        if let Some(c) = member_certificate(f, f2, i)? {
            return Ok(Extension::Blocked(c));
        }
    }
    let (v, v2) = (f.container(), f2.container());
    if !v.is_nonsingular() || !v2.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    // Members up to the middle are totally isotropic, so any linear bijection
    // respecting the chain preserves the form.
    let (mut src, mut dst) = (Vec::new(), Vec::new());
    for i in 1..=k / 2 {
        src.extend(Subspace::extend_basis(&src, f.member(i))?);
        dst.extend(Subspace::extend_basis(&dst, f2.member(i))?);
    }
    let base = Isometry::new(LinearMap::from_pairs(v.ambient(), v2.ambient(), &src, &dst)?)?;
    let full = witt_extend(&base, v, v2)?;
    check_members_mapped(&full, f, f2)?;
    Ok(Extension::Found(full))
}

/// An isometry `T → T′` sending every `V_i⊥ ∩ V_j` with `j ≤ i` onto its
/// primed counterpart. Two chains generate a distributive lattice, so
/// complements of `L(i+1,j) + L(i,j−1)` inside `L(i,j)` add up directly.
fn lattice_isometry(f: &Flag, f2: &Flag, t: &Subspace, t2: &Subspace) -> Result<Isometry> {
    let k = f.k();
    let (mut src, mut dst) = (Vec::new(), Vec::new());
    for i in 1..k {
        for j in 1..=i {
            let cell = |g: &Flag| -> Result<Vec<_>> {
                let lower = g.lattice_entry(i + 1, j)?.sum(&g.lattice_entry(i, j - 1)?)?;
                Ok(lower.complement_in(&g.lattice_entry(i, j)?)?.basis_vectors())
            };
            let (a, b) = (cell(f)?, cell(f2)?);
            ensure(a.len() == b.len(), "lattice cells differ in dimension")?;
            src.extend(a);
            dst.extend(b);
        }
    }
    ensure(src.len() == t.dim() && dst.len() == t2.dim(), "lattice cells do not fill T")?;
    let phi = Isometry::new(LinearMap::from_pairs(t.ambient(), t2.ambient(), &src, &dst)?)?;
    for i in 0..=k {
        for j in 0..=i {
            ensure(
                phi.image_of(&f.lattice_entry(i, j)?)? == f2.lattice_entry(i, j)?,
                "lattice entry is not mapped onto its target",
            )?;
        }
    }
    Ok(phi)
}

/// Whether some isometry of the nonsingular containers maps each member of
/// `f` onto the matching member of `f2`.
pub fn flags_isometric(f: &Flag, f2: &Flag) -> Result<Extension> {
    let (v, v2) = (f.container(), f2.container());
    if !v.is_nonsingular() || !v2.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    if let Some(c) = length_certificate(f, f2) {
        return Ok(Extension::Blocked(c));
    }
    let k = f.k();
    for i in 1..=k {
        if let Some(c) = member_certificate(f, f2, i)? {
            return Ok(Extension::Blocked(c));
        }
    }
    for i in 2..k {
        for j in 1..i {
            let (a, b) = (f.lattice_entry(i, j)?, f2.lattice_entry(i, j)?);
            if a.dim() != b.dim() {
                let clause = format!("lattice entry ({i},{j})");
                return Ok(Extension::Blocked(Certificate::DimensionMismatch { clause, left: a, right: b }));
            }
        }
    }
    let (t, t2) = (flag_lattice(f)?.t, flag_lattice(f2)?.t);
    let mut current = lattice_isometry(f, f2, &t, &t2)?;
    let mut full = None;
    for j in 0..k {
        let (a, a2) = (f.member(j + 1), f2.member(j + 1));
        let step = match extend_preserving_subspace_split(&current, a, a2, v, v2)? {
            Extension::Found(m) => m,
            Extension::Blocked(c) => return Err(Error::assertion(&format!("flag step {j} blocked: {c}"))),
        };
        current = step.restrict(&t.sum(a)?)?;
        full = Some(step);
    }
    let full = full.expect("flags have at least one step");
    check_members_mapped(&full, f, f2)?;
    Ok(Extension::Found(full))
}

/// Whether some isometry of the containers maps `E` onto `E′` and each
/// member of the self-dual flag `f` onto the matching member of `f2`.
pub fn pair_subspace_flag_isometric(e: &Subspace, e2: &Subspace, f: &Flag, f2: &Flag) -> Result<Extension> {
    if !f.is_self_dual()? || !f2.is_self_dual()? {
        return Err(Error::FlagNotSelfDual);
    }
    if !self_dual_flags_isometric(f, f2)?.is_found() {
        return Err(Error::FlagsNotIsometric);
    }
    let (v, v2) = (f.container(), f2.container());
    if !e.is_subspace_of(v)? || !e2.is_subspace_of(v2)? {
        return Err(Error::OutOfDomain);
    }
    let k = f.k();
    let with_container = |sl: Flag, c: &Subspace| {
        let mut members = sl.members().to_vec();
        members.push(c.clone());
        Flag::new(members)
    };
    let slices = with_container(f.slice(e)?, v)?;
    let slices2 = with_container(f2.slice(e2)?, v2)?;
    for i in 1..=k {
        if let Some(c) = member_certificate(&slices, &slices2, i)? {
            return Ok(Extension::Blocked(c));
        }
    }
    for i in 1..=k {
        for j in 1..i {
            let (a, b) = (slices.lattice_entry(i, j)?, slices2.lattice_entry(i, j)?);
            if i + j <= k {
                ensure(a == *slices.member(j) && b == *slices2.member(j), "slice entry below the antidiagonal")?;
            } else if a.dim() != b.dim() {
                let clause = format!("slice entry ({i},{j})");
                return Ok(Extension::Blocked(Certificate::DimensionMismatch { clause, left: a, right: b }));
            }
        }
    }
    let on_slices = match flags_isometric(&slices, &slices2)? {
        Extension::Found(m) => m,
        Extension::Blocked(c) => return Ok(Extension::Blocked(c)),
    };
    let phi = on_slices.restrict(e)?;
    match extend_preserving_self_dual_flag(&phi, f, f2)? {
        Extension::Found(m) => {
            ensure(m.image_of(e)? == *e2, "subspace is not mapped onto its target")?;
            Ok(Extension::Found(m))
        }
        Extension::Blocked(c) => Err(Error::assertion(&format!("flag extension blocked: {c}"))),
    }
}

/// Whether some isometry `V → V′` maps `E` onto `E′` and the totally
/// isotropic `A` onto `A′`.
pub fn isotropic_pair_isometric(
    e: &Subspace,
    e2: &Subspace,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<Extension> {
    let (f, f2) = (Flag::isotropic(a, v)?, Flag::isotropic(a2, v2)?);
    if let Extension::Blocked(c) = self_dual_flags_isometric(&f, &f2)? {
        return Ok(Extension::Blocked(c));
    }
    pair_subspace_flag_isometric(e, e2, &f, &f2)
}
