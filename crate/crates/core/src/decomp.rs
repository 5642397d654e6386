//! Extensions that respect a direct-sum decomposition: projections of a
//! subspace onto the blocks, the induced component-wise map, hyperbolic
//! splittings with self-dual flags, and Witt decompositions.

use crate::error::{Error, Result};
use crate::extend::{
    as_isometry, check_inside, ensure, extend_bijection, extend_preserving_self_dual_flag, image_mismatch,
    Certificate, Extension,
};
use crate::flags::Flag;
use crate::maps::{Isometry, LinearMap};
use crate::matrix::Vector;
use crate::space::{split_components, Subspace};
use crate::witt::{witt_extend, WittDecomposition};

/// `onto_A = (E+B)∩A`, `onto_B = (E+A)∩B` and their direct sum `p ⊇ E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionPair {
    pub onto_a: Subspace,
    pub onto_b: Subspace,
    pub p: Subspace,
}

/// The three-block analogue of [`ProjectionPair`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionTriple {
    pub onto_a: Subspace,
    pub onto_b: Subspace,
    pub onto_c: Subspace,
    pub p: Subspace,
}

/// The sum of `blocks`, checked to be direct.
fn direct_sum(blocks: &[&Subspace]) -> Result<Subspace> {
    let first = blocks.first().ok_or(Error::NotDirectSum)?;
    let mut total = Subspace::zero(first.ambient());
    for b in blocks {
        total = total.sum(b)?;
    }
    if total.dim() != blocks.iter().map(|b| b.dim()).sum::<usize>() {
        return Err(Error::NotDirectSum);
    }
    Ok(total)
}

/// Components of every basis vector of `e` along the blocks, block by block.
fn components(e: &Subspace, blocks: &[&Subspace]) -> Result<Vec<Vec<Vector>>> {
    let mut out = vec![Vec::new(); blocks.len()];
    for x in e.basis_vectors() {
        for (i, c) in split_components(&x, blocks)?.into_iter().enumerate() {
            out[i].push(c);
        }
    }
    Ok(out)
}

/// The projections of `e` onto each block.
fn projections(e: &Subspace, blocks: &[&Subspace]) -> Result<Vec<Subspace>> {
    components(e, blocks)?.iter().map(|c| Subspace::span(e.ambient(), c)).collect()
}

pub fn projection_pair(e: &Subspace, a: &Subspace, b: &Subspace) -> Result<ProjectionPair> {
    let total = direct_sum(&[a, b])?;
    if !e.is_subspace_of(&total)? {
        return Err(Error::OutOfDomain);
    }
    let [onto_a, onto_b] = <[Subspace; 2]>::try_from(projections(e, &[a, b])?).expect("two blocks");
    let p = onto_a.sum(&onto_b)?;
    Ok(ProjectionPair { onto_a, onto_b, p })
}

pub fn projection_triple(e: &Subspace, a: &Subspace, b: &Subspace, c: &Subspace) -> Result<ProjectionTriple> {
    let total = direct_sum(&[a, b, c])?;
    if !e.is_subspace_of(&total)? {
        return Err(Error::OutOfDomain);
    }
    let [onto_a, onto_b, onto_c] = <[Subspace; 3]>::try_from(projections(e, &[a, b, c])?).expect("three blocks");
    let p = onto_a.sum(&onto_b)?.sum(&onto_c)?;
    Ok(ProjectionTriple { onto_a, onto_b, onto_c, p })
}

/// Shape checks shared by all block operations. Returns the two containers.
fn check_blocks(phi: &LinearMap, blocks: &[&Subspace], blocks2: &[&Subspace]) -> Result<(Subspace, Subspace)> {
    let v = direct_sum(blocks)?;
    let v2 = direct_sum(blocks2)?;
    for (x, y) in blocks.iter().zip(blocks2) {
        if x.dim() != y.dim() {
            return Err(Error::dims(x.dim(), y.dim()));
        }
    }
    check_inside(phi, &v, &v2)?;
    Ok((v, v2))
}

/// For each block `i`, `φ(E ∩ Σ_{j≠i} B_j) = E′ ∩ Σ_{j≠i} B′_j`.
fn block_conditions(
    phi: &LinearMap,
    blocks: &[&Subspace],
    blocks2: &[&Subspace],
    names: &[&str],
) -> Result<Option<Certificate>> {
    let (e, e2) = (phi.dom(), phi.cod());
    for i in 0..blocks.len() {
        let mut others = Subspace::zero(e.ambient());
        let mut others2 = Subspace::zero(e2.ambient());
        for j in (0..blocks.len()).filter(|&j| j != i) {
            others = others.sum(blocks[j])?;
            others2 = others2.sum(blocks2[j])?;
        }
        if let Some(c) = image_mismatch(phi, &e.intersect(&others)?, &e2.intersect(&others2)?, names[i])? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// The component-wise map `v_{B_i} ↦ φ(v)_{B′_i}`, assuming the block
/// conditions hold.
fn induced_blocks(phi: &LinearMap, blocks: &[&Subspace], blocks2: &[&Subspace]) -> Result<LinearMap> {
    let e = phi.dom();
    let src = components(e, blocks)?;
    let images: Vec<Vector> = e.basis_vectors().iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let cod_parts = {
        let mut out = vec![Vec::new(); blocks2.len()];
        for y in &images {
            for (i, c) in split_components(y, blocks2)?.into_iter().enumerate() {
                out[i].push(c);
            }
        }
        out
    };
    let sources: Vec<Vector> = src.into_iter().flatten().collect();
    let targets: Vec<Vector> = cod_parts.into_iter().flatten().collect();
    LinearMap::from_pairs(e.ambient(), phi.cod().ambient(), &sources, &targets).map_err(|_| Error::ConditionsNotMet)
}

/// Extend the induced map block by block to a linear bijection.
fn extend_blocks(phi: &LinearMap, blocks: &[&Subspace], blocks2: &[&Subspace]) -> Result<LinearMap> {
    let tilde = induced_blocks(phi, blocks, blocks2)?;
    let mut total: Option<LinearMap> = None;
    for (x, y) in blocks.iter().zip(blocks2) {
        let part = tilde.restrict(&tilde.dom().intersect(x)?)?;
        let piece = extend_bijection(&part, x, y)?;
        total = Some(match total {
            None => piece,
            Some(t) => t.combine(&piece)?,
        });
    }
    let total = total.ok_or(Error::NotDirectSum)?;
    ensure(total.is_bijective() && total.agrees_with(phi)?, "block extension does not extend φ")?;
    Ok(total)
}

const PAIR_CLAUSES: [&str; 2] = ["E∩B", "E∩A"];
const TRIPLE_CLAUSES: [&str; 3] = ["E∩(B+C)", "E∩(C+A)", "E∩(A+B)"];

/// A linear bijection `A⊕B → A′⊕B′` extending `φ` and sending blocks to
/// blocks, or the violated condition.
pub fn extend_direct_sum_pair(
    phi: &LinearMap,
    a: &Subspace,
    b: &Subspace,
    a2: &Subspace,
    b2: &Subspace,
) -> Result<Extension<LinearMap>> {
    let (blocks, blocks2) = ([a, b], [a2, b2]);
    check_blocks(phi, &blocks, &blocks2)?;
    if let Some(c) = block_conditions(phi, &blocks, &blocks2, &PAIR_CLAUSES)? {
        return Ok(Extension::Blocked(c));
    }
    Ok(Extension::Found(extend_blocks(phi, &blocks, &blocks2)?))
}

/// The induced map `P_{A,B}(E) → P_{A′,B′}(E′)`.
pub fn induced_map_pair(phi: &LinearMap, a: &Subspace, b: &Subspace, a2: &Subspace, b2: &Subspace) -> Result<LinearMap> {
    let (blocks, blocks2) = ([a, b], [a2, b2]);
    check_blocks(phi, &blocks, &blocks2)?;
    if block_conditions(phi, &blocks, &blocks2, &PAIR_CLAUSES)?.is_some() {
        return Err(Error::ConditionsNotMet);
    }
    induced_blocks(phi, &blocks, &blocks2)
}

pub fn extend_direct_sum_triple(
    phi: &LinearMap,
    [a, b, c]: [&Subspace; 3],
    [a2, b2, c2]: [&Subspace; 3],
) -> Result<Extension<LinearMap>> {
    let (blocks, blocks2) = ([a, b, c], [a2, b2, c2]);
    check_blocks(phi, &blocks, &blocks2)?;
    if let Some(cert) = block_conditions(phi, &blocks, &blocks2, &TRIPLE_CLAUSES)? {
        return Ok(Extension::Blocked(cert));
    }
    Ok(Extension::Found(extend_blocks(phi, &blocks, &blocks2)?))
}

pub fn induced_map_triple(
    phi: &LinearMap,
    [a, b, c]: [&Subspace; 3],
    [a2, b2, c2]: [&Subspace; 3],
) -> Result<LinearMap> {
    let (blocks, blocks2) = ([a, b, c], [a2, b2, c2]);
    check_blocks(phi, &blocks, &blocks2)?;
    if block_conditions(phi, &blocks, &blocks2, &TRIPLE_CLAUSES)?.is_some() {
        return Err(Error::ConditionsNotMet);
    }
    induced_blocks(phi, &blocks, &blocks2)
}

/// Make the middle member of a self-dual flag equal to `vplus`: inserted when
/// `k` is odd, verified when `k` is even.
pub fn refine_flag(flag: &Flag, vplus: &Subspace) -> Result<Flag> {
    if !flag.is_self_dual()? {
        return Err(Error::FlagNotSelfDual);
    }
    let k = flag.k();
    let h = k / 2;
    if !flag.member(h).is_subspace_of(vplus)? || !vplus.is_totally_isotropic() {
        return Err(Error::NotCompatible);
    }
    if k % 2 == 0 {
        return if flag.member(h) == vplus { Ok(flag.clone()) } else { Err(Error::NotCompatible) };
    }
    if !vplus.is_subspace_of(flag.member(h + 1))? {
        return Err(Error::NotCompatible);
    }
    let mut members = flag.members().to_vec();
    members.insert(h + 1, vplus.clone());
    let refined = Flag::new(members)?;
    if !refined.is_self_dual()? {
        return Err(Error::NotCompatible);
    }
    Ok(refined)
}

/// Slice conditions `φ̃(P ∩ V_i) = P′ ∩ V_i′` for every member.
fn slice_conditions(tilde: &LinearMap, f: &Flag, f2: &Flag) -> Result<Option<Certificate>> {
    for i in 1..=f.k() {
        let src = tilde.dom().intersect(f.member(i))?;
        let dst = tilde.cod().intersect(f2.member(i))?;
        if let Some(c) = image_mismatch(tilde, &src, &dst, &format!("projection slice {i}"))? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn check_hyperbolic(vplus: &Subspace, vminus: &Subspace, h: &Subspace) -> Result<()> {
    if direct_sum(&[vplus, vminus])? != *h
        || vplus.dim() != vminus.dim()
        || !vplus.is_totally_isotropic()
        || !vminus.is_totally_isotropic()
    {
        return Err(Error::InvalidDecomposition("not a hyperbolic splitting of the flag container".into()));
    }
    Ok(())
}

/// Extend `φ` on the hyperbolic space `V = V⁺ ⊕ V⁻` sending `V^±` to
/// `V′^±` and the flag `f` to `f2`, or report the violated condition.
pub fn extend_hyperbolic(
    phi: &Isometry,
    [vplus, vminus]: [&Subspace; 2],
    [vplus2, vminus2]: [&Subspace; 2],
    f: &Flag,
    f2: &Flag,
) -> Result<Extension> {
    let (h, h2) = (f.container(), f2.container());
    check_hyperbolic(vplus, vminus, h)?;
    check_hyperbolic(vplus2, vminus2, h2)?;
    check_inside(phi, h, h2)?;
    if f.k() != f2.k() || f.dims() != f2.dims() {
        return Err(Error::FlagsNotIsometric);
    }
    let (blocks, blocks2) = ([vplus, vminus], [vplus2, vminus2]);
    if let Some(c) = block_conditions(phi, &blocks, &blocks2, &["E∩V⁻", "E∩V⁺"])? {
        return Ok(Extension::Blocked(c));
    }
    let tilde = induced_blocks(phi, &blocks, &blocks2)?;
    if !tilde.is_isometry() {
        return Ok(Extension::Blocked(Certificate::MapNotIsometry {
            clause: "induced map on the projection of E".into(),
            map: tilde,
        }));
    }
    if let Some(c) = slice_conditions(&tilde, f, f2)? {
        return Ok(Extension::Blocked(c));
    }
    let tilde = as_isometry(tilde, "induced map is not an isometry")?;
    let (rf, rf2) = (refine_flag(f, vplus)?, refine_flag(f2, vplus2)?);
    let first = extend_preserving_self_dual_flag(&tilde, &rf, &rf2)?
        .into_found()
        .ok_or_else(|| Error::assertion("flag extension refused a map meeting every condition"))?;
    let partial = first.restrict(&tilde.dom().sum(vplus)?)?;
    let minus_flag = Flag::new(vec![Subspace::zero(h.ambient()), vminus.clone(), h.clone()])?;
    let minus_flag2 = Flag::new(vec![Subspace::zero(h2.ambient()), vminus2.clone(), h2.clone()])?;
    let full = extend_preserving_self_dual_flag(&partial, &minus_flag, &minus_flag2)?
        .into_found()
        .ok_or_else(|| Error::assertion("second flag extension refused a map meeting every condition"))?;
    ensure(full.extends(phi.map())?, "hyperbolic extension does not extend φ")?;
    ensure(full.image_of(vplus)? == *vplus2 && full.image_of(vminus)? == *vminus2, "isotropic halves are not preserved")?;
    for (x, y) in f.members().iter().zip(f2.members()) {
        ensure(full.image_of(x)? == *y, "flag member is not preserved")?;
    }
    Ok(Extension::Found(full))
}

/// Extend `φ` to `V → V′` sending each summand of `w` to that of `w2` and the
/// self-dual flag `f` to `f2`. Without flags the trivial flag is used.
pub fn extend_witt_decomposition(
    phi: &Isometry,
    w: &WittDecomposition,
    w2: &WittDecomposition,
    flags: Option<(&Flag, &Flag)>,
) -> Result<Extension> {
    let blocks = [&w.plus, &w.anis, &w.minus];
    let blocks2 = [&w2.plus, &w2.anis, &w2.minus];
    let (v, v2) = check_blocks(phi.map(), &blocks, &blocks2)?;
    w.validate(&v)?;
    w2.validate(&v2)?;
    let (f, f2) = match flags {
        Some((f, f2)) => (f.clone(), f2.clone()),
        None => (Flag::trivial(&v), Flag::trivial(&v2)),
    };
    if *f.container() != v || *f2.container() != v2 {
        return Err(Error::AmbientMismatch);
    }
    if f.k() != f2.k() || f.dims() != f2.dims() {
        return Err(Error::FlagsNotIsometric);
    }
    if let Some(c) = block_conditions(phi, &blocks, &blocks2, &["E∩(V̂+V⁻)", "E∩(V⁻+V⁺)", "E∩(V⁺+V̂)"])? {
        return Ok(Extension::Blocked(c));
    }
    let tilde = induced_blocks(phi, &blocks, &blocks2)?;
    if !tilde.is_isometry() {
        return Ok(Extension::Blocked(Certificate::MapNotIsometry {
            clause: "induced map on the projection of E".into(),
            map: tilde,
        }));
    }
    if let Some(c) = slice_conditions(&tilde, &f, &f2)? {
        return Ok(Extension::Blocked(c));
    }
    let tilde = as_isometry(tilde, "induced map is not an isometry")?;

    let anis_part = tilde.restrict(&tilde.dom().intersect(&w.anis)?)?;
    let anis_ext = witt_extend(&anis_part, &w.anis, &w2.anis)?;
    let (h, h2) = (w.plus.sum(&w.minus)?, w2.plus.sum(&w2.minus)?);
    let hyp_part = tilde.restrict(&tilde.dom().intersect(&h)?)?;
    let cut = |fl: &Flag, h: &Subspace| -> Result<Flag> {
        Flag::new(fl.members().iter().map(|m| m.intersect(h)).collect::<Result<Vec<_>>>()?)
    };
    let (hf, hf2) = (cut(&f, &h)?, cut(&f2, &h2)?);
    let hyp_ext = extend_hyperbolic(&hyp_part, [&w.plus, &w.minus], [&w2.plus, &w2.minus], &hf, &hf2)?
        .into_found()
        .ok_or_else(|| Error::assertion("hyperbolic extension refused a map meeting every condition"))?;
    let full = anis_ext.orthogonal_sum(&hyp_ext)?;
    ensure(full.extends(phi.map())?, "decomposition extension does not extend φ")?;
    for (x, y) in blocks.iter().zip(blocks2) {
        ensure(full.image_of(x)? == *y, "summand is not preserved")?;
    }
    for (x, y) in f.members().iter().zip(f2.members()) {
        ensure(full.image_of(x)? == *y, "flag member is not preserved")?;
    }
    Ok(Extension::Found(full))
}
