//! Extending an isometry `φ: E → E′` between subspaces to the whole space
//! while respecting a radical, an orthogonal subspace, a self-dual flag or an
//! arbitrary subspace pair `A → A′`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::flags::Flag;
use crate::maps::{Isometry, LinearMap};
use crate::matrix::{self, Matrix, Vector};
use crate::space::{decompose_along, split_components, QuotientSpace, Subspace};
use crate::witt::{subspace_isometric, subspace_isometry, witt_extend};

/// A reason why no extension exists. Each variant can be re-tested on its own
/// with [`Certificate::confirms_failure`].
#[derive(Debug, Clone)]
pub enum Certificate {
    /// `map` does not send `source` onto `expected`.
    ImageMismatch { clause: String, map: LinearMap, source: Subspace, expected: Subspace },
    /// Two subspaces that would have to be isometric are not.
    NotIsometric { clause: String, left: Subspace, right: Subspace },
    /// Two subspaces that would have to have equal dimension do not.
    DimensionMismatch { clause: String, left: Subspace, right: Subspace },
    /// The map induced by `phi` on the quotients attached to `A` (or `A⊥`
    /// when `perp` is set) does not preserve the form.
    InducedMapNotIsometry {
        clause: String,
        phi: LinearMap,
        a: Subspace,
        a2: Subspace,
        v: Subspace,
        v2: Subspace,
        perp: bool,
    },
    /// A map every extension would have to extend is not an isometry.
    MapNotIsometry { clause: String, map: LinearMap },
    /// Two flags have different numbers of members.
    LengthMismatch { clause: String, left: usize, right: usize },
}

impl Certificate {
    pub fn clause(&self) -> &str {
        match self {
            Certificate::ImageMismatch { clause, .. }
            | Certificate::NotIsometric { clause, .. }
            | Certificate::DimensionMismatch { clause, .. }
            | Certificate::InducedMapNotIsometry { clause, .. }
            | Certificate::MapNotIsometry { clause, .. }
            | Certificate::LengthMismatch { clause, .. } => clause,
        }
    }

    /// Recompute the failing clause from the stored data.
    pub fn confirms_failure(&self) -> Result<bool> {
        Ok(match self {
            Certificate::ImageMismatch { map, source, expected, .. } => map.image_of(source)? != *expected,
            Certificate::NotIsometric { left, right, .. } => !subspace_isometric(left, right)?,
            Certificate::DimensionMismatch { left, right, .. } => left.dim() != right.dim(),
            Certificate::InducedMapNotIsometry { phi, a, a2, v, v2, perp, .. } => {
                let s = Side::new(a, v)?;
                let s2 = Side::new(a2, v2)?;
                !induced(phi, &s, &s2, *perp)?.is_isometry()
            }
            Certificate::MapNotIsometry { map, .. } => !map.is_isometry(),
            Certificate::LengthMismatch { left, right, .. } => left != right,
        })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self {
            Certificate::ImageMismatch { .. } => "image mismatch",
            Certificate::NotIsometric { .. } => "not isometric",
            Certificate::DimensionMismatch { .. } => "dimension mismatch",
            Certificate::InducedMapNotIsometry { .. } => "induced quotient map is not an isometry",
            Certificate::MapNotIsometry { .. } => "map is not an isometry",
            Certificate::LengthMismatch { .. } => "length mismatch",
        };
        write!(f, "{}: {what}", self.clause())
    }
}

/// Outcome of an extension query: a verified map or a certificate.
#[derive(Debug, Clone)]
pub enum Extension<M = Isometry> {
    Found(M),
    Blocked(Certificate),
}

impl<M> Extension<M> {
    pub fn is_found(&self) -> bool {
        matches!(self, Extension::Found(_))
    }

    pub fn found(&self) -> Option<&M> {
        match self {
            Extension::Found(m) => Some(m),
            Extension::Blocked(_) => None,
        }
    }

    pub fn into_found(self) -> Option<M> {
        match self {
            Extension::Found(m) => Some(m),
            Extension::Blocked(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Extension::Found(_) => None,
            Extension::Blocked(c) => Some(c),
        }
    }
}

/// `None` when `map` sends `source` onto `expected`, otherwise a certificate.
pub(crate) fn image_mismatch(
    map: &LinearMap,
    source: &Subspace,
    expected: &Subspace,
    clause: &str,
) -> Result<Option<Certificate>> {
    if map.image_of(source)? == *expected {
        return Ok(None);
    }
    Ok(Some(Certificate::ImageMismatch {
        clause: clause.to_string(),
        map: map.clone(),
        source: source.clone(),
        expected: expected.clone(),
    }))
}

pub(crate) fn check_inside(phi: &LinearMap, v: &Subspace, v2: &Subspace) -> Result<()> {
    if !phi.dom().is_subspace_of(v)? || !phi.cod().is_subspace_of(v2)? {
        return Err(Error::OutOfDomain);
    }
    Ok(())
}

pub(crate) fn check_nonsingular(v: &Subspace, v2: &Subspace) -> Result<()> {
    if !v.is_nonsingular() || !v2.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    Ok(())
}

/// Internal consistency check: a failure here is a bug, not an input error.
pub(crate) fn ensure(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::assertion(what))
    }
}

pub(crate) fn as_isometry(map: LinearMap, what: &str) -> Result<Isometry> {
    Isometry::new(map).map_err(|_| Error::assertion(what))
}

/// A complement of `r` inside `sup` that contains `s`, assuming `s ∩ r = 0`.
pub(crate) fn complement_containing(s: &Subspace, r: &Subspace, sup: &Subspace) -> Result<Subspace> {
    let mut start = r.basis_vectors();
    start.extend(s.basis_vectors());
    let added = Subspace::extend_basis(&start, sup)?;
    let mut gens = s.basis_vectors();
    gens.extend(added);
    let c = Subspace::span(s.ambient(), &gens)?;
    ensure(c.dim() + r.dim() == sup.dim(), "complement does not split the container")?;
    Ok(c)
}

/// A linear bijection `x → y` extending the injective `part`, completed by
/// matching deterministic basis extensions.
pub(crate) fn extend_bijection(part: &LinearMap, x: &Subspace, y: &Subspace) -> Result<LinearMap> {
    let mut sources = part.dom().basis_vectors();
    let mut targets: Vec<Vector> = sources.iter().map(|v| part.apply(v)).collect::<Result<_>>()?;
    let extra = Subspace::extend_basis(&sources, x)?;
    let extra2 = Subspace::extend_basis(&targets, y)?;
    if extra.len() != extra2.len() {
        return Err(Error::dims(extra.len(), extra2.len()));
    }
    sources.extend(extra);
    targets.extend(extra2);
    LinearMap::from_pairs(x.ambient(), y.ambient(), &sources, &targets)
}

/// A vector `w ∈ target` with `b(fᵢ, w) = rhsᵢ` for every functional vector `fᵢ`.
fn riesz_solve(functionals: &[Vector], target: &Subspace, rhs: &[Scalar]) -> Result<Vector> {
    let (field, n) = (target.field(), target.ambient_dim());
    let basis = target.basis_vectors();
    if functionals.is_empty() {
        return Ok(matrix::zero_vector(field, n));
    }
    if basis.is_empty() {
        ensure(rhs.iter().all(Scalar::is_zero), "linear functional is not representable")?;
        return Ok(matrix::zero_vector(field, n));
    }
    let mut m = Matrix::zeros(field, functionals.len(), basis.len());
    for (j, f) in functionals.iter().enumerate() {
        for (k, t) in basis.iter().enumerate() {
            m.set(j, k, target.bilinear(f, t));
        }
    }
    let c = m.solve(rhs).map_err(|_| Error::assertion("linear functional is not representable"))?;
    Ok(matrix::combination(field, n, &c, &basis))
}

/// Extend `φ: E → E′` to `V → V′` where `V`, `V′` may be singular. Requires
/// `φ(E ∩ rad V) = E′ ∩ rad V′`.
pub fn extend_singular(phi: &Isometry, v: &Subspace, v2: &Subspace) -> Result<Isometry> {
    check_inside(phi, v, v2)?;
    let (e, e2) = (phi.dom(), phi.cod());
    let (rad, rad2) = (v.radical(), v2.radical());
    if rad.dim() != rad2.dim() || v.dim() != v2.dim() {
        return Err(Error::NotIsometricAmbients);
    }
    let er = e.intersect(&rad)?;
    if phi.image_of(&er)? != e2.intersect(&rad2)? {
        return Err(Error::HypothesisViolated("radical image".into()));
    }
    let et = er.complement_in(e)?;
    let et2 = phi.image_of(&et)?;
    let vt = complement_containing(&et, &rad, v)?;
    let vt2 = complement_containing(&et2, &rad2, v2)?;
    let core = match witt_extend(&phi.restrict(&et)?, &vt, &vt2) {
        Err(Error::NotExtendable) => return Err(Error::NotIsometricAmbients),
        r => r?,
    };
    let radical = extend_bijection(&phi.map().restrict(&er)?, &rad, &rad2)?;
    let radical = as_isometry(radical, "radical bijection is not an isometry")?;
    let full = core.orthogonal_sum(&radical)?;
    ensure(full.extends(phi.map())? && full.dom() == v && full.cod() == v2, "singular extension is inconsistent")?;
    Ok(full)
}

/// An isometry `V → V′` sending `E` onto `E′`, or a certificate.
pub fn find_isometry_mapping_subspace(e: &Subspace, e2: &Subspace, v: &Subspace, v2: &Subspace) -> Result<Extension> {
    if !e.is_subspace_of(v)? || !e2.is_subspace_of(v2)? {
        return Err(Error::OutOfDomain);
    }
    let er = e.intersect(&v.radical())?;
    let er2 = e2.intersect(&v2.radical())?;
    if er.dim() != er2.dim() {
        return Ok(Extension::Blocked(Certificate::DimensionMismatch {
            clause: "E∩rad V vs E′∩rad V′".into(),
            left: er,
            right: er2,
        }));
    }
    if subspace_isometry(e, e2)?.is_none() {
        return Ok(Extension::Blocked(Certificate::NotIsometric {
            clause: "E ≈ E′".into(),
            left: e.clone(),
            right: e2.clone(),
        }));
    }
    let phi0 = Isometry::from_pairs(e.ambient(), e2.ambient(), &er.basis_vectors(), &er2.basis_vectors())?;
    let phi1 = extend_singular(&phi0, e, e2)?;
    let full = extend_singular(&phi1, v, v2)?;
    ensure(full.image_of(e)? == *e2, "subspace is not mapped onto its target")?;
    Ok(Extension::Found(full))
}

/// Extend `φ` to `V → V′` sending `A` onto `A′`, where `E ⊥ A` and `E′ ⊥ A′`.
pub fn extend_orthogonal(
    phi: &Isometry,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<Isometry> {
    check_inside(phi, v, v2)?;
    check_nonsingular(v, v2)?;
    let (e, e2) = (phi.dom(), phi.cod());
    if !e.is_orthogonal_to(a)? || !e2.is_orthogonal_to(a2)? {
        return Err(Error::HypothesisViolated("orthogonality".into()));
    }
    if phi.image_of(&e.intersect(a)?)? != e2.intersect(a2)? {
        return Err(Error::HypothesisViolated("intersection image".into()));
    }
    if !subspace_isometric(a, a2)? {
        return Err(Error::HypothesisViolated("A ≈ A′".into()));
    }
    let inner = extend_singular(phi, &a.perp_within(v)?, &a2.perp_within(v2)?)?;
    let full = witt_extend(&inner, v, v2)?;
    ensure(full.image_of(a)? == *a2, "orthogonal subspace is not mapped onto its target")?;
    Ok(full)
}

/// An isometry `V → V′` sending `E → E′` and `A → A′` for `E ⊥ A`, `E′ ⊥ A′`.
pub fn find_isometry_orthogonal_pair(
    e: &Subspace,
    e2: &Subspace,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<Extension> {
    check_nonsingular(v, v2)?;
    if !e.is_orthogonal_to(a)? || !e2.is_orthogonal_to(a2)? {
        return Err(Error::HypothesisViolated("orthogonality".into()));
    }
    let (ea, ea2) = (e.intersect(a)?, e2.intersect(a2)?);
    if ea.dim() != ea2.dim() {
        return Ok(Extension::Blocked(Certificate::DimensionMismatch {
            clause: "E∩A vs E′∩A′".into(),
            left: ea,
            right: ea2,
        }));
    }
    for (clause, x, y) in [("A ≈ A′", a, a2), ("E ≈ E′", e, e2)] {
        if !subspace_isometric(x, y)? {
            return Ok(Extension::Blocked(Certificate::NotIsometric {
                clause: clause.into(),
                left: x.clone(),
                right: y.clone(),
            }));
        }
    }
    let inner = match find_isometry_mapping_subspace(e, e2, &a.perp_within(v)?, &a2.perp_within(v2)?)? {
        Extension::Found(m) => m,
        blocked => return Ok(blocked),
    };
    let full = witt_extend(&inner, v, v2)?;
    ensure(full.image_of(a)? == *a2 && full.image_of(e)? == *e2, "pair is not mapped onto its target")?;
    Ok(Extension::Found(full))
}

/// Extend `φ` to `V → V′` sending the totally isotropic `V₁` onto `V₁′`.
pub fn k3_extend(phi: &Isometry, v1: &Subspace, v12: &Subspace, v: &Subspace, v2: &Subspace) -> Result<Isometry> {
    check_inside(phi, v, v2)?;
    check_nonsingular(v, v2)?;
    if !v1.is_subspace_of(v)? || !v12.is_subspace_of(v2)? {
        return Err(Error::OutOfDomain);
    }
    if !v1.is_totally_isotropic() || !v12.is_totally_isotropic() {
        return Err(Error::HypothesisViolated("V1 totally isotropic".into()));
    }
    if v1.dim() != v12.dim() {
        return Err(Error::HypothesisViolated("dim V1 = dim V1′".into()));
    }
    let (e, e2) = (phi.dom(), phi.cod());
    let (p1, p12) = (v1.perp_within(v)?, v12.perp_within(v2)?);
    if phi.image_of(&e.intersect(v1)?)? != e2.intersect(v12)? {
        return Err(Error::HypothesisViolated("E∩V1 image".into()));
    }
    if phi.image_of(&e.intersect(&p1)?)? != e2.intersect(&p12)? {
        return Err(Error::HypothesisViolated("E∩V1⊥ image".into()));
    }
    let (ep, ep2) = (e.perp_within(v)?, e2.perp_within(v2)?);
    let a = v1.intersect(&ep)?;
    let a2 = v12.intersect(&ep2)?;
    let phi0 = extend_orthogonal(phi, &a, &a2, v, v2)?.restrict(&e.sum(&a)?)?;

    let et = e.intersect(&p1)?.complement_in(e)?;
    let e1 = e.intersect(v1)?;
    let ebar = e1.intersect(&ep)?.complement_in(&e1)?;
    let ebar2 = phi0.image_of(&ebar)?;
    let vbar = complement_containing(&ebar, &a, v1)?;
    let vbar2 = complement_containing(&ebar2, &a2, v12)?;
    ensure(vbar.dim() == et.dim(), "isotropic complement and pairing partner differ in size")?;

    let et_basis = et.basis_vectors();
    let functionals: Vec<Vector> = et_basis.iter().map(|x| phi0.apply(x)).collect::<Result<_>>()?;
    let sources = vbar.basis_vectors();
    let mut targets = Vec::with_capacity(sources.len());
    for x in &sources {
        let rhs: Vec<Scalar> = et_basis.iter().map(|t| v.bilinear(t, x)).collect();
        targets.push(riesz_solve(&functionals, &vbar2, &rhs)?);
    }
    let beta = LinearMap::from_pairs(v.ambient(), v2.ambient(), &sources, &targets)
        .map_err(|_| Error::assertion("pairing map disagrees with the first extension"))?;
    let combined = phi0.map().combine(&beta).map_err(|_| Error::assertion("pairing map disagrees with the first extension"))?;
    let phi1 = as_isometry(combined, "combined map on E+V1 is not an isometry")?;
    let full = witt_extend(&phi1, v, v2)?;
    ensure(full.image_of(v1)? == *v12 && full.extends(phi.map())?, "isotropic member is not mapped onto its target")?;
    Ok(full)
}

/// Extend `φ` to `V → V′` sending every member of the self-dual flag `f`
/// onto the matching member of `f2`.
pub fn extend_preserving_self_dual_flag(phi: &Isometry, f: &Flag, f2: &Flag) -> Result<Extension> {
    let (v, v2) = (f.container(), f2.container());
    check_inside(phi, v, v2)?;
    check_nonsingular(v, v2)?;
    if !f.is_self_dual()? || !f2.is_self_dual()? {
        return Err(Error::FlagNotSelfDual);
    }
    if f.dims() != f2.dims() {
        return Err(Error::FlagsNotIsometric);
    }
    let (e, e2) = (phi.dom(), phi.cod());
    for i in 0..=f.k() {
        let clause = format!("flag level {i}");
        if let Some(c) = image_mismatch(phi, &e.intersect(f.member(i))?, &e2.intersect(f2.member(i))?, &clause)? {
            return Ok(Extension::Blocked(c));
        }
    }
    let mut current = phi.clone();
    let mut full = None;
    for i in 1..=f.k() / 2 {
        let step = k3_extend(&current, f.member(i), f2.member(i), v, v2)?;
        current = step.restrict(&current.dom().sum(f.member(i))?)?;
        full = Some(step);
    }
    let full = match full {
        Some(m) => m,
        None => witt_extend(phi, v, v2)?,
    };
    for i in 0..=f.k() {
        ensure(full.image_of(f.member(i))? == *f2.member(i), "flag member is not mapped onto its target")?;
    }
    Ok(Extension::Found(full))
}

/// Subspaces attached to `A ⊆ V`.
#[derive(Debug, Clone)]
struct Side {
    a: Subspace,
    ap: Subspace,
    r: Subspace,
    sum: Subspace,
}

impl Side {
    fn new(a: &Subspace, v: &Subspace) -> Result<Side> {
        if !a.is_subspace_of(v)? {
            return Err(Error::OutOfDomain);
        }
        let ap = a.perp_within(v)?;
        let r = a.intersect(&ap)?;
        let sum = a.sum(&ap)?;
        Ok(Side { a: a.clone(), ap, r, sum })
    }

    /// `(A, A⊥)` or `(A⊥, A)`.
    fn pair(&self, perp: bool) -> (&Subspace, &Subspace) {
        if perp {
            (&self.ap, &self.a)
        } else {
            (&self.a, &self.ap)
        }
    }
}

/// Outcome of evaluating the four image conditions and the induced maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// `φ(E∩A⊥∩A) = E′∩A′⊥∩A′`
    pub c1: bool,
    /// `φ(E∩(A+A⊥)) = E′∩(A′+A′⊥)`
    pub c2: bool,
    /// `φ(E∩A) = E′∩A′`
    pub c3: bool,
    /// `φ(E∩A⊥) = E′∩A′⊥`
    pub c4: bool,
    /// Present only when `c2`, `c3` and `c4` hold.
    pub phi_a_isometry: Option<bool>,
    pub phi_a_perp_isometry: Option<bool>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4 && self.phi_a_isometry == Some(true)
    }

    /// `c3 ∧ c4 ⇒ c1`, and the two induced maps are isometries together.
    pub fn invariants_hold(&self) -> bool {
        (!(self.c3 && self.c4) || self.c1) && self.phi_a_isometry == self.phi_a_perp_isometry
    }
}

const CLAUSES: [&str; 4] = ["C1 (E∩A⊥∩A)", "C2 (E∩(A+A⊥))", "C3 (E∩A)", "C4 (E∩A⊥)"];

/// The source and target subspaces of each image condition, in clause order.
fn clause_subspaces(e: &Subspace, e2: &Subspace, s: &Side, s2: &Side) -> Result<[(Subspace, Subspace); 4]> {
    Ok([
        (e.intersect(&s.r)?, e2.intersect(&s2.r)?),
        (e.intersect(&s.sum)?, e2.intersect(&s2.sum)?),
        (e.intersect(&s.a)?, e2.intersect(&s2.a)?),
        (e.intersect(&s.ap)?, e2.intersect(&s2.ap)?),
    ])
}

pub fn check_conditions(
    phi: &LinearMap,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<ConditionReport> {
    let (s, s2) = (Side::new(a, v)?, Side::new(a2, v2)?);
    let mut c = [false; 4];
    for (i, (src, dst)) in clause_subspaces(phi.dom(), phi.cod(), &s, &s2)?.iter().enumerate() {
        c[i] = phi.image_of(src)? == *dst;
    }
    let (phi_a, phi_ap) = if c[1] && c[2] && c[3] {
        (Some(induced(phi, &s, &s2, false)?.is_isometry()), Some(induced(phi, &s, &s2, true)?.is_isometry()))
    } else {
        (None, None)
    };
    Ok(ConditionReport { c1: c[0], c2: c[1], c3: c[2], c4: c[3], phi_a_isometry: phi_a, phi_a_perp_isometry: phi_ap })
}

/// The map induced by `φ` from `((E+A⊥)∩A)/(A⊥∩A)` to the primed quotient.
/// Row `i` of `matrix` holds the class coordinates of the image of
/// representative `i` of `dom`.
#[derive(Debug, Clone)]
pub struct InducedQuotientMap {
    pub dom: QuotientSpace,
    pub cod: QuotientSpace,
    pub matrix: Matrix,
}

impl InducedQuotientMap {
    pub fn is_isometry(&self) -> bool {
        let d = self.dom.dim();
        if d != self.cod.dim() {
            return false;
        }
        if d == 0 {
            return true;
        }
        if self.matrix.rank() != d {
            return false;
        }
        let pulled = self.matrix.mul(&self.cod.gram).and_then(|m| m.mul(&self.matrix.transpose()));
        matches!(pulled, Ok(g) if g == self.dom.gram)
    }

    /// Image of the class with coordinates `coords`, as class coordinates.
    pub fn apply_class(&self, coords: &[Scalar]) -> Result<Vector> {
        if self.dom.dim() == 0 {
            return Ok(Vec::new());
        }
        self.matrix.vec_mul(coords)
    }
}

fn induced(phi: &LinearMap, s: &Side, s2: &Side, perp: bool) -> Result<InducedQuotientMap> {
    let (x, y) = s.pair(perp);
    let (x2, y2) = s2.pair(perp);
    let (e, e2) = (phi.dom(), phi.cod());
    let dom = e.sum(y)?.intersect(x)?.quotient_metric(&s.r)?;
    let cod = e2.sum(y2)?.intersect(x2)?.quotient_metric(&s2.r)?;
    let mut rows = Vec::with_capacity(dom.dim());
    for rep in &dom.representatives {
        let parts = decompose_along(rep, &[e, y])?;
        let image = phi.apply(&parts[0])?;
        let split = decompose_along(&image, &[x2, y2])?;
        rows.push(cod.class_coords(&split[0])?);
    }
    let matrix = Matrix::from_rows(phi.cod().field(), cod.dim(), &rows)?;
    Ok(InducedQuotientMap { dom, cod, matrix })
}

fn induced_checked(
    phi: &LinearMap,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
    perp: bool,
) -> Result<InducedQuotientMap> {
    let report = check_conditions(phi, a, a2, v, v2)?;
    if !(report.c2 && report.c3 && report.c4) {
        return Err(Error::ConditionsNotMet);
    }
    induced(phi, &Side::new(a, v)?, &Side::new(a2, v2)?, perp)
}

/// The induced map on `((E+A⊥)∩A)/(A⊥∩A)`.
pub fn induced_phi_a(phi: &LinearMap, a: &Subspace, a2: &Subspace, v: &Subspace, v2: &Subspace) -> Result<InducedQuotientMap> {
    induced_checked(phi, a, a2, v, v2, false)
}

/// The induced map on `((E+A)∩A⊥)/(A⊥∩A)`.
pub fn induced_phi_a_perp(
    phi: &LinearMap,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<InducedQuotientMap> {
    induced_checked(phi, a, a2, v, v2, true)
}

/// Extend `φ` to `V → V′` sending `A` onto `A′`, or report the failing
/// condition.
pub fn extend_preserving_subspace(
    phi: &Isometry,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<Extension> {
    check_inside(phi, v, v2)?;
    check_nonsingular(v, v2)?;
    let (s, s2) = (Side::new(a, v)?, Side::new(a2, v2)?);
    if !subspace_isometric(a, a2)? {
        return Ok(Extension::Blocked(Certificate::NotIsometric {
            clause: "A ≈ A′".into(),
            left: a.clone(),
            right: a2.clone(),
        }));
    }
    if let Some(c) = first_failed_condition(phi, &s, &s2)? {
        return Ok(Extension::Blocked(c));
    }
    for perp in [false, true] {
        if !induced(phi, &s, &s2, perp)?.is_isometry() {
            return Ok(Extension::Blocked(Certificate::InducedMapNotIsometry {
                clause: if perp { "induced map on A⊥" } else { "induced map on A" }.into(),
                phi: phi.map().clone(),
                a: a.clone(),
                a2: a2.clone(),
                v: v.clone(),
                v2: v2.clone(),
                perp,
            }));
        }
    }
    let full = construct_subspace_extension(phi, &s, &s2, v, v2)?;
    Ok(Extension::Found(full))
}

/// Conditions in the order C3, C4, C2, C1.
fn first_failed_condition(phi: &LinearMap, s: &Side, s2: &Side) -> Result<Option<Certificate>> {
    let data = clause_subspaces(phi.dom(), phi.cod(), s, s2)?;
    for i in [2, 3, 1, 0] {
        if let Some(c) = image_mismatch(phi, &data[i].0, &data[i].1, CLAUSES[i])? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

fn construct_subspace_extension(phi: &Isometry, s: &Side, s2: &Side, v: &Subspace, v2: &Subspace) -> Result<Isometry> {
    let (e, e2) = (phi.dom(), phi.cod());
    let (sa, sb) = (v.ambient(), v2.ambient());
    let n2 = v2.ambient_dim();

    // Split E∩(A+A⊥) into E∩R, E_A, E_A⊥ and a remainder E_{A,A⊥}.
    let e_r = e.intersect(&s.r)?;
    let (e_cap_a, e_cap_ap) = (e.intersect(&s.a)?, e.intersect(&s.ap)?);
    let e_a = e_r.complement_in(&e_cap_a)?;
    let e_ap = e_r.complement_in(&e_cap_ap)?;
    let e_mid = e.intersect(&s.sum)?;
    let e_mixed = e_cap_a.sum(&e_cap_ap)?.complement_in(&e_mid)?;

    // Split each remainder vector along a fixed complement of R in A and A⊥.
    let c_a = s.r.complement_in(&s.a)?;
    let c_a2 = s2.r.complement_in(&s2.a)?;
    let (mut parts_a, mut parts_ap, mut parts_a2, mut parts_ap2) = (vec![], vec![], vec![], vec![]);
    for x in e_mixed.basis_vectors() {
        let p = split_components(&x, &[&c_a, &s.ap])?;
        let p2 = split_components(&phi.apply(&x)?, &[&c_a2, &s2.ap])?;
        let [a_i, ap_i] = <[Vector; 2]>::try_from(p).expect("two parts");
        let [a_i2, ap_i2] = <[Vector; 2]>::try_from(p2).expect("two parts");
        parts_a.push(a_i);
        parts_ap.push(ap_i);
        parts_a2.push(a_i2);
        parts_ap2.push(ap_i2);
    }

    let mut blocks = Vec::new();
    for (e_x, parts, parts2, x, x2) in [
        (&e_a, &parts_a, &parts_a2, &s.a, &s2.a),
        (&e_ap, &parts_ap, &parts_ap2, &s.ap, &s2.ap),
    ] {
        let mut sources = e_x.basis_vectors();
        let mut targets: Vec<Vector> = sources.iter().map(|u| phi.apply(u)).collect::<Result<_>>()?;
        sources.extend(parts.iter().cloned());
        targets.extend(parts2.iter().cloned());
        let map = LinearMap::from_pairs(sa, sb, &sources, &targets)
            .map_err(|_| Error::assertion("transported quotient map is not well defined"))?;
        let map = as_isometry(map, "transported quotient map is not an isometry")?;
        let block = complement_containing(map.dom(), &s.r, x)?;
        let block2 = complement_containing(map.cod(), &s2.r, x2)?;
        blocks.push(witt_extend(&map, &block, &block2)?);
    }

    // φ₀ on R, compatible with the pairing against a complement Ẽ of E∩(A+A⊥) in E.
    let et = e_mid.complement_in(e)?;
    let et_basis = et.basis_vectors();
    let functionals: Vec<Vector> = et_basis.iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let (ep, ep2) = (e.perp_within(v)?, e2.perp_within(v2)?);
    let w_core = ep.intersect(&e_r)?.basis_vectors();
    let l = w_core.len();
    let mut w = w_core.clone();
    w.extend(Subspace::extend_basis(&w_core, &e_r)?);
    let p = w.len();
    w.extend(Subspace::extend_basis(&w_core, &ep.intersect(&s.r)?)?);
    let q = w.len();
    let rest = Subspace::extend_basis(&w, &s.r)?;
    w.extend(rest);
    let mut w_images: Vec<Vector> = w[..p].iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    let middle = Subspace::extend_basis(&w_images[..l], &ep2.intersect(&s2.r)?)?;
    ensure(middle.len() == q - p, "orthogonal parts of the totally isotropic core differ in size")?;
    w_images.extend(middle);
    for x in &w[q..] {
        let rhs: Vec<Scalar> = et_basis.iter().map(|t| sa.bilinear(t, x)).collect();
        w_images.push(riesz_solve(&functionals, &s2.r, &rhs)?);
    }
    let phi0 = LinearMap::from_pairs(sa, sb, &w, &w_images)?;
    let phi0 = as_isometry(phi0, "map on the totally isotropic core is not an isometry")?;

    let hat = phi0.orthogonal_sum(&blocks[0])?.orthogonal_sum(&blocks[1])?;
    ensure(hat.extends(&phi.map().restrict(&e_mid)?)?, "map on A+A⊥ does not extend φ")?;

    // Correct the images outside E∩(A+A⊥) + R so pairings with Ẽ match.
    let u_low = e_mid.sum(&s.r)?.basis_vectors();
    let r = u_low.len();
    let mut u = u_low.clone();
    u.extend(Subspace::extend_basis(&u_low, &s.sum)?);
    let mut targets = Vec::with_capacity(u.len() + et_basis.len());
    for (i, x) in u.iter().enumerate() {
        let h = hat.apply(x)?;
        if i < r {
            targets.push(h);
            continue;
        }
        let rhs: Vec<Scalar> =
            et_basis.iter().zip(&functionals).map(|(t, f)| &sb.bilinear(f, &h) - &sa.bilinear(t, x)).collect();
        let correction = riesz_solve(&functionals, &s2.r, &rhs)?;
        targets.push(matrix::sub(&h, &correction));
    }
    debug_assert!(targets.iter().all(|t| t.len() == n2));
    let mut sources = u;
    sources.extend(et_basis);
    targets.extend(functionals);
    let tilde = LinearMap::from_pairs(sa, sb, &sources, &targets)?;
    let tilde = as_isometry(tilde, "adjusted map on E+A+A⊥ is not an isometry")?;
    let full = witt_extend(&tilde, v, v2)?;
    ensure(full.extends(phi.map())? && full.image_of(&s.a)? == s2.a, "extension does not send A onto A′")?;
    Ok(full)
}

/// The same extension when `(E+A⊥)∩A = E∩A` and `(E′+A′⊥)∩A′ = E′∩A′`.
pub fn extend_preserving_subspace_split(
    phi: &Isometry,
    a: &Subspace,
    a2: &Subspace,
    v: &Subspace,
    v2: &Subspace,
) -> Result<Extension> {
    check_inside(phi, v, v2)?;
    let (e, e2) = (phi.dom(), phi.cod());
    let (ap, ap2) = (a.perp_within(v)?, a2.perp_within(v2)?);
    if e.sum(&ap)?.intersect(a)? != e.intersect(a)? || e2.sum(&ap2)?.intersect(a2)? != e2.intersect(a2)? {
        return Err(Error::SplitHypothesisViolated);
    }
    let data = [(e.intersect(a)?, e2.intersect(a2)?, CLAUSES[2]), (e.intersect(&ap)?, e2.intersect(&ap2)?, CLAUSES[3])];
    for (src, dst, clause) in &data {
        if let Some(c) = image_mismatch(phi, src, dst, clause)? {
            return Ok(Extension::Blocked(c));
        }
    }
    extend_preserving_subspace(phi, a, a2, v, v2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::maps::reflection_product;
    use crate::matrix::vector_from_i64;
    use crate::space::{MetricSpace, SpaceRef};
    use proptest::prelude::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn span(s: &SpaceRef, rows: &[&[i64]]) -> Subspace {
        Subspace::span_i64(s, rows).unwrap()
    }

    fn identity_on(e: &Subspace) -> Isometry {
        Isometry::identity(e)
    }

    fn h6() -> SpaceRef {
        MetricSpace::hyperbolic(gf(3), 3)
    }

    // Coordinates in H6: e1, ẽ1, e2, ẽ2, e3, ẽ3.
    const E1: [i64; 6] = [1, 0, 0, 0, 0, 0];
    const F1: [i64; 6] = [0, 1, 0, 0, 0, 0];
    const E2: [i64; 6] = [0, 0, 1, 0, 0, 0];
    const F2: [i64; 6] = [0, 0, 0, 1, 0, 0];
    const E3: [i64; 6] = [0, 0, 0, 0, 1, 0];
    const F3: [i64; 6] = [0, 0, 0, 0, 0, 1];

    #[test]
    fn singular_extension_over_a_radical() {
        let f = gf(3);
        let v = MetricSpace::new(Matrix::from_i64(f, &[&[0, 0], &[0, 1]])).unwrap();
        let whole = Subspace::whole(&v);
        let rad = whole.radical();
        let ext = extend_singular(&identity_on(&rad), &whole, &whole).unwrap();
        assert!(ext.is_isometry());
        assert!(ext.extends(Isometry::identity(&rad).map()).unwrap());
    }

    #[test]
    fn singular_extension_reduces_to_the_nonsingular_case() {
        let h = h6();
        let whole = Subspace::whole(&h);
        let e = span(&h, &[&E1, &F2]);
        let ext = extend_singular(&identity_on(&e), &whole, &whole).unwrap();
        assert!(ext.extends(identity_on(&e).map()).unwrap());
    }

    #[test]
    fn singular_extension_rejects_a_misplaced_radical() {
        let f = gf(3);
        let v = MetricSpace::diagonal(f, &[0, 1, 2]);
        let whole = Subspace::whole(&v);
        let phi = Isometry::from_pairs(&v, &v, &[vector_from_i64(f, &[1, 0, 0])], &[vector_from_i64(f, &[0, 1, 1])])
            .unwrap();
        assert!(matches!(extend_singular(&phi, &whole, &whole), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn mapping_subspaces() {
        let h = h6();
        let whole = Subspace::whole(&h);
        let zero = Subspace::zero(&h);
        assert!(find_isometry_mapping_subspace(&zero, &zero, &whole, &whole).unwrap().is_found());
        let e = span(&h, &[&E1, &E2]);
        let e2 = span(&h, &[&F1, &E3]);
        let m = find_isometry_mapping_subspace(&e, &e2, &whole, &whole).unwrap().into_found().unwrap();
        assert_eq!(m.image_of(&e).unwrap(), e2);
        let d = MetricSpace::diagonal(gf(3), &[1, 1]);
        let dw = Subspace::whole(&d);
        let x = span(&d, &[&[1, 0]]);
        let y = span(&d, &[&[1, 1]]);
        let out = find_isometry_mapping_subspace(&x, &y, &dw, &dw).unwrap();
        let cert = out.certificate().unwrap();
        assert!(matches!(cert, Certificate::NotIsometric { .. }));
        assert!(cert.confirms_failure().unwrap());
    }

    #[test]
    fn orthogonal_constraint() {
        let h = h6();
        let whole = Subspace::whole(&h);
        let e = span(&h, &[&E1]);
        let a = span(&h, &[&E3, &F3]);
        let m = extend_orthogonal(&identity_on(&e), &a, &a, &whole, &whole).unwrap();
        assert_eq!(m.image_of(&a).unwrap(), a);
        assert!(m.extends(identity_on(&e).map()).unwrap());
        let zero = Subspace::zero(&h);
        assert!(extend_orthogonal(&identity_on(&e), &zero, &zero, &whole, &whole).is_ok());
        let bad = span(&h, &[&F1]);
        assert!(matches!(
            extend_orthogonal(&identity_on(&e), &bad, &bad, &whole, &whole),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn orthogonal_pairs() {
        let h = h6();
        let whole = Subspace::whole(&h);
        let e = span(&h, &[&E1]);
        let e2 = span(&h, &[&E2]);
        let a = span(&h, &[&E3]);
        let a2 = span(&h, &[&F3]);
        let m = find_isometry_orthogonal_pair(&e, &e2, &a, &a2, &whole, &whole).unwrap().into_found().unwrap();
        assert_eq!(m.image_of(&e).unwrap(), e2);
        assert_eq!(m.image_of(&a).unwrap(), a2);
        // E∩A has dimension 1 on one side and 0 on the other.
        let b = span(&h, &[&E1, &E3]);
        let b2 = span(&h, &[&E3, &F1]);
        let out = find_isometry_orthogonal_pair(&e, &e2, &b, &b2, &whole, &whole).unwrap();
        assert!(matches!(out.certificate(), Some(Certificate::DimensionMismatch { .. })));
    }

    #[test]
    fn isotropic_member_extension() {
        let f = gf(3);
        let h2 = MetricSpace::hyperbolic(f, 1);
        let w = Subspace::whole(&h2);
        let zero = Subspace::zero(&h2);
        let v1 = span(&h2, &[&[1, 0]]);
        let v12 = span(&h2, &[&[0, 1]]);
        let m = k3_extend(&identity_on(&zero), &v1, &v12, &w, &w).unwrap();
        assert_eq!(m.image_of(&v1).unwrap(), v12);

        let h = h6();
        let whole = Subspace::whole(&h);
        let e = span(&h, &[&E1, &[0, 0, 1, 0, 1, 0]]);
        let v1 = span(&h, &[&E1]);
        let m = k3_extend(&identity_on(&e), &v1, &v1, &whole, &whole).unwrap();
        assert_eq!(m.image_of(&v1).unwrap(), v1);
        assert!(m.extends(identity_on(&e).map()).unwrap());
        let zero = Subspace::zero(&h);
        assert!(k3_extend(&identity_on(&e), &zero, &zero, &whole, &whole).is_ok());
    }

    #[test]
    fn self_dual_flag_extension() {
        let f = gf(3);
        let h2 = MetricSpace::hyperbolic(f, 1);
        let w = Subspace::whole(&h2);
        let zero = Subspace::zero(&h2);
        let fl = Flag::new(vec![zero.clone(), span(&h2, &[&[1, 0]]), w.clone()]).unwrap();
        let fl2 = Flag::new(vec![zero.clone(), span(&h2, &[&[0, 1]]), w.clone()]).unwrap();
        let m = extend_preserving_self_dual_flag(&identity_on(&zero), &fl, &fl2).unwrap().into_found().unwrap();
        assert_eq!(m.image_of(fl.member(1)).unwrap(), *fl2.member(1));
        let trivial = Flag::trivial(&w);
        assert!(extend_preserving_self_dual_flag(&identity_on(&zero), &trivial, &trivial).unwrap().is_found());

        let h = h6();
        let whole = Subspace::whole(&h);
        let line = span(&h, &[&E1]);
        let lag = span(&h, &[&E1, &E2, &E3]);
        let fl = Flag::new(vec![Subspace::zero(&h), line.clone(), lag, line.perp(), whole]).unwrap();
        assert!(fl.is_self_dual().unwrap());
        let e = span(&h, &[&E1, &[0, 0, 1, 0, 1, 0]]);
        let m = extend_preserving_self_dual_flag(&identity_on(&e), &fl, &fl).unwrap().into_found().unwrap();
        for member in fl.members() {
            assert_eq!(m.image_of(member).unwrap(), *member);
        }
        // A map moving E∩V₂ out of the flag is rejected with the level named.
        let e_line = span(&h, &[&E2]);
        let phi = Isometry::from_pairs(&h, &h, &e_line.basis_vectors(), &span(&h, &[&F2]).basis_vectors()).unwrap();
        let out = extend_preserving_self_dual_flag(&phi, &fl, &fl).unwrap();
        let cert = out.certificate().unwrap();
        assert_eq!(cert.clause(), "flag level 2");
        assert!(cert.confirms_failure().unwrap());
    }

    #[test]
    fn trivial_subspace_conditions() {
        let h = h6();
        let whole = Subspace::whole(&h);
        let e = span(&h, &[&E1, &F2]);
        let phi = identity_on(&e);
        let r = check_conditions(phi.map(), &Subspace::zero(&h), &Subspace::zero(&h), &whole, &whole).unwrap();
        assert!(r.all_hold() && r.invariants_hold());
        for a in [Subspace::zero(&h), whole.clone()] {
            let m = extend_preserving_subspace(&phi, &a, &a, &whole, &whole).unwrap().into_found().unwrap();
            assert!(m.extends(phi.map()).unwrap());
        }
    }

    /// `I₂` over GF(7) with `E = span{v1+2v2}`, `E′ = span{v1+3v2}`, `A = A′ = span{v1}`.
    fn seven_data() -> (SpaceRef, Subspace, Subspace, Subspace, Vec<Isometry>) {
        let f = gf(7);
        let v = MetricSpace::diagonal(f, &[1, 1]);
        let e = span(&v, &[&[1, 2]]);
        let e2 = span(&v, &[&[1, 3]]);
        let a = span(&v, &[&[1, 0]]);
        let phis = [2, 5]
            .iter()
            .map(|&c| Isometry::from_pairs(&v, &v, &[vector_from_i64(f, &[1, 2])], &[vector_from_i64(f, &[c, 3 * c])]).unwrap())
            .collect();
        (v, e, e2, a, phis)
    }

    #[test]
    fn seven_counterexample_is_blocked_by_the_induced_map() {
        let (v, _, _, a, phis) = seven_data();
        let w = Subspace::whole(&v);
        assert_eq!(phis.len(), 2);
        for phi in &phis {
            let r = check_conditions(phi.map(), &a, &a, &w, &w).unwrap();
            assert!(r.c1 && r.c2 && r.c3 && r.c4);
            assert_eq!(r.phi_a_isometry, Some(false));
            assert!(r.invariants_hold());
            let q = induced_phi_a(phi.map(), &a, &a, &w, &w).unwrap();
            // v1 = (v1+2v2) − 2v2 gives φ_A(v1) = c·v1 with c² = 4.
            assert_eq!(q.dom.dim(), 1);
            let img = q.apply_class(&[FieldSpec::prime(7).unwrap().one()]).unwrap();
            let c = if phi.apply(&vector_from_i64(gf(7), &[1, 2])).unwrap()[0] == gf(7).from_i64(2) { 2 } else { 5 };
            let rep = &q.cod.representatives[0];
            let scaled = matrix::scale(&img[0], rep);
            assert_eq!(scaled, vector_from_i64(gf(7), &[c, 0]));
            let out = extend_preserving_subspace(phi, &a, &a, &w, &w).unwrap();
            let cert = out.certificate().unwrap();
            assert!(matches!(cert, Certificate::InducedMapNotIsometry { .. }));
            assert!(cert.confirms_failure().unwrap());
        }
    }

    #[test]
    fn mismatched_radical_slices() {
        let h = h6();
        let w = Subspace::whole(&h);
        let e = span(&h, &[&E1, &[0, 0, 1, 0, 1, 0]]);
        let a = span(&h, &[&E1, &E2, &F2]);
        let a2 = span(&h, &[&E1, &F1, &[0, 0, 0, 1, 0, -1]]);
        let r = check_conditions(identity_on(&e).map(), &a, &a2, &w, &w).unwrap();
        assert!(!r.c1);
        assert!(r.invariants_hold());
        assert_eq!(e.intersect(&a.intersect(&a.perp()).unwrap()).unwrap().dim(), 1);
        assert_eq!(e.intersect(&a2.intersect(&a2.perp()).unwrap()).unwrap().dim(), 0);
        let out = extend_preserving_subspace(&identity_on(&e), &a, &a2, &w, &w).unwrap();
        assert!(out.certificate().unwrap().confirms_failure().unwrap());
    }

    #[test]
    fn subspace_extension_moves_a_plane() {
        let h = h6();
        let w = Subspace::whole(&h);
        let e = span(&h, &[&E1]);
        let a = span(&h, &[&E2, &F2]);
        let a2 = span(&h, &[&E3, &F3]);
        let phi = identity_on(&e);
        let m = extend_preserving_subspace(&phi, &a, &a2, &w, &w).unwrap().into_found().unwrap();
        assert_eq!(m.image_of(&a).unwrap(), a2);
        assert!(m.extends(phi.map()).unwrap());
        let s = extend_preserving_subspace_split(&phi, &a, &a2, &w, &w).unwrap();
        assert!(s.is_found());
    }

    #[test]
    fn split_hypothesis_is_checked() {
        let h = h6();
        let w = Subspace::whole(&h);
        let e = span(&h, &[&[1, 0, 0, 0, 1, 0]]);
        let a = span(&h, &[&E1]);
        let out = extend_preserving_subspace_split(&identity_on(&e), &a, &a, &w, &w);
        // (E + A⊥) ∩ A contains e1 while E ∩ A = 0.
        assert!(matches!(out, Err(Error::SplitHypothesisViolated)));
        let e = span(&h, &[&E1]);
        let a = span(&h, &[&E2, &F2]);
        let a2 = span(&h, &[&E1, &F1]);
        let out = extend_preserving_subspace_split(&identity_on(&e), &a, &a2, &w, &w).unwrap();
        assert_eq!(out.certificate().unwrap().clause(), CLAUSES[2]);
    }

    fn vectors(f: FieldSpec, raw: &[i64], n: usize) -> Vec<Vector> {
        raw.chunks(n).map(|c| vector_from_i64(f, c)).collect()
    }

    /// Induced maps add up: classes of the `A` and `A⊥` components of
    /// `v ∈ E∩(A+A⊥)` go where the components of `φ(v)` lie.
    fn induced_maps_are_compatible(phi: &LinearMap, a: &Subspace, a2: &Subspace, w: &Subspace) -> bool {
        let (s, s2) = (Side::new(a, w).unwrap(), Side::new(a2, w).unwrap());
        let qa = induced(phi, &s, &s2, false).unwrap();
        let qp = induced(phi, &s, &s2, true).unwrap();
        let mid = phi.dom().intersect(&s.sum).unwrap();
        for x in mid.basis_vectors() {
            let parts = decompose_along(&x, &[&s.a, &s.ap]).unwrap();
            let parts2 = decompose_along(&phi.apply(&x).unwrap(), &[&s2.a, &s2.ap]).unwrap();
            for (q, p, p2) in [(&qa, &parts[0], &parts2[0]), (&qp, &parts[1], &parts2[1])] {
                let got = q.apply_class(&q.dom.class_coords(p).unwrap()).unwrap();
                if got != q.cod.class_coords(p2).unwrap() {
                    return false;
                }
            }
        }
        true
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn transported_constraints_always_extend(
            refl in proptest::collection::vec(0i64..3, 16),
            raw_e in proptest::collection::vec(0i64..3, 8),
            raw_a in proptest::collection::vec(0i64..3, 8),
            diag in any::<bool>(),
        ) {
            let f = gf(3);
            let v = if diag { MetricSpace::diagonal(f, &[1, 1, 1, 1]) } else { MetricSpace::hyperbolic(f, 2) };
            let w = Subspace::whole(&v);
            let g = reflection_product(&v, &vectors(f, &refl, 4)).unwrap();
            let e = Subspace::span(&v, &vectors(f, &raw_e, 4)).unwrap();
            let a = Subspace::span(&v, &vectors(f, &raw_a, 4)).unwrap();
            let a2 = g.image_of(&a).unwrap();
            let phi = g.restrict(&e).unwrap();
            let report = check_conditions(phi.map(), &a, &a2, &w, &w).unwrap();
            prop_assert!(report.all_hold());
            prop_assert!(report.invariants_hold());
            prop_assert!(induced_maps_are_compatible(phi.map(), &a, &a2, &w));
            let m = extend_preserving_subspace(&phi, &a, &a2, &w, &w).unwrap().into_found().unwrap();
            prop_assert_eq!(m.image_of(&a).unwrap(), a2.clone());
            prop_assert!(m.extends(phi.map()).unwrap());
        }

        #[test]
        fn arbitrary_targets_are_found_or_certified(
            refl in proptest::collection::vec(0i64..3, 16),
            raw_e in proptest::collection::vec(0i64..3, 8),
            raw_a in proptest::collection::vec(0i64..3, 8),
            raw_a2 in proptest::collection::vec(0i64..3, 8),
        ) {
            let f = gf(3);
            let v = MetricSpace::hyperbolic(f, 2);
            let w = Subspace::whole(&v);
            let g = reflection_product(&v, &vectors(f, &refl, 4)).unwrap();
            let e = Subspace::span(&v, &vectors(f, &raw_e, 4)).unwrap();
            let a = Subspace::span(&v, &vectors(f, &raw_a, 4)).unwrap();
            let a2 = Subspace::span(&v, &vectors(f, &raw_a2, 4)).unwrap();
            let phi = g.restrict(&e).unwrap();
            let report = check_conditions(phi.map(), &a, &a2, &w, &w).unwrap();
            prop_assert!(report.invariants_hold());
            match extend_preserving_subspace(&phi, &a, &a2, &w, &w).unwrap() {
                Extension::Found(m) => {
                    prop_assert!(report.all_hold());
                    prop_assert_eq!(m.image_of(&a).unwrap(), a2.clone());
                    let again = check_conditions(&m.restrict(&e).unwrap().into_map(), &a, &a2, &w, &w).unwrap();
                    prop_assert!(again.all_hold());
                }
                Extension::Blocked(c) => prop_assert!(c.confirms_failure().unwrap()),
            }
        }

        #[test]
        fn isotropic_members_extend(
            refl in proptest::collection::vec(0i64..3, 24),
            raw_e in proptest::collection::vec(0i64..3, 12),
            pick in 0usize..4,
        ) {
            let f = gf(3);
            let v = MetricSpace::hyperbolic(f, 3);
            let w = Subspace::whole(&v);
            let g = reflection_product(&v, &vectors(f, &refl, 6)).unwrap();
            let e = Subspace::span(&v, &vectors(f, &raw_e, 6)).unwrap();
            let choices: [&[&[i64]]; 4] = [&[], &[&E1], &[&E1, &F2], &[&E1, &E2, &E3]];
            let v1 = span(&v, choices[pick]);
            let v12 = g.image_of(&v1).unwrap();
            let phi = g.restrict(&e).unwrap();
            let m = k3_extend(&phi, &v1, &v12, &w, &w).unwrap();
            prop_assert_eq!(m.image_of(&v1).unwrap(), v12.clone());
            prop_assert!(m.extends(phi.map()).unwrap());
        }
    }
}
