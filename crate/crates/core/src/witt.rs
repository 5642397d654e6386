//! Isotropic vectors, hyperbolic splitting, Witt decompositions, isometry
//! witnesses between nonsingular spaces, and the classical extension theorem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::maps::{Isometry, LinearMap};
use crate::matrix::{self, Matrix, Vector};
use crate::space::{orthogonal_basis, Subspace};

/// Exhaustive enumeration is used while the search space has at most this
/// many vectors.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

const RANDOM_TRIES: usize = 64;
const RATIONAL_SEARCH_BOUND: i64 = 3;

/// `V = V⁺ ⊕ V̂ ⊕ V⁻`, where `plus[i]`, `minus[i]` form hyperbolic pairs.
#[derive(Debug, Clone)]
pub struct WittDecomposition {
    pub plus: Subspace,
    pub anis: Subspace,
    pub minus: Subspace,
    pub plus_basis: Vec<Vector>,
    pub minus_basis: Vec<Vector>,
}

impl WittDecomposition {
    pub fn index(&self) -> usize {
        self.plus.dim()
    }

    /// Build a decomposition from its three summands, pairing the canonical
    /// basis of `plus` with its dual basis in `minus`.
    pub fn from_parts(plus: Subspace, anis: Subspace, minus: Subspace) -> Result<Self> {
        let plus_basis = plus.basis_vectors();
        let mb = minus.basis_vectors();
        if plus_basis.len() != mb.len() {
            return Err(Error::InvalidDecomposition("isotropic parts have different dimensions".into()));
        }
        let field = plus.field();
        let d = mb.len();
        let mut g = Matrix::zeros(field, d, d);
        for (i, x) in plus_basis.iter().enumerate() {
            for (j, y) in mb.iter().enumerate() {
                g.set(i, j, plus.bilinear(x, y));
            }
        }
        let inv = g
            .inverse()
            .map_err(|_| Error::InvalidDecomposition("V+ and V- are not in duality".into()))?;
        let n = plus.ambient_dim();
        let minus_basis = (0..d)
            .map(|i| {
                let coeffs: Vec<Scalar> = (0..d).map(|j| inv.get(j, i).clone()).collect();
                matrix::combination(field, n, &coeffs, &mb)
            })
            .collect();
        Ok(WittDecomposition { plus, anis, minus, plus_basis, minus_basis })
    }

    /// Check every structural invariant against the container `v`.
    pub fn validate(&self, v: &Subspace) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDecomposition(m.to_string()));
        let total = self.plus.sum(&self.anis)?.sum(&self.minus)?;
        if total != *v || self.plus.dim() + self.anis.dim() + self.minus.dim() != v.dim() {
            return bad("summands do not form a direct sum equal to the space");
        }
        if self.plus.dim() != self.minus.dim() {
            return bad("isotropic parts have different dimensions");
        }
        if !self.plus.is_totally_isotropic() || !self.minus.is_totally_isotropic() {
            return bad("V+ or V- is not totally isotropic");
        }
        if !self.anis.is_orthogonal_to(&self.plus)? || !self.anis.is_orthogonal_to(&self.minus)? {
            return bad("anisotropic part is not orthogonal to V+ and V-");
        }
        if matches!(find_isotropic_vector(&self.anis), Ok(Some(_))) {
            return bad("anisotropic part contains an isotropic vector");
        }
        Ok(())
    }
}

/// Dimension and discriminant square class of a nonsingular form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareClassInvariant {
    pub dim: usize,
    pub disc_is_square: bool,
}

pub fn square_class_invariant(s: &Subspace) -> Result<SquareClassInvariant> {
    let det = s.restrict_form().determinant()?;
    if det.is_zero() {
        return Err(Error::SingularSpace);
    }
    Ok(SquareClassInvariant { dim: s.dim(), disc_is_square: det.is_square() })
}

/// Little-endian counter over `GF(p)^d` skipping the zero vector: the first
/// coordinate varies fastest.
fn coordinate_vectors(field: FieldSpec, d: usize) -> impl Iterator<Item = Vector> {
    let p = field.order().unwrap_or(1);
    let mut digits = vec![0u64; d];
    let mut done = d == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut i = 0;
        loop {
            if i == d {
                done = true;
                return None;
            }
            digits[i] += 1;
            if digits[i] == p {
                digits[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
        Some(digits.iter().map(|&x| field.from_u64(x)).collect())
    })
}

fn search_space_size(field: FieldSpec, d: usize) -> u128 {
    match field.order() {
        Some(p) => (p as u128).checked_pow(d as u32).unwrap_or(u128::MAX),
        None => u128::MAX,
    }
}

/// A nonzero isotropic vector of `s`, or `None` when `s` is anisotropic.
/// Small spaces are scanned in counter order, so the answer is the first
/// isotropic vector in that order.
pub fn find_isotropic_vector(s: &Subspace) -> Result<Option<Vector>> {
    find_isotropic_vector_seeded(s, 0)
}

pub fn find_isotropic_vector_seeded(s: &Subspace, seed: u64) -> Result<Option<Vector>> {
    let field = s.field();
    let d = s.dim();
    if d == 0 {
        return Ok(None);
    }
    let space = s.ambient();
    if field.is_finite() && search_space_size(field, d) <= ENUMERATION_LIMIT {
        for c in coordinate_vectors(field, d) {
            let v = s.vector_from_coords(&c);
            if space.norm(&v).is_zero() {
                return Ok(Some(v));
            }
        }
        return Ok(None);
    }
    let diag = orthogonal_basis(s);
    if let Some((u, _)) = diag.iter().find(|(_, a)| a.is_zero()) {
        return Ok(Some(u.clone()));
    }
    if d == 1 {
        return Ok(None);
    }
    let (u1, a1) = &diag[0];
    let (u2, a2) = &diag[1];
    // a1 x² + a2 y² = 0 with x = 1.
    let t = -&(a1.try_div(a2)?);
    if t.is_square() {
        let y = t.sqrt()?;
        return Ok(Some(matrix::add(u1, &matrix::scale(&y, u2))));
    }
    if d == 2 {
        return Ok(None);
    }
    let (u3, a3) = &diag[2];
    match field {
        FieldSpec::Prime(p) => {
            // a1 x² + a2 y² = −a3 always has a solution over GF(p).
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let try_x = |x: Scalar| -> Result<Option<Vector>> {
                let rhs = (&(-a3) - &(a1 * &(&x * &x))).try_div(a2)?;
                if rhs.is_square() {
                    let y = rhs.sqrt()?;
                    let v = matrix::add(
                        &matrix::add(&matrix::scale(&x, u1), &matrix::scale(&y, u2)),
                        u3,
                    );
                    return Ok(Some(v));
                }
                Ok(None)
            };
            for _ in 0..RANDOM_TRIES {
                if let Some(v) = try_x(field.from_u64(rng.gen_range(0..p)))? {
                    return Ok(Some(v));
                }
            }
            for x in 0..p {
                if let Some(v) = try_x(field.from_u64(x))? {
                    return Ok(Some(v));
                }
            }
            Err(Error::assertion("ternary form over a finite field without isotropic vector"))
        }
        FieldSpec::Rational => {
            let signs: Vec<i8> = diag.iter().map(|(_, a)| a.signum().unwrap_or(0)).collect();
            if signs.iter().all(|&s| s > 0) || signs.iter().all(|&s| s < 0) {
                return Ok(None);
            }
            let b = RATIONAL_SEARCH_BOUND;
            let width = (2 * b + 1) as u128;
            let total = width.saturating_pow(d.min(6) as u32);
            for k in 1..total {
                let mut rem = k;
                let mut coords = Vec::with_capacity(d);
                for _ in 0..d {
                    let idx = (rem % width) as i64;
                    rem /= width;
                    let digit = if idx % 2 == 1 { (idx + 1) / 2 } else { -idx / 2 };
                    coords.push(field.from_i64(digit));
                }
                if matrix::is_zero_vector(&coords) {
                    continue;
                }
                let v = s.vector_from_coords(&coords);
                if space.norm(&v).is_zero() {
                    return Ok(Some(v));
                }
            }
            Err(Error::BackendUnsupported(
                "isotropy of an indefinite rational form of dimension at least 3".into(),
            ))
        }
    }
}

/// Given isotropic `x` in the nonsingular `container`, a vector `w` of the
/// container with `b(x, w) = 1` and `b(w, w) = 0`.
pub fn hyperbolic_partner(x: &[Scalar], container: &Subspace) -> Result<Vector> {
    let space = container.ambient();
    let w = container
        .basis_vectors()
        .into_iter()
        .find(|w| !space.bilinear(x, w).is_zero())
        .ok_or(Error::SingularSpace)?;
    Ok(normalize_partner(x, &w, container))
}

fn normalize_partner(x: &[Scalar], w: &[Scalar], container: &Subspace) -> Vector {
    let space = container.ambient();
    let field = container.field();
    let c = space.bilinear(x, w).inv().expect("pairing is nonzero");
    let w = matrix::scale(&c, w);
    let half = field.from_i64(2).inv().expect("odd characteristic");
    let q = &space.norm(&w) * &half;
    matrix::sub(&w, &matrix::scale(&q, x))
}

/// Witt decomposition of the nonsingular subspace `v` by repeated
/// hyperbolic-plane splitting.
pub fn witt_decompose(v: &Subspace) -> Result<WittDecomposition> {
    decompose_with(v, None)
}

/// Same as [`witt_decompose`] with randomly chosen isotropic vectors and
/// partners; used to check that the Witt index does not depend on choices.
pub fn witt_decompose_seeded(v: &Subspace, seed: u64) -> Result<WittDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    decompose_with(v, Some(&mut rng))
}

fn random_isotropic(c: &Subspace, rng: &mut ChaCha8Rng) -> Result<Option<Vector>> {
    let field = c.field();
    if let Some(p) = field.order() {
        for _ in 0..256 {
            let coords: Vector = (0..c.dim()).map(|_| field.from_u64(rng.gen_range(0..p))).collect();
            let v = c.vector_from_coords(&coords);
            if !matrix::is_zero_vector(&v) && c.ambient().norm(&v).is_zero() {
                return Ok(Some(v));
            }
        }
    }
    find_isotropic_vector_seeded(c, rng.gen())
}

fn decompose_with(v: &Subspace, mut rng: Option<&mut ChaCha8Rng>) -> Result<WittDecomposition> {
    if !v.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    let space = v.ambient().clone();
    let mut container = v.clone();
    let mut plus_basis = Vec::new();
    let mut minus_basis = Vec::new();
    loop {
        let x = match rng.as_deref_mut() {
            Some(r) => random_isotropic(&container, r)?,
            None => find_isotropic_vector(&container)?,
        };
        let Some(x) = x else { break };
        let w = match rng.as_deref_mut() {
            Some(r) => {
                let field = container.field();
                let p = field.order().unwrap_or(1);
                let mut pick = None;
                for _ in 0..64 {
                    let coords: Vector = (0..container.dim())
                        .map(|_| field.from_u64(r.gen_range(0..p.max(2))))
                        .collect();
                    let w = container.vector_from_coords(&coords);
                    if !space.bilinear(&x, &w).is_zero() {
                        pick = Some(normalize_partner(&x, &w, &container));
                        break;
                    }
                }
                match pick {
                    Some(w) => w,
                    None => hyperbolic_partner(&x, &container)?,
                }
            }
            None => hyperbolic_partner(&x, &container)?,
        };
        let plane = Subspace::span(&space, &[x.clone(), w.clone()])?;
        container = plane.perp_within(&container)?;
        plus_basis.push(x);
        minus_basis.push(w);
    }
    Ok(WittDecomposition {
        plus: Subspace::span(&space, &plus_basis)?,
        minus: Subspace::span(&space, &minus_basis)?,
        anis: container,
        plus_basis,
        minus_basis,
    })
}

/// A vector of `w` with `b(u, u) = a`, if one exists.
pub fn represent(w: &Subspace, a: &Scalar) -> Result<Option<Vector>> {
    let field = w.field();
    let d = w.dim();
    let space = w.ambient();
    if a.is_zero() {
        return find_isotropic_vector(w);
    }
    if d == 0 {
        return Ok(None);
    }
    if field.is_finite() && search_space_size(field, d) <= ENUMERATION_LIMIT {
        for c in coordinate_vectors(field, d) {
            let v = w.vector_from_coords(&c);
            if space.norm(&v) == *a {
                return Ok(Some(v));
            }
        }
        return Ok(None);
    }
    let diag = orthogonal_basis(w);
    for (u, b) in &diag {
        if b.is_zero() {
            continue;
        }
        let t = a.try_div(b)?;
        if t.is_square() {
            return Ok(Some(matrix::scale(&t.sqrt()?, u)));
        }
    }
    let nonzero: Vec<&(Vector, Scalar)> = diag.iter().filter(|(_, b)| !b.is_zero()).collect();
    if let (Some(p), true) = (field.order(), nonzero.len() >= 2) {
        let (u1, a1) = nonzero[0];
        let (u2, a2) = nonzero[1];
        // a1 x² + a2 y² = a is solvable over GF(p) for every a.
        for x in 0..p {
            let xs = field.from_u64(x);
            let rhs = (a - &(a1 * &(&xs * &xs))).try_div(a2)?;
            if rhs.is_square() {
                let y = rhs.sqrt()?;
                return Ok(Some(matrix::add(&matrix::scale(&xs, u1), &matrix::scale(&y, u2))));
            }
        }
        return Err(Error::assertion("binary form over a finite field misses a value"));
    }
    if field.is_finite() {
        return Ok(None);
    }
    Err(Error::BackendUnsupported("representation of a rational by a rational form".into()))
}

/// Whether two nonsingular subspaces are isometric.
pub fn is_isometric(a: &Subspace, b: &Subspace) -> Result<bool> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field(), b.field()));
    }
    let (ia, ib) = (square_class_invariant(a)?, square_class_invariant(b)?);
    match a.field() {
        FieldSpec::Prime(_) => Ok(ia == ib),
        FieldSpec::Rational => {
            let ratio = a.restrict_form().determinant()?.try_div(&b.restrict_form().determinant()?)?;
            if !ratio.is_square() || signature(a) != signature(b) {
                return Ok(false);
            }
            Ok(isometry_between(a, b)?.is_some())
        }
    }
}

/// Number of positive and negative entries of a diagonalization over ℚ.
pub fn signature(s: &Subspace) -> (usize, usize) {
    let diag = orthogonal_basis(s);
    let pos = diag.iter().filter(|(_, a)| a.signum() == Some(1)).count();
    let neg = diag.iter().filter(|(_, a)| a.signum() == Some(-1)).count();
    (pos, neg)
}

/// An isometry between nonsingular subspaces, or `None` when none exists.
pub fn isometry_between(a: &Subspace, b: &Subspace) -> Result<Option<Isometry>> {
    if !a.is_nonsingular() || !b.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    if a.dim() != b.dim() {
        return Ok(None);
    }
    match a.field() {
        FieldSpec::Prime(_) => {
            if square_class_invariant(a)? != square_class_invariant(b)? {
                return Ok(None);
            }
            finite_witness(a, b).map(Some)
        }
        FieldSpec::Rational => rational_witness(a, b),
    }
}

/// Hyperbolic pairs are matched pairwise, the anisotropic kernels by
/// representing one orthogonal basis vector at a time.
fn finite_witness(a: &Subspace, b: &Subspace) -> Result<Isometry> {
    let wa = witt_decompose(a)?;
    let wb = witt_decompose(b)?;
    if wa.index() != wb.index() {
        return Err(Error::assertion("isometric spaces with different Witt index"));
    }
    let mut sources = wa.plus_basis.clone();
    sources.extend(wa.minus_basis.iter().cloned());
    let mut targets = wb.plus_basis.clone();
    targets.extend(wb.minus_basis.iter().cloned());
    let hyperbolic = Isometry::from_pairs(a.ambient(), b.ambient(), &sources, &targets)?;
    let kernel = match_by_representation(&wa.anis, &wb.anis)?
        .ok_or_else(|| Error::assertion("anisotropic kernels of isometric spaces differ"))?;
    hyperbolic.orthogonal_sum(&kernel)
}

fn match_by_representation(a: &Subspace, b: &Subspace) -> Result<Option<Isometry>> {
    let space_a = a.ambient().clone();
    let space_b = b.ambient().clone();
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    let (mut ca, mut cb) = (a.clone(), b.clone());
    while ca.dim() > 0 {
        let (u, q) = orthogonal_basis(&ca).into_iter().next().expect("nonzero dimension");
        let Some(u2) = represent(&cb, &q)? else { return Ok(None) };
        ca = Subspace::span(&space_a, std::slice::from_ref(&u))?.perp_within(&ca)?;
        cb = Subspace::span(&space_b, std::slice::from_ref(&u2))?.perp_within(&cb)?;
        sources.push(u);
        targets.push(u2);
    }
    Ok(Some(Isometry::from_pairs(&space_a, &space_b, &sources, &targets)?))
}

fn rational_witness(a: &Subspace, b: &Subspace) -> Result<Option<Isometry>> {
    let (sa, sb) = (a.ambient(), b.ambient());
    if a.restrict_form() == b.restrict_form() {
        return Ok(Some(Isometry::from_pairs(sa, sb, &a.basis_vectors(), &b.basis_vectors())?));
    }
    let ratio = a.restrict_form().determinant()?.try_div(&b.restrict_form().determinant()?)?;
    if !ratio.is_square() || signature(a) != signature(b) {
        return Ok(None);
    }
    let da = orthogonal_basis(a);
    let mut db = orthogonal_basis(b);
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for (u, x) in da {
        let pos = db.iter().position(|(_, y)| x.try_div(y).map(|t| t.is_square()).unwrap_or(false));
        let Some(k) = pos else {
            return Err(Error::BackendUnsupported(
                "isometry between rational forms with unmatched diagonal entries".into(),
            ));
        };
        let (v, y) = db.remove(k);
        let t = x.try_div(&y)?.sqrt()?;
        sources.push(u);
        targets.push(matrix::scale(&t, &v));
    }
    Ok(Some(Isometry::from_pairs(sa, sb, &sources, &targets)?))
}

/// Whether two subspaces, possibly with singular restricted forms, are
/// isometric, with a witness. Radicals are matched by any linear bijection
/// and complements by [`isometry_between`].
pub fn subspace_isometry(e: &Subspace, f: &Subspace) -> Result<Option<Isometry>> {
    if e.dim() != f.dim() {
        return Ok(None);
    }
    let (re, rf) = (e.radical(), f.radical());
    if re.dim() != rf.dim() {
        return Ok(None);
    }
    let ce = re.complement_in(e)?;
    let cf = rf.complement_in(f)?;
    let Some(core) = isometry_between(&ce, &cf)? else { return Ok(None) };
    let radical = LinearMap::from_pairs(e.ambient(), f.ambient(), &re.basis_vectors(), &rf.basis_vectors())?;
    Ok(Some(Isometry::new(core.map().combine(&radical)?)?))
}

pub fn subspace_isometric(e: &Subspace, f: &Subspace) -> Result<bool> {
    Ok(subspace_isometry(e, f)?.is_some())
}

/// Extend an isometry `φ: E → E′` with `E ⊆ V`, `E′ ⊆ V′` to an isometry of
/// the nonsingular spaces `V → V′`.
pub fn witt_extend(phi: &Isometry, v: &Subspace, v2: &Subspace) -> Result<Isometry> {
    if !v.is_nonsingular() || !v2.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    if !phi.dom().is_subspace_of(v)? || !phi.cod().is_subspace_of(v2)? {
        return Err(Error::OutOfDomain);
    }
    if v.dim() != v2.dim() {
        return Err(Error::NotExtendable);
    }
    let (sa, sb) = (v.ambient().clone(), v2.ambient().clone());
    let mut map: LinearMap = phi.map().clone();
    loop {
        let rad = map.dom().radical();
        let Some(r) = rad.basis_vectors().into_iter().next() else { break };
        let r2 = map.apply(&r)?;
        let line = Subspace::span(&sa, std::slice::from_ref(&r))?;
        let rest = line.complement_in(map.dom())?;
        let rest2 = map.image_of(&rest)?;
        let y = hyperbolic_partner(&r, &rest.perp_within(v)?)?;
        let y2 = hyperbolic_partner(&r2, &rest2.perp_within(v2)?)?;
        let step = LinearMap::from_pairs(&sa, &sb, &[y], &[y2])?;
        map = map.combine(&step)?;
        if !map.is_isometry() {
            return Err(Error::assertion("radical reduction step lost the isometry property"));
        }
    }
    let w = map.dom().perp_within(v)?;
    let w2 = map.cod().perp_within(v2)?;
    let Some(rest) = isometry_between(&w, &w2)? else { return Err(Error::NotExtendable) };
    let full = Isometry::new(map.orthogonal_sum(rest.map())?)?;
    if !full.extends(phi.map())? || full.dom() != v || full.cod() != v2 {
        return Err(Error::assertion("extension does not restrict to the given isometry"));
    }
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vector_from_i64;
    use crate::space::{MetricSpace, SpaceRef};
    use proptest::prelude::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn vi(f: FieldSpec, v: &[i64]) -> Vector {
        vector_from_i64(f, v)
    }

    fn whole(s: &SpaceRef) -> Subspace {
        Subspace::whole(s)
    }

    #[test]
    fn isotropic_vector_examples() {
        let h2 = MetricSpace::hyperbolic(gf(3), 1);
        assert_eq!(find_isotropic_vector(&whole(&h2)).unwrap(), Some(vi(gf(3), &[1, 0])));
        let d2 = MetricSpace::diagonal(gf(3), &[1, 1]);
        assert_eq!(find_isotropic_vector(&whole(&d2)).unwrap(), None);
        let d7 = MetricSpace::diagonal(gf(7), &[1, 1]);
        assert_eq!(find_isotropic_vector(&whole(&d7)).unwrap(), None);
        let d5 = MetricSpace::diagonal(gf(5), &[1, 1]);
        let v = find_isotropic_vector(&whole(&d5)).unwrap().unwrap();
        assert!(d5.norm(&v).is_zero());
    }

    #[test]
    fn isotropic_vector_for_large_primes() {
        let p = 1_000_000_007;
        let f = gf(p);
        let v = MetricSpace::diagonal(f, &[1, 1, 1]);
        let x = find_isotropic_vector(&whole(&v)).unwrap().unwrap();
        assert!(v.norm(&x).is_zero());
        assert!(!matrix::is_zero_vector(&x));
        // −1 is a nonsquare mod p ≡ 3 (mod 4), so x² + y² is anisotropic.
        let d2 = MetricSpace::diagonal(f, &[1, 1]);
        assert_eq!(find_isotropic_vector(&whole(&d2)).unwrap(), None);
        let h = MetricSpace::diagonal(f, &[1, -1]);
        assert!(find_isotropic_vector(&whole(&h)).unwrap().is_some());
    }

    #[test]
    fn rational_isotropy() {
        let q = FieldSpec::Rational;
        let pos = MetricSpace::diagonal(q, &[1, 1, 1]);
        assert_eq!(find_isotropic_vector(&whole(&pos)).unwrap(), None);
        let ind = MetricSpace::diagonal(q, &[1, 1, -2]);
        let x = find_isotropic_vector(&whole(&ind)).unwrap().unwrap();
        assert!(ind.norm(&x).is_zero());
        let hyp = MetricSpace::diagonal(q, &[1, -4]);
        assert!(find_isotropic_vector(&whole(&hyp)).unwrap().is_some());
        let no = MetricSpace::diagonal(q, &[1, -2]);
        assert_eq!(find_isotropic_vector(&whole(&no)).unwrap(), None);
        // x² + y² − 3z² is anisotropic over ℚ but not visibly so.
        let hard = MetricSpace::diagonal(q, &[1, 1, -3]);
        assert!(matches!(find_isotropic_vector(&whole(&hard)), Err(Error::BackendUnsupported(_))));
    }

    #[test]
    fn decomposition_examples() {
        let f = gf(3);
        let h2 = MetricSpace::hyperbolic(f, 1);
        let w = witt_decompose(&whole(&h2)).unwrap();
        assert_eq!(w.plus, Subspace::span_i64(&h2, &[&[1, 0]]).unwrap());
        assert_eq!(w.minus, Subspace::span_i64(&h2, &[&[0, 1]]).unwrap());
        assert!(w.anis.is_zero());
        let d2 = MetricSpace::diagonal(f, &[1, 1]);
        let w = witt_decompose(&whole(&d2)).unwrap();
        assert_eq!(w.index(), 0);
        assert!(w.anis.is_whole());
        let h6 = MetricSpace::hyperbolic(f, 3);
        let w = witt_decompose(&whole(&h6)).unwrap();
        assert_eq!((w.plus.dim(), w.anis.dim(), w.minus.dim()), (3, 0, 3));
        w.validate(&whole(&h6)).unwrap();
        let sing = MetricSpace::diagonal(f, &[1, 0]);
        assert_eq!(witt_decompose(&whole(&sing)).unwrap_err(), Error::SingularSpace);
    }

    #[test]
    fn isometric_examples() {
        let f3 = gf(3);
        let v = MetricSpace::hyperbolic(f3, 2);
        assert!(is_isometric(&whole(&v), &whole(&v)).unwrap());
        let one = MetricSpace::diagonal(f3, &[1]);
        let two = MetricSpace::diagonal(f3, &[2]);
        assert!(!is_isometric(&whole(&one), &whole(&two)).unwrap());
        assert!(isometry_between(&whole(&one), &whole(&two)).unwrap().is_none());
        let f7 = gf(7);
        let five = MetricSpace::diagonal(f7, &[5]);
        let three = MetricSpace::diagonal(f7, &[3]);
        let w = isometry_between(&whole(&five), &whole(&three)).unwrap().unwrap();
        assert!(w.is_isometry());
        // I2 ≅ H2 over GF(5) since −1 is a square.
        let i2 = MetricSpace::diagonal(gf(5), &[1, 1]);
        let h2 = MetricSpace::hyperbolic(gf(5), 1);
        assert!(isometry_between(&whole(&i2), &whole(&h2)).unwrap().unwrap().is_isometry());
    }

    #[test]
    fn subspace_isometric_examples() {
        let f = gf(3);
        let h6 = MetricSpace::hyperbolic(f, 3);
        let e = Subspace::span_i64(&h6, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        assert!(subspace_isometric(&e, &e).unwrap());
        let iso1 = Subspace::span_i64(&h6, &[&[1, 0, 0, 0, 0, 0]]).unwrap();
        assert!(!subspace_isometric(&iso1, &Subspace::zero(&h6)).unwrap());
        let t = Subspace::span_i64(&h6, &[&[0, 1, 0, 0, 0, 0], &[0, 0, 0, 0, 1, 0]]).unwrap();
        let w = subspace_isometry(&e, &t).unwrap().unwrap();
        assert!(w.is_isometry());
        // A line of norm 1 is not isometric to an isotropic line.
        let anis = Subspace::span_i64(&h6, &[&[1, 2, 0, 0, 0, 0]]).unwrap();
        assert!(!subspace_isometric(&anis, &iso1).unwrap());
    }

    #[test]
    fn extend_examples() {
        let f = gf(3);
        let h2 = MetricSpace::hyperbolic(f, 1);
        let phi = Isometry::from_pairs(&h2, &h2, &[vi(f, &[1, 0])], &[vi(f, &[0, 1])]).unwrap();
        let ext = witt_extend(&phi, &whole(&h2), &whole(&h2)).unwrap();
        assert!(ext.is_isometry());
        assert_eq!(
            ext.image_of(&Subspace::span_i64(&h2, &[&[1, 0]]).unwrap()).unwrap(),
            Subspace::span_i64(&h2, &[&[0, 1]]).unwrap()
        );
        let h6 = MetricSpace::hyperbolic(f, 3);
        let e = Subspace::span_i64(&h6, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        let id = Isometry::identity(&e);
        let ext = witt_extend(&id, &whole(&h6), &whole(&h6)).unwrap();
        assert!(ext.extends(id.map()).unwrap());
    }

    #[test]
    fn extension_fails_only_between_non_isometric_spaces() {
        let f = gf(3);
        let a = MetricSpace::diagonal(f, &[1, 1]);
        let b = MetricSpace::diagonal(f, &[1, 2]);
        let phi = Isometry::from_pairs(&a, &b, &[vi(f, &[1, 0])], &[vi(f, &[1, 0])]).unwrap();
        assert_eq!(witt_extend(&phi, &whole(&a), &whole(&b)).unwrap_err(), Error::NotExtendable);
    }

    #[test]
    fn rational_extension_with_matching_grams() {
        let q = FieldSpec::Rational;
        let v = MetricSpace::diagonal(q, &[1, 2, 3]);
        let phi = Isometry::from_pairs(&v, &v, &[vi(q, &[1, 0, 0])], &[vi(q, &[-1, 0, 0])]).unwrap();
        let ext = witt_extend(&phi, &whole(&v), &whole(&v)).unwrap();
        assert!(ext.extends(phi.map()).unwrap());
    }

    fn random_subspace(space: &SpaceRef, raw: &[i64], rows: usize) -> Subspace {
        let f = space.field();
        let n = space.dim();
        let vs: Vec<Vector> = raw.chunks(n).take(rows).map(|c| vi(f, c)).collect();
        Subspace::span(space, &vs).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn extension_restricts_to_phi(raw in proptest::collection::vec(0i64..3, 18), rows in 0usize..4, gram in 0usize..3) {
            let f = gf(3);
            let v = match gram {
                0 => MetricSpace::hyperbolic(f, 3),
                1 => MetricSpace::diagonal(f, &[1, 1, 1, 1, 1, 1]),
                _ => MetricSpace::diagonal(f, &[1, 2, 1, 1, 2, 2]),
            };
            let e = random_subspace(&v, &raw, rows);
            let w = whole(&v);
            // A random isometry of V restricted to E is a valid input.
            let seed_map = witt_extend(&Isometry::identity(&Subspace::zero(&v)), &w, &w).unwrap();
            let phi = seed_map.restrict(&e).unwrap();
            let ext = witt_extend(&phi, &w, &w).unwrap();
            prop_assert!(ext.is_isometry());
            prop_assert_eq!(ext.restrict(&e).unwrap(), phi);
        }

        #[test]
        fn witt_index_is_stable(seed in 0u64..1000, gram in 0usize..4) {
            let f = gf(3);
            let v = match gram {
                0 => MetricSpace::hyperbolic(f, 2),
                1 => MetricSpace::diagonal(f, &[1, 1, 1, 1]),
                2 => MetricSpace::diagonal(f, &[1, 1, 1, 2]),
                _ => MetricSpace::diagonal(f, &[1, 1, 1]),
            };
            let w = whole(&v);
            let a = witt_decompose(&w).unwrap();
            let b = witt_decompose_seeded(&w, seed).unwrap();
            b.validate(&w).unwrap();
            prop_assert_eq!(a.index(), b.index());
        }

        #[test]
        fn witness_matches_decision(d in proptest::collection::vec(1i64..5, 3), e in proptest::collection::vec(1i64..5, 3)) {
            let f = gf(5);
            let a = MetricSpace::diagonal(f, &d);
            let b = MetricSpace::diagonal(f, &e);
            let decided = is_isometric(&whole(&a), &whole(&b)).unwrap();
            let w = isometry_between(&whole(&a), &whole(&b)).unwrap();
            prop_assert_eq!(decided, w.is_some());
            if let Some(w) = w { prop_assert!(w.is_isometry()); }
        }
    }

    #[test]
    fn counter_order_is_little_endian() {
        let f = gf(3);
        let first: Vec<Vector> = coordinate_vectors(f, 2).take(3).collect();
        assert_eq!(first, vec![vi(f, &[1, 0]), vi(f, &[2, 0]), vi(f, &[0, 1])]);
        assert_eq!(coordinate_vectors(f, 2).count(), 8);
    }
}
