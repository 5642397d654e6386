//! Metric spaces, canonical subspaces, and the subspace lattice calculus.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::matrix::{self, dot, is_zero_vector, Matrix, Vector};

/// A finite-dimensional space with a symmetric bilinear form given by its
/// Gram matrix in the standard basis. The form may be singular.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MetricSpace {
    field: FieldSpec,
    gram: Matrix,
    nonsingular: bool,
}

pub type SpaceRef = Arc<MetricSpace>;

impl MetricSpace {
    pub fn new(gram: Matrix) -> Result<SpaceRef> {
        if !gram.is_square() {
            return Err(Error::dims(gram.rows(), gram.cols()));
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let nonsingular = gram.rank() == gram.rows();
        Ok(Arc::new(MetricSpace { field: gram.field(), gram, nonsingular }))
    }

    /// Orthogonal sum of hyperbolic planes: basis `e1, ẽ1, e2, ẽ2, …` with
    /// `b(e_i, ẽ_j) = δ_ij` and all other pairings zero.
    pub fn hyperbolic(field: FieldSpec, planes: usize) -> SpaceRef {
        let n = 2 * planes;
        let mut g = Matrix::zeros(field, n, n);
        for i in 0..planes {
            g.set(2 * i, 2 * i + 1, field.one());
            g.set(2 * i + 1, 2 * i, field.one());
        }
        MetricSpace::new(g).expect("hyperbolic Gram is symmetric")
    }

    pub fn diagonal(field: FieldSpec, entries: &[i64]) -> SpaceRef {
        let d: Vec<Scalar> = entries.iter().map(|&e| field.from_i64(e)).collect();
        MetricSpace::new(Matrix::diagonal(field, &d)).expect("diagonal Gram is symmetric")
    }

    /// Block-diagonal orthogonal sum.
    pub fn orthogonal_sum(a: &MetricSpace, b: &MetricSpace) -> Result<SpaceRef> {
        if a.field != b.field {
            return Err(Error::FieldMismatch(a.field, b.field));
        }
        let (n, m) = (a.dim(), b.dim());
        let mut g = Matrix::zeros(a.field, n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, a.gram.get(i, j).clone());
            }
        }
        for i in 0..m {
            for j in 0..m {
                g.set(n + i, n + j, b.gram.get(i, j).clone());
            }
        }
        MetricSpace::new(g)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn is_nonsingular(&self) -> bool {
        self.nonsingular
    }

    pub fn bilinear(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let gv = self.gram.mul_vec(v).expect("vector length matches ambient");
        dot(u, &gv)
    }

    pub fn norm(&self, v: &[Scalar]) -> Scalar {
        self.bilinear(v, v)
    }
}

pub fn whole(space: &SpaceRef) -> Subspace {
    Subspace::whole(space)
}

/// A subspace stored by the nonzero rows of its reduced row-echelon basis,
/// so that equal subspaces have identical representations.
#[derive(Clone)]
pub struct Subspace {
    ambient: SpaceRef,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        same_ambient(&self.ambient, &other.ambient) && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of {}: {})", self.dim(), self.ambient.dim(), self.basis)
    }
}

pub fn same_ambient(a: &SpaceRef, b: &SpaceRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Result of [`Subspace::quotient_metric`]: the form induced on
/// `numerator / denominator`, evaluated on fixed coset representatives.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub numerator: Subspace,
    pub denominator: Subspace,
    /// Coset representatives, a basis of a complement of the denominator.
    pub representatives: Vec<Vector>,
    pub gram: Matrix,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class `v + denominator` in the representative basis.
    pub fn class_coords(&self, v: &[Scalar]) -> Result<Vector> {
        if !self.numerator.contains(v)? {
            return Err(Error::OutOfDomain);
        }
        let field = self.numerator.field();
        let mut rows = self.representatives.clone();
        rows.extend(self.denominator.basis_vectors());
        if rows.is_empty() {
            return Ok(Vec::new());
        }
        let m = Matrix::from_rows(field, self.numerator.ambient_dim(), &rows)?.transpose();
        let x = m.solve(v)?;
        Ok(x[..self.dim()].to_vec())
    }

    pub fn is_nonsingular(&self) -> bool {
        self.gram.rank() == self.gram.rows()
    }
}

impl Subspace {
    pub fn zero(ambient: &SpaceRef) -> Self {
        Subspace {
            ambient: ambient.clone(),
            basis: Matrix::zeros(ambient.field(), 0, ambient.dim()),
            pivots: Vec::new(),
        }
    }

    pub fn whole(ambient: &SpaceRef) -> Self {
        Subspace {
            ambient: ambient.clone(),
            basis: Matrix::identity(ambient.field(), ambient.dim()),
            pivots: (0..ambient.dim()).collect(),
        }
    }

    /// Canonical span of arbitrary vectors in ambient coordinates.
    pub fn span(ambient: &SpaceRef, vectors: &[Vector]) -> Result<Self> {
        let n = ambient.dim();
        for v in vectors {
            if v.len() != n {
                return Err(Error::dims(n, v.len()));
            }
            if let Some(bad) = v.iter().find(|s| s.field() != ambient.field()) {
                return Err(Error::FieldMismatch(ambient.field(), bad.field()));
            }
        }
        let m = Matrix::from_rows(ambient.field(), n, vectors)?;
        Ok(Self::from_matrix_unchecked(ambient, &m))
    }

    pub fn span_i64(ambient: &SpaceRef, vectors: &[&[i64]]) -> Result<Self> {
        let f = ambient.field();
        let vs: Vec<Vector> = vectors.iter().map(|v| matrix::vector_from_i64(f, v)).collect();
        Self::span(ambient, &vs)
    }

    fn from_matrix_unchecked(ambient: &SpaceRef, m: &Matrix) -> Self {
        let (r, pivots) = m.reduced();
        let basis = r.select_rows(&(0..pivots.len()).collect::<Vec<_>>());
        Subspace { ambient: ambient.clone(), basis, pivots }
    }

    pub fn ambient(&self) -> &SpaceRef {
        &self.ambient
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn field(&self) -> FieldSpec {
        self.ambient.field()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_whole(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if same_ambient(&self.ambient, &other.ambient) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// Remainder of `v` after eliminating the pivot columns of the basis;
    /// zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, b) in r.iter_mut().zip(self.basis.row(i)) {
                if !b.is_zero() {
                    *x = &*x - &(&c * b);
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        if v.len() != self.ambient_dim() {
            return Err(Error::dims(self.ambient_dim(), v.len()));
        }
        Ok(is_zero_vector(&self.reduce(v)))
    }

    /// Coordinates of `v` with respect to the stored basis.
    pub fn coords(&self, v: &[Scalar]) -> Result<Vector> {
        if !self.contains(v)? {
            return Err(Error::OutOfDomain);
        }
        Ok(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn vector_from_coords(&self, coords: &[Scalar]) -> Vector {
        self.basis.vec_mul(coords).expect("coordinate length matches dimension")
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok((0..self.dim()).all(|i| is_zero_vector(&other.reduce(self.basis.row(i)))))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let m = self.basis.vstack(&other.basis)?;
        Ok(Self::from_matrix_unchecked(&self.ambient, &m))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(&self.ambient));
        }
        // x·[A; B] = 0 pairs a vector of A with its negative in B.
        let stacked = self.basis.vstack(&other.basis)?;
        let k = stacked.transpose().kernel_basis();
        let r = self.dim();
        let vectors: Vec<Vector> = (0..k.rows())
            .map(|i| self.basis.vec_mul(&k.row(i)[..r]).expect("lengths agree"))
            .collect();
        Subspace::span(&self.ambient, &vectors)
    }

    /// Orthogonal complement in the whole ambient space.
    pub fn perp(&self) -> Subspace {
        if self.is_zero() {
            return Subspace::whole(&self.ambient);
        }
        let functionals = self.basis.mul(self.ambient.gram()).expect("shapes agree");
        let k = functionals.kernel_basis();
        Subspace { ambient: self.ambient.clone(), pivots: k.reduced().1, basis: k }
    }

    /// Orthogonal complement relative to `container`: `container ∩ self⊥`.
    pub fn perp_within(&self, container: &Subspace) -> Result<Subspace> {
        container.intersect(&self.perp())
    }

    pub fn radical(&self) -> Subspace {
        self.intersect(&self.perp()).expect("same ambient")
    }

    pub fn restrict_form(&self) -> Matrix {
        let bg = self.basis.mul(self.ambient.gram()).expect("shapes agree");
        bg.mul(&self.basis.transpose()).expect("shapes agree")
    }

    pub fn is_nonsingular(&self) -> bool {
        self.radical().is_zero()
    }

    pub fn is_totally_isotropic(&self) -> bool {
        self.restrict_form().is_zero()
    }

    pub fn is_orthogonal_to(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        let bg = self.basis.mul(self.ambient.gram())?;
        Ok(bg.mul(&other.basis.transpose())?.is_zero())
    }

    pub fn bilinear(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        self.ambient.bilinear(u, v)
    }

    /// Deterministic basis extension: append the rows of `sup`'s canonical
    /// basis in pivot order, skipping those dependent on what is already
    /// present. Returns only the appended vectors.
    pub fn extend_basis(start: &[Vector], sup: &Subspace) -> Result<Vec<Vector>> {
        let mut current = Subspace::span(&sup.ambient, start)?;
        if !current.is_subspace_of(sup)? {
            return Err(Error::OutOfDomain);
        }
        let mut added = Vec::new();
        for v in sup.basis_vectors() {
            if current.dim() == sup.dim() {
                break;
            }
            if !current.contains(&v)? {
                current = current.sum(&Subspace::span(&sup.ambient, std::slice::from_ref(&v))?)?;
                added.push(v);
            }
        }
        Ok(added)
    }

    /// Deterministic complement of `self` inside `sup`.
    pub fn complement_in(&self, sup: &Subspace) -> Result<Subspace> {
        let added = Subspace::extend_basis(&self.basis_vectors(), sup)?;
        Subspace::span(&self.ambient, &added)
    }

    /// The form induced on `self / denominator`.
    pub fn quotient_metric(&self, denominator: &Subspace) -> Result<QuotientSpace> {
        self.check_ambient(denominator)?;
        if !denominator.is_subspace_of(self)? {
            return Err(Error::OutOfDomain);
        }
        if !denominator.is_orthogonal_to(self)? {
            return Err(Error::NotWellDefined);
        }
        let representatives = Subspace::extend_basis(&denominator.basis_vectors(), self)?;
        let k = representatives.len();
        let mut gram = Matrix::zeros(self.field(), k, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, self.bilinear(&representatives[i], &representatives[j]));
            }
        }
        Ok(QuotientSpace {
            numerator: self.clone(),
            denominator: denominator.clone(),
            representatives,
            gram,
        })
    }
}

/// Write `v` as a sum of one vector from each of `parts` by a single solve
/// against their stacked bases. When the sum is not direct, free
/// coordinates are set to zero.
pub fn decompose_along(v: &[Scalar], parts: &[&Subspace]) -> Result<Vec<Vector>> {
    let Some(first) = parts.first() else {
        return if is_zero_vector(v) { Ok(Vec::new()) } else { Err(Error::NoSolution) };
    };
    let (field, n) = (first.field(), first.ambient_dim());
    let mut rows = Vec::new();
    for p in parts {
        rows.extend(p.basis_vectors());
    }
    let x = Matrix::from_rows(field, n, &rows)?.transpose().solve(v)?;
    let mut out = Vec::with_capacity(parts.len());
    let mut offset = 0;
    for p in parts {
        let d = p.dim();
        out.push(matrix::combination(field, n, &x[offset..offset + d], &p.basis_vectors()));
        offset += d;
    }
    Ok(out)
}

/// The unique components of `v` along a direct sum of `parts`.
pub fn split_components(v: &[Scalar], parts: &[&Subspace]) -> Result<Vec<Vector>> {
    if let Some(first) = parts.first() {
        let total: usize = parts.iter().map(|p| p.dim()).sum();
        let mut sum = Subspace::zero(first.ambient());
        for p in parts {
            sum = sum.sum(p)?;
        }
        if sum.dim() != total {
            return Err(Error::NotDirectSum);
        }
    }
    decompose_along(v, parts)
}

/// An orthogonal basis of `s` with the norms of its vectors, built by
/// symmetric elimination. Vectors with zero norm come last and span the
/// radical of `s`.
pub fn orthogonal_basis(s: &Subspace) -> Vec<(Vector, Scalar)> {
    let field = s.field();
    let space = s.ambient().clone();
    let mut pending = s.basis_vectors();
    let mut out = Vec::new();
    let mut radical = Vec::new();
    let two = field.from_i64(2);
    while !pending.is_empty() {
        let pick = match pending.iter().position(|v| !space.norm(v).is_zero()) {
            Some(i) => Some(pending.remove(i)),
            None => {
                // All norms vanish; u + w has norm 2 b(u, w) when b(u, w) ≠ 0.
                let mut found = None;
                'search: for i in 0..pending.len() {
                    for j in i + 1..pending.len() {
                        if !space.bilinear(&pending[i], &pending[j]).is_zero() {
                            found = Some((i, j));
                            break 'search;
                        }
                    }
                }
                found.map(|(i, j)| {
                    let w = matrix::add(&pending[i], &pending[j]);
                    pending.remove(i);
                    w
                })
            }
        };
        let Some(u) = pick else {
            radical.append(&mut pending);
            break;
        };
        let a = space.norm(&u);
        debug_assert!(!(&a * &two).is_zero() || !a.is_zero());
        let inv = a.inv().expect("picked vector has nonzero norm");
        pending = pending
            .into_iter()
            .map(|v| {
                let c = &space.bilinear(&v, &u) * &inv;
                matrix::sub(&v, &matrix::scale(&c, &u))
            })
            .filter(|v| !is_zero_vector(v))
            .collect();
        out.push((u, a));
    }
    out.extend(radical.into_iter().map(|v| (v, field.zero())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::vector_from_i64;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    /// Coordinates: e1, ẽ1, e2, ẽ2, e3, ẽ3.
    fn h6() -> SpaceRef {
        MetricSpace::hyperbolic(gf(3), 3)
    }

    #[test]
    fn span_examples() {
        let v = MetricSpace::diagonal(gf(3), &[1, 1]);
        assert!(Subspace::span(&v, &[]).unwrap().is_zero());
        let s = Subspace::span_i64(&v, &[&[1, 1], &[2, 2]]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis_vectors(), vec![vector_from_i64(gf(3), &[1, 1])]);
        let h = h6();
        let e = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        assert_eq!(e.dim(), 2);
        assert!(e.is_totally_isotropic());
        assert!(matches!(Subspace::span_i64(&v, &[&[1, 2, 3]]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sum_and_intersection_examples() {
        let h = h6();
        let a = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        let z = Subspace::zero(&h);
        assert_eq!(a.sum(&z).unwrap(), a);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let e = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        let expected = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0]]).unwrap();
        assert_eq!(e.intersect(&a).unwrap(), expected);
        let other = MetricSpace::diagonal(gf(3), &[1, 1]);
        assert_eq!(a.sum(&Subspace::zero(&other)), Err(Error::AmbientMismatch));
    }

    #[test]
    fn perp_examples() {
        let h = h6();
        assert_eq!(Subspace::zero(&h).perp(), Subspace::whole(&h));
        // A = span{e1, e2, ẽ2} has A⊥ = span{e1, e3, ẽ3}.
        let a = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        let ap = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 0, 0, 1, 0], &[0, 0, 0, 0, 0, 1]]).unwrap();
        assert_eq!(a.perp(), ap);
        // A' = span{e1, ẽ1, ẽ2 − ẽ3} has A'⊥ = span{e2 + e3, ẽ2, ẽ3}.
        let a2 = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 1, 0, 0, 0, 0], &[0, 0, 0, 1, 0, -1]]).unwrap();
        let a2p = Subspace::span_i64(&h, &[&[0, 0, 1, 0, 1, 0], &[0, 0, 0, 1, 0, 0], &[0, 0, 0, 0, 0, 1]]).unwrap();
        assert_eq!(a2.perp(), a2p);
        assert_eq!(a.perp().perp(), a);
    }

    #[test]
    fn radical_examples() {
        let h = h6();
        assert!(Subspace::whole(&h).radical().is_zero());
        let a = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        assert_eq!(a.radical(), Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0]]).unwrap());
        let e = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        assert_eq!(e.radical(), e);
    }

    #[test]
    fn restrict_form_examples() {
        let q = FieldSpec::Rational;
        let v = MetricSpace::diagonal(q, &[1, 1]);
        assert_eq!(Subspace::zero(&v).restrict_form().rows(), 0);
        let e = Subspace::span_i64(&v, &[&[1, 2]]).unwrap();
        assert_eq!(e.restrict_form(), Matrix::from_i64(q, &[&[5]]));
        let e2 = Subspace::span_i64(&v, &[&[1, 3]]).unwrap();
        assert_eq!(e2.restrict_form(), Matrix::from_i64(q, &[&[10]]));
    }

    #[test]
    fn quotient_examples() {
        let h = h6();
        let v = Subspace::whole(&h);
        let q = v.quotient_metric(&Subspace::zero(&h)).unwrap();
        assert_eq!(q.dim(), 6);
        assert_eq!(q.gram, *h.gram());

        let a = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        let q = a.quotient_metric(&a.radical()).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.is_nonsingular());
        assert_eq!(q.gram, Matrix::from_i64(gf(3), &[&[0, 1], &[1, 0]]));

        assert_eq!(a.quotient_metric(&a).unwrap_err(), Error::NotWellDefined);
        let e = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        assert_eq!(e.quotient_metric(&e).unwrap().dim(), 0);

        // e1 + ẽ1 is not orthogonal to ẽ1 ∈ A' so A'/span{e1+ẽ1} is ill-defined.
        let a2 = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 1, 0, 0, 0, 0]]).unwrap();
        let d = Subspace::span_i64(&h, &[&[1, 1, 0, 0, 0, 0]]).unwrap();
        assert_eq!(a2.quotient_metric(&d).unwrap_err(), Error::NotWellDefined);
    }

    #[test]
    fn class_coordinates() {
        let h = h6();
        let a = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        let q = a.quotient_metric(&a.radical()).unwrap();
        let f = gf(3);
        let v = vector_from_i64(f, &[2, 0, 1, 1, 0, 0]);
        let c = q.class_coords(&v).unwrap();
        let rebuilt = matrix::combination(f, 6, &c, &q.representatives);
        assert!(a.radical().contains(&matrix::sub(&v, &rebuilt)).unwrap());
    }

    #[test]
    fn orthogonal_basis_diagonalizes() {
        let h = h6();
        let ob = orthogonal_basis(&Subspace::whole(&h));
        assert_eq!(ob.len(), 6);
        for (i, (u, a)) in ob.iter().enumerate() {
            assert_eq!(h.norm(u), *a);
            assert!(!a.is_zero());
            for (w, _) in &ob[..i] {
                assert!(h.bilinear(u, w).is_zero());
            }
        }
        let e = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]).unwrap();
        let ob = orthogonal_basis(&e);
        assert!(ob.iter().all(|(_, a)| a.is_zero()));
    }

    #[test]
    fn deterministic_complement() {
        let v = MetricSpace::diagonal(gf(3), &[1, 1, 1]);
        let a = Subspace::span_i64(&v, &[&[1, 1, 0]]).unwrap();
        let c = a.complement_in(&Subspace::whole(&v)).unwrap();
        assert_eq!(c, Subspace::span_i64(&v, &[&[1, 0, 0], &[0, 0, 1]]).unwrap());
    }
}
