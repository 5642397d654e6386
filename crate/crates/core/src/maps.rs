//! Linear maps between subspaces and verified isometries.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::matrix::{is_zero_vector, Matrix, Vector};
use crate::space::{same_ambient, SpaceRef, Subspace};

/// A linear map `dom → cod`. Row `i` of `images` is the image of row `i` of
/// the canonical basis of `dom`, written in the ambient coordinates of `cod`.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    dom: Subspace,
    cod: Subspace,
    images: Matrix,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearMap")
            .field("dom", &self.dom)
            .field("cod", &self.cod)
            .field("images", &format_args!("{}", self.images))
            .finish()
    }
}

impl LinearMap {
    pub fn new(dom: Subspace, cod: Subspace, images: Matrix) -> Result<Self> {
        if images.rows() != dom.dim() {
            return Err(Error::dims(dom.dim(), images.rows()));
        }
        if images.cols() != cod.ambient_dim() {
            return Err(Error::dims(cod.ambient_dim(), images.cols()));
        }
        if images.field() != cod.field() {
            return Err(Error::FieldMismatch(cod.field(), images.field()));
        }
        for i in 0..images.rows() {
            if !cod.contains(images.row(i))? {
                return Err(Error::OutOfDomain);
            }
        }
        Ok(LinearMap { dom, cod, images })
    }

    /// The linear map sending each `sources[i]` to `targets[i]`. The domain is
    /// the span of the sources and the codomain the span of the targets.
    pub fn from_pairs(
        src: &SpaceRef,
        dst: &SpaceRef,
        sources: &[Vector],
        targets: &[Vector],
    ) -> Result<Self> {
        if sources.len() != targets.len() {
            return Err(Error::dims(sources.len(), targets.len()));
        }
        let (n, m) = (src.dim(), dst.dim());
        let dom_span = Subspace::span(src, sources)?;
        let cod = Subspace::span(dst, targets)?;
        if sources.is_empty() {
            return Ok(LinearMap { dom: dom_span, cod, images: Matrix::zeros(dst.field(), 0, m) });
        }
        let s = Matrix::from_rows(src.field(), n, sources)?;
        let t = Matrix::from_rows(dst.field(), m, targets)?;
        let (r, pivots) = s.hstack(&t)?.reduced();
        let mut rows = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            if p >= n {
                return Err(Error::DisagreeOnIntersection);
            }
            rows.push(i);
        }
        let images = r.select_rows(&rows).select_cols(n..n + m);
        debug_assert_eq!(r.select_rows(&rows).select_cols(0..n), *dom_span.basis());
        Ok(LinearMap { dom: dom_span, cod, images })
    }

    pub fn identity(s: &Subspace) -> Self {
        LinearMap { dom: s.clone(), cod: s.clone(), images: s.basis().clone() }
    }

    /// The map on the whole of `src` given by `x ↦ x·m`.
    pub fn from_ambient_matrix(src: &SpaceRef, dst: &SpaceRef, m: &Matrix) -> Result<Self> {
        if m.rows() != src.dim() || m.cols() != dst.dim() {
            return Err(Error::dims(src.dim(), m.rows()));
        }
        let dom = Subspace::whole(src);
        let cod = Subspace::span(dst, &m.row_vectors())?;
        Ok(LinearMap { dom, cod, images: m.clone() })
    }

    pub fn dom(&self) -> &Subspace {
        &self.dom
    }

    pub fn cod(&self) -> &Subspace {
        &self.cod
    }

    pub fn images(&self) -> &Matrix {
        &self.images
    }

    pub fn image_vectors(&self) -> Vec<Vector> {
        self.images.row_vectors()
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vector> {
        let c = self.dom.coords(v)?;
        self.images.vec_mul(&c)
    }

    pub fn image_of(&self, s: &Subspace) -> Result<Subspace> {
        if !same_ambient(s.ambient(), self.dom.ambient()) {
            return Err(Error::AmbientMismatch);
        }
        let vs = s.basis_vectors().iter().map(|v| self.apply(v)).collect::<Result<Vec<_>>>()?;
        Subspace::span(self.cod.ambient(), &vs)
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.cod.ambient(), &self.images.row_vectors()).expect("images live in cod")
    }

    pub fn is_injective(&self) -> bool {
        self.images.rank() == self.dom.dim()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.image() == self.cod
    }

    pub fn preserves_form(&self) -> bool {
        let g = self.dom.restrict_form();
        let bg = self.images.mul(self.cod.ambient().gram()).expect("shapes agree");
        g == bg.mul(&self.images.transpose()).expect("shapes agree")
    }

    /// Bijective onto `cod` and form-preserving.
    pub fn is_isometry(&self) -> bool {
        self.is_bijective() && self.preserves_form()
    }

    pub fn restrict(&self, s: &Subspace) -> Result<LinearMap> {
        if !s.is_subspace_of(&self.dom)? {
            return Err(Error::OutOfDomain);
        }
        let vs = s.basis_vectors().iter().map(|v| self.apply(v)).collect::<Result<Vec<_>>>()?;
        let cod = Subspace::span(self.cod.ambient(), &vs)?;
        let images = Matrix::from_rows(self.cod.field(), self.cod.ambient_dim(), &vs)?;
        Ok(LinearMap { dom: s.clone(), cod, images })
    }

    /// The unique linear map on `dom μ + dom ψ` extending both.
    pub fn combine(&self, other: &LinearMap) -> Result<LinearMap> {
        if !same_ambient(self.dom.ambient(), other.dom.ambient())
            || !same_ambient(self.cod.ambient(), other.cod.ambient())
        {
            return Err(Error::AmbientMismatch);
        }
        let mut sources = self.dom.basis_vectors();
        sources.extend(other.dom.basis_vectors());
        let mut targets = self.image_vectors();
        targets.extend(other.image_vectors());
        let mut m = LinearMap::from_pairs(self.dom.ambient(), self.cod.ambient(), &sources, &targets)?;
        m.cod = self.cod.sum(&other.cod)?;
        Ok(m)
    }

    /// Combination of maps with orthogonal, independent domains and images.
    pub fn orthogonal_sum(&self, other: &LinearMap) -> Result<LinearMap> {
        for (a, b) in [(&self.dom, &other.dom), (&self.cod, &other.cod)] {
            if !a.is_orthogonal_to(b)? {
                return Err(Error::NotOrthogonal);
            }
            if !a.intersect(b)?.is_zero() {
                return Err(Error::Overlap);
            }
        }
        self.combine(other)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &LinearMap) -> Result<LinearMap> {
        let vs = self.image_vectors().iter().map(|v| other.apply(v)).collect::<Result<Vec<_>>>()?;
        let images = Matrix::from_rows(other.cod.field(), other.cod.ambient_dim(), &vs)?;
        let cod = other.image_of(&self.cod)?;
        Ok(LinearMap { dom: self.dom.clone(), cod, images })
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if !self.is_bijective() {
            return Err(Error::NotIsometry);
        }
        let m = LinearMap::from_pairs(
            self.cod.ambient(),
            self.dom.ambient(),
            &self.image_vectors(),
            &self.dom.basis_vectors(),
        )?;
        Ok(m)
    }

    /// Replace the codomain by a larger subspace of the same ambient.
    pub fn widen_cod(&self, cod: &Subspace) -> Result<LinearMap> {
        LinearMap::new(self.dom.clone(), cod.clone(), self.images.clone())
    }

    /// Whether `self` and `other` agree on their common domain vectors.
    pub fn agrees_with(&self, other: &LinearMap) -> Result<bool> {
        let common = self.dom.intersect(&other.dom)?;
        for v in common.basis_vectors() {
            if !is_zero_vector(&crate::matrix::sub(&self.apply(&v)?, &other.apply(&v)?)) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A linear map verified to be an isometry of its domain onto its codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry(LinearMap);

impl Deref for Isometry {
    type Target = LinearMap;
    fn deref(&self) -> &LinearMap {
        &self.0
    }
}

impl Isometry {
    pub fn new(map: LinearMap) -> Result<Self> {
        if map.is_isometry() {
            Ok(Isometry(map))
        } else {
            Err(Error::NotIsometry)
        }
    }

    pub fn from_pairs(src: &SpaceRef, dst: &SpaceRef, sources: &[Vector], targets: &[Vector]) -> Result<Self> {
        Isometry::new(LinearMap::from_pairs(src, dst, sources, targets)?)
    }

    pub fn identity(s: &Subspace) -> Self {
        Isometry(LinearMap::identity(s))
    }

    pub fn map(&self) -> &LinearMap {
        &self.0
    }

    pub fn into_map(self) -> LinearMap {
        self.0
    }

    pub fn restrict(&self, s: &Subspace) -> Result<Isometry> {
        Isometry::new(self.0.restrict(s)?)
    }

    pub fn orthogonal_sum(&self, other: &Isometry) -> Result<Isometry> {
        Isometry::new(self.0.orthogonal_sum(&other.0)?)
    }

    pub fn combine(&self, other: &Isometry) -> Result<Isometry> {
        Isometry::new(self.0.combine(&other.0)?)
    }

    pub fn then(&self, other: &Isometry) -> Result<Isometry> {
        Isometry::new(self.0.then(&other.0)?)
    }

    pub fn inverse(&self) -> Result<Isometry> {
        Isometry::new(self.0.inverse()?)
    }

    /// Whether this isometry restricts to `base` on `base`'s domain.
    pub fn extends(&self, base: &LinearMap) -> Result<bool> {
        if !base.dom().is_subspace_of(self.dom())? {
            return Ok(false);
        }
        Ok(self.0.restrict(base.dom())?.images() == base.images())
    }
}

/// The product of the reflections `x ↦ x − 2b(x,u)/b(u,u)·u` in those `u`
/// that are anisotropic, as an isometry of the whole space.
pub fn reflection_product(space: &SpaceRef, vectors: &[Vector]) -> Result<Isometry> {
    let f = space.field();
    let n = space.dim();
    let two = f.from_i64(2);
    let mut m = Matrix::identity(f, n);
    for u in vectors {
        if u.len() != n {
            return Err(Error::dims(n, u.len()));
        }
        let q = space.norm(u);
        if q.is_zero() {
            continue;
        }
        let c = &two * &q.inv()?;
        let rows: Vec<Vector> = m
            .row_vectors()
            .iter()
            .map(|x| crate::matrix::sub(x, &crate::matrix::scale(&(&c * &space.bilinear(x, u)), u)))
            .collect();
        m = Matrix::from_rows(f, n, &rows)?;
    }
    Isometry::new(LinearMap::from_ambient_matrix(space, space, &m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::matrix::vector_from_i64;
    use crate::space::MetricSpace;
    use proptest::prelude::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn vi(f: FieldSpec, v: &[i64]) -> Vector {
        vector_from_i64(f, v)
    }

    fn swap_h2() -> (SpaceRef, Isometry) {
        let f = gf(3);
        let h = MetricSpace::hyperbolic(f, 1);
        let m = Isometry::from_pairs(&h, &h, &[vi(f, &[1, 0]), vi(f, &[0, 1])], &[vi(f, &[0, 1]), vi(f, &[1, 0])])
            .unwrap();
        (h, m)
    }

    #[test]
    fn apply_and_image_examples() {
        let f = gf(3);
        let v = MetricSpace::diagonal(f, &[1, 1, 2]);
        let id = LinearMap::identity(&Subspace::whole(&v));
        let x = vi(f, &[1, 2, 0]);
        assert_eq!(id.apply(&x).unwrap(), x);
        let (h, sw) = swap_h2();
        let e1 = Subspace::span_i64(&h, &[&[1, 0]]).unwrap();
        assert_eq!(sw.image_of(&e1).unwrap(), Subspace::span_i64(&h, &[&[0, 1]]).unwrap());
        assert!(sw.image_of(&Subspace::zero(&h)).unwrap().is_zero());
        let partial = sw.restrict(&e1).unwrap();
        assert_eq!(partial.apply(&vi(f, &[0, 1])), Err(Error::OutOfDomain));
    }

    #[test]
    fn is_isometry_examples() {
        let f = gf(3);
        let v = MetricSpace::diagonal(f, &[1, 1]);
        assert!(LinearMap::identity(&Subspace::whole(&v)).is_isometry());
        let m = LinearMap::from_pairs(&v, &v, &[vi(f, &[1, 0]), vi(f, &[0, 1])], &[vi(f, &[1, 0]), vi(f, &[0, 2])])
            .unwrap();
        assert!(m.is_isometry());
        let q = FieldSpec::Rational;
        let w = MetricSpace::diagonal(q, &[1, 1]);
        let m = LinearMap::from_pairs(&w, &w, &[vi(q, &[1, 0])], &[vi(q, &[2, 0])]).unwrap();
        assert!(!m.is_isometry());
    }

    #[test]
    fn restrict_examples() {
        let (h, sw) = swap_h2();
        let f = gf(3);
        let whole = Subspace::whole(&h);
        let id = Isometry::identity(&whole);
        assert_eq!(id.restrict(&whole).unwrap(), id);
        let e1 = Subspace::span_i64(&h, &[&[1, 0]]).unwrap();
        let r = sw.restrict(&e1).unwrap();
        assert_eq!(r.apply(&vi(f, &[1, 0])).unwrap(), vi(f, &[0, 1]));
        assert_eq!(r.cod(), &Subspace::span_i64(&h, &[&[0, 1]]).unwrap());
        let z = sw.restrict(&Subspace::zero(&h)).unwrap();
        assert_eq!(z.dom().dim(), 0);
    }

    #[test]
    fn combine_examples() {
        let (h, sw) = swap_h2();
        let f = gf(3);
        assert_eq!(sw.combine(&sw).unwrap(), sw);
        let e1 = Subspace::span_i64(&h, &[&[1, 0]]).unwrap();
        let e2 = Subspace::span_i64(&h, &[&[0, 1]]).unwrap();
        let c = sw.restrict(&e1).unwrap().map().combine(sw.restrict(&e2).unwrap().map()).unwrap();
        assert_eq!(c, *sw.map());
        let mu = LinearMap::from_pairs(&h, &h, &[vi(f, &[1, 0])], &[vi(f, &[1, 0])]).unwrap();
        let psi = LinearMap::from_pairs(&h, &h, &[vi(f, &[1, 0])], &[vi(f, &[2, 0])]).unwrap();
        assert_eq!(mu.combine(&psi), Err(Error::DisagreeOnIntersection));
    }

    #[test]
    fn combination_of_isometries_with_non_orthogonal_domains_can_fail() {
        // e1 ↦ e1 and ẽ1 ↦ 2ẽ1 are isometries of isotropic lines, but the
        // combination scales the pairing b(e1, ẽ1) = 1 to 2.
        let f = gf(3);
        let h = MetricSpace::hyperbolic(f, 1);
        let mu = Isometry::from_pairs(&h, &h, &[vi(f, &[1, 0])], &[vi(f, &[1, 0])]).unwrap();
        let psi = Isometry::from_pairs(&h, &h, &[vi(f, &[0, 1])], &[vi(f, &[0, 2])]).unwrap();
        let c = mu.map().combine(psi.map()).unwrap();
        assert!(!c.is_isometry());
        assert_eq!(mu.orthogonal_sum(&psi), Err(Error::NotOrthogonal));
    }

    #[test]
    fn orthogonal_sum_of_planes() {
        let f = gf(3);
        let h = MetricSpace::hyperbolic(f, 3);
        let p1 = Subspace::span_i64(&h, &[&[1, 0, 0, 0, 0, 0], &[0, 1, 0, 0, 0, 0]]).unwrap();
        let p2 = Subspace::span_i64(&h, &[&[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]).unwrap();
        // Swap the two planes while scaling the hyperbolic pairs by 2 and 2⁻¹ = 2.
        let a = Isometry::from_pairs(
            &h,
            &h,
            &p1.basis_vectors(),
            &[vi(f, &[0, 0, 2, 0, 0, 0]), vi(f, &[0, 0, 0, 2, 0, 0])],
        )
        .unwrap();
        let b = Isometry::from_pairs(&h, &h, &p2.basis_vectors(), &p1.basis_vectors()).unwrap();
        let s = a.orthogonal_sum(&b).unwrap();
        assert_eq!(s.dom().dim(), 4);
        assert!(s.is_isometry());
        assert!(s.extends(a.map()).unwrap());
    }

    #[test]
    fn inverse_and_composition() {
        let (h, sw) = swap_h2();
        let inv = sw.inverse().unwrap();
        let id = sw.then(&inv).unwrap();
        assert_eq!(id, Isometry::identity(&Subspace::whole(&h)));
    }

    proptest! {
        #[test]
        fn whole_space_isometries_respect_lattice_operations(refl in proptest::collection::vec(0i64..3, 12), a in proptest::collection::vec(0i64..3, 8), b in proptest::collection::vec(0i64..3, 8)) {
            let f = gf(3);
            let h = MetricSpace::hyperbolic(f, 2);
            let map = reflection_product(&h, &refl.chunks(4).map(|c| vi(f, c)).collect::<Vec<_>>()).unwrap();
            prop_assert!(map.is_isometry());
            let sa = Subspace::span(&h, &a.chunks(4).map(|c| vi(f, c)).collect::<Vec<_>>()).unwrap();
            let sb = Subspace::span(&h, &b.chunks(4).map(|c| vi(f, c)).collect::<Vec<_>>()).unwrap();
            let img = |s: &Subspace| map.image_of(s).unwrap();
            prop_assert_eq!(img(&sa.perp()), img(&sa).perp());
            prop_assert_eq!(img(&sa.intersect(&sb).unwrap()), img(&sa).intersect(&img(&sb)).unwrap());
            prop_assert_eq!(img(&sa.sum(&sb).unwrap()), img(&sa).sum(&img(&sb)).unwrap());
        }

        #[test]
        fn combine_restricts_to_each_part(a in proptest::collection::vec(0i64..5, 6), t in proptest::collection::vec(0i64..5, 6)) {
            let f = gf(5);
            let v = MetricSpace::diagonal(f, &[1, 2, 1]);
            let s1 = vec![vi(f, &a[..3])];
            let s2 = vec![vi(f, &a[3..])];
            let mu = LinearMap::from_pairs(&v, &v, &s1, &[vi(f, &t[..3])]);
            let psi = LinearMap::from_pairs(&v, &v, &s2, &[vi(f, &t[3..])]);
            prop_assume!(mu.is_ok() && psi.is_ok());
            let (mu, psi) = (mu.unwrap(), psi.unwrap());
            if let Ok(c) = mu.combine(&psi) {
                prop_assert_eq!(c.restrict(mu.dom()).unwrap().images().clone(), mu.images().clone());
                prop_assert_eq!(c.restrict(psi.dom()).unwrap().images().clone(), psi.images().clone());
            }
        }
    }
}
