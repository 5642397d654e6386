//! Brute-force ground truth over finite fields: exhaustive enumeration of
//! isometries subject to image constraints, and closures of subspace
//! expressions under `+`, `∩` and `⊥`.

use std::fmt;
use std::ops::ControlFlow;

use rand::Rng;

use crate::error::{Error, Result};
use crate::flags::Flag;
use crate::field::{FieldSpec, Scalar};
use crate::maps::{reflection_product, Isometry, LinearMap};
use crate::matrix::{self, Matrix, Vector};
use crate::space::{same_ambient, SpaceRef, Subspace};
use crate::witt::subspace_isometric;

/// Default cap on the number of candidate images examined by one search.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// Largest closure computed before giving up.
pub const MAX_CLOSURE_MEMBERS: usize = 4096;

/// Image requirements on an isometry `V → V′`.
#[derive(Debug, Clone, Default)]
pub struct ConstraintSet {
    /// Each `(X, X′)` demands `φ(X) = X′`.
    pub pairs: Vec<(Subspace, Subspace)>,
    /// A map the isometry must extend.
    pub base: Option<LinearMap>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mapping(mut self, source: &Subspace, target: &Subspace) -> Self {
        self.pairs.push((source.clone(), target.clone()));
        self
    }

    pub fn extending(mut self, phi: &LinearMap) -> Self {
        self.base = Some(phi.clone());
        self
    }

    pub fn satisfied_by(&self, m: &Isometry) -> Result<bool> {
        for (x, x2) in &self.pairs {
            if m.image_of(x)? != *x2 {
                return Ok(false);
            }
        }
        match &self.base {
            Some(phi) => m.extends(phi),
            None => Ok(true),
        }
    }
}

/// Rows whose common kernel, under the plain dot product, is `s`.
fn annihilator(s: &Subspace) -> Matrix {
    s.basis().kernel_basis()
}

/// Per-level data: the source basis vector and, for each constraint whose
/// intersection with the span of the first basis vectors grows at this
/// level, the coefficients `c` with `b_i + Σ c_l b_l ∈ X`.
struct Level {
    source: Vector,
    fixed: Option<Vector>,
    growth: Vec<(usize, Vec<Scalar>)>,
}

struct Search<'a> {
    source_space: SpaceRef,
    v2: &'a Subspace,
    constraints: &'a ConstraintSet,
    levels: Vec<Level>,
    gram: Vec<Vec<Scalar>>,
    target_gram: &'a Matrix,
    container_ann: Matrix,
    target_ann: Vec<Matrix>,
    same_space: bool,
    budget: u128,
    examined: u128,
}

/// A basis of `v` passing through the base domain and then through the
/// constraint sources, smallest first, so constraints bite early.
fn adapted_basis(v: &Subspace, constraints: &ConstraintSet) -> Result<Vec<Vector>> {
    let mut parts: Vec<&Subspace> = constraints.pairs.iter().map(|(x, _)| x).collect();
    parts.sort_by_key(|x| x.dim());
    if let Some(phi) = &constraints.base {
        parts.insert(0, phi.dom());
    }
    parts.push(v);
    let mut basis: Vec<Vector> = Vec::new();
    let mut current = Subspace::zero(v.ambient());
    for part in parts {
        for x in part.basis_vectors() {
            if !current.contains(&x)? {
                basis.push(x);
                current = Subspace::span(v.ambient(), &basis)?;
            }
        }
    }
    Ok(basis)
}

impl<'a> Search<'a> {
    fn new(v: &Subspace, v2: &'a Subspace, constraints: &'a ConstraintSet, budget: u128) -> Result<Self> {
        let basis = adapted_basis(v, constraints)?;
        let f = v.field();
        let space = v.ambient();
        let n = space.dim();
        let mut levels = Vec::with_capacity(basis.len());
        for i in 0..basis.len() {
            let prefix = Subspace::span(space, &basis[..=i])?;
            let before = Subspace::span(space, &basis[..i])?;
            let mut growth = Vec::new();
            for (c, (x, _)) in constraints.pairs.iter().enumerate() {
                let now = prefix.intersect(x)?;
                if now.dim() == before.intersect(x)?.dim() {
                    continue;
                }
                let stacked = Matrix::from_rows(f, n, &basis[..=i])?.transpose();
                let coords = now
                    .basis_vectors()
                    .into_iter()
                    .map(|w| stacked.solve(&w))
                    .collect::<Result<Vec<_>>>()?;
                let lead = coords.iter().find(|c| !c[i].is_zero()).ok_or_else(|| Error::assertion("no growth vector"))?;
                let inv = lead[i].inv()?;
                growth.push((c, lead[..i].iter().map(|x| x * &inv).collect()));
            }
            let fixed = match &constraints.base {
                Some(phi) if i < phi.dom().dim() => Some(phi.apply(&basis[i])?),
                _ => None,
            };
            levels.push(Level { source: basis[i].clone(), fixed, growth });
        }
        let gram = basis.iter().map(|x| basis.iter().map(|y| space.bilinear(x, y)).collect()).collect();
        Ok(Search {
            source_space: space.clone(),
            v2,
            constraints,
            levels,
            gram,
            target_gram: v2.ambient().gram(),
            container_ann: annihilator(v2),
            target_ann: constraints.pairs.iter().map(|(_, x2)| annihilator(x2)).collect(),
            same_space: same_ambient(v.ambient(), v2.ambient()),
            budget,
            examined: 0,
        })
    }

    /// The affine solution set `x0 + span(K)` of the linear conditions on
    /// the image of basis vector `i`, or `None` when it is empty.
    fn linear_conditions(&self, i: usize, images: &[Vector]) -> Result<Option<(Matrix, Vector)>> {
        let f = self.v2.field();
        let m = self.v2.ambient_dim();
        let mut rows: Vec<Vector> = self.container_ann.row_vectors();
        let mut rhs: Vec<Scalar> = vec![f.zero(); rows.len()];
        for (j, y) in images.iter().enumerate() {
            rows.push(self.target_gram.mul_vec(y)?);
            rhs.push(self.gram[i][j].clone());
        }
        let level = &self.levels[i];
        for (c, coeffs) in &level.growth {
            let known = matrix::combination(f, m, coeffs, &images[..coeffs.len()]);
            for a in self.target_ann[*c].row_vectors() {
                rhs.push(-matrix::dot(&a, &known));
                rows.push(a);
            }
        }
        if let Some(y) = &level.fixed {
            for (k, value) in y.iter().enumerate() {
                rows.push(matrix::unit_vector(f, m, k));
                rhs.push(value.clone());
            }
        }
        let system = Matrix::from_rows(f, m, &rows)?;
        match system.solve(&rhs) {
            Ok(x0) => Ok(Some((system.kernel_basis(), x0))),
            Err(Error::NoSolution) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn charge(&mut self, amount: u128) -> Result<()> {
        self.examined = self.examined.saturating_add(amount);
        if self.examined > self.budget {
            return Err(Error::SearchSpaceTooLarge(self.examined));
        }
        Ok(())
    }

    fn visit(&mut self, images: &mut Vec<Vector>, out: &mut dyn FnMut(&Isometry) -> ControlFlow<()>) -> Result<ControlFlow<()>> {
        let i = images.len();
        if i == self.levels.len() {
            let sources: Vec<Vector> = self.levels.iter().map(|l| l.source.clone()).collect();
            let map = LinearMap::from_pairs(&self.source_space, self.v2.ambient(), &sources, images)?;
            let iso = Isometry::new(map)?;
            if !self.constraints.satisfied_by(&iso)? {
                return Err(Error::assertion("enumerated map violates its constraints"));
            }
            return Ok(out(&iso));
        }
        let Some((kernel, x0)) = self.linear_conditions(i, images)? else { return Ok(ControlFlow::Continue(())) };
        let f = self.v2.field();
        let p = u128::from(f.order().ok_or(Error::InfiniteField)?);
        let free = kernel.rows();
        let count = p.checked_pow(free as u32).ok_or(Error::SearchSpaceTooLarge(u128::MAX))?;
        self.charge(count)?;
        let norm = self.gram[i][i].clone();
        let target = self.v2.ambient().clone();
        let preferred = self.levels[i].source.clone();
        let preferred_ok = self.same_space && satisfies(&kernel, &x0, &preferred)? && target.norm(&preferred) == norm;
        if preferred_ok {
            images.push(preferred.clone());
            let flow = self.visit(images, out)?;
            images.pop();
            if flow.is_break() {
                return Ok(flow);
            }
        }
        let elements = f.elements()?;
        let kernel_rows = kernel.row_vectors();
        let mut digits = vec![0usize; free];
        loop {
            let mut y = x0.clone();
            for (d, row) in digits.iter().zip(&kernel_rows) {
                if *d != 0 {
                    y = matrix::add(&y, &matrix::scale(&elements[*d], row));
                }
            }
            if target.norm(&y) == norm && !(preferred_ok && y == preferred) {
                images.push(y);
                let flow = self.visit(images, out)?;
                images.pop();
                if flow.is_break() {
                    return Ok(flow);
                }
            }
            // Little-endian counter over the free coefficients.
            let mut pos = 0;
            loop {
                if pos == free {
                    return Ok(ControlFlow::Continue(()));
                }
                digits[pos] += 1;
                if digits[pos] < elements.len() {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Whether `y` lies in `x0 + rowspace(kernel)`.
fn satisfies(kernel: &Matrix, x0: &[Scalar], y: &[Scalar]) -> Result<bool> {
    let diff = matrix::sub(y, x0);
    if matrix::is_zero_vector(&diff) {
        return Ok(true);
    }
    if kernel.rows() == 0 {
        return Ok(false);
    }
    Ok(kernel.rank() == kernel.vstack(&Matrix::from_rows(kernel.field(), kernel.cols(), &[diff])?)?.rank())
}

fn check_search_inputs(v: &Subspace, v2: &Subspace, constraints: &ConstraintSet) -> Result<bool> {
    if !v.field().is_finite() || !v2.field().is_finite() {
        return Err(Error::InfiniteField);
    }
    if v.field() != v2.field() {
        return Err(Error::FieldMismatch(v.field(), v2.field()));
    }
    if !v.is_nonsingular() || !v2.is_nonsingular() {
        return Err(Error::SingularSpace);
    }
    for (x, x2) in &constraints.pairs {
        if !x.is_subspace_of(v)? || !x2.is_subspace_of(v2)? {
            return Err(Error::OutOfDomain);
        }
    }
    if let Some(phi) = &constraints.base {
        if !phi.dom().is_subspace_of(v)? || !phi.cod().is_subspace_of(v2)? {
            return Err(Error::OutOfDomain);
        }
    }
    let dims_agree = v.dim() == v2.dim() && constraints.pairs.iter().all(|(x, x2)| x.dim() == x2.dim());
    Ok(dims_agree)
}

/// Visit every isometry `V → V′` meeting the constraints, in a fixed order,
/// until `visit` breaks. Returns the number of candidate images examined.
pub fn for_each_isometry(
    v: &Subspace,
    v2: &Subspace,
    constraints: &ConstraintSet,
    budget: u128,
    mut visit: impl FnMut(&Isometry) -> ControlFlow<()>,
) -> Result<u128> {
    if !check_search_inputs(v, v2, constraints)? {
        return Ok(0);
    }
    let mut search = Search::new(v, v2, constraints, budget)?;
    let _ = search.visit(&mut Vec::new(), &mut visit)?;
    Ok(search.examined)
}

/// Every isometry between the nonsingular spaces `V` and `V′`.
pub fn enumerate_isometries(v: &Subspace, v2: &Subspace, budget: u128) -> Result<Vec<Isometry>> {
    let mut all = Vec::new();
    for_each_isometry(v, v2, &ConstraintSet::new(), budget, |m| {
        all.push(m.clone());
        ControlFlow::Continue(())
    })?;
    Ok(all)
}

pub fn count_isometries(v: &Subspace, v2: &Subspace, constraints: &ConstraintSet, budget: u128) -> Result<u64> {
    let mut count = 0;
    for_each_isometry(v, v2, constraints, budget, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// The first isometry `V → V′` meeting the constraints, if any.
pub fn exists_isometry(v: &Subspace, v2: &Subspace, constraints: &ConstraintSet, budget: u128) -> Result<Option<Isometry>> {
    let mut found = None;
    for_each_isometry(v, v2, constraints, budget, |m| {
        found = Some(m.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Every isometry `E → E′` between subspaces whose forms may be singular.
/// Images of the basis of `E` range over all vectors of `E′`; partial
/// assignments are pruned on Gram entries and linear independence.
pub fn enumerate_subspace_isometries(e: &Subspace, e2: &Subspace, budget: u128) -> Result<Vec<Isometry>> {
    let f = e.field();
    if !f.is_finite() || !e2.field().is_finite() {
        return Err(Error::InfiniteField);
    }
    if f != e2.field() {
        return Err(Error::FieldMismatch(f, e2.field()));
    }
    if e.dim() != e2.dim() {
        return Ok(Vec::new());
    }
    let p = u128::from(f.order().ok_or(Error::InfiniteField)?);
    let d = e2.dim();
    let per_level = p.checked_pow(d as u32).ok_or(Error::SearchSpaceTooLarge(u128::MAX))?;
    let elements = f.elements()?;
    let candidates: Vec<Vector> = (0..per_level)
        .map(|mut code| {
            let coeffs: Vec<Scalar> = (0..d)
                .map(|_| {
                    let c = elements[(code % p) as usize].clone();
                    code /= p;
                    c
                })
                .collect();
            e2.vector_from_coords(&coeffs)
        })
        .collect();
    let basis = e.basis_vectors();
    let mut state = EnumerationState { examined: 0, budget, found: Vec::new() };
    place_images(e, e2, &basis, &candidates, &mut Vec::new(), &mut state)?;
    Ok(state.found)
}

struct EnumerationState {
    examined: u128,
    budget: u128,
    found: Vec<Isometry>,
}

fn place_images(
    e: &Subspace,
    e2: &Subspace,
    basis: &[Vector],
    candidates: &[Vector],
    images: &mut Vec<Vector>,
    state: &mut EnumerationState,
) -> Result<()> {
    let i = images.len();
    if i == basis.len() {
        let map = LinearMap::from_pairs(e.ambient(), e2.ambient(), basis, images)?;
        state.found.push(Isometry::new(map)?);
        return Ok(());
    }
    state.examined += candidates.len() as u128;
    if state.examined > state.budget {
        return Err(Error::SearchSpaceTooLarge(state.examined));
    }
    let placed = Subspace::span(e2.ambient(), images)?;
    for y in candidates {
        let gram_ok = (0..=i).all(|j| {
            let yj = if j == i { y } else { &images[j] };
            e2.bilinear(y, yj) == e.bilinear(&basis[i], &basis[j])
        });
        if gram_ok && !placed.contains(y)? {
            images.push(y.clone());
            place_images(e, e2, basis, candidates, images, state)?;
            images.pop();
        }
    }
    Ok(())
}

/// A random isometry of the whole space: a product of `reflections`
/// reflections in uniformly drawn vectors (isotropic draws are skipped).
pub fn random_isometry<R: Rng + ?Sized>(space: &SpaceRef, reflections: usize, rng: &mut R) -> Result<Isometry> {
    let vectors: Vec<Vector> = (0..reflections).map(|_| random_vector(space, rng)).collect::<Result<_>>()?;
    reflection_product(space, &vectors)
}

/// A uniformly random vector of a finite ambient space.
pub fn random_vector<R: Rng + ?Sized>(space: &SpaceRef, rng: &mut R) -> Result<Vector> {
    let f = space.field();
    let p = f.order().ok_or(Error::InfiniteField)?;
    Ok((0..space.dim()).map(|_| f.from_u64(rng.gen_range(0..p))).collect())
}

/// A uniformly random vector of the subspace `s` of a finite space.
pub fn random_vector_in<R: Rng + ?Sized>(s: &Subspace, rng: &mut R) -> Result<Vector> {
    let f = s.field();
    let p = f.order().ok_or(Error::InfiniteField)?;
    let coords: Vec<Scalar> = (0..s.dim()).map(|_| f.from_u64(rng.gen_range(0..p))).collect();
    Ok(s.vector_from_coords(&coords))
}

/// The span of `count` random vectors of `s`.
pub fn random_subspace<R: Rng + ?Sized>(s: &Subspace, count: usize, rng: &mut R) -> Result<Subspace> {
    let vs = (0..count).map(|_| random_vector_in(s, rng)).collect::<Result<Vec<_>>>()?;
    Subspace::span(s.ambient(), &vs)
}

/// A random symmetric matrix with entries in `0..p`, redrawn until nonsingular.
pub fn random_nonsingular_gram<R: Rng + ?Sized>(field: FieldSpec, n: usize, rng: &mut R) -> Result<Matrix> {
    let p = field.order().ok_or(Error::InfiniteField)?;
    loop {
        let mut g = Matrix::zeros(field, n, n);
        for i in 0..n {
            for j in i..n {
                let x = field.from_u64(rng.gen_range(0..p));
                g.set(i, j, x.clone());
                g.set(j, i, x);
            }
        }
        if g.rank() == n {
            return Ok(g);
        }
    }
}

/// A random totally isotropic subspace of `v` of dimension at most `dim`,
/// grown one random isotropic vector at a time.
pub fn random_totally_isotropic<R: Rng + ?Sized>(v: &Subspace, dim: usize, rng: &mut R) -> Result<Subspace> {
    let mut t = Subspace::zero(v.ambient());
    for _ in 0..dim {
        let room = t.perp_within(v)?;
        let mut added = false;
        for _ in 0..64 {
            let x = random_vector_in(&room, rng)?;
            if !t.contains(&x)? && v.ambient().norm(&x).is_zero() {
                t = t.sum(&Subspace::span(v.ambient(), &[x])?)?;
                added = true;
                break;
            }
        }
        if !added {
            break;
        }
    }
    Ok(t)
}

/// A random flag `{0} ⊆ V_1 ⊆ … ⊆ V_{k−1} ⊆ V` made of spans of prefixes of
/// random vectors of `v`, with random (possibly repeated) cut points.
pub fn random_flag<R: Rng + ?Sized>(v: &Subspace, k: usize, rng: &mut R) -> Result<Flag> {
    let vs = (0..v.dim()).map(|_| random_vector_in(v, rng)).collect::<Result<Vec<_>>>()?;
    let mut cuts: Vec<usize> = (1..k).map(|_| rng.gen_range(0..=vs.len())).collect();
    cuts.sort_unstable();
    let mut members = vec![Subspace::zero(v.ambient())];
    for c in cuts {
        members.push(Subspace::span(v.ambient(), &vs[..c])?);
    }
    members.push(v.clone());
    Flag::new(members)
}

/// The image of every member of a flag.
pub fn image_flag(g: &Isometry, f: &Flag) -> Result<Flag> {
    Flag::new(f.members().iter().map(|m| g.image_of(m)).collect::<Result<Vec<_>>>()?)
}

/// A word in `+`, `∩`, `⊥` over the generators `E`, `A` and the constants
/// `{0}` and `V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Zero,
    Whole,
    E,
    A,
    Perp(Box<Expr>),
    Sum(Box<Expr>, Box<Expr>),
    Meet(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluate with perps taken inside `v`.
    pub fn eval(&self, e: &Subspace, a: &Subspace, v: &Subspace) -> Result<Subspace> {
        Ok(match self {
            Expr::Zero => Subspace::zero(v.ambient()),
            Expr::Whole => v.clone(),
            Expr::E => e.clone(),
            Expr::A => a.clone(),
            Expr::Perp(x) => x.eval(e, a, v)?.perp_within(v)?,
            Expr::Sum(x, y) => x.eval(e, a, v)?.sum(&y.eval(e, a, v)?)?,
            Expr::Meet(x, y) => x.eval(e, a, v)?.intersect(&y.eval(e, a, v)?)?,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Zero => write!(f, "0"),
            Expr::Whole => write!(f, "V"),
            Expr::E => write!(f, "E"),
            Expr::A => write!(f, "A"),
            Expr::Perp(x) => write!(f, "{x}⊥"),
            Expr::Sum(x, y) => write!(f, "({x}+{y})"),
            Expr::Meet(x, y) => write!(f, "({x}∩{y})"),
        }
    }
}

/// All subspaces reachable from `{0}`, `V`, `E`, `A` under `+`, `∩`, `⊥`,
/// each with the first expression found for it.
#[derive(Debug, Clone)]
pub struct ExpressionClosure {
    pub e: Subspace,
    pub a: Subspace,
    pub v: Subspace,
    pub members: Vec<(Subspace, Expr)>,
}

impl ExpressionClosure {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.members.iter().position(|(m, _)| m == s)
    }
}

pub fn expression_closure(e: &Subspace, a: &Subspace, v: &Subspace) -> Result<ExpressionClosure> {
    if !e.is_subspace_of(v)? || !a.is_subspace_of(v)? {
        return Err(Error::OutOfDomain);
    }
    let mut members: Vec<(Subspace, Expr)> = Vec::new();
    let push = |members: &mut Vec<(Subspace, Expr)>, s: Subspace, x: Expr| -> Result<()> {
        if !members.iter().any(|(m, _)| *m == s) {
            if members.len() >= MAX_CLOSURE_MEMBERS {
                return Err(Error::SearchSpaceTooLarge(members.len() as u128));
            }
            members.push((s, x));
        }
        Ok(())
    };
    for x in [Expr::Zero, Expr::Whole, Expr::E, Expr::A] {
        let s = x.eval(e, a, v)?;
        push(&mut members, s, x)?;
    }
    // Each new member is combined with itself and everything before it.
    let mut next = 0;
    while next < members.len() {
        let (s, x) = members[next].clone();
        push(&mut members, s.perp_within(v)?, Expr::Perp(Box::new(x.clone())))?;
        for k in 0..=next {
            let (t, y) = members[k].clone();
            push(&mut members, s.sum(&t)?, Expr::Sum(Box::new(x.clone()), Box::new(y.clone())))?;
            push(&mut members, s.intersect(&t)?, Expr::Meet(Box::new(x.clone()), Box::new(y)))?;
        }
        next += 1;
    }
    Ok(ExpressionClosure { e: e.clone(), a: a.clone(), v: v.clone(), members })
}

/// One member `X` of a closure, its partner `ϖ(X)` and whether they are
/// isometric.
#[derive(Debug, Clone)]
pub struct ClosureRow {
    pub expr: Expr,
    pub member: Subspace,
    pub partner: Subspace,
    pub isometric: bool,
}

/// Pair members of two closures by evaluating each member's expression on
/// the other generators. Fails unless this pairing is a bijection that is
/// also consistent in the reverse direction.
pub fn closure_isometry_table(cl: &ExpressionClosure, cl2: &ExpressionClosure) -> Result<Vec<ClosureRow>> {
    if cl.len() != cl2.len() {
        return Err(Error::PairingIncomplete);
    }
    let mut hit = vec![false; cl2.len()];
    let mut rows = Vec::with_capacity(cl.len());
    for (member, expr) in &cl.members {
        let partner = expr.eval(&cl2.e, &cl2.a, &cl2.v)?;
        let Some(j) = cl2.position(&partner) else { return Err(Error::PairingIncomplete) };
        if hit[j] || cl2.members[j].1.eval(&cl.e, &cl.a, &cl.v)? != *member {
            return Err(Error::PairingIncomplete);
        }
        hit[j] = true;
        let isometric = subspace_isometric(member, &partner)?;
        rows.push(ClosureRow { expr: expr.clone(), member: member.clone(), partner, isometric });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::space::MetricSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn span(s: &SpaceRef, rows: &[&[i64]]) -> Subspace {
        Subspace::span_i64(s, rows).unwrap()
    }

    fn count(s: &SpaceRef) -> usize {
        let v = Subspace::whole(s);
        enumerate_isometries(&v, &v, DEFAULT_BUDGET).unwrap().len()
    }

    #[test]
    fn orthogonal_group_orders() {
        assert_eq!(count(&MetricSpace::diagonal(gf(3), &[1])), 2);
        assert_eq!(count(&MetricSpace::diagonal(gf(3), &[1, 1])), 8);
        assert_eq!(count(&MetricSpace::hyperbolic(gf(3), 1)), 4);
        assert_eq!(count(&MetricSpace::diagonal(gf(7), &[1, 1])), 16);
        assert_eq!(count(&MetricSpace::hyperbolic(gf(3), 2)), 1152);
    }

    #[test]
    fn identity_comes_first() {
        let s = MetricSpace::hyperbolic(gf(3), 2);
        let v = Subspace::whole(&s);
        let m = exists_isometry(&v, &v, &ConstraintSet::new(), DEFAULT_BUDGET).unwrap().unwrap();
        assert!(m.agrees_with(&LinearMap::identity(&v)).unwrap());
    }

    #[test]
    fn enumerated_group_is_closed() {
        let s = MetricSpace::diagonal(gf(3), &[1, 1]);
        let v = Subspace::whole(&s);
        let all = enumerate_isometries(&v, &v, DEFAULT_BUDGET).unwrap();
        for g in &all {
            assert!(g.is_isometry());
            for h in &all {
                let gh = g.then(h).unwrap();
                assert!(all.iter().any(|x| x.agrees_with(gh.map()).unwrap()));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let s = MetricSpace::hyperbolic(gf(3), 3);
        let v = Subspace::whole(&s);
        assert!(matches!(enumerate_isometries(&v, &v, 1000), Err(Error::SearchSpaceTooLarge(_))));
        let q = MetricSpace::diagonal(FieldSpec::rational(), &[1]);
        let vq = Subspace::whole(&q);
        assert!(matches!(enumerate_isometries(&vq, &vq, 1000), Err(Error::InfiniteField)));
    }

    #[test]
    fn constraints_and_base_maps_are_respected() {
        let s = MetricSpace::hyperbolic(gf(3), 2);
        let v = Subspace::whole(&s);
        let x = span(&s, &[&[1, 0, 0, 0]]);
        let x2 = span(&s, &[&[0, 0, 1, 0]]);
        let cs = ConstraintSet::new().mapping(&x, &x2);
        let n = count_isometries(&v, &v, &cs, DEFAULT_BUDGET).unwrap();
        // GF(3)⁴ with the hyperbolic form has 16 isotropic lines, permuted transitively.
        assert_eq!(n, 1152 / 16);
        let phi = LinearMap::from_pairs(&s, &s, &x.basis_vectors(), &x2.basis_vectors()).unwrap();
        let cs = ConstraintSet::new().extending(&phi);
        let n2 = count_isometries(&v, &v, &cs, DEFAULT_BUDGET).unwrap();
        assert_eq!(n2 * 2, n);
        let bad = span(&s, &[&[1, 0, 1, 0], &[0, 1, 0, 0]]);
        let cs = ConstraintSet::new().mapping(&x, &x2).mapping(&x, &bad);
        assert_eq!(count_isometries(&v, &v, &cs, DEFAULT_BUDGET).unwrap(), 0);
    }

    #[test]
    fn c7_counterexample() {
        let s = MetricSpace::diagonal(gf(7), &[1, 1]);
        let v = Subspace::whole(&s);
        let a = span(&s, &[&[1, 0]]);
        let e = span(&s, &[&[1, 2]]);
        let e2 = span(&s, &[&[1, 3]]);
        let cl = expression_closure(&e, &a, &v).unwrap();
        let cl2 = expression_closure(&e2, &a, &v).unwrap();
        assert_eq!(cl.len(), 6);
        let table = closure_isometry_table(&cl, &cl2).unwrap();
        assert!(table.iter().all(|r| r.isometric));
        let cs = ConstraintSet::new().mapping(&e, &e2).mapping(&a, &a);
        assert!(exists_isometry(&v, &v, &cs, DEFAULT_BUDGET).unwrap().is_none());
    }

    // Coordinates in H6: e1, ẽ1, e2, ẽ2, e3, ẽ3.
    fn blocked_h6_pair() -> (SpaceRef, Subspace, Subspace, Subspace) {
        let s = MetricSpace::hyperbolic(gf(3), 3);
        let e = span(&s, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 1, 0]]);
        let a = span(&s, &[&[1, 0, 0, 0, 0, 0], &[0, 0, 1, 0, 0, 0], &[0, 0, 0, 1, 0, 0]]);
        let a2 = span(&s, &[&[1, 0, 0, 0, 0, 0], &[0, 1, 0, 0, 0, 0], &[0, 0, 0, 1, 0, -1]]);
        (s, e, a, a2)
    }

    #[test]
    fn h6_blocked_has_no_extension_of_the_identity() {
        let (s, e, a, a2) = blocked_h6_pair();
        let v = Subspace::whole(&s);
        let cs = ConstraintSet::new().extending(&LinearMap::identity(&e)).mapping(&a, &a2);
        assert!(exists_isometry(&v, &v, &cs, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn h6_blocked_closure_separates_the_triple_intersection() {
        let (s, e, a, a2) = blocked_h6_pair();
        let v = Subspace::whole(&s);
        let cl = expression_closure(&e, &a, &v).unwrap();
        let cl2 = expression_closure(&e, &a2, &v).unwrap();
        let target = e.intersect(&a.perp_within(&v).unwrap()).unwrap().intersect(&a).unwrap();
        match closure_isometry_table(&cl, &cl2) {
            Ok(table) => {
                let row = table.iter().find(|r| r.member == target).unwrap();
                assert!(!row.isometric);
            }
            Err(err) => assert!(matches!(err, Error::PairingIncomplete)),
        }
    }

    #[test]
    fn closure_of_identical_generators_pairs_with_itself() {
        let s = MetricSpace::hyperbolic(gf(3), 2);
        let v = Subspace::whole(&s);
        let e = span(&s, &[&[1, 0, 1, 0]]);
        let cl = expression_closure(&e, &e, &v).unwrap();
        assert!(cl.position(&e.perp_within(&v).unwrap()).is_some());
        assert!(closure_isometry_table(&cl, &cl).unwrap().iter().all(|r| r.isometric));
        assert_eq!(format!("{}", Expr::Perp(Box::new(Expr::Sum(Box::new(Expr::E), Box::new(Expr::A))))), "(E+A)⊥");
    }

    #[test]
    fn subspace_isometries_include_singular_ones() {
        let s = MetricSpace::hyperbolic(gf(3), 2);
        let e = span(&s, &[&[1, 0, 0, 0], &[0, 0, 1, 1]]);
        let e2 = span(&s, &[&[0, 1, 0, 0], &[0, 0, 1, 1]]);
        // Scale the radical by ±1, send the norm-2 vector to ±itself plus any radical vector.
        let all = enumerate_subspace_isometries(&e, &e2, DEFAULT_BUDGET).unwrap();
        assert_eq!(all.len(), 2 * 2 * 3);
        assert!(all.iter().all(|m| m.is_isometry() && m.image() == e2));
    }

    #[test]
    fn random_isometries_are_isometries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = MetricSpace::hyperbolic(gf(5), 2);
        for _ in 0..10 {
            assert!(random_isometry(&s, 6, &mut rng).unwrap().is_isometry());
        }
    }
}
