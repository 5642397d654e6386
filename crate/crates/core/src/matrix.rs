//! Dense exact matrices and the row-reduction toolkit.
//!
//! Vectors are plain `Vec<Scalar>` and are treated as row vectors; subspaces
//! elsewhere in the crate are row spaces.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Output of [`Matrix::rref`]: `reduced = transform · input`.
#[derive(Debug, Clone)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

impl Matrix {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(rows * cols, data.len()));
        }
        if let Some(bad) = data.iter().find(|s| s.field() != field) {
            return Err(Error::FieldMismatch(field, bad.field()));
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: FieldSpec, cols: usize, rows: &[Vector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::dims(cols, r.len()));
            }
            data.extend(r.iter().cloned());
        }
        Matrix::new(field, rows.len(), cols, data)
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                r.iter().map(move |&v| field.from_i64(v))
            })
            .collect();
        Matrix { field, rows: rows.len(), cols, data }
    }

    pub fn diagonal(field: FieldSpec, entries: &[Scalar]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(field, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "matrix field mismatch");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix { field: self.field, rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dims(self.cols, other.rows));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::dims(self.cols, x.len()));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `x · M` for a row vector `x`.
    pub fn vec_mul(&self, x: &[Scalar]) -> Result<Vector> {
        if x.len() != self.rows {
            return Err(Error::dims(self.rows, x.len()));
        }
        let mut out = zero_vector(self.field, self.cols);
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if !m.is_zero() {
                    *o = &*o + &(c * m);
                }
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::dims(self.cols, other.cols));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field, other.field));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::dims(self.rows, other.rows));
        }
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i).to_vec();
            r.extend(other.row(i).iter().cloned());
            rows.push(r);
        }
        Matrix::from_rows(self.field, self.cols + other.cols, &rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix { field: self.field, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * range.len());
        for i in 0..self.rows {
            data.extend(self.row(i)[range.clone()].iter().cloned());
        }
        Matrix { field: self.field, rows: self.rows, cols: range.len(), data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Scalar) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            if !self.data[idx].is_zero() {
                self.data[idx] = &self.data[idx] * s;
            }
        }
    }

    /// row[target] -= factor * row[source]
    fn axpy_row(&mut self, target: usize, source: usize, factor: &Scalar) {
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let d = factor * s;
            let idx = target * self.cols + j;
            self.data[idx] = &self.data[idx] - &d;
        }
    }

    /// In-place Gauss-Jordan elimination, mirroring every row operation on
    /// `shadow` when given. Pivot rule: first nonzero entry scanning down.
    fn eliminate(&mut self, mut shadow: Option<&mut Matrix>, col_limit: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..col_limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            if let Some(s) = shadow.as_deref_mut() {
                s.swap_rows(r, p);
            }
            let inv = self.get(r, c).inv().expect("pivot is nonzero");
            self.scale_row(r, &inv);
            if let Some(s) = shadow.as_deref_mut() {
                s.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    self.axpy_row(i, r, &f);
                    if let Some(s) = shadow.as_deref_mut() {
                        s.axpy_row(i, r, &f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let mut transform = Matrix::identity(self.field, self.rows);
        let pivots = reduced.eliminate(Some(&mut transform), self.cols);
        Rref { reduced, pivots, transform }
    }

    /// Reduced row-echelon form without tracking the transform.
    pub fn reduced(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(None, self.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.reduced().1.len()
    }

    /// A particular solution of `M · x = b`: free variables are set to zero.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vector> {
        if b.len() != self.rows {
            return Err(Error::dims(self.rows, b.len()));
        }
        let col = Matrix::new(self.field, self.rows, 1, b.to_vec())?;
        let mut aug = self.hstack(&col)?;
        let pivots = aug.eliminate(None, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Err(Error::NoSolution);
        }
        let mut x = zero_vector(self.field, self.cols);
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(i, self.cols).clone();
        }
        Ok(x)
    }

    /// Rows form a basis (in RREF) of `{x : M · x = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let (r, pivots) = self.reduced();
        let mut basis = Vec::new();
        let mut pivot_iter = pivots.iter().peekable();
        let mut free = Vec::new();
        for c in 0..self.cols {
            if pivot_iter.peek() == Some(&&c) {
                pivot_iter.next();
            } else {
                free.push(c);
            }
        }
        for &f in &free {
            let mut x = zero_vector(self.field, self.cols);
            x[f] = self.field.one();
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = -r.get(i, f);
            }
            basis.push(x);
        }
        let k = Matrix::from_rows(self.field, self.cols, &basis).expect("kernel rows are well formed");
        let (kr, kp) = k.reduced();
        kr.select_rows(&(0..kp.len()).collect::<Vec<_>>())
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::dims(self.rows, self.cols));
        }
        let rr = self.rref();
        if rr.pivots.len() != self.rows {
            return Err(Error::DivisionByZero);
        }
        Ok(rr.transform)
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::dims(self.rows, self.cols));
        }
        let mut m = self.clone();
        let mut det = self.field.one();
        for c in 0..self.cols {
            let Some(p) = (c..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(self.field.zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = &det * &piv;
            let inv = piv.inv()?;
            for i in c + 1..self.rows {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c) * &inv;
                    m.axpy_row(i, c, &f);
                }
            }
        }
        Ok(det)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|s| s.to_string()).collect()).collect()
    }

    pub fn from_strings(field: FieldSpec, rows: &[Vec<String>], cols: Option<usize>) -> Result<Self> {
        let cols = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| field.parse_scalar(s)).collect::<Result<Vector>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(field, cols, &parsed)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, s) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn zero_vector(field: FieldSpec, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn unit_vector(field: FieldSpec, n: usize, i: usize) -> Vector {
    let mut v = zero_vector(field, n);
    v[i] = field.one();
    v
}

pub fn vector_from_i64(field: FieldSpec, v: &[i64]) -> Vector {
    v.iter().map(|&x| field.from_i64(x)).collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    let field = a.first().or(b.first()).map(Scalar::field);
    let mut acc = match field {
        Some(f) => f.zero(),
        None => return FieldSpec::Rational.zero(),
    };
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = &acc + &(x * y);
        }
    }
    acc
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| s * x).collect()
}

pub fn is_zero_vector(a: &[Scalar]) -> bool {
    a.iter().all(Scalar::is_zero)
}

/// `Σ coeffs[i] · vectors[i]`; `n` is the length used when `vectors` is empty.
pub fn combination(field: FieldSpec, n: usize, coeffs: &[Scalar], vectors: &[Vector]) -> Vector {
    let mut out = zero_vector(field, n);
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o = &*o + &(c * x);
            }
        }
    }
    out
}
