//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Hermitian eigensolves are delegated to LAPACK (`zheevd` through
//! `ndarray-linalg`); everything else is plain `ndarray`.

use ndarray::{Array1, Array2, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, Inverse, UPLO};

use crate::{QnloError, Result, C64};

pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

/// Conjugate transpose.
pub fn dagger(a: &ArrayView2<C64>) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max |A - A†|`.
pub fn hermiticity_deviation(a: &ArrayView2<C64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// `max |A + A†|`.
pub fn anti_hermiticity_deviation(a: &ArrayView2<C64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] + a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Maximum absolute column sum.
pub fn one_norm(a: &ArrayView2<C64>) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(a: &ArrayView2<C64>) -> C64 {
    a.diag().sum()
}

/// Kronecker product `A ⊗ B`; row index is `i_a * rows(B) + i_b`.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[[i, j]];
            if s == ZERO {
                continue;
            }
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.zip_mut_with(b, |o, &x| *o = s * x);
        }
    }
    out
}

/// Eigen-decomposition `H = V diag(values) V†` of a Hermitian matrix,
/// eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn new(h: &ArrayView2<C64>) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(QnloError::DimensionMismatch { expected: h.nrows(), found: h.ncols() });
        }
        // LAPACK sees a row-major buffer as the transpose; hand it column-major.
        let mut m = CMat::zeros(h.raw_dim().f());
        m.assign(h);
        let (values, vectors) = m
            .eigh(UPLO::Lower)
            .map_err(|e| QnloError::EigensolveFailure(e.to_string()))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QnloError::EigensolveFailure("non-finite eigenvalue".into()));
        }
        Ok(Self { values, vectors })
    }

    /// `f(H) = V diag(f(λ)) V†` for a scalar function returning complex values.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMat {
        let fv: Array1<C64> = self.values.mapv(f);
        let scaled = &self.vectors * &fv.view().insert_axis(Axis(0));
        scaled.dot(&dagger(&self.vectors.view()))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(h: &ArrayView2<C64>) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    h.to_owned()
        .eigvalsh(UPLO::Lower)
        .map_err(|e| QnloError::EigensolveFailure(e.to_string()))
}

/// Matrix exponential.
///
/// Hermitian or anti-Hermitian arguments (up to `1e-12` relative) go through
/// an eigendecomposition; anything else uses Padé(13) scaling and squaring.
pub fn expm(a: &ArrayView2<C64>) -> Result<CMat> {
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    if anti_hermiticity_deviation(a) <= 1e-12 * scale {
        // A = -iK with K = iA Hermitian, exp(A) = exp(-iK).
        let k = a.mapv(|z| I * z);
        let eig = HermitianEigen::new(&hermitize(&k.view()).view())?;
        return Ok(eig.apply_fn(|l| (-I * l).exp()));
    }
    if hermiticity_deviation(a) <= 1e-12 * scale {
        let eig = HermitianEigen::new(&hermitize(a).view())?;
        return Ok(eig.apply_fn(|l| C64::new(l.exp(), 0.0)));
    }
    expm_pade(a)
}

/// `(A + A†) / 2`.
pub fn hermitize(a: &ArrayView2<C64>) -> CMat {
    let mut out = a.to_owned();
    out += &dagger(a);
    out.mapv_inplace(|z| z * 0.5);
    out
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Padé(13) scaling-and-squaring exponential for a general square matrix.
pub fn expm_pade(a: &ArrayView2<C64>) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(QnloError::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let b = |i: usize| C64::new(PADE13[i], 0.0);
    let id = identity(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_poly = a6.dot(&inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = a.dot(&u_poly);
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = a6.dot(&inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let denom = (&v - &u)
        .inv()
        .map_err(|e| QnloError::EigensolveFailure(format!("pade denominator singular: {e}")))?;
    let mut r = denom.dot(&(&v + &u));
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}
