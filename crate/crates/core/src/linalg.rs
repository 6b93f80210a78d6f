//! Dense linear-algebra helpers shared by every layer.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<C64>;

/// Imaginary parts below this are treated as zero when picking the real eigensolver.
const REAL_PATH_TOL: f64 = 1e-14;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(c)
}

/// Real part, failing if any imaginary part exceeds `tol`.
pub fn to_real(m: &CMat, tol: f64) -> Option<RMat> {
    m.iter().all(|z| z.im.abs() <= tol).then(|| m.map(|z| z.re))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = match to_real(m, REAL_PATH_TOL) {
        Some(r) => {
            let r = (&r + r.transpose()) * 0.5;
            SymmetricEigen::new(r).eigenvalues.iter().copied().collect()
        }
        None => SymmetricEigen::new(hermitian_part(m))
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    };
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigenvalues ascending and the matching unit eigenvectors as columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let (vals, vecs) = match to_real(m, REAL_PATH_TOL) {
        Some(r) => {
            let e = SymmetricEigen::new((&r + r.transpose()) * 0.5);
            (e.eigenvalues, to_complex(&e.eigenvectors))
        }
        None => {
            let e = SymmetricEigen::new(hermitian_part(m));
            (e.eigenvalues, e.eigenvectors)
        }
    };
    sort_eigen(vals.as_slice(), |j| vecs.column(j).into_owned())
}

/// Real symmetric eigendecomposition, ascending.
pub fn symmetric_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let e = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let vecs = e.eigenvectors;
    sort_eigen(e.eigenvalues.as_slice(), |j| vecs.column(j).into_owned())
}

fn sort_eigen<T: nalgebra::ComplexField>(vals: &[f64], col: impl Fn(usize) -> DVector<T>) -> (Vec<f64>, DMatrix<T>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let cols: Vec<DVector<T>> = order.iter().map(|&j| col(j)).collect();
    let sorted = order.iter().map(|&j| vals[j]).collect();
    let n = vals.len();
    let mut out = DMatrix::<T>::zeros(if n == 0 { 0 } else { cols[0].len() }, n);
    for (j, v) in cols.into_iter().enumerate() {
        out.set_column(j, &v);
    }
    (sorted, out)
}

/// Which tensor factor an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Partial trace of an operator on `C^{d1} ⊗ C^{d2}`, keeping `keep`.
pub fn partial_trace(m: &CMat, d1: usize, d2: usize, keep: Factor) -> Result<CMat> {
    check_square(m, d1 * d2)?;
    Ok(match keep {
        Factor::First => CMat::from_fn(d1, d1, |i, j| (0..d2).map(|t| m[(i * d2 + t, j * d2 + t)]).sum()),
        Factor::Second => CMat::from_fn(d2, d2, |i, j| (0..d1).map(|t| m[(t * d2 + i, t * d2 + j)]).sum()),
    })
}

pub fn check_square(m: &CMat, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: if m.nrows() != d { m.nrows() } else { m.ncols() },
        });
    }
    Ok(())
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// `‖X X* − Y Y*‖_F` without forming either outer product.
///
/// With `[X Y] = Q R` the difference is `Q R S R* Q*`, `S = diag(1, −1)`, so the
/// norm is that of the small matrix `R S R*`.
pub fn gram_distance(x: &CMat, y: &CMat) -> f64 {
    assert_eq!(x.nrows(), y.nrows(), "gram_distance needs equal row counts");
    if let (Some(xr), Some(yr)) = (to_real(x, 0.0), to_real(y, 0.0)) {
        return gram_distance_real(&xr, &yr);
    }
    let (cx, cy) = (x.ncols(), y.ncols());
    if x.nrows() < cx + cy {
        // wide case: the Gram matrix is already small
        return (mul(x, &x.adjoint()) - mul(y, &y.adjoint())).norm();
    }
    let mut a = CMat::zeros(x.nrows(), cx + cy);
    a.columns_mut(0, cx).copy_from(x);
    a.columns_mut(cx, cy).copy_from(y);
    let r = a.qr().r();
    let mut rs = r.clone();
    for j in cx..cx + cy {
        rs.column_mut(j).neg_mut();
    }
    (rs * r.adjoint()).norm()
}

fn gram_distance_real(x: &RMat, y: &RMat) -> f64 {
    let (cx, cy) = (x.ncols(), y.ncols());
    if x.nrows() < cx + cy {
        return (x * x.transpose() - y * y.transpose()).norm();
    }
    let mut a = RMat::zeros(x.nrows(), cx + cy);
    a.columns_mut(0, cx).copy_from(x);
    a.columns_mut(cx, cy).copy_from(y);
    let r = a.qr().r();
    let mut rs = r.clone();
    for j in cx..cx + cy {
        rs.column_mut(j).neg_mut();
    }
    (rs * r.transpose()).norm()
}

/// Complex product routed through real matrix products, which use a blocked kernel.
pub fn mul(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let a_real = ai.iter().all(|v| *v == 0.0);
    let b_real = bi.iter().all(|v| *v == 0.0);
    match (a_real, b_real) {
        (true, true) => to_complex(&(ar * br)),
        (true, false) => join(&ar * br, ar * bi),
        (false, true) => join(&ar * &br, ai * br),
        (false, false) => join(&ar * &br - &ai * &bi, ar * bi + ai * br),
    }
}

fn join(re: RMat, im: RMat) -> CMat {
    re.zip_map(&im, C64::new)
}

/// Singular values, using the real decomposition when `m` has no imaginary part.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    match to_real(m, 0.0) {
        Some(r) => r.singular_values().iter().copied().collect(),
        None => m.singular_values().iter().copied().collect(),
    }
}

/// `v v*` for a column vector.
pub fn projector(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Deterministic per-task RNG: stream `index` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / c(n)
}

/// Random full-rank density matrix `G G* / Tr(G G*)` with `G` Ginibre.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / c(z.norm()) } else { c(1.0) };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// Haar-random element of SU(2) from a uniform unit quaternion.
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    let mut x = [0.0f64; 4];
    loop {
        for v in x.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-300 {
            x.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let a = C64::new(x[0], x[1]);
    let b = C64::new(x[2], x[3]);
    CMat::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
}

/// Von Neumann entropy term `−λ ln λ` summed over a spectrum, nats.
pub fn entropy_of_spectrum(ev: &[f64]) -> f64 {
    ev.iter().filter(|&&l| l >= 1e-12).map(|&l| -l * l.ln()).sum()
}
