//! Complex linear algebra built on the system LAPACK.
//!
//! Everything here marshals row-major [`ndarray`] storage into the
//! column-major buffers LAPACK expects and back. Only the three routines the
//! toolkit needs are wrapped: Hermitian eigendecomposition (`zheev`), real
//! symmetric eigendecomposition (`dsyev`) and complex SVD (`zgesvd`).

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Result, TomoError};

/// Dense complex matrix, the carrier type for operators and states.
pub type CMatrix = Array2<Complex64>;

/// Dense complex vector.
pub type CVector = Array1<Complex64>;

#[allow(clippy::too_many_arguments)]
mod ffi {
    use num_complex::Complex64;
    use std::ffi::{c_char, c_int};

    unsafe extern "C" {
        pub fn zheev_(
            jobz: *const c_char,
            uplo: *const c_char,
            n: *const c_int,
            a: *mut Complex64,
            lda: *const c_int,
            w: *mut f64,
            work: *mut Complex64,
            lwork: *const c_int,
            rwork: *mut f64,
            info: *mut c_int,
        );
        pub fn dsyev_(
            jobz: *const c_char,
            uplo: *const c_char,
            n: *const c_int,
            a: *mut f64,
            lda: *const c_int,
            w: *mut f64,
            work: *mut f64,
            lwork: *const c_int,
            info: *mut c_int,
        );
        pub fn dsyrk_(
            uplo: *const c_char,
            trans: *const c_char,
            n: *const c_int,
            k: *const c_int,
            alpha: *const f64,
            a: *const f64,
            lda: *const c_int,
            beta: *const f64,
            c: *mut f64,
            ldc: *const c_int,
        );
        pub fn zgesvd_(
            jobu: *const c_char,
            jobvt: *const c_char,
            m: *const c_int,
            n: *const c_int,
            a: *mut Complex64,
            lda: *const c_int,
            s: *mut f64,
            u: *mut Complex64,
            ldu: *const c_int,
            vt: *mut Complex64,
            ldvt: *const c_int,
            work: *mut Complex64,
            lwork: *const c_int,
            rwork: *mut f64,
            info: *mut c_int,
        );
    }
}

fn lapack_err(routine: &'static str, info: i32) -> TomoError {
    TomoError::Numerical(format!("LAPACK {routine} failed with info = {info}"))
}

/// Column-major copy of a row-major matrix.
fn to_col_major(a: &CMatrix) -> Vec<Complex64> {
    let (m, n) = a.dim();
    let mut buf = vec![Complex64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            buf[j * m + i] = a[[i, j]];
        }
    }
    buf
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending.
///
/// Eigenvectors are returned as the *columns* of the second matrix.
pub fn eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    zheev_driver(a, b'V')
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>> {
    zheev_driver(a, b'N').map(|(w, _)| w)
}

fn zheev_driver(a: &CMatrix, jobz: u8) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(TomoError::dimension_mismatch("eigh", n, a.ncols()));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros((0, 0))));
    }
    let mut buf = to_col_major(a);
    let mut w = vec![0.0; n];
    let mut rwork = vec![0.0; 3 * n.max(1)];
    let ni = n as i32;
    let mut info = 0i32;
    // workspace query
    let mut wkopt = Complex64::new(0.0, 0.0);
    unsafe {
        ffi::zheev_(
            &(jobz as i8),
            &(b'L' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &(-1i32),
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("zheev", info));
    }
    let lwork = wkopt.re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        ffi::zheev_(
            &(jobz as i8),
            &(b'L' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("zheev", info));
    }
    let vecs = if jobz == b'V' {
        CMatrix::from_shape_fn((n, n), |(i, j)| buf[j * n + i])
    } else {
        CMatrix::zeros((0, 0))
    };
    Ok((w, vecs))
}

/// Eigenvalues and eigenvectors of a real symmetric matrix, ascending.
pub fn eigh_real(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    dsyev_driver(a, b'V')
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eigvalsh_real(a: &Array2<f64>) -> Result<Vec<f64>> {
    dsyev_driver(a, b'N').map(|(w, _)| w)
}

fn dsyev_driver(a: &Array2<f64>, jobz: u8) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(TomoError::dimension_mismatch("eigh_real", n, a.ncols()));
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    // symmetric, so the row-major buffer is also a valid column-major image
    let mut buf: Vec<f64> = a.iter().copied().collect();
    let mut w = vec![0.0; n];
    let ni = n as i32;
    let mut info = 0i32;
    let mut wkopt = 0.0f64;
    unsafe {
        ffi::dsyev_(
            &(jobz as i8),
            &(b'L' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            &mut wkopt,
            &(-1i32),
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("dsyev", info));
    }
    let lwork = wkopt as i32;
    let mut work = vec![0.0f64; lwork as usize];
    unsafe {
        ffi::dsyev_(
            &(jobz as i8),
            &(b'L' as i8),
            &ni,
            buf.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("dsyev", info));
    }
    let vecs = if jobz == b'V' {
        Array2::from_shape_fn((n, n), |(i, j)| buf[j * n + i])
    } else {
        Array2::zeros((0, 0))
    };
    Ok((w, vecs))
}

/// Thin SVD `A = U diag(s) V†` of a complex matrix.
///
/// Returns `(u, s, vdag)` with `u` of shape m×k, `vdag` k×n, k = min(m, n).
pub fn svd(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    zgesvd_driver(a, true)
        .map(|(u, s, vt)| (u.expect("jobu=S returns U"), s, vt.expect("jobvt=S returns VT")))
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    zgesvd_driver(a, false).map(|(_, s, _)| s)
}

type SvdOut = (Option<CMatrix>, Vec<f64>, Option<CMatrix>);

fn zgesvd_driver(a: &CMatrix, vectors: bool) -> Result<SvdOut> {
    let (m, n) = a.dim();
    let k = m.min(n);
    if k == 0 {
        return Ok((
            vectors.then(|| CMatrix::zeros((m, 0))),
            Vec::new(),
            vectors.then(|| CMatrix::zeros((0, n))),
        ));
    }
    let job = if vectors { b'S' } else { b'N' };
    let mut buf = to_col_major(a);
    let mut s = vec![0.0; k];
    let (mi, ni) = (m as i32, n as i32);
    let ldu = m.max(1) as i32;
    let ldvt = k.max(1) as i32;
    let mut u = vec![Complex64::new(0.0, 0.0); if vectors { m * k } else { 1 }];
    let mut vt = vec![Complex64::new(0.0, 0.0); if vectors { k * n } else { 1 }];
    let mut rwork = vec![0.0; 5 * k];
    let mut info = 0i32;
    let mut wkopt = Complex64::new(0.0, 0.0);
    unsafe {
        ffi::zgesvd_(
            &(job as i8),
            &(job as i8),
            &mi,
            &ni,
            buf.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &ldu,
            vt.as_mut_ptr(),
            &ldvt,
            &mut wkopt,
            &(-1i32),
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("zgesvd", info));
    }
    let lwork = wkopt.re as i32;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        ffi::zgesvd_(
            &(job as i8),
            &(job as i8),
            &mi,
            &ni,
            buf.as_mut_ptr(),
            &mi,
            s.as_mut_ptr(),
            u.as_mut_ptr(),
            &ldu,
            vt.as_mut_ptr(),
            &ldvt,
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(lapack_err("zgesvd", info));
    }
    if vectors {
        let um = CMatrix::from_shape_fn((m, k), |(i, j)| u[j * m + i]);
        let vtm = CMatrix::from_shape_fn((k, n), |(i, j)| vt[j * k + i]);
        Ok((Some(um), s, Some(vtm)))
    } else {
        Ok((None, s, None))
    }
}

/// Column Gram matrix AᵀA of a real row-major matrix, via BLAS `dsyrk`.
///
/// The row-major rows×cols buffer is handed to BLAS as its own transpose in
/// column-major layout, so no copy of `a` is made.
pub fn column_gram(a: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = a.dim();
    let buf = a.as_slice().expect("standard layout required");
    let mut c = vec![0.0f64; cols * cols];
    let (n, k) = (cols as i32, rows as i32);
    let (alpha, beta) = (1.0f64, 0.0f64);
    unsafe {
        // B := a viewed column-major has shape cols×rows and equals Aᵀ,
        // so syrk(N) computes B·Bᵀ = AᵀA.
        ffi::dsyrk_(
            &(b'L' as i8),
            &(b'N' as i8),
            &n,
            &k,
            &alpha,
            buf.as_ptr(),
            &n,
            &beta,
            c.as_mut_ptr(),
            &n,
        );
    }
    let mut out = Array2::zeros((cols, cols));
    for i in 0..cols {
        for j in 0..=i {
            // lower triangle of the column-major result: entry (i,j), i >= j,
            // lives at c[j*cols + i]
            let v = c[j * cols + i];
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    out
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖A − A†‖_F, the Hermiticity residual.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    fro_norm(&(a - &dagger(a)))
}

/// ‖A†A − I‖_F, zero when the columns of `a` are orthonormal.
pub fn isometry_residual(a: &CMatrix) -> f64 {
    let g = dagger(a).dot(a);
    let mut sq = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let d = if i == j {
                g[[i, j]] - Complex64::new(1.0, 0.0)
            } else {
                g[[i, j]]
            };
            sq += d.norm_sqr();
        }
    }
    sq.sqrt()
}

/// Trace of a square matrix.
pub fn trace(a: &CMatrix) -> Complex64 {
    a.diag().sum()
}

/// Hilbert–Schmidt inner product Tr(A†B).
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMatrix::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Identity matrix of order n.
pub fn identity(n: usize) -> CMatrix {
    CMatrix::eye(n)
}

/// Partial trace over the second tensor factor of an (sa·sb)×(sa·sb) matrix,
/// with indices ordered (a, b) → a·sb + b. Returns an sa×sa matrix.
pub fn partial_trace_second(m: &CMatrix, sa: usize, sb: usize) -> CMatrix {
    let mut out = CMatrix::zeros((sa, sa));
    for i in 0..sa {
        for j in 0..sa {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..sb {
                acc += m[[i * sb + b, j * sb + b]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Partial trace over the first tensor factor; returns an sb×sb matrix.
pub fn partial_trace_first(m: &CMatrix, sa: usize, sb: usize) -> CMatrix {
    let mut out = CMatrix::zeros((sb, sb));
    for i in 0..sb {
        for j in 0..sb {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..sa {
                acc += m[[a * sb + i, a * sb + j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Column-stacking vectorization: vec(E)[j·s + b] = E[b, j] for an s×s matrix.
pub fn vec_columns(e: &CMatrix) -> CVector {
    let (rows, cols) = e.dim();
    let mut v = CVector::zeros(rows * cols);
    for j in 0..cols {
        for b in 0..rows {
            v[j * rows + b] = e[[b, j]];
        }
    }
    v
}

/// Inverse of [`vec_columns`] for square matrices.
pub fn unvec_columns(v: &CVector, s: usize) -> CMatrix {
    let mut e = CMatrix::zeros((s, s));
    for j in 0..s {
        for b in 0..s {
            e[[b, j]] = v[j * s + b];
        }
    }
    e
}

/// Orthonormal basis of the complement of a set of orthonormal real columns,
/// built deterministically by Gram–Schmidt over the standard basis.
pub fn orthonormal_complement_real(q: &Array2<f64>) -> Array2<f64> {
    let (n, k) = q.dim();
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| q.column(j).to_vec()).collect();
    let mut comp: Vec<Vec<f64>> = Vec::with_capacity(n - k);
    for cand in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[cand] = 1.0;
        for _pass in 0..2 {
            for qcol in &cols {
                let overlap: f64 = qcol.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(qcol.iter()) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            comp.push(v.clone());
            cols.push(v);
        }
    }
    let mut out = Array2::zeros((n, comp.len()));
    for (j, c) in comp.iter().enumerate() {
        for i in 0..n {
            out[[i, j]] = c[i];
        }
    }
    out
}

/// Orthonormalize real vectors by Gram–Schmidt, dropping near-dependent ones.
pub fn orthonormalize_real(vectors: &[Vec<f64>]) -> Array2<f64> {
    let n = vectors.first().map(|v| v.len()).unwrap_or(0);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for vec in vectors {
        let mut v = vec.clone();
        for _pass in 0..2 {
            for qcol in &cols {
                let overlap: f64 = qcol.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(qcol.iter()) {
                    *vi -= overlap * qi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            cols.push(v);
        }
    }
    let mut out = Array2::zeros((n, cols.len()));
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            out[[i, j]] = c[i];
        }
    }
    out
}

/// Hermitian matrix function via eigendecomposition: f applied to eigenvalues.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    let (vals, vecs) = eigh(a)?;
    let n = a.nrows();
    let mut out = CMatrix::zeros((n, n));
    for (k, &lam) in vals.iter().enumerate() {
        let flam = f(lam);
        if flam == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] += Complex64::new(flam, 0.0) * col[i] * col[j].conj();
            }
        }
    }
    Ok(out)
}

/// PSD square root with negative eigenvalues clamped to zero.
pub fn psd_sqrt(a: &CMatrix) -> Result<CMatrix> {
    hermitian_map(a, |x| if x > 0.0 { x.sqrt() } else { 0.0 })
}

/// Extend a set of orthonormal columns to a full unitary basis.
///
/// The input columns are copied verbatim into the output; the complement is
/// built by Gram–Schmidt over the standard basis with one re-orthogonalization
/// pass, so the completion is deterministic.
pub fn complete_basis(isometry: &CMatrix) -> Result<CMatrix> {
    let (n, k) = isometry.dim();
    if k > n {
        return Err(TomoError::dimension_mismatch("complete_basis", n, k));
    }
    let res = isometry_residual(isometry);
    if res > 1e-7 {
        return Err(TomoError::NotIsometry { residual: res });
    }
    let mut cols: Vec<CVector> = (0..k).map(|j| isometry.column(j).to_owned()).collect();
    for cand in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVector::zeros(n);
        v[cand] = Complex64::new(1.0, 0.0);
        for _pass in 0..2 {
            for q in &cols {
                let overlap: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v = &v - &q.mapv(|x| x * overlap);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.mapv(|z| z / norm));
        }
    }
    if cols.len() != n {
        return Err(TomoError::Numerical(
            "basis completion did not reach full dimension".into(),
        ));
    }
    let mut out = CMatrix::zeros((n, n));
    for (j, c) in cols.iter().enumerate() {
        out.column_mut(j).assign(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn eigh_matches_known_pauli_x() {
        let x = array![
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        ];
        let (vals, vecs) = eigh(&x).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        // reconstruct
        let d = CMatrix::from_diag(&vals.iter().map(|&v| Complex64::new(v, 0.0)).collect::<CVector>());
        let back = vecs.dot(&d).dot(&dagger(&vecs));
        assert!(fro_norm(&(&back - &x)) < 1e-12);
    }

    #[test]
    fn svd_of_diagonal() {
        let a = array![
            [Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 2.0)]
        ];
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
        let (u, s, vt) = svd(&a).unwrap();
        let mid = CMatrix::from_diag(&s.iter().map(|&v| Complex64::new(v, 0.0)).collect::<CVector>());
        let back = u.dot(&mid).dot(&vt);
        assert!(fro_norm(&(&back - &a)) < 1e-12);
    }

    #[test]
    fn real_symmetric_eigenvalues() {
        let a = ndarray::array![[2.0, 1.0], [1.0, 2.0]];
        let vals = eigvalsh_real(&a).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn basis_completion_is_unitary_and_preserves_input() {
        let iso = array![
            [Complex64::new(1.0, 0.0)],
            [Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0)]
        ];
        let u = complete_basis(&iso).unwrap();
        assert!(isometry_residual(&u) < 1e-12);
        assert_eq!(u[[0, 0]], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn column_gram_matches_naive() {
        let a = Array2::from_shape_fn((5, 3), |(i, j)| (i * 3 + j) as f64 * 0.25 - 1.0);
        let g = column_gram(&a);
        let naive = a.t().dot(&a);
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[[i, j]] - naive[[i, j]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_traces_of_kron() {
        let a = array![[c(1.0, 0.0), c(0.5, 0.2)], [c(0.5, -0.2), c(2.0, 0.0)]];
        let b = array![[c(0.3, 0.0), c(0.0, 0.1)], [c(0.0, -0.1), c(0.7, 0.0)]];
        let k = kron(&a, &b);
        let ta = partial_trace_second(&k, 2, 2);
        let tb = partial_trace_first(&k, 2, 2);
        let tr_a = trace(&a);
        let tr_b = trace(&b);
        assert!(fro_norm(&(&ta - &a.mapv(|z| z * tr_b))) < 1e-14);
        assert!(fro_norm(&(&tb - &b.mapv(|z| z * tr_a))) < 1e-14);
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vec_columns_round_trip() {
        let a = array![[c(1.0, 2.0), c(3.0, 4.0)], [c(5.0, 6.0), c(7.0, 8.0)]];
        let v = vec_columns(&a);
        // column stacking: index j·s + b holds E[b, j]
        assert_eq!(v[0], a[[0, 0]]);
        assert_eq!(v[1], a[[1, 0]]);
        assert_eq!(v[2], a[[0, 1]]);
        let back = unvec_columns(&v, 2);
        assert!(fro_norm(&(&back - &a)) < 1e-15);
    }

    #[test]
    fn kron_shape_and_values() {
        let a = array![[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)]];
        let b = array![[Complex64::new(0.0, 1.0)], [Complex64::new(1.0, 0.0)]];
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (2, 2));
        assert_eq!(k[[0, 1]], Complex64::new(0.0, 2.0));
    }
}
