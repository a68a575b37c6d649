//! Dense complex linear algebra for small composite Hilbert spaces.
//!
//! Everything here operates on explicit row-major `ComplexMatrix` storage.
//! Hermitian eigendecomposition is delegated to nalgebra; the matrix
//! exponential is always taken spectrally, which is exact to rounding at
//! the dimensions used here (composite dims stay below ~128).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (Hermiticity, unitarity, trace).
pub const TOL_ALGEBRA: f64 = 1e-12;
/// Tolerance for eigenvalue positivity of density matrices.
pub const TOL_POSITIVITY: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real matrix entered row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
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

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |A - A†|, zero for Hermitian matrices.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product, system-major ordering:
/// `(A⊗B)[(i·rB + k), (j·cB + l)] = A[i,j]·B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
    })
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data: Vec<C64>,
}

impl StateVector {
    /// Normalizes the amplitudes; fails on the zero vector.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParams("state vector has zero or non-finite norm".into()));
        }
        Ok(Self {
            data: amplitudes.iter().map(|z| z / norm).collect(),
        })
    }

    /// Raw amplitudes without normalization, for perturbative states that
    /// are deliberately unnormalized at a given order.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Self {
        Self { data: amplitudes }
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexError(format!("basis index {index} >= dim {dim}")));
        }
        let mut data = vec![C64::ZERO; dim];
        data[index] = C64::ONE;
        Ok(Self { data })
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// |ψ⟩⟨ψ|.
    pub fn outer(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.data[i] * self.data[j].conj())
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        assert_eq!(u.cols(), self.dim());
        let mut data = vec![C64::ZERO; u.rows()];
        for (i, out) in data.iter_mut().enumerate() {
            *out = (0..u.cols()).map(|j| u[(i, j)] * self.data[j]).sum();
        }
        Self { data }
    }
}

/// Density matrix; construction enforces Hermiticity, unit trace and
/// positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidMatrix("density matrix must be square".into()));
        }
        let herm = mat.hermiticity_error();
        if herm > TOL_ALGEBRA {
            return Err(Error::InvalidMatrix(format!(
                "density matrix not Hermitian: max |ρ-ρ†| = {herm:.3e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_ALGEBRA || tr.im.abs() > TOL_ALGEBRA {
            return Err(Error::InvalidMatrix(format!("density matrix trace {tr} != 1")));
        }
        let (eigs, _) = hermitian_eig_unchecked(&mat);
        if eigs[0] < -TOL_POSITIVITY {
            return Err(Error::InvalidMatrix(format!(
                "density matrix not positive: min eigenvalue {:.3e}",
                eigs[0]
            )));
        }
        Ok(Self { mat })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > TOL_ALGEBRA {
            return Err(Error::InvalidParams(format!("pure state norm {n} != 1")));
        }
        Ok(Self { mat: psi.outer() })
    }

    /// |index⟩⟨index| on a dim-dimensional space.
    pub fn basis_projector(dim: usize, index: usize) -> Result<Self> {
        Self::from_pure(&StateVector::basis(dim, index)?)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        Ok(Self {
            mat: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eig_unchecked(&self.mat).0[0]
    }
}

/// Eigendecomposition without the Hermiticity precondition check; the
/// caller guarantees it (nalgebra only reads the lower triangle anyway).
fn hermitian_eig_unchecked(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let dim = h.rows();
    if dim == 1 {
        return (vec![h[(0, 0)].re], ComplexMatrix::identity(1));
    }
    let eig = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Hermitian eigendecomposition with eigenvalues in ascending order and
/// eigenvectors as the columns of a unitary matrix.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let herm = h.hermiticity_error();
    if herm > TOL_ALGEBRA {
        return Err(Error::InvalidMatrix(format!(
            "matrix not Hermitian: max |H-H†| = {herm:.3e}"
        )));
    }
    Ok(hermitian_eig_unchecked(h))
}

/// Cached spectral decomposition of a Hermitian generator, used to build
/// exact propagators at arbitrary times.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    eigenvalues: Vec<f64>,
    vectors: ComplexMatrix,
}

impl SpectralDecomp {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        let (eigenvalues, vectors) = hermitian_eig(h)?;
        Ok(Self { eigenvalues, vectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// U(t) = V e^{-iλt} V† (ħ = 1).
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.vectors;
        // scaled = V · diag(e^{-iλt})
        let phases: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        let scaled = ComplexMatrix::from_fn(d, d, |i, k| v[(i, k)] * phases[k]);
        &scaled * &v.adjoint()
    }
}

/// Spectral form of exp(-iHt).
pub fn unitary_from_hamiltonian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParams(format!("time {t} is not finite")));
    }
    Ok(SpectralDecomp::new(h)?.propagator(t))
}

/// Trace over the apparatus factor of a system-major composite state
/// (index = n·apparatus_dim + j).
pub fn partial_trace_apparatus(
    rho: &DensityMatrix,
    system_dim: usize,
    apparatus_dim: usize,
) -> Result<DensityMatrix> {
    let reduced = partial_trace_raw(rho.matrix(), system_dim, apparatus_dim)?;
    DensityMatrix::new(reduced)
}

pub(crate) fn partial_trace_raw(
    rho: &ComplexMatrix,
    system_dim: usize,
    apparatus_dim: usize,
) -> Result<ComplexMatrix> {
    let d = system_dim * apparatus_dim;
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::DimensionError(format!(
            "composite dim {} does not factor as {}·{}",
            rho.rows(),
            system_dim,
            apparatus_dim
        )));
    }
    Ok(ComplexMatrix::from_fn(system_dim, system_dim, |m, n| {
        (0..apparatus_dim)
            .map(|j| rho[(m * apparatus_dim + j, n * apparatus_dim + j)])
            .sum()
    }))
}

/// T(ρ,σ) = ½ Σ |eigenvalues(ρ−σ)|.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionError(format!(
            "trace distance between dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix() - sigma.matrix();
    let (eigs, _) = hermitian_eig_unchecked(&diff);
    Ok(0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn pauli_x_spectrum() {
        let (eigs, v) = hermitian_eig(&sigma_x()).unwrap();
        assert!((eigs[0] + 1.0).abs() < 1e-14);
        assert!((eigs[1] - 1.0).abs() < 1e-14);
        let unit = &v.adjoint() * &v;
        assert!(unit.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let (eigs, v) = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(eigs.iter().all(|l| l.abs() < 1e-14));
        let unit = &v.adjoint() * &v;
        assert!(unit.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn minimal_model_spectrum_g4() {
        // L=2 chain + two-state apparatus at g=4, δ=1/2, γ=1, ε=0
        let chain = crate::model::ChainParams::new(2, 0.0, 1.0).unwrap();
        let app = crate::model::ApparatusParams::new(4.0, 0.5, 2).unwrap();
        let model = crate::model::CompositeModel::new(chain, app).unwrap();
        let (eigs, _) = hermitian_eig(&model.h_total).unwrap();
        let expect = {
            let mut e = vec![-1.0, 1.0, 2.0 - 5.0_f64.sqrt(), 2.0 + 5.0_f64.sqrt()];
            e.sort_by(f64::total_cmp);
            e
        };
        for (a, b) in eigs.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::InvalidMatrix(_))));
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&m), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn propagator_basics() {
        // H = 0 → identity at any t
        let u = unitary_from_hamiltonian(&ComplexMatrix::zeros(3, 3), 2.7).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);

        // H = σ_z, t = π → diag(e^{-iπ}, e^{iπ}) = -I
        let sz = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let u = unitary_from_hamiltonian(&sz, std::f64::consts::PI).unwrap();
        let minus_i2 = ComplexMatrix::identity(2).scale(C64::new(-1.0, 0.0));
        assert!(u.max_abs_diff(&minus_i2) < 1e-13);
    }

    #[test]
    fn two_site_rabi_half_period() {
        // chain L=2 hops |0⟩ to |1⟩ (up to phase) at t = π/2
        let h = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let u = unitary_from_hamiltonian(&h, std::f64::consts::FRAC_PI_2).unwrap();
        let psi = StateVector::basis(2, 0).unwrap().evolve(&u);
        assert!(psi.amplitudes()[0].norm() < 1e-13);
        assert!((psi.amplitudes()[1].norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn group_law() {
        let h = ComplexMatrix::from_fn(3, 3, |i, j| {
            C64::new((i + j) as f64, if i < j { 0.3 } else if i > j { -0.3 } else { 0.0 })
        });
        let dec = SpectralDecomp::new(&h).unwrap();
        let u12 = &dec.propagator(0.7) * &dec.propagator(1.6);
        assert!(u12.max_abs_diff(&dec.propagator(2.3)) < 1e-12);
        assert!(dec.propagator(0.0).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(kron(&i2, &i2).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);

        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let k = kron(&d, &i2);
        let expect =
            ComplexMatrix::from_real_rows(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 2., 0.], &[0., 0., 0., 2.]]);
        assert!(k.max_abs_diff(&expect) < 1e-15);

        // |0⟩⟨0| ⊗ (δI − ½σ_x) at δ=0: only the top-left 2x2 block is −½σ_x
        let p0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = crate::model::build_apparatus_operator_2(0.0);
        let k = kron(&p0, &b);
        let expect = ComplexMatrix::from_real_rows(&[
            &[0.0, -0.5, 0.0, 0.0],
            &[-0.5, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        assert!(k.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_examples() {
        // product state
        let sys = DensityMatrix::basis_projector(2, 0).unwrap();
        let app = DensityMatrix::basis_projector(2, 0).unwrap();
        let prod = DensityMatrix::new(kron(sys.matrix(), app.matrix())).unwrap();
        let red = partial_trace_apparatus(&prod, 2, 2).unwrap();
        assert!(red.matrix().max_abs_diff(sys.matrix()) < 1e-15);

        // Bell state traces to I/2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![
            C64::new(s, 0.0),
            C64::ZERO,
            C64::ZERO,
            C64::new(s, 0.0),
        ])
        .unwrap();
        let red = partial_trace_apparatus(&DensityMatrix::from_pure(&bell).unwrap(), 2, 2).unwrap();
        assert!(red.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_error() {
        let rho = DensityMatrix::maximally_mixed(6).unwrap();
        assert!(matches!(
            partial_trace_apparatus(&rho, 2, 2),
            Err(Error::DimensionError(_))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let p0 = DensityMatrix::basis_projector(2, 0).unwrap();
        let p1 = DensityMatrix::basis_projector(2, 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(trace_distance(&p0, &p0).unwrap() < 1e-15);
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-14);
        assert!((trace_distance(&mixed, &p0).unwrap() - 0.5).abs() < 1e-14);
        assert!(matches!(
            trace_distance(&p0, &DensityMatrix::maximally_mixed(3).unwrap()),
            Err(Error::DimensionError(_))
        ));
    }

    #[test]
    fn reconstruction_at_dim_64() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 7, 16, 64] {
            let mut h = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in i..dim {
                    let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    if i == j {
                        h[(i, i)] = C64::new(z.re, 0.0);
                    } else {
                        h[(i, j)] = z;
                        h[(j, i)] = z.conj();
                    }
                }
            }
            let (eigs, v) = hermitian_eig(&h).unwrap();
            let lam = ComplexMatrix::from_fn(dim, dim, |i, j| {
                if i == j { C64::new(eigs[i], 0.0) } else { C64::ZERO }
            });
            let recon = &(&v * &lam) * &v.adjoint();
            assert!(recon.max_abs_diff(&h) < 1e-11, "dim {dim}");
            assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn hermitian_strategy(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
            proptest::collection::vec(-1.0..1.0f64, dim * dim * 2).prop_map(move |v| {
                let mut h = ComplexMatrix::zeros(dim, dim);
                let mut it = v.into_iter();
                for i in 0..dim {
                    for j in i..dim {
                        let re = it.next().unwrap();
                        let im = it.next().unwrap();
                        if i == j {
                            h[(i, i)] = C64::new(re, 0.0);
                        } else {
                            h[(i, j)] = C64::new(re, im);
                            h[(j, i)] = C64::new(re, -im);
                        }
                    }
                }
                h
            })
        }

        fn density_strategy(dim: usize) -> impl Strategy<Value = DensityMatrix> {
            proptest::collection::vec(-1.0..1.0f64, dim * dim * 2).prop_map(move |v| {
                let mut m = ComplexMatrix::zeros(dim, dim);
                let mut it = v.into_iter();
                for i in 0..dim {
                    for j in 0..dim {
                        m[(i, j)] = C64::new(it.next().unwrap(), it.next().unwrap());
                    }
                }
                let mut rho = &m * &m.adjoint();
                // regularize so the trace cannot vanish
                for i in 0..dim {
                    rho[(i, i)] += C64::new(1e-3, 0.0);
                }
                let tr = rho.trace().re;
                DensityMatrix::new(rho.scale(C64::new(1.0 / tr, 0.0))).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn propagators_are_unitary(h in hermitian_strategy(4), t in -10.0..10.0f64) {
                let u = unitary_from_hamiltonian(&h, t).unwrap();
                let unit = &u.adjoint() * &u;
                prop_assert!(unit.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
            }

            #[test]
            fn evolution_preserves_density_invariants(
                h in hermitian_strategy(4),
                rho in density_strategy(4),
                t in -5.0..5.0f64,
            ) {
                let u = unitary_from_hamiltonian(&h, t).unwrap();
                let evolved = &(&u * rho.matrix()) * &u.adjoint();
                prop_assert!(DensityMatrix::new(evolved).is_ok());
            }

            #[test]
            fn partial_trace_of_product(
                a in hermitian_strategy(3),
                b in hermitian_strategy(2),
            ) {
                let red = partial_trace_raw(&kron(&a, &b), 3, 2).unwrap();
                let expect = a.scale(b.trace());
                prop_assert!(red.max_abs_diff(&expect) < 1e-12);
            }

            #[test]
            fn trace_distance_triangle(
                a in density_strategy(3),
                b in density_strategy(3),
                c in density_strategy(3),
            ) {
                let tab = trace_distance(&a, &b).unwrap();
                let tbc = trace_distance(&b, &c).unwrap();
                let tac = trace_distance(&a, &c).unwrap();
                prop_assert!(tac <= tab + tbc + 1e-10);
                prop_assert!((tab - trace_distance(&b, &a).unwrap()).abs() < 1e-14);
            }
        }
    }
}
