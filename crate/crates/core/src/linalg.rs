//! Complex linear algebra for single-qubit operators and two-qubit states.
//!
//! Everything here is fixed-size: 2x2 operators, length-2 and length-4 state
//! vectors, and 4x4 density matrices for the joint Alice-Bob pair. Two-qubit
//! amplitudes are ordered |00>, |01>, |10>, |11> with the first slot holding
//! Alice's kept qubit and the second slot the transmitted qubit, so
//! `tensor(identity, m)` acts on the qubit that crosses the channel.

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    e: [[C64; 2]; 2],
}

impl Matrix2 {
    pub fn new(e: [[C64; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn from_real(e: [[f64; 2]; 2]) -> Self {
        Self {
            e: [[re(e[0][0]), re(e[0][1])], [re(e[1][0]), re(e[1][1])]],
        }
    }

    pub fn zero() -> Self {
        Self { e: [[ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        Self {
            e: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.e[row][col]
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                out.e[i][j] = acc;
            }
        }
        out
    }

    pub fn neg(&self) -> Matrix2 {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix2) -> Matrix2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += other.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Matrix2 {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix2 {
        let mut out = Matrix2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[j][i].conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &Ket2) -> Ket2 {
        Ket2::new([
            self.e[0][0] * v.a[0] + self.e[0][1] * v.a[1],
            self.e[1][0] * v.a[0] + self.e[1][1] * v.a[1],
        ])
    }

    pub fn column(&self, j: usize) -> Ket2 {
        Ket2::new([self.e[0][j], self.e[1][j]])
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// M†M = I within `tol` on every entry.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.adjoint().mul(self);
        gram.max_abs_diff(&Matrix2::identity()) <= tol
    }

    /// Every column has norm 1 within `tol`.
    pub fn has_unit_columns(&self, tol: f64) -> bool {
        (0..2).all(|j| (self.column(j).norm() - 1.0).abs() <= tol)
    }

    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        worst
    }
}

/// 4x4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4 {
    e: [[C64; 4]; 4],
}

impl Matrix4 {
    pub fn new(e: [[C64; 4]; 4]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self { e: [[ZERO; 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.e[i][i] = ONE;
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.e[row][col]
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.e[i][i]).sum()
    }

    pub fn mul(&self, rhs: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                out.e[i][j] = acc;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix4 {
        let mut out = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] = self.e[j][i].conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &Ket4) -> Ket4 {
        let mut a = [ZERO; 4];
        for (i, slot) in a.iter_mut().enumerate() {
            *slot = (0..4).map(|k| self.e[i][k] * v.a[k]).sum();
        }
        Ket4::new(a)
    }

    pub fn add(&self, other: &Matrix4) -> Matrix4 {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.e[i][j] += other.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, factor: f64) -> Matrix4 {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for z in row.iter_mut() {
                *z *= factor;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.e
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest |m_ij - conj(m_ji)| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in i..4 {
                worst = worst.max((self.e[i][j] - self.e[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.e[i][j] - other.e[i][j]).norm());
            }
        }
        worst
    }
}

/// Single-qubit state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2 {
    a: [C64; 2],
}

impl Ket2 {
    pub fn new(a: [C64; 2]) -> Self {
        Self { a }
    }

    pub fn from_real(a0: f64, a1: f64) -> Self {
        Self {
            a: [re(a0), re(a1)],
        }
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.a[i]
    }

    /// <self|other>.
    pub fn inner(&self, other: &Ket2) -> C64 {
        self.a[0].conj() * other.a[0] + self.a[1].conj() * other.a[1]
    }

    pub fn norm(&self) -> f64 {
        (self.a[0].norm_sqr() + self.a[1].norm_sqr()).sqrt()
    }

    pub fn assert_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "ket norm {n} deviates from 1 by more than {tol:e}"
            )));
        }
        Ok(())
    }
}

/// Two-qubit state vector, amplitudes ordered |00>, |01>, |10>, |11>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket4 {
    a: [C64; 4],
}

impl Ket4 {
    pub fn new(a: [C64; 4]) -> Self {
        Self { a }
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.a[i]
    }

    /// <self|other>.
    pub fn inner(&self, other: &Ket4) -> C64 {
        (0..4).map(|i| self.a[i].conj() * other.a[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rank-1 projector |self><self|.
    pub fn outer(&self) -> Matrix4 {
        let mut m = Matrix4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = self.a[i] * self.a[j].conj();
            }
        }
        m
    }

    pub fn assert_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!(
                "ket norm {n} deviates from 1 by more than {tol:e}"
            )));
        }
        Ok(())
    }
}

/// The fixed single-qubit operator zoo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardOp {
    Identity,
    PauliX,
    PauliZ,
    Hadamard,
}

pub fn standard_operator(op: StandardOp) -> Matrix2 {
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
    match op {
        StandardOp::Identity => Matrix2::identity(),
        StandardOp::PauliX => Matrix2::from_real([[0.0, 1.0], [1.0, 0.0]]),
        StandardOp::PauliZ => Matrix2::from_real([[1.0, 0.0], [0.0, -1.0]]),
        StandardOp::Hadamard => Matrix2::from_real([[H, H], [H, -H]]),
    }
}

/// Kronecker product a (x) b with the block convention matching the
/// |00>, |01>, |10>, |11> amplitude ordering.
pub fn tensor(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut out = Matrix4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.e[2 * i + k][2 * j + l] = a.e[i][j] * b.e[k][l];
                }
            }
        }
    }
    out
}

/// The Bell state |phi_k>, k in 1..=4.
///
/// phi_1 = (|00>+|11>)/sqrt2, phi_2 = (|01>+|10>)/sqrt2,
/// phi_3 = (|00>-|11>)/sqrt2, phi_4 = (|01>-|10>)/sqrt2.
pub fn bell_state(k: usize) -> Result<Ket4> {
    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let a = match k {
        1 => [re(R), ZERO, ZERO, re(R)],
        2 => [ZERO, re(R), re(R), ZERO],
        3 => [re(R), ZERO, ZERO, re(-R)],
        4 => [ZERO, re(R), re(-R), ZERO],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "bell state index {k} not in 1..=4"
            )))
        }
    };
    Ok(Ket4::new(a))
}

/// Validated Hermitian 4x4 operator for the joint Alice-Bob pair.
#[derive(Debug, Clone, Copy)]
pub struct DensityMatrix4 {
    m: Matrix4,
}

impl DensityMatrix4 {
    pub const HERMITICITY_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const EIGENVALUE_TOL: f64 = 1e-10;

    pub fn new(m: Matrix4) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState(
                "density matrix has non-finite entries".into(),
            ));
        }
        let herm = m.hermiticity_error();
        if herm > Self::HERMITICITY_TOL {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.m
    }

    /// Real trace; the imaginary part of a Hermitian diagonal is zero.
    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues in ascending order, via a Jacobi sweep on the real
    /// symmetric embedding [[Re, -Im], [Im, Re]]. Validation path only.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut s = [[0.0f64; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                let z = self.m.e[i][j];
                s[i][j] = z.re;
                s[i + 4][j + 4] = z.re;
                s[i][j + 4] = -z.im;
                s[i + 4][j] = z.im;
            }
        }
        let eigs = jacobi_symmetric_eigenvalues(&mut s);
        // each eigenvalue of the 4x4 Hermitian matrix appears twice
        [eigs[0], eigs[2], eigs[4], eigs[6]]
    }

    /// Checks the physical-state invariants: unit trace and positive
    /// semidefiniteness within the module tolerances.
    pub fn validate_state(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} deviates from 1 beyond {:e}",
                Self::TRACE_TOL
            )));
        }
        let min_eig = self.eigenvalues()[0];
        if min_eig < -Self::EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e} below -{:e}",
                Self::EIGENVALUE_TOL
            )));
        }
        Ok(())
    }
}

/// <phi_k| rho |phi_k>, clamped to [0, 1] after checking the imaginary
/// part is numerical dust.
pub fn bell_projection(rho: &DensityMatrix4, k: usize) -> Result<f64> {
    const IMAG_TOL: f64 = 1e-9;
    let phi = bell_state(k)?;
    let q = phi.inner(&rho.matrix().apply(&phi));
    if q.im.abs() > IMAG_TOL {
        return Err(Error::NumericalConsistency {
            context: "bell projection",
            imag: q.im,
            tol: IMAG_TOL,
        });
    }
    Ok(q.re.clamp(0.0, 1.0))
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
/// Returns eigenvalues sorted ascending.
#[allow(clippy::needless_range_loop)]
fn jacobi_symmetric_eigenvalues<const N: usize>(s: &mut [[f64; N]; N]) -> [f64; N] {
    let scale: f64 = s
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let stop = 1e-30 * scale * scale;
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..N {
            for j in (i + 1)..N {
                off += s[i][j] * s[i][j];
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = s[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..N {
                    let skp = s[k][p];
                    let skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..N {
                    let spk = s[p][k];
                    let sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    let mut eigs = [0.0; N];
    for i in 0..N {
        eigs[i] = s[i][i];
    }
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}
