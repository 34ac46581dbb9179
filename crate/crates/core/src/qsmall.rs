//! Small dense density matrices and Kraus channels.
//!
//! Enough to run the entanglement test against a channel: send half of a maximally
//! entangled pair through it, keep the other half, and project back onto the pair.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_DIM: usize = 8;
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a density matrix: {0}")]
    NotState(String),
    #[error("Kraus operators are not trace preserving (deviation {0:e})")]
    Incomplete(f64),
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self, QError> {
        let d = m.nrows();
        if d == 0 || d != m.ncols() || d > MAX_DIM * MAX_DIM {
            return Err(QError::Dimension(format!("{}x{}", m.nrows(), m.ncols())));
        }
        if (&m - m.adjoint()).iter().any(|z| z.norm() > 1e-12) {
            return Err(QError::NotState("not Hermitian".into()));
        }
        if (m.trace() - c(1.0)).norm() > 1e-12 {
            return Err(QError::NotState(format!("trace {}", m.trace())));
        }
        let eig = m.clone().symmetric_eigenvalues();
        if eig.iter().any(|&e| e < -1e-10) {
            return Err(QError::NotState("negative eigenvalue".into()));
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|` for a normalised `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self, QError> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let n = v.norm();
        if n < 1e-12 {
            return Err(QError::NotState("zero vector".into()));
        }
        let v = v / c(n);
        Self::new(&v * v.adjoint())
    }

    pub fn basis(d: usize, i: usize) -> Result<Self, QError> {
        if i >= d {
            return Err(QError::Dimension(format!("basis index {i} in dimension {d}")));
        }
        let mut psi = vec![c(0.0); d];
        psi[i] = c(1.0);
        Self::pure(&psi)
    }

    pub fn maximally_mixed(d: usize) -> Result<Self, QError> {
        Self::new(CMatrix::identity(d, d) / c(d as f64))
    }

    /// `Σ_i |ii⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Result<Self, QError> {
        Self::pure(&max_entangled_vector(d))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

fn max_entangled_vector(d: usize) -> Vec<Complex64> {
    let mut psi = vec![c(0.0); d * d];
    for i in 0..d {
        psi[i * d + i] = c(1.0 / (d as f64).sqrt());
    }
    psi
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix, QError> {
    if a.dim() * b.dim() > MAX_DIM * MAX_DIM {
        return Err(QError::Dimension("tensor product too large".into()));
    }
    Ok(DensityMatrix { m: a.m.kronecker(&b.m) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Traces out `which` of a bipartite state with factor dimensions `(d1, d2)`.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: (usize, usize),
    which: Subsystem,
) -> Result<DensityMatrix, QError> {
    let (d1, d2) = dims;
    if d1 * d2 != rho.dim() {
        return Err(QError::Dimension(format!("{d1}x{d2} does not split {}", rho.dim())));
    }
    let keep = if which == Subsystem::First { d2 } else { d1 };
    let mut out = CMatrix::zeros(keep, keep);
    for i in 0..keep {
        for j in 0..keep {
            let mut acc = c(0.0);
            match which {
                Subsystem::First => (0..d1).for_each(|k| acc += rho.m[(k * d2 + i, k * d2 + j)]),
                Subsystem::Second => (0..d2).for_each(|k| acc += rho.m[(i * d2 + k, j * d2 + k)]),
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix { m: out })
}

#[derive(Clone, Debug)]
pub struct QuantumChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(d_in: usize, d_out: usize, kraus: Vec<CMatrix>) -> Result<Self, QError> {
        if d_in == 0 || d_out == 0 || d_in > MAX_DIM || d_out > MAX_DIM || kraus.is_empty() {
            return Err(QError::Dimension(format!("channel {d_in} -> {d_out}")));
        }
        let mut sum = CMatrix::zeros(d_in, d_in);
        for k in &kraus {
            if k.nrows() != d_out || k.ncols() != d_in {
                return Err(QError::Dimension(format!("Kraus operator {}x{}", k.nrows(), k.ncols())));
            }
            sum += k.adjoint() * k;
        }
        let dev = (sum - CMatrix::identity(d_in, d_in)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-12 {
            return Err(QError::Incomplete(dev));
        }
        Ok(Self { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Result<Self, QError> {
        Self::new(d, d, vec![CMatrix::identity(d, d)])
    }

    /// Discards the input and prepares `tau`: Kraus operators `√λ_j |ψ_j⟩⟨i|`.
    pub fn replace(d_in: usize, tau: &DensityMatrix) -> Result<Self, QError> {
        let eig = tau.m.clone().symmetric_eigen();
        let d_out = tau.dim();
        let mut kraus = Vec::new();
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= 1e-15 {
                continue;
            }
            let psi = eig.eigenvectors.column(j);
            for i in 0..d_in {
                let mut k = CMatrix::zeros(d_out, d_in);
                for r in 0..d_out {
                    k[(r, i)] = psi[r] * c(lambda.sqrt());
                }
                kraus.push(k);
            }
        }
        Self::new(d_in, d_out, kraus)
    }

    /// Replaces the input by the maximally mixed state.
    pub fn depolarizing(d: usize) -> Result<Self, QError> {
        Self::replace(d, &DensityMatrix::maximally_mixed(d)?)
    }

    /// `q · self + (1 - q) · other`, by scaling and concatenating Kraus operators.
    pub fn mixture(&self, q: f64, other: &QuantumChannel) -> Result<Self, QError> {
        if self.d_in != other.d_in || self.d_out != other.d_out || !(0.0..=1.0).contains(&q) {
            return Err(QError::Dimension("mixture of unlike channels".into()));
        }
        let mut kraus: Vec<CMatrix> = self.kraus.iter().map(|k| k * c(q.sqrt())).collect();
        kraus.extend(other.kraus.iter().map(|k| k * c((1.0 - q).sqrt())));
        Self::new(self.d_in, self.d_out, kraus)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, QError> {
        if rho.dim() != self.d_in {
            return Err(QError::Dimension(format!("state of dimension {} into channel on {}", rho.dim(), self.d_in)));
        }
        let m = self.kraus.iter().fold(CMatrix::zeros(self.d_out, self.d_out), |acc, k| acc + k * &rho.m * k.adjoint());
        Ok(DensityMatrix { m })
    }

    /// `(N ⊗ id)` on a bipartite state whose first factor has the channel's input dimension.
    pub fn apply_first(&self, rho: &DensityMatrix, d2: usize) -> Result<DensityMatrix, QError> {
        if rho.dim() != self.d_in * d2 {
            return Err(QError::Dimension("bipartite state does not match channel".into()));
        }
        let id = CMatrix::identity(d2, d2);
        let m = self.kraus.iter().fold(CMatrix::zeros(self.d_out * d2, self.d_out * d2), |acc, k| {
            let kk = k.kronecker(&id);
            acc + &kk * &rho.m * kk.adjoint()
        });
        Ok(DensityMatrix { m })
    }

    /// `(N ⊗ id)(|Φ⟩⟨Φ|)`.
    pub fn choi(&self) -> Result<DensityMatrix, QError> {
        self.apply_first(&DensityMatrix::maximally_entangled(self.d_in)?, self.d_in)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_in, self.d_out)
    }
}

/// Probability that the maximally entangled projector accepts after one half of the
/// pair went through `channel`.
pub fn epr_test_success(channel: &QuantumChannel) -> Result<f64, QError> {
    let (d_in, d_out) = channel.dims();
    if d_in != d_out {
        return Err(QError::Dimension(format!("channel {d_in} -> {d_out} is not square")));
    }
    let choi = channel.choi()?;
    let phi = nalgebra::DVector::from_vec(max_entangled_vector(d_in));
    Ok((phi.adjoint() * choi.matrix() * &phi)[(0, 0)].re)
}

#[derive(Clone, Debug, Serialize)]
pub struct EprReport {
    pub dim: usize,
    pub accept_identity: f64,
    pub accept_replace: f64,
    /// `|P(accept | identity) - P(accept | replace)|`.
    pub advantage: f64,
    /// Probability of naming the right channel under a uniform prior, guessing
    /// identity on acceptance.
    pub success: f64,
}

/// The entanglement test against identity versus replacement by `tau`.
pub fn epr_distinguisher(dim: usize, tau: &DensityMatrix) -> Result<EprReport, QError> {
    let accept_identity = epr_test_success(&QuantumChannel::identity(dim)?)?;
    let accept_replace = epr_test_success(&QuantumChannel::replace(dim, tau)?)?;
    Ok(EprReport {
        dim,
        accept_identity,
        accept_replace,
        advantage: (accept_identity - accept_replace).abs(),
        success: 0.5 * accept_identity + 0.5 * (1.0 - accept_replace),
    })
}
