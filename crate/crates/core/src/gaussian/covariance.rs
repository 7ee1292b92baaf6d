use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{is_hermitian, is_symmetric_real, omega, principal_submatrix, CMatrix, RMatrix, C64};

pub const PURITY_TOL: f64 = 1e-6;
const VALIDITY_TOL: f64 = 1e-9;

/// Real quadrature covariance in interleaved `(x1, p1, …, xM, pM)` order, vacuum `𝟙/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadCovariance {
    pub v: RMatrix,
    /// Squeezing parameter of the sources this state was prepared from.
    pub r: f64,
    pub pure: bool,
}

/// Complex covariance `Σ_ij = ⟨{ξ_i, ξ_j†}⟩/2` over `ξ = (a_1…a_M, a_1†…a_M†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCovariance {
    pub sigma: CMatrix,
}

impl QuadCovariance {
    /// Validates symmetry and the uncertainty relation and sets the purity flag.
    pub fn new(v: RMatrix, r: f64) -> Result<Self> {
        if v.nrows() % 2 == 1 || !is_symmetric_real(&v, VALIDITY_TOL) {
            return Err(Error::Domain("covariance must be symmetric with even dimension".into()));
        }
        let modes = v.nrows() / 2;
        let w = omega(modes);
        let h = CMatrix::from_fn(2 * modes, 2 * modes, |i, j| C64::new(v[(i, j)], 0.5 * w[(i, j)]));
        let smallest = h.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if modes > 0 && smallest < -VALIDITY_TOL {
            return Err(Error::Domain(format!(
                "uncertainty relation violated: min eigenvalue of V + iΩ/2 is {smallest:.3e}"
            )));
        }
        let pure = is_pure(&v);
        Ok(QuadCovariance { v, r, pure })
    }

    pub fn modes(&self) -> usize {
        self.v.nrows() / 2
    }

    pub fn vacuum(modes: usize) -> Self {
        QuadCovariance { v: RMatrix::identity(2 * modes, 2 * modes) * 0.5, r: 0.0, pure: true }
    }

    /// `S V Sᵀ`.
    pub fn transform(&self, s: &RMatrix) -> QuadCovariance {
        let v = s * &self.v * s.transpose();
        let pure = is_pure(&v);
        QuadCovariance { v, r: self.r, pure }
    }

    /// Restriction to the given modes (quadrature pairs kept together).
    pub fn restrict(&self, modes: &[usize]) -> RMatrix {
        principal_submatrix(&self.v, &quad_indices(modes))
    }
}

/// `|det(2V) − 1| ≤ 1e-6`.
pub fn is_pure(v: &RMatrix) -> bool {
    ((v * 2.0).determinant() - 1.0).abs() <= PURITY_TOL
}

pub fn quad_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

/// Momentum-squeezed vacuum with squeezing `r` on every source mode.
pub fn input_covariance(layout: &LatticeSpec, r: f64) -> Result<QuadCovariance> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("squeezing r={r} must be finite and >= 0")));
    }
    let mut rs = vec![0.0; layout.modes];
    for &s in &layout.sources {
        rs[s] = r;
    }
    let mut v = input_covariance_per_mode(&rs);
    v.r = r;
    Ok(v)
}

/// `½ ⊕_j diag(e^{2 r_j}, e^{−2 r_j})`.
pub fn input_covariance_per_mode(rs: &[f64]) -> QuadCovariance {
    let diag: Vec<f64> = rs.iter().flat_map(|&r| [0.5 * (2.0 * r).exp(), 0.5 * (-2.0 * r).exp()]).collect();
    QuadCovariance {
        v: RMatrix::from_diagonal(&DVector::from_vec(diag)),
        r: rs.iter().cloned().fold(0.0, f64::max),
        pure: true,
    }
}

/// 4×4 real block of one gate acting on `(x_i, p_i, x_j, p_j)`.
fn gate_block(g: [[C64; 2]; 2]) -> [[f64; 4]; 4] {
    let mut b = [[0.0; 4]; 4];
    for (a, row) in g.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            b[2 * a][2 * c] = z.re;
            b[2 * a][2 * c + 1] = -z.im;
            b[2 * a + 1][2 * c] = z.im;
            b[2 * a + 1][2 * c + 1] = z.re;
        }
    }
    b
}

/// Phase-space action of the circuit: the ordered product of per-gate symplectic embeddings.
pub fn circuit_symplectic(circuit: &Circuit) -> Result<RMatrix> {
    circuit.validate()?;
    let n = 2 * circuit.modes();
    let mut s = RMatrix::identity(n, n);
    for g in circuit.gates() {
        let b = gate_block(g.matrix());
        let idx = [2 * g.modes.0, 2 * g.modes.0 + 1, 2 * g.modes.1, 2 * g.modes.1 + 1];
        for col in 0..n {
            let old: [f64; 4] = idx.map(|i| s[(i, col)]);
            for (a, &i) in idx.iter().enumerate() {
                s[(i, col)] = (0..4).map(|c| b[a][c] * old[c]).sum();
            }
        }
    }
    Ok(s)
}

/// Symplectic matrix of the passive transformation `a → U a`.
pub fn symplectic_from_unitary(u: &CMatrix) -> RMatrix {
    let m = u.nrows();
    RMatrix::from_fn(2 * m, 2 * m, |i, k| {
        let z = u[(i / 2, k / 2)];
        match (i % 2, k % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    })
}

/// Exact output covariance `S V_in Sᵀ` for squeezing `r` on every source.
pub fn output_covariance(circuit: &Circuit, r: f64) -> Result<QuadCovariance> {
    let v_in = input_covariance(&circuit.layout, r)?;
    Ok(v_in.transform(&circuit_symplectic(circuit)?))
}

/// Unitary `R` with `ξ = R (x1, p1, …)`: row `j` is `(x_j + i p_j)/√2`, row `M + j` is
/// `(x_j − i p_j)/√2`.
fn quad_to_mode_basis(m: usize) -> CMatrix {
    let mut r = CMatrix::zeros(2 * m, 2 * m);
    let h = FRAC_1_SQRT_2;
    for j in 0..m {
        r[(j, 2 * j)] = C64::new(h, 0.0);
        r[(j, 2 * j + 1)] = C64::new(0.0, h);
        r[(m + j, 2 * j)] = C64::new(h, 0.0);
        r[(m + j, 2 * j + 1)] = C64::new(0.0, -h);
    }
    r
}

pub fn quad_to_complex(v: &QuadCovariance) -> ComplexCovariance {
    quad_matrix_to_complex(&v.v)
}

pub fn quad_matrix_to_complex(v: &RMatrix) -> ComplexCovariance {
    let r = quad_to_mode_basis(v.nrows() / 2);
    let vc = v.map(|x| C64::new(x, 0.0));
    let sigma = &r * vc * r.adjoint();
    ComplexCovariance { sigma: (&sigma + sigma.adjoint()) * C64::new(0.5, 0.0) }
}

pub fn complex_to_quad(sigma: &ComplexCovariance) -> RMatrix {
    let r = quad_to_mode_basis(sigma.modes());
    let v = r.adjoint() * &sigma.sigma * r;
    let v = v.map(|z| z.re);
    (&v + v.transpose()) * 0.5
}

impl ComplexCovariance {
    pub fn new(sigma: CMatrix) -> Result<Self> {
        if sigma.nrows() % 2 == 1 || !is_hermitian(&sigma, VALIDITY_TOL) {
            return Err(Error::Domain("complex covariance must be Hermitian with even dimension".into()));
        }
        Ok(ComplexCovariance { sigma })
    }

    pub fn modes(&self) -> usize {
        self.sigma.nrows() / 2
    }

    pub fn vacuum(modes: usize) -> Self {
        ComplexCovariance { sigma: CMatrix::identity(2 * modes, 2 * modes) * C64::new(0.5, 0.0) }
    }

    /// Mean photon number of each mode, `Σ_jj − ½`.
    pub fn mean_photons(&self) -> Vec<f64> {
        (0..self.modes()).map(|j| self.sigma[(j, j)].re - 0.5).collect()
    }
}

/// Reduced state on an ordered subset of modes.
pub fn reduce(sigma: &ComplexCovariance, subset: &[usize]) -> Result<ComplexCovariance> {
    let m = sigma.modes();
    if subset.is_empty() {
        return Err(Error::InvalidParameter("empty mode subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= m) {
        return Err(Error::InvalidParameter(format!("mode {bad} outside {m} modes")));
    }
    let idx: Vec<usize> = subset.iter().copied().chain(subset.iter().map(|&j| j + m)).collect();
    Ok(ComplexCovariance { sigma: principal_submatrix(&sigma.sigma, &idx) })
}

/// Symplectic eigenvalues, ascending. For a valid state each is at least `½`.
pub fn symplectic_eigenvalues(v: &RMatrix) -> Vec<f64> {
    let n = v.nrows();
    if n == 0 {
        return Vec::new();
    }
    let eig = v.clone().symmetric_eigen();
    let sqrt = &eig.eigenvectors
        * RMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let w = omega(n / 2);
    let sc = sqrt.map(|x| C64::new(x, 0.0));
    let h = &sc * w.map(|x| C64::new(0.0, x)) * &sc;
    let mut nu: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().filter(|&&x| x > 0.0).cloned().collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nu.truncate(n / 2);
    if nu.len() < n / 2 {
        nu.resize(n / 2, 0.0);
    }
    nu
}
