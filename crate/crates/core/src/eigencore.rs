//! Dense and banded symmetric linear algebra: cyclic Jacobi eigensolver,
//! banded Cholesky, and the Schur complement onto boundary unknowns that
//! turns a partitioned energy into a discrete Dirichlet-to-Neumann matrix.

use crate::{par, Error, Result};

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_RTOL: f64 = 1e-14;

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Checks symmetry to `1e-12` relative to the largest entry and stores
    /// the symmetrized matrix.
    pub fn new(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::Domain(format!(
                "{} entries given for a matrix of order {order}",
                data.len()
            )));
        }
        let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut m = Self { order, data };
        for i in 0..order {
            for j in 0..i {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
                let avg = 0.5 * (a + b);
                m.set(i, j, avg);
            }
        }
        Ok(m)
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_diagonal(&vec![1.0; order])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] = v;
        self.data[j * self.order + i] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.order + j] += v;
        if i != j {
            self.data[j * self.order + i] += v;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.order.max(1))
            .take(self.order)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// All eigenpairs of a symmetric matrix, ascending, with orthonormal vectors.
pub fn sym_eig(m: &SymMatrix) -> Result<Vec<EigenPair>> {
    let n = m.order;
    let mut a = m.data.clone();
    let mut v = SymMatrix::identity(n).data;
    let norm = m.frobenius_norm();

    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += 2.0 * a[p * n + q] * a[p * n + q];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= JACOBI_OFF_RTOL * norm {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let g = 100.0 * apq.abs();
                if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq == 0.0 {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- A P
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // A <- Pᵀ A
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| EigenPair {
            value: a[j * n + j],
            vector: (0..n).map(|i| v[i * n + j]).collect(),
        })
        .collect();
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(m: &SymMatrix) -> Result<Vec<f64>> {
    Ok(sym_eig(m)?.into_iter().map(|p| p.value).collect())
}

/// Symmetric band matrix; only the lower band `0 <= i - j <= bandwidth` is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    order: usize,
    bandwidth: usize,
    // row i holds columns i-bandwidth ..= i, diagonal last
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(order: usize, bandwidth: usize) -> Self {
        Self {
            order,
            bandwidth,
            data: vec![0.0; order * (bandwidth + 1)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "({i}, {j}) outside band {}", self.bandwidth);
        i * (self.bandwidth + 1) + self.bandwidth - (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        if d > self.bandwidth {
            0.0
        } else {
            self.data[self.index(i, j)]
        }
    }

    /// Adds `v` to `(i, j)` (and hence `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.data[idx] += v;
    }

    pub fn to_dense(&self) -> SymMatrix {
        let mut m = SymMatrix::zeros(self.order);
        for i in 0..self.order {
            for j in i.saturating_sub(self.bandwidth)..=i {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        let (n, bw) = (self.order, self.bandwidth);
        let w = bw + 1;
        let mut l = self.data.clone();
        for j in 0..n {
            let row_j = j * w;
            let k0 = j.saturating_sub(bw);
            // diagonal
            let mut s = l[row_j + bw];
            for k in k0..j {
                let x = l[row_j + bw - (j - k)];
                s -= x * x;
            }
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::IllPosed { row: j, pivot: s });
            }
            let d = s.sqrt();
            l[row_j + bw] = d;
            for i in (j + 1)..n.min(j + bw + 1) {
                let row_i = i * w;
                let k0 = i.saturating_sub(bw);
                let mut s = l[row_i + bw - (i - j)];
                for k in k0..j {
                    s -= l[row_i + bw - (i - k)] * l[row_j + bw - (j - k)];
                }
                l[row_i + bw - (i - j)] = s / d;
            }
        }
        Ok(BandCholesky {
            order: n,
            bandwidth: bw,
            data: l,
        })
    }
}

/// Lower band factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    order: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    fn l(&self, i: usize, k: usize) -> f64 {
        self.data[i * (self.bandwidth + 1) + self.bandwidth - (i - k)]
    }

    /// Solves `L y = b` in place; entries of `b` before `start` must be zero.
    pub fn forward(&self, b: &mut [f64], start: usize) {
        let bw = self.bandwidth;
        for i in start..self.order {
            let k0 = i.saturating_sub(bw).max(start);
            let mut s = b[i];
            for k in k0..i {
                s -= self.l(i, k) * b[k];
            }
            b[i] = s / self.l(i, i);
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        let bw = self.bandwidth;
        for i in (0..self.order).rev() {
            let mut s = y[i];
            for k in (i + 1)..self.order.min(i + bw + 1) {
                s -= self.l(k, i) * y[k];
            }
            y[i] = s / self.l(i, i);
        }
    }

    pub fn solve(&self, b: &mut [f64]) {
        self.forward(b, 0);
        self.backward(b);
    }
}

/// Energy matrix split into interior (I) and boundary (B) unknowns, plus a
/// diagonal boundary mass.
#[derive(Debug, Clone)]
pub struct PartitionedSystem {
    /// `A_II`, banded.
    pub interior: SymBand,
    /// `A_IB` by boundary column: `(interior row, value)` pairs.
    pub coupling: Vec<Vec<(usize, f64)>>,
    /// `A_BB`.
    pub boundary: SymMatrix,
    /// Diagonal of `B_BB`.
    pub boundary_mass: Vec<f64>,
}

impl PartitionedSystem {
    pub fn boundary_len(&self) -> usize {
        self.boundary_mass.len()
    }

    pub fn interior_len(&self) -> usize {
        self.interior.order()
    }

    fn validate(&self) -> Result<()> {
        let nb = self.boundary_len();
        if self.boundary.order() != nb || self.coupling.len() != nb {
            return Err(Error::Domain(format!(
                "boundary blocks disagree: A_BB order {}, {} coupling columns, {} mass entries",
                self.boundary.order(),
                self.coupling.len(),
                nb
            )));
        }
        if let Some(m) = self.boundary_mass.iter().find(|m| !(**m > 0.0)) {
            return Err(Error::Domain(format!("boundary mass entry {m} is not positive")));
        }
        let ni = self.interior_len();
        if self.coupling.iter().flatten().any(|&(r, _)| r >= ni) {
            return Err(Error::Domain("coupling row outside the interior block".into()));
        }
        Ok(())
    }

    /// `A_BB − A_IBᵀ A_II⁻¹ A_IB`.
    pub fn schur_complement(&self) -> Result<SymMatrix> {
        self.validate()?;
        let nb = self.boundary_len();
        let ni = self.interior_len();
        let mut s = self.boundary.clone();
        if ni == 0 {
            return Ok(s);
        }
        let chol = self.interior.cholesky()?;
        let columns: Vec<usize> = (0..nb).collect();
        // Y = L⁻¹ A_IB column by column; each column is zero before its first coupled row.
        let y: Vec<(usize, Vec<f64>)> = par::map(&columns, |&b| {
            let start = self.coupling[b].iter().map(|&(r, _)| r).min().unwrap_or(ni);
            let mut rhs = vec![0.0; ni];
            for &(r, v) in &self.coupling[b] {
                rhs[r] += v;
            }
            chol.forward(&mut rhs, start);
            (start, rhs.split_off(start))
        });
        let rows: Vec<Vec<f64>> = par::map(&columns, |&a| {
            (0..=a)
                .map(|b| {
                    let (sa, ya) = &y[a];
                    let (sb, yb) = &y[b];
                    let from = (*sa).max(*sb);
                    if from >= ni {
                        return 0.0;
                    }
                    ya[from - sa..]
                        .iter()
                        .zip(&yb[from - sb..])
                        .map(|(p, q)| p * q)
                        .sum()
                })
                .collect()
        });
        for (a, row) in rows.into_iter().enumerate() {
            for (b, v) in row.into_iter().enumerate() {
                let cur = s.get(a, b);
                s.set(a, b, cur - v);
            }
        }
        Ok(s)
    }

    /// Interior values of the discrete harmonic extension of `boundary_values`.
    pub fn harmonic_extension(&self, boundary_values: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        if boundary_values.len() != self.boundary_len() {
            return Err(Error::Domain(format!(
                "{} boundary values for {} boundary unknowns",
                boundary_values.len(),
                self.boundary_len()
            )));
        }
        let ni = self.interior_len();
        if ni == 0 {
            return Ok(Vec::new());
        }
        let mut rhs = vec![0.0; ni];
        for (col, &f) in self.coupling.iter().zip(boundary_values) {
            for &(r, v) in col {
                rhs[r] -= v * f;
            }
        }
        self.interior.cholesky()?.solve(&mut rhs);
        Ok(rhs)
    }
}

/// `B^{-1/2} (A_BB − A_IBᵀ A_II⁻¹ A_IB) B^{-1/2}`; its eigenvalues are the
/// discrete Steklov eigenvalues.
pub fn dtn_matrix(sys: &PartitionedSystem) -> Result<SymMatrix> {
    let mut s = sys.schur_complement()?;
    let scale: Vec<f64> = sys.boundary_mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let n = s.order();
    for i in 0..n {
        for j in 0..=i {
            let v = s.get(i, j) * scale[i] * scale[j];
            s.set(i, j, v);
        }
    }
    Ok(s)
}
