/// Relative pivot tolerance: a new pivot below `PIVOT_TOL × diagonal` marks
/// the extended submatrix as singular.
pub const PIVOT_TOL: f64 = 1e-10;

/// Lower Cholesky factor of a symmetric positive-definite matrix that grows
/// by one row and column at a time.
///
/// Adding an index to a model costs `O(k²)` instead of refactoring in
/// `O(k³)`. Storage is packed row-major lower triangle.
#[derive(Debug, Clone, Default)]
pub struct GrowingCholesky {
    dim: usize,
    packed: Vec<f64>,
}

/// The extension was rejected; `pivot` is the offending squared pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub pivot: f64,
}

impl GrowingCholesky {
    pub fn new() -> Self {
        Self::default()
    }

    /// Factors a full `k × k` matrix given as an entry closure.
    pub fn factor<F: Fn(usize, usize) -> f64>(k: usize, entry: F) -> Result<Self, SingularPivot> {
        let mut chol = GrowingCholesky::new();
        for j in 0..k {
            let col: Vec<f64> = (0..j).map(|i| entry(i, j)).collect();
            chol.push(&col, entry(j, j))?;
        }
        Ok(chol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.packed[start..start + i + 1]
    }

    /// Extends `A` to `[[A, col], [colᵀ, diag]]`. On failure the factor is
    /// left unchanged.
    pub fn push(&mut self, col: &[f64], diag: f64) -> Result<(), SingularPivot> {
        assert_eq!(col.len(), self.dim, "column length must equal current dimension");
        let mut new_row = Vec::with_capacity(self.dim + 1);
        for (i, &c) in col.iter().enumerate() {
            let row = self.row(i);
            let s: f64 = row[..i].iter().zip(&new_row).map(|(a, b)| a * b).sum();
            new_row.push((c - s) / row[i]);
        }
        let pivot = diag - new_row.iter().map(|v| v * v).sum::<f64>();
        if !(diag > 0.0 && pivot > PIVOT_TOL * diag) {
            return Err(SingularPivot { pivot });
        }
        new_row.push(pivot.sqrt());
        self.packed.extend_from_slice(&new_row);
        self.dim += 1;
        Ok(())
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim);
        let k = self.dim;
        let mut z = vec![0.0; k];
        for i in 0..k {
            let row = self.row(i);
            let s: f64 = row[..i].iter().zip(&z).map(|(a, b)| a * b).sum();
            z[i] = (b[i] - s) / row[i];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = z[i];
            for m in i + 1..k {
                s -= self.row(m)[i] * x[m];
            }
            x[i] = s / self.row(i)[i];
        }
        x
    }

    /// Entry `L[i][j]` (zero above the diagonal).
    pub fn l(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }
}
