//! Dense 2-D row-major f64 tensors and the sparse operator used by the
//! graph propagation rule.

use crate::error::{Error, Result};

/// Dense 2-D array, row-major, 64-bit floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must be rows*cols");
        Tensor { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Tensor { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Matrix product. The i-k-j loop order keeps the inner loop contiguous.
    pub fn matmul(&self, other: &Tensor) -> Result<Tensor> {
        if self.cols != other.rows {
            return Err(Error::Dim {
                op: "matmul",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let (m, n, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; m * p];
        for i in 0..m {
            let arow = &self.data[i * n..(i + 1) * n];
            let orow = &mut out[i * p..(i + 1) * p];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                let brow = &other.data[k * p..(k + 1) * p];
                for j in 0..p {
                    orow[j] += aik * brow[j];
                }
            }
        }
        Ok(Tensor::from_vec(m, p, out))
    }

    pub fn transpose(&self) -> Tensor {
        let mut out = Tensor::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.shape() != other.shape() {
            return Err(Error::Dim {
                op: "add",
                lhs: self.shape(),
                rhs: other.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Tensor::from_vec(self.rows, self.cols, data))
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor::from_vec(self.rows, self.cols, self.data.iter().map(|v| v * c).collect())
    }

    /// Sample standard deviation of all entries (n-1 denominator).
    pub fn std_dev(&self) -> f64 {
        let n = self.data.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.data.iter().sum::<f64>() / n as f64;
        let ss: f64 = self.data.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    }
}

/// Symmetric sparse matrix in CSR form; the cached normalized adjacency in
/// a form the encoder can multiply cheaply.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from per-row (col, value) lists; rows must be sorted by column.
    pub fn from_rows(n: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        assert_eq!(rows.len(), n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for &(c, v) in row {
                col_idx.push(c);
                vals.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Sparse-dense product: self (n x n) times x (n x c).
    pub fn matmul_dense(&self, x: &Tensor) -> Result<Tensor> {
        if x.rows() != self.n {
            return Err(Error::Dim {
                op: "spmm",
                lhs: (self.n, self.n),
                rhs: x.shape(),
            });
        }
        let c = x.cols();
        let mut out = vec![0.0; self.n * c];
        for i in 0..self.n {
            let orow = &mut out[i * c..(i + 1) * c];
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                let k = self.col_idx[idx];
                let v = self.vals[idx];
                let xrow = &x.data()[k * c..(k + 1) * c];
                for j in 0..c {
                    orow[j] += v * xrow[j];
                }
            }
        }
        Ok(Tensor::from_vec(self.n, c, out))
    }

    /// Densify (for tests and the cached norm_adj tensor).
    pub fn to_dense(&self) -> Tensor {
        let mut out = Tensor::zeros(self.n, self.n);
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.set(i, self.col_idx[idx], self.vals[idx]);
            }
        }
        out
    }
}
