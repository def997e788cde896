//! Fast Poisson solver on the full box with zero Dirichlet boundary,
//! by sine-transform diagonalization of the standard centered Laplacian.
//!
//! Used for the interface (double-layer) solve, which is a single Poisson
//! problem on `ℬ_h` with a jump-corrected right-hand side.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct FastPoisson {
    dim: usize,
    n: usize,
    shape: [usize; 3],
    /// Eigenvalues of the 1D Dirichlet second difference, k = 1..n−1.
    eig: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FastPoisson {
    pub fn new(dim: usize, n: usize, h: f64) -> Self {
        let mut shape = [1usize; 3];
        for s in shape.iter_mut().take(dim) {
            *s = n + 1;
        }
        let eig = (1..n)
            .map(|k| (2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos() - 2.0) / (h * h))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        Self {
            dim,
            n,
            shape,
            eig,
            fft,
        }
    }

    /// Solve `Δ_h u = rhs` with `u = 0` on `∂ℬ_h`.  Input and output are
    /// full-grid arrays; boundary entries of `rhs` are ignored.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut data = rhs.to_vec();
        self.zero_boundary(&mut data);
        for axis in 0..self.dim {
            self.dst_axis(&mut data, axis);
        }
        // divide by the eigenvalue sum of the separable operator
        let shape = self.shape;
        for idx in 0..data.len() {
            let c = coords(idx, &shape);
            if (0..self.dim).any(|ax| c[ax] == 0 || c[ax] == self.n) {
                continue;
            }
            let lambda: f64 = (0..self.dim).map(|ax| self.eig[c[ax] - 1]).sum();
            data[idx] /= lambda;
        }
        let scale = (2.0 / self.n as f64).powi(self.dim as i32);
        for axis in 0..self.dim {
            self.dst_axis(&mut data, axis);
        }
        for v in data.iter_mut() {
            *v *= scale;
        }
        self.zero_boundary(&mut data);
        data
    }

    fn zero_boundary(&self, data: &mut [f64]) {
        let shape = self.shape;
        for idx in 0..data.len() {
            let c = coords(idx, &shape);
            if (0..self.dim).any(|ax| c[ax] == 0 || c[ax] == self.n) {
                data[idx] = 0.0;
            }
        }
    }

    /// In-place DST-I along one axis of the full-grid array (boundary
    /// planes are left untouched; they are zero).
    fn dst_axis(&self, data: &mut [f64], axis: usize) {
        let n = self.n;
        let shape = self.shape;
        let stride = match axis {
            0 => 1,
            1 => shape[0],
            _ => shape[0] * shape[1],
        };
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        // iterate over all lines along `axis`
        let mut other = [0usize; 2];
        let other_axes: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
        loop {
            let mut base = 0;
            let mut c = [0usize; 3];
            c[other_axes[0]] = other[0];
            c[other_axes[1]] = other[1];
            base += c[0] + shape[0] * (c[1] + shape[1] * c[2]);
            // odd extension: [0, x_1..x_{n-1}, 0, -x_{n-1}..-x_1]
            buf[0] = Complex::new(0.0, 0.0);
            buf[n] = Complex::new(0.0, 0.0);
            for j in 1..n {
                let v = data[base + j * stride];
                buf[j] = Complex::new(v, 0.0);
                buf[2 * n - j] = Complex::new(-v, 0.0);
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for j in 1..n {
                data[base + j * stride] = -0.5 * buf[j].im;
            }
            // advance the other-axes counter
            let mut k = 0;
            loop {
                if k == 2 {
                    return;
                }
                other[k] += 1;
                if other[k] < shape[other_axes[k]] {
                    break;
                }
                other[k] = 0;
                k += 1;
            }
        }
    }
}

fn coords(idx: usize, shape: &[usize; 3]) -> [usize; 3] {
    let mut c = [0usize; 3];
    let mut rem = idx;
    for ax in 0..3 {
        c[ax] = rem % shape[ax];
        rem /= shape[ax];
    }
    c
}
