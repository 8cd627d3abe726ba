use std::sync::atomic::{AtomicU32, Ordering};

use super::Matrix;

/// A matrix that many workers read and write at once without locks.
///
/// Each element is an `AtomicU32` holding `f32` bits and is accessed with
/// relaxed ordering, so single-element loads and stores never tear. A
/// read-modify-write of a row is *not* atomic: concurrent updates of the
/// same row may overwrite each other, which hogwild-style SGD tolerates.
pub struct SharedMatrix {
    rows: usize,
    cols: usize,
    data: Box<[AtomicU32]>,
}

impl SharedMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row(&self, i: usize) -> &[AtomicU32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        f32::from_bits(self.data[row * self.cols + col].load(Ordering::Relaxed))
    }

    #[inline]
    pub fn read_row(&self, i: usize, out: &mut [f32]) {
        for (o, a) in out.iter_mut().zip(self.row(i)) {
            *o = f32::from_bits(a.load(Ordering::Relaxed));
        }
    }

    #[inline]
    pub fn write_row(&self, i: usize, values: &[f32]) {
        for (a, &v) in self.row(i).iter().zip(values) {
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    /// `row[i] += delta`, element by element.
    #[inline]
    pub fn add_to_row(&self, i: usize, delta: &[f32]) {
        for (a, &d) in self.row(i).iter().zip(delta) {
            let v = f32::from_bits(a.load(Ordering::Relaxed));
            a.store((v + d).to_bits(), Ordering::Relaxed);
        }
    }

    /// Writes back a privately updated copy of row `i`: each element
    /// becomes `working + (current - original)`, i.e. the current value
    /// plus the private change. When nobody else wrote the row since
    /// `original` was read, the result is exactly `working`.
    #[inline]
    pub fn merge_row(&self, i: usize, working: &[f32], original: &[f32]) {
        for ((a, &w), &o) in self.row(i).iter().zip(working).zip(original) {
            let v = f32::from_bits(a.load(Ordering::Relaxed));
            a.store((w + (v - o)).to_bits(), Ordering::Relaxed);
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|a| f32::from_bits(a.load(Ordering::Relaxed)))
                .collect(),
        )
    }

    pub fn into_matrix(self) -> Matrix {
        let data = Vec::from(self.data)
            .into_iter()
            .map(|a| f32::from_bits(a.into_inner()))
            .collect();
        Matrix::from_vec(self.rows, self.cols, data)
    }
}

impl From<Matrix> for SharedMatrix {
    fn from(m: Matrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        SharedMatrix {
            rows,
            cols,
            data: m
                .into_vec()
                .into_iter()
                .map(|x| AtomicU32::new(x.to_bits()))
                .collect(),
        }
    }
}
