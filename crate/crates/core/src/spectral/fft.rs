//! Two-dimensional complex FFTs over row-major square buffers, with column
//! pruning for band-limited inputs.

use std::cell::RefCell;
use std::ops::Range;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

const COL_BLOCK: usize = 16;

/// Square 2-D transform of side `m`. Index layout is `i1 * m + i2`, where
/// `i1` runs along axis 1 (the slow index) and `i2` along axis 2.
pub(crate) struct Fft2 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    cols: Vec<Complex64>,
}

impl Fft2 {
    pub(crate) fn new(m: usize) -> Self {
        let (fwd, inv) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(m), p.plan_fft_inverse(m))
        });
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            m,
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
            cols: vec![Complex64::default(); COL_BLOCK * m],
        }
    }

    fn rows(&mut self, data: &mut [Complex64], forward: bool) {
        let fft = if forward { &self.fwd } else { &self.inv };
        fft.process_with_scratch(data, &mut self.scratch);
    }

    fn columns(&mut self, data: &mut [Complex64], ranges: &[Range<usize>], forward: bool) {
        let m = self.m;
        let fft = if forward { &self.fwd } else { &self.inv };
        for range in ranges {
            let mut c0 = range.start;
            while c0 < range.end {
                let b = COL_BLOCK.min(range.end - c0);
                let buf = &mut self.cols[..b * m];
                for r in 0..m {
                    let row = &data[r * m + c0..r * m + c0 + b];
                    for (k, v) in row.iter().enumerate() {
                        buf[k * m + r] = *v;
                    }
                }
                fft.process_with_scratch(buf, &mut self.scratch);
                for r in 0..m {
                    let row = &mut data[r * m + c0..r * m + c0 + b];
                    for (k, v) in row.iter_mut().enumerate() {
                        *v = buf[k * m + r];
                    }
                }
                c0 += b;
            }
        }
    }

    /// Unnormalized inverse transform. Only the columns in `active` may hold
    /// nonzero input; the others must be zero.
    pub(crate) fn inverse(&mut self, data: &mut [Complex64], active: &[Range<usize>]) {
        debug_assert_eq!(data.len(), self.m * self.m);
        self.columns(data, active, false);
        self.rows(data, false);
    }

    /// Unnormalized forward transform. Columns outside `active` are left
    /// half-transformed and must not be read afterwards.
    pub(crate) fn forward(&mut self, data: &mut [Complex64], active: &[Range<usize>]) {
        debug_assert_eq!(data.len(), self.m * self.m);
        self.rows(data, true);
        self.columns(data, active, true);
    }

    pub(crate) fn full(&self) -> Vec<Range<usize>> {
        vec![0..self.m]
    }
}

/// Contiguous runs of columns holding at least one nonzero entry.
pub(crate) fn active_columns(data: &[Complex64], m: usize) -> Vec<Range<usize>> {
    let mut live = vec![false; m];
    for row in data.chunks_exact(m) {
        for (flag, v) in live.iter_mut().zip(row) {
            if !*flag && (v.re != 0.0 || v.im != 0.0) {
                *flag = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut c = 0;
    while c < m {
        if live[c] {
            let start = c;
            while c < m && live[c] {
                c += 1;
            }
            out.push(start..c);
        } else {
            c += 1;
        }
    }
    out
}

/// Slots holding signed modes `|mode| <= k` on a length-`m` FFT axis.
pub(crate) fn band_ranges(m: usize, k: usize) -> Vec<Range<usize>> {
    if 2 * k + 1 >= m {
        vec![0..m]
    } else {
        vec![0..k + 1, m - k..m]
    }
}

/// Slots holding signed modes in `[-n/2, n/2)` on a length-`m` axis, `m >= n`.
pub(crate) fn embedded_ranges(m: usize, n: usize) -> Vec<Range<usize>> {
    if m == n {
        vec![0..m]
    } else {
        vec![0..n / 2, m - n / 2..m]
    }
}
