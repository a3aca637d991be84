//! Multidimensional FFT on an N^d box (d = 2, 3) with pruning of inactive lines.
//!
//! Forward transforms skip last-axis lines that are identically zero; inverse transforms only
//! finish the last-axis lines that the caller will read. Both are exact, not approximations.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const BATCH: usize = 8;

/// Which last-axis lines (and, for d = 3, which first-axis planes) carry data.
#[derive(Debug, Clone)]
pub struct Activity {
    pub lines: Vec<usize>,
    pub planes: Vec<usize>,
}

impl Activity {
    pub fn full(dim: usize, n: usize) -> Self {
        Self { lines: (0..n.pow(dim as u32 - 1)).collect(), planes: (0..n).collect() }
    }

    /// Activity covering the given flat indices.
    pub fn from_indices(dim: usize, n: usize, idx: &[usize]) -> Self {
        let mut lines: Vec<usize> = idx.iter().map(|i| i / n).collect();
        lines.sort_unstable();
        lines.dedup();
        let mut planes: Vec<usize> = if dim == 3 { lines.iter().map(|l| l / n).collect() } else { vec![] };
        planes.dedup();
        Self { lines, planes }
    }
}

pub struct BoxFft {
    pub dim: usize,
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for BoxFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoxFft(d={}, n={})", self.dim, self.n)
    }
}

impl BoxFft {
    pub fn new(dim: usize, n: usize) -> Self {
        assert!(dim == 2 || dim == 3, "box transforms support d = 2, 3");
        let mut planner = FftPlanner::new();
        Self { dim, n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn lines(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [C64], lines: &[usize]) {
        let n = self.n;
        if lines.len() == data.len() / n {
            data.par_chunks_mut(n * BATCH).for_each(|c| plan.process(c));
            return;
        }
        // active lines are sorted; split the buffer so each line is owned by one task
        let mut rest: &mut [C64] = data;
        let mut consumed = 0;
        let mut owned: Vec<&mut [C64]> = Vec::with_capacity(lines.len());
        for &l in lines {
            let (_, tail) = rest.split_at_mut(l * n - consumed);
            let (line, tail) = tail.split_at_mut(n);
            owned.push(line);
            rest = tail;
            consumed = (l + 1) * n;
        }
        owned.into_par_iter().for_each(|line| plan.process(line));
    }

    /// Transforms along a strided axis for every offset in `offsets` (each offset is the start of
    /// one line with `stride` spacing). Offsets are grouped in contiguous batches.
    fn strided(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [C64], offsets: &[usize], stride: usize) {
        let n = self.n;
        let batches: Vec<&[usize]> = offsets.chunks(BATCH).collect();
        let src: &[C64] = data;
        let done: Vec<Vec<C64>> = batches
            .par_iter()
            .map(|b| {
                let mut buf = vec![C64::new(0.0, 0.0); b.len() * n];
                for k in 0..n {
                    for (j, &o) in b.iter().enumerate() {
                        buf[j * n + k] = src[o + k * stride];
                    }
                }
                plan.process(&mut buf);
                buf
            })
            .collect();
        for (b, buf) in batches.iter().zip(&done) {
            for k in 0..n {
                for (j, &o) in b.iter().enumerate() {
                    data[o + k * stride] = buf[j * n + k];
                }
            }
        }
    }

    fn first_axis_offsets(&self) -> Vec<usize> {
        (0..self.n.pow(self.dim as u32 - 1)).collect()
    }

    fn middle_axis_offsets(&self, planes: &[usize]) -> Vec<usize> {
        let n = self.n;
        planes.iter().flat_map(|&p| (0..n).map(move |i2| p * n * n + i2)).collect()
    }

    /// Unnormalized forward transform; `act` describes where the input may be nonzero.
    pub fn forward(&self, data: &mut [C64], act: &Activity) {
        let n = self.n;
        self.lines(&self.fwd, data, &act.lines);
        if self.dim == 3 {
            self.strided(&self.fwd, data, &self.middle_axis_offsets(&act.planes), n);
        }
        self.strided(&self.fwd, data, &self.first_axis_offsets(), n.pow(self.dim as u32 - 1));
    }

    /// Unnormalized inverse transform; only entries inside `act` are valid afterwards.
    pub fn inverse(&self, data: &mut [C64], act: &Activity) {
        let n = self.n;
        self.strided(&self.inv, data, &self.first_axis_offsets(), n.pow(self.dim as u32 - 1));
        if self.dim == 3 {
            self.strided(&self.inv, data, &self.middle_axis_offsets(&act.planes), n);
        }
        self.lines(&self.inv, data, &act.lines);
    }
}
