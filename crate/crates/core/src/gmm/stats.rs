use super::model::{log_sum_exp, DiagGmm};
use crate::error::Result;
use crate::features::FeatureMatrix;

const BLOCK_ROWS: usize = 256;

/// Zeroth, first and (optionally) second order posterior statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffStats {
    pub k: usize,
    pub d: usize,
    pub occupancy: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Option<Vec<f64>>,
    pub log_likelihood: f64,
    pub frames: usize,
}

impl SuffStats {
    pub fn zeros(k: usize, d: usize, second_order: bool) -> Self {
        Self {
            k,
            d,
            occupancy: vec![0.0; k],
            first: vec![0.0; k * d],
            second: second_order.then(|| vec![0.0; k * d]),
            log_likelihood: 0.0,
            frames: 0,
        }
    }

    /// E-step over `data`, in fixed 256-row blocks whose partial sums are added in order.
    pub fn accumulate(model: &DiagGmm, data: &FeatureMatrix, second_order: bool) -> Result<Self> {
        model.check_dim(data.n_dims())?;
        let (k, d) = (model.n_components(), model.dim());
        let mut total = Self::zeros(k, d, second_order);
        let mut block = Self::zeros(k, d, second_order);
        let mut joint = vec![0.0; k];
        let rows: Vec<&[f64]> = data.rows().collect();
        for chunk in rows.chunks(BLOCK_ROWS) {
            block.clear();
            for &x in chunk {
                model.component_log_joint(x, &mut joint);
                let lse = log_sum_exp(&joint);
                block.log_likelihood += lse;
                for c in 0..k {
                    let g = (joint[c] - lse).exp();
                    if g == 0.0 {
                        continue;
                    }
                    block.occupancy[c] += g;
                    let first = &mut block.first[c * d..(c + 1) * d];
                    for (f, &v) in first.iter_mut().zip(x) {
                        *f += g * v;
                    }
                    if let Some(second) = block.second.as_mut() {
                        for (s, &v) in second[c * d..(c + 1) * d].iter_mut().zip(x) {
                            *s += g * v * v;
                        }
                    }
                }
            }
            block.frames = chunk.len();
            total.merge(&block);
        }
        Ok(total)
    }

    fn clear(&mut self) {
        self.occupancy.iter_mut().for_each(|v| *v = 0.0);
        self.first.iter_mut().for_each(|v| *v = 0.0);
        if let Some(s) = self.second.as_mut() {
            s.iter_mut().for_each(|v| *v = 0.0);
        }
        self.log_likelihood = 0.0;
        self.frames = 0;
    }

    /// Adds another shard's statistics.
    pub fn merge(&mut self, other: &SuffStats) {
        assert_eq!((self.k, self.d), (other.k, other.d), "shape mismatch in merge");
        for (a, b) in self.occupancy.iter_mut().zip(&other.occupancy) {
            *a += b;
        }
        for (a, b) in self.first.iter_mut().zip(&other.first) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (self.second.as_mut(), other.second.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.log_likelihood += other.log_likelihood;
        self.frames += other.frames;
    }
}
