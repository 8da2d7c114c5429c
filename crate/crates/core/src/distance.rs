//! Exact Euclidean distance from every cell to the nearest goal cell.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geom::Vec2;

/// Per-cell distance (world units) to the nearest zero-valued cell centre.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalDistanceMap {
    width: usize,
    height: usize,
    cell_size: f64,
    dist: Vec<f64>,
}

impl GoalDistanceMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.dist[iy * self.width + ix]
    }

    /// Distance stored for the cell containing `p`, clamped to the grid.
    pub fn at_point(&self, p: Vec2) -> f64 {
        let (ix, iy) = self.cell_of(p);
        self.get(ix, iy)
    }

    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let ix = ((p.x / self.cell_size).floor().max(0.0) as usize).min(self.width - 1);
        let iy = ((p.y / self.cell_size).floor().max(0.0) as usize).min(self.height - 1);
        (ix, iy)
    }
}

/// Two-pass (columns then rows) squared-distance transform of the lower
/// envelope of parabolas, after Felzenszwalb and Huttenlocher.
pub fn goal_distance_map(field: &ScalarField) -> Result<GoalDistanceMap> {
    if !field.has_goal() {
        return Err(Error::Config(
            "scalar field has no zero-valued cells, so there is no goal region".into(),
        ));
    }
    let (w, h) = (field.width(), field.height());
    let mut sq: Vec<f64> = field
        .values()
        .iter()
        .map(|&v| if v == 0.0 { 0.0 } else { f64::INFINITY })
        .collect();

    let n = w.max(h);
    let mut buf_in = vec![0.0; n];
    let mut buf_out = vec![0.0; n];
    let mut env = Envelope::with_capacity(n);

    for ix in 0..w {
        for iy in 0..h {
            buf_in[iy] = sq[iy * w + ix];
        }
        env.transform(&buf_in[..h], &mut buf_out[..h]);
        for iy in 0..h {
            sq[iy * w + ix] = buf_out[iy];
        }
    }
    for iy in 0..h {
        let row = &mut sq[iy * w..(iy + 1) * w];
        buf_in[..w].copy_from_slice(row);
        env.transform(&buf_in[..w], &mut buf_out[..w]);
        row.copy_from_slice(&buf_out[..w]);
    }

    let cs = field.cell_size();
    Ok(GoalDistanceMap {
        width: w,
        height: h,
        cell_size: cs,
        dist: sq.into_iter().map(|d| d.sqrt() * cs).collect(),
    })
}

struct Envelope {
    sites: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Envelope {
            sites: vec![0; n],
            bounds: vec![0.0; n + 1],
        }
    }

    /// out[q] = min_p (q - p)^2 + f[p]
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let first = match f.iter().position(|v| v.is_finite()) {
            Some(p) => p,
            None => {
                out.fill(f64::INFINITY);
                return;
            }
        };
        let mut k = 0;
        self.sites[0] = first;
        self.bounds[0] = f64::NEG_INFINITY;
        self.bounds[1] = f64::INFINITY;
        for q in first + 1..n {
            if !f[q].is_finite() {
                continue;
            }
            let mut s;
            loop {
                let p = self.sites[k];
                s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
                // bounds[0] is -inf, so k never underflows
                if s <= self.bounds[k] {
                    k -= 1;
                } else {
                    break;
                }
            }
            k += 1;
            self.sites[k] = q;
            self.bounds[k] = s;
            self.bounds[k + 1] = f64::INFINITY;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let p = self.sites[k];
            let d = q as f64 - p as f64;
            *o = d * d + f[p];
        }
    }
}
