use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::lipnorms::DualLipNorm;

use super::bridge::BridgeSpec;

pub const DEFAULT_COUPLER_BUDGET: usize = 200;
const MIN_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct CouplerSearch {
    /// Total objective evaluations across all restarts.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CouplerSearch {
    fn default() -> Self {
        CouplerSearch { budget: DEFAULT_COUPLER_BUDGET, restarts: 4, seed: 0 }
    }
}

/// `exp(A)` restricted to the first `k` columns, with `A` skew-Hermitian and
/// read off `n²` real parameters.
fn isometry_from(params: &[f64], n: usize, k: usize) -> CMat {
    let mut a = CMat::zeros(n, n);
    let mut it = params.iter();
    for i in 0..n {
        a[(i, i)] = c(0.0, *it.next().unwrap());
        for j in i + 1..n {
            let z = c(*it.next().unwrap(), *it.next().unwrap());
            a[(i, j)] = z;
            a[(j, i)] = -z.conj();
        }
    }
    linalg::expm_skew_hermitian(&a).columns(0, k).into_owned()
}

/// Minimise `objective` over coupler bridges `‖U T_M x Ω_M + T_N y Ω_N‖` by
/// coordinate descent from `U = [I; 0]` and from random starts. Any `U`
/// gives a valid bridge, so the result is sound however the search ends.
pub fn optimize_coupler(
    left: &DualLipNorm,
    right: &DualLipNorm,
    objective: impl Fn(&BridgeSpec) -> f64,
    search: CouplerSearch,
) -> Result<(BridgeSpec, f64)> {
    let (Some((t, _)), Some((s, _))) = (left.kernel_data(), right.kernel_data()) else {
        return Err(Error::InvalidBridge("coupler bridge needs two kernel norms".into()));
    };
    let (k, n) = (t.nrows(), s.nrows());
    if n < k {
        return Err(Error::InvalidBridge(format!("no isometry from dimension {k} into {n}")));
    }
    if search.budget == 0 {
        return Err(Error::InvalidArgument("coupler search needs a positive budget".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let restarts = search.restarts.max(1);
    let per_restart = (search.budget / restarts).max(1);
    let eval = |p: &[f64]| -> Result<(BridgeSpec, f64)> {
        let j = BridgeSpec::coupler(isometry_from(p, n, k), left, right)?;
        let v = objective(&j);
        Ok((j, v))
    };
    let mut best: Option<(BridgeSpec, f64)> = None;
    let mut used = 0;
    for r in 0..restarts {
        if used >= search.budget {
            break;
        }
        let mut x: Vec<f64> = if r == 0 {
            vec![0.0; n * n]
        } else {
            (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect()
        };
        let (mut cur_j, mut cur) = eval(&x)?;
        used += 1;
        let mut left_here = per_restart.min(search.budget - used + 1) - 1;
        let mut step = 0.5;
        'descent: while step > MIN_STEP {
            let mut improved = false;
            for coord in 0..x.len() {
                for dir in [1.0, -1.0] {
                    if left_here == 0 {
                        break 'descent;
                    }
                    let mut y = x.clone();
                    y[coord] += dir * step;
                    let (j, v) = eval(&y)?;
                    used += 1;
                    left_here -= 1;
                    if v < cur {
                        (x, cur, cur_j) = (y, v, j);
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best.as_ref().is_none_or(|b| cur < b.1) {
            best = Some((cur_j, cur));
        }
    }
    Ok(best.expect("at least one evaluation"))
}
