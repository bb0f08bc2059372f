use super::dfo::{drive, DfoOptions, DfoResult, Exhausted, Tracker};
use crate::error::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Maximizes `objective` with the Nelder-Mead simplex method.
///
/// The initial simplex is `x0` plus `x0 + scale·e_i`. Stops when both the
/// spread of vertex values and the vertex distance from the best point fall
/// below `ftol` and `xtol`, or when the evaluation budget is spent. The
/// returned point is the best one ever evaluated, with ties going to the
/// earliest. With `opts.restarts` the method reruns from random points near
/// the best one until the budget is spent.
pub fn nelder_mead<F>(objective: F, x0: &[f64], opts: &DfoOptions) -> Result<DfoResult>
where
    F: FnMut(&[f64]) -> f64,
{
    drive(objective, x0, opts, run)
}

fn run<F: FnMut(&[f64]) -> f64>(
    t: &mut Tracker<F>,
    x0: &[f64],
    opts: &DfoOptions,
    iterations: &mut u64,
) -> std::result::Result<bool, Exhausted> {
    let d = x0.len();
    let mut sim: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut fsim: Vec<f64> = Vec::with_capacity(d + 1);
    sim.push(x0.to_vec());
    fsim.push(t.cost(x0)?);
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.initial_simplex_scale;
        fsim.push(t.cost(&v)?);
        sim.push(v);
    }
    let point = |c: &[f64], far: &[f64], coef: f64| -> Vec<f64> {
        c.iter().zip(far).map(|(c, w)| c + coef * (c - w)).collect()
    };
    loop {
        // Stable sort keeps earlier vertices first among ties.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| fsim[a].total_cmp(&fsim[b]));
        sim = order.iter().map(|&i| sim[i].clone()).collect();
        fsim = order.iter().map(|&i| fsim[i]).collect();

        let fspread = fsim[1..]
            .iter()
            .map(|f| (f - fsim[0]).abs())
            .fold(0.0, f64::max);
        let xspread = sim[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&sim[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if fspread <= opts.ftol && xspread <= opts.xtol {
            return Ok(true);
        }
        *iterations += 1;

        let mut centroid = vec![0.0; d];
        for v in &sim[..d] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / d as f64;
            }
        }
        let worst = sim[d].clone();
        let xr = point(&centroid, &worst, REFLECT);
        let fr = t.cost(&xr)?;
        let mut do_shrink = false;
        if fr < fsim[0] {
            let xe = point(&centroid, &worst, REFLECT * EXPAND);
            let fe = t.cost(&xe)?;
            if fe < fr {
                sim[d] = xe;
                fsim[d] = fe;
            } else {
                sim[d] = xr;
                fsim[d] = fr;
            }
        } else if fr < fsim[d - 1] {
            sim[d] = xr;
            fsim[d] = fr;
        } else if fr < fsim[d] {
            let xc = point(&centroid, &worst, REFLECT * CONTRACT);
            let fc = t.cost(&xc)?;
            if fc <= fr {
                sim[d] = xc;
                fsim[d] = fc;
            } else {
                do_shrink = true;
            }
        } else {
            let xcc = point(&centroid, &worst, -CONTRACT);
            let fcc = t.cost(&xcc)?;
            if fcc < fsim[d] {
                sim[d] = xcc;
                fsim[d] = fcc;
            } else {
                do_shrink = true;
            }
        }
        if do_shrink {
            let best = sim[0].clone();
            for j in 1..=d {
                for (x, b) in sim[j].iter_mut().zip(&best) {
                    *x = b + SHRINK * (*x - b);
                }
                fsim[j] = t.cost(&sim[j])?;
            }
        }
    }
}
