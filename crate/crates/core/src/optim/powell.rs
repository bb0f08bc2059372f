use super::dfo::{drive, DfoOptions, DfoResult, Exhausted, Tracker};
use crate::error::Result;

const GOLD: f64 = 1.618_034;
const GROW_LIMIT: f64 = 110.0;
const CGOLD: f64 = 0.381_966_0;

/// Maximizes `objective` with Powell's conjugate-direction method.
///
/// Each sweep runs a Brent line minimization along every direction in the
/// set, then tries the extrapolated direction and replaces the direction of
/// largest decrease when Powell's test allows it. Stops when one sweep gains
/// less than `ftol` relative to the objective scale, or when the budget is
/// spent. Line steps are only taken on strict improvement, so a flat
/// objective returns `x0`. Restarts behave as in [`nelder_mead`](super::nelder_mead).
pub fn powell<F>(objective: F, x0: &[f64], opts: &DfoOptions) -> Result<DfoResult>
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
    let mut direc: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut x = x0.to_vec();
    let mut fval = t.cost(&x)?;
    loop {
        *iterations += 1;
        let x_start = x.clone();
        let f_start = fval;
        let mut big_ind = 0;
        let mut delta = 0.0;
        for (i, dir) in direc.iter().enumerate() {
            let before = fval;
            fval = line_search(t, &mut x, dir, fval, opts)?;
            if before - fval > delta {
                delta = before - fval;
                big_ind = i;
            }
        }
        if 2.0 * (f_start - fval) <= opts.ftol * (f_start.abs() + fval.abs()) + 1e-20 {
            return Ok(true);
        }
        let new_dir: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let x_ext: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| 2.0 * a - b).collect();
        let f_ext = t.cost(&x_ext)?;
        if f_start > f_ext {
            let mut test = 2.0 * (f_start + f_ext - 2.0 * fval);
            test *= (f_start - fval - delta).powi(2);
            test -= delta * (f_start - f_ext).powi(2);
            if test < 0.0 {
                fval = line_search(t, &mut x, &new_dir, fval, opts)?;
                if new_dir.iter().any(|&v| v != 0.0) {
                    direc[big_ind] = direc[d - 1].clone();
                    direc[d - 1] = new_dir;
                }
            }
        }
    }
}

/// Minimizes the cost along `x + α·dir`, updating `x` on strict improvement.
fn line_search<F: FnMut(&[f64]) -> f64>(
    t: &mut Tracker<F>,
    x: &mut [f64],
    dir: &[f64],
    fx: f64,
    opts: &DfoOptions,
) -> std::result::Result<f64, Exhausted> {
    let base = x.to_vec();
    let mut trial = vec![0.0; x.len()];
    let mut h = |alpha: f64| {
        for ((t, b), d) in trial.iter_mut().zip(&base).zip(dir) {
            *t = b + alpha * d;
        }
        t.cost(&trial)
    };
    let bracket = bracket(&mut h, 0.0, fx, opts.line_bracket)?;
    let (alpha, f_alpha) = brent(&mut h, bracket, opts.line_tol)?;
    if f_alpha < fx {
        for ((x, b), d) in x.iter_mut().zip(&base).zip(dir) {
            *x = b + alpha * d;
        }
        Ok(f_alpha)
    } else {
        Ok(fx)
    }
}

type Bracket = ((f64, f64), (f64, f64), (f64, f64));

/// Downhill bracketing by golden-ratio growth with parabolic extrapolation.
/// Returns points `a, b, c` (with values) where `f(b)` is lowest.
fn bracket<H>(h: &mut H, a0: f64, fa0: f64, step: f64) -> std::result::Result<Bracket, Exhausted>
where
    H: FnMut(f64) -> std::result::Result<f64, Exhausted>,
{
    let (mut a, mut fa) = (a0, fa0);
    let (mut b, mut fb) = (a0 + step, h(a0 + step)?);
    if fa < fb {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = h(c)?;
    let mut guard = 0;
    while fc < fb && guard < 1000 {
        guard += 1;
        let tmp1 = (b - a) * (fb - fc);
        let tmp2 = (b - c) * (fb - fa);
        let val = tmp2 - tmp1;
        let denom = if val.abs() < 1e-21 { 2e-21 } else { 2.0 * val };
        let mut w = b - ((b - c) * tmp2 - (b - a) * tmp1) / denom;
        let wlim = b + GROW_LIMIT * (c - b);
        let mut fw;
        if (w - c) * (b - w) > 0.0 {
            fw = h(w)?;
            if fw < fc {
                return Ok(((b, fb), (w, fw), (c, fc)));
            } else if fw > fb {
                return Ok(((a, fa), (b, fb), (w, fw)));
            }
            w = c + GOLD * (c - b);
            fw = h(w)?;
        } else if (w - wlim) * (wlim - c) >= 0.0 {
            w = wlim;
            fw = h(w)?;
        } else if (w - wlim) * (c - w) > 0.0 {
            fw = h(w)?;
            if fw < fc {
                b = c;
                c = w;
                w = c + GOLD * (c - b);
                fb = fc;
                fc = fw;
                fw = h(w)?;
            }
        } else {
            w = c + GOLD * (c - b);
            fw = h(w)?;
        }
        a = b;
        b = c;
        c = w;
        fa = fb;
        fb = fc;
        fc = fw;
    }
    Ok(((a, fa), (b, fb), (c, fc)))
}

/// Brent's method inside a bracket.
fn brent<H>(h: &mut H, bracket: Bracket, tol: f64) -> std::result::Result<(f64, f64), Exhausted>
where
    H: FnMut(f64) -> std::result::Result<f64, Exhausted>,
{
    const MIN_TOL: f64 = 1e-11;
    let ((xa, _), (xb, fb), (xc, _)) = bracket;
    let (mut a, mut b) = if xa < xc { (xa, xc) } else { (xc, xa) };
    let (mut x, mut w, mut v) = (xb, xb, xb);
    let (mut fx, mut fw, mut fv) = (fb, fb, fb);
    let mut deltax: f64 = 0.0;
    let mut rat: f64 = 0.0;
    for _ in 0..500 {
        let tol1 = tol * x.abs() + MIN_TOL;
        let tol2 = 2.0 * tol1;
        let xmid = 0.5 * (a + b);
        if (x - xmid).abs() < tol2 - 0.5 * (b - a) {
            break;
        }
        let golden = |x: f64, a: f64, b: f64| if x >= xmid { a - x } else { b - x };
        if deltax.abs() <= tol1 {
            deltax = golden(x, a, b);
            rat = CGOLD * deltax;
        } else {
            let tmp1 = (x - w) * (fx - fv);
            let mut tmp2 = (x - v) * (fx - fw);
            let mut p = (x - v) * tmp2 - (x - w) * tmp1;
            tmp2 = 2.0 * (tmp2 - tmp1);
            if tmp2 > 0.0 {
                p = -p;
            }
            tmp2 = tmp2.abs();
            let prev = deltax;
            deltax = rat;
            if p > tmp2 * (a - x) && p < tmp2 * (b - x) && p.abs() < (0.5 * tmp2 * prev).abs() {
                rat = p / tmp2;
                let u = x + rat;
                if u - a < tol2 || b - u < tol2 {
                    rat = if xmid - x >= 0.0 { tol1 } else { -tol1 };
                }
            } else {
                deltax = golden(x, a, b);
                rat = CGOLD * deltax;
            }
        }
        let u = if rat.abs() < tol1 {
            if rat >= 0.0 {
                x + tol1
            } else {
                x - tol1
            }
        } else {
            x + rat
        };
        let fu = h(u)?;
        if fu > fx {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                w = u;
                fv = fw;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        } else {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            w = x;
            x = u;
            fv = fw;
            fw = fx;
            fx = fu;
        }
    }
    Ok((x, fx))
}
