//! Powell's conjugate-direction method with a bracketing + Brent line search.
//!
//! The outer loop follows the classic formulation: line-minimize along every
//! direction of the set, then replace the direction of largest decrease with
//! the net displacement of the sweep when the discard test allows it. The
//! direction set is reset to the coordinate axes every `n` outer iterations.

use crate::error::{Error, Result};

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const GROW_LIMIT: f64 = 110.0;
const TINY: f64 = 1e-21;
const BRENT_ABS_TOL: f64 = 1e-11;
const BRENT_MAX_ITER: usize = 500;
const BRACKET_MAX_ITER: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerOptions {
    /// Relative objective decrease per outer iteration below which the run stops.
    pub ftol: f64,
    /// Relative tolerance of each line minimization.
    pub xtol: f64,
    pub max_iterations: usize,
    pub max_evaluations: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            ftol: 1e-10,
            xtol: 1e-8,
            max_iterations: 200,
            max_evaluations: 20_000,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.ftol > 0.0 && self.xtol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "optimizer tolerances must be positive: ftol={}, xtol={}",
                self.ftol, self.xtol
            )));
        }
        if self.max_iterations == 0 || self.max_evaluations == 0 {
            return Err(Error::InvalidArgument(
                "optimizer limits must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Objective wrapper that counts calls and rejects non-finite values.
struct Counted<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteObjective { params: x.to_vec() })
        }
    }

    fn along(&mut self, x: &[f64], dir: &[f64], alpha: f64, buf: &mut [f64]) -> Result<f64> {
        for ((b, xi), di) in buf.iter_mut().zip(x).zip(dir) {
            *b = xi + alpha * di;
        }
        self.eval(buf)
    }
}

/// Minimizes `f` from `x0` with Powell's method.
///
/// Returns [`Error::NonFiniteObjective`] if `f` produces NaN or infinity on the
/// search path. Exhausting the evaluation or iteration budget is not an error;
/// the result then carries `converged = false`. The budget is checked between
/// outer iterations, so the final count may exceed `max_evaluations` by one
/// sweep.
pub fn minimize<F>(f: F, x0: &[f64], opts: &OptimizerOptions) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> f64,
{
    opts.validate()?;
    if x0.is_empty() {
        return Err(Error::InvalidArgument("empty parameter vector".into()));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite initial point {x0:?}"
        )));
    }

    let n = x0.len();
    let mut obj = Counted { f, evaluations: 0 };
    let mut x = x0.to_vec();
    let mut fval = obj.eval(&x)?;
    let mut directions = coordinate_axes(n);
    let mut x_start = x.clone();
    let mut buf = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let f_start = fval;
        let mut biggest_drop = 0.0;
        let mut biggest_index = 0;

        for (i, dir) in directions.iter_mut().enumerate() {
            let before = fval;
            let (f_new, alpha) = line_minimize(&mut obj, &x, dir, fval, opts.xtol, &mut buf)?;
            if f_new < fval {
                for (xi, di) in x.iter_mut().zip(dir.iter_mut()) {
                    *xi += alpha * *di;
                    *di *= alpha;
                }
                fval = f_new;
            }
            if before - fval > biggest_drop {
                biggest_drop = before - fval;
                biggest_index = i;
            }
        }
        iterations += 1;

        let bound = opts.ftol * (f_start.abs() + fval.abs()) + 1e-20;
        if 2.0 * (f_start - fval) <= bound {
            converged = true;
            break;
        }
        if obj.evaluations >= opts.max_evaluations || iterations >= opts.max_iterations {
            break;
        }

        if iterations % n == 0 {
            directions = coordinate_axes(n);
            x_start.copy_from_slice(&x);
            continue;
        }

        let displacement: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        x_start.copy_from_slice(&x);
        let extrapolated: Vec<f64> = x.iter().zip(&displacement).map(|(a, d)| a + d).collect();
        let f_extra = obj.eval(&extrapolated)?;

        if f_start > f_extra {
            let t = 2.0 * (f_start + f_extra - 2.0 * fval) * (f_start - fval - biggest_drop).powi(2)
                - biggest_drop * (f_start - f_extra).powi(2);
            if t < 0.0 {
                let mut dir = displacement;
                let (f_new, alpha) = line_minimize(&mut obj, &x, &dir, fval, opts.xtol, &mut buf)?;
                if f_new < fval {
                    for (xi, di) in x.iter_mut().zip(dir.iter_mut()) {
                        *xi += alpha * *di;
                        *di *= alpha;
                    }
                    fval = f_new;
                }
                if dir.iter().any(|d| *d != 0.0) {
                    directions.swap_remove(biggest_index);
                    directions.push(dir);
                }
            }
        }
    }

    Ok(OptimizationResult {
        best_params: x,
        best_value: fval,
        evaluations: obj.evaluations,
        iterations,
        converged,
    })
}

fn coordinate_axes(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect()
}

/// Minimizes `alpha -> f(x + alpha * dir)`; returns the value and the step.
fn line_minimize<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counted<F>,
    x: &[f64],
    dir: &[f64],
    f0: f64,
    tol: f64,
    buf: &mut [f64],
) -> Result<(f64, f64)> {
    if dir.iter().all(|d| *d == 0.0) {
        return Ok((f0, 0.0));
    }
    let mut g = |alpha: f64| -> Result<f64> {
        if alpha == 0.0 {
            Ok(f0)
        } else {
            obj.along(x, dir, alpha, buf)
        }
    };
    let bracket = bracket(&mut g, 0.0, 1.0, f0)?;
    let (alpha, value) = brent(&mut g, bracket, tol)?;
    Ok((value, alpha))
}

#[derive(Clone, Copy, Debug)]
struct Bracket {
    a: f64,
    b: f64,
    c: f64,
    fb: f64,
}

/// Golden-ratio expansion with parabolic extrapolation until `f(b)` is not
/// larger than either end.
fn bracket<G: FnMut(f64) -> Result<f64>>(g: &mut G, xa: f64, xb: f64, fa: f64) -> Result<Bracket> {
    let (mut xa, mut xb) = (xa, xb);
    let mut fa = fa;
    let mut fb = g(xb)?;
    if fa < fb {
        std::mem::swap(&mut xa, &mut xb);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut xc = xb + GOLD * (xb - xa);
    let mut fc = g(xc)?;
    let mut iter = 0;
    while fc < fb {
        let tmp1 = (xb - xa) * (fb - fc);
        let tmp2 = (xb - xc) * (fb - fa);
        let val = tmp2 - tmp1;
        let denom = if val.abs() < TINY { 2.0 * TINY } else { 2.0 * val };
        let mut w = xb - ((xb - xc) * tmp2 - (xb - xa) * tmp1) / denom;
        let wlim = xb + GROW_LIMIT * (xc - xb);
        iter += 1;
        if iter > BRACKET_MAX_ITER {
            break;
        }
        let mut fw;
        if (w - xc) * (xb - w) > 0.0 {
            fw = g(w)?;
            if fw < fc {
                xa = xb;
                xb = w;
                fb = fw;
                break;
            } else if fw > fb {
                xc = w;
                break;
            }
            w = xc + GOLD * (xc - xb);
            fw = g(w)?;
        } else if (w - wlim) * (wlim - xc) >= 0.0 {
            w = wlim;
            fw = g(w)?;
        } else if (w - wlim) * (xc - w) > 0.0 {
            fw = g(w)?;
            if fw < fc {
                xb = xc;
                xc = w;
                w = xc + GOLD * (xc - xb);
                fc = fw;
                fw = g(w)?;
            }
        } else {
            w = xc + GOLD * (xc - xb);
            fw = g(w)?;
        }
        xa = xb;
        xb = xc;
        xc = w;
        fb = fc;
        fc = fw;
    }
    Ok(Bracket {
        a: xa,
        b: xb,
        c: xc,
        fb,
    })
}

/// Brent's parabolic-interpolation / golden-section minimizer on a bracket.
fn brent<G: FnMut(f64) -> Result<f64>>(g: &mut G, br: Bracket, tol: f64) -> Result<(f64, f64)> {
    let (mut a, mut b) = if br.a < br.c { (br.a, br.c) } else { (br.c, br.a) };
    let (mut x, mut w, mut v) = (br.b, br.b, br.b);
    let (mut fx, mut fw, mut fv) = (br.fb, br.fb, br.fb);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..BRENT_MAX_ITER {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + BRENT_ABS_TOL;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        if e.abs() > tol1 {
            // trial parabolic fit
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            if p.abs() >= (0.5 * q * e_prev).abs() || p <= q * (a - x) || p >= q * (b - x) {
                e = if x >= xm { a - x } else { b - x };
                d = CGOLD * e;
            } else {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
            }
        } else {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok((x, fx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn one_dimensional_quadratic() {
        let r = minimize(|x| (x[0] - 1.0).powi(2), &[5.0], &OptimizerOptions::default()).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.best_value < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_from_classic_start() {
        let r = minimize(rosenbrock, &[-1.2, 1.0], &OptimizerOptions::default()).unwrap();
        assert!((r.best_params[0] - 1.0).abs() < 1e-4, "{r:?}");
        assert!((r.best_params[1] - 1.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn brent_finds_parabola_vertex() {
        let mut g = |a: f64| Ok((a - 0.3).powi(2) + 2.0);
        let br = bracket(&mut g, 0.0, 1.0, 0.09 + 2.0).unwrap();
        assert!(br.fb <= g(br.a).unwrap() && br.fb <= g(br.c).unwrap());
        let (x, fx) = brent(&mut g, br, 1e-10).unwrap();
        // abscissa resolution is limited to ~sqrt(eps) on a quadratic
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_objective_aborts_with_params() {
        let err = minimize(
            |x| if x[0] > 2.0 { f64::NAN } else { -x[0] },
            &[0.0],
            &OptimizerOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::NonFiniteObjective { params } => assert!(params[0] > 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_is_not_an_error() {
        let opts = OptimizerOptions {
            max_evaluations: 10,
            ..Default::default()
        };
        let r = minimize(rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert!(!r.converged);
        assert!(r.best_value <= rosenbrock(&[-1.2, 1.0]));
    }

    #[test]
    fn invalid_options_rejected() {
        let bad = OptimizerOptions {
            ftol: 0.0,
            ..Default::default()
        };
        assert!(minimize(|x| x[0] * x[0], &[1.0], &bad).is_err());
        assert!(minimize(|x| x[0], &[], &OptimizerOptions::default()).is_err());
        assert!(minimize(|x| x[0], &[f64::NAN], &OptimizerOptions::default()).is_err());
    }
}
