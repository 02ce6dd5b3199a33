//! Nelder–Mead simplex minimization.

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            f_tol: 1e-12,
            x_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `start` with initial simplex edges `step`.
/// Non-finite values are treated as `+∞`.
pub fn nelder_mead<const N: usize>(
    mut f: impl FnMut(&[f64; N]) -> f64,
    start: [f64; N],
    step: [f64; N],
    opts: NelderMeadOptions,
) -> Minimum<N> {
    let mut eval = |x: &[f64; N], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut evals = 0;
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((start, eval(&start, &mut evals)));
    for k in 0..N {
        let mut x = start;
        x[k] += step[k];
        simplex.push((x, eval(&x, &mut evals)));
    }
    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[N].1;
        let spread = if best.is_finite() && worst.is_finite() {
            (worst - best).abs()
        } else {
            f64::INFINITY
        };
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol * (1.0 + best.abs()) && size <= opts.x_tol {
            converged = true;
            break;
        }
        if size <= opts.x_tol * 1e-3 {
            // Collapsed simplex on a plateau.
            converged = spread.is_finite();
            break;
        }

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for k in 0..N {
                centroid[k] += x[k] / N as f64;
            }
        }
        let along = |t: f64| {
            let mut y = [0.0; N];
            for k in 0..N {
                y[k] = centroid[k] + t * (simplex[N].0[k] - centroid[k]);
            }
            y
        };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[N] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[N - 1].1 {
            simplex[N] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[N].1 {
            let x = along(-0.5);
            (x, eval(&x, &mut evals))
        } else {
            let x = along(0.5);
            (x, eval(&x, &mut evals))
        };
        if fc < simplex[N].1.min(fr) {
            simplex[N] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0;
        for v in simplex.iter_mut().skip(1) {
            for k in 0..N {
                v.0[k] = x0[k] + 0.5 * (v.0[k] - x0[k]);
            }
            v.1 = eval(&v.0, &mut evals);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Minimum {
        x: simplex[0].0,
        value: simplex[0].1,
        evals,
        converged,
    }
}

fn dist<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}
