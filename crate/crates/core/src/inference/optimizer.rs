//! Nelder–Mead simplex minimization.

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with an initial simplex of edge `step` along each
/// axis. Stops when the spread of function values over the simplex drops
/// below `tol` or after `max_evals` evaluations. Non-finite values count as
/// `+∞`, which keeps the search inside the feasible region.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> SimplexOutcome {
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if d == 0 {
        let fx = eval(x0, &mut evals);
        return SimplexOutcome { x: Vec::new(), fx, evaluations: evals, converged: true };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for k in 0..d {
        let mut x = x0.to_vec();
        x[k] += step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if worst.is_finite() && (worst - best).abs() < tol {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[d].0).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[d].1 {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[d].1.min(fr) {
            simplex[d] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
            let fx = eval(&x, &mut evals);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    SimplexOutcome { x, fx, evaluations: evals, converged }
}
