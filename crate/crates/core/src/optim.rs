//! Derivative-free Nelder-Mead simplex minimizer.
//!
//! Used for every maximum-likelihood fit in the crate. Parameters are
//! optimized on an unconstrained scale; callers supply the transforms.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Relative tolerance on the spread of objective values across the simplex.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Number of restarts from the best vertex after the first convergence.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_iter: 2000,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimize `objective` from `x0`, with initial simplex edge lengths `steps`.
///
/// Non-finite objective values are treated as `+inf`, so infeasible regions
/// can be signalled by returning `f64::INFINITY` or `NaN`.
pub fn minimize<F>(mut objective: F, x0: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), steps.len(), "one step per parameter");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x);
    let mut iterations = 0usize;
    let mut converged = false;

    for round in 0..=opts.restarts {
        let budget = opts.max_iter.saturating_sub(iterations);
        if budget == 0 {
            // Restarts out of budget keep the status of the previous round.
            break;
        }
        let (x, f, used, ok) = run_simplex(&mut eval, &best_x, best_f, steps, opts.rel_tol, budget);
        iterations += used;
        let improvement = best_f - f;
        let improved = f < best_f;
        if improved {
            best_x = x;
            best_f = f;
        }
        if !ok {
            // A restart that stalls without real improvement leaves the earlier optimum standing.
            converged = converged && !(improvement > opts.rel_tol * (best_f.abs() + opts.rel_tol));
            break;
        }
        converged = true;
        // A restart that cannot move the optimum confirms convergence.
        if round > 0 && !(improvement > opts.rel_tol * (best_f.abs() + opts.rel_tol)) {
            break;
        }
    }

    SimplexResult {
        x: best_x,
        f: best_f,
        iterations,
        evaluations,
        converged: converged && best_f.is_finite(),
    }
}

fn run_simplex<E>(
    eval: &mut E,
    x0: &[f64],
    f0: f64,
    steps: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, usize, bool)
where
    E: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    vals.push(f0);
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        vals.push(eval(&p));
        pts.push(p);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    for iter in 0..max_iter {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];

        let spread = vals[worst] - vals[best];
        if vals[best].is_finite() && spread <= rel_tol * (vals[best].abs() + rel_tol) {
            return (pts[best].clone(), vals[best], iter, true);
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[idx]) {
                *c += v;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        for j in 0..n {
            trial[j] = centroid[j] + REFLECT * (centroid[j] - pts[worst][j]);
        }
        let f_reflect = eval(&trial);

        if f_reflect < vals[best] {
            for j in 0..n {
                trial2[j] = centroid[j] + EXPAND * (trial[j] - centroid[j]);
            }
            let f_expand = eval(&trial2);
            if f_expand < f_reflect {
                pts[worst].copy_from_slice(&trial2);
                vals[worst] = f_expand;
            } else {
                pts[worst].copy_from_slice(&trial);
                vals[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < vals[second] {
            pts[worst].copy_from_slice(&trial);
            vals[worst] = f_reflect;
            continue;
        }

        // Contraction, outside if the reflection beat the worst vertex.
        let outside = f_reflect < vals[worst];
        for j in 0..n {
            trial2[j] = if outside {
                centroid[j] + CONTRACT * (trial[j] - centroid[j])
            } else {
                centroid[j] + CONTRACT * (pts[worst][j] - centroid[j])
            };
        }
        let f_contract = eval(&trial2);
        let accept = if outside {
            f_contract <= f_reflect
        } else {
            f_contract < vals[worst]
        };
        if accept {
            pts[worst].copy_from_slice(&trial2);
            vals[worst] = f_contract;
            continue;
        }

        let anchor = pts[best].clone();
        for &idx in &order[1..] {
            for j in 0..n {
                pts[idx][j] = anchor[j] + SHRINK * (pts[idx][j] - anchor[j]);
            }
            vals[idx] = eval(&pts[idx]);
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    (pts[best].clone(), vals[best], max_iter, false)
}
