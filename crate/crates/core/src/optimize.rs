//! Derivative-free minimization.

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iters: 200, f_tol: 1e-12, initial_step: 0.1 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Nelder–Mead with the standard coefficients (1, 2, ½, ½).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: NelderMeadOptions) -> Minimum {
    let n = x0.len();
    if n == 0 {
        return Minimum { x: vec![], value: f(x0), iterations: 0, converged: true };
    }
    // vertex v lives in simplex[v*n..(v+1)*n]; kept sorted by value
    let mut simplex = Vec::with_capacity((n + 1) * n);
    let mut values = Vec::with_capacity(n + 1);
    for v in 0..=n {
        let start = simplex.len();
        simplex.extend_from_slice(x0);
        if v > 0 {
            simplex[start + v - 1] += opts.initial_step;
        }
        values.push(f(&simplex[start..start + n]));
    }
    let mut centroid = vec![0.0; n];
    let mut xr = vec![0.0; n];
    let mut xt = vec![0.0; n];

    let mut iterations = 0;
    let mut converged = false;
    loop {
        sort_simplex(&mut simplex, &mut values, n);
        if values[n] - values[0] <= opts.f_tol {
            converged = true;
            break;
        }
        if iterations == opts.max_iters {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in 0..n {
            for k in 0..n {
                centroid[k] += simplex[v * n + k];
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);
        let worst = n * n;
        let along = |t: f64, out: &mut [f64], simplex: &[f64]| {
            for k in 0..n {
                out[k] = centroid[k] + t * (simplex[worst + k] - centroid[k]);
            }
        };

        along(-1.0, &mut xr, &simplex);
        let fr = f(&xr);
        if fr < values[0] {
            along(-2.0, &mut xt, &simplex);
            let fe = f(&xt);
            if fe < fr {
                simplex[worst..].copy_from_slice(&xt);
                values[n] = fe;
            } else {
                simplex[worst..].copy_from_slice(&xr);
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[worst..].copy_from_slice(&xr);
            values[n] = fr;
        } else {
            along(if fr < values[n] { -0.5 } else { 0.5 }, &mut xt, &simplex);
            let fc = f(&xt);
            if fc < values[n].min(fr) {
                simplex[worst..].copy_from_slice(&xt);
                values[n] = fc;
            } else {
                // shrink toward the best vertex
                for v in 1..=n {
                    for k in 0..n {
                        simplex[v * n + k] = simplex[k] + 0.5 * (simplex[v * n + k] - simplex[k]);
                    }
                    values[v] = f(&simplex[v * n..(v + 1) * n]);
                }
            }
        }
    }

    Minimum { x: simplex[..n].to_vec(), value: values[0], iterations, converged }
}

/// Insertion sort of vertices by value; the simplex is nearly sorted between iterations.
fn sort_simplex(simplex: &mut [f64], values: &mut [f64], n: usize) {
    for i in 1..values.len() {
        let mut j = i;
        while j > 0 && values[j - 1] > values[j] {
            values.swap(j - 1, j);
            for k in 0..n {
                simplex.swap((j - 1) * n + k, j * n + k);
            }
            j -= 1;
        }
    }
}

/// Central-difference gradient, for checking objectives by hand.
pub fn finite_difference_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|k| {
            probe[k] = x[k] + h;
            let up = f(&probe);
            probe[k] = x[k] - h;
            let down = f(&probe);
            probe[k] = x[k];
            (up - down) / (2.0 * h)
        })
        .collect()
}
