//! Derivative-free simplex minimizer (Nelder–Mead with the standard
//! reflection/expansion/contraction/shrink moves). Convergence is declared
//! when the relative spread of objective values across the simplex falls
//! below the configured tolerance.

/// Reflection, expansion, contraction, and shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iters: usize,
    /// Relative objective-spread tolerance.
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `start`, perturbing each coordinate by 5% (or a small
/// absolute step near zero) to build the initial simplex.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += if v[i].abs() > 1e-10 { 0.05 * v[i] } else { 2.5e-4 };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[worst] - values[best];
        if spread <= opts.tol * (values[best].abs() + 1e-300) || spread == 0.0 {
            converged = true;
            break;
        }

        // Centroid of all vertices but the worst.
        let mut centroid = vec![0.0; dim];
        for &idx in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let blend = |coef: f64, point: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(point)
                .map(|(c, p)| c + coef * (c - p))
                .collect()
        };

        let reflected = blend(REFLECT, &simplex[worst]);
        let f_reflected = f(&reflected);
        if f_reflected < values[second_worst] && f_reflected >= values[best] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else if f_reflected < values[best] {
            let expanded = blend(EXPAND, &simplex[worst]);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else {
            let contracted = blend(-CONTRACT, &simplex[worst]);
            let f_contracted = f(&contracted);
            if f_contracted < values[worst] {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                let pivot = simplex[best].clone();
                for (idx, vertex) in simplex.iter_mut().enumerate() {
                    if idx == best {
                        continue;
                    }
                    for (x, b) in vertex.iter_mut().zip(&pivot) {
                        *x = b + SHRINK * (*x - b);
                    }
                    values[idx] = f(vertex);
                }
            }
        }
        iterations += 1;
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.total_cmp(b))
        .map(|(i, _)| i)
        .expect("nonempty simplex");
    SimplexResult {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions {
        SimplexOptions {
            max_iters: 2000,
            tol: 1e-10,
        }
    }

    #[test]
    fn minimizes_shifted_quadratic() {
        let r = minimize(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5,
            &[0.0, 0.0],
            &opts(),
        );
        assert!(r.converged);
        assert!((r.point[0] - 1.5).abs() < 1e-5);
        assert!((r.point[1] + 2.0).abs() < 1e-5);
        assert!((r.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn minimizes_rosenbrock_valley() {
        let r = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &opts(),
        );
        assert!(r.converged);
        assert!((r.point[0] - 1.0).abs() < 1e-4);
        assert!((r.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn reports_non_convergence_at_iteration_cap() {
        let tight = SimplexOptions {
            max_iters: 3,
            tol: 1e-16,
        };
        let r = minimize(|x| x[0] * x[0] + x[1] * x[1], &[5.0, 5.0], &tight);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
