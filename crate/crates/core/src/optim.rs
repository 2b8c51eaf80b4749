//! Derivative-free local minimization (Nelder–Mead).

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Stop when `f_max - f_min <= ftol * (|f_min| + 1e-300)` over the simplex.
    pub ftol: f64,
    /// ... and the simplex diameter is below `xtol` times the initial step.
    pub xtol: f64,
    pub max_evals: usize,
    /// Number of times the search is restarted from its own best vertex.
    pub polish_rounds: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { ftol: 1e-15, xtol: 1e-10, max_evals: 20_000, polish_rounds: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

impl NelderMead {
    /// Minimizes `f` starting from `x0` with initial axis steps of size `step`.
    pub fn minimize<F: Fn(&[f64]) -> f64>(&self, f: F, x0: &[f64], step: f64) -> Minimum {
        let mut best = self.run(&f, x0, step);
        let mut evals = best.evals;
        for _ in 0..self.polish_rounds {
            let again = self.run(&f, &best.x, step * 1e-2);
            evals += again.evals;
            let improved = again.value < best.value;
            let gain = best.value - again.value;
            if improved {
                best = again;
            }
            if !improved || gain <= self.ftol * best.value.abs() {
                break;
            }
        }
        best.evals = evals;
        best
    }

    fn run<F: Fn(&[f64]) -> f64>(&self, f: &F, x0: &[f64], step: f64) -> Minimum {
        let n = x0.len();
        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(x0.to_vec());
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += step;
            simplex.push(v);
        }
        let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
        let mut evals = n + 1;

        while evals < self.max_evals {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if spread <= self.ftol * (values[0].abs() + 1e-300) && diameter <= self.xtol * step.abs().max(1e-300) {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
            };

            let reflected = along(-1.0);
            let fr = f(&reflected);
            evals += 1;
            if fr < values[0] {
                let expanded = along(-2.0);
                let fe = f(&expanded);
                evals += 1;
                if fe < fr {
                    simplex[n] = expanded;
                    values[n] = fe;
                } else {
                    simplex[n] = reflected;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = reflected;
                values[n] = fr;
                continue;
            }
            let (contracted, fc) = if fr < values[n] {
                let c = along(-0.5);
                let fc = f(&c);
                (c, fc)
            } else {
                let c = along(0.5);
                let fc = f(&c);
                (c, fc)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
                continue;
            }
            // shrink towards the best vertex
            for i in 1..=n {
                let shrunk: Vec<f64> =
                    simplex[0].iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
                values[i] = f(&shrunk);
                simplex[i] = shrunk;
            }
            evals += n;
        }

        let (i_best, _) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("simplex is never empty");
        Minimum { x: simplex[i_best].clone(), value: values[i_best], evals }
    }
}
