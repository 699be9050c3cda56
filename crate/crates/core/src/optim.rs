//! Derivative-free minimization with the Nelder-Mead simplex method.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Maximum number of objective evaluations, including the start point.
    pub max_evals: usize,
    /// Per-axis offset of the initial simplex vertices.
    pub initial_step: f64,
    /// Stop once the spread of simplex values falls below this.
    pub ftol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { reflection: 1.0, expansion: 2.0, contraction: 0.5, shrink: 0.5, max_evals: 200, initial_step: 0.25, ftol: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// The evaluation budget ran out before convergence.
    pub exhausted: bool,
}

struct Counted<F> {
    f: F,
    evals: usize,
    best: (Vec<f64>, f64),
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        v
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl NelderMead {
    /// Minimizes `f` from `x0`; the result is never worse than `f(x0)`.
    pub fn minimize<F: FnMut(&[f64]) -> f64>(&self, f: F, x0: &[f64]) -> Minimum {
        let n = x0.len();
        let mut obj = Counted { f, evals: 0, best: (x0.to_vec(), f64::INFINITY) };
        let f0 = obj.eval(x0);
        if n == 0 || self.max_evals <= 1 {
            return Minimum { x: x0.to_vec(), value: f0, evals: obj.evals, exhausted: self.max_evals <= 1 && n > 0 };
        }
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
        for i in 0..n {
            if obj.evals >= self.max_evals {
                break;
            }
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            let fv = obj.eval(&v);
            simplex.push((v, fv));
        }
        let mut exhausted = simplex.len() < n + 1;
        while !exhausted {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if (simplex[n].1 - simplex[0].1).abs() <= self.ftol {
                break;
            }
            if obj.evals >= self.max_evals {
                exhausted = true;
                break;
            }
            let centroid: Vec<f64> =
                (0..n).map(|k| simplex[..n].iter().map(|(v, _)| v[k]).sum::<f64>() / n as f64).collect();
            let worst = simplex[n].clone();
            let reflected = lerp(&centroid, &worst.0, -self.reflection);
            let fr = obj.eval(&reflected);
            if fr < simplex[0].1 {
                if obj.evals >= self.max_evals {
                    simplex[n] = (reflected, fr);
                    continue;
                }
                let expanded = lerp(&centroid, &worst.0, -self.expansion);
                let fe = obj.eval(&expanded);
                simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            if obj.evals >= self.max_evals {
                exhausted = true;
                break;
            }
            let (towards, ft) = if fr < worst.1 { (reflected.clone(), fr) } else { (worst.0.clone(), worst.1) };
            let contracted = lerp(&centroid, &towards, self.contraction);
            let fc = obj.eval(&contracted);
            if fc < ft {
                simplex[n] = (contracted, fc);
                continue;
            }
            let best = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                if obj.evals >= self.max_evals {
                    exhausted = true;
                    break;
                }
                let v = lerp(&best, &vertex.0, self.shrink);
                let fv = obj.eval(&v);
                *vertex = (v, fv);
            }
        }
        let (x, value) = obj.best;
        Minimum { x, value, evals: obj.evals, exhausted }
    }
}
