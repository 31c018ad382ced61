//! Derivative-free minimisation and finite-difference helpers.
//!
//! [`cobyla_minimize`] follows Powell's COBYLA iteration (linear models on a
//! simplex of `n + 1` points, a trust region of radius `rho`, geometry-repair
//! steps, halving of `rho`) for the unconstrained case. With no constraints
//! the trust-region subproblem reduces to a steepest-descent step of length
//! `rho` on the linear model.

use crate::error::{Error, Result};

const ALPHA: f64 = 0.25;
const BETA: f64 = 2.1;
const GAMMA: f64 = 0.5;
const DELTA: f64 = 1.1;

/// Objective values at or above this are treated as failed evaluations.
const PENALTY: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBudget {
    pub max_evals: usize,
    /// Initial trust-region radius (`rhobeg`).
    pub initial_step: f64,
    /// Final trust-region radius (`rhoend`).
    pub final_step: f64,
}

impl ObjectiveBudget {
    pub fn new(max_evals: usize) -> Self {
        Self {
            max_evals,
            ..Self::default()
        }
    }
}

impl Default for ObjectiveBudget {
    fn default() -> Self {
        Self {
            max_evals: 1000,
            initial_step: 0.5,
            final_step: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CobylaResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// Objective value of every evaluation, in call order.
    pub history: Vec<f64>,
}

impl CobylaResult {
    /// Running minimum of [`history`](Self::history).
    pub fn best_so_far(&self) -> Vec<f64> {
        self.history
            .iter()
            .scan(f64::INFINITY, |best, &f| {
                *best = best.min(f);
                Some(*best)
            })
            .collect()
    }
}

/// Wraps the user objective with the evaluation budget and best-point
/// bookkeeping.
struct Tracker<F> {
    objective: F,
    max_evals: usize,
    history: Vec<f64>,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn exhausted(&self) -> bool {
        self.history.len() >= self.max_evals
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let raw = (self.objective)(x);
        self.history.push(raw);
        let f = if raw.is_finite() { raw.min(PENALTY) } else { PENALTY };
        if f < self.best_f {
            self.best_f = f;
            self.best_x.copy_from_slice(x);
        }
        f
    }

    fn finish(self) -> CobylaResult {
        CobylaResult {
            evals: self.history.len(),
            x: self.best_x,
            f: self.best_f,
            history: self.history,
        }
    }
}

/// Minimises `objective` from `x0` within `budget.max_evals` evaluations.
///
/// Returns the best point visited. The first evaluation is always `x0`, so
/// the result never exceeds `f(x0)`.
pub fn cobyla_minimize<F>(objective: F, x0: &[f64], budget: &ObjectiveBudget) -> Result<CobylaResult>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(budget.final_step > 0.0 && budget.final_step < budget.initial_step) {
        return Err(Error::Config(format!(
            "trust region radii must satisfy 0 < final ({}) < initial ({})",
            budget.final_step, budget.initial_step
        )));
    }
    let n = x0.len();
    let mut t = Tracker {
        objective,
        max_evals: budget.max_evals.max(1),
        history: Vec::with_capacity(budget.max_evals.min(1 << 16)),
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
    };
    let f0 = t.eval(x0);
    if !t.history[0].is_finite() {
        return Err(Error::NonFiniteStart(t.history[0]));
    }
    t.best_f = f0;
    if n == 0 || t.exhausted() {
        return Ok(t.finish());
    }

    let mut rho = budget.initial_step;
    let rho_end = budget.final_step;

    // The simplex matrices are only needed once the initial n + 1 points
    // are all evaluated; a smaller budget runs the probes alone.
    if t.max_evals < n + 1 {
        let mut base = x0.to_vec();
        let mut f_base = f0;
        for j in 0..n {
            if t.exhausted() {
                break;
            }
            let old = base[j];
            base[j] = old + rho;
            let f = t.eval(&base);
            if f_base <= f {
                base[j] = old;
            } else {
                f_base = f;
            }
        }
        return Ok(t.finish());
    }

    let mut s = Simplex::new(x0, f0, rho);
    for j in 0..n {
        let old = s.pivot[j];
        let mut x = s.pivot.clone();
        x[j] = old + rho;
        let f = t.eval(&x);
        s.add_initial_vertex(j, f, old + rho, rho);
    }

    let mut dx = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut vsig = vec![0.0; n];
    let mut veta = vec![0.0; n];
    let mut branch = true;

    'outer: loop {
        s.move_best_to_pivot();
        s.gradient(&mut grad);

        let parsig = ALPHA * rho;
        let pareta = BETA * rho;
        let mut acceptable = true;
        for j in 0..n {
            let wsig: f64 = s.simi_row(j).iter().map(|v| v * v).sum();
            let weta: f64 = (0..n).map(|i| s.sim(i, j).powi(2)).sum();
            vsig[j] = 1.0 / wsig.sqrt();
            veta[j] = weta.sqrt();
            if vsig[j] < parsig || veta[j] > pareta {
                acceptable = false;
            }
        }

        if !branch && !acceptable {
            // Geometry repair: replace the vertex that most distorts the
            // simplex with a point along the corresponding simi row.
            let mut jdrop = None;
            let mut worst = pareta;
            for j in 0..n {
                if veta[j] > worst {
                    jdrop = Some(j);
                    worst = veta[j];
                }
            }
            if jdrop.is_none() {
                for j in 0..n {
                    if vsig[j] < worst {
                        jdrop = Some(j);
                        worst = vsig[j];
                    }
                }
            }
            let jdrop = jdrop.expect("unacceptable simplex has a culprit vertex");
            let scale = GAMMA * rho * vsig[jdrop];
            for (d, si) in dx.iter_mut().zip(s.simi_row(jdrop)) {
                *d = scale * si;
            }
            let predicted: f64 = -dot(&grad, &dx);
            if predicted < 0.0 {
                dx.iter_mut().for_each(|d| *d = -*d);
            }
            if t.exhausted() {
                break;
            }
            s.replace_vertex(jdrop, &dx);
            let x: Vec<f64> = s.pivot.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let f = t.eval(&x);
            s.fv[jdrop] = f;
            branch = true;
            continue;
        }

        // Trust-region step on the linear model.
        let gnorm = scaled_norm(&grad);
        let full = gnorm > 0.0;
        if full {
            for (d, g) in dx.iter_mut().zip(&grad) {
                *d = -rho * (g / gnorm);
            }
        } else {
            dx.iter_mut().for_each(|d| *d = 0.0);
        }

        let mut reduce_rho = !full && dot(&dx, &dx) < 0.25 * rho * rho;
        if !reduce_rho {
            let mut predicted = -dot(&grad, &dx);
            if t.exhausted() {
                break;
            }
            let x: Vec<f64> = s.pivot.iter().zip(&dx).map(|(p, d)| p + d).collect();
            let f = t.eval(&x);
            let mut reduction = s.f_pivot - f;
            if f == s.f_pivot {
                predicted = 0.0;
                reduction = 0.0;
            }

            let mut ratio = if reduction <= 0.0 { 1.0 } else { 0.0 };
            let mut jdrop = None;
            let mut sigbar = vec![0.0; n];
            for j in 0..n {
                let temp = dot(s.simi_row(j), &dx).abs();
                if temp > ratio {
                    jdrop = Some(j);
                    ratio = temp;
                }
                sigbar[j] = temp * vsig[j];
            }
            let mut edgmax = DELTA * rho;
            let mut far = None;
            for j in 0..n {
                if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                    let mut temp = veta[j];
                    if reduction > 0.0 {
                        temp = (0..n).map(|i| (dx[i] - s.sim(i, j)).powi(2)).sum::<f64>().sqrt();
                    }
                    if temp > edgmax {
                        far = Some(j);
                        edgmax = temp;
                    }
                }
            }
            if far.is_some() {
                jdrop = far;
            }
            match jdrop {
                Some(j) => {
                    s.replace_vertex(j, &dx);
                    s.fv[j] = f;
                    if reduction > 0.0 && reduction >= 0.1 * predicted {
                        branch = true;
                        continue 'outer;
                    }
                    reduce_rho = true;
                }
                None => reduce_rho = true,
            }
        }

        if reduce_rho {
            if !acceptable {
                branch = false;
                continue;
            }
            if rho > rho_end {
                rho *= 0.5;
                if rho <= 1.5 * rho_end {
                    rho = rho_end;
                }
                branch = true;
                continue;
            }
            break;
        }
    }
    Ok(t.finish())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scaled_norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

/// Simplex state: pivot point plus `n` vertices stored as displacements
/// (`sim`, column per vertex) together with the inverse `simi`.
struct Simplex {
    n: usize,
    pivot: Vec<f64>,
    f_pivot: f64,
    fv: Vec<f64>,
    /// Row-major `n x n`: `sim[i * n + j]` is coordinate `i` of vertex `j`.
    sim: Vec<f64>,
    /// Row-major `n x n`: row `j` pairs with vertex `j`.
    simi: Vec<f64>,
}

impl Simplex {
    fn new(x0: &[f64], f0: f64, rho: f64) -> Self {
        let n = x0.len();
        let mut sim = vec![0.0; n * n];
        let mut simi = vec![0.0; n * n];
        for i in 0..n {
            sim[i * n + i] = rho;
            simi[i * n + i] = 1.0 / rho;
        }
        Self {
            n,
            pivot: x0.to_vec(),
            f_pivot: f0,
            fv: vec![0.0; n],
            sim,
            simi,
        }
    }

    fn sim(&self, i: usize, j: usize) -> f64 {
        self.sim[i * self.n + j]
    }

    fn simi_row(&self, j: usize) -> &[f64] {
        &self.simi[j * self.n..(j + 1) * self.n]
    }

    /// Records the probe `pivot + rho·e_j`; a better probe becomes the pivot.
    fn add_initial_vertex(&mut self, j: usize, f: f64, probe: f64, rho: f64) {
        let n = self.n;
        if self.f_pivot <= f {
            self.fv[j] = f;
            return;
        }
        self.pivot[j] = probe;
        self.fv[j] = self.f_pivot;
        self.f_pivot = f;
        // Moving the pivot by rho·e_j sets coordinate j of vertices 0..=j to
        // -rho: a rank-one change of sim, applied to simi by Sherman-Morrison.
        let u: Vec<f64> = (0..=j).map(|k| -rho - self.sim[j * n + k]).collect();
        let mut b = vec![0.0; n];
        for (k, &uk) in u.iter().enumerate() {
            if uk != 0.0 {
                for (bc, s) in b.iter_mut().zip(&self.simi[k * n..(k + 1) * n]) {
                    *bc += uk * s;
                }
            }
        }
        let denom = 1.0 + b[j];
        let a: Vec<f64> = (0..n).map(|r| self.simi[r * n + j]).collect();
        for (r, &ar) in a.iter().enumerate() {
            if ar != 0.0 {
                let scale = ar / denom;
                for (s, bc) in self.simi[r * n..(r + 1) * n].iter_mut().zip(&b) {
                    *s -= scale * bc;
                }
            }
        }
        for k in 0..=j {
            self.sim[j * n + k] = -rho;
        }
    }

    fn move_best_to_pivot(&mut self) {
        let n = self.n;
        let mut best = None;
        let mut f_min = self.f_pivot;
        for (j, &f) in self.fv.iter().enumerate() {
            if f < f_min {
                best = Some(j);
                f_min = f;
            }
        }
        let Some(b) = best else { return };
        std::mem::swap(&mut self.fv[b], &mut self.f_pivot);
        for i in 0..n {
            let temp = self.sim[i * n + b];
            self.sim[i * n + b] = 0.0;
            self.pivot[i] += temp;
            let mut tempa = 0.0;
            for k in 0..n {
                self.sim[i * n + k] -= temp;
                tempa -= self.simi[k * n + i];
            }
            self.simi[b * n + i] = tempa;
        }
    }

    /// Gradient of the linear interpolant through the simplex.
    fn gradient(&self, out: &mut [f64]) {
        let n = self.n;
        out.iter_mut().for_each(|g| *g = 0.0);
        for j in 0..n {
            let w = self.fv[j] - self.f_pivot;
            if w == 0.0 {
                continue;
            }
            for (g, s) in out.iter_mut().zip(&self.simi[j * n..(j + 1) * n]) {
                *g += w * s;
            }
        }
    }

    fn replace_vertex(&mut self, jdrop: usize, dx: &[f64]) {
        let n = self.n;
        let mut temp = 0.0;
        for i in 0..n {
            self.sim[i * n + jdrop] = dx[i];
            temp += self.simi[jdrop * n + i] * dx[i];
        }
        for v in &mut self.simi[jdrop * n..(jdrop + 1) * n] {
            *v /= temp;
        }
        let (before, rest) = self.simi.split_at_mut(jdrop * n);
        let (row, after) = rest.split_at_mut(n);
        for other in before.chunks_exact_mut(n).chain(after.chunks_exact_mut(n)) {
            let t = dot(other, dx);
            for (o, r) in other.iter_mut().zip(row.iter()) {
                *o -= t * r;
            }
        }
    }
}

/// `(f(x + h) - f(x - h)) / 2h`.
pub fn central_difference(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::StepTooSmall(h));
    }
    Ok((f(x + h) - f(x - h)) / (2.0 * h))
}

/// `(f(x + h) - 2f(x) + f(x - h)) / h²`, with `h >= 1e-6`.
pub fn second_central_difference(mut f: impl FnMut(f64) -> f64, x: f64, h: f64) -> Result<f64> {
    if !(h >= 1e-6) {
        return Err(Error::StepTooSmall(h));
    }
    Ok((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h))
}
