//! Clamped cubic B-spline bases on `[0, 1]` and the trainable activation
//! `g(x) = silu(x) + Σ_k c_k B_k(x)`.
//!
//! A grid with `num_grid` grids and `num_splines` splines carries
//! `num_grid · num_splines` basis functions. Coefficients are indexed by
//! `(s, l)` and flattened as `s · num_splines + l`, which is also the basis
//! index they multiply.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEGREE: usize = 3;

/// Least-squares sample count used when transferring coefficients to a
/// larger basis.
pub const REFINE_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct SplineGrid {
    num_grid: usize,
    num_splines: usize,
    knots: Vec<f64>,
}

/// Non-zero basis values at a point: `values[i]` belongs to basis
/// `first + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBasis {
    pub first: usize,
    pub values: [f64; DEGREE + 1],
}

impl SplineGrid {
    pub fn new(num_grid: usize, num_splines: usize) -> Result<Self> {
        let count = num_grid * num_splines;
        if count < DEGREE + 1 {
            return Err(Error::Config(format!(
                "spline grid {num_grid}x{num_splines} has fewer than {} basis functions",
                DEGREE + 1
            )));
        }
        let intervals = count - DEGREE;
        let mut knots = Vec::with_capacity(count + DEGREE + 1);
        knots.extend(std::iter::repeat_n(0.0, DEGREE));
        knots.extend((0..=intervals).map(|i| i as f64 / intervals as f64));
        knots.extend(std::iter::repeat_n(1.0, DEGREE));
        Ok(Self {
            num_grid,
            num_splines,
            knots,
        })
    }

    /// Spline count for adaptive epoch `epoch` (0-based): `4·(epoch + 2)`.
    pub fn splines_for_epoch(epoch: usize) -> usize {
        4 * (epoch + 2)
    }

    pub fn num_grid(&self) -> usize {
        self.num_grid
    }

    pub fn num_splines(&self) -> usize {
        self.num_splines
    }

    pub fn degree(&self) -> usize {
        DEGREE
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn num_basis(&self) -> usize {
        self.num_grid * self.num_splines
    }

    pub fn flat_index(&self, s: usize, l: usize) -> usize {
        s * self.num_splines + l
    }

    fn check_domain(x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::SplineDomain(x));
        }
        Ok(())
    }

    /// Knot span `i` with `knots[i] <= x < knots[i + 1]`; the right end maps
    /// onto the last non-degenerate span.
    fn span(&self, x: f64) -> usize {
        let last = self.num_basis() - 1;
        if x >= 1.0 {
            return last;
        }
        let intervals = (self.num_basis() - DEGREE) as f64;
        let mut i = (DEGREE + (x * intervals) as usize).min(last);
        while i > DEGREE && x < self.knots[i] {
            i -= 1;
        }
        while i < last && x >= self.knots[i + 1] {
            i += 1;
        }
        i
    }

    /// The `DEGREE + 1` basis functions that can be non-zero at `x`,
    /// by the triangular Cox–de Boor scheme.
    pub fn local_basis(&self, x: f64) -> Result<LocalBasis> {
        Self::check_domain(x)?;
        Ok(self.local_basis_unchecked(x))
    }

    pub(crate) fn local_basis_unchecked(&self, x: f64) -> LocalBasis {
        let span = self.span(x);
        let t = &self.knots;
        let mut n = [0.0; DEGREE + 1];
        let mut left = [0.0; DEGREE + 1];
        let mut right = [0.0; DEGREE + 1];
        n[0] = 1.0;
        for j in 1..=DEGREE {
            left[j] = x - t[span + 1 - j];
            right[j] = t[span + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        LocalBasis {
            first: span - DEGREE,
            values: n,
        }
    }

    /// Value of basis function `k` at `x` via the Cox–de Boor recursion on
    /// that single function.
    pub fn basis_eval(&self, k: usize, x: f64) -> Result<f64> {
        Self::check_domain(x)?;
        let count = self.num_basis();
        if k >= count {
            return Err(Error::BasisIndex { index: k, count });
        }
        let t = &self.knots;
        let p = DEGREE;
        // Clamped ends: the first/last function is exactly 1 at its end.
        if (k == 0 && x == t[0]) || (k == count - 1 && x == t[t.len() - 1]) {
            return Ok(1.0);
        }
        if x < t[k] || x >= t[k + p + 1] {
            return Ok(0.0);
        }
        let mut n = [0.0; DEGREE + 1];
        for (j, nj) in n.iter_mut().enumerate() {
            *nj = if x >= t[k + j] && x < t[k + j + 1] { 1.0 } else { 0.0 };
        }
        for d in 1..=p {
            let mut saved = if n[0] == 0.0 {
                0.0
            } else {
                (x - t[k]) * n[0] / (t[k + d] - t[k])
            };
            for j in 0..=p - d {
                let (lo, hi) = (t[k + j + 1], t[k + j + d + 1]);
                if n[j + 1] == 0.0 {
                    n[j] = saved;
                    saved = 0.0;
                } else {
                    let temp = n[j + 1] / (hi - lo);
                    n[j] = saved + (hi - x) * temp;
                    saved = (x - lo) * temp;
                }
            }
        }
        Ok(n[0])
    }
}

/// `x / (exp(-x) + 1)`.
pub fn silu(x: f64) -> f64 {
    x / ((-x).exp() + 1.0)
}

/// Trainable weights `c[s][l]` of one ansatz term.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationCoefficients {
    num_grid: usize,
    num_splines: usize,
    values: Vec<f64>,
}

impl ActivationCoefficients {
    pub fn zeros(grid: &SplineGrid) -> Self {
        Self {
            num_grid: grid.num_grid(),
            num_splines: grid.num_splines(),
            values: vec![0.0; grid.num_basis()],
        }
    }

    pub fn from_values(grid: &SplineGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_basis() {
            return Err(Error::Length {
                expected: grid.num_basis(),
                actual: values.len(),
            });
        }
        Ok(Self {
            num_grid: grid.num_grid(),
            num_splines: grid.num_splines(),
            values,
        })
    }

    pub fn get(&self, s: usize, l: usize) -> f64 {
        self.values[s * self.num_splines + l]
    }

    pub fn set(&mut self, s: usize, l: usize, value: f64) {
        self.values[s * self.num_splines + l] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn matches(&self, grid: &SplineGrid) -> bool {
        self.num_grid == grid.num_grid() && self.num_splines == grid.num_splines()
    }

    /// Spline part `Σ c_k B_k` given precomputed local basis values.
    pub(crate) fn spline_part(&self, basis: &LocalBasis) -> f64 {
        let c = &self.values[basis.first..basis.first + DEGREE + 1];
        c.iter().zip(&basis.values).map(|(c, b)| c * b).sum()
    }
}

pub fn activation_eval(grid: &SplineGrid, coeffs: &ActivationCoefficients, x: f64) -> Result<f64> {
    if !coeffs.matches(grid) {
        return Err(Error::Length {
            expected: grid.num_basis(),
            actual: coeffs.len(),
        });
    }
    let basis = grid.local_basis(x)?;
    Ok(silu(x) + coeffs.spline_part(&basis))
}

/// Least-squares transfer of spline coefficients onto a larger basis.
///
/// The normal matrix depends only on the two grids, so one `Refiner` can
/// move every term of a model.
pub struct Refiner {
    old: SplineGrid,
    new: SplineGrid,
    samples: Vec<LocalBasis>,
    points: Vec<f64>,
    normal: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Refiner {
    pub fn new(old: &SplineGrid, new_num_splines: usize) -> Result<Self> {
        if new_num_splines <= old.num_splines() {
            return Err(Error::Shrink {
                from: old.num_splines(),
                to: new_num_splines,
            });
        }
        let new = SplineGrid::new(old.num_grid(), new_num_splines)?;
        let m = new.num_basis();
        let count = REFINE_SAMPLES.max(2 * m);
        let points: Vec<f64> = (0..count).map(|i| i as f64 / (count - 1) as f64).collect();
        let samples: Vec<LocalBasis> = points.iter().map(|&x| new.local_basis_unchecked(x)).collect();

        let mut gram = DMatrix::<f64>::zeros(m, m);
        for b in &samples {
            for (i, vi) in b.values.iter().enumerate() {
                for (j, vj) in b.values.iter().enumerate() {
                    gram[(b.first + i, b.first + j)] += vi * vj;
                }
            }
        }
        let normal = nalgebra::Cholesky::new(gram)
            .ok_or_else(|| Error::Config("refinement normal matrix is singular".into()))?;
        Ok(Self {
            old: old.clone(),
            new,
            samples,
            points,
            normal,
        })
    }

    pub fn grid(&self) -> &SplineGrid {
        &self.new
    }

    pub fn transfer(&self, coeffs: &ActivationCoefficients) -> Result<ActivationCoefficients> {
        if !coeffs.matches(&self.old) {
            return Err(Error::Length {
                expected: self.old.num_basis(),
                actual: coeffs.len(),
            });
        }
        let mut rhs = DVector::<f64>::zeros(self.new.num_basis());
        for (&x, b) in self.points.iter().zip(&self.samples) {
            let y = coeffs.spline_part(&self.old.local_basis_unchecked(x));
            for (i, v) in b.values.iter().enumerate() {
                rhs[b.first + i] += v * y;
            }
        }
        let solved = self.normal.solve(&rhs);
        ActivationCoefficients::from_values(&self.new, solved.iter().copied().collect())
    }
}

pub fn refine(
    grid: &SplineGrid,
    coeffs: &ActivationCoefficients,
    new_num_splines: usize,
) -> Result<(SplineGrid, ActivationCoefficients)> {
    let refiner = Refiner::new(grid, new_num_splines)?;
    let moved = refiner.transfer(coeffs)?;
    Ok((refiner.new, moved))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SplineGrid {
        SplineGrid::new(8, 8).unwrap()
    }

    #[test]
    fn knot_layout() {
        let g = grid();
        assert_eq!(g.num_basis(), 64);
        assert_eq!(g.knots().len(), 68);
        assert!(g.knots().windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(&g.knots()[..4], &[0.0; 4]);
        assert_eq!(&g.knots()[64..], &[1.0; 4]);
        assert!(SplineGrid::new(1, 3).is_err());
    }

    #[test]
    fn partition_of_unity_at_a_point() {
        let g = grid();
        let total: f64 = (0..g.num_basis()).map(|k| g.basis_eval(k, 0.37).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clamped_endpoints() {
        let g = grid();
        assert_eq!(g.basis_eval(0, 0.0).unwrap(), 1.0);
        assert_eq!(g.basis_eval(63, 1.0).unwrap(), 1.0);
        assert_eq!(g.basis_eval(1, 0.0).unwrap(), 0.0);
        let right = g.local_basis(1.0).unwrap();
        assert_eq!(right.first, 60);
        assert_eq!(right.values[3], 1.0);
    }

    #[test]
    fn single_and_local_evaluations_agree() {
        let g = SplineGrid::new(8, 12).unwrap();
        for i in 0..=400 {
            let x = i as f64 / 400.0;
            let local = g.local_basis(x).unwrap();
            for k in 0..g.num_basis() {
                let expect = if (local.first..local.first + 4).contains(&k) {
                    local.values[k - local.first]
                } else {
                    0.0
                };
                assert!((g.basis_eval(k, x).unwrap() - expect).abs() < 1e-13, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn domain_and_index_errors() {
        let g = grid();
        assert!(matches!(g.basis_eval(0, 1.5), Err(Error::SplineDomain(_))));
        assert!(matches!(g.basis_eval(64, 0.5), Err(Error::BasisIndex { index: 64, count: 64 })));
        assert!(g.local_basis(-0.1).is_err());
    }

    #[test]
    fn silu_values() {
        assert_eq!(silu(0.0), 0.0);
        assert!((silu(1.0) - 1.0 / ((-1.0f64).exp() + 1.0)).abs() < 1e-15);
        assert!((silu(1.0) - 0.7310585786300049).abs() < 1e-12);
        let tiny = silu(-50.0);
        assert!(tiny.is_finite() && tiny.abs() < 1e-19);
        assert!(silu(-800.0).abs() < 1e-300);
    }

    #[test]
    fn activation_forms() {
        let g = grid();
        let zero = ActivationCoefficients::zeros(&g);
        let ones = ActivationCoefficients::from_values(&g, vec![1.0; 64]).unwrap();
        let mut single = zero.clone();
        single.set(2, 5, 2.0);
        let k = g.flat_index(2, 5);
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((activation_eval(&g, &zero, x).unwrap() - silu(x)).abs() < 1e-15);
            assert!((activation_eval(&g, &ones, x).unwrap() - silu(x) - 1.0).abs() < 1e-12);
            let expect = silu(x) + 2.0 * g.basis_eval(k, x).unwrap();
            assert!((activation_eval(&g, &single, x).unwrap() - expect).abs() < 1e-13);
        }
        let wrong = ActivationCoefficients::zeros(&SplineGrid::new(8, 12).unwrap());
        assert!(activation_eval(&g, &wrong, 0.5).is_err());
    }

    #[test]
    fn refine_schedule_and_zero_transfer() {
        let sizes: Vec<usize> = (0..3).map(SplineGrid::splines_for_epoch).collect();
        assert_eq!(sizes, vec![8, 12, 16]);

        let g = grid();
        let (fine, moved) = refine(&g, &ActivationCoefficients::zeros(&g), 12).unwrap();
        assert_eq!(fine.num_basis(), 96);
        assert!(moved.values().iter().all(|v| v.abs() < 1e-12));
        assert!(matches!(
            refine(&g, &ActivationCoefficients::zeros(&g), 8),
            Err(Error::Shrink { from: 8, to: 8 })
        ));
    }
}
