//! Recovering the branch parameters from the rectangle aspect ratios
//! `ρ_k = h(P_k)/w(P_k)`, `k = 1 … g−1`.
//!
//! Damped Newton with a forward-difference Jacobian. Each trial step is
//! halved until the residual `‖ρ(a) − target‖∞` drops, and every iterate is
//! projected back into `1 < a₁ < ⋯ < a_{g−1}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;

use super::{dims_from_lengths, interval_lengths};

/// Target aspect ratios of `P₁ … P_{g−1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliTarget {
    rho: Vec<f64>,
}

impl ModuliTarget {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidTarget(
                "at least one aspect ratio is required".into(),
            ));
        }
        if let Some((i, r)) = rho
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::InvalidTarget(format!(
                "rho{} = {r} must be positive and finite",
                i + 1
            )));
        }
        Ok(ModuliTarget { rho })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertOptions {
    pub max_iterations: usize,
    /// Stop when `‖ρ(a) − target‖∞` is at most this.
    pub tolerance: f64,
    /// Relative forward-difference step.
    pub fd_step: f64,
    pub max_halvings: usize,
    pub quadrature: QuadratureConfig,
}

impl Default for InvertOptions {
    fn default() -> Self {
        InvertOptions {
            max_iterations: 100,
            tolerance: 1e-8,
            fd_step: 1e-6,
            max_halvings: 20,
            quadrature: QuadratureConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvertOutcome<T> {
    pub params: CurveParams<T>,
    pub iterations: usize,
    pub residual: f64,
    /// Residual after each accepted iterate, starting with the guess.
    pub trace: Vec<f64>,
}

/// Aspect ratios `h(P_k)/w(P_k)` for `k = 1 … g−1`.
pub fn moduli<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<Vec<T>> {
    let dims = dims_from_lengths(&interval_lengths(p, cfg)?);
    Ok(dims[1..].iter().map(|&(w, h)| h / w).collect())
}

fn residual_of<T: Real>(rho: &[T], target: &[f64]) -> f64 {
    rho.iter()
        .zip(target)
        .map(|(r, t)| (r.approx_f64() - t).abs())
        .fold(0.0, f64::max)
}

/// Forces `1 < a₁ < ⋯`: a component that falls to or below its lower bound
/// is put halfway across the gap it had in `old`.
fn project<T: Real>(candidate: &mut [T], old: &[T]) {
    for i in 0..candidate.len() {
        let lower = if i == 0 { T::one() } else { candidate[i - 1] };
        if !(candidate[i] > lower) {
            let old_lower = if i == 0 { T::one() } else { old[i - 1] };
            candidate[i] = lower + (old[i] - old_lower) * T::half();
        }
    }
}

fn jacobian<T: Real>(a: &[T], rho: &[T], opts: &InvertOptions) -> Result<Matrix<T>> {
    let n = a.len();
    let g = n + 1;
    let columns: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut step = a[i] * T::of_f64(opts.fd_step);
            let upper = if i + 1 < n { Some(a[i + 1]) } else { None };
            // step backwards when the next parameter is too close
            if upper.is_some_and(|u| a[i] + step >= u) {
                step = -step;
            }
            let mut shifted = a.to_vec();
            shifted[i] += step;
            let p = CurveParams::new(g, shifted)?;
            let r = moduli(&p, &opts.quadrature)?;
            Ok(r.iter().zip(rho).map(|(&x, &y)| (x - y) / step).collect())
        })
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(n, n, |row, col| columns[col][row]))
}

/// Solves `ρ(a) = target` starting from `guess`.
pub fn invert_moduli<T: Real>(
    genus: usize,
    target: &ModuliTarget,
    guess: &CurveParams<T>,
    opts: &InvertOptions,
) -> Result<InvertOutcome<T>> {
    if guess.genus() != genus {
        return Err(Error::InvalidTarget(format!(
            "guess has genus {}, expected {genus}",
            guess.genus()
        )));
    }
    if target.rho.len() != genus - 1 {
        return Err(Error::InvalidTarget(format!(
            "genus {genus} needs {} aspect ratios, got {}",
            genus - 1,
            target.rho.len()
        )));
    }
    opts.quadrature.validate()?;

    let mut a = guess.a().to_vec();
    let mut rho = moduli(guess, &opts.quadrature)?;
    let mut res = residual_of(&rho, &target.rho);
    let mut trace = vec![res];

    for iteration in 0..=opts.max_iterations {
        if res <= opts.tolerance {
            let params = CurveParams::new(genus, a)?;
            return Ok(InvertOutcome {
                params,
                iterations: iteration,
                residual: res,
                trace,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }
        let jac = jacobian(&a, &rho, opts)?;
        let lu = Lu::new(&jac).map_err(|_| Error::SingularJacobian {
            iteration,
            trace: trace.clone(),
        })?;
        let cond = lu.condition_one(&jac).approx_f64();
        if !cond.is_finite() || cond > 1e14 {
            return Err(Error::SingularJacobian { iteration, trace });
        }
        let rhs: Vec<T> = rho
            .iter()
            .zip(&target.rho)
            .map(|(&r, &t)| T::of_f64(t) - r)
            .collect();
        let delta = lu.solve_vec(&rhs);

        let mut lambda = T::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut cand: Vec<T> = a
                .iter()
                .zip(&delta)
                .map(|(&x, &d)| x + lambda * d)
                .collect();
            project(&mut cand, &a);
            let p = CurveParams::new(genus, cand.clone())?;
            if let Ok(r) = moduli(&p, &opts.quadrature) {
                let cres = residual_of(&r, &target.rho);
                if cres < res {
                    accepted = Some((cand, r, cres));
                    break;
                }
            }
            lambda *= T::half();
        }
        match accepted {
            Some((cand, r, cres)) => {
                log::debug!(
                    "newton iteration {iteration}: residual {cres:e}, step {}",
                    lambda.approx_f64()
                );
                a = cand;
                rho = r;
                res = cres;
                trace.push(res);
            }
            None => {
                return Err(Error::Infeasible {
                    iteration,
                    residual: res,
                    trace,
                })
            }
        }
    }
    Err(Error::MaxIterations {
        iterations: opts.max_iterations,
        residual: res,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_validation() {
        assert!(ModuliTarget::new(vec![]).is_err());
        assert!(ModuliTarget::new(vec![1.0, -1.0])
            .unwrap_err()
            .is_validation());
        assert!(ModuliTarget::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn projection_keeps_order() {
        let old = [1.5, 2.0, 3.0];
        let mut cand = [0.8, 1.9, 1.0];
        project(&mut cand, &old);
        assert!(
            cand[0] > 1.0 && cand[1] > cand[0] && cand[2] > cand[1],
            "{cand:?}"
        );
    }

    #[test]
    fn fixed_point_needs_no_iterations() {
        let p = CurveParams::new(2, vec![2.0]).unwrap();
        let rho = moduli(&p, &QuadratureConfig::default()).unwrap();
        let target = ModuliTarget::new(rho).unwrap();
        let out = invert_moduli(2, &target, &p, &InvertOptions::default()).unwrap();
        assert!(out.iterations <= 1);
    }

    #[test]
    fn genus_two_round_trip() {
        let truth = CurveParams::new(2, vec![2.0]).unwrap();
        let target =
            ModuliTarget::new(moduli(&truth, &QuadratureConfig::default()).unwrap()).unwrap();
        let guess = CurveParams::new(2, vec![3.0]).unwrap();
        let out = invert_moduli(2, &target, &guess, &InvertOptions::default()).unwrap();
        assert!((out.params.a()[0] - 2.0).abs() / 2.0 < 1e-6, "{out:?}");
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let truth = CurveParams::new(3, vec![2.0, 3.0]).unwrap();
        let target =
            ModuliTarget::new(moduli(&truth, &QuadratureConfig::default()).unwrap()).unwrap();
        let guess = CurveParams::new(3, vec![1.5, 6.0]).unwrap();
        let opts = InvertOptions {
            max_iterations: 1,
            ..Default::default()
        };
        let err = invert_moduli(3, &target, &guess, &opts).unwrap_err();
        assert!(matches!(err, Error::MaxIterations { .. }));
        assert_eq!(err.trace().unwrap().len(), 2);
    }
}
