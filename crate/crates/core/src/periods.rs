//! The period matrix `Π = i·Y` with `Y = Π₀⁻¹ M Π₀ N`.
//!
//! Π₀ collects the real integrals `I_{j,k}` (see [`crate::curve::entry_table`]),
//! `M = diag(1, −1, 1, …)` and `N` is the signed anti-triangular matrix
//! `N_{j,k} = (−1)^{g+1−j−k}` for `j + k ≤ g + 1`. Only the real matrix `Y` is
//! ever stored; the factor `i` is implicit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::CurveParams;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, equilibrate_rows, IntMatrix, Lu, Matrix};
use crate::polygon;
use crate::quadrature::{entry_result, QuadratureConfig};
use crate::scalar::{Precision, Real};

/// Π₀ together with the integer matrices and the solved `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSet<T> {
    pub pi0: Matrix<T>,
    pub m: IntMatrix,
    pub n: IntMatrix,
    /// Raw solve output; `Π = i·Y`. Not symmetrized.
    pub y: Matrix<T>,
    /// Total quadrature nodes spent on Π₀.
    pub nodes_total: usize,
    /// One-norm condition estimate of the row-equilibrated Π₀.
    pub condition: f64,
}

impl<T: Real> PeriodSet<T> {
    pub fn genus(&self) -> usize {
        self.y.rows()
    }

    /// `(Y + Yᵀ)/2`, used only for the positive-definiteness check.
    pub fn y_symmetrized(&self) -> Matrix<T> {
        self.y.symmetrized()
    }
}

/// Basis change from the `β` to the `γ` cycles: `γ_j = Σ_{k ≥ j} (−1)^{k−j} β_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaCoeffs {
    /// Lower triangular; column `j` holds the `β`-coefficients of `γ_j`.
    pub t: IntMatrix,
}

/// A real matrix that may carry an implicit factor `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMatrix<T> {
    pub values: Matrix<T>,
    pub imaginary: bool,
}

/// The three period blocks over the `α`, `β` and `γ` cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct Abc<T> {
    pub a: ScaledMatrix<T>,
    pub b: ScaledMatrix<T>,
    pub c: ScaledMatrix<T>,
}

/// `M_{j,k} = (−1)^{j−1} δ_{j,k}`.
pub fn build_m(genus: usize) -> IntMatrix {
    Matrix::from_fn(genus, genus, |i, j| {
        if i != j {
            0
        } else if i % 2 == 0 {
            1
        } else {
            -1
        }
    })
}

/// `N_{j,k} = (−1)^{g+1−j−k}` when `j + k ≤ g + 1`, else 0 (1-based indices).
pub fn build_n(genus: usize) -> IntMatrix {
    Matrix::from_fn(genus, genus, |i, j| {
        let (j1, k1) = (i + 1, j + 1);
        if j1 + k1 > genus + 1 {
            0
        } else if (genus + 1 - j1 - k1).is_multiple_of(2) {
            1
        } else {
            -1
        }
    })
}

/// Anti-diagonal flip `J_{j,k} = δ_{j+k, g+1}`.
pub fn flip(genus: usize) -> IntMatrix {
    Matrix::from_fn(genus, genus, |i, j| i64::from(i + j + 1 == genus))
}

pub fn gamma_coeffs(genus: usize) -> GammaCoeffs {
    GammaCoeffs {
        t: Matrix::from_fn(genus, genus, |k, j| {
            if k < j {
                0
            } else if (k - j) % 2 == 0 {
                1
            } else {
                -1
            }
        }),
    }
}

fn assemble_pi0<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<(Matrix<T>, usize)> {
    cfg.validate()?;
    let g = p.genus();
    let table = p.entry_table();
    let results = table
        .par_iter()
        .map(|e| {
            let r = entry_result(p, e, cfg)?;
            if !r.converged {
                return Err(Error::EntryNotConverged {
                    j: e.j,
                    k: e.k,
                    estimate: r.abs_error_estimate,
                    nodes: r.nodes_used,
                });
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes = results.iter().map(|r| r.nodes_used).sum();
    let mut it = results.into_iter();
    let pi0 = Matrix::from_fn(g, g, |_, _| it.next().expect("one result per entry").value);
    Ok((pi0, nodes))
}

/// The real matrix Π₀ of integrals `I_{j,k}`. Entries are evaluated in
/// parallel; the result does not depend on scheduling.
pub fn build_pi0<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<Matrix<T>> {
    assemble_pi0(p, cfg).map(|(m, _)| m)
}

/// `A = 2Π₀`, `B = 2i·MΠ₀J`, `C = 2i·MΠ₀N`.
pub fn build_abc<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<Abc<T>> {
    Ok(abc_from_pi0(&build_pi0(p, cfg)?))
}

pub fn abc_from_pi0<T: Real>(pi0: &Matrix<T>) -> Abc<T> {
    let g = pi0.rows();
    let two = T::two();
    let mp = &build_m(g).to_real::<T>() * pi0;
    Abc {
        a: ScaledMatrix {
            values: pi0.scale(two),
            imaginary: false,
        },
        b: ScaledMatrix {
            values: (&mp * &flip(g).to_real()).scale(two),
            imaginary: true,
        },
        c: ScaledMatrix {
            values: (&mp * &build_n(g).to_real()).scale(two),
            imaginary: true,
        },
    }
}

/// Solves `Π₀ Y = M Π₀ N`. Rows of Π₀ are first scaled by powers of two
/// (`D Π₀`); because `D` and `M` are both diagonal, `(DΠ₀)⁻¹ M (DΠ₀) N` is the
/// same `Y`, and the scaled system has a meaningful condition estimate even
/// when the rows differ by many orders of magnitude.
pub fn solve_y<T: Real>(pi0: &Matrix<T>) -> Result<(Matrix<T>, f64)> {
    let g = pi0.rows();
    let (scaled, _) = equilibrate_rows(pi0);
    let lu = Lu::new(&scaled).map_err(|_| Error::Singular {
        condition: f64::INFINITY,
    })?;
    let condition = lu.condition_one(&scaled).approx_f64();
    if !condition.is_finite() || condition * T::epsilon().approx_f64() > 1.0 {
        return Err(Error::Singular { condition });
    }
    let rhs = &(&build_m(g).to_real::<T>() * &scaled) * &build_n(g).to_real();
    Ok((lu.solve(&rhs), condition))
}

pub fn period_matrix<T: Real>(p: &CurveParams<T>, cfg: &QuadratureConfig) -> Result<PeriodSet<T>> {
    let g = p.genus();
    let (pi0, nodes_total) = assemble_pi0(p, cfg)?;
    let (y, condition) = solve_y(&pi0)?;
    log::debug!("genus {g}: {nodes_total} quadrature nodes, condition {condition:e}");
    Ok(PeriodSet {
        pi0,
        m: build_m(g),
        n: build_n(g),
        y,
        nodes_total,
        condition,
    })
}

/// `(p, q, r, s)` read off a genus-2 Π₀ `[[p, q], [r, s]]`.
fn pqrs<T: Real>(pi0: &Matrix<T>) -> (T, T, T, T) {
    (pi0[(0, 0)], pi0[(0, 1)], pi0[(1, 0)], pi0[(1, 1)])
}

/// `Y = [[2qs − pr, pr], [pr, −2pr]] / (ps − qr)` from a genus-2 Π₀.
pub fn genus2_from_pi0<T: Real>(pi0: &Matrix<T>) -> Result<Matrix<T>> {
    if pi0.rows() != 2 {
        return Err(Error::NotGenusTwo(pi0.rows()));
    }
    let (p, q, r, s) = pqrs(pi0);
    let det = p * s - q * r;
    let floor = T::of_f64(64.0) * T::epsilon() * ((p * s).abs() + (q * r).abs());
    if !(det.abs() > floor) {
        return Err(Error::DegenerateClosedForm(det.abs().approx_f64()));
    }
    let two = T::two();
    let pr = p * r;
    let y = Matrix::from_rows(&[vec![two * q * s - pr, pr], vec![pr, -(two * pr)]]).expect("2x2");
    Ok(y.map(|x| x / det))
}

pub fn genus2_closed_form<T: Real>(
    p: &CurveParams<T>,
    cfg: &QuadratureConfig,
) -> Result<Matrix<T>> {
    if p.genus() != 2 {
        return Err(Error::NotGenusTwo(p.genus()));
    }
    genus2_from_pi0(&build_pi0(p, cfg)?)
}

/// `|pr − ps − qr| / (|pr| + |ps| + |qr|)` for a genus-2 Π₀.
pub fn genus2_identity_residual<T: Real>(pi0: &Matrix<T>) -> f64 {
    let (p, q, r, s) = pqrs(pi0);
    let (pr, ps, qr) = (p * r, p * s, q * r);
    ((pr - ps - qr).abs() / (pr.abs() + ps.abs() + qr.abs())).approx_f64()
}

/// Diagnostics for a computed period matrix. All fields are nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max |Y − Yᵀ|`.
    pub symmetry: f64,
    /// `‖Y‖∞`, the scale the symmetry gate is relative to.
    pub y_norm_inf: f64,
    /// Real part of Π; zero by construction.
    pub re_part: f64,
    /// `|det Y − 1|`, i.e. the distance of `det Π` from `i^g`.
    pub det_minus_one: f64,
    /// Cholesky of `(Y + Yᵀ)/2` succeeded.
    pub cholesky_ok: bool,
    /// Normalized square-condition residual of the interval lengths.
    pub square_condition: f64,
    /// `max |Y_closed − Y|`, genus 2 only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form_delta: Option<f64>,
    /// Largest relative mismatch among `C = B·T` and `A⁻¹C = Y`.
    pub lemma_consistency: f64,
}

pub fn residuals<T: Real>(
    ps: &PeriodSet<T>,
    p: &CurveParams<T>,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let g = ps.genus();
    let y = &ps.y;
    let symmetry = y.max_abs_diff(&y.transpose()).approx_f64();
    let y_norm = y.norm_inf().approx_f64();
    // a check that cannot be carried out is reported as f64::MAX, which
    // fails every gate and still serializes as a JSON number
    let det_minus_one = match Lu::new(y) {
        Ok(lu) => (lu.det() - T::one()).abs().approx_f64(),
        Err(_) => f64::MAX,
    };
    let cholesky_ok = cholesky(&ps.y_symmetrized()).is_some();
    let square_condition = polygon::square_condition_residual(p, cfg)?;
    let closed_form_delta = if g == 2 {
        Some(match genus2_from_pi0(&ps.pi0) {
            Ok(cf) => cf.max_abs_diff(y).approx_f64(),
            Err(_) => f64::MAX,
        })
    } else {
        None
    };
    Ok(ResidualReport {
        symmetry,
        y_norm_inf: y_norm,
        re_part: 0.0,
        det_minus_one,
        cholesky_ok,
        square_condition,
        closed_form_delta,
        lemma_consistency: lemma_consistency(&ps.pi0, y),
    })
}

/// Cross-checks of the `A`, `B`, `C` blocks against each other and against
/// `Y`. The solve here is a plain LU of `A`, independent of the equilibrated
/// path used for `Y`.
pub fn lemma_consistency<T: Real>(pi0: &Matrix<T>, y: &Matrix<T>) -> f64 {
    let g = pi0.rows();
    let abc = abc_from_pi0(pi0);
    let bt = &abc.b.values * &gamma_coeffs(g).t.to_real();
    let scale_c = abc.c.values.max_abs_real().max(T::one());
    let d_bt = (bt.max_abs_diff(&abc.c.values) / scale_c).approx_f64();
    let d_y = match Lu::new(&abc.a.values) {
        Ok(lu) => {
            let y_abc = lu.solve(&abc.c.values);
            (y_abc.max_abs_diff(y) / y.max_abs_real().max(T::one())).approx_f64()
        }
        Err(_) => f64::MAX,
    };
    d_bt.max(d_y)
}

/// Thresholds applied to a [`ResidualReport`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualGates {
    /// Relative to `max(1, ‖Y‖∞)`.
    pub symmetry: f64,
    pub det: f64,
    pub square: f64,
    pub closed_form: f64,
    pub lemma: f64,
}

impl ResidualGates {
    pub fn for_precision(precision: Precision) -> Self {
        match precision {
            Precision::Standard => ResidualGates {
                symmetry: 1e-8,
                det: 1e-8,
                square: 1e-10,
                closed_form: 1e-8,
                lemma: 1e-10,
            },
            Precision::Extended => ResidualGates {
                symmetry: 1e-20,
                det: 1e-20,
                square: 1e-20,
                closed_form: 1e-20,
                lemma: 1e-20,
            },
        }
    }

    /// One outcome per gate, in a fixed order.
    pub fn evaluate(&self, r: &ResidualReport) -> Vec<GateOutcome> {
        let mut out = vec![
            GateOutcome::new(
                "symmetry",
                r.symmetry,
                self.symmetry * r.y_norm_inf.max(1.0),
            ),
            GateOutcome::new("det_minus_one", r.det_minus_one, self.det),
            GateOutcome {
                name: "cholesky".into(),
                value: if r.cholesky_ok { 0.0 } else { 1.0 },
                limit: 0.0,
                passed: r.cholesky_ok,
            },
            GateOutcome::new("square_condition", r.square_condition, self.square),
            GateOutcome::new("lemma_consistency", r.lemma_consistency, self.lemma),
        ];
        if let Some(d) = r.closed_form_delta {
            out.push(GateOutcome::new("closed_form_delta", d, self.closed_form));
        }
        out
    }
}

/// Result of one gate; for `cholesky` the value is 0 on success and 1 on failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl GateOutcome {
    fn new(name: &str, value: f64, limit: f64) -> Self {
        GateOutcome {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
        m.to_rows()
    }

    #[test]
    fn printed_m_and_n() {
        assert_eq!(rows(&build_m(2)), vec![vec![1, 0], vec![0, -1]]);
        assert_eq!(rows(&build_n(2)), vec![vec![-1, 1], vec![1, 0]]);
        assert_eq!(
            rows(&build_n(3)),
            vec![vec![1, -1, 1], vec![-1, 1, 0], vec![1, 0, 0]]
        );
        assert_eq!(
            rows(&build_n(4)),
            vec![
                vec![-1, 1, -1, 1],
                vec![1, -1, 1, 0],
                vec![-1, 1, 0, 0],
                vec![1, 0, 0, 0]
            ]
        );
    }

    #[test]
    fn integer_identities() {
        for g in 2..=12 {
            let m = build_m(g);
            assert_eq!(&m * &m, Matrix::identity(g));
            let t = gamma_coeffs(g).t;
            assert_eq!(&flip(g) * &t, build_n(g), "g = {g}");
            assert_eq!(t.det_exact().abs(), 1);
            assert!(build_n(g).iter().all(|x| (-1..=1).contains(x)));
        }
    }

    #[test]
    fn gamma_small_cases() {
        // γ₁ = β₁ − β₂, γ₂ = β₂
        assert_eq!(rows(&gamma_coeffs(2).t), vec![vec![1, 0], vec![-1, 1]]);
        let t3 = gamma_coeffs(3).t;
        assert_eq!((t3[(0, 0)], t3[(1, 0)], t3[(2, 0)]), (1, -1, 1));
    }

    #[test]
    fn genus_two_sign_pattern_and_b_block() {
        let p = CurveParams::new(2, vec![2.0]).unwrap();
        let cfg = QuadratureConfig::default();
        let pi0 = build_pi0(&p, &cfg).unwrap();
        let (pp, q, r, s) = pqrs(&pi0);
        assert!(pp > 0.0 && q > 0.0 && s > 0.0 && r < 0.0);
        let abc = abc_from_pi0(&pi0);
        let expect_b =
            Matrix::from_rows(&[vec![2.0 * q, 2.0 * pp], vec![-2.0 * s, -2.0 * r]]).unwrap();
        assert_eq!(abc.b.values, expect_b);
        assert!(abc.b.imaginary && abc.c.imaginary && !abc.a.imaginary);
        assert_eq!(abc.a.values, pi0.scale(2.0));
    }

    #[test]
    fn identity_matrix_residuals_are_clean() {
        let y = Matrix::<f64>::identity(3);
        assert_eq!(y.max_abs_diff(&y.transpose()), 0.0);
        assert_eq!(Lu::new(&y).unwrap().det(), 1.0);
        assert!(cholesky(&y).is_some());
    }

    #[test]
    fn closed_form_is_symmetric() {
        let pi0 = Matrix::from_rows(&[vec![1.3, 0.7], vec![-0.4, 0.9]]).unwrap();
        let y = genus2_from_pi0(&pi0).unwrap();
        assert_eq!(y[(0, 1)], y[(1, 0)]);
        assert!(matches!(
            genus2_from_pi0(&Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap()),
            Err(Error::DegenerateClosedForm(_))
        ));
    }

    #[test]
    fn singular_pi0_is_reported() {
        let pi0 = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 + 1e-17]]).unwrap();
        assert!(matches!(solve_y(&pi0), Err(Error::Singular { .. })));
    }

    #[test]
    fn gates_flag_failures() {
        let r = ResidualReport {
            symmetry: 1e-6,
            y_norm_inf: 2.0,
            re_part: 0.0,
            det_minus_one: 1e-12,
            cholesky_ok: false,
            square_condition: 1e-14,
            closed_form_delta: Some(1e-12),
            lemma_consistency: 1e-13,
        };
        let out = ResidualGates::for_precision(Precision::Standard).evaluate(&r);
        let failed: Vec<_> = out
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name.as_str())
            .collect();
        assert_eq!(failed, vec!["symmetry", "cholesky"]);
    }
}
