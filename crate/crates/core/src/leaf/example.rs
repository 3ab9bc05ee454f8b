//! The explicit `SO_e(1,4)` computation: `ω_n(X̃_n, Ỹ_n) = 2` for a
//! specific `n ∈ N` and `X, Y ∈ i𝔭`, showing `τ_a` is not anti-symplectic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symplectic_form_at;
use crate::error::Result;
use crate::liecore::{iwasawa_project_algebra, make_family, FamilyId};
use crate::numkit::{format_complex, inverse, mat_exp};
use crate::CMat;

pub const EXAMPLE_TOL: f64 = 1e-9;

fn m(rows: [[(f64, f64); 5]; 5]) -> CMat {
    CMat::from_fn(5, 5, |i, j| Complex64::new(rows[i][j].0, rows[i][j].1))
}

const O: (f64, f64) = (0.0, 0.0);
const I: (f64, f64) = (0.0, 1.0);
const MI: (f64, f64) = (0.0, -1.0);

pub fn example_n() -> CMat {
    let r = |x: f64| (x, 0.0);
    m([
        [r(2.5), r(1.), r(1.), r(1.), r(-1.5)],
        [r(1.), r(1.), O, O, r(-1.)],
        [r(1.), O, r(1.), O, r(-1.)],
        [r(1.), O, O, r(1.), r(-1.)],
        [r(1.5), r(1.), r(1.), r(1.), r(-0.5)],
    ])
}

/// `n · exp(eps · N_1)`, a nearby element of `N` used as a negative control.
pub fn perturbed_example_n(eps: f64) -> Result<CMat> {
    let fam = make_family(FamilyId::So1n(4))?;
    Ok(&example_n() * &mat_exp(&fam.basis_n[0].scale_real(eps)))
}

pub fn example_x() -> CMat {
    let mut x = CMat::zeros(5, 5);
    x[(0, 3)] = Complex64::i();
    x[(3, 0)] = Complex64::i();
    x
}

pub fn example_y() -> CMat {
    let mut y = CMat::zeros(5, 5);
    y[(0, 1)] = Complex64::i();
    y[(1, 0)] = Complex64::i();
    y
}

fn expected_ad_x() -> CMat {
    m([
        [O, MI, MI, (0., 1.5), MI],
        [MI, O, O, MI, I],
        [MI, O, O, MI, I],
        [(0., 1.5), I, I, O, (0., -0.5)],
        [MI, MI, MI, (0., 0.5), O],
    ])
}

fn expected_ad_y() -> CMat {
    m([
        [O, (0., 1.5), MI, MI, MI],
        [(0., 1.5), O, I, I, (0., -0.5)],
        [MI, MI, O, O, I],
        [MI, MI, O, O, I],
        [MI, (0., 0.5), MI, MI, O],
    ])
}

fn expected_pr_u_x() -> CMat {
    let one = (1.0, 0.0);
    let mone = (-1.0, 0.0);
    m([[O, O, O, I, MI], [O, O, O, mone, O], [O, O, O, one, O], [I, one, mone, O, O], [MI, O, O, O, O]])
}

/// Diagonal of `pr_𝔲(Ad(n)⁻¹X) · Ad(n)⁻¹Y`.
fn expected_diagonal() -> Vec<Complex64> {
    vec![0.0.into(), Complex64::i(), 0.0.into(), Complex64::new(1.0, 1.0), (-1.0).into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub ad_x: String,
    pub ad_y: String,
    pub pr_u_ad_x: String,
    pub product_diagonal: Vec<[f64; 2]>,
    pub omega: f64,
    /// Entrywise deviations from the reference matrices, in stage order.
    pub stage_errors: [f64; 4],
    pub omega_error: f64,
    pub pass: bool,
}

pub fn example_so14() -> Result<ExampleReport> {
    example_so14_with(&example_n())
}

/// Runs the computation with a caller-supplied `n` against the reference
/// values for the standard `n`.
pub fn example_so14_with(n: &CMat) -> Result<ExampleReport> {
    let fam = make_family(FamilyId::So5C)?;
    let (x, y) = (example_x(), example_y());
    let ninv = inverse(n)?;
    let ad_x = &(&ninv * &x) * n;
    let ad_y = &(&ninv * &y) * n;
    let pr = iwasawa_project_algebra(&fam, &ad_x)?.u;
    let prod = &pr * &ad_y;
    let omega = symplectic_form_at(&fam, n, &x, &y)?;
    let diag = prod.diagonal();
    let diag_err = diag.iter().zip(expected_diagonal()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let stage_errors =
        [ad_x.max_abs_diff(&expected_ad_x()), ad_y.max_abs_diff(&expected_ad_y()), pr.max_abs_diff(&expected_pr_u_x()), diag_err];
    let omega_error = (omega - 2.0).abs();
    let pass = stage_errors.iter().all(|&e| e <= EXAMPLE_TOL) && omega_error <= EXAMPLE_TOL;
    Ok(ExampleReport {
        ad_x: format_complex(&ad_x, 4),
        ad_y: format_complex(&ad_y, 4),
        pr_u_ad_x: format_complex(&pr, 4),
        product_diagonal: diag.iter().map(|z| [z.re, z.im]).collect(),
        omega,
        stage_errors,
        omega_error,
        pass,
    })
}
