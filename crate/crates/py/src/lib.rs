use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use radolab_core::bohr::{self, BohrSpec, Theta};
use radolab_core::counting::{self, SolutionFilter};
use radolab_core::intersective;
use radolab_core::regularity::{decide, DecideOptions, Mode, RadoEquation};
use radolab_core::{expsums, congruence, IntPoly};

fn err(e: radolab_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn poly(s: &str) -> PyResult<IntPoly> {
    IntPoly::parse(s).map_err(err)
}

/// Intersectivity status as a string, with the refuting prime power `(p, k)` if any.
#[pyfunction]
#[pyo3(signature = (poly_str, bound = 1000))]
fn intersectivity(poly_str: &str, bound: u64) -> PyResult<(String, Option<(u64, u32)>)> {
    let v = intersective::intersectivity_verdict(&poly(poly_str)?, bound).map_err(err)?;
    Ok((format!("{:?}", v.status), v.refutation.map(|r| (r.p, r.k))))
}

/// `(lambda(D), r_D, P_D)` with `P_D` as ascending coefficients.
#[pyfunction]
fn aux(poly_str: &str, d: u64) -> PyResult<(BigInt, BigInt, Vec<BigInt>)> {
    let a = intersective::aux_data(&poly(poly_str)?, d).map_err(err)?;
    Ok((a.lambda, a.r, a.pd.coeffs().to_vec()))
}

#[pyfunction]
fn count_roots(poly_str: &str, m: u64) -> PyResult<BigInt> {
    congruence::count_roots_mod(&poly(poly_str)?, m).map_err(err)
}

/// `(status, reason)` of the regularity verdict; `mode` is `"pr"` or `"dr"`.
#[pyfunction]
#[pyo3(signature = (poly_str, coeffs, b = 0, mode = "pr"))]
fn decide_regularity(poly_str: &str, coeffs: Vec<i64>, b: i64, mode: &str) -> PyResult<(String, String)> {
    let eq = RadoEquation::new(coeffs, BigInt::from(b), poly(poly_str)?).map_err(err)?;
    let mode = match mode {
        "pr" => Mode::Partition,
        "dr" => Mode::Density,
        other => return Err(PyValueError::new_err(format!("unknown mode {other}"))),
    };
    let v = decide(&eq, mode, &DecideOptions::default()).map_err(err)?;
    Ok((format!("{:?}", v.status), v.reason))
}

/// Solutions in `[N]^s`; `filter` is `"all"`, `"nonconstant"` or `"distinct"`.
#[pyfunction]
#[pyo3(signature = (poly_str, coeffs, n, b = 0, filter = "all"))]
fn count_solutions(poly_str: &str, coeffs: Vec<i64>, n: u64, b: i64, filter: &str) -> PyResult<u128> {
    let eq = RadoEquation::new(coeffs, BigInt::from(b), poly(poly_str)?).map_err(err)?;
    let filter = match filter {
        "all" => SolutionFilter::All,
        "nonconstant" => SolutionFilter::NonConstant,
        "distinct" => SolutionFilter::Distinct,
        other => return Err(PyValueError::new_err(format!("unknown filter {other}"))),
    };
    let set: Vec<u64> = (1..=n).collect();
    counting::enumerate_solutions(&eq, &set, filter).map_err(err)
}

/// `sum_{x <= N} e(alpha P(x))` as `(re, im)`.
#[pyfunction]
fn weyl_sum(poly_str: &str, alpha: f64, n: u64) -> PyResult<(f64, f64)> {
    let z = expsums::weyl_sum(&poly(poly_str)?, alpha, n).map_err(err)?;
    Ok((z.re, z.im))
}

/// Members of `{n <= Z : max_i ||Q(n) theta_i|| < rho}`.
#[pyfunction]
fn bohr_set(poly_str: &str, theta: Vec<String>, rho: &str, z: u64) -> PyResult<Vec<u64>> {
    let theta: Vec<Theta> = theta.iter().map(|t| Theta::parse(t)).collect::<Result<_, _>>().map_err(err)?;
    let spec = BohrSpec::new(poly(poly_str)?, theta, bohr::parse_rational(rho).map_err(err)?).map_err(err)?;
    Ok(bohr::bohr_set(&spec, z).map_err(err)?.members())
}

#[pymodule]
fn radolab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(intersectivity, m)?)?;
    m.add_function(wrap_pyfunction!(aux, m)?)?;
    m.add_function(wrap_pyfunction!(count_roots, m)?)?;
    m.add_function(wrap_pyfunction!(decide_regularity, m)?)?;
    m.add_function(wrap_pyfunction!(count_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_sum, m)?)?;
    m.add_function(wrap_pyfunction!(bohr_set, m)?)?;
    Ok(())
}
