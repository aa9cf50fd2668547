//! Python bindings for `takagi`.
//!
//! Rationals go in as `str` (`"p/q"`), `int` or `fractions.Fraction` and come
//! back as `fractions.Fraction`. Binary expansions are [`Expansion`] objects.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::takagi::bv::{self, DEFAULT_SAMPLE_DEPTH_CAP};
use ::takagi::local::DEFAULT_MEMBER_CAP;
use ::takagi::omega::{self, DEFAULT_HALF_DEPTH_CAP};
use ::takagi::{BinExp, Cardinality, Error, FunctionTag, Rat, Tail};

create_exception!(takagi_py, ResourceCapError, PyRuntimeError, "A size cap would be exceeded.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Resource { .. } => ResourceCapError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_rat(x: &Bound<'_, PyAny>) -> PyResult<Rat> {
    let text = if let Ok(s) = x.extract::<String>() {
        s
    } else {
        match (x.getattr("numerator"), x.getattr("denominator")) {
            (Ok(n), Ok(d)) => format!("{}/{}", n.str()?, d.str()?),
            _ => return Err(PyTypeError::new_err("expected a rational: str, int or fractions.Fraction")),
        }
    };
    ::takagi::parse_rat(&text).map_err(py_err)
}

fn fraction<'py>(py: Python<'py>, x: &Rat) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((::takagi::format_rat(x),))
}

fn int<'py>(py: Python<'py>, digits: &str) -> PyResult<Bound<'py, PyAny>> {
    py.get_type::<pyo3::types::PyInt>().call1((digits,))
}

fn to_expansion(x: &Bound<'_, PyAny>) -> PyResult<BinExp> {
    if let Ok(e) = x.cast::<Expansion>() {
        return Ok(e.get().0.clone());
    }
    BinExp::from_rational(&to_rat(x)?, Tail::Low).map_err(py_err)
}

fn tail(name: &str) -> PyResult<Tail> {
    match name {
        "low" => Ok(Tail::Low),
        "high" => Ok(Tail::High),
        _ => Err(PyValueError::new_err(format!("tail must be \"low\" or \"high\", got {name:?}"))),
    }
}

fn function_tag(name: &str) -> PyResult<FunctionTag> {
    match name {
        "tauL" => Ok(FunctionTag::TauL),
        "tauS" => Ok(FunctionTag::TauS),
        _ => match name.strip_prefix("tau_").and_then(|n| n.parse().ok()) {
            Some(n) => Ok(FunctionTag::TauPartial(n)),
            None => Err(PyValueError::new_err(format!("unknown function {name:?}; use tauL, tauS or tau_<n>"))),
        },
    }
}

/// Eventually periodic binary expansion `0.<pre>(<period>)`, kept canonical.
#[pyclass(name = "Expansion", module = "takagi_py", frozen, eq, ord, hash, str, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Expansion(BinExp);

impl std::fmt::Display for Expansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[pymethods]
impl Expansion {
    /// `Expansion("0.01(10)")`, or `Expansion("1/3")` for a rational.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let b = if text.trim().starts_with("0.") { BinExp::parse(text) } else { ::takagi::parse_rat(text).and_then(|x| BinExp::from_rational(&x, Tail::Low)) };
        b.map(Expansion).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (x, tail = "low"))]
    fn from_rational(x: &Bound<'_, PyAny>, tail: &str) -> PyResult<Self> {
        BinExp::from_rational(&to_rat(x)?, self::tail(tail)?).map(Expansion).map_err(py_err)
    }

    #[getter]
    fn pre(&self) -> String {
        self.0.pre().iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    #[getter]
    fn period(&self) -> String {
        self.0.period().iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    fn value<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.to_rational())
    }

    /// Digit `b_j`, 1-indexed.
    fn bit(&self, j: usize) -> PyResult<u8> {
        if j == 0 {
            return Err(PyValueError::new_err("digits are 1-indexed"));
        }
        Ok(self.0.bit(j) as u8)
    }

    /// `D_j = j - 2 N¹_j`.
    fn deficient_digit(&self, j: usize) -> i64 {
        self.0.deficient_digit(j)
    }

    /// Balance points `j ≤ n` (always including 0).
    fn balance_points(&self, n: usize) -> Vec<usize> {
        self.0.balance_set().points_up_to(n)
    }

    fn complement(&self) -> Self {
        Expansion(self.0.complement())
    }

    fn shift(&self, n: usize) -> Self {
        Expansion(self.0.shift(n))
    }

    fn is_dyadic(&self) -> bool {
        self.0.is_dyadic()
    }

    fn in_omega_l(&self) -> bool {
        omega::in_omega_l(&self.0)
    }

    fn project_omega_l(&self) -> Self {
        Expansion(omega::project_omega_l(&self.0))
    }

    fn flip_block(&self, k: usize) -> PyResult<Self> {
        ::takagi::flip_block(&self.0, k).map(Expansion).map_err(py_err)
    }

    fn equivalent(&self, other: &Expansion) -> bool {
        ::takagi::equivalent(&self.0, &other.0)
    }

    fn takagi<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &::takagi::takagi_of(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("Expansion('{}')", self.0)
    }
}

/// Exact `τ(x)` for a rational or an `Expansion`.
#[pyfunction(name = "takagi")]
fn tau<'py>(py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &::takagi::takagi_of(&to_expansion(x)?))
}

/// `τ_n(x)`, the sum of the first `n` terms.
#[pyfunction]
fn takagi_partial<'py>(py: Python<'py>, x: &Bound<'py, PyAny>, n: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &::takagi::takagi_partial(&to_rat(x)?, n).map_err(py_err)?)
}

/// The flattened function `τ^L`.
#[pyfunction]
fn flattened_takagi<'py>(py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &bv::flattened_takagi(&to_rat(x)?).map_err(py_err)?)
}

/// The singular function `τ^S`.
#[pyfunction]
fn takagi_singular<'py>(py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &bv::takagi_singular(&to_rat(x)?).map_err(py_err)?)
}

/// Description of the local level set containing `x`, as a dict.
#[pyfunction]
fn local_level_set<'py>(py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let desc = ::takagi::local_level_set(&to_expansion(x)?);
    let d = PyDict::new(py);
    d.set_item("left_endpoint", Expansion(desc.left_endpoint.clone()))?;
    d.set_item("level", fraction(py, &desc.level)?)?;
    d.set_item("balance_points", desc.balance.points().to_vec())?;
    d.set_item("balance_periodic", desc.balance.cycle().is_some())?;
    match desc.cardinality {
        Cardinality::Finite { exponent } => d.set_item("cardinality", int(py, "2")?.pow(exponent, py.None())?)?,
        Cardinality::Uncountable => d.set_item("cardinality", "uncountable")?,
    }
    d.set_item("hausdorff_dim", fraction(py, &desc.hausdorff_dim)?)?;
    Ok(d)
}

/// Members of the local level set of `x`; an uncountable set is cut off
/// after `depth` recurring blocks.
#[pyfunction]
#[pyo3(signature = (x, depth = 3, cap = DEFAULT_MEMBER_CAP))]
fn local_level_members(x: &Bound<'_, PyAny>, depth: usize, cap: usize) -> PyResult<Vec<Expansion>> {
    let desc = ::takagi::local_level_set(&to_expansion(x)?);
    let members = ::takagi::enumerate_members(&desc, depth, cap).map_err(py_err)?;
    Ok(members.into_iter().map(Expansion).collect())
}

/// Which expansion of `x` lies in `Ω^L`: `"low"`, `"high"` or `None`.
#[pyfunction]
fn omega_check(x: &Bound<'_, PyAny>) -> PyResult<Option<&'static str>> {
    Ok(omega::in_omega_l_rat(&to_rat(x)?).map_err(py_err)?.map(|t| match t {
        Tail::Low => "low",
        Tail::High => "high",
    }))
}

/// `P^L(x)`, the projection onto `Ω^L`.
#[pyfunction]
fn project_omega_l<'py>(py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &omega::project_omega_l_rat(&to_rat(x)?).map_err(py_err)?)
}

#[pyfunction]
fn catalan(py: Python<'_>, m: usize) -> PyResult<Bound<'_, PyAny>> {
    int(py, &omega::catalan(m).to_string())
}

/// Breakpoints of length `2m`, in increasing order.
#[pyfunction]
#[pyo3(signature = (m, cap = DEFAULT_HALF_DEPTH_CAP))]
fn breakpoints<'py>(py: Python<'py>, m: usize, cap: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
    omega::enumerate_breakpoints(m, cap).map_err(py_err)?.iter().map(|bp| fraction(py, &bp.value)).collect()
}

/// Gap intervals of `Ω^L` for breakpoints of length `≤ max_2m`, as dicts.
#[pyfunction]
#[pyo3(signature = (max_2m, cap = DEFAULT_HALF_DEPTH_CAP))]
fn gap_intervals<'py>(py: Python<'py>, max_2m: usize, cap: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let gaps = omega::enumerate_gap_intervals(max_2m, cap).map_err(py_err)?;
    gaps.iter()
        .map(|g| {
            let d = PyDict::new(py);
            d.set_item("two_m", g.breakpoint.two_m())?;
            d.set_item("B", fraction(py, &g.breakpoint.value)?)?;
            d.set_item("x_minus", fraction(py, &g.x_minus)?)?;
            d.set_item("x_plus", fraction(py, &g.x_plus)?)?;
            d.set_item("tau_x_minus", fraction(py, &g.tau_minus())?)?;
            d.set_item("tau_x_plus", fraction(py, &g.tau_plus())?)?;
            Ok(d)
        })
        .collect()
}

/// Left endpoint of the `k`-th local level set at level 1/2; `None` gives
/// the limit point 1/6.
#[pyfunction]
#[pyo3(signature = (k = None))]
fn level_half<'py>(py: Python<'py>, k: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &::takagi::level_half_family(k))
}

/// `(x, τ(x))` for the `k`-th member of the family built on a breakpoint.
#[pyfunction]
fn infinite_family<'py>(py: Python<'py>, breakpoint: &Bound<'py, PyAny>, k: u64) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let bp = omega::Breakpoint::try_from_rat(&to_rat(breakpoint)?).map_err(py_err)?;
    let (x, level) = ::takagi::infinite_level_family(&bp, k);
    Ok((fraction(py, &x)?, fraction(py, &level)?))
}

/// Total variation of a function sampled on `k / 2^depth`.
#[pyfunction]
#[pyo3(signature = (function, depth, cap = DEFAULT_SAMPLE_DEPTH_CAP))]
fn total_variation<'py>(py: Python<'py>, function: &str, depth: usize, cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let f = bv::sample_pl(function_tag(function)?, depth, cap).map_err(py_err)?;
    fraction(py, &bv::total_variation(&f))
}

/// Exact coarea integral of the same sample.
#[pyfunction]
#[pyo3(signature = (function, depth, cap = DEFAULT_SAMPLE_DEPTH_CAP))]
fn coarea_integral<'py>(py: Python<'py>, function: &str, depth: usize, cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let f = bv::sample_pl(function_tag(function)?, depth, cap).map_err(py_err)?;
    fraction(py, &bv::coarea_integral(&f))
}

/// Grid estimate of the number of local level sets at level `t`.
#[pyfunction]
fn local_level_count_estimate(t: &Bound<'_, PyAny>, depth: usize) -> PyResult<usize> {
    bv::local_level_count_estimate(&to_rat(t)?, depth).map_err(py_err)
}

/// Seeded Monte Carlo mean of the count estimate, as a dict.
#[pyfunction]
#[pyo3(signature = (depth, samples = 256, seed = 0))]
fn mean_local_level_count<'py>(py: Python<'py>, depth: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let rep = py.detach(|| bv::mean_local_level_count(depth, samples, seed)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("total_variation", fraction(py, &rep.total_variation)?)?;
    d.set_item("coarea_integral", fraction(py, &rep.coarea_integral)?)?;
    d.set_item("mean_estimate", fraction(py, &rep.mean_estimate)?)?;
    d.set_item("mean_exact", fraction(py, &rep.mean_exact)?)?;
    Ok(d)
}

#[pymodule]
fn takagi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Expansion>()?;
    m.add("ResourceCapError", m.py().get_type::<ResourceCapError>())?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(takagi_partial, m)?)?;
    m.add_function(wrap_pyfunction!(flattened_takagi, m)?)?;
    m.add_function(wrap_pyfunction!(takagi_singular, m)?)?;
    m.add_function(wrap_pyfunction!(local_level_set, m)?)?;
    m.add_function(wrap_pyfunction!(local_level_members, m)?)?;
    m.add_function(wrap_pyfunction!(omega_check, m)?)?;
    m.add_function(wrap_pyfunction!(project_omega_l, m)?)?;
    m.add_function(wrap_pyfunction!(catalan, m)?)?;
    m.add_function(wrap_pyfunction!(breakpoints, m)?)?;
    m.add_function(wrap_pyfunction!(gap_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(level_half, m)?)?;
    m.add_function(wrap_pyfunction!(infinite_family, m)?)?;
    m.add_function(wrap_pyfunction!(total_variation, m)?)?;
    m.add_function(wrap_pyfunction!(coarea_integral, m)?)?;
    m.add_function(wrap_pyfunction!(local_level_count_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(mean_local_level_count, m)?)?;
    Ok(())
}
