//! Python bindings for the legprod library.
//!
//! Exposes the Legendrian model, the product/triple invariant computations,
//! PD diagram parsing and the feasibility solver.  Exact rationals cross the
//! boundary as strings ("p/q" or "p"); domain errors become ValueError with
//! the same stable error names the CLI uses.

use std::collections::{BTreeMap, HashMap};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use legprod::diagram::{parse_pd, PDCode};
use legprod::explore::{standard_system, tb_range_search as range_search};
use legprod::feasibility::LinearSystem;
use legprod::model::{knot_fixture, FixtureName, LegendrianModel};
use legprod::product;
use legprod::rational::Rational;
use legprod::sign::Sign;
use legprod::triple;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    text.parse().map_err(value_error)
}

fn sign(v: i64) -> PyResult<Sign> {
    Sign::from_i64(v).ok_or_else(|| value_error("sign must be 1 or -1"))
}

fn actions_map(actions: HashMap<String, String>) -> PyResult<BTreeMap<String, Rational>> {
    actions
        .into_iter()
        .map(|(k, v)| Ok((k, rational(&v)?)))
        .collect()
}

/// A chord-generic Legendrian as combinatorial data.
#[pyclass(name = "LegendrianModel", skip_from_py_object)]
#[derive(Clone)]
struct PyModel {
    inner: LegendrianModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: LegendrianModel::from_json(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Violation list; empty means the model is valid.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().violations
    }

    /// Thurston-Bennequin number as the signed chord count.
    fn tb(&self) -> PyResult<i64> {
        self.inner.chord_sum_tb().map_err(value_error)
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.inner.dim
    }

    #[getter]
    fn euler(&self) -> i64 {
        self.inner.euler
    }

    #[getter]
    fn cotangent_euler(&self) -> i64 {
        self.inner.cotangent_euler
    }

    /// (label, action, sign) per chord.
    fn chords(&self) -> Vec<(String, String, i64)> {
        self.inner
            .chords
            .iter()
            .map(|c| (c.label.clone(), c.action.to_string(), c.sign.as_i64()))
            .collect()
    }

    fn maslov(&self) -> Vec<(String, i64)> {
        self.inner.maslov.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }

    /// Append a cancelling chord pair (za, sign), (zb, -sign); tb unchanged.
    fn stabilize(&self, za: &str, zb: &str, lead_sign: i64) -> PyResult<PyModel> {
        let out = self
            .inner
            .stabilize_with_cancelling_pair(rational(za)?, rational(zb)?, sign(lead_sign)?)
            .map_err(value_error)?;
        Ok(PyModel { inner: out })
    }

    fn __repr__(&self) -> String {
        format!(
            "LegendrianModel(dim={}, chords={}, euler={})",
            self.inner.dim,
            self.inner.chords.len(),
            self.inner.euler
        )
    }
}

/// The one-double-point Legendrian sphere of dimension n.
#[pyfunction]
#[pyo3(signature = (n, action, sign=None))]
fn whitney(n: u32, action: &str, sign: Option<i64>) -> PyResult<PyModel> {
    let action = rational(action)?;
    let inner = match sign {
        None => legprod::model::whitney(n, action).map_err(value_error)?,
        Some(s) => legprod::model::whitney_with_sign(n, action, self::sign(s)?),
    };
    Ok(PyModel { inner })
}

/// tb of the two-factor Legendrian product in closed form.
#[pyfunction]
fn product_tb(k: &PyModel, l: &PyModel) -> PyResult<i64> {
    product::product_tb(&k.inner, &l.inner).map_err(value_error)
}

/// Reeb chords of the perturbed product as (kind, parent_k, parent_l,
/// action, sign) tuples, plus the assembled product model.
#[pyfunction]
#[pyo3(signature = (k, l, strict=false))]
fn perturb_product(
    k: &PyModel,
    l: &PyModel,
    strict: bool,
) -> PyResult<(Vec<(String, String, String, String, i64)>, PyModel)> {
    let (chords, model) =
        product::perturb_product(&k.inner, &l.inner, strict).map_err(value_error)?;
    let rows = chords
        .iter()
        .map(|c| {
            (
                c.kind.to_string(),
                c.parent_k.clone(),
                c.parent_l.clone(),
                c.action.to_string(),
                c.sign.as_i64(),
            )
        })
        .collect();
    Ok((rows, PyModel { inner: model }))
}

/// Direct sum of the factor Maslov vectors, K entries first.
#[pyfunction]
fn maslov_product(k: &PyModel, l: &PyModel) -> Vec<(String, i64)> {
    product::maslov_product(&k.inner, &l.inner)
        .into_iter()
        .collect()
}

/// Product with a dominating-action unknot one dimension up.
#[pyfunction]
fn frontspin(l: &PyModel) -> PyResult<PyModel> {
    Ok(PyModel {
        inner: product::frontspin(&l.inner).map_err(value_error)?,
    })
}

/// tb of K_i x L for i = 0..=pairs cancelling pairs in the window (zb, za).
#[pyfunction]
fn infinite_family_tb(
    k: &PyModel,
    l: &PyModel,
    e_label: &str,
    pairs: u32,
    za: &str,
    zb: &str,
    lead_sign: i64,
) -> PyResult<Vec<i64>> {
    product::infinite_family_tb(
        &k.inner,
        &l.inner,
        e_label,
        pairs,
        rational(za)?,
        rational(zb)?,
        sign(lead_sign)?,
    )
    .map_err(value_error)
}

/// tb of the three-knot product as the triple-factor sum.
#[pyfunction]
fn triple_tb(k1: &PyModel, k2: &PyModel, k3: &PyModel) -> PyResult<i64> {
    triple::triple_tb(&k1.inner, &k2.inner, &k3.inner).map_err(value_error)
}

/// (closed form, iterated product, agreement flag).
#[pyfunction]
fn triple_vs_iterated(k1: &PyModel, k2: &PyModel, k3: &PyModel) -> PyResult<(i64, i64, bool)> {
    let audit =
        triple::triple_vs_iterated(&k1.inner, &k2.inner, &k3.inner).map_err(value_error)?;
    Ok((audit.closed_form, audit.iterated, audit.agree))
}

/// Build a named knot fixture at the given actions; returns the model and
/// the fixture's constraint system as JSON.
#[pyfunction]
fn fixture(name: &str, actions: HashMap<String, String>) -> PyResult<(PyModel, String)> {
    let fixture = FixtureName::parse(name).map_err(value_error)?;
    let (model, sys) = knot_fixture(fixture, &actions_map(actions)?).map_err(value_error)?;
    Ok((
        PyModel { inner: model },
        serde_json::to_string(&sys).expect("system serialization cannot fail"),
    ))
}

/// A validated planar diagram in PD notation.
#[pyclass(name = "Diagram")]
struct PyDiagram {
    inner: PDCode,
}

#[pymethods]
impl PyDiagram {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyDiagram {
            inner: parse_pd(text).map_err(value_error)?,
        })
    }

    fn crossing_count(&self) -> usize {
        self.inner.crossing_count()
    }

    fn crossing_signs(&self) -> Vec<i64> {
        self.inner.crossing_signs().iter().map(|s| s.as_i64()).collect()
    }

    fn tb(&self) -> i64 {
        self.inner.tb()
    }

    fn face_count(&self) -> usize {
        self.inner.faces().len()
    }

    /// Face-area constraint system as JSON.
    fn constraints_json(&self) -> String {
        serde_json::to_string(&self.inner.area_constraints())
            .expect("system serialization cannot fail")
    }

    /// Lift to a Legendrian model at the given crossing actions.
    fn to_model(&self, actions: HashMap<String, String>) -> PyResult<PyModel> {
        Ok(PyModel {
            inner: self
                .inner
                .to_model(&actions_map(actions)?)
                .map_err(value_error)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Diagram(crossings={}, tb={})", self.inner.crossing_count(), self.inner.tb())
    }
}

/// Feasibility of a linear system given as JSON.
#[pyfunction]
fn is_feasible(system_json: &str) -> PyResult<bool> {
    let sys: LinearSystem = serde_json::from_str(system_json).map_err(value_error)?;
    Ok(sys.is_feasible())
}

/// Midpoint witness of a linear system given as JSON, or None if infeasible.
#[pyfunction]
fn sample_point(system_json: &str) -> PyResult<Option<HashMap<String, String>>> {
    let sys: LinearSystem = serde_json::from_str(system_json).map_err(value_error)?;
    match sys.sample_point() {
        Ok(point) => Ok(Some(
            point.into_iter().map(|(k, v)| (k, v.to_string())).collect(),
        )),
        Err(legprod::feasibility::FeasibilityError::Infeasible) => Ok(None),
        Err(e) => Err(value_error(e)),
    }
}

/// Randomized tb range search over the standard fixtures; returns the
/// report as JSON.
#[pyfunction]
#[pyo3(signature = (budget=1000, seed=0))]
fn explore(budget: u64, seed: u64) -> PyResult<String> {
    let names = [
        FixtureName::StabilizedUnknot,
        FixtureName::R1Unknot,
        FixtureName::Trefoil,
    ];
    let sys = standard_system(names);
    let report = range_search(names, &sys, budget, seed).map_err(value_error)?;
    Ok(serde_json::to_string(&report).expect("report serialization cannot fail"))
}

#[pymodule]
fn legprod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyDiagram>()?;
    m.add_function(wrap_pyfunction!(whitney, m)?)?;
    m.add_function(wrap_pyfunction!(product_tb, m)?)?;
    m.add_function(wrap_pyfunction!(perturb_product, m)?)?;
    m.add_function(wrap_pyfunction!(maslov_product, m)?)?;
    m.add_function(wrap_pyfunction!(frontspin, m)?)?;
    m.add_function(wrap_pyfunction!(infinite_family_tb, m)?)?;
    m.add_function(wrap_pyfunction!(triple_tb, m)?)?;
    m.add_function(wrap_pyfunction!(triple_vs_iterated, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(is_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(sample_point, m)?)?;
    m.add_function(wrap_pyfunction!(explore, m)?)?;
    Ok(())
}
