//! Python bindings for `ifgram`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ifgram::chart::{self, InputFsa, SpecializeError};
use ifgram::enumerate::{self, FeatureStructure};
use ifgram::format;
use ifgram::grammar::{self, Grammar};
use ifgram::standardize;
use ifgram::transform;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Grammar", module = "pyifgram", skip_from_py_object)]
#[derive(Clone)]
struct PyGrammar {
    inner: Grammar,
}

#[pymethods]
impl PyGrammar {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = format::parse_grammar_file(text).map_err(value_error)?;
        Ok(PyGrammar { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }

    #[getter]
    fn start(&self) -> String {
        self.inner.start.to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.rules.len()
    }

    fn rules(&self) -> Vec<String> {
        self.inner.rules.iter().map(format::rule_to_text).collect()
    }

    fn non_if_count(&self) -> usize {
        self.inner
            .rules
            .iter()
            .filter(|r| standardize::is_interaction_free(r) != Ok(true))
            .count()
    }

    fn derivation_count(&self) -> Option<u128> {
        grammar::derivation_count(&self.inner)
    }

    fn to_text(&self) -> String {
        format::grammar_to_text(&self.inner)
    }

    fn to_json(&self) -> String {
        format::grammar_to_json(&self.inner).to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Grammar kind={} start={} rules={}>", self.inner.kind.name(), self.inner.start, self.inner.rules.len())
    }
}

#[pyclass(name = "Fsa", module = "pyifgram", skip_from_py_object)]
#[derive(Clone)]
struct PyFsa {
    inner: InputFsa,
}

#[pymethods]
impl PyFsa {
    #[staticmethod]
    fn from_tokens(tokens: Vec<String>) -> Self {
        PyFsa {
            inner: chart::string_to_fsa(&tokens),
        }
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = format::parse_fsa_file(text).map_err(value_error)?;
        Ok(PyFsa { inner })
    }

    fn accepting_path_count(&self) -> Option<u128> {
        self.inner.accepting_path_count()
    }

    fn is_acyclic(&self) -> bool {
        self.inner.is_acyclic()
    }
}

#[pyclass(name = "FeatureStructure", module = "pyifgram", skip_from_py_object)]
#[derive(Clone)]
struct PyFeatureStructure {
    inner: FeatureStructure,
}

#[pymethods]
impl PyFeatureStructure {
    fn render(&self) -> String {
        self.inner.render()
    }

    fn canonical(&self) -> String {
        self.inner.canonical()
    }

    /// Atom at the end of a label path, if any.
    fn get(&self, path: Vec<String>) -> Option<String> {
        let refs: Vec<&str> = path.iter().map(String::as_str).collect();
        let node = self.inner.follow(&refs)?;
        self.inner.atom(node).map(|c| c.to_string())
    }

    fn to_json(&self) -> String {
        format::structure_to_json(&self.inner).to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        enumerate::iso_equal(&self.inner, &other.inner)
    }

    fn __repr__(&self) -> String {
        self.inner.render()
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }
}

/// Chart specialization of `grammar` for a token list or an `Fsa`.
#[pyfunction]
fn specialize(grammar: &PyGrammar, input: &Bound<'_, PyAny>) -> PyResult<PyGrammar> {
    let fsa = if let Ok(f) = input.cast::<PyFsa>() {
        f.borrow().inner.clone()
    } else {
        let tokens: Vec<String> = input.extract()?;
        chart::string_to_fsa(&tokens)
    };
    match chart::specialize(&grammar.inner, &fsa) {
        Ok(inner) => Ok(PyGrammar { inner }),
        Err(SpecializeError::NoParse) => Err(PyValueError::new_err("no parse")),
        Err(e) => Err(value_error(e)),
    }
}

/// Returns the IF grammar and a dict of transformation counts.
#[pyfunction]
#[pyo3(signature = (grammar, sweep = true))]
fn to_interaction_free<'py>(
    py: Python<'py>,
    grammar: &PyGrammar,
    sweep: bool,
) -> PyResult<(PyGrammar, Bound<'py, PyDict>)> {
    let (mut g, st) = transform::to_interaction_free(&grammar.inner).map_err(value_error)?;
    if sweep {
        g = transform::sweep_unreachable(&g);
    }
    let stats = PyDict::new(py);
    stats.set_item("input_rules", st.input_rules)?;
    stats.set_item("input_top", st.input_top)?;
    stats.set_item("expansions", st.expansions)?;
    stats.set_item("created", st.created)?;
    stats.set_item("eliminated", st.eliminated)?;
    stats.set_item("pruned", st.pruned)?;
    stats.set_item("output_rules", g.rules.len())?;
    Ok((PyGrammar { inner: g }, stats))
}

/// Backtrack-free enumeration of an IF grammar.
#[pyfunction]
fn enumerate_solutions(grammar: &PyGrammar) -> PyResult<Vec<PyFeatureStructure>> {
    let it = enumerate::enumerate_solutions(&grammar.inner).map_err(value_error)?;
    it.map(|r| r.map(|inner| PyFeatureStructure { inner }).map_err(value_error))
        .collect()
}

/// Backtracking enumeration of any acyclic grammar.
#[pyfunction]
fn oracle_enumerate(grammar: &PyGrammar) -> PyResult<Vec<PyFeatureStructure>> {
    let all = enumerate::oracle_enumerate(&grammar.inner).map_err(value_error)?;
    Ok(all.into_iter().map(|inner| PyFeatureStructure { inner }).collect())
}

/// Standardizes a constraint set written in the text notation.
#[pyfunction]
fn standardize_text(text: &str) -> PyResult<String> {
    let cs = format::parse_constraint_set(text).map_err(value_error)?;
    Ok(format::constraint_set_to_text(&standardize::standardize(&cs)))
}

#[pyfunction]
fn multiset_equal(a: Vec<PyRef<'_, PyFeatureStructure>>, b: Vec<PyRef<'_, PyFeatureStructure>>) -> bool {
    let a: Vec<FeatureStructure> = a.iter().map(|s| s.inner.clone()).collect();
    let b: Vec<FeatureStructure> = b.iter().map(|s| s.inner.clone()).collect();
    enumerate::multiset_equal(&a, &b)
}

#[pymodule]
fn pyifgram(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrammar>()?;
    m.add_class::<PyFsa>()?;
    m.add_class::<PyFeatureStructure>()?;
    m.add_function(wrap_pyfunction!(specialize, m)?)?;
    m.add_function(wrap_pyfunction!(to_interaction_free, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(standardize_text, m)?)?;
    m.add_function(wrap_pyfunction!(multiset_equal, m)?)?;
    m.add("JOHN_READ_HERE", ifgram::examples::JOHN_READ_HERE)?;
    Ok(())
}
