//! Python bindings: diagrams, invariant tables, Magnus expansions, free kernels.

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cutmilnor::cdj;
use cutmilnor::diagram::CutDiagram;
use cutmilnor::gauss::GaussDiagram;
use cutmilnor::magnus::MagnusSeries;
use cutmilnor::milnor::{self, parse_sequence, InvariantTable, Mode, TableOptions};
use cutmilnor::word::Alphabet;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "CutDiagram", frozen)]
struct PyCutDiagram {
    inner: CutDiagram,
}

#[pymethods]
impl PyCutDiagram {
    /// Parse and validate CDJ text.
    #[staticmethod]
    fn from_cdj(text: &str) -> PyResult<Self> {
        Ok(PyCutDiagram { inner: cdj::parse(text).map_err(err)? })
    }

    /// Build from a signed Gauss code such as `O1+ U2+ / U1+ O2+`.
    #[staticmethod]
    fn from_gauss(text: &str) -> PyResult<Self> {
        Ok(PyCutDiagram { inner: GaussDiagram::parse(text).map_err(err)?.to_cut_diagram() })
    }

    /// A bundled example by name, e.g. `bead` or `milnor_link_4`.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        cutmilnor::suite::example(name)
            .map(|e| PyCutDiagram { inner: e.diagram })
            .ok_or_else(|| PyValueError::new_err(format!("no bundled example `{}`", name)))
    }

    fn to_cdj(&self) -> String {
        cdj::emit(&self.inner)
    }

    #[getter]
    fn num_components(&self) -> usize {
        self.inner.num_components()
    }

    #[getter]
    fn regions(&self) -> Vec<String> {
        self.inner.regions.iter().map(|r| r.name.clone()).collect()
    }

    /// Problems found, empty when the diagram is valid.
    fn validate(&self) -> Vec<String> {
        let report = self.inner.validate();
        if report.is_ok() {
            Vec::new()
        } else {
            report.to_string().lines().map(str::to_string).collect()
        }
    }

    fn spun(&self) -> Self {
        PyCutDiagram { inner: cutmilnor::spun::spun(&self.inner).0 }
    }

    fn wirtinger(&self) -> String {
        self.inner.wirtinger_presentation().render()
    }

    #[pyo3(signature = (max_len = 4, nonrepeated = false, force = false, mode = "series", seed = None, q = None))]
    fn invariants(
        &self,
        py: Python<'_>,
        max_len: usize,
        nonrepeated: bool,
        force: bool,
        mode: &str,
        seed: Option<u64>,
        q: Option<usize>,
    ) -> PyResult<PyInvariantTable> {
        let mode = match mode {
            "series" => Mode::Series,
            "word" => Mode::Word,
            other => return Err(PyValueError::new_err(format!("unknown mode `{}`", other))),
        };
        let opts = TableOptions { max_len, nonrepeated, mode, seed, q, force };
        let d = &self.inner;
        let t = py.detach(|| InvariantTable::compute(d, &opts)).map_err(err)?;
        Ok(PyInvariantTable { inner: t })
    }

    /// Rank and basis of the common kernel of the Milnor maps of `sequences`.
    #[pyo3(signature = (sequences, seed = None))]
    fn free_kernel(&self, sequences: Vec<String>, seed: Option<u64>) -> PyResult<(usize, Vec<Vec<BigInt>>)> {
        let l = self.inner.num_components();
        let seqs: Vec<Vec<usize>> = sequences.iter().map(|s| parse_sequence(s, l)).collect::<Result<_, _>>().map_err(err)?;
        let max_len = seqs.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(1).max(1);
        let t = InvariantTable::compute(&self.inner, &TableOptions { max_len, seed, force: true, ..Default::default() }).map_err(err)?;
        let maps: Vec<_> = seqs.iter().map(|s| t.milnor_map(s)).collect::<Result<_, _>>().map_err(err)?;
        let k = milnor::free_kernel(&maps).map_err(err)?;
        Ok((k.rank, k.basis))
    }

    fn __repr__(&self) -> String {
        format!(
            "CutDiagram({} components, {} regions, {} walls)",
            self.inner.num_components(),
            self.inner.regions.len(),
            self.inner.walls.len()
        )
    }
}

#[pyclass(name = "InvariantTable", frozen)]
struct PyInvariantTable {
    inner: InvariantTable,
}

impl PyInvariantTable {
    fn seq(&self, s: &str) -> PyResult<Vec<usize>> {
        parse_sequence(s, self.inner.num_components).map_err(err)
    }
}

#[pymethods]
impl PyInvariantTable {
    fn nu(&self, sequence: &str) -> PyResult<BigInt> {
        self.inner.nu(&self.seq(sequence)?).map_err(err)
    }

    fn delta(&self, sequence: &str) -> PyResult<BigInt> {
        self.inner.delta(&self.seq(sequence)?).map_err(err)
    }

    fn m(&self, sequence: &str) -> PyResult<BigInt> {
        Ok(self.inner.entry(&self.seq(sequence)?).map_err(err)?.m.clone())
    }

    /// Signed representative of the arc invariant towards boundary `target`.
    fn nu_arc(&self, sequence: &str, target: usize) -> PyResult<BigInt> {
        Ok(self.inner.nu_arc(&self.seq(sequence)?, target).map_err(err)?.signed)
    }

    /// Values of the Milnor map on the H1 basis, as least nonnegative residues.
    fn milnor_map(&self, sequence: &str) -> PyResult<(BigInt, Vec<BigInt>)> {
        let m = self.inner.milnor_map(&self.seq(sequence)?).map_err(err)?;
        Ok((m.modulus, m.values.into_iter().map(|v| v.value).collect()))
    }

    #[getter]
    fn sequences(&self) -> Vec<String> {
        self.inner
            .ordered()
            .iter()
            .map(|e| milnor::format_sequence(&e.sequence, self.inner.num_components))
            .collect()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("json")
    }

    #[pyo3(signature = (all = false))]
    fn render(&self, all: bool) -> String {
        self.inner.render_text(all)
    }
}

#[pyclass(name = "MagnusSeries", frozen)]
struct PyMagnusSeries {
    inner: MagnusSeries,
}

#[pymethods]
impl PyMagnusSeries {
    /// Coefficient of `X_{i1} ... X_{ik}`, indices starting at 1.
    fn coefficient(&self, indices: Vec<usize>) -> PyResult<BigInt> {
        let idx: Vec<usize> = indices.iter().map(|&i| i.checked_sub(1).ok_or_else(|| PyValueError::new_err("indices start at 1"))).collect::<PyResult<_>>()?;
        self.inner.coefficient(&idx).map_err(err)
    }

    fn lcs_degree(&self) -> Option<usize> {
        self.inner.lcs_degree()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

/// Magnus expansion of a word such as `A B^-1 A` in the given generators.
#[pyfunction]
fn magnus(word: &str, generators: Vec<String>, degree: usize) -> PyResult<PyMagnusSeries> {
    let n = generators.len();
    let alphabet = Alphabet::new(generators);
    let w = alphabet.parse(word).map_err(err)?;
    let s = MagnusSeries::of_word(&w, n, degree, |s| Some(s.0 as usize)).map_err(err)?;
    Ok(PyMagnusSeries { inner: s })
}

/// Free reduction of a word, rendered back in the same syntax.
#[pyfunction]
fn reduce_word(word: &str, generators: Vec<String>) -> PyResult<String> {
    let alphabet = Alphabet::new(generators);
    Ok(alphabet.render(&alphabet.parse(word).map_err(err)?.reduce()))
}

#[pymodule]
fn cutmilnor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCutDiagram>()?;
    m.add_class::<PyInvariantTable>()?;
    m.add_class::<PyMagnusSeries>()?;
    m.add_function(wrap_pyfunction!(magnus, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_word, m)?)?;
    Ok(())
}
