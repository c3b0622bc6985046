use paretoinfer::analytics::{self, AnalyticsBundle, ImportanceTiers, ParetoFront};
use paretoinfer::emo::{self, NsgaParams, RunResult};
use paretoinfer::inference::{
    build_context, build_prompt, infer, narrate, prompt_hash, BackendConfig, ContextOptions,
    Expertise, Goal, Persona, Question, ReportStore, TemplateId, DEFAULT_CHARACTER_BUDGET,
};
use paretoinfer::problem::{benchmark_schema, make_benchmark_instance};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A numbered Pareto front with named decision-variable columns.
#[pyclass(name = "Front", module = "paretoinfer_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFront {
    inner: ParetoFront,
}

#[pymethods]
impl PyFront {
    /// The bundled seven-row sample table.
    #[staticmethod]
    fn sample_table() -> Self {
        Self {
            inner: analytics::sample_front(),
        }
    }

    /// Parses a front export; benchmark column names are matched when present.
    #[staticmethod]
    #[pyo3(signature = (text, instance_ref = "imported"))]
    fn from_csv(text: &str, instance_ref: &str) -> PyResult<Self> {
        let schema = benchmark_schema();
        let inner = ParetoFront::from_csv(text, instance_ref, Some(&schema))
            .or_else(|_| ParetoFront::from_csv(text, instance_ref, None))
            .map_err(err)?;
        Ok(Self { inner })
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Front({} solutions, {} variables)", self.inner.len(), self.inner.columns().len())
    }

    #[getter]
    fn instance_ref(&self) -> &str {
        self.inner.instance_ref()
    }

    fn numbers(&self) -> Vec<usize> {
        self.inner.solutions().iter().map(|s| s.number).collect()
    }

    fn column_names(&self) -> Vec<String> {
        self.inner.columns().iter().map(|c| c.name.clone()).collect()
    }

    /// (total cost, environmental impact) per solution, in front order.
    fn objectives(&self) -> Vec<(f64, f64)> {
        self.inner.solutions().iter().map(|s| (s.cost(), s.impact())).collect()
    }

    fn variables(&self, number: usize) -> PyResult<Vec<f64>> {
        Ok(self.inner.get(number).map_err(err)?.x.clone())
    }

    /// Numbers of the minimum-cost and minimum-impact solutions.
    fn extremes(&self) -> PyResult<(usize, usize)> {
        let e = analytics::extremes(&self.inner).map_err(err)?;
        Ok((e.min_cost.number, e.min_impact.number))
    }

    /// Knee solution number and its chord distance.
    fn knee(&self) -> PyResult<(usize, f64)> {
        let k = analytics::knee(&self.inner).map_err(err)?;
        Ok((k.solution.number, k.distance))
    }

    fn trade_off<'py>(&self, py: Python<'py>, a: usize, b: usize) -> PyResult<Bound<'py, PyDict>> {
        let t = analytics::trade_off(&self.inner, a, b).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("delta_cost", t.delta_cost)?;
        d.set_item("delta_impact", t.delta_impact)?;
        let top: Vec<(usize, String, f64)> = t
            .top_variable_deltas
            .iter()
            .map(|v| (v.index, v.name.clone(), v.delta))
            .collect();
        d.set_item("variables", top)?;
        Ok(d)
    }

    /// Tier membership plus per-variable scores.
    fn tiers<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        tiers_dict(py, &analytics::categorize_variables(&self.inner).map_err(err)?)
    }

    fn analytics_json(&self) -> PyResult<String> {
        Ok(AnalyticsBundle::compute(&self.inner).map_err(err)?.to_json())
    }
}

fn tiers_dict<'py>(py: Python<'py>, t: &ImportanceTiers) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("primary", t.primary.clone())?;
    d.set_item("secondary", t.secondary.clone())?;
    d.set_item("additional", t.additional.clone())?;
    let scores = PyDict::new(py);
    for s in &t.scores {
        scores.set_item(s.index, s.score)?;
    }
    d.set_item("scores", scores)?;
    d.set_item("low_support", t.is_low_support())?;
    Ok(d)
}

/// One finished optimizer run.
#[pyclass(name = "Run", module = "paretoinfer_py", frozen)]
pub struct PyRun {
    inner: RunResult,
}

#[pymethods]
impl PyRun {
    fn front(&self) -> PyResult<PyFront> {
        let inner = ParetoFront::from_run(&self.inner, &benchmark_schema()).map_err(err)?;
        Ok(PyFront { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Archive hypervolume per generation, where a reference point exists.
    fn hypervolumes(&self) -> Vec<Option<f64>> {
        self.inner.per_generation_stats.iter().map(|s| s.hypervolume).collect()
    }

    #[getter]
    fn instance_ref(&self) -> &str {
        &self.inner.instance_ref
    }
}

/// Runs NSGA-II on the seeded infrastructure benchmark.
#[pyfunction]
#[pyo3(signature = (population_size = 500, generations = 250, seed = 0, instance_seed = 0))]
fn run_benchmark(
    py: Python<'_>,
    population_size: usize,
    generations: usize,
    seed: u64,
    instance_seed: u64,
) -> PyResult<PyRun> {
    let params = NsgaParams {
        population_size,
        generations,
        seed,
        ..NsgaParams::default()
    };
    let inner = py
        .detach(|| emo::run_nsga2(&make_benchmark_instance(instance_seed), &params))
        .map_err(err)?;
    Ok(PyRun { inner })
}

/// Fronts of a minimization point set, as lists of row indices.
#[pyfunction]
fn nondominated_sort(points: Vec<Vec<f64>>) -> Vec<Vec<usize>> {
    emo::fast_nondominated_sort(&points)
}

#[pyfunction]
fn hypervolume(points: Vec<(f64, f64)>, reference: (f64, f64)) -> f64 {
    let pts: Vec<[f64; 2]> = points.into_iter().map(|(a, b)| [a, b]).collect();
    emo::hypervolume(&pts, [reference.0, reference.1])
}

/// Offline explanation for a selection. With `store_dir` the report is
/// appended to that store and its file name returned.
#[pyfunction]
#[pyo3(signature = (
    front,
    selection = Vec::new(),
    template = "solution_brief",
    expertise = "mid_technical",
    goal = "none",
    budget = DEFAULT_CHARACTER_BUDGET,
    store_dir = None,
))]
#[allow(clippy::too_many_arguments)]
fn explain<'py>(
    py: Python<'py>,
    front: &PyFront,
    selection: Vec<usize>,
    template: &str,
    expertise: &str,
    goal: &str,
    budget: usize,
    store_dir: Option<std::path::PathBuf>,
) -> PyResult<Bound<'py, PyDict>> {
    let t = TemplateId::parse(template).ok_or_else(|| err(format!("unknown template {template:?}")))?;
    let e = Expertise::parse(expertise).ok_or_else(|| err(format!("unknown expertise {expertise:?}")))?;
    let g = Goal::parse(goal).ok_or_else(|| err(format!("unknown goal {goal:?}")))?;
    let f = &front.inner;
    let bundle = AnalyticsBundle::compute(f).map_err(err)?;
    let tiers = bundle.tiers.clone().unwrap_or_else(|| ImportanceTiers::unscored(f));
    let ctx = build_context(f, &bundle, &selection, &tiers, ContextOptions::default()).map_err(err)?;
    let prompt = build_prompt(&ctx, &Persona::of(e, g), &Question::Template(t), budget).map_err(err)?;

    let d = PyDict::new(py);
    d.set_item("prompt", prompt.text())?;
    d.set_item("prompt_hash", prompt_hash(&prompt.text()))?;
    match store_dir {
        Some(dir) => {
            let store = ReportStore::open(dir).map_err(err)?;
            let (report, name) = infer(&prompt, &BackendConfig::offline(), &store).map_err(err)?;
            d.set_item("response", report.response_text)?;
            d.set_item("report", name)?;
        }
        None => d.set_item("response", narrate(&prompt))?,
    }
    Ok(d)
}

#[pymodule]
fn paretoinfer_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFront>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(run_benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(nondominated_sort, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
