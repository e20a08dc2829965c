use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::whittaker as core;
use core::problem::{parse_problem, run};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(ctx: &core::FieldCtx, s: &str) -> PyResult<core::PPoint> {
    core::PPoint::parse(ctx, s).map_err(err)
}

/// Q(ζ_p) with the ℓ-adic valuation.
#[pyclass(name = "Field", frozen)]
struct Field {
    ctx: core::FieldCtx,
}

#[pymethods]
impl Field {
    #[new]
    fn new(p: u32, ell: u32) -> PyResult<Self> {
        Ok(Field {
            ctx: core::FieldCtx::new(p, ell).map_err(err)?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.ctx.p()
    }

    #[getter]
    fn ell(&self) -> u32 {
        self.ctx.ell()
    }

    /// v(p)/(p − 1) as a string.
    #[getter]
    fn rho(&self) -> String {
        self.ctx.rho().to_string()
    }

    /// Valuation of a rational literal; "inf" for zero.
    fn valuation(&self, x: &str) -> PyResult<String> {
        match point(&self.ctx, x)? {
            core::PPoint::Finite(x) => Ok(self.ctx.valuation(&x).to_string()),
            core::PPoint::Infinity => Err(PyValueError::new_err("valuation of inf")),
        }
    }

    fn __repr__(&self) -> String {
        format!("Field(p={}, ell={})", self.ctx.p(), self.ctx.ell())
    }
}

#[pyclass(name = "Mobius", frozen)]
struct Mobius {
    ctx: core::FieldCtx,
    m: core::Mobius,
}

#[pymethods]
impl Mobius {
    /// The order-p map fixing a and b, to the power n.
    #[staticmethod]
    #[pyo3(signature = (field, a, b, n = 1))]
    fn order_p_fixing(field: &Field, a: &str, b: &str, n: i64) -> PyResult<Self> {
        let ctx = field.ctx.clone();
        let m = core::order_p_fixing(&ctx, &point(&ctx, a)?, &point(&ctx, b)?, n).map_err(err)?;
        Ok(Mobius { ctx, m })
    }

    #[staticmethod]
    fn from_ints(field: &Field, a: i64, b: i64, c: i64, d: i64) -> PyResult<Self> {
        let ctx = field.ctx.clone();
        let m = core::Mobius::from_ints(&ctx, [[a, b], [c, d]]).map_err(err)?;
        Ok(Mobius { ctx, m })
    }

    fn entries(&self) -> Vec<String> {
        self.m.entries().iter().map(|x| x.to_string()).collect()
    }

    fn apply(&self, z: &str) -> PyResult<String> {
        Ok(self.m.apply(&point(&self.ctx, z)?).to_string())
    }

    fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            ctx: self.ctx.clone(),
            m: self.m.compose(&other.m),
        }
    }

    fn inverse(&self) -> Mobius {
        Mobius {
            ctx: self.ctx.clone(),
            m: self.m.inverse(),
        }
    }

    /// Returns (class name, translation length).
    fn classify(&self) -> (String, String) {
        let c = core::classify(&self.ctx, &self.m);
        (c.name().to_string(), c.translation_length().to_string())
    }

    fn __eq__(&self, other: &Mobius) -> bool {
        self.m == other.m
    }

    fn __repr__(&self) -> String {
        format!("Mobius({})", self.m)
    }
}

#[pyclass(name = "PairedConfiguration", frozen)]
struct PairedConfiguration {
    pc: core::PairedConfiguration,
}

#[pymethods]
impl PairedConfiguration {
    #[getter]
    fn genus(&self) -> usize {
        self.pc.genus()
    }

    fn pairs(&self) -> Vec<(String, String)> {
        self.pc
            .pairs()
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    /// Graphviz rendering of the reduced convex hull.
    fn hull_dot(&self) -> PyResult<String> {
        Ok(core::hull::to_dot(
            &core::hull::reduced_convex_hull(&self.pc).map_err(err)?,
        ))
    }

    /// First non-loxodromic word up to `max_len` syllables, as
    /// (word, class), or None.
    fn audit(&self, max_len: usize) -> PyResult<Option<(String, String)>> {
        let w = core::oracle::schottky_audit(&self.pc, max_len).map_err(err)?;
        Ok(w.map(|(w, c)| (w.to_string(), c.name().to_string())))
    }

    fn __repr__(&self) -> String {
        format!("PairedConfiguration({})", self.pc)
    }
}

#[pyclass(name = "Verdict", frozen)]
struct Verdict {
    v: core::Verdict,
}

#[pymethods]
impl Verdict {
    /// "good", "not_good" or "redundant".
    #[getter]
    fn kind(&self) -> &'static str {
        self.v.name()
    }

    #[getter]
    fn folds(&self) -> usize {
        self.v.trace().len()
    }

    /// Point sets after each fold.
    fn trace(&self) -> Vec<Vec<String>> {
        self.v
            .trace()
            .iter()
            .map(|s| s.after.points().iter().map(|x| x.to_string()).collect())
            .collect()
    }

    #[getter]
    fn s_min(&self) -> Option<PairedConfiguration> {
        match &self.v {
            core::Verdict::Good { s_min, .. } => Some(PairedConfiguration { pc: s_min.clone() }),
            _ => None,
        }
    }

    fn __repr__(&self) -> String {
        format!("Verdict({}, folds={})", self.v.name(), self.v.trace().len())
    }
}

#[pyclass(name = "Configuration", frozen)]
struct Configuration {
    cfg: core::Configuration,
}

#[pymethods]
impl Configuration {
    #[new]
    fn new(field: &Field, points: Vec<String>) -> PyResult<Self> {
        let pts = points
            .iter()
            .map(|s| point(&field.ctx, s))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Configuration {
            cfg: core::Configuration::new(&field.ctx, pts).map_err(err)?,
        })
    }

    fn points(&self) -> Vec<String> {
        self.cfg.points().iter().map(|x| x.to_string()).collect()
    }

    /// Raises ValueError when the points are not clustered in separated pairs.
    fn pair_up(&self) -> PyResult<PairedConfiguration> {
        core::pair_up(&self.cfg)
            .map(|pc| PairedConfiguration { pc })
            .map_err(|f| PyValueError::new_err(f.to_string()))
    }

    fn run(&self) -> PyResult<Verdict> {
        Ok(Verdict {
            v: core::run_algorithm(&self.cfg).map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.cfg.len()
    }

    fn __repr__(&self) -> String {
        format!("Configuration({})", self.cfg)
    }
}

/// Runs a JSON problem document; returns (report JSON, exit code).
#[pyfunction]
fn run_problem(text: &str) -> PyResult<(String, i32)> {
    let spec = parse_problem(text).map_err(err)?;
    let report = run(&spec).map_err(err)?;
    Ok((report.to_json(), report.exit_code()))
}

#[pymodule]
fn whittaker(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Mobius>()?;
    m.add_class::<Configuration>()?;
    m.add_class::<PairedConfiguration>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    Ok(())
}
