//! Python bindings: the stage game and path types plus the solve, verify,
//! stability, and compare operations, returning plain dicts with exact
//! rationals rendered as strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use cssbkit_core::equilibrium::{
    compare_modes, fixed_point, optimal_penal_code, verify_family, IterationTrace,
    PunishmentFamily, VerifyOutcome,
};
use cssbkit_core::game::{ActionProfile, Deviation, StageGame};
use cssbkit_core::paths::{enumerate_universe, payoff_vector, Path, DEFAULT_UNIVERSE_CAP};
use cssbkit_core::rat::format_rat;
use cssbkit_core::situations::{
    external_stability, internal_stability, MemberMargin, Mode, StandardOfBehavior,
};

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse::<Mode>().map_err(value_err)
}

/// A finite stage game with exact rational payoffs and discount factor.
#[pyclass(name = "StageGame", frozen, module = "cssbkit_py")]
struct PyGame {
    inner: StageGame,
}

#[pymethods]
impl PyGame {
    /// Parse the JSON game-file format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: StageGame::parse(text).map_err(value_err)?,
        })
    }

    /// Read and parse a game file from disk.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| value_err(format!("cannot read {path}: {e}")))?;
        PyGame::parse(&text)
    }

    fn players(&self) -> Vec<String> {
        self.inner.players().to_vec()
    }

    fn actions(&self) -> Vec<Vec<String>> {
        (0..self.inner.num_players())
            .map(|i| self.inner.action_labels(i).to_vec())
            .collect()
    }

    fn num_players(&self) -> usize {
        self.inner.num_players()
    }

    /// The discount factor as an exact rational string.
    fn delta(&self) -> String {
        format_rat(self.inner.delta())
    }

    /// Stage payoffs of an action profile given as one label per player.
    fn payoff(&self, profile: Vec<String>) -> PyResult<Vec<String>> {
        if profile.len() != self.inner.num_players() {
            return Err(value_err(format!(
                "expected {} actions, got {}",
                self.inner.num_players(),
                profile.len()
            )));
        }
        let mut actions = Vec::with_capacity(profile.len());
        for (player, label) in profile.iter().enumerate() {
            let idx = self.inner.action_index(player, label).ok_or_else(|| {
                value_err(format!(
                    "unknown action `{label}` for player `{}`",
                    self.inner.player_id(player)
                ))
            })?;
            actions.push(idx);
        }
        let profile = ActionProfile::new(actions);
        Ok(self
            .inner
            .payoff_row(&profile)
            .iter()
            .map(format_rat)
            .collect())
    }

    /// Parse a path literal such as `"C,D | C,C"` against this game.
    fn path(&self, literal: &str) -> PyResult<PyPath> {
        let path = Path::parse(&self.inner, literal).map_err(value_err)?;
        Ok(PyPath::wrap(&self.inner, path))
    }

    /// Exact discounted payoffs of a path, one rational string per player.
    fn payoff_of(&self, path: &PyPath) -> Vec<String> {
        payoff_vector(&self.inner, &path.inner)
            .iter()
            .map(format_rat)
            .collect()
    }

    /// Float approximations of the discounted payoffs; display only.
    fn payoff_of_float(&self, path: &PyPath) -> Vec<f64> {
        payoff_vector(&self.inner, &path.inner)
            .iter()
            .map(|r| {
                let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
                let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
                n / d
            })
            .collect()
    }

    /// All canonical paths with transient length at most `max_prefix` and
    /// cycle length at most `max_cycle`.
    #[pyo3(signature = (max_prefix, max_cycle, cap=None))]
    fn universe(
        &self,
        max_prefix: usize,
        max_cycle: usize,
        cap: Option<u64>,
    ) -> PyResult<Vec<PyPath>> {
        let universe = enumerate_universe(
            &self.inner,
            max_prefix,
            max_cycle,
            cap.unwrap_or(DEFAULT_UNIVERSE_CAP),
        )
        .map_err(value_err)?;
        Ok(universe
            .into_iter()
            .map(|p| PyPath::wrap(&self.inner, p))
            .collect())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "StageGame(players={:?}, delta={})",
            self.inner.players(),
            format_rat(self.inner.delta())
        )
    }
}

/// An eventually periodic path in canonical form.
#[pyclass(name = "Path", frozen, eq, hash, module = "cssbkit_py")]
#[derive(PartialEq, Eq, Hash)]
struct PyPath {
    inner: Path,
    literal: String,
}

impl PyPath {
    fn wrap(game: &StageGame, path: Path) -> Self {
        let literal = path.literal(game);
        PyPath {
            inner: path,
            literal,
        }
    }
}

#[pymethods]
impl PyPath {
    fn literal(&self) -> String {
        self.literal.clone()
    }

    fn prefix_len(&self) -> usize {
        self.inner.preperiod()
    }

    fn cycle_len(&self) -> usize {
        self.inner.cycle_len()
    }

    /// The path from `from_period` onward (1 is the identity).
    fn tail(&self, game: &PyGame, from_period: usize) -> PyResult<PyPath> {
        if from_period == 0 {
            return Err(value_err("periods are 1-based"));
        }
        Ok(PyPath::wrap(&game.inner, self.inner.tail(from_period)))
    }

    fn __repr__(&self) -> String {
        format!("Path(\"{}\")", self.literal)
    }

    fn __str__(&self) -> String {
        self.literal.clone()
    }
}

fn family_from(game: &StageGame, punishments: &[Py<PyPath>]) -> PyResult<PunishmentFamily> {
    if punishments.len() != game.num_players() {
        return Err(value_err(format!(
            "expected {} punishment paths (one per player), got {}",
            game.num_players(),
            punishments.len()
        )));
    }
    Ok(PunishmentFamily::new(
        punishments.iter().map(|p| p.get().inner.clone()).collect(),
    ))
}

fn deviation_dict<'py>(
    py: Python<'py>,
    game: &StageGame,
    dev: &Deviation,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    let coalition: Vec<String> = dev
        .coalition()
        .members()
        .iter()
        .map(|&m| game.player_id(m).to_string())
        .collect();
    out.set_item("coalition", coalition)?;
    out.set_item("period", dev.period())?;
    let actions = PyDict::new(py);
    for (&member, &action) in dev.coalition().members().iter().zip(dev.partial_profile()) {
        actions.set_item(
            game.player_id(member),
            game.action_labels(member)[action].clone(),
        )?;
    }
    out.set_item("actions", actions)?;
    Ok(out)
}

fn margins_list<'py>(
    py: Python<'py>,
    game: &StageGame,
    margins: &[MemberMargin],
) -> PyResult<Bound<'py, PyList>> {
    let out = PyList::empty(py);
    for margin in margins {
        let entry = PyDict::new(py);
        entry.set_item("player", game.player_id(margin.player))?;
        entry.set_item("induced_value", format_rat(&margin.induced_value))?;
        entry.set_item("current_value", format_rat(&margin.current_value))?;
        out.append(entry)?;
    }
    Ok(out)
}

fn trace_dict<'py>(
    py: Python<'py>,
    game: &StageGame,
    trace: &IterationTrace,
) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    out.set_item("sizes", trace.sizes.clone())?;
    out.set_item("rounds", trace.rounds)?;
    let mut literals: Vec<String> = trace.fixed_point.iter().map(|p| p.literal(game)).collect();
    literals.sort();
    out.set_item("fixed_point", literals)?;
    Ok(out)
}

/// Iterate the self-generation operator over a fresh universe and report
/// the fixed point, its payoffs, and its optimal penal code.
#[pyfunction]
#[pyo3(signature = (game, mode, max_prefix, max_cycle, cap=None))]
fn solve<'py>(
    py: Python<'py>,
    game: &PyGame,
    mode: &str,
    max_prefix: usize,
    max_cycle: usize,
    cap: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let universe = enumerate_universe(
        &game.inner,
        max_prefix,
        max_cycle,
        cap.unwrap_or(DEFAULT_UNIVERSE_CAP),
    )
    .map_err(value_err)?;
    let trace = fixed_point(&game.inner, mode, &universe);

    let out = trace_dict(py, &game.inner, &trace)?;
    out.set_item("mode", mode.name())?;
    out.set_item("universe_size", universe.len())?;

    let payoffs = PyDict::new(py);
    for path in &trace.fixed_point {
        let values: Vec<String> = payoff_vector(&game.inner, path)
            .iter()
            .map(format_rat)
            .collect();
        payoffs.set_item(path.literal(&game.inner), values)?;
    }
    out.set_item("payoffs", payoffs)?;

    let penal_code = PyDict::new(py);
    if !trace.fixed_point.is_empty() {
        let family = optimal_penal_code(&game.inner, mode, &trace.fixed_point)
            .expect("fixed points are self-generating");
        for (player, path) in family.paths().iter().enumerate() {
            penal_code.set_item(game.inner.player_id(player), path.literal(&game.inner))?;
        }
    }
    out.set_item("penal_code", penal_code)?;
    Ok(out)
}

/// Check one path against an explicit punishment family.
#[pyfunction]
fn verify<'py>(
    py: Python<'py>,
    game: &PyGame,
    mode: &str,
    path: &PyPath,
    punishments: Vec<Py<PyPath>>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let family = family_from(&game.inner, &punishments)?;
    let outcome = verify_family(&game.inner, mode, &path.inner, &family);

    let out = PyDict::new(py);
    out.set_item("accepted", outcome.is_accepted())?;
    match outcome {
        VerifyOutcome::Accepted(cert) => {
            let entries = PyList::empty(py);
            for w in &cert.witnesses {
                let entry = PyDict::new(py);
                entry.set_item("state", w.state)?;
                entry.set_item("deviation", deviation_dict(py, &game.inner, &w.deviation)?)?;
                entry.set_item(
                    "deterring_player",
                    game.inner.player_id(w.deterring_player),
                )?;
                entry.set_item("on_path_value", format_rat(&w.on_path_value))?;
                entry.set_item("deviation_value", format_rat(&w.deviation_value))?;
                entries.append(entry)?;
            }
            out.set_item("certificate", entries)?;
            out.set_item("counterexample", py.None())?;
        }
        VerifyOutcome::Rejected(counter) => {
            let entry = PyDict::new(py);
            entry.set_item("state", counter.state)?;
            entry.set_item(
                "deviation",
                deviation_dict(py, &game.inner, &counter.deviation)?,
            )?;
            entry.set_item("margins", margins_list(py, &game.inner, &counter.margins)?)?;
            out.set_item("certificate", py.None())?;
            out.set_item("counterexample", entry)?;
        }
    }
    Ok(out)
}

/// Audit a standard of behavior (a list of paths) for internal stability
/// and external stability relative to a fresh universe.
#[pyfunction]
#[pyo3(signature = (game, mode, standard, max_prefix, max_cycle, cap=None))]
fn stability<'py>(
    py: Python<'py>,
    game: &PyGame,
    mode: &str,
    standard: Vec<Py<PyPath>>,
    max_prefix: usize,
    max_cycle: usize,
    cap: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let universe = enumerate_universe(
        &game.inner,
        max_prefix,
        max_cycle,
        cap.unwrap_or(DEFAULT_UNIVERSE_CAP),
    )
    .map_err(value_err)?;
    let sb = StandardOfBehavior::new(standard.iter().map(|p| p.get().inner.clone()));
    if let Some(outside) = sb.iter().find(|p| universe.binary_search(p).is_err()) {
        return Err(value_err(format!(
            "standard path {} lies outside the universe; raise the bounds",
            outside.literal(&game.inner)
        )));
    }

    let internal = internal_stability(&game.inner, mode, &sb, None);
    let external = external_stability(&game.inner, mode, &sb, &universe, None);

    let out = PyDict::new(py);
    let internal_dict = PyDict::new(py);
    internal_dict.set_item("stable", internal.stable)?;
    let violations = PyList::empty(py);
    for (path, witness) in &internal.violations {
        let entry = PyDict::new(py);
        entry.set_item("path", path.literal(&game.inner))?;
        entry.set_item(
            "deviation",
            deviation_dict(py, &game.inner, &witness.deviation)?,
        )?;
        entry.set_item("margins", margins_list(py, &game.inner, &witness.margins)?)?;
        violations.append(entry)?;
    }
    internal_dict.set_item("violations", violations)?;
    out.set_item("internal", internal_dict)?;

    let external_dict = PyDict::new(py);
    external_dict.set_item("stable", external.stable)?;
    let mut undominated: Vec<String> = external
        .undominated
        .iter()
        .map(|p| p.literal(&game.inner))
        .collect();
    undominated.sort();
    external_dict.set_item("undominated", undominated)?;
    out.set_item("external", external_dict)?;
    Ok(out)
}

/// Solve under both deviation modes and report the containment.
#[pyfunction]
#[pyo3(signature = (game, max_prefix, max_cycle, cap=None))]
fn compare<'py>(
    py: Python<'py>,
    game: &PyGame,
    max_prefix: usize,
    max_cycle: usize,
    cap: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let universe = enumerate_universe(
        &game.inner,
        max_prefix,
        max_cycle,
        cap.unwrap_or(DEFAULT_UNIVERSE_CAP),
    )
    .map_err(value_err)?;
    let comparison = compare_modes(&game.inner, &universe);
    let out = PyDict::new(py);
    out.set_item("universe_size", universe.len())?;
    out.set_item("nash", trace_dict(py, &game.inner, &comparison.nash)?)?;
    out.set_item(
        "coalitional",
        trace_dict(py, &game.inner, &comparison.coalitional)?,
    )?;
    let mut nash_only: Vec<String> = comparison
        .nash_only
        .iter()
        .map(|p| p.literal(&game.inner))
        .collect();
    nash_only.sort();
    out.set_item("nash_only", nash_only)?;
    out.set_item("containment_holds", comparison.containment_holds)?;
    Ok(out)
}

#[pymodule]
fn cssbkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGame>()?;
    m.add_class::<PyPath>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    Ok(())
}
