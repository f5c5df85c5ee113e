//! Standards of behavior and conservative domination.
//!
//! A nondiscriminating standard of behavior is a single finite set of paths
//! prescribed at every position. A path is conservatively dominated when
//! some coalition can deviate at some period and every member strictly
//! prefers every continuation the standard then allows. Because the
//! standard's worst continuation for a player is what a conservative
//! deviator reckons with, domination reduces to comparisons against the
//! per-player worst paths of the standard.
//!
//! Domination uses strict inequalities; the enforceability checks in
//! [`crate::equilibrium`] use weak ones. The two comparison sites are kept
//! separate on purpose.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num::One;
use thiserror::Error;

use crate::equilibrium::PunishmentFamily;
use crate::game::{deviation_profiles, merge_partial, Coalition, Deviation, StageGame};
use crate::paths::{payoff, tail_values, Path, PathError};
use crate::rat::Rat;

/// Which deviations the inducement correspondence allows.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// Only single players may deviate.
    Nash,
    /// Every nonempty coalition may deviate.
    Coalitional,
}

impl Mode {
    /// The coalitions this mode scans, in deterministic order.
    pub fn coalitions(&self, game: &StageGame) -> Vec<Coalition> {
        match self {
            Mode::Nash => (0..game.num_players()).map(Coalition::singleton).collect(),
            Mode::Coalitional => Coalition::all(game.num_players()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Nash => "nash",
            Mode::Coalitional => "coalition",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nash" => Ok(Mode::Nash),
            "coalition" | "coalitional" => Ok(Mode::Coalitional),
            other => Err(format!("unknown mode `{other}`; use nash or coalition")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("standard of behavior is empty")]
pub struct EmptySbError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct SbParseError {
    pub line: usize,
    pub source: PathError,
}

/// A nondiscriminating standard of behavior: one finite path set for every
/// position.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct StandardOfBehavior {
    paths: BTreeSet<Path>,
}

impl StandardOfBehavior {
    pub fn new(paths: impl IntoIterator<Item = Path>) -> Self {
        StandardOfBehavior {
            paths: paths.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        StandardOfBehavior::default()
    }

    /// Parses one path literal per line; blank lines and `#` comments are
    /// ignored.
    pub fn parse(game: &StageGame, text: &str) -> Result<Self, SbParseError> {
        let mut paths = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let path = Path::parse(game, line).map_err(|source| SbParseError {
                line: idx + 1,
                source,
            })?;
            paths.insert(path);
        }
        Ok(StandardOfBehavior { paths })
    }

    pub fn paths(&self) -> &BTreeSet<Path> {
        &self.paths
    }

    pub fn iter(&self) -> impl Iterator<Item = &Path> {
        self.paths.iter()
    }

    pub fn contains(&self, path: &Path) -> bool {
        self.paths.contains(path)
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// One canonical literal per line.
    pub fn to_text(&self, game: &StageGame) -> String {
        let mut lines: Vec<String> = self.paths.iter().map(|p| p.literal(game)).collect();
        lines.sort();
        lines.join("\n")
    }
}

/// One coalition member's side of a domination witness: the exact value of
/// deviating (and then receiving their worst continuation in the standard)
/// against the exact value of staying on the current path.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MemberMargin {
    pub player: usize,
    pub induced_value: Rat,
    pub current_value: Rat,
}

/// Evidence that a path is conservatively dominated: the deviation and the
/// member-wise strict margins.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DominationWitness {
    pub deviation: Deviation,
    pub margins: Vec<MemberMargin>,
}

/// For each player, a path in the standard minimizing that player's payoff.
/// Ties resolve to the smallest path in canonical encoding order.
pub fn worst_paths(
    game: &StageGame,
    sb: &StandardOfBehavior,
) -> Result<PunishmentFamily, EmptySbError> {
    worst_of_set(game, sb.paths()).ok_or(EmptySbError)
}

pub(crate) fn worst_of_set(game: &StageGame, paths: &BTreeSet<Path>) -> Option<PunishmentFamily> {
    let first = paths.iter().next()?;
    let n = game.num_players();
    let mut best: Vec<&Path> = vec![first; n];
    let mut best_values: Vec<Rat> = (0..n).map(|i| payoff(game, first, i)).collect();
    for path in paths.iter().skip(1) {
        for i in 0..n {
            let value = payoff(game, path, i);
            // Strict comparison keeps the earliest (smallest) minimizer.
            if value < best_values[i] {
                best_values[i] = value;
                best[i] = path;
            }
        }
    }
    Some(PunishmentFamily::new(
        best.into_iter().cloned().collect::<Vec<_>>(),
    ))
}

/// Scans deviations of `x` in deterministic order (period, then coalition
/// by size and members, then partial profiles) and returns the first one
/// where every coalition member strictly gains against the standard's worst
/// continuations. `None` means `x` is not conservatively dominated.
///
/// Periods are scanned through `tau_bound` when given, and always through
/// the path's horizon; beyond the horizon the (profile, tail) pairs repeat,
/// so larger bounds add no new verdicts. An empty standard dominates
/// nothing: the induced positions would offer no continuations at all.
pub fn cdom_member(
    game: &StageGame,
    mode: Mode,
    sb: &StandardOfBehavior,
    x: &Path,
    tau_bound: Option<usize>,
) -> Option<DominationWitness> {
    if sb.is_empty() {
        return None;
    }
    let family = worst_paths(game, sb).expect("nonempty standard");
    let punish_values: Vec<Rat> = (0..game.num_players())
        .map(|i| payoff(game, family.path_for(i), i))
        .collect();
    let scan = DeviationScan::new(game, mode, &punish_values);
    let bound = tau_bound.map_or(x.horizon(), |b| b.max(x.horizon()));
    let tails = tail_values(game, x);

    let delta = game.delta();
    let one_minus = Rat::one() - delta;
    // Running a_i over the first tau - 1 periods, and delta^(tau - 1),
    // to report witness values at the original (unrescaled) scale.
    let mut accumulated: Vec<Rat> = vec![Rat::from_integer(0.into()); game.num_players()];
    let mut pow = Rat::one();

    for tau in 1..=bound {
        let on_path = x.profile_at(tau);
        let tail = &tails[tail_slot(x, tau)];
        for (ci, coalition) in scan.coalitions.iter().enumerate() {
            for partial in &scan.partials[ci] {
                let merged = merge_partial(on_path, coalition, partial);
                let m = game.profile_index(&merged);
                let dominated = coalition
                    .members()
                    .iter()
                    .all(|&i| scan.rescaled[m][i] > tail[i]);
                if dominated {
                    let margins = coalition
                        .members()
                        .iter()
                        .map(|&i| MemberMargin {
                            player: i,
                            induced_value: &accumulated[i] + &pow * &scan.rescaled[m][i],
                            current_value: &accumulated[i] + &pow * &tail[i],
                        })
                        .collect();
                    return Some(DominationWitness {
                        deviation: Deviation::new(coalition.clone(), tau, partial.clone()),
                        margins,
                    });
                }
            }
        }
        for (i, acc) in accumulated.iter_mut().enumerate() {
            *acc += &pow * &one_minus * game.payoff(on_path, i);
        }
        pow *= delta;
    }
    None
}

/// Index into a tail-value table for any period, wrapping past the horizon.
pub(crate) fn tail_slot(x: &Path, tau: usize) -> usize {
    let p = x.preperiod();
    if tau <= x.horizon() {
        tau - 1
    } else {
        p + (tau - p - 1) % x.cycle_len()
    }
}

/// Per-call tables shared by the deviation scans: the coalitions of the
/// mode, their partial profiles, and for every profile and player the value
/// of playing it once and then receiving that player's punishment payoff,
/// rescaled to the deviation period.
pub(crate) struct DeviationScan {
    pub coalitions: Vec<Coalition>,
    pub partials: Vec<Vec<Vec<usize>>>,
    pub rescaled: Vec<Vec<Rat>>,
}

impl DeviationScan {
    pub fn new(game: &StageGame, mode: Mode, punish_values: &[Rat]) -> Self {
        let delta = game.delta();
        let one_minus = Rat::one() - delta;
        let coalitions = mode.coalitions(game);
        let partials = coalitions
            .iter()
            .map(|c| deviation_profiles(game, c))
            .collect();
        let rescaled = (0..game.num_profiles())
            .map(|m| {
                (0..game.num_players())
                    .map(|i| &one_minus * game.payoff_by_index(m, i) + delta * &punish_values[i])
                    .collect()
            })
            .collect();
        DeviationScan {
            coalitions,
            partials,
            rescaled,
        }
    }
}

/// Outcome of the internal stability audit: no path in the standard may be
/// conservatively dominated relative to the standard itself.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InternalStability {
    pub stable: bool,
    pub violations: Vec<(Path, DominationWitness)>,
}

pub fn internal_stability(
    game: &StageGame,
    mode: Mode,
    sb: &StandardOfBehavior,
    tau_bound: Option<usize>,
) -> InternalStability {
    let mut violations = Vec::new();
    for x in sb.iter() {
        if let Some(witness) = cdom_member(game, mode, sb, x, tau_bound) {
            violations.push((x.clone(), witness));
        }
    }
    InternalStability {
        stable: violations.is_empty(),
        violations,
    }
}

/// Outcome of the external stability audit relative to a finite universe:
/// every universe path outside the standard must be dominated. Paths
/// outside the universe are unclassified, so the verdict is only relative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExternalStability {
    pub stable: bool,
    pub undominated: Vec<Path>,
}

pub fn external_stability(
    game: &StageGame,
    mode: Mode,
    sb: &StandardOfBehavior,
    universe: &[Path],
    tau_bound: Option<usize>,
) -> ExternalStability {
    let mut undominated = Vec::new();
    for x in universe {
        if sb.contains(x) {
            continue;
        }
        if cdom_member(game, mode, sb, x, tau_bound).is_none() {
            undominated.push(x.clone());
        }
    }
    ExternalStability {
        stable: undominated.is_empty(),
        undominated,
    }
}
