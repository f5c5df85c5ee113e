//! Self-generation and penal codes.
//!
//! The operator [`psi`] maps a set of candidate punishment paths to the set
//! of universe paths it can enforce: a path is enforceable when every
//! coalition deviation leaves at least one deviating member weakly no
//! better off, with that member's continuation drawn from the candidate
//! set. Only the deterred member's continuation enters the comparison and
//! the family may vary per deviation, so each candidate continuation can be
//! replaced by the deterred player's worst path in the set; the scan
//! therefore prices every deviation against per-player worst paths computed
//! once per call.
//!
//! Iterating from the full universe gives a weakly decreasing sequence of
//! sets whose fixed point is the set of enforceable-forever paths within
//! the universe. Members come with checkable certificates: a single family
//! of per-player worst paths (the optimal penal code) enforces every member
//! simultaneously, and [`verify_family`] produces the full table of exact
//! inequalities or the first failing deviation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::game::{merge_partial, Deviation, StageGame};
use crate::paths::{payoff, tail_values, Path};
use crate::rat::Rat;
use crate::situations::{tail_slot, DeviationScan, MemberMargin, Mode};

/// One punishment path per player, indexed in player order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PunishmentFamily {
    paths: Vec<Path>,
}

impl PunishmentFamily {
    pub fn new(paths: Vec<Path>) -> Self {
        assert!(!paths.is_empty(), "family must cover every player");
        PunishmentFamily { paths }
    }

    pub fn path_for(&self, player: usize) -> &Path {
        &self.paths[player]
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// One verified deviation class: in state `state` (0 is the base path,
/// `k >= 1` is player `k - 1`'s punishment path), the deviation is deterred
/// by `deterring_player`, whose on-path value weakly exceeds the value of
/// deviating and then following their own punishment path.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateEntry {
    pub state: usize,
    pub deviation: Deviation,
    pub deterring_player: usize,
    pub on_path_value: Rat,
    pub deviation_value: Rat,
}

/// A complete enforceability certificate for a base path and a punishment
/// family: one entry per (state, coalition, period class, partial profile).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub base: Path,
    pub family: PunishmentFamily,
    pub witnesses: Vec<CertificateEntry>,
}

/// The first deviation no member of the coalition is deterred from, with
/// every member's exact values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub state: usize,
    pub deviation: Deviation,
    pub margins: Vec<MemberMargin>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum VerifyOutcome {
    Accepted(Certificate),
    Rejected(Counterexample),
}

impl VerifyOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, VerifyOutcome::Accepted(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            VerifyOutcome::Accepted(c) => Some(c),
            VerifyOutcome::Rejected(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            VerifyOutcome::Accepted(_) => None,
            VerifyOutcome::Rejected(c) => Some(c),
        }
    }
}

/// Checks that the family enforces the base path and itself: for every
/// state (base plus each punishment path), every mode coalition, every
/// period up to that state's horizon, and every partial profile, some
/// coalition member is weakly deterred when their continuation after the
/// deviation is their own family path.
///
/// States, coalitions, periods, and profiles are scanned in deterministic
/// order and the first failure is reported.
pub fn verify_family(
    game: &StageGame,
    mode: Mode,
    base: &Path,
    family: &PunishmentFamily,
) -> VerifyOutcome {
    assert_eq!(
        family.len(),
        game.num_players(),
        "one punishment path per player"
    );
    let punish_values: Vec<Rat> = (0..game.num_players())
        .map(|i| payoff(game, family.path_for(i), i))
        .collect();
    let scan = DeviationScan::new(game, mode, &punish_values);
    let mut witnesses = Vec::new();

    for state in 0..=game.num_players() {
        let path = if state == 0 {
            base
        } else {
            family.path_for(state - 1)
        };
        let tails = tail_values(game, path);
        for (ci, coalition) in scan.coalitions.iter().enumerate() {
            for tau in 1..=path.horizon() {
                let on_path = path.profile_at(tau);
                let tail = &tails[tau - 1];
                for partial in &scan.partials[ci] {
                    let merged = merge_partial(on_path, coalition, partial);
                    let m = game.profile_index(&merged);
                    let deterrer = coalition
                        .members()
                        .iter()
                        .copied()
                        .find(|&j| tail[j] >= scan.rescaled[m][j]);
                    let deviation = Deviation::new(coalition.clone(), tau, partial.clone());
                    match deterrer {
                        Some(j) => {
                            let spliced = path.splice(&deviation, family.path_for(j));
                            let entry = CertificateEntry {
                                state,
                                deviation,
                                deterring_player: j,
                                on_path_value: payoff(game, path, j),
                                deviation_value: payoff(game, &spliced, j),
                            };
                            debug_assert!(entry.on_path_value >= entry.deviation_value);
                            witnesses.push(entry);
                        }
                        None => {
                            let margins = coalition
                                .members()
                                .iter()
                                .map(|&j| {
                                    let spliced = path.splice(&deviation, family.path_for(j));
                                    MemberMargin {
                                        player: j,
                                        induced_value: payoff(game, &spliced, j),
                                        current_value: payoff(game, path, j),
                                    }
                                })
                                .collect();
                            return VerifyOutcome::Rejected(Counterexample {
                                state,
                                deviation,
                                margins,
                            });
                        }
                    }
                }
            }
        }
    }
    VerifyOutcome::Accepted(Certificate {
        base: base.clone(),
        family: family.clone(),
        witnesses,
    })
}

/// The self-generation operator: the subset of `universe` enforceable with
/// punishments drawn from `generators`. Empty generators enforce nothing.
///
/// Requires `generators` to be a subset of `universe`.
pub fn psi(
    game: &StageGame,
    mode: Mode,
    generators: &BTreeSet<Path>,
    universe: &[Path],
) -> BTreeSet<Path> {
    if generators.is_empty() {
        return BTreeSet::new();
    }
    let in_universe: BTreeSet<&Path> = universe.iter().collect();
    assert!(
        generators.iter().all(|p| in_universe.contains(p)),
        "generators must lie inside the universe"
    );
    let family =
        crate::situations::worst_of_set(game, generators).expect("generators are nonempty");
    let punish_values: Vec<Rat> = (0..game.num_players())
        .map(|i| payoff(game, family.path_for(i), i))
        .collect();
    let scan = DeviationScan::new(game, mode, &punish_values);
    universe
        .iter()
        .filter(|x| enforceable(game, &scan, x))
        .cloned()
        .collect()
}

/// Weak-inequality enforceability of one path against precomputed
/// punishment values: every deviation class must leave some coalition
/// member with on-path tail value at least the rescaled deviation value.
fn enforceable(game: &StageGame, scan: &DeviationScan, x: &Path) -> bool {
    let tails = tail_values(game, x);
    for tau in 1..=x.horizon() {
        let on_path = x.profile_at(tau);
        let tail = &tails[tail_slot(x, tau)];
        for (ci, coalition) in scan.coalitions.iter().enumerate() {
            for partial in &scan.partials[ci] {
                let merged = merge_partial(on_path, coalition, partial);
                let m = game.profile_index(&merged);
                let deterred = coalition
                    .members()
                    .iter()
                    .any(|&i| tail[i] >= scan.rescaled[m][i]);
                if !deterred {
                    return false;
                }
            }
        }
    }
    true
}

/// Trace of the decreasing iteration from the full universe to its largest
/// self-generating subset.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IterationTrace {
    /// Set sizes starting with the universe itself; weakly decreasing.
    pub sizes: Vec<usize>,
    /// Number of operator applications, including the confirming round.
    pub rounds: usize,
    pub fixed_point: BTreeSet<Path>,
}

/// Iterates the self-generation operator from the full universe until the
/// set stops shrinking. Terminates in at most `universe.len() + 1` rounds;
/// the result is the largest fixed point within the universe, and every
/// member is enforceable with punishments drawn from the result itself.
pub fn fixed_point(game: &StageGame, mode: Mode, universe: &[Path]) -> IterationTrace {
    let mut current: BTreeSet<Path> = universe.iter().cloned().collect();
    let mut sizes = vec![current.len()];
    let mut rounds = 0;
    loop {
        let candidates: Vec<Path> = current.iter().cloned().collect();
        let next = psi(game, mode, &current, &candidates);
        rounds += 1;
        sizes.push(next.len());
        let done = next.len() == current.len();
        current = next;
        if done {
            break;
        }
    }
    IterationTrace {
        sizes,
        rounds,
        fixed_point: current,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PenalCodeError {
    #[error("cannot extract a penal code from an empty set")]
    EmptySet,
    #[error("set is not self-generating; {} path(s) are not enforceable from it", excluded.len())]
    NotSelfGenerating { excluded: Vec<Path> },
}

/// Extracts the optimal penal code of a self-generating set: the family of
/// per-player worst paths. One family enforces every member of the set, so
/// [`verify_family`] accepts it for every base path.
///
/// Refuses when the set is empty or not self-generating.
pub fn optimal_penal_code(
    game: &StageGame,
    mode: Mode,
    equilibrium_paths: &BTreeSet<Path>,
) -> Result<PunishmentFamily, PenalCodeError> {
    if equilibrium_paths.is_empty() {
        return Err(PenalCodeError::EmptySet);
    }
    let candidates: Vec<Path> = equilibrium_paths.iter().cloned().collect();
    let regenerated = psi(game, mode, equilibrium_paths, &candidates);
    if regenerated.len() != equilibrium_paths.len() {
        let excluded = equilibrium_paths.difference(&regenerated).cloned().collect();
        return Err(PenalCodeError::NotSelfGenerating { excluded });
    }
    Ok(crate::situations::worst_of_set(game, equilibrium_paths).expect("set is nonempty"))
}

/// Fixed points under both deviation modes on the same universe. Allowing
/// coalitions only removes equilibrium paths, so the coalitional set is
/// always contained in the individual-deviation set.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModeComparison {
    pub nash: IterationTrace,
    pub coalitional: IterationTrace,
    /// Paths enforceable against individual deviations only.
    pub nash_only: Vec<Path>,
    pub containment_holds: bool,
}

pub fn compare_modes(game: &StageGame, universe: &[Path]) -> ModeComparison {
    let nash = fixed_point(game, Mode::Nash, universe);
    let coalitional = fixed_point(game, Mode::Coalitional, universe);
    let nash_only: Vec<Path> = nash
        .fixed_point
        .difference(&coalitional.fixed_point)
        .cloned()
        .collect();
    let containment_holds = coalitional.fixed_point.is_subset(&nash.fixed_point);
    ModeComparison {
        nash,
        coalitional,
        nash_only,
        containment_holds,
    }
}
