//! Eventually periodic paths: the finite representation of infinite play.
//!
//! A [`Path`] is a finite transient (possibly empty) followed by a primitive
//! cycle repeated forever. The class is closed under taking tails and under
//! splicing in one-period deviations, which is exactly what the equilibrium
//! machinery needs. Canonical form makes structural equality coincide with
//! equality of the underlying infinite sequences.
//!
//! Cycle rotations are distinct paths: `| A;B` and `| B;A` differ in period
//! one and generally earn different payoffs. Canonicalization only removes
//! genuine redundancy (repeated cycle words, transient steps the cycle
//! already produces).

use std::collections::BTreeSet;
use std::fmt;

use num::{BigUint, One, Zero};
use thiserror::Error;

use crate::game::{merge, ActionProfile, Deviation, StageGame};
use crate::rat::Rat;

/// Default guard on universe enumeration size.
pub const DEFAULT_UNIVERSE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("cycle must contain at least one profile")]
    EmptyCycle,
    #[error("path literal `{0}` must contain exactly one `|`")]
    Separator(String),
    #[error("profile `{text}` has {got} actions, expected {expected}")]
    ProfileArity {
        text: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown action `{label}` for player `{player}`")]
    UnknownLabel { label: String, player: String },
}

/// An eventually periodic path in canonical form.
///
/// Canonical means the cycle is primitive (not a shorter word repeated) and
/// the transient is minimal (its last profile never equals the profile the
/// cycle would produce one step earlier). Two paths are equal exactly when
/// their canonical forms are identical; the derived ordering on the
/// canonical encoding is the tie-break order used throughout the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    prefix: Vec<ActionProfile>,
    cycle: Vec<ActionProfile>,
}

impl Path {
    /// Canonicalizes the given transient and cycle.
    pub fn new(prefix: Vec<ActionProfile>, cycle: Vec<ActionProfile>) -> Result<Self, PathError> {
        if cycle.is_empty() {
            return Err(PathError::EmptyCycle);
        }
        let (prefix, cycle) = canonicalize(prefix, cycle);
        Ok(Path { prefix, cycle })
    }

    pub fn constant(profile: ActionProfile) -> Self {
        Path {
            prefix: Vec::new(),
            cycle: vec![profile],
        }
    }

    pub fn prefix(&self) -> &[ActionProfile] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[ActionProfile] {
        &self.cycle
    }

    /// Transient length `p`.
    pub fn preperiod(&self) -> usize {
        self.prefix.len()
    }

    /// Cycle length `c`.
    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// `p + c`: beyond this period the pairs (profile, tail) repeat.
    pub fn horizon(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// The profile played at 1-based `period`.
    pub fn profile_at(&self, period: usize) -> &ActionProfile {
        assert!(period >= 1, "periods are 1-based");
        let t = period - 1;
        if t < self.prefix.len() {
            &self.prefix[t]
        } else {
            &self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The path from `from_period` onward (1 is the identity).
    pub fn tail(&self, from_period: usize) -> Path {
        assert!(from_period >= 1, "periods are 1-based");
        let drop = from_period - 1;
        if drop <= self.prefix.len() {
            Path::new(self.prefix[drop..].to_vec(), self.cycle.clone())
        } else {
            let k = (drop - self.prefix.len()) % self.cycle.len();
            let mut rotated = self.cycle[k..].to_vec();
            rotated.extend_from_slice(&self.cycle[..k]);
            Path::new(Vec::new(), rotated)
        }
        .expect("tails preserve nonempty cycles")
    }

    /// Follow this path through the deviation's period minus one, apply the
    /// deviation there, then follow `continuation`.
    pub fn splice(&self, dev: &Deviation, continuation: &Path) -> Path {
        let tau = dev.period();
        let mut prefix = Vec::with_capacity(tau + continuation.prefix.len());
        for t in 1..tau {
            prefix.push(self.profile_at(t).clone());
        }
        prefix.push(merge(self.profile_at(tau), dev));
        prefix.extend(continuation.prefix.iter().cloned());
        Path::new(prefix, continuation.cycle.clone()).expect("continuation cycle is nonempty")
    }

    /// Parses the path literal grammar: transient profiles, a `|`, then the
    /// cycle, with profiles separated by `;` and actions by `,`. The
    /// transient may be empty: `| C,C` is constant cooperation.
    pub fn parse(game: &StageGame, text: &str) -> Result<Self, PathError> {
        let mut parts = text.split('|');
        let prefix_part = parts.next().unwrap_or("");
        let cycle_part = parts
            .next()
            .ok_or_else(|| PathError::Separator(text.trim().to_string()))?;
        if parts.next().is_some() {
            return Err(PathError::Separator(text.trim().to_string()));
        }
        let prefix = parse_profile_list(game, prefix_part)?;
        let cycle = parse_profile_list(game, cycle_part)?;
        Path::new(prefix, cycle)
    }

    /// Renders the canonical literal, e.g. `"C,D | C,C"` or `"| C,C"`.
    pub fn literal(&self, game: &StageGame) -> String {
        let join = |profiles: &[ActionProfile]| {
            profiles
                .iter()
                .map(|z| game.profile_label(z))
                .collect::<Vec<_>>()
                .join(";")
        };
        if self.prefix.is_empty() {
            format!("| {}", join(&self.cycle))
        } else {
            format!("{} | {}", join(&self.prefix), join(&self.cycle))
        }
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_seq = |f: &mut fmt::Formatter<'_>, seq: &[ActionProfile]| -> fmt::Result {
            for (i, z) in seq.iter().enumerate() {
                if i > 0 {
                    write!(f, ";")?;
                }
                let idx: Vec<String> = z.actions().iter().map(|a| a.to_string()).collect();
                write!(f, "{}", idx.join(","))?;
            }
            Ok(())
        };
        fmt_seq(f, &self.prefix)?;
        write!(f, " | ")?;
        fmt_seq(f, &self.cycle)
    }
}

fn parse_profile_list(game: &StageGame, text: &str) -> Result<Vec<ActionProfile>, PathError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(';')
        .map(|p| parse_profile(game, p))
        .collect()
}

fn parse_profile(game: &StageGame, text: &str) -> Result<ActionProfile, PathError> {
    let labels: Vec<&str> = text.split(',').map(str::trim).collect();
    if labels.len() != game.num_players() {
        return Err(PathError::ProfileArity {
            text: text.trim().to_string(),
            expected: game.num_players(),
            got: labels.len(),
        });
    }
    let mut actions = Vec::with_capacity(labels.len());
    for (player, label) in labels.iter().enumerate() {
        let idx = game
            .action_index(player, label)
            .ok_or_else(|| PathError::UnknownLabel {
                label: label.to_string(),
                player: game.player_id(player).to_string(),
            })?;
        actions.push(idx);
    }
    Ok(ActionProfile::new(actions))
}

fn canonicalize(
    mut prefix: Vec<ActionProfile>,
    mut cycle: Vec<ActionProfile>,
) -> (Vec<ActionProfile>, Vec<ActionProfile>) {
    // Reduce the cycle to its shortest repeating word.
    let c = cycle.len();
    for d in 1..=c / 2 {
        if c.is_multiple_of(d) && (d..c).all(|t| cycle[t] == cycle[t % d]) {
            cycle.truncate(d);
            break;
        }
    }
    // Absorb transient steps the cycle already produces: if the last
    // transient profile equals the last cycle profile, dropping it and
    // rotating the cycle back one step describes the same sequence.
    while !prefix.is_empty() && prefix.last() == cycle.last() {
        prefix.pop();
        let moved = cycle.pop().expect("cycle stays nonempty");
        cycle.insert(0, moved);
    }
    (prefix, cycle)
}

/// Exact discounted payoff of `x` for `player`, normalized by `1 - delta`:
/// the transient contributes its discounted sum, the cycle its closed-form
/// geometric value.
pub fn payoff(game: &StageGame, x: &Path, player: usize) -> Rat {
    let delta = game.delta();
    let one_minus = Rat::one() - delta;
    let mut transient = Rat::zero();
    let mut pow = Rat::one();
    for z in x.prefix() {
        transient += &pow * game.payoff(z, player);
        pow *= delta;
    }
    // pow is now delta^p.
    let mut cyc = Rat::zero();
    let mut cpow = Rat::one();
    for z in x.cycle() {
        cyc += &cpow * game.payoff(z, player);
        cpow *= delta;
    }
    // cpow is delta^c.
    &one_minus * transient + pow * one_minus * cyc / (Rat::one() - cpow)
}

/// Payoffs of all players.
pub fn payoff_vector(game: &StageGame, x: &Path) -> Vec<Rat> {
    (0..game.num_players()).map(|i| payoff(game, x, i)).collect()
}

/// `values[tau - 1][player]` is the payoff of `tail(x, tau)`, for `tau` in
/// `1..=horizon`. Computed by solving the per-period recurrence backwards,
/// so the whole table costs one pass over the path per player.
pub fn tail_values(game: &StageGame, x: &Path) -> Vec<Vec<Rat>> {
    let n = game.num_players();
    let p = x.preperiod();
    let c = x.cycle_len();
    let delta = game.delta();
    let one_minus = Rat::one() - delta;
    let mut values = vec![vec![Rat::zero(); n]; p + c];
    #[allow(clippy::needless_range_loop)] // each player writes across many rows
    for player in 0..n {
        // Cycle rotations first: rotation k is the tail at period p + k + 1.
        let rotation0 = cycle_value(game, x.cycle(), player);
        values[p][player] = rotation0;
        for k in 1..c {
            let prev = values[p + k - 1][player].clone();
            let stage = &one_minus * game.payoff(&x.cycle()[k - 1], player);
            values[p + k][player] = (prev - stage) / delta;
        }
        // Then walk the transient backwards.
        for t in (0..p).rev() {
            let next = values[t + 1][player].clone();
            values[t][player] = &one_minus * game.payoff(&x.prefix[t], player) + delta * next;
        }
    }
    values
}

fn cycle_value(game: &StageGame, cycle: &[ActionProfile], player: usize) -> Rat {
    let delta = game.delta();
    let one_minus = Rat::one() - delta;
    let mut sum = Rat::zero();
    let mut pow = Rat::one();
    for z in cycle {
        sum += &pow * game.payoff(z, player);
        pow *= delta;
    }
    one_minus * sum / (Rat::one() - pow)
}

/// A finite history of play; the empty history is the start of the game.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Position {
    history: Vec<ActionProfile>,
}

impl Position {
    pub fn empty() -> Self {
        Position::default()
    }

    pub fn new(history: Vec<ActionProfile>) -> Self {
        Position { history }
    }

    pub fn history(&self) -> &[ActionProfile] {
        &self.history
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }

    /// Discounted payoff already accumulated along the history.
    pub fn accumulated(&self, game: &StageGame, player: usize) -> Rat {
        let delta = game.delta();
        let one_minus = Rat::one() - delta;
        let mut sum = Rat::zero();
        let mut pow = Rat::one();
        for z in &self.history {
            sum += &pow * game.payoff(z, player);
            pow *= delta;
        }
        one_minus * sum
    }

    /// Weight of continuation payoffs after the history: `delta^t`.
    pub fn discount(&self, game: &StageGame) -> Rat {
        let delta = game.delta();
        let mut pow = Rat::one();
        for _ in &self.history {
            pow *= delta;
        }
        pow
    }
}

/// Payoff at a position: what the history already earned plus the
/// discounted value of following `x` afterwards.
pub fn position_payoff(game: &StageGame, position: &Position, x: &Path, player: usize) -> Rat {
    position.accumulated(game, player) + position.discount(game) * payoff(game, x, player)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("universe of about {estimated} raw paths exceeds the cap of {cap}; shrink the bounds or raise the cap")]
    CapExceeded { estimated: String, cap: u64 },
    #[error("max cycle length must be at least 1")]
    ZeroCycle,
}

/// All canonical paths with transient length at most `max_prefix` and cycle
/// length at most `max_cycle`, deduplicated and sorted.
///
/// Refuses when the raw (pre-deduplication) count
/// `sum_p |Z|^p * sum_c |Z|^c` exceeds `cap`.
pub fn enumerate_universe(
    game: &StageGame,
    max_prefix: usize,
    max_cycle: usize,
    cap: u64,
) -> Result<Vec<Path>, UniverseError> {
    if max_cycle == 0 {
        return Err(UniverseError::ZeroCycle);
    }
    let z = BigUint::from(game.num_profiles());
    let mut prefix_count = BigUint::zero();
    for p in 0..=max_prefix {
        prefix_count += z.pow(p as u32);
    }
    let mut cycle_count = BigUint::zero();
    for c in 1..=max_cycle {
        cycle_count += z.pow(c as u32);
    }
    let estimated = prefix_count * cycle_count;
    if estimated > BigUint::from(cap) {
        return Err(UniverseError::CapExceeded {
            estimated: estimated.to_string(),
            cap,
        });
    }

    let mut set = BTreeSet::new();
    for c in 1..=max_cycle {
        for_each_word(game, c, &mut |cycle| {
            for p in 0..=max_prefix {
                for_each_word(game, p, &mut |prefix| {
                    let path = Path::new(prefix.to_vec(), cycle.to_vec())
                        .expect("generated cycles are nonempty");
                    set.insert(path);
                });
            }
        });
    }
    Ok(set.into_iter().collect())
}

/// Calls `f` with every length-`len` word over the game's profiles.
fn for_each_word(game: &StageGame, len: usize, f: &mut impl FnMut(&[ActionProfile])) {
    let mut word: Vec<ActionProfile> = vec![game.profile_from_index(0); len];
    let mut counters = vec![0usize; len];
    let total = game.num_profiles();
    loop {
        f(&word);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < total {
                word[pos] = game.profile_from_index(counters[pos]);
                break;
            }
            counters[pos] = 0;
            word[pos] = game.profile_from_index(0);
        }
    }
}
