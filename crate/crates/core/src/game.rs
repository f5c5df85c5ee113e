//! Stage games: players, per-player action sets, an exact payoff tensor,
//! and a discount factor, plus coalition and deviation enumeration and the
//! JSON game-file format.
//!
//! All enumeration orders are deterministic so that downstream certificates
//! and reports are reproducible run to run.

use std::fmt;

use num::{One, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::rat::{format_rat, parse_rat, Rat, RatParseError};

/// One action index per player, in player order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionProfile(Vec<usize>);

impl ActionProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        ActionProfile(actions)
    }

    pub fn action(&self, player: usize) -> usize {
        self.0[player]
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Debug for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:?}", self.0)
    }
}

/// Nonempty set of players, kept sorted and duplicate-free.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Coalition(Vec<usize>);

impl Coalition {
    /// Panics on an empty member list; coalitions are nonempty by definition.
    pub fn new(mut members: Vec<usize>) -> Self {
        assert!(!members.is_empty(), "coalition must be nonempty");
        members.sort_unstable();
        members.dedup();
        Coalition(members)
    }

    pub fn singleton(player: usize) -> Self {
        Coalition(vec![player])
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, player: usize) -> bool {
        self.0.binary_search(&player).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All `2^n - 1` nonempty coalitions, ordered by size and then
    /// lexicographically by member list.
    pub fn all(num_players: usize) -> Vec<Coalition> {
        let mut out = Vec::new();
        for size in 1..=num_players {
            let mut current = Vec::with_capacity(size);
            combinations(0, num_players, size, &mut current, &mut out);
        }
        out
    }
}

fn combinations(
    start: usize,
    n: usize,
    size: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Coalition>,
) {
    if current.len() == size {
        out.push(Coalition(current.clone()));
        return;
    }
    for player in start..n {
        current.push(player);
        combinations(player + 1, n, size, current, out);
        current.pop();
    }
}

/// A coalition's one-period move: who deviates, when, and to which actions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Deviation {
    coalition: Coalition,
    period: usize,
    partial: Vec<usize>,
}

impl Deviation {
    /// `partial` holds one action index per coalition member, in member
    /// order. Panics if the period is zero or the arity does not match.
    pub fn new(coalition: Coalition, period: usize, partial: Vec<usize>) -> Self {
        assert!(period >= 1, "periods are 1-based");
        assert_eq!(
            partial.len(),
            coalition.len(),
            "one action per coalition member"
        );
        Deviation {
            coalition,
            period,
            partial,
        }
    }

    pub fn coalition(&self) -> &Coalition {
        &self.coalition
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn partial_profile(&self) -> &[usize] {
        &self.partial
    }
}

/// Coalition members take their actions from `partial`; everyone else keeps
/// their action from `profile`.
pub fn merge_partial(profile: &ActionProfile, coalition: &Coalition, partial: &[usize]) -> ActionProfile {
    let mut actions = profile.actions().to_vec();
    for (member, &action) in coalition.members().iter().zip(partial) {
        actions[*member] = action;
    }
    ActionProfile(actions)
}

/// The action profile a deviation induces at its period.
pub fn merge(profile: &ActionProfile, dev: &Deviation) -> ActionProfile {
    merge_partial(profile, &dev.coalition, &dev.partial)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game file is not valid JSON: {0}")]
    Json(String),
    #[error("game must have at least one player")]
    NoPlayers,
    #[error("duplicate player id `{0}`")]
    DuplicatePlayer(String),
    #[error("expected one action list per player ({players} players, {lists} lists)")]
    ActionListMismatch { players: usize, lists: usize },
    #[error("player `{0}` has an empty action set")]
    NoActions(String),
    #[error("action label `{0}` is empty or contains ',', ';', '|', or whitespace")]
    BadLabel(String),
    #[error("duplicate action label `{label}` for player `{player}`")]
    DuplicateActionLabel { player: String, label: String },
    #[error("missing payoff for profile `{0}`")]
    MissingProfile(String),
    #[error("payoff key `{0}` does not name an action profile")]
    UnknownProfile(String),
    #[error("payoff list for `{key}` has {got} entries, expected {expected}")]
    PayoffArity {
        key: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid rational in {context}: {source}")]
    Rational {
        context: String,
        source: RatParseError,
    },
    #[error("delta out of range: `{0}` is not strictly between 0 and 1")]
    DeltaOutOfRange(String),
    #[error("payoff tensor has {got} rows, expected {expected}")]
    PayoffRows { expected: usize, got: usize },
}

/// A finite stage game with exact rational payoffs and discount factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageGame {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    /// Dense tensor: `payoffs[profile_index][player]`.
    payoffs: Vec<Vec<Rat>>,
    delta: Rat,
    /// Mixed-radix strides for profile indexing; last player varies fastest.
    strides: Vec<usize>,
}

#[derive(Deserialize)]
struct GameFile {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    payoffs: serde_json::Map<String, serde_json::Value>,
    delta: String,
}

impl StageGame {
    /// Builds and validates a game from parts. `payoffs` is indexed by
    /// profile index (see [`StageGame::profile_index`]), then by player.
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        payoffs: Vec<Vec<Rat>>,
        delta: Rat,
    ) -> Result<Self, GameError> {
        if players.is_empty() {
            return Err(GameError::NoPlayers);
        }
        for (i, p) in players.iter().enumerate() {
            if players[..i].contains(p) {
                return Err(GameError::DuplicatePlayer(p.clone()));
            }
        }
        if actions.len() != players.len() {
            return Err(GameError::ActionListMismatch {
                players: players.len(),
                lists: actions.len(),
            });
        }
        for (player, labels) in players.iter().zip(&actions) {
            if labels.is_empty() {
                return Err(GameError::NoActions(player.clone()));
            }
            for (i, label) in labels.iter().enumerate() {
                if label.is_empty()
                    || label
                        .chars()
                        .any(|c| c == ',' || c == ';' || c == '|' || c.is_whitespace())
                {
                    return Err(GameError::BadLabel(label.clone()));
                }
                if labels[..i].contains(label) {
                    return Err(GameError::DuplicateActionLabel {
                        player: player.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        let mut strides = vec![1usize; players.len()];
        for i in (0..players.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let num_profiles = strides[0] * actions[0].len();
        if payoffs.len() != num_profiles {
            return Err(GameError::PayoffRows {
                expected: num_profiles,
                got: payoffs.len(),
            });
        }
        for (idx, row) in payoffs.iter().enumerate() {
            if row.len() != players.len() {
                return Err(GameError::PayoffArity {
                    key: format!("profile #{idx}"),
                    expected: players.len(),
                    got: row.len(),
                });
            }
        }
        if delta <= Rat::zero() || delta >= Rat::one() {
            return Err(GameError::DeltaOutOfRange(format_rat(&delta)));
        }
        Ok(StageGame {
            players,
            actions,
            payoffs,
            delta,
            strides,
        })
    }

    /// Parses the JSON game-file format:
    ///
    /// ```json
    /// {
    ///   "players": ["1", "2"],
    ///   "actions": [["C", "D"], ["C", "D"]],
    ///   "payoffs": { "C,C": ["2", "2"], "C,D": ["0", "3"], ... },
    ///   "delta": "3/5"
    /// }
    /// ```
    ///
    /// Payoff keys are action labels joined by commas, in player order;
    /// every profile must appear exactly once. Rationals are `"p/q"` or
    /// integer strings.
    pub fn parse(text: &str) -> Result<Self, GameError> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| GameError::Json(e.to_string()))?;
        let delta = parse_rat(&file.delta).map_err(|source| GameError::Rational {
            context: "delta".to_string(),
            source,
        })?;
        if delta <= Rat::zero() || delta >= Rat::one() {
            return Err(GameError::DeltaOutOfRange(file.delta.trim().to_string()));
        }

        // Build a skeleton first so profile enumeration and key parsing can
        // reuse the validated action sets.
        let skeleton = StageGame::new(
            file.players.clone(),
            file.actions.clone(),
            vec![vec![Rat::zero(); file.players.len()]; count_profiles(&file.actions)],
            delta.clone(),
        )?;

        for key in file.payoffs.keys() {
            if skeleton.parse_profile_label(key).is_none() {
                return Err(GameError::UnknownProfile(key.clone()));
            }
        }

        let n = skeleton.num_players();
        let mut payoffs = Vec::with_capacity(skeleton.num_profiles());
        for profile in skeleton.profiles() {
            let key = skeleton.profile_label(&profile);
            let entry = file
                .payoffs
                .get(&key)
                .ok_or_else(|| GameError::MissingProfile(key.clone()))?;
            let list: Vec<String> = serde_json::from_value(entry.clone())
                .map_err(|e| GameError::Json(format!("payoffs[\"{key}\"]: {e}")))?;
            if list.len() != n {
                return Err(GameError::PayoffArity {
                    key,
                    expected: n,
                    got: list.len(),
                });
            }
            let mut row = Vec::with_capacity(n);
            for (player, text) in skeleton.players.iter().zip(&list) {
                row.push(parse_rat(text).map_err(|source| GameError::Rational {
                    context: format!("payoff for `{key}`, player `{player}`"),
                    source,
                })?);
            }
            payoffs.push(row);
        }
        StageGame::new(file.players, file.actions, payoffs, delta)
    }

    /// Serializes back to the game-file format. `parse` of the result
    /// reproduces the game exactly.
    pub fn to_json(&self) -> String {
        let mut payoffs = serde_json::Map::new();
        for profile in self.profiles() {
            let row: Vec<String> = self.payoff_row(&profile).iter().map(format_rat).collect();
            payoffs.insert(self.profile_label(&profile), serde_json::json!(row));
        }
        let value = serde_json::json!({
            "players": self.players,
            "actions": self.actions,
            "payoffs": payoffs,
            "delta": format_rat(&self.delta),
        });
        serde_json::to_string_pretty(&value).expect("game serialization cannot fail")
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_id(&self, player: usize) -> &str {
        &self.players[player]
    }

    pub fn action_labels(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.actions[player].iter().position(|l| l == label)
    }

    pub fn num_profiles(&self) -> usize {
        self.strides[0] * self.actions[0].len()
    }

    pub fn delta(&self) -> &Rat {
        &self.delta
    }

    pub fn profile_index(&self, profile: &ActionProfile) -> usize {
        debug_assert_eq!(profile.num_players(), self.num_players());
        profile
            .actions()
            .iter()
            .zip(&self.strides)
            .map(|(a, s)| a * s)
            .sum()
    }

    pub fn profile_from_index(&self, mut index: usize) -> ActionProfile {
        let mut actions = Vec::with_capacity(self.num_players());
        for stride in &self.strides {
            actions.push(index / stride);
            index %= stride;
        }
        ActionProfile(actions)
    }

    /// All action profiles in index order (last player varies fastest).
    pub fn profiles(&self) -> impl Iterator<Item = ActionProfile> + '_ {
        (0..self.num_profiles()).map(|i| self.profile_from_index(i))
    }

    pub fn payoff(&self, profile: &ActionProfile, player: usize) -> &Rat {
        &self.payoffs[self.profile_index(profile)][player]
    }

    pub fn payoff_row(&self, profile: &ActionProfile) -> &[Rat] {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn payoff_by_index(&self, profile_index: usize, player: usize) -> &Rat {
        &self.payoffs[profile_index][player]
    }

    /// Comma-joined action labels in player order, e.g. `"C,D"`.
    pub fn profile_label(&self, profile: &ActionProfile) -> String {
        profile
            .actions()
            .iter()
            .enumerate()
            .map(|(player, &a)| self.actions[player][a].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn parse_profile_label(&self, key: &str) -> Option<ActionProfile> {
        let labels: Vec<&str> = key.split(',').map(str::trim).collect();
        if labels.len() != self.num_players() {
            return None;
        }
        let mut actions = Vec::with_capacity(labels.len());
        for (player, label) in labels.iter().enumerate() {
            actions.push(self.action_index(player, label)?);
        }
        Some(ActionProfile(actions))
    }

    /// Largest absolute stage payoff; useful for truncation error bounds.
    pub fn max_abs_payoff(&self) -> Rat {
        self.payoffs
            .iter()
            .flatten()
            .map(|r| r.abs())
            .max()
            .expect("games have at least one payoff")
    }
}

fn count_profiles(actions: &[Vec<String>]) -> usize {
    actions.iter().map(Vec::len).product::<usize>().max(1)
}

/// The full Cartesian product of the coalition members' action sets, in
/// odometer order (last member varies fastest). Includes the partial
/// profile equal to on-path play; restarting the standard tomorrow is a
/// legitimate inducement.
pub fn deviation_profiles(game: &StageGame, coalition: &Coalition) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = coalition
        .members()
        .iter()
        .map(|&m| game.num_actions(m))
        .collect();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut counters = vec![0usize; sizes.len()];
    loop {
        out.push(counters.clone());
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < sizes[pos] {
                break;
            }
            counters[pos] = 0;
        }
    }
}

/// All nonempty coalitions of the game, by size then lexicographically.
pub fn all_coalitions(game: &StageGame) -> Vec<Coalition> {
    Coalition::all(game.num_players())
}
