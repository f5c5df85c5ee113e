//! Shared test fixtures and independent oracles.
//!
//! The oracles deliberately avoid the library's computation paths: payoffs
//! are recovered by solving the per-period recurrence rather than by the
//! geometric closed form, domination is checked straight from its
//! definition by quantifying over every continuation in the standard, and
//! enforceability is checked by constructing each deviation path outright
//! instead of comparing rescaled period classes.

#![allow(dead_code)]

use num::{One, Zero};
use rand::Rng;

use cssbkit_core::game::{ActionProfile, StageGame};
use cssbkit_core::paths::Path;
use cssbkit_core::rat::{rat, Rat};

pub const PD_JSON: &str = r#"{
    "players": ["1", "2"],
    "actions": [["C", "D"], ["C", "D"]],
    "payoffs": {
        "C,C": ["2", "2"],
        "C,D": ["0", "3"],
        "D,C": ["3", "0"],
        "D,D": ["1", "1"]
    },
    "delta": "3/5"
}"#;

pub const COORDINATION_JSON: &str = r#"{
    "players": ["1", "2"],
    "actions": [["A", "B"], ["A", "B"]],
    "payoffs": {
        "A,A": ["2", "2"],
        "A,B": ["0", "0"],
        "B,A": ["0", "0"],
        "B,B": ["1", "1"]
    },
    "delta": "1/2"
}"#;

pub const THREEWAY_JSON: &str = r#"{
    "players": ["1", "2", "3"],
    "actions": [["W", "S"], ["W", "S"], ["W", "S"]],
    "payoffs": {
        "W,W,W": ["3", "3", "3"],
        "W,W,S": ["1", "1", "4"],
        "W,S,W": ["1", "4", "1"],
        "S,W,W": ["4", "1", "1"],
        "W,S,S": ["-1", "2", "2"],
        "S,W,S": ["2", "-1", "2"],
        "S,S,W": ["2", "2", "-1"],
        "S,S,S": ["0", "0", "0"]
    },
    "delta": "3/5"
}"#;

pub const SOLO_JSON: &str = r#"{
    "players": ["1"],
    "actions": [["L", "H"]],
    "payoffs": { "L": ["1"], "H": ["2"] },
    "delta": "1/2"
}"#;

pub fn pd() -> StageGame {
    StageGame::parse(PD_JSON).unwrap()
}

pub fn coordination() -> StageGame {
    StageGame::parse(COORDINATION_JSON).unwrap()
}

pub fn threeway() -> StageGame {
    StageGame::parse(THREEWAY_JSON).unwrap()
}

pub fn solo() -> StageGame {
    StageGame::parse(SOLO_JSON).unwrap()
}

pub fn path(game: &StageGame, text: &str) -> Path {
    Path::parse(game, text).unwrap()
}

// ---------------------------------------------------------------------------
// Oracle payoffs
// ---------------------------------------------------------------------------

/// Discounted payoff of the sequence `prefix` then `cycle` forever, found by
/// solving the recurrence v_t = (1-d) u(z_t) + d v_{t+1}: one pass over the
/// cycle pins the cycle value as the solution of v = acc + d^c v, then the
/// prefix is walked backwards. No canonical form is required.
pub fn oracle_payoff_raw(
    game: &StageGame,
    prefix: &[ActionProfile],
    cycle: &[ActionProfile],
    player: usize,
) -> Rat {
    let delta = game.delta();
    let one_minus = Rat::one() - delta;
    let mut acc = Rat::zero();
    let mut weight = Rat::one();
    for z in cycle {
        acc += &weight * &one_minus * game.payoff(z, player);
        weight *= delta;
    }
    let mut value = acc / (Rat::one() - weight);
    for z in prefix.iter().rev() {
        value = &one_minus * game.payoff(z, player) + delta * value;
    }
    value
}

pub fn oracle_payoff(game: &StageGame, x: &Path, player: usize) -> Rat {
    oracle_payoff_raw(game, x.prefix(), x.cycle(), player)
}

/// Plain discounted partial sum over the first `terms` periods of `x`,
/// accumulated in integer arithmetic over one common denominator so the
/// 200-term sums stay cheap.
pub fn truncated_sum(game: &StageGame, x: &Path, terms: usize, player: usize) -> Rat {
    use num::bigint::BigInt;
    use num::Integer;

    let dn = game.delta().numer().clone();
    let dd = game.delta().denom().clone();
    // Common denominator of the stage payoffs this player sees on the path.
    let mut payoff_den = BigInt::one();
    for t in 1..=x.horizon().max(1) {
        payoff_den = payoff_den.lcm(game.payoff(x.profile_at(t), player).denom());
    }
    let coef = &dd - &dn; // numerator of 1 - delta over dd
    let mut rising = BigInt::one(); // dn^(t-1)
    let mut falling = dd.pow((terms - 1) as u32); // dd^(terms-t)
    let mut numer = BigInt::zero();
    for t in 1..=terms {
        let u = game.payoff(x.profile_at(t), player);
        let scaled_u = u.numer() * (&payoff_den / u.denom());
        numer += &coef * &rising * &falling * scaled_u;
        rising *= &dn;
        if t < terms {
            falling /= &dd; // exact: falling is a power of dd
        }
    }
    Rat::new(numer, dd.pow(terms as u32) * payoff_den)
}

pub fn delta_pow(game: &StageGame, exponent: usize) -> Rat {
    let mut pow = Rat::one();
    for _ in 0..exponent {
        pow *= game.delta();
    }
    pow
}

// ---------------------------------------------------------------------------
// Independent deviation enumeration
// ---------------------------------------------------------------------------

/// Nonempty player subsets as sorted member lists; singletons only when
/// `nash` is set. Bitmask order, which differs from the library's order on
/// purpose.
pub fn oracle_coalitions(num_players: usize, nash: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << num_players) {
        if nash && mask.count_ones() != 1 {
            continue;
        }
        let members: Vec<usize> = (0..num_players).filter(|i| mask & (1 << i) != 0).collect();
        out.push(members);
    }
    out
}

/// Cartesian product of the members' action sets.
pub fn oracle_partials(game: &StageGame, members: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &m in members {
        let mut next = Vec::new();
        for partial in &out {
            for action in 0..game.num_actions(m) {
                let mut extended = partial.clone();
                extended.push(action);
                next.push(extended);
            }
        }
        out = next;
    }
    out
}

pub fn oracle_merge(profile: &ActionProfile, members: &[usize], partial: &[usize]) -> ActionProfile {
    let mut actions = profile.actions().to_vec();
    for (&m, &a) in members.iter().zip(partial) {
        actions[m] = a;
    }
    ActionProfile::new(actions)
}

/// Brute-force check that `family` enforces `base` and itself: every state,
/// every coalition, every period through horizon + `slack`, every partial
/// profile, some member weakly deterred. Deviation paths are constructed
/// explicitly and valued with the oracle payoff.
pub fn oracle_family_ok(
    game: &StageGame,
    nash: bool,
    base: &Path,
    family: &[Path],
    slack: usize,
) -> bool {
    let coalitions = oracle_coalitions(game.num_players(), nash);
    let mut states: Vec<&Path> = vec![base];
    states.extend(family.iter());
    for state_path in states {
        let on_path_values: Vec<Rat> = (0..game.num_players())
            .map(|j| oracle_payoff(game, state_path, j))
            .collect();
        for tau in 1..=state_path.horizon() + slack {
            let lead: Vec<ActionProfile> = (1..tau)
                .map(|t| state_path.profile_at(t).clone())
                .collect();
            for members in &coalitions {
                for partial in oracle_partials(game, members) {
                    let merged = oracle_merge(state_path.profile_at(tau), members, &partial);
                    let deterred = members.iter().any(|&j| {
                        let mut spliced = lead.clone();
                        spliced.push(merged.clone());
                        spliced.extend(family[j].prefix().iter().cloned());
                        let value = oracle_payoff_raw(game, &spliced, family[j].cycle(), j);
                        on_path_values[j] >= value
                    });
                    if !deterred {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Conservative domination straight from the definition: some coalition,
/// some period, some partial profile such that EVERY member strictly
/// prefers EVERY continuation the standard offers at the induced position.
pub fn direct_cdom(game: &StageGame, nash: bool, sb: &[Path], x: &Path, slack: usize) -> bool {
    if sb.is_empty() {
        return false;
    }
    let n = game.num_players();
    let continuation_values: Vec<Vec<Rat>> = sb
        .iter()
        .map(|y| (0..n).map(|i| oracle_payoff(game, y, i)).collect())
        .collect();
    let current: Vec<Rat> = (0..n).map(|i| oracle_payoff(game, x, i)).collect();
    let coalitions = oracle_coalitions(n, nash);
    let delta = game.delta();
    let one_minus = Rat::one() - delta;

    for tau in 1..=x.horizon() + slack {
        // Exact value already accrued over the first tau - 1 periods.
        let mut accrued = vec![Rat::zero(); n];
        let mut weight = Rat::one();
        for t in 1..tau {
            for (i, acc) in accrued.iter_mut().enumerate() {
                *acc += &weight * &one_minus * game.payoff(x.profile_at(t), i);
            }
            weight *= delta;
        }
        for members in &coalitions {
            for partial in oracle_partials(game, members) {
                let merged = oracle_merge(x.profile_at(tau), members, &partial);
                let dominated = members.iter().all(|&i| {
                    let at_deviation =
                        &accrued[i] + &weight * &one_minus * game.payoff(&merged, i);
                    let continuation_weight = &weight * delta;
                    continuation_values.iter().all(|values| {
                        let induced = &at_deviation + &continuation_weight * &values[i];
                        induced > current[i]
                    })
                });
                if dominated {
                    return true;
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

/// Random stage game: up to `max_players` players, up to `max_actions`
/// actions each, small integer and half-integer payoffs, random rational
/// discount factor strictly inside the unit interval.
pub fn rand_game(rng: &mut impl Rng, max_players: usize, max_actions: usize) -> StageGame {
    let n = rng.random_range(1..=max_players);
    let players: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let letters = ["a", "b", "c", "d"];
    let actions: Vec<Vec<String>> = (0..n)
        .map(|_| {
            let k = rng.random_range(1..=max_actions);
            letters[..k].iter().map(|s| s.to_string()).collect()
        })
        .collect();
    let num_profiles: usize = actions.iter().map(Vec::len).product();
    let payoffs: Vec<Vec<Rat>> = (0..num_profiles)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let numer = rng.random_range(-8i64..=8);
                    let denom = if rng.random_bool(0.25) { 2 } else { 1 };
                    rat(numer, denom)
                })
                .collect()
        })
        .collect();
    let delta = rand_delta(rng);
    StageGame::new(players, actions, payoffs, delta).unwrap()
}

pub fn rand_delta(rng: &mut impl Rng) -> Rat {
    let denom = rng.random_range(2i64..=7);
    let numer = rng.random_range(1..denom);
    rat(numer, denom)
}

pub fn rand_profile(rng: &mut impl Rng, game: &StageGame) -> ActionProfile {
    game.profile_from_index(rng.random_range(0..game.num_profiles()))
}

pub fn rand_path(
    rng: &mut impl Rng,
    game: &StageGame,
    max_prefix: usize,
    max_cycle: usize,
) -> Path {
    let p = rng.random_range(0..=max_prefix);
    let c = rng.random_range(1..=max_cycle);
    let prefix = (0..p).map(|_| rand_profile(rng, game)).collect();
    let cycle = (0..c).map(|_| rand_profile(rng, game)).collect();
    Path::new(prefix, cycle).unwrap()
}
