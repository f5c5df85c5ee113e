//! Acceptance suite. Each test covers one criterion, enforces its runtime
//! budget where one is stated, and prints a single PASS/FAIL line (visible
//! with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cssbkit_core::equilibrium::{
    fixed_point, optimal_penal_code, psi, verify_family, PunishmentFamily,
};
use cssbkit_core::game::StageGame;
use cssbkit_core::paths::{enumerate_universe, payoff, Path};
use cssbkit_core::rat::{rat, rat_int, Rat};
use cssbkit_core::situations::{
    cdom_member, external_stability, internal_stability, Mode, StandardOfBehavior,
};

use common::{
    delta_pow, direct_cdom, oracle_family_ok, path, rand_game, rand_path, truncated_sum,
};

/// Criteria run one at a time so the stated runtime budgets measure the
/// criterion itself rather than scheduler contention.
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn criterion(name: &str, body: impl FnOnce() -> String) {
    let _guard = SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(summary) => println!("{name} PASS: {summary}"),
        Err(cause) => {
            println!("{name} FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

/// The desk-scale corpus: each game with the deviation mode and universe
/// bounds its assertions run at.
fn corpus() -> Vec<(&'static str, StageGame, Mode, usize, usize)> {
    vec![
        ("pd/nash", common::pd(), Mode::Nash, 1, 1),
        ("pd/coalition", common::pd(), Mode::Coalitional, 1, 1),
        (
            "coordination/coalition",
            common::coordination(),
            Mode::Coalitional,
            2,
            2,
        ),
        (
            "threeway/coalition",
            common::threeway(),
            Mode::Coalitional,
            1,
            1,
        ),
        ("solo/coalition", common::solo(), Mode::Coalitional, 1, 1),
    ]
}

#[test]
fn ac1_payoff_engine() {
    criterion("AC-1", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
        for _ in 0..1000 {
            let game = rand_game(&mut rng, 3, 3);
            let x = rand_path(&mut rng, &game, 3, 3);
            let bound = delta_pow(&game, 200) * game.max_abs_payoff();
            let one_minus = Rat::one() - game.delta();
            for i in 0..game.num_players() {
                let exact = payoff(&game, &x, i);
                let truncated = truncated_sum(&game, &x, 200, i);
                assert!(
                    (exact.clone() - truncated).abs() <= bound,
                    "truncation bound violated"
                );
                let recursed = &one_minus * game.payoff(x.profile_at(1), i)
                    + game.delta() * payoff(&game, &x.tail(2), i);
                assert_eq!(exact, recursed, "one-step recursion violated");
            }
        }
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
        format!("1000 random paths: 200-term bound and exact recursion hold ({elapsed:?})")
    });
}

#[test]
fn ac2_psi_laws() {
    criterion("AC-2", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xAC02);
        for _ in 0..200 {
            let game = rand_game(&mut rng, 3, 2);
            let max_prefix = rng.random_range(0..=1);
            let max_cycle = rng.random_range(1..=2);
            let universe = enumerate_universe(&game, max_prefix, max_cycle, 1_000_000).unwrap();
            let mut large = BTreeSet::new();
            let mut small = BTreeSet::new();
            for p in &universe {
                if rng.random_bool(0.5) {
                    large.insert(p.clone());
                    if rng.random_bool(0.5) {
                        small.insert(p.clone());
                    }
                }
            }
            let mut images = Vec::new();
            for mode in [Mode::Nash, Mode::Coalitional] {
                let lo = psi(&game, mode, &small, &universe);
                let hi = psi(&game, mode, &large, &universe);
                assert!(lo.is_subset(&hi), "monotonicity violated in {mode:?}");
                images.push(hi);
            }
            assert!(
                images[1].is_subset(&images[0]),
                "coalitional image escapes the individual-deviation image"
            );
        }
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
        format!("200 games: monotone in the generator set, antitone in the mode ({elapsed:?})")
    });
}

#[test]
fn ac3_self_generation_soundness() {
    criterion("AC-3", || {
        let start = Instant::now();
        let mut certified = 0;
        for (name, game, mode, max_prefix, max_cycle) in corpus() {
            let universe = enumerate_universe(&game, max_prefix, max_cycle, 1_000_000).unwrap();
            let trace = fixed_point(&game, mode, &universe);
            assert!(!trace.fixed_point.is_empty(), "{name}: empty fixed point");
            let family = optimal_penal_code(&game, mode, &trace.fixed_point)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            let nash = mode == Mode::Nash;
            for base in &trace.fixed_point {
                let outcome = verify_family(&game, mode, base, &family);
                assert!(
                    outcome.is_accepted(),
                    "{name}: certificate refused for {}",
                    base.literal(&game)
                );
                assert!(
                    oracle_family_ok(&game, nash, base, family.paths(), 50),
                    "{name}: brute-force oracle disagrees on {}",
                    base.literal(&game)
                );
                certified += 1;
            }
        }
        let elapsed = start.elapsed();
        format!(
            "{certified} fixed-point members enforced by one penal-code family, \
             oracle-revalidated with 50 extra periods ({elapsed:?})"
        )
    });
}

#[test]
fn ac4_maximal_stable_standard() {
    criterion("AC-4", || {
        let start = Instant::now();
        let mut subsets_checked = 0usize;
        for (name, game, mode, max_prefix, max_cycle) in corpus() {
            let universe = enumerate_universe(&game, max_prefix, max_cycle, 1_000_000).unwrap();
            let trace = fixed_point(&game, mode, &universe);
            let sb = StandardOfBehavior::new(trace.fixed_point.iter().cloned());

            let internal = internal_stability(&game, mode, &sb, None);
            assert!(
                internal.stable,
                "{name}: {} internal violations",
                internal.violations.len()
            );
            let external = external_stability(&game, mode, &sb, &universe, None);
            assert!(
                external.stable,
                "{name}: {} undominated outside paths",
                external.undominated.len()
            );

            // Exhaustive search over the constants-only universe: every
            // internally stable standard must sit inside the fixed point.
            let constants = enumerate_universe(&game, 0, 1, 1_000_000).unwrap();
            assert!(constants.len() <= 8, "{name}: subset search too large");
            let smallest = fixed_point(&game, mode, &constants).fixed_point;
            for mask in 0u32..(1 << constants.len()) {
                let subset: BTreeSet<Path> = constants
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << *i) != 0)
                    .map(|(_, p)| p.clone())
                    .collect();
                let subset_sb = StandardOfBehavior::new(subset.iter().cloned());
                if internal_stability(&game, mode, &subset_sb, None).stable {
                    assert!(
                        subset.is_subset(&smallest),
                        "{name}: internally stable subset escapes the fixed point"
                    );
                }
                subsets_checked += 1;
            }
        }
        let elapsed = start.elapsed();
        format!(
            "fixed points internally and relatively externally stable; \
             {subsets_checked} exhaustive subsets contained ({elapsed:?})"
        )
    });
}

#[test]
fn ac5_pd_instance() {
    criterion("AC-5", || {
        let start = Instant::now();
        let g = common::pd();
        let universe = enumerate_universe(&g, 1, 1, 1_000_000).unwrap();

        let coalitional = fixed_point(&g, Mode::Coalitional, &universe);
        assert!(coalitional.fixed_point.contains(&path(&g, "| C,C")));
        assert!(!coalitional.fixed_point.contains(&path(&g, "| D,D")));
        let nash = fixed_point(&g, Mode::Nash, &universe);
        assert!(nash.fixed_point.contains(&path(&g, "| C,C")));
        assert!(nash.fixed_point.contains(&path(&g, "| D,D")));

        let family = PunishmentFamily::new(vec![path(&g, "C,D | C,C"), path(&g, "D,C | C,C")]);
        let outcome = verify_family(&g, Mode::Coalitional, &path(&g, "| C,C"), &family);
        let cert = outcome.certificate().expect("penal code accepted");
        let unilateral = cert
            .witnesses
            .iter()
            .find(|w| {
                w.state == 0
                    && w.deviation.coalition().members() == [0]
                    && w.deviation.partial_profile() == [1]
            })
            .expect("unilateral defection class");
        assert_eq!(unilateral.on_path_value, rat_int(2));
        assert_eq!(unilateral.deviation_value, rat(48, 25));
        let renegotiation = cert
            .witnesses
            .iter()
            .find(|w| {
                w.state == 1
                    && w.deviation.coalition().members() == [0, 1]
                    && w.deviation.partial_profile() == [0, 0]
            })
            .expect("grand renegotiation class");
        assert_eq!(renegotiation.on_path_value, rat(12, 5));
        assert_eq!(renegotiation.deviation_value, rat(38, 25));

        let bad = PunishmentFamily::new(vec![path(&g, "| D,D"), path(&g, "| D,D")]);
        let refused = verify_family(&g, Mode::Coalitional, &path(&g, "| C,C"), &bad);
        let counter = refused.counterexample().expect("defection code refused");
        assert_eq!(counter.state, 1);
        assert_eq!(counter.deviation.coalition().members(), [0, 1]);
        assert_eq!(counter.deviation.period(), 1);
        assert_eq!(counter.deviation.partial_profile(), [0, 0]);
        for margin in &counter.margins {
            assert_eq!(margin.induced_value, rat(7, 5));
            assert_eq!(margin.current_value, rat_int(1));
        }

        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
        format!(
            "coalitional keeps cooperation and drops defection, certificates \
             pin 48/25, 38/25, and 7/5 exactly ({elapsed:?})"
        )
    });
}

#[test]
fn ac6_coordination_instance() {
    criterion("AC-6", || {
        let start = Instant::now();
        let g = common::coordination();
        let universe = enumerate_universe(&g, 2, 2, 1_000_000).unwrap();
        let trace = fixed_point(&g, Mode::Coalitional, &universe);
        let expected: BTreeSet<Path> = [path(&g, "| A,A")].into_iter().collect();
        assert_eq!(trace.fixed_point, expected);
        assert!(trace.rounds <= 4, "converged in {} rounds", trace.rounds);
        let elapsed = start.elapsed();
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
        format!(
            "only the efficient profile survives, {} rounds over {} paths ({elapsed:?})",
            trace.rounds,
            universe.len()
        )
    });
}

#[test]
fn ac7_domination_equivalence() {
    criterion("AC-7", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(0xAC07);
        let mut dominated = 0usize;
        for _ in 0..500 {
            let game = rand_game(&mut rng, 3, 3);
            let universe = enumerate_universe(&game, 1, 1, 1_000_000).unwrap();
            let mut members = BTreeSet::new();
            for _ in 0..rng.random_range(0..=4) {
                members.insert(universe[rng.random_range(0..universe.len())].clone());
            }
            let x = universe[rng.random_range(0..universe.len())].clone();
            let nash = rng.random_bool(0.5);
            let mode = if nash { Mode::Nash } else { Mode::Coalitional };
            let sb = StandardOfBehavior::new(members.iter().cloned());
            let sb_list: Vec<Path> = members.iter().cloned().collect();

            let via_worst_paths = cdom_member(&game, mode, &sb, &x, None).is_some();
            let via_definition = direct_cdom(&game, nash, &sb_list, &x, 2);
            assert_eq!(
                via_worst_paths, via_definition,
                "membership disagreement ({mode:?})"
            );
            if via_worst_paths {
                dominated += 1;
            }
        }
        let elapsed = start.elapsed();
        format!("500 membership pairs agree exactly, {dominated} dominated ({elapsed:?})")
    });
}
