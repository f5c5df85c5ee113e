//! Equilibrium path sets for infinitely repeated discounted games with
//! coalitional deviations, computed exactly.
//!
//! The crate works in path space: infinite action sequences are represented
//! as eventually periodic paths (finite transient plus a primitive cycle),
//! payoffs and the discount factor are arbitrary-precision rationals, and
//! every comparison is exact. On top of that sit
//!
//! - a self-generation operator mapping a set of candidate punishment paths
//!   to the set of paths it can enforce ([`equilibrium::psi`]),
//! - the decreasing fixed-point iteration whose limit is the set of
//!   equilibrium paths within a finite universe ([`equilibrium::fixed_point`]),
//! - penal-code verification and extraction ([`equilibrium::verify_family`],
//!   [`equilibrium::optimal_penal_code`]), and
//! - stability audits for nondiscriminating standards of behavior
//!   ([`situations::internal_stability`], [`situations::external_stability`]).
//!
//! Deviations can be restricted to single players (`Mode::Nash`) or opened
//! to every nonempty coalition (`Mode::Coalitional`).

pub mod equilibrium;
pub mod game;
pub mod paths;
pub mod rat;
pub mod situations;

pub use equilibrium::{
    compare_modes, fixed_point, optimal_penal_code, psi, verify_family, Certificate,
    CertificateEntry, Counterexample, IterationTrace, ModeComparison, PenalCodeError,
    PunishmentFamily, VerifyOutcome,
};
pub use game::{
    all_coalitions, deviation_profiles, merge, ActionProfile, Coalition, Deviation, GameError,
    StageGame,
};
pub use paths::{
    enumerate_universe, payoff, payoff_vector, position_payoff, Path, PathError, Position,
    UniverseError, DEFAULT_UNIVERSE_CAP,
};
pub use rat::{approx_decimal, format_rat, parse_rat, Rat};
pub use situations::{
    cdom_member, external_stability, internal_stability, worst_paths, DominationWitness,
    EmptySbError, ExternalStability, InternalStability, MemberMargin, Mode, SbParseError,
    StandardOfBehavior,
};
