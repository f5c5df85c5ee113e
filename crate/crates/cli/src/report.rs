//! Report structures shared by the text and machine output formats.
//!
//! Every rational appears exactly (`"p/q"`); decimal renderings are
//! truncated to 20 significant digits, suffixed `~`, and never feed back
//! into any computation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use cssbkit_core::equilibrium::{Certificate, Counterexample, IterationTrace};
use cssbkit_core::game::{Deviation, StageGame};
use cssbkit_core::paths::{payoff_vector, Path};
use cssbkit_core::rat::{approx_decimal, format_rat, Rat};
use cssbkit_core::situations::{DominationWitness, ExternalStability, InternalStability};

const SIG_DIGITS: usize = 20;

fn exact(r: &Rat) -> String {
    format_rat(r)
}

fn approx(r: &Rat) -> String {
    approx_decimal(r, SIG_DIGITS)
}

#[derive(Serialize, Clone)]
pub struct ConfigEcho {
    pub command: String,
    pub game_file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub prefix: usize,
    pub cycle: usize,
    pub cap: u64,
    pub format: String,
}

#[derive(Serialize)]
pub struct TraceReport {
    pub sizes: Vec<usize>,
    pub rounds: usize,
    pub fixed_point: Vec<String>,
}

impl TraceReport {
    pub fn new(game: &StageGame, trace: &IterationTrace) -> Self {
        let mut fixed_point: Vec<String> =
            trace.fixed_point.iter().map(|p| p.literal(game)).collect();
        fixed_point.sort();
        TraceReport {
            sizes: trace.sizes.clone(),
            rounds: trace.rounds,
            fixed_point,
        }
    }
}

#[derive(Serialize)]
pub struct PayoffRow {
    pub path: String,
    pub exact: Vec<String>,
    pub approx: Vec<String>,
}

impl PayoffRow {
    pub fn new(game: &StageGame, path: &Path) -> Self {
        let values = payoff_vector(game, path);
        PayoffRow {
            path: path.literal(game),
            exact: values.iter().map(exact).collect(),
            approx: values.iter().map(approx).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct DeviationReport {
    pub coalition: Vec<String>,
    pub period: usize,
    pub actions: BTreeMap<String, String>,
}

impl DeviationReport {
    pub fn new(game: &StageGame, dev: &Deviation) -> Self {
        let coalition: Vec<String> = dev
            .coalition()
            .members()
            .iter()
            .map(|&m| game.player_id(m).to_string())
            .collect();
        let actions = dev
            .coalition()
            .members()
            .iter()
            .zip(dev.partial_profile())
            .map(|(&m, &a)| {
                (
                    game.player_id(m).to_string(),
                    game.action_labels(m)[a].clone(),
                )
            })
            .collect();
        DeviationReport {
            coalition,
            period: dev.period(),
            actions,
        }
    }

    fn summary(&self) -> String {
        let moves: Vec<String> = self
            .actions
            .iter()
            .map(|(player, label)| format!("{player}->{label}"))
            .collect();
        format!(
            "coalition {{{}}} at period {} playing {}",
            self.coalition.join(","),
            self.period,
            moves.join(" ")
        )
    }
}

#[derive(Serialize)]
pub struct WitnessEntry {
    pub state: usize,
    pub state_path: String,
    pub deviation: DeviationReport,
    pub deterring_player: String,
    pub on_path_value: String,
    pub on_path_approx: String,
    pub deviation_value: String,
    pub deviation_approx: String,
}

#[derive(Serialize)]
pub struct CertificateReport {
    pub base: String,
    pub entries: Vec<WitnessEntry>,
}

impl CertificateReport {
    pub fn new(game: &StageGame, cert: &Certificate) -> Self {
        let state_literal = |state: usize| {
            if state == 0 {
                cert.base.literal(game)
            } else {
                cert.family.path_for(state - 1).literal(game)
            }
        };
        let entries = cert
            .witnesses
            .iter()
            .map(|w| WitnessEntry {
                state: w.state,
                state_path: state_literal(w.state),
                deviation: DeviationReport::new(game, &w.deviation),
                deterring_player: game.player_id(w.deterring_player).to_string(),
                on_path_value: exact(&w.on_path_value),
                on_path_approx: approx(&w.on_path_value),
                deviation_value: exact(&w.deviation_value),
                deviation_approx: approx(&w.deviation_value),
            })
            .collect();
        CertificateReport {
            base: cert.base.literal(game),
            entries,
        }
    }

    fn render(&self, out: &mut String) {
        let _ = writeln!(out, "certificate for {}:", self.base);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "  x[{}] {}: player {} deters, {} >= {}  ({} vs {})",
                e.state,
                e.deviation.summary(),
                e.deterring_player,
                e.on_path_value,
                e.deviation_value,
                e.on_path_approx,
                e.deviation_approx,
            );
        }
    }
}

#[derive(Serialize)]
pub struct MarginEntry {
    pub player: String,
    pub induced_value: String,
    pub induced_approx: String,
    pub current_value: String,
    pub current_approx: String,
}

#[derive(Serialize)]
pub struct CounterexampleReport {
    pub state: usize,
    pub state_path: String,
    pub deviation: DeviationReport,
    pub margins: Vec<MarginEntry>,
}

impl CounterexampleReport {
    pub fn new(game: &StageGame, base: &Path, family: &[Path], counter: &Counterexample) -> Self {
        let state_path = if counter.state == 0 {
            base.literal(game)
        } else {
            family[counter.state - 1].literal(game)
        };
        CounterexampleReport {
            state: counter.state,
            state_path,
            deviation: DeviationReport::new(game, &counter.deviation),
            margins: counter
                .margins
                .iter()
                .map(|m| MarginEntry {
                    player: game.player_id(m.player).to_string(),
                    induced_value: exact(&m.induced_value),
                    induced_approx: approx(&m.induced_value),
                    current_value: exact(&m.current_value),
                    current_approx: approx(&m.current_value),
                })
                .collect(),
        }
    }

    fn render(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "counterexample at x[{}] = {}: {}",
            self.state,
            self.state_path,
            self.deviation.summary()
        );
        for m in &self.margins {
            let _ = writeln!(
                out,
                "  player {} gains: {} > {}  ({} vs {})",
                m.player, m.induced_value, m.current_value, m.induced_approx, m.current_approx,
            );
        }
    }
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub deviation: DeviationReport,
    pub margins: Vec<MarginEntry>,
}

impl WitnessReport {
    pub fn new(game: &StageGame, witness: &DominationWitness) -> Self {
        WitnessReport {
            deviation: DeviationReport::new(game, &witness.deviation),
            margins: witness
                .margins
                .iter()
                .map(|m| MarginEntry {
                    player: game.player_id(m.player).to_string(),
                    induced_value: exact(&m.induced_value),
                    induced_approx: approx(&m.induced_value),
                    current_value: exact(&m.current_value),
                    current_approx: approx(&m.current_value),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct SolveReport {
    pub config: ConfigEcho,
    pub universe_size: usize,
    pub trace: TraceReport,
    pub payoffs: Vec<PayoffRow>,
    pub penal_code: BTreeMap<String, String>,
    pub certificates: Vec<CertificateReport>,
}

impl SolveReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "solve: mode={} universe(prefix<={}, cycle<={}) with {} paths",
            self.config.mode.as_deref().unwrap_or("?"),
            self.config.prefix,
            self.config.cycle,
            self.universe_size
        );
        let _ = writeln!(
            out,
            "iteration: sizes {:?}, {} rounds",
            self.trace.sizes, self.trace.rounds
        );
        let _ = writeln!(
            out,
            "fixed point ({} paths, restricted to this universe):",
            self.trace.fixed_point.len()
        );
        for row in &self.payoffs {
            let pairs: Vec<String> = row
                .exact
                .iter()
                .zip(&row.approx)
                .map(|(e, a)| format!("{e} ({a})"))
                .collect();
            let _ = writeln!(out, "  {}  payoffs: {}", row.path, pairs.join(", "));
        }
        if self.penal_code.is_empty() {
            let _ = writeln!(out, "penal code: none (fixed point is empty)");
        } else {
            let _ = writeln!(out, "optimal penal code:");
            for (player, path) in &self.penal_code {
                let _ = writeln!(out, "  player {player}: {path}");
            }
            for cert in &self.certificates {
                cert.render(&mut out);
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub config: ConfigEcho,
    pub base: String,
    pub family: BTreeMap<String, String>,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleReport>,
}

impl VerifyReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify: base {}", self.base);
        for (player, path) in &self.family {
            let _ = writeln!(out, "  punishment for player {player}: {path}");
        }
        if self.accepted {
            let _ = writeln!(out, "verdict: ACCEPT");
            if let Some(cert) = &self.certificate {
                cert.render(&mut out);
            }
        } else {
            let _ = writeln!(out, "verdict: REJECT");
            if let Some(counter) = &self.counterexample {
                counter.render(&mut out);
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct InternalReport {
    pub stable: bool,
    pub violations: Vec<ViolationReport>,
}

#[derive(Serialize)]
pub struct ViolationReport {
    pub path: String,
    pub witness: WitnessReport,
}

#[derive(Serialize)]
pub struct ExternalReport {
    pub stable: bool,
    pub undominated: Vec<String>,
}

#[derive(Serialize)]
pub struct StabilityReport {
    pub config: ConfigEcho,
    pub standard: Vec<String>,
    pub internal: InternalReport,
    pub external: ExternalReport,
}

impl StabilityReport {
    pub fn build(
        game: &StageGame,
        config: ConfigEcho,
        standard: &[Path],
        internal: &InternalStability,
        external: &ExternalStability,
    ) -> Self {
        let mut literals: Vec<String> = standard.iter().map(|p| p.literal(game)).collect();
        literals.sort();
        let violations = internal
            .violations
            .iter()
            .map(|(path, witness)| ViolationReport {
                path: path.literal(game),
                witness: WitnessReport::new(game, witness),
            })
            .collect();
        let mut undominated: Vec<String> =
            external.undominated.iter().map(|p| p.literal(game)).collect();
        undominated.sort();
        StabilityReport {
            config,
            standard: literals,
            internal: InternalReport {
                stable: internal.stable,
                violations,
            },
            external: ExternalReport {
                stable: external.stable,
                undominated,
            },
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "stability audit of {} paths", self.standard.len());
        let _ = writeln!(
            out,
            "internal stability: {}",
            if self.internal.stable { "TRUE" } else { "FALSE" }
        );
        for v in &self.internal.violations {
            let _ = writeln!(
                out,
                "  {} dominated via {}",
                v.path,
                v.witness.deviation.summary()
            );
            for m in &v.witness.margins {
                let _ = writeln!(
                    out,
                    "    player {}: {} > {}  ({} vs {})",
                    m.player, m.induced_value, m.current_value, m.induced_approx, m.current_approx,
                );
            }
        }
        let _ = writeln!(
            out,
            "external stability (relative to the universe): {}",
            if self.external.stable { "TRUE" } else { "FALSE" }
        );
        for path in &self.external.undominated {
            let _ = writeln!(out, "  undominated outside path: {path}");
        }
        out
    }

    pub fn verdict(&self) -> bool {
        self.internal.stable && self.external.stable
    }
}

#[derive(Serialize)]
pub struct CompareReport {
    pub config: ConfigEcho,
    pub universe_size: usize,
    pub nash: TraceReport,
    pub coalitional: TraceReport,
    pub nash_only: Vec<String>,
    pub containment_holds: bool,
}

impl CompareReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "compare: universe(prefix<={}, cycle<={}) with {} paths",
            self.config.prefix, self.config.cycle, self.universe_size
        );
        let _ = writeln!(
            out,
            "individual deviations: {} paths in {} rounds",
            self.nash.fixed_point.len(),
            self.nash.rounds
        );
        for p in &self.nash.fixed_point {
            let _ = writeln!(out, "  {p}");
        }
        let _ = writeln!(
            out,
            "coalitional deviations: {} paths in {} rounds",
            self.coalitional.fixed_point.len(),
            self.coalitional.rounds
        );
        for p in &self.coalitional.fixed_point {
            let _ = writeln!(out, "  {p}");
        }
        let _ = writeln!(
            out,
            "enforceable only without coalitions: {}",
            if self.nash_only.is_empty() {
                "none".to_string()
            } else {
                self.nash_only.join(", ")
            }
        );
        let _ = writeln!(
            out,
            "containment (coalitional within individual): {}",
            if self.containment_holds { "TRUE" } else { "FALSE" }
        );
        out
    }
}
