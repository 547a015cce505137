//! Simulated scissors and switch tasks.
//!
//! Synthetic grasp and task recordings are replayed through the switching
//! runtime and scored by explicit success predicates, giving a success rate
//! per synergy kind and component count.

mod eval;
mod predicates;
mod report;
mod synth;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio;
use crate::error::{Error, Result};
use crate::hand::Finger;
use crate::switching::{TaskScript, Termination};

pub use eval::{fdms_entry_name, standard_database, Candidate, Scenario, BUNDLED_SEED, GRASP_SYNERGY_NAME};
pub use predicates::{scissors_success, switch_success, task_success};
pub use report::{EvaluationReport, ReportRow, REPORT_CSV, REPORT_JSON, REPORT_SVG};
pub use synth::{
    grasp_targets, split_fit_eval, synthesize_grasp_dataset, synthesize_task_sequences, GRASP_TARGET_COUNT,
    HOLD_TREMOR, JITTER_SIGMA, RAMP_STEPS, STANDARD_JOINTS,
};

pub const BUNDLED_SCRIPTS: [&str; 5] = ["scissors", "switch", "pen", "cutting", "spray"];

const SCRIPT_SCISSORS: &str = include_str!("../../data/scripts/scissors.json");
const SCRIPT_SWITCH: &str = include_str!("../../data/scripts/switch.json");
const SCRIPT_PEN: &str = include_str!("../../data/scripts/pen.json");
const SCRIPT_CUTTING: &str = include_str!("../../data/scripts/cutting.json");
const SCRIPT_SPRAY: &str = include_str!("../../data/scripts/spray.json");
const TASK_SCISSORS: &str = include_str!("../../data/tasks/scissors.json");
const TASK_SWITCH: &str = include_str!("../../data/tasks/switch.json");

/// One of the bundled phase scripts, by name.
pub fn bundled_script(name: &str) -> Result<TaskScript> {
    let text = match name {
        "scissors" => SCRIPT_SCISSORS,
        "switch" => SCRIPT_SWITCH,
        "pen" => SCRIPT_PEN,
        "cutting" => SCRIPT_CUTTING,
        "spray" => SCRIPT_SPRAY,
        other => return Err(Error::NotFound(format!("script {other}"))),
    };
    TaskScript::from_json_slice(text.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Scissors,
    Switch,
}

impl TaskKind {
    pub const ALL: [TaskKind; 2] = [TaskKind::Scissors, TaskKind::Switch];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Scissors => "scissors",
            TaskKind::Switch => "switch",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scissors" => Ok(TaskKind::Scissors),
            "switch" => Ok(TaskKind::Switch),
            other => Err(Error::InvalidTaskSpec(format!("unknown task {other:?}"))),
        }
    }
}

/// Opposition signal `signal_plus - signal_minus`, measured from its value
/// at the first manipulation step, must rise to `open_threshold` and fall
/// back to `close_threshold` at least `cycles` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationCriterion {
    pub signal_plus: String,
    pub signal_minus: String,
    pub open_threshold: f64,
    pub close_threshold: f64,
    pub cycles: usize,
    pub held_fingers: Vec<Finger>,
    pub hold_tolerance: f64,
}

/// `joint` must exceed `threshold` (absolute, radians) at some step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressCriterion {
    pub joint: String,
    pub threshold: f64,
    pub held_fingers: Vec<Finger>,
    pub hold_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuccessCriterion {
    Oscillation(OscillationCriterion),
    Press(PressCriterion),
}

impl SuccessCriterion {
    pub fn held_fingers(&self) -> &[Finger] {
        match self {
            SuccessCriterion::Oscillation(c) => &c.held_fingers,
            SuccessCriterion::Press(c) => &c.held_fingers,
        }
    }

    pub fn hold_tolerance(&self) -> f64 {
        match self {
            SuccessCriterion::Oscillation(c) => c.hold_tolerance,
            SuccessCriterion::Press(c) => c.hold_tolerance,
        }
    }
}

/// A simulated task: its phase script, how many recordings to synthesize
/// and how a replayed trajectory is judged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub task: TaskKind,
    pub script: String,
    pub sequence_count: usize,
    pub success: SuccessCriterion,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTaskSpec(format!("{name} must be positive, got {v}")))
    }
}

impl TaskSpec {
    pub fn bundled(task: TaskKind) -> Self {
        let text = match task {
            TaskKind::Scissors => TASK_SCISSORS,
            TaskKind::Switch => TASK_SWITCH,
        };
        Self::from_json_slice(text.as_bytes()).expect("bundled task spec is valid")
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let spec: TaskSpec = serde_json::from_slice(bytes).map_err(|e| Error::InvalidTaskSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_slice(&dataio::read_file(path.as_ref())?)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("task spec serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.sequence_count < 2 {
            return Err(Error::InvalidTaskSpec("sequence_count must be at least 2".into()));
        }
        positive("hold_tolerance", self.success.hold_tolerance())?;
        match (&self.task, &self.success) {
            (TaskKind::Scissors, SuccessCriterion::Oscillation(c)) => {
                positive("open_threshold", c.open_threshold)?;
                positive("close_threshold", c.close_threshold)?;
                if c.close_threshold >= c.open_threshold {
                    return Err(Error::InvalidTaskSpec(
                        "close_threshold must be below open_threshold".into(),
                    ));
                }
                if c.cycles == 0 {
                    return Err(Error::InvalidTaskSpec("cycles must be positive".into()));
                }
            }
            (TaskKind::Switch, SuccessCriterion::Press(c)) => positive("threshold", c.threshold)?,
            (task, _) => {
                return Err(Error::InvalidTaskSpec(format!(
                    "{task} task needs a matching success criterion"
                )));
            }
        }
        self.phase_steps()?;
        Ok(())
    }

    /// The bundled script this task replays.
    pub fn script(&self) -> Result<TaskScript> {
        bundled_script(&self.script)
    }

    /// Lengths of the grasp and manipulation phases.
    pub fn phase_steps(&self) -> Result<(usize, usize)> {
        let script = self.script()?;
        match script.phases.as_slice() {
            [grasp, manip] => match (grasp.termination, manip.termination) {
                (Termination::FixedSteps(g), Termination::FixedSteps(m)) if g > 0 && m > 1 => Ok((g, m)),
                _ => Err(Error::InvalidTaskSpec(format!(
                    "script {:?} phases must have fixed step counts",
                    self.script
                ))),
            },
            _ => Err(Error::InvalidTaskSpec(format!(
                "script {:?} must have a grasp and a manipulation phase",
                self.script
            ))),
        }
    }
}
