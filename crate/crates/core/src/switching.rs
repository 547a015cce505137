//! Synergy database, task scripts and the switching runtime.
//!
//! A task script is a list of phases. Entering a phase snapshots the current
//! posture on the phase's fixed joints; while the phase is active those
//! joints replay the snapshot exactly and only the manipulation joints follow
//! the active synergy.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Component, Path};
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dataio::{self, SynergyDocument};
use crate::error::{check_len, Error, Result};
use crate::fdms::{AssignmentSpec, FunctionAssignment};
use crate::hand::HandModel;
use crate::synergy::{PostureSequence, SynergyMatrix};

pub const DB_INDEX_FILE: &str = "index.json";
pub const DB_FORMAT: &str = "fdms-synergy-db";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynergyKind {
    Grasp,
    TaskSpecific,
    Fdms,
}

impl SynergyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SynergyKind::Grasp => "grasp",
            SynergyKind::TaskSpecific => "task-specific",
            SynergyKind::Fdms => "fdms",
        }
    }
}

impl fmt::Display for SynergyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SynergyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grasp" => Ok(SynergyKind::Grasp),
            "task-specific" => Ok(SynergyKind::TaskSpecific),
            "fdms" => Ok(SynergyKind::Fdms),
            other => Err(Error::Schema(format!("unknown synergy kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DbEntry {
    pub kind: SynergyKind,
    pub document: Arc<SynergyDocument>,
}

/// Named synergies available to task scripts. Entries are immutable once
/// registered and shared by reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynergyDatabase {
    entries: BTreeMap<String, DbEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbIndex {
    pub format: String,
    pub version: u32,
    pub entries: Vec<DbIndexEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbIndexEntry {
    pub name: String,
    pub kind: SynergyKind,
    pub path: String,
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidName(name.to_string()))
    }
}

/// Parses and validates a database index without touching the filesystem.
pub fn parse_db_index(bytes: &[u8]) -> Result<DbIndex> {
    let index: DbIndex = serde_json::from_slice(bytes).map_err(|e| Error::CorruptIndex(e.to_string()))?;
    if index.format != DB_FORMAT || index.version != dataio::FORMAT_VERSION {
        return Err(Error::CorruptIndex(format!(
            "unsupported format {:?} v{}",
            index.format, index.version
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for e in &index.entries {
        check_name(&e.name).map_err(|_| Error::CorruptIndex(format!("bad entry name {:?}", e.name)))?;
        if !seen.insert(e.name.as_str()) {
            return Err(Error::CorruptIndex(format!("duplicate entry {:?}", e.name)));
        }
        let p = Path::new(&e.path);
        if e.path.is_empty() || !p.components().all(|c| matches!(c, Component::Normal(_))) {
            return Err(Error::CorruptIndex(format!("entry path {:?} must be relative", e.path)));
        }
    }
    Ok(index)
}

impl SynergyDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, kind: SynergyKind, document: SynergyDocument) -> Result<()> {
        check_name(name)?;
        if self.entries.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if kind == SynergyKind::Fdms && !matches!(document, SynergyDocument::Fdms(_)) {
            return Err(Error::Schema(format!(
                "{name:?}: fdms entries need an fdms synergy file"
            )));
        }
        self.entries.insert(
            name.to_string(),
            DbEntry {
                kind,
                document: Arc::new(document),
            },
        );
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Result<&DbEntry> {
        self.entries.get(name).ok_or_else(|| Error::NotFound(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &DbEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// First entry (by name) of the given kind whose label matches.
    pub fn find_labelled(&self, kind: SynergyKind, label: &str) -> Option<(&str, &DbEntry)> {
        self.entries()
            .find(|(_, e)| e.kind == kind && e.document.label() == Some(label))
    }

    /// Writes one `<name>.json` per entry plus the index file.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let mut index = DbIndex {
            format: DB_FORMAT.into(),
            version: dataio::FORMAT_VERSION,
            entries: Vec::with_capacity(self.entries.len()),
        };
        for (name, entry) in &self.entries {
            let file = format!("{name}.json");
            dataio::save_synergy(&entry.document, dir.join(&file))?;
            index.entries.push(DbIndexEntry {
                name: name.clone(),
                kind: entry.kind,
                path: file,
            });
        }
        let mut text = serde_json::to_string_pretty(&index).expect("index serializes");
        text.push('\n');
        dataio::write_file(&dir.join(DB_INDEX_FILE), text.as_bytes())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let index = parse_db_index(&dataio::read_file(&dir.join(DB_INDEX_FILE))?)?;
        let mut db = SynergyDatabase::new();
        for e in index.entries {
            let doc = dataio::load_synergy(dir.join(&e.path))?;
            db.register(&e.name, e.kind, doc)?;
        }
        Ok(db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FixedSteps(usize),
    ExternalSignal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub assignment: AssignmentSpec,
    pub synergy: String,
    pub n_s: usize,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskScript {
    pub name: String,
    pub phases: Vec<Phase>,
}

impl TaskScript {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self> {
        let script: TaskScript = serde_json::from_slice(bytes).map_err(|e| Error::Schema(e.to_string()))?;
        if script.phases.is_empty() {
            return Err(Error::Schema("task script has no phases".into()));
        }
        Ok(script)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_slice(&dataio::read_file(path.as_ref())?)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("script serializes");
        s.push('\n');
        s
    }

    /// Checks every phase against the database and hand model.
    pub fn validate(&self, db: &SynergyDatabase, model: &HandModel) -> Result<()> {
        for (i, phase) in self.phases.iter().enumerate() {
            resolve_phase(phase, db, model).map_err(|e| Error::InvalidPhase {
                phase: i,
                reason: e.to_string(),
            })?;
            if phase.termination == Termination::FixedSteps(0) {
                return Err(Error::InvalidPhase {
                    phase: i,
                    reason: "fixed_steps must be positive".into(),
                });
            }
        }
        Ok(())
    }
}

struct ResolvedPhase {
    assignment: FunctionAssignment,
    matrix: SynergyMatrix,
    label: Option<String>,
}

fn resolve_phase(phase: &Phase, db: &SynergyDatabase, model: &HandModel) -> Result<ResolvedPhase> {
    let assignment = FunctionAssignment::resolve(phase.assignment.clone(), model)?;
    let entry = db.lookup(&phase.synergy)?;
    let synergy = entry.document.model();
    synergy.subset().check_within(model.dof())?;
    if synergy.subset() != assignment.resolved_subset() {
        return Err(Error::Schema(format!(
            "assignment {} drives joints {:?} but synergy {:?} covers {:?}",
            assignment.label(),
            assignment.resolved_subset().indices(),
            phase.synergy,
            synergy.subset().indices()
        )));
    }
    let matrix = synergy.synergy_matrix(phase.n_s)?;
    Ok(ResolvedPhase {
        assignment,
        matrix,
        label: entry.document.label().map(str::to_string),
    })
}

#[derive(Debug, Clone, PartialEq)]
struct ActivePhase {
    synergy: String,
    label: Option<String>,
    assignment: FunctionAssignment,
    matrix: SynergyMatrix,
    frozen: BTreeMap<usize, f64>,
    coefficients: DVector<f64>,
}

/// Mutable steering state of one hand.
#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeState {
    model: Arc<HandModel>,
    current: Vec<f64>,
    active: Option<ActivePhase>,
}

impl RuntimeState {
    /// Starts at `initial` (clamped), or the flat rest posture.
    pub fn new(model: Arc<HandModel>, initial: Option<&[f64]>) -> Result<Self> {
        let current = match initial {
            Some(p) => model.clamp_posture(p)?.into_vec(),
            None => model.rest_posture().into_vec(),
        };
        Ok(RuntimeState {
            model,
            current,
            active: None,
        })
    }

    pub fn model(&self) -> &HandModel {
        &self.model
    }

    pub fn current_posture(&self) -> &[f64] {
        &self.current
    }

    pub fn has_phase(&self) -> bool {
        self.active.is_some()
    }

    pub fn active_synergy(&self) -> Option<&str> {
        self.active.as_ref().map(|a| a.synergy.as_str())
    }

    pub fn active_label(&self) -> Option<&str> {
        self.active.as_ref().and_then(|a| a.label.as_deref())
    }

    pub fn active_assignment(&self) -> Option<&FunctionAssignment> {
        self.active.as_ref().map(|a| &a.assignment)
    }

    pub fn active_matrix(&self) -> Option<&SynergyMatrix> {
        self.active.as_ref().map(|a| &a.matrix)
    }

    /// Synergy coordinates of the last applied posture.
    pub fn coefficients(&self) -> Option<&DVector<f64>> {
        self.active.as_ref().map(|a| &a.coefficients)
    }

    /// Fixed joints of the active phase and their held values.
    pub fn frozen_values(&self) -> BTreeMap<usize, f64> {
        self.active.as_ref().map(|a| a.frozen.clone()).unwrap_or_default()
    }

    pub fn frozen_indices(&self) -> Vec<usize> {
        self.active
            .as_ref()
            .map(|a| a.frozen.keys().copied().collect())
            .unwrap_or_default()
    }

    /// Switches to `phase`; on error the state is unchanged.
    pub fn begin_phase(&mut self, phase: &Phase, db: &SynergyDatabase) -> Result<()> {
        let resolved = resolve_phase(phase, db, &self.model)?;
        let frozen = resolved
            .assignment
            .fixed_joints(self.model.dof())
            .into_iter()
            .map(|i| (i, self.current[i]))
            .collect();
        let sub = resolved.assignment.resolved_subset().gather(&self.current)?;
        let coefficients = resolved.matrix.coefficients(sub.as_slice())?;
        self.active = Some(ActivePhase {
            synergy: phase.synergy.clone(),
            label: resolved.label,
            assignment: resolved.assignment,
            matrix: resolved.matrix,
            frozen,
            coefficients,
        });
        Ok(())
    }

    fn apply(&mut self, manipulated: &DVector<f64>, coefficients: DVector<f64>) -> Vec<f64> {
        let active = self.active.as_mut().expect("caller checked the phase");
        let mut out = self.current.clone();
        for (k, &i) in active.assignment.resolved_subset().indices().iter().enumerate() {
            out[i] = manipulated[k];
        }
        for (&i, &v) in &active.frozen {
            out[i] = v;
        }
        self.model.clamp_in_place(&mut out);
        active.coefficients = coefficients;
        self.current.clone_from(&out);
        out
    }

    /// Projects the commanded manipulation joints through the active synergy.
    /// Commanded values of fixed joints are ignored.
    pub fn drive_with_posture(&mut self, commanded: &[f64]) -> Result<Vec<f64>> {
        let active = self.active.as_ref().ok_or(Error::NoActivePhase)?;
        check_len(self.model.dof(), commanded.len())?;
        if commanded.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema("commanded posture is not finite".into()));
        }
        let sub = active.assignment.resolved_subset().gather(commanded)?;
        let z = active.matrix.coefficients(sub.as_slice())?;
        let projected = active.matrix.decode(z.as_slice())?;
        Ok(self.apply(&projected, z))
    }

    /// Sets the manipulation joints from synergy coordinates.
    pub fn drive_with_coefficients(&mut self, z: &[f64]) -> Result<Vec<f64>> {
        let active = self.active.as_ref().ok_or(Error::NoActivePhase)?;
        check_len(active.matrix.n_s(), z.len())?;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schema("coefficients are not finite".into()));
        }
        let decoded = active.matrix.decode(z)?;
        Ok(self.apply(&decoded, DVector::from_column_slice(z)))
    }
}

/// Output of a scripted run: one posture per input step and the index at
/// which each phase starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub postures: Vec<Vec<f64>>,
    pub phase_starts: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.postures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postures.is_empty()
    }

    /// Postures of phase `k`.
    pub fn phase(&self, k: usize) -> &[Vec<f64>] {
        let start = self.phase_starts.get(k).copied().unwrap_or(self.postures.len());
        let end = self.phase_starts.get(k + 1).copied().unwrap_or(self.postures.len());
        &self.postures[start..end]
    }

    pub fn to_sequence(&self, joint_names: Vec<String>, provenance: &str) -> Result<PostureSequence> {
        PostureSequence::from_rows(&self.postures, joint_names, provenance)
    }
}

/// Runs every phase of `script` on its own input stream.
///
/// `FixedSteps(k)` phases consume the first `k` postures of their stream;
/// `ExternalSignal` phases consume the whole stream.
pub fn run_script(
    state: &mut RuntimeState,
    script: &TaskScript,
    db: &SynergyDatabase,
    inputs: &[PostureSequence],
) -> Result<Trajectory> {
    if inputs.len() != script.phases.len() {
        return Err(Error::StreamCount {
            expected: script.phases.len(),
            actual: inputs.len(),
        });
    }
    script.validate(db, state.model())?;
    let mut postures = Vec::new();
    let mut phase_starts = Vec::with_capacity(script.phases.len());
    for (i, (phase, stream)) in script.phases.iter().zip(inputs).enumerate() {
        let steps = match phase.termination {
            Termination::FixedSteps(k) => {
                if stream.nrows() < k {
                    return Err(Error::StreamExhausted {
                        phase: i,
                        needed: k,
                        got: stream.nrows(),
                    });
                }
                k
            }
            Termination::ExternalSignal => stream.nrows(),
        };
        state.begin_phase(phase, db)?;
        phase_starts.push(postures.len());
        for r in 0..steps {
            postures.push(state.drive_with_posture(&stream.row(r))?);
        }
    }
    Ok(Trajectory { postures, phase_starts })
}
