//! Success rate against component count.

use std::sync::Arc;

use super::{split_fit_eval, synthesize_task_sequences, task_success, EvaluationReport, ReportRow, TaskSpec};
use crate::dataio::{self, SynergyDocument};
use crate::error::{Error, Result};
use crate::fdms::{build_fdms, build_grasp_synergy, build_task_specific, AssignmentSpec, FunctionAssignment};
use crate::hand::HandModel;
use crate::notation::{fdms_unit_catalog, FunctionUnit};
use crate::switching::{
    run_script, Phase, RuntimeState, SynergyDatabase, SynergyKind, TaskScript, Termination, Trajectory,
};
use crate::synergy::{Centering, PostureSequence};

/// Seed of the checked-in database and golden reports.
pub const BUNDLED_SEED: u64 = 7;
pub const GRASP_SYNERGY_NAME: &str = "grasp";

pub fn fdms_entry_name(unit: FunctionUnit) -> String {
    format!("fdms-{unit}")
}

/// The grasp synergy of `grasp` plus one FDMS per catalog unit.
pub fn standard_database(model: &HandModel, grasp: &PostureSequence, centering: Centering) -> Result<SynergyDatabase> {
    let mut db = SynergyDatabase::new();
    db.register(
        GRASP_SYNERGY_NAME,
        SynergyKind::Grasp,
        build_grasp_synergy(grasp, centering)?.into(),
    )?;
    for unit in fdms_unit_catalog() {
        let assignment = FunctionAssignment::from_unit(unit, model)?;
        let fdms = build_fdms(grasp, &assignment, centering)?;
        db.register(&fdms_entry_name(unit), SynergyKind::Fdms, fdms.into())?;
    }
    Ok(db)
}

/// One synergy under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub kind: SynergyKind,
    pub name: String,
    pub f: usize,
}

/// Recordings of one task, split into fit and evaluation halves, and the
/// synergies they are replayed through.
#[derive(Debug, Clone)]
pub struct Scenario {
    model: Arc<HandModel>,
    spec: TaskSpec,
    script: TaskScript,
    db: SynergyDatabase,
    fit: Vec<PostureSequence>,
    eval: Vec<PostureSequence>,
    candidates: Vec<Candidate>,
    seed: u64,
    dataset_hash: String,
    grasp_source_hash: String,
}

fn entry_dim(db: &SynergyDatabase, name: &str) -> Result<usize> {
    Ok(db.lookup(name)?.document.model().dim())
}

impl Scenario {
    /// Synthesizes the task recordings for `seed`, fits the task-specific
    /// synergy on the fit half and picks the grasp synergy and FDMS named
    /// by the task's script.
    pub fn prepare(model: Arc<HandModel>, spec: TaskSpec, mut db: SynergyDatabase, seed: u64) -> Result<Self> {
        spec.validate()?;
        let script = spec.script()?;
        let seqs = synthesize_task_sequences(&spec, &model, seed, spec.sequence_count)?;
        let mut all = Vec::new();
        for s in &seqs {
            all.extend_from_slice(dataio::posture_csv_string(s).as_bytes());
        }
        let dataset_hash = dataio::content_hash(&all);
        let (fit, eval) = split_fit_eval(seqs);

        let grasp_name = script.phases[0].synergy.clone();
        let grasp = db.lookup(&grasp_name)?;
        if grasp.kind != SynergyKind::Grasp {
            return Err(Error::Schema(format!("{grasp_name:?} is not a grasp synergy")));
        }
        let centering = grasp.document.model().centering();
        let grasp_source_hash = grasp.document.model().source_hash().to_string();

        let manip = &script.phases[1];
        let fdms_name = match db.lookup(&manip.synergy) {
            Ok(e) if e.kind == SynergyKind::Fdms => manip.synergy.clone(),
            _ => db
                .find_labelled(SynergyKind::Fdms, &manip.assignment.functions.to_string())
                .map(|(n, _)| n.to_string())
                .ok_or_else(|| Error::NotFound(format!("fdms {}", manip.assignment.functions)))?,
        };

        let task_name = format!("task-{}", spec.task);
        db.register(
            &task_name,
            SynergyKind::TaskSpecific,
            SynergyDocument::Plain(build_task_specific(&fit, centering)?),
        )?;

        let candidates = vec![
            Candidate {
                kind: SynergyKind::Grasp,
                f: entry_dim(&db, &grasp_name)?,
                name: grasp_name,
            },
            Candidate {
                kind: SynergyKind::TaskSpecific,
                f: entry_dim(&db, &task_name)?,
                name: task_name,
            },
            Candidate {
                kind: SynergyKind::Fdms,
                f: entry_dim(&db, &fdms_name)?,
                name: fdms_name,
            },
        ];
        Ok(Scenario {
            model,
            spec,
            script,
            db,
            fit,
            eval,
            candidates,
            seed,
            dataset_hash,
            grasp_source_hash,
        })
    }

    pub fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    pub fn database(&self) -> &SynergyDatabase {
        &self.db
    }

    pub fn fit_sequences(&self) -> &[PostureSequence] {
        &self.fit
    }

    pub fn eval_sequences(&self) -> &[PostureSequence] {
        &self.eval
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn candidate(&self, kind: SynergyKind) -> &Candidate {
        self.candidates
            .iter()
            .find(|c| c.kind == kind)
            .expect("one candidate per kind")
    }

    pub fn dataset_hash(&self) -> &str {
        &self.dataset_hash
    }

    /// The two-phase script replayed for `candidate` at `n_s`. Grasp and
    /// task-specific synergies drive the whole hand in the manipulation phase.
    pub fn trial_script(&self, candidate: &Candidate, n_s: usize) -> TaskScript {
        let manip = &self.script.phases[1];
        let assignment = match candidate.kind {
            SynergyKind::Fdms => manip.assignment.clone(),
            _ => AssignmentSpec::from("MMMMM".parse::<FunctionUnit>().expect("valid unit")),
        };
        TaskScript {
            name: self.script.name.clone(),
            phases: vec![
                self.script.phases[0].clone(),
                Phase {
                    name: manip.name.clone(),
                    assignment,
                    synergy: candidate.name.clone(),
                    n_s,
                    termination: manip.termination,
                },
            ],
        }
    }

    /// Replays one evaluation recording from the flat hand.
    pub fn run_trial(&self, candidate: &Candidate, n_s: usize, seq: &PostureSequence) -> Result<Trajectory> {
        let script = self.trial_script(candidate, n_s);
        let mut inputs = Vec::with_capacity(2);
        let mut start = 0;
        for phase in &script.phases {
            let end = match phase.termination {
                Termination::FixedSteps(k) => start + k,
                Termination::ExternalSignal => seq.nrows(),
            };
            inputs.push(seq.slice_rows(start, end.min(seq.nrows()))?);
            start = end;
        }
        let mut state = RuntimeState::new(self.model.clone(), None)?;
        run_script(&mut state, &script, &self.db, &inputs)
    }

    pub fn evaluate_success_rate(&self, candidate: &Candidate, n_s: usize) -> Result<ReportRow> {
        if n_s == 0 || n_s > candidate.f {
            return Err(Error::ComponentsOutOfRange { n_s, f: candidate.f });
        }
        let mut successes = 0;
        for seq in &self.eval {
            let traj = self.run_trial(candidate, n_s, seq)?;
            if task_success(&traj, &self.spec, &self.model)? {
                successes += 1;
            }
        }
        Ok(ReportRow::new(
            self.spec.task,
            candidate.kind,
            &candidate.name,
            n_s,
            self.eval.len(),
            successes,
        ))
    }

    /// Every candidate at every component count, grasp first.
    pub fn sweep_components(&self) -> Result<EvaluationReport> {
        let mut rows = Vec::new();
        for c in &self.candidates {
            for n_s in 1..=c.f {
                rows.push(self.evaluate_success_rate(c, n_s)?);
            }
        }
        Ok(EvaluationReport {
            task: self.spec.task,
            seed: self.seed,
            dataset_hash: self.dataset_hash.clone(),
            grasp_source_hash: self.grasp_source_hash.clone(),
            fit_sequences: self.fit.len(),
            eval_sequences: self.eval.len(),
            rows,
        })
    }
}
