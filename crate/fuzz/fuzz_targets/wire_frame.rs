#![no_main]

use std::path::Path;
use std::sync::{Arc, LazyLock};

use fdms_cli::wire::{handle_frame, parse_frame};
use fdms_core::hand::HandModel;
use fdms_core::simtasks::bundled_script;
use fdms_core::switching::{RuntimeState, SynergyDatabase};
use libfuzzer_sys::fuzz_target;

static STATE: LazyLock<RuntimeState> = LazyLock::new(|| {
    let db = SynergyDatabase::load(Path::new(env!("CARGO_MANIFEST_DIR")).join("../crates/core/data/db")).unwrap();
    let mut st = RuntimeState::new(Arc::new(HandModel::default_10dof()), None).unwrap();
    st.begin_phase(&bundled_script("scissors").unwrap().phases[1], &db)
        .unwrap();
    st
});

fuzz_target!(|text: &str| {
    let _ = parse_frame(text);
    let mut st = STATE.clone();
    let reply = handle_frame(&mut st, text);
    let v: serde_json::Value = serde_json::from_str(&reply).unwrap();
    if v.get("error").is_some() {
        assert_eq!(st, *STATE);
    }
});
