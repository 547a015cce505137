#![no_main]

use fdms_core::hand::HandModel;
use fdms_core::notation::FunctionUnit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(u) = text.parse::<FunctionUnit>() {
        assert_eq!(u.to_string().parse::<FunctionUnit>().unwrap(), u);
        if let Ok(s) = u.to_subspace(&HandModel::default_10dof()) {
            assert_eq!(s.len(), 2 * u.manipulation_count());
        }
    }
});
