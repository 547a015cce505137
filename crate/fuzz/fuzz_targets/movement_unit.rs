#![no_main]

use fdms_core::notation::parse_movement_unit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(u) = parse_movement_unit(text) {
        assert_eq!(parse_movement_unit(&u.to_string()).unwrap(), u);
        for part in u.decompose() {
            assert!(part.groups().len() <= 1);
        }
    }
});
