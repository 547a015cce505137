#![no_main]

use fdms_core::dataio::{parse_posture_csv, posture_csv_string};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(seq) = parse_posture_csv(data, "fuzz") {
        let again = parse_posture_csv(posture_csv_string(&seq).as_bytes(), "again").unwrap();
        assert_eq!(again.joint_names(), seq.joint_names());
        assert!(again
            .data()
            .iter()
            .zip(seq.data().iter())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }
});
