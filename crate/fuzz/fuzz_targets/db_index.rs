#![no_main]

use fdms_core::switching::parse_db_index;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = parse_db_index(data);
});
