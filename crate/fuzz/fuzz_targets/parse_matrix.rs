#![no_main]

use libfuzzer_sys::fuzz_target;
use opspec_core::families::{parse_matrix, serialize_matrix};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = parse_matrix(data) {
        let again = parse_matrix(&serialize_matrix(&m)).expect("re-parse of serialized matrix");
        assert_eq!(m, again);
    }
});
