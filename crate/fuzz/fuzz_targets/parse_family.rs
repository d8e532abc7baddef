#![no_main]

use libfuzzer_sys::fuzz_target;
use opspec_core::families::{parse_family, serialize_family};

fuzz_target!(|data: &[u8]| {
    // Anything accepted must survive a serialize/parse round trip unchanged.
    if let Ok(f) = parse_family(data) {
        let again = parse_family(&serialize_family(&f)).expect("re-parse of serialized family");
        assert_eq!(f, again);
    }
});
