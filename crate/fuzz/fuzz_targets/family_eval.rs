#![no_main]

use libfuzzer_sys::fuzz_target;
use opspec_core::families::parse_family;
use opspec_core::spectra::counting;

// Parsed families are evaluated across their domain. Errors are fine,
// panics are not.
fuzz_target!(|data: &[u8]| {
    let Ok(f) = parse_family(data) else { return };
    if f.dim() > 32 {
        return;
    }
    let Some(window) = f.domain().clip(1e6) else { return };
    let Ok(grid) = window.grid(9) else { return };
    for l in grid {
        if f.evaluate(l).is_ok() {
            let _ = f.derivative(l);
            let _ = counting(&f, l);
        }
    }
});
