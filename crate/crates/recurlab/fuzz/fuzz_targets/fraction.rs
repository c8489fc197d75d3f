//! The `num/den` text form must parse without panicking, and every accepted
//! value must round-trip through its canonical display form.

#![no_main]

use libfuzzer_sys::fuzz_target;
use recurlab::qplus::PosRational;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = text.parse::<PosRational>() {
            let shown = r.to_string();
            let back: PosRational = shown.parse().expect("canonical form must reparse");
            assert_eq!(back, r, "display/parse round trip changed the value");
        }
    }
});
