//! The descriptor mini-language must never panic, whatever the input bytes:
//! every outcome is a parsed value or a positioned `DescriptorError`.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = recurlab::descriptor::parse_family(text);
        let _ = recurlab::descriptor::parse_coloring(text);
    }
});
