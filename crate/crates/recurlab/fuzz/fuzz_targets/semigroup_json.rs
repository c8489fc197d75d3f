//! The custom star-semigroup JSON loader must reject malformed input with an
//! error, never a panic, and every accepted semigroup must expose coherent
//! dimensions.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sg) = recurlab::paramult::load_star_semigroup_json(text) {
            assert!(sg.arity() >= 1);
            let _ = sg.name();
        }
    }
});
