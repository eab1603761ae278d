#![no_main]

use libfuzzer_sys::fuzz_target;
use stabdb::parse_generator_file;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_generator_file(s) {
        assert_eq!(g.rank() + g.k(), g.n());
    }
});
