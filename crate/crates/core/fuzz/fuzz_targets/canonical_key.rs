#![no_main]

use libfuzzer_sys::fuzz_target;
use stabdb::CanonicalKey;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(k) = CanonicalKey::from_hex(s) {
        assert_eq!(CanonicalKey::from_hex(&k.to_hex()).unwrap(), k);
    }
});
