#![no_main]

use libfuzzer_sys::fuzz_target;
use stabdb::StabGroup;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = StabGroup::parse(s) {
        let again = StabGroup::parse(&g.generator_strings().join(";")).unwrap();
        assert!(again.same_group(&g));
        if g.n() <= 6 {
            let _ = stabdb::class_key(&g).unwrap();
        }
    }
});
