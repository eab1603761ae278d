#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use stabdb::db::parse_level;
use stabdb::CodeRecord;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = CodeRecord::from_json_line(s) {
        let _ = r.validate();
        assert_eq!(CodeRecord::from_json_line(&r.to_json_line()).unwrap(), r);
    }
    let _ = parse_level(s, Path::new("fuzz.jsonl"), true);
});
