#![no_main]

use libfuzzer_sys::fuzz_target;
use stabdb::PauliOp;

// First byte picks the qubit count, the rest is the string.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(s) = std::str::from_utf8(rest) else { return };
    if let Ok(p) = PauliOp::parse(s, usize::from(n % 40)) {
        let text: String = (0..p.n()).map(|j| p.letter(j).as_char()).collect();
        assert_eq!(PauliOp::parse(&text, p.n()).unwrap(), p);
    }
});
