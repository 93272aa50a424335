#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(expr) = hhquad::parse(text) {
        let printed = expr.to_string();
        let again = hhquad::parse(&printed).expect("display output parses");
        assert_eq!(printed, again.to_string());
    }
});
