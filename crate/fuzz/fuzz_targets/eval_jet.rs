#![no_main]

use libfuzzer_sys::fuzz_target;

// Layout: 8 bytes of x, 1 byte of order, the rest is the expression.
fuzz_target!(|data: &[u8]| {
    if data.len() < 9 {
        return;
    }
    let x = f64::from_le_bytes(data[..8].try_into().unwrap());
    let order = usize::from(data[8] % 16);
    let Ok(text) = std::str::from_utf8(&data[9..]) else {
        return;
    };
    let Ok(expr) = hhquad::parse(text) else {
        return;
    };
    if let Ok(jet) = hhquad::eval_jet(&expr, x, order) {
        assert_eq!(jet.derivs().len(), order + 1);
        assert!(jet.derivs().iter().all(|d| d.is_finite()));
    }
});
