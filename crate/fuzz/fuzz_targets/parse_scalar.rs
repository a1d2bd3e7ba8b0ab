#![no_main]

use libfuzzer_sys::fuzz_target;
use nla_core::field::{parse_field_descriptor, Field, DEFAULT_TOLERANCE};

// Input: a field descriptor, a newline, then a scalar token.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let (head, token) = text.split_once('\n').unwrap_or((text, ""));
    let field = parse_field_descriptor(head, DEFAULT_TOLERANCE).unwrap_or(Field::Rational);
    if let Some(s) = field.parse_scalar(token) {
        let back = field.parse_scalar(&s.to_string()).expect("rendered scalar parses");
        assert!(field.eq(&s, &back));
    }
});
