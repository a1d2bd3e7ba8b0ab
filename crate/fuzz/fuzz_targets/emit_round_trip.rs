#![no_main]

use libfuzzer_sys::fuzz_target;
use nla_core::format::{emit, parse_document, ParseOptions};

fuzz_target!(|data: &[u8]| {
    let opts = ParseOptions::default();
    if let Ok(doc) = parse_document(data, &opts) {
        let text = emit(&doc);
        let again = parse_document(text.as_bytes(), &opts).expect("canonical output parses");
        assert_eq!(emit(&again), text);
    }
});
