#![no_main]

use libfuzzer_sys::fuzz_target;
use nla_core::format::{parse_document, Document, ParseOptions};
use nla_core::markov::Convention;

fuzz_target!(|data: &[u8]| {
    for strict_dims in [true, false] {
        let opts = ParseOptions {
            strict_dims,
            ..ParseOptions::default()
        };
        let Ok(doc) = parse_document(data, &opts) else {
            continue;
        };
        match doc {
            Document::Matrix(m) => {
                let _ = m.to_nmatrix();
                let _ = m.to_chain(Convention::Row);
                let _ = m.to_exchange();
                let _ = m.to_consumption();
            }
            Document::Vector(v) => {
                let _ = v.to_nvector();
            }
            Document::Map(m) => {
                let _ = m.to_map();
            }
        }
    }
});
