#![no_main]

use libfuzzer_sys::fuzz_target;
use prophet_core::report::Table;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = Table::from_json(text) {
        let json = table.to_json();
        let again = Table::from_json(&json).expect("re-encoded table parses");
        assert_eq!(again.to_json(), json);
    }
});
