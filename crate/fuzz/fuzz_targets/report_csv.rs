#![no_main]

use libfuzzer_sys::fuzz_target;
use prophet_core::report::Table;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = Table::from_csv(text) {
        if let Ok(csv) = table.to_csv() {
            let again = Table::from_csv(&csv).expect("re-encoded table parses");
            assert_eq!(again.to_csv().expect("encodes"), csv);
        }
    }
});
