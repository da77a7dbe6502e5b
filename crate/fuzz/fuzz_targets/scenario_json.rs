#![no_main]

use libfuzzer_sys::fuzz_target;
use prophet_core::oracle::{RankedScenario, MAX_ENUMERATION_PAIRS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scenario) = RankedScenario::from_json(text) {
        assert_eq!(RankedScenario::from_json(&scenario.to_json()).expect("re-encoded scenario parses"), scenario);
        if scenario.n() <= MAX_ENUMERATION_PAIRS.min(8) {
            scenario.space().expect("small scenario enumerates");
        }
    }
});
