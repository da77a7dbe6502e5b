#![no_main]

use libfuzzer_sys::fuzz_target;
use prophet_core::PricePolicy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(policy) = PricePolicy::from_json(text) {
        assert_eq!(PricePolicy::from_json(&policy.to_json()).expect("re-encoded policy parses"), policy);
        let _ = policy.validate();
    }
});
