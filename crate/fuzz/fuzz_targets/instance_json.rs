#![no_main]

use libfuzzer_sys::fuzz_target;
use prophet_core::Instance;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = Instance::from_json(text) {
        let again = Instance::from_json(&inst.to_json()).expect("re-encoded instance parses");
        assert_eq!(again, inst);
        for d in inst.dists() {
            let x = d.quantile(0.5).expect("valid spec has a median");
            assert!((0.0..=1.0).contains(&d.cdf(x)));
        }
    }
});
