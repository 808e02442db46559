use std::collections::BTreeMap;

use milpgen::teacher::{prompt, prompt_ids, render_prompt};

#[test]
fn rendered_prompts_match_golden_files() {
    for id in prompt_ids() {
        let slots = prompt(id).unwrap().slots;
        let bindings: BTreeMap<String, String> =
            slots.iter().map(|s| (s.clone(), format!("<{s} line 1>\n<{s} line 2>"))).collect();
        let rendered = render_prompt(id, &bindings).unwrap();
        let golden = std::fs::read(format!("{}/tests/golden/prompts/{id}.txt", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert!(rendered.as_bytes() == golden.as_slice(), "{id} differs from its golden file");
    }
}
