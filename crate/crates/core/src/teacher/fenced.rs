use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no complete ``` block in response")]
pub struct NoFencedBlock;

/// A response split at its final fenced block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fenced {
    /// Everything before the opening fence, trimmed.
    pub reasoning: String,
    pub content: String,
}

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

/// Content of the last complete triple-backtick block. Fence lines pair up
/// in order; a trailing unmatched fence is ignored. The opening fence's
/// language hint is dropped.
pub fn extract_fenced(response: &str) -> Result<Fenced, NoFencedBlock> {
    let lines: Vec<&str> = response.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let fences: Vec<usize> = (0..lines.len()).filter(|&i| is_fence(lines[i])).collect();
    let pairs = fences.len() / 2;
    if pairs == 0 {
        return Err(NoFencedBlock);
    }
    let (open, close) = (fences[2 * pairs - 2], fences[2 * pairs - 1]);
    Ok(Fenced { reasoning: lines[..open].join("\n").trim().to_string(), content: lines[open + 1..close].join("\n") })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_cases() {
        let f = extract_fenced("reasoning...\n```\nANSWER\n```").unwrap();
        assert_eq!(f.content, "ANSWER");
        assert_eq!(f.reasoning, "reasoning...");
        let f = extract_fenced("a\n```python\nfirst\n```\nb\n```latex\nsecond\nline\n```\ntrailing").unwrap();
        assert_eq!(f.content, "second\nline");
        assert!(f.reasoning.ends_with("first\n```\nb"));
        assert_eq!(extract_fenced("no fences at all"), Err(NoFencedBlock));
        assert_eq!(extract_fenced("```\nunclosed"), Err(NoFencedBlock));
        assert_eq!(extract_fenced("```\nx\n```\n```\nunclosed").unwrap().content, "x");
        assert_eq!(extract_fenced("```\r\nwin\r\n```\r\n").unwrap().content, "win");
    }

    proptest! {
        #[test]
        fn wrapping_round_trips(payload in "[^`\r]*") {
            let wrapped = format!("thinking\n```\n{payload}\n```\n");
            prop_assert_eq!(extract_fenced(&wrapped).unwrap().content, payload);
        }
    }
}
