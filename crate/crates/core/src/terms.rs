//! Splitting of `a + b - c` style expressions into signed terms.

/// Splits into signed chunks at `+`/`-` that do not follow `^`, `/`, `*` or `(`.
/// Whitespace is dropped; each chunk keeps its leading sign, if any.
pub(crate) fn signed_chunks(s: &str) -> Vec<String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut chunks = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !matches!(prev, Some('^' | '/' | '*' | '(')) {
            chunks.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    if !cur.is_empty() {
        chunks.push(cur);
    }
    chunks
}
