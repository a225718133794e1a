//! HTML / inline-XBRL removal for filing text.

/// Elements whose entire content is dropped, not just their tags.
const DROPPED_ELEMENTS: &[&str] = &["table", "script", "style", "ix:header", "head"];

/// Elements that end a paragraph.
const BLOCK_ELEMENTS: &[&str] = &[
    "p",
    "div",
    "h1",
    "h2",
    "h3",
    "h4",
    "h5",
    "h6",
    "li",
    "ul",
    "ol",
    "section",
    "article",
    "blockquote",
    "hr",
    "body",
    "html",
    "title",
];

/// Removes markup from raw filing text.
///
/// Entity references are decoded first, so entity-escaped markup is
/// stripped like literal markup. Table, script, style and inline-XBRL
/// header content is dropped and replaced by a single space. Block-level
/// elements become paragraph breaks. Whitespace runs collapse to one
/// space, except runs holding two or more newlines, which collapse to a
/// single blank line.
pub fn strip_markup(raw: &str) -> String {
    let mut text = decode_entities(raw);
    loop {
        let stripped = strip_tags(&text);
        let done = !has_tag_start(&stripped);
        text = stripped;
        if done {
            break;
        }
    }
    normalize_whitespace(&text)
}

fn has_tag_start(s: &str) -> bool {
    s.as_bytes()
        .windows(2)
        .any(|w| w[0] == b'<' && w[1].is_ascii_alphabetic())
}

fn is_tag_start(next: Option<u8>) -> bool {
    matches!(next, Some(b) if b.is_ascii_alphabetic() || b == b'/' || b == b'!' || b == b'?')
}

/// Lowercased element name of a tag body such as `/TD class="x"`.
fn tag_name(body: &str) -> (bool, String) {
    let body = body.trim_start();
    let (closing, rest) = match body.strip_prefix('/') {
        Some(r) => (true, r),
        None => (false, body),
    };
    let name: String = rest
        .chars()
        .take_while(|c| !c.is_whitespace() && *c != '>' && *c != '/')
        .collect::<String>()
        .to_ascii_lowercase();
    (closing, name)
}

fn strip_tags(s: &str) -> String {
    let bytes = s.as_bytes();
    let lower = s.to_ascii_lowercase();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    let mut plain_start = 0;

    while i < bytes.len() {
        if bytes[i] != b'<' || !is_tag_start(bytes.get(i + 1).copied()) {
            i += 1;
            continue;
        }
        out.push_str(&s[plain_start..i]);

        if lower[i..].starts_with("<!--") {
            i = match lower[i + 4..].find("-->") {
                Some(off) => i + 4 + off + 3,
                None => bytes.len(),
            };
            plain_start = i;
            continue;
        }

        let Some(close_off) = s[i..].find('>') else {
            // unterminated tag: drop the '<' only
            i += 1;
            plain_start = i;
            continue;
        };
        let tag_end = i + close_off + 1;
        let (closing, name) = tag_name(&s[i + 1..tag_end - 1]);

        if !closing && DROPPED_ELEMENTS.contains(&name.as_str()) {
            i = skip_element(&lower, tag_end, &name);
            out.push(' ');
        } else if name == "br" || name == "tr" {
            out.push('\n');
            i = tag_end;
        } else if BLOCK_ELEMENTS.contains(&name.as_str()) {
            out.push_str("\n\n");
            i = tag_end;
        } else {
            i = tag_end;
        }
        plain_start = i;
    }
    out.push_str(&s[plain_start..]);
    out
}

/// Returns the index just past the matching close tag of `name`, honouring
/// nesting; runs to end of input when the element is never closed.
fn skip_element(lower: &str, mut pos: usize, name: &str) -> usize {
    let open = format!("<{name}");
    let close = format!("</{name}");
    let mut depth = 1usize;
    while depth > 0 {
        let next_open = find_tag(lower, pos, &open);
        let Some(next_close) = find_tag(lower, pos, &close) else {
            return lower.len();
        };
        match next_open {
            Some(o) if o < next_close => {
                depth += 1;
                pos = o + open.len();
            }
            _ => {
                depth -= 1;
                pos = match lower[next_close..].find('>') {
                    Some(off) => next_close + off + 1,
                    None => lower.len(),
                };
            }
        }
    }
    pos
}

/// Finds `<name` followed by a tag-name boundary.
fn find_tag(lower: &str, from: usize, prefix: &str) -> Option<usize> {
    let mut start = from;
    while let Some(off) = lower[start..].find(prefix) {
        let at = start + off;
        let after = lower.as_bytes().get(at + prefix.len()).copied();
        if matches!(after, None | Some(b'>') | Some(b'/')) || after.is_some_and(|b| b.is_ascii_whitespace()) {
            return Some(at);
        }
        start = at + prefix.len();
    }
    None
}

fn named_entity(name: &str) -> Option<&'static str> {
    Some(match name {
        "amp" => "&",
        "lt" => "<",
        "gt" => ">",
        "quot" => "\"",
        "apos" => "'",
        "nbsp" | "ensp" | "emsp" | "thinsp" => " ",
        "mdash" => "\u{2014}",
        "ndash" => "\u{2013}",
        "lsquo" => "\u{2018}",
        "rsquo" => "\u{2019}",
        "ldquo" => "\u{201c}",
        "rdquo" => "\u{201d}",
        "hellip" => "\u{2026}",
        "bull" => "\u{2022}",
        "middot" => "\u{b7}",
        "sect" => "\u{a7}",
        "para" => "\u{b6}",
        "copy" => "\u{a9}",
        "reg" => "\u{ae}",
        "trade" => "\u{2122}",
        "deg" => "\u{b0}",
        "cent" => "\u{a2}",
        "pound" => "\u{a3}",
        "euro" => "\u{20ac}",
        "yen" => "\u{a5}",
        _ => return None,
    })
}

/// Decodes named, decimal and hex character references. Unknown or
/// malformed references are left untouched.
pub fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = tail[1..]
            .char_indices()
            .take(12)
            .find(|(_, c)| *c == ';')
            .map(|(i, _)| i + 1);
        let decoded = semi.and_then(|semi| {
            let body = &tail[1..semi];
            let ch = if let Some(num) = body.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse::<u32>().ok(),
                };
                code.and_then(char::from_u32).map(String::from)
            } else {
                named_entity(body).map(String::from)
            };
            ch.map(|c| (c, semi + 1))
        });
        match decoded {
            Some((text, consumed)) => {
                out.push_str(&text);
                rest = &tail[consumed..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn normalize_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_ws = false;
    let mut newlines = 0usize;
    for c in s.chars() {
        if c.is_whitespace() {
            pending_ws = true;
            if c == '\n' {
                newlines += 1;
            }
            continue;
        }
        if pending_ws && !out.is_empty() {
            out.push_str(if newlines >= 2 { "\n\n" } else { " " });
        }
        pending_ws = false;
        newlines = 0;
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn removes_simple_tags() {
        assert_eq!(strip_markup("<p>Risk factors</p>"), "Risk factors");
        assert_eq!(strip_markup("plain text"), "plain text");
    }

    #[test]
    fn drops_table_content() {
        assert_eq!(strip_markup("a<table><tr><td>1</td></tr></table>b"), "a b");
        assert_eq!(
            strip_markup("x<TABLE border=1><tr><td><table><tr><td>9</td></tr></table></td></tr></TABLE>y"),
            "x y"
        );
    }

    #[test]
    fn keeps_table_caption_outside_table() {
        let out = strip_markup("<p>Table 3: Exposure</p><table><tr><td>5</td></tr></table>");
        assert_eq!(out, "Table 3: Exposure");
    }

    #[test]
    fn decodes_entities() {
        assert_eq!(
            strip_markup("AT&amp;T&#8217;s &quot;plan&quot;"),
            "AT&T\u{2019}s \"plan\""
        );
        assert_eq!(strip_markup("a &lt; b"), "a < b");
        assert_eq!(strip_markup("R&D &bogus; &#xZZ;"), "R&D &bogus; &#xZZ;");
    }

    #[test]
    fn escaped_markup_is_stripped() {
        assert_eq!(strip_markup("&lt;b&gt;bold&lt;/b&gt;"), "bold");
    }

    #[test]
    fn paragraph_breaks_preserved() {
        let out = strip_markup("<p>First   block.</p>\n<p>Second\nblock.</p>");
        assert_eq!(out, "First block.\n\nSecond block.");
        assert_eq!(strip_markup("one\n\n\n\ntwo\nthree"), "one\n\ntwo three");
    }

    #[test]
    fn xbrl_inline_facts_keep_text_and_hidden_header_goes() {
        let raw = "<ix:header><ix:hidden>secret</ix:hidden></ix:header>Revenue was \
                   <ix:nonFraction name=\"us-gaap:Revenue\">12</ix:nonFraction> million";
        assert_eq!(strip_markup(raw), "Revenue was 12 million");
    }

    #[test]
    fn comments_and_malformed_tags() {
        assert_eq!(strip_markup("a<!-- hidden <p> -->b"), "ab");
        assert_eq!(strip_markup("x<y"), "xy");
        assert_eq!(strip_markup("<<b>a"), "a");
    }

    proptest! {
        #[test]
        fn no_tag_start_survives(s in "[<>/a-zA-Z &;#0-9!\\-\n]{0,60}") {
            let out = strip_markup(&s);
            prop_assert!(!has_tag_start(&out), "{:?} -> {:?}", s, out);
        }

        #[test]
        fn identity_on_clean_single_spaced_text(s in "[a-zA-Z0-9,.]{1,10}( [a-zA-Z0-9,.]{1,10}){0,8}") {
            prop_assert_eq!(strip_markup(&s), s);
        }
    }
}
