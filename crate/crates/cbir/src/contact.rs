//! Static HTML page showing a query and its ranked results.

use std::fmt::Write as _;

use cbir_core::RetrievalResult;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// `query_src` and each entry of `sources` are used verbatim as image URLs.
pub fn render_contact_sheet(result: &RetrievalResult, query_src: &str, sources: &[&str]) -> String {
    let mut s = String::new();
    s.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(s, "<title>Results for {}</title>", escape(&result.query_id));
    s.push_str(
        "<style>\nbody{font-family:sans-serif}\n.grid{display:flex;flex-wrap:wrap;gap:8px}\n\
         figure{margin:0;width:160px}\nimg{width:160px;height:160px;object-fit:cover}\n\
         figcaption{font-size:12px;word-break:break-all}\n</style>\n</head>\n<body>\n",
    );
    let _ = writeln!(
        s,
        "<h1>Query</h1>\n<figure><img src=\"{}\" alt=\"{}\"><figcaption>{}</figcaption></figure>",
        escape(query_src),
        escape(&result.query_id),
        escape(&result.query_id)
    );
    let _ = writeln!(s, "<h1>Top {} of {} requested</h1>\n<div class=\"grid\">", result.hits.len(), result.k);
    for (rank, (hit, src)) in result.hits.iter().zip(sources).enumerate() {
        let _ = writeln!(
            s,
            "<figure><img src=\"{}\" alt=\"{}\"><figcaption>{}. {}<br>{}<br>d = {:.6}</figcaption></figure>",
            escape(src),
            escape(&hit.id),
            rank + 1,
            escape(&hit.id),
            escape(&hit.label),
            hit.distance
        );
    }
    s.push_str("</div>\n</body>\n</html>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use cbir_core::rank::{GroupDistances, Hit};

    #[test]
    fn escapes_and_lists_hits() {
        let result = RetrievalResult {
            query_id: "q<1>".into(),
            k: 2,
            truncated: false,
            hits: vec![Hit {
                id: "a/x&y.png".into(),
                label: "a".into(),
                distance: 0.25,
                groups: GroupDistances::default(),
            }],
        };
        let html = render_contact_sheet(&result, "q.png", &["/c/a/x&y.png"]);
        assert!(html.contains("q&lt;1&gt;"));
        assert!(html.contains("src=\"/c/a/x&amp;y.png\""));
        assert!(html.contains("1. a/x&amp;y.png"));
        assert!(html.contains("d = 0.250000"));
        assert!(!html.contains("q<1>"));
    }
}
