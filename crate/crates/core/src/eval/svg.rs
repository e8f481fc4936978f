//! Minimal SVG bar charts.

use std::fmt::Write;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Vertical bar chart with one labeled bar per entry.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let (bar_w, gap, left, top, plot_h, bottom) = (28.0, 12.0, 60.0, 40.0, 240.0, 110.0);
    let width = left + bars.len().max(1) as f64 * (bar_w + gap) + 20.0;
    let height = top + plot_h + bottom;
    let max = bars.iter().map(|b| b.1).filter(|v| v.is_finite()).fold(0.0f64, f64::max);
    let scale = if max > 0.0 { plot_h / max } else { 0.0 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    let base = top + plot_h;
    let _ = writeln!(s, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{base}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{left}" y1="{base}" x2="{:.1}" y2="{base}" stroke="black"/>"#, width - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape(y_label)
    );
    for i in 0..=4 {
        let v = max * i as f64 / 4.0;
        let y = base - v * scale;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, left - 4.0, y + 4.0);
    }
    for (i, (name, v)) in bars.iter().enumerate() {
        let x = left + gap / 2.0 + i as f64 * (bar_w + gap);
        let h = if v.is_finite() { v * scale } else { 0.0 };
        let _ =
            writeln!(s, r##"<rect x="{x:.1}" y="{:.1}" width="{bar_w}" height="{h:.1}" fill="#4a78b0"/>"##, base - h);
        let cx = x + bar_w / 2.0;
        let _ = writeln!(s, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{v:.1}</text>"#, base - h - 3.0);
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{:.1}" transform="rotate(-60 {cx:.1} {:.1})" text-anchor="end">{}</text>"#,
            base + 12.0,
            base + 12.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
