//! Output formats: the aligned-text chart, versioned JSON, and the CSV
//! matrix format (header row of column labels, leading column of
//! `label:order` pairs).

use std::fmt::Write as _;

use serde_json::json;

use crate::connecting::DegreeBlock;
use crate::error::{Q2Error, Result};
use crate::local::Local3;
use crate::rings::{Family, GenLabel};
use crate::snf::{fmt_vector, LocalMatrix, PresentedGroup, SummandOrder};
use crate::spectral::{E2Entry, GreekRow};

pub const JSON_SCHEMA: &str = "anss-q2/v1";

fn order_token(o: SummandOrder) -> String {
    match o {
        SummandOrder::Free => "∞".into(),
        SummandOrder::Tors(e) => format!("{}", 3u64.pow(e)),
    }
}

/// Cell text for one entry: summand orders joined by `+`, `^ω` marking a
/// countable family, `r`-suffix marking a relation-bearing presentation,
/// symbolic tokens passed through, `.` for the zero group.
pub fn entry_cell(entry: &E2Entry) -> String {
    let mut tokens = Vec::new();
    for c in &entry.components {
        if let Some(sym) = &c.symbolic {
            tokens.push(sym.clone());
            continue;
        }
        if c.group.is_trivial() {
            continue;
        }
        let orders: Vec<String> = c
            .group
            .summands
            .iter()
            .map(|s| order_token(s.order))
            .collect();
        let mut token = if c.countable {
            // countable family: collapse a uniform run into one marked token
            let first = &orders[0];
            if orders.iter().all(|o| o == first) {
                format!("{first}^ω")
            } else {
                format!("({})^ω", orders.join("+"))
            }
        } else {
            orders.join("+")
        };
        if !c.group.relations.is_empty() {
            token.push('r');
        }
        tokens.push(token);
    }
    if entry.u_flag {
        tokens.push("U".into());
    }
    if tokens.is_empty() {
        ".".into()
    } else {
        tokens.join("+")
    }
}

/// Aligned-text chart: one row per filtration `s` (descending), one column
/// per internal degree `t`.
pub fn render_chart_text(entries: &[E2Entry]) -> String {
    if entries.is_empty() {
        return String::new();
    }
    let t_min = entries.iter().map(|e| e.t).min().unwrap();
    let t_max = entries.iter().map(|e| e.t).max().unwrap();
    let s_max = entries.iter().map(|e| e.s).max().unwrap();
    let ncols = (t_max - t_min + 1) as usize;
    let mut cells = vec![vec![".".to_string(); ncols]; (s_max + 1) as usize];
    for e in entries {
        cells[e.s as usize][(e.t - t_min) as usize] = entry_cell(e);
    }
    let mut widths = vec![0usize; ncols];
    let mut headers = Vec::with_capacity(ncols);
    for (j, w) in widths.iter_mut().enumerate() {
        let h = format!("t={}", t_min + j as i64);
        *w = h.chars().count();
        headers.push(h);
    }
    for row in &cells {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:>5} ", "");
    for (j, h) in headers.iter().enumerate() {
        let _ = write!(out, " {:<width$}", h, width = widths[j]);
    }
    out.push('\n');
    for s in (0..=s_max).rev() {
        let _ = write!(out, "{:>5} ", format!("s={s}"));
        for (j, cell) in cells[s as usize].iter().enumerate() {
            let _ = write!(out, " {:<width$}", cell, width = widths[j]);
        }
        out.push('\n');
    }
    out
}

pub fn presentation_json(p: &PresentedGroup) -> serde_json::Value {
    json!({
        "summands": p.summands.iter().map(|s| json!({
            "order": match s.order {
                SummandOrder::Free => json!("free"),
                SummandOrder::Tors(e) => json!(e),
            },
            "gen": fmt_vector(&s.gen),
        })).collect::<Vec<_>>(),
        "relations": p.relations.iter().map(|r| fmt_vector(r)).collect::<Vec<_>>(),
    })
}

pub fn chart_json(entries: &[E2Entry], window_columns: usize) -> serde_json::Value {
    let items: Vec<_> = entries
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| {
            json!({
                "s": e.s,
                "t": e.t,
                "cell": entry_cell(e),
                "provenance": e.provenance.to_string(),
                "u_flag": e.u_flag,
                "notes": e.notes,
                "components": e.components.iter().map(|c| json!({
                    "origin": c.origin.to_string(),
                    "countable": c.countable,
                    "symbolic": c.symbolic,
                    "group": presentation_json(&c.group),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "schema": JSON_SCHEMA,
        "window_columns": window_columns,
        "entries": items,
    })
}

/// CSV for the chart: one line per nonzero entry.
pub fn chart_csv(entries: &[E2Entry]) -> String {
    let mut out = String::from("s,t,cell,provenance,u_flag\n");
    for e in entries.iter().filter(|e| !e.is_zero()) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.s,
            e.t,
            entry_cell(e),
            e.provenance,
            e.u_flag
        );
    }
    out
}

fn entry_string(x: &Local3, order: SummandOrder) -> String {
    match order {
        SummandOrder::Tors(e) => format!("{}", x.reduce_mod(e).value()),
        SummandOrder::Free => {
            if x.denom() == &num::BigInt::from(1) {
                format!("{}", x.numer())
            } else {
                format!("{}/{}", x.numer(), x.denom())
            }
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_split(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

/// CSV of a labeled matrix: header `label:order` cells for columns, leading
/// column of `label:order` row descriptors, torsion entries reduced at the
/// row modulus and free entries exact. Labels containing commas are quoted.
pub fn matrix_csv(m: &LocalMatrix) -> String {
    let mut out = String::from("label:order");
    for lab in &m.col_labels {
        let _ = write!(out, ",{}", csv_quote(&lab.to_string()));
    }
    out.push('\n');
    for i in 0..m.rows {
        let _ = write!(
            out,
            "{}",
            csv_quote(&format!("{}:{}", m.row_labels[i], m.row_orders[i]))
        );
        for j in 0..m.cols {
            let _ = write!(out, ",{}", entry_string(m.at(i, j), m.row_orders[i]));
        }
        out.push('\n');
    }
    out
}

pub fn block_csv(block: &DegreeBlock) -> String {
    matrix_csv(&block.matrix)
}

/// Parses the CSV format written by [`matrix_csv`].
pub fn matrix_from_csv(text: &str) -> Result<LocalMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Q2Error::InvalidConfig("empty matrix CSV".into()))?;
    let col_labels: Vec<GenLabel> = csv_split(header)
        .into_iter()
        .skip(1)
        .map(|s| parse_label(&s))
        .collect::<Result<_>>()?;
    let mut row_labels = Vec::new();
    let mut row_orders = Vec::new();
    let mut rows_data = Vec::new();
    for line in lines {
        let cells = csv_split(line);
        let head = cells
            .first()
            .ok_or_else(|| Q2Error::InvalidConfig("missing row descriptor".into()))?;
        let (lab, ord) = head
            .rsplit_once(':')
            .ok_or_else(|| Q2Error::InvalidConfig(format!("bad row descriptor {head:?}")))?;
        row_labels.push(parse_label(lab)?);
        row_orders.push(parse_order(ord)?);
        let data: Vec<Local3> = cells[1..]
            .iter()
            .map(|s| parse_entry(s))
            .collect::<Result<_>>()?;
        if data.len() != col_labels.len() {
            return Err(Q2Error::InvalidConfig(format!(
                "row {lab} has {} entries, expected {}",
                data.len(),
                col_labels.len()
            )));
        }
        rows_data.push(data);
    }
    let mut m = LocalMatrix::new(
        rows_data.len(),
        col_labels.len(),
        row_orders,
        row_labels,
        col_labels,
    );
    for (i, row) in rows_data.into_iter().enumerate() {
        for (j, x) in row.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    Ok(m)
}

fn parse_order(s: &str) -> Result<SummandOrder> {
    let s = s.trim();
    if s == "free" {
        return Ok(SummandOrder::Free);
    }
    if let Some(e) = s.strip_prefix("3^") {
        let e: u32 = e
            .parse()
            .map_err(|_| Q2Error::InvalidConfig(format!("bad order token {s:?}")))?;
        return Ok(SummandOrder::Tors(e));
    }
    Err(Q2Error::InvalidConfig(format!("bad order token {s:?}")))
}

fn parse_entry(s: &str) -> Result<Local3> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: num::BigInt = num
        .parse()
        .map_err(|_| Q2Error::InvalidConfig(format!("bad entry {s:?}")))?;
    let d: num::BigInt = den
        .parse()
        .map_err(|_| Q2Error::InvalidConfig(format!("bad entry {s:?}")))?;
    Local3::new(n, d).map_err(Q2Error::from)
}

/// Parses a generator label written by `Display`: `A[5,2]`, `j^3`,
/// `a[-2,2]`, `1`, `alpha`, `Delta^2*alpha`, `Ext^(2,42)`.
pub fn parse_label(s: &str) -> Result<GenLabel> {
    let s = s.trim();
    let bad = || Q2Error::InvalidConfig(format!("bad label {s:?}"));
    if s == "1" {
        return Ok(GenLabel::OneMf);
    }
    if s == "alpha" {
        return Ok(GenLabel::Alpha(0));
    }
    if let Some(rest) = s.strip_prefix("Delta^") {
        let (k, tail) = rest.split_once('*').ok_or_else(bad)?;
        if tail != "alpha" {
            return Err(bad());
        }
        return Ok(GenLabel::Alpha(k.parse().map_err(|_| bad())?));
    }
    if let Some(k) = s.strip_prefix("j^") {
        return Ok(GenLabel::JPow(k.parse().map_err(|_| bad())?));
    }
    if let Some(rest) = s.strip_prefix("Ext^(") {
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        return Ok(GenLabel::Ext {
            s: a.trim().parse().map_err(|_| bad())?,
            t: b.trim().parse().map_err(|_| bad())?,
        });
    }
    if let Some(rest) = s.strip_prefix("a[") {
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let i: i64 = a.trim().parse().map_err(|_| bad())?;
        let j: i64 = b.trim().parse().map_err(|_| bad())?;
        if i != -j || j < 1 {
            return Err(bad());
        }
        return Ok(GenLabel::KerH(j));
    }
    let fam = match s.chars().next() {
        Some('A') => Family::A,
        Some('B') => Family::B,
        Some('C') => Family::C,
        Some('D') => Family::D,
        _ => return Err(bad()),
    };
    let inner = s[1..]
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    Ok(GenLabel::Gen(
        fam,
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Text table for the Greek-letter report.
pub fn greek_text(rows: &[GreekRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} {:>12} {:>12} {:>7} {:>9}  candidates",
        "element", "bidegree", "chart (s,t)", "order", "verified"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:>12} {:>12} {:>7} {:>9}  {}",
            r.name,
            format!("({},{})", r.bp_bidegree.0, r.bp_bidegree.1),
            format!("({},{})", r.chart_bidegree.0, r.chart_bidegree.1),
            3u64.pow(r.order_exp),
            if r.verified { "yes" } else { "NO" },
            r.candidates.join("; ")
        );
    }
    out
}

pub fn greek_json(rows: &[GreekRow]) -> serde_json::Value {
    json!({
        "schema": JSON_SCHEMA,
        "rows": rows.iter().map(|r| json!({
            "name": r.name,
            "bidegree": [r.bp_bidegree.0, r.bp_bidegree.1],
            "chart_bidegree": [r.chart_bidegree.0, r.chart_bidegree.1],
            "order_exp": r.order_exp,
            "candidates": r.candidates,
            "verified": r.verified,
            "note": r.note,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connecting::{build_block, WindowSpec};
    use crate::spectral::{assemble_e2, AssembleOptions, ExtData};

    #[test]
    fn csv_round_trip() {
        let block = build_block(1, 13, &WindowSpec::with_columns(6)).unwrap();
        let text = block_csv(&block);
        let parsed = matrix_from_csv(&text).unwrap();
        assert_eq!(parsed.rows, block.matrix.rows);
        assert_eq!(parsed.cols, block.matrix.cols);
        for i in 0..parsed.rows {
            for j in 0..parsed.cols {
                assert_eq!(
                    parsed.at(i, j).reduce_mod(4),
                    block.matrix.at(i, j).reduce_mod(4)
                );
            }
        }
        assert_eq!(parsed.row_labels, block.matrix.row_labels);
        assert_eq!(parsed.col_labels, block.matrix.col_labels);
    }

    #[test]
    fn label_parser() {
        for s in [
            "A[5,2]",
            "B[-3,0]",
            "C[1,0]",
            "D[13,4]",
            "j^3",
            "a[-2,2]",
            "1",
            "alpha",
            "Delta^2*alpha",
            "Ext^(2,42)",
        ] {
            let lab = parse_label(s).unwrap();
            assert_eq!(lab.to_string(), s);
        }
        assert!(parse_label("Q[1,2]").is_err());
        assert!(parse_label("a[2,2]").is_err());
    }

    #[test]
    fn chart_cells() {
        let opts = AssembleOptions {
            window: WindowSpec::with_columns(12),
            s_max: 2,
            ext: ExtData::default(),
        };
        let entries = assemble_e2(4, 4, &opts).unwrap();
        let e14 = entries.iter().find(|e| e.s == 1 && e.t == 4).unwrap();
        assert_eq!(entry_cell(e14), "3+3");
        let text = render_chart_text(&entries);
        assert!(text.contains("t=4"));
        assert!(text.contains("3+3"));
        let j = chart_json(&entries, 12);
        assert_eq!(j["schema"], JSON_SCHEMA);
    }
}
