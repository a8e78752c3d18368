//! CSV, LaTeX and plain-text renderings of character tables.

use std::fmt::Write as _;

use num_complex::Complex64;

use schemeforge_core::chartab::{CharacterTable, GroupCharacterTable};

/// Imaginary parts below this are not printed.
pub const IMAG_CUTOFF: f64 = 1e-12;

fn real(x: f64) -> String {
    // avoid "-0"
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

/// `a+bi`, `a-bi`, or just `a` when `|b| < 1e-12`; full precision.
pub fn complex(z: Complex64) -> String {
    if z.im.abs() < IMAG_CUTOFF {
        real(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", real(z.re), -z.im)
    } else {
        format!("{}+{}i", real(z.re), z.im)
    }
}

/// Rounded for reading: six decimals, trailing zeros dropped.
fn short_real(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn short(z: Complex64) -> String {
    let re = short_real(z.re);
    let im = short_real(z.im.abs());
    if im == "0" {
        re
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        let re = if re == "0" { String::new() } else { re };
        let im = if im == "1" { String::new() } else { im };
        if re.is_empty() && sign == '+' {
            format!("{im}i")
        } else {
            format!("{re}{sign}{im}i")
        }
    }
}

/// One row per eigenspace, then the multiplicity: `p_0(i),…,p_d(i),m_i`.
/// The header names the columns.
pub fn table_csv(t: &CharacterTable) -> String {
    let mut out = String::new();
    let cols: Vec<String> = (0..=t.d).map(|j| format!("p{j}")).collect();
    let _ = writeln!(out, "{},m", cols.join(","));
    for (row, m) in t.p.iter().zip(&t.multiplicities) {
        let cells: Vec<String> = row.iter().map(|&z| complex(z)).collect();
        let _ = writeln!(out, "{},{}", cells.join(","), real(*m));
    }
    out
}

fn latex_entry(z: Complex64) -> String {
    short(z).replace('i', "\\mathrm{i}")
}

/// An `array` environment with the multiplicities in a separated last
/// column.
pub fn table_latex(t: &CharacterTable, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% seed=0x{seed:X} n={} d={}", t.n, t.d);
    let _ = writeln!(out, "\\begin{{array}}{{{}|c}}", "c".repeat(t.d + 1));
    for (row, m) in t.p.iter().zip(&t.multiplicities) {
        let cells: Vec<String> = row.iter().map(|&z| latex_entry(z)).collect();
        let _ = writeln!(out, "{} & {} \\\\", cells.join(" & "), short_real(*m));
    }
    out.push_str("\\end{array}\n");
    out
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let width: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().enumerate().map(|(j, s)| format!("{s:>w$}", w = width[j])).collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

/// Valency row first, one row per eigenspace, multiplicities on the right.
pub fn table_text(t: &CharacterTable, seed: u64) -> String {
    let mut rows = vec![];
    let mut head: Vec<String> = (0..=t.d).map(|j| format!("A{j}")).collect();
    head.push("m".into());
    rows.push(head);
    for (row, m) in t.p.iter().zip(&t.multiplicities) {
        let mut cells: Vec<String> = row.iter().map(|&z| short(z)).collect();
        cells.push(short_real(*m));
        rows.push(cells);
    }
    format!("# seed=0x{seed:X} n={} d={}\n{}", t.n, t.d, aligned(&rows))
}

/// Group characters: one row per irreducible, class sizes on top.
pub fn group_table_text(g: &GroupCharacterTable, seed: u64) -> String {
    let mut rows = vec![];
    let mut head = vec!["|C|".to_string()];
    head.extend(g.class_sizes.iter().map(u64::to_string));
    rows.push(head);
    for (row, f) in g.t.iter().zip(&g.degrees) {
        let mut cells = vec![format!("f={f}")];
        cells.extend(row.iter().map(|&z| short(z)));
        rows.push(cells);
    }
    format!("# seed=0x{seed:X} |G|={}\n{}", g.group_order(), aligned(&rows))
}

pub fn group_table_csv(g: &GroupCharacterTable) -> String {
    let mut out = String::new();
    let sizes: Vec<String> = g.class_sizes.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "degree,{}", sizes.join(","));
    for (row, f) in g.t.iter().zip(&g.degrees) {
        let cells: Vec<String> = row.iter().map(|&z| complex(z)).collect();
        let _ = writeln!(out, "{f},{}", cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use schemeforge_core::chartab::closed_form_mstar;

    #[test]
    fn complex_formatting() {
        assert_eq!(complex(Complex64::new(1.5, 0.0)), "1.5");
        assert_eq!(complex(Complex64::new(-0.5, 1e-13)), "-0.5");
        assert_eq!(complex(Complex64::new(-0.5, 0.25)), "-0.5+0.25i");
        assert_eq!(complex(Complex64::new(2.0, -3.0)), "2-3i");
        assert_eq!(complex(Complex64::new(-0.0, 0.0)), "0");
    }

    #[test]
    fn short_forms() {
        assert_eq!(short(Complex64::new(0.0, 1.0)), "i");
        assert_eq!(short(Complex64::new(0.0, -1.0)), "-i");
        assert_eq!(short(Complex64::new(-0.5, 0.8660254037844386)), "-0.5+0.866025i");
        assert_eq!(short(Complex64::new(-4.0000000000001, 0.0)), "-4");
    }

    #[test]
    fn mstar2_layouts() {
        let t = closed_form_mstar(2).unwrap();
        let c = |x: f64| Complex64::new(x, 0.0);
        let exact = CharacterTable {
            d: 2,
            n: 120,
            p: vec![vec![c(1.0), c(63.0), c(56.0)], vec![c(1.0), c(3.0), c(-4.0)], vec![c(1.0), c(-9.0), c(8.0)]],
            valencies: vec![1, 63, 56],
            multiplicities: vec![1.0, 84.0, 35.0],
        };
        assert_eq!(table_csv(&exact), "p0,p1,p2,m\n1,63,56,1\n1,3,-4,84\n1,-9,8,35\n");
        let text = table_text(&t, 0xA55C);
        assert_eq!(text, "# seed=0xA55C n=120 d=2\nA0  A1  A2   m\n 1  63  56   1\n 1   3  -4  84\n 1  -9   8  35\n");
        let tex = table_latex(&t, 1);
        assert!(tex.contains("\\begin{array}{ccc|c}\n1 & 63 & 56 & 1 \\\\\n"));
    }
}
