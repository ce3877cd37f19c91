//! Human-readable and CSV renderings of the reports.

use std::fmt::Write;

use periodica::report::{InvertReport, PeriodReport, PolygonReport, SelftestReport, VerifyReport};
use periodica::scalar::format_significant;

const DIGITS: usize = 6;

fn sig(x: f64) -> String {
    format_significant(x, DIGITS)
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| sig(x)).collect::<Vec<_>>().join(", ")
}

fn matrix<T>(out: &mut String, name: &str, rows: &[Vec<T>], cell: impl Fn(&T) -> String) {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(&cell).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let _ = writeln!(out, "{name} =");
    for r in &cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "  [ {} ]", line.join("  "));
    }
}

pub fn period(r: &PeriodReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "genus {}   a = [{}]   precision {}",
        r.genus,
        list(&r.a),
        r.precision
    );
    s.push('\n');
    matrix(&mut s, "Pi0", &r.pi0, |&x| sig(x));
    matrix(&mut s, "M", &r.m, i64::to_string);
    matrix(&mut s, "N", &r.n, i64::to_string);
    matrix(&mut s, "Y (Pi = iY)", &r.pi_im, |&x| sig(x));
    s.push('\n');
    let res = &r.residuals;
    let _ = writeln!(s, "residuals");
    let _ = writeln!(s, "  symmetry           {}", sci(res.symmetry));
    let _ = writeln!(s, "  |det Y - 1|        {}", sci(res.det_minus_one));
    let _ = writeln!(
        s,
        "  Im Y > 0           {}",
        if res.cholesky_ok { "yes" } else { "no" }
    );
    let _ = writeln!(s, "  square condition   {}", sci(res.square_condition));
    let _ = writeln!(s, "  lemma consistency  {}", sci(res.lemma_consistency));
    if let Some(d) = res.closed_form_delta {
        let _ = writeln!(s, "  closed form delta  {}", sci(d));
    }
    let _ = writeln!(
        s,
        "nodes {}   condition {}",
        r.nodes_total,
        sci(r.condition)
    );
    s
}

pub fn verify(r: &VerifyReport) -> String {
    let mut s = period(&r.period);
    if let Some(id) = r.genus2_identity {
        let _ = writeln!(s, "pr - ps - qr identity {}", sci(id));
    }
    s.push('\n');
    for g in &r.gates {
        let mark = if g.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(
            s,
            "  {mark} {:<18} {} <= {}",
            g.name,
            sci(g.value),
            sci(g.limit)
        );
    }
    let _ = writeln!(
        s,
        "{}",
        if r.passed {
            "all gates passed"
        } else {
            "gate failure"
        }
    );
    s
}

pub fn verify_csv(r: &VerifyReport) -> String {
    let mut s = String::from("gate,value,limit,passed\n");
    for g in &r.gates {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{}",
            g.name, g.value, g.limit, g.passed
        );
    }
    s
}

pub fn polygon(r: &PolygonReport) -> String {
    let l = &r.layout;
    let mut s = String::new();
    let _ = writeln!(s, "genus {}   a = [{}]", r.genus, list(&r.a));
    let _ = writeln!(s, "I = [{}]", list(&l.lengths));
    let _ = writeln!(
        s,
        "P0 square: {} (residual {})",
        if l.square { "yes" } else { "no" },
        sci(l.square_residual)
    );
    s.push('\n');
    let _ = writeln!(
        s,
        "  {:<6} {:>12} {:>12} {:>12} {:>12}",
        "rect", "x", "y", "width", "height"
    );
    for rect in &l.rects {
        let _ = writeln!(
            s,
            "  {:<6} {:>12} {:>12} {:>12} {:>12}",
            rect.label,
            sig(rect.x),
            sig(rect.y),
            sig(rect.width),
            sig(rect.height)
        );
    }
    let _ = writeln!(s, "\n{} side identifications", l.identifications.len());
    s
}

pub fn polygon_csv(r: &PolygonReport) -> String {
    let mut s = String::from("label,x,y,width,height\n");
    for rect in &r.layout.rects {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e}",
            rect.label, rect.x, rect.y, rect.width, rect.height
        );
    }
    s
}

pub fn invert(r: &InvertReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "genus {}   target rho = [{}]", r.genus, list(&r.rho));
    let _ = writeln!(s, "a            = [{}]", list(&r.a));
    let _ = writeln!(s, "achieved rho = [{}]", list(&r.rho_achieved));
    let _ = writeln!(
        s,
        "residual {} after {} iterations",
        sci(r.residual),
        r.iterations
    );
    s
}

pub fn invert_csv(r: &InvertReport) -> String {
    let mut s = String::from("k,a,rho_target,rho_achieved\n");
    for (k, ((a, t), got)) in r.a.iter().zip(&r.rho).zip(&r.rho_achieved).enumerate() {
        let _ = writeln!(s, "{},{a:.16e},{t:.16e},{got:.16e}", k + 1);
    }
    s
}

pub fn selftest(r: &SelftestReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "calibration ({} precision)", r.precision);
    for c in &r.calibration {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(
            s,
            "  {mark} {:<10} error {}  nodes {}",
            c.name,
            sci(c.error),
            c.nodes
        );
    }
    let _ = writeln!(s, "integer identities");
    for id in &r.identities {
        let mark = if id.passed() { "ok  " } else { "FAIL" };
        let _ = writeln!(s, "  {mark} genus {}", id.genus);
    }
    let _ = writeln!(
        s,
        "{}",
        if r.passed {
            "selftest passed"
        } else {
            "selftest failed"
        }
    );
    s
}

pub fn selftest_csv(r: &SelftestReport) -> String {
    let mut s = String::from("check,value,passed\n");
    for c in &r.calibration {
        let _ = writeln!(s, "calibration:{},{:.16e},{}", c.name, c.error, c.passed);
    }
    for id in &r.identities {
        let _ = writeln!(
            s,
            "identities:g{},{},{}",
            id.genus,
            u8::from(id.passed()),
            id.passed()
        );
    }
    s
}
