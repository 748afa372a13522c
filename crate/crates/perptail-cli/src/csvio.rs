//! CSV emission and atomic file writes.
//!
//! Every CSV starts with a `# spec: {...}` reproducibility header carrying
//! the resolved experiment configuration, followed by a `# generated:`
//! timestamp comment (excluded from reproducibility comparisons), then the
//! schema row. Values use scientific notation with 6 significant digits.

use perptail_core::mc::PerN;
use perptail_core::mv::MvTailPoint;
use perptail_core::TailCurve;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// 6 significant digits, scientific.
fn sci(v: f64) -> String {
    format!("{v:.5e}")
}

pub fn curve_csv(curve: &TailCurve, spec_json: &str) -> String {
    let mut out = header(spec_json);
    out.push_str("log_x,leading,normal_approx,tilted_exact,ratio_normal,ratio_tilted\n");
    for i in 0..curve.log_x.len() {
        let leading = curve.leading[i];
        let normal = curve.normal_approx[i];
        let tilted = curve.tilted_exact.as_ref().map(|t| t[i]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sci(curve.log_x[i]),
            sci(leading),
            sci(normal),
            tilted.map(sci).unwrap_or_default(),
            sci(normal / leading),
            tilted.map(|t| sci(t / leading)).unwrap_or_default(),
        );
    }
    out
}

pub fn per_n_csv(rows: &[PerN], spec_json: &str) -> String {
    let mut out = header(spec_json);
    out.push_str("n,value,std_error,n_samples\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, sci(r.value), sci(r.std_error), r.n_samples);
    }
    out
}

pub fn mv_tail_csv(points: &[MvTailPoint], spec_json: &str) -> String {
    let mut out = header(spec_json);
    out.push_str("log_x,p_u,p_u_se,p_uv,p_uv_se,ratio,ratio_se,hits_u,hits_uv,feasible\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            sci(p.log_x),
            sci(p.p_u),
            sci(p.p_u_se),
            sci(p.p_uv),
            sci(p.p_uv_se),
            sci(p.ratio),
            sci(p.ratio_se),
            p.hits_u,
            p.hits_uv,
            p.feasible
        );
    }
    out
}

/// Generic small table with the standard reproducibility header.
pub fn table_csv(spec_json: &str, schema: &str, rows: &[String]) -> String {
    let mut out = header(spec_json);
    out.push_str(schema);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    out
}

fn header(spec_json: &str) -> String {
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# spec: {spec_json}\n# generated: unix:{ts}\n")
}

/// Write via a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
            std::process::id()
        )),
        None => std::path::PathBuf::from(format!(".out.tmp-{}", std::process::id())),
    };
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Strip comment lines, for reproducibility comparisons modulo timestamps.
pub fn strip_comments(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}
