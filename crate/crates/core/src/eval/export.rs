use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::EvalError;
use crate::scenario::{EpisodeResult, TrajectoryRecord};

/// Write `episode_{seed}.ndjson` (full substep states) and
/// `relative_{seed}.csv` (pursuer minus evader) per result. Returns the paths.
pub fn export_trajectories(results: &[EpisodeResult], dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for r in results {
        let seed = r.summary.seed;
        let path = dir.join(format!("episode_{seed}.ndjson"));
        let mut out = BufWriter::new(File::create(&path)?);
        for rec in &r.trajectory {
            serde_json::to_writer(&mut out, rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        written.push(path);

        let path = dir.join(format!("relative_{seed}.csv"));
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "t,dx,dy,dz,dvx,dvy,dvz,range,range_rate")?;
        for rec in &r.trajectory {
            let d = rec.pursuer.pos - rec.evader.pos;
            let dv = rec.pursuer.vel - rec.evader.vel;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                rec.t, d.x, d.y, d.z, dv.x, dv.y, dv.z, rec.range, rec.range_rate
            )?;
        }
        out.flush()?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryRecord>, EvalError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Range-versus-time plot of labelled trajectories as a standalone SVG.
pub fn render_range_plot(series: &[(String, Vec<TrajectoryRecord>)]) -> String {
    let (w, h) = (800.0, 480.0);
    let (left, right, top, bottom) = (70.0, 160.0, 20.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let points = series.iter().flat_map(|(_, s)| s.iter());
    let t_max = points.clone().map(|r| r.t).fold(0.0, f64::max).max(1e-9);
    let r_max = points.map(|r| r.range).fold(0.0, f64::max).max(1e-9);
    let x = |t: f64| left + t / t_max * pw;
    let y = |r: f64| top + ph - r / r_max * ph;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{left} {top} V{} H{}" fill="none" stroke="black"/>"#,
        top + ph,
        left + pw
    );
    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{:.0}</text>"#,
            x(f * t_max),
            top + ph + 16.0,
            f * t_max
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{:.0}</text>"#,
            left - 6.0,
            y(f * r_max) + 4.0,
            f * r_max
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">time (s)</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">range (m)</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, (label, recs)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (j, r) in recs.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if j == 0 { "M" } else { " L" }, x(r.t), y(r.range));
        }
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.2"/>"#);
        let ly = top + 14.0 + i as f64 * 16.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{color}">{}</text>"#,
            left + pw + 12.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::navball::NavballPilot;
    use crate::scenario::{run_episode, EpisodeConfig};

    #[test]
    fn files_round_trip_and_plot() {
        let cfg = EpisodeConfig { max_duration: 3.0, ..EpisodeConfig::with_seed(8) };
        let result = run_episode(cfg, &mut NavballPilot::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = export_trajectories(std::slice::from_ref(&result), dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        let back = read_trajectory(&files[0]).unwrap();
        assert_eq!(back, result.trajectory);
        let csv = std::fs::read_to_string(&files[1]).unwrap();
        assert_eq!(csv.lines().count(), 1 + result.trajectory.len());

        let svg = render_range_plot(&[("seed <8>".into(), back)]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("seed &lt;8&gt;"));
    }
}
