//! CSV encodings of simulation and model outputs (RFC 4180, UTF-8).

use std::io::Write;

use crate::error::Result;
use crate::master::EnsembleCurve;
use crate::sim::{DiffusionCurve, EncounterEvent, TrajectoryRow};

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(w)
}

/// `t,a,b,kind` with `t` in seconds to 3 decimals.
pub fn write_encounters<W: Write>(w: W, events: &[EncounterEvent]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "a", "b", "kind"])?;
    for e in events {
        out.write_record([
            format!("{:.3}", e.t),
            e.a.to_string(),
            e.b.to_string(),
            e.kind.as_str().into(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `msg_id,t,informed` for every sample of every curve.
pub fn write_curves<W: Write>(w: W, curves: &[DiffusionCurve]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["msg_id", "t", "informed"])?;
    for c in curves {
        for s in &c.samples {
            out.write_record([
                c.msg_id.to_string(),
                format!("{:.3}", s.t),
                s.informed.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `t,robot,x,y,heading`.
pub fn write_trajectory<W: Write>(w: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "robot", "x", "y", "heading"])?;
    for r in rows {
        out.write_record([
            format!("{:.3}", r.t),
            r.robot.to_string(),
            format!("{:.6}", r.x),
            format!("{:.6}", r.y),
            format!("{:.6}", r.heading),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `t,I_model`.
pub fn write_model_curve<W: Write>(w: W, t: &[f64], values: &[f64]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "I_model"])?;
    for (t, v) in t.iter().zip(values) {
        out.write_record([format!("{t:.3}"), format!("{v:.9}")])?;
    }
    out.flush()?;
    Ok(())
}

/// `t,mean_I,stderr`.
pub fn write_ensemble<W: Write>(w: W, e: &EnsembleCurve) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "mean_I", "stderr"])?;
    for ((t, m), s) in e.t.iter().zip(&e.mean).zip(&e.stderr) {
        out.write_record([format!("{t:.6}"), format!("{m:.9}"), format!("{s:.9}")])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{CurveSample, EdgeKind};

    #[test]
    fn encounter_lines() {
        let mut buf = Vec::new();
        let ev = [EncounterEvent {
            t: 12.0,
            a: 1,
            b: 4,
            kind: EdgeKind::Rising,
        }];
        write_encounters(&mut buf, &ev).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,a,b,kind\r\n12.000,1,4,rising\r\n"
        );
    }

    #[test]
    fn curve_lines() {
        let mut buf = Vec::new();
        let c = DiffusionCurve {
            msg_id: 2,
            t0: 7200.0,
            t_end: 9000.0,
            robots: 3,
            samples: vec![
                CurveSample {
                    t: 7200.0,
                    informed: 1,
                },
                CurveSample {
                    t: 7305.5,
                    informed: 2,
                },
            ],
        };
        write_curves(&mut buf, &[c]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "msg_id,t,informed\r\n2,7200.000,1\r\n2,7305.500,2\r\n"
        );
    }
}
