//! File formats shared with the command-line front end. Complex numbers are `[re, im]`
//! pairs in JSON; CSV floats use the shortest round-trip decimal form.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{certify_filtration, Filtration, HenonSystem, PlaneMap, Point2};
use crate::error::{Error, Result};
use crate::potential::{green_plus, phi_plus};
use crate::rays::RayTrace;
use crate::solenoid::SolenoidWindow;

/// `{"factors": [{"coeffs": [...], "b": [re, im]}], "R": optional}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub factors: HenonSystem,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl SystemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("system file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system files always serialize")
    }

    /// The system with a certified filtration: the given `R` if present, else a searched one.
    pub fn load(&self) -> Result<(HenonSystem, Filtration)> {
        let filt = match self.r {
            Some(r) => certify_filtration(&self.factors, r)?,
            None => Filtration::for_system(&self.factors)?,
        };
        Ok((self.factors.clone(), filt))
    }
}

pub fn window_to_json(w: &SolenoidWindow) -> String {
    serde_json::to_string(w).expect("windows always serialize")
}

/// Parse a window and check its length against `T`.
pub fn window_from_json(text: &str) -> Result<SolenoidWindow> {
    let w: SolenoidWindow = serde_json::from_str(text).map_err(|e| Error::Format(format!("window: {e}")))?;
    SolenoidWindow::new(w.d, w.t, w.entries)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub const RAY_1D_HEADER: [&str; 4] = ["g", "theta", "z_re", "z_im"];
pub const RAY_LEAF_HEADER: [&str; 8] = ["g", "theta0", "leaf_re", "leaf_im", "x_re", "x_im", "y_re", "y_im"];
pub const GREEN_HEADER: [&str; 7] = ["x_re", "x_im", "y_re", "y_im", "g", "phi_re", "phi_im"];

/// One row per sample; leaf traces (with images) use the leaf layout.
pub fn write_ray_csv<W: Write>(out: W, trace: &RayTrace) -> Result<()> {
    let theta = trace.angle.turns();
    let leaf = trace.samples.first().is_some_and(|s| s.image.is_some());
    if leaf {
        write_rows(
            out,
            &RAY_LEAF_HEADER,
            trace.samples.iter().map(|s| {
                let p = s.image.unwrap_or_default();
                vec![s.g, theta, s.z.re, s.z.im, p.x.re, p.x.im, p.y.re, p.y.im]
            }),
        )
    } else {
        write_rows(out, &RAY_1D_HEADER, trace.samples.iter().map(|s| vec![s.g, theta, s.z.re, s.z.im]))
    }
}

/// `(x, G⁺, φ⁺)` rows for points of `V⁺`; other points get `NaN` for `φ⁺`.
pub fn write_green_csv<W: Write>(out: W, sys: &HenonSystem, filt: &Filtration, points: &[Point2], tol: f64) -> Result<()> {
    let rows = points.iter().map(|&p| {
        let g = green_plus(sys, filt, p, tol, 10_000).value;
        let phi = if sys.is_monic() { phi_plus(sys, filt, p, tol).ok().map(|v| v.value) } else { None };
        let phi = phi.unwrap_or(C64::new(f64::NAN, f64::NAN));
        vec![p.x.re, p.x.im, p.y.re, p.y.im, g, phi.re, phi.im]
    });
    write_rows(out, &GREEN_HEADER, rows)
}

/// Header and numeric rows of a CSV dump.
pub fn read_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::Format(format!("csv field {f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Polynomial;
    use crate::rays::{trace_ray_1d, ExternalAngle, RayOptions};

    #[test]
    fn system_file_round_trip() {
        let text = r#"{"factors":[{"coeffs":[[0,0],[0,0],[1,0]],"b":[0.3,0]}],"R":2.0}"#;
        let f = SystemFile::from_json(text).unwrap();
        let (sys, filt) = f.load().unwrap();
        assert_eq!(sys.degree(), 2);
        assert_eq!(filt.r, 2.0);
        assert_eq!(SystemFile::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn corrupt_system_is_rejected() {
        assert!(SystemFile::from_json(r#"{"factors":[{"coeffs":[[1,0]],"b":[0.3,0]}]}"#).is_err());
        assert!(SystemFile::from_json(r#"{"factors":[{"coeffs":[[0,0],[0,0],[1,0]],"b":[0,0]}]}"#).is_err());
    }

    #[test]
    fn window_round_trip() {
        let w = SolenoidWindow::from_center(2, 6, C64::new(1.5, 0.5));
        let back = window_from_json(&window_to_json(&w)).unwrap();
        assert_eq!(back, w);
        assert!(window_to_json(&w).starts_with(r#"{"d":2,"T":6,"entries":[["#));
        assert!(window_from_json(r#"{"d":2,"T":1,"entries":[[1,0]]}"#).is_err());
    }

    #[test]
    fn ray_csv_round_trip() {
        let p = Polynomial::quadratic(-1.0);
        let t = trace_ray_1d(&p, &ExternalAngle::rational(1, 3), &RayOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_ray_csv(&mut buf, &t).unwrap();
        let (header, rows) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(header, RAY_1D_HEADER);
        assert_eq!(rows.len(), t.samples.len());
        assert!(rows.windows(2).all(|w| w[1][0] < w[0][0]));
        assert_eq!(rows[3][2], t.samples[3].z.re);
    }
}
