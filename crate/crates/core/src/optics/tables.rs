//! CSV angle tables: preparation angles per state and HWP5/HWP6 angles per
//! measurement setting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::apparatus::ApparatusConfig;
use super::measurement::{solve_measurement_angles, MeasurementSetting};
use super::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationRow {
    pub state: String,
    pub hwp0_deg: f64,
    pub hwp1_deg: f64,
    pub hwp2_deg: f64,
    pub phase_randomization: bool,
}

impl PreparationRow {
    pub fn new(state: impl Into<String>, config: &ApparatusConfig) -> Self {
        Self {
            state: state.into(),
            hwp0_deg: config.hwp0.theta_deg,
            hwp1_deg: config.hwp1.theta_deg,
            hwp2_deg: config.hwp2.theta_deg,
            phase_randomization: config.phase_randomization,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub setting: String,
    pub hwp5_deg: f64,
    pub hwp6_deg: f64,
    pub d1: String,
    pub d2: String,
    pub d3: String,
    pub relabeling: String,
}

pub fn measurement_rows(settings: &[MeasurementSetting]) -> Result<Vec<MeasurementRow>> {
    settings
        .iter()
        .map(|s| {
            let (t5, t6) = solve_measurement_angles(s)?;
            Ok(MeasurementRow {
                setting: s.name.clone(),
                hwp5_deg: t5,
                hwp6_deg: t6,
                d1: s.ray_at(0).to_string(),
                d2: s.ray_at(1).to_string(),
                d3: s.ray_at(2).to_string(),
                relabeling: s.relabeling.map(|x| x.to_string()).unwrap_or_default(),
            })
        })
        .collect()
}

pub fn write_csv<W: Write, R: Serialize>(
    out: W,
    rows: &[R],
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{measurement_settings, prepare_mixed, MixedPreset};

    #[test]
    fn measurement_table_layout() {
        let rows = measurement_rows(&measurement_settings()).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "setting,hwp5_deg,hwp6_deg,d1,d2,d3,relabeling"
        );
        assert_eq!(
            lines.next().unwrap(),
            "Z,0.0,0.0,\"z1=(1,0,0)\",\"z2=(0,1,0)\",\"z3=(0,0,1)\","
        );
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn preparation_row() {
        let row = PreparationRow::new("rho8", &prepare_mixed(MixedPreset::Rho8));
        assert_eq!(
            (row.hwp0_deg, row.hwp1_deg, row.hwp2_deg),
            (22.5, 0.0, 45.0)
        );
    }
}
