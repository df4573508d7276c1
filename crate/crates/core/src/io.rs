//! JSON configuration files and CSV writers.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::central::{CentralConfiguration, Family};
use crate::error::{NcolError, Result};
use crate::mcgehee::Trajectory;
use crate::nbody::{Alpha, Configuration, MassVector};

/// `{"alpha", "dim", "masses", "positions"}`, plus `b`, `residual` and
/// `family` when written for a central configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub alpha: f64,
    pub dim: usize,
    pub masses: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
}

impl ConfigFile {
    pub fn from_central(cc: &CentralConfiguration) -> Self {
        ConfigFile {
            alpha: cc.alpha.get(),
            dim: cc.dim(),
            masses: cc.masses.as_slice().to_vec(),
            positions: cc.s0.points(),
            b: Some(cc.b),
            residual: Some(cc.residual),
            family: Some(cc.family.as_str().to_string()),
        }
    }

    pub fn parts(&self) -> Result<(Configuration, MassVector, Alpha)> {
        if self.positions.iter().any(|p| p.len() != self.dim) {
            return Err(NcolError::DimensionMismatch(format!("positions must have {} coordinates", self.dim)));
        }
        let x = Configuration::from_points(&self.positions)?;
        let m = MassVector::new(self.masses.clone())?;
        if x.n() != m.len() {
            return Err(NcolError::DimensionMismatch(format!("{} positions but {} masses", x.n(), m.len())));
        }
        Ok((x, m, Alpha::new(self.alpha)?))
    }

    /// Verifies the stored configuration as central at its α.
    pub fn to_central(&self) -> Result<CentralConfiguration> {
        let (x, m, a) = self.parts()?;
        let family = match &self.family {
            Some(f) => f.parse()?,
            None => Family::Numeric,
        };
        CentralConfiguration::verify(x, m, a, family)
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }
}

/// Serialises rows with a header taken from the field names.
pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Header of the trajectory dump for `nd` configuration coordinates.
pub fn trajectory_header(nd: usize) -> Vec<String> {
    let mut h = vec!["tau".to_string(), "rho".into(), "rho_prime".into()];
    h.extend((0..nd).map(|k| format!("s_{k}")));
    h.extend((0..nd).map(|k| format!("s_prime_{k}")));
    h.extend(["U_s", "h", "lambda1", "lambda2"].map(String::from));
    h
}

/// tau, rho, rho_prime, s…, s_prime…, U_s, h, lambda1, lambda2.
pub fn write_trajectory<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let nd = traj.masses.len() * traj.dim;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(trajectory_header(nd))?;
    let mut rec: Vec<String> = Vec::with_capacity(7 + 2 * nd);
    for i in 0..traj.len() {
        rec.clear();
        rec.push(traj.tau[i].to_string());
        rec.push(traj.rho(i).to_string());
        rec.push(traj.rho_prime(i).to_string());
        rec.extend(traj.s_flat(i).iter().map(f64::to_string));
        rec.extend(traj.s_prime_flat(i).iter().map(f64::to_string));
        rec.push((traj.sigma * traj.potential_s(i)).to_string());
        rec.push(traj.energy(i).to_string());
        rec.push(traj.lambda1(i).to_string());
        rec.push(traj.lambda2(i).to_string());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::{collinear3, ngon};
    use crate::spectral::{sweep, SweepFamily};

    #[test]
    fn config_round_trip() {
        let cc = ngon(5, Alpha::new(0.7).unwrap(), 3).unwrap();
        let text = serde_json::to_string(&ConfigFile::from_central(&cc)).unwrap();
        let back = ConfigFile::read(text.as_bytes()).unwrap().to_central().unwrap();
        assert_eq!(back.s0, cc.s0);
        assert_eq!(back.family, cc.family);
        assert!((back.b - cc.b).abs() < 1e-15);
    }

    #[test]
    fn plain_config_fields() {
        let text = r#"{"alpha": 1.0, "dim": 2, "masses": [1, 1, 1],
            "positions": [[-0.7071067811865476, 0], [0, 0], [0.7071067811865476, 0]]}"#;
        let cc = ConfigFile::read(text.as_bytes()).unwrap().to_central().unwrap();
        assert!((cc.b - 3.5355339059327378).abs() < 1e-12);
        let bad = r#"{"alpha": 1.0, "dim": 2, "masses": [1, 1], "positions": [[0, 0], [1]]}"#;
        assert!(ConfigFile::read(bad.as_bytes()).unwrap().parts().is_err());
    }

    #[test]
    fn sweep_header() {
        let rows = sweep(SweepFamily::CollinearEqual, &[1.0]).unwrap();
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("alpha,family,N,lhs,rhs,holds,mu1,margin\n"));
    }

    #[test]
    fn trajectory_columns() {
        use crate::mcgehee::{homothetic_initial, integrate_el, SimOptions};
        let cc = collinear3(1.0, 1.0, Alpha::new(1.0).unwrap()).unwrap();
        let init = homothetic_initial(&cc, 0.0, 1.0).unwrap();
        let traj = integrate_el(&init, &cc.masses, cc.alpha, &SimOptions { tau_max: 1.0, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        write_trajectory(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 3 + 12 + 4);
        assert!(header.ends_with("U_s,h,lambda1,lambda2"));
        assert_eq!(text.lines().count(), traj.len() + 1);
    }
}
