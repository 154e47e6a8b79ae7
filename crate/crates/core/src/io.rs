//! File formats.
//!
//! Operators serialize as row-major nested arrays of `[re, im]` pairs:
//! `[[ [re, im], [re, im] ], [ [re, im], [re, im] ]]`. Systems are
//! `{ "hamiltonian": <op>, "terms": [ { "rate": <f>, "op": <op> } ] }`.
//! All JSON and CSV floats are emitted in scientific notation with 17
//! significant digits, which round-trips `f64` losslessly.

use std::io::{self, Write};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Operator2, C64};
use crate::decompose::PhysicalForm;
use crate::dynamics::{BlochTrajectory, Cusp, EpMap, SpectrumResult};
use crate::gkls::{GklsError, GklsSystem, JumpTerm};

type OpArray = [[[f64; 2]; 2]; 2];

fn to_array(op: &Operator2) -> OpArray {
    let mut out = [[[0.0; 2]; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let z = op.entry(i, j);
            *slot = [z.re, z.im];
        }
    }
    out
}

fn from_array(a: &OpArray) -> Operator2 {
    Operator2::new([
        [
            C64::new(a[0][0][0], a[0][0][1]),
            C64::new(a[0][1][0], a[0][1][1]),
        ],
        [
            C64::new(a[1][0][0], a[1][0][1]),
            C64::new(a[1][1][0], a[1][1][1]),
        ],
    ])
}

impl Serialize for Operator2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        to_array(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(from_array(&OpArray::deserialize(deserializer)?))
    }
}

/// On-disk form of a GKLS system; convert with [`SystemFile::try_into_system`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub hamiltonian: Operator2,
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermFile {
    pub rate: f64,
    pub op: Operator2,
}

impl SystemFile {
    pub fn from_system(sys: &GklsSystem) -> Self {
        SystemFile {
            hamiltonian: *sys.hamiltonian(),
            terms: sys
                .terms()
                .iter()
                .map(|t| TermFile {
                    rate: t.rate,
                    op: t.op,
                })
                .collect(),
        }
    }

    pub fn try_into_system(self) -> Result<GklsSystem, GklsError> {
        let terms = self
            .terms
            .into_iter()
            .map(|t| JumpTerm::new(t.rate, t.op))
            .collect::<Result<Vec<_>, _>>()?;
        GklsSystem::new(self.hamiltonian, terms)
    }
}

pub fn parse_system(json: &str) -> Result<GklsSystem, String> {
    let file: SystemFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    file.try_into_system().map_err(|e| e.to_string())
}

/// `decompose` output.
#[derive(Debug, Serialize)]
pub struct DecomposeOutput {
    pub h_eff: Operator2,
    pub n: Operator2,
    pub d: Option<Operator2>,
    pub gamma_p: f64,
    pub gamma_m: f64,
    pub big_gamma: f64,
    pub roundtrip_residual: f64,
}

impl DecomposeOutput {
    pub fn new(pf: &PhysicalForm, residual: f64) -> Self {
        DecomposeOutput {
            h_eff: pf.h_eff,
            n: pf.n.operator(),
            d: pf.dphase.as_ref().map(|a| a.operator()),
            gamma_p: pf.gamma_p,
            gamma_m: pf.gamma_m,
            big_gamma: pf.big_gamma,
            roundtrip_residual: residual,
        }
    }
}

/// `steady` output; the Gibbs block is present with `--gibbs-fit`.
#[derive(Debug, Serialize)]
pub struct SteadyOutput {
    /// Components `(β, α, λ)` in the decomposition frame `(N, D, i[N, D])`.
    pub r: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

/// `spectrum` output.
#[derive(Debug, Serialize)]
pub struct SpectrumOutput {
    pub eigenvalues: [[f64; 2]; 3],
    pub x: f64,
    pub y: f64,
    pub z: [f64; 2],
    pub discriminant: f64,
    pub ep: &'static str,
}

impl SpectrumOutput {
    pub fn new(s: &SpectrumResult, ep: crate::dynamics::EpClass) -> Self {
        let mut eigenvalues = [[0.0; 2]; 3];
        for (slot, lam) in eigenvalues.iter_mut().zip(&s.eigenvalues) {
            *slot = [lam.re, lam.im];
        }
        SpectrumOutput {
            eigenvalues,
            x: s.x,
            y: s.y,
            z: [s.z.re, s.z.im],
            discriminant: s.discriminant,
            ep: match ep {
                crate::dynamics::EpClass::None => "none",
                crate::dynamics::EpClass::Ep2 => "EP2",
                crate::dynamics::EpClass::Ep3 => "EP3",
            },
        }
    }
}

/// serde_json formatter printing every float as `{:.16e}`.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serialize to JSON with lossless 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn write_trajectory_csv<W: Write>(mut w: W, traj: &BlochTrajectory) -> io::Result<()> {
    writeln!(w, "t,r1,r2,r3")?;
    for (t, r) in traj.times.iter().zip(&traj.states) {
        writeln!(w, "{t:.16e},{:.16e},{:.16e},{:.16e}", r.x, r.y, r.z)?;
    }
    Ok(())
}

pub fn write_epmap_csv<W: Write>(mut w: W, map: &EpMap) -> io::Result<()> {
    writeln!(w, "e_over_gamma,eps_over_gamma,discriminant,region")?;
    for (ie, &e) in map.e_axis.iter().enumerate() {
        for (ieps, &eps) in map.eps_axis.iter().enumerate() {
            let idx = ie * map.eps_axis.len() + ieps;
            writeln!(
                w,
                "{e:.16e},{eps:.16e},{:.16e},{}",
                map.discriminant[idx],
                map.region[idx].name()
            )?;
        }
    }
    Ok(())
}

pub fn write_cusps_csv<W: Write>(mut w: W, cusps: &[Cusp]) -> io::Result<()> {
    writeln!(w, "e_over_gamma,eps_over_gamma,residual")?;
    for c in cusps {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", c.e, c.eps, c.residual)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_json_roundtrip() {
        let op = Operator2::new([
            [C64::new(0.5, -0.25), C64::new(1.0 / 3.0, 0.0)],
            [C64::new(0.0, 1e-17), C64::new(-2.0, 7.0)],
        ]);
        let json = to_json_string(&op).unwrap();
        let back: Operator2 = serde_json::from_str(&json).unwrap();
        assert_eq!(op, back);
    }

    #[test]
    fn system_json_shape() {
        let json = r#"{
            "hamiltonian": [[[0.5,0],[0,0]],[[0,0],[-0.5,0]]],
            "terms": [ { "rate": 2.0, "op": [[[0,0],[1,0]],[[0,0],[0,0]]] } ]
        }"#;
        let sys = parse_system(json).unwrap();
        assert_eq!(sys.terms().len(), 1);
        assert_eq!(sys.terms()[0].rate, 2.0);
        assert!(sys.terms()[0].op.max_abs_diff(&Operator2::SIGMA_PLUS) < 1e-15);
    }

    #[test]
    fn negative_rate_rejected_at_parse() {
        let json = r#"{
            "hamiltonian": [[[0,0],[0,0]],[[0,0],[0,0]]],
            "terms": [ { "rate": -1.0, "op": [[[0,0],[1,0]],[[0,0],[0,0]]] } ]
        }"#;
        assert!(parse_system(json).is_err());
    }

    #[test]
    fn sci_formatter_is_lossless() {
        #[derive(Serialize)]
        struct V {
            x: f64,
        }
        for x in [
            std::f64::consts::PI,
            1.0,
            -0.1,
            1e-300,
            123_456_789.123_456_78,
        ] {
            let json = to_json_string(&V { x }).unwrap();
            let back: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(back["x"].as_f64().unwrap(), x);
        }
    }
}
