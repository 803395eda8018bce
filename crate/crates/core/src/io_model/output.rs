use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! catalog {
    ($($variant:ident => $name:literal, $columns:literal;)*) => {
        /// Every column-format file the workflow can emit.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum OutputKey {
            $($variant,)*
        }

        impl OutputKey {
            pub const ALL: &'static [OutputKey] = &[$(OutputKey::$variant,)*];

            /// File name inside the output directory.
            pub fn file_name(self) -> &'static str {
                match self {
                    $(OutputKey::$variant => $name,)*
                }
            }

            /// Column legend written as the first line of a non-empty file.
            pub fn columns(self) -> &'static str {
                match self {
                    $(OutputKey::$variant => $columns,)*
                }
            }
        }
    };
}

catalog! {
    DcsPole => "dcs.pole", "E[meV] ReJ ImJ";
    DcsZero => "dcs.zero", "E[meV] ReJ ImJ";
    DcsTraj => "dcs.traj", "E[meV] ReJ ImJ";
    DcsResid => "dcs.resid", "E[meV] Re(Res) Im(Res)";
    DcsXdcs => "dcs.xdcs", "theta_R[deg] DCS[A^2]";
    DcsNfdcs => "dcs.nfdcs", "theta_R[deg] |f_NS|^2[A^2] |f_FS|^2[A^2] |f_NS+f_FS|^2[A^2]";
    DcsDcs3d => "dcs.dcs3d", "E[meV] theta_R[deg] DCS[A^2]";
    DcsProb3d => "dcs.prob3d", "E[meV] J |S_Pade|^2";
    DcsPh3d => "dcs.ph3d", "E[meV] J theta_R[rad]";
    DcsF3d => "dcs.f3d", "E[meV] phi[rad] |f~|";
    DcsG3d => "dcs.g3d", "E[meV] phi[rad] |g~|";
    Phase => "phase", "J theta_R[rad] Theta[rad]";
    Funf => "funf", "phi[rad] |f~| Re(f~)";
    Gunf => "gunf", "phi[rad] |g~| Re(g~)";
    Smprod => "smprod", "J |S_Pade| Re(S_Pade)";
    Inputvals => "inputvals", "J |S^J| Re(S^J)";
    DcsNsind => "dcs.nsind", "E[meV] |f_NS(M)|^np[A^np] for each M";
    DcsFsind => "dcs.fsind", "E[meV] |f_FS(M)|^np[A^np] for each M";
    DcsSw => "dcs.sw", "E[meV] |f(theta_R)|^np |sum_M f_NS(M)+f_FS(M)|^np [A^np]";
    DcsFwind => "dcs.fwind", "E[meV] |f_FW(M)|^np[A^np] for each M";
    DcsFw => "dcs.fw", "E[meV] |f(0)|^np |sum_M f_FW(M)|^np [A^np]";
    DcsBwind => "dcs.bwind", "E[meV] |f_BW(M)|^np[A^np] for each M";
    DcsBw => "dcs.bw", "E[meV] |f(pi)|^np |sum_M f_BW(M)|^np [A^np]";
    DcsSwtind => "dcs.swtind", "E[meV] |f_SW_tail|^np |f_SW_tail(K)|^np for K = 1..nr-1 [A^np]";
    DcsFwtind => "dcs.fwtind", "E[meV] |f_FW_tail|^np |f_FW_tail(M)|^np for M = 0.. [A^np]";
    DcsBwtind => "dcs.bwtind", "E[meV] |f_BW_tail|^np |f_BW_tail(M)|^np for M = 1.. [A^np]";
    DcsSwsm => "dcs.swsm", "E[meV] |sum_n f_SW_tail|^np |f(theta_R) - sum_n f_SW_tail|^np [A^np]";
    DcsFwsm => "dcs.fwsm", "E[meV] |sum_n f_FW_tail|^np |f(0) - sum_n f_FW_tail|^np [A^np]";
    DcsBwsm => "dcs.bwsm", "E[meV] |sum_n f_BW_tail|^np |f(pi) - sum_n f_BW_tail|^np [A^np]";
    Smof => "smof", "phi[rad] |f~ - chi(phi-pi) sum_n f~_tail|^np";
    Smog => "smog", "phi[rad] |g~ - chi(phi-pi) sum_n g~_tail|^np";
}

impl OutputKey {
    pub fn from_file_name(name: &str) -> Option<OutputKey> {
        OutputKey::ALL.iter().copied().find(|k| k.file_name() == name)
    }
}

/// Write whitespace-separated rows under `dir`. A non-empty file starts
/// with a `#` legend line; an empty record list gives an empty file.
pub fn write_column_file(dir: &Path, key: OutputKey, rows: &[Vec<f64>]) -> Result<PathBuf> {
    if let Some(first) = rows.first() {
        if let Some(bad) = rows.iter().position(|r| r.len() != first.len()) {
            return Err(Error::Validation(format!(
                "{}: row {bad} has {} columns, expected {}",
                key.file_name(),
                rows[bad].len(),
                first.len()
            )));
        }
    }
    let mut text = String::new();
    if !rows.is_empty() {
        let _ = writeln!(text, "# {}", key.columns());
    }
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                text.push_str("  ");
            }
            first = false;
            let _ = write!(text, "{v:.16e}");
        }
        text.push('\n');
    }
    let path = dir.join(key.file_name());
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
