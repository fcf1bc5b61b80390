//! Tabulated data behind the figures: Choi spectra, decoherence rates,
//! measures versus `alpha`, and MUB trace distances.
//!
//! Rows are computed in parallel and collected in grid order, and numbers
//! are printed with 17 significant digits, so output is byte-identical
//! across runs of the same config.

use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::config::{Command, MeasureKind, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::measures::{
    blp_measure, blp_trace_distance, blp_trace_distance_oracle, decoherence_rate,
    gamma_normalized, hcla_measure, sigma_rate,
};
use crate::mubs::mub_family;
use crate::reps::{intermediate_choi, intermediate_eigs, rhp_integral, IntermediateSpec, RhpQuadrature};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Flag(b) => (if *b { "1" } else { "0" }).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_flag(&self) -> Option<bool> {
        match self {
            Cell::Flag(b) => Some(*b),
            _ => None,
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        // fold -0 into 0
        return format!("{:.16e}", 0.0);
    }
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of a column; non-numeric cells become `None`.
    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].as_num()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::Config(format!("CSV encoding failed: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let body = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        let body = String::from_utf8(body).map_err(|e| Error::Config(e.to_string()))?;
        Ok(format!("# {}\n{body}", self.meta))
    }

    /// Right-aligned columns for reading in a terminal.
    pub fn to_pretty(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Cell::Num(x) => format!("{x:.9}"),
                        other => other.render(),
                    })
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain(std::iter::once(self.header[i].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |vals: &[String]| -> String {
            vals.iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = format!("# {}\n{}\n", self.meta, line(&self.header));
        for r in &cells {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Table => Ok(self.to_pretty()),
        }
    }
}

fn params(cfg: &RunConfig) -> Result<ChannelParams> {
    ChannelParams::new(cfg.d, cfg.alpha)
}

/// Intermediate-map eigenvalues along `p_star`:
/// `lambda_0 = 1 + (d-1) R` and `lambda_1 .. lambda_{d-1} = 1 - R`, plus
/// the worst deviation of the numerical Choi spectrum from the full analytic one.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Table> {
    let pr = params(cfg)?;
    if cfg.grid.start < cfg.p_base {
        return Err(Error::Config(format!(
            "spectrum grid must start at or above p_base = {}",
            cfg.p_base
        )));
    }
    let d = cfg.d;
    let mut header = vec!["p_star".to_string()];
    header.extend((0..d).map(|i| format!("lambda_{i}")));
    header.extend(["oracle_max_dev", "cp", "singular_base"].map(String::from));
    let rows = cfg
        .grid
        .points()
        .par_iter()
        .map(|&ps| -> Result<Vec<Cell>> {
            let spec = IntermediateSpec::new(pr, cfg.p_base, ps)?;
            let mut row = vec![Cell::Num(ps)];
            match spec.ratio() {
                Ok(r) => {
                    let df = d as f64;
                    row.push(Cell::Num(1.0 + (df - 1.0) * r));
                    row.extend((1..d).map(|_| Cell::Num(1.0 - r)));
                    let analytic: Spectrum = intermediate_eigs(&spec)?;
                    let numeric = intermediate_choi(&spec)?.spectrum()?;
                    row.push(Cell::Num(analytic.max_deviation(&numeric)));
                    row.push(Cell::Flag(analytic.min() >= -crate::linalg::NEGATIVITY_TOL));
                    row.push(Cell::Flag(false));
                }
                Err(Error::SingularBase(_)) => {
                    row.extend((0..d + 2).map(|_| Cell::Empty));
                    row.push(Cell::Flag(true));
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        meta: cfg.echo(),
        header,
        rows,
    })
}

/// `gamma` and `gamma'` on the grid. `identity_residual` compares
/// `-gamma / (1 - gamma)` against `G' / h`.
pub fn cmd_rates(cfg: &RunConfig) -> Result<Table> {
    let pr = params(cfg)?;
    let header = ["p", "gamma", "gamma_normalized", "identity_residual", "singular"]
        .map(String::from)
        .to_vec();
    let rows = cfg
        .grid
        .points()
        .par_iter()
        .map(|&p| {
            let gamma = decoherence_rate(&pr, p).ok();
            let gn = gamma_normalized(&pr, p).ok();
            let residual = match (gamma, gn) {
                (Some(g), Some(n)) if g != 1.0 => Cell::Num((-g / (1.0 - g) - n).abs()),
                _ => Cell::Empty,
            };
            vec![
                Cell::Num(p),
                gamma.map_or(Cell::Empty, Cell::Num),
                gn.map_or(Cell::Empty, Cell::Num),
                residual,
                Cell::Flag(gamma.is_none()),
            ]
        })
        .collect();
    Ok(Table {
        meta: cfg.echo(),
        header,
        rows,
    })
}

/// HCLA, MUB-restricted BLP and the excised RHP integral per `alpha` on the
/// grid. Columns for measures not selected by `--measure` are left empty.
pub fn cmd_measures(cfg: &RunConfig) -> Result<Table> {
    let header = [
        "alpha",
        "hcla_closed",
        "hcla_numeric",
        "blp_closed",
        "blp_numeric",
        "blp_pair",
        "rhp",
        "rhp_divergent",
    ]
    .map(String::from)
    .to_vec();
    let fam = mub_family(cfg.d)?;
    let rows = cfg
        .grid
        .points()
        .par_iter()
        .map(|&alpha| -> Result<Vec<Cell>> {
            let pr = ChannelParams::new(cfg.d, alpha)?;
            let mut row = vec![Cell::Num(alpha)];
            if cfg.measure.includes(MeasureKind::Hcla) {
                let h = hcla_measure(&pr);
                row.extend([Cell::Num(h.closed_form), Cell::Num(h.numeric)]);
            } else {
                row.extend([Cell::Empty, Cell::Empty]);
            }
            if cfg.measure.includes(MeasureKind::Blp) {
                let b = blp_measure(&pr, &fam)?;
                row.extend([
                    Cell::Num(b.closed_form),
                    Cell::Num(b.numeric),
                    b.basis_pair.map_or(Cell::Empty, |id| Cell::Text(id.to_string())),
                ]);
            } else {
                row.extend([Cell::Empty, Cell::Empty, Cell::Empty]);
            }
            if cfg.measure.includes(MeasureKind::Rhp) {
                let r = rhp_integral(&pr, RhpQuadrature::default())?;
                row.extend([Cell::Num(r.value), Cell::Flag(r.divergent)]);
            } else {
                row.extend([Cell::Empty, Cell::Empty]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let partial = if fam.is_partial() { " partial-family" } else { "" };
    Ok(Table {
        meta: format!("{} blp=MUB-restricted{partial} rhp_delta=1e-4", cfg.echo()),
        header,
        rows,
    })
}

/// Closed-form and oracle trace distance of one MUB pair along `p`.
pub fn cmd_distance(cfg: &RunConfig) -> Result<Table> {
    let pr = params(cfg)?;
    let fam = mub_family(cfg.d)?;
    let pair = fam.pair(cfg.pair.basis, cfg.pair.first, cfg.pair.second)?;
    let header = ["p", "D_closed", "D_numeric", "sigma"].map(String::from).to_vec();
    let rows = cfg
        .grid
        .points()
        .par_iter()
        .map(|&p| -> Result<Vec<Cell>> {
            Ok(vec![
                Cell::Num(p),
                Cell::Num(blp_trace_distance(&pr, p, &pair)),
                Cell::Num(blp_trace_distance_oracle(&pr, p, &pair)?),
                Cell::Num(sigma_rate(&pr, p, &pair)),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        meta: cfg.echo(),
        header,
        rows,
    })
}

/// Dispatches a figure command.
pub fn run_figure(cfg: &RunConfig) -> Result<Table> {
    match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Rates => cmd_rates(cfg),
        Command::Measures => cmd_measures(cfg),
        Command::Distance => cmd_distance(cfg),
        Command::Verify => Err(Error::Config("verify does not produce a table".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigLayer;

    fn cfg(cmd: Command, toml: &str) -> RunConfig {
        RunConfig::resolve(cmd, ConfigLayer::from_toml(toml).unwrap()).unwrap()
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(-0.0), format_number(0.0));
    }

    #[test]
    fn spectrum_curves_cross_at_root() {
        let t = cmd_spectrum(&cfg(Command::Spectrum, "alpha = 0.5\np_base = 0.3")).unwrap();
        assert_eq!(t.rows.len(), 71);
        let l1 = t.values("lambda_1").unwrap();
        assert!(l1.iter().all(|v| v.unwrap() >= 0.0));
        let dev = t.values("oracle_max_dev").unwrap();
        assert!(dev.iter().all(|v| v.unwrap() < 1e-9));
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("# weylchan"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn spectrum_unperturbed() {
        let t = cmd_spectrum(&cfg(Command::Spectrum, "alpha = 0.0\np_base = 0.0\ngrid = \"0:1:0.1\""))
            .unwrap();
        for row in &t.rows {
            let ps = row[0].as_num().unwrap();
            assert!((row[1].as_num().unwrap() - (3.0 - 2.0 * ps)).abs() < 1e-12);
            assert!((row[2].as_num().unwrap() - ps).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_base_rows_are_flagged() {
        let am = ChannelParams::new(3, 0.5).unwrap().alpha_minus();
        let c = cfg(Command::Spectrum, &format!("alpha = 0.5\np_base = {am}\ngrid = \"{am}:1:0.1\""));
        let t = cmd_spectrum(&c).unwrap();
        assert!(t.rows.iter().all(|r| r.last().unwrap().as_flag() == Some(true)));
        assert!(cmd_spectrum(&cfg(Command::Spectrum, "p_base = 0.5\ngrid = \"0:1:0.1\"")).is_err());
    }

    #[test]
    fn rates_flag_singular_point() {
        let t = cmd_rates(&cfg(Command::Rates, "alpha = 0.0\ngrid = \"0:1:0.25\"")).unwrap();
        let last = t.rows.last().unwrap();
        assert_eq!(last[1], Cell::Empty);
        assert_eq!(last[4], Cell::Flag(true));
        assert!((t.rows[0][1].as_num().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn measures_rows() {
        let t = cmd_measures(&cfg(Command::Measures, "grid = \"0:1:0.25\"")).unwrap();
        let first = &t.rows[0];
        for c in [1, 2, 3, 4, 6] {
            assert!(first[c].as_num().unwrap().abs() < 1e-12);
        }
        for row in &t.rows {
            let a = row[0].as_num().unwrap();
            assert_eq!(row[3].as_num().unwrap(), a / 3.0);
        }
        assert!(t.meta.contains("MUB-restricted"));
        let only = cmd_measures(&cfg(Command::Measures, "grid = \"0.5:0.5:0.1\"\nmeasure = \"hcla\"")).unwrap();
        assert_eq!(only.rows[0][3], Cell::Empty);
    }

    #[test]
    fn distance_rows() {
        let t = cmd_distance(&cfg(Command::Distance, "alpha = 0.4\ngrid = \"0:1:0.05\"")).unwrap();
        for row in &t.rows {
            assert!((row[1].as_num().unwrap() - row[2].as_num().unwrap()).abs() < 1e-10);
        }
        assert!(cmd_distance(&cfg(Command::Distance, "pair = \"9:0:1\"")).is_err());
    }
}
