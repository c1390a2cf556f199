//! Study execution and deterministic file emission.

use std::path::{Path, PathBuf};

use latcub::cubature::{
    assemble_gram, solve_optimal_weights, wce_equal, wce_general, wce_optimal_from_weights,
    write_gram_binary, write_weights_binary, write_weights_text,
};
use latcub::kernel::KernelSpec;
use latcub::pde::run_uq_experiment;
use latcub::points::{
    apply_shift, generate_lattice, generating_vector_from_text, sample_shift, tent_transform,
    GeneratingVector, PointSet,
};
use latcub::report::{format_f64, short_hash, write_dat, Series, Table};
use latcub::studies::{run_oned, run_wce2d, Wce2dReport};
use latcub::{Error, Result};

use crate::config::{OnedSettings, PdeUqSettings, Wce2dSettings};

/// Generating vector behind the diffusion study: 100 components at n = 4096,
/// extensible over powers of two.
pub const EMBEDDED_GV_UQ: &str = include_str!("../../../data/gv_cbc_s100_n4096.txt");

/// Two-dimensional generating vector behind the tent-transform study.
pub const EMBEDDED_GV_WCE2D: &str = include_str!("../../../data/gv_wce2d_n1024.txt");

fn load_gv(path: Option<&Path>, fallback: &str, s: usize, n: u64) -> Result<GeneratingVector> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            generating_vector_from_text(&text, &p.display().to_string(), s, n)
        }
        None => generating_vector_from_text(fallback, "embedded", s, n),
    }
}

fn prepare_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    Ok(())
}

/// Rows that fit table cells: provenance triple shared by every row.
struct Provenance {
    seed: String,
    gv_hash: String,
    config_hash: String,
}

impl Provenance {
    fn new(seed: u64, gv: &GeneratingVector, canonical_config: &str) -> Self {
        Provenance {
            seed: seed.to_string(),
            gv_hash: gv.fingerprint(),
            config_hash: short_hash(canonical_config),
        }
    }

    fn cells(&self) -> [String; 3] {
        [
            self.seed.clone(),
            self.gv_hash.clone(),
            self.config_hash.clone(),
        ]
    }
}

fn push_with_provenance(table: &mut Table, mut cells: Vec<String>, prov: &Provenance) -> Result<()> {
    cells.extend(prov.cells());
    table.push_row(cells)
}

pub struct StudyOutputs {
    pub files: Vec<PathBuf>,
    /// Human-oriented one-line summaries, printed by the binary.
    pub summary: Vec<String>,
}

pub fn run_oned_study(settings: &OnedSettings, out_dir: &Path) -> Result<StudyOutputs> {
    prepare_out_dir(out_dir)?;
    let report = run_oned(&settings.schedule, settings.integrand)?;
    let max_n = *settings.schedule.last().expect("schedule checked nonempty");
    let gv = GeneratingVector::new(max_n, &[1])?;
    let prov = Provenance::new(settings.seed, &gv, &settings.canonical());

    let mut table = Table::new(&[
        "kind",
        "n",
        "err_equal",
        "err_optimal",
        "wce_equal",
        "wce_optimal",
        "delta_weights",
        "delta_wce_sq",
        "delta_gram",
        "seed",
        "gv_hash",
        "config_hash",
    ]);
    for row in &report.rows {
        push_with_provenance(
            &mut table,
            vec![
                "point".into(),
                row.n.to_string(),
                format_f64(row.err_equal),
                format_f64(row.err_optimal),
                format_f64(row.wce_equal),
                format_f64(row.wce_optimal),
                format_f64(row.delta_weights),
                format_f64(row.delta_wce_sq),
                format_f64(row.delta_gram),
            ],
            &prov,
        )?;
    }
    // Slope rows reuse the error columns; n holds the number of fitted
    // points and the remaining value cells stay empty.
    push_with_provenance(
        &mut table,
        vec![
            "slope".into(),
            report.slope_equal.used.to_string(),
            format_f64(report.slope_equal.slope),
            format_f64(report.slope_optimal.slope),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ],
        &prov,
    )?;

    let stem = format!("oned_{}", settings.integrand.name());
    let csv = out_dir.join(format!("{stem}.csv"));
    table.write_csv(&csv)?;

    let curve = |name: &str, get: fn(&latcub::studies::OnedRow) -> f64| Series {
        name: name.to_string(),
        points: report.rows.iter().map(|r| (r.n as f64, get(r))).collect(),
    };
    let dat = out_dir.join(format!("{stem}.dat"));
    write_dat(
        &dat,
        &format!(
            "one-dimensional lattice cubature, integrand {}\ncolumns: n value",
            settings.integrand.name()
        ),
        &[
            curve("err_equal", |r| r.err_equal),
            curve("err_optimal", |r| r.err_optimal),
            curve("wce_equal", |r| r.wce_equal),
            curve("wce_optimal", |r| r.wce_optimal),
        ],
    )?;

    Ok(StudyOutputs {
        files: vec![csv, dat],
        summary: vec![format!(
            "oned[{}]: slope equal {:+.3}, optimal {:+.3} over {} points",
            settings.integrand.name(),
            report.slope_equal.slope,
            report.slope_optimal.slope,
            report.rows.len()
        )],
    })
}

pub fn run_wce2d_study(
    settings: &Wce2dSettings,
    gv_path: Option<&Path>,
    out_dir: &Path,
) -> Result<StudyOutputs> {
    prepare_out_dir(out_dir)?;
    let max_n = *settings.schedule.last().ok_or_else(|| {
        Error::InvalidConfig("n-schedule is empty".into())
    })?;
    let gv = load_gv(gv_path, EMBEDDED_GV_WCE2D, 2, max_n)?;
    let report: Wce2dReport = run_wce2d(&gv, &settings.schedule, settings.seed)?;
    let prov = Provenance::new(settings.seed, &gv, &settings.canonical());

    let mut table = Table::new(&[
        "kind",
        "n",
        "wce_eq_h2",
        "wce_opt_h2",
        "wce_eq_h4",
        "wce_opt_h4",
        "seed",
        "gv_hash",
        "config_hash",
    ]);
    for row in &report.rows {
        push_with_provenance(
            &mut table,
            vec![
                "point".into(),
                row.n.to_string(),
                format_f64(row.wce_eq_h2),
                format_f64(row.wce_opt_h2),
                format_f64(row.wce_eq_h4),
                format_f64(row.wce_opt_h4),
            ],
            &prov,
        )?;
    }
    push_with_provenance(
        &mut table,
        vec![
            "slope".into(),
            report.slope_eq_h2.used.to_string(),
            format_f64(report.slope_eq_h2.slope),
            format_f64(report.slope_opt_h2.slope),
            format_f64(report.slope_eq_h4.slope),
            format_f64(report.slope_opt_h4.slope),
        ],
        &prov,
    )?;

    let csv = out_dir.join("wce2d.csv");
    table.write_csv(&csv)?;

    let curve = |name: &str, get: fn(&latcub::studies::Wce2dRow) -> f64| Series {
        name: name.to_string(),
        points: report.rows.iter().map(|r| (r.n as f64, get(r))).collect(),
    };
    let dat = out_dir.join("wce2d.dat");
    write_dat(
        &dat,
        "worst-case errors of shifted tent-transformed lattice rules\ncolumns: n value",
        &[
            curve("wce_eq_h2", |r| r.wce_eq_h2),
            curve("wce_opt_h2", |r| r.wce_opt_h2),
            curve("wce_eq_h4", |r| r.wce_eq_h4),
            curve("wce_opt_h4", |r| r.wce_opt_h4),
        ],
    )?;

    Ok(StudyOutputs {
        files: vec![csv, dat],
        summary: vec![format!(
            "wce2d: shift seed {}, slopes eq-H2 {:+.3}, opt-H2 {:+.3}, eq-H4 {:+.3}, opt-H4 {:+.3}",
            report.shift_seed_used,
            report.slope_eq_h2.slope,
            report.slope_opt_h2.slope,
            report.slope_eq_h4.slope,
            report.slope_opt_h4.slope
        )],
    })
}

pub fn run_pde_uq_study(
    settings: &PdeUqSettings,
    gv_path: Option<&Path>,
    out_dir: &Path,
) -> Result<StudyOutputs> {
    prepare_out_dir(out_dir)?;
    let mut files = Vec::new();
    let mut summary = Vec::new();
    for &s in &settings.s_list {
        let gv = load_gv(gv_path, EMBEDDED_GV_UQ, s, settings.n_ref)?;
        let cfg = settings.uq_config(s);
        let result = run_uq_experiment(&cfg, &gv)?;
        let prov = Provenance::new(settings.seed, &gv, &settings.canonical(s));

        let mut table = Table::new(&[
            "method",
            "n",
            "rms_error",
            "wce",
            "seed",
            "gv_hash",
            "config_hash",
        ]);
        for row in &result.rows {
            push_with_provenance(
                &mut table,
                vec![
                    row.method.as_str().to_string(),
                    row.n.to_string(),
                    format_f64(row.rms_error),
                    format_f64(row.wce),
                ],
                &prov,
            )?;
        }
        let csv = out_dir.join(format!("pde_uq_s{s}.csv"));
        table.write_csv(&csv)?;

        let series: Vec<Series> = cfg
            .methods
            .iter()
            .map(|&m| Series {
                name: format!("rms_error_{}", m.as_str()),
                points: result
                    .errors_for(m)
                    .into_iter()
                    .map(|(n, e)| (n as f64, e))
                    .collect(),
            })
            .collect();
        let dat = out_dir.join(format!("pde_uq_s{s}.dat"));
        write_dat(
            &dat,
            &format!("parametric diffusion study, s = {s}\ncolumns: n rms_error"),
            &series,
        )?;

        for &m in &cfg.methods {
            let errs = result.errors_for(m);
            let ns: Vec<f64> = errs.iter().map(|&(n, _)| n as f64).collect();
            let es: Vec<f64> = errs.iter().map(|&(_, e)| e).collect();
            match latcub::studies::oned::fit_with_default_window(&ns, &es) {
                Ok(fit) => summary.push(format!(
                    "pde-uq s={s} {}: rms slope {:+.3} over {} points",
                    m.as_str(),
                    fit.slope,
                    fit.used
                )),
                Err(e) => summary.push(format!(
                    "pde-uq s={s} {}: slope unavailable ({e})",
                    m.as_str()
                )),
            }
        }
        files.push(csv);
        files.push(dat);
    }
    Ok(StudyOutputs { files, summary })
}

/// Node construction shared by the `weights` and `wce` one-shot commands.
pub struct PointRequest<'a> {
    pub gv_path: Option<&'a Path>,
    pub n: u64,
    pub s: usize,
    pub shift_seed: Option<u64>,
    pub tent: bool,
}

pub fn build_points(req: &PointRequest) -> Result<(GeneratingVector, PointSet)> {
    let gv = load_gv(req.gv_path, EMBEDDED_GV_UQ, req.s, req.n)?;
    let mut points = generate_lattice(&gv);
    if let Some(seed) = req.shift_seed {
        let shift = sample_shift(seed, req.s);
        points = apply_shift(&points, &shift)?;
    }
    if req.tent {
        points = tent_transform(&points);
    }
    Ok((gv, points))
}

pub struct WeightsOutcome {
    pub n: usize,
    pub wce_optimal: f64,
    pub files: Vec<PathBuf>,
}

/// Solves the optimal weights for a kernel spec on constructed points and
/// dumps them (binary when the path ends in `.bin`, text otherwise).
pub fn run_weights(
    spec: &KernelSpec,
    req: &PointRequest,
    weights_out: &Path,
    gram_out: Option<&Path>,
) -> Result<WeightsOutcome> {
    let (_, points) = build_points(req)?;
    if spec.dimension() != req.s {
        return Err(Error::DimensionMismatch {
            context: "kernel spec vs requested points",
            expected: req.s,
            actual: spec.dimension(),
        });
    }
    let gram = assemble_gram(spec, &points)?;
    let weights = solve_optimal_weights(&gram)?;
    let wce = wce_optimal_from_weights(&weights)?;

    if let Some(parent) = weights_out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    if weights_out.extension().is_some_and(|e| e == "bin") {
        write_weights_binary(weights_out, &weights)?;
    } else {
        write_weights_text(weights_out, &weights)?;
    }
    let mut files = vec![weights_out.to_path_buf()];
    if let Some(gram_path) = gram_out {
        write_gram_binary(gram_path, &gram)?;
        files.push(gram_path.to_path_buf());
    }
    Ok(WeightsOutcome {
        n: points.len(),
        wce_optimal: wce,
        files,
    })
}

pub struct WceOutcome {
    pub n: usize,
    pub wce_equal: f64,
    /// Present unless precomputed weights were supplied.
    pub wce_optimal: Option<f64>,
    /// Present when precomputed weights were supplied.
    pub wce_at_weights: Option<f64>,
}

/// One-shot worst-case-error evaluation on constructed points, either for
/// the equal/optimal pair or for weights loaded from a dump.
pub fn run_wce(
    spec: &KernelSpec,
    req: &PointRequest,
    weights_path: Option<&Path>,
) -> Result<WceOutcome> {
    let (_, points) = build_points(req)?;
    let eq = wce_equal(spec, &points)?;
    match weights_path {
        Some(path) => {
            let weights = if path.extension().is_some_and(|e| e == "bin") {
                latcub::cubature::read_weights_binary(path)?
            } else {
                latcub::cubature::read_weights_text(path)?
            };
            let at = wce_general(spec, &points, &weights)?;
            Ok(WceOutcome {
                n: points.len(),
                wce_equal: eq,
                wce_optimal: None,
                wce_at_weights: Some(at),
            })
        }
        None => {
            let gram = assemble_gram(spec, &points)?;
            let weights = solve_optimal_weights(&gram)?;
            Ok(WceOutcome {
                n: points.len(),
                wce_equal: eq,
                wce_optimal: Some(wce_optimal_from_weights(&weights)?),
                wce_at_weights: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Profile, RawConfig};

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("latcub-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn oned_study_writes_expected_files_deterministically() {
        let dir = temp_dir("oned");
        let raw = RawConfig::parse("schedule = 8,16,32\n").unwrap();
        let st = OnedSettings::resolve(Profile::Ci, raw, None).unwrap();
        let out = run_oned_study(&st, &dir).unwrap();
        assert_eq!(out.files.len(), 2);
        let first = std::fs::read(&out.files[0]).unwrap();
        run_oned_study(&st, &dir).unwrap();
        let second = std::fs::read(&out.files[0]).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with("kind,n,err_equal"));
        assert_eq!(text.lines().count(), 1 + 3 + 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn embedded_vectors_parse() {
        let gv = load_gv(None, EMBEDDED_GV_UQ, 100, 4096).unwrap();
        assert_eq!(gv.dimension(), 100);
        assert_eq!(gv.components()[0], 1);
        let gv2 = load_gv(None, EMBEDDED_GV_WCE2D, 2, 1024).unwrap();
        assert_eq!(gv2.components(), &[1, 182667 % 1024]);
    }

    #[test]
    fn weights_and_wce_commands_round_trip() {
        let dir = temp_dir("weights");
        let spec_path = dir.join("kernel.txt");
        std::fs::write(
            &spec_path,
            "scheme = product\nalpha = 1\ns = 2\ngamma_tilde = 1.0 0.5\n",
        )
        .unwrap();
        let spec = latcub::kernel::load_kernel_spec(&spec_path).unwrap();
        let req = PointRequest {
            gv_path: None,
            n: 32,
            s: 2,
            shift_seed: Some(4),
            tent: false,
        };
        let weights_path = dir.join("w.bin");
        let outcome = run_weights(&spec, &req, &weights_path, None).unwrap();
        assert_eq!(outcome.n, 32);
        assert!(outcome.wce_optimal > 0.0);

        // The streaming form at the solved weights and 1 - sum(w) agree
        // only up to solver accuracy, not bitwise.
        let wce = run_wce(&spec, &req, Some(&weights_path)).unwrap();
        let at = wce.wce_at_weights.unwrap();
        assert!((at - outcome.wce_optimal).abs() < 1e-9);
        let solved = run_wce(&spec, &req, None).unwrap();
        assert!(solved.wce_optimal.unwrap() <= solved.wce_equal);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
