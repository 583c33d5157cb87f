use std::path::Path;

use multspec_core::lattes::{family_sample, lattes_mult2, WeierstrassParams};
use multspec_core::probe::{collision_probe, PairKind, Provenance, SampleConfig};
use multspec_core::spectra::{
    reciprocal_sigma, sigma_coords, sigma_distance, spectra_distance, spectrum_layer, SigmaVector, SpectraOptions,
    SpectrumLayer, TauVector,
};
use multspec_core::{Error, Precision, RationalMap};
use serde_json::{json, Map, Value};

use crate::report::{pair, pairs, ReportDocument};
use crate::{Cli, CliError, Command, Common};

type Res<T> = Result<T, CliError>;

fn precision(common: &Common, env: Option<&str>) -> Res<Precision> {
    if let Some(p) = common.precision {
        return Ok(p.into());
    }
    match env.map(str::trim) {
        None | Some("") => Ok(Precision::Double),
        Some(s) => s
            .parse::<Precision>()
            .map_err(|_| CliError::Usage(format!("MULTSPEC_PRECISION must be double or extended, got {s:?}"))),
    }
}

fn positive(name: &str, v: f64) -> Res<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn options(common: &Common, env: Option<&str>) -> Res<SpectraOptions> {
    Ok(SpectraOptions {
        precision: precision(common, env)?,
        proj_tol: positive("proj-tol", common.proj_tol)?,
        superattracting_tol: positive("superattracting-tol", common.superattracting_tol)?,
        unity_tol: positive("unity-tol", common.unity_tol)?,
        match_factor: positive("match-factor", common.match_factor)?,
        ..SpectraOptions::default()
    })
}

fn read_map(path: &Path) -> Res<RationalMap> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    crate::parse_map_document(&bytes)
}

fn check_window(from: usize, to: usize) -> Res<()> {
    if from == 0 || from > to {
        return Err(Error::InvalidArgument(format!("period window ({from}, {to}) needs 1 <= from <= to")).into());
    }
    Ok(())
}

fn sigma_block(s: &SigmaVector, precision: Precision) -> Value {
    json!({ "n": s.n, "precision": precision.name(), "values": pairs(&s.values) })
}

fn layers(f: &RationalMap, from: usize, to: usize, opts: &SpectraOptions) -> Res<Vec<SpectrumLayer>> {
    (from..=to).map(|j| Ok(spectrum_layer(f, j, opts)?)).collect()
}

/// `τ` together with the precision each block was computed at.
fn tau_with_precision(
    f: &RationalMap,
    from: usize,
    to: usize,
    opts: &SpectraOptions,
) -> Res<(TauVector, Vec<Precision>)> {
    let mut blocks = Vec::new();
    let mut tiers = Vec::new();
    for layer in layers(f, from, to, opts)? {
        blocks.push(reciprocal_sigma(&layer, opts.superattracting_tol)?);
        tiers.push(layer.precision());
    }
    Ok((TauVector { n: from, m: to, blocks }, tiers))
}

fn tau_value(t: &TauVector, tiers: &[Precision]) -> Value {
    Value::Array(t.blocks.iter().zip(tiers).map(|(b, p)| sigma_block(b, *p)).collect())
}

pub(crate) fn dispatch(
    cli: &Cli,
    env: Option<&str>,
    report: &mut ReportDocument,
    diagnostics: &mut Vec<String>,
) -> Res<()> {
    let cfg = &mut report.config;
    // echo what we can before validation so failed runs still say what was asked
    cfg.insert("proj_tol".into(), json!(cli.common.proj_tol));
    cfg.insert("superattracting_tol".into(), json!(cli.common.superattracting_tol));
    cfg.insert("unity_tol".into(), json!(cli.common.unity_tol));
    cfg.insert("match_factor".into(), json!(cli.common.match_factor));
    let opts = options(&cli.common, env)?;
    cfg.insert("precision".into(), json!(opts.precision.name()));
    let results = &mut report.results;
    match &cli.command {
        Command::Spectrum { map, n, sigma } => {
            cfg.insert("window".into(), json!([n, n]));
            cfg.insert("map".into(), json!(map.display().to_string()));
            check_window(*n, *n)?;
            let f = read_map(map)?;
            let layer = spectrum_layer(&f, *n, &opts)?;
            results.insert("n".into(), json!(n));
            results.insert("degree".into(), json!(f.degree()));
            results.insert("count".into(), json!(layer.len()));
            results.insert("precision".into(), json!(layer.precision().name()));
            if *sigma {
                results.insert("sigma".into(), pairs(&sigma_coords(&layer).values));
            } else {
                results.insert("multipliers".into(), pairs(&layer.multipliers()));
            }
        }
        Command::Tau { map, from, to } => {
            cfg.insert("window".into(), json!([from, to]));
            cfg.insert("map".into(), json!(map.display().to_string()));
            check_window(*from, *to)?;
            let f = read_map(map)?;
            let (tau, tiers) = tau_with_precision(&f, *from, *to, &opts)?;
            results.insert("degree".into(), json!(f.degree()));
            results.insert("tau".into(), tau_value(&tau, &tiers));
        }
        Command::Compare { map_a, map_b, from, to, threshold } => {
            cfg.insert("window".into(), json!([from, to]));
            cfg.insert("map_a".into(), json!(map_a.display().to_string()));
            cfg.insert("map_b".into(), json!(map_b.display().to_string()));
            cfg.insert("threshold".into(), json!(threshold));
            let threshold = positive("threshold", *threshold)?;
            check_window(*from, *to)?;
            let (fa, fb) = (read_map(map_a)?, read_map(map_b)?);
            if fa.degree() != fb.degree() {
                return Err(Error::ShapeMismatch(format!("degrees {} and {}", fa.degree(), fb.degree())).into());
            }
            let (ta, pa) = tau_with_precision(&fa, *from, *to, &opts)?;
            let (tb, pb) = tau_with_precision(&fb, *from, *to, &opts)?;
            let d = spectra_distance(&ta, &tb)?;
            let same = d < threshold;
            results.insert("tau_a".into(), tau_value(&ta, &pa));
            results.insert("tau_b".into(), tau_value(&tb, &pb));
            results.insert("distance".into(), json!(d));
            results.insert("same".into(), json!(same));
            results.insert(
                "verdict".into(),
                json!(if same {
                    format!("indistinguishable: distance {d:.3e} below {threshold:.1e}")
                } else {
                    format!("distinct: distance {d:.3e} at or above {threshold:.1e}")
                }),
            );
        }
        Command::Lattes { g2, g3, family, seed, nmax, tol } => {
            cfg.insert("window".into(), json!([1, nmax]));
            cfg.insert("seed".into(), json!(seed));
            cfg.insert("family".into(), json!(family));
            cfg.insert("tol".into(), json!(tol));
            let tol = positive("tol", *tol)?;
            check_window(1, *nmax)?;
            let mut curves = Vec::new();
            match (g2, g3) {
                (Some(a), Some(b)) => curves.push(WeierstrassParams::new(*a, *b)?),
                (None, None) => {}
                _ => return Err(CliError::Usage("--g2 and --g3 go together".into())),
            }
            if let Some(k) = family {
                curves.extend(family_sample(*k, *seed));
            }
            if curves.is_empty() {
                return Err(CliError::Usage("lattes needs --g2/--g3 or --family".into()));
            }
            lattes_results(&curves, *nmax, tol, &opts, results)?;
        }
        Command::Probe { degree, from, to, trials, seed, planted_duplicates, planted_conjugates, threshold } => {
            cfg.insert("window".into(), json!([from, to]));
            cfg.insert("degree".into(), json!(degree));
            cfg.insert("trials".into(), json!(trials));
            cfg.insert("seed".into(), json!(seed));
            cfg.insert("planted_duplicates".into(), json!(planted_duplicates));
            cfg.insert("planted_conjugates".into(), json!(planted_conjugates));
            cfg.insert("threshold".into(), json!(threshold));
            let mut sc = SampleConfig::new(*degree, *from, *to, *trials, *seed);
            sc.precision = opts.precision;
            sc.proj_tol = opts.proj_tol;
            sc.superattracting_tol = opts.superattracting_tol;
            sc.distance_threshold = positive("threshold", *threshold)?;
            sc.planted_duplicates = *planted_duplicates;
            sc.planted_conjugates = *planted_conjugates;
            probe_results(&sc, results, diagnostics)?;
        }
    }
    Ok(())
}

fn lattes_results(
    curves: &[WeierstrassParams],
    nmax: usize,
    tol: f64,
    opts: &SpectraOptions,
    results: &mut Map<String, Value>,
) -> Res<()> {
    let mut rhos = Vec::new();
    let mut out = Vec::new();
    for p in curves {
        let f = lattes_mult2(p)?;
        let ls = layers(&f, 1, nmax, opts)?;
        let superattracting =
            ls.iter().find(|l| l.min_modulus().is_some_and(|m| m <= opts.superattracting_tol)).map(SpectrumLayer::n);
        let sig: Vec<SigmaVector> = ls.iter().map(sigma_coords).collect();
        out.push(json!({
            "g2": pair(p.g2()),
            "g3": pair(p.g3()),
            "j": pair(p.j_invariant()),
            "discriminant": pair(p.discriminant()),
            "superattracting_period": superattracting,
            "sigma": ls.iter().zip(&sig).map(|(l, s)| sigma_block(s, l.precision())).collect::<Vec<_>>(),
        }));
        rhos.push(sig);
    }
    let mut worst = 0.0f64;
    for i in 0..rhos.len() {
        for j in i + 1..rhos.len() {
            worst = worst.max(sigma_distance(&rhos[i], &rhos[j])?);
        }
    }
    let iso = worst <= tol;
    results.insert("curves".into(), Value::Array(out));
    results.insert("max_pairwise_distance".into(), json!(worst));
    results.insert("isospectral".into(), json!(iso));
    results.insert("verdict".into(), json!(format!("isospectral: {iso}")));
    Ok(())
}

fn provenance(p: Provenance) -> Value {
    match p {
        Provenance::Random => json!({ "kind": "random" }),
        Provenance::Duplicate { of } => json!({ "kind": "duplicate", "of": of }),
        Provenance::Conjugate { of } => json!({ "kind": "conjugate", "of": of }),
    }
}

fn probe_results(sc: &SampleConfig, results: &mut Map<String, Value>, diagnostics: &mut Vec<String>) -> Res<()> {
    let rep = collision_probe(sc)?;
    let trials: Vec<Value> = rep
        .trials
        .iter()
        .map(|t| {
            json!({
                "index": t.index,
                "provenance": provenance(t.provenance),
                "rejected": t.rejected,
                "error": t.error,
                "tau": t.tau.as_ref().map(|tau| Value::Array(tau.blocks.iter().map(|b| pairs(&b.values)).collect())),
            })
        })
        .collect();
    let findings: Vec<Value> = rep
        .findings
        .iter()
        .map(|p| {
            let kind = match p.kind {
                PairKind::Duplicate => "duplicate",
                PairKind::Conjugate => "conjugate",
                PairKind::Candidate => "candidate",
            };
            json!({ "a": p.a, "b": p.b, "kind": kind, "distance": p.distance, "recheck_distance": p.recheck_distance })
        })
        .collect();
    let candidates = rep.candidates().count();
    if candidates > 0 {
        diagnostics.push(format!(
            "{candidates} unplanted pair(s) below {:.1e}, re-examined at extended precision",
            sc.distance_threshold
        ));
    }
    results.insert("trials".into(), Value::Array(trials));
    results.insert("findings".into(), Value::Array(findings));
    results.insert("failures".into(), json!(rep.failures));
    results.insert("min_inter_distance".into(), json!(rep.min_inter_distance));
    results.insert("max_intra_distance".into(), json!(rep.max_intra_distance));
    results.insert("separated".into(), json!(rep.separated()));
    results.insert("unplanted_below_threshold".into(), json!(candidates));
    if sc.degree < 4 {
        results.insert(
            "note".into(),
            json!("exploratory: for degree below 4 separation is an empirical observation, not a guarantee"),
        );
    }
    Ok(())
}
