//! Experiment drivers: merit-versus-error scatter over random nets, Pearson
//! correlation of the two axes, and merit/error comparison of externally
//! supplied nets against annealing-searched ones.

use crate::error::{Error, Result};
use crate::integrands::{Integrand, FN_IDS};
use crate::net::{random_net_with, DigitalNet, NetParams};
use crate::qmc::{rmse_estimate_lane, rmse_multi_lane};
use crate::rng::{stream_rng, DOMAIN_NET};
use crate::search::{anneal, AnnealConfig, SearchResult};
use crate::wafom::{wafom_inversion, WafomEngine};
use crate::weight::WeightSpec;
use rayon::prelude::*;

/// One random net in a scatter run: its merit and, per canonical integrand
/// slot (`f0`..`f7`), the estimated RMS error.  `None` marks an integrand
/// left out of the run; `-inf` (an exact zero error) is kept as a value and
/// excluded from correlations.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRecord {
    pub net_id: u64,
    pub lg_w: f64,
    pub lg_e: [Option<f64>; 8],
}

fn canonical_slot(f: &Integrand) -> usize {
    FN_IDS.iter().position(|id| *id == f.id()).expect("registered integrand")
}

/// Draw `n_nets` iid random nets (net `k` from the stream `(seed, NET, k)`)
/// and estimate, for each, `lg W(·; μ+h)` and `lg` of the RMS error of every
/// requested integrand over `n_shifts` random digital shifts.
pub fn scatter_experiment(
    params: NetParams,
    n_nets: u64,
    n_shifts: usize,
    fns: &[&Integrand],
    seed: u64,
) -> Result<Vec<ScatterRecord>> {
    if fns.is_empty() {
        return Err(Error::InvalidParams("scatter needs at least one integrand".into()));
    }
    for f in fns {
        if f.dimension() != params.s {
            return Err(Error::ShapeMismatch(format!(
                "integrand {} has dimension {}, net has s = {}",
                f.id(),
                f.dimension(),
                params.s
            )));
        }
    }
    let weight = WeightSpec::dick_plus_hamming(params.s, params.n);
    let engine =
        if params.b == 2 { Some(WafomEngine::new(params.s, params.n, &weight)?) } else { None };
    (0..n_nets)
        .into_par_iter()
        .map(|net_id| {
            let net = random_net_with(params, &mut stream_rng(seed, DOMAIN_NET, net_id, 0));
            let lg_w = match &engine {
                Some(e) => e.wafom(&net)?.lg_w,
                None => wafom_inversion(&net, &weight)?.lg_w,
            };
            let reports = rmse_multi_lane(&net, fns, n_shifts, seed, net_id)?;
            let mut lg_e: [Option<f64>; 8] = Default::default();
            for (f, rep) in fns.iter().zip(&reports) {
                lg_e[canonical_slot(f)] = Some(rep.lg_e);
            }
            Ok(ScatterRecord { net_id, lg_w, lg_e })
        })
        .collect()
}

/// CSV rendering with one column per canonical integrand; absent slots are
/// empty cells, exact-zero errors print as `-inf`.
pub fn scatter_csv(records: &[ScatterRecord]) -> String {
    let mut out = String::from("net_id,lg_w");
    for id in FN_IDS {
        out.push_str(",lg_e_");
        out.push_str(id);
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!("{},{}", r.net_id, r.lg_w));
        for slot in &r.lg_e {
            match slot {
                None => out.push(','),
                Some(v) if *v == f64::NEG_INFINITY => out.push_str(",-inf"),
                Some(v) => out.push_str(&format!(",{v}")),
            }
        }
        out.push('\n');
    }
    out
}

/// Pearson correlation coefficient.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch(format!(
            "correlation inputs have lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParams("correlation needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Correlation between `lg W` and `lg e` for canonical slot `fn_idx`,
/// skipping nets with no value or an infinite one.
pub fn merit_error_correlation(records: &[ScatterRecord], fn_idx: usize) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in records {
        if let Some(e) = r.lg_e[fn_idx] {
            if e.is_finite() && r.lg_w.is_finite() {
                xs.push(r.lg_w);
                ys.push(e);
            }
        }
    }
    correlation(&xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetLabel {
    External,
    Searched,
}

impl NetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            NetLabel::External => "external",
            NetLabel::Searched => "searched",
        }
    }
}

/// One line of the comparison: a net's merit and its estimated RMS error on
/// a chosen integrand.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub label: NetLabel,
    pub s: usize,
    pub m: usize,
    pub lg_w: f64,
    pub lg_e: f64,
}

/// For every listed `m`, anneal a net of the given shape and report it next
/// to the externally supplied net of the same size when one is present (a
/// missing external skips that row, not the run).  Errors are estimated on
/// `f` with `n_shifts` shifts; external nets keep their own column count.
pub fn comparison_experiment(
    params: NetParams,
    externals: &[(usize, Option<DigitalNet>)],
    template: &AnnealConfig,
    f: &Integrand,
    n_shifts: usize,
    seed: u64,
) -> Result<Vec<ComparisonRow>> {
    if f.dimension() != params.s {
        return Err(Error::ShapeMismatch(format!(
            "integrand {} has dimension {}, comparison uses s = {}",
            f.id(),
            f.dimension(),
            params.s
        )));
    }
    let mut rows = Vec::new();
    for (row_idx, (m, external)) in externals.iter().enumerate() {
        let lane = 2 * row_idx as u64;
        if let Some(net) = external {
            let p = net.params();
            if p.s != params.s {
                return Err(Error::ShapeMismatch(format!(
                    "external net for m = {m} has s = {}, expected {}",
                    p.s, params.s
                )));
            }
            let weight = WeightSpec::dick_plus_hamming(p.s, p.n);
            let lg_w = wafom_inversion(net, &weight)?.lg_w;
            let lg_e = rmse_estimate_lane(net, f, n_shifts, seed, lane)?.lg_e;
            rows.push(ComparisonRow { label: NetLabel::External, s: p.s, m: p.m, lg_w, lg_e });
        }
        let p = NetParams::new(params.b, params.s, params.n, *m)?;
        let searched: SearchResult = anneal(p, template)?;
        let lg_e =
            rmse_estimate_lane(&searched.best_net, f, n_shifts, seed, lane + 1)?.lg_e;
        rows.push(ComparisonRow {
            label: NetLabel::Searched,
            s: params.s,
            m: *m,
            lg_w: searched.best_lg_w,
            lg_e,
        });
    }
    Ok(rows)
}

/// Aligned text table, two decimals on the `lg` columns.
pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("label     s   m    lg_w     lg_e\n");
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:>2} {:>3} {:>7.2} {:>8.2}\n",
            r.label.as_str(),
            r.s,
            r.m,
            r.lg_w,
            r.lg_e
        ));
    }
    out
}

/// Full-precision CSV mirror of the table.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("label,s,m,lg_w,lg_e\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.label.as_str(), r.s, r.m, r.lg_w, r.lg_e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrands::Integrand;
    use crate::net::random_net_strict;

    fn params(b: u32, s: usize, n: usize, m: usize) -> NetParams {
        NetParams::new(b, s, n, m).unwrap()
    }

    #[test]
    fn correlation_hand_examples() {
        let xs = [1.0, 2.0, 5.0, 7.0];
        let affine: Vec<f64> = xs.iter().map(|x| 3.0 * x - 2.0).collect();
        assert!((correlation(&xs, &affine).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -0.5 * x + 1.0).collect();
        assert!((correlation(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        let flat = correlation(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(flat.abs() < 1e-12);
        assert!(matches!(
            correlation(&[1.0, 2.0], &[3.0, 3.0]),
            Err(Error::ZeroVariance)
        ));
        assert!(correlation(&[1.0], &[2.0]).is_err());
        assert!(correlation(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn scatter_covers_requested_slots_in_order() {
        let p = params(2, 2, 8, 5);
        let f1 = Integrand::by_id("f1", 2).unwrap();
        let f7 = Integrand::by_id("f7", 2).unwrap();
        let recs = scatter_experiment(p, 30, 8, &[&f1, &f7], 5).unwrap();
        assert_eq!(recs.len(), 30);
        for (k, r) in recs.iter().enumerate() {
            assert_eq!(r.net_id, k as u64);
            assert!(r.lg_w.is_finite());
            for (slot, v) in r.lg_e.iter().enumerate() {
                assert_eq!(v.is_some(), slot == 1 || slot == 7, "slot {slot}");
            }
        }
        let c = merit_error_correlation(&recs, 1).unwrap();
        assert!((-1.0..=1.0).contains(&c));
        assert!(c > 0.0, "smooth integrand should correlate positively, got {c}");
    }

    #[test]
    fn scatter_is_deterministic_and_csv_stable() {
        let p = params(2, 2, 6, 4);
        let f3 = Integrand::by_id("f3", 2).unwrap();
        let a = scatter_experiment(p, 12, 4, &[&f3], 9).unwrap();
        let b = scatter_experiment(p, 12, 4, &[&f3], 9).unwrap();
        assert_eq!(scatter_csv(&a), scatter_csv(&b));
        let c = scatter_experiment(p, 12, 4, &[&f3], 10).unwrap();
        assert_ne!(scatter_csv(&a), scatter_csv(&c));
    }

    #[test]
    fn scatter_merit_matches_direct_inversion() {
        let p = params(3, 2, 3, 2);
        let f1 = Integrand::by_id("f1", 2).unwrap();
        let recs = scatter_experiment(p, 6, 4, &[&f1], 3).unwrap();
        let w = WeightSpec::dick_plus_hamming(2, 3);
        for r in recs {
            let net = random_net_with(p, &mut stream_rng(3, DOMAIN_NET, r.net_id, 0));
            let direct = wafom_inversion(&net, &w).unwrap().lg_w;
            assert_eq!(r.lg_w.to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn csv_renders_sentinels_and_blanks() {
        let rec = ScatterRecord {
            net_id: 3,
            lg_w: -4.5,
            lg_e: [
                Some(f64::NEG_INFINITY),
                Some(-2.25),
                None,
                None,
                None,
                None,
                None,
                None,
            ],
        };
        let csv = scatter_csv(std::slice::from_ref(&rec));
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "net_id,lg_w,lg_e_f0,lg_e_f1,lg_e_f2,lg_e_f3,lg_e_f4,lg_e_f5,lg_e_f6,lg_e_f7"
        );
        assert_eq!(lines.next().unwrap(), "3,-4.5,-inf,-2.25,,,,,,");
        // The -inf row is excluded from the f0 correlation, leaving too few
        // points — an error, not a silent number.
        assert!(merit_error_correlation(&[rec], 0).is_err());
    }

    #[test]
    fn comparison_handles_missing_externals() {
        let p = params(2, 2, 8, 0); // m varies per row
        let f1 = Integrand::by_id("f1", 2).unwrap();
        let ext = random_net_strict(params(2, 2, 6, 3), 1).unwrap();
        let cfg = AnnealConfig { steps: 60, ..AnnealConfig::new(4) };
        let rows =
            comparison_experiment(p, &[(3, Some(ext)), (4, None)], &cfg, &f1, 4, 11).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].label, NetLabel::External);
        assert_eq!((rows[0].m, rows[0].s), (3, 2));
        assert_eq!(rows[1].label, NetLabel::Searched);
        assert_eq!(rows[1].m, 3);
        assert_eq!(rows[2].label, NetLabel::Searched);
        assert_eq!(rows[2].m, 4);
        // Deeper nets should not do worse on merit.
        assert!(rows[2].lg_w <= rows[1].lg_w + 0.5);

        let table = comparison_table(&rows);
        assert!(table.starts_with("label     s   m    lg_w     lg_e\n"));
        assert!(table.contains("external"));
        assert!(table.contains("searched"));
        let csv = comparison_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("label,s,m,lg_w,lg_e\n"));
    }

    #[test]
    fn dimension_mismatches_are_refused() {
        let p = params(2, 2, 6, 3);
        let f_wrong = Integrand::by_id("f1", 3).unwrap();
        assert!(scatter_experiment(p, 4, 4, &[&f_wrong], 0).is_err());
        let cfg = AnnealConfig { steps: 10, ..AnnealConfig::new(0) };
        assert!(comparison_experiment(p, &[(2, None)], &cfg, &f_wrong, 4, 0).is_err());
    }
}
