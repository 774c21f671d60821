//! Experiment records and their CSV form.
//!
//! One CSV holds both per-run rows (`kind=run`) and the aggregate rows
//! (`kind=mean`) recomputed from them. Aggregates are grouped by
//! `(profile, algorithm, variant, flow_count)`; an algorithm run with more
//! than one variant also gets a pooled row with variant `*`.

use galb::StopReason;

pub const HEADER: [&str; 13] = [
    "kind",
    "profile",
    "algorithm",
    "variant",
    "flow_count",
    "run",
    "seed",
    "before_max_load",
    "after_max_load",
    "effectiveness_pct",
    "elapsed_s",
    "generations",
    "stop_reason",
];

/// Column holding wall-clock time; everything else is deterministic.
pub const TIMING_COLUMN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub profile: String,
    pub algorithm: String,
    pub variant: String,
    pub flow_count: usize,
    pub run: usize,
    pub seed: u64,
    pub before_max_load: Option<u64>,
    pub after_max_load: u64,
    /// Seconds, rounded to microseconds.
    pub elapsed_s: f64,
    pub generations: Option<usize>,
    pub stop_reason: Option<StopReason>,
}

impl RunRecord {
    pub fn effectiveness_pct(&self) -> Option<i64> {
        effectiveness(self.before_max_load.map(|b| b as f64), self.after_max_load as f64)
    }
}

pub fn round_micros(seconds: f64) -> f64 {
    (seconds * 1e6).round() / 1e6
}

/// `round(100 · (1 − after / before))`; undefined when nothing was loaded before.
pub fn effectiveness(before: Option<f64>, after: f64) -> Option<i64> {
    match before {
        Some(b) if b > 0.0 => Some((100.0 * (1.0 - after / b)).round() as i64),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub profile: String,
    pub algorithm: String,
    pub variant: String,
    pub flow_count: usize,
    pub runs: usize,
    pub mean_before: Option<f64>,
    pub mean_after: f64,
    pub mean_elapsed_s: f64,
}

impl Aggregate {
    /// Effectiveness computed from the group means rather than averaged per run.
    pub fn effectiveness_pct(&self) -> Option<i64> {
        effectiveness(self.mean_before, self.mean_after)
    }

    fn from_runs(rows: &[&RunRecord], variant: &str) -> Aggregate {
        let n = rows.len() as f64;
        let first = rows[0];
        let mean_before = rows
            .iter()
            .map(|r| r.before_max_load)
            .collect::<Option<Vec<_>>>()
            .map(|v| v.iter().sum::<u64>() as f64 / n);
        Aggregate {
            profile: first.profile.clone(),
            algorithm: first.algorithm.clone(),
            variant: variant.to_string(),
            flow_count: first.flow_count,
            runs: rows.len(),
            mean_before,
            mean_after: rows.iter().map(|r| r.after_max_load).sum::<u64>() as f64 / n,
            mean_elapsed_s: rows.iter().map(|r| r.elapsed_s).sum::<f64>() / n,
        }
    }
}

/// Groups `runs` in order of first appearance and averages each group.
pub fn aggregate(runs: &[RunRecord]) -> Vec<Aggregate> {
    let mut groups: Vec<(&str, &str, usize, Vec<&str>)> = Vec::new();
    for r in runs {
        let key = (r.profile.as_str(), r.algorithm.as_str(), r.flow_count);
        match groups.iter_mut().find(|g| (g.0, g.1, g.2) == key) {
            Some(g) => {
                if !g.3.contains(&r.variant.as_str()) {
                    g.3.push(&r.variant);
                }
            }
            None => groups.push((key.0, key.1, key.2, vec![&r.variant])),
        }
    }

    let mut out = Vec::new();
    for (profile, algorithm, flow_count, variants) in groups {
        let in_group = |r: &&RunRecord| {
            r.profile == profile && r.algorithm == algorithm && r.flow_count == flow_count
        };
        for v in &variants {
            let rows: Vec<_> = runs.iter().filter(in_group).filter(|r| r.variant == *v).collect();
            out.push(Aggregate::from_runs(&rows, v));
        }
        if variants.len() > 1 {
            let rows: Vec<_> = runs.iter().filter(in_group).collect();
            out.push(Aggregate::from_runs(&rows, "*"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, runs: Vec<RunRecord>) -> Self {
        let aggregates = aggregate(&runs);
        ExperimentReport {
            experiment: experiment.into(),
            runs,
            aggregates,
        }
    }

    pub fn find(&self, algorithm: &str, variant: &str, flow_count: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.algorithm == algorithm && a.variant == variant && a.flow_count == flow_count)
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(HEADER)?;
        for r in &self.runs {
            w.write_record([
                "run".to_string(),
                r.profile.clone(),
                r.algorithm.clone(),
                r.variant.clone(),
                r.flow_count.to_string(),
                r.run.to_string(),
                r.seed.to_string(),
                opt(r.before_max_load),
                r.after_max_load.to_string(),
                na(r.effectiveness_pct()),
                format!("{:.6}", r.elapsed_s),
                opt(r.generations),
                opt(r.stop_reason),
            ])?;
        }
        for a in &self.aggregates {
            w.write_record([
                "mean".to_string(),
                a.profile.clone(),
                a.algorithm.clone(),
                a.variant.clone(),
                a.flow_count.to_string(),
                a.runs.to_string(),
                String::new(),
                a.mean_before.map(|b| format!("{b:.3}")).unwrap_or_default(),
                format!("{:.3}", a.mean_after),
                na(a.effectiveness_pct()),
                format!("{:.6}", a.mean_elapsed_s),
                String::new(),
                String::new(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn na(v: Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(algorithm: &str, variant: &str, before: Option<u64>, after: u64) -> RunRecord {
        RunRecord {
            profile: "n10e39".into(),
            algorithm: algorithm.into(),
            variant: variant.into(),
            flow_count: 20,
            run: 0,
            seed: 1,
            before_max_load: before,
            after_max_load: after,
            elapsed_s: 0.5,
            generations: None,
            stop_reason: None,
        }
    }

    #[test]
    fn effectiveness_convention() {
        assert_eq!(effectiveness(Some(5.6), 2.8), Some(50));
        assert_eq!(effectiveness(Some(8.6), 4.0), Some(53));
        assert_eq!(effectiveness(Some(8.8), 4.8), Some(45));
        assert_eq!(effectiveness(Some(21.8), 11.6), Some(47));
        assert_eq!(effectiveness(Some(0.0), 0.0), None);
        assert_eq!(effectiveness(None, 3.0), None);
    }

    #[test]
    fn aggregates_pool_variants() {
        let runs = vec![
            record("SDNGALB", "", Some(6), 3),
            record("ACOLB", "ants=1", None, 7),
            record("SDNGALB", "", Some(4), 2),
            record("ACOLB", "ants=5", None, 5),
        ];
        let aggs = aggregate(&runs);
        let labels: Vec<_> = aggs.iter().map(|a| (a.algorithm.as_str(), a.variant.as_str())).collect();
        assert_eq!(
            labels,
            [("SDNGALB", ""), ("ACOLB", "ants=1"), ("ACOLB", "ants=5"), ("ACOLB", "*")]
        );
        assert_eq!(aggs[0].mean_before, Some(5.0));
        assert_eq!(aggs[0].mean_after, 2.5);
        assert_eq!(aggs[0].effectiveness_pct(), Some(50));
        assert_eq!(aggs[3].mean_after, 6.0);
        assert_eq!(aggs[3].runs, 2);
        assert_eq!(aggs[3].mean_before, None);
    }

    #[test]
    fn csv_layout() {
        let report = ExperimentReport::new("x", vec![record("DSPA", "", Some(0), 0)]);
        let csv = report.to_csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], HEADER.join(","));
        assert_eq!(lines[1], "run,n10e39,DSPA,,20,0,1,0,0,NA,0.500000,,");
        assert_eq!(lines[2], "mean,n10e39,DSPA,,20,1,,0.000,0.000,NA,0.500000,,");
        assert!(!csv.contains('\r'));
    }
}
