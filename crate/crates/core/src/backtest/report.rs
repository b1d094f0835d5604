use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::BacktestResult;
use crate::error::{Result, VarError};
use crate::var_engine::{Method, Mode};

pub const LONG_HEADER: &str =
    "dataset,method,mode,confidence,N,x,expected,lr_uc,crit_uc,reject_uc,lr_ind,lr_cc,crit_cc,reject_cc,classification";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRun {
    pub dataset: String,
    pub method: Method,
    pub mode: Mode,
    pub confidence: f64,
    pub result: BacktestResult,
}

/// The three grids for one confidence level, as delimited text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceTables {
    pub confidence: f64,
    pub exceedances: String,
    pub lr_uc: String,
    pub lr_cc: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    /// Sorted by dataset, confidence, method, mode.
    pub runs: Vec<BacktestRun>,
}

pub fn backtest_report(mut runs: Vec<BacktestRun>) -> Result<BacktestReport> {
    if runs.is_empty() {
        return Err(VarError::InvalidArgument("no backtest runs to report".into()));
    }
    runs.sort_by(|a, b| {
        a.dataset
            .cmp(&b.dataset)
            .then(a.confidence.total_cmp(&b.confidence))
            .then(a.method.cmp(&b.method))
            .then(a.mode.cmp(&b.mode))
    });
    Ok(BacktestReport { runs })
}

impl BacktestReport {
    pub fn to_long_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{LONG_HEADER}").unwrap();
        for run in &self.runs {
            let r = &run.result;
            writeln!(
                s,
                "{},{},{},{},{},{},{},{:.3},{:.3},{},{:.3},{:.3},{:.3},{},{}",
                run.dataset,
                run.method,
                run.mode,
                run.confidence,
                r.n,
                r.x,
                r.expected,
                r.lr_uc,
                r.crit_uc,
                r.reject_uc,
                r.lr_ind,
                r.lr_cc,
                r.crit_cc,
                r.reject_cc,
                r.classification
            )
            .unwrap();
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| VarError::Io(e.to_string()))
    }

    pub fn confidences(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.runs.iter().map(|r| r.confidence).collect();
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    /// Grids with one row block per dataset and one column per method/mode present.
    pub fn tables(&self, confidence: f64) -> ConfidenceTables {
        let runs: Vec<&BacktestRun> = self.runs.iter().filter(|r| r.confidence == confidence).collect();
        let columns: BTreeSet<(Method, Mode)> = runs.iter().map(|r| (r.method, r.mode)).collect();
        let mut datasets: Vec<&str> = runs.iter().map(|r| r.dataset.as_str()).collect();
        datasets.dedup();
        let cell = |dataset: &str, col: &(Method, Mode)| {
            runs.iter()
                .find(|r| r.dataset == dataset && (r.method, r.mode) == *col)
                .map(|r| r.result)
        };
        let header = |lead: &str| {
            let mut h = format!("dataset,{lead}");
            for (m, md) in &columns {
                write!(h, ",{m} {md}").unwrap();
            }
            h
        };
        let row = |dataset: &str, label: &str, f: &dyn Fn(&BacktestResult) -> String| {
            let mut line = format!("{dataset},{label}");
            for col in &columns {
                line.push(',');
                if let Some(r) = cell(dataset, col) {
                    line.push_str(&f(&r));
                }
            }
            line
        };

        let mut exc = header("quantity");
        let mut uc = header("quantity");
        let mut cc = header("quantity");
        for d in &datasets {
            for (label, f) in [
                ("x", &(|r: &BacktestResult| r.x.to_string()) as &dyn Fn(&BacktestResult) -> String),
                ("expected", &|r: &BacktestResult| r.expected.to_string()),
                ("N", &|r: &BacktestResult| r.n.to_string()),
                ("classification", &|r: &BacktestResult| r.classification.to_string()),
            ] {
                write!(exc, "\n{}", row(d, label, f)).unwrap();
            }
            for (label, f) in [
                ("lr_uc", &(|r: &BacktestResult| format!("{:.3}", r.lr_uc)) as &dyn Fn(&BacktestResult) -> String),
                ("crit_uc", &|r: &BacktestResult| format!("{:.3}", r.crit_uc)),
                ("reject_uc", &|r: &BacktestResult| r.reject_uc.to_string()),
            ] {
                write!(uc, "\n{}", row(d, label, f)).unwrap();
            }
            for (label, f) in [
                ("lr_cc", &(|r: &BacktestResult| format!("{:.3}", r.lr_cc)) as &dyn Fn(&BacktestResult) -> String),
                ("crit_cc", &|r: &BacktestResult| format!("{:.3}", r.crit_cc)),
                ("reject_cc", &|r: &BacktestResult| r.reject_cc.to_string()),
            ] {
                write!(cc, "\n{}", row(d, label, f)).unwrap();
            }
        }
        for t in [&mut exc, &mut uc, &mut cc] {
            t.push('\n');
        }
        ConfidenceTables {
            confidence,
            exceedances: exc,
            lr_uc: uc,
            lr_cc: cc,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backtest::{run_backtest, ExceedanceSequence};

    fn run(dataset: &str, method: Method, mode: Mode, x: usize) -> BacktestRun {
        let mut ind = vec![false; 200];
        for b in ind.iter_mut().step_by(200 / x.max(1)).take(x) {
            *b = true;
        }
        let seq = ExceedanceSequence::new(ind, 0.05).unwrap();
        BacktestRun {
            dataset: dataset.into(),
            method,
            mode,
            confidence: 0.95,
            result: run_backtest(&seq, 0.05, 0.05).unwrap(),
        }
    }

    #[test]
    fn empty_collection_is_an_error() {
        assert!(backtest_report(vec![]).is_err());
    }

    #[test]
    fn single_run_gives_one_cell_tables() {
        let rep = backtest_report(vec![run("dax", Method::Hs, Mode::Direct, 12)]).unwrap();
        let long = rep.to_long_csv();
        assert_eq!(long.lines().count(), 2);
        assert!(long.lines().nth(1).unwrap().starts_with("dax,HS,direct,0.95,200,12,10,"));
        let t = rep.tables(0.95);
        assert_eq!(t.exceedances.lines().next().unwrap(), "dataset,quantity,HS direct");
        assert!(t.exceedances.contains("dax,x,12\n"));
        assert!(t.lr_uc.contains("dax,crit_uc,3.841\n"));
        assert!(t.lr_cc.contains("dax,crit_cc,5.991\n"));
    }

    #[test]
    fn grid_columns_follow_method_and_mode_order() {
        let rep = backtest_report(vec![
            run("b", Method::VcT, Mode::Scaled, 8),
            run("a", Method::Hs, Mode::Scaled, 10),
            run("a", Method::Hs, Mode::Direct, 12),
            run("b", Method::Hs, Mode::Direct, 9),
        ])
        .unwrap();
        let t = rep.tables(0.95);
        assert_eq!(
            t.exceedances.lines().next().unwrap(),
            "dataset,quantity,HS direct,HS scaled,VC-t scaled"
        );
        assert!(t.exceedances.contains("a,x,12,10,\n"));
        assert!(t.exceedances.contains("b,x,9,,8\n"));
        assert_eq!(rep.runs[0].dataset, "a");
        assert_eq!(rep.confidences(), vec![0.95]);
    }
}
