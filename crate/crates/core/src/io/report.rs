use std::fmt::Write;

use crate::eval::{ConfusionMatrix, CvReport};
use crate::signal::MovementClass;

/// Positions of the matrix classes in result-table order.
fn table_order(classes: &[MovementClass]) -> Vec<usize> {
    MovementClass::TABLE_ORDER
        .iter()
        .filter_map(|c| classes.iter().position(|k| k == c))
        .collect()
}

fn pct(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
}

/// Confusion matrix as CSV, rows true class, columns predicted, table order.
pub fn confusion_csv(m: &ConfusionMatrix) -> String {
    let order = table_order(&m.classes);
    let mut out = String::from("true\\predicted");
    for &j in &order {
        write!(out, ",{}", m.classes[j].code()).unwrap();
    }
    out.push('\n');
    for &i in &order {
        out.push_str(m.classes[i].code());
        for &j in &order {
            write!(out, ",{}", m.counts[i][j]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One line per fold: repetition, fold, selected dimensionality, accuracy.
pub fn folds_csv(r: &CvReport) -> String {
    let mut out = String::from("repetition,fold,selected,accuracy\n");
    for f in &r.folds {
        let sel = f.selected.map_or(String::new(), |s| s.to_string());
        writeln!(
            out,
            "{},{},{},{}",
            f.repetition + 1,
            f.fold + 1,
            sel,
            f.accuracy
        )
        .unwrap();
    }
    out
}

fn confusion_table(m: &ConfusionMatrix, out: &mut String) {
    let order = table_order(&m.classes);
    out.push_str("true\\pred");
    for &j in &order {
        write!(out, "{:>8}", m.classes[j].code()).unwrap();
    }
    out.push('\n');
    for &i in &order {
        write!(out, "{:<9}", m.classes[i].code()).unwrap();
        for &j in &order {
            write!(out, "{:>8}", m.counts[i][j]).unwrap();
        }
        out.push('\n');
    }
}

/// Human-readable summary: folds, per-class recall and aggregated confusion.
pub fn format_report_text(r: &CvReport) -> String {
    let mut out = String::new();
    let order = table_order(&r.classes);
    writeln!(
        out,
        "seed {}  folds {}  balanced {}",
        r.seed,
        r.folds.len(),
        r.balanced
    )
    .unwrap();
    out.push('\n');
    out.push_str("rep  fold  selected  accuracy(%)\n");
    for f in &r.folds {
        let sel = f.selected.map_or("-".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{:>3}  {:>4}  {:>8}  {:>11.2}",
            f.repetition + 1,
            f.fold + 1,
            sel,
            f.accuracy
        )
        .unwrap();
    }
    out.push('\n');
    let recall = r.confusion.recall();
    for &i in &order {
        write!(out, "{:>8}", r.classes[i].code()).unwrap();
    }
    out.push_str("  average\n");
    for &i in &order {
        write!(out, "{:>8}", pct(recall[i])).unwrap();
    }
    writeln!(out, "  {:.2}", r.accuracy).unwrap();
    out.push('\n');
    writeln!(
        out,
        "overall accuracy {:.2}%  mean fold accuracy {:.2}%",
        r.accuracy, r.mean_fold_accuracy
    )
    .unwrap();
    out.push('\n');
    confusion_table(&r.confusion, &mut out);
    out
}

/// One row per subject with per-class recall and the average, plus a summary
/// row over all subjects.
pub fn format_subject_table(rows: &[(String, CvReport)]) -> String {
    let mut classes: Vec<MovementClass> = rows
        .iter()
        .flat_map(|(_, r)| r.classes.iter().copied())
        .collect();
    classes.sort();
    classes.dedup();
    let order = table_order(&classes);
    let mut out = format!("{:<12}", "subject");
    for &i in &order {
        write!(out, "{:>8}", classes[i].code()).unwrap();
    }
    out.push_str("  average\n");
    for (name, r) in rows {
        write!(out, "{name:<12}").unwrap();
        let recall = r.confusion.recall();
        for &i in &order {
            let v = r
                .classes
                .iter()
                .position(|c| *c == classes[i])
                .and_then(|k| recall[k]);
            write!(out, "{:>8}", pct(v)).unwrap();
        }
        writeln!(out, "  {:.2}", r.accuracy).unwrap();
    }
    if rows.len() > 1 {
        let n = rows.len() as f64;
        write!(out, "{:<12}", "mean").unwrap();
        for &i in &order {
            let vals: Vec<f64> = rows
                .iter()
                .filter_map(|(_, r)| {
                    let k = r.classes.iter().position(|c| *c == classes[i])?;
                    r.confusion.recall()[k]
                })
                .collect();
            let m = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
            write!(out, "{:>8}", pct(m)).unwrap();
        }
        writeln!(
            out,
            "  {:.2}",
            rows.iter().map(|(_, r)| r.accuracy).sum::<f64>() / n
        )
        .unwrap();
    }
    out
}
