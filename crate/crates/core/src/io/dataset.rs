use crate::error::{Error, Result};
use crate::features::{FeatureDataset, FeatureSchema, FeatureVector};
use crate::signal::{MovementClass, TrialKey};

const LEADING: [&str; 3] = ["subject", "trial", "window"];
const LABEL: &str = "label";

/// CSV with columns `subject,trial,window,<slot names…>,label`. Values use the
/// shortest representation that parses back to the same bits.
pub fn write_feature_dataset(ds: &FeatureDataset) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
    header.extend(ds.schema.names());
    header.push(LABEL.into());
    w.write_record(&header)?;
    for v in &ds.vectors {
        if v.values.len() != ds.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "vector of trial {} has {} values for {} columns",
                v.trial,
                v.values.len(),
                ds.schema.len()
            )));
        }
        let mut rec = vec![
            v.trial.subject.clone(),
            v.trial.index.to_string(),
            v.window_index.to_string(),
        ];
        rec.extend(v.values.iter().map(|x| x.to_string()));
        rec.push(v.label.name().into());
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn read_feature_dataset(bytes: &[u8]) -> Result<FeatureDataset> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let n = header.len();
    if n < LEADING.len() + 1 || header[..LEADING.len()] != LEADING || header[n - 1] != LABEL {
        return Err(Error::SchemaMismatch(format!(
            "header must be `subject,trial,window,<features…>,label`, found `{}`",
            header.join(",")
        )));
    }
    let schema = FeatureSchema::from_names(&header[LEADING.len()..n - 1])?;
    let mut vectors = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let bad = |msg: String| Error::Parse { line, message: msg };
        if rec.len() != n {
            return Err(bad(format!("expected {n} fields, found {}", rec.len())));
        }
        let index: usize = rec[1]
            .parse()
            .map_err(|_| bad(format!("bad trial index `{}`", &rec[1])))?;
        let window: usize = rec[2]
            .parse()
            .map_err(|_| bad(format!("bad window index `{}`", &rec[2])))?;
        let label: MovementClass = rec[n - 1]
            .parse()
            .map_err(|_| bad(format!("unknown label `{}`", &rec[n - 1])))?;
        let values = (LEADING.len()..n - 1)
            .map(|j| {
                let v: f64 = rec[j]
                    .parse()
                    .map_err(|_| bad(format!("`{}` is not a number", &rec[j])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(bad(format!("non-finite value in column `{}`", header[j])))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        vectors.push(FeatureVector {
            values,
            label,
            trial: TrialKey {
                subject: rec[0].to_string(),
                class: label,
                index,
            },
            window_index: window,
        });
    }
    Ok(FeatureDataset { schema, vectors })
}
