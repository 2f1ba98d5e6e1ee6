use serde::{Deserialize, Serialize};

use super::config::CampaignConfig;

/// One line of the per-step statistics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub k: u64,
    /// Cumulative number of generated inputs.
    pub test_cases: u64,
    /// Unique feasible paths so far.
    pub ufp: usize,
    /// Paths first seen at this step.
    pub nfp: usize,
    /// Longest path length so far, in tokens.
    pub llp: usize,
    pub etime_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Saturation,
    LongestPath,
    KMax,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub subject: String,
    pub config: CampaignConfig,
    pub rows: Vec<CampaignRow>,
    pub k_longest: Option<u64>,
    pub k_saturation: Option<u64>,
    /// Largest predicted cost among the capped shapes.
    pub k_cap: u64,
    pub stop: StopReason,
    /// Inputs whose sampling or execution failed.
    pub skipped: u64,
    pub executions: u64,
}

pub const CSV_HEADER: [&str; 6] = ["k", "test_cases", "ufp", "nfp", "llp", "etime_ms"];

impl CampaignReport {
    pub fn final_row(&self) -> Option<&CampaignRow> {
        self.rows.last()
    }

    /// Zero every timing column.
    pub fn with_stable_time(mut self) -> Self {
        for r in &mut self.rows {
            r.etime_ms = 0.0;
        }
        self
    }
}

pub fn rows_to_csv(rows: &[CampaignRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.test_cases.to_string(),
            r.ufp.to_string(),
            r.nfp.to_string(),
            r.llp.to_string(),
            format!("{:.3}", r.etime_ms),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn rows_from_csv(bytes: &[u8]) -> Result<Vec<CampaignRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("expected header {}", CSV_HEADER.join(",")),
        )));
    }
    r.deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_round_trip() {
        let rows = vec![
            CampaignRow {
                k: 0,
                test_cases: 100,
                ufp: 1,
                nfp: 1,
                llp: 1,
                etime_ms: 0.25,
            },
            CampaignRow {
                k: 1,
                test_cases: 200,
                ufp: 2,
                nfp: 1,
                llp: 3,
                etime_ms: 1.5,
            },
        ];
        let bytes = rows_to_csv(&rows);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert_eq!(
            text.lines().next(),
            Some("k,test_cases,ufp,nfp,llp,etime_ms")
        );
        assert_eq!(rows_from_csv(&bytes).unwrap(), rows);
        assert!(rows_from_csv(b"k,ufp\n0,1\n").is_err());
    }
}
