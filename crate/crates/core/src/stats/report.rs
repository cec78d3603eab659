use serde::{Deserialize, Serialize};

/// One check in a statistics report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    /// Test family, such as `region`, `ktuple` or `density`.
    pub test: String,
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<TestRecord>,
}

impl Report {
    pub fn push(
        &mut self,
        test: &str,
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        pass: bool,
    ) {
        self.records.push(TestRecord {
            test: test.to_string(),
            name: name.into(),
            statistic,
            threshold,
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&format!(
                "{} {:<8} {:<28} statistic {:>12.6} threshold {:>10.4}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.test,
                r.name,
                r.statistic,
                r.threshold
            ));
        }
        s
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("plain record serializes"));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_round_trip() {
        let mut r = Report::default();
        r.push("region", "octant +++", 0.4, 3.0, true);
        r.push("ktuple", "k=2 g=8", 120.0, 100.9, false);
        let lines: Vec<TestRecord> = r
            .to_json_lines()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines, r.records);
        assert!(!r.all_pass());
        assert!(r.to_text().starts_with("PASS"));
    }
}
