//! Per-author commit-association predictors.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::AuthorActivity;

/// Column names, in [`FeatureVector::to_array`] order.
pub const FEATURE_NAMES: [&str; 6] = [
    "Tot.FilesChanged",
    "Uniq.File.Exten",
    "Std.File.pCommit",
    "Avg.File.pCommit",
    "Tot.uniq.Projects",
    "Median.Project.pCommit",
];

/// Marker returned by [`file_extension`] for files without an extension.
pub const NO_EXTENSION: &str = "<none>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Files changed across all commits, duplicates included.
    pub tot_files_changed: u64,
    pub uniq_file_exten: u64,
    /// Sample standard deviation of files per commit; 0 for one commit.
    pub std_file_per_commit: f64,
    pub avg_file_per_commit: f64,
    pub tot_uniq_projects: u64,
    pub median_project_per_commit: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.tot_files_changed as f64,
            self.uniq_file_exten as f64,
            self.std_file_per_commit,
            self.avg_file_per_commit,
            self.tot_uniq_projects as f64,
            self.median_project_per_commit,
        ]
    }
}

/// Lowercased text after the last `.` of the final path segment.
///
/// `"Makefile"` and `"name."` give [`NO_EXTENSION`]; `".gitignore"` gives
/// `"gitignore"`.
pub fn file_extension(path: &str) -> String {
    let segment = path.rsplit('/').next().unwrap_or(path);
    match segment.rsplit_once('.') {
        Some((_, ext)) if !ext.is_empty() => ext.to_lowercase(),
        _ => String::from(NO_EXTENSION),
    }
}

pub fn extract_features(author: &AuthorActivity) -> FeatureVector {
    let commits = author.commits();
    let file_counts: Vec<f64> = commits.iter().map(|c| c.files.len() as f64).collect();
    let tot_files_changed: u64 = commits.iter().map(|c| c.files.len() as u64).sum();

    let extensions: BTreeSet<String> = commits
        .iter()
        .flat_map(|c| c.files.iter())
        .map(|f| file_extension(f))
        .collect();
    let projects: BTreeSet<&str> = commits
        .iter()
        .flat_map(|c| c.projects.iter())
        .map(String::as_str)
        .collect();
    let mut project_counts: Vec<f64> = commits.iter().map(|c| c.projects.len() as f64).collect();

    FeatureVector {
        tot_files_changed,
        uniq_file_exten: extensions.len() as u64,
        std_file_per_commit: sample_std(&file_counts),
        avg_file_per_commit: tot_files_changed as f64 / commits.len() as f64,
        tot_uniq_projects: projects.len() as u64,
        median_project_per_commit: median(&mut project_counts),
    }
}

fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    libm::sqrt(ss / (n - 1) as f64)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    }
}
