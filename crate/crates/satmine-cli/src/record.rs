//! Benchmark rows shared by the `mine` summary and `bench` CSV output.

use satmine::search::SearchStats;

pub const CSV_HEADER: &str =
    "dataset,m,n,density,theta,strategy,blocking,encoding,frequent,maximal,alpha,beta,sat,unsat,millis,status";

/// One (dataset, θ, strategy) cell.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub dataset: String,
    pub m: usize,
    pub n: usize,
    pub density: f64,
    pub theta: usize,
    pub strategy: String,
    pub blocking: String,
    pub encoding: String,
    pub frequent: usize,
    pub maximal: usize,
    pub stats: SearchStats,
    pub status: String,
}

impl RunRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.4},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.m,
            self.n,
            self.density,
            self.theta,
            self.strategy,
            self.blocking,
            self.encoding,
            self.frequent,
            self.maximal,
            self.stats.alpha,
            self.stats.beta,
            self.stats.sat,
            self.stats.unsat,
            self.stats.solve_millis,
            self.status,
        )
    }

    /// The one-line summary printed by `mine`; counts match the CSV fields.
    pub fn summary(&self) -> String {
        format!(
            "frequent={} maximal={} iterations={} alpha={} beta={} sat={} unsat={} time={}ms",
            self.frequent,
            self.maximal,
            self.stats.iterations,
            self.stats.alpha,
            self.stats.beta,
            self.stats.sat,
            self.stats.unsat,
            self.stats.solve_millis,
        )
    }
}
