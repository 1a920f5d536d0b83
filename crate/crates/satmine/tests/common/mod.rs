//! Shared fixtures for the integration suites.
#![allow(dead_code)]

pub mod pb_oracle;

use std::path::Path;

use satmine::dataset::ItemsetDatabase;

/// The 6×16 reference database used throughout the suites (items A..P).
pub const TABLE1_MATRIX: &str = "\
A,B,C,D,E,F,G,H,I,J,K,L,M,N,O,P
1,0,0,0,1,0,1,0,0,0,1,0,0,1,0,0
0,0,1,0,1,0,0,1,0,0,0,1,0,1,0,0
1,0,0,1,0,0,0,1,0,1,0,0,0,0,1,0
0,1,0,1,0,0,0,1,0,1,0,0,0,1,0,0
1,0,0,1,0,0,0,1,0,1,0,0,0,1,0,1
1,0,0,0,1,0,1,0,0,0,1,0,0,1,0,1
";

pub fn table1() -> ItemsetDatabase {
    ItemsetDatabase::parse_matrix(TABLE1_MATRIX, Path::new("table1.csv")).unwrap()
}
