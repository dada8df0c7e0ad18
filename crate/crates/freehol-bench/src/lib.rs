//! Shared fixtures for the criterion benches: deterministic series and
//! tuples at the sizes the hot paths care about.

use freehol::harness::{gen_row_contraction, gen_series, SeriesProfile};
use freehol::{FreeSeries, OperatorTuple};

pub fn dense_poly(n: usize, degree: usize) -> FreeSeries {
    gen_series(0xBE5C, n, degree, &SeriesProfile::Polynomial).expect("series generates")
}

pub fn geometric_series(n: usize, degree: usize, ratio: f64) -> FreeSeries {
    gen_series(0xBE5C, n, degree, &SeriesProfile::Geometric { ratio }).expect("series generates")
}

pub fn contraction(n: usize, d: usize, target: f64) -> OperatorTuple {
    gen_row_contraction(0xBE5C, n, d, target).expect("tuple generates")
}
