//! Data behind the figures, sampled at left endpoints of the depth-`n` intervals.

use std::f64::consts::TAU;

use fraclie::cantor::{FractalSet, Staircase};
use fraclie::io::Table;

use crate::CliError;

/// Translation `S(x - a) + shift` and scaling `c S(x)` used for figure 5.
pub const FIG5_SHIFT_A: f64 = 1.0 / 3.0;
pub const FIG5_SHIFT: f64 = 0.5;
pub const FIG5_SCALE: f64 = 1.5;

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `f(x, y) = sin(2πx) cos(2πy)` on the product grid; `sin(x) cos(y)` with `bodytext`.
pub fn figure1(set: &FractalSet, bodytext: bool) -> Table {
    let pts = set.left_endpoints();
    let k = if bodytext { 1.0 } else { TAU };
    let mut t = Table::new(header(&["x", "y", "f"])).meta(
        "formula",
        if bodytext {
            "sin(x)*cos(y)"
        } else {
            "sin(2πx)*cos(2πy)"
        },
    );
    for &x in &pts {
        for &y in &pts {
            t.rows.push(vec![x, y, (k * x).sin() * (k * y).cos()]);
        }
    }
    t
}

/// `U = sin(2πX)`, `V = cos(2πY)` on the product grid.
pub fn figure2(set: &FractalSet) -> Table {
    let pts = set.left_endpoints();
    let mut t =
        Table::new(header(&["x", "y", "U", "V"])).meta("formula", "U = sin(2πx), V = cos(2πy)");
    for &x in &pts {
        for &y in &pts {
            t.rows.push(vec![x, y, (TAU * x).sin(), (TAU * y).cos()]);
        }
    }
    t
}

/// The 0-form `sin(2πx)` on the set.
pub fn figure3(set: &FractalSet) -> Table {
    let mut t = Table::new(header(&["x", "f"])).meta("formula", "sin(2πx)");
    t.rows = set
        .left_endpoints()
        .into_iter()
        .map(|x| vec![x, (TAU * x).sin()])
        .collect();
    t
}

/// Staircase with its translated, scaled and oscillatory images.
///
/// `S` is 0 to the left of the bounds, so the translated column starts flat.
pub fn figure5(s: &Staircase) -> Table {
    let mut t = Table::new(header(&[
        "x",
        "S(x)",
        "translation",
        "scaling",
        "cos(S(x))",
        "sin(S(x))",
    ]))
    .meta(
        "translation",
        format!("S(x - {FIG5_SHIFT_A}) + {FIG5_SHIFT}"),
    )
    .meta("scaling", format!("{FIG5_SCALE}*S(x)"));
    t.rows = s
        .source()
        .left_endpoints()
        .into_iter()
        .map(|x| {
            let u = s.value(x);
            vec![
                x,
                u,
                s.value(x - FIG5_SHIFT_A) + FIG5_SHIFT,
                FIG5_SCALE * u,
                u.cos(),
                u.sin(),
            ]
        })
        .collect();
    t
}

pub fn figure(
    which: u32,
    set: &FractalSet,
    s: &Staircase,
    bodytext: bool,
) -> Result<Table, CliError> {
    match which {
        1 => Ok(figure1(set, bodytext)),
        2 => Ok(figure2(set)),
        3 => Ok(figure3(set)),
        5 => Ok(figure5(s)),
        4 => Err(CliError::Usage(
            "there is no figure 4; the staircase figure is 5".into(),
        )),
        n => Err(CliError::Usage(format!(
            "unknown figure {n}; expected 1, 2, 3 or 5"
        ))),
    }
}
