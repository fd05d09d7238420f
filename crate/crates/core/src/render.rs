//! SVG drawings of planar F-subsets.
//!
//! Output is a pure function of the exact vertex data: every coordinate is
//! rounded from a rational to three decimals, so repeated runs produce
//! identical bytes.

use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{fmt_point, RationalPolyhedron};

const WIDTH: i64 = 480;
const MARGIN: i64 = 48;
const PALETTE: [&str; 4] = ["#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad"];

/// One outline to draw.
#[derive(Debug, Clone)]
pub struct Layer {
    pub label: String,
    pub polyhedron: RationalPolyhedron,
}

/// Reduces a polyhedron in three coordinates to the plane spanned by the
/// two kept coordinates (0-based).
pub fn project(delta: &RationalPolyhedron, keep: [usize; 2]) -> Result<RationalPolyhedron> {
    match delta.dim() {
        2 if keep == [0, 1] => Ok(delta.clone()),
        3 if keep[0] < keep[1] && keep[1] < 3 => {
            let drop = (0..3).find(|i| !keep.contains(i)).expect("one coordinate left");
            delta.project_out(drop)
        }
        d => Err(Error::InvalidInput(format!("cannot draw dimension {d} with projection {keep:?}"))),
    }
}

/// Renders planar polyhedra into one SVG, with the region above each
/// staircase shaded and every vertex labelled exactly.
pub fn render_svg(layers: &[Layer], axes: [&str; 2]) -> Result<String> {
    if let Some(l) = layers.iter().find(|l| l.polyhedron.dim() != 2) {
        return Err(Error::InvalidInput(format!("layer {} is not planar", l.label)));
    }
    let extent = layers
        .iter()
        .flat_map(|l| l.polyhedron.vertices().iter().flatten())
        .fold(BigRational::one(), |acc, c| if *c > acc { c.clone() } else { acc });
    let extent = (extent + BigRational::one()).ceil();
    let scale = BigRational::new(BigInt::from(WIDTH - 2 * MARGIN), BigInt::one()) / &extent;
    let px = |x: &BigRational| fixed(&(x * &scale + BigRational::from_integer(MARGIN.into())));
    let py = |y: &BigRational| fixed(&(BigRational::from_integer((WIDTH - MARGIN).into()) - y * &scale));

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{WIDTH}" viewBox="0 0 {WIDTH} {WIDTH}" font-family="monospace" font-size="11">"#).unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{WIDTH}" fill="white"/>"#).unwrap();

    let zero = BigRational::zero();
    let top = &extent;
    writeln!(out, r##"<g stroke="#999" stroke-width="1">"##).unwrap();
    let mut k = BigInt::zero();
    while BigRational::from_integer(k.clone()) <= *top {
        let t = BigRational::from_integer(k.clone());
        writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-dasharray="2,4"/>"#, px(&t), py(&zero), px(&t), py(top)).unwrap();
        writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-dasharray="2,4"/>"#, px(&zero), py(&t), px(top), py(&t)).unwrap();
        k += 1;
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r##"<g stroke="black" stroke-width="1.5">"##).unwrap();
    writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(&zero), py(&zero), px(top), py(&zero)).unwrap();
    writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(&zero), py(&zero), px(&zero), py(top)).unwrap();
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, px(top), fixed(&BigRational::from_integer((WIDTH - MARGIN + 16).into())), escape(axes[0])).unwrap();
    writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, fixed(&BigRational::from_integer((MARGIN - 24).into())), py(top), escape(axes[1])).unwrap();

    for (i, layer) in layers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut vs: Vec<_> = layer.polyhedron.vertices().to_vec();
        vs.sort();
        writeln!(out, r#"<g id="layer{i}" stroke="{color}" fill="{color}">"#).unwrap();
        if let (Some(first), Some(last)) = (vs.first(), vs.last()) {
            let mut outline = vec![(first[0].clone(), top.clone())];
            outline.extend(vs.iter().map(|v| (v[0].clone(), v[1].clone())));
            outline.push((top.clone(), last[1].clone()));
            let pts: Vec<String> = outline.iter().map(|(x, y)| format!("{},{}", px(x), py(y))).collect();
            let mut region = pts.clone();
            region.push(format!("{},{}", px(top), py(top)));
            writeln!(out, r#"<polygon points="{}" fill-opacity="0.12" stroke="none"/>"#, region.join(" ")).unwrap();
            writeln!(out, r#"<polyline points="{}" fill="none" stroke-width="2"/>"#, pts.join(" ")).unwrap();
            for v in &vs {
                writeln!(out, r#"<circle cx="{}" cy="{}" r="3.5"/>"#, px(&v[0]), py(&v[1])).unwrap();
                writeln!(out, r#"<text x="{}" y="{}" stroke="none">{}</text>"#, px(&(&v[0] + &extent / BigInt::from(40))), py(&(&v[1] + &extent / BigInt::from(40))), escape(&fmt_point(v))).unwrap();
            }
        }
        let ly = BigRational::from_integer((MARGIN / 2 + 14 * i as i64).into());
        writeln!(out, r#"<text x="{}" y="{}" stroke="none">{}</text>"#, fixed(&BigRational::from_integer((WIDTH / 2).into())), fixed(&ly), escape(&layer.label)).unwrap();
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

/// Three-decimal rendering with round-half-up, computed exactly.
fn fixed(x: &BigRational) -> String {
    let scaled = x * BigInt::from(1000);
    let r = (scaled + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let (q, rem) = r.abs().div_rem(&BigInt::from(1000));
    let sign = if r.is_negative() { "-" } else { "" };
    if rem.is_zero() {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{}", format!("{rem:0>3}").trim_end_matches('0'))
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Labels a layer with its exact vertex list.
pub fn layer_label(name: &str, delta: &RationalPolyhedron) -> String {
    let vs: Vec<String> = delta.vertices().iter().map(|v| fmt_point(v)).collect();
    if vs.is_empty() {
        format!("{name}: empty")
    } else {
        format!("{name}: {}", vs.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn fixed_rounding() {
        assert_eq!(fixed(&rat(1, 3)), "0.333");
        assert_eq!(fixed(&rat(2, 3)), "0.667");
        assert_eq!(fixed(&rat(5, 1)), "5");
        assert_eq!(fixed(&rat(-1, 8)), "-0.125");
        assert_eq!(fixed(&rat(1, 2)), "0.5");
    }
}
