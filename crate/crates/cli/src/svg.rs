//! Deterministic SVG rendering of two-dimensional bodies: labeled axes, the
//! polygon path, and annotated vertices inside a 400 x 400 viewbox.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use okb_core::exactgeom::{format_rational, rat_int, Rational};
use okb_core::{ConvexBody, Error, Result};

const VIEW: i64 = 400;
const MARGIN: i64 = 48;

/// Exact fixed-point decimal with three digits, for reproducible output.
fn dec3(value: &Rational) -> String {
    let scaled = (value * rat_int(1000)).round();
    let n: BigInt = scaled.to_integer();
    let sign = if n.is_negative() { "-" } else { "" };
    let abs = n.abs();
    let (int_part, frac_part) = (
        &abs / BigInt::from(1000),
        &abs % BigInt::from(1000),
    );
    format!("{sign}{int_part}.{frac_part:03}")
}

/// Renders a nonempty two-dimensional body.
pub fn render_svg(body: &ConvexBody) -> Result<String> {
    if body.is_empty() {
        return Err(Error::EmptyBody);
    }
    let polytope = &body.polytope;
    if polytope.ambient_dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "svg rendering needs a two-dimensional body, got ambient dimension {}",
            polytope.ambient_dim()
        )));
    }
    let vertices = polytope.vertices();
    let coord = |v: &okb_core::QVector, i: usize| v.coord(i).clone();
    let min_x = vertices.iter().map(|v| coord(v, 0)).min().expect("nonempty");
    let max_x = vertices.iter().map(|v| coord(v, 0)).max().expect("nonempty");
    let min_y = vertices.iter().map(|v| coord(v, 1)).min().expect("nonempty");
    let max_y = vertices.iter().map(|v| coord(v, 1)).max().expect("nonempty");
    // Include the origin so the axes are always in view.
    let min_x = min_x.min(Rational::from_integer(BigInt::from(0)));
    let min_y = min_y.min(Rational::from_integer(BigInt::from(0)));
    let span_x = &max_x - &min_x;
    let span_y = &max_y - &min_y;
    let span = span_x.max(span_y).max(rat_int(1));
    let scale = rat_int(VIEW - 2 * MARGIN) / span;
    let to_px = |v: &okb_core::QVector| -> (String, String) {
        let x = rat_int(MARGIN) + (coord(v, 0) - &min_x) * scale.clone();
        let y = rat_int(VIEW - MARGIN) - (coord(v, 1) - &min_y) * scale.clone();
        (dec3(&x), dec3(&y))
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{VIEW}\" height=\"{VIEW}\" \
         viewBox=\"0 0 {VIEW} {VIEW}\">\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes through the mapped origin.
    let origin = okb_core::QVector::from_ints(&[0, 0]);
    let (ox, oy) = to_px(&origin);
    out.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{oy}\" x2=\"{e}\" y2=\"{oy}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        m = MARGIN / 2,
        e = VIEW - MARGIN / 2
    ));
    out.push_str(&format!(
        "  <line x1=\"{ox}\" y1=\"{e}\" x2=\"{ox}\" y2=\"{m}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        m = MARGIN / 2,
        e = VIEW - MARGIN / 2
    ));
    out.push_str(&format!(
        "  <text x=\"{x}\" y=\"{oy}\" dy=\"-6\" font-size=\"14\">x&#8321;</text>\n",
        x = VIEW - MARGIN / 2 - 18
    ));
    out.push_str(&format!(
        "  <text x=\"{ox}\" y=\"{y}\" dx=\"6\" font-size=\"14\">x&#8322;</text>\n",
        y = MARGIN / 2 + 12
    ));

    // The body itself: polygon for 2-dimensional, stroke for a segment,
    // a dot for a point.
    let pixel_points: Vec<(String, String)> = vertices.iter().map(&to_px).collect();
    match vertices.len() {
        1 => {
            let (x, y) = &pixel_points[0];
            out.push_str(&format!(
                "  <circle cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"#1f4e9c\"/>\n"
            ));
        }
        2 => {
            let (x1, y1) = &pixel_points[0];
            let (x2, y2) = &pixel_points[1];
            out.push_str(&format!(
                "  <path d=\"M {x1} {y1} L {x2} {y2}\" stroke=\"#1f4e9c\" stroke-width=\"3\" fill=\"none\"/>\n"
            ));
        }
        _ => {
            // Vertices of a polygon in boundary order: sort by angle about
            // the centroid (exact comparisons on rational coordinates).
            let count = rat_int(vertices.len() as i64);
            let cx: Rational = vertices.iter().map(|v| coord(v, 0)).sum::<Rational>() / count.clone();
            let cy: Rational = vertices.iter().map(|v| coord(v, 1)).sum::<Rational>() / count;
            let mut ordered: Vec<usize> = (0..vertices.len()).collect();
            let half = |dx: &Rational, dy: &Rational| -> u8 {
                if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
                    0
                } else {
                    1
                }
            };
            ordered.sort_by(|&i, &j| {
                let (dxi, dyi) = (coord(&vertices[i], 0) - &cx, coord(&vertices[i], 1) - &cy);
                let (dxj, dyj) = (coord(&vertices[j], 0) - &cx, coord(&vertices[j], 1) - &cy);
                half(&dxi, &dyi).cmp(&half(&dxj, &dyj)).then_with(|| {
                    let cross = &dxi * &dyj - &dyi * &dxj;
                    if cross.is_positive() {
                        std::cmp::Ordering::Less
                    } else if cross.is_negative() {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Equal
                    }
                })
            });
            let mut path = String::new();
            for (k, &i) in ordered.iter().enumerate() {
                let (x, y) = &pixel_points[i];
                path.push_str(if k == 0 { "M " } else { "L " });
                path.push_str(&format!("{x} {y} "));
            }
            path.push('Z');
            out.push_str(&format!(
                "  <path d=\"{path}\" stroke=\"#1f4e9c\" stroke-width=\"2\" \
                 fill=\"#1f4e9c\" fill-opacity=\"0.25\"/>\n"
            ));
        }
    }

    // Vertex markers with exact coordinates.
    for (v, (x, y)) in vertices.iter().zip(&pixel_points) {
        out.push_str(&format!(
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"#9c1f1f\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{x}\" y=\"{y}\" dx=\"6\" dy=\"-6\" font-size=\"11\">({}, {})</text>\n",
            format_rational(v.coord(0)),
            format_rational(v.coord(1))
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{m}\" y=\"{y}\" font-size=\"12\">{} body ({})</text>\n",
        body.kind.as_str(),
        body.flag_label,
        m = MARGIN / 2,
        y = VIEW - 8
    ));
    out.push_str("</svg>\n");
    Ok(out)
}
