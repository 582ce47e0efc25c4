//! SVG figure of the decomposition: delta to the right, epsilon upward.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use horosark_core::exactnum::Rat;
use horosark_core::family::{Decomposition, Strip, WallKind};
use horosark_core::plane::Point2;
use horosark_core::sarkisov::MoriChain;

use crate::fixture::Loaded;
use crate::report::{class_name, ids};

const SIZE: i64 = 600;
const MARGIN: i64 = 60;
const DIGITS: usize = 20;

/// Decimal rendering with `DIGITS` significant digits, trailing zeros dropped.
pub fn decimal(x: &Rat) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let x = x.abs();
    let ten = BigInt::from(10);
    let digits = |n: &BigInt| n.to_string().len() as i64;
    let mut k = DIGITS as i64 - 1 - (digits(x.numer()) - digits(x.denom()));
    let scaled = |k: i64| -> Rat {
        if k >= 0 {
            &x * Rat::from_integer(ten.pow(k as u32))
        } else {
            &x / Rat::from_integer(ten.pow((-k) as u32))
        }
    };
    let low = Rat::from_integer(ten.pow(DIGITS as u32 - 1));
    let high = Rat::from_integer(ten.pow(DIGITS as u32));
    while scaled(k) < low {
        k += 1;
    }
    while scaled(k) >= high {
        k -= 1;
    }
    let v = scaled(k);
    let mut n = (v.clone() + Rat::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    if Rat::from_integer(n.clone()) >= high {
        n /= &ten;
        k -= 1;
    }
    let s = n.to_string();
    let body = if k <= 0 {
        let mut t = s;
        t.extend(std::iter::repeat('0').take((-k) as usize));
        t
    } else if (k as usize) < s.len() {
        let (int, frac) = s.split_at(s.len() - k as usize);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    } else {
        let zeros = "0".repeat(k as usize - s.len());
        format!("0.{}", format!("{zeros}{s}").trim_end_matches('0'))
    };
    format!("{sign}{body}")
}

struct Frame {
    delta_lo: Rat,
    delta_span: Rat,
    eps_hi: Rat,
    eps_span: Rat,
}

impl Frame {
    fn new(strip: &Strip, eps_hi: Rat) -> Frame {
        let mut eps_span = &eps_hi - &strip.eps_lo;
        if !eps_span.is_positive() {
            eps_span = Rat::one();
        }
        Frame { delta_lo: strip.delta_lo.clone(), delta_span: &strip.delta_hi - &strip.delta_lo, eps_hi, eps_span }
    }

    fn xy(&self, p: &Point2) -> (String, String) {
        let inner = Rat::from_integer(BigInt::from(SIZE - 2 * MARGIN));
        let m = Rat::from_integer(BigInt::from(MARGIN));
        let x = &m + &inner * (&p.delta - &self.delta_lo) / &self.delta_span;
        let y = &m + &inner * (&self.eps_hi - &p.eps) / &self.eps_span;
        (decimal(&x), decimal(&y))
    }
}

fn wall_color(k: &WallKind) -> (&'static str, &'static str) {
    match k {
        WallKind::Fibration => ("fibration", "red"),
        WallKind::Divisorial { .. } => ("divisorial", "blue"),
        WallKind::Flip => ("flip", "black"),
    }
}

fn set_text(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn header(out: &mut String) {
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
}

fn axes(out: &mut String, frame: &Frame, strip: &Strip) {
    let corner = |d: &Rat, e: &Rat| frame.xy(&Point2::new(d.clone(), e.clone()));
    let eps_lo = &frame.eps_hi - &frame.eps_span;
    let (x0, y0) = corner(&strip.delta_lo, &eps_lo);
    let (x1, _) = corner(&strip.delta_hi, &eps_lo);
    let (_, y1) = corner(&strip.delta_lo, &frame.eps_hi);
    out.push_str("<g class=\"axes\" stroke=\"gray\">\n");
    writeln!(out, "<line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\"/>").unwrap();
    writeln!(out, "<line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\"/>").unwrap();
    writeln!(out, "<text x=\"{x1}\" y=\"{y0}\" dy=\"20\" text-anchor=\"end\">delta = {}</text>", strip.delta_hi)
        .unwrap();
    writeln!(out, "<text x=\"{x0}\" y=\"{y0}\" dy=\"20\">delta = {}</text>", strip.delta_lo).unwrap();
    writeln!(out, "<text x=\"{x0}\" y=\"{y1}\" dx=\"-8\" text-anchor=\"end\">epsilon = {}</text>", frame.eps_hi)
        .unwrap();
    writeln!(out, "<text x=\"{x0}\" y=\"{y0}\" dx=\"-8\" text-anchor=\"end\">epsilon = {eps_lo}</text>",).unwrap();
    out.push_str("</g>\n");
}

/// An SVG with only the axes of the strip.
pub fn empty(strip: &Strip) -> String {
    let frame = Frame::new(strip, strip.eps_hi.clone().unwrap_or_else(|| &strip.eps_lo + Rat::one()));
    let mut out = String::new();
    header(&mut out);
    axes(&mut out, &frame, strip);
    out.push_str("</svg>\n");
    out
}

pub fn render(loaded: &Loaded, d: &Decomposition, chain: Option<&MoriChain>) -> String {
    let top = d.domain.iter().map(|p| p.eps.clone()).max().unwrap_or_else(|| d.strip.eps_lo.clone());
    let frame = Frame::new(&d.strip, top);
    let mut out = String::new();
    header(&mut out);
    axes(&mut out, &frame, &d.strip);
    let pts: Vec<String> = d
        .domain
        .iter()
        .map(|p| {
            let (x, y) = frame.xy(p);
            format!("{x},{y}")
        })
        .collect();
    writeln!(out, "<polygon class=\"domain\" fill=\"#eeeeee\" stroke=\"none\" points=\"{}\"/>", pts.join(" ")).unwrap();
    for w in &d.walls {
        let (class, color) = wall_color(&w.kind);
        let (x1, y1) = frame.xy(&w.from);
        let (x2, y2) = frame.xy(&w.to);
        writeln!(
            out,
            "<line class=\"wall {class}\" data-rows=\"{}\" stroke=\"{color}\" stroke-width=\"2\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>",
            set_text(&ids(loaded, &w.index_set))
        )
        .unwrap();
    }
    for c in &d.cells {
        if let Some(name) = loaded.name_of(&c.descriptor) {
            let (x, y) = frame.xy(&c.sample);
            writeln!(
                out,
                "<text class=\"cell-label\" x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">{}</text>",
                escape(name)
            )
            .unwrap();
        }
    }
    for m in &d.points {
        let (x, y) = frame.xy(&m.point);
        writeln!(out, "<circle class=\"point {}\" cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"gray\"/>", class_name(&m.class))
            .unwrap();
    }
    if let Some(chain) = chain {
        for a in &chain.anchors {
            let (x, y) = frame.xy(&a.point);
            writeln!(out, "<circle class=\"anchor\" cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"black\"/>").unwrap();
            writeln!(
                out,
                "<text class=\"anchor-label\" x=\"{x}\" y=\"{y}\" dy=\"-8\" text-anchor=\"middle\">L = {{{}}}</text>",
                set_text(&ids(loaded, &a.minimal))
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
