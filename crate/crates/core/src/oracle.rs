//! Brute-force minimizers used as independent references.

use crate::error::{Error, Result};
use crate::model::{Domain, DomainKind};
use crate::poly::{monomials_of_degree, Polynomial};
use crate::scalar::Rational;

/// Minimum and maximum over a finite point set, with the minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridExtrema {
    pub min: f64,
    pub argmin: Vec<f64>,
    pub max: f64,
    pub points: usize,
}

fn scan(points: impl Iterator<Item = Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Result<GridExtrema> {
    let mut out: Option<GridExtrema> = None;
    for x in points {
        let v = f(&x);
        match &mut out {
            None => {
                out = Some(GridExtrema {
                    min: v,
                    argmin: x,
                    max: v,
                    points: 1,
                })
            }
            Some(e) => {
                e.points += 1;
                if v < e.min {
                    e.min = v;
                    e.argmin = x;
                }
                e.max = e.max.max(v);
            }
        }
    }
    out.ok_or_else(|| Error::Precondition("empty grid".into()))
}

/// All points `α / N` with `|α| = N`.
pub fn simplex_grid(n: usize, resolution: u32) -> impl Iterator<Item = Vec<f64>> {
    let scale = resolution as f64;
    monomials_of_degree(n, resolution)
        .into_iter()
        .map(move |a| a.exponents().iter().map(|&e| e as f64 / scale).collect())
}

/// `n = 2`: `resolution` equally spaced angles; `n = 3`: a
/// `resolution × 2·resolution` latitude/longitude grid.
pub fn sphere_grid(n: usize, resolution: u32) -> Result<Vec<Vec<f64>>> {
    let pi = std::f64::consts::PI;
    match n {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..resolution)
            .map(|k| {
                let t = 2.0 * pi * k as f64 / resolution as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()),
        3 => {
            let mut pts = Vec::new();
            for i in 0..=resolution {
                let theta = pi * i as f64 / resolution as f64;
                for j in 0..2 * resolution {
                    let phi = pi * j as f64 / resolution as f64;
                    pts.push(vec![theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
                }
            }
            Ok(pts)
        }
        _ => Err(Error::Precondition(format!("no sphere grid for n = {n}"))),
    }
}

/// Extrema of a function over the domain grid.
pub fn grid_extrema_fn(domain: Domain, resolution: u32, f: impl Fn(&[f64]) -> f64) -> Result<GridExtrema> {
    match domain.kind {
        DomainKind::Simplex => scan(simplex_grid(domain.n, resolution), f),
        DomainKind::Sphere => scan(sphere_grid(domain.n, resolution)?.into_iter(), f),
    }
}

/// Extrema of a polynomial over the domain grid.
pub fn grid_extrema(p: &Polynomial<Rational>, domain: Domain, resolution: u32) -> Result<GridExtrema> {
    if p.n() != domain.n {
        return Err(Error::DimensionMismatch {
            expected: domain.n,
            found: p.n(),
        });
    }
    let pf = p.convert::<f64>();
    grid_extrema_fn(domain, resolution, |x| pf.eval(x).expect("dimension checked"))
}

/// Grid resolution giving a few ten thousand points for the dimension.
pub fn default_resolution(domain: Domain) -> u32 {
    match (domain.kind, domain.n) {
        (DomainKind::Simplex, 1) => 1,
        (DomainKind::Simplex, 2) => 10_000,
        (DomainKind::Simplex, 3) => 200,
        (DomainKind::Simplex, 4) => 40,
        (DomainKind::Simplex, 5) => 20,
        (DomainKind::Simplex, 6) => 12,
        (DomainKind::Simplex, 7) => 8,
        (DomainKind::Simplex, _) => 4,
        (DomainKind::Sphere, 2) => 100_000,
        (DomainKind::Sphere, _) => 300,
    }
}
