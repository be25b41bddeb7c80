//! Browser front end: analyze a preset, list its spectrum, draw a mode.
//!
//! The `*_text`/`render` functions are plain Rust so they can be tested
//! natively; the exported wrappers only convert errors.

use billiard_core::io::preset;
use billiard_core::lattice::PeriodLattice;
use billiard_core::quantize::{
    momentum_aperiodic, spectrum, spectrum_csv, SkeletonKind, SpectrumOptions,
};
use billiard_core::swf::{compile_swf, enumerate_prescriptions, grid, Branch};
use billiard_core::unfold::{build_epp, period_basis};
use wasm_bindgen::prelude::*;

fn lattice_for(
    shape: &str,
) -> Result<
    (
        billiard_core::exactgeom::Polygon,
        billiard_core::unfold::Epp,
        PeriodLattice,
    ),
    String,
> {
    let poly = preset(shape).map_err(|e| e.to_string())?;
    let epp = build_epp(&poly).map_err(|e| e.to_string())?;
    let basis = period_basis(&epp).map_err(|e| e.to_string())?;
    let lat = PeriodLattice::from_basis(&basis, None).map_err(|e| e.to_string())?;
    Ok((poly, epp, lat))
}

pub fn analyze_text(shape: &str) -> Result<String, String> {
    let (poly, epp, lat) = lattice_for(shape)?;
    let basis = period_basis(&epp).map_err(|e| e.to_string())?;
    let mut s = format!("{}\n", poly.describe());
    s += &format!(
        "genus {}, {} images, {} periods\n",
        basis.genus,
        epp.image_count(),
        basis.periods.len()
    );
    s += &lat.report();
    let pres = enumerate_prescriptions(&epp);
    s += &format!("{} consistent prescriptions:", pres.len());
    for (i, p) in pres.iter().enumerate() {
        s += &format!(" {}={}", i + 1, p.code());
    }
    s.push('\n');
    Ok(s)
}

pub fn spectrum_text(shape: &str, emax: f64) -> Result<String, String> {
    if !(emax > 0.0 && emax.is_finite()) {
        return Err("emax must be positive".into());
    }
    let (_, _, lat) = lattice_for(shape)?;
    if lat.rational.is_none() {
        return Err("not doubly rational: relations between periods are irrational".into());
    }
    let levels = spectrum(
        &lat,
        emax,
        &[SkeletonKind::ClassicalAperiodic],
        &SpectrumOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    Ok(spectrum_csv(&levels))
}

/// RGBA pixels of |Ψ|² (or the real part for sin/cos) on a size×size
/// canvas; outside the polygon is transparent.
pub fn render(
    shape: &str,
    prescription: usize,
    m: i64,
    n: i64,
    branch: &str,
    size: usize,
) -> Result<Vec<u8>, String> {
    if size == 0 || size > 1024 {
        return Err("size must be in 1..=1024".into());
    }
    let (poly, epp, lat) = lattice_for(shape)?;
    if lat.rational.is_none() {
        return Err("not doubly rational".into());
    }
    let list = enumerate_prescriptions(&epp);
    let pres = prescription
        .checked_sub(1)
        .and_then(|i| list.get(i))
        .ok_or_else(|| format!("prescription must be 1..={}", list.len()))?;
    let q = momentum_aperiodic(&lat, m, n).map_err(|e| e.to_string())?;
    let (swf, _) = compile_swf(&epp, pres, &q).map_err(|e| e.to_string())?;
    let branch = match branch {
        "plus" => Branch::Plus,
        "cos" => Branch::Cos,
        "sin" => Branch::Sin,
        b => return Err(format!("unknown branch {b}")),
    };
    let real = branch != Branch::Plus;
    let f = swf.with_branch(branch);
    let samples = grid(&f, &poly, size, size);
    let vals: Vec<Option<f64>> = samples
        .iter()
        .map(|(_, v)| v.map(|z| if real { z.re } else { z.norm_sqr() }))
        .collect();
    let peak = vals.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut px = Vec::with_capacity(4 * vals.len());
    for v in vals {
        let rgba = match v {
            None => [0, 0, 0, 0],
            Some(_) if peak == 0.0 => [128, 128, 128, 255],
            // blue for negative, red for positive
            Some(v) if real => {
                let t = (v / peak).clamp(-1.0, 1.0);
                let c = (255.0 * (1.0 - t.abs())) as u8;
                if t >= 0.0 {
                    [255, c, c, 255]
                } else {
                    [c, c, 255, 255]
                }
            }
            Some(v) => {
                let g = (255.0 * (1.0 - v / peak)) as u8;
                [g, g, g, 255]
            }
        };
        px.extend_from_slice(&rgba);
    }
    Ok(px)
}

#[wasm_bindgen]
pub fn analyze(shape: &str) -> Result<String, JsValue> {
    analyze_text(shape).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = spectrum)]
pub fn spectrum_js(shape: &str, emax: f64) -> Result<String, JsValue> {
    spectrum_text(shape, emax).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wavefunction(
    shape: &str,
    prescription: usize,
    m: i32,
    n: i32,
    branch: &str,
    size: usize,
) -> Result<Vec<u8>, JsValue> {
    render(shape, prescription, m as i64, n as i64, branch, size).map_err(|e| JsValue::from_str(&e))
}
