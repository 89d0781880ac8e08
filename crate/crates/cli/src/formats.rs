//! Text file formats: spectra (two-column CSV), tableaus and families
//! (key-value), dense matrices (CSV rows), and golden-file reference caches.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use perk_core::butcher::{ButcherTableau, PerkFamily};
use perk_core::linalg::DenseMatrix;
use perk_core::problems::{lv_reference, ProblemError};
use perk_core::spectra::Spectrum;
use perk_core::Complex64;

use crate::ToolsError;

/// 17-significant-digit decimal, the canonical number format of every file
/// and report this crate emits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_f64(x)).collect::<Vec<_>>().join(",")
}

fn io_err(path: &Path, source: std::io::Error) -> ToolsError {
    ToolsError::Io { path: path.display().to_string(), source }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> ToolsError {
    ToolsError::Parse { path: path.display().to_string(), line, message: message.into() }
}

fn parse_f64(path: &Path, line: usize, tok: &str) -> Result<f64, ToolsError> {
    tok.trim()
        .parse::<f64>()
        .map_err(|_| parse_err(path, line, format!("expected a number, got '{}'", tok.trim())))
}

fn parse_f64_list(path: &Path, line: usize, val: &str) -> Result<Vec<f64>, ToolsError> {
    if val.trim().is_empty() {
        return Ok(Vec::new());
    }
    val.split(',').map(|t| parse_f64(path, line, t)).collect()
}

fn parse_usize(path: &Path, line: usize, tok: &str) -> Result<usize, ToolsError> {
    tok.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(path, line, format!("expected an integer, got '{}'", tok.trim())))
}

/// Data lines of a text file: `(1-based line number, content)` with blank
/// lines and `#` comments removed.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>, ToolsError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.to_string()))
        .collect())
}

/// Key-value lines `key = value` into an ordered map, rejecting duplicates.
fn key_value_map(path: &Path) -> Result<BTreeMap<String, (usize, String)>, ToolsError> {
    let mut map = BTreeMap::new();
    for (ln, line) in data_lines(path)? {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, ln, "expected 'key = value'"))?;
        let k = k.trim().to_string();
        if map.insert(k.clone(), (ln, v.trim().to_string())).is_some() {
            return Err(parse_err(path, ln, format!("duplicate key '{k}'")));
        }
    }
    Ok(map)
}

fn take<'m>(
    map: &'m BTreeMap<String, (usize, String)>,
    path: &Path,
    key: &str,
) -> Result<(usize, &'m str), ToolsError> {
    map.get(key)
        .map(|(ln, v)| (*ln, v.as_str()))
        .ok_or_else(|| parse_err(path, 0, format!("missing key '{key}'")))
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Writes one `re,im` line per eigenvalue, preceded by a label comment.
pub fn save_spectrum(s: &Spectrum, path: &Path) -> Result<(), ToolsError> {
    let mut out = format!("# spectrum: {}\n", s.label());
    for z in s.points() {
        out.push_str(&format_f64(z.re));
        out.push(',');
        out.push_str(&format_f64(z.im));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn load_spectrum(path: &Path) -> Result<Spectrum, ToolsError> {
    let mut pts = Vec::new();
    for (ln, line) in data_lines(path)? {
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| parse_err(path, ln, "expected 're,im'"))?;
        pts.push(Complex64::new(parse_f64(path, ln, re)?, parse_f64(path, ln, im)?));
    }
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("spectrum");
    Ok(Spectrum::new(&pts, label)?)
}

// ---------------------------------------------------------------------------
// Dense matrices (for `spectrum --matrix` and `integrate --problem linear-file`)
// ---------------------------------------------------------------------------

/// Square matrix as comma-separated rows, one per line.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix, ToolsError> {
    let lines = data_lines(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(lines.len());
    for (ln, line) in &lines {
        rows.push(parse_f64_list(path, *ln, line)?);
    }
    let n = rows.len();
    if n == 0 {
        return Err(parse_err(path, 0, "empty matrix"));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(parse_err(
            path,
            lines[bad].0,
            format!("row has {} entries, expected {n}", rows[bad].len()),
        ));
    }
    let mut m = DenseMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    Ok(m)
}

/// Vector file: one number per line (or comma-separated on one line).
pub fn load_vector(path: &Path) -> Result<Vec<f64>, ToolsError> {
    let mut v = Vec::new();
    for (ln, line) in data_lines(path)? {
        v.extend(parse_f64_list(path, ln, &line)?);
    }
    if v.is_empty() {
        return Err(parse_err(path, 0, "empty vector"));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Tableaus
// ---------------------------------------------------------------------------

fn push_kv(out: &mut String, key: &str, val: &str) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(val);
    out.push('\n');
}

fn tableau_body(out: &mut String, t: &ButcherTableau, prefix: &str) {
    let s = t.stages_s();
    if t.is_perk_sparse() {
        // a_{2,1}..a_{S,1} and a_{3,2}..a_{S,S-1}
        let first: Vec<f64> = (1..s).map(|i| t.a(i, 0)).collect();
        let sub: Vec<f64> = (2..s).map(|i| t.a(i, i - 1)).collect();
        push_kv(out, &format!("{prefix}first-column"), &format_list(&first));
        push_kv(out, &format!("{prefix}subdiagonal"), &format_list(&sub));
    } else {
        for (i, row) in t.a_rows().iter().enumerate().skip(1) {
            push_kv(out, &format!("{prefix}a-row-{}", i + 1), &format_list(row));
        }
    }
}

pub fn serialize_tableau(t: &ButcherTableau, path: &Path) -> Result<(), ToolsError> {
    let mut out = String::new();
    push_kv(&mut out, "format", "tableau");
    push_kv(&mut out, "s", &t.stages_s().to_string());
    push_kv(&mut out, "p", &t.order_p().to_string());
    push_kv(&mut out, "e", &t.evals_e().to_string());
    push_kv(&mut out, "c", &format_list(t.c()));
    push_kv(&mut out, "b", &format_list(t.b()));
    tableau_body(&mut out, t, "");
    fs::write(path, out).map_err(|e| io_err(path, e))
}

fn tableau_rows_from_map(
    map: &BTreeMap<String, (usize, String)>,
    path: &Path,
    s: usize,
    c: &[f64],
    prefix: &str,
) -> Result<Vec<Vec<f64>>, ToolsError> {
    let mut a: Vec<Vec<f64>> = (0..s).map(|i| vec![0.0; i]).collect();
    let fc_key = format!("{prefix}first-column");
    if map.contains_key(&fc_key) {
        let (ln, v) = take(map, path, &fc_key)?;
        let first = parse_f64_list(path, ln, v)?;
        let (ln2, v2) = take(map, path, &format!("{prefix}subdiagonal"))?;
        let sub = parse_f64_list(path, ln2, v2)?;
        if first.len() != s - 1 {
            return Err(parse_err(path, ln, format!("first-column needs {} entries", s - 1)));
        }
        if sub.len() != s - 2 {
            return Err(parse_err(path, ln2, format!("subdiagonal needs {} entries", s - 2)));
        }
        for i in 1..s {
            a[i][0] = first[i - 1];
            if i >= 2 {
                a[i][i - 1] = sub[i - 2];
            }
        }
    } else {
        let _ = c;
        for (i, row) in a.iter_mut().enumerate().skip(1) {
            let key = format!("{prefix}a-row-{}", i + 1);
            let (ln, v) = take(map, path, &key)?;
            let vals = parse_f64_list(path, ln, v)?;
            if vals.len() != i {
                return Err(parse_err(path, ln, format!("{key} needs {i} entries")));
            }
            row.copy_from_slice(&vals);
        }
    }
    Ok(a)
}

fn tableau_from_map(
    map: &BTreeMap<String, (usize, String)>,
    path: &Path,
    validate: bool,
) -> Result<ButcherTableau, ToolsError> {
    let (ln, v) = take(map, path, "s")?;
    let s = parse_usize(path, ln, v)?;
    let (ln, v) = take(map, path, "p")?;
    let p = parse_usize(path, ln, v)?;
    let (ln, v) = take(map, path, "e")?;
    let e = parse_usize(path, ln, v)?;
    let (ln, v) = take(map, path, "c")?;
    let c = parse_f64_list(path, ln, v)?;
    let (ln2, v) = take(map, path, "b")?;
    let b = parse_f64_list(path, ln2, v)?;
    if c.len() != s || b.len() != s {
        return Err(parse_err(path, ln, format!("c and b need {s} entries")));
    }
    let a = tableau_rows_from_map(map, path, s, &c, "")?;
    let t = if validate {
        ButcherTableau::from_dense(c, b, a, p, e)?
    } else {
        ButcherTableau::from_dense_unchecked(c, b, a, p, e)?
    };
    Ok(t)
}

/// Loads a tableau, re-running the internal-consistency invariants.
pub fn deserialize_tableau(path: &Path) -> Result<ButcherTableau, ToolsError> {
    let map = key_value_map(path)?;
    expect_format(&map, path, "tableau")?;
    tableau_from_map(&map, path, true)
}

/// Loads a tableau with shape checks only, so its defects can be *reported*.
pub fn deserialize_tableau_unchecked(path: &Path) -> Result<ButcherTableau, ToolsError> {
    let map = key_value_map(path)?;
    expect_format(&map, path, "tableau")?;
    tableau_from_map(&map, path, false)
}

fn expect_format(
    map: &BTreeMap<String, (usize, String)>,
    path: &Path,
    want: &str,
) -> Result<(), ToolsError> {
    let (ln, v) = take(map, path, "format")?;
    if v != want {
        return Err(parse_err(path, ln, format!("format is '{v}', expected '{want}'")));
    }
    Ok(())
}

/// Reads only the `format` key, for dispatching tableau vs family files.
pub fn sniff_format(path: &Path) -> Result<String, ToolsError> {
    let map = key_value_map(path)?;
    let (_, v) = take(&map, path, "format")?;
    Ok(v.to_string())
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

pub fn serialize_family(f: &PerkFamily, path: &Path) -> Result<(), ToolsError> {
    let mut out = String::new();
    push_kv(&mut out, "format", "family");
    push_kv(&mut out, "s", &f.stages_s().to_string());
    push_kv(&mut out, "p", &f.order_p().to_string());
    let evals: Vec<String> = f.members().iter().map(|m| m.evals_e().to_string()).collect();
    push_kv(&mut out, "members", &evals.join(","));
    push_kv(&mut out, "c", &format_list(f.c()));
    push_kv(&mut out, "b", &format_list(f.b()));
    for r in 0..f.num_members() {
        let t = f.member_tableau(r);
        tableau_body(&mut out, &t, &format!("member-{}-", t.evals_e()));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Loads a family, re-validating shared coefficients, order conditions, and
/// the pairwise coupling conditions.
pub fn deserialize_family(path: &Path) -> Result<PerkFamily, ToolsError> {
    let map = key_value_map(path)?;
    expect_format(&map, path, "family")?;
    let (ln, v) = take(&map, path, "s")?;
    let s = parse_usize(path, ln, v)?;
    let (ln, v) = take(&map, path, "p")?;
    let p = parse_usize(path, ln, v)?;
    let (ln_m, v) = take(&map, path, "members")?;
    let evals: Vec<usize> = v
        .split(',')
        .map(|t| parse_usize(path, ln_m, t))
        .collect::<Result<_, _>>()?;
    let (ln, v) = take(&map, path, "c")?;
    let c = parse_f64_list(path, ln, v)?;
    let (ln2, v) = take(&map, path, "b")?;
    let b = parse_f64_list(path, ln2, v)?;
    if c.len() != s || b.len() != s {
        return Err(parse_err(path, ln, format!("c and b need {s} entries")));
    }
    let mut tableaus = Vec::with_capacity(evals.len());
    for &e in &evals {
        let a = tableau_rows_from_map(&map, path, s, &c, &format!("member-{e}-"))?;
        tableaus.push(ButcherTableau::from_dense(c.clone(), b.clone(), a, p, e)?);
    }
    Ok(PerkFamily::from_member_tableaus(&tableaus)?)
}

// ---------------------------------------------------------------------------
// Golden-file reference cache
// ---------------------------------------------------------------------------

/// Reference solution of the predator-prey system, cached as key-value text
/// keyed by `(t_f, state_0)`. A cache hit skips the expensive tiny-step rerun;
/// a key mismatch falls through to recomputation and rewrites the file.
pub fn lv_reference_cached(
    cache_path: &Path,
    t_f: f64,
    state_0: (f64, f64),
) -> Result<(f64, f64), ToolsError> {
    if cache_path.exists() {
        if let Ok(map) = key_value_map(cache_path) {
            let get = |k: &str| -> Option<f64> {
                map.get(k).and_then(|(_, v)| v.parse::<f64>().ok())
            };
            if let (Some(tf), Some(u0), Some(v0), Some(u), Some(v)) =
                (get("t-final"), get("u-initial"), get("v-initial"), get("u-final"), get("v-final"))
            {
                if tf == t_f && u0 == state_0.0 && v0 == state_0.1 {
                    return Ok((u, v));
                }
            }
        }
    }
    let (u, v) = lv_reference(t_f, state_0).map_err(|e| match e {
        ProblemError::ReferenceDisagreement { component, difference } => ToolsError::ResidualExceeded {
            what: format!("reference confirmation run, component {component}"),
            residual: difference,
            threshold: 1e-12,
        },
        other => ToolsError::Validation(other.to_string()),
    })?;
    let mut out = String::new();
    push_kv(&mut out, "format", "lv-reference");
    push_kv(&mut out, "t-final", &format_f64(t_f));
    push_kv(&mut out, "u-initial", &format_f64(state_0.0));
    push_kv(&mut out, "v-initial", &format_f64(state_0.1));
    push_kv(&mut out, "u-final", &format_f64(u));
    push_kv(&mut out, "v-final", &format_f64(v));
    fs::write(cache_path, out).map_err(|e| io_err(cache_path, e))?;
    Ok((u, v))
}
