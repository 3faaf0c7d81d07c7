use crate::error::{Error, Result};
use crate::fock::basis::FockBasis;
use crate::linalg::{c, C64};

/// `# <basis descriptor>` followed by one `index re im` line per amplitude.
pub fn write_snapshot(basis: &FockBasis, state: &[C64]) -> Result<String> {
    if state.len() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of length {} for basis of dimension {}",
            state.len(),
            basis.dim()
        )));
    }
    let mut out = format!("# {}\n", basis.descriptor());
    for (i, x) in state.iter().enumerate() {
        out.push_str(&format!("{i} {:e} {:e}\n", x.re, x.im));
    }
    Ok(out)
}

pub fn read_snapshot(text: &str) -> Result<(FockBasis, Vec<C64>)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty snapshot".into()))?;
    let desc = header
        .strip_prefix("# ")
        .ok_or_else(|| Error::Parse("snapshot header must start with '# '".into()))?;
    let basis = FockBasis::from_descriptor(desc)?;
    let mut state = vec![C64::new(0.0, 0.0); basis.dim()];
    let mut seen = vec![false; basis.dim()];
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let bad = || Error::Parse(format!("bad snapshot line: {line:?}"));
        let mut it = line.split_whitespace();
        let i: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let re: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let im: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if it.next().is_some() || i >= basis.dim() || seen[i] {
            return Err(bad());
        }
        seen[i] = true;
        state[i] = c(re, im);
    }
    Ok((basis, state))
}
