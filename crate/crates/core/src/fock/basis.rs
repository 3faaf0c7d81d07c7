use crate::error::{Error, Result};

pub const DEFAULT_DIM_LIMIT: usize = 200_000;

/// Truncated multi-mode Fock basis. Index is mixed radix with mode 0 fastest:
/// `index = n_0 + (c_0+1)·(n_1 + (c_1+1)·(n_2 + …))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    cutoffs: Vec<usize>,
    dim: usize,
}

impl FockBasis {
    pub fn new(cutoffs: Vec<usize>) -> Result<Self> {
        Self::with_limit(cutoffs, DEFAULT_DIM_LIMIT)
    }

    pub fn with_limit(cutoffs: Vec<usize>, limit: usize) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidCutoff("at least one mode is required".into()));
        }
        if let Some(c) = cutoffs.iter().find(|&&c| c < 1) {
            return Err(Error::InvalidCutoff(format!("cutoff {c} is below 1")));
        }
        let mut dim: usize = 1;
        for &c in &cutoffs {
            dim = c.checked_add(1).and_then(|n| dim.checked_mul(n)).unwrap_or(usize::MAX);
            if dim > limit {
                return Err(Error::DimensionLimit { dim, limit });
            }
        }
        Ok(Self { cutoffs, dim })
    }

    pub fn uniform(n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff; n_modes])
    }

    pub fn single(cutoff: usize) -> Result<Self> {
        Self::new(vec![cutoff])
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn n_modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stride of `mode` in the flat index.
    pub fn stride(&self, mode: usize) -> usize {
        self.cutoffs[..mode].iter().map(|c| c + 1).product()
    }

    pub fn index(&self, occupation: &[usize]) -> Option<usize> {
        if occupation.len() != self.n_modes() {
            return None;
        }
        let mut idx = 0;
        for m in (0..self.n_modes()).rev() {
            if occupation[m] > self.cutoffs[m] {
                return None;
            }
            idx = idx * (self.cutoffs[m] + 1) + occupation[m];
        }
        Some(idx)
    }

    pub fn occupation(&self, mut index: usize) -> Vec<usize> {
        let mut occ = Vec::with_capacity(self.n_modes());
        for &c in &self.cutoffs {
            occ.push(index % (c + 1));
            index /= c + 1;
        }
        occ
    }

    /// Default interior levels per mode: `⌈cutoff/3⌉`.
    pub fn interior_levels(&self) -> Vec<usize> {
        self.cutoffs.iter().map(|c| c.div_ceil(3)).collect()
    }

    /// Flat indices whose occupations all lie below the interior level count.
    pub fn interior_indices(&self, levels: Option<&[usize]>) -> Vec<usize> {
        let default = self.interior_levels();
        let levels = levels.unwrap_or(&default);
        (0..self.dim)
            .filter(|&i| self.occupation(i).iter().zip(levels).all(|(n, l)| n < l))
            .collect()
    }

    /// `fock cutoffs=c0,c1,... dim=D order=mode0-fastest`
    pub fn descriptor(&self) -> String {
        let cs: Vec<String> = self.cutoffs.iter().map(|c| c.to_string()).collect();
        format!("fock cutoffs={} dim={} order=mode0-fastest", cs.join(","), self.dim)
    }

    pub fn from_descriptor(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad basis descriptor: {s:?}"));
        let mut cutoffs = None;
        let mut dim = None;
        let mut fields = s.split_whitespace();
        if fields.next() != Some("fock") {
            return Err(bad());
        }
        for f in fields {
            if let Some(v) = f.strip_prefix("cutoffs=") {
                let cs: std::result::Result<Vec<usize>, _> = v.split(',').map(str::parse).collect();
                cutoffs = Some(cs.map_err(|_| bad())?);
            } else if let Some(v) = f.strip_prefix("dim=") {
                dim = Some(v.parse::<usize>().map_err(|_| bad())?);
            } else if f != "order=mode0-fastest" {
                return Err(bad());
            }
        }
        let basis = Self::new(cutoffs.ok_or_else(bad)?)?;
        if dim != Some(basis.dim) {
            return Err(bad());
        }
        Ok(basis)
    }
}
