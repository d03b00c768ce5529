use std::path::Path;

use crate::error::{DdmError, Result};

/// Binary inside/outside mask, row-major with row 0 at the bottom (smallest y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(DdmError::DegenerateMask(format!(
                "{width}x{height} mask with {} pixels",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[j * self.width + i]
    }

    /// Parse a binary (P5) or ASCII (P2) graymap. Pixels `>= 128` are inside.
    /// Image rows are stored top-down, so they are flipped on the way in.
    pub fn from_pgm_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut pos = 0;
        let magic = next_token(bytes, &mut pos).ok_or("missing magic number")?;
        let binary = match magic.as_str() {
            "P5" => true,
            "P2" => false,
            other => return Err(format!("unsupported PGM magic {other:?}")),
        };
        let mut header = [0usize; 3];
        for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
            let tok = next_token(bytes, &mut pos).ok_or(format!("missing {name}"))?;
            *slot = tok.parse().map_err(|_| format!("bad {name} {tok:?}"))?;
        }
        let [width, height, maxval] = header;
        if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
            return Err(format!("bad header {width}x{height} maxval {maxval}"));
        }

        let n = width * height;
        let mut pixels = Vec::with_capacity(n);
        if binary {
            // exactly one whitespace byte separates maxval from the raster
            pos += 1;
            let bpp = if maxval > 255 { 2 } else { 1 };
            let raster = bytes.get(pos..pos + n * bpp).ok_or("truncated raster")?;
            if bpp == 1 {
                pixels.extend(raster.iter().map(|&b| b as usize));
            } else {
                pixels.extend(raster.chunks_exact(2).map(|c| ((c[0] as usize) << 8) | c[1] as usize));
            }
        } else {
            for k in 0..n {
                let tok = next_token(bytes, &mut pos).ok_or(format!("truncated raster at pixel {k}"))?;
                pixels.push(tok.parse().map_err(|_| format!("bad pixel {tok:?}"))?);
            }
        }

        let mut data = vec![false; n];
        for (row, chunk) in pixels.chunks_exact(width).enumerate() {
            let j = height - 1 - row;
            for (i, &v) in chunk.iter().enumerate() {
                data[j * width + i] = v >= 128;
            }
        }
        Ok(Self { width, height, data })
    }
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

pub fn read_pgm(path: &Path) -> Result<Mask> {
    let bytes = std::fs::read(path)?;
    Mask::from_pgm_bytes(&bytes).map_err(|message| DdmError::Input { path: path.to_owned(), message })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_and_binary_agree() {
        let ascii = b"P2\n# tiny\n3 2\n255\n0 200 0\n128 127 255\n";
        let mut binary = b"P5 3 2 255\n".to_vec();
        binary.extend_from_slice(&[0, 200, 0, 128, 127, 255]);
        let a = Mask::from_pgm_bytes(ascii).unwrap();
        let b = Mask::from_pgm_bytes(&binary).unwrap();
        assert_eq!(a, b);
        // bottom row is the last image row
        assert_eq!(a.data, vec![true, false, true, false, true, false]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Mask::from_pgm_bytes(b"P6 1 1 255\n\0\0\0").is_err());
        assert!(Mask::from_pgm_bytes(b"P5 2 2 255\n\0").is_err());
    }
}
