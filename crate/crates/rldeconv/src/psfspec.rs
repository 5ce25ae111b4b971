//! PSF specifiers used on the command line and as benchmark labels:
//! `line:<M>`, `box:<MX>x<MY>`, `disc:<D>`, `diag:<M>`, `file:<path>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rldeconv_core::psf::{box_psf, diagonal_psf, disc_psf, line_psf, parse_sparse_psf};
use rldeconv_core::Psf;

use crate::error::{io_err, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsfSpec {
    Line(usize),
    Box(usize, usize),
    Disc(usize),
    Diagonal(usize),
    /// Sparse tap list in the text format of [`rldeconv_core::SparsePsf::to_text`].
    File(PathBuf),
}

impl PsfSpec {
    pub fn build(&self) -> Result<Psf> {
        Ok(match self {
            Self::Line(m) => line_psf(*m)?.into(),
            Self::Box(mx, my) => box_psf(*mx, *my)?.into(),
            Self::Disc(d) => disc_psf(*d)?.into(),
            Self::Diagonal(m) => diagonal_psf(*m)?.into(),
            Self::File(path) => {
                let text = std::fs::read_to_string(path).map_err(io_err(path))?;
                parse_sparse_psf(&text)?.into()
            }
        })
    }
}

impl fmt::Display for PsfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line(m) => write!(f, "line:{m}"),
            Self::Box(mx, my) => write!(f, "box:{mx}x{my}"),
            Self::Disc(d) => write!(f, "disc:{d}"),
            Self::Diagonal(m) => write!(f, "diag:{m}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for PsfSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |message: &str| Error::PsfSpec {
            spec: s.to_owned(),
            message: message.to_owned(),
        };
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| bad("expected <kind>:<argument>"))?;
        let size = |t: &str| {
            t.parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| bad("size must be a positive integer"))
        };
        match kind {
            "line" => Ok(Self::Line(size(arg)?)),
            "disc" => Ok(Self::Disc(size(arg)?)),
            "diag" => Ok(Self::Diagonal(size(arg)?)),
            "box" => {
                let (mx, my) = arg
                    .split_once(['x', 'X'])
                    .ok_or_else(|| bad("box size must be <MX>x<MY>"))?;
                Ok(Self::Box(size(mx)?, size(my)?))
            }
            "file" if !arg.is_empty() => Ok(Self::File(PathBuf::from(arg))),
            "file" => Err(bad("missing path")),
            _ => Err(bad("kind must be one of line, box, disc, diag, file")),
        }
    }
}
