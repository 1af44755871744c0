//! Normalised channel planes, RGB to HSV conversion and bilinear resampling.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Side length every image is resampled to before feature extraction.
pub const WORKING_SIZE: usize = 256;

/// Luma weights used for the gray plane.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// A single-channel, row-major plane of real samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: alloc::vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Checks that every sample lies in `[0, 1]`.
    pub fn check_unit_range(&self) -> Result<()> {
        match self
            .data
            .iter()
            .position(|v| !(0.0..=1.0).contains(v))
        {
            Some(index) => Err(Error::SampleOutOfRange {
                index,
                value: self.data[index],
            }),
            None => Ok(()),
        }
    }

    /// Bilinear resampling with pixel-centre alignment and edge clamping.
    ///
    /// Resampling to the plane's own size is the identity.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Plane {
        if width == self.width && height == self.height {
            return self.clone();
        }
        let xs = axis_taps(self.width, width);
        let ys = axis_taps(self.height, height);
        let mut data = Vec::with_capacity(width * height);
        for &(y0, y1, wy) in &ys {
            let r0 = self.row(y0);
            let r1 = self.row(y1);
            for &(x0, x1, wx) in &xs {
                let top = lerp(r0[x0], r0[x1], wx);
                let bottom = lerp(r1[x0], r1[x1], wx);
                data.push(lerp(top, bottom, wy));
            }
        }
        Plane {
            width,
            height,
            data,
        }
    }
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if a == b {
        a
    } else {
        a + t * (b - a)
    }
}

/// For every destination index, the two source neighbours and the weight of the second.
fn axis_taps(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    let last = src - 1;
    (0..dst)
        .map(|d| {
            let pos = (d as f64 + 0.5) * scale - 0.5;
            if pos <= 0.0 {
                return (0, 0, 0.0);
            }
            let lo = libm::floor(pos) as usize;
            if lo >= last {
                return (last, last, 0.0);
            }
            (lo, lo + 1, pos - lo as f64)
        })
        .collect()
}

/// The six colour channels features are computed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    R,
    G,
    B,
    H,
    S,
    V,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::R,
        Channel::G,
        Channel::B,
        Channel::H,
        Channel::S,
        Channel::V,
    ];
    pub const RGB: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn letter(self) -> &'static str {
        match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
            Channel::H => "H",
            Channel::S => "S",
            Channel::V => "V",
        }
    }
}

/// Standard hexcone RGB to HSV with every component in `[0, 1]`.
///
/// Hue is degrees / 360. Achromatic inputs (zero chroma) get hue 0.
pub fn rgb_to_hsv(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    let v = max;
    let s = if max > 0.0 { chroma / max } else { 0.0 };
    if chroma <= 0.0 {
        return (0.0, s, v);
    }
    let sector = if max == r {
        let h = (g - b) / chroma;
        if h < 0.0 {
            h + 6.0
        } else {
            h
        }
    } else if max == g {
        (b - r) / chroma + 2.0
    } else {
        (r - g) / chroma + 4.0
    };
    (sector / 6.0, s, v)
}

/// Luma-weighted gray level.
#[inline]
pub fn gray_level(r: f64, g: f64, b: f64) -> f64 {
    LUMA[0] * r + LUMA[1] * g + LUMA[2] * b
}

/// A decoded image as normalised RGB, HSV and gray planes.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterImage {
    id: String,
    rgb: [Plane; 3],
    hsv: [Plane; 3],
    gray: Plane,
}

impl RasterImage {
    /// Builds an image from three RGB planes, deriving HSV and gray.
    pub fn from_rgb_planes(id: impl Into<String>, r: Plane, g: Plane, b: Plane) -> Result<Self> {
        let (w, h) = (r.width, r.height);
        if w == 0 || h == 0 {
            return Err(Error::EmptyImage);
        }
        for p in [&g, &b] {
            if p.width != w || p.height != h {
                return Err(Error::LengthMismatch {
                    expected: w * h,
                    actual: p.width * p.height,
                });
            }
        }
        for p in [&r, &g, &b] {
            p.check_unit_range()?;
        }
        let n = w * h;
        let mut hue = Vec::with_capacity(n);
        let mut sat = Vec::with_capacity(n);
        let mut val = Vec::with_capacity(n);
        let mut gray = Vec::with_capacity(n);
        for i in 0..n {
            let (rv, gv, bv) = (r.data[i], g.data[i], b.data[i]);
            let (hh, ss, vv) = rgb_to_hsv(rv, gv, bv);
            hue.push(hh);
            sat.push(ss);
            val.push(vv);
            gray.push(gray_level(rv, gv, bv));
        }
        let plane = |data| Plane {
            width: w,
            height: h,
            data,
        };
        Ok(Self {
            id: id.into(),
            hsv: [plane(hue), plane(sat), plane(val)],
            gray: plane(gray),
            rgb: [r, g, b],
        })
    }

    /// Builds an image from interleaved 8-bit RGB samples.
    pub fn from_rgb8(id: impl Into<String>, width: usize, height: usize, pixels: &[u8]) -> Result<Self> {
        Self::from_interleaved(id, width, height, pixels, |v| f64::from(v) / 255.0)
    }

    /// Builds an image from interleaved 16-bit RGB samples.
    pub fn from_rgb16(id: impl Into<String>, width: usize, height: usize, pixels: &[u16]) -> Result<Self> {
        Self::from_interleaved(id, width, height, pixels, |v| f64::from(v) / 65535.0)
    }

    fn from_interleaved<T: Copy>(
        id: impl Into<String>,
        width: usize,
        height: usize,
        pixels: &[T],
        norm: impl Fn(T) -> f64,
    ) -> Result<Self> {
        if pixels.len() != width * height * 3 {
            return Err(Error::LengthMismatch {
                expected: width * height * 3,
                actual: pixels.len(),
            });
        }
        let channel = |c: usize| Plane {
            width,
            height,
            data: pixels.iter().skip(c).step_by(3).map(|&v| norm(v)).collect(),
        };
        Self::from_rgb_planes(id, channel(0), channel(1), channel(2))
    }

    /// A constant-colour image.
    pub fn solid(id: impl Into<String>, width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_rgb_planes(
            id,
            Plane::filled(width, height, rgb[0]),
            Plane::filled(width, height, rgb[1]),
            Plane::filled(width, height, rgb[2]),
        )
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn width(&self) -> usize {
        self.rgb[0].width
    }

    pub fn height(&self) -> usize {
        self.rgb[0].height
    }

    pub fn rgb(&self) -> &[Plane; 3] {
        &self.rgb
    }

    pub fn hsv(&self) -> &[Plane; 3] {
        &self.hsv
    }

    pub fn gray(&self) -> &Plane {
        &self.gray
    }

    pub fn plane(&self, channel: Channel) -> &Plane {
        match channel {
            Channel::R => &self.rgb[0],
            Channel::G => &self.rgb[1],
            Channel::B => &self.rgb[2],
            Channel::H => &self.hsv[0],
            Channel::S => &self.hsv[1],
            Channel::V => &self.hsv[2],
        }
    }

    pub fn is_working_size(&self) -> bool {
        self.width() == WORKING_SIZE && self.height() == WORKING_SIZE
    }

    /// Resamples to the working resolution and rederives HSV and gray.
    pub fn preprocess(&self) -> Result<RasterImage> {
        if self.is_working_size() {
            return Ok(self.clone());
        }
        let [r, g, b] = &self.rgb;
        Self::from_rgb_planes(
            self.id.clone(),
            r.resize_bilinear(WORKING_SIZE, WORKING_SIZE),
            g.resize_bilinear(WORKING_SIZE, WORKING_SIZE),
            b.resize_bilinear(WORKING_SIZE, WORKING_SIZE),
        )
    }
}
