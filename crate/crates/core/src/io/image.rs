use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use byteorder::{BigEndian, LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{invalid, Error, Result};
use crate::render::Image;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Pfm,
    Png,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("pfm") => Ok(ImageFormat::Pfm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(invalid(format!("{}: expected a .pfm or .png extension", path.display()))),
        }
    }
}

/// Little-endian color PFM, bottom row first.
pub fn write_pfm(img: &Image, w: &mut impl Write) -> Result<()> {
    write!(w, "PF\n{} {}\n-1.0\n", img.width, img.height)?;
    let row = 3 * img.width as usize;
    for y in (0..img.height as usize).rev() {
        for &v in &img.data[y * row..(y + 1) * row] {
            w.write_f32::<LittleEndian>(v)?;
        }
    }
    Ok(())
}

fn header_token(r: &mut impl BufRead, offset: &mut u64) -> Result<String> {
    let mut tok = Vec::new();
    loop {
        let mut b = [0u8; 1];
        if r.read(&mut b)? == 0 {
            if tok.is_empty() {
                return Err(Error::Corrupt { offset: *offset, msg: "truncated PFM header".into() });
            }
            break;
        }
        *offset += 1;
        if b[0].is_ascii_whitespace() {
            if tok.is_empty() {
                continue;
            }
            break;
        }
        tok.push(b[0]);
        if tok.len() > 32 {
            return Err(Error::Corrupt { offset: *offset, msg: "PFM header token too long".into() });
        }
    }
    String::from_utf8(tok).map_err(|_| Error::Corrupt { offset: *offset, msg: "non-ASCII PFM header".into() })
}

/// Reads color (`PF`) or greyscale (`Pf`) PFM of either byte order.
pub fn read_pfm(r: &mut impl BufRead) -> Result<Image> {
    let mut off = 0u64;
    let magic = header_token(r, &mut off)?;
    let channels = match magic.as_str() {
        "PF" => 3,
        "Pf" => 1,
        _ => return Err(Error::Corrupt { offset: 0, msg: format!("bad PFM magic {magic:?}") }),
    };
    let mut dim = |what: &str, off: &mut u64| -> Result<u32> {
        let t = header_token(r, off)?;
        match t.parse::<u32>() {
            Ok(0) => Err(Error::Corrupt { offset: *off, msg: format!("PFM {what} is zero") }),
            Ok(v) => Ok(v),
            Err(_) => Err(Error::Corrupt { offset: *off, msg: format!("bad PFM {what} {t:?}") }),
        }
    };
    let width = dim("width", &mut off)?;
    let height = dim("height", &mut off)?;
    let scale_tok = header_token(r, &mut off)?;
    let scale: f64 = scale_tok
        .parse()
        .ok()
        .filter(|s: &f64| s.is_finite() && *s != 0.0)
        .ok_or_else(|| Error::Corrupt { offset: off, msg: format!("bad PFM scale {scale_tok:?}") })?;
    let n = (width as usize)
        .checked_mul(height as usize)
        .and_then(|p| p.checked_mul(channels))
        .filter(|&n| n <= 1 << 30)
        .ok_or_else(|| Error::Corrupt { offset: off, msg: format!("PFM dimensions {width}x{height} too large") })?;
    let mut raw = vec![0f32; n];
    let res = if scale < 0.0 { r.read_f32_into::<LittleEndian>(&mut raw) } else { r.read_f32_into::<BigEndian>(&mut raw) };
    res.map_err(|_| Error::Corrupt { offset: off, msg: "truncated PFM pixel data".into() })?;
    let row = channels * width as usize;
    let mut data = Vec::with_capacity(3 * width as usize * height as usize);
    for y in (0..height as usize).rev() {
        let src = &raw[y * row..(y + 1) * row];
        if channels == 3 {
            data.extend_from_slice(src);
        } else {
            data.extend(src.iter().flat_map(|&v| [v, v, v]));
        }
    }
    Image::from_data(width, height, data)
}

pub fn srgb_encode(v: f32) -> u8 {
    let c = v.clamp(0.0, 1.0) as f64;
    let s = if c <= 0.003_130_8 { 12.92 * c } else { 1.055 * c.powf(1.0 / 2.4) - 0.055 };
    (s * 255.0).round().clamp(0.0, 255.0) as u8
}

pub fn srgb_decode(v: u8) -> f32 {
    let s = v as f64 / 255.0;
    let c = if s <= 0.040_45 { s / 12.92 } else { ((s + 0.055) / 1.055).powf(2.4) };
    c as f32
}

/// 8-bit sRGB PNG after clamping to [0, 1].
pub fn write_png(img: &Image, w: impl Write) -> Result<()> {
    if img.width == 0 || img.height == 0 {
        return Err(invalid("cannot write an empty PNG"));
    }
    let mut enc = png::Encoder::new(w, img.width, img.height);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    enc.set_source_srgb(png::SrgbRenderingIntent::Perceptual);
    let mut wr = enc.write_header().map_err(png_err)?;
    let bytes: Vec<u8> = img.data.iter().map(|&v| srgb_encode(v)).collect();
    wr.write_image_data(&bytes).map_err(png_err)?;
    wr.finish().map_err(png_err)?;
    Ok(())
}

fn png_err(e: impl std::fmt::Display) -> Error {
    Error::Corrupt { offset: 0, msg: format!("png: {e}") }
}

/// 8-bit greyscale, RGB or RGBA PNG decoded back to linear values.
pub fn read_png(r: impl BufRead + std::io::Seek) -> Result<Image> {
    let mut dec = png::Decoder::new(r);
    dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = dec.read_info().map_err(png_err)?;
    let size = reader.output_buffer_size().ok_or_else(|| png_err("image too large"))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    let ch = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => return Err(png_err("unexpanded palette")),
    };
    let mut data = Vec::with_capacity(3 * (info.width * info.height) as usize);
    for px in buf[..info.buffer_size()].chunks_exact(ch) {
        if ch < 3 {
            let v = srgb_decode(px[0]);
            data.extend([v, v, v]);
        } else {
            data.extend(px[..3].iter().map(|&b| srgb_decode(b)));
        }
    }
    Image::from_data(info.width, info.height, data)
}

pub fn write_image(img: &Image, path: &Path) -> Result<()> {
    let fmt = ImageFormat::from_path(path)?;
    let mut w = BufWriter::new(File::create(path)?);
    match fmt {
        ImageFormat::Pfm => write_pfm(img, &mut w)?,
        ImageFormat::Png => write_png(img, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

pub fn read_image(path: &Path) -> Result<Image> {
    let fmt = ImageFormat::from_path(path)?;
    let mut r = BufReader::new(File::open(path)?);
    match fmt {
        ImageFormat::Pfm => read_pfm(&mut r),
        ImageFormat::Png => read_png(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Image {
        let data = (0..3 * 5 * 3).map(|i| (i as f32 * 0.37).sin() * 3.0 + f32::EPSILON).collect();
        Image::from_data(5, 3, data).unwrap()
    }

    #[test]
    fn pfm_roundtrip_bit_exact() {
        let img = sample();
        let mut buf = Vec::new();
        write_pfm(&img, &mut buf).unwrap();
        assert!(buf.starts_with(b"PF\n5 3\n-1.0\n"));
        let back = read_pfm(&mut &buf[..]).unwrap();
        assert_eq!(back.width, 5);
        let bits = |im: &Image| im.data.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&img));
    }

    #[test]
    fn pfm_big_endian_and_grey() {
        let mut buf = b"Pf\n2 1\n1.0\n".to_vec();
        for v in [0.25f32, 2.0] {
            buf.extend(v.to_be_bytes());
        }
        let img = read_pfm(&mut &buf[..]).unwrap();
        assert_eq!(img.data, vec![0.25, 0.25, 0.25, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn pfm_rejects_bad_headers() {
        for h in [&b"PF\n0 3\n-1.0\n"[..], b"PF\n3 0\n-1.0\n", b"P6\n1 1\n-1\n", b"PF\n1 1\n0\n", b"PF\n99999 99999\n-1\n", b"PF\n2 2\n-1.0\n\0\0"] {
            assert!(read_pfm(&mut &h[..]).is_err(), "{:?}", String::from_utf8_lossy(h));
        }
    }

    #[test]
    fn png_clamps_and_encodes() {
        assert_eq!(srgb_encode(1.5), 255);
        assert_eq!(srgb_encode(-0.2), 0);
        assert_eq!(srgb_encode(0.5), 188);
        for b in 0..=255u8 {
            assert_eq!(srgb_encode(srgb_decode(b)), b);
        }
        let img = Image::from_data(2, 1, vec![1.5, 0.0, -1.0, 0.5, 0.25, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_png(&img, &mut buf).unwrap();
        let back = read_png(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.data[0], 1.0);
        assert_eq!(back.data[2], 0.0);
        assert!((back.data[3] - 0.5).abs() < 0.01);
    }
}
