//! Flat text format for tensors: a header line, the order, the shape, then
//! every entry in linear order (first index fastest), one value per line.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{CoreError, Result};
use crate::tensor::DenseTensor;

const MAGIC: &str = "mgtn-tensor v1";

pub fn write_tensor<W: Write>(mut w: W, t: &DenseTensor) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "{}", t.order())?;
    let shape: Vec<String> = t.shape().iter().map(|s| s.to_string()).collect();
    writeln!(w, "{}", shape.join(" "))?;
    for v in t.data() {
        writeln!(w, "{v:?}")?;
    }
    Ok(())
}

pub fn read_tensor<R: Read>(r: R) -> Result<DenseTensor> {
    let mut lines = BufReader::new(r).lines();
    let magic = next_line(&mut lines)?;
    if magic.trim() != MAGIC {
        return Err(CoreError::TensorFormat(format!(
            "bad header {:?}, expected {MAGIC:?}",
            magic.trim()
        )));
    }
    let order: usize = next_line(&mut lines)?
        .trim()
        .parse()
        .map_err(|e| CoreError::TensorFormat(format!("order: {e}")))?;
    let shape_line = next_line(&mut lines)?;
    let shape: Vec<usize> = shape_line
        .split_whitespace()
        .map(|tok| {
            tok.parse()
                .map_err(|e| CoreError::TensorFormat(format!("shape entry {tok:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if shape.len() != order {
        return Err(CoreError::TensorFormat(format!(
            "order {order} but shape has {} entries",
            shape.len()
        )));
    }
    let expected: usize = shape.iter().product();
    let mut data = Vec::with_capacity(expected);
    for line in lines {
        let line = line?;
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|e| CoreError::TensorFormat(format!("value {tok:?}: {e}")))?;
            data.push(v);
        }
    }
    if data.len() != expected {
        return Err(CoreError::TensorFormat(format!(
            "expected {expected} values, found {}",
            data.len()
        )));
    }
    DenseTensor::new(shape, data)
}

fn next_line(lines: &mut impl Iterator<Item = std::io::Result<String>>) -> Result<String> {
    lines
        .next()
        .ok_or_else(|| CoreError::TensorFormat("unexpected end of file".into()))?
        .map_err(CoreError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn roundtrip_preserves_shape_and_values() {
        let t = reference::randomish_tensor(&[3, 2, 4], 9);
        let mut buf = Vec::new();
        write_tensor(&mut buf, &t).unwrap();
        let back = read_tensor(buf.as_slice()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn scalar_roundtrip() {
        let t = DenseTensor::scalar(-2.25);
        let mut buf = Vec::new();
        write_tensor(&mut buf, &t).unwrap();
        assert_eq!(read_tensor(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn bad_header_is_rejected() {
        let err = read_tensor("nope\n1\n2\n0 0\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("bad header"));
    }
}
