use std::fmt::Write as _;

use crate::scalar::Scalar;

use super::{NnError, Tensor2};

pub const CHECKPOINT_HEADER: &str = "socsched-checkpoint v1";

/// `tensor <name> <rows> <cols>` followed by one line of values per row.
/// Values use the shortest representation that parses back exactly.
pub fn write_tensors<'a, T: Scalar + 'a>(
    tensors: impl IntoIterator<Item = (&'a str, &'a Tensor2<T>)>,
) -> String {
    let mut out = String::new();
    for (name, t) in tensors {
        writeln!(out, "tensor {name} {} {}", t.rows(), t.cols()).unwrap();
        for r in 0..t.rows() {
            let row: Vec<String> = t.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    out
}

/// Parses the tensor blocks of `text`, skipping the first `skip` lines.
pub fn read_tensors<T: Scalar>(text: &str, skip: usize) -> Result<Vec<(String, Tensor2<T>)>, NnError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().skip(skip);
    while let Some((i, line)) = lines.next() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| NnError::Checkpoint { line: i + 1, message: m };
        let f: Vec<&str> = line.split_whitespace().collect();
        let (name, rows, cols) = match f.as_slice() {
            ["tensor", name, r, c] => (
                name.to_string(),
                r.parse::<usize>().map_err(|e| bad(e.to_string()))?,
                c.parse::<usize>().map_err(|e| bad(e.to_string()))?,
            ),
            _ => return Err(bad(format!("expected tensor header, got {line:?}"))),
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (j, row) = lines.next().ok_or_else(|| bad(format!("tensor {name} truncated")))?;
            let before = data.len();
            for v in row.split_whitespace() {
                data.push(
                    v.parse::<T>().map_err(|_| NnError::Checkpoint {
                        line: j + 1,
                        message: format!("bad value {v:?}"),
                    })?,
                );
            }
            if data.len() - before != cols {
                return Err(NnError::Checkpoint { line: j + 1, message: format!("expected {cols} values") });
            }
        }
        out.push((name, Tensor2::from_vec(rows, cols, data)?));
    }
    Ok(out)
}
