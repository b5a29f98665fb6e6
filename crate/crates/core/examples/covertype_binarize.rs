//! Equal-frequency binarization of the covertype columns.
//!
//! Uses the real file when it is in the data directory
//! (`$NEURALBANDIT_DATA_DIR` or `./data`), otherwise the bundled synthetic
//! fixture.
//!
//!     cargo run --release --example covertype_binarize

use std::path::PathBuf;

use neuralbandit::datastream::{data_dir, locate_covertype, ColumnEncoding};
use neuralbandit::CovertypeDataset;

fn main() -> neuralbandit::Result<()> {
    let path = locate_covertype(&data_dir()).unwrap_or_else(|_| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/covtype-surrogate-2000.csv")
    });
    println!("reading {}", path.display());
    let data = CovertypeDataset::load(&path)?;
    let scheme = data.fit_binarizer()?;
    println!("{} rows -> {} binary features", data.len(), scheme.width());

    for (c, enc) in scheme.columns().iter().enumerate() {
        if let ColumnEncoding::Quantile { cuts, .. } = enc {
            let counts = scheme.bin_counts(data.rows(), c).unwrap_or_default();
            println!("column {c:>2}: cuts {cuts:?} bin sizes {counts:?}");
        }
    }
    for w in scheme.warnings() {
        println!("warning: {w}");
    }
    let x = scheme.encode(&data.rows()[0])?;
    println!("first row active features: {:?}", x.nonzero());
    Ok(())
}
