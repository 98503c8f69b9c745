//! Every corpus kind, its density and its round trip through the set file
//! formats.
use slab::corpus::{density, generate, shell_radii_geometric, CorpusKind, CorpusSpec};
use slab::grid::{GridField, GridSpec};

fn main() -> slab::Result<()> {
    let grid = GridSpec::new(2, 64.0, 64, 2)?;
    let kinds = vec![
        CorpusKind::Random { delta: 0.4, seed: 1 },
        CorpusKind::Lattice { spacing: 4.0 },
        CorpusKind::Shells { radii: shell_radii_geometric(4.0, 1.6, 30.0), thickness: 2.0 },
        CorpusKind::Cantor { ratio: 0.25, depth: 2 },
        CorpusKind::Slabs { normal: vec![1.0, 1.0], period: 8.0, thickness: 3.0 },
    ];
    let dir = std::env::temp_dir().join("slab-corpus-example");
    std::fs::create_dir_all(&dir)?;
    for kind in kinds {
        let spec = CorpusSpec::new(kind, grid);
        let a = generate(&spec)?;
        let path = dir.join("set.slab");
        a.write_set_file(&path)?;
        let back = GridField::read_set_file(&path, 2)?;
        let json = spec.to_json()?;
        let again = generate(&CorpusSpec::from_json(&json)?)?;
        println!(
            "{:<60} density {:.4}  binary round trip {}  regenerated {}",
            format!("{:?}", spec.kind),
            density(&a),
            back == a,
            again == a
        );
    }
    Ok(())
}
