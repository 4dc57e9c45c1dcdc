//! Digital nets from generating matrices: points, the net property, the
//! dual set, and the netfile format.

use qmcnet::net::{box_shapes, char_sum, dual_set, generate_points, is_net, GeneratingMatrices, NetCheck, NetFile, PointSet};
use qmcnet::PrimeBase;

fn main() -> qmcnet::Result<()> {
    let f2 = PrimeBase::new(2)?;
    // Hammersley-type net: C_1 the anti-identity, C_2 the identity
    let anti = vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]];
    let ident = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let g = GeneratingMatrices::new(f2, 3, vec![anti, ident])?;
    let p = generate_points(&g)?;
    for (i, x) in p.to_f64().iter().enumerate() {
        println!("x_{i} = ({:.3}, {:.3})", x[0], x[1]);
    }
    println!("box shapes checked: {:?}", box_shapes(3, 2));
    println!("net property: {}", is_net(&p)?.is_net());

    let dual = dual_set(&g)?;
    println!("dual set ({} nonzero elements): {:?}", dual.len(), dual.elements);
    let probe = [dual.elements[0].clone(), vec![1, 0]];
    for t in &probe {
        println!("  sum_x wal_{t:?}(x) = {:?}", char_sum(&p, t).exact_integer());
    }

    // a corrupted copy fails with a witness box
    let mut rows: Vec<Vec<u64>> = p.points.iter().map(|q| q.numerators.clone()).collect();
    rows[1] = rows[0].clone();
    let bad = PointSet::from_numerators(f2, 3, 2, rows)?;
    if let NetCheck::NotNet(w) = is_net(&bad)? {
        println!("corrupted set: box {:?} holds {} points", w.intervals(f2), w.count);
    }

    let text = NetFile::new(p).to_text();
    print!("{text}");
    assert_eq!(NetFile::parse(&text)?.to_text(), text);
    Ok(())
}
