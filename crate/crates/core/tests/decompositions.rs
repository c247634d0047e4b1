use crossing_forge::cnf::{parse_dimacs, CnfInstance};
use crossing_forge::graph::{subdivide_parallel, validate_decomposition, Decomposition};
use crossing_forge::reduction::reduce;
use crossing_forge::widths::{
    check_monotone, instance_path_decomposition, instance_path_strategy, instance_tree_decomposition,
    simple_path_decomposition,
};

fn widths_for(inst: &CnfInstance) -> (usize, usize, usize) {
    let (g, _) = reduce(inst).unwrap();
    let s = instance_path_strategy(&g).unwrap();
    assert!(check_monotone(&g, &s).unwrap() <= 13);
    let pd = instance_path_decomposition(&g).unwrap();
    let pw = validate_decomposition(&g, &Decomposition::Path(pd.clone())).width().unwrap();
    let td = instance_tree_decomposition(&g).unwrap();
    let tw = validate_decomposition(&g, &Decomposition::Tree(td)).width().unwrap();
    let (sub, spd) = simple_path_decomposition(&g).unwrap();
    let sw = validate_decomposition(&sub.graph, &Decomposition::Path(spd)).width().unwrap();
    assert_eq!(subdivide_parallel(&g).subdivided.len(), sub.subdivided.len());
    (pw, tw, sw)
}

#[test]
fn smallest_instance_widths() {
    let (pw, tw, sw) = widths_for(&CnfInstance::new(1, vec![vec![1]]).unwrap());
    assert!(pw <= 12, "{pw}");
    assert!(tw <= 9, "{tw}");
    assert!(sw <= 13, "{sw}");
    assert!(tw <= pw);
}

#[test]
fn running_example_widths() {
    let inst = parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap();
    let (pw, tw, sw) = widths_for(&inst);
    assert!(pw <= 12, "{pw}");
    assert!(tw <= 9, "{tw}");
    assert!(sw <= 13, "{sw}");
}
