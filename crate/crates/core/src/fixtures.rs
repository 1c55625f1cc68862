//! Bundled reference data: the H_9(11;9) array over Z_207 with its tour table
//! and orderings, the 2-fold H(2,5;5,2), and the cyclically 4-diagonal 6x6
//! skeleton.

use crate::pfarray::{PartiallyFilledArray, Skeleton};

pub const H9_11_9: &str = include_str!("../fixtures/h9_11_9.arr");
pub const LAMBDA2_2X5: &str = include_str!("../fixtures/lambda2_2x5.arr");
pub const LEMMA_CR_6X6: &str = include_str!("../fixtures/lemma_cr_6x6.arr");
pub const H9_11_9_TOUR: &str = include_str!("../fixtures/h9_11_9_tour.txt");
pub const H9_11_9_ORDERINGS: &str = include_str!("../fixtures/h9_11_9_orderings.txt");

pub fn example_h9_11_9() -> PartiallyFilledArray {
    PartiallyFilledArray::parse(H9_11_9).expect("bundled fixture parses")
}

pub fn example_lambda2() -> PartiallyFilledArray {
    PartiallyFilledArray::parse(LAMBDA2_2X5).expect("bundled fixture parses")
}

pub fn lemma_cr_skeleton() -> Skeleton {
    PartiallyFilledArray::parse(LEMMA_CR_6X6).expect("bundled fixture parses").skeleton()
}

/// Orientation used with the H_9(11;9) fixture: every row left to right,
/// column 1 upwards, all other columns downwards.
pub fn example_orientation() -> (Vec<i8>, Vec<i8>) {
    let mut c = vec![1; 11];
    c[0] = -1;
    (vec![1; 11], c)
}

fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Tour labels: `table[i][j]` is the number of successor steps from (1,1)
/// needed to reach cell (i+1, j+1).
pub fn example_tour_table() -> Vec<Vec<Option<usize>>> {
    data_lines(H9_11_9_TOUR)
        .map(|l| l.split(',').map(|f| f.trim().parse().ok()).collect())
        .collect()
}

/// Signed cycles of the reference row ordering, column ordering and their
/// composition, in that order.
pub fn example_orderings() -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<i64>) {
    let mut sections: Vec<Vec<Vec<i64>>> = Vec::new();
    for line in data_lines(H9_11_9_ORDERINGS) {
        if line.starts_with('[') {
            sections.push(Vec::new());
        } else {
            let cycle = line.split(',').map(|f| f.trim().parse().expect("integer")).collect();
            sections.last_mut().expect("section header").push(cycle);
        }
    }
    let composed = sections[2][0].clone();
    (sections[0].clone(), sections[1].clone(), composed)
}
