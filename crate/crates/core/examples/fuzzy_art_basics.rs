//! Complement coding, choice/match scores and the learning rule on a pair of
//! hand-picked inputs.

use lpart::art::{activate, choice, complement_code, create_node, match_degree, select_winner, update_weight};
use lpart::ArtParams;

fn main() -> lpart::Result<()> {
    let params = ArtParams::new(0.001, 0.75, 1.0)?;

    let a = complement_code(&[0.2, 0.8])?;
    let b = complement_code(&[0.3, 0.6])?;
    println!("I(a) = {:?}, |I| = {}", a.as_slice(), a.norm());

    let mut nodes = vec![create_node(&a)];
    println!("self match = {}", match_degree(&a, &nodes[0])?);
    println!(
        "T(b, w0) = {:.4}, V(b, w0) = {:.4}",
        choice(&b, &nodes[0], params.alpha())?,
        match_degree(&b, &nodes[0])?
    );

    let active = activate(nodes.iter().map(Vec::as_slice), &b, &params);
    match select_winner(&active) {
        Ok(j) => {
            nodes[j] = update_weight(&nodes[j], &b, params.beta())?;
            println!("node {j} resonates, learns to {:?}", nodes[j]);
        }
        Err(_) => {
            nodes.push(create_node(&b));
            println!("no resonance, created node {}", nodes.len() - 1);
        }
    }
    Ok(())
}
